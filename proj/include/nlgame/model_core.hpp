/**
 * @file model_core.hpp
 * @brief Time grid, recombining binomial martingale lattice, node-indexed
 *        process storage and the two-rate benchmark cash account.
 */

#ifndef NLGAME_MODEL_CORE_HPP
#define NLGAME_MODEL_CORE_HPP

#include "nlgame/errors.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace nlgame {

/**
 * Uniform time grid on [0, T] with N steps. dt is derived, never supplied.
 */
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
        if (steps == 0) throw Error(ErrorKind::InvalidParameters, "time grid needs at least one step");
        if (!(horizon > 0.0) || !std::isfinite(horizon))
            throw Error(ErrorKind::InvalidParameters, "time grid horizon must be positive and finite");
        dt_ = horizon_ / static_cast<double>(steps_);
    }

    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }

    /// t_k; exact at k = N.
    double time(std::size_t k) const noexcept {
        return horizon_ * static_cast<double>(k) / static_cast<double>(steps_);
    }

private:
    double horizon_;
    std::size_t steps_;
    double dt_;
};

/// Flattened index of node (k, j) with 0 <= j <= k.
constexpr std::size_t node_index(std::size_t k, std::size_t j) noexcept { return k * (k + 1) / 2 + j; }

/// Number of nodes in a tree with N steps.
constexpr std::size_t node_count(std::size_t steps) noexcept { return (steps + 1) * (steps + 2) / 2; }

/**
 * Recombining binomial tree whose one-step measure q makes S a martingale.
 *
 * S(k, j) = s0 * u^j * d^(k - j), q = (1 - d) / (u - d).
 */
class Lattice {
public:
    Lattice(double s0, double up, double down, TimeGrid grid) : s0_(s0), up_(up), down_(down), grid_(grid) {
        if (!(s0 > 0.0) || !std::isfinite(s0)) throw Error(ErrorKind::DegenerateLattice, "s0 must be positive");
        if (!std::isfinite(up) || !std::isfinite(down) || !(down > 0.0) || !(down < 1.0) || !(up > 1.0))
            throw Error(ErrorKind::DegenerateLattice,
                        "need 0 < d < 1 < u (got u=" + std::to_string(up) + ", d=" + std::to_string(down) + ")");
        q_ = (1.0 - down) / (up - down);
        const std::size_t n = grid_.steps();
        prices_.resize(node_count(n));
        for (std::size_t k = 0; k <= n; ++k)
            for (std::size_t j = 0; j <= k; ++j)
                prices_[node_index(k, j)] = s0 * std::pow(up, static_cast<double>(j)) *
                                            std::pow(down, static_cast<double>(k - j));
    }

    double s0() const noexcept { return s0_; }
    double up() const noexcept { return up_; }
    double down() const noexcept { return down_; }
    double q() const noexcept { return q_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t steps() const noexcept { return grid_.steps(); }
    double dt() const noexcept { return grid_.dt(); }
    std::size_t size() const noexcept { return prices_.size(); }

    double price(std::size_t k, std::size_t j) const noexcept { return prices_[node_index(k, j)]; }

    double max_price() const noexcept { return price(steps(), steps()); }

private:
    double s0_;
    double up_;
    double down_;
    double q_;
    TimeGrid grid_;
    std::vector<double> prices_;
};

inline Lattice build_lattice(double s0, double up, double down, TimeGrid grid) {
    return Lattice(s0, up, down, grid);
}

/// Cox-Ross-Rubinstein factors u = exp(vol * sqrt(dt)), d = 1 / u.
inline Lattice build_crr_lattice(double s0, double vol, TimeGrid grid) {
    if (!(vol > 0.0)) throw Error(ErrorKind::DegenerateLattice, "volatility must be positive");
    const double up = std::exp(vol * std::sqrt(grid.dt()));
    return Lattice(s0, up, 1.0 / up, grid);
}

/**
 * Real value at every node of a lattice with N steps.
 */
class NodeProcess {
public:
    NodeProcess() = default;
    explicit NodeProcess(std::size_t steps, double fill = 0.0) : steps_(steps), values_(node_count(steps), fill) {}

    static NodeProcess from_function(const Lattice& lat, const std::function<double(std::size_t, std::size_t)>& f) {
        NodeProcess p(lat.steps());
        for (std::size_t k = 0; k <= lat.steps(); ++k)
            for (std::size_t j = 0; j <= k; ++j) p(k, j) = f(k, j);
        return p;
    }

    std::size_t steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(std::size_t k, std::size_t j) noexcept { return values_[node_index(k, j)]; }
    double operator()(std::size_t k, std::size_t j) const noexcept { return values_[node_index(k, j)]; }

    double& at_index(std::size_t i) noexcept { return values_[i]; }
    double at_index(std::size_t i) const noexcept { return values_[i]; }

    const std::vector<double>& values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool matches(const Lattice& lat) const noexcept { return steps_ == lat.steps() && values_.size() == lat.size(); }

    friend bool operator==(const NodeProcess&, const NodeProcess&) = default;

private:
    std::size_t steps_ = 0;
    std::vector<double> values_;
};

/// Throws unless the process has the lattice's shape and finite entries.
inline void require_valid(const NodeProcess& p, const Lattice& lat, const std::string& what) {
    if (!p.matches(lat))
        throw Error(ErrorKind::InvalidParameters,
                    what + " has " + std::to_string(p.steps()) + " steps, lattice has " + std::to_string(lat.steps()));
    if (!p.all_finite()) throw Error(ErrorKind::NonFiniteInput, what + " contains a non-finite value");
}

/// Lattice prices as a process.
inline NodeProcess price_process(const Lattice& lat) {
    return NodeProcess::from_function(lat, [&](std::size_t k, std::size_t j) { return lat.price(k, j); });
}

/// One-step expectation under q: q * p(k+1, j+1) + (1 - q) * p(k+1, j).
inline double node_expectation(const Lattice& lat, const NodeProcess& proc, std::size_t k, std::size_t j) {
    if (k >= lat.steps()) throw Error(ErrorKind::OutOfRange, "no successor of a terminal node");
    if (j > k) throw Error(ErrorKind::OutOfRange, "up-count exceeds step");
    return lat.q() * proc(k + 1, j + 1) + (1.0 - lat.q()) * proc(k + 1, j);
}

/// Lending and borrowing rates of the unsecured cash account.
struct BenchmarkAccount {
    double r_lend = 0.0;
    double r_borrow = 0.0;

    void validate() const {
        if (!std::isfinite(r_lend) || !std::isfinite(r_borrow) || r_lend < 0.0 || r_borrow < r_lend)
            throw Error(ErrorKind::InvalidParameters, "benchmark needs 0 <= r_lend <= r_borrow");
    }
};

/// Static-hold value of endowment x after k steps: lending account when x >= 0, borrowing otherwise.
inline double benchmark_wealth(const BenchmarkAccount& acct, double x, std::size_t k, double dt) {
    const double rate = x >= 0.0 ? acct.r_lend : acct.r_borrow;
    return x * std::pow(1.0 + rate * dt, static_cast<double>(k));
}

/// V^b(x) as a node process; constant across nodes of one step.
inline NodeProcess benchmark_process(const BenchmarkAccount& acct, double x, const Lattice& lat) {
    return NodeProcess::from_function(
        lat, [&](std::size_t k, std::size_t) { return benchmark_wealth(acct, x, k, lat.dt()); });
}

}  // namespace nlgame

#endif  // NLGAME_MODEL_CORE_HPP
