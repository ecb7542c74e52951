/**
 * @file drbsde.hpp
 * @brief Backward solvers on the binomial lattice: plain BSDE (g-evaluation),
 *        doubly reflected BSDE, and evaluation of a stopped game payoff.
 *
 * One step from node (k, j):
 *   Z = (Y(k+1, j+1) - Y(k+1, j)) / (S(k+1, j+1) - S(k+1, j))
 *   Y = E_q[Y(k+1, .)] + g(t_k, Y, Z, S(k, j)) dt - dA(k, j)
 * The second line is solved for Y by Picard iteration. With this choice the
 * forward wealth recursion V(k+1) = V(k) - g dt + Z dS + dA reproduces Y
 * along a path up to the fixed-point residual.
 *
 * dA(k, j) is the cash-flow increment A(k+1) - A(k) seen from node (k, j);
 * the terminal row of the cash-flow process is ignored.
 */

#ifndef NLGAME_DRBSDE_HPP
#define NLGAME_DRBSDE_HPP

#include "nlgame/errors.hpp"
#include "nlgame/generators.hpp"
#include "nlgame/model_core.hpp"
#include "nlgame/stopping_rule.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace nlgame {

struct SolverSettings {
    double tolerance = 1e-12;  ///< Picard stop: |y_{n+1} - y_n| <= tolerance * (1 + |y|)
    int max_iterations = 200;
};

namespace detail {

struct StepOutcome {
    double value = 0.0;
    double hedge = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

template <class Driver>
inline StepOutcome implicit_step(const Driver& g, const Lattice& lat, std::size_t k, std::size_t j, double y_up,
                                 double y_down, double cash_increment, const SolverSettings& settings) {
    const double s_up = lat.price(k + 1, j + 1);
    const double s_down = lat.price(k + 1, j);
    const double q = lat.q();
    const double dt = lat.dt();
    const double t = lat.grid().time(k);
    const double s = lat.price(k, j);

    StepOutcome out;
    out.hedge = (y_up - y_down) / (s_up - s_down);
    const double base = q * y_up + (1.0 - q) * y_down - cash_increment;

    double y = base;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        const double next = base + g(t, y, out.hedge, s) * dt;
        if (!std::isfinite(next))
            throw Error(ErrorKind::NonFiniteState, "implicit step diverged at node (" + std::to_string(k) + "," +
                                                       std::to_string(j) + ")");
        const double change = std::abs(next - y);
        y = next;
        if (change <= settings.tolerance * (1.0 + std::abs(y))) {
            out.value = y;
            out.iterations = it;
            out.residual = std::abs(y - (base + g(t, y, out.hedge, s) * dt));
            return out;
        }
    }
    throw Error(ErrorKind::NonConvergence, "fixed point not reached in " + std::to_string(settings.max_iterations) +
                                               " iterations at node (" + std::to_string(k) + "," +
                                               std::to_string(j) + ")");
}

}  // namespace detail

/// Inputs of the reflected problem: obstacles, terminal value, cash flows and driver.
struct DrbsdeInputs {
    Lattice lattice;
    GeneratorSpec generator;
    NodeProcess lower;
    NodeProcess upper;
    std::vector<double> terminal;  ///< one value per terminal node j = 0..N
    NodeProcess cashflow;          ///< signed increments dA(k, j)

    void validate() const {
        const std::size_t n = lattice.steps();
        require_valid(lower, lattice, "lower obstacle");
        require_valid(upper, lattice, "upper obstacle");
        require_valid(cashflow, lattice, "cash-flow increments");
        if (terminal.size() != n + 1)
            throw Error(ErrorKind::InvalidParameters, "terminal needs " + std::to_string(n + 1) + " values");
        for (std::size_t k = 0; k <= n; ++k)
            for (std::size_t j = 0; j <= k; ++j)
                if (!(lower(k, j) < upper(k, j)))
                    throw Error(ErrorKind::ObstacleOrderViolated,
                                "lower >= upper at node (" + std::to_string(k) + "," + std::to_string(j) + ")");
        for (std::size_t j = 0; j <= n; ++j) {
            if (!std::isfinite(terminal[j])) throw Error(ErrorKind::NonFiniteInput, "terminal value is not finite");
            if (terminal[j] < lower(n, j) || terminal[j] > upper(n, j))
                throw Error(ErrorKind::TerminalOutOfBand,
                            "terminal value at up-count " + std::to_string(j) + " leaves [lower, upper]");
        }
        require_contraction(generator, lattice);
    }
};

/// Solution of the plain BSDE.
struct BsdeSolution {
    NodeProcess Y;
    NodeProcess Z;  ///< defined for k < N; zero on the terminal row
    double residual_max = 0.0;
    int iterations_max = 0;

    double y0() const { return Y(0, 0); }
};

/// Solution of the reflected BSDE.
struct DrbsdeSolution {
    NodeProcess Y;
    NodeProcess Z;
    NodeProcess dL;            ///< push-up increment, >= 0
    NodeProcess dU;            ///< push-down increment, >= 0
    NodeProcess continuation;  ///< unreflected implicit-step value
    double residual_max = 0.0;
    int iterations_max = 0;

    double y0() const { return Y(0, 0); }
};

/**
 * g-evaluation of the terminal value with cash flows, no obstacles.
 */
inline BsdeSolution solve_bsde(const Lattice& lat, const GeneratorSpec& gen, const std::vector<double>& terminal,
                               const NodeProcess& cashflow, const SolverSettings& settings = {}) {
    const std::size_t n = lat.steps();
    require_contraction(gen, lat);
    require_valid(cashflow, lat, "cash-flow increments");
    if (terminal.size() != n + 1)
        throw Error(ErrorKind::InvalidParameters, "terminal needs " + std::to_string(n + 1) + " values");
    for (double v : terminal)
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteInput, "terminal value is not finite");

    BsdeSolution sol{NodeProcess(n), NodeProcess(n), 0.0, 0};
    for (std::size_t j = 0; j <= n; ++j) sol.Y(n, j) = terminal[j];
    std::visit(
        [&](const auto& g) {
            for (std::size_t k = n; k-- > 0;)
                for (std::size_t j = 0; j <= k; ++j) {
                    const auto step =
                        detail::implicit_step(g, lat, k, j, sol.Y(k + 1, j + 1), sol.Y(k + 1, j), cashflow(k, j), settings);
                    sol.Y(k, j) = step.value;
                    sol.Z(k, j) = step.hedge;
                    sol.residual_max = std::max(sol.residual_max, step.residual);
                    sol.iterations_max = std::max(sol.iterations_max, step.iterations);
                }
        },
        gen.driver());
    return sol;
}

/**
 * Discretely reflected scheme: implicit step, then projection onto
 * [lower, upper]. dL and dU are read off the projection, so at most one is
 * positive at a node and a positive increment pins Y to its obstacle.
 */
inline DrbsdeSolution solve_drbsde(const DrbsdeInputs& in, const SolverSettings& settings = {}) {
    in.validate();
    const Lattice& lat = in.lattice;
    const std::size_t n = lat.steps();

    DrbsdeSolution sol{NodeProcess(n), NodeProcess(n), NodeProcess(n), NodeProcess(n), NodeProcess(n), 0.0, 0};
    for (std::size_t j = 0; j <= n; ++j) {
        sol.Y(n, j) = in.terminal[j];
        sol.continuation(n, j) = in.terminal[j];
    }
    std::visit(
        [&](const auto& g) {
            for (std::size_t k = n; k-- > 0;)
                for (std::size_t j = 0; j <= k; ++j) {
                    const auto step = detail::implicit_step(g, lat, k, j, sol.Y(k + 1, j + 1), sol.Y(k + 1, j),
                                                            in.cashflow(k, j), settings);
                    const double free_value = step.value;
                    const double lo = in.lower(k, j);
                    const double hi = in.upper(k, j);
                    sol.continuation(k, j) = free_value;
                    sol.Z(k, j) = step.hedge;
                    sol.Y(k, j) = std::min(hi, std::max(lo, free_value));
                    sol.dL(k, j) = std::max(lo - free_value, 0.0);
                    sol.dU(k, j) = std::max(free_value - hi, 0.0);
                    sol.residual_max = std::max(sol.residual_max, step.residual);
                    sol.iterations_max = std::max(sol.iterations_max, step.iterations);
                }
        },
        in.generator.driver());
    return sol;
}

/**
 * Payoff of the stopping game: `lower` is paid when the maximizer stops
 * first, `upper` when the minimizer stops first, `tie` when both stop at
 * once. The terminal row of `tie` is the terminal value.
 */
struct GamePayoff {
    NodeProcess lower;
    NodeProcess upper;
    NodeProcess tie;
};

/// Builds the payoff triple from reflected-problem inputs and an interior tie process.
inline GamePayoff make_game_payoff(const DrbsdeInputs& in, const NodeProcess& tie) {
    require_valid(tie, in.lattice, "tie payoff");
    GamePayoff payoff{in.lower, in.upper, tie};
    const std::size_t n = in.lattice.steps();
    for (std::size_t j = 0; j <= n; ++j) payoff.tie(n, j) = in.terminal[j];
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            if (payoff.tie(k, j) < payoff.lower(k, j) || payoff.tie(k, j) > payoff.upper(k, j))
                throw Error(ErrorKind::InvalidParameters,
                            "tie payoff leaves [lower, upper] at node (" + std::to_string(k) + "," + std::to_string(j) + ")");
    return payoff;
}

/**
 * Backward evaluation of a stopped payoff for a fixed pair of rules. Rules
 * may be given as StoppingRule objects or as interior bit masks (bit i is
 * flattened interior node i); the terminal row always stops.
 */
class StoppedEvaluator {
public:
    StoppedEvaluator(const Lattice& lat, const GeneratorSpec& gen, const NodeProcess& cashflow,
                     const GamePayoff& payoff, SolverSettings settings = {})
        : lat_(lat), gen_(gen), cashflow_(cashflow), payoff_(payoff), settings_(settings), buffer_(lat.size()) {
        require_contraction(gen, lat);
        require_valid(cashflow, lat, "cash-flow increments");
        require_valid(payoff.lower, lat, "lower payoff");
        require_valid(payoff.upper, lat, "upper payoff");
        require_valid(payoff.tie, lat, "tie payoff");
    }

    double operator()(const StoppingRule& minimizer, const StoppingRule& maximizer) {
        minimizer.validate();
        maximizer.validate();
        if (minimizer.steps() != lat_.steps() || maximizer.steps() != lat_.steps())
            throw Error(ErrorKind::InvalidStoppingRule, "rule shape does not match the lattice");
        return run([&](std::size_t i) { return minimizer.stops_at_index(i); },
                   [&](std::size_t i) { return maximizer.stops_at_index(i); });
    }

    double evaluate_bits(std::uint64_t minimizer_bits, std::uint64_t maximizer_bits) {
        return run([&](std::size_t i) { return ((minimizer_bits >> i) & 1U) != 0; },
                   [&](std::size_t i) { return ((maximizer_bits >> i) & 1U) != 0; });
    }

private:
    template <class MinStops, class MaxStops>
    double run(MinStops&& min_stops, MaxStops&& max_stops) {
        const std::size_t n = lat_.steps();
        for (std::size_t j = 0; j <= n; ++j) buffer_[node_index(n, j)] = payoff_.tie(n, j);
        return std::visit(
            [&](const auto& g) {
                for (std::size_t k = n; k-- > 0;)
                    for (std::size_t j = 0; j <= k; ++j) {
                        const std::size_t i = node_index(k, j);
                        const bool a = min_stops(i);
                        const bool b = max_stops(i);
                        double v;
                        if (a && b) v = payoff_.tie.at_index(i);
                        else if (a) v = payoff_.upper.at_index(i);
                        else if (b) v = payoff_.lower.at_index(i);
                        else
                            v = detail::implicit_step(g, lat_, k, j, buffer_[node_index(k + 1, j + 1)],
                                                      buffer_[node_index(k + 1, j)], cashflow_.at_index(i), settings_)
                                    .value;
                        buffer_[i] = v;
                    }
                return buffer_[0];
            },
            gen_.driver());
    }

    const Lattice& lat_;
    const GeneratorSpec& gen_;
    const NodeProcess& cashflow_;
    const GamePayoff& payoff_;
    SolverSettings settings_;
    std::vector<double> buffer_;
};

/// g-evaluation at time 0 of the game payoff stopped at min(minimizer, maximizer).
inline double evaluate_stopped(const Lattice& lat, const GeneratorSpec& gen, const NodeProcess& cashflow,
                               const StoppingRule& minimizer, const StoppingRule& maximizer, const GamePayoff& payoff) {
    StoppedEvaluator eval(lat, gen, cashflow, payoff);
    return eval(minimizer, maximizer);
}

inline double evaluate_stopped(const DrbsdeInputs& in, const StoppingRule& minimizer, const StoppingRule& maximizer,
                               const GamePayoff& payoff) {
    return evaluate_stopped(in.lattice, in.generator, in.cashflow, minimizer, maximizer, payoff);
}

}  // namespace nlgame

#endif  // NLGAME_DRBSDE_HPP
