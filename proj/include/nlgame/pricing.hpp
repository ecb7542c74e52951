/**
 * @file pricing.hpp
 * @brief Game contracts, the obstacle problems of hedger and counterparty,
 *        acceptable prices and the characteristic stopping regions.
 *
 * Payoffs are stated from the hedger's side: Xh is paid on cancellation
 * (hedger stops first), Xc on exercise (counterparty stops first), Xbar
 * when both stop together. dA(k, j) is the contractual cash-flow increment
 * received by the hedger over [t_k, t_{k+1}].
 */

#ifndef NLGAME_PRICING_HPP
#define NLGAME_PRICING_HPP

#include "nlgame/drbsde.hpp"
#include "nlgame/errors.hpp"
#include "nlgame/generators.hpp"
#include "nlgame/model_core.hpp"
#include "nlgame/stopping_rule.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

namespace nlgame {

struct ContractSpec {
    NodeProcess Xh;
    NodeProcess Xc;
    NodeProcess Xbar;
    NodeProcess dA;

    void validate(const Lattice& lat) const {
        require_valid(Xh, lat, "Xh");
        require_valid(Xc, lat, "Xc");
        require_valid(Xbar, lat, "Xbar");
        require_valid(dA, lat, "dA");
        const std::size_t n = lat.steps();
        for (std::size_t k = 0; k <= n; ++k)
            for (std::size_t j = 0; j <= k; ++j) {
                const std::string at = " at node (" + std::to_string(k) + "," + std::to_string(j) + ")";
                if (!(Xh(k, j) < Xc(k, j))) throw Error(ErrorKind::ContractInvariantViolated, "need Xh < Xc" + at);
                if (Xbar(k, j) < Xh(k, j) || Xbar(k, j) > Xc(k, j))
                    throw Error(k == n ? ErrorKind::TerminalOutOfBand : ErrorKind::ContractInvariantViolated,
                                "need Xh <= Xbar <= Xc" + at);
            }
    }
};

enum class Side { Hedger, Counterparty };

constexpr std::string_view to_string(Side s) noexcept { return s == Side::Hedger ? "hedger" : "counterparty"; }

struct PartyView {
    Side side = Side::Hedger;
    double endowment = 0.0;
    BenchmarkAccount account{};
};

/// Hedger problem: lower = Vb - Xc, upper = Vb - Xh, terminal = Vb_T - Xbar_T, cash flows +dA.
inline DrbsdeInputs hedger_obstacles(const ContractSpec& c, const PartyView& view, const GeneratorSpec& gen,
                                     const Lattice& lat) {
    if (view.side != Side::Hedger) throw Error(ErrorKind::InvalidParameters, "hedger_obstacles needs a hedger view");
    c.validate(lat);
    view.account.validate();
    const NodeProcess vb = benchmark_process(view.account, view.endowment, lat);
    const std::size_t n = lat.steps();
    DrbsdeInputs in{lat, gen, NodeProcess(n), NodeProcess(n), std::vector<double>(n + 1), c.dA};
    for (std::size_t i = 0; i < lat.size(); ++i) {
        in.lower.at_index(i) = vb.at_index(i) - c.Xc.at_index(i);
        in.upper.at_index(i) = vb.at_index(i) - c.Xh.at_index(i);
    }
    for (std::size_t j = 0; j <= n; ++j) in.terminal[j] = vb(n, j) - c.Xbar(n, j);
    return in;
}

/// Counterparty problem: lower = Xh + Vb, upper = Xc + Vb, terminal = Xbar_T + Vb_T, cash flows -dA.
inline DrbsdeInputs counterparty_obstacles(const ContractSpec& c, const PartyView& view, const GeneratorSpec& gen,
                                           const Lattice& lat) {
    if (view.side != Side::Counterparty)
        throw Error(ErrorKind::InvalidParameters, "counterparty_obstacles needs a counterparty view");
    c.validate(lat);
    view.account.validate();
    const NodeProcess vb = benchmark_process(view.account, view.endowment, lat);
    const std::size_t n = lat.steps();
    DrbsdeInputs in{lat, gen, NodeProcess(n), NodeProcess(n), std::vector<double>(n + 1), NodeProcess(n)};
    for (std::size_t i = 0; i < lat.size(); ++i) {
        in.lower.at_index(i) = c.Xh.at_index(i) + vb.at_index(i);
        in.upper.at_index(i) = c.Xc.at_index(i) + vb.at_index(i);
        in.cashflow.at_index(i) = -c.dA.at_index(i);
    }
    for (std::size_t j = 0; j <= n; ++j) in.terminal[j] = c.Xbar(n, j) + vb(n, j);
    return in;
}

inline DrbsdeInputs party_obstacles(const ContractSpec& c, const PartyView& view, const GeneratorSpec& gen,
                                    const Lattice& lat) {
    return view.side == Side::Hedger ? hedger_obstacles(c, view, gen, lat) : counterparty_obstacles(c, view, gen, lat);
}

/// Tie payoff of the party's game at every node (Vb - Xbar or Xbar + Vb).
inline NodeProcess party_tie(const ContractSpec& c, const PartyView& view, const Lattice& lat) {
    const NodeProcess vb = benchmark_process(view.account, view.endowment, lat);
    NodeProcess tie(lat.steps());
    for (std::size_t i = 0; i < lat.size(); ++i)
        tie.at_index(i) = view.side == Side::Hedger ? vb.at_index(i) - c.Xbar.at_index(i)
                                                    : c.Xbar.at_index(i) + vb.at_index(i);
    return tie;
}

/**
 * One party's quote. In the party's game the own stop (hedger: sigma,
 * counterparty: tau) is the minimizer and pays `upper`; the other party's
 * stop is the maximizer and pays `lower`.
 *
 * Hedger: region_sigma = {Y = upper}, region_tau = {Y = lower},
 *         region_bar_sigma = {dU > 0}, region_bar_tau = {dL > 0}.
 * Counterparty: region_sigma = {y = lower}, region_tau = {y = upper},
 *               region_bar_sigma = {dl > 0}, region_bar_tau = {du > 0}.
 */
struct QuoteResult {
    Side side = Side::Hedger;
    double price = 0.0;
    double y0 = 0.0;
    ContractSpec contract;
    PartyView view;
    DrbsdeInputs inputs;
    GamePayoff payoff;
    DrbsdeSolution solution;
    NodeSet region_sigma;
    NodeSet region_tau;
    NodeSet region_bar_sigma;
    NodeSet region_bar_tau;

    /// Region where the quoting party's own stop is optimal ({Y = upper}).
    const NodeSet& own_region() const { return side == Side::Hedger ? region_sigma : region_tau; }
    const NodeSet& other_region() const { return side == Side::Hedger ? region_tau : region_sigma; }
    /// First push-down region of the own obstacle ({dU > 0}).
    const NodeSet& own_bar_region() const { return side == Side::Hedger ? region_bar_sigma : region_bar_tau; }
    const NodeSet& other_bar_region() const { return side == Side::Hedger ? region_bar_tau : region_bar_sigma; }

    StoppingRule own_rule() const { return StoppingRule::first_hit(own_region()); }
    StoppingRule other_rule() const { return StoppingRule::first_hit(other_region()); }
    StoppingRule own_bar_rule() const { return StoppingRule::first_hit(own_bar_region()); }
    StoppingRule other_bar_rule() const { return StoppingRule::first_hit(other_bar_region()); }

    double spread_against(const QuoteResult& other) const { return price - other.price; }
};

inline bool obstacle_equal(double y, double obstacle, double tol) {
    return std::abs(y - obstacle) <= tol * (1.0 + std::abs(y));
}

inline QuoteResult acceptable_price(const ContractSpec& c, const PartyView& view, const GeneratorSpec& gen,
                                    const Lattice& lat, double obstacle_tol = 1e-9,
                                    const SolverSettings& settings = {}) {
    if (!(obstacle_tol > 0.0)) throw Error(ErrorKind::InvalidParameters, "obstacle tolerance must be positive");
    DrbsdeInputs inputs = party_obstacles(c, view, gen, lat);
    GamePayoff payoff = make_game_payoff(inputs, party_tie(c, view, lat));
    DrbsdeSolution solution = solve_drbsde(inputs, settings);
    const double y0 = solution.y0();
    const double price = view.side == Side::Hedger ? y0 - view.endowment : view.endowment - y0;

    const std::size_t n = lat.steps();
    NodeSet at_upper(n), at_lower(n), pushed_down(n), pushed_up(n);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double y = solution.Y.at_index(i);
        at_upper.set_index(i, obstacle_equal(y, inputs.upper.at_index(i), obstacle_tol));
        at_lower.set_index(i, obstacle_equal(y, inputs.lower.at_index(i), obstacle_tol));
        pushed_down.set_index(i, solution.dU.at_index(i) > 0.0);
        pushed_up.set_index(i, solution.dL.at_index(i) > 0.0);
    }
    const bool hedger = view.side == Side::Hedger;
    QuoteResult q{view.side,
                  price,
                  y0,
                  c,
                  view,
                  std::move(inputs),
                  std::move(payoff),
                  std::move(solution),
                  hedger ? at_upper : at_lower,
                  hedger ? at_lower : at_upper,
                  hedger ? pushed_down : pushed_up,
                  hedger ? pushed_up : pushed_down};
    return q;
}

/// Sold put with cancellation penalty: Xc = -(K - S)^+, Xh = Xc - penalty, Xbar = Xc.
inline ContractSpec builtin_israeli_put(double strike, double penalty, const Lattice& lat) {
    if (!std::isfinite(penalty) || !(penalty > 0.0))
        throw Error(ErrorKind::InvalidPenalty, "cancellation penalty must be > 0 (got " + std::to_string(penalty) + ")");
    if (!std::isfinite(strike)) throw Error(ErrorKind::InvalidParameters, "strike must be finite");
    const std::size_t n = lat.steps();
    ContractSpec c{NodeProcess(n), NodeProcess(n), NodeProcess(n), NodeProcess(n)};
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t j = 0; j <= k; ++j) {
            const double exercise = -std::max(strike - lat.price(k, j), 0.0);
            c.Xc(k, j) = exercise;
            c.Xh(k, j) = exercise - penalty;
            c.Xbar(k, j) = exercise;
        }
    return c;
}

/// Coupon-paying game bond: hedger pays `coupon` per step, is called at face + call_penalty, put at face - put_discount.
inline ContractSpec builtin_game_bond(double face, double coupon, double call_penalty, double put_discount,
                                      const Lattice& lat) {
    if (!std::isfinite(face) || !std::isfinite(coupon) || !std::isfinite(call_penalty) || !std::isfinite(put_discount))
        throw Error(ErrorKind::InvalidParameters, "game bond parameters must be finite");
    if (!(call_penalty > 0.0)) throw Error(ErrorKind::InvalidParameters, "call penalty must be > 0");
    if (put_discount < 0.0 || !(put_discount < face))
        throw Error(ErrorKind::InvalidParameters, "need 0 <= put_discount < face");
    const std::size_t n = lat.steps();
    ContractSpec c{NodeProcess(n, -(face + call_penalty)), NodeProcess(n, -(face - put_discount)),
                   NodeProcess(n, -face), NodeProcess(n)};
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j <= k; ++j) c.dA(k, j) = -coupon;
    return c;
}

}  // namespace nlgame

#endif  // NLGAME_PRICING_HPP
