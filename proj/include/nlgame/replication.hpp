/**
 * @file replication.hpp
 * @brief Forward wealth, the arbitrage/superhedging/break-even classifier,
 *        and pathwise verifiers for replication, rational stopping and
 *        break-even times.
 *
 * Every statement is decided by exhaustive path enumeration; each path
 * has positive probability because 0 < q < 1.
 *
 * Path-cumulative reflection uses cumulative-before semantics: at step k
 * L(k) is the sum of dL over the nodes at steps 0..k-1 of the path. The
 * increment of a node where a rule stops is therefore never counted at
 * that stop.
 */

#ifndef NLGAME_REPLICATION_HPP
#define NLGAME_REPLICATION_HPP

#include "nlgame/drbsde.hpp"
#include "nlgame/dynkin_oracle.hpp"
#include "nlgame/errors.hpp"
#include "nlgame/generators.hpp"
#include "nlgame/model_core.hpp"
#include "nlgame/pricing.hpp"
#include "nlgame/stopping_rule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlgame {

inline constexpr std::size_t kMaxPathSteps = 24;

inline std::uint64_t path_count(const Lattice& lat) {
    if (lat.steps() > kMaxPathSteps)
        throw Error(ErrorKind::TooManyPaths, "2^" + std::to_string(lat.steps()) + " paths exceed the 2^" +
                                                 std::to_string(kMaxPathSteps) + " enumeration limit");
    return std::uint64_t{1} << lat.steps();
}

/// Flattened node index at every step 0..N of a path.
inline void path_nodes(PathId path, std::size_t steps, std::vector<std::size_t>& out) {
    out.resize(steps + 1);
    std::size_t j = 0;
    for (std::size_t k = 0; k <= steps; ++k) {
        out[k] = node_index(k, j);
        if (k < steps && ((path >> k) & 1U)) ++j;
    }
}

struct WealthPath {
    PathId path = 0;
    std::vector<double> values;
    std::vector<double> L_cum;  ///< filled by attach_reflection
    std::vector<double> U_cum;
};

namespace detail {

inline void wealth_along(double y0, const NodeProcess& hedge, const GeneratorSpec& gen, const NodeProcess& cashflow,
                         const Lattice& lat, const std::vector<std::size_t>& nodes, std::size_t last,
                         std::vector<double>& out) {
    out.resize(last + 1);
    out[0] = y0;
    const double dt = lat.dt();
    for (std::size_t k = 0; k < last; ++k) {
        const std::size_t i = nodes[k];
        const std::size_t next = nodes[k + 1];
        const std::size_t j = i - node_index(k, 0);
        const std::size_t jn = next - node_index(k + 1, 0);
        const double s = lat.price(k, j);
        const double ds = lat.price(k + 1, jn) - s;
        const double v = out[k];
        const double xi = hedge.at_index(i);
        out[k + 1] = v - gen(lat.grid().time(k), v, xi, s) * dt + xi * ds + cashflow.at_index(i);
        if (!std::isfinite(out[k + 1]))
            throw Error(ErrorKind::NonFiniteState, "forward wealth is not finite at step " + std::to_string(k + 1));
    }
}

}  // namespace detail

/// V(k+1) = V(k) - g(t_k, V(k), xi(k), S(k)) dt + xi(k) dS + dA(k) along one path.
inline WealthPath forward_wealth(double y0, const NodeProcess& hedge, const GeneratorSpec& gen,
                                 const NodeProcess& cashflow, const Lattice& lat, PathId path) {
    if (lat.steps() >= 64) throw Error(ErrorKind::TooManyPaths, "path ids hold at most 63 steps");
    if (!std::isfinite(y0)) throw Error(ErrorKind::NonFiniteInput, "initial wealth is not finite");
    require_valid(hedge, lat, "hedge");
    require_valid(cashflow, lat, "cash-flow increments");
    WealthPath w;
    w.path = path;
    std::vector<std::size_t> nodes;
    path_nodes(path, lat.steps(), nodes);
    detail::wealth_along(y0, hedge, gen, cashflow, lat, nodes, lat.steps(), w.values);
    return w;
}

/// Fills L_cum, U_cum with cumulative-before sums of the solution's increments.
inline void attach_reflection(WealthPath& w, const DrbsdeSolution& sol) {
    const std::size_t n = sol.dL.steps();
    std::vector<std::size_t> nodes;
    path_nodes(w.path, n, nodes);
    w.L_cum.assign(n + 1, 0.0);
    w.U_cum.assign(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        w.L_cum[k] = w.L_cum[k - 1] + sol.dL.at_index(nodes[k - 1]);
        w.U_cum[k] = w.U_cum[k - 1] + sol.dU.at_index(nodes[k - 1]);
    }
}

struct ConditionReport {
    bool sh = false;
    bool ao = false;
    bool be = false;
    bool na = false;
    double min_surplus = 0.0;
    double max_surplus = 0.0;
    std::optional<PathId> witness_gain;  ///< first path with strictly positive surplus
    std::optional<PathId> witness_loss;  ///< first path with strictly negative surplus
    std::uint64_t n_paths = 0;
};

/**
 * Classifies (p, hedge, sigma, tau) for one party. sigma is the hedger's
 * cancellation rule, tau the counterparty's exercise rule. Surplus per path:
 * hedger V(x1 + p) + I - Vb(x1), counterparty V(x2 - p) - I - Vb(x2), at
 * sigma ^ tau. A surplus counts as zero within tol * (1 + |V|).
 */
inline ConditionReport classify_quadruplet(double price, const NodeProcess& hedge, const StoppingRule& sigma,
                                           const StoppingRule& tau, const ContractSpec& c, const PartyView& view,
                                           const GeneratorSpec& gen, const Lattice& lat, double tol = 1e-9) {
    c.validate(lat);
    view.account.validate();
    sigma.validate();
    tau.validate();
    require_valid(hedge, lat, "hedge");
    const bool hedger = view.side == Side::Hedger;
    const NodeProcess vb = benchmark_process(view.account, view.endowment, lat);
    NodeProcess cash = c.dA;
    if (!hedger)
        for (std::size_t i = 0; i < lat.size(); ++i) cash.at_index(i) = -c.dA.at_index(i);
    const double start = hedger ? view.endowment + price : view.endowment - price;

    ConditionReport r;
    r.n_paths = path_count(lat);
    r.min_surplus = std::numeric_limits<double>::infinity();
    r.max_surplus = -std::numeric_limits<double>::infinity();
    bool all_zero = true;
    std::vector<std::size_t> nodes;
    std::vector<double> wealth;
    for (PathId path = 0; path < r.n_paths; ++path) {
        path_nodes(path, lat.steps(), nodes);
        const std::size_t ts = sigma.stop_step(path);
        const std::size_t tt = tau.stop_step(path);
        const std::size_t stop = std::min(ts, tt);
        const std::size_t i = nodes[stop];
        const double payment = ts < tt ? c.Xh.at_index(i) : (tt < ts ? c.Xc.at_index(i) : c.Xbar.at_index(i));
        detail::wealth_along(start, hedge, gen, cash, lat, nodes, stop, wealth);
        const double v = wealth[stop];
        const double surplus = hedger ? v + payment - vb.at_index(i) : v - payment - vb.at_index(i);
        const double band = tol * (1.0 + std::abs(v));
        r.min_surplus = std::min(r.min_surplus, surplus);
        r.max_surplus = std::max(r.max_surplus, surplus);
        if (surplus > band && !r.witness_gain) r.witness_gain = path;
        if (surplus < -band && !r.witness_loss) r.witness_loss = path;
        if (std::abs(surplus) > band) all_zero = false;
    }
    r.sh = !r.witness_loss.has_value();
    r.ao = r.sh && r.witness_gain.has_value();
    r.be = all_zero;
    r.na = r.be || r.witness_loss.has_value();
    return r;
}

struct VerifySettings {
    double condition_tol = 1e-9;  ///< classifier zero band, relative to 1 + |V|
    double gap_tol = 1e-10;       ///< replication gap |V - Y|
    double value_tol = 1e-10;     ///< oracle value comparisons, relative to 1 + |Y0|
    double obstacle_tol = 1e-9;   ///< Y equal to an obstacle or payoff, relative to 1 + |Y|
    double probe_scale = 1e-6;    ///< epsilon = probe_scale * (1 + |price|)
};

namespace detail {

/// Contract-side (sigma, tau) from game-side (own stop, other stop).
inline std::pair<StoppingRule, StoppingRule> contract_rules(Side side, const StoppingRule& own,
                                                           const StoppingRule& other) {
    return side == Side::Hedger ? std::pair{own, other} : std::pair{other, own};
}

/// Per-path data of a solved quote: node indices, Y, cumulative-before L and U, wealth from y0 with Z.
struct PathTable {
    std::size_t steps = 0;
    std::uint64_t count = 0;
    std::vector<std::size_t> nodes;
    std::vector<double> L_before;
    std::vector<double> U_before;
    std::vector<double> wealth;

    std::size_t at(PathId p, std::size_t k) const { return static_cast<std::size_t>(p) * (steps + 1) + k; }

    std::size_t stop_step(const StoppingRule& rule, PathId p) const {
        for (std::size_t k = 0; k < steps; ++k)
            if (rule.stops_at_index(nodes[at(p, k)])) return k;
        return steps;
    }
};

inline PathTable build_table(const QuoteResult& q, const NodeProcess& hedge) {
    const Lattice& lat = q.inputs.lattice;
    PathTable t;
    t.steps = lat.steps();
    t.count = path_count(lat);
    const std::size_t width = t.steps + 1;
    t.nodes.resize(t.count * width);
    t.L_before.resize(t.count * width);
    t.U_before.resize(t.count * width);
    t.wealth.resize(t.count * width);
    std::vector<std::size_t> nodes;
    std::vector<double> wealth;
    for (PathId p = 0; p < t.count; ++p) {
        path_nodes(p, t.steps, nodes);
        wealth_along(q.y0, hedge, q.inputs.generator, q.inputs.cashflow, lat, nodes, t.steps, wealth);
        double l = 0.0, u = 0.0;
        for (std::size_t k = 0; k <= t.steps; ++k) {
            t.nodes[t.at(p, k)] = nodes[k];
            t.L_before[t.at(p, k)] = l;
            t.U_before[t.at(p, k)] = u;
            t.wealth[t.at(p, k)] = wealth[k];
            l += q.solution.dL.at_index(nodes[k]);
            u += q.solution.dU.at_index(nodes[k]);
        }
    }
    return t;
}

/// Game payoff at min(own, other): upper if own stops first, lower if other first, tie otherwise.
inline double game_payoff_at(const GamePayoff& payoff, std::size_t own_stop, std::size_t other_stop, std::size_t node) {
    if (own_stop < other_stop) return payoff.upper.at_index(node);
    if (other_stop < own_stop) return payoff.lower.at_index(node);
    return payoff.tie.at_index(node);
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

}  // namespace detail

struct ReplicationReport {
    bool replicates = false;
    double max_gap = 0.0;
    bool break_even = false;         ///< (price, hedge, sigma region rule, tau region rule) is BE
    bool ao_at_plus = false;         ///< AO once the party's wealth is raised by epsilon
    bool sh_fails_at_minus = false;  ///< SH fails once the party's wealth is lowered by epsilon
    bool loss_on_all_paths = false;  ///< the lowered wealth is strictly short on every path
    double epsilon = 0.0;
    std::uint64_t n_paths = 0;
    std::optional<PathId> first_failing_path;

    bool passed() const { return replicates && ao_at_plus && sh_fails_at_minus; }
};

/**
 * Replication of the quote with the solved hedge (or an override): forward
 * wealth from Y0 must match Y on [0, sigma ^ tau] for the two region rules,
 * the quadruplet must break even, and epsilon probes must show AO above and
 * SH failure below. For the counterparty, raising wealth means lowering the
 * price.
 */
inline ReplicationReport verify_replication(const QuoteResult& q, const VerifySettings& settings = {},
                                            const NodeProcess* hedge_override = nullptr) {
    const Lattice& lat = q.inputs.lattice;
    const NodeProcess& hedge = hedge_override ? *hedge_override : q.solution.Z;
    require_valid(hedge, lat, "hedge");
    const StoppingRule own = q.own_rule();
    const StoppingRule other = q.other_rule();
    const auto [sigma, tau] = detail::contract_rules(q.side, own, other);

    ReplicationReport r;
    r.n_paths = path_count(lat);
    std::vector<std::size_t> nodes;
    std::vector<double> wealth;
    for (PathId p = 0; p < r.n_paths; ++p) {
        path_nodes(p, lat.steps(), nodes);
        const std::size_t stop = std::min(own.stop_step(p), other.stop_step(p));
        detail::wealth_along(q.y0, hedge, q.inputs.generator, q.inputs.cashflow, lat, nodes, stop, wealth);
        double gap = 0.0;
        for (std::size_t k = 0; k <= stop; ++k) gap = std::max(gap, std::abs(wealth[k] - q.solution.Y.at_index(nodes[k])));
        r.max_gap = std::max(r.max_gap, gap);
        if (gap > settings.gap_tol && !r.first_failing_path) r.first_failing_path = p;
    }

    const ContractSpec& c = q.contract;
    const GeneratorSpec& gen = q.inputs.generator;
    const ConditionReport at_price =
        classify_quadruplet(q.price, hedge, sigma, tau, c, q.view, gen, lat, settings.condition_tol);
    r.break_even = at_price.be;
    if (!at_price.be && !r.first_failing_path)
        r.first_failing_path = at_price.witness_loss ? at_price.witness_loss : at_price.witness_gain;

    r.epsilon = settings.probe_scale * (1.0 + std::abs(q.price));
    const double wealth_up = q.side == Side::Hedger ? q.price + r.epsilon : q.price - r.epsilon;
    const double wealth_down = q.side == Side::Hedger ? q.price - r.epsilon : q.price + r.epsilon;
    const ConditionReport up = classify_quadruplet(wealth_up, hedge, sigma, tau, c, q.view, gen, lat, settings.condition_tol);
    const ConditionReport down =
        classify_quadruplet(wealth_down, hedge, sigma, tau, c, q.view, gen, lat, settings.condition_tol);
    r.ao_at_plus = up.ao;
    r.sh_fails_at_minus = !down.sh;
    r.loss_on_all_paths = down.max_surplus < 0.0 && !down.witness_gain && down.witness_loss.has_value() &&
                          down.max_surplus < -settings.condition_tol;
    r.replicates = r.break_even && r.max_gap <= settings.gap_tol;
    return r;
}

/// Y along a path, for export next to forward wealth.
inline std::vector<double> solution_along(const QuoteResult& q, PathId path) {
    std::vector<std::size_t> nodes;
    path_nodes(path, q.inputs.lattice.steps(), nodes);
    std::vector<double> y(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) y[k] = q.solution.Y.at_index(nodes[k]);
    return y;
}

/**
 * Rationality of a stopping rule of the quoting party (hedger: cancellation,
 * counterparty: exercise). `sufficient` is the reflection test: no
 * push-down before the stop and Y on the own obstacle there, where a stop
 * at T passes because the payoff at T is the terminal value. `witness`
 * checks that wealth from Y0 with Z superhedges every reply. `rational` is
 * decided by the oracle: sup over replies of the stopped value equals Y0.
 * `necessary` checks the conditions every rational rule must meet against
 * the other party's region and first push-up rules.
 */
struct RationalReport {
    bool sufficient = false;
    bool witness = false;
    bool rational = false;
    bool necessary = false;
    double sup_value = 0.0;
    double y0 = 0.0;
    std::optional<PathId> sufficient_fails_at;
    std::optional<PathId> necessary_fails_at;

    /// sufficient => witness => rational => necessary
    bool consistent() const { return (!sufficient || witness) && (!witness || rational) && (!rational || necessary); }
};

namespace detail {

inline RationalReport rational_from_table(const StoppingRule& own, const QuoteResult& q, const PathTable& t,
                                          const VerifySettings& settings, const StoppingRule& other,
                                          const StoppingRule& other_bar) {
    const DrbsdeInputs& in = q.inputs;
    RationalReport r;
    r.y0 = q.y0;
    r.sup_value = sup_over_maximizer(in.lattice, in.generator, in.cashflow, q.payoff, own).value;
    r.rational = r.sup_value <= q.y0 + settings.value_tol * (1.0 + std::abs(q.y0));

    bool sufficient = true, witness = true, necessary = true;
    for (PathId p = 0; p < t.count; ++p) {
        const std::size_t stop = t.stop_step(own, p);
        const std::size_t node = t.nodes[t.at(p, stop)];
        const double y = q.solution.Y.at_index(node);
        const bool pushed = t.U_before[t.at(p, stop)] > 0.0;
        const bool on_upper = stop == t.steps || obstacle_equal(y, in.upper.at_index(node), settings.obstacle_tol);
        if (pushed || !on_upper) {
            sufficient = false;
            if (!r.sufficient_fails_at) r.sufficient_fails_at = p;
        }

        for (std::size_t k = 0; k <= stop && witness; ++k) {
            const std::size_t i = t.nodes[t.at(p, k)];
            const double v = t.wealth[t.at(p, k)];
            const double need = k < stop ? in.lower.at_index(i) : (stop == t.steps ? q.payoff.tie.at_index(i) : in.upper.at_index(i));
            if (v < need - settings.condition_tol * (1.0 + std::abs(v))) witness = false;
        }

        for (const StoppingRule* reply : {&other, &other_bar}) {
            const std::size_t reply_stop = t.stop_step(*reply, p);
            const std::size_t first = std::min(stop, reply_stop);
            const std::size_t i = t.nodes[t.at(p, first)];
            const double pay = game_payoff_at(q.payoff, stop, reply_stop, i);
            const bool ok = t.U_before[t.at(p, first)] <= 0.0 &&
                            close(q.solution.Y.at_index(i), pay, settings.obstacle_tol);
            if (!ok) {
                necessary = false;
                if (!r.necessary_fails_at) r.necessary_fails_at = p;
            }
        }
    }
    r.sufficient = sufficient;
    r.witness = witness;
    r.necessary = !r.rational || necessary;
    return r;
}

}  // namespace detail

inline RationalReport verify_rational_cancellation(const StoppingRule& own_rule, const QuoteResult& q,
                                                   const VerifySettings& settings = {}) {
    own_rule.validate();
    const detail::PathTable t = detail::build_table(q, q.solution.Z);
    return detail::rational_from_table(own_rule, q, t, settings, q.other_rule(), q.other_bar_rule());
}

/// The five characterizations of a break-even reply against the own region rule.
struct BreakEvenReport {
    bool be_condition = false;     ///< (i) classifier reports BE
    bool na_condition = false;     ///< (ii) classifier reports NA
    bool wealth_matches = false;   ///< (iii) V = J pathwise at the stop
    bool reflection_free = false;  ///< (iv) Y = J, no push-up before the stop, no push-down before the own stop
    bool optimal_reply = false;    ///< (v) stopped value attains sup over replies
    double stopped_value = 0.0;
    double sup_value = 0.0;

    bool all_agree() const {
        return be_condition == na_condition && na_condition == wealth_matches && wealth_matches == reflection_free &&
               reflection_free == optimal_reply;
    }
    bool is_break_even() const { return be_condition; }
};

namespace detail {

inline BreakEvenReport break_even_from_table(const StoppingRule& reply, const QuoteResult& q, const PathTable& t,
                                             const VerifySettings& settings, const StoppingRule& own,
                                             double sup_value) {
    const DrbsdeInputs& in = q.inputs;
    BreakEvenReport r;
    const auto [sigma, tau] = contract_rules(q.side, own, reply);
    const ConditionReport cls = classify_quadruplet(q.price, q.solution.Z, sigma, tau, q.contract, q.view,
                                                    in.generator, in.lattice, settings.condition_tol);
    r.be_condition = cls.be;
    r.na_condition = cls.na;

    bool wealth = true, reflection = true;
    for (PathId p = 0; p < t.count; ++p) {
        const std::size_t own_stop = t.stop_step(own, p);
        const std::size_t reply_stop = t.stop_step(reply, p);
        const std::size_t first = std::min(own_stop, reply_stop);
        const std::size_t i = t.nodes[t.at(p, first)];
        const double pay = game_payoff_at(q.payoff, own_stop, reply_stop, i);
        if (!close(t.wealth[t.at(p, first)], pay, settings.condition_tol)) wealth = false;
        if (!close(q.solution.Y.at_index(i), pay, settings.obstacle_tol) || t.L_before[t.at(p, first)] > 0.0 ||
            t.U_before[t.at(p, own_stop)] > 0.0)
            reflection = false;
    }
    r.wealth_matches = wealth;
    r.reflection_free = reflection;
    StoppedEvaluator eval(in.lattice, in.generator, in.cashflow, q.payoff);
    r.stopped_value = eval(own, reply);
    r.sup_value = sup_value;
    r.optimal_reply = r.stopped_value >= sup_value - settings.value_tol * (1.0 + std::abs(sup_value));
    return r;
}

}  // namespace detail

/// Checks a reply of the other party against the own region rule of the quote.
inline BreakEvenReport verify_break_even(const StoppingRule& reply, const QuoteResult& q,
                                         const VerifySettings& settings = {}) {
    reply.validate();
    const detail::PathTable t = detail::build_table(q, q.solution.Z);
    const StoppingRule own = q.own_rule();
    const DrbsdeInputs& in = q.inputs;
    const double sup = sup_over_maximizer(in.lattice, in.generator, in.cashflow, q.payoff, own).value;
    return detail::break_even_from_table(reply, q, t, settings, own, sup);
}

/// Outcome of the exhaustive stopping-time checks on one quote.
struct StoppingBattery {
    std::uint64_t rules_checked = 0;
    std::uint64_t rational_rules = 0;
    bool region_rule_rational = false;      ///< sigma^h (counterparty: tau^c)
    bool bar_region_rule_rational = false;  ///< first push-down rule
    std::uint64_t implication_violations = 0;
    std::uint64_t earliest_violations = 0;  ///< rational rules <= region rule on E, differing on E
    std::uint64_t latest_violations = 0;    ///< rational rules >= bar rule on E-bar, differing on E-bar
    std::uint64_t break_even_disagreements = 0;
    std::uint64_t break_even_rules = 0;
    bool other_region_break_even = false;   ///< tau^h (counterparty: sigma^c) breaks even
    bool earliest_break_even_applies = false;
    std::uint64_t earliest_break_even_violations = 0;

    bool passed() const {
        return region_rule_rational && bar_region_rule_rational && implication_violations == 0 &&
               earliest_violations == 0 && latest_violations == 0 && break_even_disagreements == 0 &&
               other_region_break_even && earliest_break_even_violations == 0;
    }
};

/**
 * Enumerates every rule of both players on a small tree and checks: the
 * region and first push-down rules are rational; the implication chain of
 * RationalReport for every own rule; the earliest/latest claims on the
 * events {own region rule <= first push-up rule} and {first push-down rule
 * < first push-up rule}; agreement of the five break-even characterizations
 * for every reply; and that the other party's region rule is the earliest
 * break-even reply when the own region rule never stops before it.
 */
inline StoppingBattery run_stopping_battery(const QuoteResult& q, const VerifySettings& settings = {}) {
    const Lattice& lat = q.inputs.lattice;
    const std::vector<StoppingRule> rules = enumerate_rules(lat);
    const detail::PathTable t = detail::build_table(q, q.solution.Z);
    const StoppingRule own = q.own_rule();
    const StoppingRule own_bar = q.own_bar_rule();
    const StoppingRule other = q.other_rule();
    const StoppingRule other_bar = q.other_bar_rule();

    StoppingBattery b;
    b.rules_checked = rules.size();
    const RationalReport own_report = detail::rational_from_table(own, q, t, settings, other, other_bar);
    const RationalReport bar_report = detail::rational_from_table(own_bar, q, t, settings, other, other_bar);
    b.region_rule_rational = own_report.sufficient && own_report.rational && own_report.consistent();
    b.bar_region_rule_rational = bar_report.sufficient && bar_report.rational && bar_report.consistent();

    std::vector<std::size_t> own_stop(t.count), bar_stop(t.count), other_stop(t.count), other_bar_stop(t.count);
    for (PathId p = 0; p < t.count; ++p) {
        own_stop[p] = t.stop_step(own, p);
        bar_stop[p] = t.stop_step(own_bar, p);
        other_stop[p] = t.stop_step(other, p);
        other_bar_stop[p] = t.stop_step(other_bar, p);
    }

    std::vector<std::size_t> stops(t.count);
    for (const StoppingRule& candidate : rules) {
        const RationalReport rr = detail::rational_from_table(candidate, q, t, settings, other, other_bar);
        if (!rr.consistent()) ++b.implication_violations;
        if (!rr.rational) continue;
        ++b.rational_rules;
        for (PathId p = 0; p < t.count; ++p) stops[p] = t.stop_step(candidate, p);

        bool below_on_e = true, differs_on_e = false, above_on_ebar = true, differs_on_ebar = false;
        for (PathId p = 0; p < t.count; ++p) {
            if (own_stop[p] <= other_bar_stop[p]) {
                if (stops[p] > own_stop[p]) below_on_e = false;
                if (stops[p] != own_stop[p]) differs_on_e = true;
            }
            if (bar_stop[p] < other_bar_stop[p]) {
                if (stops[p] < bar_stop[p]) above_on_ebar = false;
                if (stops[p] != bar_stop[p]) differs_on_ebar = true;
            }
        }
        if (below_on_e && differs_on_e) ++b.earliest_violations;
        if (above_on_ebar && differs_on_ebar) ++b.latest_violations;
    }

    const DrbsdeInputs& in = q.inputs;
    const double sup = sup_over_maximizer(in.lattice, in.generator, in.cashflow, q.payoff, own).value;
    b.other_region_break_even = detail::break_even_from_table(other, q, t, settings, own, sup).is_break_even();
    b.earliest_break_even_applies = true;
    for (PathId p = 0; p < t.count; ++p)
        if (own_stop[p] < other_stop[p]) b.earliest_break_even_applies = false;

    for (const StoppingRule& reply : rules) {
        const BreakEvenReport be = detail::break_even_from_table(reply, q, t, settings, own, sup);
        if (!be.all_agree()) ++b.break_even_disagreements;
        if (!be.is_break_even()) continue;
        ++b.break_even_rules;
        if (!b.earliest_break_even_applies) continue;
        bool not_later = true, strictly_earlier = false;
        for (PathId p = 0; p < t.count; ++p) {
            const std::size_t s = t.stop_step(reply, p);
            if (s > other_stop[p]) not_later = false;
            if (s < other_stop[p]) strictly_earlier = true;
        }
        if (not_later && strictly_earlier) ++b.earliest_break_even_violations;
    }
    return b;
}

}  // namespace nlgame

#endif  // NLGAME_REPLICATION_HPP
