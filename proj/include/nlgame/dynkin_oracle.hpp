/**
 * @file dynkin_oracle.hpp
 * @brief Brute-force upper and lower values of the nonlinear Dynkin game by
 *        enumerating every pure stopping rule on a small lattice.
 *
 * The minimizer plays the party's own stop (paid `upper` when first), the
 * maximizer the other party's stop (paid `lower` when first). Each pair of
 * rules is valued with StoppedEvaluator, independently of the reflected
 * solver.
 */

#ifndef NLGAME_DYNKIN_ORACLE_HPP
#define NLGAME_DYNKIN_ORACLE_HPP

#include "nlgame/drbsde.hpp"
#include "nlgame/errors.hpp"
#include "nlgame/stopping_rule.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace nlgame {

inline constexpr std::size_t kMaxEnumeratedNodes = 15;
inline constexpr std::uint64_t kFullPairLimit = 10'000'000;

inline std::size_t interior_node_count(std::size_t steps) noexcept { return node_count(steps) - (steps + 1); }

inline void require_enumerable(const Lattice& lat) {
    const std::size_t interior = interior_node_count(lat.steps());
    if (interior > kMaxEnumeratedNodes)
        throw Error(ErrorKind::TooLarge, std::to_string(interior) + " non-terminal nodes give 2^" +
                                             std::to_string(interior) + " rules per player (limit 2^" +
                                             std::to_string(kMaxEnumeratedNodes) + ")");
}

/// Canonical order: fewer marked nodes first, then the lexicographically smallest sorted node list.
inline bool canonical_less(std::uint64_t a, std::uint64_t b) noexcept {
    const int pa = std::popcount(a);
    const int pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    if (a == b) return false;
    const int first_diff = std::countr_zero(a ^ b);
    return ((a >> first_diff) & 1U) != 0;
}

/// All 2^(interior nodes) rules, terminal row always marked, in bit-mask order.
inline std::vector<StoppingRule> enumerate_rules(const Lattice& lat) {
    require_enumerable(lat);
    const std::uint64_t count = std::uint64_t{1} << interior_node_count(lat.steps());
    std::vector<StoppingRule> rules;
    rules.reserve(count);
    for (std::uint64_t bits = 0; bits < count; ++bits) rules.push_back(StoppingRule::from_bits(lat.steps(), bits));
    return rules;
}

/// Optimal reply of one player against a fixed rule of the other.
struct BestResponse {
    double value = 0.0;
    StoppingRule rule;
};

namespace detail {

inline StoppingRule with_mark(const StoppingRule& r, std::size_t k, std::size_t j) {
    NodeSet m = r.marks();
    m.set(k, j);
    return StoppingRule::from_marks(m);
}

// Backward induction for one player against a fixed opponent rule. The
// player stops only where stopping is strictly better than continuing.
template <bool Maximize, class OpponentStops>
BestResponse best_response(const Lattice& lat, const GeneratorSpec& gen, const NodeProcess& cashflow,
                           const GamePayoff& payoff, OpponentStops&& opponent_stops, const SolverSettings& settings,
                           std::vector<double>& buffer, bool want_rule) {
    const std::size_t n = lat.steps();
    BestResponse out;
    if (want_rule) out.rule = StoppingRule(n);
    buffer.resize(lat.size());
    for (std::size_t j = 0; j <= n; ++j) buffer[node_index(n, j)] = payoff.tie(n, j);
    std::visit(
        [&](const auto& g) {
            for (std::size_t k = n; k-- > 0;)
                for (std::size_t j = 0; j <= k; ++j) {
                    const std::size_t i = node_index(k, j);
                    if (opponent_stops(i)) {
                        // Opponent stopping alone beats a tie for this player.
                        buffer[i] = Maximize ? payoff.upper.at_index(i) : payoff.lower.at_index(i);
                        continue;
                    }
                    const double cont = implicit_step(g, lat, k, j, buffer[node_index(k + 1, j + 1)],
                                                      buffer[node_index(k + 1, j)], cashflow.at_index(i), settings)
                                            .value;
                    const double stop = Maximize ? payoff.lower.at_index(i) : payoff.upper.at_index(i);
                    const bool better = Maximize ? stop > cont : stop < cont;
                    buffer[i] = better ? stop : cont;
                    if (better && want_rule) out.rule = with_mark(out.rule, k, j);
                }
        },
        gen.driver());
    out.value = buffer[0];
    return out;
}

}  // namespace detail

/// sup over maximizer rules of the stopped value, the minimizer rule held fixed.
inline BestResponse sup_over_maximizer(const Lattice& lat, const GeneratorSpec& gen, const NodeProcess& cashflow,
                                       const GamePayoff& payoff, const StoppingRule& minimizer,
                                       const SolverSettings& settings = {}) {
    minimizer.validate();
    require_contraction(gen, lat);
    std::vector<double> buffer;
    return detail::best_response<true>(
        lat, gen, cashflow, payoff, [&](std::size_t i) { return minimizer.stops_at_index(i); }, settings, buffer, true);
}

/// inf over minimizer rules of the stopped value, the maximizer rule held fixed.
inline BestResponse inf_over_minimizer(const Lattice& lat, const GeneratorSpec& gen, const NodeProcess& cashflow,
                                       const GamePayoff& payoff, const StoppingRule& maximizer,
                                       const SolverSettings& settings = {}) {
    maximizer.validate();
    require_contraction(gen, lat);
    std::vector<double> buffer;
    return detail::best_response<false>(
        lat, gen, cashflow, payoff, [&](std::size_t i) { return maximizer.stops_at_index(i); }, settings, buffer, true);
}

struct GameValueReport {
    double upper_value = 0.0;  ///< inf over minimizer rules of sup over maximizer rules
    double lower_value = 0.0;  ///< sup over maximizer rules of inf over minimizer rules
    StoppingRule argmin_sigma;
    StoppingRule argmax_tau;
    std::uint64_t rule_count = 0;
    bool full_pair_enumeration = true;
};

struct OracleSettings {
    /// Values within tie_tolerance * (1 + |v|) of the optimum count as optimal for witness selection.
    double tie_tolerance = 1e-12;
    /// Force the fixed-rule backward induction path even when full pair enumeration fits.
    bool force_best_response = false;
    unsigned workers = 1;
    SolverSettings solver{};
};

namespace detail {

template <class Fn>
void parallel_blocks(std::uint64_t count, unsigned workers, Fn&& fn) {
    workers = std::max(1U, workers);
    if (workers == 1 || count < 2) {
        fn(std::uint64_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t block = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = w * block;
        const std::uint64_t end = std::min(count, begin + block);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

inline std::uint64_t pick_canonical(const std::vector<double>& scores, double target, double tol, bool at_most) {
    std::uint64_t best = 0;
    bool found = false;
    for (std::uint64_t i = 0; i < scores.size(); ++i) {
        const bool optimal = at_most ? scores[i] <= target + tol : scores[i] >= target - tol;
        if (optimal && (!found || canonical_less(i, best))) {
            best = i;
            found = true;
        }
    }
    return best;
}

}  // namespace detail

/**
 * Upper and lower game values by exhaustive enumeration. Full pair
 * enumeration is used while (2^m)^2 <= 1e7 with m interior nodes; above
 * that each rule is answered by the opponent's backward induction.
 */
inline GameValueReport game_value_brute(const Lattice& lat, const GeneratorSpec& gen, const NodeProcess& cashflow,
                                        const GamePayoff& payoff, const OracleSettings& settings = {}) {
    require_enumerable(lat);
    require_contraction(gen, lat);
    const std::size_t m = interior_node_count(lat.steps());
    const std::uint64_t rules = std::uint64_t{1} << m;
    const bool full = !settings.force_best_response && rules * rules <= kFullPairLimit;

    std::vector<double> row_max(rules, -std::numeric_limits<double>::infinity());
    std::vector<double> col_min(rules, std::numeric_limits<double>::infinity());

    if (full) {
        std::vector<double> matrix(rules * rules);
        detail::parallel_blocks(rules, settings.workers, [&](std::uint64_t begin, std::uint64_t end) {
            StoppedEvaluator eval(lat, gen, cashflow, payoff, settings.solver);
            for (std::uint64_t s = begin; s < end; ++s)
                for (std::uint64_t t = 0; t < rules; ++t) matrix[s * rules + t] = eval.evaluate_bits(s, t);
        });
        for (std::uint64_t s = 0; s < rules; ++s)
            for (std::uint64_t t = 0; t < rules; ++t) {
                const double v = matrix[s * rules + t];
                row_max[s] = std::max(row_max[s], v);
                col_min[t] = std::min(col_min[t], v);
            }
    } else {
        detail::parallel_blocks(rules, settings.workers, [&](std::uint64_t begin, std::uint64_t end) {
            std::vector<double> buffer;
            for (std::uint64_t r = begin; r < end; ++r) {
                auto stops = [r](std::size_t i) { return ((r >> i) & 1U) != 0; };
                row_max[r] =
                    detail::best_response<true>(lat, gen, cashflow, payoff, stops, settings.solver, buffer, false).value;
                col_min[r] =
                    detail::best_response<false>(lat, gen, cashflow, payoff, stops, settings.solver, buffer, false).value;
            }
        });
    }

    GameValueReport report;
    report.rule_count = rules;
    report.full_pair_enumeration = full;
    report.upper_value = *std::min_element(row_max.begin(), row_max.end());
    report.lower_value = *std::max_element(col_min.begin(), col_min.end());
    const double tol_up = settings.tie_tolerance * (1.0 + std::abs(report.upper_value));
    const double tol_lo = settings.tie_tolerance * (1.0 + std::abs(report.lower_value));
    report.argmin_sigma = StoppingRule::from_bits(lat.steps(), detail::pick_canonical(row_max, report.upper_value, tol_up, true));
    report.argmax_tau = StoppingRule::from_bits(lat.steps(), detail::pick_canonical(col_min, report.lower_value, tol_lo, false));
    return report;
}

inline GameValueReport game_value_brute(const DrbsdeInputs& in, const GamePayoff& payoff,
                                        const OracleSettings& settings = {}) {
    return game_value_brute(in.lattice, in.generator, in.cashflow, payoff, settings);
}

struct SaddleDiagnosis {
    bool matches_upper = false;  ///< |y0 - upper| <= tol; the flag pricing relies on
    bool has_value = false;      ///< |upper - lower| <= tol; reported only
};

inline SaddleDiagnosis saddle_check(const GameValueReport& report, double y0, double tol) {
    return {std::abs(y0 - report.upper_value) <= tol, std::abs(report.upper_value - report.lower_value) <= tol};
}

}  // namespace nlgame

#endif  // NLGAME_DYNKIN_ORACLE_HPP
