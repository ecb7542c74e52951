#include "nlgame/nlgame.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

#include <gtest/gtest.h>

using namespace nlgame;
using nlgame::testing::InstanceFactory;

namespace {

bool close(double a, double b, double tol = 1e-10) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

QuoteResult random_quote(InstanceFactory& f, std::size_t max_steps, Side side) {
    const nlgame::testing::RandomInstance r = f.instance(1, max_steps);
    return acceptable_price(r.contract, side == Side::Hedger ? nlgame::testing::hedger_view(r) : nlgame::testing::counterparty_view(r),
                            r.generator, r.lattice);
}

}  // namespace

TEST(EnumerateRules, Counts) {
    EXPECT_EQ(enumerate_rules(build_lattice(100, 1.1, 0.9, TimeGrid(1, 1))).size(), 2U);
    EXPECT_EQ(enumerate_rules(build_lattice(100, 1.1, 0.9, TimeGrid(1, 2))).size(), 8U);
    EXPECT_EQ(enumerate_rules(build_lattice(100, 1.1, 0.9, TimeGrid(1, 5))).size(), 32768U);
    try {
        enumerate_rules(build_lattice(100, 1.1, 0.9, TimeGrid(1, 6)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
    }
}

TEST(EnumerateRules, EveryRuleStopsAtMaturity) {
    const Lattice lat = build_lattice(100, 1.1, 0.9, TimeGrid(1, 3));
    for (const StoppingRule& r : enumerate_rules(lat))
        for (std::size_t j = 0; j <= 3; ++j) EXPECT_TRUE(r.stops_at(3, j));
}

TEST(CanonicalOrder, FewerMarksThenLowestNode) {
    EXPECT_TRUE(canonical_less(0b0, 0b1));
    EXPECT_TRUE(canonical_less(0b100, 0b011));
    EXPECT_TRUE(canonical_less(0b001, 0b010));
    EXPECT_TRUE(canonical_less(0b011, 0b110));
    EXPECT_FALSE(canonical_less(0b101, 0b101));
}

TEST(GameValueBrute, InstanceA) {
    const DrbsdeInputs in = nlgame::testing::instance_a();
    const GameValueReport r = game_value_brute(in, nlgame::testing::instance_a_payoff(in));
    EXPECT_DOUBLE_EQ(r.upper_value, 5.0);
    EXPECT_DOUBLE_EQ(r.lower_value, 5.0);
    EXPECT_TRUE(r.argmin_sigma.stops_at(0, 0));
    EXPECT_EQ(r.argmax_tau, StoppingRule(1));
    EXPECT_EQ(r.rule_count, 2U);
    EXPECT_TRUE(r.full_pair_enumeration);
}

TEST(GameValueBrute, PenaltyAboveStrikeGivesAmericanValue) {
    const DrbsdeInputs in = nlgame::testing::instance_a(30.0);
    const GameValueReport r = game_value_brute(in, nlgame::testing::instance_a_payoff(in));
    EXPECT_DOUBLE_EQ(r.upper_value, 10.0);
    EXPECT_DOUBLE_EQ(r.upper_value, nlgame::testing::american_put_reference(100, 1.2, 0.8, 1, 100));
    EXPECT_EQ(r.argmin_sigma, StoppingRule(1));
}

TEST(GameValueBrute, SlackObstaclesGiveBsdeValue) {
    const Lattice lat = build_lattice(100, 1.2, 0.8, TimeGrid(1, 2));
    DrbsdeInputs in{lat, GeneratorSpec::linear(0.05), NodeProcess(2, -1e3), NodeProcess(2, 1e3), {3, -1, 7}, NodeProcess(2)};
    const GameValueReport r = game_value_brute(in, make_game_payoff(in, NodeProcess(2)));
    const double plain = solve_bsde(lat, in.generator, in.terminal, in.cashflow).y0();
    EXPECT_NEAR(r.upper_value, plain, 1e-12);
    EXPECT_NEAR(r.lower_value, plain, 1e-12);
    EXPECT_EQ(r.argmin_sigma, StoppingRule(2));
    EXPECT_EQ(r.argmax_tau, StoppingRule(2));
}

TEST(GameValueBrute, RefusesLargeTree) {
    const Lattice lat = build_lattice(100, 1.1, 0.9, TimeGrid(1, 20));
    const NodeProcess zero(20);
    const GamePayoff payoff{NodeProcess(20, -1), NodeProcess(20, 1), zero};
    try {
        game_value_brute(lat, GeneratorSpec::zero(), zero, payoff);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
    }
}

TEST(SaddleCheck, Examples) {
    GameValueReport r;
    r.upper_value = 5.0;
    r.lower_value = 5.0;
    SaddleDiagnosis d = saddle_check(r, 5.0, 1e-10);
    EXPECT_TRUE(d.matches_upper);
    EXPECT_TRUE(d.has_value);
    r.lower_value = 4.0;
    d = saddle_check(r, 5.0, 1e-10);
    EXPECT_TRUE(d.matches_upper);
    EXPECT_FALSE(d.has_value);
    d = saddle_check(r, 5.1, 1e-10);
    EXPECT_FALSE(d.matches_upper);
}

TEST(GameValueBrute, MatchesReflectedSolution) {
    InstanceFactory f(31);
    for (int i = 0; i < 60; ++i)
        for (Side side : {Side::Hedger, Side::Counterparty}) {
            const QuoteResult q = random_quote(f, 3, side);
            const GameValueReport r = game_value_brute(q.inputs, q.payoff);
            EXPECT_TRUE(close(q.y0, r.upper_value)) << q.y0 << " vs " << r.upper_value;
            EXPECT_GE(r.upper_value, r.lower_value - 1e-12);
        }
}

TEST(GameValueBrute, OwnRegionRuleIsOptimalForMinimizer) {
    InstanceFactory f(32);
    for (int i = 0; i < 60; ++i)
        for (Side side : {Side::Hedger, Side::Counterparty}) {
            const QuoteResult q = random_quote(f, 5, side);
            const BestResponse b = sup_over_maximizer(q.inputs.lattice, q.inputs.generator, q.inputs.cashflow, q.payoff,
                                                      q.own_rule());
            EXPECT_TRUE(close(b.value, q.y0)) << b.value << " vs " << q.y0;
        }
}

TEST(GameValueBrute, UpperValueMonotoneInObstacles) {
    InstanceFactory f(33);
    for (int i = 0; i < 40; ++i) {
        QuoteResult q = random_quote(f, 3, Side::Hedger);
        const double before = game_value_brute(q.inputs, q.payoff).upper_value;
        GamePayoff raised = q.payoff;
        const double h = f.uniform(0.01, 2.0);
        for (std::size_t k = 0; k < raised.lower.size(); ++k) {
            raised.lower.at_index(k) += h;
            raised.upper.at_index(k) += h;
            raised.tie.at_index(k) += h;
        }
        EXPECT_GE(game_value_brute(q.inputs.lattice, q.inputs.generator, q.inputs.cashflow, raised).upper_value,
                  before - 1e-12);
    }
}

TEST(GameValueBrute, BestResponsePathAgreesWithFullMatrix) {
    InstanceFactory f(34);
    for (int i = 0; i < 30; ++i) {
        const QuoteResult q = random_quote(f, 3, i % 2 ? Side::Hedger : Side::Counterparty);
        const GameValueReport full = game_value_brute(q.inputs, q.payoff);
        OracleSettings s;
        s.force_best_response = true;
        const GameValueReport dp = game_value_brute(q.inputs, q.payoff, s);
        EXPECT_TRUE(full.full_pair_enumeration);
        EXPECT_FALSE(dp.full_pair_enumeration);
        EXPECT_TRUE(close(full.upper_value, dp.upper_value, 1e-12));
        EXPECT_TRUE(close(full.lower_value, dp.lower_value, 1e-12));
        EXPECT_EQ(full.argmin_sigma, dp.argmin_sigma);
        EXPECT_EQ(full.argmax_tau, dp.argmax_tau);
    }
}

TEST(GameValueBrute, WorkersDoNotChangeResult) {
    InstanceFactory f(35);
    const QuoteResult q = random_quote(f, 4, Side::Hedger);
    OracleSettings s;
    s.workers = 4;
    const GameValueReport a = game_value_brute(q.inputs, q.payoff);
    const GameValueReport b = game_value_brute(q.inputs, q.payoff, s);
    EXPECT_EQ(a.upper_value, b.upper_value);
    EXPECT_EQ(a.lower_value, b.lower_value);
    EXPECT_EQ(a.argmin_sigma, b.argmin_sigma);
}
