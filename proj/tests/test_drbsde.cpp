#include "nlgame/nlgame.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

#include <gtest/gtest.h>

using namespace nlgame;
using nlgame::testing::InstanceFactory;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::ConfigError;
}

DrbsdeInputs random_inputs(InstanceFactory& f, std::size_t min_n, std::size_t max_n, bool slack = false) {
    Lattice lat = f.lattice(min_n, max_n);
    const std::size_t n = lat.steps();
    NodeProcess lower(n), upper(n), cash(n);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        lower.at_index(i) = slack ? -1e6 : f.uniform(-20, 10);
        upper.at_index(i) = slack ? 1e6 : lower.at_index(i) + f.uniform(0.1, 15);
    }
    std::vector<double> terminal(n + 1);
    for (std::size_t j = 0; j <= n; ++j) terminal[j] = slack ? f.uniform(-20, 20) : lower(n, j) + f.uniform(0, 1) * (upper(n, j) - lower(n, j));
    if (f.coin())
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j <= k; ++j) cash(k, j) = f.uniform(-1, 1);
    return DrbsdeInputs{lat, f.generator(lat), lower, upper, terminal, cash};
}

}  // namespace

TEST(SolveBsde, InstanceATerminal) {
    const Lattice lat = nlgame::testing::one_step_lattice();
    const BsdeSolution s = solve_bsde(lat, GeneratorSpec::zero(), {20, 0}, NodeProcess(1));
    EXPECT_DOUBLE_EQ(s.y0(), 10.0);
    EXPECT_DOUBLE_EQ(s.Z(0, 0), -0.5);
}

TEST(SolveBsde, ConstantTerminalIsFixedPoint) {
    InstanceFactory f(21);
    const Lattice lat = f.lattice(5, 5);
    const BsdeSolution s = solve_bsde(lat, GeneratorSpec::zero(), std::vector<double>(6, 3.25), NodeProcess(5));
    for (double v : s.Y.values()) EXPECT_EQ(v, 3.25);
    for (double z : s.Z.values()) EXPECT_EQ(z, 0.0);
}

TEST(SolveBsde, LinearRateClosedForm) {
    for (double r : {0.0, 0.03, 0.2}) {
        const Lattice lat = build_lattice(100, 1.3, 0.7, TimeGrid(0.5, 1));
        const double c = 7.0;
        const BsdeSolution s = solve_bsde(lat, GeneratorSpec::linear(r), {c, c}, NodeProcess(1));
        EXPECT_NEAR(s.y0(), c / (1 + r * 0.5), 1e-12);
        EXPECT_LE(s.residual_max, 1e-12);
    }
}

TEST(SolveBsde, RefusesNonContractingGenerator) {
    const Lattice lat = build_lattice(100, 1.2, 0.8, TimeGrid(1, 1));
    EXPECT_EQ(kind_of([&] { solve_bsde(lat, GeneratorSpec::differential(0, 12), {0, 0}, NodeProcess(1)); }),
              ErrorKind::ContractionViolated);
}

TEST(SolveBsde, ReportsNonConvergence) {
    const Lattice lat = build_lattice(100, 1.2, 0.8, TimeGrid(1, 1));
    auto liar = GeneratorSpec::custom([](double, double y, double, double) { return 1.0 + 0.999 * y; }, 0.0, 0.0);
    EXPECT_EQ(kind_of([&] { solve_bsde(lat, liar, {0, 0}, NodeProcess(1), SolverSettings{1e-15, 5}); }),
              ErrorKind::NonConvergence);
}

TEST(SolveBsde, ZeroDriverMatchesPathExpectation) {
    InstanceFactory f(22);
    for (int i = 0; i < 30; ++i) {
        const Lattice lat = f.lattice(1, 12);
        std::vector<double> terminal(lat.steps() + 1);
        for (double& v : terminal) v = f.uniform(-50, 50);
        const double expected = nlgame::testing::path_expectation(lat.q(), lat.steps(), [&](std::size_t j) { return terminal[j]; });
        EXPECT_NEAR(solve_bsde(lat, GeneratorSpec::zero(), terminal, NodeProcess(lat.steps())).y0(), expected, 1e-12);
    }
}

TEST(SolveDrbsde, InstanceA) {
    const DrbsdeSolution s = solve_drbsde(nlgame::testing::instance_a());
    EXPECT_DOUBLE_EQ(s.y0(), 5.0);
    EXPECT_DOUBLE_EQ(s.dU(0, 0), 5.0);
    EXPECT_DOUBLE_EQ(s.dL(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.Z(0, 0), -0.5);
    EXPECT_DOUBLE_EQ(s.continuation(0, 0), 10.0);
}

TEST(SolveDrbsde, InputErrors) {
    DrbsdeInputs equal = nlgame::testing::instance_a();
    equal.upper(0, 0) = equal.lower(0, 0);
    EXPECT_EQ(kind_of([&] { solve_drbsde(equal); }), ErrorKind::ObstacleOrderViolated);
    DrbsdeInputs out = nlgame::testing::instance_a();
    out.terminal[0] = 30;
    EXPECT_EQ(kind_of([&] { solve_drbsde(out); }), ErrorKind::TerminalOutOfBand);
    DrbsdeInputs fast = nlgame::testing::instance_a();
    fast.generator = GeneratorSpec::linear(2.0);
    EXPECT_EQ(kind_of([&] { solve_drbsde(fast); }), ErrorKind::ContractionViolated);
}

TEST(SolveDrbsde, SlackObstaclesReduceToBsde) {
    InstanceFactory f(23);
    for (int i = 0; i < 40; ++i) {
        const DrbsdeInputs in = random_inputs(f, 1, 15, true);
        const DrbsdeSolution r = solve_drbsde(in);
        const BsdeSolution b = solve_bsde(in.lattice, in.generator, in.terminal, in.cashflow);
        EXPECT_EQ(r.Y, b.Y);
        for (std::size_t k = 0; k < r.dL.size(); ++k) {
            EXPECT_EQ(r.dL.at_index(k), 0.0);
            EXPECT_EQ(r.dU.at_index(k), 0.0);
        }
    }
}

TEST(SolveDrbsde, StructuralInvariants) {
    InstanceFactory f(24);
    for (int i = 0; i < 200; ++i) {
        const DrbsdeInputs in = random_inputs(f, 1, 20);
        const DrbsdeSolution s = solve_drbsde(in);
        EXPECT_LE(s.residual_max, 1e-10);
        for (std::size_t k = 0; k < s.Y.size(); ++k) {
            const double y = s.Y.at_index(k), lo = in.lower.at_index(k), hi = in.upper.at_index(k);
            EXPECT_LE(lo, y);
            EXPECT_LE(y, hi);
            EXPECT_GE(s.dL.at_index(k), 0.0);
            EXPECT_GE(s.dU.at_index(k), 0.0);
            EXPECT_EQ(s.dL.at_index(k) * s.dU.at_index(k), 0.0);
            if (s.dL.at_index(k) > 0) { EXPECT_EQ(y, lo); }
            if (s.dU.at_index(k) > 0) { EXPECT_EQ(y, hi); }
            EXPECT_FALSE(y == lo && y == hi);
        }
        for (std::size_t j = 0; j <= in.lattice.steps(); ++j) EXPECT_EQ(s.Y(in.lattice.steps(), j), in.terminal[j]);
    }
}

TEST(SolveDrbsde, SchemeIsMonotoneInContinuationValues) {
    InstanceFactory f(25);
    for (int i = 0; i < 500; ++i) {
        const Lattice lat = f.lattice(1, 6);
        const GeneratorSpec g = f.generator(lat);
        const std::size_t k = f.pick(0, lat.steps() - 1);
        const std::size_t j = f.pick(0, k);
        const double yu = f.uniform(-50, 50), yd = f.uniform(-50, 50), da = f.uniform(-1, 1), h = f.uniform(1e-6, 1);
        auto step = [&](double a, double b) {
            return std::visit([&](const auto& d) { return detail::implicit_step(d, lat, k, j, a, b, da, {}).value; },
                              g.driver());
        };
        const double base = step(yu, yd);
        EXPECT_GT(step(yu + h, yd), base);
        EXPECT_GT(step(yu, yd + h), base);
    }
}

TEST(SolveDrbsde, StrictComparisonUnderTerminalBump) {
    InstanceFactory f(26);
    for (int i = 0; i < 50; ++i) {
        DrbsdeInputs in = random_inputs(f, 1, 10, true);
        const std::size_t j = f.pick(0, in.lattice.steps());
        const double before = solve_drbsde(in).y0();
        in.terminal[j] += 1e-4;
        EXPECT_GE(solve_drbsde(in).y0() - before, 1e-12);
        in.terminal[j] -= 2e-4;
        EXPECT_LE(solve_drbsde(in).y0(), before);
    }
}

TEST(SolveDrbsde, ForwardRecursionReproducesUnreflectedSolution) {
    InstanceFactory f(27);
    for (int i = 0; i < 100; ++i) {
        const DrbsdeInputs in = random_inputs(f, 1, 10);
        const DrbsdeSolution s = solve_drbsde(in);
        const Lattice& lat = in.lattice;
        for (PathId p = 0; p < (PathId{1} << lat.steps()); ++p) {
            double v = s.y0();
            std::size_t j = 0;
            for (std::size_t k = 0; k < lat.steps(); ++k) {
                if (s.dL(k, j) > 0 || s.dU(k, j) > 0) break;
                const std::size_t jn = j + ((p >> k) & 1U);
                v = v - in.generator(lat.grid().time(k), v, s.Z(k, j), lat.price(k, j)) * lat.dt() +
                    s.Z(k, j) * (lat.price(k + 1, jn) - lat.price(k, j)) + in.cashflow(k, j);
                j = jn;
                EXPECT_NEAR(v, s.Y(k + 1, j), 1e-10);
            }
        }
    }
}

TEST(EvaluateStopped, InstanceAExamples) {
    const DrbsdeInputs in = nlgame::testing::instance_a();
    const GamePayoff payoff = nlgame::testing::instance_a_payoff(in);
    const StoppingRule root = StoppingRule::from_bits(1, 1), at_t(1);
    EXPECT_DOUBLE_EQ(evaluate_stopped(in, root, at_t, payoff), 5.0);
    EXPECT_DOUBLE_EQ(evaluate_stopped(in, root, root, payoff), 0.0);
    EXPECT_DOUBLE_EQ(evaluate_stopped(in, at_t, at_t, payoff), 10.0);
    EXPECT_DOUBLE_EQ(evaluate_stopped(in, at_t, root, payoff), 0.0);
}

TEST(EvaluateStopped, RejectsRuleWithoutTerminalRow) {
    const DrbsdeInputs in = nlgame::testing::instance_a();
    const GamePayoff payoff = nlgame::testing::instance_a_payoff(in);
    NodeSet marks(1);
    marks.set(0, 0);
    EXPECT_EQ(kind_of([&] { StoppingRule::from_marks(marks); }), ErrorKind::InvalidStoppingRule);
}

TEST(EvaluateStopped, BitsAndRulesAgree) {
    InstanceFactory f(28);
    for (int i = 0; i < 20; ++i) {
        const DrbsdeInputs in = random_inputs(f, 1, 4);
        const GamePayoff payoff = make_game_payoff(in, in.lower);
        StoppedEvaluator eval(in.lattice, in.generator, in.cashflow, payoff);
        const std::uint64_t rules = std::uint64_t{1} << interior_node_count(in.lattice.steps());
        for (int t = 0; t < 20; ++t) {
            const std::uint64_t a = f.pick(0, rules - 1), b = f.pick(0, rules - 1);
            EXPECT_EQ(eval.evaluate_bits(a, b),
                      eval(StoppingRule::from_bits(in.lattice.steps(), a), StoppingRule::from_bits(in.lattice.steps(), b)));
        }
    }
}
