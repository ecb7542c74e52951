#include "nlgame/nlgame.hpp"
#include "nlgame/io.hpp"
#include "support/random_instances.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace nlgame;

TEST(TimeGrid, DerivesStep) {
    TimeGrid g(2.0, 8);
    EXPECT_DOUBLE_EQ(g.dt(), 0.25);
    EXPECT_EQ(g.time(8), 2.0);
    EXPECT_THROW(TimeGrid(1.0, 0), Error);
    EXPECT_THROW(TimeGrid(0.0, 3), Error);
}

TEST(Lattice, OneStepInstance) {
    Lattice lat = build_lattice(100, 1.2, 0.8, TimeGrid(1, 1));
    EXPECT_DOUBLE_EQ(lat.q(), 0.5);
    EXPECT_DOUBLE_EQ(lat.price(1, 1), 120.0);
    EXPECT_DOUBLE_EQ(lat.price(1, 0), 80.0);
}

TEST(Lattice, Recombines) {
    Lattice lat = build_lattice(100, 1.2, 0.8, TimeGrid(1, 2));
    EXPECT_NEAR(lat.price(2, 1), 96.0, 1e-12);
}

TEST(Lattice, DegenerateFactorsRejected) {
    for (auto [u, d] : {std::pair{1.1, 1.05}, std::pair{0.9, 0.8}, std::pair{1.2, 1.2}, std::pair{1.2, 0.0}}) {
        try {
            build_lattice(100, u, d, TimeGrid(1, 1));
            FAIL() << "accepted u=" << u << " d=" << d;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::DegenerateLattice);
        }
    }
}

TEST(Lattice, MartingaleIdentity) {
    nlgame::testing::InstanceFactory f(1);
    for (int i = 0; i < 100; ++i) {
        Lattice lat = f.lattice(1, 30);
        EXPECT_NEAR(lat.q() * lat.up() + (1 - lat.q()) * lat.down(), 1.0, 1e-14);
        const NodeProcess s = price_process(lat);
        for (std::size_t k = 0; k < lat.steps(); ++k)
            for (std::size_t j = 0; j <= k; ++j)
                EXPECT_NEAR(node_expectation(lat, s, k, j), s(k, j), 1e-12 * s(k, j));
    }
}

TEST(NodeExpectation, Examples) {
    Lattice lat = build_lattice(100, 1.2, 0.8, TimeGrid(1, 1));
    NodeProcess y(1);
    y(1, 0) = 20;
    y(1, 1) = 0;
    EXPECT_DOUBLE_EQ(node_expectation(lat, y, 0, 0), 10.0);
    EXPECT_DOUBLE_EQ(node_expectation(lat, NodeProcess(1, 3.5), 0, 0), 3.5);
    try {
        node_expectation(lat, y, 1, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
    }
}

TEST(Benchmark, Examples) {
    EXPECT_EQ(benchmark_wealth({0, 0}, 7, 5, 0.1), 7.0);
    EXPECT_DOUBLE_EQ(benchmark_wealth({0.02, 0.1}, -1, 1, 1.0), -1.1);
    EXPECT_EQ(benchmark_wealth({0.02, 0.1}, 0, 9, 0.5), 0.0);
    EXPECT_THROW((BenchmarkAccount{0.1, 0.02}.validate()), Error);
}

TEST(Benchmark, MonotoneAndPositivelyHomogeneous) {
    nlgame::testing::InstanceFactory f(2);
    for (int i = 0; i < 500; ++i) {
        const BenchmarkAccount a = f.account();
        const double x1 = f.uniform(-10, 10), x2 = f.uniform(-10, 10), lam = f.uniform(0.1, 5);
        const std::size_t k = f.pick(0, 20);
        const double dt = f.uniform(0.01, 1);
        if (x1 <= x2) { EXPECT_LE(benchmark_wealth(a, x1, k, dt), benchmark_wealth(a, x2, k, dt)); }
        EXPECT_NEAR(benchmark_wealth(a, lam * x1, k, dt), lam * benchmark_wealth(a, x1, k, dt),
                    1e-12 * (1 + std::abs(lam * x1)) * 10);
    }
}

TEST(NodeProcess, CsvRoundTripIsBitExact) {
    nlgame::testing::InstanceFactory f(3);
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = f.pick(1, 12);
        NodeProcess p(n);
        for (std::size_t k = 0; k < p.size(); ++k) p.at_index(k) = f.uniform(-1e6, 1e6) * std::pow(10.0, f.uniform(-20, 20));
        p.at_index(0) = 0.1 + 0.2;
        std::istringstream in(node_csv_string(p));
        EXPECT_EQ(read_node_csv(in, n), p);
    }
}

TEST(NodeProcess, RequireValidRejectsNonFinite) {
    Lattice lat = build_lattice(100, 1.2, 0.8, TimeGrid(1, 2));
    NodeProcess p(2);
    p(1, 1) = std::nan("");
    try {
        require_valid(p, lat, "p");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFiniteInput);
    }
    EXPECT_THROW(require_valid(NodeProcess(3), lat, "p"), Error);
}
