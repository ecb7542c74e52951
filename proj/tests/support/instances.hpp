// Hand-checked fixtures shared by several suites.
#ifndef NLGAME_TESTS_INSTANCES_HPP
#define NLGAME_TESTS_INSTANCES_HPP

#include "nlgame/nlgame.hpp"

#include <algorithm>

namespace nlgame::testing {

/// One step, s0 = 100, u = 1.2, d = 0.8, T = 1.
inline Lattice one_step_lattice() { return build_lattice(100, 1.2, 0.8, TimeGrid(1, 1)); }

/// Hedger problem of the one-step Israeli put, K = 100, penalty delta, zero driver.
inline DrbsdeInputs instance_a(double delta = 5.0) {
    Lattice lat = one_step_lattice();
    NodeProcess lower = NodeProcess::from_function(lat, [&](std::size_t k, std::size_t j) {
        return std::max(100.0 - lat.price(k, j), 0.0);
    });
    NodeProcess upper = lower;
    for (std::size_t i = 0; i < lat.size(); ++i) upper.at_index(i) += delta;
    return DrbsdeInputs{lat, GeneratorSpec::zero(), lower, upper, {20.0, 0.0}, NodeProcess(1)};
}

inline GamePayoff instance_a_payoff(const DrbsdeInputs& in) { return make_game_payoff(in, in.lower); }

}  // namespace nlgame::testing

#endif
