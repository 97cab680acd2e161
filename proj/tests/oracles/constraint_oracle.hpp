#pragma once

#include "phz/concrete.hpp"
#include "phz/constraint.hpp"

#include <random>
#include <vector>

namespace phz::oracle {

/// Membership by brute force over all task and phaser bijections,
/// evaluating each graph under the transported phase valuation.
std::size_t phaser_registered_count(const GapGraph& g);

bool satisfies_direct(const Configuration& c, const Constraint& phi);

/// Every configuration reachable within the bounds (bad ones included).
std::vector<Configuration> sample_states(const ControlSet& cs, Phase phase_bound, int task_bound = 3,
                                         int phaser_bound = 2, std::size_t max_states = 200'000);

/// Randomly lowers or drops edges of every graph, then closes.
/// The result is entailed by phi; it is not strengthened.
Constraint weaken(std::mt19937_64& rng, const Constraint& phi);

/// Randomly raises edges of every graph; nullopt when that empties a graph.
std::optional<Constraint> tighten(std::mt19937_64& rng, const Constraint& phi);

/// Applies a random task and phaser renaming to a normalized configuration.
Configuration permuted(std::mt19937_64& rng, const Configuration& c);

} // namespace phz::oracle
