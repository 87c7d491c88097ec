#pragma once

#include <ostream>
#include <random>

#include "sandpile_lab/avalanche.hpp"

namespace sandpile_lab {

// Cycle of length L through the sink (vertex 0); L = 2 is a double edge.
SandpileGraph cycle_sandpile(int L);

// Random cactus grown from the sink by hanging edges and cycles of length
// 2..6 on existing vertices. Root is the last vertex added.
SandpileGraph random_cactus(std::mt19937_64& rng, int max_vertices);

// Mass law at distance i0 on a cycle, by triggering every recurrent
// configuration with the simulator.
MassDistribution enumerated_cycle_distribution(int L, int i0);

// Quick oracle battery. Prints one line per check; true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace sandpile_lab
