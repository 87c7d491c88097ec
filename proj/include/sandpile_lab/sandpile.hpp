#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sandpile_lab/schreier.hpp"

namespace sandpile_lab {

using BigInt = boost::multiprecision::cpp_int;

// Chip counts indexed by vertex id. Entries at dissipative vertices are unused
// and kept at zero.
using Configuration = std::vector<std::int64_t>;

struct StabilizationResult {
  Configuration final;
  std::vector<std::int64_t> fired_counts;
  int mass = 0;
  long long length = 0;
  int diameter = 0;
  long long to_sink = 0;  // chips absorbed by the dissipative set
};

// Reusable FIFO stabilizer; keeps work buffers between calls and resets them
// in time proportional to the avalanche.
class Stabilizer {
 public:
  explicit Stabilizer(const SandpileGraph& g);

  // Stabilizes c in place. Fired vertices (distinct, in first-firing order)
  // are available through fired() until the next call.
  void run(Configuration& c);
  // Same, for a configuration that is stable away from `seed`.
  void run_from(Configuration& c, int seed);
  // Same, with vertices popped in a random order instead of FIFO.
  void run_random_order(Configuration& c, std::mt19937_64& rng);

  const std::vector<int>& fired() const { return fired_; }
  std::int64_t fired_count(int v) const { return count_[v]; }
  long long length() const { return length_; }
  long long to_sink() const { return to_sink_; }

 private:
  void reset();
  void fire(Configuration& c, int v);
  void drain(Configuration& c);
  const SandpileGraph& g_;
  // adjacency without dissipative neighbors
  std::vector<int> off_, nbr_, mult_;
  std::vector<std::int64_t> thr_, loss_, to_sink_of_;
  std::vector<std::int64_t> count_;
  std::vector<char> queued_;
  std::vector<int> fired_;
  std::vector<int> work_;
  long long length_ = 0;
  long long to_sink_ = 0;
};

bool is_stable(const SandpileGraph& g, const Configuration& c);

StabilizationResult stabilize(const SandpileGraph& g, Configuration c, bool with_diameter = true);

// Diameter of the subgraph induced by the given vertex set (BFS from each).
int induced_diameter(const SandpileGraph& g, const std::vector<int>& verts);

// Fire-from-sink pass. Throws InputError("unstable-input") on unstable c.
bool burning_test(const SandpileGraph& g, const Configuration& c);
// Literal B_t / U_t iteration, kept as a slow cross-check.
bool burning_test_sets(const SandpileGraph& g, const Configuration& c);
// Dissipative vertices first, then non-dissipative ones in burning order.
std::optional<std::vector<int>> burning_sequence(const SandpileGraph& g, const Configuration& c);

// Exact set: closed product form on single-sink cacti, otherwise an
// exhaustive scan of stable configurations (at most 2^24 candidates).
std::vector<Configuration> enumerate_recurrent(const SandpileGraph& g);
inline constexpr std::uint64_t kEnumerationGuard = 1ull << 24;

// Determinant of the reduced Laplacian, loops excluded, exact.
BigInt spanning_tree_count(const SandpileGraph& g);

// Uniform recurrent configurations on a single-sink cactus, block by block.
class RecurrentSampler {
 public:
  explicit RecurrentSampler(const SandpileGraph& g);
  Configuration sample(std::mt19937_64& rng) const;
  void sample_into(Configuration& c, std::mt19937_64& rng) const;
  // Configuration with block index k[i] on cycle block i (0 = all full).
  Configuration with_indices(const std::vector<int>& k) const;
  int num_cycles() const { return static_cast<int>(cycles_.size()); }
  const std::vector<int>& cycle(int i) const { return cycles_[i]; }

  // Redraws only the cycles whose state shows at some vertex of `touched`
  // and restores every touched vertex. Blocks never looked at keep their
  // draw, which is still independent of everything observed, so the result
  // is again uniform on recurrent configurations. `mark` is scratch space.
  void resample_touched(Configuration& c, const std::vector<int>& touched, std::mt19937_64& rng,
                        std::vector<char>& mark) const;

 private:
  void draw_cycle(Configuration& c, int i, std::mt19937_64& rng) const;
  Configuration base_;                  // every block in its c_0 state
  std::vector<std::vector<int>> cycles_;  // positions 1..L-1 of each cycle block
  std::vector<int> cycle_of_;           // cycle having v as a non-root vertex, or -1
};

// c_0 on every cycle, deg - 1 across single edges, and only the offset
// deg(v) - deg_B(v) on vertices of other blocks (left for the caller to fill).
Configuration block_base_configuration(const SandpileGraph& g);

Configuration sample_recurrent_cactus(const SandpileGraph& g, std::mt19937_64& rng);

Configuration add_and_stabilize(const SandpileGraph& g, const Configuration& a, const Configuration& b);

struct AvalancheRecord {
  int mass = 0;
  long long length = 0;
  int diameter = 0;
  int stop_block = -1;  // 1-based block index on the root's block path, 0 if nothing fired
};

// Adds one chip at v to the recurrent c and stabilizes. stop_points, when
// given, lists the cut vertices p_1..p_r of the block path from v; the stop
// block is the first j whose p_j did not fire.
AvalancheRecord trigger_avalanche(const SandpileGraph& g, const Configuration& c, int v,
                                  const std::vector<int>* stop_points = nullptr,
                                  bool check_recurrent = true, bool with_diameter = true);

SandpileGraph merge_dissipative(const SandpileGraph& g);

// Configuration CSV: "vertex_word,chips" per non-dissipative vertex.
std::string configuration_csv(const SandpileGraph& g, const Configuration& c);
Configuration configuration_from_csv(const SandpileGraph& g, const std::string& csv);

}  // namespace sandpile_lab
