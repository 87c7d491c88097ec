#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sandpile_lab/cactus.hpp"
#include "sandpile_lab/sandpile.hpp"

namespace sandpile_lab {

using Rational = boost::multiprecision::cpp_rational;

// Law of the avalanche mass (and optionally diameter) triggered at a root.
// Exact laws keep integer numerators over one common denominator; empirical
// laws use sample counts over the sample total. Avalanches that the engine
// does not resolve go to the bucket; all resolved masses are below
// bucket_threshold (-1 when everything is resolved).
struct MassDistribution {
  std::string method;  // cycle | exact | dp | mc
  std::string graph_id;
  int root = -1;
  int level = 0;
  bool empirical = false;
  BigInt denominator = 1;
  std::map<int, BigInt> mass;
  std::map<int, BigInt> diameter;  // empty when not tracked
  BigInt bucket = 0;
  long long bucket_threshold = -1;

  Rational exact(int M) const;
  double probability(int M) const;
  double bucket_probability() const;
  BigInt total() const;  // resolved numerators plus bucket
  std::vector<int> realizable() const;
  bool empty() const { return denominator == 0; }
};

// Path data shared by the block-path engines.
struct PathModel {
  BlockDecomposition dec;
  BlockPath cp;
  DecorationStats deco;
  std::vector<long long> d;  // d_0 = |D(root)|, d_1 .. d_{r-1}
  int r() const { return static_cast<int>(cp.blocks.size()); }
};
PathModel path_model(const SandpileGraph& g, int root);

// Piecewise closed-form law of a single cycle triggered at distance i0 from
// the sink.
MassDistribution exact_cycle_distribution(int cycle_length, int i0);

// Full simulator over every configuration of C_1..C_J (other blocks at c_0).
// Avalanches that fire p_{J-1} land in the bucket unless J = r.
MassDistribution exact_blockpath_distribution(const SandpileGraph& g, int root, int J,
                                              bool with_diameter = true);
inline constexpr std::uint64_t kExactGuard = 1ull << 22;

struct DpTrace {
  std::vector<int> max_incoming;  // largest t entering C_j, j = 1..J
  long long kernel_checks = 0;
};

// Same law by a transfer over (block, incoming chips). self_test compares each
// cycle kernel entry with the closed form t' = t - [k != 0] + [k' != 0] and
// throws std::logic_error on a mismatch.
MassDistribution dp_blockpath_distribution(const SandpileGraph& g, int root, int J,
                                           bool self_test = false, DpTrace* trace = nullptr);

struct McOptions {
  int threads = 1;
  bool with_diameter = false;
  int chunk = 4096;  // samples per seeded stream
};

// Empirical law. Sample chunk i draws from the stream seeded by
// stream_seed(seed, i), so results do not depend on the thread count.
MassDistribution mc_distribution(const SandpileGraph& g, int root, long long samples,
                                 std::uint64_t seed, const McOptions& opt = {});
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

// Total variation between two laws on masses below `below`, counting the mass
// at or above it as one lumped atom.
double tv_distance(const MassDistribution& a, const MassDistribution& b, long long below);

struct SandwichBounds {
  Rational lower, upper, L;
  int i_M = 0;
};
// sizes: |C_1|..|C_r| (single edges as 1); d: d_0..d_{r-1}.
SandwichBounds thm246_bounds(const std::vector<int>& sizes, const std::vector<long long>& d, long long M);

struct SandwichReport {
  int checked = 0;
  int violations = 0;
  int skipped_small = 0;  // masses below d_1
  std::vector<std::string> details;
};
SandwichReport check_sandwich(const MassDistribution& dist, const PathModel& pm);

struct ExponentFit {
  double delta_hat = 0;
  double stderr_ = 0;
  double m_lo = 0, m_hi = 0;
  std::string method = "loglog-ls";
  int points = 0;
  double ratio_estimate = 0;  // mean of -log P(M)/log M over the top decile
};

// Least squares of log P(M) on log M over realizable masses in [m_lo, m_hi].
// Throws InputError with fewer than 8 points.
ExponentFit fit_exponent(const std::map<int, double>& law, double m_lo, double m_hi);
ExponentFit fit_exponent(const MassDistribution& dist, double m_lo = -1, double m_hi = -1);
ExponentFit fit_diameter_exponent(const MassDistribution& dist, double lo, double hi);

struct StationarityReport {
  bool ok = true;
  long long verified_below = 0;  // masses M < verified_below compared
  long long structural_below = 0;
  int compared = 0;
  int mismatches = 0;
  std::vector<std::string> details;
};
// Compares the exact laws (full block path) at two levels on every mass
// below `below`; the default is d_{r-2} of the smaller graph. structural_below
// is the range over which the two block paths coincide block by block.
StationarityReport stationarity_check(const SandpileGraph& a, int root_a,
                                      const SandpileGraph& b, int root_b,
                                      long long below = -1);

std::string distribution_csv(const MassDistribution& d);
MassDistribution distribution_from_csv(const std::string& csv);

}  // namespace sandpile_lab
