#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sandpile_lab/avalanche.hpp"

namespace sandpile_lab {

// Ray grammar: lit:<word> | per(<p>) | pre(<w>)per(<p>) | triple:l=..;m=..;t=.. | rand:<seed>.
// Letters are digits. Random rays draw letter i from stream_seed(seed, i).
struct Ray {
  std::string spec;
  RaySpec periodic;        // used when is_periodic
  bool is_periodic = false;
  Word literal;            // lit: and triple:
  bool is_random = false;
  std::uint64_t seed = 0;
  int q = 2;

  Word prefix(int n) const;
};
Ray parse_ray(const std::string& spec, int q);

// First level in [lo, hi] accepted by the exhaustion; throws InvalidLevelError
// naming the last nearest valid level otherwise.
Exhaustion first_valid_exhaustion(const GroupPreset& p, const Ray& ray, int lo, int hi, EndConvention c);

struct ExperimentConfig {
  std::string name;
  int level = -1;          // -1: preset default
  long long samples = -1;  // -1: preset default
  std::uint64_t seed = 7;
  int threads = 1;
  int cap_block = -1;
  double m_lo = -1, m_hi = -1;
};

struct ExperimentReport {
  std::string name;
  bool pass = false;
  nlohmann::json data;
};

std::vector<std::string> experiment_names();
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Pieces reused by the acceptance suite.
ExperimentReport basilica_e1(const ExperimentConfig& cfg);
ExperimentReport basilica_e2(const ExperimentConfig& cfg);
ExperimentReport basilica_e4(const ExperimentConfig& cfg);
ExperimentReport img3_experiment(const ExperimentConfig& cfg);
ExperimentReport kneading_k2(const ExperimentConfig& cfg);
ExperimentReport kneading_k3(const ExperimentConfig& cfg);
ExperimentReport growth_experiment(const ExperimentConfig& cfg);
ExperimentReport stationarity_experiment(const ExperimentConfig& cfg);

// Four-ended B block: configurations built from the path parametrization.
struct FourEndedData {
  int level = 0;
  std::vector<int> path_edges;     // edge count of each of the four paths
  BigInt kappa_enumerated = 0;     // configurations generated
  BigInt kappa_formula = 0;        // sum_i prod_{j != i} |P_j|
  BigInt kappa_determinant = 0;    // spanning trees of B
  bool all_recurrent = true;
  MassDistribution law;
};
FourEndedData four_ended_law(int n, bool check_recurrent = true);

}  // namespace sandpile_lab
