#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sandpile_lab/selfsim.hpp"

namespace sandpile_lab {

// Edge u -> v with a generator label (v = g(u) for Schreier graphs).
struct Edge {
  int u;
  int v;
  int label;
};

struct Neighbor {
  int to;
  int mult;
};

// Immutable undirected multigraph with loops. Loops are kept out of the
// neighbor lists and counted twice in the degree.
class Multigraph {
 public:
  Multigraph() = default;
  Multigraph(int n, std::vector<Edge> edges, std::vector<std::string> label_names = {});

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  std::span<const Neighbor> neighbors(int v) const {
    return {adj_.data() + off_[v], adj_.data() + off_[v + 1]};
  }
  int loops(int v) const { return loops_[v]; }
  int degree(int v) const { return deg_[v]; }
  int multiplicity(int u, int v) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::string> label_names_;
  std::vector<int> off_{0};
  std::vector<Neighbor> adj_;
  std::vector<int> loops_;
  std::vector<int> deg_;
};

// Γ_n together with the level data needed to recover words from indices.
struct SchreierGraph {
  std::string preset;
  int q = 2;
  int level = 0;
  Multigraph graph;

  Word word(int v) const;
  int index(const Word& w) const;
};

// Index of a word in lexicographic order.
long long word_index(const Word& w, int q);
Word index_word(long long idx, int q, int n);

SchreierGraph schreier_graph(const GroupPreset& p, int n);

struct CoveringReport {
  bool ok = true;
  int fiber_size = 0;
  std::string witness;
};
CoveringReport verify_covering(const SchreierGraph& lower, const SchreierGraph& upper);
CoveringReport verify_covering(const GroupPreset& p, int n);

// Generator-labeled graph with each label a permutation of the vertex set.
struct RootedGraph {
  const Multigraph* graph;
  int root;
};

// Largest r for which the labeled balls of radius r agree under the
// label-following map. Capped at the larger eccentricity when the graphs
// agree everywhere.
int common_ball_radius(const RootedGraph& a, const RootedGraph& b);
inline double rooted_distance(int radius) { return 1.0 / (radius + 1.0); }

// Graph with a nonempty dissipative set; the arena for chip dynamics.
struct SandpileGraph {
  Multigraph graph;
  std::vector<char> dissipative;
  std::vector<std::string> names;
  int root = -1;

  int num_vertices() const { return graph.num_vertices(); }
  bool is_sink(int v) const { return dissipative[v] != 0; }
  std::vector<int> sinks() const;
  int vertex(const std::string& name) const;
};

enum class EndConvention { one_ended, two_ended, four_ended };
std::string to_string(EndConvention c);

struct Exhaustion {
  SandpileGraph sandpile;  // dissipative set already merged into one sink
  SandpileGraph unmerged;
  int level = 0;
  EndConvention convention = EndConvention::one_ended;
};

// Is level n usable for the one-ended exhaustion along this prefix: the root's
// component of Γ_n minus 0^n must be a largest component.
bool one_ended_level_valid(const SchreierGraph& g, const Word& prefix);

// Throws InvalidLevelError when the level is outside the valid subsequence.
Exhaustion exhaustion_subgraph(const GroupPreset& p, const SchreierGraph& g,
                               const Word& prefix, EndConvention c);
Exhaustion exhaustion_subgraph(const GroupPreset& p, int n, const Word& prefix,
                               EndConvention c);

// Induced subgraph on the given vertex list (edges with both ends inside).
SandpileGraph induced_sandpile(const SchreierGraph& g, const std::vector<int>& verts,
                               const std::vector<int>& sinks, int root);

nlohmann::json graph_json(const SandpileGraph& g, const std::string& preset, int level);
nlohmann::json graph_json(const SchreierGraph& g);

}  // namespace sandpile_lab
