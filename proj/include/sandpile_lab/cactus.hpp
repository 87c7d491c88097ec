#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sandpile_lab/sandpile.hpp"
#include "sandpile_lab/schreier.hpp"

namespace sandpile_lab {

struct Block {
  enum class Kind { cycle, edge, other };
  Kind kind = Kind::edge;
  // Cycles: cyclic order. Once rooted, vertices[0] is the block's root
  // (the vertex closest to the sink).
  std::vector<int> vertices;
  int edge_count = 0;  // with multiplicity
  int size() const { return static_cast<int>(vertices.size()); }
};

struct BlockDecomposition {
  std::vector<Block> blocks;
  std::vector<int> cut_vertices;
  std::vector<std::vector<int>> vertex_blocks;  // blocks containing each vertex
  bool is_cactus = true;
  // Rooted data, filled when a sink is given.
  int sink = -1;
  std::vector<int> parent_block;  // block in which v is not the root (-1 for sink)
  std::vector<int> block_parent;  // root vertex of each block (== vertices[0])
  std::vector<int> position;      // index of v inside parent_block's vertex list
};

// Maximal 2-connected components, loops ignored. A double edge with no other
// support is a cycle of length two.
BlockDecomposition block_decompose(const Multigraph& g, int sink = -1);

struct BlockPath {
  std::vector<int> blocks;      // C_1..C_r
  std::vector<int> sizes;       // |C_i|
  std::vector<int> cut;         // p_1..p_r (p_r is the sink)
  std::vector<int> entry;       // p_0 = v, p_1, .., p_{r-1}: entry vertex of C_i
  std::vector<int> entry_pos;   // position of the entry in C_i (root at 0)
  std::vector<int> i0;          // min(pos, |C| - pos)
};

BlockPath block_path(const BlockDecomposition& dec, int v);

// w' ⪰ w: w lies on every path from w' to the sink.
bool dominates(const BlockDecomposition& dec, int w_prime, int w);

struct DecorationStats {
  std::vector<long long> d;     // |D(p_i)|, i = 1..r-1
  std::vector<int> diam;        // Diam(D(p_i))
  // Per block on the path and per vertex position on it: size, height and
  // diameter of the decoration hanging at that vertex (the vertex together
  // with everything that reaches the sink through it, except the block itself).
  std::vector<std::vector<long long>> deco_size;
  std::vector<std::vector<int>> deco_height;
  std::vector<std::vector<int>> deco_diam;
};

DecorationStats decoration_stats(const SandpileGraph& g, const BlockDecomposition& dec, const BlockPath& cp);

// Size of D(v): v together with every vertex dominating it.
std::vector<long long> subtree_sizes(const BlockDecomposition& dec, int n);

struct CriticalGroup {
  std::vector<std::pair<long long, int>> factors;  // (order, multiplicity), orders > 1
  BigInt order() const;
};
CriticalGroup critical_group(const BlockDecomposition& dec);

struct RayTriple {
  int l = 1;
  std::vector<int> m;    // m_0, m_1, ...
  std::vector<int> t;    // t_0 = 0, t_1, ...
  std::vector<std::uint8_t> free_bits;  // x^j_i in order of appearance
  bool trailing_partial = false;  // prefix ended inside a pair
};

RayTriple ray_triple(const Word& prefix);
Word reconstruct(const RayTriple& r, std::optional<std::uint64_t> seed = std::nullopt);
// a_i for the blocks fully described by the triple.
std::vector<int> a_sequence(const RayTriple& r);

// Eventually periodic ray u v v v ... (pre, per).
struct RaySpec {
  Word pre;
  Word per;
  Word prefix(int n) const;
};

// Number of ends of the orbital graph along the ray: 1, 2 or 4.
int classify_ends(const RaySpec& ray, const std::string& preset);

struct ImgBlocks {
  std::vector<std::pair<char, int>> blocks;  // (type A/B, length)
  std::vector<int> nu;                         // prefix lengths
};
ImgBlocks img_block_decomposition(const Word& w);

struct GrowthStats {
  std::vector<long long> ball;  // |B(v, r)|, r = 0..r_max
  double alpha_hat = 0;
  int r_lo = 0, r_hi = 0;
  bool truncated = false;
};
GrowthStats growth_stats(const Multigraph& g, int v, int r_max, int r_lo = 0);

struct BetaStats {
  double beta = 0;
  double beta_prime = 0;
};
BetaStats beta_stats(const DecorationStats& s);

}  // namespace sandpile_lab
