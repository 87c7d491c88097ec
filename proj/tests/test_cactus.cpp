#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "sandpile_lab/cactus.hpp"
#include "sandpile_lab/errors.hpp"
#include "sandpile_lab/selftest.hpp"

using namespace sandpile_lab;

namespace {

SandpileGraph whole(const SchreierGraph& g, int sink) {
  std::vector<int> all(g.graph.num_vertices());
  for (int v = 0; v < g.graph.num_vertices(); ++v) all[v] = v;
  return induced_sandpile(g, all, {sink}, sink == 0 ? 1 : 0);
}

// Size of the component of g - cut that avoids `away`, plus the cut vertex.
long long side_size(const Multigraph& g, int cut, int away) {
  std::vector<char> seen(g.num_vertices(), 0);
  seen[cut] = 1;
  std::vector<int> st{away};
  seen[away] = 1;
  long long k = 0;
  while (!st.empty()) {
    int v = st.back();
    st.pop_back();
    ++k;
    for (auto nb : g.neighbors(v))
      if (!seen[nb.to]) seen[nb.to] = 1, st.push_back(nb.to);
  }
  return g.num_vertices() - k;
}

Word random_word(std::mt19937_64& rng, int n, int q) {
  Word w(n);
  for (auto& x : w) x = static_cast<std::uint8_t>(rng() % q);
  return w;
}

}  // namespace

TEST_CASE("blocks partition the edges") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    SandpileGraph g = random_cactus(rng, 20);
    auto dec = block_decompose(g.graph, 0);
    CHECK(dec.is_cactus);
    int edges = 0, loops = 0;
    for (const auto& b : dec.blocks) edges += b.edge_count;
    for (int v = 0; v < g.num_vertices(); ++v) loops += g.graph.loops(v);
    CHECK(edges + loops == g.graph.num_edges());
    std::set<int> cuts(dec.cut_vertices.begin(), dec.cut_vertices.end());
    for (int v = 0; v < g.num_vertices(); ++v) CHECK((dec.vertex_blocks[v].size() >= 2) == (cuts.count(v) == 1));
    for (size_t a = 0; a < dec.blocks.size(); ++a)
      for (size_t b = a + 1; b < dec.blocks.size(); ++b) {
        std::set<int> va(dec.blocks[a].vertices.begin(), dec.blocks[a].vertices.end());
        int common = 0;
        for (int v : dec.blocks[b].vertices) common += va.count(v);
        CHECK(common <= 1);
      }
  }
  for (int n = 2; n <= 10; ++n) {
    SchreierGraph g = schreier_graph(preset("basilica"), n);
    auto dec = block_decompose(g.graph);
    int edges = 0, loops = 0;
    for (const auto& b : dec.blocks) edges += b.edge_count;
    for (int v = 0; v < g.graph.num_vertices(); ++v) loops += g.graph.loops(v);
    CHECK(edges + loops == g.graph.num_edges());
  }
}

TEST_CASE("a tree has only edge blocks") {
  Multigraph tree(6, {{0, 1, 0}, {1, 2, 0}, {1, 3, 0}, {3, 4, 0}, {3, 5, 0}});
  auto dec = block_decompose(tree, 0);
  CHECK(dec.is_cactus);
  CHECK(dec.blocks.size() == 5);
  for (const auto& b : dec.blocks) CHECK(b.kind == Block::Kind::edge);
  CHECK(std::set<int>(dec.cut_vertices.begin(), dec.cut_vertices.end()) == std::set<int>{1, 3});
}

TEST_CASE("exceptional block is flagged") {
  Exhaustion ex = exhaustion_subgraph(preset("basilica"), 8, Word(8, 0), EndConvention::four_ended);
  auto dec = block_decompose(ex.sandpile.graph, ex.sandpile.sinks()[0]);
  CHECK_FALSE(dec.is_cactus);
  int others = 0;
  for (const auto& b : dec.blocks) others += b.kind == Block::Kind::other;
  CHECK(others == 1);
  CHECK_THROWS_AS(critical_group(dec), InputError);
}

TEST_CASE("block paths") {
  SandpileGraph c = cycle_sandpile(6);
  auto dec = block_decompose(c.graph, 0);
  auto cp = block_path(dec, 2);
  CHECK(cp.sizes == std::vector<int>{6});
  CHECK(cp.i0 == std::vector<int>{2});
  CHECK(block_path(dec, 0).blocks.empty());

  // consecutive blocks meet in one vertex, dominance along the path
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    SandpileGraph g = random_cactus(rng, 25);
    auto d = block_decompose(g.graph, 0);
    auto p = block_path(d, g.root);
    for (size_t i = 0; i + 1 < p.blocks.size(); ++i) {
      const auto& a = d.blocks[p.blocks[i]].vertices;
      const auto& b = d.blocks[p.blocks[i + 1]].vertices;
      int common = 0;
      for (int v : a) common += std::count(b.begin(), b.end(), v);
      CHECK(common == 1);
      CHECK(dominates(d, g.root, p.cut[i]));
    }
    CHECK(p.cut.back() == 0);
  }
}

TEST_CASE("decorations") {
  for (int n = 2; n <= 12; ++n) {
    SchreierGraph g = schreier_graph(preset("basilica"), n);
    const int z = g.index(Word(n, 0));
    Word w(n, 0);
    w[n - 1] = 1;
    const int zz = g.index(w);
    const long long formula = n % 2 == 0 ? ((1ll << n) + 2) / 3 : ((1ll << n) + 1) / 3;
    CHECK(side_size(g.graph, z, zz) == formula);
    auto dec = block_decompose(g.graph, zz);
    CHECK(subtree_sizes(dec, g.graph.num_vertices())[z] == formula);
  }
  for (int k = 1; k <= 8; ++k) {
    SchreierGraph g = schreier_graph(preset("img3"), k);
    const int z = g.index(Word(k, 0));
    long long p3 = 1;
    for (int i = 0; i < k; ++i) p3 *= 3;
    for (auto nb : g.graph.neighbors(z)) CHECK(side_size(g.graph, z, nb.to) == (p3 + 1) / 2);
  }
  SandpileGraph c = cycle_sandpile(7);
  auto dec = block_decompose(c.graph, 0);
  auto cp = block_path(dec, 3);
  auto st = decoration_stats(c, dec, cp);
  CHECK(st.d.empty());
  for (size_t k = 1; k < 7; ++k) CHECK(st.deco_size[0][k] == 1);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    SandpileGraph g = random_cactus(rng, 40);
    auto d = block_decompose(g.graph, 0);
    auto p = block_path(d, g.root);
    auto s = decoration_stats(g, d, p);
    for (size_t i = 1; i < s.d.size(); ++i) {
      CHECK(s.d[i] > s.d[i - 1]);
      CHECK(s.d[i] >= s.d[i - 1] + p.sizes[i] - 1);
    }
  }
}

TEST_CASE("critical groups") {
  auto check_group = [](int n, std::map<long long, int> expect) {
    SchreierGraph g = schreier_graph(preset("basilica"), n);
    for (int sink : {0, 3}) {
      auto cg = critical_group(block_decompose(g.graph, sink));
      std::map<long long, int> got(cg.factors.begin(), cg.factors.end());
      CHECK(got == expect);
      CHECK(cg.order() == spanning_tree_count(whole(g, sink)));
    }
  };
  check_group(4, {{2, 6}, {4, 3}});
  check_group(5, {{2, 12}, {4, 4}, {8, 1}});
  for (int n = 6; n <= 9; ++n) {
    SchreierGraph g = schreier_graph(preset("basilica"), n);
    CHECK(critical_group(block_decompose(g.graph, 0)).order() == spanning_tree_count(whole(g, 0)));
  }
  auto sq = critical_group(block_decompose(cycle_sandpile(4).graph, 0));
  CHECK(sq.factors == std::vector<std::pair<long long, int>>{{4, 1}});
}

TEST_CASE("ray triples") {
  RayTriple one = ray_triple(Word(20, 1));
  auto a = a_sequence(one);
  REQUIRE(a.size() >= 10);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == static_cast<int>(i) + 1);

  std::mt19937_64 rng(4);
  int checked = 0;
  for (int t = 0; t < 10000; ++t) {
    Word w = random_word(rng, 1 + static_cast<int>(rng() % 30), 2);
    RayTriple r;
    try {
      r = ray_triple(w);
    } catch (const InputError&) {
      CHECK(std::count(w.begin(), w.end(), 1) == 0);
      continue;
    }
    ++checked;
    REQUIRE(reconstruct(r) == w);
    for (int m : r.m) CHECK(m % 2 == 0);
    for (size_t j = 1; j < r.m.size(); ++j) CHECK(r.m[j] > 0);
    for (size_t j = 1; j < r.t.size(); ++j) CHECK(r.t[j] > 0);
    // gaps of the a-sequence: m_j + 1 right after T_j, else 1
    auto as = a_sequence(r);
    std::set<int> ends;
    long long T = 0;
    std::map<int, int> gap;
    for (size_t j = 1; j < r.t.size(); ++j) {
      T += r.t[j];
      if (j < r.m.size()) gap[static_cast<int>(T)] = r.m[j] + 1;
    }
    for (size_t i = 0; i + 1 < as.size(); ++i) {
      const int idx = static_cast<int>(i) + 1;
      CHECK(as[i + 1] - as[i] == (gap.count(idx) ? gap[idx] : 1));
    }
  }
  CHECK(checked > 9000);
  CHECK_THROWS_AS(ray_triple(Word(5, 0)), InputError);
  CHECK_THROWS_AS(ray_triple(Word{1, 2}), InputError);
  // free bits do not move the a-sequence
  Word w{0, 1, 0, 1, 0, 0, 1, 1, 0, 1};
  RayTriple r = ray_triple(w);
  CHECK(a_sequence(ray_triple(reconstruct(r, 77))) == a_sequence(r));
}

TEST_CASE("block sizes follow the a-sequence") {
  std::mt19937_64 rng(5);
  for (int n : {10, 12}) {
    SchreierGraph g = schreier_graph(preset("basilica"), n);
    auto dec = block_decompose(g.graph, g.index(Word(n, 0)));
    for (int t = 0; t < 200; ++t) {
      Word w = random_word(rng, n, 2);
      if (std::count(w.begin(), w.end(), 1) == 0) continue;
      auto cp = block_path(dec, g.index(w));
      auto a = a_sequence(ray_triple(w));
      REQUIRE(cp.sizes.size() >= a.size());
      for (size_t i = 0; i < a.size(); ++i) CHECK(cp.sizes[i] == 1 << ((a[i] + 1) / 2));
    }
  }
}

TEST_CASE("end classification") {
  CHECK(classify_ends({{}, {0}}, "basilica") == 4);
  CHECK(classify_ends({{1, 1}, {0, 1}}, "basilica") == 4);
  CHECK(classify_ends({{}, {1}}, "basilica") == 1);
  CHECK(classify_ends({{}, {0, 0, 1, 0}}, "basilica") == 2);
  CHECK(classify_ends({{}, {1, 2}}, "img3") == 1);
  CHECK(classify_ends({{1}, {2}}, "img3") == 4);
  CHECK(classify_ends({{}, {0, 1}}, "img3") == 2);
  CHECK_THROWS_AS(classify_ends({{1}, {}}, "basilica"), InputError);
  CHECK_THROWS_AS(classify_ends({{}, {1}}, "adding"), InputError);
}

TEST_CASE("img3 A/B blocks") {
  auto b = img_block_decomposition(Word{1, 2});
  REQUIRE(b.blocks.size() == 2);
  CHECK(b.blocks[0] == std::pair<char, int>{'A', 1});
  CHECK(b.blocks[1] == std::pair<char, int>{'B', 1});
  CHECK(b.nu == std::vector<int>{1, 2});
  auto z = img_block_decomposition(Word(6, 0));
  CHECK(z.blocks.size() == 1);

  SchreierGraph g2 = schreier_graph(preset("img3"), 2);
  auto d2 = block_decompose(g2.graph, g2.index(Word(2, 0)));
  CHECK(block_path(d2, g2.index(Word{1, 2})).sizes == std::vector<int>{2, 4});

  std::mt19937_64 rng(6);
  for (int n : {6, 9}) {
    SchreierGraph g = schreier_graph(preset("img3"), n);
    auto dec = block_decompose(g.graph, g.index(Word(n, 0)));
    for (int t = 0; t < 300; ++t) {
      Word w = random_word(rng, n, 3);
      if (std::count(w.begin(), w.end(), 0) == n) continue;
      auto ib = img_block_decomposition(w);
      auto cp = block_path(dec, g.index(w));
      REQUIRE(cp.sizes.size() == ib.nu.size());
      for (size_t i = 0; i < ib.nu.size(); ++i) CHECK(cp.sizes[i] == 1 << ib.nu[i]);
    }
  }
}

TEST_CASE("growth") {
  // fit over [r/4, r], r the last radius whose ball holds at most a quarter of the graph
  auto alpha = [](const SchreierGraph& g, const Word& root) {
    const int v = g.index(root);
    auto full = growth_stats(g.graph, v, g.graph.num_vertices());
    int r = 1;
    while (r + 1 < static_cast<int>(full.ball.size()) && 4 * full.ball[r + 1] <= g.graph.num_vertices()) ++r;
    auto gs = growth_stats(g.graph, v, r);
    for (size_t k = 1; k < gs.ball.size(); ++k) CHECK(gs.ball[k] >= gs.ball[k - 1]);
    return gs.alpha_hat;
  };
  CHECK(std::abs(alpha(schreier_graph(preset("basilica"), 12), Word(12, 1)) - 2.0) <= 0.2);
  Word w(10);
  for (int i = 0; i < 10; ++i) w[i] = 1 + i % 2;
  CHECK(std::abs(alpha(schreier_graph(preset("img3"), 10), w) - std::log(3.0) / std::log(2.0)) <= 0.2);
  CHECK(alpha(schreier_graph(preset("kneading:000"), 12), Word(12, 1)) >= 4 / 2.0 - 0.2);
  SandpileGraph c = cycle_sandpile(6);
  auto gs = growth_stats(c.graph, 0, 100);
  CHECK(gs.truncated);
  CHECK(gs.ball.back() == 6);
}
