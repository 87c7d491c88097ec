#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <numeric>

#include "sandpile_lab/cactus.hpp"
#include "sandpile_lab/errors.hpp"
#include "sandpile_lab/schreier.hpp"

using namespace sandpile_lab;

namespace {

std::map<int, int> cycle_census(const Multigraph& g) {
  std::map<int, int> census;
  for (const auto& b : block_decompose(g).blocks)
    if (b.kind == Block::Kind::cycle) ++census[b.size()];
  return census;
}

bool connected(const Multigraph& g) {
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (auto nb : g.neighbors(v))
      if (!seen[nb.to]) {
        seen[nb.to] = 1;
        ++count;
        stack.push_back(nb.to);
      }
  }
  return count == g.num_vertices();
}

Multigraph with_edges(const Multigraph& g, std::vector<Edge> edges) {
  return Multigraph(g.num_vertices(), std::move(edges), g.label_names());
}

}  // namespace

TEST_CASE("basilica level 4 census") {
  SchreierGraph g = schreier_graph(preset("basilica"), 4);
  CHECK(g.graph.num_vertices() == 16);
  for (int v = 0; v < 16; ++v) CHECK(g.graph.degree(v) == 4);
  auto census = cycle_census(g.graph);
  CHECK(census[2] == 6);
  CHECK(census[4] == 3);
}

TEST_CASE("vertex counts, regularity, handshake, connectivity") {
  CHECK(schreier_graph(preset("img3"), 3).graph.num_vertices() == 27);
  for (const auto& name : {"basilica", "img3", "adding", "kneading:00", "kneading:000"}) {
    GroupPreset p = preset(name);
    const int k = static_cast<int>(p.automaton.generators().size());
    for (int n = 1; n <= 7; ++n) {
      SchreierGraph g = schreier_graph(p, n);
      long long size = 1;
      for (int i = 0; i < n; ++i) size *= p.automaton.alphabet();
      CHECK(g.graph.num_vertices() == size);
      long long deg = 0;
      for (int v = 0; v < g.graph.num_vertices(); ++v) {
        CHECK(g.graph.degree(v) == 2 * k);
        deg += g.graph.degree(v);
      }
      CHECK(deg == 2ll * g.graph.num_edges());
      CHECK(connected(g.graph));
    }
  }
}

TEST_CASE("basilica and kneading graphs are cacti") {
  for (int n = 1; n <= 12; ++n) CHECK(block_decompose(schreier_graph(preset("basilica"), n).graph).is_cactus);
  for (const auto& name : {"kneading:00", "kneading:000", "kneading:01"})
    for (int n = 1; n <= 9; ++n) CHECK(block_decompose(schreier_graph(preset(name), n).graph).is_cactus);
}

TEST_CASE("index and word are inverse") {
  SchreierGraph g = schreier_graph(preset("img3"), 4);
  for (int v = 0; v < g.graph.num_vertices(); ++v) CHECK(g.index(g.word(v)) == v);
  CHECK(word_index(Word{0, 0, 1}, 2) == 1);
  CHECK(index_word(1, 2, 3) == Word{0, 0, 1});
}

TEST_CASE("covering maps") {
  auto r = verify_covering(preset("basilica"), 5);
  CHECK(r.ok);
  CHECK(r.fiber_size == 2);
  auto s = verify_covering(preset("img3"), 4);
  CHECK(s.ok);
  CHECK(s.fiber_size == 3);

  SchreierGraph lo = schreier_graph(preset("basilica"), 4), up = schreier_graph(preset("basilica"), 5);
  auto edges = up.graph.edges();
  // send one edge to a vertex over a different base vertex
  for (auto& e : edges)
    if (e.u != e.v) {
      e.v = (e.v + 2) % up.graph.num_vertices();
      break;
    }
  up.graph = with_edges(up.graph, edges);
  auto bad = verify_covering(lo, up);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.witness.empty());
}

TEST_CASE("ball radius") {
  GroupPreset p = preset("basilica");
  SchreierGraph g = schreier_graph(p, 8);
  const int root = g.index(Word(8, 1));
  // identical rooted graphs agree up to the eccentricity
  int radius = common_ball_radius({&g.graph, root}, {&g.graph, root});
  std::vector<int> dist(g.graph.num_vertices(), -1);
  {
    std::vector<int> q{root};
    dist[root] = 0;
    for (size_t h = 0; h < q.size(); ++h)
      for (auto nb : g.graph.neighbors(q[h]))
        if (dist[nb.to] < 0) dist[nb.to] = dist[q[h]] + 1, q.push_back(nb.to);
  }
  CHECK(radius >= *std::max_element(dist.begin(), dist.end()));

  // along 1^w the radius does not shrink with the level
  int prev = -1;
  for (int n = 4; n <= 11; ++n) {
    SchreierGraph a = schreier_graph(p, n), b = schreier_graph(p, n + 1);
    int r = common_ball_radius({&a.graph, a.index(Word(n, 1))}, {&b.graph, b.index(Word(n + 1, 1))});
    CHECK(r >= prev);
    prev = r;
  }

  // swap a loop at distance 3 with a far edge of the same label
  auto edges = g.graph.edges();
  int loop = -1, far = -1;
  for (size_t i = 0; i < edges.size() && loop < 0; ++i)
    if (edges[i].u == edges[i].v && dist[edges[i].u] == 3) loop = static_cast<int>(i);
  REQUIRE(loop >= 0);
  for (size_t i = 0; i < edges.size() && far < 0; ++i)
    if (edges[i].label == edges[loop].label && edges[i].u != edges[i].v && dist[edges[i].u] >= 8 &&
        dist[edges[i].v] >= 8)
      far = static_cast<int>(i);
  REQUIRE(far >= 0);
  Edge a = edges[loop], b = edges[far];
  edges[loop] = {a.u, b.v, a.label};
  edges[far] = {b.u, a.u, a.label};
  Multigraph edited = with_edges(g.graph, edges);
  CHECK(common_ball_radius({&g.graph, root}, {&edited, root}) == 2);
}

TEST_CASE("one-ended exhaustion along 1^w") {
  GroupPreset p = preset("basilica");
  int checked = 0;
  for (int n = 6; n <= 14; ++n) {
    Exhaustion ex;
    try {
      ex = exhaustion_subgraph(p, n, Word(n, 1), EndConvention::one_ended);
    } catch (const InvalidLevelError&) {
      continue;
    }
    ++checked;
    const SandpileGraph& g = ex.sandpile;
    CHECK(g.sinks().size() == 1);
    auto dec = block_decompose(g.graph, g.sinks()[0]);
    CHECK(dec.is_cactus);
    auto cp = block_path(dec, g.root);
    for (size_t i = 0; i < cp.sizes.size(); ++i) CHECK(cp.sizes[i] == (1 << ((i + 2) / 2)));
  }
  CHECK(checked >= 4);
}

TEST_CASE("invalid levels are signalled") {
  GroupPreset p = preset("basilica");
  bool seen = false;
  for (int n = 3; n <= 12 && !seen; ++n) {
    Word prefix(n, 0);
    prefix[0] = 1;
    prefix[1] = 1;
    try {
      exhaustion_subgraph(p, n, prefix, EndConvention::one_ended);
    } catch (const InvalidLevelError& e) {
      seen = true;
      CHECK(std::string(e.what()).find("invalid-level") != std::string::npos);
    }
  }
  CHECK(seen);
}

TEST_CASE("smallest exhaustion") {
  for (const auto& name : {"basilica", "img3", "adding"}) {
    GroupPreset p = preset(name);
    Exhaustion ex = exhaustion_subgraph(p, 1, Word{1}, EndConvention::one_ended);
    const SandpileGraph& g = ex.sandpile;
    CHECK(g.sinks().size() == 1);
    CHECK(g.names[g.sinks()[0]] == "0");
    CHECK(g.num_vertices() >= 2);
  }
}

TEST_CASE("four-ended exceptional block") {
  GroupPreset p = preset("basilica");
  for (int n : {6, 7, 8, 9}) {
    Exhaustion ex = exhaustion_subgraph(p, n, Word(n, 0), EndConvention::four_ended);
    const SandpileGraph& g = ex.sandpile;
    auto dec = block_decompose(g.graph, g.sinks()[0]);
    CHECK_FALSE(dec.is_cactus);
    int other = 0;
    for (const auto& b : dec.blocks)
      if (b.kind == Block::Kind::other) {
        ++other;
        // four paths between 0^n and the sink: inner vertex count per pair
        const int m1 = (1 << ((n + 1) / 2 - 1)) - 1, m3 = (1 << (n / 2 - 1)) - 1;
        CHECK(b.size() == 2 + 2 * (m1 - 1) + 2 * (m3 - 1));
      }
    CHECK(other == 1);
  }
}

TEST_CASE("graph json") {
  SchreierGraph g = schreier_graph(preset("basilica"), 3);
  auto j = graph_json(g);
  CHECK(j["vertices"].size() == 8);
  CHECK(j["edges"].size() > 0);
  Exhaustion ex = exhaustion_subgraph(preset("basilica"), 6, Word(6, 1), EndConvention::one_ended);
  auto k = graph_json(ex.sandpile, "basilica", 6);
  CHECK(k["preset"] == "basilica");
  CHECK(k["dissipative"].size() == 1);
  CHECK(k.contains("root"));
}
