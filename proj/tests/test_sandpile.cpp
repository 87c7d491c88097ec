#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "sandpile_lab/cactus.hpp"
#include "sandpile_lab/errors.hpp"
#include "sandpile_lab/sandpile.hpp"
#include "sandpile_lab/selftest.hpp"

using namespace sandpile_lab;

namespace {

// c_j on a cycle through the sink: every vertex full except v_j (j = 0: none).
Configuration cycle_config(int L, int j) {
  Configuration c(L, 1);
  c[0] = 0;
  if (j > 0) c[j] = 0;
  return c;
}

SandpileGraph from_edges(int n, const std::vector<std::pair<int, int>>& e, std::vector<int> sinks, int root) {
  std::vector<Edge> edges;
  for (auto [u, v] : e) edges.push_back({u, v, 0});
  SandpileGraph g;
  g.graph = Multigraph(n, edges, {"e"});
  g.dissipative.assign(n, 0);
  for (int s : sinks) g.dissipative[s] = 1;
  for (int v = 0; v < n; ++v) g.names.push_back(std::to_string(v));
  g.root = root;
  return g;
}

// Two 4-cycles sharing vertex 3; sink 0 on the first.
SandpileGraph two_squares() {
  return from_edges(7, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {3, 4}, {4, 5}, {5, 6}, {6, 3}}, {0}, 5);
}

long long total(const SandpileGraph& g, const Configuration& c) {
  long long s = 0;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.is_sink(v)) s += c[v];
  return s;
}

}  // namespace

TEST_CASE("stabilization on a 4-cycle") {
  SandpileGraph g = cycle_sandpile(4);
  auto r = stabilize(g, cycle_config(4, 0));
  CHECK(r.mass == 0);
  CHECK(r.final == cycle_config(4, 0));
  Configuration c = cycle_config(4, 0);
  ++c[1];
  auto s = stabilize(g, c);
  CHECK(s.final == cycle_config(4, 3));
  CHECK(s.mass == 3);
}

TEST_CASE("burning test") {
  SandpileGraph g = cycle_sandpile(4);
  CHECK(burning_test(g, {0, 1, 0, 1}));
  CHECK_FALSE(burning_test(g, {0, 0, 1, 0}));
  SandpileGraph edge = from_edges(2, {{0, 1}}, {0}, 1);
  CHECK(burning_test(edge, {0, 0}));
  CHECK_THROWS_AS(burning_test(g, {0, 2, 1, 1}), InputError);
}

TEST_CASE("burning sequence") {
  SandpileGraph g = cycle_sandpile(4);
  Configuration c0 = cycle_config(4, 0);
  auto seq = burning_sequence(g, c0);
  REQUIRE(seq.has_value());
  CHECK(seq->size() == 4);
  CHECK(seq->front() == 0);
  // firing the sink once from c adds the burning configuration, which returns c
  Configuration x = c0;
  for (auto nb : g.graph.neighbors(0)) x[nb.to] += nb.mult;
  CHECK(stabilize(g, x).final == c0);
  CHECK_FALSE(burning_sequence(g, {0, 0, 1, 0}).has_value());
  SandpileGraph only_sinks = from_edges(2, {{0, 1}}, {0, 1}, 0);
  auto s2 = burning_sequence(only_sinks, {0, 0});
  REQUIRE(s2.has_value());
  CHECK(s2->size() == 2);
}

TEST_CASE("enumeration of recurrent configurations") {
  auto five = enumerate_recurrent(cycle_sandpile(5));
  CHECK(five.size() == 5);
  std::set<Configuration> expect;
  for (int j = 0; j < 5; ++j) expect.insert(cycle_config(5, j));
  CHECK(std::set<Configuration>(five.begin(), five.end()) == expect);
  CHECK(enumerate_recurrent(two_squares()).size() == 16);
  CHECK(enumerate_recurrent(from_edges(2, {{0, 1}}, {0}, 1)).size() == 1);
}

TEST_CASE("spanning trees") {
  CHECK(spanning_tree_count(cycle_sandpile(8)) == 8);
  CHECK(spanning_tree_count(from_edges(2, {{0, 1}, {0, 1}, {0, 1}}, {0}, 1)) == 3);
  for (int n = 6; n <= 12; ++n) {
    Exhaustion ex;
    try {
      ex = exhaustion_subgraph(preset("basilica"), n, Word(n, 1), EndConvention::one_ended);
    } catch (const InvalidLevelError&) {
      continue;
    }
    BigInt prod = 1;
    for (const auto& b : block_decompose(ex.sandpile.graph, ex.sandpile.sinks()[0]).blocks)
      if (b.kind == Block::Kind::cycle) prod *= b.size();
    CHECK(spanning_tree_count(ex.sandpile) == prod);
  }
}

TEST_CASE("|R| equals the tree count on random cacti") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    SandpileGraph g = random_cactus(rng, 12);
    CHECK(BigInt(enumerate_recurrent(g).size()) == spanning_tree_count(g));
  }
}

TEST_CASE("uniform sampler") {
  SandpileGraph g = two_squares();
  auto all = enumerate_recurrent(g);
  std::map<Configuration, long long> hits;
  for (const auto& c : all) hits[c] = 0;
  RecurrentSampler s(g);
  std::mt19937_64 rng(9);
  const long long draws = 100000;
  for (long long i = 0; i < draws; ++i) {
    Configuration c = s.sample(rng);
    REQUIRE(hits.count(c));
    ++hits[c];
  }
  const double e = static_cast<double>(draws) / 16, sd = std::sqrt(e * (1 - 1.0 / 16));
  for (auto [c, h] : hits) CHECK(std::abs(h - e) < 4 * sd);
  for (const auto& c : all) CHECK(burning_test(g, c));

  SandpileGraph sq = cycle_sandpile(4);
  RecurrentSampler s4(sq);
  std::set<Configuration> seen;
  for (int i = 0; i < 200; ++i) {
    Configuration c = s4.sample(rng);
    CHECK(burning_test(sq, c));
    seen.insert(c);
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("lazy resampling keeps the law uniform") {
  SandpileGraph g = two_squares();
  RecurrentSampler s(g);
  Stabilizer st(g);
  std::mt19937_64 rng(21);
  std::map<Configuration, long long> hits;
  std::vector<char> mark, seen(g.num_vertices(), 0);
  Configuration c = s.sample(rng);
  const long long draws = 64000;
  for (long long i = 0; i < draws; ++i) {
    ++hits[c];
    ++c[g.root];
    st.run_from(c, g.root);
    std::vector<int> touched{g.root};
    for (int v : st.fired()) {
      touched.push_back(v);
      for (auto nb : g.graph.neighbors(v))
        if (!g.is_sink(nb.to)) touched.push_back(nb.to);
    }
    s.resample_touched(c, touched, rng, mark);
  }
  CHECK(hits.size() == 16);
  const double e = static_cast<double>(draws) / 16, sd = std::sqrt(e * (1 - 1.0 / 16));
  for (auto [c2, h] : hits) CHECK(std::abs(h - e) < 5 * sd);
}

TEST_CASE("addition on cycle recurrent configurations") {
  for (int L : {3, 4, 5, 7}) {
    SandpileGraph g = cycle_sandpile(L);
    for (int j = 0; j < L; ++j)
      for (int k = 1; k < L; ++k)
        for (int t = 1; t <= 3; ++t) {
          Configuration c = cycle_config(L, j);
          c[k] += t;
          int target = ((j - t * k) % L + L) % L;
          CHECK(stabilize(g, c).final == cycle_config(L, target));
        }
  }
  // all eta <= (2, 2) on |C| = 3
  SandpileGraph g3 = cycle_sandpile(3);
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b) {
        Configuration c = cycle_config(3, j);
        c[1] += a;
        c[2] += b;
        int target = (((j - (a * 1 + b * 2)) % 3) + 3) % 3;
        CHECK(stabilize(g3, c).final == cycle_config(3, target));
      }
}

TEST_CASE("recurrent addition is an abelian group law") {
  SandpileGraph g = two_squares();
  auto all = enumerate_recurrent(g);
  for (const auto& a : all)
    for (const auto& b : all) {
      Configuration ab = add_and_stabilize(g, a, b);
      CHECK(ab == add_and_stabilize(g, b, a));
      CHECK(burning_test(g, ab));
    }
  for (size_t i = 0; i < all.size(); i += 3)
    for (size_t j = 0; j < all.size(); j += 2)
      for (size_t k = 0; k < all.size(); ++k)
        CHECK(add_and_stabilize(g, add_and_stabilize(g, all[i], all[j]), all[k]) ==
              add_and_stabilize(g, all[i], add_and_stabilize(g, all[j], all[k])));
}

TEST_CASE("triggered avalanches on an 8-cycle") {
  SandpileGraph g = cycle_sandpile(8);
  CHECK(trigger_avalanche(g, cycle_config(8, 2), 2).mass == 0);
  CHECK(trigger_avalanche(g, cycle_config(8, 0), 2).mass == 7);
  CHECK_THROWS_AS(trigger_avalanche(g, {0, 0, 0, 1, 1, 1, 1, 1}, 2), InputError);
  Configuration low(8, 1);
  low[0] = 0;
  low[2] = 0;
  low[3] = 0;
  auto r = trigger_avalanche(g, low, 2, nullptr, false);
  CHECK(r.mass == 0);
  CHECK(r.length == 0);
}

TEST_CASE("abelian property and chip conservation") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    SandpileGraph g = random_cactus(rng, 10);
    Configuration c(g.num_vertices(), 0);
    for (int v = 1; v < g.num_vertices(); ++v)
      c[v] = std::uniform_int_distribution<int>(0, 2 * g.graph.degree(v))(rng);
    Configuration a = c, b = c;
    Stabilizer s1(g), s2(g);
    s1.run(a);
    s2.run_random_order(b, rng);
    REQUIRE(a == b);
    for (int v = 0; v < g.num_vertices(); ++v) REQUIRE(s1.fired_count(v) == s2.fired_count(v));
    CHECK(s1.length() == s2.length());
    CHECK(s1.to_sink() == total(g, c) - total(g, a));
    CHECK(is_stable(g, a));
  }
}

TEST_CASE("recurrence is closed under adding a chip") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    SandpileGraph g = random_cactus(rng, 9);
    for (const auto& c : enumerate_recurrent(g))
      for (int v = 1; v < g.num_vertices(); ++v) {
        Configuration x = c;
        ++x[v];
        CHECK(burning_test(g, stabilize(g, x, false).final));
      }
  }
}

TEST_CASE("loops count twice and return their chips") {
  SandpileGraph g = from_edges(2, {{0, 1}, {1, 1}}, {0}, 1);
  CHECK(g.graph.degree(1) == 3);
  auto r = stabilize(g, {0, 3});
  CHECK(r.final == Configuration{0, 2});
  CHECK(r.length == 1);
  CHECK(r.to_sink == 1);
}

TEST_CASE("merging dissipative vertices") {
  SandpileGraph one = cycle_sandpile(5);
  SandpileGraph same = merge_dissipative(one);
  CHECK(same.num_vertices() == one.num_vertices());
  CHECK(spanning_tree_count(same) == spanning_tree_count(one));

  Exhaustion ex = exhaustion_subgraph(preset("basilica"), 6, Word(6, 0), EndConvention::four_ended);
  CHECK(ex.unmerged.sinks().size() == 4);
  CHECK(spanning_tree_count(ex.unmerged) == spanning_tree_count(ex.sandpile));

  // two sinks on a small cactus: same recurrent set size and the same law
  SandpileGraph two = from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}, {3, 5}, {5, 4}}, {0, 5}, 3);
  SandpileGraph merged = merge_dissipative(two);
  auto ra = enumerate_recurrent(two), rb = enumerate_recurrent(merged);
  CHECK(ra.size() == rb.size());
  std::map<int, int> la, lb;
  for (const auto& c : ra) ++la[trigger_avalanche(two, c, two.root).mass];
  for (const auto& c : rb) ++lb[trigger_avalanche(merged, c, merged.root).mass];
  CHECK(la == lb);
}

TEST_CASE("configuration csv") {
  Exhaustion ex = exhaustion_subgraph(preset("basilica"), 6, Word(6, 1), EndConvention::one_ended);
  std::mt19937_64 rng(3);
  Configuration c = sample_recurrent_cactus(ex.sandpile, rng);
  CHECK(configuration_from_csv(ex.sandpile, configuration_csv(ex.sandpile, c)) == c);
}
