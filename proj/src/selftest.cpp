#include "sandpile_lab/selftest.hpp"

#include <functional>
#include <sstream>

#include "sandpile_lab/errors.hpp"
#include "sandpile_lab/experiments.hpp"

namespace sandpile_lab {

namespace {

SandpileGraph make_sandpile(int n, std::vector<Edge> edges, int root) {
  SandpileGraph g;
  g.graph = Multigraph(n, std::move(edges), {"e"});
  g.dissipative.assign(n, 0);
  g.dissipative[0] = 1;
  for (int v = 0; v < n; ++v) g.names.push_back(std::to_string(v));
  g.root = root;
  return g;
}

}  // namespace

SandpileGraph cycle_sandpile(int L) {
  if (L < 2) throw InputError("cycle length must be at least 2");
  std::vector<Edge> edges;
  for (int i = 0; i < L; ++i) edges.push_back({i, (i + 1) % L, 0});
  if (L == 2) edges.resize(2);  // 0-1 twice
  return make_sandpile(L, edges, 1);
}

SandpileGraph random_cactus(std::mt19937_64& rng, int max_vertices) {
  if (max_vertices < 2) throw InputError("a cactus needs at least two vertices");
  std::vector<Edge> edges;
  int n = 1;
  while (n < max_vertices) {
    const int at = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int room = max_vertices - n;
    const int len = std::uniform_int_distribution<int>(1, std::min(6, room + 1))(rng);
    if (len == 1) {
      edges.push_back({at, n++, 0});
    } else {
      // cycle at, n, .., n + len - 2
      int prev = at;
      for (int k = 0; k < len - 1; ++k) {
        edges.push_back({prev, n, 0});
        prev = n++;
      }
      edges.push_back({prev, at, 0});
    }
  }
  return make_sandpile(n, edges, n - 1);
}

MassDistribution enumerated_cycle_distribution(int L, int i0) {
  if (i0 < 1 || i0 >= L) throw InputError("i0 out of range");
  SandpileGraph g = cycle_sandpile(L);
  MassDistribution d;
  d.method = "enumeration";
  d.graph_id = "cycle:" + std::to_string(L);
  d.root = i0;
  for (const auto& c : enumerate_recurrent(g)) {
    d.mass[trigger_avalanche(g, c, i0, nullptr, true, false).mass] += 1;
  }
  d.denominator = static_cast<long long>(d.total());
  return d;
}

bool run_selftest(std::ostream& out) {
  bool all = true;
  auto check = [&](const std::string& name, const std::function<std::string()>& body) {
    std::string err;
    try {
      err = body();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    out << (err.empty() ? "ok   " : "FAIL ") << name << (err.empty() ? "" : ": " + err) << "\n";
    all = all && err.empty();
  };

  check("cycle law matches trigger enumeration, |C| <= 16", [] {
    for (int L = 2; L <= 16; ++L)
      for (int i0 = 1; 2 * i0 <= L; ++i0) {
        MassDistribution a = exact_cycle_distribution(L, i0), b = enumerated_cycle_distribution(L, i0);
        for (int M = 0; M < L; ++M)
          if (a.exact(M) != b.exact(M))
            return "L=" + std::to_string(L) + " i0=" + std::to_string(i0) + " M=" + std::to_string(M);
      }
    return std::string();
  });

  check("recurrent count = tree count = product of cycle lengths on random cacti", [] {
    std::mt19937_64 rng(stream_seed(1, 0));
    for (int t = 0; t < 20; ++t) {
      SandpileGraph g = random_cactus(rng, 14);
      BigInt prod = 1;
      for (const auto& b : block_decompose(g.graph, 0).blocks)
        if (b.kind == Block::Kind::cycle) prod *= b.size();
      BigInt trees = spanning_tree_count(g);
      if (trees != prod || BigInt(enumerate_recurrent(g).size()) != prod) return "cactus " + std::to_string(t);
    }
    return std::string();
  });

  check("burning test agrees with the set iteration", [] {
    std::mt19937_64 rng(stream_seed(2, 0));
    for (int t = 0; t < 50; ++t) {
      SandpileGraph g = random_cactus(rng, 10);
      Configuration c(g.num_vertices(), 0);
      for (int v = 1; v < g.num_vertices(); ++v)
        c[v] = std::uniform_int_distribution<int>(0, g.graph.degree(v) - 1)(rng);
      if (burning_test(g, c) != burning_test_sets(g, c)) return "case " + std::to_string(t);
    }
    return std::string();
  });

  check("abelian property under random firing order", [] {
    std::mt19937_64 rng(stream_seed(3, 0));
    for (int t = 0; t < 100; ++t) {
      SandpileGraph g = random_cactus(rng, 12);
      Configuration c(g.num_vertices(), 0);
      for (int v = 1; v < g.num_vertices(); ++v) c[v] = std::uniform_int_distribution<int>(0, 3 * g.graph.degree(v))(rng);
      Configuration a = c, b = c;
      Stabilizer s1(g), s2(g);
      s1.run(a);
      s2.run_random_order(b, rng);
      if (a != b || s1.fired().size() != s2.fired().size()) return "case " + std::to_string(t);
      for (int v = 0; v < g.num_vertices(); ++v)
        if (s1.fired_count(v) != s2.fired_count(v)) return "odometer, case " + std::to_string(t);
    }
    return std::string();
  });

  check("Schreier graphs cover the previous level", [] {
    for (const std::string name : {"basilica", "img3", "adding", "kneading:00"})
      for (int n = 1; n <= 6; ++n)
        if (!verify_covering(preset(name), n).ok) return name + " n=" + std::to_string(n);
    return std::string();
  });

  check("transfer equals full enumeration (basilica 1^w, img3 (12)^w)", [] {
    struct Case {
      std::string preset, ray;
      int n, J;
    };
    for (const auto& c : {Case{"basilica", "per(1)", 10, 5}, Case{"img3", "per(12)", 6, 3},
                          Case{"basilica", "per(011)", 12, 3}}) {
      GroupPreset p = preset(c.preset);
      Exhaustion ex = first_valid_exhaustion(p, parse_ray(c.ray, p.automaton.alphabet()), c.n, c.n + 4,
                                             EndConvention::one_ended);
      const SandpileGraph& g = ex.sandpile;
      MassDistribution a = dp_blockpath_distribution(g, g.root, c.J, true);
      MassDistribution b = exact_blockpath_distribution(g, g.root, c.J);
      if (a.denominator != b.denominator || a.mass != b.mass || a.bucket != b.bucket || a.diameter != b.diameter)
        return c.preset + " " + c.ray;
    }
    return std::string();
  });

  check("Monte Carlo merge does not depend on the thread count", [] {
    Exhaustion ex = exhaustion_subgraph(preset("basilica"), 8, Word(8, 1), EndConvention::one_ended);
    const SandpileGraph& g = ex.sandpile;
    McOptions one, many;
    one.chunk = many.chunk = 97;
    many.threads = 3;
    MassDistribution a = mc_distribution(g, g.root, 2000, 11, one), b = mc_distribution(g, g.root, 2000, 11, many);
    return a.mass == b.mass ? std::string() : std::string("laws differ");
  });

  check("distribution CSV round trip", [] {
    MassDistribution d = exact_cycle_distribution(9, 3);
    MassDistribution e = distribution_from_csv(distribution_csv(d));
    for (int M = 0; M < 9; ++M)
      if (d.exact(M) != e.exact(M)) return std::string("mismatch");
    return std::string();
  });

  return all;
}

}  // namespace sandpile_lab
