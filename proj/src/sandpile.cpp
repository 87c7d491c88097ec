#include "sandpile_lab/sandpile.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "sandpile_lab/cactus.hpp"
#include "sandpile_lab/errors.hpp"

namespace sandpile_lab {

namespace {

constexpr std::int64_t kChipLimit = std::int64_t{1} << 50;

void check_shape(const SandpileGraph& g, const Configuration& c) {
  if (static_cast<int>(c.size()) != g.num_vertices()) throw InputError("configuration size differs from vertex count");
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.is_sink(v) && (c[v] < 0 || c[v] > kChipLimit)) throw InputError("chip count out of range");
}

}  // namespace

Stabilizer::Stabilizer(const SandpileGraph& g)
    : g_(g), count_(g.num_vertices(), 0), queued_(g.num_vertices(), 0) {
  const Multigraph& G = g.graph;
  const int n = G.num_vertices();
  off_.assign(1, 0);
  thr_.assign(n, 0);
  loss_.assign(n, 0);
  to_sink_of_.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    thr_[v] = g.is_sink(v) ? std::numeric_limits<std::int64_t>::max() : G.degree(v);
    loss_[v] = G.degree(v) - 2 * G.loops(v);
    for (auto nb : G.neighbors(v)) {
      if (g.is_sink(nb.to)) {
        to_sink_of_[v] += nb.mult;
      } else {
        nbr_.push_back(nb.to);
        mult_.push_back(nb.mult);
      }
    }
    off_.push_back(static_cast<int>(nbr_.size()));
  }
}

void Stabilizer::reset() {
  for (int v : fired_) count_[v] = 0;
  fired_.clear();
  work_.clear();
  length_ = 0;
  to_sink_ = 0;
}

void Stabilizer::fire(Configuration& c, int v) {
  c[v] -= loss_[v];
  if (count_[v]++ == 0) fired_.push_back(v);
  ++length_;
  to_sink_ += to_sink_of_[v];
  for (int i = off_[v]; i < off_[v + 1]; ++i) {
    const int w = nbr_[i];
    c[w] += mult_[i];
    if (!queued_[w] && c[w] >= thr_[w]) {
      queued_[w] = 1;
      work_.push_back(w);
    }
  }
}

void Stabilizer::drain(Configuration& c) {
  for (size_t head = 0; head < work_.size(); ++head) {
    int v = work_[head];
    queued_[v] = 0;
    if (c[v] < thr_[v]) continue;
    fire(c, v);
    if (c[v] >= thr_[v]) {
      queued_[v] = 1;
      work_.push_back(v);
    }
    if (head > 4096 && head * 2 > work_.size()) {
      work_.erase(work_.begin(), work_.begin() + static_cast<long>(head) + 1);
      head = static_cast<size_t>(-1);
    }
  }
  work_.clear();
}

void Stabilizer::run(Configuration& c) {
  reset();
  for (int v = 0; v < g_.num_vertices(); ++v)
    if (c[v] >= thr_[v]) {
      queued_[v] = 1;
      work_.push_back(v);
    }
  drain(c);
}

void Stabilizer::run_from(Configuration& c, int seed) {
  reset();
  if (c[seed] >= thr_[seed]) {
    queued_[seed] = 1;
    work_.push_back(seed);
  }
  drain(c);
}

void Stabilizer::run_random_order(Configuration& c, std::mt19937_64& rng) {
  reset();
  for (int v = 0; v < g_.num_vertices(); ++v)
    if (c[v] >= thr_[v]) {
      queued_[v] = 1;
      work_.push_back(v);
    }
  while (!work_.empty()) {
    size_t i = std::uniform_int_distribution<size_t>(0, work_.size() - 1)(rng);
    std::swap(work_[i], work_.back());
    int v = work_.back();
    work_.pop_back();
    queued_[v] = 0;
    if (c[v] < thr_[v]) continue;
    fire(c, v);
    if (c[v] >= thr_[v]) {
      queued_[v] = 1;
      work_.push_back(v);
    }
  }
}

bool is_stable(const SandpileGraph& g, const Configuration& c) {
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.is_sink(v) && c[v] >= g.graph.degree(v)) return false;
  return true;
}

int induced_diameter(const SandpileGraph& g, const std::vector<int>& verts) {
  if (verts.size() <= 1) return 0;
  std::vector<int> local(g.num_vertices(), -1);
  for (size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
  std::vector<int> dist(verts.size());
  std::vector<int> q(verts.size());
  int best = 0;
  for (size_t s = 0; s < verts.size(); ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    size_t head = 0, tail = 0;
    q[tail++] = static_cast<int>(s);
    dist[s] = 0;
    while (head < tail) {
      int x = q[head++];
      best = std::max(best, dist[x]);
      for (auto nb : g.graph.neighbors(verts[x])) {
        int y = local[nb.to];
        if (y >= 0 && dist[y] < 0) {
          dist[y] = dist[x] + 1;
          q[tail++] = y;
        }
      }
    }
  }
  return best;
}

StabilizationResult stabilize(const SandpileGraph& g, Configuration c, bool with_diameter) {
  check_shape(g, c);
  if (g.sinks().empty()) throw InputError("dissipative set must be nonempty");
  Stabilizer st(g);
  st.run(c);
  StabilizationResult r;
  r.final = std::move(c);
  r.fired_counts.assign(g.num_vertices(), 0);
  for (int v : st.fired()) r.fired_counts[v] = st.fired_count(v);
  r.mass = static_cast<int>(st.fired().size());
  r.length = st.length();
  r.to_sink = st.to_sink();
  if (with_diameter) r.diameter = induced_diameter(g, st.fired());
  return r;
}

namespace {

std::vector<int> burn_order(const SandpileGraph& g, const Configuration& c) {
  check_shape(g, c);
  if (!is_stable(g, c)) throw InputError("unstable-input");
  const Multigraph& G = g.graph;
  const int n = g.num_vertices();
  // need[v]: chips v still lacks; it burns once edges from burnt vertices cover it
  std::vector<std::int64_t> got(n, 0);
  std::vector<char> burnt(n, 0);
  std::vector<int> order;
  std::deque<int> q;
  for (int v = 0; v < n; ++v)
    if (g.is_sink(v)) {
      burnt[v] = 1;
      q.push_back(v);
    }
  auto ready = [&](int v) { return c[v] + got[v] >= G.degree(v); };
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    if (!g.is_sink(v)) order.push_back(v);
    for (auto nb : G.neighbors(v)) {
      int u = nb.to;
      if (burnt[u]) continue;
      got[u] += nb.mult;
      if (ready(u)) {
        burnt[u] = 1;
        q.push_back(u);
      }
    }
  }
  return order;
}

}  // namespace

bool burning_test(const SandpileGraph& g, const Configuration& c) {
  auto order = burn_order(g, c);
  return static_cast<int>(order.size() + g.sinks().size()) == g.num_vertices();
}

bool burning_test_sets(const SandpileGraph& g, const Configuration& c) {
  check_shape(g, c);
  if (!is_stable(g, c)) throw InputError("unstable-input");
  const Multigraph& G = g.graph;
  const int n = g.num_vertices();
  std::vector<char> unburnt(g.dissipative.size(), 0);
  for (int v = 0; v < n; ++v) unburnt[v] = !g.is_sink(v);
  for (;;) {
    std::vector<int> burn;
    for (int v = 0; v < n; ++v) {
      if (!unburnt[v]) continue;
      std::int64_t deg = 2 * G.loops(v);
      for (auto nb : G.neighbors(v))
        if (unburnt[nb.to]) deg += nb.mult;
      if (c[v] >= deg) burn.push_back(v);
    }
    if (burn.empty()) break;
    for (int v : burn) unburnt[v] = 0;
  }
  return std::none_of(unburnt.begin(), unburnt.end(), [](char x) { return x != 0; });
}

std::optional<std::vector<int>> burning_sequence(const SandpileGraph& g, const Configuration& c) {
  auto order = burn_order(g, c);
  auto sinks = g.sinks();
  if (static_cast<int>(order.size() + sinks.size()) != g.num_vertices()) return std::nullopt;
  sinks.insert(sinks.end(), order.begin(), order.end());
  return sinks;
}

namespace {

struct BlockLayout {
  BlockDecomposition dec;
  std::vector<std::int64_t> offset;  // deg(v) - deg_B(v) for the parent block B
};

BlockLayout layout(const SandpileGraph& g) {
  auto sinks = g.sinks();
  if (sinks.size() != 1) throw InputError("block product form needs exactly one sink");
  BlockLayout L{block_decompose(g.graph, sinks[0]), {}};
  L.offset.assign(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (g.is_sink(v)) continue;
    int b = L.dec.parent_block[v];
    if (b < 0) throw ConstructionError("graph is not connected to the sink");
    const auto& vs = L.dec.blocks[b].vertices;
    std::int64_t db = 0;
    for (int u : vs)
      if (u != v) db += g.graph.multiplicity(v, u);
    L.offset[v] = g.graph.degree(v) - db;
  }
  return L;
}

// All recurrent configurations of one block with its root as sink, as values
// of the block-local configuration on vertices[1..].
std::vector<std::vector<std::int64_t>> block_recurrent(const SandpileGraph& g, const Block& b) {
  const int L = b.size();
  std::vector<std::vector<std::int64_t>> out;
  if (b.kind == Block::Kind::edge) {
    out.push_back({0});
    return out;
  }
  if (b.kind == Block::Kind::cycle) {
    for (int j = 0; j < L; ++j) {
      std::vector<std::int64_t> c(L - 1, 1);
      if (j > 0) c[j - 1] = 0;
      out.push_back(c);
    }
    return out;
  }
  // general block: exhaustive scan on the induced block graph
  std::vector<Edge> edges;
  std::map<int, int> local;
  for (int i = 0; i < L; ++i) local[b.vertices[i]] = i;
  for (const auto& e : g.graph.edges())
    if (e.u != e.v && local.count(e.u) && local.count(e.v)) edges.push_back({local[e.u], local[e.v], e.label});
  SandpileGraph sub;
  sub.graph = Multigraph(L, edges);
  sub.dissipative.assign(L, 0);
  sub.dissipative[0] = 1;
  sub.names.assign(L, "");
  std::uint64_t total = 1;
  for (int i = 1; i < L; ++i) {
    total *= static_cast<std::uint64_t>(sub.graph.degree(i));
    if (total > kEnumerationGuard) throw ResourceError("block too large for exhaustive enumeration");
  }
  Configuration c(L, 0);
  for (std::uint64_t k = 0; k < total; ++k) {
    std::uint64_t r = k;
    for (int i = 1; i < L; ++i) {
      c[i] = static_cast<std::int64_t>(r % sub.graph.degree(i));
      r /= sub.graph.degree(i);
    }
    if (burning_test(sub, c)) out.emplace_back(c.begin() + 1, c.end());
  }
  return out;
}

}  // namespace

std::vector<Configuration> enumerate_recurrent(const SandpileGraph& g) {
  auto sinks = g.sinks();
  if (sinks.empty()) throw InputError("dissipative set must be nonempty");
  const int n = g.num_vertices();
  if (sinks.size() == 1) {
    BlockLayout L = layout(g);
    std::vector<std::vector<std::vector<std::int64_t>>> per_block;
    std::uint64_t total = 1;
    for (const auto& b : L.dec.blocks) {
      per_block.push_back(block_recurrent(g, b));
      total *= per_block.back().size();
      if (total > kEnumerationGuard) throw ResourceError("recurrent set too large to list; use sampling");
    }
    std::vector<Configuration> out;
    out.reserve(total);
    std::vector<size_t> idx(per_block.size(), 0);
    for (std::uint64_t k = 0; k < total; ++k) {
      Configuration c(n, 0);
      for (int v = 0; v < n; ++v) c[v] = g.is_sink(v) ? 0 : L.offset[v];
      for (size_t bi = 0; bi < per_block.size(); ++bi) {
        const auto& vs = L.dec.blocks[bi].vertices;
        const auto& vals = per_block[bi][idx[bi]];
        for (size_t i = 1; i < vs.size(); ++i)
          if (L.dec.parent_block[vs[i]] == static_cast<int>(bi)) c[vs[i]] += vals[i - 1];
      }
      out.push_back(std::move(c));
      for (size_t bi = 0; bi < idx.size(); ++bi) {
        if (++idx[bi] < per_block[bi].size()) break;
        idx[bi] = 0;
      }
    }
    return out;
  }
  std::uint64_t total = 1;
  for (int v = 0; v < n; ++v)
    if (!g.is_sink(v)) {
      total *= static_cast<std::uint64_t>(g.graph.degree(v));
      if (total > kEnumerationGuard) throw ResourceError("use sampling/enumeration not available: too many stable configurations");
    }
  std::vector<Configuration> out;
  Configuration c(n, 0);
  for (std::uint64_t k = 0; k < total; ++k) {
    std::uint64_t r = k;
    for (int v = 0; v < n; ++v)
      if (!g.is_sink(v)) {
        c[v] = static_cast<std::int64_t>(r % g.graph.degree(v));
        r /= g.graph.degree(v);
      }
    if (burning_test(g, c)) out.push_back(c);
  }
  return out;
}

BigInt spanning_tree_count(const SandpileGraph& g) {
  using boost::multiprecision::cpp_rational;
  const int n = g.num_vertices();
  if (g.sinks().empty()) throw InputError("dissipative set must be nonempty");
  {
    std::vector<char> seen(n, 0);
    std::deque<int> q{g.sinks()[0]};
    seen[q.front()] = 1;
    int cnt = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (auto nb : g.graph.neighbors(v))
        if (!seen[nb.to]) {
          seen[nb.to] = 1;
          ++cnt;
          q.push_back(nb.to);
        }
    }
    if (cnt != n) throw ConstructionError("graph is disconnected");
  }
  // Sparse symmetric elimination with a minimum-degree pivot order.
  std::vector<int> id(n, -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (!g.is_sink(v)) id[v] = m++;
  std::vector<std::map<int, cpp_rational>> row(m);
  for (int v = 0; v < n; ++v) {
    if (id[v] < 0) continue;
    std::int64_t d = 0;
    for (auto nb : g.graph.neighbors(v)) {
      d += nb.mult;
      if (id[nb.to] >= 0) row[id[v]][id[nb.to]] -= nb.mult;
    }
    row[id[v]][id[v]] += d;
  }
  std::vector<char> done(m, 0);
  cpp_rational det = 1;
  for (int step = 0; step < m; ++step) {
    int piv = -1;
    size_t best = std::numeric_limits<size_t>::max();
    for (int i = 0; i < m; ++i)
      if (!done[i] && row[i].size() < best) {
        best = row[i].size();
        piv = i;
      }
    cpp_rational a = row[piv][piv];
    if (a == 0) return 0;
    det *= a;
    done[piv] = 1;
    std::vector<std::pair<int, cpp_rational>> nbrs;
    for (auto& [j, val] : row[piv])
      if (j != piv) nbrs.emplace_back(j, val);
    for (auto& [i, ai] : nbrs) {
      auto& ri = row[i];
      cpp_rational f = ai / a;
      for (auto& [j, aj] : nbrs) {
        cpp_rational nv = ri[j] - f * aj;
        if (nv == 0) ri.erase(j);
        else ri[j] = nv;
      }
      ri.erase(piv);
    }
    row[piv].clear();
  }
  if (denominator(det) != 1) throw ConstructionError("non-integral determinant");
  return numerator(det);
}

Configuration block_base_configuration(const SandpileGraph& g) {
  BlockLayout L = layout(g);
  Configuration c(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.is_sink(v)) c[v] = L.offset[v] + (L.dec.blocks[L.dec.parent_block[v]].kind == Block::Kind::cycle ? 1 : 0);
  return c;
}

RecurrentSampler::RecurrentSampler(const SandpileGraph& g) {
  BlockLayout L = layout(g);
  if (!L.dec.is_cactus) throw InputError("recurrent sampling needs a cactus");
  base_.assign(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.is_sink(v)) base_[v] = L.offset[v] + (L.dec.blocks[L.dec.parent_block[v]].kind == Block::Kind::cycle ? 1 : 0);
  cycle_of_.assign(g.num_vertices(), -1);
  for (const auto& b : L.dec.blocks)
    if (b.kind == Block::Kind::cycle) {
      for (size_t i = 1; i < b.vertices.size(); ++i) cycle_of_[b.vertices[i]] = static_cast<int>(cycles_.size());
      cycles_.emplace_back(b.vertices.begin() + 1, b.vertices.end());
    }
}

void RecurrentSampler::draw_cycle(Configuration& c, int i, std::mt19937_64& rng) const {
  const auto& cyc = cycles_[i];
  std::uint64_t L = cyc.size() + 1;
  std::uint64_t j = std::uniform_int_distribution<std::uint64_t>(0, L - 1)(rng);
  if (j > 0) --c[cyc[j - 1]];
}

void RecurrentSampler::sample_into(Configuration& c, std::mt19937_64& rng) const {
  c = base_;
  for (int i = 0; i < num_cycles(); ++i) draw_cycle(c, i, rng);
}

void RecurrentSampler::resample_touched(Configuration& c, const std::vector<int>& touched, std::mt19937_64& rng,
                                        std::vector<char>& mark) const {
  mark.assign(cycles_.size(), 0);
  std::vector<int> redraw;
  for (int v : touched) {
    c[v] = base_[v];
    int i = cycle_of_[v];
    if (i >= 0 && !mark[i]) {
      mark[i] = 1;
      redraw.push_back(i);
    }
  }
  for (int i : redraw) {
    for (int v : cycles_[i]) c[v] = base_[v];
    draw_cycle(c, i, rng);
  }
}

Configuration RecurrentSampler::sample(std::mt19937_64& rng) const {
  Configuration c;
  sample_into(c, rng);
  return c;
}

Configuration RecurrentSampler::with_indices(const std::vector<int>& k) const {
  Configuration c = base_;
  for (size_t i = 0; i < cycles_.size() && i < k.size(); ++i)
    if (k[i] > 0) --c[cycles_[i][k[i] - 1]];
  return c;
}

Configuration sample_recurrent_cactus(const SandpileGraph& g, std::mt19937_64& rng) {
  return RecurrentSampler(g).sample(rng);
}

Configuration add_and_stabilize(const SandpileGraph& g, const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) throw InputError("configuration sizes differ");
  Configuration c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = g.is_sink(static_cast<int>(i)) ? 0 : a[i] + b[i];
  return stabilize(g, std::move(c), false).final;
}

AvalancheRecord trigger_avalanche(const SandpileGraph& g, const Configuration& c, int v,
                                  const std::vector<int>* stop_points, bool check_recurrent,
                                  bool with_diameter) {
  if (v < 0 || v >= g.num_vertices() || g.is_sink(v)) throw InputError("avalanche site must be non-dissipative");
  if (check_recurrent && !burning_test(g, c)) throw InputError("configuration is not recurrent");
  Configuration x = c;
  ++x[v];
  Stabilizer st(g);
  st.run(x);
  AvalancheRecord r;
  r.mass = static_cast<int>(st.fired().size());
  r.length = st.length();
  if (with_diameter) r.diameter = induced_diameter(g, st.fired());
  if (stop_points) {
    if (r.mass == 0) {
      r.stop_block = 0;
    } else {
      r.stop_block = static_cast<int>(stop_points->size());
      for (size_t j = 0; j < stop_points->size(); ++j) {
        int p = (*stop_points)[j];
        if (g.is_sink(p) || st.fired_count(p) == 0) {
          r.stop_block = static_cast<int>(j) + 1;
          break;
        }
      }
    }
  }
  return r;
}

SandpileGraph merge_dissipative(const SandpileGraph& g) {
  auto sinks = g.sinks();
  if (sinks.empty()) throw InputError("dissipative set must be nonempty");
  const int n = g.num_vertices();
  std::vector<int> map(n, -1);
  int next = 0, merged = -1;
  SandpileGraph out;
  std::string sink_name;
  for (int v = 0; v < n; ++v) {
    if (g.is_sink(v)) {
      if (merged < 0) {
        merged = next++;
        out.names.push_back("");
      }
      map[v] = merged;
      sink_name += (sink_name.empty() ? "" : "+") + g.names[v];
    } else {
      map[v] = next++;
      out.names.push_back(g.names[v]);
    }
  }
  out.names[merged] = sink_name;
  std::vector<Edge> edges;
  for (const auto& e : g.graph.edges()) {
    if (g.is_sink(e.u) && g.is_sink(e.v)) continue;
    edges.push_back({map[e.u], map[e.v], e.label});
  }
  out.graph = Multigraph(next, std::move(edges), g.graph.label_names());
  out.dissipative.assign(next, 0);
  out.dissipative[merged] = 1;
  out.root = g.root >= 0 ? map[g.root] : -1;
  return out;
}

std::string configuration_csv(const SandpileGraph& g, const Configuration& c) {
  std::ostringstream os;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.is_sink(v)) os << g.names[v] << ',' << c[v] << '\n';
  return os.str();
}

Configuration configuration_from_csv(const SandpileGraph& g, const std::string& csv) {
  std::map<std::string, int> idx;
  for (int v = 0; v < g.num_vertices(); ++v) idx[g.names[v]] = v;
  Configuration c(g.num_vertices(), 0);
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("malformed configuration line: " + line);
    auto it = idx.find(line.substr(0, comma));
    if (it == idx.end() || g.is_sink(it->second)) throw InputError("unknown vertex in configuration: " + line);
    c[it->second] = std::stoll(line.substr(comma + 1));
  }
  return c;
}

}  // namespace sandpile_lab
