#include "sandpile_lab/schreier.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

#include "sandpile_lab/errors.hpp"
#include "sandpile_lab/sandpile.hpp"

namespace sandpile_lab {

Multigraph::Multigraph(int n, std::vector<Edge> edges, std::vector<std::string> label_names)
    : n_(n), edges_(std::move(edges)), label_names_(std::move(label_names)) {
  loops_.assign(n_, 0);
  deg_.assign(n_, 0);
  std::vector<std::pair<int, int>> ends;
  ends.reserve(2 * edges_.size());
  for (const auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_) throw ConstructionError("edge endpoint out of range");
    if (e.u == e.v) {
      ++loops_[e.u];
      deg_[e.u] += 2;
    } else {
      ends.emplace_back(e.u, e.v);
      ends.emplace_back(e.v, e.u);
      ++deg_[e.u];
      ++deg_[e.v];
    }
  }
  std::sort(ends.begin(), ends.end());
  off_.assign(n_ + 1, 0);
  for (size_t i = 0; i < ends.size();) {
    size_t j = i;
    while (j < ends.size() && ends[j] == ends[i]) ++j;
    adj_.push_back({ends[i].second, static_cast<int>(j - i)});
    ++off_[ends[i].first + 1];
    i = j;
  }
  for (int v = 0; v < n_; ++v) off_[v + 1] += off_[v];
}

int Multigraph::multiplicity(int u, int v) const {
  if (u == v) return loops_[u];
  for (auto nb : neighbors(u))
    if (nb.to == v) return nb.mult;
  return 0;
}

long long word_index(const Word& w, int q) {
  long long idx = 0;
  for (auto x : w) idx = idx * q + x;
  return idx;
}

Word index_word(long long idx, int q, int n) {
  Word w(n);
  for (int i = n - 1; i >= 0; --i) {
    w[i] = static_cast<std::uint8_t>(idx % q);
    idx /= q;
  }
  return w;
}

Word SchreierGraph::word(int v) const { return index_word(v, q, level); }
int SchreierGraph::index(const Word& w) const {
  if (static_cast<int>(w.size()) != level) throw InputError("word has wrong level");
  for (auto x : w)
    if (x >= q) throw InputError("invalid letter in word");
  return static_cast<int>(word_index(w, q));
}

SchreierGraph schreier_graph(const GroupPreset& p, int n) {
  if (n < 1) throw InputError("level must be at least 1");
  const Automaton& a = p.automaton;
  const int q = a.alphabet();
  long long total = 1;
  for (int i = 0; i < n; ++i) {
    total *= q;
    if (total > (1LL << 26)) throw ResourceError("level too large for an explicit graph");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(total) * a.generators().size());
  std::vector<std::string> labels;
  for (int g : a.generators()) labels.push_back(a.name(g));
  Word w(n), img(n);
  for (long long i = 0; i < total; ++i) {
    w = index_word(i, q, n);
    for (size_t gi = 0; gi < a.generators().size(); ++gi) {
      img = w;
      a.act_inplace(a.generators()[gi], img.data(), n);
      edges.push_back({static_cast<int>(i), static_cast<int>(word_index(img, q)), static_cast<int>(gi)});
    }
  }
  SchreierGraph s;
  s.preset = p.name;
  s.q = q;
  s.level = n;
  s.graph = Multigraph(static_cast<int>(total), std::move(edges), labels);
  return s;
}

CoveringReport verify_covering(const SchreierGraph& lower, const SchreierGraph& upper) {
  CoveringReport r;
  const int q = upper.q;
  if (upper.level != lower.level + 1 || upper.q != lower.q) {
    r.ok = false;
    r.witness = "levels are not consecutive";
    return r;
  }
  const int nl = lower.graph.num_vertices();
  const int labels = static_cast<int>(lower.graph.label_names().size());
  std::vector<int> out(static_cast<size_t>(nl) * labels, -1);
  for (const auto& e : lower.graph.edges()) out[static_cast<size_t>(e.u) * labels + e.label] = e.v;
  std::vector<int> fiber(nl, 0);
  for (int v = 0; v < upper.graph.num_vertices(); ++v) ++fiber[v / q];
  r.fiber_size = q;
  for (int v = 0; v < nl; ++v)
    if (fiber[v] != q) {
      r.ok = false;
      r.witness = "fiber of " + word_to_string(lower.word(v)) + " has size " + std::to_string(fiber[v]);
      return r;
    }
  std::vector<int> preimages(out.size(), 0);
  for (const auto& e : upper.graph.edges()) {
    int pu = e.u / q, pv = e.v / q;
    if (e.label < 0 || e.label >= labels || out[static_cast<size_t>(pu) * labels + e.label] != pv) {
      r.ok = false;
      r.witness = "edge " + word_to_string(upper.word(e.u)) + " -> " + word_to_string(upper.word(e.v)) +
                  " label " + std::to_string(e.label) + " has no image";
      return r;
    }
    ++preimages[static_cast<size_t>(pu) * labels + e.label];
  }
  for (size_t i = 0; i < preimages.size(); ++i)
    if (out[i] >= 0 && preimages[i] != q) {
      r.ok = false;
      r.witness = "edge from " + word_to_string(lower.word(static_cast<int>(i / labels))) + " has " +
                  std::to_string(preimages[i]) + " lifts";
      return r;
    }
  return r;
}

CoveringReport verify_covering(const GroupPreset& p, int n) {
  return verify_covering(schreier_graph(p, n), schreier_graph(p, n + 1));
}

namespace {

struct Moves {
  int labels = 0;
  std::vector<int> out, in;  // [v * labels + l]
  int move(int v, int m) const {
    return m < labels ? out[static_cast<size_t>(v) * labels + m]
                      : in[static_cast<size_t>(v) * labels + (m - labels)];
  }
};

Moves label_moves(const Multigraph& g) {
  Moves mv;
  mv.labels = static_cast<int>(g.label_names().size());
  if (mv.labels == 0) throw InputError("graph carries no generator labels");
  mv.out.assign(static_cast<size_t>(g.num_vertices()) * mv.labels, -1);
  mv.in = mv.out;
  for (const auto& e : g.edges()) {
    if (e.label < 0 || e.label >= mv.labels) throw InputError("edge label out of range");
    auto& o = mv.out[static_cast<size_t>(e.u) * mv.labels + e.label];
    auto& i = mv.in[static_cast<size_t>(e.v) * mv.labels + e.label];
    if (o != -1 || i != -1) throw InputError("labels do not act as permutations");
    o = e.v;
    i = e.u;
  }
  for (int x : mv.out)
    if (x < 0) throw InputError("labels do not act as permutations");
  return mv;
}

std::vector<int> bfs_dist(const Multigraph& g, int s) {
  std::vector<int> d(g.num_vertices(), -1);
  std::deque<int> q{s};
  d[s] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (auto nb : g.neighbors(v))
      if (d[nb.to] < 0) {
        d[nb.to] = d[v] + 1;
        q.push_back(nb.to);
      }
  }
  return d;
}

bool balls_agree(const Moves& ma, const Moves& mb, const std::vector<int>& da,
                 const std::vector<int>& db, int ra, int rb, int r) {
  std::map<int, int> phi, psi;
  std::deque<int> q{ra};
  phi[ra] = rb;
  psi[rb] = ra;
  std::vector<int> ball;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    ball.push_back(x);
    int fx = phi[x];
    if (db[fx] != da[x]) return false;
    for (int m = 0; m < 2 * ma.labels; ++m) {
      int y = ma.move(x, m), y2 = mb.move(fx, m);
      bool in_a = da[y] >= 0 && da[y] <= r, in_b = db[y2] >= 0 && db[y2] <= r;
      if (in_a != in_b) return false;
      if (!in_a) continue;
      auto it = phi.find(y);
      if (it != phi.end()) {
        if (it->second != y2) return false;
        continue;
      }
      if (psi.count(y2)) return false;
      phi[y] = y2;
      psi[y2] = y;
      q.push_back(y);
    }
  }
  size_t nb = 0;
  for (int d : db)
    if (d >= 0 && d <= r) ++nb;
  return nb == ball.size();
}

}  // namespace

int common_ball_radius(const RootedGraph& a, const RootedGraph& b) {
  if (a.graph->label_names() != b.graph->label_names()) throw InputError("graphs use different generator labels");
  Moves ma = label_moves(*a.graph), mb = label_moves(*b.graph);
  auto da = bfs_dist(*a.graph, a.root), db = bfs_dist(*b.graph, b.root);
  int ecc = std::max(*std::max_element(da.begin(), da.end()), *std::max_element(db.begin(), db.end()));
  if (!balls_agree(ma, mb, da, db, a.root, b.root, 0)) return -1;
  int lo = 0, hi = ecc;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (balls_agree(ma, mb, da, db, a.root, b.root, mid)) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

std::vector<int> SandpileGraph::sinks() const {
  std::vector<int> s;
  for (int v = 0; v < num_vertices(); ++v)
    if (dissipative[v]) s.push_back(v);
  return s;
}

int SandpileGraph::vertex(const std::string& name) const {
  for (int v = 0; v < num_vertices(); ++v)
    if (names[v] == name) return v;
  throw InputError("unknown vertex '" + name + "'");
}

std::string to_string(EndConvention c) {
  switch (c) {
    case EndConvention::one_ended: return "one-ended";
    case EndConvention::two_ended: return "two-ended";
    case EndConvention::four_ended: return "four-ended";
  }
  return "?";
}

SandpileGraph induced_sandpile(const SchreierGraph& g, const std::vector<int>& verts,
                               const std::vector<int>& sinks, int root) {
  std::vector<int> local(g.graph.num_vertices(), -1);
  for (size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  for (const auto& e : g.graph.edges())
    if (local[e.u] >= 0 && local[e.v] >= 0) edges.push_back({local[e.u], local[e.v], e.label});
  SandpileGraph s;
  s.graph = Multigraph(static_cast<int>(verts.size()), std::move(edges), g.graph.label_names());
  s.dissipative.assign(verts.size(), 0);
  for (int p : sinks) s.dissipative.at(local.at(p)) = 1;
  for (int v : verts) s.names.push_back(word_to_string(g.word(v)));
  s.root = local.at(root);
  return s;
}

namespace {

// Component labels of g with the vertices in `removed` deleted.
std::vector<int> components_without(const Multigraph& g, const std::vector<int>& removed, int& count) {
  std::vector<int> comp(g.num_vertices(), -1);
  for (int r : removed) comp[r] = -2;
  count = 0;
  for (int s = 0; s < g.num_vertices(); ++s) {
    if (comp[s] != -1) continue;
    std::deque<int> q{s};
    comp[s] = count;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (auto nb : g.neighbors(v))
        if (comp[nb.to] == -1) {
          comp[nb.to] = count;
          q.push_back(nb.to);
        }
    }
    ++count;
  }
  return comp;
}

std::vector<int> members(const std::vector<int>& comp, int c) {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(comp.size()); ++v)
    if (comp[v] == c) out.push_back(v);
  return out;
}

Exhaustion finish(SandpileGraph unmerged, int n, EndConvention c) {
  Exhaustion ex;
  ex.sandpile = merge_dissipative(unmerged);
  ex.unmerged = std::move(unmerged);
  ex.level = n;
  ex.convention = c;
  return ex;
}

}  // namespace

bool one_ended_level_valid(const SchreierGraph& g, const Word& prefix) {
  const int zero = 0;
  int xi = g.index(prefix);
  if (xi == zero) return false;
  int count = 0;
  auto comp = components_without(g.graph, {zero}, count);
  std::vector<int> sizes(count, 0);
  for (int c : comp)
    if (c >= 0) ++sizes[c];
  return sizes[comp[xi]] == *std::max_element(sizes.begin(), sizes.end());
}

Exhaustion exhaustion_subgraph(const GroupPreset& p, const SchreierGraph& g, const Word& prefix,
                               EndConvention c) {
  const int n = g.level;
  if (static_cast<int>(prefix.size()) != n) throw InputError("ray prefix length differs from level");
  const int zero = 0;  // 0^n is index 0
  const int xi = g.index(prefix);
  const Multigraph& G = g.graph;
  if (c == EndConvention::one_ended) {
    if (!one_ended_level_valid(g, prefix)) {
      // only shorter prefixes are known here; callers holding the full ray search upward
      int nearest = -1;
      for (int m = n - 1; m >= 1 && nearest < 0; --m)
        if (one_ended_level_valid(schreier_graph(p, m), Word(prefix.begin(), prefix.begin() + m))) nearest = m;
      throw InvalidLevelError("invalid-level: the root lies on the minor side of 0^n at level " +
                                  std::to_string(n),
                              nearest);
    }
    int count = 0;
    auto comp = components_without(G, {zero}, count);
    auto verts = members(comp, comp[xi]);
    verts.insert(verts.begin(), zero);
    return finish(induced_sandpile(g, verts, {zero}, xi), n, c);
  }
  if (c == EndConvention::two_ended) {
    if (xi == zero) throw InputError("two-ended root must differ from 0^n");
    if (!one_ended_level_valid(g, prefix))
      throw InvalidLevelError("invalid-level: the root lies on the minor side of 0^n at level " + std::to_string(n), -1);
    int count = 0;
    auto comp = components_without(G, {zero}, count);
    std::vector<int> P;
    for (auto nb : G.neighbors(zero))
      if (comp[nb.to] == comp[xi]) P.push_back(nb.to);
    if (std::find(P.begin(), P.end(), xi) != P.end())
      throw InvalidLevelError("invalid-level: the root is adjacent to 0^n", -1);
    auto comp2 = components_without(G, P, count);
    auto verts = members(comp2, comp2[xi]);
    verts.insert(verts.begin(), P.begin(), P.end());
    return finish(induced_sandpile(g, verts, P, xi), n, c);
  }
  // four-ended: ray 0^ω, root 0^n, Basilica only
  if (p.name != "basilica") throw InputError("four-ended exhaustion is defined for basilica only");
  if (xi != zero) throw InputError("four-ended exhaustion is rooted at 0^n");
  if (n < 3) throw InvalidLevelError("invalid-level: four-ended exhaustion needs n >= 3", 3);
  Word x1(n, 0), x2(n, 0);
  x1[n - 1] = 1;
  x2[n - 2] = 1;
  std::vector<int> P;
  for (int x : {g.index(x1), g.index(x2)}) {
    int count = 0;
    auto comp = components_without(G, {x}, count);
    for (auto nb : G.neighbors(x))
      if (comp[nb.to] == comp[zero] && std::find(P.begin(), P.end(), nb.to) == P.end()) P.push_back(nb.to);
  }
  int count = 0;
  auto comp = components_without(G, P, count);
  auto verts = members(comp, comp[zero]);
  verts.insert(verts.begin(), P.begin(), P.end());
  return finish(induced_sandpile(g, verts, P, zero), n, c);
}

Exhaustion exhaustion_subgraph(const GroupPreset& p, int n, const Word& prefix, EndConvention c) {
  return exhaustion_subgraph(p, schreier_graph(p, n), prefix, c);
}

namespace {

nlohmann::json edges_json(const Multigraph& g) {
  std::map<std::tuple<int, int, int>, int> agg;
  for (const auto& e : g.edges()) ++agg[{std::min(e.u, e.v), std::max(e.u, e.v), e.label}];
  nlohmann::json out = nlohmann::json::array();
  for (auto& [k, m] : agg) {
    auto [u, v, l] = k;
    std::string lab = l >= 0 && l < static_cast<int>(g.label_names().size()) ? g.label_names()[l] : "";
    out.push_back({{"u", u}, {"v", v}, {"label", lab}, {"multiplicity", m}});
  }
  return out;
}

}  // namespace

nlohmann::json graph_json(const SandpileGraph& g, const std::string& preset, int level) {
  nlohmann::json j;
  j["preset"] = preset;
  j["level"] = level;
  j["vertices"] = g.names;
  j["edges"] = edges_json(g.graph);
  j["dissipative"] = g.sinks();
  j["root"] = g.root;
  return j;
}

nlohmann::json graph_json(const SchreierGraph& g) {
  nlohmann::json j;
  j["preset"] = g.preset;
  j["level"] = g.level;
  nlohmann::json verts = nlohmann::json::array();
  for (int v = 0; v < g.graph.num_vertices(); ++v) verts.push_back(word_to_string(g.word(v)));
  j["vertices"] = verts;
  j["edges"] = edges_json(g.graph);
  j["dissipative"] = nlohmann::json::array();
  j["root"] = nullptr;
  return j;
}

}  // namespace sandpile_lab
