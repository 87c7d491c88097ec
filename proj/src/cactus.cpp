#include "sandpile_lab/cactus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "sandpile_lab/errors.hpp"

namespace sandpile_lab {

namespace {

// Orders the vertices of a 2-regular block into a cycle.
std::vector<int> cyclic_order(const Multigraph& g, const std::vector<int>& verts) {
  if (verts.size() <= 2) return verts;
  std::map<int, char> in;
  for (int v : verts) in[v] = 1;
  std::vector<int> order{verts[0]};
  int prev = -1, cur = verts[0];
  while (order.size() < verts.size()) {
    int nxt = -1;
    for (auto nb : g.neighbors(cur))
      if (in.count(nb.to) && nb.to != prev) {
        nxt = nb.to;
        break;
      }
    prev = cur;
    cur = nxt;
    order.push_back(cur);
  }
  return order;
}

}  // namespace

BlockDecomposition block_decompose(const Multigraph& g, int sink) {
  const int n = g.num_vertices();
  BlockDecomposition dec;
  dec.vertex_blocks.assign(n, {});
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<std::pair<int, int>> estack;
  int timer = 0;
  struct Frame {
    int v, parent;
    size_t next;
  };
  auto emit = [&](int u, int v) {
    std::vector<int> verts;
    int edges = 0;
    std::map<int, char> seen;
    while (true) {
      auto e = estack.back();
      estack.pop_back();
      edges += g.multiplicity(e.first, e.second);
      for (int x : {e.first, e.second})
        if (seen.emplace(x, 1).second) verts.push_back(x);
      if ((e.first == u && e.second == v) || (e.first == v && e.second == u)) break;
    }
    Block b;
    b.vertices = verts;
    b.edge_count = edges;
    if (verts.size() == 2) {
      b.kind = edges == 1 ? Block::Kind::edge : edges == 2 ? Block::Kind::cycle : Block::Kind::other;
    } else {
      bool two_reg = static_cast<size_t>(edges) == verts.size();
      if (two_reg)
        for (int x : verts) {
          int dx = 0;
          for (auto nb : g.neighbors(x))
            if (seen.count(nb.to)) dx += nb.mult;
          if (dx != 2) two_reg = false;
        }
      b.kind = two_reg ? Block::Kind::cycle : Block::Kind::other;
      if (two_reg) b.vertices = cyclic_order(g, verts);
    }
    if (b.kind == Block::Kind::other) dec.is_cactus = false;
    int id = static_cast<int>(dec.blocks.size());
    for (int x : b.vertices) dec.vertex_blocks[x].push_back(id);
    dec.blocks.push_back(std::move(b));
  };
  for (int s = 0; s < n; ++s) {
    if (disc[s] >= 0) continue;
    disc[s] = low[s] = timer++;
    std::vector<Frame> st{{s, -1, 0}};
    while (!st.empty()) {
      Frame& f = st.back();
      auto nbs = g.neighbors(f.v);
      if (f.next < nbs.size()) {
        int w = nbs[f.next++].to;
        if (disc[w] < 0) {
          estack.emplace_back(f.v, w);
          disc[w] = low[w] = timer++;
          st.push_back({w, f.v, 0});
        } else if (w != f.parent && disc[w] < disc[f.v]) {
          estack.emplace_back(f.v, w);
          low[f.v] = std::min(low[f.v], disc[w]);
        }
      } else {
        int v = f.v, p = f.parent;
        st.pop_back();
        if (p >= 0) {
          low[p] = std::min(low[p], low[v]);
          if (low[v] >= disc[p]) emit(p, v);
        }
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (dec.vertex_blocks[v].size() >= 2) dec.cut_vertices.push_back(v);
  if (sink < 0) return dec;

  dec.sink = sink;
  dec.parent_block.assign(n, -1);
  dec.position.assign(n, -1);
  dec.block_parent.assign(dec.blocks.size(), -1);
  std::deque<int> q{sink};
  std::vector<char> seen(n, 0);
  seen[sink] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int b : dec.vertex_blocks[v]) {
      if (dec.block_parent[b] >= 0) continue;
      dec.block_parent[b] = v;
      auto& vs = dec.blocks[b].vertices;
      std::rotate(vs.begin(), std::find(vs.begin(), vs.end(), v), vs.end());
      for (int i = 1; i < static_cast<int>(vs.size()); ++i) {
        int u = vs[i];
        if (seen[u]) continue;
        seen[u] = 1;
        dec.parent_block[u] = b;
        dec.position[u] = i;
        q.push_back(u);
      }
    }
  }
  return dec;
}

BlockPath block_path(const BlockDecomposition& dec, int v) {
  if (dec.sink < 0) throw InputError("block path needs a rooted decomposition");
  BlockPath cp;
  int cur = v;
  while (cur != dec.sink) {
    int b = dec.parent_block.at(cur);
    if (b < 0) throw ConstructionError("vertex not connected to the sink");
    const Block& blk = dec.blocks[b];
    int L = blk.size(), pos = dec.position[cur];
    cp.blocks.push_back(b);
    cp.sizes.push_back(blk.kind == Block::Kind::edge ? 1 : L);
    cp.entry.push_back(cur);
    cp.entry_pos.push_back(pos);
    cp.i0.push_back(blk.kind == Block::Kind::cycle ? std::min(pos, L - pos) : pos);
    cur = dec.block_parent[b];
    cp.cut.push_back(cur);
  }
  return cp;
}

bool dominates(const BlockDecomposition& dec, int w_prime, int w) {
  if (w == dec.sink || w == w_prime) return true;
  int cur = w_prime;
  while (cur != dec.sink) {
    cur = dec.block_parent[dec.parent_block[cur]];
    if (cur == w) return true;
  }
  return false;
}

namespace {

struct SubtreeData {
  std::vector<long long> size;
  std::vector<int> height, diam;
};

int cyc(int a, int b, int L) {
  int d = std::abs(a - b);
  return std::min(d, L - d);
}

SubtreeData subtree_data(const BlockDecomposition& dec, int n) {
  SubtreeData s;
  s.size.assign(n, 1);
  s.height.assign(n, 0);
  s.diam.assign(n, 0);
  // blocks in BFS order from the sink; process in reverse
  std::vector<int> order;
  std::deque<int> q{dec.sink};
  std::vector<char> seen(dec.blocks.size(), 0);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int b : dec.vertex_blocks[v])
      if (!seen[b] && dec.block_parent[b] == v) {
        seen[b] = 1;
        order.push_back(b);
        for (size_t i = 1; i < dec.blocks[b].vertices.size(); ++i) q.push_back(dec.blocks[b].vertices[i]);
      }
  }
  std::vector<int> best1(n, 0), best2(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Block& B = dec.blocks[*it];
    const auto& vs = B.vertices;
    const int L = static_cast<int>(vs.size()), w = vs[0];
    long long sz = 0;
    int hb = 0, inner = 0, dchild = 0;
    for (int k = 1; k < L; ++k) {
      int u = vs[k];
      // finalize u's own values from its child blocks
      s.height[u] = best1[u];
      s.diam[u] = std::max(s.diam[u], best1[u] + best2[u]);
      sz += s.size[u];
      dchild = std::max(dchild, s.diam[u]);
      int dk = B.kind == Block::Kind::cycle ? cyc(0, k, L) : 1;
      hb = std::max(hb, dk + s.height[u]);
    }
    if (B.kind == Block::Kind::cycle) {
      for (int k = 1; k < L; ++k)
        for (int l = k + 1; l < L; ++l)
          inner = std::max(inner, s.height[vs[k]] + s.height[vs[l]] + cyc(k, l, L));
    } else if (B.kind == Block::Kind::other) {
      throw InputError("decoration statistics need a cactus");
    }
    s.size[w] += sz;
    s.diam[w] = std::max({s.diam[w], dchild, inner});
    if (hb > best1[w]) {
      best2[w] = best1[w];
      best1[w] = hb;
    } else if (hb > best2[w]) {
      best2[w] = hb;
    }
  }
  s.height[dec.sink] = best1[dec.sink];
  s.diam[dec.sink] = std::max(s.diam[dec.sink], best1[dec.sink] + best2[dec.sink]);
  return s;
}

}  // namespace

std::vector<long long> subtree_sizes(const BlockDecomposition& dec, int n) {
  // Sizes only; valid for any block kinds.
  std::vector<long long> size(n, 1);
  std::vector<int> order;
  std::deque<int> q{dec.sink};
  std::vector<char> seen(dec.blocks.size(), 0);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int b : dec.vertex_blocks[v])
      if (!seen[b] && dec.block_parent[b] == v) {
        seen[b] = 1;
        order.push_back(b);
        for (size_t i = 1; i < dec.blocks[b].vertices.size(); ++i) q.push_back(dec.blocks[b].vertices[i]);
      }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& vs = dec.blocks[*it].vertices;
    for (size_t k = 1; k < vs.size(); ++k) size[vs[0]] += size[vs[k]];
  }
  return size;
}

DecorationStats decoration_stats(const SandpileGraph& g, const BlockDecomposition& dec, const BlockPath& cp) {
  if (!dec.is_cactus) throw InputError("decoration statistics need a cactus");
  if (g.sinks().size() != 1) throw InputError("decoration statistics need a single sink");
  SubtreeData sd = subtree_data(dec, g.num_vertices());
  DecorationStats st;
  for (size_t i = 0; i + 1 < cp.cut.size(); ++i) {
    st.d.push_back(sd.size[cp.cut[i]]);
    st.diam.push_back(sd.diam[cp.cut[i]]);
  }
  for (int b : cp.blocks) {
    const auto& vs = dec.blocks[b].vertices;
    std::vector<long long> sz(vs.size(), 0);
    std::vector<int> h(vs.size(), 0), dm(vs.size(), 0);
    for (size_t k = 1; k < vs.size(); ++k) {
      sz[k] = sd.size[vs[k]];
      h[k] = sd.height[vs[k]];
      dm[k] = sd.diam[vs[k]];
    }
    st.deco_size.push_back(std::move(sz));
    st.deco_height.push_back(std::move(h));
    st.deco_diam.push_back(std::move(dm));
  }
  return st;
}

BigInt CriticalGroup::order() const {
  BigInt o = 1;
  for (auto [ord, mult] : factors)
    for (int i = 0; i < mult; ++i) o *= ord;
  return o;
}

CriticalGroup critical_group(const BlockDecomposition& dec) {
  if (!dec.is_cactus) throw InputError("critical group decomposition needs a cactus");
  std::map<long long, int> count;
  for (const auto& b : dec.blocks)
    if (b.kind == Block::Kind::cycle) ++count[b.size()];
  CriticalGroup cg;
  for (auto [o, m] : count) cg.factors.emplace_back(o, m);
  return cg;
}

RayTriple ray_triple(const Word& prefix) {
  const int n = static_cast<int>(prefix.size());
  for (auto x : prefix)
    if (x > 1) throw InputError("ray triple needs a binary word");
  int i = 0;
  while (i < n && prefix[i] == 0) ++i;
  if (i == n) throw InputError("prefix has no letter 1: ray of the form w0^w is four-ended");
  RayTriple r;
  r.l = i + 1;
  r.m = {0};
  r.t = {0};
  ++i;
  bool in_pairs = true;
  while (i < n) {
    if (prefix[i] == 0) {
      if (i + 1 >= n) {
        r.trailing_partial = true;
        break;
      }
      if (!in_pairs) {
        r.m.push_back(0);
        in_pairs = true;
      }
      r.m.back() += 2;
      r.free_bits.push_back(prefix[i + 1]);
      i += 2;
    } else {
      if (in_pairs) {
        r.t.push_back(0);
        in_pairs = false;
      }
      ++r.t.back();
      ++i;
    }
  }
  return r;
}

Word reconstruct(const RayTriple& r, std::optional<std::uint64_t> seed) {
  Word w(r.l - 1, 0);
  w.push_back(1);
  std::mt19937_64 rng(seed.value_or(0));
  size_t bit = 0;
  auto pairs = [&](int m) {
    for (int k = 0; k < m / 2; ++k) {
      w.push_back(0);
      std::uint8_t x = 0;
      if (seed) x = static_cast<std::uint8_t>(rng() & 1);
      else if (bit < r.free_bits.size()) x = r.free_bits[bit];
      ++bit;
      w.push_back(x);
    }
  };
  pairs(r.m.at(0));
  for (size_t j = 1; j < std::max(r.t.size(), r.m.size()); ++j) {
    if (j < r.t.size()) w.insert(w.end(), r.t[j], 1);
    if (j < r.m.size()) pairs(r.m[j]);
  }
  if (r.trailing_partial) w.push_back(0);
  return w;
}

std::vector<int> a_sequence(const RayTriple& r) {
  std::vector<int> a;
  long long M = 0, T = 0;
  for (size_t j = 1; j < r.t.size(); ++j) {
    M += r.m[j - 1];
    T += r.t[j - 1];
    for (int s = 0; s < r.t[j]; ++s) a.push_back(static_cast<int>(r.l + M + T + s));
  }
  return a;
}

Word RaySpec::prefix(int n) const {
  if (per.empty() && static_cast<int>(pre.size()) < n) throw InputError("ray has no period and is too short");
  Word w;
  for (int i = 0; i < n; ++i)
    w.push_back(i < static_cast<int>(pre.size()) ? pre[i] : per[(i - pre.size()) % per.size()]);
  return w;
}

int classify_ends(const RaySpec& ray, const std::string& preset) {
  if (ray.per.empty()) throw InputError("end classification needs an eventually periodic ray");
  const size_t p = ray.per.size();
  Word tail;
  for (size_t i = 0; i < 2 * p; ++i) tail.push_back(ray.per[i % p]);
  const size_t start = ray.pre.size();
  bool constant = std::all_of(tail.begin(), tail.end(), [&](auto x) { return x == tail[0]; });
  if (preset == "basilica" || preset == "kneading:0") {
    for (auto x : tail)
      if (x > 1) throw InputError("basilica rays are binary");
    bool zeros = constant && tail[0] == 0;
    bool alternating = true;
    for (size_t i = 0; i < tail.size(); ++i)
      if (tail[i] != ((tail[0] + i) & 1)) alternating = false;
    if (zeros || alternating) return 4;
    bool odd = false, even = false;
    for (size_t i = 0; i < tail.size(); ++i)
      if (tail[i] == 1) ((start + i) % 2 == 0 ? even : odd) = true;
    return odd && even ? 1 : 2;
  }
  if (preset == "img3") {
    if (constant) return 4;
    bool has1 = std::count(tail.begin(), tail.end(), 1) > 0;
    bool has2 = std::count(tail.begin(), tail.end(), 2) > 0;
    return has1 && has2 ? 1 : 2;
  }
  throw InputError("end classification is not available for preset " + preset);
}

ImgBlocks img_block_decomposition(const Word& w) {
  ImgBlocks r;
  char type = 0;  // 0 = undetermined
  int len = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    int x = w[i];
    if (x > 2) throw InputError("img word must be ternary");
    char need = x == 1 ? 'A' : x == 2 ? 'B' : 0;
    if (need && type && need != type) {
      r.blocks.emplace_back(type, len);
      type = need;
      len = 1;
      continue;
    }
    if (need) type = need;
    ++len;
  }
  if (len > 0) r.blocks.emplace_back(type ? type : 'A', len);
  int acc = 0;
  for (auto& b : r.blocks) r.nu.push_back(acc += b.second);
  return r;
}

GrowthStats growth_stats(const Multigraph& g, int v, int r_max, int r_lo) {
  GrowthStats gs;
  std::vector<int> d(g.num_vertices(), -1);
  std::deque<int> q{v};
  d[v] = 0;
  int ecc = 0;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    ecc = std::max(ecc, d[x]);
    for (auto nb : g.neighbors(x))
      if (d[nb.to] < 0) {
        d[nb.to] = d[x] + 1;
        q.push_back(nb.to);
      }
  }
  if (r_max > ecc) {
    gs.truncated = true;
    r_max = ecc;
  }
  gs.ball.assign(r_max + 1, 0);
  for (int x : d)
    if (x >= 0 && x <= r_max) ++gs.ball[x];
  std::partial_sum(gs.ball.begin(), gs.ball.end(), gs.ball.begin());
  if (r_lo <= 0) r_lo = std::max(1, r_max / 4);
  gs.r_lo = r_lo;
  gs.r_hi = r_max;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (int r = r_lo; r <= r_max; ++r) {
    double x = std::log(r), y = std::log(static_cast<double>(gs.ball[r]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k >= 2) gs.alpha_hat = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return gs;
}

BetaStats beta_stats(const DecorationStats& s) {
  BetaStats b;
  std::vector<double> ratios;
  for (size_t i = s.d.size() / 2; i < s.d.size(); ++i)
    if (s.diam[i] >= 2) ratios.push_back(std::log(static_cast<double>(s.d[i])) / std::log(s.diam[i]));
  if (ratios.empty()) return b;
  b.beta = *std::max_element(ratios.begin(), ratios.end());
  b.beta_prime = *std::min_element(ratios.begin(), ratios.end());
  return b;
}

}  // namespace sandpile_lab
