#include "sandpile_lab/avalanche.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sandpile_lab/errors.hpp"

namespace sandpile_lab {

Rational MassDistribution::exact(int M) const {
  if (denominator == 0) return 0;
  auto it = mass.find(M);
  return it == mass.end() ? Rational(0) : Rational(it->second, denominator);
}

double MassDistribution::probability(int M) const {
  if (denominator == 0) return 0.0;
  auto it = mass.find(M);
  if (it == mass.end()) return 0.0;
  return static_cast<double>(Rational(it->second, denominator));
}

double MassDistribution::bucket_probability() const {
  if (denominator == 0) return 0.0;
  return static_cast<double>(Rational(bucket, denominator));
}

BigInt MassDistribution::total() const {
  BigInt s = bucket;
  for (const auto& [m, c] : mass) s += c;
  return s;
}

std::vector<int> MassDistribution::realizable() const {
  std::vector<int> out;
  for (const auto& [m, c] : mass)
    if (c > 0) out.push_back(m);
  return out;
}

PathModel path_model(const SandpileGraph& g, int root) {
  auto sinks = g.sinks();
  if (sinks.size() != 1) throw InputError("block-path engines need exactly one sink");
  if (root < 0 || root >= g.num_vertices() || g.is_sink(root)) throw InputError("root must be non-dissipative");
  PathModel pm;
  pm.dec = block_decompose(g.graph, sinks[0]);
  if (!pm.dec.is_cactus) throw InputError("block-path engines need a cactus");
  pm.cp = block_path(pm.dec, root);
  pm.deco = decoration_stats(g, pm.dec, pm.cp);
  pm.d.push_back(pm.deco.deco_size[0][pm.cp.entry_pos[0]]);
  for (long long x : pm.deco.d) pm.d.push_back(x);
  return pm;
}

MassDistribution exact_cycle_distribution(int L, int i0) {
  if (L < 2) throw InputError("cycle length must be at least 2");
  if (i0 < 1 || 2 * i0 > L) throw InputError("i0 must satisfy 1 <= i0 and 2*i0 <= |C|");
  MassDistribution d;
  d.method = "cycle";
  d.graph_id = "cycle:" + std::to_string(L);
  d.denominator = L;
  d.mass[0] += 1;
  d.mass[L - 1] += 1;
  for (int M = i0; M <= L - 1 - i0; ++M) d.mass[M] += 1;
  for (int M = L - i0; M < L - 1; ++M) d.mass[M] += 2;
  return d;
}

namespace {

std::string graph_tag(const SandpileGraph& g) {
  return "sandpile:" + std::to_string(g.num_vertices()) + "v";
}

// Ordinal of each block among the cycle blocks, matching RecurrentSampler.
std::vector<int> cycle_ordinals(const BlockDecomposition& dec) {
  std::vector<int> ord(dec.blocks.size(), -1);
  int k = 0;
  for (size_t b = 0; b < dec.blocks.size(); ++b)
    if (dec.blocks[b].kind == Block::Kind::cycle) ord[b] = k++;
  return ord;
}

int configs_of(const Block& b) {
  switch (b.kind) {
    case Block::Kind::cycle: return b.size();
    case Block::Kind::edge: return 1;
    default: throw InputError("block-path engines need a cactus");
  }
}

// One block in isolation: root at position 0 acts as the sink, t chips are
// dropped on the entry on top of block configuration k.
class LocalBlock {
 public:
  LocalBlock(const Multigraph& G, const Block& b, int entry) : L_(b.size()), entry_(entry), cycle_(b.kind == Block::Kind::cycle) {
    if (b.kind == Block::Kind::other) throw InputError("block-path engines need a cactus");
    nb_.assign(L_, {});
    deg_.assign(L_, 0);
    if (L_ == 2) {
      int m = G.multiplicity(b.vertices[0], b.vertices[1]);
      nb_[0].push_back({1, m});
      nb_[1].push_back({0, m});
      deg_[0] = deg_[1] = m;
    } else {
      for (int a = 0; a < L_; ++a)
        for (int s : {1, L_ - 1}) {
          int c = (a + s) % L_;
          nb_[a].push_back({c, 1});
          deg_[a] += 1;
        }
    }
    chips_.assign(L_, 0);
    fired_.assign(L_, 0);
  }

  int configs() const { return cycle_ ? L_ : 1; }
  int size() const { return L_; }

  int base_chips(int a, int k) const {
    if (!cycle_) return 0;
    return (a == k && k > 0) ? 0 : 1;
  }

  bool entry_fires(int t, int k) const { return base_chips(entry_, k) + t >= deg_[entry_]; }

  // Returns chips delivered to the root; fired() marks positions that fired.
  long long run(int t, int k) {
    for (int a = 1; a < L_; ++a) {
      chips_[a] = base_chips(a, k);
      fired_[a] = 0;
    }
    chips_[entry_] += t;
    long long out = 0;
    work_.clear();
    if (chips_[entry_] >= deg_[entry_]) work_.push_back(entry_);
    while (!work_.empty()) {
      int a = work_.back();
      work_.pop_back();
      if (chips_[a] < deg_[a]) continue;
      long long times = chips_[a] / deg_[a];
      chips_[a] -= times * deg_[a];
      fired_[a] = 1;
      for (auto nb : nb_[a]) {
        if (nb.to == 0) {
          out += times * nb.mult;
          continue;
        }
        chips_[nb.to] += times * nb.mult;
        if (chips_[nb.to] >= deg_[nb.to]) work_.push_back(nb.to);
      }
    }
    return out;
  }

  // Same outcome without simulating, for cycles of length >= 3. The odometer
  // u solves the path Laplacian with u = 0 at the root, so
  // L*u(a) = t*G(a,e) - G(a,k) + G(a,k') with G(a,b) = min(a,b)*(L - max(a,b)).
  long long solve(int t, int k) {
    if (!cycle_ || L_ < 3) return run(t, k);
    const long long L = L_;
    const long long kp = ((k - static_cast<long long>(t) * entry_) % L + L) % L;
    auto G = [L](long long a, long long b) { return std::min(a, b) * (L - std::max(a, b)); };
    long long lu1 = 0, lulast = 0;
    for (int a = 1; a < L_; ++a) {
      long long lu = t * G(a, entry_);
      if (k > 0) lu -= G(a, k);
      if (kp > 0) lu += G(a, kp);
      fired_[a] = lu > 0;
      chips_[a] = (a == kp && kp > 0) ? 0 : 1;
      if (a == 1) lu1 = lu;
      if (a == L_ - 1) lulast = lu;
    }
    return (lu1 + lulast) / L;
  }

  const std::vector<char>& fired() const { return fired_; }
  const std::vector<long long>& chips() const { return chips_; }

 private:
  int L_, entry_;
  bool cycle_;
  std::vector<std::vector<Neighbor>> nb_;
  std::vector<int> deg_;
  std::vector<long long> chips_;
  std::vector<char> fired_;
  std::vector<int> work_;
};

// Closed form for a cycle: the zero moves from k to (k - t*e) mod L.
void check_cycle_kernel(const LocalBlock& lb, int L, int e, int t, int k, long long t_out) {
  long long kp = ((static_cast<long long>(k) - static_cast<long long>(t) * e) % L + L) % L;
  long long expect = t - (k != 0) + (kp != 0);
  bool zero_ok = true;
  for (int a = 1; a < L; ++a) {
    long long want = (a == kp && kp > 0) ? 0 : 1;
    if (lb.chips()[a] != want) zero_ok = false;
  }
  if (expect != t_out || !zero_ok)
    throw std::logic_error("cycle kernel mismatch at L=" + std::to_string(L) + " e=" + std::to_string(e) +
                           " t=" + std::to_string(t) + " k=" + std::to_string(k));
}

struct Outcome {
  long long mass = 0;
  int diam = 0;
};

// Mass and diameter of the fired part of block j (positions with their
// decorations). The fired positions form an arc avoiding the root.
Outcome fired_outcome(const PathModel& pm, int j, const std::vector<char>& fired) {
  const auto& sz = pm.deco.deco_size[j];
  const auto& h = pm.deco.deco_height[j];
  const auto& dm = pm.deco.deco_diam[j];
  Outcome o;
  long long best = std::numeric_limits<long long>::min();
  int prev = -2;
  for (int a = 1; a < static_cast<int>(fired.size()); ++a) {
    if (!fired[a]) continue;
    if (prev >= 0 && prev != a - 1) best = std::numeric_limits<long long>::min();  // arc broken
    o.mass += sz[a];
    o.diam = std::max(o.diam, dm[a]);
    if (best != std::numeric_limits<long long>::min())
      o.diam = std::max<long long>(o.diam, h[a] + a + best);
    best = std::max<long long>(best, h[a] - a);
    prev = a;
  }
  return o;
}

}  // namespace

MassDistribution exact_blockpath_distribution(const SandpileGraph& g, int root, int J, bool with_diameter) {
  PathModel pm = path_model(g, root);
  const int r = pm.r();
  if (J < 1 || J > r) throw InputError("cap block J must lie in [1, r]");
  auto ord = cycle_ordinals(pm.dec);
  std::vector<int> radix(J);
  std::uint64_t total = 1;
  for (int j = 0; j < J; ++j) {
    radix[j] = configs_of(pm.dec.blocks[pm.cp.blocks[j]]);
    total *= static_cast<std::uint64_t>(radix[j]);
    if (total > kExactGuard)
      throw ResourceError("exact enumeration over " + std::to_string(j + 1) +
                          "+ blocks exceeds the guard; lower J or use the dp method");
  }
  RecurrentSampler sampler(g);
  std::vector<int> k(sampler.num_cycles(), 0);
  MassDistribution out;
  out.method = "exact";
  out.graph_id = graph_tag(g);
  out.root = root;
  out.denominator = total;
  out.bucket_threshold = J < r ? pm.d[J - 1] : -1;
  Stabilizer st(g);
  std::vector<int> digits(J, 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    for (int j = 0; j < J; ++j)
      if (ord[pm.cp.blocks[j]] >= 0) k[ord[pm.cp.blocks[j]]] = digits[j];
    Configuration c = sampler.with_indices(k);
    ++c[root];
    st.run(c);
    int mass = static_cast<int>(st.fired().size());
    int stop = 0;
    if (mass > 0) {
      stop = r;
      for (int j = 0; j < r; ++j)
        if (g.is_sink(pm.cp.cut[j]) || st.fired_count(pm.cp.cut[j]) == 0) {
          stop = j + 1;
          break;
        }
    }
    if (J == r || stop <= J - 1) {
      out.mass[mass] += 1;
      if (with_diameter) out.diameter[mass == 0 ? 0 : induced_diameter(g, st.fired())] += 1;
    } else {
      out.bucket += 1;
    }
    for (int j = 0; j < J; ++j) {
      if (++digits[j] < radix[j]) break;
      digits[j] = 0;
    }
  }
  return out;
}

MassDistribution dp_blockpath_distribution(const SandpileGraph& g, int root, int J, bool self_test,
                                           DpTrace* trace) {
  PathModel pm = path_model(g, root);
  const int r = pm.r();
  if (J < 1 || J > r) throw InputError("cap block J must lie in [1, r]");
  std::vector<LocalBlock> blocks;
  for (int j = 0; j < J; ++j)
    blocks.emplace_back(g.graph, pm.dec.blocks[pm.cp.blocks[j]], pm.cp.entry_pos[j]);
  // tail[j] = number of configurations of blocks j+1..J-1 (0-based, exclusive of j)
  std::vector<BigInt> tail(J + 1, 1);
  for (int j = J - 1; j >= 0; --j) tail[j] = (j + 1 < J ? tail[j + 1] * blocks[j + 1].configs() : BigInt(1));
  MassDistribution out;
  out.method = "dp";
  out.graph_id = graph_tag(g);
  out.root = root;
  out.denominator = tail[0] * blocks[0].configs();
  out.bucket_threshold = J < r ? pm.d[J - 1] : -1;
  if (trace) *trace = {};

  // configurations of each block whose entry stays put under a single chip
  std::vector<int> nofire(J, 0);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < blocks[j].configs(); ++k)
      if (!blocks[j].entry_fires(1, k)) ++nofire[j];

  std::map<int, BigInt> N{{1, 1}};
  for (int j = 0; j < J; ++j) {
    LocalBlock& lb = blocks[j];
    const bool last_enumerated = (j == J - 1);
    if (trace) trace->max_incoming.push_back(N.empty() ? 0 : N.rbegin()->first);
    std::map<int, BigInt> next;
    for (const auto& [t, w] : N) {
      for (int k = 0; k < lb.configs(); ++k) {
        if (!lb.entry_fires(t, k)) {
          // Stops before this block were emitted one block earlier.
          if (j == 0) {
            out.mass[0] += w * tail[0];
            out.diameter[0] += w * tail[0];
          }
          continue;
        }
        if (last_enumerated && J < r) {
          out.bucket += w;
          continue;
        }
        long long t_out = lb.solve(t, k);
        if (self_test && lb.configs() > 1) {
          std::vector<char> closed = lb.fired();
          long long t_sim = lb.run(t, k);
          if (t_sim != t_out || closed != lb.fired())
            throw std::logic_error("cycle kernel: closed form disagrees with simulation");
          check_cycle_kernel(lb, lb.size(), pm.cp.entry_pos[j], t, k, t_out);
          if (trace) ++trace->kernel_checks;
        }
        Outcome o = fired_outcome(pm, j, lb.fired());
        if (j == r - 1 || t_out == 0) {
          out.mass[static_cast<int>(o.mass)] += w * tail[j];
          out.diameter[o.diam] += w * tail[j];
          continue;
        }
        if (t_out == 1) {
          if (nofire[j + 1] > 0) {
            BigInt c = w * nofire[j + 1] * tail[j + 1];
            out.mass[static_cast<int>(o.mass)] += c;
            out.diameter[o.diam] += c;
          }
        }
        next[static_cast<int>(t_out)] += w;
      }
    }
    N = std::move(next);
  }
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

MassDistribution mc_distribution(const SandpileGraph& g, int root, long long samples, std::uint64_t seed,
                                 const McOptions& opt) {
  if (samples < 0) throw InputError("sample count must be nonnegative");
  if (root < 0 || root >= g.num_vertices() || g.is_sink(root)) throw InputError("root must be non-dissipative");
  MassDistribution out;
  out.method = "mc";
  out.graph_id = graph_tag(g);
  out.root = root;
  out.empirical = true;
  out.denominator = samples;
  if (samples == 0) return out;
  RecurrentSampler sampler(g);
  const long long chunk = std::max(1, opt.chunk);
  const long long chunks = (samples + chunk - 1) / chunk;
  const int threads = static_cast<int>(std::max<long long>(1, std::min<long long>(opt.threads, chunks)));
  std::vector<std::map<int, long long>> mass(threads), diam(threads);
  auto worker = [&](int w) {
    Stabilizer st(g);
    Configuration c;
    std::vector<int> touched;
    std::vector<char> mark, seen(g.num_vertices(), 0);
    for (long long ci = w; ci < chunks; ci += threads) {
      std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(ci)));
      long long n = std::min(chunk, samples - ci * chunk);
      sampler.sample_into(c, rng);
      for (long long s = 0; s < n; ++s) {
        if (s > 0) {
          // vertices whose counts the last avalanche read or changed
          touched.assign(1, root);
          seen[root] = 1;
          for (int v : st.fired()) {
            if (!seen[v]) seen[v] = 1, touched.push_back(v);
            for (auto nb : g.graph.neighbors(v))
              if (!seen[nb.to] && !g.is_sink(nb.to)) seen[nb.to] = 1, touched.push_back(nb.to);
          }
          for (int v : touched) seen[v] = 0;
          sampler.resample_touched(c, touched, rng, mark);
        }
        ++c[root];
        st.run_from(c, root);
        ++mass[w][static_cast<int>(st.fired().size())];
        if (opt.with_diameter) ++diam[w][st.fired().empty() ? 0 : induced_diameter(g, st.fired())];
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  for (int w = 0; w < threads; ++w) {
    for (auto [m, c] : mass[w]) out.mass[m] += c;
    for (auto [m, c] : diam[w]) out.diameter[m] += c;
  }
  return out;
}

double tv_distance(const MassDistribution& a, const MassDistribution& b, long long below) {
  std::map<int, char> keys;
  for (const auto& [m, c] : a.mass) keys[m] = 1;
  for (const auto& [m, c] : b.mass) keys[m] = 1;
  double s = 0, ta = 0, tb = 0;
  for (auto [m, x] : keys) {
    double pa = a.probability(m), pb = b.probability(m);
    if (m < below) {
      s += std::abs(pa - pb);
    } else {
      ta += pa;
      tb += pb;
    }
  }
  ta += a.bucket_probability();
  tb += b.bucket_probability();
  return 0.5 * (s + std::abs(ta - tb));
}

SandwichBounds thm246_bounds(const std::vector<int>& sizes, const std::vector<long long>& d, long long M) {
  const int r = static_cast<int>(sizes.size());
  if (d.empty() || static_cast<int>(d.size()) > r) throw InputError("d must list d_0..d_{r-1}");
  if (M < d[0]) throw InputError("mass below d_0");
  if (M >= d.back() || static_cast<int>(d.size()) < r) {
    if (M >= d.back()) throw InputError("mass at or beyond d_{r-1}: out of range");
  }
  SandwichBounds b;
  // d_{i-1} <= M < d_i, i in 1..r-1
  int i = 1;
  while (i < static_cast<int>(d.size()) && M >= d[i]) ++i;
  b.i_M = i;
  b.L = 1;
  for (int j = 1; j < i; ++j)
    if (sizes[j - 1] > 2) b.L *= Rational(sizes[j - 1] - 2, sizes[j - 1]);
  Rational prod = Rational(sizes[i - 1]) * sizes[i];
  b.upper = Rational(2) / prod;
  b.lower = b.L / (2 * prod);
  return b;
}

SandwichReport check_sandwich(const MassDistribution& dist, const PathModel& pm) {
  SandwichReport rep;
  const long long d1 = pm.d.size() > 1 ? pm.d[1] : std::numeric_limits<long long>::max();
  for (const auto& [M, c] : dist.mass) {
    if (c == 0 || M == 0) continue;
    if (M < d1) {
      ++rep.skipped_small;
      continue;
    }
    if (M >= pm.d.back()) continue;
    auto b = thm246_bounds(pm.cp.sizes, pm.d, M);
    Rational p = dist.exact(M);
    ++rep.checked;
    if (p < b.lower || p > b.upper) {
      ++rep.violations;
      std::ostringstream os;
      os << "M=" << M << " P=" << p << " i_M=" << b.i_M << " bounds=[" << b.lower << ", " << b.upper << "]";
      rep.details.push_back(os.str());
    }
  }
  return rep;
}

ExponentFit fit_exponent(const std::map<int, double>& law, double m_lo, double m_hi) {
  std::vector<std::pair<double, double>> pts;
  for (auto [m, p] : law)
    if (m >= m_lo && m <= m_hi && m > 0 && p > 0) pts.emplace_back(std::log(static_cast<double>(m)), std::log(p));
  if (pts.size() < 8)
    throw InputError("fit window [" + std::to_string(m_lo) + ", " + std::to_string(m_hi) + "] holds " +
                     std::to_string(pts.size()) + " realizable masses; need at least 8");
  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double slope = sxy / sxx, icpt = my - slope * mx;
  double rss = 0;
  for (auto [x, y] : pts) rss += std::pow(y - icpt - slope * x, 2);
  ExponentFit f;
  f.delta_hat = -slope;
  f.stderr_ = pts.size() > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  f.m_lo = m_lo;
  f.m_hi = m_hi;
  f.points = static_cast<int>(pts.size());
  const size_t top = std::max<size_t>(1, pts.size() / 10);
  double acc = 0;
  for (size_t i = pts.size() - top; i < pts.size(); ++i) acc += -pts[i].second / pts[i].first;
  f.ratio_estimate = acc / static_cast<double>(top);
  return f;
}

namespace {
std::map<int, double> as_law(const std::map<int, BigInt>& counts, const BigInt& den) {
  std::map<int, double> law;
  if (den == 0) return law;
  for (const auto& [m, c] : counts)
    if (c > 0) law[m] = static_cast<double>(Rational(c, den));
  return law;
}
}  // namespace

ExponentFit fit_exponent(const MassDistribution& dist, double m_lo, double m_hi) {
  if (m_lo < 0) m_lo = 32;
  if (m_hi < 0) {
    auto rz = dist.realizable();
    m_hi = rz.empty() ? 0 : rz.back() / 4.0;
  }
  return fit_exponent(as_law(dist.mass, dist.denominator), m_lo, m_hi);
}

ExponentFit fit_diameter_exponent(const MassDistribution& dist, double lo, double hi) {
  ExponentFit f = fit_exponent(as_law(dist.diameter, dist.denominator), lo, hi);
  f.method = "loglog-ls-diameter";
  return f;
}

StationarityReport stationarity_check(const SandpileGraph& a, int root_a, const SandpileGraph& b, int root_b,
                                      long long below) {
  PathModel pa = path_model(a, root_a), pb = path_model(b, root_b);
  StationarityReport rep;
  if (below < 0) below = pa.r() >= 3 ? pa.d[pa.r() - 2] : 0;
  rep.verified_below = below;
  // blocks coincide while size, entry and decorations agree
  int same = 0;
  while (same < std::min(pa.r(), pb.r()) && pa.cp.sizes[same] == pb.cp.sizes[same] &&
         pa.cp.entry_pos[same] == pb.cp.entry_pos[same] &&
         pa.deco.deco_size[same] == pb.deco.deco_size[same])
    ++same;
  // a stop on C_j needs C_1..C_j and the entry of C_{j+1}
  rep.structural_below = same >= 2 ? pa.d[std::min(same - 1, pa.r() - 1)] : (same >= 1 ? pa.d[0] : 0);
  MassDistribution da = dp_blockpath_distribution(a, root_a, pa.r());
  MassDistribution db = dp_blockpath_distribution(b, root_b, pb.r());
  std::map<int, char> keys;
  for (const auto& [m, c] : da.mass) keys[m] = 1;
  for (const auto& [m, c] : db.mass) keys[m] = 1;
  for (auto [m, x] : keys) {
    if (m >= below) continue;
    ++rep.compared;
    if (da.exact(m) != db.exact(m)) {
      ++rep.mismatches;
      std::ostringstream os;
      os << "M=" << m << " " << da.exact(m) << " vs " << db.exact(m);
      rep.details.push_back(os.str());
    }
  }
  rep.ok = rep.mismatches == 0 && rep.compared > 0;
  return rep;
}

std::string distribution_csv(const MassDistribution& d) {
  std::ostringstream os;
  os << "# method=" << d.method << " graph=" << d.graph_id << " root=" << d.root << " level=" << d.level << "\n";
  if (d.empirical) {
    os << "mass,probability,count\n";
    for (const auto& [m, c] : d.mass) os << m << "," << d.probability(m) << "," << c << "\n";
    if (d.bucket > 0) os << ">=" << d.bucket_threshold << "," << d.bucket_probability() << "," << d.bucket << "\n";
  } else {
    os << "mass,numerator,denominator\n";
    for (const auto& [m, c] : d.mass) os << m << "," << c << "," << d.denominator << "\n";
    if (d.bucket > 0 || d.bucket_threshold >= 0)
      os << ">=" << d.bucket_threshold << "," << d.bucket << "," << d.denominator << "\n";
  }
  return os.str();
}

MassDistribution distribution_from_csv(const std::string& csv) {
  MassDistribution d;
  std::istringstream is(csv);
  std::string line;
  bool header = false;
  BigInt total = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("method=");
      if (pos != std::string::npos) d.method = line.substr(pos + 7, line.find(' ', pos) - pos - 7);
      continue;
    }
    if (!header) {
      header = true;
      if (line.rfind("mass,probability", 0) == 0) d.empirical = true;
      else if (line.rfind("mass,numerator", 0) != 0) throw InputError("unrecognized distribution header: " + line);
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 3) throw InputError("malformed distribution row: " + line);
    bool is_bucket = f[0].rfind(">=", 0) == 0;
    try {
      BigInt num = d.empirical ? BigInt(f[2]) : BigInt(f[1]);
      if (!d.empirical) d.denominator = BigInt(f[2]);
      if (is_bucket) {
        d.bucket = num;
        d.bucket_threshold = std::stoll(f[0].substr(2));
      } else {
        d.mass[std::stoi(f[0])] = num;
      }
      total += num;
    } catch (const std::exception&) {
      throw InputError("malformed distribution row: " + line);
    }
  }
  if (!header) throw InputError("empty distribution file");
  if (d.empirical) d.denominator = total;
  return d;
}

}  // namespace sandpile_lab
