#include "sandpile_lab/selfsim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "sandpile_lab/errors.hpp"

namespace sandpile_lab {

std::string word_to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (auto x : w) s.push_back(static_cast<char>('0' + x));
  return s;
}

Word word_from_string(const std::string& s, int q) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    int x = c - '0';
    if (x < 0 || x >= q) throw InputError("invalid letter '" + std::string(1, c) + "' for alphabet of size " + std::to_string(q));
    w.push_back(static_cast<std::uint8_t>(x));
  }
  return w;
}

Automaton::Automaton(int q, std::vector<std::string> names,
                     std::vector<std::vector<int>> transitions,
                     std::vector<std::vector<int>> outputs,
                     std::vector<int> generators)
    : q_(q),
      names_(std::move(names)),
      trans_(std::move(transitions)),
      out_(std::move(outputs)),
      generators_(std::move(generators)) {
  if (q_ < 2) throw ConstructionError("alphabet size must be at least 2");
  const int s = num_states();
  if (s == 0 || static_cast<int>(trans_.size()) != s || static_cast<int>(out_.size()) != s)
    throw ConstructionError("state tables have inconsistent sizes");
  for (int i = 0; i < s; ++i) {
    if (static_cast<int>(trans_[i].size()) != q_ || static_cast<int>(out_[i].size()) != q_)
      throw ConstructionError("row of state " + names_[i] + " has wrong width");
    std::vector<char> seen(q_, 0);
    for (int x = 0; x < q_; ++x) {
      if (trans_[i][x] < 0 || trans_[i][x] >= s) throw ConstructionError("transition out of range");
      int y = out_[i][x];
      if (y < 0 || y >= q_ || seen[y]) throw ConstructionError("output of state " + names_[i] + " is not a permutation");
      seen[y] = 1;
    }
  }
  for (int x = 0; x < q_; ++x)
    if (trans_[0][x] != 0 || out_[0][x] != x) throw ConstructionError("state 0 must be the identity");
  for (int g : generators_)
    if (g <= 0 || g >= s) throw ConstructionError("generator must be a non-identity state");
}

int Automaton::state(const std::string& name) const {
  for (int i = 0; i < num_states(); ++i)
    if (names_[i] == name) return i;
  throw InputError("unknown state '" + name + "'");
}

int Automaton::inverse_of(int s) const {
  if (s == 0) return 0;
  const std::string& n = names_.at(s);
  std::string target = n.size() > 3 && n.ends_with("^-1") ? n.substr(0, n.size() - 3) : n + "^-1";
  for (int i = 0; i < num_states(); ++i)
    if (names_[i] == target) return i;
  return -1;
}

void Automaton::act_inplace(int s, std::uint8_t* w, int n) const {
  for (int i = 0; i < n && s != 0; ++i) {
    int x = w[i];
    w[i] = static_cast<std::uint8_t>(out_[s][x]);
    s = trans_[s][x];
  }
}

Word Automaton::act(int s, const Word& w) const {
  if (s < 0 || s >= num_states()) throw InputError("unknown state index " + std::to_string(s));
  for (auto x : w)
    if (x >= q_) throw InputError("invalid letter " + std::to_string(x));
  Word r = w;
  act_inplace(s, r.data(), static_cast<int>(r.size()));
  return r;
}

nlohmann::json Automaton::to_json() const {
  nlohmann::json gens = nlohmann::json::array();
  for (int g : generators_) gens.push_back(names_[g]);
  return {{"alphabet", q_}, {"states", names_}, {"transitions", trans_},
          {"outputs", out_}, {"generators", gens}};
}

Automaton Automaton::from_json(const nlohmann::json& j) {
  try {
    auto names = j.at("states").get<std::vector<std::string>>();
    std::vector<int> gens;
    for (const auto& g : j.at("generators")) {
      auto it = std::find(names.begin(), names.end(), g.get<std::string>());
      if (it == names.end()) throw InputError("generator not among states");
      gens.push_back(static_cast<int>(it - names.begin()));
    }
    return Automaton(j.at("alphabet").get<int>(), names,
                     j.at("transitions").get<std::vector<std::vector<int>>>(),
                     j.at("outputs").get<std::vector<std::vector<int>>>(), gens);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed automaton json: ") + e.what());
  }
}

Automaton invert(const Automaton& a) {
  const int q = a.alphabet(), s = a.num_states();
  std::vector<std::string> names(s);
  std::vector<std::vector<int>> tr(s, std::vector<int>(q)), out(s, std::vector<int>(q));
  names[0] = a.name(0);
  for (int i = 1; i < s; ++i) {
    const std::string& n = a.name(i);
    names[i] = n.ends_with("^-1") ? n.substr(0, n.size() - 3) : n + "^-1";
  }
  for (int i = 0; i < s; ++i)
    for (int x = 0; x < q; ++x) {
      int y = a.output(i, x);
      out[i][y] = x;
      tr[i][y] = a.next(i, x);
    }
  return Automaton(q, names, tr, out, a.generators());
}

Automaton with_inverses(const Automaton& a) {
  Automaton inv = invert(a);
  const int q = a.alphabet(), s = a.num_states();
  std::vector<std::string> names = a.names();
  std::vector<std::vector<int>> tr, out;
  for (int i = 0; i < s; ++i) {
    tr.push_back(std::vector<int>(q));
    out.push_back(std::vector<int>(q));
    for (int x = 0; x < q; ++x) {
      tr[i][x] = a.next(i, x);
      out[i][x] = a.output(i, x);
    }
  }
  // inverse state i lives at s + i - 1
  for (int i = 1; i < s; ++i) {
    names.push_back(inv.name(i));
    tr.push_back(std::vector<int>(q));
    out.push_back(std::vector<int>(q));
    for (int x = 0; x < q; ++x) {
      int t = inv.next(i, x);
      tr.back()[x] = t == 0 ? 0 : s + t - 1;
      out.back()[x] = inv.output(i, x);
    }
  }
  return Automaton(q, names, tr, out, a.generators());
}

CanonicalForm canonical_form(const Automaton& a, std::vector<int> generator_order) {
  if (generator_order.empty()) generator_order = a.generators();
  const int q = a.alphabet();
  std::vector<int> reach;
  std::vector<char> seen(a.num_states(), 0);
  std::deque<int> dq(generator_order.begin(), generator_order.end());
  for (int g : generator_order) seen[g] = 1;
  while (!dq.empty()) {
    int s = dq.front();
    dq.pop_front();
    reach.push_back(s);
    for (int x = 0; x < q; ++x) {
      int t = a.next(s, x);
      if (!seen[t]) {
        seen[t] = 1;
        dq.push_back(t);
      }
    }
  }
  // Moore partition refinement over reachable states
  std::map<int, int> cls;
  {
    std::map<std::vector<int>, int> ids;
    for (int s : reach) {
      std::vector<int> key;
      for (int x = 0; x < q; ++x) key.push_back(a.output(s, x));
      cls[s] = ids.emplace(key, static_cast<int>(ids.size())).first->second;
    }
  }
  for (;;) {
    std::map<std::vector<int>, int> ids;
    std::map<int, int> next;
    for (int s : reach) {
      std::vector<int> key{cls[s]};
      for (int x = 0; x < q; ++x) key.push_back(cls[a.next(s, x)]);
      next[s] = ids.emplace(key, static_cast<int>(ids.size())).first->second;
    }
    std::set<int> before;
    for (auto& [k, v] : cls) before.insert(v);
    bool stable = ids.size() == before.size();
    cls = std::move(next);
    if (stable) break;
  }
  std::map<int, int> rep;
  for (int s : reach) rep.emplace(cls[s], s);
  std::map<int, int> order;
  std::deque<int> bfs;
  for (int g : generator_order)
    if (order.emplace(cls[g], static_cast<int>(order.size())).second) bfs.push_back(cls[g]);
  while (!bfs.empty()) {
    int c = bfs.front();
    bfs.pop_front();
    int s = rep[c];
    for (int x = 0; x < q; ++x) {
      int d = cls[a.next(s, x)];
      if (order.emplace(d, static_cast<int>(order.size())).second) bfs.push_back(d);
    }
  }
  CanonicalForm f;
  f.q = q;
  f.num_generators = static_cast<int>(generator_order.size());
  f.transitions.assign(order.size(), std::vector<int>(q));
  f.outputs.assign(order.size(), std::vector<int>(q));
  for (auto [c, idx] : order) {
    int s = rep[c];
    for (int x = 0; x < q; ++x) {
      f.transitions[idx][x] = order[cls[a.next(s, x)]];
      f.outputs[idx][x] = a.output(s, x);
    }
  }
  return f;
}

Automaton basilica_automaton() {
  // a = (b, id), b = (0 1)(a, id)
  return Automaton(2, {"id", "a", "b"},
                   {{0, 0}, {2, 0}, {1, 0}},
                   {{0, 1}, {0, 1}, {1, 0}}, {1, 2});
}

Automaton adding_machine() {
  // a = (0 1)(id, a)
  return Automaton(2, {"id", "a"}, {{0, 0}, {0, 1}}, {{0, 1}, {1, 0}}, {1});
}

Automaton img3_automaton() {
  // a = (0 1)(id, a, id), b = (0 2)(id, id, b)
  return Automaton(3, {"id", "a", "b"},
                   {{0, 0, 0}, {0, 1, 0}, {0, 0, 2}},
                   {{0, 1, 2}, {1, 0, 2}, {2, 1, 0}}, {1, 2});
}

Automaton kneading_automaton(const std::string& bits) {
  if (bits.empty()) throw InputError("kneading word must be non-empty");
  for (char c : bits)
    if (c != '0' && c != '1') throw InputError("kneading word must be binary");
  const int k = static_cast<int>(bits.size()) + 1;
  std::vector<std::string> names{"id"};
  std::vector<std::vector<int>> tr(k + 1, std::vector<int>(2, 0)), out(k + 1, {0, 1});
  std::vector<int> gens;
  for (int i = 1; i <= k; ++i) {
    names.push_back("a" + std::to_string(i));
    gens.push_back(i);
  }
  // a_1 = (0 1)(a_k, id)
  tr[1] = {k, 0};
  out[1] = {1, 0};
  // a_{i+1} = (a_i, id) or (id, a_i)
  for (int i = 1; i < k; ++i) {
    if (bits[i - 1] == '0') tr[i + 1] = {i, 0};
    else tr[i + 1] = {0, i};
  }
  return Automaton(2, names, tr, out, gens);
}

GroupPreset preset(const std::string& name) {
  if (name == "basilica") return {name, basilica_automaton()};
  if (name == "img3") return {name, img3_automaton()};
  if (name == "adding") return {name, adding_machine()};
  if (name.starts_with("kneading:")) return {name, kneading_automaton(name.substr(9))};
  throw InputError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"basilica", "img3", "adding", "kneading:<bits>"};
}

std::uint64_t preset_registry_hash() {
  std::string blob;
  for (const char* n : {"basilica", "img3", "adding", "kneading:0", "kneading:00"})
    blob += preset(n).automaton.to_json().dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : blob) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sandpile_lab
