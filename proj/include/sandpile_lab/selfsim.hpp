#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace sandpile_lab {

using Word = std::vector<std::uint8_t>;

std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s, int q);

// Invertible Mealy automaton over the alphabet {0..q-1}. State 0 is always the
// identity. Words are read first letter first.
class Automaton {
 public:
  Automaton(int q, std::vector<std::string> names,
            std::vector<std::vector<int>> transitions,
            std::vector<std::vector<int>> outputs,
            std::vector<int> generators);

  int alphabet() const { return q_; }
  int num_states() const { return static_cast<int>(names_.size()); }
  static constexpr int identity() { return 0; }
  const std::vector<int>& generators() const { return generators_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int s) const { return names_.at(s); }
  int state(const std::string& name) const;

  int next(int s, int x) const { return trans_[s][x]; }
  int output(int s, int x) const { return out_[s][x]; }

  // Index of the inverse state, or -1 when the inverse is not materialized.
  int inverse_of(int s) const;

  Word act(int s, const Word& w) const;
  Word act(const std::string& s, const Word& w) const { return act(state(s), w); }
  void act_inplace(int s, std::uint8_t* w, int n) const;

  nlohmann::json to_json() const;
  static Automaton from_json(const nlohmann::json& j);

 private:
  int q_;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> trans_;
  std::vector<std::vector<int>> out_;
  std::vector<int> generators_;
};

// Inverse automaton: state "s^-1" undoes s. Generators map to their inverses.
Automaton invert(const Automaton& a);

// Union of a and its inverse, so every state has an inverse_of partner.
Automaton with_inverses(const Automaton& a);

// Minimized tables with states numbered by BFS from the generators (in the
// given order, default: declaration order). Equal forms mean isomorphic
// automata with that generator correspondence.
struct CanonicalForm {
  int q = 0;
  int num_generators = 0;
  std::vector<std::vector<int>> transitions;
  std::vector<std::vector<int>> outputs;
  bool operator==(const CanonicalForm&) const = default;
};
CanonicalForm canonical_form(const Automaton& a, std::vector<int> generator_order = {});

Automaton kneading_automaton(const std::string& bits);
Automaton basilica_automaton();
Automaton adding_machine();
Automaton img3_automaton();

struct GroupPreset {
  std::string name;
  Automaton automaton;
};

// "basilica", "img3", "adding", "kneading:<bits>".
GroupPreset preset(const std::string& name);
std::vector<std::string> preset_names();
std::uint64_t preset_registry_hash();

}  // namespace sandpile_lab
