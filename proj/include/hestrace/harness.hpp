#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hestrace/automata.hpp"
#include "hestrace/automata_io.hpp"
#include "hestrace/error.hpp"
#include "hestrace/hes.hpp"
#include "hestrace/omega_input.hpp"
#include "hestrace/omega_io.hpp"
#include "hestrace/oracle.hpp"
#include "hestrace/trace.hpp"

// Randomized differential campaigns. Each trial draws a word automaton, a tree automaton and
// a deterministic automaton from its own seed and checks nine properties against the oracles.

namespace hestrace::harness {

namespace detail {
using hestrace::detail::below;
using hestrace::detail::unit;
}  // namespace detail

struct CampaignConfig {
  std::size_t max_states = 6;
  std::size_t max_letters = 3;
  unsigned max_priority = 6;
  std::size_t max_stem = 2;
  std::size_t max_cycle = 3;
  /// Properties 1 and 3 run on every lasso within the bounds when set, else on samples.
  bool all_lassos = true;
  std::size_t sampled_lassos = 4;
  std::size_t tree_max_states = 5;
  std::size_t tree_max_symbols = 3;
  unsigned tree_max_arity = 2;
  unsigned tree_max_priority = 4;
  std::size_t max_tree_nodes = 4;
  std::size_t finite_max_len = 5;
  std::size_t det_max_states = 6;
  std::size_t max_counterexamples = 3;
  bool shrink = true;
  /// Mutation: solve the ordinary equation systems with flipped signs.
  bool flip_signs = false;
  std::size_t iteration_budget = default_iteration_budget();
};

inline nlohmann::json to_json(const CampaignConfig& c) {
  return {{"max_states", c.max_states},
          {"max_letters", c.max_letters},
          {"max_priority", c.max_priority},
          {"max_stem", c.max_stem},
          {"max_cycle", c.max_cycle},
          {"all_lassos", c.all_lassos},
          {"sampled_lassos", c.sampled_lassos},
          {"tree_max_states", c.tree_max_states},
          {"tree_max_symbols", c.tree_max_symbols},
          {"tree_max_arity", c.tree_max_arity},
          {"tree_max_priority", c.tree_max_priority},
          {"max_tree_nodes", c.max_tree_nodes},
          {"finite_max_len", c.finite_max_len},
          {"det_max_states", c.det_max_states},
          {"max_counterexamples", c.max_counterexamples},
          {"shrink", c.shrink},
          {"flip_signs", c.flip_signs},
          {"iteration_budget", c.iteration_budget}};
}

/// Unknown keys are rejected; missing keys keep their defaults.
inline CampaignConfig config_from_json(const nlohmann::json& j) {
  CampaignConfig c;
  auto defaults = to_json(c);
  if (!j.is_object()) throw ValidationError("campaign config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!defaults.contains(it.key())) throw ValidationError("unknown campaign config key " + it.key());
  auto get = [&](const char* k, auto& field) {
    if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
  };
  get("max_states", c.max_states);
  get("max_letters", c.max_letters);
  get("max_priority", c.max_priority);
  get("max_stem", c.max_stem);
  get("max_cycle", c.max_cycle);
  get("all_lassos", c.all_lassos);
  get("sampled_lassos", c.sampled_lassos);
  get("tree_max_states", c.tree_max_states);
  get("tree_max_symbols", c.tree_max_symbols);
  get("tree_max_arity", c.tree_max_arity);
  get("tree_max_priority", c.tree_max_priority);
  get("max_tree_nodes", c.max_tree_nodes);
  get("finite_max_len", c.finite_max_len);
  get("det_max_states", c.det_max_states);
  get("max_counterexamples", c.max_counterexamples);
  get("shrink", c.shrink);
  get("flip_signs", c.flip_signs);
  get("iteration_budget", c.iteration_budget);
  if (c.max_states < 1 || c.max_letters < 1 || c.tree_max_states < 1 || c.tree_max_symbols < 1 ||
      c.det_max_states < 1 || c.max_cycle < 1 || c.max_tree_nodes < 1)
    throw ValidationError("campaign size bounds must be >= 1");
  if (c.max_priority < 1 || c.tree_max_priority < 1) throw ValidationError("priority bounds must be >= 1");
  return c;
}

struct Counterexample {
  std::size_t trial = 0;
  std::string automaton;
  std::string state;
  std::string input;
  std::string detail;
};

struct PropertyResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failed = 0;
  std::map<std::string, std::size_t> tallies;
  std::vector<Counterexample> counterexamples;

  bool ok() const noexcept { return failed == 0; }
};

struct Report {
  std::string title = "campaign";
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::optional<CampaignConfig> config;
  std::vector<PropertyResult> properties;

  bool ok() const {
    return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.ok(); });
  }
  const PropertyResult& property(const std::string& name) const {
    for (const auto& p : properties)
      if (p.name == name) return p;
    throw Error("no property " + name);
  }
};

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"title", r.title}, {"seed", r.seed}, {"trials", r.trials},
                   {"ok", r.ok()}};
  if (r.config) j["config"] = to_json(*r.config);
  auto props = nlohmann::json::array();
  for (const auto& p : r.properties) {
    auto ces = nlohmann::json::array();
    for (const auto& c : p.counterexamples)
      ces.push_back({{"trial", c.trial}, {"automaton", c.automaton}, {"state", c.state}, {"input", c.input},
                     {"detail", c.detail}});
    props.push_back({{"name", p.name},
                     {"checks", p.checks},
                     {"passed", p.checks - p.failed},
                     {"failed", p.failed},
                     {"tallies", p.tallies},
                     {"counterexamples", ces}});
  }
  j["properties"] = props;
  return j;
}

inline std::string summary(const Report& r) {
  std::ostringstream os;
  os << r.title << " seed=" << r.seed << " trials=" << r.trials << "\n";
  for (const auto& p : r.properties) {
    os << "  [" << (p.ok() ? "pass" : "FAIL") << "] " << p.name << ": " << p.checks - p.failed << "/" << p.checks;
    for (const auto& [k, v] : p.tallies) os << " " << k << "=" << v;
    os << "\n";
    for (const auto& c : p.counterexamples) {
      os << "    trial " << c.trial << ": " << c.detail << "\n";
      if (!c.state.empty()) os << "      state " << c.state << ", input " << c.input << "\n";
      std::istringstream lines(c.automaton);
      for (std::string line; std::getline(lines, line);) os << "      | " << line << "\n";
    }
  }
  os << (r.ok() ? "all properties pass" : "FAILURES") << "\n";
  return os.str();
}

// Input generators.

/// Every lasso with |stem| <= max_stem and 1 <= |cycle| <= max_cycle, shortest first.
inline std::vector<LassoWord> all_lassos(const std::vector<std::string>& alphabet, std::size_t max_stem,
                                         std::size_t max_cycle) {
  std::vector<std::vector<std::vector<std::string>>> by_len{{{}}};
  for (std::size_t len = 1; len <= std::max(max_stem, max_cycle); ++len) {
    by_len.emplace_back();
    for (const auto& w : by_len[len - 1])
      for (const auto& a : alphabet) {
        auto v = w;
        v.push_back(a);
        by_len[len].push_back(std::move(v));
      }
  }
  std::vector<LassoWord> out;
  for (std::size_t s = 0; s <= max_stem; ++s)
    for (const auto& u : by_len[s])
      for (std::size_t c = 1; c <= max_cycle; ++c)
        for (const auto& v : by_len[c]) out.push_back({u, v});
  return out;
}

inline LassoWord random_lasso(std::mt19937_64& rng, const std::vector<std::string>& alphabet, std::size_t max_stem,
                              std::size_t max_cycle) {
  LassoWord w;
  auto s = detail::below(rng, max_stem + 1);
  auto c = 1 + detail::below(rng, max_cycle);
  for (std::size_t i = 0; i < s; ++i) w.stem.push_back(alphabet[detail::below(rng, alphabet.size())]);
  for (std::size_t i = 0; i < c; ++i) w.cycle.push_back(alphabet[detail::below(rng, alphabet.size())]);
  return w;
}

/// A pointed node graph with at most max_nodes nodes, trimmed to the part reachable from the root.
inline RegularTree random_regular_tree(std::mt19937_64& rng, const RankedAlphabet& alphabet, std::size_t max_nodes) {
  const std::size_t n = 1 + detail::below(rng, max_nodes);
  RegularTree t;
  for (std::size_t k = 0; k < n; ++k) {
    auto f = detail::below(rng, alphabet.size());
    RegularTree::Node node{alphabet.symbols[f], {}};
    for (unsigned c = 0; c < alphabet.arity[f]; ++c) node.children.push_back(detail::below(rng, n));
    t.nodes.push_back(std::move(node));
  }
  return reachable_part(t);
}

// Shrinking.

/// Removes state j, redirecting its incoming and outgoing transitions to `into`.
inline ParityWordAutomaton merge_states(ParityWordAutomaton a, StateId j, StateId into) {
  auto fix = [&](StateId s) {
    if (s == j) s = into;
    return s > j ? s - 1 : s;
  };
  for (auto& t : a.transitions) {
    t.from = fix(t.from);
    t.to = fix(t.to);
  }
  a.states.erase(a.states.begin() + static_cast<std::ptrdiff_t>(j));
  a.priority.erase(a.priority.begin() + static_cast<std::ptrdiff_t>(j));
  if (!a.final_flags.empty()) a.final_flags.erase(a.final_flags.begin() + static_cast<std::ptrdiff_t>(j));
  return normalize(std::move(a));
}

inline ParityTreeAutomaton merge_states(ParityTreeAutomaton a, StateId j, StateId into) {
  auto fix = [&](StateId s) {
    if (s == j) s = into;
    return s > j ? s - 1 : s;
  };
  for (auto& t : a.transitions) {
    t.from = fix(t.from);
    for (auto& c : t.children) c = fix(c);
  }
  a.states.erase(a.states.begin() + static_cast<std::ptrdiff_t>(j));
  a.priority.erase(a.priority.begin() + static_cast<std::ptrdiff_t>(j));
  return normalize(std::move(a));
}

template <class Aut, class Input>
struct Case {
  Aut aut;
  StateId x = 0;
  Input input;
};

using WordCase = Case<ParityWordAutomaton, LassoWord>;
using TreeCase = Case<ParityTreeAutomaton, RegularTree>;

namespace detail {

template <class Aut, class Input>
void automaton_candidates(const Case<Aut, Input>& c, std::vector<Case<Aut, Input>>& out) {
  for (StateId j = 1; j < c.aut.num_states(); ++j)
    for (StateId i = 0; i < j; ++i) {
      auto d = c;
      d.aut = merge_states(c.aut, j, i);
      d.x = c.x == j ? i : (c.x > j ? c.x - 1 : c.x);
      out.push_back(std::move(d));
    }
}

inline std::vector<WordCase> candidates(const WordCase& c) {
  std::vector<WordCase> out;
  for (std::size_t k = 0; k < c.input.stem.size(); ++k) {
    auto d = c;
    d.input.stem.erase(d.input.stem.begin() + static_cast<std::ptrdiff_t>(k));
    out.push_back(std::move(d));
  }
  for (std::size_t k = 0; c.input.cycle.size() > 1 && k < c.input.cycle.size(); ++k) {
    auto d = c;
    d.input.cycle.erase(d.input.cycle.begin() + static_cast<std::ptrdiff_t>(k));
    out.push_back(std::move(d));
  }
  automaton_candidates(c, out);
  return out;
}

inline std::vector<TreeCase> candidates(const TreeCase& c) {
  std::vector<TreeCase> out;
  for (auto child : c.input.nodes[c.input.root].children) {
    auto d = c;
    d.input.root = child;
    d.input = reachable_part(d.input);
    if (d.input.size() < c.input.size()) out.push_back(std::move(d));
  }
  automaton_candidates(c, out);
  return out;
}

}  // namespace detail

/// Greedy structural shrinking. Smaller inputs and state merges are taken first-fit; then a
/// single pass drops every transition whose removal keeps the failure.
template <class C, class Fails>
C shrink(C c, Fails&& fails) {
  auto still = [&](const C& d) {
    try {
      return fails(d);
    } catch (const Error&) {
      return false;
    }
  };
  for (bool progress = true; progress;) {
    progress = false;
    for (auto& d : detail::candidates(c))
      if (still(d)) {
        c = std::move(d);
        progress = true;
        break;
      }
    if (progress) continue;
    for (std::size_t k = c.aut.transitions.size(); k-- > 0;) {
      auto d = c;
      d.aut.transitions.erase(d.aut.transitions.begin() + static_cast<std::ptrdiff_t>(k));
      if (still(d)) {
        c = std::move(d);
        progress = true;
      }
    }
  }
  return c;
}

// Independent oracle for deterministic automata: plain step-by-step simulation.

struct DetSimulation {
  enum class Kind { defined, exception, parity } kind = Kind::defined;
  std::vector<DecoratedLetter> prefix;  ///< word case: the first steps of the unique run
};

inline DetSimulation simulate_det_word(const DeterministicExceptionAutomaton& a, StateId x) {
  // Stem and period of the run are both at most |X|, so this prefix determines it.
  const std::size_t n = a.num_states();
  const std::size_t steps = n + n * n;
  DetSimulation sim;
  std::vector<StateId> states;
  StateId cur = x;
  for (std::size_t i = 0; i < steps; ++i) {
    if (!a.delta[cur]) return {DetSimulation::Kind::exception, {}};
    states.push_back(cur);
    sim.prefix.push_back({a.alphabet.symbols[a.delta[cur]->symbol], a.priority[cur]});
    cur = a.delta[cur]->children.at(0);
  }
  unsigned top = 0;
  for (std::size_t i = n; i < steps; ++i) top = std::max(top, a.priority[states[i]]);
  if (top % 2) sim.kind = DetSimulation::Kind::parity;
  return sim;
}

inline DetSimulation::Kind simulate_det_tree(const DeterministicExceptionAutomaton& a, StateId x) {
  auto reach = oracle::detail::reachable_from(
      [&] {
        std::vector<std::vector<std::size_t>> succ(a.num_states());
        for (StateId s = 0; s < a.num_states(); ++s)
          if (a.delta[s]) succ[s].assign(a.delta[s]->children.begin(), a.delta[s]->children.end());
        return succ;
      }(),
      x);
  for (StateId s = 0; s < a.num_states(); ++s)
    if (reach[s] && !a.delta[s]) return DetSimulation::Kind::exception;
  // The universal player picks branches; it wins iff some reachable cycle has an odd maximum.
  oracle::ParityGame g;
  for (StateId s = 0; s < a.num_states(); ++s) g.add_vertex(oracle::Player::forall, a.priority[s]);
  for (StateId s = 0; s < a.num_states(); ++s)
    if (a.delta[s])
      for (auto c : a.delta[s]->children) g.add_edge(s, c);
  auto sol = oracle::zielonka_solve(g);
  return sol.winner[x] == oracle::Player::exists ? DetSimulation::Kind::defined : DetSimulation::Kind::parity;
}

/// The run tree of a deterministic automaton over all its states, rooted at x.
inline DecoratedRegularTree det_run_graph(const DeterministicExceptionAutomaton& a, StateId x) {
  DecoratedRegularTree t;
  t.root = x;
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (!a.delta[s]) {
      t.nodes.push_back({{"?", a.priority[s]}, {}});
      continue;
    }
    t.nodes.push_back({{a.alphabet.symbols[a.delta[s]->symbol], a.priority[s]}, a.delta[s]->children});
  }
  return t;
}

namespace props {
inline constexpr const char* hes_vs_oracle = "1 hes-vs-oracle";
inline constexpr const char* buchi_as_parity = "2 buchi-as-parity";
inline constexpr const char* flattening = "3 flattening-theorem";
inline constexpr const char* decorated = "4 decorated-soundness";
inline constexpr const char* trees = "5 tree-membership";
inline constexpr const char* finite = "6 finite-traces";
inline constexpr const char* representation = "7 representation-invariance";
inline constexpr const char* priority_shift = "8 priority-shift";
inline constexpr const char* deterministic = "9 deterministic-exception";
}  // namespace props

namespace detail {

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

class Trial {
public:
  Trial(const CampaignConfig& cfg, std::size_t index, std::uint64_t seed, std::vector<PropertyResult>& results)
      : cfg_(cfg), index_(index), rng_(seed), results_(results) {
    opts_.solve.budget = cfg.iteration_budget;
    opts_.flip_signs = cfg.flip_signs;
  }

  void run() {
    word_properties();
    tree_properties();
    det_property();
  }

private:
  PropertyResult& prop(const char* name) {
    for (auto& p : results_)
      if (p.name == name) return p;
    results_.push_back({name, 0, 0, {}, {}});
    return results_.back();
  }

  void record(const char* name, bool ok, const std::function<Counterexample()>& describe) {
    auto& p = prop(name);
    ++p.checks;
    if (ok) return;
    ++p.failed;
    // Shrinking often lands on the same case; a few extra attempts look for distinct ones.
    if (p.counterexamples.size() < cfg_.max_counterexamples && described_[name]++ < 2 * cfg_.max_counterexamples) {
      auto c = describe();
      c.trial = index_;
      bool seen = std::any_of(p.counterexamples.begin(), p.counterexamples.end(), [&](const Counterexample& o) {
        return o.state == c.state && o.input == c.input && o.detail == c.detail;
      });
      if (!seen) p.counterexamples.push_back(std::move(c));
    }
  }

  // Runs `check`; an exception counts as a failure carrying its message.
  void check(const char* name, const std::function<bool()>& pass, const std::function<Counterexample()>& describe) {
    bool ok = false;
    std::string err;
    try {
      ok = pass();
    } catch (const std::exception& e) {
      err = e.what();
    }
    record(name, ok, [&] {
      auto c = describe();
      if (!err.empty()) c.detail = "exception: " + err;
      return c;
    });
  }

  template <class C, class Fails>
  Counterexample describe_case(const C& c0, Fails&& fails, const std::string& what) {
    C c = cfg_.shrink ? shrink(c0, fails) : c0;
    Counterexample ce;
    ce.automaton = serialize(c.aut);
    ce.state = c.aut.states.at(c.x);
    ce.input = to_text(c.input);
    ce.detail = what;
    return ce;
  }

  ParityWordAutomaton draw_word(unsigned max_priority, double final_probability) {
    RandomWordParams p;
    p.states = 1 + below(rng_, cfg_.max_states);
    p.letters = 1 + below(rng_, cfg_.max_letters);
    p.max_priority = even_ceiling(1 + static_cast<unsigned>(below(rng_, max_priority)));
    p.density = uniform(rng_, 0.15, 0.5);
    p.final_probability = final_probability;
    return random_word_automaton(p, rng_());
  }

  bool hes(const ParityWordAutomaton& a, StateId x, const LassoWord& w) {
    return parity_trace_membership(a, x, w, opts_).member;
  }

  void word_properties() {
    const auto aut = draw_word(cfg_.max_priority, 0.4);
    const StateId x = below(rng_, aut.num_states());
    std::vector<LassoWord> sampled;
    for (std::size_t k = 0; k < cfg_.sampled_lassos; ++k)
      sampled.push_back(random_lasso(rng_, aut.alphabet, cfg_.max_stem, cfg_.max_cycle));
    const auto lassos = cfg_.all_lassos ? all_lassos(aut.alphabet, cfg_.max_stem, cfg_.max_cycle) : sampled;

    auto p1 = [this](const WordCase& c) { return hes(c.aut, c.x, c.input) != oracle::lasso_acceptance(c.aut, c.x, c.input).accepted; };
    auto p3 = [this](const WordCase& c) { return !flattening_theorem_check(c.aut, c.x, c.input, opts_).agree(); };
    for (const auto& w : lassos) {
      WordCase c{aut, x, w};
      check(props::hes_vs_oracle, [&] { return !p1(c); },
            [&] { return describe_case(c, p1, "equation system and product-graph oracle disagree"); });
      check(props::flattening, [&] { return !p3(c); },
            [&] { return describe_case(c, p3, "ordinary and flattened decorated membership disagree"); });
    }

    // Two-priority automata, both encodings.
    const auto two = draw_word(2, 0.0);
    const StateId x2 = below(rng_, two.num_states());
    for (std::size_t k = 0; k < cfg_.sampled_lassos; ++k) {
      WordCase c{two, x2, random_lasso(rng_, two.alphabet, cfg_.max_stem, cfg_.max_cycle)};
      auto p2 = [this](const WordCase& d) {
        bool b = buchi_trace_membership(parity_to_buchi(d.aut), d.x, d.input, opts_).member;
        return b != hes(d.aut, d.x, d.input) || b != oracle::lasso_acceptance(d.aut, d.x, d.input).accepted;
      };
      check(props::buchi_as_parity, [&] { return !p2(c); },
            [&] { return describe_case(c, p2, "Buechi and two-priority encodings disagree"); });
    }

    for (const auto& w : sampled) {
      WordCase c{aut, x, w};
      decorated_property(c);
      for (std::size_t k = 1; k <= 3; ++k) {
        auto pk = [this, k](const WordCase& d) { return hes(d.aut, d.x, unroll(d.input, k)) != hes(d.aut, d.x, d.input); };
        check(props::representation, [&] { return !pk(c); },
              [&] { return describe_case(c, pk, "verdict changes under unroll k=" + std::to_string(k)); });
        prop(props::representation).tallies["unroll"]++;
      }
      auto pn = [this](const WordCase& d) { return hes(d.aut, d.x, normalize(d.input)) != hes(d.aut, d.x, d.input); };
      check(props::representation, [&] { return !pn(c); },
            [&] { return describe_case(c, pn, "verdict changes under normalize"); });
      prop(props::representation).tallies["normalize"]++;

      auto ps = [this](const WordCase& d) { return hes(shift_priorities(d.aut, 2), d.x, d.input) != hes(d.aut, d.x, d.input); };
      check(props::priority_shift, [&] { return !ps(c); },
            [&] { return describe_case(c, ps, "verdict changes when every priority is raised by 2"); });
      prop(props::priority_shift).tallies["word"]++;
    }

    // Finite traces on the same automaton, which carries termination flags.
    check(
        props::finite,
        [&] {
          return finite_trace_enum(aut, x, cfg_.finite_max_len, opts_) ==
                 oracle::finite_run_enumeration(aut, x, cfg_.finite_max_len);
        },
        [&] {
          return Counterexample{0, serialize(aut), aut.states[x], "max-len " + std::to_string(cfg_.finite_max_len),
                                "finite trace sets differ"};
        });
  }

  void decorated_property(const WordCase& c) {
    auto run = oracle::lasso_acceptance(c.aut, c.x, c.input);
    if (!run.accepted) return;
    auto xi = decorate_run(*run.run, c.aut.priority);
    auto describe = [&](const DecoratedLassoWord& d, std::string what) {
      return Counterexample{0, serialize(c.aut), c.aut.states[c.x], to_text(d), std::move(what)};
    };
    check(
        props::decorated,
        [&] {
          return check_decorated_invariant(xi, c.aut.priority[c.x], c.aut.max_priority).ok &&
                 decorated_trace_membership(c.aut, c.x, xi, opts_).member;
        },
        [&] { return describe(xi, "decorated oracle run is not a decorated trace"); });
    prop(props::decorated).tallies["witness"]++;

    // Wrong decorations: membership must match the product search for a realizing run.
    auto mutated = xi;
    auto p = below(rng_, mutated.length());
    auto& letter = p < mutated.stem.size() ? mutated.stem[p] : mutated.cycle[p - mutated.stem.size()];
    letter.priority = 1 + static_cast<unsigned>(below(rng_, c.aut.max_priority));
    if (!check_decorated_invariant(mutated, c.aut.priority[c.x], c.aut.max_priority)) return;
    bool expected = oracle::decorated_lasso_realizable(c.aut, c.x, mutated);
    check(
        props::decorated, [&] { return decorated_trace_membership(c.aut, c.x, mutated, opts_).member == expected; },
        [&] { return describe(mutated, "mutated decoration verdict differs from product search"); });
    prop(props::decorated).tallies[expected ? "mutated-realizable" : "mutated-rejected"]++;
  }

  void tree_properties() {
    RandomTreeParams p;
    p.states = 1 + below(rng_, cfg_.tree_max_states);
    p.symbols = 1 + below(rng_, cfg_.tree_max_symbols);
    p.max_arity = cfg_.tree_max_arity;
    p.max_priority = even_ceiling(1 + static_cast<unsigned>(below(rng_, cfg_.tree_max_priority)));
    p.density = uniform(rng_, 0.2, 0.6);
    const auto aut = random_tree_automaton(p, rng_());
    const StateId x = below(rng_, aut.num_states());
    const auto t = random_regular_tree(rng_, aut.alphabet, cfg_.max_tree_nodes);
    TreeCase c{aut, x, t};

    auto p5 = [this](const TreeCase& k) {
      return tree_language_membership(k.aut, k.x, k.input, opts_).member !=
             oracle::tree_membership_oracle(k.aut, k.x, k.input).accepted;
    };
    check(props::trees, [&] { return !p5(c); },
          [&] { return describe_case(c, p5, "equation system and acceptance game disagree"); });
    prop(props::trees).tallies["membership"]++;
    auto p5w = [this](const TreeCase& k) { return !flattening_theorem_check(k.aut, k.x, k.input, opts_).agree(); };
    check(props::trees, [&] { return !p5w(c); },
          [&] { return describe_case(c, p5w, "decorated tree witness does not round-trip"); });
    prop(props::trees).tallies["witness"]++;

    auto ps = [this](const TreeCase& k) {
      return tree_language_membership(shift_priorities(k.aut, 2), k.x, k.input, opts_).member !=
             tree_language_membership(k.aut, k.x, k.input, opts_).member;
    };
    check(props::priority_shift, [&] { return !ps(c); },
          [&] { return describe_case(c, ps, "tree verdict changes when every priority is raised by 2"); });
    prop(props::priority_shift).tallies["tree"]++;
  }

  void det_property() {
    RandomDetParams p;
    p.word = below(rng_, 2) == 0;
    p.states = 1 + below(rng_, cfg_.det_max_states);
    p.symbols = 1 + below(rng_, 3);
    p.max_arity = 2;
    p.max_priority = even_ceiling(1 + static_cast<unsigned>(below(rng_, cfg_.max_priority)));
    p.exception_probability = 0.15;
    const auto aut = random_det_automaton(p, rng_());
    const StateId x = below(rng_, aut.num_states());
    auto behavior = det_exception_behavior(aut, x);
    DetSimulation::Kind kind;
    bool same = false;
    if (aut.word) {
      auto sim = simulate_det_word(aut, x);
      kind = sim.kind;
      same = behavior.bottom() == (kind != DetSimulation::Kind::defined);
      if (same && !behavior.bottom()) {
        const auto& d = std::get<DecoratedLassoWord>(*behavior.value);
        for (std::size_t i = 0; i < sim.prefix.size() && same; ++i) same = d.at(i) == sim.prefix[i];
      }
    } else {
      kind = simulate_det_tree(aut, x);
      same = behavior.bottom() == (kind != DetSimulation::Kind::defined);
      if (same && !behavior.bottom()) same = same_unfolding(std::get<DecoratedRegularTree>(*behavior.value), det_run_graph(aut, x));
    }
    record(props::deterministic, same, [&] {
      return Counterexample{0, serialize(aut), aut.states[x], "",
                            "behavior " + (behavior.bottom() ? "bottom (" + behavior.reason + ")" : std::string("defined")) +
                                " differs from simulation"};
    });
    const char* k = kind == DetSimulation::Kind::defined ? "defined"
                    : kind == DetSimulation::Kind::exception ? "bottom-exception"
                                                             : "bottom-parity";
    prop(props::deterministic).tallies[std::string(aut.word ? "word-" : "tree-") + k]++;
  }

  const CampaignConfig& cfg_;
  std::size_t index_;
  std::mt19937_64 rng_;
  std::vector<PropertyResult>& results_;
  std::map<std::string, std::size_t> described_;
  TraceOptions opts_;
};

}  // namespace detail

/// Deterministic in (config, seed): trial t draws everything from a seed derived from (seed, t).
inline Report campaign(const CampaignConfig& cfg, std::uint64_t seed, std::size_t trials) {
  Report r;
  r.seed = seed;
  r.trials = trials;
  r.config = cfg;
  for (const char* name : {props::hes_vs_oracle, props::buchi_as_parity, props::flattening, props::decorated,
                           props::trees, props::finite, props::representation, props::priority_shift,
                           props::deterministic})
    r.properties.push_back({name, 0, 0, {}, {}});
  for (std::size_t t = 0; t < trials; ++t) detail::Trial(cfg, t, detail::trial_seed(seed, t), r.properties).run();
  return r;
}

// Pinned cases with their exact expected verdicts.

inline constexpr const char* kIntroAutomaton =
    "word-parity\n"
    "alphabet: a b\n"
    "states: x y\n"
    "accepting: y\n"
    "trans: x a x; x b y; y a x; y b y;\n";

inline constexpr const char* kAppendixAutomaton =
    "word-parity\n"
    "alphabet: a b c\n"
    "states: x y z\n"
    "priorities: x:1 y:2 z:3\n"
    "trans: x a x; x b y; y a x; y b y; y c z; z b y; z c z;\n";

inline Report pinned_suite() {
  Report r;
  r.title = "pinned";
  auto add = [&](std::string name, const std::function<bool()>& pass) {
    PropertyResult p{std::move(name), 1, 0, {}, {}};
    std::string detail = "unexpected verdict";
    bool ok = false;
    try {
      ok = pass();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) {
      p.failed = 1;
      p.counterexamples.push_back({0, "", "", "", detail});
    }
    r.properties.push_back(std::move(p));
  };
  const auto A = parse_as<ParityWordAutomaton>(kIntroAutomaton);
  const auto A2 = parse_as<ParityWordAutomaton>(kAppendixAutomaton);
  const StateId x = 0, y = 1;
  auto both = [](const ParityWordAutomaton& a, StateId s, const char* w, bool expected) {
    auto l = parse_lasso(w);
    return parity_trace_membership(a, s, l).member == expected && oracle::lasso_acceptance(a, s, l).accepted == expected;
  };

  add("A x ;ba accepted", [&] { return both(A, x, ";ba", true); });
  add("A x b;a rejected", [&] { return both(A, x, "b;a", false); });
  add("A as Buechi x ;ba accepted", [&] { return buchi_trace_membership(parity_to_buchi(A), x, parse_lasso(";ba")).member; });
  add("A as Buechi x b;a rejected", [&] { return !buchi_trace_membership(parity_to_buchi(A), x, parse_lasso("b;a")).member; });
  add("A' x ;b accepted", [&] { return both(A2, x, ";b", true); });
  add("A' x ;bc rejected", [&] { return both(A2, x, ";bc", false); });
  add("A decorated x b:1;a:2,b:1 member",
      [&] { return decorated_trace_membership(A, x, parse_decorated_lasso("b:1;a:2,b:1")).member; });
  add("A decorated y ;b:2 member", [&] { return decorated_trace_membership(A, y, parse_decorated_lasso(";b:2")).member; });
  add("A decorated x ;b:2 grade mismatch", [&] {
    try {
      decorated_trace_membership(A, x, parse_decorated_lasso(";b:2"));
    } catch (const GradeMismatch&) {
      return true;
    }
    return false;
  });
  add("A flattening x ;ba agrees with witness", [&] {
    auto v = flattening_theorem_check(A, x, parse_lasso(";ba"));
    return v.agree() && v.left && v.witness &&
           same_sequence(std::get<DecoratedLassoWord>(*v.witness), parse_decorated_lasso("b:1;a:2,b:1"));
  });
  add("A flattening x b;a agrees without witness", [&] {
    auto v = flattening_theorem_check(A, x, parse_lasso("b;a"));
    return v.agree() && !v.left && !v.witness;
  });
  add("order sensitivity", [] {
    auto build = [](Sign s1, Sign s2) {
      HierEqSystem<PowersetLattice> h;
      PowersetLattice lat(1);
      h.add("u1", lat, s1, [](std::span<const BitSet> u) { return u[1]; });
      h.add("u2", lat, s2, [](std::span<const BitSet> u) { return u[0]; });
      return solve(h).values;
    };
    auto a = build(Sign::mu, Sign::nu), b = build(Sign::nu, Sign::mu);
    return a[0] == BitSet::full(1) && a[1] == BitSet::full(1) && b[0].none() && b[1].none();
  });
  auto det = [](const char* src) { return parse_as<DeterministicExceptionAutomaton>(src); };
  add("deterministic x->a x, priority 2 gives (a,2)^omega", [&] {
    auto b = det_exception_behavior(det("word-det-exc\nalphabet: a\nstates: x\npriorities: x:2\ntrans: x a x;\n"), 0);
    return !b.bottom() && same_sequence(std::get<DecoratedLassoWord>(*b.value), parse_decorated_lasso(";a:2"));
  });
  add("deterministic exception gives bottom", [&] {
    return det_exception_behavior(det("word-det-exc\nalphabet: a\nstates: x y\npriorities: x:2 y:2\ntrans: x a y;\n"), 0)
        .bottom();
  });
  add("deterministic odd cycle gives bottom", [&] {
    return det_exception_behavior(det("word-det-exc\nalphabet: a\nstates: x\npriorities: x:1\ntrans: x a x;\n"), 0)
        .bottom();
  });
  return r;
}

}  // namespace hestrace::harness
