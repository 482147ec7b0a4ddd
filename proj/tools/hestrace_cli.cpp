// hestrace: command-line front end.
//
// Exit codes: 0 success, 1 a verification disagreement or failing report, 2 usage or input error.
// Results go to stdout, diagnostics to stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hestrace/hestrace.hpp"

namespace fs = std::filesystem;
using namespace hestrace;

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class A>
A load_automaton(const std::string& path) {
  return parse_as<A>(read_file(path));
}

StateId state_of(const std::vector<std::string>& states, const std::string& name) {
  auto id = index_of(states, name);
  if (!id) throw UsageError("unknown state " + name);
  return *id;
}

// A decorated argument is a file holding a decorated tree or lasso, or a decorated lasso literal.
Witness load_decorated(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) {
    auto src = read_file(arg);
    auto body = text::trim(src);
    if (body.rfind("decorated-tree", 0) == 0) return parse_decorated_tree(src);
    return parse_decorated_lasso(body);
  }
  return parse_decorated_lasso(arg);
}

std::string word_text(const std::vector<std::string>& w) {
  if (w.empty()) return "ε";
  bool compact = std::all_of(w.begin(), w.end(), [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (compact || i == 0 ? "" : ",") + w[i];
  return out;
}

std::string witness_text(const Witness& w) {
  return std::visit([](const auto& x) { return to_text(x); }, w);
}

void print_text(const std::string& s) {
  std::cout << s;
  if (s.empty() || s.back() != '\n') std::cout << '\n';
}

enum class Engine { hes, oracle, both };

Engine engine_of(bool oracle, bool both) { return both ? Engine::both : oracle ? Engine::oracle : Engine::hes; }

// Shared reporting for member / tree-member.
int report_membership(bool json, Engine e, const std::optional<MembershipVerdict>& hes, std::optional<bool> oracle) {
  bool agree = !(hes && oracle) || hes->member == *oracle;
  if (json) {
    nlohmann::json j = hes ? to_json(*hes) : nlohmann::json{{"schema_version", kSchemaVersion}, {"verdict", *oracle}};
    if (oracle) j["oracle"] = *oracle;
    if (e == Engine::both) j["agree"] = agree;
    std::cout << j.dump(2) << '\n';
  } else if (agree) {
    std::cout << ((hes ? hes->member : *oracle) ? "true" : "false") << '\n';
  } else {
    std::cout << "disagree: hes=" << (hes->member ? "true" : "false") << " oracle=" << (*oracle ? "true" : "false")
              << '\n';
  }
  if (!agree) std::cerr << "equation system and oracle disagree\n";
  return agree ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hestrace: trace semantics of parity automata via hierarchical equation systems"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "JSON output");

  std::string file, aut_path, tree_path, state, lasso, decorated, config_path;
  bool use_oracle = false, use_both = false;
  std::size_t max_len = 5, trials = 500;
  std::uint64_t seed = 0;
  unsigned grade_arg = 1, max_priority = 0;

  auto* solve_cmd = app.add_subcommand("solve-hes", "solve a standalone equation system");
  solve_cmd->add_option("file", file, "equation system file")->required();

  auto add_engine = [&](CLI::App* c) {
    auto* o = c->add_flag("--oracle", use_oracle, "use the graph/game oracle instead of the equation system");
    auto* b = c->add_flag("--both", use_both, "run both and fail on disagreement");
    o->excludes(b);
  };

  auto* member_cmd = app.add_subcommand("member", "lasso membership in the parity trace semantics");
  member_cmd->add_option("automaton", aut_path)->required();
  member_cmd->add_option("--state", state)->required();
  member_cmd->add_option("--lasso", lasso, "u;v")->required();
  add_engine(member_cmd);

  auto* dtr_cmd = app.add_subcommand("dtr-member", "decorated trace membership");
  dtr_cmd->add_option("automaton", aut_path)->required();
  dtr_cmd->add_option("--state", state)->required();
  dtr_cmd->add_option("--decorated", decorated, "decorated lasso, or a decorated tree file")->required();

  auto* tree_cmd = app.add_subcommand("tree-member", "regular tree membership");
  tree_cmd->add_option("automaton", aut_path)->required();
  tree_cmd->add_option("tree", tree_path)->required();
  tree_cmd->add_option("--state", state)->required();
  add_engine(tree_cmd);

  auto* witness_cmd = app.add_subcommand("witness", "decorated witness for an accepted input, or none");
  witness_cmd->add_option("automaton", aut_path)->required();
  witness_cmd->add_option("--state", state)->required();
  auto* wl = witness_cmd->add_option("--lasso", lasso, "u;v");
  auto* wt = witness_cmd->add_option("--tree", tree_path, "regular tree file");
  wl->excludes(wt);

  auto* finite_cmd = app.add_subcommand("finite-traces", "accepted finite words up to a length");
  finite_cmd->add_option("automaton", aut_path)->required();
  finite_cmd->add_option("--state", state)->required();
  finite_cmd->add_option("--max-len", max_len)->check(CLI::Range(std::size_t{0}, oracle::kMaxFiniteTraceLength));
  add_engine(finite_cmd);

  auto* det_cmd = app.add_subcommand("det-run", "decorated behavior of a deterministic automaton");
  det_cmd->add_option("automaton", aut_path)->required();
  det_cmd->add_option("--state", state)->required();

  auto* flatten_cmd = app.add_subcommand("flatten", "drop decorations");
  flatten_cmd->add_option("input", decorated, "decorated lasso, or a decorated tree file")->required();

  auto* check_cmd = app.add_subcommand("check-decorated", "check the decorated-trace invariant");
  check_cmd->add_option("input", decorated, "decorated lasso, or a decorated tree file")->required();
  check_cmd->add_option("--grade", grade_arg)->required()->check(CLI::PositiveNumber);
  check_cmd->add_option("--max-priority", max_priority, "also bound priorities by this even value");

  auto* fuzz_cmd = app.add_subcommand("fuzz", "randomized differential campaign");
  fuzz_cmd->add_option("--seed", seed);
  fuzz_cmd->add_option("--trials", trials);
  fuzz_cmd->add_option("--config", config_path, "JSON campaign configuration")->check(CLI::ExistingFile);

  auto* pinned_cmd = app.add_subcommand("pinned", "pinned regression suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const Engine engine = engine_of(use_oracle, use_both);

    if (*solve_cmd) {
      auto h = parse_hes(read_file(file));
      auto sol = solve(h.system);
      if (json) {
        std::cout << solution_json(h, sol).dump(2) << '\n';
      } else {
        for (std::size_t k = 0; k < h.system.size(); ++k)
          std::cout << h.system.equation(k).variable << " = " << h.format(sol.values[k]) << '\n';
      }
      return 0;
    }

    if (*member_cmd) {
      auto aut = load_automaton<ParityWordAutomaton>(aut_path);
      auto x = state_of(aut.states, state);
      auto w = parse_lasso(lasso);
      std::optional<MembershipVerdict> h;
      std::optional<bool> o;
      if (engine != Engine::oracle) h = parity_trace_membership(aut, x, w);
      if (engine != Engine::hes) o = oracle::lasso_acceptance(aut, x, w).accepted;
      return report_membership(json, engine, h, o);
    }

    if (*tree_cmd) {
      auto aut = load_automaton<ParityTreeAutomaton>(aut_path);
      auto x = state_of(aut.states, state);
      auto t = parse_regular_tree(read_file(tree_path));
      std::optional<MembershipVerdict> h;
      std::optional<bool> o;
      if (engine != Engine::oracle) h = tree_language_membership(aut, x, t);
      if (engine != Engine::hes) o = oracle::tree_membership_oracle(aut, x, t).accepted;
      return report_membership(json, engine, h, o);
    }

    if (*dtr_cmd) {
      auto xi = load_decorated(decorated);
      MembershipVerdict v;
      if (auto* l = std::get_if<DecoratedLassoWord>(&xi)) {
        auto aut = load_automaton<ParityWordAutomaton>(aut_path);
        v = decorated_trace_membership(aut, state_of(aut.states, state), *l);
      } else {
        auto aut = load_automaton<ParityTreeAutomaton>(aut_path);
        v = decorated_trace_membership(aut, state_of(aut.states, state), std::get<DecoratedRegularTree>(xi));
      }
      if (json)
        std::cout << to_json(v).dump(2) << '\n';
      else
        std::cout << (v.member ? "true" : "false") << '\n';
      return 0;
    }

    if (*witness_cmd) {
      if (lasso.empty() == tree_path.empty()) throw UsageError("witness needs exactly one of --lasso or --tree");
      FlatteningVerdict v;
      if (!lasso.empty()) {
        auto aut = load_automaton<ParityWordAutomaton>(aut_path);
        v = flattening_theorem_check(aut, state_of(aut.states, state), parse_lasso(lasso));
      } else {
        auto aut = load_automaton<ParityTreeAutomaton>(aut_path);
        v = flattening_theorem_check(aut, state_of(aut.states, state), parse_regular_tree(read_file(tree_path)));
      }
      if (json)
        std::cout << to_json(v).dump(2) << '\n';
      else if (v.witness)
        print_text(witness_text(*v.witness));
      else
        std::cout << "none\n";
      if (!v.agree()) {
        std::cerr << "ordinary membership is " << (v.left ? "true" : "false") << " but the witness side is "
                  << (v.right ? "true" : "false") << (v.note.empty() ? "" : ": " + v.note) << '\n';
        return 1;
      }
      return 0;
    }

    if (*finite_cmd) {
      auto aut = load_automaton<ParityWordAutomaton>(aut_path);
      auto x = state_of(aut.states, state);
      std::set<std::vector<std::string>> words;
      bool agree = true;
      if (engine != Engine::oracle) words = finite_trace_enum(aut, x, max_len);
      if (engine != Engine::hes) {
        auto o = oracle::finite_run_enumeration(aut, x, max_len);
        agree = engine == Engine::oracle || o == words;
        if (engine == Engine::oracle) words = std::move(o);
      }
      if (json) {
        nlohmann::json j{{"schema_version", kSchemaVersion}, {"max_len", max_len}, {"words", words}};
        if (engine == Engine::both) j["agree"] = agree;
        std::cout << j.dump(2) << '\n';
      } else {
        for (const auto& w : words) std::cout << word_text(w) << '\n';
      }
      if (!agree) {
        std::cerr << "equation system and path enumeration disagree\n";
        return 1;
      }
      return 0;
    }

    if (*det_cmd) {
      auto aut = load_automaton<DeterministicExceptionAutomaton>(aut_path);
      auto b = det_exception_behavior(aut, state_of(aut.states, state));
      if (json)
        std::cout << to_json(b).dump(2) << '\n';
      else if (b.bottom())
        std::cout << "bottom\n";
      else
        print_text(witness_text(*b.value));
      if (b.bottom()) std::cerr << b.reason << '\n';
      return 0;
    }

    if (*flatten_cmd) {
      auto xi = load_decorated(decorated);
      if (auto* l = std::get_if<DecoratedLassoWord>(&xi)) {
        auto w = flatten_word(*l);
        if (json)
          std::cout << nlohmann::json{{"schema_version", kSchemaVersion}, {"lasso", to_json(w)}}.dump(2) << '\n';
        else
          std::cout << to_text(w) << '\n';
      } else {
        auto t = delst(std::get<DecoratedRegularTree>(xi));
        if (json)
          std::cout << nlohmann::json{{"schema_version", kSchemaVersion}, {"tree", to_json(t)}}.dump(2) << '\n';
        else
          print_text(to_text(t));
      }
      return 0;
    }

    if (*check_cmd) {
      auto xi = load_decorated(decorated);
      auto v = std::visit([&](const auto& d) { return check_decorated_invariant(d, grade_arg, max_priority); }, xi);
      if (json) {
        nlohmann::json j{{"schema_version", kSchemaVersion}, {"verdict", v.ok}};
        if (!v.ok) j["reason"] = v.reason;
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << (v.ok ? "true" : "false") << '\n';
      }
      if (!v.ok) std::cerr << v.reason << '\n';
      return 0;
    }

    if (*fuzz_cmd) {
      harness::CampaignConfig cfg;
      if (!config_path.empty()) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(read_file(config_path));
        } catch (const nlohmann::json::parse_error& e) {
          throw UsageError(config_path + ": " + e.what());
        }
        cfg = harness::config_from_json(j);
      }
      auto r = harness::campaign(cfg, seed, trials);
      if (json)
        std::cout << harness::to_json(r).dump(2) << '\n';
      else
        std::cout << harness::summary(r);
      return r.ok() ? 0 : 1;
    }

    if (*pinned_cmd) {
      auto r = harness::pinned_suite();
      if (json)
        std::cout << harness::to_json(r).dump(2) << '\n';
      else
        std::cout << harness::summary(r);
      return r.ok() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
