#include <catch_amalgamated.hpp>

#include <random>

#include "hestrace/hestrace.hpp"
#include "support.hpp"

using namespace hestrace;

namespace {

ParityWordAutomaton intro() { return parse_as<ParityWordAutomaton>(harness::kIntroAutomaton); }
ParityWordAutomaton appendix() { return parse_as<ParityWordAutomaton>(harness::kAppendixAutomaton); }

BuchiWordAutomaton intro_buchi() {
  return {{"x", "y"}, {"a", "b"}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 0}, {1, 1, 1}}, {false, true}, {}};
}

bool member(const ParityWordAutomaton& a, StateId x, const char* w) {
  return parity_trace_membership(a, x, parse_lasso(w)).member;
}

BitSet random_bits(std::mt19937_64& rng, std::size_t width) {
  BitSet s(width);
  for (std::size_t i = 0; i < width; ++i)
    if (rng() % 2) s.set(i);
  return s;
}

}  // namespace

TEST_CASE("restricted system shape") {
  auto r = build_restricted_hes(intro(), parse_lasso(";ba"));
  REQUIRE(r.system.size() == 2);
  CHECK(r.positions == 2);
  CHECK(r.system.equation(0).sign == Sign::mu);
  CHECK(r.system.equation(1).sign == Sign::nu);
  CHECK(r.system.equation(0).lattice.size() == 4);  // {x} -> P(2 positions)
  CHECK(r.system.equation(1).lattice.size() == 4);

  auto s = build_restricted_hes(appendix(), parse_lasso("a;b"));
  REQUIRE(s.system.size() == 4);
  CHECK(s.system.equation(3).lattice.size() == 1);
  CHECK(s.system.equation(2).sign == Sign::mu);
  CHECK(s.system.equation(3).sign == Sign::nu);

  auto d = build_restricted_hes(intro(), parse_decorated_lasso("b:1;a:2,b:1"));
  for (std::size_t i = 0; i < d.system.size(); ++i) CHECK(d.system.equation(i).sign == Sign::nu);
  CHECK_THROWS_AS(build_restricted_hes(intro(), parse_lasso(";c")), AlphabetMismatch);
}

TEST_CASE("decorated bodies are below ordinary bodies") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto a = random_word_automaton({3, 2, 4, 0.5, 0}, seed);
    DecoratedLassoWord xi;
    for (std::size_t i = rng() % 3; i > 0; --i) xi.stem.push_back({rng() % 2 ? "a" : "b", 1 + unsigned(rng() % 4)});
    for (std::size_t i = 1 + rng() % 2; i > 0; --i) xi.cycle.push_back({rng() % 2 ? "a" : "b", 1 + unsigned(rng() % 4)});
    auto dec = build_restricted_hes(a, xi);
    auto ord = build_restricted_hes(a, flatten_word(xi));
    REQUIRE(dec.system.size() == ord.system.size());
    for (int sample = 0; sample < 20; ++sample) {
      std::vector<BitSet> env;
      for (std::size_t i = 0; i < ord.system.size(); ++i)
        env.push_back(random_bits(rng, ord.system.equation(i).lattice.top().width()));
      for (std::size_t i = 0; i < ord.system.size(); ++i) {
        auto lo = dec.system.equation(i).body(env);
        auto hi = ord.system.equation(i).body(env);
        CHECK(lo.is_subset_of(hi));
      }
    }
  }
}

TEST_CASE("equation bodies are monotone") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto a = random_word_automaton({3, 2, 4, 0.5, 0}, seed);
    auto r = build_restricted_hes(a, parse_lasso("ab;ba"));
    std::mt19937_64 rng(seed);
    for (int sample = 0; sample < 30; ++sample) {
      std::vector<BitSet> lo, hi;
      for (std::size_t i = 0; i < r.system.size(); ++i) {
        auto w = r.system.equation(i).lattice.top().width();
        lo.push_back(random_bits(rng, w));
        hi.push_back(lo.back() | random_bits(rng, w));
      }
      for (std::size_t i = 0; i < r.system.size(); ++i)
        CHECK(r.system.equation(i).body(lo).is_subset_of(r.system.equation(i).body(hi)));
    }
  }
}

TEST_CASE("parity membership on the worked automata") {
  CHECK(member(intro(), 0, ";ba"));
  CHECK_FALSE(member(intro(), 0, "b;a"));
  CHECK(member(appendix(), 0, ";b"));
  CHECK_FALSE(member(appendix(), 0, ";bc"));
  CHECK(buchi_trace_membership(intro_buchi(), 0, parse_lasso(";ba")).member);
  CHECK_FALSE(buchi_trace_membership(intro_buchi(), 0, parse_lasso("b;a")).member);
  auto v = parity_trace_membership(intro(), 0, parse_lasso(";ba"));
  CHECK(v.stats.size() == 2);
  CHECK_THROWS_AS(parity_trace_membership(intro(), 2, parse_lasso(";a")), ValidationError);
}

TEST_CASE("parity membership agrees with the oracle") {
  std::mt19937_64 rng(77);
  int yes = 0, no = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = random_word_automaton({1 + seed % 4, 2, 2 + unsigned(seed % 5), 0.45, 0}, seed);
    for (int k = 0; k < 5; ++k) {
      auto w = harness::random_lasso(rng, a.alphabet, 2, 3);
      for (StateId x = 0; x < a.num_states(); ++x) {
        bool m = parity_trace_membership(a, x, w).member;
        REQUIRE(m == oracle::lasso_acceptance(a, x, w).accepted);
        CHECK(m == support::accepts_by_cycles(a, x, w));
        CHECK(m == parity_trace_membership(a, x, normalize(w)).member);
        CHECK(m == parity_trace_membership(a, x, unroll(w, 2)).member);
        if (m) CHECK(infinitary_trace_membership(a, x, w));
        (m ? yes : no)++;
      }
    }
  }
  CHECK(yes > 100);
  CHECK(no > 100);
}

TEST_CASE("buchi membership agrees with parity membership") {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto p = random_word_automaton({1 + seed % 3, 2, 2, 0.5, 0}, seed);
    auto b = parity_to_buchi(p);
    auto w = harness::random_lasso(rng, p.alphabet, 2, 3);
    for (StateId x = 0; x < p.num_states(); ++x)
      CHECK(buchi_trace_membership(b, x, w).member == parity_trace_membership(buchi_to_parity(b), x, w).member);
  }
}

TEST_CASE("decorated membership") {
  auto a = intro();
  auto v = decorated_trace_membership(a, 0, parse_decorated_lasso("b:1;a:2,b:1"));
  CHECK(v.member);
  REQUIRE(v.witness);
  CHECK(decorated_trace_membership(a, 1, parse_decorated_lasso(";b:2")).member);
  // Right letters, wrong priorities: y is the only b-successor.
  CHECK_FALSE(decorated_trace_membership(a, 0, parse_decorated_lasso("a:1;b:2,a:1,a:1,b:2")).member);
  CHECK_FALSE(decorated_trace_membership(a, 0, parse_decorated_lasso("b:1;a:2,b:2")).member);
  CHECK_THROWS_AS(decorated_trace_membership(a, 0, parse_decorated_lasso(";b:2")), GradeMismatch);
  CHECK_THROWS_AS(decorated_trace_membership(a, 0, parse_decorated_lasso(";a:1")), ValidationError);
  CHECK_THROWS_AS(decorated_trace_membership(a, 1, parse_decorated_lasso(";c:2")), AlphabetMismatch);
}

TEST_CASE("decorated membership agrees with the realizability search") {
  std::mt19937_64 rng(41);
  int members = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto a = random_word_automaton({1 + seed % 3, 2, 4, 0.6, 0}, seed);
    DecoratedLassoWord xi;
    for (std::size_t i = rng() % 3; i > 0; --i)
      xi.stem.push_back({rng() % 2 ? "a" : "b", a.priority[rng() % a.num_states()]});
    for (std::size_t i = 1 + rng() % 2; i > 0; --i)
      xi.cycle.push_back({rng() % 2 ? "a" : "b", a.priority[rng() % a.num_states()]});
    for (StateId x = 0; x < a.num_states(); ++x) {
      if (grade(xi) != a.priority[x] || !check_decorated_invariant(xi, a.priority[x])) continue;
      bool m = decorated_trace_membership(a, x, xi).member;
      CHECK(m == oracle::decorated_lasso_realizable(a, x, xi));
      if (m) {
        ++members;
        CHECK(parity_trace_membership(a, x, flatten_word(xi)).member);
        CHECK(decorated_trace_membership(a, x, normalize(xi)).member);
      }
    }
  }
  CHECK(members > 20);
}

TEST_CASE("flattening check") {
  auto v = flattening_theorem_check(intro(), 0, parse_lasso(";ba"));
  CHECK(v.agree());
  CHECK(v.left);
  CHECK(v.right);
  REQUIRE(v.witness);
  CHECK(same_sequence(std::get<DecoratedLassoWord>(*v.witness), parse_decorated_lasso("b:1;a:2,b:1")));
  auto n = flattening_theorem_check(intro(), 0, parse_lasso("b;a"));
  CHECK(n.agree());
  CHECK_FALSE(n.left);
  CHECK_FALSE(n.witness);

  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = random_word_automaton({1 + seed % 4, 2, 4, 0.45, 0}, seed);
    auto w = harness::random_lasso(rng, a.alphabet, 2, 3);
    for (StateId x = 0; x < a.num_states(); ++x) {
      auto f = flattening_theorem_check(a, x, w);
      CHECK(f.agree());
      if (f.witness) {
        const auto& xi = std::get<DecoratedLassoWord>(*f.witness);
        CHECK(check_decorated_invariant(xi, a.priority[x]));
        CHECK(decorated_trace_membership(a, x, xi).member);
        CHECK(same_sequence(flatten_word(xi), w));
      }
    }
  }
}

TEST_CASE("tree membership") {
  auto c = parse_regular_tree("regular-tree\nroot: n\nnode n = c;\n");
  auto nullary = parse_as<ParityTreeAutomaton>(
      "tree-parity\nranked-alphabet: f/1 c/0\nstates: q\npriorities: q:1\ntrans: q -> c;\n");
  CHECK(tree_language_membership(nullary, 0, c).member);
  auto loop = parse_regular_tree("regular-tree\nroot: n\nnode n = f(n);\n");
  const char* f1 = "tree-parity\nranked-alphabet: f/1\nstates: q\npriorities: q:1\ntrans: q -> f(q);\n";
  const char* f2 = "tree-parity\nranked-alphabet: f/1\nstates: q\npriorities: q:2\ntrans: q -> f(q);\n";
  CHECK_FALSE(tree_language_membership(parse_as<ParityTreeAutomaton>(f1), 0, loop).member);
  CHECK(tree_language_membership(parse_as<ParityTreeAutomaton>(f2), 0, loop).member);
  CHECK_THROWS_AS(tree_language_membership(parse_as<ParityTreeAutomaton>(f2), 0, c), AlphabetMismatch);

  std::mt19937_64 rng(19);
  int yes = 0, no = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto a = random_tree_automaton({1 + seed % 3, 3, 2, 4, 0.4}, seed);
    auto t = harness::random_regular_tree(rng, a.alphabet, 4);
    for (StateId x = 0; x < a.num_states(); ++x) {
      bool m = tree_language_membership(a, x, t).member;
      REQUIRE(m == oracle::tree_membership_oracle(a, x, t).accepted);
      auto f = flattening_theorem_check(a, x, t);
      CHECK(f.agree());
      if (f.witness) {
        const auto& xi = std::get<DecoratedRegularTree>(*f.witness);
        CHECK(support::tree_branches_even(xi));
        CHECK(decorated_trace_membership(a, x, xi).member);
      }
      (m ? yes : no)++;
    }
  }
  CHECK(yes > 30);
  CHECK(no > 30);
}

TEST_CASE("decorated tree membership") {
  auto a = parse_as<ParityTreeAutomaton>(
      "tree-parity\nranked-alphabet: f/2 c/0\nstates: q r\npriorities: q:2 r:1\ntrans: q -> f(q, r); r -> c;\n");
  auto good = parse_decorated_tree("decorated-tree\nroot: n0\nnode n0 = f:2(n0, n1);\nnode n1 = c:1;\n");
  CHECK(decorated_trace_membership(a, 0, good).member);
  auto wrong = parse_decorated_tree("decorated-tree\nroot: n0\nnode n0 = f:2(n0, n1);\nnode n1 = c:2;\n");
  CHECK_FALSE(decorated_trace_membership(a, 0, wrong).member);
  CHECK_THROWS_AS(decorated_trace_membership(a, 1, good), GradeMismatch);
}

TEST_CASE("finite traces") {
  auto loop = parse_as<ParityWordAutomaton>("word-parity\nalphabet: a\nstates: x\npriorities: x:2\nfinal: x\ntrans: x a x;\n");
  using W = std::vector<std::string>;
  CHECK(finite_trace_enum(loop, 0, 3) == std::set<W>{{}, {"a"}, {"a", "a"}, {"a", "a", "a"}});
  CHECK(finite_trace_membership(loop, 0, {"a", "a"}));
  CHECK(finite_trace_enum(intro(), 0, 4).empty());
  CHECK_FALSE(finite_trace_membership(intro(), 0, {}));
  CHECK_THROWS_AS(finite_trace_enum(loop, 0, oracle::kMaxFiniteTraceLength + 1), Error);

  std::mt19937_64 rng(10);
  for (int k = 0; k < 100; ++k) {
    auto a = support::random_final_automaton(rng, 1 + k % 4, 2);
    for (StateId x = 0; x < a.num_states(); ++x) {
      auto got = finite_trace_enum(a, x, 5);
      REQUIRE(got == support::finite_words(a, x, 5));
      CHECK(got == oracle::finite_run_enumeration(a, x, 5));
      for (const auto& w : support::finite_words(a, x, 3)) CHECK(finite_trace_membership(a, x, w));
      CHECK(finite_trace_membership(a, x, {"a", "b", "a"}) == (got.count({"a", "b", "a"}) > 0));
    }
  }
}

TEST_CASE("infinitary traces") {
  CHECK(infinitary_trace_membership(intro(), 0, parse_lasso(";ba")));
  CHECK(infinitary_trace_membership(intro(), 0, parse_lasso("b;a")));
  auto dead = parse_as<ParityWordAutomaton>("word-parity\nalphabet: a\nstates: x\npriorities: x:2\ntrans:\n");
  CHECK_FALSE(infinitary_trace_membership(dead, 0, parse_lasso(";a")));
  CHECK_FALSE(infinitary_trace_membership(appendix(), 0, parse_lasso(";ac")));
  CHECK(infinitary_trace_membership(appendix(), 0, parse_lasso(";bc")));
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto a = random_word_automaton({3, 2, 4, 0.3, 0}, seed);
    auto w = harness::random_lasso(rng, a.alphabet, 2, 3);
    // With every priority raised to 2, runs are accepting exactly when they exist.
    auto all_even = a;
    for (auto& p : all_even.priority) p = 2;
    for (StateId x = 0; x < a.num_states(); ++x)
      CHECK(infinitary_trace_membership(a, x, w) == oracle::lasso_acceptance(all_even, x, w).accepted);
  }
}

TEST_CASE("deterministic automata with exceptions") {
  auto loop = parse_as<DeterministicExceptionAutomaton>("word-det-exc\nalphabet: a\nstates: x\npriorities: x:2\ntrans: x a x;\n");
  auto b = det_exception_behavior(loop, 0);
  REQUIRE_FALSE(b.bottom());
  CHECK(std::get<DecoratedLassoWord>(*b.value) == parse_decorated_lasso(";a:2"));

  auto exc = parse_as<DeterministicExceptionAutomaton>(
      "word-det-exc\nalphabet: a\nstates: x y\npriorities: x:2 y:2\ntrans: x a y;\n");
  auto e = det_exception_behavior(exc, 0);
  CHECK(e.bottom());
  CHECK_THAT(e.reason, Catch::Matchers::ContainsSubstring("exception"));

  auto odd = parse_as<DeterministicExceptionAutomaton>("word-det-exc\nalphabet: a\nstates: x\npriorities: x:1\ntrans: x a x;\n");
  auto o = det_exception_behavior(odd, 0);
  CHECK(o.bottom());
  CHECK_THAT(o.reason, Catch::Matchers::ContainsSubstring("odd"));

  auto tree = parse_as<DeterministicExceptionAutomaton>(
      "tree-det-exc\nranked-alphabet: g/2 e/0\nstates: s t\npriorities: s:2 t:1\ntrans: s -> g(s, t); t -> e;\n");
  auto tb = det_exception_behavior(tree, 0);
  REQUIRE_FALSE(tb.bottom());
  const auto& d = std::get<DecoratedRegularTree>(*tb.value);
  CHECK(d.size() == 2);
  CHECK(check_decorated_invariant(d, 2));
  CHECK(to_json(tb)["bottom"] == false);
  CHECK(to_json(e)["reason"].is_string());
}

TEST_CASE("deterministic behavior matches the decorated semantics") {
  int values = 0, bottoms = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto d = random_det_automaton({seed % 2 == 0, 3, 2, 2, 4, 0.15}, seed);
    for (StateId x = 0; x < d.num_states(); ++x) {
      auto b = det_exception_behavior(d, x);
      if (b.bottom()) {
        ++bottoms;
        continue;
      }
      ++values;
      ParityTreeAutomaton t;
      t.states = d.states;
      t.alphabet = d.alphabet;
      t.priority = d.priority;
      t.max_priority = d.max_priority;
      for (const auto& tr : d.delta)
        if (tr) t.transitions.push_back(*tr);
      if (d.word) {
        const auto& xi = std::get<DecoratedLassoWord>(*b.value);
        CHECK(check_decorated_invariant(xi, d.priority[x]));
        ParityWordAutomaton w;
        w.states = d.states;
        w.alphabet = d.alphabet.symbols;
        w.priority = d.priority;
        w.max_priority = d.max_priority;
        for (const auto& tr : t.transitions) w.transitions.push_back({tr.from, tr.symbol, tr.children[0]});
        CHECK(decorated_trace_membership(w, x, xi).member);
      } else {
        const auto& xi = std::get<DecoratedRegularTree>(*b.value);
        CHECK(support::tree_branches_even(xi));
        CHECK(decorated_trace_membership(t, x, xi).member);
      }
    }
  }
  CHECK(values > 50);
  CHECK(bottoms > 50);
}

TEST_CASE("verdict JSON") {
  auto j = to_json(parity_trace_membership(intro(), 0, parse_lasso(";ba")));
  CHECK(j["schema_version"] == 1);
  CHECK(j["verdict"] == true);
  CHECK(j["iterations"].size() == 2);
  auto f = to_json(flattening_theorem_check(intro(), 0, parse_lasso(";ba")));
  CHECK(f["agree"] == true);
  CHECK(f["witness"]["cycle"].is_array());
}

TEST_CASE("flipped signs change verdicts") {
  TraceOptions flip;
  flip.flip_signs = true;
  CHECK(parity_trace_membership(intro(), 0, parse_lasso("b;a"), flip).member);
}
