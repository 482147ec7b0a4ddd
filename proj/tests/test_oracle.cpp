#include <catch_amalgamated.hpp>

#include <random>

#include "hestrace/hestrace.hpp"
#include "support.hpp"

using namespace hestrace;
using oracle::Player;

namespace {

ParityWordAutomaton intro() { return parse_as<ParityWordAutomaton>(harness::kIntroAutomaton); }
ParityWordAutomaton appendix() { return parse_as<ParityWordAutomaton>(harness::kAppendixAutomaton); }

oracle::ParityGame self_loop(Player p, unsigned priority) {
  oracle::ParityGame g;
  g.add_vertex(p, priority);
  g.add_edge(0, 0);
  return g;
}

}  // namespace

TEST_CASE("lasso_acceptance on the worked automata") {
  auto v = oracle::lasso_acceptance(intro(), 0, parse_lasso(";ba"));
  CHECK(v.accepted);
  REQUIRE(v.run);
  // x, y, x, y, ...
  for (std::size_t i = 0; i < 8; ++i) CHECK(v.run->at(i).state == (i % 2 == 0 ? 0u : 1u));
  auto no = oracle::lasso_acceptance(intro(), 0, parse_lasso("b;a"));
  CHECK_FALSE(no.accepted);
  CHECK_FALSE(no.run);
  CHECK_FALSE(oracle::lasso_acceptance(appendix(), 0, parse_lasso(";bc")).accepted);
  CHECK(oracle::lasso_acceptance(appendix(), 0, parse_lasso("bcc;b")).accepted);
  CHECK_THROWS_AS(oracle::lasso_acceptance(intro(), 0, parse_lasso(";c")), AlphabetMismatch);
  CHECK_THROWS_AS(oracle::lasso_acceptance(intro(), 5, parse_lasso(";a")), ValidationError);
}

TEST_CASE("lasso_acceptance agrees with cycle enumeration") {
  int positive = 0, negative = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto a = random_word_automaton({1 + seed % 4, 2, 4, 0.4, 0}, seed);
    for (const auto& w : harness::all_lassos(a.alphabet, 2, 2)) {
      if (a.num_states() * w.length() > 64) continue;
      for (StateId x = 0; x < a.num_states(); ++x) {
        auto v = oracle::lasso_acceptance(a, x, w);
        REQUIRE(v.accepted == support::accepts_by_cycles(a, x, w));
        if (v.accepted) {
          ++positive;
          auto d = decorate_run(*v.run, a.priority);
          CHECK(check_decorated_invariant(d, a.priority[x]));
          CHECK(same_sequence(run_word(*v.run), w));
          CHECK(v.run->at(0).state == x);
          // Consecutive steps follow transitions.
          for (std::size_t i = 0; i < v.run->length() + 2; ++i) {
            auto from = v.run->at(i), to = v.run->at(i + 1);
            WordTransition t{from.state, *index_of(a.alphabet, from.symbol), to.state};
            CHECK(std::find(a.transitions.begin(), a.transitions.end(), t) != a.transitions.end());
          }
        } else {
          ++negative;
        }
      }
    }
  }
  CHECK(positive > 100);
  CHECK(negative > 100);
}

TEST_CASE("zielonka trivial games") {
  auto w = oracle::zielonka_solve(self_loop(Player::exists, 2));
  CHECK(w.winner[0] == Player::exists);
  CHECK(w.strategy[0] == std::optional<std::size_t>{0});
  CHECK(oracle::zielonka_solve(self_loop(Player::exists, 1)).winner[0] == Player::forall);
  CHECK(oracle::zielonka_solve(self_loop(Player::forall, 4)).winner[0] == Player::exists);
  oracle::ParityGame dead;
  dead.add_vertex(Player::exists, 2);
  dead.add_vertex(Player::forall, 1);
  CHECK(oracle::zielonka_solve(dead).winner == std::vector<Player>{Player::forall, Player::exists});
  CHECK(oracle::zielonka_solve(oracle::ParityGame{}).winner.empty());
}

TEST_CASE("zielonka agrees with strategy enumeration") {
  std::mt19937_64 rng(31);
  int exists_wins = 0, forall_wins = 0;
  for (int k = 0; k < 200; ++k) {
    auto g = support::random_game(rng, 8, 4);
    auto sol = oracle::zielonka_solve(g);
    REQUIRE(sol.winner == support::exhaustive_winners(g));
    CHECK(oracle::verify_exists_strategy(g, sol));
    for (std::size_t v = 0; v < g.size(); ++v) {
      (sol.winner[v] == Player::exists ? exists_wins : forall_wins)++;
      if (sol.winner[v] == Player::exists && g.owner[v] == Player::exists) {
        REQUIRE(sol.strategy[v]);
        CHECK(std::find(g.succ[v].begin(), g.succ[v].end(), *sol.strategy[v]) != g.succ[v].end());
        CHECK(sol.winner[*sol.strategy[v]] == Player::exists);
      }
    }
  }
  CHECK(exists_wins > 50);
  CHECK(forall_wins > 50);
}

TEST_CASE("verify_exists_strategy rejects bad strategies") {
  oracle::ParityGame g;
  g.add_vertex(Player::exists, 2);
  g.add_vertex(Player::exists, 1);
  g.add_edge(0, 0);
  g.add_edge(0, 1);
  g.add_edge(1, 1);
  auto sol = oracle::zielonka_solve(g);
  REQUIRE(sol.winner[0] == Player::exists);
  CHECK(oracle::verify_exists_strategy(g, sol));
  auto bad = sol;
  bad.strategy[0] = 1;
  bad.winner[1] = Player::exists;
  bad.strategy[1] = 1;
  CHECK_FALSE(oracle::verify_exists_strategy(g, bad));
}

TEST_CASE("tree oracle") {
  auto nullary = parse_as<ParityTreeAutomaton>(
      "tree-parity\nranked-alphabet: f/1 c/0\nstates: q r\npriorities: q:1 r:2\ntrans: q -> c;\n");
  auto c = parse_regular_tree("regular-tree\nroot: n\nnode n = c;\n");
  CHECK(oracle::tree_membership_oracle(nullary, 0, c).accepted);
  CHECK_FALSE(oracle::tree_membership_oracle(nullary, 1, c).accepted);

  auto loop = parse_regular_tree("regular-tree\nroot: n\nnode n = f(n);\n");
  auto unary = parse_as<ParityTreeAutomaton>(
      "tree-parity\nranked-alphabet: f/1\nstates: q r\npriorities: q:2 r:1\ntrans: q -> f(q); r -> f(r);\n");
  auto v = oracle::tree_membership_oracle(unary, 0, loop);
  CHECK(v.accepted);
  REQUIRE(v.run);
  CHECK(v.run->size() == 1);
  CHECK(v.run->nodes[0].label.state == 0);
  CHECK_FALSE(oracle::tree_membership_oracle(unary, 1, loop).accepted);

  // Both branches of f(c, loop) must be accepted.
  auto stream = parse_as<ParityTreeAutomaton>(
      "tree-parity\nranked-alphabet: f/2 c/0\nstates: q r\npriorities: q:2 r:1\ntrans: q -> f(q, r); r -> c;\n");
  CHECK(oracle::tree_membership_oracle(stream, 0,
                                       parse_regular_tree("regular-tree\nroot: a\nnode a = f(a, b);\nnode b = c;\n"))
            .accepted);
  CHECK_FALSE(oracle::tree_membership_oracle(
                  stream, 0, parse_regular_tree("regular-tree\nroot: a\nnode a = f(b, a);\nnode b = c;\n"))
                  .accepted);
  CHECK_THROWS_AS(oracle::tree_membership_oracle(stream, 0, loop), AlphabetMismatch);
}

TEST_CASE("finite run enumeration") {
  auto a = parse_as<ParityWordAutomaton>(
      "word-parity\nalphabet: a b\nstates: p q\npriorities: p:2 q:2\nfinal: p\ntrans: p a q; q b p;\n");
  using W = std::vector<std::string>;
  CHECK(oracle::finite_run_enumeration(a, 0, 4) == std::set<W>{{}, {"a", "b"}, {"a", "b", "a", "b"}});
  CHECK(oracle::finite_run_enumeration(a, 1, 3) == std::set<W>{{"b"}, {"b", "a", "b"}});
  CHECK(oracle::finite_run_enumeration(intro(), 0, 5).empty());
  CHECK_THROWS_AS(oracle::finite_run_enumeration(a, 0, oracle::kMaxFiniteTraceLength + 1), Error);
  std::mt19937_64 rng(12);
  for (int k = 0; k < 100; ++k) {
    auto r = support::random_final_automaton(rng, 1 + k % 4, 2);
    for (StateId x = 0; x < r.num_states(); ++x)
      CHECK(oracle::finite_run_enumeration(r, x, 5) == support::finite_words(r, x, 5));
  }
}
