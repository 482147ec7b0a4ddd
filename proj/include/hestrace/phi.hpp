#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hestrace/bitset.hpp"
#include "hestrace/error.hpp"
#include "hestrace/hes.hpp"
#include "hestrace/lattice.hpp"

namespace hestrace {

/// One element of c(x): read `symbol`, continue in `targets` (one per child).
struct Move {
  std::size_t symbol = 0;
  std::vector<std::size_t> targets;
  friend bool operator==(const Move&, const Move&) = default;
};

/// Relational encoding of the coalgebra c: X -> P(F X). Optional per-state priorities are
/// consulted only when the sigma part is decorated.
struct CPart {
  std::vector<std::vector<Move>> moves;
  std::vector<unsigned> priorities;
};

/// What the input destructor yields at a position: its symbol and successor positions.
struct Step {
  std::size_t symbol = 0;
  std::vector<std::size_t> successors;
};

/// Relational encoding of the inverse destructor over a finite set of input positions.
/// Non-empty `decorations` make it a decorated input (one priority per position).
struct SigmaPart {
  std::vector<Step> steps;
  std::vector<unsigned> decorations;

  std::size_t positions() const noexcept { return steps.size(); }
  bool decorated() const noexcept { return !decorations.empty(); }
};

/// Assignment of states to equations: state s is element local_index[s] of the domain of
/// equation equation_of[s].
struct StateLayout {
  std::vector<std::size_t> equation_of;
  std::vector<std::size_t> local_index;
  std::vector<std::vector<std::size_t>> states_of;

  static StateLayout single_block(std::size_t states) {
    StateLayout l;
    l.states_of.resize(1);
    for (std::size_t s = 0; s < states; ++s) {
      l.equation_of.push_back(0);
      l.local_index.push_back(s);
      l.states_of[0].push_back(s);
    }
    return l;
  }

  /// Block k holds the states with priority k+1, for k in [0, blocks).
  static StateLayout by_priority(const std::vector<unsigned>& priorities, std::size_t blocks) {
    StateLayout l;
    l.states_of.resize(blocks);
    for (std::size_t s = 0; s < priorities.size(); ++s) {
      auto k = static_cast<std::size_t>(priorities[s]) - 1;
      if (priorities[s] == 0 || k >= blocks) throw DimensionMismatch("priority outside the layout");
      l.equation_of.push_back(k);
      l.local_index.push_back(l.states_of[k].size());
      l.states_of[k].push_back(s);
    }
    return l;
  }
};

namespace detail {

// Position p belongs to the image of x iff some alternative has all of its
// (equation, bit) requirements present in the current assignment.
struct CompiledPhi {
  struct Requirement {
    std::size_t equation;
    std::size_t bit;
  };
  std::size_t width = 0;
  std::vector<std::size_t> alt_begin;  // per output bit, index into alternatives; size width+1
  std::vector<std::size_t> req_begin;  // per alternative, index into requirements; size alts+1
  std::vector<Requirement> requirements;

  BitSet evaluate(std::span<const BitSet> assignment) const {
    BitSet out(width);
    for (std::size_t b = 0; b < width; ++b) {
      for (std::size_t a = alt_begin[b]; a < alt_begin[b + 1]; ++a) {
        bool all = true;
        for (std::size_t r = req_begin[a]; r < req_begin[a + 1]; ++r) {
          const auto& q = requirements[r];
          if (!assignment[q.equation].test(q.bit)) {
            all = false;
            break;
          }
        }
        if (all) {
          out.set(b);
          break;
        }
      }
    }
    return out;
  }
};

}  // namespace detail

/// Builds the body f |-> sigma . F(f) . c for equation `equation` of a system whose
/// variables are laid out by `layout`, over the lattices state-block -> P(positions).
inline Equation<PointwisePowersetLattice>::Body make_phi_body(const CPart& c, const SigmaPart& sigma,
                                                               const StateLayout& layout, std::size_t equation) {
  const std::size_t states = c.moves.size();
  const std::size_t positions = sigma.positions();
  if (layout.equation_of.size() != states || layout.local_index.size() != states)
    throw DimensionMismatch("layout covers " + std::to_string(layout.equation_of.size()) + " states, c-part has " +
                            std::to_string(states));
  if (equation >= layout.states_of.size()) throw DimensionMismatch("equation index outside the layout");
  if (sigma.decorated() && sigma.decorations.size() != positions)
    throw DimensionMismatch("sigma decorations do not cover every position");
  if (sigma.decorated() && c.priorities.size() != states)
    throw DimensionMismatch("decorated sigma needs a priority for every state");
  for (const auto& step : sigma.steps)
    for (auto q : step.successors)
      if (q >= positions) throw DimensionMismatch("successor position out of range");
  for (const auto& ms : c.moves)
    for (const auto& m : ms)
      for (auto t : m.targets)
        if (t >= states) throw DimensionMismatch("move target out of range");

  auto compiled = std::make_shared<detail::CompiledPhi>();
  const auto& block = layout.states_of[equation];
  compiled->width = block.size() * positions;
  compiled->alt_begin.push_back(0);
  compiled->req_begin.push_back(0);
  for (std::size_t local = 0; local < block.size(); ++local) {
    const std::size_t x = block[local];
    for (std::size_t p = 0; p < positions; ++p) {
      const auto& step = sigma.steps[p];
      bool root_ok = !sigma.decorated() || c.priorities[x] == sigma.decorations[p];
      if (root_ok) {
        for (const auto& m : c.moves[x]) {
          if (m.symbol != step.symbol || m.targets.size() != step.successors.size()) continue;
          bool ok = true;
          std::vector<detail::CompiledPhi::Requirement> reqs;
          for (std::size_t k = 0; k < m.targets.size(); ++k) {
            auto y = m.targets[k];
            auto q = step.successors[k];
            if (sigma.decorated() && c.priorities[y] != sigma.decorations[q]) {
              ok = false;
              break;
            }
            reqs.push_back({layout.equation_of[y], layout.local_index[y] * positions + q});
          }
          if (!ok) continue;
          compiled->requirements.insert(compiled->requirements.end(), reqs.begin(), reqs.end());
          compiled->req_begin.push_back(compiled->requirements.size());
        }
      }
      compiled->alt_begin.push_back(compiled->req_begin.size() - 1);
    }
  }
  return [compiled](std::span<const BitSet> assignment) { return compiled->evaluate(assignment); };
}

}  // namespace hestrace
