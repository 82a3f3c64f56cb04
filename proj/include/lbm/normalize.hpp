#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lbm/clause.hpp"
#include "lbm/formula.hpp"

namespace lbm {

struct NormalizeOptions {
  // Full DNF is exponential in the number of disjuncts; conversions throw
  // GuardError rather than exceed this many clauses.
  std::size_t max_clauses = std::size_t{1} << 20;
};

// Truth-table-equivalent DNF (not necessarily strict). Contradictory clauses
// are dropped and counted, duplicates removed, output in canonical order.
ClauseSet to_dnf(const Formula& f, int var_count, NormalizeOptions opt = {});

// Strict DNF: at most one clause true under any assignment. Rule-shaped
// formulas (literal head, conjunctive body) take the |S_T|+|S_K|+1-clause
// implication route; otherwise overlapping clause groups of the DNF are
// expanded to full DNF over the group's variables.
ClauseSet to_sdnf(const Formula& f, int var_count, NormalizeOptions opt = {});

// Rewrites the disjunctive clause l1 | l2 | ... | ln into the strict set
//   {l1}, {~l1 l2}, {~l1 ~l2 l3}, ...
// eliminating literals left-to-right in the written order. Exactly n clauses
// for duplicate-free input, pairwise mutually exclusive.
ClauseSet eliminate_disjunction(std::span<const Literal> disjuncts, int var_count);

// SDNF of head <- (conjunction of body literals): the clause {head} u body
// followed by the elimination clauses of the negated body. Empty body
// degenerates to the unit clause {head}.
ClauseSet implication_sdnf(Literal head, std::span<const Literal> body,
                           int var_count);

// Flattens weighted clause sets into one weighted set: each clause inherits
// its source set's weight, identical clauses merge with summed weights, and a
// clause whose literals are a superset of another's is folded into the more
// general clause (syntactic subsumption, summed weights).
WeightedClauseSet merge_weighted(
    std::span<const std::pair<double, ClauseSet>> sets);

}  // namespace lbm
