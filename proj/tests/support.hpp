#pragma once

// Shared test fixtures: a random formula generator, an independently coded
// second evaluator (stack machine, no recursion) used as the oracle's
// cross-check, and the worked XOR model in the fixed clause order used by the
// energy examples.

#include <cstdint>
#include <string>
#include <vector>

#include "lbm/clause.hpp"
#include "lbm/formula.hpp"
#include "lbm/normalize.hpp"
#include "lbm/rbm.hpp"
#include "lbm/rng.hpp"

namespace testsupport {

inline lbm::VarTable make_vars(int n, const std::string& prefix = "v") {
  lbm::VarTable vt;
  for (int i = 0; i < n; ++i) vt.intern(prefix + std::to_string(i));
  return vt;
}

inline lbm::Formula random_formula(lbm::Rng& rng, lbm::VarTable& vars, int depth) {
  auto rand_var = [&] {
    int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(vars.size())));
    return lbm::Formula::var(i, vars.name(i));
  };
  if (depth <= 0) return rand_var();
  std::uint64_t k = rng.below(100);
  if (k < 30) return rand_var();
  if (k < 45) return lbm::Formula::negation(random_formula(rng, vars, depth - 1));
  if (k < 65 || k < 85) {
    std::vector<lbm::Formula> children;
    int arity = 2 + static_cast<int>(rng.below(2));
    for (int i = 0; i < arity; ++i)
      children.push_back(random_formula(rng, vars, depth - 1));
    return k < 65 ? lbm::Formula::conjunction(std::move(children))
                  : lbm::Formula::disjunction(std::move(children));
  }
  lbm::Formula a = random_formula(rng, vars, depth - 1);
  lbm::Formula b = random_formula(rng, vars, depth - 1);
  if (k < 92) return lbm::Formula::implies(std::move(a), std::move(b));
  if (k < 96) return lbm::Formula::iff(std::move(a), std::move(b));
  return lbm::Formula::exclusive_or(std::move(a), std::move(b));
}

// Post-order stack machine over the AST; shares no code with lbm::evaluate.
inline bool independent_eval(const lbm::Formula& f, const lbm::Assignment& a) {
  struct Item {
    const lbm::Formula* node;
    bool expanded;
  };
  std::vector<Item> work{{&f, false}};
  std::vector<std::uint8_t> values;
  while (!work.empty()) {
    Item item = work.back();
    work.pop_back();
    const lbm::Formula& n = *item.node;
    if (!item.expanded) {
      if (n.kind() == lbm::Kind::Var) {
        values.push_back(a.bit(n.var_index()) ? 1 : 0);
        continue;
      }
      work.push_back({&n, true});
      for (const lbm::Formula& c : n.children()) work.push_back({&c, false});
      continue;
    }
    const std::size_t arity = n.children().size();
    // Children were evaluated last-first, so values[end-1] is child 0.
    std::uint8_t result = 0;
    auto value_of = [&](std::size_t child) {
      return values[values.size() - 1 - child];
    };
    switch (n.kind()) {
      case lbm::Kind::Var:
        break;
      case lbm::Kind::Not:
        result = value_of(0) ? 0 : 1;
        break;
      case lbm::Kind::And: {
        result = 1;
        for (std::size_t c = 0; c < arity; ++c) result &= value_of(c);
        break;
      }
      case lbm::Kind::Or: {
        result = 0;
        for (std::size_t c = 0; c < arity; ++c) result |= value_of(c);
        break;
      }
      case lbm::Kind::Implies:
        result = (!value_of(1) || value_of(0)) ? 1 : 0;
        break;
      case lbm::Kind::Iff:
        result = value_of(0) == value_of(1) ? 1 : 0;
        break;
      case lbm::Kind::Xor:
        result = value_of(0) != value_of(1) ? 1 : 0;
        break;
    }
    values.resize(values.size() - arity);
    values.push_back(result);
  }
  return values.back() != 0;
}

inline lbm::Clause clause(std::vector<int> pos, std::vector<int> neg) {
  return *lbm::Clause::make(std::move(pos), std::move(neg));
}

// The (x ^ y) <-> z model with clauses in the worked-example order:
// h1: ~x ~y ~z, h2: x y ~z, h3: x ~y z, h4: ~x y z. Variables x=0, y=1, z=2.
inline lbm::CompiledRbm xor_model(double epsilon = 0.5) {
  lbm::ClauseSet cs(3);
  cs.add(clause({}, {0, 1, 2}));
  cs.add(clause({0, 1}, {2}));
  cs.add(clause({0, 2}, {1}));
  cs.add(clause({1, 2}, {0}));
  cs.set_strict(true);
  return lbm::compile(cs, epsilon, 1.0);
}

inline lbm::Formula xor_formula(lbm::VarTable& vars) {
  return lbm::parse("(x ^ y) <-> z", vars);
}

// Truth column of the worked truth table, rows in lexicographic (x,y,z) order.
inline const std::vector<int>& xor_truth_column() {
  static const std::vector<int> s = {1, 0, 0, 1, 0, 1, 1, 0};
  return s;
}

// Random rule head <- body with distinct variables, 1..max_body body literals.
struct RandomRule {
  lbm::Literal head;
  std::vector<lbm::Literal> body;
};

inline RandomRule random_rule(lbm::Rng& rng, int n_vars, int max_body) {
  std::vector<int> perm(static_cast<std::size_t>(n_vars));
  for (int i = 0; i < n_vars; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.below(i)]);
  int body_len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                         std::min(max_body, n_vars - 1))));
  RandomRule rule;
  rule.head = {perm[0], rng.bernoulli(0.3)};
  for (int i = 0; i < body_len; ++i)
    rule.body.push_back({perm[static_cast<std::size_t>(i) + 1], rng.bernoulli(0.5)});
  return rule;
}

inline lbm::Formula rule_formula(const RandomRule& rule, const lbm::VarTable& vars) {
  auto lit = [&](lbm::Literal l) {
    lbm::Formula v = lbm::Formula::var(l.var, vars.name(l.var));
    return l.negated ? lbm::Formula::negation(std::move(v)) : v;
  };
  lbm::Formula head = lit(rule.head);
  if (rule.body.size() == 1) return lbm::Formula::implies(std::move(head), lit(rule.body[0]));
  std::vector<lbm::Formula> body;
  for (lbm::Literal l : rule.body) body.push_back(lit(l));
  return lbm::Formula::implies(std::move(head),
                               lbm::Formula::conjunction(std::move(body)));
}

}  // namespace testsupport
