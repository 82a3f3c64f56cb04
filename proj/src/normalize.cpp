#include "lbm/normalize.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace lbm {

namespace {

struct DnfBuilder {
  std::size_t cap;
  int dropped = 0;

  void check(std::size_t n) const {
    if (n > cap)
      throw GuardError("DNF clause count exceeds the blow-up guard (" +
                       std::to_string(cap) + " clauses)");
  }

  // DNF of f (negated = false) or of ~f (negated = true), with negation pushed
  // inward on the fly.
  std::vector<Clause> build(const Formula& f, bool negated) {
    switch (f.kind()) {
      case Kind::Var: {
        Literal l{f.var_index(), negated};
        return {*Clause::from_literals({&l, 1})};
      }
      case Kind::Not:
        return build(f.children()[0], !negated);
      case Kind::And:
      case Kind::Or: {
        bool conj = (f.kind() == Kind::And) != negated;
        if (conj) return cross_children(f.children(), negated);
        return concat_children(f.children(), negated);
      }
      case Kind::Implies: {
        // head <- body == ~body | head
        if (!negated) return concat2(build(f.body(), true), build(f.head(), false));
        return cross2(build(f.body(), false), build(f.head(), true));
      }
      case Kind::Iff:
      case Kind::Xor: {
        const Formula& l = f.children()[0];
        const Formula& r = f.children()[1];
        bool as_iff = (f.kind() == Kind::Iff) != negated;
        if (as_iff) {
          // (l & r) | (~l & ~r)
          return concat2(cross2(build(l, false), build(r, false)),
                         cross2(build(l, true), build(r, true)));
        }
        // (l & ~r) | (~l & r)
        return concat2(cross2(build(l, false), build(r, true)),
                       cross2(build(l, true), build(r, false)));
      }
    }
    return {};
  }

  std::vector<Clause> concat2(std::vector<Clause> a, std::vector<Clause> b) {
    check(a.size() + b.size());
    a.insert(a.end(), std::make_move_iterator(b.begin()),
             std::make_move_iterator(b.end()));
    return a;
  }

  std::vector<Clause> concat_children(const std::vector<Formula>& children,
                                      bool negated) {
    std::vector<Clause> out;
    for (const Formula& c : children) out = concat2(std::move(out), build(c, negated));
    return out;
  }

  std::vector<Clause> cross2(const std::vector<Clause>& a,
                             const std::vector<Clause>& b) {
    std::vector<Clause> out;
    check(a.size() * b.size());
    out.reserve(a.size() * b.size());
    for (const Clause& ca : a) {
      for (const Clause& cb : b) {
        std::vector<int> pos = ca.pos();
        pos.insert(pos.end(), cb.pos().begin(), cb.pos().end());
        std::vector<int> neg = ca.neg();
        neg.insert(neg.end(), cb.neg().begin(), cb.neg().end());
        auto merged = Clause::make(std::move(pos), std::move(neg));
        if (merged) out.push_back(std::move(*merged));
        else ++dropped;
      }
    }
    return out;
  }

  std::vector<Clause> cross_children(const std::vector<Formula>& children,
                                     bool negated) {
    std::vector<Clause> out = build(children[0], negated);
    for (std::size_t i = 1; i < children.size(); ++i)
      out = cross2(out, build(children[i], negated));
    return out;
  }
};

std::optional<Literal> as_literal(const Formula& f) {
  if (f.kind() == Kind::Var) return Literal{f.var_index(), false};
  if (f.kind() == Kind::Not && f.children()[0].kind() == Kind::Var)
    return Literal{f.children()[0].var_index(), true};
  return std::nullopt;
}

// Collects a conjunction of literals in written order; false if any conjunct
// is not a literal.
bool collect_conjunct_literals(const Formula& f, std::vector<Literal>& out) {
  if (auto l = as_literal(f)) {
    out.push_back(*l);
    return true;
  }
  if (f.kind() != Kind::And) return false;
  for (const Formula& c : f.children())
    if (!collect_conjunct_literals(c, out)) return false;
  return true;
}

struct RuleShape {
  Literal head;
  std::vector<Literal> body;
};

std::optional<RuleShape> match_rule(const Formula& f) {
  if (f.kind() != Kind::Implies) return std::nullopt;
  auto head = as_literal(f.head());
  if (!head) return std::nullopt;
  RuleShape shape{*head, {}};
  if (!collect_conjunct_literals(f.body(), shape.body)) return std::nullopt;
  return shape;
}

}  // namespace

ClauseSet to_dnf(const Formula& f, int var_count, NormalizeOptions opt) {
  if (f.max_var_index() >= var_count)
    throw std::out_of_range("formula references a variable outside the table");
  DnfBuilder builder{opt.max_clauses};
  std::vector<Clause> clauses = builder.build(f, false);
  ClauseSet out(var_count);
  out.note_dropped(builder.dropped);
  for (Clause& c : clauses) out.add(std::move(c));
  out.sort_canonical();
  return out;
}

ClauseSet to_sdnf(const Formula& f, int var_count, NormalizeOptions opt) {
  if (auto rule = match_rule(f))
    return implication_sdnf(rule->head, rule->body, var_count);

  ClauseSet dnf = to_dnf(f, var_count, opt);
  const auto& clauses = dnf.clauses();
  const std::size_t n = clauses.size();

  // Union-find over clause compatibility: two clauses sharing a satisfying
  // assignment must end up in the same expansion group.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (clauses[i].compatible_with(clauses[j])) parent[find(i)] = find(j);

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

  ClauseSet out(var_count);
  out.note_dropped(dnf.dropped_contradictions());
  for (const auto& [root, members] : groups) {
    if (members.size() == 1) {
      out.add(clauses[members[0]]);
      continue;
    }
    // Full DNF over the group's variables: every assignment of those
    // variables satisfying the group's disjunction becomes one full clause.
    std::vector<int> group_vars;
    for (std::size_t m : members) {
      group_vars.insert(group_vars.end(), clauses[m].pos().begin(),
                        clauses[m].pos().end());
      group_vars.insert(group_vars.end(), clauses[m].neg().begin(),
                        clauses[m].neg().end());
    }
    std::sort(group_vars.begin(), group_vars.end());
    group_vars.erase(std::unique(group_vars.begin(), group_vars.end()),
                     group_vars.end());
    if (group_vars.size() >= 63 ||
        (std::size_t{1} << group_vars.size()) > opt.max_clauses)
      throw GuardError("full-DNF expansion over " +
                       std::to_string(group_vars.size()) +
                       " shared variables exceeds the blow-up guard");

    const std::size_t k = group_vars.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      auto sat = [&](const Clause& c) {
        for (int t : c.pos()) {
          auto it = std::lower_bound(group_vars.begin(), group_vars.end(), t);
          if (!((mask >> (it - group_vars.begin())) & 1u)) return false;
        }
        for (int kk : c.neg()) {
          auto it = std::lower_bound(group_vars.begin(), group_vars.end(), kk);
          if ((mask >> (it - group_vars.begin())) & 1u) return false;
        }
        return true;
      };
      bool any = false;
      for (std::size_t m : members)
        if (sat(clauses[m])) {
          any = true;
          break;
        }
      if (!any) continue;
      std::vector<int> pos, neg;
      for (std::size_t b = 0; b < k; ++b)
        ((mask >> b) & 1u ? pos : neg).push_back(group_vars[b]);
      out.add(Clause::make(std::move(pos), std::move(neg)));
      if (out.size() > opt.max_clauses)
        throw GuardError("SDNF clause count exceeds the blow-up guard");
    }
  }
  out.sort_canonical();
  out.set_strict(true);
  return out;
}

ClauseSet eliminate_disjunction(std::span<const Literal> disjuncts,
                                int var_count) {
  if (disjuncts.empty())
    throw std::invalid_argument("cannot eliminate over an empty disjunction");
  ClauseSet out(var_count);
  std::vector<Literal> prefix;  // negations of already-eliminated literals
  for (const Literal& l : disjuncts) {
    std::vector<Literal> lits = prefix;
    lits.push_back(l);
    out.add(Clause::from_literals(lits));
    prefix.push_back({l.var, !l.negated});
  }
  out.set_strict(true);
  return out;
}

ClauseSet implication_sdnf(Literal head, std::span<const Literal> body,
                           int var_count) {
  ClauseSet out(var_count);
  std::vector<Literal> first(body.begin(), body.end());
  first.push_back(head);
  out.add(Clause::from_literals(first));
  if (!body.empty()) {
    std::vector<Literal> negated_body;
    negated_body.reserve(body.size());
    for (const Literal& l : body) negated_body.push_back({l.var, !l.negated});
    ClauseSet rest = eliminate_disjunction(negated_body, var_count);
    out.note_dropped(rest.dropped_contradictions());
    for (const Clause& c : rest.clauses()) out.add(c);
  }
  out.set_strict(true);
  return out;
}

WeightedClauseSet merge_weighted(
    std::span<const std::pair<double, ClauseSet>> sets) {
  if (sets.empty()) return WeightedClauseSet(0);
  const int var_count = sets.front().second.var_count();
  for (const auto& [w, cs] : sets)
    if (cs.var_count() != var_count)
      throw std::invalid_argument("weighted sets must share one variable table");

  // Identical clauses merge with summed weights.
  std::map<Clause, double> by_clause;
  for (const auto& [w, cs] : sets)
    for (const Clause& c : cs.clauses()) by_clause[c] += w;

  std::vector<WeightedClause> flat;
  flat.reserve(by_clause.size());
  for (auto& [c, w] : by_clause) flat.push_back({w, c});

  // Syntactic subsumption: fold a clause into any proper subset of its
  // literals. Scanning in (literal count, canonical) order makes the fold
  // deterministic; absorbed weight lands on the first (most general) subsuming
  // clause.
  std::stable_sort(flat.begin(), flat.end(),
                   [](const WeightedClause& a, const WeightedClause& b) {
                     auto ka = a.clause.literal_count();
                     auto kb = b.clause.literal_count();
                     return ka != kb ? ka < kb : a.clause < b.clause;
                   });
  std::vector<bool> erased(flat.size(), false);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (erased[i]) continue;
    for (std::size_t j = i + 1; j < flat.size(); ++j) {
      if (erased[j]) continue;
      if (flat[i].clause.literals_subset_of(flat[j].clause)) {
        flat[i].weight += flat[j].weight;
        erased[j] = true;
      }
    }
  }

  WeightedClauseSet out(var_count);
  for (std::size_t i = 0; i < flat.size(); ++i)
    if (!erased[i]) out.add(flat[i].weight, std::move(flat[i].clause));
  return out;
}

}  // namespace lbm
