#pragma once

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbm/formula.hpp"

namespace lbm {

struct Literal {
  int var = 0;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

// Conjunctive clause: positive literal indices (S_T) and negative literal
// indices (S_K), both sorted ascending and disjoint. Contradictory literal
// sets (x and ~x) cannot be constructed; factories report them as nullopt so
// callers can drop and count them.
class Clause {
 public:
  Clause() = default;

  static std::optional<Clause> make(std::vector<int> pos, std::vector<int> neg);
  static std::optional<Clause> from_literals(std::span<const Literal> lits);

  const std::vector<int>& pos() const { return pos_; }
  const std::vector<int>& neg() const { return neg_; }
  int literal_count() const { return static_cast<int>(pos_.size() + neg_.size()); }
  bool empty() const { return pos_.empty() && neg_.empty(); }
  int max_var_index() const;

  bool satisfied_by(const Assignment& a) const;
  // True when some assignment satisfies both clauses (no conflicting literal).
  bool compatible_with(const Clause& other) const;
  // True when this clause's literals are a subset of other's (so this clause
  // is the more general of the two and other implies it).
  bool literals_subset_of(const Clause& other) const;

  std::string to_string() const;  // "x0 !x2"

  friend bool operator==(const Clause&, const Clause&) = default;
  friend auto operator<=>(const Clause&, const Clause&) = default;

 private:
  std::vector<int> pos_;
  std::vector<int> neg_;
};

// Ordered list of distinct clauses over var_count variables, read as their
// disjunction. `strict` marks sets where at most one clause is true under any
// assignment (producer-asserted; verify_strict checks it by enumeration).
class ClauseSet {
 public:
  ClauseSet() = default;
  explicit ClauseSet(int var_count) : var_count_(var_count) {}

  int var_count() const { return var_count_; }
  bool strict() const { return strict_; }
  void set_strict(bool s) { strict_ = s; }

  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }

  // Appends a clause unless it is a duplicate; nullopt (a contradictory
  // clause) bumps the diagnostic counter instead. Returns whether the set grew.
  bool add(std::optional<Clause> c);
  bool contains(const Clause& c) const { return seen_.count(c) > 0; }
  int dropped_contradictions() const { return dropped_; }
  void note_dropped(int n) { dropped_ += n; }

  void sort_canonical();

  bool satisfied_by(const Assignment& a) const;
  int true_clause_count(const Assignment& a) const;

  std::string to_text() const;
  static ClauseSet from_text(std::string_view text, int var_count = -1);

 private:
  int var_count_ = 0;
  bool strict_ = false;
  int dropped_ = 0;
  std::vector<Clause> clauses_;
  std::set<Clause> seen_;
};

// Exhaustively checks the SDNF property (enumeration guard: 20 variables).
bool verify_strict(const ClauseSet& cs);

struct WeightedClause {
  double weight = 0;
  Clause clause;

  friend bool operator==(const WeightedClause&, const WeightedClause&) = default;
};

class WeightedClauseSet {
 public:
  WeightedClauseSet() = default;
  explicit WeightedClauseSet(int var_count) : var_count_(var_count) {}

  int var_count() const { return var_count_; }
  const std::vector<WeightedClause>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void add(double weight, Clause c) { entries_.push_back({weight, std::move(c)}); }

  // Sum of the weights of the clauses satisfied by `a`.
  double weighted_satisfaction(const Assignment& a) const;

  std::string to_text() const;
  static WeightedClauseSet from_text(std::string_view text, int var_count = -1);

 private:
  int var_count_ = 0;
  std::vector<WeightedClause> entries_;
};

}  // namespace lbm
