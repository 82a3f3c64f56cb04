#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lbm/errors.hpp"

namespace lbm {

enum class Kind : std::uint8_t { Var, Not, And, Or, Implies, Iff, Xor };

// Bidirectional map between variable names and dense indices 0..n-1.
// Names are interned at parse time; all downstream math uses indices.
class VarTable {
 public:
  // Returns the index of `name`, interning it if new. Throws ParseError on an
  // invalid identifier.
  int intern(std::string_view name);
  std::optional<int> find(std::string_view name) const;
  const std::string& name(int index) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  static bool valid_name(std::string_view name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

// Fixed-length binary vector over the visible variables (0 = false, 1 = true).
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int n) : bits_(static_cast<std::size_t>(n), 0) {}
  explicit Assignment(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  int size() const { return static_cast<int>(bits_.size()); }
  bool bit(int i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
  void set(int i, bool v) { bits_[static_cast<std::size_t>(i)] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  // Lexicographic enumeration: variable 0 is the most significant bit, so
  // index 0 is all-false and index 2^n-1 is all-true.
  static Assignment from_index(std::uint64_t index, int n);
  std::uint64_t to_index() const;

  std::string to_string() const;  // e.g. "110"

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct AssignmentHash {
  std::size_t operator()(const Assignment& a) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (std::uint8_t b : a.bits()) h = (h ^ b) * 1099511628211ull;
    return h;
  }
};

// Immutable propositional formula AST. And/Or are n-ary (>= 2 children);
// Implies stores its head first so the implication-specific SDNF shortcut can
// detect rule shape (head <- body, i.e. body -> head).
class Formula {
 public:
  static Formula var(int index, std::string name);
  static Formula var(VarTable& vars, std::string_view name);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implies(Formula head, Formula body);
  static Formula iff(Formula lhs, Formula rhs);
  static Formula exclusive_or(Formula lhs, Formula rhs);

  Kind kind() const { return kind_; }
  int var_index() const { return var_index_; }
  const std::string& var_name() const { return name_; }
  const std::vector<Formula>& children() const { return children_; }
  const Formula& head() const { return children_[0]; }  // Implies only
  const Formula& body() const { return children_[1]; }  // Implies only

  int max_var_index() const;

  bool operator==(const Formula& other) const;

 private:
  Formula() = default;

  Kind kind_ = Kind::Var;
  int var_index_ = -1;
  std::string name_;
  std::vector<Formula> children_;
};

// Parses `text` against the operator grammar (~ & | -> <- <-> ^), interning
// variables into `vars`. Precedence: ~ > & > | > -> > <->/^; & and | are
// left-associative and n-ary, -> is right-associative. Throws ParseError
// with a byte offset on malformed input.
Formula parse(std::string_view text, VarTable& vars);

// Precedence-aware printer; parse(to_string(f)) is structurally equal to f.
std::string to_string(const Formula& f);

// Standard Boolean semantics. The overload taking a VarTable validates that
// the assignment length matches and every variable is known.
bool evaluate(const Formula& f, const Assignment& a);
bool evaluate(const Formula& f, const Assignment& a, const VarTable& vars);

// All 2^n assignments in lexicographic order with their truth values.
// Guarded at 24 variables.
std::vector<std::pair<Assignment, bool>> truth_table(const Formula& f,
                                                     const VarTable& vars);

// Knowledge-base file: one rule per line, optional "weight :" prefix,
// lines starting with '#' are comments.
struct KbRule {
  std::optional<double> weight;
  Formula formula;
  int line = 0;  // 1-based source line
};

struct KnowledgeBase {
  std::vector<KbRule> rules;
  VarTable vars;
};

KnowledgeBase parse_kb(std::string_view text);
// Variant interning into an existing table (e.g. one shared with a dataset).
std::vector<KbRule> parse_kb(std::string_view text, VarTable& vars);

}  // namespace lbm
