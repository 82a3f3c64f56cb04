#include "lbm/clause.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace lbm {

namespace {

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool sorted_intersect(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return true;
  }
  return false;
}

}  // namespace

std::optional<Clause> Clause::make(std::vector<int> pos, std::vector<int> neg) {
  sort_unique(pos);
  sort_unique(neg);
  if (sorted_intersect(pos, neg)) return std::nullopt;
  Clause c;
  c.pos_ = std::move(pos);
  c.neg_ = std::move(neg);
  return c;
}

std::optional<Clause> Clause::from_literals(std::span<const Literal> lits) {
  std::vector<int> pos, neg;
  for (const Literal& l : lits) (l.negated ? neg : pos).push_back(l.var);
  return make(std::move(pos), std::move(neg));
}

int Clause::max_var_index() const {
  int m = -1;
  if (!pos_.empty()) m = std::max(m, pos_.back());
  if (!neg_.empty()) m = std::max(m, neg_.back());
  return m;
}

bool Clause::satisfied_by(const Assignment& a) const {
  for (int t : pos_)
    if (!a.bit(t)) return false;
  for (int k : neg_)
    if (a.bit(k)) return false;
  return true;
}

bool Clause::compatible_with(const Clause& other) const {
  return !sorted_intersect(pos_, other.neg_) && !sorted_intersect(neg_, other.pos_);
}

bool Clause::literals_subset_of(const Clause& other) const {
  return std::includes(other.pos_.begin(), other.pos_.end(), pos_.begin(),
                       pos_.end()) &&
         std::includes(other.neg_.begin(), other.neg_.end(), neg_.begin(),
                       neg_.end());
}

std::string Clause::to_string() const {
  if (empty())
    throw std::invalid_argument("empty clause has no text representation");
  std::string out;
  auto i = pos_.begin();
  auto j = neg_.begin();
  // Literals emitted in ascending variable order.
  while (i != pos_.end() || j != neg_.end()) {
    bool take_pos = j == neg_.end() || (i != pos_.end() && *i < *j);
    if (!out.empty()) out.push_back(' ');
    if (take_pos) {
      out += "x" + std::to_string(*i++);
    } else {
      out += "!x" + std::to_string(*j++);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ClauseSet

bool ClauseSet::add(std::optional<Clause> c) {
  if (!c) {
    ++dropped_;
    return false;
  }
  if (!seen_.insert(*c).second) return false;
  clauses_.push_back(std::move(*c));
  return true;
}

void ClauseSet::sort_canonical() {
  std::sort(clauses_.begin(), clauses_.end());
}

bool ClauseSet::satisfied_by(const Assignment& a) const {
  for (const Clause& c : clauses_)
    if (c.satisfied_by(a)) return true;
  return false;
}

int ClauseSet::true_clause_count(const Assignment& a) const {
  int n = 0;
  for (const Clause& c : clauses_)
    if (c.satisfied_by(a)) ++n;
  return n;
}

std::string ClauseSet::to_text() const {
  std::string out;
  for (const Clause& c : clauses_) {
    out += c.to_string();
    out.push_back('\n');
  }
  return out;
}

bool verify_strict(const ClauseSet& cs) {
  if (cs.var_count() > 20)
    throw GuardError("strictness check over " + std::to_string(cs.var_count()) +
                     " variables exceeds the 20-variable enumeration guard");
  const int n = cs.var_count();
  for (std::uint64_t ix = 0; ix < (std::uint64_t{1} << n); ++ix) {
    if (cs.true_clause_count(Assignment::from_index(ix, n)) > 1) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Text round-trip
//
// One clause per line: literals "x3" / "!x3", optional "weight :" prefix.
// '#' lines are comments.

namespace {

struct ParsedLine {
  std::optional<double> weight;
  Clause clause;
};

std::optional<ParsedLine> parse_clause_line(std::string_view line, int line_no) {
  std::size_t b = line.find_first_not_of(" \t\r");
  if (b == std::string_view::npos || line[b] == '#') return std::nullopt;
  std::string_view content = line.substr(b);

  ParsedLine out;
  std::size_t colon = content.find(':');
  if (colon != std::string_view::npos) {
    std::string_view head = content.substr(0, colon);
    std::size_t he = head.find_last_not_of(" \t");
    head = he == std::string_view::npos ? std::string_view{} : head.substr(0, he + 1);
    double w = 0;
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), w);
    if (head.empty() || ec != std::errc{} || ptr != head.data() + head.size())
      throw ParseError("expected a numeric weight before ':'", 0, line_no);
    out.weight = w;
    content = content.substr(colon + 1);
  }

  std::vector<Literal> lits;
  std::size_t i = 0;
  while (i < content.size()) {
    if (content[i] == ' ' || content[i] == '\t' || content[i] == '\r') {
      ++i;
      continue;
    }
    bool neg = false;
    if (content[i] == '!') {
      neg = true;
      ++i;
    }
    if (i >= content.size() || content[i] != 'x')
      throw ParseError("expected literal 'x<index>' or '!x<index>'", i, line_no);
    ++i;
    int var = 0;
    auto [ptr, ec] = std::from_chars(content.data() + i,
                                     content.data() + content.size(), var);
    if (ec != std::errc{} || ptr == content.data() + i)
      throw ParseError("expected variable index after 'x'", i, line_no);
    i = static_cast<std::size_t>(ptr - content.data());
    lits.push_back({var, neg});
  }
  if (lits.empty())
    throw ParseError("clause line has no literals", 0, line_no);

  auto c = Clause::from_literals(lits);
  if (!c)
    throw ParseError("contradictory clause (x and !x)", 0, line_no);
  out.clause = std::move(*c);
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    fn(line, line_no);
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
}

}  // namespace

ClauseSet ClauseSet::from_text(std::string_view text, int var_count) {
  std::vector<Clause> clauses;
  int max_var = -1;
  for_each_line(text, [&](std::string_view line, int line_no) {
    auto parsed = parse_clause_line(line, line_no);
    if (!parsed) return;
    max_var = std::max(max_var, parsed->clause.max_var_index());
    clauses.push_back(std::move(parsed->clause));
  });
  ClauseSet cs(var_count >= 0 ? var_count : max_var + 1);
  if (max_var >= cs.var_count())
    throw ParseError("literal index exceeds declared variable count", 0);
  for (Clause& c : clauses) cs.add(std::move(c));
  return cs;
}

// ---------------------------------------------------------------------------
// WeightedClauseSet

double WeightedClauseSet::weighted_satisfaction(const Assignment& a) const {
  double total = 0;
  for (const WeightedClause& wc : entries_)
    if (wc.clause.satisfied_by(a)) total += wc.weight;
  return total;
}

std::string WeightedClauseSet::to_text() const {
  std::ostringstream os;
  for (const WeightedClause& wc : entries_) {
    os << wc.weight << " : " << wc.clause.to_string() << "\n";
  }
  return os.str();
}

WeightedClauseSet WeightedClauseSet::from_text(std::string_view text,
                                               int var_count) {
  std::vector<WeightedClause> entries;
  int max_var = -1;
  for_each_line(text, [&](std::string_view line, int line_no) {
    auto parsed = parse_clause_line(line, line_no);
    if (!parsed) return;
    max_var = std::max(max_var, parsed->clause.max_var_index());
    entries.push_back({parsed->weight.value_or(1.0), std::move(parsed->clause)});
  });
  WeightedClauseSet wcs(var_count >= 0 ? var_count : max_var + 1);
  if (max_var >= wcs.var_count())
    throw ParseError("literal index exceeds declared variable count", 0);
  for (WeightedClause& wc : entries) wcs.add(wc.weight, std::move(wc.clause));
  return wcs;
}

}  // namespace lbm
