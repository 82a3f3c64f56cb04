#include "lbm/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace lbm {

// ---------------------------------------------------------------------------
// VarTable

bool VarTable::valid_name(std::string_view name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
    return false;
  for (char c : name.substr(1)) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

int VarTable::intern(std::string_view name) {
  if (!valid_name(name))
    throw ParseError("invalid variable name '" + std::string(name) + "'", 0);
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  int idx = static_cast<int>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), idx);
  return idx;
}

std::optional<int> VarTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& VarTable::name(int index) const {
  return names_.at(static_cast<std::size_t>(index));
}

// ---------------------------------------------------------------------------
// Assignment

Assignment Assignment::from_index(std::uint64_t index, int n) {
  Assignment a(n);
  for (int j = 0; j < n; ++j) a.set(j, (index >> (n - 1 - j)) & 1u);
  return a;
}

std::uint64_t Assignment::to_index() const {
  std::uint64_t ix = 0;
  for (std::uint8_t b : bits_) ix = (ix << 1) | b;
  return ix;
}

std::string Assignment::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (std::uint8_t b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------------------
// Formula factories

Formula Formula::var(int index, std::string name) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  Formula f;
  f.kind_ = Kind::Var;
  f.var_index_ = index;
  f.name_ = std::move(name);
  return f;
}

Formula Formula::var(VarTable& vars, std::string_view name) {
  int idx = vars.intern(name);
  return var(idx, std::string(name));
}

Formula Formula::negation(Formula f) {
  Formula out;
  out.kind_ = Kind::Not;
  out.children_.push_back(std::move(f));
  return out;
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.size() < 2)
    throw std::invalid_argument("conjunction needs at least 2 children");
  Formula out;
  out.kind_ = Kind::And;
  out.children_ = std::move(children);
  return out;
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.size() < 2)
    throw std::invalid_argument("disjunction needs at least 2 children");
  Formula out;
  out.kind_ = Kind::Or;
  out.children_ = std::move(children);
  return out;
}

Formula Formula::implies(Formula head, Formula body) {
  Formula out;
  out.kind_ = Kind::Implies;
  out.children_.push_back(std::move(head));
  out.children_.push_back(std::move(body));
  return out;
}

Formula Formula::iff(Formula lhs, Formula rhs) {
  Formula out;
  out.kind_ = Kind::Iff;
  out.children_.push_back(std::move(lhs));
  out.children_.push_back(std::move(rhs));
  return out;
}

Formula Formula::exclusive_or(Formula lhs, Formula rhs) {
  Formula out;
  out.kind_ = Kind::Xor;
  out.children_.push_back(std::move(lhs));
  out.children_.push_back(std::move(rhs));
  return out;
}

int Formula::max_var_index() const {
  if (kind_ == Kind::Var) return var_index_;
  int m = -1;
  for (const Formula& c : children_) m = std::max(m, c.max_var_index());
  return m;
}

bool Formula::operator==(const Formula& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::Var) return var_index_ == other.var_index_;
  return children_ == other.children_;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok : std::uint8_t {
  End, Ident, Not, And, Or, Arrow, RArrow, Iff, Xor, LParen, RParen
};

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;  // identifiers only
};

const char* token_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Not: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::RArrow: return "'<-'";
    case Tok::Iff: return "'<->'";
    case Tok::Xor: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      out.push_back({Tok::Ident, start, text.substr(start, j - start)});
      i = j;
      continue;
    }
    switch (c) {
      case '~': out.push_back({Tok::Not, start, {}}); ++i; break;
      case '&': out.push_back({Tok::And, start, {}}); ++i; break;
      case '|': out.push_back({Tok::Or, start, {}}); ++i; break;
      case '^': out.push_back({Tok::Xor, start, {}}); ++i; break;
      case '(': out.push_back({Tok::LParen, start, {}}); ++i; break;
      case ')': out.push_back({Tok::RParen, start, {}}); ++i; break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({Tok::Arrow, start, {}});
          i += 2;
        } else {
          throw ParseError("unexpected '-' (did you mean '->'?)", start);
        }
        break;
      case '<':
        if (text.substr(i, 3) == "<->") {
          out.push_back({Tok::Iff, start, {}});
          i += 3;
        } else if (text.substr(i, 2) == "<-") {
          out.push_back({Tok::RArrow, start, {}});
          i += 2;
        } else {
          throw ParseError("unexpected '<' (did you mean '<-' or '<->'?)", start);
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::End, text.size(), {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, VarTable& vars)
      : tokens_(lex(text)), vars_(vars) {}

  Formula run() {
    if (tokens_.front().kind == Tok::End)
      throw ParseError("empty input: expected a formula", tokens_.front().offset);
    Formula f = parse_iff();
    if (peek().kind != Tok::End)
      fail("expected an operator or end of input");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& expected) const {
    std::ostringstream os;
    os << "syntax error at offset " << peek().offset << ": " << expected
       << ", got " << token_name(peek().kind);
    throw ParseError(os.str(), peek().offset);
  }

  Formula parse_iff() {
    Formula lhs = parse_impl();
    while (peek().kind == Tok::Iff || peek().kind == Tok::Xor) {
      Tok op = next().kind;
      Formula rhs = parse_impl();
      lhs = op == Tok::Iff ? Formula::iff(std::move(lhs), std::move(rhs))
                           : Formula::exclusive_or(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  // Chains fold from the right, so a -> b -> c reads a -> (b -> c).
  Formula parse_impl() {
    std::vector<Formula> operands;
    std::vector<Tok> ops;
    operands.push_back(parse_or());
    while (peek().kind == Tok::Arrow || peek().kind == Tok::RArrow) {
      ops.push_back(next().kind);
      operands.push_back(parse_or());
    }
    Formula result = std::move(operands.back());
    for (std::size_t i = ops.size(); i-- > 0;) {
      if (ops[i] == Tok::Arrow) {
        // body -> head
        result = Formula::implies(std::move(result), std::move(operands[i]));
      } else {
        // head <- body
        result = Formula::implies(std::move(operands[i]), std::move(result));
      }
    }
    return result;
  }

  Formula parse_or() {
    std::vector<Formula> children;
    children.push_back(parse_and());
    while (peek().kind == Tok::Or) {
      next();
      children.push_back(parse_and());
    }
    if (children.size() == 1) return std::move(children.front());
    return Formula::disjunction(std::move(children));
  }

  Formula parse_and() {
    std::vector<Formula> children;
    children.push_back(parse_not());
    while (peek().kind == Tok::And) {
      next();
      children.push_back(parse_not());
    }
    if (children.size() == 1) return std::move(children.front());
    return Formula::conjunction(std::move(children));
  }

  Formula parse_not() {
    if (peek().kind == Tok::Not) {
      next();
      return Formula::negation(parse_not());
    }
    return parse_atom();
  }

  Formula parse_atom() {
    if (peek().kind == Tok::Ident) {
      Token t = next();
      return Formula::var(vars_, t.text);
    }
    if (peek().kind == Tok::LParen) {
      Token open = next();
      Formula inner = parse_iff();
      if (peek().kind != Tok::RParen) {
        std::ostringstream os;
        os << "syntax error at offset " << peek().offset
           << ": expected ')' closing '(' at offset " << open.offset;
        throw ParseError(os.str(), peek().offset);
      }
      next();
      return inner;
    }
    fail("expected identifier, '~', or '('");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  VarTable& vars_;
};

}  // namespace

Formula parse(std::string_view text, VarTable& vars) {
  return Parser(text, vars).run();
}

// ---------------------------------------------------------------------------
// Printer

namespace {

// Precedence levels (higher binds tighter).
int level(const Formula& f) {
  switch (f.kind()) {
    case Kind::Var: return 5;
    case Kind::Not: return 4;
    case Kind::And: return 3;
    case Kind::Or: return 2;
    case Kind::Implies: return 1;
    case Kind::Iff:
    case Kind::Xor: return 0;
  }
  return 0;
}

void print(const Formula& f, std::string& out);

void print_child(const Formula& child, int min_level, std::string& out) {
  if (level(child) < min_level) {
    out.push_back('(');
    print(child, out);
    out.push_back(')');
  } else {
    print(child, out);
  }
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Kind::Var:
      out += f.var_name();
      break;
    case Kind::Not:
      out.push_back('~');
      print_child(f.children()[0], 4, out);
      break;
    case Kind::And:
    case Kind::Or: {
      // Nested same-kind children keep parentheses so the n-ary shape
      // round-trips exactly.
      const char* sep = f.kind() == Kind::And ? " & " : " | ";
      int lvl = level(f);
      bool first = true;
      for (const Formula& c : f.children()) {
        if (!first) out += sep;
        first = false;
        print_child(c, lvl + 1, out);
      }
      break;
    }
    case Kind::Implies:
      // Printed as body -> head; right-associative, so the head side of an
      // implication chain needs no parentheses.
      print_child(f.body(), 2, out);
      out += " -> ";
      print_child(f.head(), 1, out);
      break;
    case Kind::Iff:
    case Kind::Xor:
      print_child(f.children()[0], 0, out);
      out += f.kind() == Kind::Iff ? " <-> " : " ^ ";
      print_child(f.children()[1], 1, out);
      break;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

bool evaluate(const Formula& f, const Assignment& a) {
  switch (f.kind()) {
    case Kind::Var: {
      int i = f.var_index();
      if (i < 0 || i >= a.size())
        throw std::out_of_range("unknown variable '" + f.var_name() +
                                "' (index " + std::to_string(i) + ")");
      return a.bit(i);
    }
    case Kind::Not:
      return !evaluate(f.children()[0], a);
    case Kind::And:
      for (const Formula& c : f.children())
        if (!evaluate(c, a)) return false;
      return true;
    case Kind::Or:
      for (const Formula& c : f.children())
        if (evaluate(c, a)) return true;
      return false;
    case Kind::Implies:
      return !evaluate(f.body(), a) || evaluate(f.head(), a);
    case Kind::Iff:
      return evaluate(f.children()[0], a) == evaluate(f.children()[1], a);
    case Kind::Xor:
      return evaluate(f.children()[0], a) != evaluate(f.children()[1], a);
  }
  return false;
}

bool evaluate(const Formula& f, const Assignment& a, const VarTable& vars) {
  if (a.size() != vars.size())
    throw std::invalid_argument("assignment length " + std::to_string(a.size()) +
                                " does not match variable table size " +
                                std::to_string(vars.size()));
  if (f.max_var_index() >= vars.size())
    throw std::out_of_range("formula references a variable outside the table");
  return evaluate(f, a);
}

std::vector<std::pair<Assignment, bool>> truth_table(const Formula& f,
                                                     const VarTable& vars) {
  const int n = vars.size();
  if (n > 24)
    throw GuardError("truth table over " + std::to_string(n) +
                     " variables exceeds the 24-variable enumeration guard");
  if (f.max_var_index() >= n)
    throw std::out_of_range("formula references a variable outside the table");
  std::vector<std::pair<Assignment, bool>> rows;
  rows.reserve(std::size_t{1} << n);
  for (std::uint64_t ix = 0; ix < (std::uint64_t{1} << n); ++ix) {
    Assignment a = Assignment::from_index(ix, n);
    bool v = evaluate(f, a);
    rows.emplace_back(std::move(a), v);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Knowledge-base files

std::vector<KbRule> parse_kb(std::string_view text, VarTable& vars) {
  std::vector<KbRule> rules;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;

    std::size_t b = line.find_first_not_of(" \t\r");
    if (b != std::string_view::npos && line[b] != '#') {
      std::string_view content = line.substr(b);
      std::optional<double> weight;
      // The formula grammar has no ':' or digits-first tokens, so a leading
      // "number :" is unambiguously a weight prefix.
      std::size_t colon = content.find(':');
      if (colon != std::string_view::npos) {
        std::string_view head = content.substr(0, colon);
        std::size_t he = head.find_last_not_of(" \t");
        head = he == std::string_view::npos ? std::string_view{}
                                            : head.substr(0, he + 1);
        double w = 0;
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), w);
        if (head.empty() || ec != std::errc{} || ptr != head.data() + head.size())
          throw ParseError("expected a numeric weight before ':'", pos + b, line_no);
        weight = w;
        content = content.substr(colon + 1);
      }
      try {
        Formula f = parse(content, vars);
        rules.push_back({weight, std::move(f), line_no});
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (line " +
                             std::to_string(line_no) + ")",
                         e.offset(), line_no);
      }
    }

    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return rules;
}

KnowledgeBase parse_kb(std::string_view text) {
  KnowledgeBase kb;
  kb.rules = parse_kb(text, kb.vars);
  return kb;
}

}  // namespace lbm
