#include "desgraph/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace desgraph::dsl {

SpecError::SpecError(Kind kind, int line, int column, std::string token, const std::string& message)
    : std::runtime_error(message), kind_(kind), line_(line), column_(column), token_(std::move(token)) {}

namespace {

enum class Tok { Ident, Number, String, Punct, Newline, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 0;
  int column = 0;
};

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
    case Tok::String: return "\"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

[[noreturn]] void syntax_error(const Token& at, const std::string& expected) {
  std::ostringstream msg;
  msg << "line " << at.line << ", column " << at.column << ": expected " << expected << ", got "
      << describe(at);
  throw SpecError(SpecError::Kind::Syntax, at.line, at.column, at.text, msg.str());
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1, depth = 0;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (c == '\n') {
      if (depth == 0 && !out.empty() && out.back().type != Tok::Newline) {
        out.push_back(Token{Tok::Newline, "\\n", line, col});
      }
      advance();
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance();
      continue;
    }
    Token t{Tok::Punct, {}, line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.type = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && (std::isdigit(static_cast<unsigned char>(src[i + 1])) || src[i + 1] == '.')) ||
               (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + (c == '-' ? 1 : 0);
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.type = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      t.type = Tok::String;
      advance();
      bool closed = false;
      while (i < src.size()) {
        const char s = src[i];
        if (s == '"') {
          advance();
          closed = true;
          break;
        }
        if (s == '\n') break;
        if (s == '\\' && i + 1 < src.size()) {
          const char e = src[i + 1];
          t.text += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          advance(2);
          continue;
        }
        t.text += s;
        advance();
      }
      if (!closed) {
        throw SpecError(SpecError::Kind::Syntax, t.line, t.column, "\"" + t.text,
                        "line " + std::to_string(t.line) + ", column " + std::to_string(t.column) +
                            ": unterminated string");
      }
    } else if ((c == '<' || c == '>') && i + 1 < src.size() && src[i + 1] == '=') {
      t.text = std::string(src.substr(i, 2));
      advance(2);
    } else if (std::string_view("=:,~[]().<>*").find(c) != std::string_view::npos) {
      t.text = std::string(1, c);
      if (c == '(' || c == '[') ++depth;
      if ((c == ')' || c == ']') && depth > 0) --depth;
      advance();
    } else {
      t.text = std::string(1, c);
      throw SpecError(SpecError::Kind::Syntax, line, col, t.text,
                      "line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": unexpected character '" + t.text + "'");
    }
    out.push_back(std::move(t));
  }
  if (!out.empty() && out.back().type != Tok::Newline) out.push_back(Token{Tok::Newline, "\\n", line, col});
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

const std::set<std::string, std::less<>> kBlockNames = {"units", "trts",  "rcrds", "expect",
                                                        "allot", "assign", "output"};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  SpecAst parse() {
    SpecAst ast;
    if (!(peek().type == Tok::Ident && peek().text == "design")) syntax_error(peek(), "'design'");
    next();
    if (peek().type == Tok::String) ast.title = next().text;
    end_of_line();
    while (peek().type != Tok::End) {
      const Token& head = peek();
      if (head.type != Tok::Ident || head.column != 1 || !kBlockNames.count(head.text)) {
        syntax_error(head, "a block header (units:, trts:, rcrds:, expect:, allot:, assign:, output:)");
      }
      const std::string name = next().text;
      const SourcePos pos{head.line, head.column};
      expect_punct(":");
      if (name == "assign") {
        ast.blocks.emplace_back(parse_assign(pos));
      } else if (name == "output") {
        ast.blocks.emplace_back(parse_output(pos));
      } else {
        end_of_line();
        if (name == "units") {
          ast.blocks.emplace_back(UnitsBlock{items<FactorDecl>([&] { return factor_decl(); })});
        } else if (name == "trts") {
          ast.blocks.emplace_back(TrtsBlock{items<FactorDecl>([&] { return factor_decl(); })});
        } else if (name == "rcrds") {
          ast.blocks.emplace_back(RcrdsBlock{items<RecordDecl>([&] { return record_decl(); })});
        } else if (name == "expect") {
          ast.blocks.emplace_back(ExpectBlock{items<ExpectDecl>([&] { return expect_decl(); })});
        } else {
          ast.blocks.emplace_back(AllotBlock{items<AllotDecl>([&] { return allot_decl(); })});
        }
      }
    }
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::Punct && peek(ahead).text == p;
  }
  bool at_ident(std::string_view word) const {
    return peek().type == Tok::Ident && peek().text == word;
  }
  void expect_punct(std::string_view p) {
    if (!at_punct(p)) syntax_error(peek(), "'" + std::string(p) + "'");
    next();
  }
  std::string ident(const std::string& what) {
    if (peek().type != Tok::Ident) syntax_error(peek(), what);
    return next().text;
  }
  void end_of_line() {
    if (peek().type == Tok::End) return;
    if (peek().type != Tok::Newline) syntax_error(peek(), "end of line");
    next();
  }
  bool indented() const { return peek().type != Tok::End && peek().type != Tok::Newline && peek().column > 1; }

  template <class T, class F>
  std::vector<T> items(F item) {
    std::vector<T> out;
    while (indented()) {
      out.push_back(item());
      end_of_line();
    }
    return out;
  }

  double number(const std::string& what) {
    if (peek().type != Tok::Number) syntax_error(peek(), what);
    const Token& t = next();
    double v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) syntax_error(t, what);
    return v;
  }

  bool at_integer() const {
    return peek().type == Tok::Number && peek().text.find_first_of(".eE") == std::string::npos;
  }

  std::uint64_t natural(const std::string& what) {
    if (!at_integer() || peek().text.front() == '-') syntax_error(peek(), what);
    const Token& t = next();
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) syntax_error(t, what);
    return v;
  }

  Scalar scalar() {
    const Token& t = peek();
    if (t.type == Tok::String || t.type == Tok::Ident) return next().text;
    if (t.type == Tok::Number) return number("a value");
    syntax_error(t, "a value");
  }

  std::vector<Scalar> scalar_list() {
    expect_punct("[");
    std::vector<Scalar> out;
    if (!at_punct("]")) {
      out.push_back(scalar());
      while (at_punct(",")) {
        next();
        out.push_back(scalar());
      }
    }
    expect_punct("]");
    return out;
  }

  std::vector<std::string> name_list(const std::string& what) {
    expect_punct("[");
    std::vector<std::string> out;
    if (!at_punct("]")) {
      do {
        if (!out.empty()) next();
        if (peek().type != Tok::Ident && peek().type != Tok::String) syntax_error(peek(), what);
        out.push_back(next().text);
      } while (at_punct(","));
    }
    expect_punct("]");
    return out;
  }

  std::string label() {
    const Token& t = peek();
    if (t.type == Tok::String || t.type == Tok::Ident || t.type == Tok::Number) return next().text;
    syntax_error(t, "a level label");
  }

  std::variant<CountSpec, ValuesSpec> rule_spec() {
    if (at_integer()) return CountSpec{static_cast<std::size_t>(natural("a level count"))};
    if (at_punct("[")) return ValuesSpec{scalar_list(), false};
    syntax_error(peek(), "a level count or a [list] of levels");
  }

  PerParentRule rule() {
    PerParentRule r;
    if (at_punct(".")) {
      next();
      r.wildcard = true;
    } else if (at_punct("[")) {
      next();
      r.match.push_back(label());
      while (at_punct(",")) {
        next();
        r.match.push_back(label());
      }
      expect_punct("]");
    } else {
      r.match.push_back(label());
      while (at_punct(",")) {
        next();
        r.match.push_back(label());
      }
    }
    expect_punct("~");
    r.spec = rule_spec();
    return r;
  }

  std::vector<PerParentRule> rules() {
    std::vector<PerParentRule> out{rule()};
    while (at_punct(",")) {
      next();
      out.push_back(rule());
    }
    return out;
  }

  CrossedSpec crossed() {
    next();
    expect_punct("(");
    CrossedSpec c;
    c.parents.push_back(ident("a factor name"));
    while (at_punct(",")) {
      next();
      c.parents.push_back(ident("a factor name"));
    }
    expect_punct(")");
    return c;
  }

  LevelSpec level_spec() {
    if (at_integer()) {
      const Token start = peek();
      const bool negative = start.text.front() == '-';
      if (at_punct(":", 1)) {
        long long a = 0, b = 0;
        std::from_chars(start.text.data(), start.text.data() + start.text.size(), a);
        next();
        next();
        if (!at_integer()) syntax_error(peek(), "an integer");
        const Token& end = next();
        std::from_chars(end.text.data(), end.text.data() + end.text.size(), b);
        ValuesSpec v;
        const long long step = a <= b ? 1 : -1;
        for (long long x = a;; x += step) {
          v.values.emplace_back(static_cast<double>(x));
          if (x == b) break;
        }
        return v;
      }
      if (negative) syntax_error(start, "a level count");
      return CountSpec{static_cast<std::size_t>(natural("a level count"))};
    }
    if (at_punct("[")) return ValuesSpec{scalar_list(), false};
    if (peek().type != Tok::Ident) syntax_error(peek(), "a level specification");
    const std::string fn = peek().text;
    if (fn == "lvls") {
      next();
      expect_punct("(");
      auto vals = scalar_list();
      expect_punct(")");
      return ValuesSpec{std::move(vals), true};
    }
    if (fn == "crossed_by") return crossed();
    if (fn == "nested_in") {
      next();
      expect_punct("(");
      NestedSpec n;
      n.parent = ident("a parent factor");
      expect_punct(",");
      if (at_integer() && at_punct(")", 1)) {
        n.inner = CountSpec{static_cast<std::size_t>(natural("a level count"))};
      } else if (at_ident("crossed_by") && at_punct("(", 1)) {
        n.inner = crossed();
      } else {
        n.inner = rules();
      }
      expect_punct(")");
      return n;
    }
    if (fn == "conditioned_on") {
      next();
      expect_punct("(");
      ConditionedSpec c;
      c.parent = ident("a parent factor");
      expect_punct(",");
      c.rules = rules();
      expect_punct(")");
      return c;
    }
    syntax_error(peek(), "a level specification");
  }

  FactorDecl factor_decl() {
    const Token& start = peek();
    FactorDecl d;
    d.pos = {start.line, start.column};
    d.name = ident("a factor name");
    expect_punct("=");
    d.spec = level_spec();
    return d;
  }

  RecordDecl record_decl() {
    const Token& start = peek();
    RecordDecl d;
    d.pos = {start.line, start.column};
    d.names.push_back(ident("a record name"));
    while (at_punct(",")) {
      next();
      d.names.push_back(ident("a record name"));
    }
    if (!at_ident("of")) syntax_error(peek(), "'of'");
    next();
    d.unit = ident("a unit name");
    return d;
  }

  ExpectDecl expect_decl() {
    const Token& start = peek();
    ExpectDecl d;
    d.pos = {start.line, start.column};
    const std::string record = ident("a record name");
    if (at_ident("in")) {
      next();
      expect_punct("[");
      LevelsExpr l{record, {}};
      l.levels.push_back(label());
      while (at_punct(",")) {
        next();
        l.levels.push_back(label());
      }
      expect_punct("]");
      d.rule = l;
      return d;
    }
    static const std::map<std::string, Comparison, std::less<>> ops = {
        {"<", Comparison::Less}, {"<=", Comparison::LessEqual}, {">", Comparison::Greater}, {">=", Comparison::GreaterEqual}};
    if (peek().type != Tok::Punct || !ops.count(peek().text)) syntax_error(peek(), "a comparison or 'in'");
    const Comparison op = ops.find(next().text)->second;
    d.rule = BoundExpr{record, op, number("a number")};
    return d;
  }

  AllotDecl allot_decl() {
    const Token& start = peek();
    AllotDecl d;
    d.pos = {start.line, start.column};
    d.lhs.push_back(ident("a factor name"));
    while (at_punct(":")) {
      next();
      d.lhs.push_back(ident("a factor name"));
    }
    expect_punct("~");
    d.rhs = ident("a unit name");
    return d;
  }

  /// Items separated by commas or line breaks, inline after the header or
  /// on indented lines.
  template <class F>
  void separated(F item) {
    bool first_line = true;
    while (true) {
      if (peek().type == Tok::Newline) {
        next();
        first_line = false;
        if (!indented()) return;
        continue;
      }
      if (peek().type == Tok::End) return;
      if (!first_line && !indented()) return;
      item();
      if (at_punct(",")) {
        next();
        continue;
      }
      if (peek().type != Tok::Newline && peek().type != Tok::End) syntax_error(peek(), "',' or end of line");
    }
  }

  AssignBlock parse_assign(SourcePos pos) {
    AssignBlock b;
    b.pos = pos;
    bool constraining = false;
    separated([&] {
      const Token& start = peek();
      const std::string key = ident("an assign setting");
      if (key == "constrain" && at_punct(":")) {
        next();
        constraining = true;
        if (peek().type == Tok::Newline || peek().type == Tok::End) return;
        constraint(b, start);
        return;
      }
      if (key == "seed" && at_punct("=") && peek(1).type == Tok::Number) {
        next();
        b.seed = natural("a seed");
        return;
      }
      if (constraining) {
        --pos_;
        constraint(b, start);
        return;
      }
      expect_punct("=");
      if (key == "order") {
        b.order = name_list("an ordering name");
      } else if (key == "unit_order") {
        b.unit_order = name_list("an ordering name");
      } else {
        syntax_error(start, "order, unit_order, seed or constrain");
      }
    });
    return b;
  }

  void constraint(AssignBlock& b, const Token& start) {
    ConstraintDecl c;
    c.pos = {peek().line, peek().column};
    (void)start;
    c.unit = ident("a unit name");
    expect_punct("=");
    c.factors = name_list("a unit name");
    b.constrain.push_back(std::move(c));
  }

  OutputBlock parse_output(SourcePos pos) {
    OutputBlock b;
    b.pos = pos;
    separated([&] {
      const Token& start = peek();
      const std::string key = ident("an output setting");
      if (key != "label_nested") syntax_error(start, "label_nested");
      expect_punct("=");
      if (at_punct("*")) {
        next();
        b.label_nested_all = true;
        b.label_nested.clear();
      } else {
        b.label_nested = name_list("a factor name");
        b.label_nested_all = false;
      }
    });
    return b;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

[[noreturn]] void semantic_error(SourcePos pos, const std::string& token, const std::string& message) {
  throw SpecError(SpecError::Kind::Semantic, pos.line, pos.column, token,
                  "line " + std::to_string(pos.line) + ": " + message);
}

}  // namespace

void check_spec(const SpecAst& ast) {
  std::map<std::string, Role> scope;
  auto declare = [&](SourcePos pos, const std::string& name, Role role) {
    if (scope.count(name)) semantic_error(pos, name, "factor '" + name + "' is already defined");
    scope[name] = role;
  };
  auto require = [&](SourcePos pos, const std::string& name, std::optional<Role> role, const std::string& what) {
    auto it = scope.find(name);
    if (it == scope.end()) semantic_error(pos, name, "unknown factor '" + name + "'");
    if (role && it->second != *role) semantic_error(pos, name, "'" + name + "' is not " + what);
    return it->second;
  };
  auto check_factor = [&](const FactorDecl& d, Role role) {
    if (const auto* n = std::get_if<NestedSpec>(&d.spec)) {
      if (role != Role::Unit) semantic_error(d.pos, d.name, "treatment '" + d.name + "' cannot use nested_in");
      require(d.pos, n->parent, Role::Unit, "a unit");
      if (const auto* c = std::get_if<CrossedSpec>(&n->inner)) {
        for (const auto& p : c->parents) require(d.pos, p, Role::Unit, "a unit");
      }
    } else if (const auto* c = std::get_if<CrossedSpec>(&d.spec)) {
      if (role != Role::Unit) semantic_error(d.pos, d.name, "treatment '" + d.name + "' cannot use crossed_by");
      for (const auto& p : c->parents) require(d.pos, p, Role::Unit, "a unit");
    } else if (const auto* k = std::get_if<ConditionedSpec>(&d.spec)) {
      if (role != Role::Treatment) semantic_error(d.pos, d.name, "unit '" + d.name + "' cannot use conditioned_on");
      require(d.pos, k->parent, Role::Treatment, "a treatment");
    }
    declare(d.pos, d.name, role);
  };

  for (const auto& block : ast.blocks) {
    if (const auto* b = std::get_if<UnitsBlock>(&block)) {
      for (const auto& d : b->decls) check_factor(d, Role::Unit);
    } else if (const auto* b = std::get_if<TrtsBlock>(&block)) {
      for (const auto& d : b->decls) check_factor(d, Role::Treatment);
    } else if (const auto* b = std::get_if<RcrdsBlock>(&block)) {
      for (const auto& d : b->decls) {
        require(d.pos, d.unit, Role::Unit, "a unit");
        for (const auto& n : d.names) declare(d.pos, n, Role::Record);
      }
    } else if (const auto* b = std::get_if<ExpectBlock>(&block)) {
      for (const auto& d : b->decls) {
        const std::string& record = std::visit([](const auto& r) -> const std::string& { return r.record; }, d.rule);
        require(d.pos, record, Role::Record, "a record");
      }
    } else if (const auto* b = std::get_if<AllotBlock>(&block)) {
      for (const auto& d : b->decls) {
        require(d.pos, d.rhs, Role::Unit, "a unit");
        const Role first = require(d.pos, d.lhs.front(), std::nullopt, "");
        if (first == Role::Unit) {
          if (d.lhs.size() != 1) semantic_error(d.pos, d.lhs.front(), "a unit allotment takes one unit on the left");
          if (d.lhs.front() == d.rhs) semantic_error(d.pos, d.rhs, "unit '" + d.rhs + "' cannot be allotted to itself");
        } else {
          for (const auto& n : d.lhs) require(d.pos, n, Role::Treatment, "a treatment");
        }
      }
    } else if (const auto* b = std::get_if<AssignBlock>(&block)) {
      for (const auto& c : b->constrain) {
        require(c.pos, c.unit, Role::Unit, "a unit");
        for (const auto& f : c.factors) require(c.pos, f, Role::Unit, "a unit");
      }
    } else if (const auto* b = std::get_if<OutputBlock>(&block)) {
      for (const auto& n : b->label_nested) require(b->pos, n, std::nullopt, "");
    }
  }
}

SpecAst parse_spec(std::string_view text) {
  SpecAst ast = Parser(lex(text)).parse();
  check_spec(ast);
  return ast;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

bool plain_ident(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

std::string name(std::string_view s) { return plain_ident(s) ? std::string(s) : quote(s); }

std::string scalar_text(const Scalar& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  return quote(std::get<std::string>(v));
}

std::string list_text(const std::vector<Scalar>& vals) {
  std::string out = "[";
  for (std::size_t i = 0; i < vals.size(); ++i) out += (i ? ", " : "") + scalar_text(vals[i]);
  return out + "]";
}

std::string names_text(const std::vector<std::string>& names) {
  std::string out = "[";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + name(names[i]);
  return out + "]";
}

std::string rule_text(const PerParentRule& r) {
  std::string out;
  if (r.wildcard) {
    out = ".";
  } else {
    for (std::size_t i = 0; i < r.match.size(); ++i) out += (i ? ", " : "") + quote(r.match[i]);
  }
  out += " ~ ";
  if (const auto* c = std::get_if<CountSpec>(&r.spec)) return out + std::to_string(c->n);
  return out + list_text(std::get<ValuesSpec>(r.spec).values);
}

std::string rules_text(const std::vector<PerParentRule>& rules) {
  std::string out;
  for (std::size_t i = 0; i < rules.size(); ++i) out += (i ? ", " : "") + rule_text(rules[i]);
  return out;
}

std::string crossed_text(const CrossedSpec& c) {
  std::string out = "crossed_by(";
  for (std::size_t i = 0; i < c.parents.size(); ++i) out += (i ? ", " : "") + c.parents[i];
  return out + ")";
}

std::string spec_text(const LevelSpec& spec) {
  if (const auto* c = std::get_if<CountSpec>(&spec)) return std::to_string(c->n);
  if (const auto* v = std::get_if<ValuesSpec>(&spec)) {
    return v->single ? "lvls(" + list_text(v->values) + ")" : list_text(v->values);
  }
  if (const auto* n = std::get_if<NestedSpec>(&spec)) {
    std::string inner;
    if (const auto* c = std::get_if<CountSpec>(&n->inner)) {
      inner = std::to_string(c->n);
    } else if (const auto* x = std::get_if<CrossedSpec>(&n->inner)) {
      inner = crossed_text(*x);
    } else {
      inner = rules_text(std::get<std::vector<PerParentRule>>(n->inner));
    }
    return "nested_in(" + n->parent + ", " + inner + ")";
  }
  if (const auto* x = std::get_if<CrossedSpec>(&spec)) return crossed_text(*x);
  const auto& c = std::get<ConditionedSpec>(spec);
  return "conditioned_on(" + c.parent + ", " + rules_text(c.rules) + ")";
}

std::string_view op_text(Comparison op) {
  switch (op) {
    case Comparison::Less: return "<";
    case Comparison::LessEqual: return "<=";
    case Comparison::Greater: return ">";
    case Comparison::GreaterEqual: return ">=";
  }
  return "<";
}

}  // namespace

std::string unparse(const SpecAst& ast) {
  std::ostringstream out;
  out << "design";
  if (ast.title) out << " " << quote(*ast.title);
  out << "\n";
  for (const auto& block : ast.blocks) {
    if (const auto* b = std::get_if<UnitsBlock>(&block)) {
      out << "units:\n";
      for (const auto& d : b->decls) out << "  " << d.name << " = " << spec_text(d.spec) << "\n";
    } else if (const auto* b = std::get_if<TrtsBlock>(&block)) {
      out << "trts:\n";
      for (const auto& d : b->decls) out << "  " << d.name << " = " << spec_text(d.spec) << "\n";
    } else if (const auto* b = std::get_if<RcrdsBlock>(&block)) {
      out << "rcrds:\n";
      for (const auto& d : b->decls) {
        out << "  ";
        for (std::size_t i = 0; i < d.names.size(); ++i) out << (i ? ", " : "") << d.names[i];
        out << " of " << d.unit << "\n";
      }
    } else if (const auto* b = std::get_if<ExpectBlock>(&block)) {
      out << "expect:\n";
      for (const auto& d : b->decls) {
        if (const auto* r = std::get_if<BoundExpr>(&d.rule)) {
          out << "  " << r->record << " " << op_text(r->op) << " " << format_number(r->value) << "\n";
        } else if (const auto* l = std::get_if<LevelsExpr>(&d.rule)) {
          out << "  " << l->record << " in [";
          for (std::size_t i = 0; i < l->levels.size(); ++i) out << (i ? ", " : "") << quote(l->levels[i]);
          out << "]\n";
        }
      }
    } else if (const auto* b = std::get_if<AllotBlock>(&block)) {
      out << "allot:\n";
      for (const auto& d : b->decls) {
        out << "  ";
        for (std::size_t i = 0; i < d.lhs.size(); ++i) out << (i ? ":" : "") << d.lhs[i];
        out << " ~ " << d.rhs << "\n";
      }
    } else if (const auto* b = std::get_if<AssignBlock>(&block)) {
      out << "assign:\n";
      if (!b->order.empty()) out << "  order = " << names_text(b->order) << "\n";
      if (!b->unit_order.empty()) out << "  unit_order = " << names_text(b->unit_order) << "\n";
      if (b->seed) out << "  seed = " << *b->seed << "\n";
      if (!b->constrain.empty()) {
        out << "  constrain: ";
        for (std::size_t i = 0; i < b->constrain.size(); ++i) {
          out << (i ? ", " : "") << b->constrain[i].unit << " = " << names_text(b->constrain[i].factors);
        }
        out << "\n";
      }
    } else if (const auto* b = std::get_if<OutputBlock>(&block)) {
      out << "output:\n";
      if (b->label_nested_all) {
        out << "  label_nested = *\n";
      } else if (!b->label_nested.empty()) {
        out << "  label_nested = " << names_text(b->label_nested) << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace desgraph::dsl
