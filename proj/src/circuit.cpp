#include "pouw/circuit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "pouw/error.hpp"

namespace pouw {

ExprPtr make_ident(std::string name) {
  return std::make_shared<const Expr>(Expr{Identifier{std::move(name)}});
}
ExprPtr make_int(std::string digits) {
  return std::make_shared<const Expr>(Expr{IntLiteral{std::move(digits)}});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = std::get_if<Identifier>(&a.node)) return x->name == std::get<Identifier>(b.node).name;
  if (auto* x = std::get_if<IntLiteral>(&a.node)) return x->digits == std::get<IntLiteral>(b.node).digits;
  const auto& l = std::get<Binary>(a.node);
  const auto& r = std::get<Binary>(b.node);
  return l.op == r.op && expr_equal(*l.lhs, *r.lhs) && expr_equal(*l.rhs, *r.rhs);
}

std::size_t Circuit::count(Visibility v) const {
  return static_cast<std::size_t>(
      std::count_if(params.begin(), params.end(), [v](const Param& p) { return p.visibility == v; }));
}

std::vector<std::string> Circuit::output_names() const {
  std::vector<std::string> out;
  for (const auto& st : statements) {
    if (auto* local = std::get_if<LocalStmt>(&st)) {
      if (local->name.starts_with("out_")) out.push_back(local->name);
    }
  }
  return out;
}

const Param* Circuit::find_param(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

bool circuit_equal(const Circuit& a, const Circuit& b) {
  if (a.name != b.name || a.params != b.params || a.statements.size() != b.statements.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const auto& x = a.statements[i];
    const auto& y = b.statements[i];
    if (x.index() != y.index()) return false;
    if (auto* sa = std::get_if<AssertStmt>(&x)) {
      const auto& sb = std::get<AssertStmt>(y);
      if (sa->kind != sb.kind || !expr_equal(*sa->lhs, *sb.lhs) || !expr_equal(*sa->rhs, *sb.rhs)) {
        return false;
      }
    } else {
      const auto& la = std::get<LocalStmt>(x);
      const auto& lb = std::get<LocalStmt>(y);
      if (la.name != lb.name || !expr_equal(*la.value, *lb.value)) return false;
    }
  }
  return true;
}

namespace {

enum class Tok { ident, integer, symbol, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

constexpr std::array<std::string_view, 10> kKeywords{
    "def", "main", "private", "public", "field", "u32", "bool", "assert", "return", "true"};

bool is_keyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> toks;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      toks.push_back({Tok::ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      toks.push_back({Tok::integer, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    std::string_view two = src.substr(i, 2);
    if (two == "==" || two == "!=" || two == "->") {
      toks.push_back({Tok::symbol, std::string(two), l, cl});
      advance(2);
      continue;
    }
    if (std::string_view("(){},;=+-*").find(c) != std::string_view::npos) {
      toks.push_back({Tok::symbol, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw SyntaxError(l, cl, "token (found '" + std::string(1, c) + "')");
  }
  toks.push_back({Tok::end, "", line, col});
  return toks;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Circuit program() {
    Circuit c;
    keyword("def");
    keyword("main");
    symbol("(");
    c.params.push_back(param());
    while (accept_symbol(",")) c.params.push_back(param());
    symbol(")");
    symbol("->");
    keyword("bool");
    symbol("{");
    for (const auto& p : c.params) declare(p.name, prev());
    while (!peek_keyword("return")) c.statements.push_back(statement());
    keyword("return");
    keyword("true");
    symbol(";");
    symbol("}");
    if (peek().kind != Tok::end) fail("end of input");
    return c;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(peek().line, peek().col, expected);
  }
  bool peek_keyword(std::string_view kw) const {
    return peek().kind == Tok::ident && peek().text == kw;
  }
  void keyword(std::string_view kw) {
    if (!peek_keyword(kw)) fail("'" + std::string(kw) + "'");
    ++pos_;
  }
  bool accept_symbol(std::string_view s) {
    if (peek().kind == Tok::symbol && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  void symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("'" + std::string(s) + "'");
  }
  std::string identifier() {
    if (peek().kind != Tok::ident || is_keyword(peek().text)) fail("identifier");
    return toks_[pos_++].text;
  }

  void declare(const std::string& name, const Token& at) {
    if (!declared_.insert(name).second) {
      throw Error(Errc::DuplicateDeclaration, "'" + name + "' at line " + std::to_string(at.line) +
                                                  ", col " + std::to_string(at.col));
    }
  }

  Param param() {
    Param p{};
    if (peek_keyword("private")) {
      p.visibility = Visibility::private_input;
    } else if (peek_keyword("public")) {
      p.visibility = Visibility::public_input;
    } else {
      fail("'private' or 'public'");
    }
    ++pos_;
    if (peek_keyword("field")) {
      p.type = ParamType::field;
    } else if (peek_keyword("u32")) {
      p.type = ParamType::u32;
    } else {
      fail("'field' or 'u32'");
    }
    ++pos_;
    p.name = identifier();
    return p;
  }

  Statement statement() {
    if (peek_keyword("assert")) {
      ++pos_;
      symbol("(");
      AssertStmt a{};
      a.lhs = expr();
      if (accept_symbol("==")) {
        a.kind = AssertKind::equal;
      } else if (accept_symbol("!=")) {
        a.kind = AssertKind::not_equal;
      } else {
        fail("'==' or '!='");
      }
      a.rhs = expr();
      symbol(")");
      symbol(";");
      return a;
    }
    if (peek_keyword("field")) {
      ++pos_;
      const Token& at = peek();
      LocalStmt l;
      l.name = identifier();
      symbol("=");
      l.value = expr();
      symbol(";");
      declare(l.name, at);
      return l;
    }
    fail("'assert', 'field' or 'return'");
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (true) {
      if (accept_symbol("+")) {
        lhs = make_binary(BinaryOp::add, lhs, term());
      } else if (accept_symbol("-")) {
        lhs = make_binary(BinaryOp::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = atom();
    while (accept_symbol("*")) lhs = make_binary(BinaryOp::mul, lhs, atom());
    return lhs;
  }

  ExprPtr atom() {
    const Token& t = peek();
    if (t.kind == Tok::integer) {
      ++pos_;
      return make_int(t.text);
    }
    if (accept_symbol("(")) {
      ExprPtr e = expr();
      symbol(")");
      return e;
    }
    if (t.kind == Tok::ident && !is_keyword(t.text)) {
      ++pos_;
      if (!declared_.contains(t.text)) {
        throw Error(Errc::UndeclaredIdentifier, "'" + t.text + "' at line " + std::to_string(t.line) +
                                                    ", col " + std::to_string(t.col));
      }
      return make_ident(t.text);
    }
    fail("identifier, integer or '('");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::unordered_set<std::string> declared_;
};

int precedence(const Expr& e) {
  if (auto* b = std::get_if<Binary>(&e.node)) return b->op == BinaryOp::mul ? 2 : 1;
  return 3;
}

void print_expr(const Expr& e, std::string& out) {
  if (auto* id = std::get_if<Identifier>(&e.node)) {
    out += id->name;
    return;
  }
  if (auto* lit = std::get_if<IntLiteral>(&e.node)) {
    out += lit->digits;
    return;
  }
  const auto& b = std::get<Binary>(e.node);
  const int prec = b.op == BinaryOp::mul ? 2 : 1;
  const bool lparen = precedence(*b.lhs) < prec;
  const bool rparen = precedence(*b.rhs) <= prec;
  if (lparen) out += '(';
  print_expr(*b.lhs, out);
  if (lparen) out += ')';
  out += b.op == BinaryOp::add ? " + " : b.op == BinaryOp::sub ? " - " : " * ";
  if (rparen) out += '(';
  print_expr(*b.rhs, out);
  if (rparen) out += ')';
}

}  // namespace

Circuit parse_circuit(std::string_view source) { return Parser(lex(source)).program(); }

std::string canonical_source(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < source.size(); ++i) {
    char c = source[i];
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      while (i < source.size() && source[i] != '\n') ++i;
      pending_space = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

CircuitId circuit_id(std::string_view source) { return sha256(canonical_source(source)); }

std::string to_source(const Circuit& circuit) {
  std::string out = "def " + circuit.name + "(";
  for (std::size_t i = 0; i < circuit.params.size(); ++i) {
    const auto& p = circuit.params[i];
    out += i == 0 ? "\n    " : ",\n    ";
    out += p.visibility == Visibility::public_input ? "public " : "private ";
    out += p.type == ParamType::field ? "field " : "u32 ";
    out += p.name;
  }
  out += "\n) -> bool {\n";
  for (const auto& st : circuit.statements) {
    out += "    ";
    if (auto* a = std::get_if<AssertStmt>(&st)) {
      out += "assert(";
      print_expr(*a->lhs, out);
      out += a->kind == AssertKind::equal ? " == " : " != ";
      print_expr(*a->rhs, out);
      out += ");\n";
    } else {
      const auto& l = std::get<LocalStmt>(st);
      out += "field " + l.name + " = ";
      print_expr(*l.value, out);
      out += ";\n";
    }
  }
  out += "    return true;\n}\n";
  return out;
}

std::string synthetic_chain_source(std::size_t constraints, std::size_t n_private,
                                   bool with_integrity) {
  if (n_private == 0) throw Error(Errc::DomainError, "chain circuit needs a private input");
  const std::size_t chain = constraints - (with_integrity ? 1 : 0);
  if (constraints == 0 || chain == 0) {
    throw Error(Errc::DomainError, "chain circuit needs at least one product constraint");
  }
  auto factor = [n_private](std::size_t i) { return "x" + std::to_string(i % n_private); };
  std::string s = "// synthetic multiplication chain\ndef main(";
  for (std::size_t i = 0; i < n_private; ++i) s += "private field x" + std::to_string(i) + ", ";
  s += "public field result";
  if (with_integrity) s += ", public field integrity";
  s += ") -> bool {\n";
  if (with_integrity) s += "  assert(integrity != 0);\n";
  std::string acc = factor(0);
  for (std::size_t i = 1; i < chain; ++i) {
    std::string t = "t" + std::to_string(i);
    s += "  field " + t + " = " + acc + " * " + factor(i) + ";\n";
    acc = t;
  }
  s += "  assert(" + acc + " * " + factor(chain) + " == result);\n";
  s += "  return true;\n}\n";
  return s;
}

std::uint64_t synthetic_chain_result(const PrimeField& field,
                                     std::span<const std::uint64_t> private_values,
                                     std::size_t constraints, bool with_integrity) {
  const std::size_t chain = constraints - (with_integrity ? 1 : 0);
  std::uint64_t acc = 1;
  for (std::size_t i = 0; i <= chain; ++i) {
    acc = field.mul(acc, field.reduce(private_values[i % private_values.size()]));
  }
  return acc;
}

}  // namespace pouw
