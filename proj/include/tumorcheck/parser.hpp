#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tumorcheck/errors.hpp"
#include "tumorcheck/formula.hpp"

namespace tumorcheck {

enum class ParseErrorKind { syntax, unknown_identifier, out_of_range_literal };

struct ParseError : Error {
  ParseErrorKind kind;
  int line;
  int column;
  std::string expected;
  std::string found;

  ParseError(ParseErrorKind k, int ln, int col, std::string exp, std::string got)
      : Error(code_for(k), std::to_string(ln) + ":" + std::to_string(col) + ": expected " + exp +
                               ", found " + got),
        kind(k),
        line(ln),
        column(col),
        expected(std::move(exp)),
        found(std::move(got)) {}

 private:
  static Errc code_for(ParseErrorKind k) {
    switch (k) {
      case ParseErrorKind::unknown_identifier: return Errc::unknown_identifier;
      case ParseErrorKind::out_of_range_literal: return Errc::out_of_range_literal;
      default: return Errc::syntax_error;
    }
  }
};

namespace detail {

enum class Tok {
  kw_ex,
  kw_ef,
  kw_eg,
  kw_border,
  kw_connect,
  kw_str,
  kw_increase,
  kw_background,
  kw_brain,
  kw_intensity,
  kw_cluster,
  kw_check,
  ident,
  number,
  bang,
  amp,
  pipe,
  lparen,
  rparen,
  comma,
  lt,
  le,
  gt,
  ge,
  eq,
  eq_eq,
  semi,
  end
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int column = 1;
  bool has_dot = false;
};

inline std::string token_name(const Token& tok) {
  if (tok.kind == Tok::end) return "end of input";
  return "'" + tok.text + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blank();
      Token tok;
      tok.line = line_;
      tok.column = column_;
      if (pos_ >= src_.size()) {
        out.push_back(tok);
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        tok = word(tok);
      } else if (c >= '0' && c <= '9') {
        tok = number(tok);
      } else {
        tok = symbol(tok, c);
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  Token word(Token tok) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
    tok.text.assign(src_.substr(start, pos_ - start));
    tok.kind = keyword_kind(tok.text);
    return tok;
  }

  static Tok keyword_kind(std::string_view word) {
    if (word == "EX") return Tok::kw_ex;
    if (word == "EF") return Tok::kw_ef;
    if (word == "EG") return Tok::kw_eg;
    if (word == "border") return Tok::kw_border;
    if (word == "connect") return Tok::kw_connect;
    if (word == "str") return Tok::kw_str;
    if (word == "increase") return Tok::kw_increase;
    if (word == "background") return Tok::kw_background;
    if (word == "brain") return Tok::kw_brain;
    if (word == "intensity") return Tok::kw_intensity;
    if (word == "cluster") return Tok::kw_cluster;
    if (word == "check") return Tok::kw_check;
    return Tok::ident;
  }

  Token number(Token tok) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && src_[pos_ + 1] >= '0' &&
        src_[pos_ + 1] <= '9') {
      tok.has_dot = true;
      advance();
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
    }
    tok.text.assign(src_.substr(start, pos_ - start));
    tok.kind = Tok::number;
    return tok;
  }

  Token symbol(Token tok, char c) {
    auto two = [&](Tok kind, std::string text) {
      advance();
      advance();
      tok.kind = kind;
      tok.text = std::move(text);
      return tok;
    };
    auto one = [&](Tok kind) {
      advance();
      tok.kind = kind;
      tok.text = std::string(1, c);
      return tok;
    };
    char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    switch (c) {
      case '!': return one(Tok::bang);
      case '&': return one(Tok::amp);
      case '|': return one(Tok::pipe);
      case '(': return one(Tok::lparen);
      case ')': return one(Tok::rparen);
      case ',': return one(Tok::comma);
      case ';': return one(Tok::semi);
      case '<': return next == '=' ? two(Tok::le, "<=") : one(Tok::lt);
      case '>': return next == '=' ? two(Tok::ge, ">=") : one(Tok::gt);
      case '=': return next == '=' ? two(Tok::eq_eq, "==") : one(Tok::eq);
      default:
        throw ParseError(ParseErrorKind::syntax, tok.line, tok.column, "a token",
                         "'" + std::string(1, c) + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(Lexer(src).run()) {}

  FormulaPtr parse_single() {
    FormulaPtr formula = parse_or();
    expect(Tok::end, "end of input");
    return formula;
  }

  std::pair<std::vector<std::pair<std::string, FormulaPtr>>, std::vector<std::string>>
  parse_statements() {
    std::vector<std::pair<std::string, FormulaPtr>> bindings;
    std::vector<std::string> checks;
    while (peek().kind != Tok::end) {
      if (peek().kind == Tok::kw_check) {
        next();
        Token name = expect(Tok::ident, "a binding name");
        bool bound = false;
        for (const auto& [key, value] : bindings) bound = bound || key == name.text;
        if (!bound)
          throw ParseError(ParseErrorKind::unknown_identifier, name.line, name.column,
                           "a previously bound name", "'" + name.text + "'");
        checks.push_back(name.text);
        if (peek().kind == Tok::semi) next();
        continue;
      }
      Token name = expect(Tok::ident, "a binding name or 'check'");
      expect(Tok::eq, "'='");
      FormulaPtr formula = parse_or();
      expect(Tok::semi, "';'");
      for (auto& [key, value] : bindings)
        if (key == name.text) {
          value = formula;
          formula = nullptr;
          break;
        }
      if (formula) bindings.emplace_back(name.text, std::move(formula));
    }
    return {std::move(bindings), std::move(checks)};
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t idx = index_ + ahead;
    if (idx >= tokens_.size()) idx = tokens_.size() - 1;
    return tokens_[idx];
  }

  Token next() { return tokens_[index_ < tokens_.size() - 1 ? index_++ : index_]; }

  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind)
      throw ParseError(ParseErrorKind::syntax, peek().line, peek().column, what,
                       token_name(peek()));
    return next();
  }

  [[noreturn]] void fail(const char* what) {
    throw ParseError(ParseErrorKind::syntax, peek().line, peek().column, what, token_name(peek()));
  }

  int parse_int(int lo, int hi, const char* what) {
    Token tok = expect(Tok::number, "an integer");
    if (tok.has_dot)
      throw ParseError(ParseErrorKind::syntax, tok.line, tok.column, "an integer",
                       "'" + tok.text + "'");
    int value = 0;
    auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (res.ec != std::errc() || value < lo || value > hi)
      throw ParseError(ParseErrorKind::out_of_range_literal, tok.line, tok.column, what,
                       "'" + tok.text + "'");
    return value;
  }

  double parse_real(const char* what) {
    Token tok = expect(Tok::number, "a number");
    double value = 0;
    auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (res.ec != std::errc())
      throw ParseError(ParseErrorKind::out_of_range_literal, tok.line, tok.column, what,
                       "'" + tok.text + "'");
    real_line_ = tok.line;
    real_column_ = tok.column;
    real_text_ = tok.text;
    return value;
  }

  [[noreturn]] void real_out_of_range(const char* what) {
    throw ParseError(ParseErrorKind::out_of_range_literal, real_line_, real_column_, what,
                     "'" + real_text_ + "'");
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (peek().kind == Tok::pipe) {
      next();
      lhs = f::disj(std::move(lhs), parse_and());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (peek().kind == Tok::amp) {
      next();
      lhs = f::conj(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    switch (peek().kind) {
      case Tok::bang: next(); return f::neg(parse_unary());
      case Tok::kw_ex: next(); return f::ex(parse_unary());
      case Tok::kw_ef: next(); return f::ef(parse_unary());
      case Tok::kw_eg: next(); return f::eg(parse_unary());
      default: return parse_primary();
    }
  }

  FormulaPtr parse_primary() {
    switch (peek().kind) {
      case Tok::kw_border: next(); return f::border();
      case Tok::kw_intensity: return parse_intensity();
      case Tok::kw_cluster: return parse_cluster();
      case Tok::kw_connect: return parse_connect();
      case Tok::kw_str: return parse_str();
      case Tok::kw_increase: return parse_two_arg(FormulaKind::increase, "increase");
      case Tok::kw_background: return parse_background();
      case Tok::kw_brain: return parse_two_arg(FormulaKind::brain, "brain");
      case Tok::lparen: {
        next();
        FormulaPtr inner = parse_or();
        expect(Tok::rparen, "')'");
        return inner;
      }
      case Tok::ident:
        throw ParseError(ParseErrorKind::unknown_identifier, peek().line, peek().column,
                         "a formula", token_name(peek()));
      default: fail("a formula");
    }
  }

  FormulaPtr parse_intensity() {
    next();
    CmpOp op;
    switch (peek().kind) {
      case Tok::lt: op = CmpOp::lt; break;
      case Tok::le: op = CmpOp::le; break;
      case Tok::gt: op = CmpOp::gt; break;
      case Tok::ge: op = CmpOp::ge; break;
      case Tok::eq_eq: op = CmpOp::eq; break;
      default: fail("a comparison operator");
    }
    next();
    return f::intensity(op, parse_int(0, 255, "an intensity in [0, 255]"));
  }

  FormulaPtr parse_cluster() {
    next();
    expect(Tok::eq_eq, "'=='");
    return f::cluster(parse_int(0, 255, "a cluster level in [0, 255]"));
  }

  FormulaPtr parse_connect() {
    next();
    expect(Tok::lparen, "'('");
    FormulaPtr first = parse_or();
    expect(Tok::comma, "','");
    if (peek().kind == Tok::number) {
      double t = parse_real("a threshold in [0, 1]");
      if (t < 0.0 || t > 1.0) real_out_of_range("a threshold in [0, 1]");
      expect(Tok::comma, "','");
      FormulaPtr second = parse_or();
      expect(Tok::rparen, "')'");
      return f::connect(std::move(first), t, std::move(second));
    }
    FormulaPtr second = parse_or();
    expect(Tok::rparen, "')'");
    return f::connect(std::move(first), std::move(second));
  }

  FormulaPtr parse_str() {
    next();
    expect(Tok::lparen, "'('");
    double d = parse_real("a positive distance");
    if (!(d > 0.0)) real_out_of_range("a positive distance");
    expect(Tok::comma, "','");
    FormulaPtr second = parse_or();
    expect(Tok::rparen, "')'");
    return f::str(d, std::move(second));
  }

  FormulaPtr parse_background() {
    next();
    expect(Tok::lparen, "'('");
    FormulaPtr inner = parse_or();
    expect(Tok::rparen, "')'");
    return f::background(std::move(inner));
  }

  FormulaPtr parse_two_arg(FormulaKind kind, const char*) {
    next();
    expect(Tok::lparen, "'('");
    FormulaPtr first = parse_or();
    expect(Tok::comma, "','");
    FormulaPtr second = parse_or();
    expect(Tok::rparen, "')'");
    return f::binary(kind, std::move(first), std::move(second));
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  int real_line_ = 1;
  int real_column_ = 1;
  std::string real_text_;
};

}  // namespace detail

inline FormulaPtr parse(std::string_view text) { return detail::Parser(text).parse_single(); }

/// Named formula bindings plus the names selected for checking, in file order.
struct SpecFile {
  std::vector<std::pair<std::string, FormulaPtr>> bindings;
  std::vector<std::string> checks;

  const FormulaPtr* find(std::string_view name) const {
    for (const auto& [key, value] : bindings)
      if (key == name) return &value;
    return nullptr;
  }
};

inline SpecFile parse_spec(std::string_view text) {
  auto [bindings, checks] = detail::Parser(text).parse_statements();
  return SpecFile{std::move(bindings), std::move(checks)};
}

}  // namespace tumorcheck
