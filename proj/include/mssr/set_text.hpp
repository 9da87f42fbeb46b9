#pragma once

// Textual polyhedral set syntax: [N,M] { [i,j] : 0 <= i < N and 0 <= j <= i }
// Chained comparisons expand left to right; `and` joins conjuncts.

#include "polyhedra.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace mssr {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string &msg, int l, int c)
      : std::runtime_error(msg + " at " + std::to_string(l) + ":" + std::to_string(c)),
        line(l), col(c) {}
};

namespace text {

struct Token {
  enum Kind { Ident, Number, Punct, End } kind;
  std::string s;
  int line, col;
};

inline std::vector<Token> tokenize(const std::string &src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k; ++j) {
      if (src[i + j] == '\n') {
        ++line;
        col = 1;
      } else
        ++col;
    }
    i += k;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace((unsigned char)c)) {
      advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum((unsigned char)src[j]) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Token::Ident, src.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) ++j;
      out.push_back({Token::Number, src.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    // multi-char operators
    static const char *two[] = {"<=", ">=", "==", "!=", "+=", "*=", "->"};
    bool matched = false;
    for (auto *op : two) {
      if (src.compare(i, 2, op) == 0) {
        out.push_back({Token::Punct, op, tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    out.push_back({Token::Punct, std::string(1, c), tl, tc});
    advance(1);
  }
  out.push_back({Token::End, "", line, col});
  return out;
}

struct Cursor {
  const std::vector<Token> *toks;
  size_t pos = 0;

  const Token &peek(size_t k = 0) const {
    size_t p = std::min(pos + k, toks->size() - 1);
    return (*toks)[p];
  }
  const Token &next() { return (*toks)[std::min(pos++, toks->size() - 1)]; }
  bool at(const std::string &s) const {
    return peek().kind != Token::End && peek().s == s;
  }
  bool accept(const std::string &s) {
    if (at(s)) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(const std::string &s) {
    if (!accept(s))
      throw ParseError("expected '" + s + "', found '" + peek().s + "'", peek().line,
                       peek().col);
  }
  std::string expect_ident() {
    if (peek().kind != Token::Ident)
      throw ParseError("expected identifier, found '" + peek().s + "'", peek().line,
                       peek().col);
    return next().s;
  }
};

// affine := term (('+'|'-') term)*
// term   := number ['*' factor] | factor ['*' number] | '(' affine ')' | '-' term
AffineForm parse_affine(Cursor &cur, const Space &sp);

inline AffineForm parse_affine_term(Cursor &cur, const Space &sp) {
  const Token &t = cur.peek();
  if (cur.accept("-")) return -parse_affine_term(cur, sp);
  if (cur.accept("(")) {
    AffineForm f = parse_affine(cur, sp);
    cur.expect(")");
    if (cur.at("*")) {
      cur.next();
      const Token &n = cur.peek();
      if (n.kind != Token::Number)
        throw ParseError("non-affine product", n.line, n.col);
      cur.next();
      return f.scaled(Rat(Int(n.s)));
    }
    return f;
  }
  if (t.kind == Token::Number) {
    cur.next();
    Rat k(Int(t.s));
    if (cur.accept("*")) {
      AffineForm f = parse_affine_term(cur, sp);
      return f.scaled(k);
    }
    return AffineForm::cst(sp, k);
  }
  if (t.kind == Token::Ident) {
    cur.next();
    AffineForm f = AffineForm::var(sp, t.s);
    if (cur.at("*")) {
      cur.next();
      const Token &n = cur.peek();
      if (n.kind != Token::Number)
        throw ParseError("non-affine product", n.line, n.col);
      cur.next();
      return f.scaled(Rat(Int(n.s)));
    }
    return f;
  }
  throw ParseError("expected affine expression, found '" + t.s + "'", t.line, t.col);
}

inline AffineForm parse_affine(Cursor &cur, const Space &sp) {
  AffineForm f = parse_affine_term(cur, sp);
  while (cur.at("+") || cur.at("-")) {
    bool plus = cur.next().s == "+";
    AffineForm g = parse_affine_term(cur, sp);
    f = plus ? f + g : f - g;
  }
  return f;
}

// constraint chain: aff (op aff)+ with op in <, <=, >, >=, =, ==
inline void parse_constraints(Cursor &cur, const Space &sp, ConvexSet &out) {
  while (true) {
    AffineForm lhs = parse_affine(cur, sp);
    bool any = false;
    while (cur.at("<") || cur.at("<=") || cur.at(">") || cur.at(">=") || cur.at("=") ||
           cur.at("==")) {
      std::string op = cur.next().s;
      AffineForm rhs = parse_affine(cur, sp);
      AffineForm d = rhs - lhs;
      if (op == "<") {
        d.constant -= 1;
        out.add_ineq(d);
      } else if (op == "<=") {
        out.add_ineq(d);
      } else if (op == ">") {
        d = -d;
        d.constant -= 1;
        out.add_ineq(d);
      } else if (op == ">=") {
        out.add_ineq(-d);
      } else {
        out.add_eq(d);
      }
      lhs = rhs;
      any = true;
    }
    if (!any) {
      const Token &t = cur.peek();
      throw ParseError("expected comparison", t.line, t.col);
    }
    if (!cur.accept("and")) break;
  }
}

// full set: '[' params ']' '{' '[' vars ']' [':' constraints] '}'
inline ConvexSet parse_set(Cursor &cur, const std::vector<std::string> &params) {
  Space sp;
  sp.params = params;
  cur.expect("{");
  cur.expect("[");
  if (!cur.at("]")) {
    sp.iter_vars.push_back(cur.expect_ident());
    while (cur.accept(",")) sp.iter_vars.push_back(cur.expect_ident());
  }
  cur.expect("]");
  ConvexSet out(sp);
  if (cur.accept(":")) parse_constraints(cur, sp, out);
  cur.expect("}");
  return out;
}

} // namespace text

// Parse "[N] { [i,j] : ... }" (leading parameter list included).
inline ConvexSet parse_set_text(const std::string &src) {
  auto toks = text::tokenize(src);
  text::Cursor cur{&toks, 0};
  std::vector<std::string> params;
  cur.expect("[");
  if (!cur.at("]")) {
    params.push_back(cur.expect_ident());
    while (cur.accept(",")) params.push_back(cur.expect_ident());
  }
  cur.expect("]");
  return text::parse_set(cur, params);
}

// Parse only the braced part with a caller-provided parameter list.
inline ConvexSet parse_braced_set(const std::string &src,
                                  const std::vector<std::string> &params) {
  auto toks = text::tokenize(src);
  text::Cursor cur{&toks, 0};
  return text::parse_set(cur, params);
}

} // namespace mssr
