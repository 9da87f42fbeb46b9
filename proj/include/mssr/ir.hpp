#pragma once

// Equational array IR: parameterized array declarations plus ordered guarded
// assignment / reduction statements over polyhedral domains.

#include "set_text.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mssr {

struct IrError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Reduction operators

struct ReductionOp {
  std::string name;             // sum | product | min | max
  std::string symbol;           // +=  | *=      | min= | max=
  std::optional<Rat> identity;  // none for min/max
  bool has_inverse = false;

  Rat combine(const Rat &a, const Rat &b) const {
    if (name == "sum") return a + b;
    if (name == "product") return a * b;
    if (name == "min") return b < a ? b : a;
    return a < b ? b : a;
  }
  // Remove one contribution b from accumulator a (sum/product only).
  Rat uncombine(const Rat &a, const Rat &b) const {
    if (name == "sum") return a - b;
    if (name == "product") {
      if (b == 0) throw IrError("division by zero while inverting a product");
      return a / b;
    }
    throw IrError("operator '" + name + "' has no inverse");
  }
};

inline ReductionOp reduction_op(const std::string &name) {
  if (name == "sum") return {"sum", "+=", Rat(0), true};
  if (name == "product") return {"product", "*=", Rat(1), true};
  if (name == "min") return {"min", "min=", std::nullopt, false};
  if (name == "max") return {"max", "max=", std::nullopt, false};
  throw IrError("unknown reduction operator '" + name + "'");
}

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum Kind { Affine, Read, Bin, Ternary, Call } kind;
  std::optional<AffineForm> aff;  // Affine
  std::string name;               // Read: array; Call: intrinsic; Bin: op
  std::vector<AffineForm> index;  // Read
  std::string cmp;                // Ternary guard comparison
  std::vector<ExprPtr> args;      // Bin: {l,r}; Ternary: {gl,gr,then,else}; Call
};

inline ExprPtr make_affine(AffineForm f) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Affine;
  e->aff = std::move(f);
  return e;
}
inline ExprPtr make_read(std::string array, std::vector<AffineForm> idx) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Read;
  e->name = std::move(array);
  e->index = std::move(idx);
  return e;
}
inline ExprPtr make_bin(std::string op, ExprPtr l, ExprPtr r) {
  if (l->kind == Expr::Affine && r->kind == Expr::Affine) {
    const AffineForm &a = *l->aff, &b = *r->aff;
    if (op == "+") return make_affine(a + b);
    if (op == "-") return make_affine(a - b);
    if (op == "*" && a.is_constant()) return make_affine(b.scaled(a.constant));
    if (op == "*" && b.is_constant()) return make_affine(a.scaled(b.constant));
    if (op == "/" && b.is_constant()) {
      if (b.constant == 0) throw IrError("division by zero constant");
      return make_affine(a.scaled(Rat(1) / b.constant));
    }
  }
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Bin;
  e->name = std::move(op);
  e->args = {std::move(l), std::move(r)};
  return e;
}
inline ExprPtr make_ternary(ExprPtr gl, std::string cmp, ExprPtr gr, ExprPtr t,
                            ExprPtr f) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Ternary;
  e->cmp = std::move(cmp);
  e->args = {std::move(gl), std::move(gr), std::move(t), std::move(f)};
  return e;
}
inline ExprPtr make_call(std::string callee, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Call;
  e->name = std::move(callee);
  e->args = std::move(args);
  return e;
}

// ---------------------------------------------------------------------------
// Declarations, statements, programs

enum class ArrayKind { Input, Intermediate, Output };

struct ArrayDecl {
  std::string name;
  ConvexSet index_space;  // element domain over params only
  ArrayKind kind;
};

struct Statement {
  std::string label;
  std::string lhs_array;
  std::vector<AffineForm> lhs_index;
  enum Kind { Assign, Reduce } kind;
  ReductionOp op;  // meaningful when kind == Reduce
  ExprPtr rhs;
  ConvexSet domain;

  Statement() : kind(Assign), domain(Space{}) {}
};

struct Program {
  std::vector<std::string> params;
  std::vector<ArrayDecl> arrays;
  std::vector<Statement> statements;
  std::set<std::string> intrinsics;

  const ArrayDecl *find_array(const std::string &name) const {
    for (auto &a : arrays)
      if (a.name == name) return &a;
    return nullptr;
  }
  const Statement *find_statement(const std::string &label) const {
    for (auto &s : statements)
      if (s.label == label) return &s;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Expression traversal

inline void visit_exprs(const ExprPtr &e, const std::function<void(const Expr &)> &f) {
  f(*e);
  for (auto &a : e->args) visit_exprs(a, f);
}

struct ReadRef {
  std::string array;
  std::vector<AffineForm> index;
  bool in_guard;
};

// Every array read in the expression, guards included (guarded reads count as
// unconditional reads: a sound over-approximation for dependence purposes).
inline std::vector<ReadRef> collect_reads(const ExprPtr &root) {
  std::vector<ReadRef> out;
  std::function<void(const ExprPtr &, bool)> go = [&](const ExprPtr &e, bool guard) {
    if (e->kind == Expr::Read) out.push_back({e->name, e->index, guard});
    if (e->kind == Expr::Ternary) {
      go(e->args[0], true);
      go(e->args[1], true);
      go(e->args[2], guard);
      go(e->args[3], guard);
      return;
    }
    for (auto &a : e->args) go(a, guard);
  };
  go(root, false);
  return out;
}

// Every affine leaf (bare variables, guard bounds, scalar factors).
inline std::vector<AffineForm> collect_affine_atoms(const ExprPtr &root) {
  std::vector<AffineForm> out;
  visit_exprs(root, [&](const Expr &e) {
    if (e.kind == Expr::Affine) out.push_back(*e.aff);
  });
  return out;
}

// Shift every domain-variable reference in the expression by r: each affine
// form f(x) becomes f(x + r).
inline AffineForm shifted_vars(const AffineForm &f, const DirVector &r) {
  AffineForm g = f;
  for (size_t i = 0; i < g.coeffs.size() && i < r.entries.size(); ++i)
    g.constant += g.coeffs[i] * Rat(r.entries[i]);
  return g;
}

inline ExprPtr shift_expr(const ExprPtr &e, const DirVector &r) {
  auto n = std::make_shared<Expr>(*e);
  if (n->aff) n->aff = shifted_vars(*n->aff, r);
  for (auto &idx : n->index) idx = shifted_vars(idx, r);
  for (auto &a : n->args) a = shift_expr(a, r);
  return n;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string index_list_str(const std::vector<AffineForm> &idx, const Space &sp) {
  std::string s = "[";
  for (size_t i = 0; i < idx.size(); ++i) s += (i ? ", " : "") + idx[i].str(sp);
  return s + "]";
}

inline std::string expr_str(const ExprPtr &e, const Space &sp, bool parens) {
  switch (e->kind) {
    case Expr::Affine: {
      std::string s = e->aff->str(sp);
      bool atom = e->aff->is_constant();
      if (!atom) {
        int nz = 0;
        for (auto &c : e->aff->coeffs) nz += c != 0;
        for (auto &c : e->aff->pcoeffs) nz += c != 0;
        atom = nz == 1 && e->aff->constant == 0 && s.find('-') == std::string::npos &&
               s.find('*') == std::string::npos;
      }
      if (atom && !s.empty() && s[0] == '-') atom = false;
      return parens && !atom ? "(" + s + ")" : s;
    }
    case Expr::Read:
      return e->name + index_list_str(e->index, sp);
    case Expr::Bin: {
      if (e->name == "min" || e->name == "max")
        return e->name + "(" + expr_str(e->args[0], sp, false) + ", " +
               expr_str(e->args[1], sp, false) + ")";
      std::string s = expr_str(e->args[0], sp, true) + " " + e->name + " " +
                      expr_str(e->args[1], sp, true);
      return parens ? "(" + s + ")" : s;
    }
    case Expr::Ternary: {
      std::string s = expr_str(e->args[0], sp, true) + " " + e->cmp + " " +
                      expr_str(e->args[1], sp, true) + " ? " +
                      expr_str(e->args[2], sp, true) + " : " +
                      expr_str(e->args[3], sp, true);
      return parens ? "(" + s + ")" : s;
    }
    case Expr::Call: {
      std::string s = e->name + "(";
      for (size_t i = 0; i < e->args.size(); ++i)
        s += (i ? ", " : "") + expr_str(e->args[i], sp, false);
      return s + ")";
    }
  }
  return "";
}

}  // namespace detail

inline std::string set_to_text(const ConvexSet &S) {
  std::string s = "{ [";
  for (size_t i = 0; i < S.space.iter_vars.size(); ++i)
    s += (i ? ", " : "") + S.space.iter_vars[i];
  s += "]";
  std::vector<std::string> cons;
  for (auto f : S.equalities) {
    // print equalities with a positive leading coefficient so that printing is
    // a fixed point of parse (which stores rhs - lhs)
    Rat lead = f.constant;
    for (auto it = f.pcoeffs.rbegin(); it != f.pcoeffs.rend(); ++it)
      if (*it != 0) lead = *it;
    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it)
      if (*it != 0) lead = *it;
    if (lead < 0) f = -f;
    cons.push_back(f.str(S.space) + " = 0");
  }
  for (auto &f : S.inequalities) cons.push_back(f.str(S.space) + " >= 0");
  if (!cons.empty()) {
    s += " : ";
    for (size_t i = 0; i < cons.size(); ++i) s += (i ? " and " : "") + cons[i];
  }
  return s + " }";
}

inline std::string pretty_print(const Program &p) {
  std::ostringstream os;
  for (auto &n : p.params) os << "param " << n << ";\n";
  for (auto &a : p.arrays) {
    const char *k = a.kind == ArrayKind::Input      ? "input"
                    : a.kind == ArrayKind::Output   ? "output"
                                                    : "intermediate";
    os << k << " " << a.name << " : [";
    for (size_t i = 0; i < p.params.size(); ++i) os << (i ? "," : "") << p.params[i];
    os << "] " << set_to_text(a.index_space) << ";\n";
  }
  for (auto &s : p.statements) {
    const std::string op = s.kind == Statement::Assign ? "=" : s.op.symbol;
    os << s.label << ": " << s.lhs_array
       << detail::index_list_str(s.lhs_index, s.domain.space) << " " << op << " "
       << detail::expr_str(s.rhs, s.domain.space, false) << " : "
       << set_to_text(s.domain) << ";\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline ExprPtr parse_expr(text::Cursor &cur, const Space &sp);

inline ExprPtr parse_primary(text::Cursor &cur, const Space &sp) {
  const text::Token &t = cur.peek();
  if (cur.accept("(")) {
    ExprPtr e = parse_expr(cur, sp);
    cur.expect(")");
    return e;
  }
  if (t.kind == text::Token::Number) {
    cur.next();
    return make_affine(AffineForm::cst(sp, Rat(Int(t.s))));
  }
  if (t.kind == text::Token::Ident) {
    std::string name = cur.next().s;
    if (cur.accept("(")) {
      if (name == "min" || name == "max") {
        ExprPtr a = parse_expr(cur, sp);
        cur.expect(",");
        ExprPtr b = parse_expr(cur, sp);
        cur.expect(")");
        return make_bin(name, a, b);
      }
      std::vector<ExprPtr> args;
      if (!cur.at(")")) {
        args.push_back(parse_expr(cur, sp));
        while (cur.accept(",")) args.push_back(parse_expr(cur, sp));
      }
      cur.expect(")");
      return make_call(name, std::move(args));
    }
    if (cur.accept("[")) {
      std::vector<AffineForm> idx;
      if (!cur.at("]")) {
        idx.push_back(text::parse_affine(cur, sp));
        while (cur.accept(",")) idx.push_back(text::parse_affine(cur, sp));
      }
      cur.expect("]");
      return make_read(name, std::move(idx));
    }
    if (sp.var_index(name) < 0 && sp.param_index(name) < 0)
      throw ParseError("unknown identifier '" + name + "'", t.line, t.col);
    return make_affine(AffineForm::var(sp, name));
  }
  throw ParseError("expected expression, found '" + t.s + "'", t.line, t.col);
}

inline ExprPtr parse_unary(text::Cursor &cur, const Space &sp) {
  if (cur.accept("-")) {
    ExprPtr e = parse_unary(cur, sp);
    if (e->kind == Expr::Affine) return make_affine(-*e->aff);
    return make_bin("-", make_affine(AffineForm::cst(sp, Rat(0))), e);
  }
  return parse_primary(cur, sp);
}

inline ExprPtr parse_mul(text::Cursor &cur, const Space &sp) {
  ExprPtr e = parse_unary(cur, sp);
  while (cur.at("*") || cur.at("/")) {
    std::string op = cur.next().s;
    e = make_bin(op, e, parse_unary(cur, sp));
  }
  return e;
}

inline ExprPtr parse_add(text::Cursor &cur, const Space &sp) {
  ExprPtr e = parse_mul(cur, sp);
  while (cur.at("+") || cur.at("-")) {
    std::string op = cur.next().s;
    e = make_bin(op, e, parse_mul(cur, sp));
  }
  return e;
}

inline ExprPtr parse_expr(text::Cursor &cur, const Space &sp) {
  ExprPtr e = parse_add(cur, sp);
  for (const char *op : {"==", "<=", ">=", "<", ">"}) {
    if (cur.at(op)) {
      cur.next();
      ExprPtr r = parse_add(cur, sp);
      cur.expect("?");
      ExprPtr t = parse_expr(cur, sp);
      cur.expect(":");
      ExprPtr f = parse_expr(cur, sp);
      return make_ternary(e, op, r, t, f);
    }
  }
  return e;
}

}  // namespace detail

inline Program parse_program(const std::string &src) {
  auto toks = text::tokenize(src);
  text::Cursor cur{&toks, 0};
  Program p;
  auto err = [&](const std::string &m) -> ParseError {
    return ParseError(m, cur.peek().line, cur.peek().col);
  };

  while (cur.peek().kind != text::Token::End) {
    if (cur.accept("param")) {
      p.params.push_back(cur.expect_ident());
      while (cur.accept(",")) p.params.push_back(cur.expect_ident());
      cur.expect(";");
      continue;
    }
    if (cur.at("input") || cur.at("output") || cur.at("intermediate")) {
      std::string kw = cur.next().s;
      ArrayKind kind = kw == "input"    ? ArrayKind::Input
                       : kw == "output" ? ArrayKind::Output
                                        : ArrayKind::Intermediate;
      std::string name = cur.expect_ident();
      if (p.find_array(name)) throw err("duplicate array '" + name + "'");
      cur.expect(":");
      cur.expect("[");
      std::vector<std::string> params;
      if (!cur.at("]")) {
        params.push_back(cur.expect_ident());
        while (cur.accept(",")) params.push_back(cur.expect_ident());
      }
      cur.expect("]");
      for (auto &q : params)
        if (std::find(p.params.begin(), p.params.end(), q) == p.params.end())
          throw err("undeclared parameter '" + q + "'");
      ConvexSet S = text::parse_set(cur, p.params);
      cur.expect(";");
      p.arrays.push_back({name, std::move(S), kind});
      continue;
    }
    // Statement: LABEL ':' ARR '[' afflist ']' OP expr ':' SET ';'
    std::string label = cur.expect_ident();
    if (p.find_statement(label)) throw err("duplicate statement label '" + label + "'");
    cur.expect(":");

    // The domain comes last, but index lists and the RHS need its space, so
    // locate the trailing ': {' and parse the set first.
    size_t semi = cur.pos;
    while ((*cur.toks)[semi].kind != text::Token::End && (*cur.toks)[semi].s != ";")
      ++semi;
    if ((*cur.toks)[semi].kind == text::Token::End) throw err("missing ';'");
    size_t dom = semi;
    while (dom > cur.pos &&
           !((*cur.toks)[dom].s == ":" && (*cur.toks)[dom + 1].s == "{"))
      --dom;
    if (dom == cur.pos) throw err("statement '" + label + "' has no domain");
    text::Cursor dcur{cur.toks, dom + 1};
    Statement st;
    st.label = label;
    st.domain = text::parse_set(dcur, p.params);
    if (dcur.pos != semi) throw err("trailing tokens after domain of '" + label + "'");
    const Space &sp = st.domain.space;

    st.lhs_array = cur.expect_ident();
    const ArrayDecl *decl = p.find_array(st.lhs_array);
    if (!decl) throw err("write to undeclared array '" + st.lhs_array + "'");
    if (decl->kind == ArrayKind::Input)
      throw err("statement '" + label + "' writes input array '" + st.lhs_array + "'");
    cur.expect("[");
    if (!cur.at("]")) {
      st.lhs_index.push_back(text::parse_affine(cur, sp));
      while (cur.accept(",")) st.lhs_index.push_back(text::parse_affine(cur, sp));
    }
    cur.expect("]");
    if (st.lhs_index.size() != decl->index_space.space.nvars())
      throw err("index arity mismatch on '" + st.lhs_array + "'");

    if (cur.accept("=")) {
      st.kind = Statement::Assign;
    } else if (cur.accept("+=")) {
      st.kind = Statement::Reduce;
      st.op = reduction_op("sum");
    } else if (cur.accept("*=")) {
      st.kind = Statement::Reduce;
      st.op = reduction_op("product");
    } else if ((cur.at("min") || cur.at("max")) && cur.peek(1).s == "=") {
      st.kind = Statement::Reduce;
      st.op = reduction_op(cur.next().s);
      cur.next();
    } else {
      throw err("expected '=', '+=', '*=', 'min=' or 'max=' in '" + label + "'");
    }

    st.rhs = detail::parse_expr(cur, sp);
    if (cur.pos != dom) throw err("trailing tokens after RHS of '" + label + "'");
    cur.pos = semi + 1;
    p.statements.push_back(std::move(st));
  }

  // Resolve reads and record intrinsics.
  for (auto &s : p.statements) {
    visit_exprs(s.rhs, [&](const Expr &e) {
      if (e.kind != Expr::Call) return;
      if (e.name != "f" && e.name != "g" && e.name != "sample")
        throw IrError("unknown intrinsic '" + e.name + "'");
      p.intrinsics.insert(e.name);
    });
    for (auto &rd : collect_reads(s.rhs)) {
      const ArrayDecl *d = p.find_array(rd.array);
      if (!d) throw IrError("read of undeclared array '" + rd.array + "'");
      if (rd.index.size() != d->index_space.space.nvars())
        throw IrError("index arity mismatch on read of '" + rd.array + "'");
      if (d->kind != ArrayKind::Input) {
        bool written = false;
        for (auto &w : p.statements) written |= w.lhs_array == rd.array;
        if (!written)
          throw IrError("array '" + rd.array + "' is read but never written");
      }
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Access relations

struct AccessInfo {
  Relation write;
  std::vector<std::pair<std::string, Relation>> reads;
};

namespace detail {

// {x -> idx(x)} restricted to dom, with the array's index space as range.
inline Relation access_map(const ConvexSet &dom, const Space &array_space,
                           const std::vector<AffineForm> &idx) {
  Space out = array_space;
  out.params = dom.space.params;
  Relation R = make_relation(dom.space, out);
  size_t ni = dom.space.nvars();
  for (size_t k = 0; k < idx.size(); ++k) {
    AffineForm eq(R.cons.space);
    for (size_t i = 0; i < ni; ++i) eq.coeffs[i] = idx[k].coeffs[i];
    eq.coeffs[ni + k] = -1;
    eq.pcoeffs = idx[k].pcoeffs;
    eq.constant = idx[k].constant;
    R.cons.add_eq(eq);
  }
  return restrict_domain(R, dom);
}

}  // namespace detail

inline AccessInfo access_relations(const Program &p, const Statement &s) {
  const ArrayDecl *lhs = p.find_array(s.lhs_array);
  if (!lhs) throw IrError("unknown LHS array '" + s.lhs_array + "'");
  AccessInfo info{detail::access_map(s.domain, lhs->index_space.space, s.lhs_index), {}};
  for (auto &rd : collect_reads(s.rhs)) {
    const ArrayDecl *d = p.find_array(rd.array);
    if (!d) throw IrError("unknown array '" + rd.array + "'");
    info.reads.emplace_back(
        rd.array, detail::access_map(s.domain, d->index_space.space, rd.index));
  }
  return info;
}

inline Relation reduction_projection(const Program &p, const Statement &s) {
  if (s.kind != Statement::Reduce)
    throw IrError("reduction_projection on non-reduction '" + s.label + "'");
  return access_relations(p, s).write;
}

// Domain variables no RHS read index or affine atom depends on.
inline std::set<std::string> free_index_vars(const Statement &s) {
  const Space &sp = s.domain.space;
  std::vector<bool> bound(sp.nvars(), false);
  auto mark = [&](const AffineForm &f) {
    for (size_t i = 0; i < f.coeffs.size(); ++i)
      if (f.coeffs[i] != 0) bound[i] = true;
  };
  for (auto &rd : collect_reads(s.rhs))
    for (auto &f : rd.index) mark(f);
  for (auto &f : collect_affine_atoms(s.rhs)) mark(f);
  std::set<std::string> out;
  for (size_t i = 0; i < bound.size(); ++i)
    if (!bound[i]) out.insert(sp.iter_vars[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Array SSA check: at a probe binding, every array cell is written by at most
// one statement, and assignments write each of their cells exactly once.
// A reduction counts as one logical write per LHS cell.

struct SsaReport {
  bool ok = true;
  std::string array;
  std::string writer_a, writer_b;  // equal labels: same-statement double write
  Point cell;
  std::string str() const {
    if (ok) return "ok";
    std::string s = "array " + array + " cell (";
    for (size_t i = 0; i < cell.size(); ++i)
      s += (i ? "," : "") + std::to_string(cell[i]);
    return s + ") written by " + writer_a +
           (writer_a == writer_b ? " twice" : " and " + writer_b);
  }
};

inline SsaReport check_array_ssa(const Program &p, const Binding &binding) {
  std::map<std::string, std::map<Point, std::string>> written;
  for (auto &s : p.statements) {
    const ArrayDecl *decl = p.find_array(s.lhs_array);
    auto &cells = written[s.lhs_array];
    if (s.kind == Statement::Reduce) {
      ConvexSet img = apply(access_relations(p, s).write, s.domain);
      for (auto &pt : enumerate_points(img, binding)) {
        auto [it, fresh] = cells.emplace(pt, s.label);
        if (!fresh) return {false, s.lhs_array, it->second, s.label, pt};
      }
    } else {
      std::vector<Rat> pvals = param_values(s.domain.space, binding);
      for (auto &inst : enumerate_points(s.domain, binding)) {
        std::vector<Rat> rpt(inst.begin(), inst.end());
        Point cell;
        for (auto &f : s.lhs_index) cell.push_back(to_i64(rat_num(f.eval(rpt, pvals))));
        auto [it, fresh] = cells.emplace(cell, s.label);
        if (!fresh) return {false, s.lhs_array, it->second, s.label, cell};
      }
    }
    (void)decl;
  }
  return {};
}

inline SsaReport check_array_ssa(const Program &p) {
  Binding b;
  for (auto &q : p.params) b[q] = 6;
  return check_array_ssa(p, b);
}

// ---------------------------------------------------------------------------
// Bounds check: every read and write lands inside the array's index space at
// the probe binding. Returns a witness description or empty string.

inline std::string check_bounds(const Program &p, const Binding &binding) {
  for (auto &s : p.statements) {
    std::vector<Rat> pvals = param_values(s.domain.space, binding);
    std::vector<std::pair<std::string, std::vector<AffineForm>>> accesses;
    accesses.emplace_back(s.lhs_array, s.lhs_index);
    for (auto &rd : collect_reads(s.rhs)) accesses.emplace_back(rd.array, rd.index);
    for (auto &inst : enumerate_points(s.domain, binding)) {
      std::vector<Rat> rpt(inst.begin(), inst.end());
      for (auto &[arr, idx] : accesses) {
        const ArrayDecl *d = p.find_array(arr);
        Point cell;
        bool integral = true;
        for (auto &f : idx) {
          Rat v = f.eval(rpt, pvals);
          if (rat_den(v) != 1) integral = false;
          cell.push_back(integral ? to_i64(rat_num(v)) : 0);
        }
        std::vector<Rat> apvals = param_values(d->index_space.space, binding);
        std::vector<Rat> rcell(cell.begin(), cell.end());
        if (!integral || !d->index_space.contains(rcell, apvals)) {
          std::string w = s.label + " accesses " + arr + " out of bounds at (";
          for (size_t i = 0; i < cell.size(); ++i)
            w += (i ? "," : "") + std::to_string(cell[i]);
          return w + ")";
        }
      }
    }
  }
  return "";
}

}  // namespace mssr
