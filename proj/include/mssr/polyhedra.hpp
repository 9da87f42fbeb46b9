#pragma once

// Exact rational parametric polyhedra: construction, algebra, Fourier-Motzkin
// projection, emptiness, faces, set difference, point enumeration, relations,
// and growth/degree analysis.

#include "rational.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mssr {

struct PolyError : std::runtime_error {
  explicit PolyError(const std::string &msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Space

struct Space {
  std::vector<std::string> iter_vars;
  std::vector<std::string> params;

  size_t nvars() const { return iter_vars.size(); }
  size_t nparams() const { return params.size(); }
  size_t ncols() const { return nvars() + nparams(); } // without constant

  int var_index(const std::string &name) const {
    for (size_t i = 0; i < iter_vars.size(); ++i)
      if (iter_vars[i] == name) return (int)i;
    return -1;
  }
  int param_index(const std::string &name) const {
    for (size_t i = 0; i < params.size(); ++i)
      if (params[i] == name) return (int)i;
    return -1;
  }
  bool operator==(const Space &o) const {
    return iter_vars == o.iter_vars && params == o.params;
  }
};

// ---------------------------------------------------------------------------
// AffineForm: coeffs over iter vars, params, plus constant. Used both as a
// value (index expressions) and as a constraint row (form >= 0 / > 0 / = 0).

struct AffineForm {
  std::vector<Rat> coeffs;  // per iter_var
  std::vector<Rat> pcoeffs; // per param
  Rat constant = 0;
  bool strict = false; // only meaningful inside inequality lists

  AffineForm() = default;
  explicit AffineForm(const Space &sp)
      : coeffs(sp.nvars(), Rat(0)), pcoeffs(sp.nparams(), Rat(0)) {}

  static AffineForm var(const Space &sp, const std::string &name) {
    AffineForm f(sp);
    int v = sp.var_index(name);
    if (v >= 0) {
      f.coeffs[v] = 1;
      return f;
    }
    int p = sp.param_index(name);
    if (p < 0) throw PolyError("unknown symbol '" + name + "'");
    f.pcoeffs[p] = 1;
    return f;
  }
  static AffineForm cst(const Space &sp, const Rat &c) {
    AffineForm f(sp);
    f.constant = c;
    return f;
  }

  bool is_constant() const {
    for (auto &c : coeffs)
      if (c != 0) return false;
    for (auto &c : pcoeffs)
      if (c != 0) return false;
    return true;
  }
  bool is_zero() const { return is_constant() && constant == 0; }

  AffineForm operator+(const AffineForm &o) const {
    AffineForm r = *this;
    for (size_t i = 0; i < coeffs.size(); ++i) r.coeffs[i] += o.coeffs[i];
    for (size_t i = 0; i < pcoeffs.size(); ++i) r.pcoeffs[i] += o.pcoeffs[i];
    r.constant += o.constant;
    return r;
  }
  AffineForm operator-(const AffineForm &o) const {
    AffineForm r = *this;
    for (size_t i = 0; i < coeffs.size(); ++i) r.coeffs[i] -= o.coeffs[i];
    for (size_t i = 0; i < pcoeffs.size(); ++i) r.pcoeffs[i] -= o.pcoeffs[i];
    r.constant -= o.constant;
    return r;
  }
  AffineForm operator-() const { return scaled(Rat(-1)); }
  AffineForm scaled(const Rat &k) const {
    AffineForm r = *this;
    for (auto &c : r.coeffs) c *= k;
    for (auto &c : r.pcoeffs) c *= k;
    r.constant *= k;
    return r;
  }

  // Scale to coprime integer coefficients, keeping orientation.
  void normalize() {
    Int lcm = 1;
    auto acc_l = [&](const Rat &r) {
      Int d = rat_den(r);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    };
    for (auto &c : coeffs) acc_l(c);
    for (auto &c : pcoeffs) acc_l(c);
    acc_l(constant);
    Int g = 0;
    auto acc_g = [&](Rat &r) {
      r *= Rat(lcm);
      g = boost::multiprecision::gcd(g, boost::multiprecision::abs(rat_num(r)));
    };
    for (auto &c : coeffs) acc_g(c);
    for (auto &c : pcoeffs) acc_g(c);
    acc_g(constant);
    if (g > 1) {
      for (auto &c : coeffs) c /= Rat(g);
      for (auto &c : pcoeffs) c /= Rat(g);
      constant /= Rat(g);
    }
  }

  Rat eval(const std::vector<Rat> &point, const std::vector<Rat> &pvals) const {
    Rat v = constant;
    for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * point[i];
    for (size_t i = 0; i < pcoeffs.size(); ++i) v += pcoeffs[i] * pvals[i];
    return v;
  }

  bool same_row(const AffineForm &o) const {
    return coeffs == o.coeffs && pcoeffs == o.pcoeffs && constant == o.constant &&
           strict == o.strict;
  }
  bool same_linear(const AffineForm &o) const {
    return coeffs == o.coeffs && pcoeffs == o.pcoeffs;
  }

  std::string str(const Space &sp) const {
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const Rat &c, const std::string &n) {
      if (c == 0) return;
      if (!first) os << (c > 0 ? " + " : " - ");
      else if (c < 0) os << "-";
      Rat a = boost::multiprecision::abs(c);
      if (a != 1 || n.empty()) os << rat_str(a) << (n.empty() ? "" : "*");
      os << n;
      first = false;
    };
    for (size_t i = 0; i < coeffs.size(); ++i) emit(coeffs[i], sp.iter_vars[i]);
    for (size_t i = 0; i < pcoeffs.size(); ++i) emit(pcoeffs[i], sp.params[i]);
    if (constant != 0 || first) emit(constant == 0 ? Rat(0) : constant, "");
    if (constant == 0 && first) os << "0";
    return os.str();
  }
};

struct DirVector {
  std::vector<Int> entries;

  bool is_zero() const {
    for (auto &e : entries)
      if (e != 0) return false;
    return true;
  }
  DirVector negated() const {
    DirVector d = *this;
    for (auto &e : d.entries) e = -e;
    return d;
  }
  static DirVector unit(size_t n, size_t k, int sign = 1) {
    DirVector d;
    d.entries.assign(n, Int(0));
    d.entries[k] = sign;
    return d;
  }
  bool operator==(const DirVector &o) const { return entries == o.entries; }
  std::string str() const {
    std::string s = "[";
    for (size_t i = 0; i < entries.size(); ++i)
      s += (i ? "," : "") + entries[i].str();
    return s + "]";
  }
};

// ---------------------------------------------------------------------------
// Internal linear system over a flat column layout [iter_vars, params] + const.
// Rows mean a.x + c >= 0 (or > 0 when strict); eqs mean a.x + c = 0.

namespace detail {

struct Row {
  std::vector<Rat> a;
  Rat c = 0;
  bool strict = false;

  void normalize() {
    Int lcm = 1;
    auto accl = [&](const Rat &r) {
      Int d = rat_den(r);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    };
    for (auto &x : a) accl(x);
    accl(c);
    Int g = 0;
    auto accg = [&](Rat &r) {
      r *= Rat(lcm);
      g = boost::multiprecision::gcd(g, boost::multiprecision::abs(rat_num(r)));
    };
    for (auto &x : a) accg(x);
    accg(c);
    if (g > 1) {
      for (auto &x : a) x /= Rat(g);
      c /= Rat(g);
    }
  }
  bool zero_linear() const {
    for (auto &x : a)
      if (x != 0) return false;
    return true;
  }
  bool operator==(const Row &o) const {
    return a == o.a && c == o.c && strict == o.strict;
  }
};

struct LinSys {
  size_t n = 0;
  std::vector<Row> ineqs;
  std::vector<Row> eqs;

  // Gauss-reduce equalities to row echelon form; substitute into inequalities.
  // Returns false if a contradictory equality (0 = nonzero) appears.
  bool reduce_eqs() {
    size_t r = 0;
    std::vector<Row> basis;
    std::vector<size_t> pivots;
    for (size_t col = 0; col < n && r <= eqs.size(); ++col) {
      size_t pick = SIZE_MAX;
      for (size_t i = r; i < eqs.size(); ++i)
        if (eqs[i].a[col] != 0) {
          pick = i;
          break;
        }
      if (pick == SIZE_MAX) continue;
      std::swap(eqs[r], eqs[pick]);
      for (size_t i = 0; i < eqs.size(); ++i) {
        if (i == r || eqs[i].a[col] == 0) continue;
        Rat k = eqs[i].a[col] / eqs[r].a[col];
        for (size_t j = 0; j < n; ++j) eqs[i].a[j] -= k * eqs[r].a[j];
        eqs[i].c -= k * eqs[r].c;
      }
      pivots.push_back(col);
      ++r;
    }
    // rows beyond r are zero-linear: contradictions or tautologies
    for (size_t i = r; i < eqs.size(); ++i)
      if (eqs[i].c != 0) return false;
    eqs.resize(r);
    for (auto &e : eqs) e.normalize();
    // substitute pivot vars out of inequalities
    for (size_t k = 0; k < eqs.size(); ++k) {
      size_t col = pivots[k];
      for (auto &iq : ineqs) {
        if (iq.a[col] == 0) continue;
        Rat f = iq.a[col] / eqs[k].a[col];
        for (size_t j = 0; j < n; ++j) iq.a[j] -= f * eqs[k].a[j];
        iq.c -= f * eqs[k].c;
      }
    }
    return true;
  }

  // Eliminate one variable by Fourier-Motzkin (equalities must not mention it;
  // call reduce_eqs first and only eliminate non-pivot columns, or pass
  // through substitution).
  void fm_eliminate_var(size_t col) {
    // try an equality first
    for (size_t k = 0; k < eqs.size(); ++k) {
      if (eqs[k].a[col] == 0) continue;
      Row piv = eqs[k];
      auto subst = [&](Row &r) {
        if (r.a[col] == 0) return;
        Rat f = r.a[col] / piv.a[col];
        for (size_t j = 0; j < n; ++j) r.a[j] -= f * piv.a[j];
        r.c -= f * piv.c;
      };
      for (auto &r : ineqs) subst(r);
      for (auto &r : eqs) subst(r);
      eqs.erase(eqs.begin() + (long)k);
      dedupe();
      return;
    }
    std::vector<Row> lows, ups, keep;
    for (auto &r : ineqs) {
      if (r.a[col] > 0) lows.push_back(r);      // x >= -(rest)/a
      else if (r.a[col] < 0) ups.push_back(r);  // x <= ...
      else keep.push_back(r);
    }
    for (auto &lo : lows)
      for (auto &up : ups) {
        Row r;
        r.a.assign(n, Rat(0));
        Rat kl = -up.a[col]; // > 0
        Rat ku = lo.a[col];  // > 0
        for (size_t j = 0; j < n; ++j) r.a[j] = kl * lo.a[j] + ku * up.a[j];
        r.c = kl * lo.c + ku * up.c;
        r.strict = lo.strict || up.strict;
        r.normalize();
        keep.push_back(r);
      }
    ineqs = std::move(keep);
    dedupe();
  }

  void dedupe() {
    std::vector<Row> out;
    for (auto &r : ineqs) {
      Row q = r;
      q.normalize();
      if (q.zero_linear()) {
        if (q.c > 0 || (q.c == 0 && !q.strict)) continue; // tautology
        // contradiction: keep a single marker row
      }
      bool dup = false;
      for (auto &o : out) {
        if (o.a == q.a && o.c == q.c) {
          o.strict = o.strict || q.strict;
          dup = true;
          break;
        }
        if (o.a == q.a) { // same direction, keep tighter bound
          if (q.c < o.c || (q.c == o.c && q.strict)) {
            o.c = q.c;
            o.strict = q.strict;
          }
          dup = true;
          break;
        }
      }
      if (!dup) out.push_back(q);
    }
    ineqs = std::move(out);
  }

  // Decide rational emptiness by eliminating every variable.
  bool empty() const {
    LinSys s = *this;
    if (!s.reduce_eqs()) return true;
    for (size_t col = 0; col < n; ++col) s.fm_eliminate_var(col);
    for (auto &r : s.ineqs) {
      if (r.c < 0) return true;
      if (r.c == 0 && r.strict) return true;
    }
    for (auto &e : s.eqs)
      if (e.c != 0) return true;
    return false;
  }
};

} // namespace detail

// ---------------------------------------------------------------------------
// ConvexSet

struct ConvexSet {
  Space space;
  std::vector<AffineForm> inequalities; // form >= 0 (strict: > 0)
  std::vector<AffineForm> equalities;   // form = 0

  ConvexSet() = default;
  explicit ConvexSet(Space sp) : space(std::move(sp)) {}

  static ConvexSet universe(Space sp) { return ConvexSet(std::move(sp)); }

  void add_ineq(AffineForm f) {
    f.normalize();
    inequalities.push_back(std::move(f));
  }
  void add_eq(AffineForm f) {
    f.normalize();
    f.strict = false;
    equalities.push_back(std::move(f));
  }

  detail::LinSys to_linsys() const {
    detail::LinSys s;
    s.n = space.ncols();
    auto row_of = [&](const AffineForm &f) {
      detail::Row r;
      r.a.reserve(s.n);
      for (auto &c : f.coeffs) r.a.push_back(c);
      for (auto &c : f.pcoeffs) r.a.push_back(c);
      r.c = f.constant;
      r.strict = f.strict;
      return r;
    };
    for (auto &f : inequalities) s.ineqs.push_back(row_of(f));
    for (auto &f : equalities) s.eqs.push_back(row_of(f));
    return s;
  }

  static AffineForm form_of_row(const Space &sp, const detail::Row &r) {
    AffineForm f(sp);
    for (size_t i = 0; i < sp.nvars(); ++i) f.coeffs[i] = r.a[i];
    for (size_t i = 0; i < sp.nparams(); ++i) f.pcoeffs[i] = r.a[sp.nvars() + i];
    f.constant = r.c;
    f.strict = r.strict;
    return f;
  }

  bool contains(const std::vector<Rat> &pt, const std::vector<Rat> &pvals) const {
    for (auto &e : equalities)
      if (e.eval(pt, pvals) != 0) return false;
    for (auto &q : inequalities) {
      Rat v = q.eval(pt, pvals);
      if (v < 0 || (v == 0 && q.strict)) return false;
    }
    return true;
  }

  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < space.params.size(); ++i)
      os << (i ? "," : "") << space.params[i];
    os << "] { [";
    for (size_t i = 0; i < space.iter_vars.size(); ++i)
      os << (i ? "," : "") << space.iter_vars[i];
    os << "] : ";
    bool first = true;
    for (auto &e : equalities) {
      os << (first ? "" : " and ") << e.str(space) << " = 0";
      first = false;
    }
    for (auto &q : inequalities) {
      os << (first ? "" : " and ") << q.str(space) << (q.strict ? " > 0" : " >= 0");
      first = false;
    }
    if (first) os << "true";
    os << " }";
    return os.str();
  }
};

inline bool is_empty(const ConvexSet &P) { return P.to_linsys().empty(); }

// P with one extra (possibly strict) inequality.
inline ConvexSet with_ineq(const ConvexSet &P, AffineForm f) {
  ConvexSet q = P;
  q.add_ineq(std::move(f));
  return q;
}

// Canonicalize: normalized coprime rows, equalities gauss-reduced, implied
// equalities detected, duplicate and redundant inequalities removed.
inline ConvexSet canonicalize(const ConvexSet &P) {
  detail::LinSys s = P.to_linsys();
  ConvexSet out(P.space);
  if (!s.reduce_eqs()) { // contradictory equalities: canonical empty
    AffineForm f(P.space);
    f.constant = -1;
    out.add_ineq(f);
    return out;
  }
  s.dedupe();
  // implied equality detection: f >= 0 with -f >= 0
  std::vector<char> drop(s.ineqs.size(), 0);
  for (size_t i = 0; i < s.ineqs.size(); ++i) {
    if (drop[i]) continue;
    for (size_t j = i + 1; j < s.ineqs.size(); ++j) {
      if (drop[j]) continue;
      bool neg = s.ineqs[i].c == -s.ineqs[j].c;
      if (neg)
        for (size_t k = 0; k < s.n && neg; ++k)
          neg = s.ineqs[i].a[k] == -s.ineqs[j].a[k];
      if (neg && !s.ineqs[i].strict && !s.ineqs[j].strict) {
        s.eqs.push_back(s.ineqs[i]);
        drop[i] = drop[j] = 1;
        break;
      }
    }
  }
  {
    std::vector<detail::Row> kept;
    for (size_t i = 0; i < s.ineqs.size(); ++i)
      if (!drop[i]) kept.push_back(s.ineqs[i]);
    s.ineqs = std::move(kept);
    if (!s.reduce_eqs()) {
      AffineForm f(P.space);
      f.constant = -1;
      ConvexSet e(P.space);
      e.add_ineq(f);
      return e;
    }
    s.dedupe();
  }
  // redundancy removal: drop rows implied by the rest
  for (size_t i = 0; i < s.ineqs.size();) {
    detail::LinSys t = s;
    detail::Row neg = t.ineqs[i];
    t.ineqs.erase(t.ineqs.begin() + (long)i);
    for (auto &x : neg.a) x = -x;
    neg.c = -neg.c;
    neg.strict = !neg.strict; // not(f >= 0) is f < 0; not(f > 0) is f <= 0
    t.ineqs.push_back(neg);
    if (t.empty()) s.ineqs.erase(s.ineqs.begin() + (long)i);
    else ++i;
  }
  for (auto &e : s.eqs) out.equalities.push_back(ConvexSet::form_of_row(P.space, e));
  for (auto &q : s.ineqs) out.inequalities.push_back(ConvexSet::form_of_row(P.space, q));
  for (auto &e : out.equalities) e.strict = false;
  return out;
}

// T_r(P): shifts points by +r, so constraints substitute x := x - r.
inline ConvexSet translate(const ConvexSet &P, const DirVector &r) {
  if (r.entries.size() != P.space.nvars())
    throw PolyError("translate: direction has wrong arity");
  ConvexSet q = P;
  auto shift = [&](AffineForm &f) {
    Rat dot = 0;
    for (size_t i = 0; i < f.coeffs.size(); ++i) dot += f.coeffs[i] * Rat(r.entries[i]);
    f.constant -= dot;
  };
  for (auto &f : q.inequalities) shift(f);
  for (auto &f : q.equalities) shift(f);
  return q;
}

inline ConvexSet intersect(const ConvexSet &A, const ConvexSet &B) {
  if (!(A.space == B.space)) throw PolyError("intersect: space mismatch");
  ConvexSet q = A;
  for (auto &f : B.inequalities) q.inequalities.push_back(f);
  for (auto &f : B.equalities) q.equalities.push_back(f);
  return canonicalize(q);
}

struct SetUnion {
  Space space;
  std::vector<ConvexSet> pieces;
  bool disjoint = false;

  bool empty_union() const { return pieces.empty(); }
};

// A minus B as disjoint convex pieces via sequential constraint negation.
// Negation of a coprime-integer row f >= 0 is f <= -1.
inline SetUnion difference(const ConvexSet &A, const ConvexSet &B) {
  if (!(A.space == B.space)) throw PolyError("difference: space mismatch");
  ConvexSet a = canonicalize(A);
  ConvexSet b = canonicalize(B);
  SetUnion u;
  u.space = A.space;
  u.disjoint = true;
  if (is_empty(a)) return u;
  std::vector<AffineForm> cons;
  for (auto &e : b.equalities) {
    cons.push_back(e);
    cons.push_back(-e);
    cons.back().normalize();
  }
  for (auto &q : b.inequalities) cons.push_back(q);
  ConvexSet rem = a;
  for (auto &c : cons) {
    AffineForm neg = -c;
    neg.normalize();
    neg.constant -= 1;
    ConvexSet piece = with_ineq(rem, neg);
    piece = canonicalize(piece);
    if (!is_empty(piece)) u.pieces.push_back(piece);
    rem = canonicalize(with_ineq(rem, c));
    if (is_empty(rem)) break;
  }
  return u;
}

// Project onto a subset of iter vars (Fourier-Motzkin over rationals).
inline ConvexSet project(const ConvexSet &P, const std::vector<std::string> &keep) {
  for (auto &k : keep)
    if (P.space.var_index(k) < 0) throw PolyError("project: unknown var " + k);
  detail::LinSys s = P.to_linsys();
  if (!s.reduce_eqs()) {
    Space sp{keep, P.space.params};
    ConvexSet e(sp);
    AffineForm f(sp);
    f.constant = -1;
    e.add_ineq(f);
    return e;
  }
  std::vector<size_t> elim;
  for (size_t i = 0; i < P.space.nvars(); ++i) {
    bool kept = false;
    for (auto &k : keep)
      if (P.space.iter_vars[i] == k) kept = true;
    if (!kept) elim.push_back(i);
  }
  for (size_t col : elim) s.fm_eliminate_var(col);
  Space sp{keep, P.space.params};
  ConvexSet out(sp);
  auto to_form = [&](const detail::Row &r) {
    AffineForm f(sp);
    for (size_t i = 0; i < keep.size(); ++i)
      f.coeffs[i] = r.a[(size_t)P.space.var_index(keep[i])];
    for (size_t i = 0; i < sp.nparams(); ++i) f.pcoeffs[i] = r.a[P.space.nvars() + i];
    f.constant = r.c;
    f.strict = r.strict;
    return f;
  };
  for (auto &e : s.eqs) {
    bool touches_elim = false;
    for (size_t col : elim)
      if (e.a[col] != 0) touches_elim = true;
    if (!touches_elim) out.equalities.push_back(to_form(e));
  }
  for (auto &q : s.ineqs) {
    bool touches_elim = false;
    for (size_t col : elim)
      if (q.a[col] != 0) touches_elim = true;
    if (!touches_elim) out.inequalities.push_back(to_form(q));
  }
  return canonicalize(out);
}

// ---------------------------------------------------------------------------
// Bindings and integer point enumeration

using Binding = std::map<std::string, int64_t>;

inline std::vector<Rat> param_values(const Space &sp, const Binding &b) {
  std::vector<Rat> v;
  v.reserve(sp.nparams());
  for (auto &p : sp.params) {
    auto it = b.find(p);
    if (it == b.end()) throw PolyError("binding missing parameter " + p);
    v.push_back(Rat(it->second));
  }
  return v;
}

// Substitute parameter values, producing a parameter-free system.
inline detail::LinSys bind_params(const ConvexSet &P, const Binding &b) {
  auto pv = param_values(P.space, b);
  detail::LinSys s;
  s.n = P.space.nvars();
  auto row_of = [&](const AffineForm &f) {
    detail::Row r;
    r.a.assign(s.n, Rat(0));
    for (size_t i = 0; i < s.n; ++i) r.a[i] = f.coeffs[i];
    r.c = f.constant;
    for (size_t i = 0; i < pv.size(); ++i) r.c += f.pcoeffs[i] * pv[i];
    r.strict = f.strict;
    return r;
  };
  for (auto &f : P.inequalities) s.ineqs.push_back(row_of(f));
  for (auto &f : P.equalities) s.eqs.push_back(row_of(f));
  return s;
}

using Point = std::vector<int64_t>;

namespace detail {

// Integer bounds of variable `col` in a parameter-free system, obtained by
// eliminating every other variable. nullopt bound = unbounded on that side.
inline std::pair<std::optional<Int>, std::optional<Int>>
var_bounds(const LinSys &sys, size_t col) {
  LinSys s = sys;
  if (!s.reduce_eqs()) return {Int(1), Int(0)}; // empty: lo > hi
  for (size_t j = 0; j < s.n; ++j)
    if (j != col) s.fm_eliminate_var(j);
  std::optional<Int> lo, hi;
  for (auto &e : s.eqs) {
    if (e.a[col] == 0) {
      if (e.c != 0) return {Int(1), Int(0)};
      continue;
    }
    Rat v = -e.c / e.a[col];
    if (rat_den(v) != 1) return {Int(1), Int(0)};
    Int iv = rat_num(v);
    lo = lo ? std::max(*lo, iv) : iv;
    hi = hi ? std::min(*hi, iv) : iv;
  }
  for (auto &r : s.ineqs) {
    if (r.a[col] == 0) {
      if (r.c < 0 || (r.c == 0 && r.strict)) return {Int(1), Int(0)};
      continue;
    }
    Rat bound = -r.c / r.a[col];
    if (r.a[col] > 0) { // x >= bound
      Int ib = rat_ceil(bound);
      if (r.strict && Rat(ib) == bound) ++ib;
      lo = lo ? std::max(*lo, ib) : ib;
    } else {
      Int ib = rat_floor(bound);
      if (r.strict && Rat(ib) == bound) --ib;
      hi = hi ? std::min(*hi, ib) : ib;
    }
  }
  return {lo, hi};
}

inline void enumerate_rec(const LinSys &sys, size_t col, Point &prefix,
                          std::vector<Point> &out, size_t cap) {
  if (col == sys.n) {
    out.push_back(prefix);
    if (out.size() > cap) throw PolyError("enumerate_points: point cap exceeded");
    return;
  }
  auto [lo, hi] = var_bounds(sys, col);
  if (!lo || !hi) throw PolyError("enumerate_points: unbounded set under binding");
  for (Int v = *lo; v <= *hi; ++v) {
    LinSys s = sys;
    // substitute x_col = v
    for (auto &r : s.ineqs) {
      r.c += r.a[col] * Rat(v);
      r.a[col] = 0;
    }
    for (auto &e : s.eqs) {
      e.c += e.a[col] * Rat(v);
      e.a[col] = 0;
    }
    bool bad = false;
    for (auto &r : s.ineqs)
      if (r.zero_linear() && (r.c < 0 || (r.c == 0 && r.strict))) bad = true;
    for (auto &e : s.eqs)
      if (e.zero_linear() && e.c != 0) bad = true;
    if (bad) continue;
    prefix.push_back(to_i64(v));
    enumerate_rec(s, col + 1, prefix, out, cap);
    prefix.pop_back();
  }
}

} // namespace detail

inline std::vector<Point> enumerate_points(const ConvexSet &P, const Binding &b,
                                           size_t cap = 1000000) {
  detail::LinSys s = bind_params(P, b);
  if (s.empty()) return {};
  std::vector<Point> out;
  Point prefix;
  detail::enumerate_rec(s, 0, prefix, out, cap);
  std::sort(out.begin(), out.end());
  return out;
}

inline size_t count_points(const ConvexSet &P, const Binding &b,
                           size_t cap = 1000000) {
  return enumerate_points(P, b, cap).size();
}

inline bool is_integer_empty_at(const ConvexSet &P, const Binding &b,
                                size_t cap = 1000000) {
  return enumerate_points(P, b, cap).empty();
}

// ---------------------------------------------------------------------------
// Faces

struct Face {
  ConvexSet parent;
  std::vector<size_t> tight_mask; // indices into parent.inequalities
  ConvexSet as_set;
};

namespace detail {

// Is inequality f forced to equality everywhere on S? (no rational point with f > 0)
inline bool forced_tight(const ConvexSet &S, const AffineForm &f) {
  AffineForm g = f;
  g.strict = true;
  return is_empty(with_ineq(S, g));
}

// Parameter-only equality rows of S's reduced equality system that are not
// implied by `parent`'s equalities.
inline bool adds_param_constraint(const ConvexSet &S, const ConvexSet &parent) {
  LinSys s = S.to_linsys();
  if (!s.reduce_eqs()) return true;
  LinSys p = parent.to_linsys();
  p.reduce_eqs();
  for (auto &e : s.eqs) {
    bool param_only = true;
    for (size_t i = 0; i < S.space.nvars(); ++i)
      if (e.a[i] != 0) param_only = false;
    if (!param_only) continue;
    // check implied by parent's equalities: reduce e against p.eqs
    Row r = e;
    for (auto &pe : p.eqs) {
      size_t piv = SIZE_MAX;
      for (size_t j = 0; j < p.n; ++j)
        if (pe.a[j] != 0) {
          piv = j;
          break;
        }
      if (piv == SIZE_MAX) continue;
      if (r.a[piv] == 0) continue;
      Rat k = r.a[piv] / pe.a[piv];
      for (size_t j = 0; j < p.n; ++j) r.a[j] -= k * pe.a[j];
      r.c -= k * pe.c;
    }
    if (!r.zero_linear() || r.c != 0) return true;
  }
  return false;
}

} // namespace detail

// All distinct nonempty faces, including P itself and vertices. Faces whose
// affine hull forces a new parameter-only relation are treated as empty at
// generic parameter values and discarded.
inline std::vector<Face> faces(const ConvexSet &Pin, size_t cap = 20) {
  ConvexSet P = canonicalize(Pin);
  size_t m = P.inequalities.size();
  if (m > cap) throw PolyError("faces: inequality count exceeds cap");
  std::vector<Face> out;
  std::set<std::vector<size_t>> seen; // closure signatures
  for (uint64_t mask = 0; mask < (uint64_t(1) << m); ++mask) {
    ConvexSet f(P.space);
    f.equalities = P.equalities;
    std::vector<size_t> tight;
    for (size_t i = 0; i < m; ++i) {
      AffineForm row = P.inequalities[i];
      if (mask & (uint64_t(1) << i)) {
        row.strict = false;
        f.equalities.push_back(row);
        tight.push_back(i);
      } else {
        f.inequalities.push_back(row);
      }
    }
    if (is_empty(f)) continue;
    if (detail::adds_param_constraint(f, P)) continue;
    // closure: all inequalities forced tight on this face
    std::vector<size_t> closure;
    for (size_t i = 0; i < m; ++i) {
      bool in_mask = (mask >> i) & 1;
      if (in_mask || detail::forced_tight(f, P.inequalities[i])) closure.push_back(i);
    }
    if (!seen.insert(closure).second) continue;
    Face face;
    face.parent = P;
    face.tight_mask = closure;
    face.as_set = canonicalize(f);
    out.push_back(std::move(face));
  }
  return out;
}

// Affine-hull dimension over iter vars at generic parameter values.
inline int dimension(const ConvexSet &Pin) {
  ConvexSet P = canonicalize(Pin);
  // move forced-tight inequalities into the equality system
  for (auto &q : P.inequalities)
    if (detail::forced_tight(P, q)) {
      AffineForm e = q;
      e.strict = false;
      P.equalities.push_back(e);
    }
  detail::LinSys s = P.to_linsys();
  if (!s.reduce_eqs()) return -1;
  // rank of the iter-var submatrix of the equality system
  size_t nv = P.space.nvars();
  std::vector<std::vector<Rat>> rows;
  for (auto &e : s.eqs) {
    std::vector<Rat> r(e.a.begin(), e.a.begin() + (long)nv);
    rows.push_back(r);
  }
  size_t rank = 0;
  for (size_t col = 0; col < nv; ++col) {
    size_t pick = SIZE_MAX;
    for (size_t i = rank; i < rows.size(); ++i)
      if (rows[i][col] != 0) {
        pick = i;
        break;
      }
    if (pick == SIZE_MAX) continue;
    std::swap(rows[rank], rows[pick]);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == rank || rows[i][col] == 0) continue;
      Rat k = rows[i][col] / rows[rank][col];
      for (size_t j = 0; j < nv; ++j) rows[i][j] -= k * rows[rank][j];
    }
    ++rank;
  }
  return (int)nv - (int)rank;
}

// ---------------------------------------------------------------------------
// Facet decomposition (difference pieces tagged with the facet they came from)

struct FacetPiece {
  Face facet;
  ConvexSet piece;
  bool whole_set = false; // no overlap: the single piece is P itself
};

inline std::vector<FacetPiece> facet_decomposition(const ConvexSet &Pin,
                                                   const DirVector &r) {
  if (r.is_zero()) throw PolyError("facet_decomposition: zero direction");
  ConvexSet P = canonicalize(Pin);
  ConvexSet T = translate(P, r);
  std::vector<FacetPiece> out;
  if (is_empty(intersect(P, T))) {
    FacetPiece fp;
    fp.piece = P;
    fp.whole_set = true;
    Face whole;
    whole.parent = P;
    whole.as_set = P;
    fp.facet = whole;
    out.push_back(fp);
    return out;
  }
  // pieces come from negating translated constraints of P in order; piece k
  // belongs to the facet of P's k-th constraint
  std::vector<AffineForm> cons;
  std::vector<AffineForm> orig;
  for (auto &e : P.equalities) {
    // equality rows of P translate to equality rows of T; negating either
    // side of an equality never yields a nonempty piece inside P (the
    // equality also holds on P when r stays inside the hull), handled below
    AffineForm te = e;
    Rat dot = 0;
    for (size_t i = 0; i < e.coeffs.size(); ++i) dot += e.coeffs[i] * Rat(r.entries[i]);
    te.constant -= dot;
    cons.push_back(te);
    orig.push_back(e);
    cons.push_back(-te);
    cons.back().normalize();
    orig.push_back(-e);
    orig.back().normalize();
  }
  for (auto &q : P.inequalities) {
    AffineForm tq = q;
    Rat dot = 0;
    for (size_t i = 0; i < q.coeffs.size(); ++i) dot += q.coeffs[i] * Rat(r.entries[i]);
    tq.constant -= dot;
    cons.push_back(tq);
    orig.push_back(q);
  }
  ConvexSet rem = P;
  for (size_t k = 0; k < cons.size(); ++k) {
    AffineForm neg = -cons[k];
    neg.normalize();
    neg.constant -= 1;
    ConvexSet piece = canonicalize(with_ineq(rem, neg));
    if (!is_empty(piece)) {
      // facet: original constraint tightened on P
      ConvexSet fs = P;
      AffineForm e = orig[k];
      e.strict = false;
      fs.equalities.push_back(e);
      fs = canonicalize(fs);
      Face facet;
      facet.parent = P;
      facet.as_set = fs;
      // locate the tight index
      for (size_t i = 0; i < P.inequalities.size(); ++i)
        if (P.inequalities[i].same_linear(orig[k]) &&
            P.inequalities[i].constant == orig[k].constant)
          facet.tight_mask.push_back(i);
      if (dimension(fs) != dimension(P) - 1)
        throw PolyError("facet_decomposition: piece maps to no facet");
      out.push_back(FacetPiece{facet, piece, false});
    }
    rem = canonicalize(with_ineq(rem, cons[k]));
    if (is_empty(rem)) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Growth directions (the L set): directions whose width grows with parameters

namespace detail {

// Width of P along direction d at a fixed binding: (max d.x - min d.x).
// nullopt = unbounded.
inline std::optional<Rat> width_along(const ConvexSet &P, const DirVector &d,
                                      const Binding &b) {
  LinSys s = bind_params(P, b);
  // introduce t = d.x as an extra variable, then eliminate x
  size_t n = s.n;
  for (auto &r : s.ineqs) r.a.push_back(Rat(0));
  for (auto &e : s.eqs) e.a.push_back(Rat(0));
  Row def;
  def.a.assign(n + 1, Rat(0));
  for (size_t i = 0; i < n; ++i) def.a[i] = Rat(d.entries[i]);
  def.a[n] = -1;
  def.c = 0;
  s.eqs.push_back(def);
  s.n = n + 1;
  if (!s.reduce_eqs()) return Rat(0);
  for (size_t i = 0; i < n; ++i) s.fm_eliminate_var(i);
  std::optional<Rat> lo, hi;
  for (auto &e : s.eqs)
    if (e.a[n] != 0) {
      Rat v = -e.c / e.a[n];
      lo = hi = v;
    }
  for (auto &r : s.ineqs) {
    if (r.a[n] == 0) continue;
    Rat bound = -r.c / r.a[n];
    if (r.a[n] > 0) lo = lo ? std::max(*lo, bound) : bound;
    else hi = hi ? std::min(*hi, bound) : bound;
  }
  if (!lo || !hi) return std::nullopt;
  return *hi - *lo;
}

} // namespace detail

inline bool grows_along(const ConvexSet &P, const DirVector &d,
                        int64_t probe1 = 8, int64_t probe2 = 16) {
  Binding b1, b2;
  for (auto &p : P.space.params) {
    b1[p] = probe1;
    b2[p] = probe2;
  }
  auto w1 = detail::width_along(P, d, b1);
  auto w2 = detail::width_along(P, d, b2);
  if (!w1 || !w2) return true; // unbounded width: treated as growing
  return *w2 > *w1;
}

// Unit axis directions with parameter-growing width.
inline std::vector<DirVector> growth_directions(const ConvexSet &P) {
  std::vector<DirVector> out;
  for (size_t k = 0; k < P.space.nvars(); ++k) {
    DirVector d = DirVector::unit(P.space.nvars(), k);
    if (grows_along(P, d)) out.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relations

struct Relation {
  Space in_space;  // iter vars of the source
  Space out_space; // iter vars of the target
  ConvexSet cons;  // over [in_vars, out_vars, params]

  size_t nin() const { return in_space.nvars(); }
  size_t nout() const { return out_space.nvars(); }
};

namespace detail {

inline std::vector<std::string> rename_distinct(const std::vector<std::string> &vs,
                                                const std::vector<std::string> &taken) {
  std::vector<std::string> out;
  for (auto &v : vs) {
    std::string name = v;
    auto clashes = [&](const std::string &n) {
      for (auto &t : taken)
        if (t == n) return true;
      for (auto &t : out)
        if (t == n) return true;
      return false;
    };
    while (clashes(name)) name += "'";
    out.push_back(name);
  }
  return out;
}

} // namespace detail

// Build a relation space: [in_vars, renamed out_vars], shared params.
inline Relation make_relation(const Space &in_sp, const Space &out_sp) {
  if (!(in_sp.params == out_sp.params))
    throw PolyError("make_relation: parameter list mismatch");
  Relation R;
  R.in_space = in_sp;
  R.out_space = out_sp;
  auto out_names = detail::rename_distinct(out_sp.iter_vars, in_sp.iter_vars);
  Space comb;
  comb.iter_vars = in_sp.iter_vars;
  for (auto &n : out_names) comb.iter_vars.push_back(n);
  comb.params = in_sp.params;
  R.cons = ConvexSet(comb);
  return R;
}

inline Relation inverse(const Relation &R) {
  Relation inv = make_relation(R.out_space, R.in_space);
  // permute columns: [in, out] -> [out, in]
  size_t ni = R.nin(), no = R.nout();
  auto remap = [&](const AffineForm &f) {
    AffineForm g(inv.cons.space);
    for (size_t i = 0; i < no; ++i) g.coeffs[i] = f.coeffs[ni + i];
    for (size_t i = 0; i < ni; ++i) g.coeffs[no + i] = f.coeffs[i];
    g.pcoeffs = f.pcoeffs;
    g.constant = f.constant;
    g.strict = f.strict;
    return g;
  };
  for (auto &f : R.cons.inequalities) inv.cons.inequalities.push_back(remap(f));
  for (auto &f : R.cons.equalities) inv.cons.equalities.push_back(remap(f));
  return inv;
}

inline ConvexSet apply(const Relation &R, const ConvexSet &P) {
  if (!(P.space.iter_vars == R.in_space.iter_vars))
    throw PolyError("apply: domain space mismatch");
  ConvexSet comb = R.cons;
  size_t ni = R.nin();
  for (auto lists : {&P.inequalities, &P.equalities}) {
    bool eq = lists == &P.equalities;
    for (auto &f : *lists) {
      AffineForm g(comb.space);
      for (size_t i = 0; i < ni; ++i) g.coeffs[i] = f.coeffs[i];
      g.pcoeffs = f.pcoeffs;
      g.constant = f.constant;
      g.strict = f.strict;
      if (eq) comb.equalities.push_back(g);
      else comb.inequalities.push_back(g);
    }
  }
  std::vector<std::string> keep(comb.space.iter_vars.begin() + (long)ni,
                                comb.space.iter_vars.end());
  ConvexSet img = project(comb, keep);
  img.space.iter_vars = R.out_space.iter_vars; // restore canonical names
  return img;
}

// R2 after R1: (R2 . R1)(x) = R2(R1(x)).
inline Relation compose(const Relation &R2, const Relation &R1) {
  if (R1.nout() != R2.nin()) throw PolyError("compose: arity mismatch");
  Relation out = make_relation(R1.in_space, R2.out_space);
  // combined space [A, B, C, params]
  Space comb;
  comb.iter_vars = R1.in_space.iter_vars;
  auto bnames = detail::rename_distinct(R1.out_space.iter_vars, comb.iter_vars);
  for (auto &n : bnames) comb.iter_vars.push_back(n);
  std::vector<std::string> taken = comb.iter_vars;
  auto cnames = detail::rename_distinct(R2.out_space.iter_vars, taken);
  for (auto &n : cnames) comb.iter_vars.push_back(n);
  comb.params = R1.in_space.params;
  ConvexSet sys(comb);
  size_t na = R1.nin(), nb = R1.nout(), nc = R2.nout();
  auto add1 = [&](const AffineForm &f, bool eq) {
    AffineForm g(comb);
    for (size_t i = 0; i < na; ++i) g.coeffs[i] = f.coeffs[i];
    for (size_t i = 0; i < nb; ++i) g.coeffs[na + i] = f.coeffs[na + i];
    g.pcoeffs = f.pcoeffs;
    g.constant = f.constant;
    (eq ? sys.equalities : sys.inequalities).push_back(g);
  };
  auto add2 = [&](const AffineForm &f, bool eq) {
    AffineForm g(comb);
    for (size_t i = 0; i < nb; ++i) g.coeffs[na + i] = f.coeffs[i];
    for (size_t i = 0; i < nc; ++i) g.coeffs[na + nb + i] = f.coeffs[nb + i];
    g.pcoeffs = f.pcoeffs;
    g.constant = f.constant;
    (eq ? sys.equalities : sys.inequalities).push_back(g);
  };
  for (auto &f : R1.cons.inequalities) add1(f, false);
  for (auto &f : R1.cons.equalities) add1(f, true);
  for (auto &f : R2.cons.inequalities) add2(f, false);
  for (auto &f : R2.cons.equalities) add2(f, true);
  std::vector<std::string> keep;
  for (size_t i = 0; i < na; ++i) keep.push_back(comb.iter_vars[i]);
  for (size_t i = 0; i < nc; ++i) keep.push_back(comb.iter_vars[na + nb + i]);
  ConvexSet proj = project(sys, keep);
  proj.space.iter_vars = out.cons.space.iter_vars;
  out.cons = proj;
  return out;
}

// Restrict a relation's input (and optionally output) tuples.
inline Relation restrict_domain(const Relation &R, const ConvexSet &D) {
  Relation out = R;
  size_t ni = R.nin();
  for (auto lists : {&D.inequalities, &D.equalities}) {
    bool eq = lists == &D.equalities;
    for (auto &f : *lists) {
      AffineForm g(out.cons.space);
      for (size_t i = 0; i < ni; ++i) g.coeffs[i] = f.coeffs[i];
      g.pcoeffs = f.pcoeffs;
      g.constant = f.constant;
      (eq ? out.cons.equalities : out.cons.inequalities).push_back(g);
    }
  }
  out.cons = canonicalize(out.cons);
  return out;
}

inline Relation restrict_range(const Relation &R, const ConvexSet &D) {
  Relation out = R;
  size_t ni = R.nin();
  for (auto lists : {&D.inequalities, &D.equalities}) {
    bool eq = lists == &D.equalities;
    for (auto &f : *lists) {
      AffineForm g(out.cons.space);
      for (size_t i = 0; i < R.nout(); ++i) g.coeffs[ni + i] = f.coeffs[i];
      g.pcoeffs = f.pcoeffs;
      g.constant = f.constant;
      (eq ? out.cons.equalities : out.cons.inequalities).push_back(g);
    }
  }
  out.cons = canonicalize(out.cons);
  return out;
}

// ---------------------------------------------------------------------------
// Cardinality degree: per-parameter growth exponent of the point count

struct MultiDegree {
  std::map<std::string, int> exp;

  int total() const {
    int t = 0;
    for (auto &[k, v] : exp) t += v;
    return t;
  }
  int of(const std::string &p) const {
    auto it = exp.find(p);
    return it == exp.end() ? 0 : it->second;
  }
  bool operator==(const MultiDegree &o) const { return exp == o.exp; }
  std::string str() const {
    if (exp.empty()) return "1";
    std::string s;
    bool all_zero = true;
    for (auto &[k, v] : exp) {
      if (v == 0) continue;
      all_zero = false;
      s += k;
      if (v > 1) s += "^" + std::to_string(v);
    }
    return all_zero ? "1" : s;
  }
};

inline MultiDegree cardinality_degree(const ConvexSet &P, double tol = 0.2,
                                      size_t cap = 1000000) {
  MultiDegree d;
  const int64_t scales[4] = {4, 8, 16, 32};
  for (auto &p : P.space.params) {
    size_t counts[4];
    for (int s = 0; s < 4; ++s) {
      Binding b;
      for (auto &q : P.space.params) b[q] = (q == p) ? scales[s] : 4;
      counts[s] = count_points(P, b, cap);
    }
    int e = 0;
    if (counts[3] == 0) {
      e = 0;
    } else if (counts[2] == 0) {
      e = 0; // count appears only at the largest scale: treat as constant-ish
    } else {
      double ratio = (double)counts[3] / (double)counts[2];
      double fexp = std::log2(ratio);
      e = (int)std::llround(fexp);
      if (std::abs(fexp - (double)e) > tol)
        throw PolyError("cardinality_degree: non-integral exponent for " + p);
    }
    d.exp[p] = e;
  }
  return d;
}

} // namespace mssr
