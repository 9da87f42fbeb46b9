#pragma once

// Reduction simplification: rewrite a reduction so each result cell reuses the
// accumulator of a neighboring cell along a reuse vector r, paying only for
// the contributions gained (ADD) and, when the operator has an inverse, the
// contributions lost (SUB). Includes the candidate-direction algebra, the
// schedule-consistency heuristic, the recursive driver, and a desk-scale
// exhaustive oracle.

#include "complexity.hpp"
#include "dependence.hpp"
#include "scheduling.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mssr {

struct SimplifyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Transformation refused: the requested rewrite produces a dependence cycle.
struct TransformRefused : std::runtime_error {
  std::vector<std::string> witness;  // instance cycle, when available

  explicit TransformRefused(const std::string &msg, std::vector<std::string> w = {})
      : std::runtime_error(msg), witness(std::move(w)) {}
};

namespace detail {

// ---------------------------------------------------------------------------
// Algebra over finite unions of disjoint convex pieces.

inline std::vector<ConvexSet> u_pieces(SetUnion u) { return std::move(u.pieces); }

inline std::vector<ConvexSet> u_diff(const std::vector<ConvexSet> &A,
                                     const std::vector<ConvexSet> &B) {
  std::vector<ConvexSet> cur = A;
  for (auto &b : B) {
    std::vector<ConvexSet> next;
    for (auto &a : cur)
      for (auto &piece : difference(a, b).pieces) next.push_back(piece);
    cur = std::move(next);
  }
  return cur;
}

inline std::vector<ConvexSet> u_intersect(const std::vector<ConvexSet> &A,
                                          const std::vector<ConvexSet> &B) {
  std::vector<ConvexSet> out;
  for (auto &a : A)
    for (auto &b : B) {
      ConvexSet q = intersect(a, b);
      if (!is_empty(q)) out.push_back(q);
    }
  return out;
}

inline std::vector<ConvexSet> u_union(std::vector<ConvexSet> A,
                                      const std::vector<ConvexSet> &B) {
  for (auto &b : B) A.push_back(b);
  return A;
}

inline std::vector<ConvexSet> u_apply(const Relation &R,
                                      const std::vector<ConvexSet> &A) {
  std::vector<ConvexSet> out;
  for (auto &a : A) {
    ConvexSet img = canonicalize(apply(R, a));
    if (!is_empty(img)) out.push_back(img);
  }
  return out;
}

inline size_t u_count(const std::vector<ConvexSet> &A, const Binding &b,
                      size_t cap = 1000000) {
  size_t n = 0;
  for (auto &a : A) n += count_points(a, b, cap);
  return n;
}

// Componentwise max of piece degrees; empty union gives the all-zero degree.
inline MultiDegree u_degree(const std::vector<ConvexSet> &A) {
  MultiDegree d;
  for (auto &a : A) {
    MultiDegree q = cardinality_degree(a);
    for (auto &[k, v] : q.exp) d.exp[k] = std::max(d.of(k), v);
  }
  return normalize_degree(d);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Share space: directions r with expr(x) = expr(x + r) as a symbolic identity,
// certified by the null spaces of every RHS access map's linear part (guard
// reads and bare affine atoms included).

struct ShareSpace {
  Space space;
  std::vector<std::vector<Rat>> rows;  // r is shared iff every row . r = 0
  std::vector<DirVector> basis;        // primitive integer basis of the null space

  bool contains(const DirVector &r) const {
    for (auto &row : rows) {
      Rat dot = 0;
      for (size_t i = 0; i < row.size(); ++i) dot += row[i] * Rat(r.entries[i]);
      if (dot != 0) return false;
    }
    return true;
  }
};

inline ShareSpace share_space(const Statement &s) {
  if (s.kind != Statement::Reduce)
    throw SimplifyError("share_space: '" + s.label + "' is not a reduction");
  ShareSpace out;
  out.space = s.domain.space;
  size_t n = out.space.nvars();
  auto add_row = [&](const AffineForm &f) {
    std::vector<Rat> row(f.coeffs.begin(), f.coeffs.begin() + (long)n);
    for (auto &c : row)
      if (c != 0) {
        out.rows.push_back(row);
        return;
      }
  };
  for (auto &rd : collect_reads(s.rhs))
    for (auto &f : rd.index) add_row(f);
  for (auto &f : collect_affine_atoms(s.rhs)) add_row(f);

  // Null-space basis by Gaussian elimination.
  std::vector<std::vector<Rat>> m = out.rows;
  std::vector<int> pivot_of_col(n, -1);
  size_t rank = 0;
  for (size_t col = 0; col < n && rank < m.size(); ++col) {
    size_t pick = SIZE_MAX;
    for (size_t i = rank; i < m.size(); ++i)
      if (m[i][col] != 0) {
        pick = i;
        break;
      }
    if (pick == SIZE_MAX) continue;
    std::swap(m[rank], m[pick]);
    Rat p = m[rank][col];
    for (auto &x : m[rank]) x /= p;
    for (size_t i = 0; i < m.size(); ++i) {
      if (i == rank || m[i][col] == 0) continue;
      Rat f = m[i][col];
      for (size_t j = 0; j < n; ++j) m[i][j] -= f * m[rank][j];
    }
    pivot_of_col[col] = (int)rank;
    ++rank;
  }
  for (size_t col = 0; col < n; ++col) {
    if (pivot_of_col[col] >= 0) continue;
    std::vector<Rat> v(n, Rat(0));
    v[col] = 1;
    for (size_t c = 0; c < n; ++c)
      if (pivot_of_col[c] >= 0) v[c] = -m[(size_t)pivot_of_col[c]][col];
    Int lcm = 1;
    for (auto &x : v) {
      Int d = rat_den(x);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    DirVector d;
    Int g = 0;
    for (auto &x : v) {
      Rat scaled = x * Rat(lcm);
      d.entries.push_back(rat_num(scaled));
      g = boost::multiprecision::gcd(g, boost::multiprecision::abs(d.entries.back()));
    }
    if (g > 1)
      for (auto &e : d.entries) e /= g;
    for (auto &e : d.entries) {
      if (e == 0) continue;
      if (e < 0)
        for (auto &x : d.entries) x = -x;
      break;
    }
    out.basis.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shift geometry of a reduction domain along r.

struct STGeometry {
  ConvexSet P;                          // original domain
  std::vector<ConvexSet> add, sub;      // P - T_r(P) and T_r(P) - P
  ConvexSet inter;                      // P intersect T_r(P)
  Relation proj;                        // {x -> u}, unrestricted
  std::vector<ConvexSet> add_u, sub_u;  // images under proj
  std::vector<ConvexSet> inter_u;
  std::vector<ConvexSet> lsub;          // full space: proj^-1(inter_u) ∩ sub
  DirVector r, r_u;                     // direction and its LHS projection
};

inline STGeometry st_geometry(const Program &p, const Statement &s, const DirVector &r) {
  const ArrayDecl *lhs = p.find_array(s.lhs_array);
  if (!lhs) throw SimplifyError("unknown LHS array '" + s.lhs_array + "'");
  STGeometry g;
  g.P = canonicalize(s.domain);
  g.r = r;
  ConvexSet shifted = canonicalize(translate(g.P, r));
  g.add = detail::u_pieces(difference(g.P, shifted));
  g.sub = detail::u_pieces(difference(shifted, g.P));
  g.inter = intersect(g.P, shifted);
  g.proj = detail::access_map(ConvexSet::universe(s.domain.space),
                              lhs->index_space.space, s.lhs_index);
  g.add_u = detail::u_apply(g.proj, g.add);
  g.sub_u = detail::u_apply(g.proj, g.sub);
  if (!is_empty(g.inter)) g.inter_u = detail::u_apply(g.proj, {g.inter});

  for (auto &f : s.lhs_index) {
    Rat dot = 0;
    for (size_t i = 0; i < f.coeffs.size(); ++i) dot += f.coeffs[i] * Rat(r.entries[i]);
    if (rat_den(dot) != 1)
      throw SimplifyError("direction " + r.str() + " has a fractional projection");
    g.r_u.entries.push_back(rat_num(dot));
  }

  Relation unproj = inverse(g.proj);
  std::vector<ConvexSet> preimage;
  for (auto &piece : g.inter_u) {
    ConvexSet q = canonicalize(apply(unproj, piece));
    if (!is_empty(q)) preimage.push_back(q);
  }
  g.lsub = detail::u_intersect(preimage, g.sub);
  return g;
}

// Non-invertible operators admit r only when nothing ever leaves the window:
// the subtraction domain proj^-1(inter_u) ∩ sub must be empty.
inline bool inverse_admits(const Program &p, const Statement &s, const DirVector &r) {
  if (s.op.has_inverse) return true;
  return st_geometry(p, s, r).lsub.empty();
}

// ---------------------------------------------------------------------------
// Candidate reuse vectors for one face of a reduction domain.

struct CandidateSet {
  const Program *prog = nullptr;
  Statement stmt;
  ConvexSet face_set;
  ShareSpace share;

  bool member(const DirVector &r) const {
    if (r.is_zero() || r.entries.size() != stmt.domain.space.nvars()) return false;
    if (!share.contains(r)) return false;
    for (auto &eq : face_set.equalities) {
      Rat dot = 0;
      for (size_t i = 0; i < eq.coeffs.size(); ++i)
        dot += eq.coeffs[i] * Rat(r.entries[i]);
      if (dot != 0) return false;
    }
    if (!grows_along(face_set, r)) return false;
    return inverse_admits(*prog, stmt, r);
  }

  // Fixed enumeration order: +e1..+en, -e1..-en, then the primitive share
  // basis generators (covering share spaces with no axis vector).
  std::vector<DirVector> enumerate_unit() const {
    size_t n = stmt.domain.space.nvars();
    std::vector<DirVector> raw;
    for (int sign : {1, -1})
      for (size_t k = 0; k < n; ++k) raw.push_back(DirVector::unit(n, k, sign));
    for (auto &b : share.basis) {
      raw.push_back(b);
      raw.push_back(b.negated());
    }
    std::vector<DirVector> out;
    for (auto &r : raw) {
      if (std::find(out.begin(), out.end(), r) != out.end()) continue;
      if (member(r)) out.push_back(r);
    }
    return out;
  }
};

inline CandidateSet candidate_reuse_vectors(const Program &p, const Statement &s,
                                            const ConvexSet &face_set) {
  CandidateSet c;
  c.prog = &p;
  c.stmt = s;
  c.face_set = canonicalize(face_set);
  c.share = share_space(s);
  return c;
}

// ---------------------------------------------------------------------------
// The transformation proper.

struct STResult {
  std::vector<Statement> statements;
  std::vector<ArrayDecl> new_arrays;
  DirVector r;
  std::vector<std::string> residual_labels;  // ADD/SUB reductions for recursion
};

struct STApplication {
  bool applied = false;
  std::string nogain_reason;
  STResult result;
};

namespace detail {

inline std::string fresh_array_name(const Program &p, std::string base) {
  while (p.find_array(base)) base += "_";
  return base;
}

inline std::string fresh_label(const Program &p, std::string base) {
  while (p.find_statement(base)) base += "_";
  return base;
}

inline std::vector<AffineForm> identity_index(const Space &sp) {
  std::vector<AffineForm> out;
  for (auto &v : sp.iter_vars) out.push_back(AffineForm::var(sp, v));
  return out;
}

inline std::vector<AffineForm> shifted_index(const Space &sp, const DirVector &r_u) {
  std::vector<AffineForm> out;
  for (size_t i = 0; i < sp.nvars(); ++i) {
    AffineForm f = AffineForm::var(sp, sp.iter_vars[i]);
    f.constant -= Rat(r_u.entries[i]);
    out.push_back(f);
  }
  return out;
}

inline ExprPtr combine_expr(const ReductionOp &op, ExprPtr a, ExprPtr b) {
  if (op.name == "sum") return make_bin("+", std::move(a), std::move(b));
  if (op.name == "product") return make_bin("*", std::move(a), std::move(b));
  return make_bin(op.name, std::move(a), std::move(b));
}

inline ExprPtr uncombine_expr(const ReductionOp &op, ExprPtr a, ExprPtr b) {
  if (op.name == "sum") return make_bin("-", std::move(a), std::move(b));
  if (op.name == "product") return make_bin("/", std::move(a), std::move(b));
  throw SimplifyError("operator '" + op.name + "' has no inverse");
}

}  // namespace detail

inline STApplication apply_st(const Program &p, const Statement &s, const DirVector &r) {
  if (s.kind != Statement::Reduce)
    throw SimplifyError("apply_st: '" + s.label + "' is not a reduction");
  ShareSpace share = share_space(s);
  if (!share.contains(r))
    throw SimplifyError("sharing certificate fails for direction " + r.str() +
                        " on '" + s.label + "'");
  STGeometry g = st_geometry(p, s, r);
  if (!s.op.has_inverse && !g.lsub.empty())
    throw SimplifyError("operator '" + s.op.name +
                        "' has no inverse but direction " + r.str() +
                        " loses contributions");
  STApplication out;
  out.result.r = r;

  MultiDegree degP = normalize_degree(cardinality_degree(g.P));
  if (g.add.empty()) {
    out.nogain_reason = "degenerate shift: nothing gained per step";
    return out;
  }
  if (detail::u_degree(g.add) == degP) {
    out.nogain_reason = "gained contributions grow like the full domain";
    return out;
  }
  if (!g.lsub.empty() && detail::u_degree(g.lsub) == degP) {
    out.nogain_reason = "lost contributions grow like the full domain";
    return out;
  }

  const ArrayDecl *lhs = p.find_array(s.lhs_array);
  std::string add_name = detail::fresh_array_name(p, s.lhs_array + "Add");
  out.result.new_arrays.push_back({add_name, lhs->index_space, ArrayKind::Intermediate});
  std::string sub_name;
  if (!g.lsub.empty()) {
    sub_name = detail::fresh_array_name(p, s.lhs_array + "Sub");
    out.result.new_arrays.push_back({sub_name, lhs->index_space, ArrayKind::Intermediate});
  }

  // LHS-cell domain algebra.
  auto dom_add_only = detail::u_diff(g.add_u, g.inter_u);
  auto dom_reuse_only = detail::u_diff(g.inter_u, detail::u_union(g.add_u, g.sub_u));
  auto dom_add_reuse = detail::u_intersect(g.add_u, detail::u_diff(g.inter_u, g.sub_u));
  auto dom_reuse_sub = detail::u_intersect(g.sub_u, detail::u_diff(g.inter_u, g.add_u));
  auto dom_all = detail::u_intersect(g.sub_u, detail::u_intersect(g.inter_u, g.add_u));

  auto emit_reduce = [&](const std::string &suffix, const std::string &array,
                         const std::vector<ConvexSet> &pieces, const ExprPtr &rhs) {
    size_t idx = 0;
    for (auto &dom : pieces) {
      Statement t;
      t.label = detail::fresh_label(
          p, s.label + suffix + (idx ? "_p" + std::to_string(idx + 1) : ""));
      ++idx;
      t.kind = Statement::Reduce;
      t.op = s.op;
      t.lhs_array = array;
      t.lhs_index = s.lhs_index;
      t.rhs = rhs;
      t.domain = dom;
      out.result.residual_labels.push_back(t.label);
      out.result.statements.push_back(std::move(t));
    }
  };
  emit_reduce("_add", add_name, g.add, s.rhs);
  if (!g.lsub.empty())
    emit_reduce("_sub", sub_name, g.lsub, shift_expr(s.rhs, r.negated()));

  const Space &usp = lhs->index_space.space;
  auto u_id = detail::identity_index(usp);
  auto add_read = make_read(add_name, u_id);
  auto reuse_read = make_read(s.lhs_array, detail::shifted_index(usp, g.r_u));
  auto sub_read = sub_name.empty() ? nullptr : make_read(sub_name, u_id);

  auto emit_assign = [&](const std::string &suffix,
                         const std::vector<ConvexSet> &pieces, const ExprPtr &rhs) {
    size_t idx = 0;
    for (auto &dom : pieces) {
      Statement t;
      t.label = detail::fresh_label(
          p, s.label + suffix + (idx ? "_p" + std::to_string(idx + 1) : ""));
      ++idx;
      t.kind = Statement::Assign;
      t.lhs_array = s.lhs_array;
      ConvexSet d = dom;
      d.space.iter_vars = usp.iter_vars;
      t.domain = d;
      t.lhs_index = detail::identity_index(usp);
      t.rhs = rhs;
      out.result.statements.push_back(std::move(t));
    }
  };
  emit_assign("_add_only", dom_add_only, add_read);
  emit_assign("_reuse", dom_reuse_only, reuse_read);
  emit_assign("_add_reuse", dom_add_reuse,
              detail::combine_expr(s.op, add_read, reuse_read));
  if (sub_read) {
    emit_assign("_reuse_sub", dom_reuse_sub,
                detail::uncombine_expr(s.op, reuse_read, sub_read));
    emit_assign("_add_reuse_sub", dom_all,
                detail::uncombine_expr(
                    s.op, detail::combine_expr(s.op, add_read, reuse_read), sub_read));
  }
  out.applied = true;
  return out;
}

// ---------------------------------------------------------------------------
// Schedule-consistency heuristic for one face.

struct DirectionChoice {
  std::optional<DirVector> r;
  std::string skip_reason;             // set when no direction was chosen
  bool rescheduled = false;            // direction needed a reuse-aware reschedule
};

inline DirVector project_direction(const Statement &s, const DirVector &r) {
  DirVector r_u;
  for (auto &f : s.lhs_index) {
    Rat dot = 0;
    for (size_t i = 0; i < f.coeffs.size(); ++i) dot += f.coeffs[i] * Rat(r.entries[i]);
    if (rat_den(dot) != 1)
      throw SimplifyError("direction " + r.str() + " has a fractional projection");
    r_u.entries.push_back(rat_num(dot));
  }
  return r_u;
}

inline DirectionChoice choose_direction(const CandidateSet &cand,
                                        const AugmentedProgram &aug,
                                        const Schedule &theta,
                                        const std::string &redirect_label,
                                        const SchedulerOptions &opt = {}) {
  DirectionChoice out;
  std::vector<DirVector> units = cand.enumerate_unit();
  std::optional<DirVector> first;
  for (auto &u : units) {
    if (project_direction(cand.stmt, u).is_zero()) continue;
    first = u;
    break;
  }
  if (!first) {
    out.skip_reason = units.empty() ? "no candidate direction"
                                    : "candidates do not move the result cell";
    return out;
  }
  DirVector r = *first;
  DirVector r_u = project_direction(cand.stmt, r);
  auto rows = theta.rows.find(redirect_label);
  if (rows == theta.rows.end())
    throw SimplifyError("no schedule rows for '" + redirect_label + "'");
  switch (reuse_consistent(rows->second, r_u)) {
  case ReuseConsistency::Before:
    out.r = r;
    return out;
  case ReuseConsistency::After:
    if (cand.member(r.negated())) {
      out.r = r.negated();
      return out;
    }
    out.skip_reason = "inverse-restricted against schedule";
    return out;
  case ReuseConsistency::Zero:
    break;
  }
  if (reschedule_with_reuse(aug, redirect_label, r_u, opt)) {
    out.r = r;
    out.rescheduled = true;
    return out;
  }
  if (cand.member(r.negated()) &&
      reschedule_with_reuse(aug, redirect_label, r_u.negated(), opt)) {
    out.r = r.negated();
    out.rescheduled = true;
    return out;
  }
  out.skip_reason = "no schedule-compatible direction";
  return out;
}

// ---------------------------------------------------------------------------
// Recursive driver.

struct FaceDecision {
  std::string stmt;
  std::string face;    // affine hull of the domain the decision applies to
  std::string action;  // applied | skipped | nogain
  std::string detail;  // chosen direction or reason
};

struct SimplifyReport {
  std::vector<FaceDecision> decisions;
  MultiDegree before_leading, after_leading;

  std::string str() const {
    std::string s;
    for (auto &d : decisions) {
      s += "stmt=" + d.stmt + " face=" + d.face + " action=" + d.action;
      if (!d.detail.empty())
        s += (d.action == "applied" ? " r=" : " reason=\"") + d.detail +
             (d.action == "applied" ? "" : "\"");
      s += "\n";
    }
    s += "before=" + before_leading.str() + " after=" + after_leading.str() + "\n";
    return s;
  }
};

struct SimplifyResult {
  Program program;
  Schedule schedule;
  SimplifyReport report;
};

namespace detail {

inline std::string affine_hull_tag(const ConvexSet &dom) {
  ConvexSet h(dom.space);
  h.equalities = canonicalize(dom).equalities;
  std::vector<std::string> eqs;
  for (auto &e : h.equalities) eqs.push_back(e.str(dom.space));
  std::sort(eqs.begin(), eqs.end());
  std::string tag;
  for (auto &e : eqs) tag += e + "; ";
  return tag.empty() ? "full" : tag;
}

// Replace statement `label` with `repl` in place, keeping program order.
inline void splice_statements(Program &p, const std::string &label,
                              std::vector<Statement> repl,
                              std::vector<ArrayDecl> arrays) {
  for (auto &a : arrays) p.arrays.push_back(std::move(a));
  std::vector<Statement> out;
  for (auto &s : p.statements) {
    if (s.label != label) {
      out.push_back(std::move(s));
      continue;
    }
    for (auto &t : repl) out.push_back(std::move(t));
  }
  p.statements = std::move(out);
}

struct SimplifyCtx {
  Program *cur;
  const AugmentedProgram *aug;
  const Schedule *theta;
  std::string redirect_label;
  SimplifyReport *report;
  const SchedulerOptions *opt;
  std::set<std::string> used_faces;
  int budget = 0;
};

inline void simplify_stmt(SimplifyCtx &ctx, const std::string &label,
                          const std::optional<DirVector> &forced) {
  const Statement *s = ctx.cur->find_statement(label);
  if (!s || s->kind != Statement::Reduce) return;
  std::string face = affine_hull_tag(s->domain);
  CandidateSet cand = candidate_reuse_vectors(*ctx.cur, *s, s->domain);

  std::optional<DirVector> r;
  bool rescheduled = false;
  if (forced) {
    if (!cand.member(*forced))
      throw SimplifyError("forced direction " + forced->str() +
                          " is not a valid reuse vector for '" + label + "'");
    r = *forced;
  } else {
    DirectionChoice choice =
        choose_direction(cand, *ctx.aug, *ctx.theta, ctx.redirect_label, *ctx.opt);
    if (!choice.r) {
      ctx.report->decisions.push_back({label, face, "skipped", choice.skip_reason});
      return;
    }
    r = choice.r;
    rescheduled = choice.rescheduled;
  }

  STApplication app = apply_st(*ctx.cur, *s, *r);
  if (!app.applied) {
    ctx.report->decisions.push_back({label, face, "nogain", app.nogain_reason});
    return;
  }
  std::string note = r->str();
  if (rescheduled) note += " (rescheduled)";
  ctx.report->decisions.push_back({label, face, "applied", note});
  std::vector<std::string> residuals = app.result.residual_labels;
  splice_statements(*ctx.cur, label, std::move(app.result.statements),
                    std::move(app.result.new_arrays));

  for (auto &res : residuals) {
    const Statement *rs = ctx.cur->find_statement(res);
    if (!rs) continue;
    std::string tag = affine_hull_tag(rs->domain);
    if (ctx.used_faces.count(tag)) {
      ctx.report->decisions.push_back({res, tag, "skipped", "face already consumed"});
      continue;
    }
    ctx.used_faces.insert(tag);
    if (ctx.budget <= 0) {
      ctx.report->decisions.push_back({res, tag, "skipped", "face budget exhausted"});
      continue;
    }
    --ctx.budget;
    simplify_stmt(ctx, res, std::nullopt);
  }
}

}  // namespace detail

inline SimplifyResult simplify_program(
    const Program &input, const SchedulerOptions &opt = {},
    const std::map<std::string, DirVector> *force = nullptr) {
  SimplifyResult out;
  out.report.before_leading = normalize_degree(program_complexity(input).leading);

  AugmentedProgram aug = augment_program(input);
  Dependences deps = all_dependences(aug.program);
  Schedule theta = feautrier_schedule(aug.program, deps, opt);

  Program cur = aug.program;
  for (auto &s : input.statements) {
    if (s.kind != Statement::Reduce) continue;
    detail::SimplifyCtx ctx;
    ctx.cur = &cur;
    ctx.aug = &aug;
    ctx.theta = &theta;
    ctx.redirect_label = aug.redirects.at(s.label).first;
    ctx.report = &out.report;
    ctx.opt = &opt;
    ctx.budget = (int)faces(s.domain).size();
    ctx.used_faces.insert(detail::affine_hull_tag(s.domain));
    std::optional<DirVector> forced;
    if (force) {
      auto it = force->find(s.label);
      if (it != force->end()) forced = it->second;
    }
    detail::simplify_stmt(ctx, s.label, forced);
  }

  SsaReport ssa = check_array_ssa(cur);
  if (!ssa.ok)
    throw SimplifyError("internal: transformed program breaks array SSA: " + ssa.str());
  Dependences deps2 = all_dependences(cur);
  try {
    out.schedule = feautrier_schedule(cur, deps2, opt);
  } catch (const UnschedulableError &e) {
    Binding b;
    for (auto &q : cur.params) b[q] = 4;
    std::vector<std::string> witness;
    InstanceGraph g = instance_graph(cur, deps2, b);
    CycleWitness w = has_cycle(g);
    for (size_t i : w.nodes) witness.push_back(g.nodes[i].str());
    throw TransformRefused("transformed program has a dependence cycle: " + w.str(g),
                           std::move(witness));
  }
  out.report.after_leading = normalize_degree(program_complexity(cur).leading);
  out.program = std::move(cur);
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle: try every per-reduction unit-direction assignment
// (including skip), keep the schedulable minimum under base-|S| complexity.

struct ExhaustiveResult {
  Program program;
  ProgramComplexity complexity;
  size_t leaves = 0;      // assignments enumerated
  bool applied_any = false;
};

namespace detail {

struct ExhaustiveLeaf {
  std::vector<int> codes;  // statement degree codes under a shared term order
  std::vector<int> path;   // option index chosen at each decision point
  size_t order;
};

// Options at a decision: index 0..k-1 = unit candidates, k = skip.
inline std::vector<DirVector> exhaustive_options(const Program &p, const Statement &s) {
  return candidate_reuse_vectors(p, s, s.domain).enumerate_unit();
}

inline void exhaustive_rec(const Program &cur, std::vector<std::string> pending,
                           std::vector<int> &path, std::vector<ExhaustiveLeaf> &leaves,
                           const TermOrder &order, size_t depth_budget) {
  while (!pending.empty() && !cur.find_statement(pending.back())) pending.pop_back();
  if (pending.empty()) {
    std::vector<int> codes;
    for (auto &s : cur.statements)
      codes.push_back(order.code(statement_complexity(s)));
    leaves.push_back({std::move(codes), path, leaves.size()});
    return;
  }
  std::string label = pending.back();
  pending.pop_back();
  const Statement s = *cur.find_statement(label);
  std::vector<DirVector> options = exhaustive_options(cur, s);
  for (size_t k = 0; k < options.size(); ++k) {
    if (depth_budget == 0) break;
    STApplication app = apply_st(cur, s, options[k]);
    if (!app.applied) continue;
    Program next = cur;
    std::vector<std::string> next_pending = pending;
    for (auto &res : app.result.residual_labels) next_pending.push_back(res);
    splice_statements(next, label, std::move(app.result.statements),
                      std::move(app.result.new_arrays));
    path.push_back((int)k);
    exhaustive_rec(next, std::move(next_pending), path, leaves, order, depth_budget - 1);
    path.pop_back();
  }
  path.push_back(-1);  // skip
  exhaustive_rec(cur, std::move(pending), path, leaves, order, depth_budget);
  path.pop_back();
}

inline Program exhaustive_materialize(const Program &base,
                                      const std::vector<std::string> &roots,
                                      const std::vector<int> &path) {
  Program cur = base;
  std::vector<std::string> pending(roots.rbegin(), roots.rend());
  size_t pi = 0;
  while (!pending.empty()) {
    while (!pending.empty() && !cur.find_statement(pending.back())) pending.pop_back();
    if (pending.empty()) break;
    std::string label = pending.back();
    pending.pop_back();
    int k = path[pi++];
    if (k < 0) continue;
    const Statement s = *cur.find_statement(label);
    std::vector<DirVector> options = exhaustive_options(cur, s);
    STApplication app = apply_st(cur, s, options[(size_t)k]);
    for (auto &res : app.result.residual_labels) pending.push_back(res);
    splice_statements(cur, label, std::move(app.result.statements),
                      std::move(app.result.new_arrays));
  }
  return cur;
}

}  // namespace detail

inline ExhaustiveResult exhaustive_search(const Program &input, size_t face_cap = 24,
                                          const SchedulerOptions &opt = {}) {
  size_t total_faces = 0;
  for (auto &s : input.statements)
    if (s.kind == Statement::Reduce) total_faces += faces(s.domain).size();
  if (total_faces > face_cap)
    throw SimplifyError("exhaustive_search: face count " + std::to_string(total_faces) +
                        " exceeds cap " + std::to_string(face_cap));

  AugmentedProgram aug = augment_program(input);
  std::vector<std::string> roots;
  for (auto &s : aug.program.statements)
    if (s.kind == Statement::Reduce) roots.push_back(s.label);

  std::vector<std::string> pending(roots.rbegin(), roots.rend());
  std::vector<int> path;
  std::vector<detail::ExhaustiveLeaf> leaves;
  TermOrder shared = TermOrder::graded(input.params, 6);
  detail::exhaustive_rec(aug.program, pending, path, leaves, shared, face_cap);

  size_t max_stmts = 0;
  for (auto &leaf : leaves) max_stmts = std::max(max_stmts, leaf.codes.size());
  int64_t base = std::max<int64_t>((int64_t)max_stmts + 1, 2);
  std::stable_sort(leaves.begin(), leaves.end(),
                   [&](const detail::ExhaustiveLeaf &a, const detail::ExhaustiveLeaf &b) {
                     Int va = base_s_sum(a.codes, base), vb = base_s_sum(b.codes, base);
                     return va != vb ? va < vb : a.order < b.order;
                   });
  for (auto &leaf : leaves) {
    Program prog = detail::exhaustive_materialize(aug.program, roots, leaf.path);
    Dependences deps = all_dependences(prog);
    try {
      feautrier_schedule(prog, deps, opt);
    } catch (const UnschedulableError &) {
      continue;
    } catch (const SchedulerBudgetError &) {
      continue;
    }
    ExhaustiveResult out;
    out.program = std::move(prog);
    out.complexity = program_complexity(out.program);
    out.leaves = leaves.size();
    for (int k : leaf.path) out.applied_any |= k >= 0;
    return out;
  }
  throw SimplifyError("exhaustive_search: no schedulable assignment found");
}

}  // namespace mssr
