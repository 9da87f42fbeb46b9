#pragma once

// Multidimensional affine schedules: validation against dependence edges,
// a greedy dimension-by-dimension scheduler over bounded integer coefficient
// rows, program augmentation with redirect statements, and reuse-vector
// consistency tests.

#include "dependence.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mssr {

// ---------------------------------------------------------------------------
// Schedules and timestamps

// One row is a coefficient vector over [iter_vars, params, 1] of the node's
// domain space. All nodes share the same number of rows.
using ScheduleRow = std::vector<Rat>;

struct Schedule {
  std::map<std::string, std::vector<ScheduleRow>> rows;

  size_t depth() const {
    size_t m = 0;
    for (auto &[_, rs] : rows) m = std::max(m, rs.size());
    return m;
  }
  std::string str() const {
    std::string s;
    for (auto &[label, rs] : rows) {
      s += label + ":";
      for (auto &r : rs) {
        s += " [";
        for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + rat_str(r[i]);
        s += "]";
      }
      s += "\n";
    }
    return s;
  }
};

inline Rat eval_row(const ScheduleRow &row, const std::vector<Rat> &pt,
                    const std::vector<Rat> &pvals) {
  Rat v = 0;
  size_t nv = pt.size();
  for (size_t i = 0; i < nv; ++i) v += row[i] * pt[i];
  for (size_t i = 0; i < pvals.size(); ++i) v += row[nv + i] * pvals[i];
  return v + row[nv + pvals.size()];
}

inline std::vector<Rat> timestamp(const Schedule &sched, const std::string &label,
                                  const Point &pt, const std::vector<Rat> &pvals) {
  auto it = sched.rows.find(label);
  if (it == sched.rows.end()) throw IrError("no schedule for node '" + label + "'");
  std::vector<Rat> rpt(pt.begin(), pt.end());
  std::vector<Rat> ts;
  for (auto &row : it->second) ts.push_back(eval_row(row, rpt, pvals));
  return ts;
}

enum class Order { Less, Equal, Greater };

inline Order timestamp_compare(const std::vector<Rat> &a, const std::vector<Rat> &b) {
  if (a.size() != b.size()) throw IrError("timestamp length mismatch");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return Order::Less;
    if (a[i] > b[i]) return Order::Greater;
  }
  return Order::Equal;
}

// ---------------------------------------------------------------------------
// Schedule validation

namespace detail {

// Theta_S(s) - Theta_T(t) as a form over an edge relation's [s, t, params].
inline AffineForm schedule_diff(const Space &rel_space, size_t nin,
                                const ScheduleRow &src_row,
                                const ScheduleRow &dst_row) {
  AffineForm d(rel_space);
  size_t np = rel_space.nparams();
  size_t nout = rel_space.nvars() - nin;
  for (size_t i = 0; i < nin; ++i) d.coeffs[i] = src_row[i];
  for (size_t i = 0; i < nout; ++i) d.coeffs[nin + i] -= dst_row[i];
  for (size_t i = 0; i < np; ++i)
    d.pcoeffs[i] = src_row[nin + i] - dst_row[nout + i];
  d.constant = src_row[nin + np] - dst_row[nout + np];
  return d;
}

// d >= 1 after clearing denominators (integer strictness slack).
inline AffineForm strict_positive(AffineForm d) {
  d.normalize();
  d.constant -= 1;
  return d;
}

}  // namespace detail

struct ScheduleCheck {
  bool ok = true;
  std::string edge;    // text of the violated edge
  std::string detail;  // which prefix level failed
};

inline ScheduleCheck validate_schedule(const Program &p, const Dependences &deps,
                                       const Schedule &sched) {
  size_t m = sched.depth();
  for (auto &e : deps.edges) {
    auto si = sched.rows.find(e.src), ti = sched.rows.find(e.dst);
    if (si == sched.rows.end() || ti == sched.rows.end())
      return {false, e.str(), "node missing from schedule"};
    const Space &sp = e.relation.cons.space;
    size_t nin = e.relation.nin();
    auto get_row = [&](const std::string &label, const std::vector<ScheduleRow> &rs,
                       size_t k) -> ScheduleRow {
      if (k < rs.size()) return rs[k];
      ConvexSet dom = deps.node_domain(p, label);
      return ScheduleRow(dom.space.nvars() + dom.space.nparams() + 1, Rat(0));
    };
    // violation at prefix k: rows < k equal, row k ordered dst <= ... src
    for (size_t k = 0; k <= m; ++k) {
      ConvexSet viol = e.relation.cons;
      for (size_t j = 0; j < k; ++j)
        viol.add_eq(detail::schedule_diff(sp, nin, get_row(e.src, si->second, j),
                                          get_row(e.dst, ti->second, j)));
      if (k < m) {
        viol.add_ineq(detail::strict_positive(detail::schedule_diff(
            sp, nin, get_row(e.src, si->second, k), get_row(e.dst, ti->second, k))));
      }
      if (!is_empty(viol)) {
        std::string why = k == m ? "timestamps equal on a dependence"
                                 : "order reversed at level " + std::to_string(k);
        return {false, e.str(), why};
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Greedy scheduler

struct UnschedulableError : std::runtime_error {
  std::vector<std::string> residual;  // unresolved edge texts

  explicit UnschedulableError(std::vector<std::string> res)
      : std::runtime_error("unschedulable: " + std::to_string(res.size()) +
                           " dependence edge(s) never strictly satisfied"),
        residual(std::move(res)) {}
};

struct SchedulerOptions {
  int coeff_bound = 2;
  size_t max_levels = 48;
  size_t sample_cap = 40;       // per edge, per probe binding
  size_t search_budget = 2000000;  // DFS row assignments per level
};

struct SchedulerBudgetError : std::runtime_error {
  SchedulerBudgetError()
      : std::runtime_error("scheduler search budget exhausted; raise the "
                           "coefficient bound or budget") {}
};

namespace detail {

// Candidate rows over n coefficients in [-bound, bound], ordered by
// (sum of absolute values, lexicographic): simple rows first.
inline std::vector<ScheduleRow> candidate_rows(size_t n, int bound) {
  std::vector<std::vector<int>> rows;
  std::vector<int> cur(n, 0);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == n) {
      rows.push_back(cur);
      return;
    }
    for (int c = -bound; c <= bound; ++c) {
      cur[i] = c;
      rec(i + 1);
    }
  };
  rec(0);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const std::vector<int> &a, const std::vector<int> &b) {
                     int sa = 0, sb = 0;
                     for (int c : a) sa += std::abs(c);
                     for (int c : b) sb += std::abs(c);
                     if (sa != sb) return sa < sb;
                     return a < b;
                   });
  std::vector<ScheduleRow> out;
  out.reserve(rows.size());
  for (auto &r : rows) out.emplace_back(r.begin(), r.end());
  return out;
}

struct EdgeSamples {
  size_t src_node, dst_node;  // indices into the node list
  // per sample: (src point + params + 1, dst point + params + 1)
  std::vector<std::pair<std::vector<Rat>, std::vector<Rat>>> pairs;
};

}  // namespace detail

inline Schedule feautrier_schedule(const Program &p, const Dependences &deps,
                                   const SchedulerOptions &opt = {}) {
  // A valid schedule induces a topological order of every instance graph, so
  // an instance-level cycle at a probe binding proves unschedulability without
  // searching coefficient space.
  for (int64_t bval : {4, 6}) {
    Binding b;
    for (auto &q : p.params) b[q] = bval;
    try {
      if (has_cycle(instance_graph(p, deps, b, 20000)).cyclic) {
        std::vector<std::string> res;
        for (auto &e : deps.edges) res.push_back(e.str());
        throw UnschedulableError(std::move(res));
      }
    } catch (const PolyError &) {
      // unbounded or oversized at this probe: skip the precheck
    }
  }

  std::vector<std::string> labels = deps.node_labels(p);
  std::map<std::string, size_t> label_index;
  for (size_t i = 0; i < labels.size(); ++i) label_index[labels[i]] = i;
  std::vector<ConvexSet> domains;
  for (auto &l : labels) domains.push_back(deps.node_domain(p, l));

  size_t np = p.params.size();
  std::vector<size_t> rowlen;
  for (auto &d : domains) rowlen.push_back(d.space.nvars() + np + 1);

  // Integer samples of every edge relation at two probe bindings: a cheap
  // necessary filter evaluated before any symbolic emptiness check. Sample
  // vectors are registered per node so candidate-row dot products can be
  // precomputed once.
  size_t nedges = deps.edges.size();
  std::vector<size_t> esrc(nedges), edst(nedges);
  std::vector<std::vector<std::vector<int64_t>>> nodevecs(labels.size());
  std::vector<std::vector<std::pair<size_t, size_t>>> epairs(nedges);
  for (size_t ei = 0; ei < nedges; ++ei) {
    const DependenceEdge &e = deps.edges[ei];
    esrc[ei] = label_index.at(e.src);
    edst[ei] = label_index.at(e.dst);
    size_t nin = e.relation.nin(), nout = e.relation.nout();
    for (int64_t bval : {4, 7}) {
      Binding b;
      for (auto &q : p.params) b[q] = bval;
      std::vector<Point> pts;
      try {
        pts = enumerate_points(e.relation.cons, b, 20000);
      } catch (const PolyError &) {
        continue;
      }
      size_t stride = std::max<size_t>(1, pts.size() / opt.sample_cap);
      for (size_t i = 0; i < pts.size(); i += stride) {
        std::vector<int64_t> s, t;
        for (size_t j = 0; j < nin; ++j) s.push_back(pts[i][j]);
        for (size_t j = 0; j < nout; ++j) t.push_back(pts[i][nin + j]);
        for (size_t j = 0; j < np; ++j) s.push_back(bval), t.push_back(bval);
        s.push_back(1), t.push_back(1);
        size_t sid = nodevecs[esrc[ei]].size();
        nodevecs[esrc[ei]].push_back(std::move(s));
        size_t tid = nodevecs[edst[ei]].size();
        nodevecs[edst[ei]].push_back(std::move(t));
        epairs[ei].push_back({sid, tid});
      }
    }
  }

  // Rows are pure functions of (length, bound): share them across calls.
  static std::map<std::pair<size_t, int>, std::vector<ScheduleRow>> cand_cache;
  auto candidates = [&](size_t n) -> const std::vector<ScheduleRow> & {
    auto key = std::make_pair(n, opt.coeff_bound);
    auto it = cand_cache.find(key);
    if (it == cand_cache.end())
      it = cand_cache.emplace(key, detail::candidate_rows(n, opt.coeff_bound)).first;
    return it->second;
  };

  // dots[node][cand][vec] = candidate row . sample vector; built only for
  // nodes the row search actually visits.
  std::vector<std::vector<std::vector<int64_t>>> dots(labels.size());
  std::vector<bool> dots_ready(labels.size(), false);
  auto node_dots = [&](size_t n) -> const std::vector<std::vector<int64_t>> & {
    if (!dots_ready[n]) {
      const auto &cands = candidates(rowlen[n]);
      dots[n].resize(cands.size());
      for (size_t c = 0; c < cands.size(); ++c) {
        std::vector<int64_t> irow;
        for (auto &r : cands[c]) irow.push_back(to_i64(rat_num(r)));
        dots[n][c].reserve(nodevecs[n].size());
        for (auto &v : nodevecs[n]) {
          int64_t acc = 0;
          for (size_t i = 0; i < irow.size(); ++i) acc += irow[i] * v[i];
          dots[n][c].push_back(acc);
        }
      }
      dots_ready[n] = true;
    }
    return dots[n];
  };

  std::vector<size_t> unresolved;
  for (size_t i = 0; i < deps.edges.size(); ++i) unresolved.push_back(i);

  Schedule sched;
  for (auto &l : labels) sched.rows[l] = {};

  // choice[n] indexes into candidates(rowlen[n]); index 0 is the zero row.
  std::vector<size_t> choice(labels.size(), 0);

  auto weak_on_samples = [&](size_t ei) {
    const auto &ds = node_dots(esrc[ei])[choice[esrc[ei]]];
    const auto &dt = node_dots(edst[ei])[choice[edst[ei]]];
    for (auto &[sv, tv] : epairs[ei])
      if (ds[sv] > dt[tv]) return false;
    return true;
  };
  auto strict_on_samples = [&](size_t ei) {
    const auto &ds = node_dots(esrc[ei])[choice[esrc[ei]]];
    const auto &dt = node_dots(edst[ei])[choice[edst[ei]]];
    for (auto &[sv, tv] : epairs[ei])
      if (ds[sv] >= dt[tv]) return false;
    // no integer samples: inconclusive, defer to the symbolic check
    return true;
  };
  auto chosen_row = [&](size_t n) -> ScheduleRow {
    if (choice[n] == 0) return ScheduleRow(rowlen[n], Rat(0));
    return candidates(rowlen[n])[choice[n]];
  };
  auto weak_symbolic = [&](size_t ei) {
    const DependenceEdge &e = deps.edges[ei];
    ConvexSet viol = e.relation.cons;
    viol.add_ineq(detail::strict_positive(
        detail::schedule_diff(e.relation.cons.space, e.relation.nin(),
                              chosen_row(esrc[ei]), chosen_row(edst[ei]))));
    return is_empty(viol);
  };
  auto strict_symbolic = [&](size_t ei) {
    const DependenceEdge &e = deps.edges[ei];
    ConvexSet viol = e.relation.cons;
    viol.add_ineq(detail::schedule_diff(e.relation.cons.space, e.relation.nin(),
                                        chosen_row(esrc[ei]),
                                        chosen_row(edst[ei])));  // src ts >= dst ts
    return is_empty(viol);
  };

  // Strongly connected components of the unresolved-edge graph (Kosaraju);
  // component ids come out in topological order of the condensation.
  auto components = [&](const std::vector<size_t> &edge_set) {
    size_t n = labels.size();
    std::vector<std::vector<size_t>> fwd(n), rev(n);
    for (size_t ei : edge_set) {
      fwd[esrc[ei]].push_back(edst[ei]);
      rev[edst[ei]].push_back(esrc[ei]);
    }
    std::vector<size_t> fin;
    std::vector<bool> seen(n, false);
    std::function<void(size_t)> dfs1 = [&](size_t u) {
      seen[u] = true;
      for (size_t v : fwd[u])
        if (!seen[v]) dfs1(v);
      fin.push_back(u);
    };
    for (size_t u = 0; u < n; ++u)
      if (!seen[u]) dfs1(u);
    std::vector<int> comp(n, -1);
    int nc = 0;
    std::function<void(size_t)> dfs2 = [&](size_t u) {
      comp[u] = nc;
      for (size_t v : rev[u])
        if (comp[v] < 0) dfs2(v);
    };
    for (size_t i = fin.size(); i-- > 0;)
      if (comp[fin[i]] < 0) {
        dfs2(fin[i]);
        ++nc;
      }
    return comp;
  };

  for (size_t level = 0; !unresolved.empty(); ++level) {
    if (level >= opt.max_levels) {
      std::vector<std::string> res;
      for (size_t ei : unresolved) res.push_back(deps.edges[ei].str());
      throw UnschedulableError(std::move(res));
    }

    std::vector<int> comp = components(unresolved);
    bool cross = false;
    for (size_t ei : unresolved) cross |= comp[esrc[ei]] != comp[edst[ei]];
    if (cross) {
      // A constant row per node, ordered by condensation position, strictly
      // satisfies every edge between different components at once; edges
      // inside a component tie and are left for later levels.
      for (size_t i = 0; i < labels.size(); ++i) {
        ScheduleRow row(rowlen[i], Rat(0));
        row.back() = Rat(comp[i]);
        sched.rows[labels[i]].push_back(std::move(row));
      }
      std::vector<size_t> still;
      for (size_t ei : unresolved)
        if (comp[esrc[ei]] == comp[edst[ei]]) still.push_back(ei);
      unresolved = std::move(still);
      continue;
    }

    // Every unresolved edge now sits inside one strongly connected component;
    // components share no nodes, so their row searches are independent.
    std::map<int, std::vector<size_t>> groups;
    for (size_t ei : unresolved) groups[comp[esrc[ei]]].push_back(ei);
    std::fill(choice.begin(), choice.end(), 0);
    std::vector<size_t> next_unresolved;

    for (auto &[cid, group] : groups) {
      std::vector<bool> active(labels.size(), false);
      for (size_t ei : group) active[esrc[ei]] = active[edst[ei]] = true;

      bool group_done = false;

      // Structured probe before the full search: reduction chains are usually
      // carried by one shared loop axis, so a unit row on a common variable
      // name (zero elsewhere) often satisfies the whole component at once.
      {
        auto cand_index = [&](size_t n, const ScheduleRow &row) -> size_t {
          const auto &cands = candidates(rowlen[n]);
          for (size_t c = 0; c < cands.size(); ++c)
            if (cands[c] == row) return c;
          return 0;
        };
        std::set<std::string> axes;
        for (size_t i = 0; i < labels.size(); ++i)
          if (active[i])
            for (auto &v : domains[i].space.iter_vars) axes.insert(v);
        for (int sgn : {1, -1}) {
          for (auto &axis : axes) {
            if (group_done) break;
            for (size_t i = 0; i < labels.size(); ++i) {
              if (!active[i]) continue;
              ScheduleRow row(rowlen[i], Rat(0));
              int vi = domains[i].space.var_index(axis);
              if (vi >= 0) row[vi] = Rat(sgn);
              choice[i] = cand_index(i, row);
            }
            bool all_weak = true;
            for (size_t ei : group)
              if (!weak_on_samples(ei) || !weak_symbolic(ei)) {
                all_weak = false;
                break;
              }
            if (!all_weak) continue;
            std::vector<size_t> still;
            bool any_strict = false;
            for (size_t ei : group) {
              if (strict_symbolic(ei)) any_strict = true;
              else still.push_back(ei);
            }
            if (!any_strict) continue;
            next_unresolved.insert(next_unresolved.end(), still.begin(), still.end());
            group_done = true;
          }
          if (group_done) break;
        }
        if (!group_done)
          for (size_t i = 0; i < labels.size(); ++i)
            if (active[i]) choice[i] = 0;
      }

      // Try to strictly satisfy one target edge per attempt: its endpoints are
      // placed first so non-strict rows prune immediately, instead of being
      // rejected only at a search leaf.
      for (size_t ti = 0; ti < group.size() && !group_done; ++ti) {
        size_t target = group[ti];
        for (size_t i = 0; i < labels.size(); ++i)
          if (active[i]) choice[i] = 0;

        std::vector<size_t> order;
        std::vector<bool> placed(labels.size(), false);
        auto place = [&](size_t n) {
          if (!placed[n]) {
            placed[n] = true;
            order.push_back(n);
          }
        };
        place(esrc[target]);
        place(edst[target]);
        // then greedily add nodes closing as many group edges as possible
        size_t remaining = 0;
        for (size_t i = 0; i < labels.size(); ++i) remaining += active[i];
        while (order.size() < remaining) {
          size_t best = labels.size(), best_gain = 0;
          for (size_t i = 0; i < labels.size(); ++i) {
            if (!active[i] || placed[i]) continue;
            size_t gain = 0;
            for (size_t ei : group) {
              size_t a = esrc[ei], b = edst[ei];
              size_t other = a == i ? b : b == i ? a : labels.size();
              if (other < labels.size() && (placed[other] || other == i)) ++gain;
            }
            if (best == labels.size() || gain > best_gain) best = i, best_gain = gain;
          }
          place(best);
        }

        // Edges checkable once the k-th node in `order` is assigned.
        std::vector<std::vector<size_t>> ready(order.size());
        size_t target_pos = 0;
        {
          std::map<size_t, size_t> pos;
          for (size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
          for (size_t ei : group) {
            size_t k = std::max(pos.at(esrc[ei]), pos.at(edst[ei]));
            ready[k].push_back(ei);
            if (ei == target) target_pos = k;
          }
        }

        size_t budget = opt.search_budget;
        std::function<bool(size_t)> dfs = [&](size_t k) -> bool {
          if (budget-- == 0) throw SchedulerBudgetError();
          if (k == order.size()) {
            for (size_t ei : group)
              if (!weak_symbolic(ei)) return false;
            if (!strict_symbolic(target)) return false;
            for (size_t ei : group)
              if (!strict_symbolic(ei)) next_unresolved.push_back(ei);
            return true;
          }
          size_t node = order[k];
          size_t ncand = candidates(rowlen[node]).size();
          for (size_t c = 0; c < ncand; ++c) {
            choice[node] = c;
            bool ok = true;
            for (size_t ei : ready[k])
              if (!weak_on_samples(ei)) {
                ok = false;
                break;
              }
            if (ok && k == target_pos && !strict_on_samples(target)) ok = false;
            if (ok && dfs(k + 1)) return true;
          }
          choice[node] = 0;
          return false;
        };
        group_done = dfs(0);
      }
      if (!group_done) {
        std::vector<std::string> res;
        for (size_t ei : group) res.push_back(deps.edges[ei].str());
        throw UnschedulableError(std::move(res));
      }
    }
    unresolved = std::move(next_unresolved);
    for (size_t i = 0; i < labels.size(); ++i)
      sched.rows[labels[i]].push_back(choice[i] == 0
                                          ? ScheduleRow(rowlen[i], Rat(0))
                                          : candidates(rowlen[i])[choice[i]]);
  }

  // Pad nodes with no rows (no edges at all) to the shared depth.
  size_t m = std::max<size_t>(sched.depth(), 1);
  for (size_t i = 0; i < labels.size(); ++i)
    while (sched.rows[labels[i]].size() < m)
      sched.rows[labels[i]].push_back(ScheduleRow(rowlen[i], Rat(0)));
  return sched;
}

// ---------------------------------------------------------------------------
// Program augmentation with redirect statements

struct AugmentedProgram {
  Program program;
  // reduction statement label -> (redirect label, accumulator array name)
  std::map<std::string, std::pair<std::string, std::string>> redirects;
};

inline AugmentedProgram augment_program(const Program &base) {
  AugmentedProgram out;
  out.program = base;
  Program &p = out.program;

  std::vector<Statement> rewritten;
  std::vector<Statement> redirects;
  for (auto &s : p.statements) {
    if (s.kind != Statement::Reduce) {
      rewritten.push_back(s);
      continue;
    }
    const ArrayDecl *decl = p.find_array(s.lhs_array);
    std::string acc = s.lhs_array + "'";
    while (p.find_array(acc)) acc += "'";
    p.arrays.push_back({acc, decl->index_space, ArrayKind::Intermediate});

    Statement body = s;
    body.lhs_array = acc;
    rewritten.push_back(body);

    Statement redir;
    redir.label = s.label + "_redir";
    redir.kind = Statement::Assign;
    redir.lhs_array = s.lhs_array;
    ConvexSet image = canonicalize(apply(access_relations(base, s).write, s.domain));
    redir.domain = image;
    for (auto &v : image.space.iter_vars)
      redir.lhs_index.push_back(AffineForm::var(image.space, v));
    redir.rhs = make_read(acc, redir.lhs_index);
    redirects.push_back(redir);
    out.redirects[s.label] = {redir.label, acc};
  }
  for (auto &r : redirects) rewritten.push_back(std::move(r));
  p.statements = std::move(rewritten);
  return out;
}

// ---------------------------------------------------------------------------
// Reuse-vector consistency

enum class ReuseConsistency { Before, After, Zero };

// Sign of the first nonzero entry of Theta_A . [r, 0, 0]: Before means the
// reused cell A[x] is scheduled before A[x + r].
inline ReuseConsistency reuse_consistent(const std::vector<ScheduleRow> &theta,
                                         const DirVector &r) {
  for (auto &row : theta) {
    Rat v = 0;
    for (size_t i = 0; i < r.entries.size() && i < row.size(); ++i)
      v += row[i] * Rat(r.entries[i]);
    if (v > 0) return ReuseConsistency::Before;
    if (v < 0) return ReuseConsistency::After;
  }
  return ReuseConsistency::Zero;
}

// Scheduler-agnostic consistency test: add a synthetic dependence
// A[x] -> A[x + r] on the redirect statement and reschedule.
inline std::optional<Schedule> reschedule_with_reuse(const AugmentedProgram &aug,
                                                     const std::string &redirect_label,
                                                     const DirVector &r,
                                                     const SchedulerOptions &opt = {}) {
  const Statement *redir = aug.program.find_statement(redirect_label);
  if (!redir) throw IrError("unknown redirect '" + redirect_label + "'");
  if (r.is_zero()) throw IrError("reuse vector must be nonzero");

  Dependences deps = all_dependences(aug.program);
  Relation R = make_relation(redir->domain.space, redir->domain.space);
  size_t nv = redir->domain.space.nvars();
  for (size_t i = 0; i < nv; ++i) {
    AffineForm eq(R.cons.space);
    eq.coeffs[i] = 1;
    eq.coeffs[nv + i] = -1;
    eq.constant = Rat(r.entries[i]);  // out_i = in_i + r_i
    R.cons.add_eq(eq);
  }
  R = restrict_domain(R, redir->domain);
  R = restrict_range(R, redir->domain);
  if (!is_empty(R.cons))
    deps.edges.push_back({redirect_label, redirect_label, redir->lhs_array, R});
  try {
    return feautrier_schedule(aug.program, deps, opt);
  } catch (const UnschedulableError &) {
    return std::nullopt;
  }
}

}  // namespace mssr
