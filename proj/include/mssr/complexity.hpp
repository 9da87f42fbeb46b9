#pragma once

// Asymptotic complexity of statements and programs: per-parameter growth
// degrees, a total order on degree terms with scalar codes, and a base-|S|
// aggregate whose integer comparison agrees with multiset dominance of codes.

#include "ir.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mssr {

// Drop zero exponents so structurally different maps compare equal.
inline MultiDegree normalize_degree(const MultiDegree &d) {
  MultiDegree out;
  for (auto &[k, v] : d.exp)
    if (v != 0) out.exp[k] = v;
  return out;
}

struct TermOrder {
  std::vector<std::string> params;
  std::vector<MultiDegree> terms;  // index = scalar code, strictly increasing

  // Graded order: total degree first, ties by the exponents of the later
  // declared parameters ascending, so M < N when M is declared first.
  static TermOrder graded(std::vector<std::string> params, int cap = 2) {
    TermOrder o;
    o.params = std::move(params);
    std::vector<int> e(o.params.size(), 0);
    std::vector<std::vector<int>> all;
    std::function<void(size_t)> rec = [&](size_t k) {
      if (k == e.size()) {
        all.push_back(e);
        return;
      }
      for (int v = 0; v <= cap; ++v) {
        e[k] = v;
        rec(k + 1);
      }
      e[k] = 0;
    };
    rec(0);
    std::stable_sort(all.begin(), all.end(),
                     [](const std::vector<int> &a, const std::vector<int> &b) {
                       int ta = 0, tb = 0;
                       for (int v : a) ta += v;
                       for (int v : b) tb += v;
                       if (ta != tb) return ta < tb;
                       for (size_t i = a.size(); i-- > 0;)
                         if (a[i] != b[i]) return a[i] < b[i];
                       return false;
                     });
    for (auto &v : all) {
      MultiDegree d;
      for (size_t i = 0; i < o.params.size(); ++i)
        if (v[i]) d.exp[o.params[i]] = v[i];
      o.terms.push_back(std::move(d));
    }
    return o;
  }

  // Two-parameter preset: 1 < M < N < MN < M^2N < MN^2 < M^2N^2, codes 0..6.
  static TermOrder pair_preset(const std::string &m, const std::string &n) {
    TermOrder o;
    o.params = {m, n};
    auto t = [&](int em, int en) {
      MultiDegree d;
      if (em) d.exp[m] = em;
      if (en) d.exp[n] = en;
      return d;
    };
    o.terms = {t(0, 0), t(1, 0), t(0, 1), t(1, 1), t(2, 1), t(1, 2), t(2, 2)};
    return o;
  }

  int code(const MultiDegree &t) const {
    MultiDegree q = normalize_degree(t);
    for (auto &[k, v] : q.exp)
      if (std::find(params.begin(), params.end(), k) == params.end())
        throw PolyError("term order: unknown parameter '" + k + "'");
    for (size_t i = 0; i < terms.size(); ++i)
      if (normalize_degree(terms[i]) == q) return (int)i;
    throw PolyError("term " + t.str() + " exceeds the order's cap");
  }
};

inline MultiDegree statement_complexity(const Statement &s) {
  return cardinality_degree(s.domain);
}

inline int encode_scalar(const MultiDegree &t, const TermOrder &order) {
  return order.code(t);
}

inline Int base_s_sum(const std::vector<int> &codes, int64_t s_count) {
  if (s_count < 1) throw PolyError("base_s_sum: base must be positive");
  Int total = 0;
  for (int c : codes) {
    if (c < 0) throw PolyError("base_s_sum: negative code");
    total += boost::multiprecision::pow(Int(s_count), (unsigned)c);
  }
  return total;
}

struct ComplexityRow {
  std::string stmt;
  MultiDegree degree;
  int code = 0;
};

struct ProgramComplexity {
  TermOrder order;
  std::vector<ComplexityRow> rows;
  MultiDegree leading;  // degree with the largest code; "1" when empty
  int64_t base = 0;     // |S| used for the aggregate
  Int aggregate = 0;

  std::vector<int> codes() const {
    std::vector<int> out;
    for (auto &r : rows) out.push_back(r.code);
    return out;
  }
  std::string report() const {
    std::string s;
    for (auto &r : rows)
      s += r.stmt + ", " + r.degree.str() + ", " + std::to_string(r.code) + "\n";
    return s;
  }
};

inline ProgramComplexity program_complexity(const Program &p, const TermOrder *order = nullptr) {
  ProgramComplexity out;
  int cap = 2;
  std::vector<MultiDegree> degs;
  for (auto &s : p.statements) {
    MultiDegree d = normalize_degree(statement_complexity(s));
    for (auto &[k, v] : d.exp) cap = std::max(cap, v);
    degs.push_back(std::move(d));
  }
  out.order = order ? *order : TermOrder::graded(p.params, cap);
  int best = -1;
  for (size_t i = 0; i < p.statements.size(); ++i) {
    ComplexityRow r{p.statements[i].label, degs[i], out.order.code(degs[i])};
    if (r.code > best) {
      best = r.code;
      out.leading = r.degree;
    }
    out.rows.push_back(std::move(r));
  }
  out.base = std::max<int64_t>((int64_t)out.rows.size(), 2);
  out.aggregate = base_s_sum(out.codes(), out.base);
  return out;
}

// Compare under a common base so the verdict agrees with multiset dominance
// of codes even when the two programs have different statement counts.
inline int compare_complexity(const ProgramComplexity &a, const ProgramComplexity &b) {
  std::vector<std::string> params = a.order.params;
  for (auto &q : b.order.params)
    if (std::find(params.begin(), params.end(), q) == params.end()) params.push_back(q);
  int cap = 2;
  for (auto *pc : {&a, &b})
    for (auto &r : pc->rows)
      for (auto &[k, v] : r.degree.exp) cap = std::max(cap, v);
  TermOrder common = TermOrder::graded(params, cap);
  auto codes = [&](const ProgramComplexity &pc) {
    std::vector<int> out;
    for (auto &r : pc.rows) out.push_back(common.code(r.degree));
    return out;
  };
  int64_t base = (int64_t)std::max(a.rows.size(), b.rows.size()) + 1;
  base = std::max<int64_t>(base, 2);
  Int va = base_s_sum(codes(a), base);
  Int vb = base_s_sum(codes(b), base);
  return va < vb ? -1 : va > vb ? 1 : 0;
}

struct InstanceCounts {
  std::map<std::string, size_t> per_stmt;
  size_t total = 0;
};

inline InstanceCounts instance_counts(const Program &p, const Binding &b,
                                      size_t cap = 1000000) {
  InstanceCounts out;
  for (auto &s : p.statements) {
    size_t n = count_points(s.domain, b, cap);
    out.per_stmt[s.label] = n;
    out.total += n;
  }
  return out;
}

inline size_t empirical_count(const Program &p, const Binding &b,
                              size_t cap = 1000000) {
  return instance_counts(p, b, cap).total;
}

}  // namespace mssr
