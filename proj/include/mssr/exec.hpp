#pragma once

// Exact interpreter over rational array values: the semantic oracle behind
// every transformation. Executes statement instances in a supplied order
// (schedule-derived or any instance-graph topological order), folds reductions
// with their declared operator, and faults on reads of unwritten cells or on
// accumulation after a reduction cell has been observed.

#include "scheduling.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mssr {

struct ExecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Environment {
  Binding binding;
  std::map<std::string, std::map<Point, Rat>> arrays;
  int64_t seed = 0;
};

// Deterministic intrinsics: fixed affine test functions plus a seeded hash
// standing in for stochastic sampling.
inline Rat eval_intrinsic(const std::string &name, const std::vector<Rat> &args,
                          int64_t seed) {
  if (name == "f") {
    if (args.size() != 1) throw ExecError("intrinsic f expects 1 argument");
    return args[0] + 1;
  }
  if (name == "g") {
    if (args.size() != 1) throw ExecError("intrinsic g expects 1 argument");
    return args[0] * 2 + 3;
  }
  if (name == "sample") {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string &s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
    };
    mix(std::to_string(seed));
    for (auto &a : args) {
      mix(rat_num(a).str());
      mix(rat_den(a).str());
    }
    return Rat((int64_t)(h & 1));
  }
  throw ExecError("unknown intrinsic '" + name + "'");
}

struct ExecTrace {
  std::map<std::string, size_t> instances;  // executed count per statement
  std::map<std::string, std::map<Point, Rat>> final_arrays;
};

namespace detail {

struct CellState {
  std::string writer;
  bool observed = false;  // a reduction cell has been read by another statement
};

struct ExecState {
  const Program *p;
  Environment *env;
  std::map<std::pair<std::string, Point>, CellState> cells;

  Rat eval(const ExprPtr &e, const std::vector<Rat> &pt, const std::vector<Rat> &pv,
           const std::string &reader);
  Point cell_of(const std::vector<AffineForm> &idx, const std::vector<Rat> &pt,
                const std::vector<Rat> &pv) {
    Point c;
    for (auto &f : idx) {
      Rat v = f.eval(pt, pv);
      if (rat_den(v) != 1) throw ExecError("non-integer array index");
      c.push_back(to_i64(rat_num(v)));
    }
    return c;
  }
};

inline Rat ExecState::eval(const ExprPtr &e, const std::vector<Rat> &pt,
                           const std::vector<Rat> &pv, const std::string &reader) {
  switch (e->kind) {
  case Expr::Affine:
    return e->aff->eval(pt, pv);
  case Expr::Read: {
    Point c = cell_of(e->index, pt, pv);
    auto arr = env->arrays.find(e->name);
    if (arr == env->arrays.end() || !arr->second.count(c)) {
      std::string s = e->name + "(";
      for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
      throw ExecError("read of unwritten cell " + s + ") in '" + reader + "'");
    }
    auto st = cells.find({e->name, c});
    if (st != cells.end() && st->second.writer != reader) st->second.observed = true;
    return arr->second.at(c);
  }
  case Expr::Bin: {
    Rat a = eval(e->args[0], pt, pv, reader);
    Rat b = eval(e->args[1], pt, pv, reader);
    if (e->name == "+") return a + b;
    if (e->name == "-") return a - b;
    if (e->name == "*") return a * b;
    if (e->name == "/") {
      if (b == 0) throw ExecError("division by zero in '" + reader + "'");
      return a / b;
    }
    if (e->name == "min") return b < a ? b : a;
    if (e->name == "max") return a < b ? b : a;
    throw ExecError("unknown operator '" + e->name + "'");
  }
  case Expr::Ternary: {
    Rat a = eval(e->args[0], pt, pv, reader);
    Rat b = eval(e->args[1], pt, pv, reader);
    bool take = e->cmp == "=="   ? a == b
                : e->cmp == "<=" ? a <= b
                : e->cmp == ">=" ? a >= b
                : e->cmp == "<"  ? a < b
                                 : a > b;
    return eval(e->args[take ? 2 : 3], pt, pv, reader);
  }
  case Expr::Call: {
    std::vector<Rat> args;
    for (auto &a : e->args) args.push_back(eval(a, pt, pv, reader));
    return eval_intrinsic(e->name, args, env->seed);
  }
  }
  throw ExecError("unreachable expression kind");
}

}  // namespace detail

// Statement instances of the whole program ordered by schedule timestamp,
// ties broken by label then point.
inline std::vector<InstanceNode> schedule_order(const Program &p, const Schedule &sched,
                                                const Binding &b,
                                                size_t cap = 1000000) {
  std::vector<std::pair<std::vector<Rat>, InstanceNode>> items;
  for (auto &s : p.statements) {
    std::vector<Rat> pv = param_values(s.domain.space, b);
    for (auto &pt : enumerate_points(s.domain, b, cap))
      items.push_back({timestamp(sched, s.label, pt, pv), InstanceNode{s.label, pt}});
  }
  std::stable_sort(items.begin(), items.end(), [](const auto &a, const auto &b) {
    Order o = timestamp_compare(a.first, b.first);
    if (o != Order::Equal) return o == Order::Less;
    return a.second < b.second;
  });
  std::vector<InstanceNode> out;
  for (auto &[t, n] : items) out.push_back(n);
  return out;
}

// Any topological order of the instance graph, restricted to statement nodes.
// A seeded RNG picks among ready nodes, giving varied but valid orders.
inline std::vector<InstanceNode> random_topo_order(const Program &p,
                                                   const Dependences &deps,
                                                   const Binding &b, uint64_t seed,
                                                   size_t cap = 100000) {
  InstanceGraph g = instance_graph(p, deps, b, cap);
  std::vector<size_t> indeg(g.nodes.size(), 0);
  auto adj = g.adjacency();
  for (auto &[a, c] : g.edges) ++indeg[c];
  std::vector<size_t> ready;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    if (indeg[i] == 0) ready.push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<InstanceNode> out;
  size_t done = 0;
  while (!ready.empty()) {
    size_t k = std::uniform_int_distribution<size_t>(0, ready.size() - 1)(rng);
    size_t n = ready[k];
    ready[k] = ready.back();
    ready.pop_back();
    ++done;
    if (p.find_statement(g.nodes[n].label)) out.push_back(g.nodes[n]);
    for (size_t m : adj[n])
      if (--indeg[m] == 0) ready.push_back(m);
  }
  if (done != g.nodes.size())
    throw ExecError("random_topo_order: instance graph has a cycle");
  return out;
}

inline ExecTrace evaluate(const Program &p, Environment env,
                          const std::vector<InstanceNode> &order) {
  detail::ExecState st{&p, &env, {}};
  ExecTrace trace;
  for (auto &s : p.statements) trace.instances[s.label] = 0;

  for (auto &inst : order) {
    const Statement *s = p.find_statement(inst.label);
    if (!s) throw ExecError("unknown statement '" + inst.label + "' in order");
    std::vector<Rat> pt;
    for (auto x : inst.point) pt.push_back(Rat(x));
    std::vector<Rat> pv = param_values(s->domain.space, env.binding);
    ++trace.instances[s->label];

    Rat value = st.eval(s->rhs, pt, pv, s->label);
    Point cell = st.cell_of(s->lhs_index, pt, pv);
    const ArrayDecl *decl = p.find_array(s->lhs_array);
    if (decl->kind == ArrayKind::Input)
      throw ExecError("write to input array '" + s->lhs_array + "'");
    auto key = std::make_pair(s->lhs_array, cell);
    auto it = st.cells.find(key);
    auto &store = env.arrays[s->lhs_array];
    if (s->kind == Statement::Assign) {
      if (it != st.cells.end())
        throw ExecError("cell of '" + s->lhs_array + "' written twice (by '" +
                        it->second.writer + "' and '" + s->label + "')");
      st.cells[key] = {s->label, false};
      store[cell] = value;
    } else {
      if (it == st.cells.end()) {
        st.cells[key] = {s->label, false};
        store[cell] = s->op.identity ? s->op.combine(*s->op.identity, value) : value;
      } else {
        if (it->second.writer != s->label)
          throw ExecError("cell of '" + s->lhs_array + "' written twice (by '" +
                          it->second.writer + "' and '" + s->label + "')");
        if (it->second.observed)
          throw ExecError("accumulation into '" + s->lhs_array +
                          "' after the cell was read: order violates completion");
        store[cell] = s->op.combine(store[cell], value);
      }
    }
  }
  trace.final_arrays = env.arrays;
  return trace;
}

// Convenience: schedule the program and run in schedule order.
inline ExecTrace evaluate(const Program &p, Environment env,
                          const SchedulerOptions &opt = {}) {
  Dependences deps = all_dependences(p);
  Schedule sched = feautrier_schedule(p, deps, opt);
  std::vector<InstanceNode> order = schedule_order(p, sched, env.binding);
  return evaluate(p, std::move(env), order);
}

// ---------------------------------------------------------------------------
// Equivalence oracle

struct Counterexample {
  Binding binding;
  int trial = 0;
  std::string array;
  Point cell;
  std::optional<Rat> a, b;  // values in each program; absent = never written
  std::map<std::string, std::map<Point, Rat>> inputs;

  std::string str() const {
    std::string s = "array " + array + " cell (";
    for (size_t i = 0; i < cell.size(); ++i) s += (i ? "," : "") + std::to_string(cell[i]);
    s += "): " + (a ? rat_str(*a) : "unwritten") + " vs " + (b ? rat_str(*b) : "unwritten");
    return s;
  }
};

struct OracleResult {
  bool ok = true;
  std::optional<Counterexample> cex;
};

inline Environment random_inputs(const Program &p, const Binding &b, uint64_t seed,
                                 int64_t vseed) {
  Environment env;
  env.binding = b;
  env.seed = vseed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> dist(-9, 9);
  for (auto &a : p.arrays) {
    if (a.kind != ArrayKind::Input) continue;
    for (auto &pt : enumerate_points(a.index_space, b))
      env.arrays[a.name][pt] = Rat(dist(rng));
  }
  return env;
}

inline OracleResult oracle_equivalence(const Program &p1, const Program &p2,
                                       const std::vector<Binding> &bindings,
                                       int trials = 5, uint64_t seed = 7,
                                       const SchedulerOptions &opt = {}) {
  auto declared = [](const Program &p, ArrayKind k) {
    std::set<std::string> out;
    for (auto &a : p.arrays)
      if (a.kind == k) out.insert(a.name);
    return out;
  };
  if (declared(p1, ArrayKind::Input) != declared(p2, ArrayKind::Input) ||
      declared(p1, ArrayKind::Output) != declared(p2, ArrayKind::Output))
    throw ExecError("oracle_equivalence: declared inputs/outputs differ");

  // Dependences and schedules are binding-independent; the instance order only
  // depends on the binding. Compute each once, not per trial.
  Dependences d1 = all_dependences(p1), d2 = all_dependences(p2);
  Schedule s1 = feautrier_schedule(p1, d1, opt), s2 = feautrier_schedule(p2, d2, opt);
  for (auto &b : bindings) {
    std::vector<InstanceNode> o1 = schedule_order(p1, s1, b);
    std::vector<InstanceNode> o2 = schedule_order(p2, s2, b);
    for (int t = 0; t < trials; ++t) {
      uint64_t rs = seed * 1000003ull + (uint64_t)t * 9176ull;
      for (auto &[q, v] : b) rs = rs * 31ull + (uint64_t)v;
      Environment env = random_inputs(p1, b, rs, (int64_t)seed);
      ExecTrace t1 = evaluate(p1, env, o1);
      ExecTrace t2 = evaluate(p2, env, o2);
      for (auto &name : declared(p1, ArrayKind::Output)) {
        std::map<Point, Rat> e;
        const auto &m1 = t1.final_arrays.count(name) ? t1.final_arrays.at(name) : e;
        const auto &m2 = t2.final_arrays.count(name) ? t2.final_arrays.at(name) : e;
        std::set<Point> cells;
        for (auto &[c, v] : m1) cells.insert(c);
        for (auto &[c, v] : m2) cells.insert(c);
        for (auto &c : cells) {
          auto i1 = m1.find(c), i2 = m2.find(c);
          bool ok = i1 != m1.end() && i2 != m2.end() && i1->second == i2->second;
          if (ok) continue;
          Counterexample cex;
          cex.binding = b;
          cex.trial = t;
          cex.array = name;
          cex.cell = c;
          if (i1 != m1.end()) cex.a = i1->second;
          if (i2 != m2.end()) cex.b = i2->second;
          cex.inputs = env.arrays;
          return {false, std::move(cex)};
        }
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Array text I/O: `array NAME { (i,j) = v; ... }`

inline std::string print_arrays(const std::map<std::string, std::map<Point, Rat>> &arrays) {
  std::string s;
  for (auto &[name, cells] : arrays) {
    s += "array " + name + " {\n";
    for (auto &[pt, v] : cells) {
      s += "  (";
      for (size_t i = 0; i < pt.size(); ++i) s += (i ? "," : "") + std::to_string(pt[i]);
      s += ") = " + rat_str(v) + ";\n";
    }
    s += "}\n";
  }
  return s;
}

inline std::map<std::string, std::map<Point, Rat>> parse_arrays(const std::string &src) {
  auto toks = text::tokenize(src);
  text::Cursor cur{&toks, 0};
  std::map<std::string, std::map<Point, Rat>> out;
  while (cur.peek().kind != text::Token::End) {
    cur.expect("array");
    std::string name = cur.expect_ident();
    cur.expect("{");
    out[name];
    while (!cur.accept("}")) {
      cur.expect("(");
      Point pt;
      if (!cur.at(")")) {
        do {
          bool neg = cur.accept("-");
          pt.push_back((neg ? -1 : 1) * std::stoll(cur.next().s));
        } while (cur.accept(","));
      }
      cur.expect(")");
      cur.expect("=");
      bool neg = cur.accept("-");
      Int num(cur.next().s);
      Int den = 1;
      if (cur.accept("/")) den = Int(cur.next().s);
      cur.expect(";");
      Rat v = Rat(num) / Rat(den);
      out[name][pt] = neg ? -v : v;
    }
  }
  return out;
}

}  // namespace mssr
