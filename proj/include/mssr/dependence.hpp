#pragma once

// Dataflow dependences: statement-level relations plus an instance-level
// oracle graph for cycle detection. Reductions get a synthetic completion node
// per statement: body instances feed it, readers of the reduced cells consume
// from it, which keeps reduce-to-reader dependences single-valued.

#include "ir.hpp"

#include <deque>
#include <map>
#include <string>
#include <vector>

namespace mssr {

inline std::string relation_str(const Relation &R) {
  const Space &sp = R.cons.space;
  size_t ni = R.nin();
  std::string s = "{ [";
  for (size_t i = 0; i < ni; ++i) s += (i ? "," : "") + sp.iter_vars[i];
  s += "] -> [";
  for (size_t i = ni; i < sp.nvars(); ++i) s += (i > ni ? "," : "") + sp.iter_vars[i];
  s += "]";
  std::string body = set_to_text(R.cons);
  size_t colon = body.find(':');
  if (colon != std::string::npos)
    s += " : " + body.substr(colon + 2, body.size() - colon - 4);
  return s + " }";
}

struct DependenceEdge {
  std::string src, dst;
  std::string via_array;
  Relation relation;  // src instance -> dst instance

  std::string str() const {
    return src + " -> " + dst + " via " + via_array + " : " + relation_str(relation);
  }
};

inline std::string completion_label(const std::string &stmt_label) {
  return stmt_label + ".done";
}

struct Completion {
  std::string label;  // completion node label
  std::string stmt;   // owning reduction statement
  std::string array;  // reduced LHS array
  ConvexSet cells;    // write image, in the array's index space
};

struct Dependences {
  std::vector<DependenceEdge> edges;
  std::vector<Completion> completions;

  const Completion *completion_for(const std::string &stmt) const {
    for (auto &c : completions)
      if (c.stmt == stmt) return &c;
    return nullptr;
  }
  // Iteration domain of any node label, completions included.
  ConvexSet node_domain(const Program &p, const std::string &label) const {
    for (auto &c : completions)
      if (c.label == label) return c.cells;
    const Statement *s = p.find_statement(label);
    if (!s) throw IrError("unknown node label '" + label + "'");
    return s->domain;
  }
  std::vector<std::string> node_labels(const Program &p) const {
    std::vector<std::string> out;
    for (auto &s : p.statements) {
      out.push_back(s.label);
      if (auto *c = completion_for(s.label)) out.push_back(c->label);
    }
    return out;
  }
};

// R^-1 . W between a writer and a reader of `array`, restricted to both
// domains. `read_ordinal` selects among multiple reads of the same array.
inline Relation dependence_relation(const Program &p, const Statement &writer,
                                    const Statement &reader, const std::string &array,
                                    size_t read_ordinal = 0) {
  AccessInfo w = access_relations(p, writer);
  if (writer.lhs_array != array)
    throw IrError("statement '" + writer.label + "' does not write '" + array + "'");
  AccessInfo r = access_relations(p, reader);
  size_t seen = 0;
  for (auto &[arr, rel] : r.reads) {
    if (arr != array) continue;
    if (seen++ == read_ordinal) {
      Relation d = compose(inverse(rel), w.write);
      d.cons = canonicalize(d.cons);
      return d;
    }
  }
  throw IrError("statement '" + reader.label + "' does not read '" + array + "'");
}

inline Dependences all_dependences(const Program &p) {
  SsaReport ssa = check_array_ssa(p);
  if (!ssa.ok) throw IrError("array SSA violation: " + ssa.str());

  Dependences out;
  std::map<std::string, AccessInfo> access;
  for (auto &s : p.statements) access.emplace(s.label, access_relations(p, s));

  // Completion nodes and body -> completion edges.
  for (auto &s : p.statements) {
    if (s.kind != Statement::Reduce) continue;
    Completion c{completion_label(s.label), s.label, s.lhs_array,
                 canonicalize(apply(access.at(s.label).write, s.domain))};
    out.edges.push_back({s.label, c.label, s.lhs_array, access.at(s.label).write});
    out.completions.push_back(std::move(c));
  }

  // Writer -> reader flow edges per (reader, read, writer) triple.
  for (auto &t : p.statements) {
    for (auto &[array, read_rel] : access.at(t.label).reads) {
      for (auto &s : p.statements) {
        if (s.lhs_array != array) continue;
        DependenceEdge e;
        e.dst = t.label;
        e.via_array = array;
        if (s.kind == Statement::Reduce) {
          const Completion *c = out.completion_for(s.label);
          e.src = c->label;
          Relation d = inverse(read_rel);
          d = restrict_domain(d, c->cells);
          e.relation = std::move(d);
        } else {
          e.src = s.label;
          Relation d = compose(inverse(read_rel), access.at(s.label).write);
          d.cons = canonicalize(d.cons);
          e.relation = std::move(d);
        }
        if (!is_empty(e.relation.cons)) out.edges.push_back(std::move(e));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance graph

struct InstanceNode {
  std::string label;
  Point point;

  bool operator<(const InstanceNode &o) const {
    return label != o.label ? label < o.label : point < o.point;
  }
  bool operator==(const InstanceNode &o) const {
    return label == o.label && point == o.point;
  }
  std::string str() const {
    std::string s = label + "(";
    for (size_t i = 0; i < point.size(); ++i)
      s += (i ? "," : "") + std::to_string(point[i]);
    return s + ")";
  }
};

struct InstanceGraph {
  Binding binding;
  std::vector<InstanceNode> nodes;
  std::vector<std::pair<size_t, size_t>> edges;  // node index pairs

  std::vector<std::vector<size_t>> adjacency() const {
    std::vector<std::vector<size_t>> adj(nodes.size());
    for (auto &[a, b] : edges) adj[a].push_back(b);
    return adj;
  }
};

inline InstanceGraph instance_graph(const Program &p, const Dependences &deps,
                                    const Binding &binding, size_t cap = 100000) {
  InstanceGraph g;
  g.binding = binding;
  std::map<InstanceNode, size_t> index;
  for (auto &label : deps.node_labels(p)) {
    for (auto &pt : enumerate_points(deps.node_domain(p, label), binding, cap)) {
      if (g.nodes.size() >= cap) throw PolyError("instance_graph: node cap exceeded");
      index.emplace(InstanceNode{label, pt}, g.nodes.size());
      g.nodes.push_back({label, pt});
    }
  }
  for (auto &e : deps.edges) {
    size_t ni = e.relation.nin();
    for (auto &pt : enumerate_points(e.relation.cons, binding, cap)) {
      InstanceNode a{e.src, Point(pt.begin(), pt.begin() + (long)ni)};
      InstanceNode b{e.dst, Point(pt.begin() + (long)ni, pt.end())};
      auto ia = index.find(a), ib = index.find(b);
      if (ia == index.end() || ib == index.end())
        throw PolyError("instance_graph: edge endpoint outside node domains");
      g.edges.emplace_back(ia->second, ib->second);
    }
  }
  return g;
}

struct CycleWitness {
  bool cyclic = false;
  std::vector<size_t> nodes;  // cycle sequence, first == last omitted

  std::string str(const InstanceGraph &g) const {
    if (!cyclic) return "acyclic";
    std::string s;
    for (size_t i : nodes) s += g.nodes[i].str() + " -> ";
    return s + (nodes.empty() ? "" : g.nodes[nodes.front()].str());
  }
};

inline CycleWitness has_cycle(const InstanceGraph &g) {
  auto adj = g.adjacency();
  enum { White, Grey, Black };
  std::vector<int> color(g.nodes.size(), White);
  std::vector<size_t> stack;
  // iterative DFS: frame = (node, next child index)
  std::vector<std::pair<size_t, size_t>> frames;
  for (size_t root = 0; root < g.nodes.size(); ++root) {
    if (color[root] != White) continue;
    frames.push_back({root, 0});
    color[root] = Grey;
    stack.push_back(root);
    while (!frames.empty()) {
      auto &[u, k] = frames.back();
      if (k == adj[u].size()) {
        color[u] = Black;
        stack.pop_back();
        frames.pop_back();
        continue;
      }
      size_t v = adj[u][k++];
      if (color[v] == Grey) {
        CycleWitness w;
        w.cyclic = true;
        auto it = std::find(stack.begin(), stack.end(), v);
        w.nodes.assign(it, stack.end());
        return w;
      }
      if (color[v] == White) {
        color[v] = Grey;
        stack.push_back(v);
        frames.push_back({v, 0});
      }
    }
  }
  return {};
}

inline std::string to_dot(const InstanceGraph &g) {
  std::string s = "digraph instances {\n";
  for (auto &n : g.nodes) s += "  \"" + n.str() + "\";\n";
  for (auto &[a, b] : g.edges)
    s += "  \"" + g.nodes[a].str() + "\" -> \"" + g.nodes[b].str() + "\";\n";
  return s + "}\n";
}

}  // namespace mssr
