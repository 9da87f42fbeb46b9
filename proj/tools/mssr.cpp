// Batch driver: parse, analyze, simplify, report, verify.
//
//   mssr check       <file>
//   mssr simplify    <file> [--out F] [--exhaustive] [--force-dir STMT=VEC]
//   mssr complexity  <file> [--bind N=64,K=4]...
//   mssr verify      <fileA> <fileB> [--bind ...]... [--trials T] [--seed S]
//   mssr dump-faces  <file>
//   mssr dump-schedule <file>
//
// Common flags: --bind N=64,K=4 (repeatable), --seed 7, --format machine.
// MSSR_CAPS=points=P,faces=F,coeff=C overrides resource caps.
// Exit codes: 0 success, 1 validation failure, 2 transformation refused,
// 3 internal invariant breach.

#include <mssr/exec.hpp>
#include <mssr/simplify.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mssr;

namespace {

struct RunConfig {
  std::string command;
  std::vector<std::string> files;
  std::vector<Binding> bindings;
  uint64_t seed = 7;
  int trials = 5;
  bool exhaustive = false;
  bool machine = false;
  std::map<std::string, DirVector> force;
  std::string out_path;
  size_t points_cap = 1000000;
  size_t faces_cap = 20;
  int coeff_bound = 2;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Binding parse_binding(const std::string &s) {
  Binding b;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("bad binding '" + item + "'");
    int64_t v = std::stoll(item.substr(eq + 1));
    if (v < 0) throw UsageError("binding must be >= 0: '" + item + "'");
    b[item.substr(0, eq)] = v;
  }
  return b;
}

DirVector parse_dir(const std::string &s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw UsageError("bad direction '" + s + "', expected [c,c,...]");
  DirVector d;
  std::stringstream ss(s.substr(1, s.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) d.entries.push_back(Int(item));
  return d;
}

RunConfig parse_args(int argc, char **argv) {
  RunConfig c;
  if (argc < 2) throw UsageError("missing command");
  c.command = argv[1];
  for (int i = 2; i < argc; ++i) {
    std::string a = argv[i];
    auto value = [&]() -> std::string {
      if (++i >= argc) throw UsageError("flag " + a + " needs a value");
      return argv[i];
    };
    if (a == "--bind") c.bindings.push_back(parse_binding(value()));
    else if (a == "--seed") c.seed = std::stoull(value());
    else if (a == "--trials") c.trials = std::stoi(value());
    else if (a == "--exhaustive") c.exhaustive = true;
    else if (a == "--out") c.out_path = value();
    else if (a == "--force-dir") {
      std::string v = value();
      size_t eq = v.find('=');
      if (eq == std::string::npos) throw UsageError("bad --force-dir '" + v + "'");
      c.force[v.substr(0, eq)] = parse_dir(v.substr(eq + 1));
    } else if (a == "--format") {
      std::string v = value();
      if (v != "human" && v != "machine") throw UsageError("unknown format '" + v + "'");
      c.machine = v == "machine";
    } else if (a.rfind("--", 0) == 0) {
      throw UsageError("unknown flag '" + a + "'");
    } else {
      c.files.push_back(a);
    }
  }
  if (const char *caps = std::getenv("MSSR_CAPS")) {
    std::stringstream ss(caps);
    std::string item;
    while (std::getline(ss, item, ',')) {
      size_t eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("bad MSSR_CAPS entry '" + item + "'");
      std::string key = item.substr(0, eq);
      long long v = std::stoll(item.substr(eq + 1));
      if (v <= 0) throw UsageError("MSSR_CAPS values must be positive");
      if (key == "points") c.points_cap = (size_t)v;
      else if (key == "faces") c.faces_cap = (size_t)v;
      else if (key == "coeff") c.coeff_bound = (int)v;
      else throw UsageError("unknown MSSR_CAPS key '" + key + "'");
    }
  }
  return c;
}

Program load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

std::vector<Binding> default_bindings(const Program &p, const RunConfig &c,
                                      std::initializer_list<int64_t> vals) {
  if (!c.bindings.empty()) return c.bindings;
  std::vector<Binding> out;
  for (int64_t v : vals) {
    Binding b;
    for (auto &q : p.params) b[q] = v;
    out.push_back(b);
  }
  return out;
}

std::string binding_str(const Binding &b) {
  std::string s;
  for (auto &[q, v] : b) s += (s.empty() ? "" : ",") + q + "=" + std::to_string(v);
  return s;
}

void emit(const RunConfig &c, const std::string &key, const std::string &val) {
  if (c.machine) std::cout << key << "=" << val << "\n";
  else std::cout << key << ": " << val << "\n";
}

SchedulerOptions sched_opt(const RunConfig &c) {
  SchedulerOptions o;
  o.coeff_bound = c.coeff_bound;
  return o;
}

int cmd_check(const RunConfig &c) {
  if (c.files.size() != 1) throw UsageError("check expects one file");
  Program p;
  try {
    p = load(c.files[0]);
  } catch (const ParseError &e) {
    emit(c, "parse", std::string("error ") + e.what());
    return 1;
  } catch (const IrError &e) {
    emit(c, "parse", std::string("error ") + e.what());
    return 1;
  }
  emit(c, "parse", "ok");
  emit(c, "statements", std::to_string(p.statements.size()));

  SsaReport ssa = check_array_ssa(p);
  emit(c, "ssa", ssa.ok ? "ok" : "violation " + ssa.str());
  if (!ssa.ok) return 1;

  Dependences deps = all_dependences(p);
  size_t families = 0;
  for (auto &e : deps.edges)
    if (e.dst != completion_label(e.src)) ++families;
  emit(c, "dependence_families", std::to_string(families));
  for (auto &e : deps.edges) emit(c, "edge", e.str());

  try {
    Schedule sched = feautrier_schedule(p, deps, sched_opt(c));
    ScheduleCheck v = validate_schedule(p, deps, sched);
    if (!v.ok) throw PolyError("internal: schedule fails validation on " + v.edge);
    emit(c, "schedulable", "yes");
  } catch (const UnschedulableError &e) {
    emit(c, "schedulable", "no");
    for (auto &r : e.residual) emit(c, "residual_edge", r);
    return 1;
  }
  emit(c, "valid", "yes");
  return 0;
}

int cmd_simplify(const RunConfig &c) {
  if (c.files.size() != 1) throw UsageError("simplify expects one file");
  Program p = load(c.files[0]);
  std::string out_path = c.out_path.empty() ? c.files[0] + ".opt" : c.out_path;

  Program optimized;
  try {
    if (c.exhaustive) {
      ExhaustiveResult r = exhaustive_search(p, c.faces_cap, sched_opt(c));
      optimized = r.program;
      emit(c, "mode", "exhaustive");
      emit(c, "leaves", std::to_string(r.leaves));
      emit(c, "applied", r.applied_any ? "yes" : "no");
    } else {
      SimplifyResult r =
          simplify_program(p, sched_opt(c), c.force.empty() ? nullptr : &c.force);
      optimized = r.program;
      emit(c, "mode", c.force.empty() ? "heuristic" : "forced");
      for (auto &d : r.report.decisions) {
        std::string line = "stmt=" + d.stmt + " face=" + d.face + " action=" + d.action;
        if (!d.detail.empty()) line += " detail=" + d.detail;
        emit(c, "decision", line);
      }
    }
  } catch (const TransformRefused &e) {
    emit(c, "refused", "dependency cycle under the requested direction");
    for (auto &w : e.witness) emit(c, "cycle_node", w);
    return 2;
  } catch (const SimplifyError &e) {
    emit(c, "refused", e.what());
    return 2;
  }

  ProgramComplexity before = program_complexity(p);
  ProgramComplexity after = program_complexity(optimized);
  emit(c, "before", normalize_degree(before.leading).str());
  emit(c, "after", normalize_degree(after.leading).str());

  std::ofstream out(out_path);
  if (!out) throw UsageError("cannot write '" + out_path + "'");
  out << pretty_print(optimized);
  emit(c, "output", out_path);
  return 0;
}

int cmd_complexity(const RunConfig &c) {
  if (c.files.size() != 1) throw UsageError("complexity expects one file");
  Program p = load(c.files[0]);
  ProgramComplexity pc = program_complexity(p);
  for (auto &row : pc.rows)
    emit(c, "degree", row.stmt + " " + normalize_degree(row.degree).str());
  emit(c, "leading", normalize_degree(pc.leading).str());
  for (auto &b : default_bindings(p, c, {8, 16})) {
    InstanceCounts counts = instance_counts(p, b, c.points_cap);
    for (auto &[label, n] : counts.per_stmt)
      emit(c, "count[" + binding_str(b) + "]", label + " " + std::to_string(n));
    emit(c, "total[" + binding_str(b) + "]", std::to_string(counts.total));
  }
  return 0;
}

int cmd_verify(const RunConfig &c) {
  if (c.files.size() != 2) throw UsageError("verify expects two files");
  Program a = load(c.files[0]);
  Program b = load(c.files[1]);
  std::vector<Binding> bindings = default_bindings(a, c, {8});
  OracleResult r =
      oracle_equivalence(a, b, bindings, c.trials, c.seed, sched_opt(c));
  if (r.ok) {
    emit(c, "equivalent", "yes");
    emit(c, "trials", std::to_string(c.trials * (int)bindings.size()));
    return 0;
  }
  emit(c, "equivalent", "no");
  emit(c, "binding", binding_str(r.cex->binding));
  emit(c, "counterexample", r.cex->str());
  emit(c, "inputs", "");
  std::cout << print_arrays(r.cex->inputs);
  return 1;
}

int cmd_dump_faces(const RunConfig &c) {
  if (c.files.size() != 1) throw UsageError("dump-faces expects one file");
  Program p = load(c.files[0]);
  for (auto &s : p.statements) {
    std::vector<Face> fs = faces(s.domain, c.faces_cap);
    emit(c, "stmt", s.label + " faces " + std::to_string(fs.size()));
    for (size_t i = 0; i < fs.size(); ++i)
      emit(c, "face[" + s.label + "," + std::to_string(i) + "]", fs[i].as_set.str());
  }
  return 0;
}

int cmd_dump_schedule(const RunConfig &c) {
  if (c.files.size() != 1) throw UsageError("dump-schedule expects one file");
  Program p = load(c.files[0]);
  Dependences deps = all_dependences(p);
  Schedule sched = feautrier_schedule(p, deps, sched_opt(c));
  std::stringstream ss(sched.str());
  std::string line;
  while (std::getline(ss, line)) {
    size_t colon = line.find(':');
    emit(c, "theta[" + line.substr(0, colon) + "]", line.substr(colon + 1));
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  RunConfig c;
  try {
    c = parse_args(argc, argv);
    if (c.command == "check") return cmd_check(c);
    if (c.command == "simplify") return cmd_simplify(c);
    if (c.command == "complexity") return cmd_complexity(c);
    if (c.command == "verify") return cmd_verify(c);
    if (c.command == "dump-faces") return cmd_dump_faces(c);
    if (c.command == "dump-schedule") return cmd_dump_schedule(c);
    throw UsageError("unknown command '" + c.command + "'");
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError &e) {
    emit(c, "parse", std::string("error ") + e.what());
    return 1;
  } catch (const UnschedulableError &e) {
    emit(c, "schedulable", "no");
    return 1;
  } catch (const IrError &e) {
    emit(c, "error", e.what());
    return 1;
  } catch (const ExecError &e) {
    emit(c, "error", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
