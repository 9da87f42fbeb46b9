#include <doctest.h>

#include <mssr/simplify.hpp>

#include <set>

using namespace mssr;

namespace {

const char *kPrefixSum = R"(
param N;
input A : [N] { [i] : 0 <= i < N };
output B : [N] { [i] : 0 <= i < N };
S1: B[i] += A[j] : { [i,j] : 0 <= i < N and 0 <= j <= i };
)";

const char *kMultiStatement = R"(
param N;
input Ainit : [N] { [i] : 0 <= i < N };
intermediate A : [N] { [i] : 0 <= i < N };
output B : [N] { [i] : 0 <= i < N };
S0: A[i] = Ainit[i] : { [i] : i = 0 };
S1: B[i] += A[j] : { [i,j] : 0 <= i < N and 0 <= j <= i };
S2: A[i+1] = f(B[i]) : { [i] : 0 <= i < N - 1 };
)";

// Feedback that forces the B chain right-to-left.
const char *kReverseFeedback = R"(
param N;
input Ainit : [N] { [i] : 0 <= i < N };
intermediate A : [N] { [i] : 0 <= i < N };
output B : [N] { [i] : 0 <= i < N };
S0: A[i] = Ainit[i] : { [i] : i = N - 1 };
S1: B[i] += A[j] : { [i,j] : 0 <= i < N and i <= j < N };
S2: A[i] = f(B[i+1]) : { [i] : 0 <= i < N - 1 };
)";

const char *kPrefixMin = R"(
param N;
input A : [N] { [i] : 0 <= i < N };
output B : [N] { [i] : 0 <= i < N };
S1: B[i] min= A[j] : { [i,j] : 0 <= i < N and 0 <= j <= i };
)";

// Sliding-window min: both growth directions lose contributions, so the
// missing inverse empties the candidate set.
const char *kSlidingMin = R"(
param N;
param M;
input A : [N,M] { [i] : 0 <= i < N + M };
output B : [N] { [i] : 0 <= i < N };
S1: B[i] min= A[j] : { [i,j] : 0 <= i < N and i <= j <= i + M };
)";

Binding bindN(int64_t n) { return {{"N", n}}; }

DirVector dv(std::initializer_list<int64_t> xs) {
  DirVector d;
  for (auto x : xs) d.entries.push_back(Int(x));
  return d;
}

std::set<Point> pts(const ConvexSet &s, const Binding &b) {
  auto v = enumerate_points(s, b);
  return {v.begin(), v.end()};
}

const Statement *find_suffix(const Program &p, const std::string &suffix) {
  for (auto &s : p.statements)
    if (s.label.size() >= suffix.size() &&
        s.label.compare(s.label.size() - suffix.size(), suffix.size(), suffix) == 0)
      return &s;
  return nullptr;
}

bool program_acyclic(const Program &p, const Binding &b) {
  Dependences deps = all_dependences(p);
  return !has_cycle(instance_graph(p, deps, b)).cyclic;
}

}  // namespace

TEST_CASE("share space from read access null spaces") {
  Program p = parse_program(kPrefixSum);
  ShareSpace s = share_space(p.statements[0]);
  REQUIRE(s.basis.size() == 1);
  CHECK(s.basis[0] == dv({1, 0}));
  CHECK(s.contains(dv({1, 0})));
  CHECK(s.contains(dv({-3, 0})));
  CHECK(!s.contains(dv({0, 1})));
  CHECK(!s.contains(dv({1, 1})));

  Program skew = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < 2*N };\n"
      "output B : [N] { [i] : 0 <= i < N };\n"
      "S1: B[i] += A[i+j] : { [i,j] : 0 <= i < N and 0 <= j < N };\n");
  ShareSpace s2 = share_space(skew.statements[0]);
  REQUIRE(s2.basis.size() == 1);
  CHECK(s2.basis[0] == dv({1, -1}));

  Program both = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output B : [N] { [i] : 0 <= i < N };\n"
      "S1: B[i] += A[i] * A[j] : { [i,j] : 0 <= i < N and 0 <= j <= i };\n");
  CHECK(share_space(both.statements[0]).basis.empty());
}

TEST_CASE("guard reads constrain the share space") {
  Program p = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "input Z : [N] { [i] : 0 <= i < N };\n"
      "output B : [N] { [i] : 0 <= i < N };\n"
      "S1: B[i] += Z[i] == 0 ? A[j] : 0 : { [i,j] : 0 <= i < N and 0 <= j <= i };\n");
  // without the guard e_i would be shared; the guard read Z[i] kills it
  CHECK(share_space(p.statements[0]).basis.empty());
}

TEST_CASE("free index vars are always shared") {
  Program p = parse_program(kPrefixSum);
  ShareSpace s = share_space(p.statements[0]);
  for (auto &v : free_index_vars(p.statements[0])) {
    size_t k = (size_t)p.statements[0].domain.space.var_index(v);
    CHECK(s.contains(DirVector::unit(2, k)));
  }
}

TEST_CASE("inverse constraints for min reductions") {
  Program p = parse_program(kPrefixMin);
  const Statement &s = p.statements[0];
  CHECK(inverse_admits(p, s, dv({1, 0})));
  CHECK(!inverse_admits(p, s, dv({-1, 0})));

  Program sum = parse_program(kPrefixSum);
  CHECK(inverse_admits(sum, sum.statements[0], dv({1, 0})));
  CHECK(inverse_admits(sum, sum.statements[0], dv({-1, 0})));
}

TEST_CASE("candidate sets intersect growth, sharing, inverse, and face") {
  Program p = parse_program(kPrefixSum);
  const Statement &s = p.statements[0];
  CandidateSet full = candidate_reuse_vectors(p, s, s.domain);
  CHECK(full.member(dv({1, 0})));
  CHECK(full.member(dv({-1, 0})));
  CHECK(full.member(dv({2, 0})));
  CHECK(!full.member(dv({0, 1})));
  CHECK(!full.member(dv({0, 0})));
  auto units = full.enumerate_unit();
  REQUIRE(units.size() == 2);
  CHECK(units[0] == dv({1, 0}));
  CHECK(units[1] == dv({-1, 0}));

  ConvexSet diag = s.domain;
  diag.add_eq(AffineForm::var(diag.space, "i") - AffineForm::var(diag.space, "j"));
  CandidateSet edge = candidate_reuse_vectors(p, s, diag);
  CHECK(!edge.member(dv({1, 0})));
  CHECK(edge.enumerate_unit().empty());

  Program minp = parse_program(kPrefixMin);
  CandidateSet mc =
      candidate_reuse_vectors(minp, minp.statements[0], minp.statements[0].domain);
  auto munits = mc.enumerate_unit();
  REQUIRE(munits.size() == 1);
  CHECK(munits[0] == dv({1, 0}));
}

TEST_CASE("growth probe excludes fixed-extent dimensions") {
  Program p = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output B : [N] { [i,k] : 0 <= i < N and 0 <= k < 4 };\n"
      "S1: B[i,k] += A[j] : { [i,k,j] : 0 <= i < N and 0 <= k < 4 and 0 <= j <= i };\n");
  const Statement &s = p.statements[0];
  CandidateSet c = candidate_reuse_vectors(p, s, s.domain);
  CHECK(c.member(dv({1, 0, 0})));
  CHECK(!c.member(dv({0, 1, 0})));
}

TEST_CASE("forward shift produces the chained form") {
  Program p = parse_program(kPrefixSum);
  STApplication app = apply_st(p, p.statements[0], dv({1, 0}));
  REQUIRE(app.applied);
  REQUIRE(app.result.statements.size() == 3);
  REQUIRE(app.result.new_arrays.size() == 1);
  CHECK(app.result.new_arrays[0].name == "BAdd");
  CHECK(app.result.residual_labels == std::vector<std::string>{"S1_add"});

  const Statement &add = app.result.statements[0];
  CHECK(add.label == "S1_add");
  CHECK(add.kind == Statement::Reduce);
  CHECK(add.lhs_array == "BAdd");
  CHECK(pts(add.domain, bindN(5)) ==
        std::set<Point>{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});

  const Statement &only = app.result.statements[1];
  CHECK(only.label == "S1_add_only");
  CHECK(only.kind == Statement::Assign);
  CHECK(pts(only.domain, bindN(5)) == std::set<Point>{{0}});
  auto or_ = collect_reads(only.rhs);
  REQUIRE(or_.size() == 1);
  CHECK(or_[0].array == "BAdd");

  const Statement &chain = app.result.statements[2];
  CHECK(chain.label == "S1_add_reuse");
  CHECK(pts(chain.domain, bindN(5)) == std::set<Point>{{1}, {2}, {3}, {4}});
  auto cr = collect_reads(chain.rhs);
  REQUIRE(cr.size() == 2);
  CHECK(cr[0].array == "BAdd");
  CHECK(cr[0].index[0].constant == 0);
  CHECK(cr[1].array == "B");
  CHECK(cr[1].index[0].constant == -1);
}

TEST_CASE("backward shift produces the right-to-left form") {
  Program p = parse_program(kPrefixSum);
  STApplication app = apply_st(p, p.statements[0], dv({-1, 0}));
  REQUIRE(app.applied);
  REQUIRE(app.result.new_arrays.size() == 2);
  CHECK(app.result.new_arrays[0].name == "BAdd");
  CHECK(app.result.new_arrays[1].name == "BSub");

  const Statement *add = nullptr, *sub = nullptr, *only = nullptr, *chain = nullptr;
  for (auto &s : app.result.statements) {
    if (s.label == "S1_add") add = &s;
    if (s.label == "S1_sub") sub = &s;
    if (s.label == "S1_add_only") only = &s;
    if (s.label == "S1_reuse_sub") chain = &s;
  }
  REQUIRE((add && sub && only && chain));
  CHECK(app.result.statements.size() == 4);

  // gained contributions: the full last column
  CHECK(pts(add->domain, bindN(5)) ==
        std::set<Point>{{4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4}});
  // lost contributions: exactly the next element, giving B[i] = B[i+1] - A[i+1]
  CHECK(pts(sub->domain, bindN(5)) ==
        std::set<Point>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto sr = collect_reads(sub->rhs);
  REQUIRE(sr.size() == 1);
  CHECK(sr[0].array == "A");

  CHECK(pts(only->domain, bindN(5)) == std::set<Point>{{4}});
  CHECK(pts(chain->domain, bindN(5)) == std::set<Point>{{0}, {1}, {2}, {3}});
  auto cr = collect_reads(chain->rhs);
  REQUIRE(cr.size() == 2);
  CHECK(cr[0].array == "B");
  CHECK(cr[0].index[0].constant == 1);
  CHECK(cr[1].array == "BSub");
}

TEST_CASE("result-cell domains partition the write image") {
  Program p = parse_program(kPrefixSum);
  for (auto r : {dv({1, 0}), dv({-1, 0})}) {
    STApplication app = apply_st(p, p.statements[0], r);
    REQUIRE(app.applied);
    ConvexSet image =
        canonicalize(apply(reduction_projection(p, p.statements[0]),
                           p.statements[0].domain));
    for (auto n : {4, 7}) {
      std::set<Point> want = pts(image, bindN(n));
      std::set<Point> got;
      size_t total = 0;
      for (auto &s : app.result.statements) {
        if (s.lhs_array != "B") continue;
        auto q = pts(s.domain, bindN(n));
        total += q.size();
        got.insert(q.begin(), q.end());
      }
      CHECK(got == want);
      CHECK(total == want.size());  // pairwise disjoint
    }
  }
}

TEST_CASE("constant-thickness directions yield no gain") {
  Program p = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output B : [N] { [i] : 0 <= i < 4 };\n"
      "S1: B[i] += A[j] : { [i,j] : 0 <= i < 4 and 0 <= j < N };\n");
  STApplication app = apply_st(p, p.statements[0], dv({1, 0}));
  CHECK(!app.applied);
  CHECK(!app.nogain_reason.empty());
}

TEST_CASE("sharing certificate is enforced") {
  Program p = parse_program(kPrefixSum);
  CHECK_THROWS_AS(apply_st(p, p.statements[0], dv({0, 1})), SimplifyError);
}

TEST_CASE("non-invertible shift with losses is a fault") {
  Program p = parse_program(kPrefixMin);
  CHECK_THROWS_AS(apply_st(p, p.statements[0], dv({-1, 0})), SimplifyError);
}

TEST_CASE("simplify turns the prefix sum into a linear chain") {
  Program p = parse_program(kPrefixSum);
  SimplifyResult res = simplify_program(p);
  REQUIRE(!res.report.decisions.empty());
  CHECK(res.report.decisions[0].action == "applied");
  CHECK(res.report.before_leading.of("N") == 2);
  CHECK(res.report.after_leading.of("N") == 1);
  for (auto n : {8, 64}) {
    CHECK(empirical_count(res.program, bindN(n)) <= 4 * (size_t)n);
    CHECK(program_acyclic(res.program, bindN(std::min(n, 8))));
  }
  Dependences deps = all_dependences(res.program);
  CHECK(validate_schedule(res.program, deps, res.schedule).ok);
}

TEST_CASE("heuristic picks the schedule-consistent direction") {
  Program p = parse_program(kMultiStatement);
  SimplifyResult res = simplify_program(p);
  const FaceDecision *d = nullptr;
  for (auto &x : res.report.decisions)
    if (x.stmt == "S1") d = &x;
  REQUIRE(d);
  CHECK(d->action == "applied");
  CHECK(d->detail.rfind("[1,0]", 0) == 0);
  CHECK(res.report.after_leading.of("N") == 1);
  CHECK(program_acyclic(res.program, bindN(4)));
  CHECK(program_acyclic(res.program, bindN(16)));
  // the chained form reads the previous cell
  const Statement *chain = find_suffix(res.program, "_add_reuse");
  REQUIRE(chain);
  bool reads_prev = false;
  for (auto &rd : collect_reads(chain->rhs))
    reads_prev |= rd.index[0].constant == -1;
  CHECK(reads_prev);
}

TEST_CASE("reverse feedback flips the chosen direction") {
  Program p = parse_program(kReverseFeedback);
  SimplifyResult res = simplify_program(p);
  const FaceDecision *d = nullptr;
  for (auto &x : res.report.decisions)
    if (x.stmt == "S1") d = &x;
  REQUIRE(d);
  CHECK(d->action == "applied");
  CHECK(d->detail.rfind("[-1,0]", 0) == 0);
  CHECK(program_acyclic(res.program, bindN(5)));
  CHECK(res.report.after_leading.of("N") == 1);
}

TEST_CASE("forcing the wrong direction is refused with a cycle witness") {
  Program p = parse_program(kMultiStatement);
  std::map<std::string, DirVector> force{{"S1", dv({-1, 0})}};
  try {
    simplify_program(p, {}, &force);
    FAIL("expected TransformRefused");
  } catch (const TransformRefused &e) {
    REQUIRE(!e.witness.empty());
    bool saw_done = false, saw_update = false, saw_chain = false;
    for (auto &n : e.witness) {
      saw_done |= n.find(".done") != std::string::npos;
      saw_update |= n.rfind("S2(", 0) == 0;
      saw_chain |= n.find("reuse") != std::string::npos;
    }
    CHECK(saw_done);
    CHECK(saw_update);
    CHECK(saw_chain);
  }
}

TEST_CASE("invalid forced direction is rejected up front") {
  Program p = parse_program(kPrefixSum);
  std::map<std::string, DirVector> force{{"S1", dv({0, 1})}};
  CHECK_THROWS_AS(simplify_program(p, {}, &force), SimplifyError);
}

TEST_CASE("prefix min simplifies without subtraction statements") {
  Program p = parse_program(kPrefixMin);
  SimplifyResult res = simplify_program(p);
  REQUIRE(!res.report.decisions.empty());
  CHECK(res.report.decisions[0].action == "applied");
  CHECK(res.report.decisions[0].detail.rfind("[1,0]", 0) == 0);
  for (auto &a : res.program.arrays)
    CHECK(a.name.find("Sub") == std::string::npos);
  CHECK(!find_suffix(res.program, "_reuse_sub"));
  CHECK(res.report.after_leading.of("N") == 1);
}

TEST_CASE("schedule conflict with a missing inverse is skipped") {
  // A right-to-left chain asks for the flipped direction, which min forbids.
  Program p = parse_program(kPrefixMin);
  AugmentedProgram aug = augment_program(p);
  auto [redir_label, acc] = aug.redirects.at("S1");
  const Statement &body = *aug.program.find_statement("S1");
  CandidateSet cand = candidate_reuse_vectors(aug.program, body, body.domain);

  Schedule rtl;
  rtl.rows[redir_label] = {{Rat(-1), Rat(0), Rat(0)}};
  DirectionChoice c = choose_direction(cand, aug, rtl, redir_label);
  CHECK(!c.r);
  CHECK(c.skip_reason == "inverse-restricted against schedule");

  // a sum reduction in the same position just flips instead
  Program sum = parse_program(kPrefixSum);
  AugmentedProgram saug = augment_program(sum);
  auto [sredir, sacc] = saug.redirects.at("S1");
  const Statement &sbody = *saug.program.find_statement("S1");
  CandidateSet scand = candidate_reuse_vectors(saug.program, sbody, sbody.domain);
  Schedule srtl;
  srtl.rows[sredir] = {{Rat(-1), Rat(0), Rat(0)}};
  DirectionChoice sc = choose_direction(scand, saug, srtl, sredir);
  REQUIRE(sc.r);
  CHECK(*sc.r == dv({-1, 0}));
}

TEST_CASE("sliding-window min admits no transformation") {
  Program p = parse_program(kSlidingMin);
  const Statement &s = p.statements[0];
  ShareSpace share = share_space(s);
  // both growth directions are shared and growing, but each loses a cell
  for (auto r : {dv({1, 0}), dv({-1, 0})}) {
    CHECK(share.contains(r));
    CHECK(grows_along(s.domain, r));
    CHECK(!inverse_admits(p, s, r));
  }
  CandidateSet cand = candidate_reuse_vectors(p, s, s.domain);
  CHECK(cand.enumerate_unit().empty());

  SimplifyResult res = simplify_program(p);
  const FaceDecision *d = nullptr;
  for (auto &x : res.report.decisions)
    if (x.stmt == "S1") d = &x;
  REQUIRE(d);
  CHECK(d->action == "skipped");
  CHECK(res.report.after_leading == res.report.before_leading);

  ExhaustiveResult ex = exhaustive_search(p);
  CHECK(!ex.applied_any);
  CHECK(compare_complexity(ex.complexity, program_complexity(res.program)) == 0);
}

TEST_CASE("exhaustive search matches the heuristic on invertible benchmarks") {
  for (auto *src : {kPrefixSum, kMultiStatement, kReverseFeedback}) {
    Program p = parse_program(src);
    SimplifyResult res = simplify_program(p);
    ExhaustiveResult ex = exhaustive_search(p);
    CHECK(ex.applied_any);
    CHECK(compare_complexity(ex.complexity, program_complexity(res.program)) == 0);
  }
}

TEST_CASE("report text is machine readable") {
  Program p = parse_program(kPrefixSum);
  SimplifyResult res = simplify_program(p);
  std::string s = res.report.str();
  CHECK(s.find("stmt=S1 face=full action=applied r=[") != std::string::npos);
  CHECK(s.find("before=N^2 after=N") != std::string::npos);
}
