#include <doctest.h>

#include <mssr/ir.hpp>

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

Binding bindN(int64_t n) { return {{"N", n}}; }

}  // namespace

TEST_CASE("single reduction parses") {
  Program p = parse_program(kPrefixSum);
  CHECK(p.params == std::vector<std::string>{"N"});
  CHECK(p.arrays.size() == 2);
  REQUIRE(p.statements.size() == 1);
  const Statement &s = p.statements[0];
  CHECK(s.label == "S1");
  CHECK(s.kind == Statement::Reduce);
  CHECK(s.op.name == "sum");
  CHECK(s.op.identity == Rat(0));
  CHECK(s.op.has_inverse);
  CHECK(s.lhs_array == "B");
  CHECK(s.domain.space.iter_vars == std::vector<std::string>{"i", "j"});
  CHECK(count_points(s.domain, bindN(4)) == 10);
  CHECK(p.intrinsics.empty());
}

TEST_CASE("multi-statement program parses with intrinsics") {
  Program p = parse_program(kMultiStatement);
  REQUIRE(p.statements.size() == 3);
  CHECK(p.statements[0].kind == Statement::Assign);
  CHECK(p.statements[2].kind == Statement::Assign);
  CHECK(p.intrinsics == std::set<std::string>{"f"});
  CHECK(p.find_array("A")->kind == ArrayKind::Intermediate);
  // S2 writes A[i+1] over 0 <= i < N-1.
  const Statement &s2 = p.statements[2];
  CHECK(s2.lhs_index.size() == 1);
  CHECK(s2.lhs_index[0].coeffs[0] == 1);
  CHECK(s2.lhs_index[0].constant == 1);
}

TEST_CASE("parse errors carry position and reason") {
  CHECK_THROWS_WITH_AS(parse_program("param N;\n"
                                     "input A : [N] { [i] : 0 <= i < N };\n"
                                     "output B : [N] { [i] : 0 <= i < N };\n"
                                     "S1: B[i*i] += A[j] : { [i,j] : 0 <= i < N and 0 "
                                     "<= j <= i };\n"),
                        doctest::Contains("non-affine"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("param N;\n"
                                     "output B : [N] { [i] : 0 <= i < N };\n"
                                     "S1: B[i] = q : { [i] : 0 <= i < N };\n"),
                        doctest::Contains("unknown identifier 'q'"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("param N;\n"
                                     "input A : [N] { [i] : 0 <= i < N };\n"
                                     "S1: A[i] = 0 : { [i] : 0 <= i < N };\n"),
                        doctest::Contains("writes input"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("param N;\n"
                                     "output B : [N] { [i] : 0 <= i < N };\n"
                                     "S1: B[i] = C[i] : { [i] : 0 <= i < N };\n"),
                        doctest::Contains("undeclared array 'C'"), IrError);
  CHECK_THROWS_WITH_AS(parse_program("param N;\n"
                                     "output B : [N] { [i] : 0 <= i < N };\n"
                                     "S1: B[i] = 0 : { [i] : 0 <= i < N };\n"
                                     "S1: B[i] = 1 : { [i] : 1 <= i < N };\n"),
                        doctest::Contains("duplicate statement label"), ParseError);
}

TEST_CASE("access relations of a triangular reduction") {
  Program p = parse_program(kPrefixSum);
  AccessInfo info = access_relations(p, p.statements[0]);
  // write {[i,j] -> B[i]}: image of the full domain at N=4 is B[0..3]
  ConvexSet wimg = apply(info.write, p.statements[0].domain);
  auto wpts = enumerate_points(wimg, bindN(4));
  REQUIRE(wpts.size() == 4);
  CHECK(wpts.front() == Point{0});
  CHECK(wpts.back() == Point{3});
  // fixing i = 2 maps to exactly B[2]
  ConvexSet slice = p.statements[0].domain;
  slice.add_eq(AffineForm::var(slice.space, "i") -
               AffineForm::cst(slice.space, Rat(2)));
  auto spts = enumerate_points(apply(info.write, slice), bindN(4));
  REQUIRE(spts.size() == 1);
  CHECK(spts[0] == Point{2});
  // read {[i,j] -> A[j]}
  REQUIRE(info.reads.size() == 1);
  CHECK(info.reads[0].first == "A");
  auto rpts = enumerate_points(apply(info.reads[0].second, slice), bindN(4));
  REQUIRE(rpts.size() == 3);
  CHECK(rpts.back() == Point{2});
}

TEST_CASE("constant RHS has no reads") {
  Program p = parse_program(
      "param N;\noutput B : [N] { [i] : 0 <= i < N };\n"
      "S1: B[i] = 7 : { [i] : 0 <= i < N };\n");
  CHECK(access_relations(p, p.statements[0]).reads.empty());
}

TEST_CASE("guarded reads are extracted from ternaries") {
  Program p = parse_program(
      "param N;\n"
      "input Z : [N] { [j] : 0 <= j < N };\n"
      "input Obs : [N] { [j] : 0 <= j < N };\n"
      "output C : [N] { [i] : 0 <= i < N };\n"
      "S0L: C[i] += Z[j] == 0 ? Obs[j] : 0 : { [i,j] : 0 <= j < i and 1 <= i < N };\n");
  auto reads = collect_reads(p.statements[0].rhs);
  REQUIRE(reads.size() == 2);
  CHECK(reads[0].array == "Z");
  CHECK(reads[0].in_guard);
  CHECK(reads[1].array == "Obs");
  CHECK(!reads[1].in_guard);
  AccessInfo info = access_relations(p, p.statements[0]);
  CHECK(info.reads.size() == 2);
}

TEST_CASE("reduction projection") {
  Program p = parse_program(kPrefixSum);
  Relation proj = reduction_projection(p, p.statements[0]);
  CHECK(proj.nin() == 2);
  CHECK(proj.nout() == 1);
  // {[i,j] -> [i]} restricted to the triangle: (3,1) -> 3, (3,5) -> nothing
  ConvexSet pt = p.statements[0].domain;
  pt.add_eq(AffineForm::var(pt.space, "i") - AffineForm::cst(pt.space, Rat(3)));
  pt.add_eq(AffineForm::var(pt.space, "j") - AffineForm::cst(pt.space, Rat(1)));
  auto img = enumerate_points(apply(proj, pt), bindN(6));
  REQUIRE(img.size() == 1);
  CHECK(img[0] == Point{3});

  Program q = parse_program(kMultiStatement);
  CHECK_THROWS_AS(reduction_projection(q, q.statements[0]), IrError);
}

TEST_CASE("scalar-cell reduction projects to a point") {
  Program p = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output s : [N] { [i] : i = 0 };\n"
      "R: s[0] += A[j] : { [j] : 0 <= j < N };\n");
  Relation proj = reduction_projection(p, p.statements[0]);
  auto img = enumerate_points(apply(proj, p.statements[0].domain), bindN(5));
  REQUIRE(img.size() == 1);
  CHECK(img[0] == Point{0});
}

TEST_CASE("free index vars") {
  Program p = parse_program(kPrefixSum);
  CHECK(free_index_vars(p.statements[0]) == std::set<std::string>{"i"});

  Program q = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output B : [N] { [i] : 0 <= i < N };\n"
      "S1: B[i] += A[i+j] : { [i,j] : 0 <= i < N and 0 <= j < N - i };\n");
  CHECK(free_index_vars(q.statements[0]).empty());

  Program g = parse_program(
      "param N;\n"
      "input Z : [N] { [j] : 0 <= j < N };\n"
      "input Obs : [N] { [j] : 0 <= j < N };\n"
      "output C : [N] { [i] : 0 <= i < N };\n"
      "S0L: C[i] += Z[j] == 0 ? Obs[j] : 0 : { [i,j] : 0 <= j < i and 1 <= i < N };\n");
  CHECK(free_index_vars(g.statements[0]) == std::set<std::string>{"i"});

  // a bare RHS occurrence of a variable binds it
  Program b = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output B : [N] { [i] : 0 <= i < N };\n"
      "S1: B[i] += A[j] * j : { [i,j] : 0 <= i < N and 0 <= j <= i };\n");
  CHECK(free_index_vars(b.statements[0]) == std::set<std::string>{"i"});
}

TEST_CASE("array ssa") {
  CHECK(check_array_ssa(parse_program(kMultiStatement)).ok);
  CHECK(check_array_ssa(parse_program(kPrefixSum)).ok);

  SUBCASE("two writers overlap") {
    Program p = parse_program(
        "param N;\noutput B : [N] { [i] : 0 <= i < N };\n"
        "S1: B[i] = 0 : { [i] : 0 <= i < N };\n"
        "S2: B[i] = 1 : { [i] : 2 <= i < N };\n");
    SsaReport r = check_array_ssa(p);
    REQUIRE(!r.ok);
    CHECK(r.array == "B");
    CHECK(r.writer_a == "S1");
    CHECK(r.writer_b == "S2");
    CHECK(r.cell == Point{2});
  }
  SUBCASE("one assignment writing a cell twice") {
    Program p = parse_program(
        "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
        "output B : [N] { [i] : 0 <= i < N };\n"
        "S1: B[0] = A[i] : { [i] : 0 <= i < N };\n");
    SsaReport r = check_array_ssa(p);
    REQUIRE(!r.ok);
    CHECK(r.writer_a == r.writer_b);
    CHECK(r.cell == Point{0});
  }
  SUBCASE("disjoint piecewise writers are fine") {
    Program p = parse_program(
        "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
        "output B : [N] { [i] : 0 <= i < N };\n"
        "S1: B[0] = A[0] : { [i] : i = 0 };\n"
        "S2: B[i] = A[i] : { [i] : 1 <= i < N };\n");
    CHECK(check_array_ssa(p).ok);
  }
}

TEST_CASE("bounds checking") {
  CHECK(check_bounds(parse_program(kMultiStatement), bindN(6)).empty());
  Program p = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output B : [N] { [i] : 0 <= i < N };\n"
      "S1: B[i] = A[i+1] : { [i] : 0 <= i < N };\n");
  std::string w = check_bounds(p, bindN(4));
  CHECK(w.find("out of bounds") != std::string::npos);
  CHECK(w.find("A") != std::string::npos);
}

TEST_CASE("operators and expressions parse") {
  Program p = parse_program(
      "param N;\ninput A : [N] { [i] : 0 <= i < N };\n"
      "output P : [N] { [i] : i = 0 };\n"
      "output M : [N] { [i] : i = 0 };\n"
      "output X : [N] { [i] : i = 0 };\n"
      "R1: P[0] *= A[j] : { [j] : 0 <= j < N };\n"
      "R2: M[0] min= A[j] : { [j] : 0 <= j < N };\n"
      "R3: X[0] max= 2 * A[j] + 1 : { [j] : 0 <= j < N };\n");
  CHECK(p.statements[0].op.name == "product");
  CHECK(p.statements[0].op.identity == Rat(1));
  CHECK(p.statements[1].op.name == "min");
  CHECK(!p.statements[1].op.identity.has_value());
  CHECK(!p.statements[1].op.has_inverse);
  CHECK(p.statements[2].op.name == "max");
  CHECK(p.statements[2].rhs->kind == Expr::Bin);

  CHECK(reduction_op("min").combine(Rat(3), Rat(-1)) == Rat(-1));
  CHECK(reduction_op("max").combine(Rat(3), Rat(-1)) == Rat(3));
  CHECK(reduction_op("sum").uncombine(Rat(10), Rat(4)) == Rat(6));
  CHECK(reduction_op("product").uncombine(Rat(10), Rat(4)) == Rat(10) / Rat(4));
  CHECK_THROWS_AS(reduction_op("min").uncombine(Rat(1), Rat(1)), IrError);
}

TEST_CASE("affine folding in expressions") {
  Program p = parse_program(
      "param N;\ninput A : [N,N] { [i,j] : 0 <= i < N and 0 <= j < N };\n"
      "output B : [N,N] { [i,j] : 0 <= i < N and 0 <= j < N };\n"
      "S1: B[i,j] = A[2*i - j + 1, j] : "
      "{ [i,j] : 0 <= i < N and 1 <= j <= 2*i - j and 2*i + 1 - j < N };\n");
  const AffineForm &f = p.statements[0].rhs->index[0];
  CHECK(f.coeffs[0] == 2);
  CHECK(f.coeffs[1] == -1);
  CHECK(f.constant == 1);
  CHECK(check_bounds(p, bindN(8)).empty());
}

TEST_CASE("shift expr moves variable references") {
  Program p = parse_program(kPrefixSum);
  const Space &sp = p.statements[0].domain.space;
  ExprPtr read_a = p.statements[0].rhs;  // A[j]
  DirVector r = DirVector::unit(2, 0);   // along i
  CHECK(shift_expr(read_a, r)->index[0].same_linear(read_a->index[0]));
  CHECK(shift_expr(read_a, r)->index[0].constant == read_a->index[0].constant);

  ExprPtr read_prev = make_read("B", {AffineForm::var(sp, "i") -
                                      AffineForm::cst(sp, Rat(1))});
  ExprPtr shifted = shift_expr(read_prev, r);  // B[i-1] shifted by e_i -> B[i]
  CHECK(shifted->index[0].constant == 0);
  CHECK(shifted->index[0].coeffs[0] == 1);
}

TEST_CASE("pretty print round trips") {
  for (const char *src : {kPrefixSum, kMultiStatement}) {
    Program p = parse_program(src);
    std::string once = pretty_print(p);
    Program q = parse_program(once);
    CHECK(pretty_print(q) == once);
    CHECK(q.statements.size() == p.statements.size());
  }
  // ternaries, calls, min/max, negative literals
  Program p = parse_program(
      "param N, K;\n"
      "input A : [N,K] { [i,k] : 0 <= i < N and 0 <= k < K };\n"
      "output B : [N,K] { [i,k] : 0 <= i < N and 0 <= k < K };\n"
      "S1: B[i,k] = A[i,k] == 0 ? f(A[i,k]) : min(A[i,k], -1) : "
      "{ [i,k] : 0 <= i < N and 0 <= k < K };\n");
  std::string once = pretty_print(p);
  CHECK(pretty_print(parse_program(once)) == once);
}
