#include <catch2/catch_amalgamated.hpp>

#include "closurelab/closure.hpp"
#include "closurelab/parser.hpp"

#include "oracles.hpp"

using namespace closurelab;

namespace {

StructureSpec fan() {
  // 0 points at 1 and 2; 3 is isolated
  return parse_structure(
      "language { sort X; rel E : X*X; }\n"
      "structure { X = {0,1,2,3}; E = {(0,1),(0,2)}; }\n");
}

}  // namespace

TEST_CASE("solution solving on a hand example") {
  StructureSpec s = fan();
  StageBudget b;
  PartitionedFormula pf = parse_formula("E(x;y)", s.sig);
  SolveResult sr = solve_solutions(s, pf, {Elem{0, 0}}, b);
  CHECK(sr.verdict == CountVerdict::exact(2));
  REQUIRE(sr.witnesses.size() == 2);
  sr = solve_solutions(s, pf, {Elem{0, 3}}, b);
  CHECK(sr.verdict == CountVerdict::exact(0));
}

TEST_CASE("counting matches brute force on the random corpus") {
  oracles::Rng rng(101);
  StageBudget b;
  for (int trial = 0; trial < 300; ++trial) {
    StructureSpec s = oracles::random_structure(rng);
    for (const auto& pf : oracles::qf_corpus(s.sig))
      for (const auto& a : oracles::all_tuples(s, pf.left_type())) {
        CountVerdict v = count_solutions(s, pf, a, b);
        REQUIRE(v.kind == CountVerdict::Exact);
        REQUIRE(v.k == brute_force_count(s, pf, a));
      }
  }
}

TEST_CASE("solution cap turns exact into at-least") {
  StructureSpec s = fan();
  StageBudget b;
  b.solution_cap = 1;
  PartitionedFormula pf = parse_formula("E(x;y)", s.sig);
  CountVerdict v = count_solutions(s, pf, {Elem{0, 0}}, b);
  CHECK(v.kind == CountVerdict::AtLeast);
  CHECK(v.k >= 1);
}

TEST_CASE("point algebraicity and definability verdicts") {
  StructureSpec s = fan();
  StageBudget b;
  PartitionedFormula pf = parse_formula("E(x;y)", s.sig);
  CHECK(in_acl0(s, pf, {Elem{0, 0}}, b) == MembershipVerdict::Member);
  CHECK(in_dcl0(s, pf, {Elem{0, 0}}, b) == MembershipVerdict::NonMember);  // two arrows
  CHECK(in_dcl0(s, pf, {Elem{0, 3}}, b) == MembershipVerdict::NonMember);  // none
  StructureSpec line = parse_structure(
      "language { sort X; rel E : X*X; }\n"
      "structure { X = {0,1}; E = {(0,1)}; }\n");
  CHECK(in_dcl0(line, pf, {Elem{0, 0}}, b) == MembershipVerdict::Member);
}

TEST_CASE("analytic oracles answer when enumeration cannot") {
  Signature sig;
  sig.add_sort("N");
  sig.add_relation("E", {0, 0});
  RuleBasedBody rb;
  rb.sort_member = {[](std::uint64_t) { return true; }};
  rb.sort_bound = {std::nullopt};
  rb.rel_decide = {[](const std::vector<Elem>& t) { return t[0].ord == 0 && t[1].ord > 0; }};
  rb.rel_support = {[](const RuleBasedBody::Partial&)
                        -> std::optional<std::vector<std::vector<Elem>>> {
    return std::nullopt;
  }};
  StructureSpec s;
  s.sig = sig;
  s.body = std::move(rb);
  PartitionedFormula pf = parse_formula("E(x;y)", s.sig);
  StageBudget b{8, 4, 8};
  CHECK(in_acl0(s, pf, {Elem{0, 0}}, b) == MembershipVerdict::Unknown);
  s.analytic = [](const PartitionedFormula&,
                  const std::vector<Elem>& a) -> std::optional<OracleAnswer> {
    if (a[0].ord == 0) return OracleAnswer{true, 0};
    return OracleAnswer{false, 0};
  };
  CHECK(in_acl0(s, pf, {Elem{0, 0}}, b) == MembershipVerdict::NonMember);
  CHECK(in_acl0(s, pf, {Elem{0, 5}}, b) == MembershipVerdict::Member);
}

TEST_CASE("closure fixpoint on a hand example") {
  StructureSpec line = parse_structure(
      "language { sort X; rel E : X*X; }\n"
      "structure { X = {0,1,2,3}; E = {(0,1),(1,2)}; }\n");
  StageBudget b;
  std::vector<PartitionedFormula> phis{parse_formula("E(x;y)", line.sig)};
  ClosureResult res = cl_fixpoint(line, phis, {Elem{0, 0}}, SolutionCountSet::of({1}), b);
  CHECK(res.converged);
  CHECK(res.elements == std::set<Elem>{Elem{0, 0}, Elem{0, 1}, Elem{0, 2}});
  // the trace explains each addition
  REQUIRE(res.trace.size() == 2);
  CHECK(res.trace[0].added == Elem{0, 1});
  CHECK(res.trace[1].added == Elem{0, 2});
  CHECK(res.trace[1].iter == 2);
  std::string text = trace_to_text(res, line.sig);
  CHECK(text.find("add=X#1") != std::string::npos);
}

TEST_CASE("closure equals the exhaustive oracle over the corpus") {
  oracles::Rng rng(202);
  StageBudget b;
  std::vector<SolutionCountSet> Ss{SolutionCountSet::of({1}), SolutionCountSet::AllOfN()};
  for (int trial = 0; trial < 60; ++trial) {
    StructureSpec s = oracles::random_structure(rng, 3, 1);
    std::vector<PartitionedFormula> phis{parse_formula("E(x;y)", s.sig),
                                         parse_formula("[x:X ; y:X] E(y,x)", s.sig)};
    for (const auto& S : Ss)
      for (const auto& base : oracles::all_base_sets(s)) {
        ClosureResult res = cl_fixpoint(s, phis, base, S, b);
        REQUIRE(res.converged);
        REQUIRE(res.elements == oracles::closure_oracle(s, phis, base, S));
      }
  }
}

TEST_CASE("reachability closure agrees on binary formula families") {
  oracles::Rng rng(303);
  StageBudget b;
  for (int trial = 0; trial < 40; ++trial) {
    StructureSpec s = oracles::random_structure(rng, 4, 2);
    std::vector<PartitionedFormula> phis{parse_formula("E(x;y)", s.sig)};
    if (s.sig.relation_count() > 1)
      phis.push_back(parse_formula("R(x;y)", s.sig));
    SolutionCountSet S = SolutionCountSet::of({1});
    for (const auto& base : oracles::all_base_sets(s)) {
      ClosureResult res = cl_fixpoint(s, phis, base, S, b);
      CHECK(closure_via_reachability(s, phis, base, S, b) == res.elements);
    }
  }
}

TEST_CASE("set membership verdicts respect convergence and suppression") {
  StructureSpec line = parse_structure(
      "language { sort X; rel E : X*X; }\n"
      "structure { X = {0,1,2}; E = {(0,1)}; }\n");
  StageBudget b;
  std::vector<PartitionedFormula> phis{parse_formula("E(x;y)", line.sig)};
  CHECK(dcl_set_member(line, phis, {Elem{0, 0}}, Elem{0, 1}, b) ==
        MembershipVerdict::Member);
  CHECK(dcl_set_member(line, phis, {Elem{0, 0}}, Elem{0, 2}, b) ==
        MembershipVerdict::NonMember);
  // too few iterations: the scan cannot finish, so no negative claim
  StageBudget tight{64, 1, 1024};
  StructureSpec chain = parse_structure(
      "language { sort X; rel E : X*X; }\n"
      "structure { X = {0,1,2,3}; E = {(0,1),(1,2),(2,3)}; }\n");
  CHECK(acl_set_member(chain, phis, {Elem{0, 0}}, Elem{0, 3}, tight) ==
        MembershipVerdict::Unknown);
}

TEST_CASE("closure on rule-based structures suppresses undecidable scans") {
  // successor-like infinite graph where counting past the horizon fails
  Signature sig;
  sig.add_sort("N");
  sig.add_relation("E", {0, 0});
  RuleBasedBody rb;
  rb.sort_member = {[](std::uint64_t) { return true; }};
  rb.sort_bound = {std::nullopt};
  rb.rel_decide = {[](const std::vector<Elem>& t) { return t[1].ord == t[0].ord + 1; }};
  rb.rel_support = {[](const RuleBasedBody::Partial&)
                        -> std::optional<std::vector<std::vector<Elem>>> {
    return std::nullopt;  // no finite support hint: forces enumeration
  }};
  StructureSpec s;
  s.sig = sig;
  s.body = std::move(rb);
  StageBudget b{8, 4, 8};
  std::vector<PartitionedFormula> phis{parse_formula("E(x;y)", s.sig)};
  ClosureResult res = cl_fixpoint(s, phis, {Elem{0, 0}}, SolutionCountSet::of({1}), b);
  CHECK_FALSE(res.suppressed.empty());
  CHECK(dcl_set_member(s, phis, {Elem{0, 0}}, Elem{0, 5}, b) ==
        MembershipVerdict::Unknown);
}
