#include <catch2/catch_amalgamated.hpp>

#include "closurelab/parser.hpp"
#include "closurelab/structure.hpp"

#include "oracles.hpp"

using namespace closurelab;

namespace {

StructureSpec triangle() {
  return parse_structure(
      "language { sort X; rel E : X*X; }\n"
      "structure { X = {0,1,2}; E = {(0,1),(1,2),(2,0)}; }\n");
}

/// Infinite successor structure on one sort: S(n, n+1).
StructureSpec successors() {
  Signature sig;
  sig.add_sort("N");
  sig.add_relation("S", {0, 0});
  RuleBasedBody rb;
  rb.sort_member = {[](std::uint64_t) { return true; }};
  rb.sort_bound = {std::nullopt};
  rb.rel_decide = {[](const std::vector<Elem>& t) { return t[1].ord == t[0].ord + 1; }};
  rb.rel_support = {[](const RuleBasedBody::Partial& p)
                        -> std::optional<std::vector<std::vector<Elem>>> {
    if (p[0])
      return std::vector<std::vector<Elem>>{{*p[0], Elem{0, p[0]->ord + 1}}};
    if (p[1] && p[1]->ord > 0)
      return std::vector<std::vector<Elem>>{{Elem{0, p[1]->ord - 1}, *p[1]}};
    if (p[1]) return std::vector<std::vector<Elem>>{};
    return std::nullopt;
  }};
  StructureSpec s;
  s.sig = sig;
  s.body = std::move(rb);
  return s;
}

}  // namespace

TEST_CASE("element text round-trip") {
  Signature sig = triangle().sig;
  Elem e{0, 2};
  CHECK(print_elem(e, sig) == "X#2");
  CHECK(parse_elem("X#2", sig) == e);
  CHECK_THROWS_AS(parse_elem("Y#0", sig), SortError);
  CHECK_THROWS_AS(parse_elem("X2", sig), SortError);
}

TEST_CASE("budget validation") {
  StageBudget b;
  CHECK_NOTHROW(b.check());
  b.closure_iterations = 0;
  CHECK_THROWS(b.check());
}

TEST_CASE("evaluation on a finite structure is total") {
  StructureSpec s = triangle();
  StageBudget b;
  PartitionedFormula cyc = parse_formula(
      "A x : X . E y : X . E(x,y)", s.sig);
  CHECK(eval(s, cyc.formula(), {}, b) == TruthVerdict::True);
  PartitionedFormula sym = parse_formula(
      "A x : X . A y : X . (!E(x,y) | E(y,x))", s.sig);
  CHECK(eval(s, sym.formula(), {}, b) == TruthVerdict::False);
  PartitionedFormula at = parse_formula("E(x;y)", s.sig);
  Assignment env{{"x", Elem{0, 0}}, {"y", Elem{0, 1}}};
  CHECK(eval(s, at.formula(), env, b) == TruthVerdict::True);
  env["y"] = Elem{0, 2};
  CHECK(eval(s, at.formula(), env, b) == TruthVerdict::False);
}

TEST_CASE("assignments are validated") {
  StructureSpec s = triangle();
  StageBudget b;
  PartitionedFormula at = parse_formula("E(x;y)", s.sig);
  Assignment env{{"x", Elem{0, 0}}, {"y", Elem{0, 9}}};
  CHECK_THROWS_AS(eval(s, at.formula(), env, b), SortError);
}

TEST_CASE("quantifiers over unbounded sorts go unknown, not false") {
  StructureSpec s = successors();
  StageBudget b{8, 16, 1024};
  // no maximum: falsified by no witness below any horizon, so unknown
  PartitionedFormula top = parse_formula("E x : N . A y : N . !S(x,y)", s.sig);
  CHECK(eval(s, top.formula(), {}, b) == TruthVerdict::Unknown);
  // an existential with a witness below the horizon is decided
  PartitionedFormula has = parse_formula("E x : N . S(x,x)", s.sig);
  CHECK(eval(s, has.formula(), {}, b) == TruthVerdict::Unknown);
  PartitionedFormula wit = parse_formula("[ ; x:N] E y : N . S(x,y)", s.sig);
  Assignment env{{"x", Elem{0, 3}}};
  CHECK(eval(s, wit.formula(), env, b) == TruthVerdict::True);
}

TEST_CASE("sort enumeration reports exhaustiveness") {
  StructureSpec fin = triangle();
  auto [elems, exhaustive] = fin.sort_elements(0, 64);
  CHECK(elems.size() == 3);
  CHECK(exhaustive);
  StructureSpec inf = successors();
  auto [some, ex2] = inf.sort_elements(0, 8);
  CHECK(some.size() == 8);
  CHECK_FALSE(ex2);
}

TEST_CASE("table-backed rule view agrees with the tables") {
  StructureSpec s = triangle();
  StructureSpec r = as_rule_based(s);
  REQUIRE_FALSE(r.finite());
  StageBudget b;
  for (std::uint64_t i = 0; i < 3; ++i)
    for (std::uint64_t j = 0; j < 3; ++j)
      CHECK(r.relation_holds(0, {Elem{0, i}, Elem{0, j}}) ==
            s.relation_holds(0, {Elem{0, i}, Elem{0, j}}));
  PartitionedFormula at = parse_formula("E(x;y)", s.sig);
  Assignment env{{"x", Elem{0, 1}}, {"y", Elem{0, 2}}};
  CHECK(eval(r, at.formula(), env, b) == TruthVerdict::True);
}

TEST_CASE("truncation produces the induced substructure") {
  StructureSpec s = successors();
  std::map<Elem, Elem> back;
  StructureSpec t = truncate(s, 5, &back);
  REQUIRE(t.finite());
  CHECK(t.tables().sort_size[0] == 5);
  CHECK(t.tables().tuples[0].size() == 4);  // 0-1, 1-2, 2-3, 3-4
  CHECK(back.at(Elem{0, 2}) == Elem{0, 2});
  CHECK_THROWS(truncate(triangle(), 2, nullptr));
}

TEST_CASE("brute-force counting matches hand counts") {
  StructureSpec s = triangle();
  PartitionedFormula succ = parse_formula("E(x;y)", s.sig);
  CHECK(brute_force_count(s, succ, {Elem{0, 0}}) == 1);
  PartitionedFormula any = parse_formula("[x:X ; y:X] E(x,y) | E(y,x)", s.sig);
  CHECK(brute_force_count(s, any, {Elem{0, 0}}) == 2);
  PartitionedFormula none = parse_formula("[x:X ; y:X] E(x,y) & E(y,x)", s.sig);
  CHECK(brute_force_count(s, none, {Elem{0, 0}}) == 0);
}

TEST_CASE("registry rejects duplicate codes") {
  StructureRegistry reg;
  reg.add(7, triangle());
  CHECK_THROWS(reg.add(7, triangle()));
  CHECK(reg.get(7).finite());
}

TEST_CASE("random corpus evaluation is boolean-consistent") {
  oracles::Rng rng(20260823);
  StageBudget b;
  for (int trial = 0; trial < 200; ++trial) {
    StructureSpec s = oracles::random_structure(rng);
    for (const auto& pf : oracles::qf_corpus(s.sig)) {
      for (const auto& a : oracles::all_tuples(s, pf.left_type()))
        for (const auto& t : oracles::all_tuples(s, pf.right_type())) {
          Assignment env;
          env[pf.left()[0].name] = a[0];
          env[pf.right()[0].name] = t[0];
          TruthVerdict v = eval(s, pf.formula(), env, b);
          TruthVerdict nv = eval(s, Formula::lnot(pf.formula()), env, b);
          REQUIRE(v != TruthVerdict::Unknown);
          REQUIRE(nv == tv_not(v));
        }
    }
  }
}
