#include <catch2/catch_amalgamated.hpp>

#include "closurelab/formula.hpp"
#include "closurelab/parser.hpp"
#include "closurelab/signature.hpp"

using namespace closurelab;

namespace {

Signature graph_sig() {
  Signature sig;
  sig.add_sort("X");
  sig.add_relation("E", {0, 0});
  return sig;
}

}  // namespace

TEST_CASE("signature lookup and validation") {
  Signature sig = graph_sig();
  CHECK(sig.find_sort("X") == 0);
  CHECK(sig.find_sort("Y") == -1);
  CHECK(sig.find_relation("E") == 0);
  CHECK(sig.relation(0).type == TupleType{0, 0});
  CHECK_THROWS_AS(sig.add_sort("X"), SortError);
  CHECK_THROWS_AS(sig.add_relation("E", {0}), SortError);
  CHECK_THROWS_AS(sig.add_relation("F", {0, 7}), SortError);
}

TEST_CASE("atoms are sort-checked") {
  Signature sig = graph_sig();
  sig.add_sort("Y");
  Var x{"x", 0}, u{"u", 1};
  CHECK_THROWS_AS(Formula::atom(sig, 0, {x, u}), SortError);
  CHECK_THROWS_AS(Formula::atom(sig, 0, {x}), SortError);
  CHECK_THROWS_AS(Formula::eq(x, u), SortError);
}

TEST_CASE("free variables in first-occurrence order") {
  Signature sig = graph_sig();
  Var x{"x", 0}, y{"y", 0}, z{"z", 0};
  Formula f = Formula::land(Formula::atom(sig, 0, {y, x}),
                            Formula::exists({z}, Formula::atom(sig, 0, {x, z})));
  auto fv = f.free_vars();
  REQUIRE(fv.size() == 2);
  CHECK(fv[0].name == "y");
  CHECK(fv[1].name == "x");
}

TEST_CASE("normalization renames clashing binders") {
  Signature sig = graph_sig();
  Var x{"x", 0}, y{"y", 0};
  // E(x,y) & Ex.E(x,x): the bound x must move out of the way
  Formula f = Formula::land(Formula::atom(sig, 0, {x, y}),
                            Formula::exists({x}, Formula::atom(sig, 0, {x, x})));
  Formula n = f.normalized();
  std::string printed = print_formula(n, sig);
  CHECK(printed.find("x_1") != std::string::npos);
  auto fv = n.free_vars();
  REQUIRE(fv.size() == 2);
  CHECK(fv[0].name == "x");
}

TEST_CASE("substitution respects binding") {
  Signature sig = graph_sig();
  Var x{"x", 0}, y{"y", 0}, z{"z", 0};
  Formula f = Formula::exists({y}, Formula::atom(sig, 0, {x, y}));
  Formula g = f.substitute({{"x", z}});
  CHECK(g.free_vars().size() == 1);
  CHECK(g.free_vars()[0].name == "z");
  // substituting for a bound variable is a no-op
  CHECK(f.substitute({{"y", z}}) == f);
}

TEST_CASE("quantifier rank and level arithmetic") {
  Signature sig = graph_sig();
  Var x{"x", 0}, y{"y", 0}, z{"z", 0};
  Formula atom = Formula::atom(sig, 0, {x, y});
  CHECK(quantifier_rank(atom) == 0);
  CHECK(bc_sigma_level(atom) == 0);
  Formula one = Formula::exists({y}, atom);
  CHECK(quantifier_rank(one) == 1);
  CHECK(bc_sigma_level(one) == 1);
  Formula two = Formula::forall({x}, one);
  CHECK(quantifier_rank(two) == 2);
  CHECK(bc_sigma_level(two) == 2);
  // a block of binders is one alternation; nested nodes are counted apart
  Formula ee = Formula::exists({x, z}, Formula::atom(sig, 0, {x, z}));
  CHECK(quantifier_rank(ee) == 2);
  CHECK(bc_sigma_level(ee) == 1);
  Formula nested = Formula::exists({x}, Formula::exists({z}, Formula::atom(sig, 0, {x, z})));
  CHECK(bc_sigma_level(nested) == 2);
}

TEST_CASE("partition must cover the free variables exactly") {
  Signature sig = graph_sig();
  Var x{"x", 0}, y{"y", 0};
  Formula f = Formula::atom(sig, 0, {x, y});
  CHECK_NOTHROW(PartitionedFormula(f, {x}, {y}));
  CHECK_THROWS(PartitionedFormula(f, {x}, {}));
  CHECK_THROWS(PartitionedFormula(f, {x, y}, {y}));
  PartitionedFormula pf(f, {x}, {y});
  CHECK(pf.left_type() == TupleType{0});
  CHECK(pf.right_type() == TupleType{0});
  PartitionedFormula swapped = repartition(pf, {"y"});
  CHECK(swapped.left()[0].name == "y");
  CHECK(swapped.right()[0].name == "x");
}

TEST_CASE("parser accepts the semicolon partition") {
  Signature sig = graph_sig();
  PartitionedFormula pf = parse_formula("E(x;y)", sig);
  REQUIRE(pf.left().size() == 1);
  REQUIRE(pf.right().size() == 1);
  CHECK(pf.left()[0].name == "x");
  CHECK(pf.right()[0].name == "y");
}

TEST_CASE("parser handles connectives, quantifiers and headers") {
  Signature sig = graph_sig();
  sig.add_sort("Y");
  sig.add_relation("F", {0, 1});

  PartitionedFormula pf = parse_formula("[x:X ; y:Y] F(x,y) & !E(x,x)", sig);
  CHECK(pf.left()[0].sort == 0);
  CHECK(pf.right()[0].sort == 1);

  PartitionedFormula q = parse_formula("E(x;y) | E z : X . (E(x,z) & E(z,y))", sig);
  CHECK(quantifier_rank(q.formula()) == 1);
  CHECK(q.left().size() == 1);

  // round-trip: printing then reparsing yields the same formula
  std::string printed = print_formula(q.formula(), sig);
  PartitionedFormula again = parse_formula("[x:X ; y:X] " + printed, sig);
  CHECK(again.formula() == q.formula());
}

TEST_CASE("parser rejects malformed input with positions") {
  Signature sig = graph_sig();
  CHECK_THROWS_AS(parse_formula("E(x;y", sig), ParseError);
  CHECK_THROWS_AS(parse_formula("G(x;y)", sig), ParseError);
  // without a partition mark every free variable lands on the right
  CHECK(parse_formula("E(x,y)", sig).left().empty());
  try {
    parse_formula("E(x;y) &", sig);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset > 0);
  }
}

TEST_CASE("structure file parsing") {
  StructureSpec s = parse_structure(
      "language { sort X; rel E : X*X; }\n"
      "structure { X = {0,1,2}; E = {(0,1),(0,2)}; }\n");
  REQUIRE(s.finite());
  CHECK(s.tables().sort_size[0] == 3);
  CHECK(s.tables().tuples[0].size() == 2);
  CHECK(s.relation_holds(0, {Elem{0, 0}, Elem{0, 1}}));
  CHECK_FALSE(s.relation_holds(0, {Elem{0, 1}, Elem{0, 0}}));
  CHECK_THROWS_AS(parse_structure("language { sort X; }\nstructure { Y = {0}; }"),
                  ParseError);
}
