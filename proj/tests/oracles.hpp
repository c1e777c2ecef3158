// Test-side oracles and corpus generators. Everything here is deliberately
// naive — straight-line exhaustive loops with no sharing of logic with the
// library under test.
#ifndef CLOSURELAB_TESTS_ORACLES_HPP
#define CLOSURELAB_TESTS_ORACLES_HPP

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "closurelab/closure.hpp"
#include "closurelab/structure.hpp"

namespace oracles {

namespace cl = closurelab;

using Rng = std::mt19937_64;

/// Single-sorted finite structure: sort X of size 1..max_universe, up to
/// max_rels binary relations E, R with independently sampled tuples.
inline cl::StructureSpec random_structure(Rng& rng, std::uint64_t max_universe = 4,
                                          int max_rels = 2) {
  cl::Signature sig;
  sig.add_sort("X");
  std::uint64_t n = 1 + rng() % max_universe;
  int rels = 1 + static_cast<int>(rng() % max_rels);
  cl::FiniteTables ft;
  ft.sort_size = {n};
  const char* names[] = {"E", "R"};
  for (int r = 0; r < rels; ++r) {
    sig.add_relation(names[r], {0, 0});
    std::set<std::vector<cl::Elem>> tuples;
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < n; ++j)
        if (rng() % 2) tuples.insert({cl::Elem{0, i}, cl::Elem{0, j}});
    ft.tuples.push_back(std::move(tuples));
  }
  cl::StructureSpec s;
  s.sig = sig;
  s.body = std::move(ft);
  return s;
}

/// Fixed deterministic family of quantifier-free formulas partitioned
/// (x ; y), covering atoms, equality, negation and both connectives.
inline std::vector<cl::PartitionedFormula> qf_corpus(const cl::Signature& sig) {
  using F = cl::Formula;
  cl::Var x{"x", 0}, y{"y", 0};
  std::vector<F> bases;
  for (int r = 0; r < sig.relation_count(); ++r) {
    bases.push_back(F::atom(sig, r, {x, y}));
    bases.push_back(F::atom(sig, r, {y, x}));
    // both variables must occur free for the (x ; y) split to cover them
    bases.push_back(F::land(F::atom(sig, r, {y, y}), F::eq(x, x)));
  }
  bases.push_back(F::eq(x, y));
  std::vector<F> formulas = bases;
  for (const auto& f : bases) formulas.push_back(F::lnot(f));
  for (size_t i = 0; i + 1 < bases.size(); i += 2) {
    formulas.push_back(F::land(bases[i], bases[i + 1]));
    formulas.push_back(F::lor(bases[i], F::lnot(bases[i + 1])));
  }
  std::vector<cl::PartitionedFormula> out;
  for (const auto& f : formulas) out.emplace_back(f, std::vector{x}, std::vector{y});
  return out;
}

inline std::vector<cl::Elem> all_elems(const cl::StructureSpec& s) {
  std::vector<cl::Elem> out;
  const auto& ft = s.tables();
  for (int sort = 0; sort < s.sig.sort_count(); ++sort)
    for (std::uint64_t i = 0; i < ft.sort_size[sort]; ++i)
      out.push_back(cl::Elem{sort, i});
  return out;
}

/// All tuples of the given type over the finite structure.
inline std::vector<std::vector<cl::Elem>> all_tuples(const cl::StructureSpec& s,
                                                     const cl::TupleType& type) {
  std::vector<std::vector<cl::Elem>> out{{}};
  const auto& ft = s.tables();
  for (int sort : type) {
    std::vector<std::vector<cl::Elem>> next;
    for (const auto& pre : out)
      for (std::uint64_t i = 0; i < ft.sort_size[sort]; ++i) {
        auto t = pre;
        t.push_back(cl::Elem{sort, i});
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

/// Exact solution set of phi(a-bar; .) by exhaustive evaluation.
inline std::vector<std::vector<cl::Elem>> solution_set(const cl::StructureSpec& s,
                                                       const cl::PartitionedFormula& pf,
                                                       const std::vector<cl::Elem>& a) {
  cl::StageBudget b;
  std::vector<std::vector<cl::Elem>> out;
  for (const auto& tup : all_tuples(s, pf.right_type())) {
    cl::Assignment env;
    for (size_t i = 0; i < pf.left().size(); ++i) env[pf.left()[i].name] = a[i];
    for (size_t i = 0; i < pf.right().size(); ++i) env[pf.right()[i].name] = tup[i];
    if (cl::eval(s, pf.formula(), env, b) == cl::TruthVerdict::True) out.push_back(tup);
  }
  return out;
}

/// Independent exhaustive closure fixpoint: repeatedly scan all left tuples
/// over the current set, adding every member of every solution tuple when the
/// exact count lies in S, until nothing changes.
inline std::set<cl::Elem> closure_oracle(const cl::StructureSpec& s,
                                         const std::vector<cl::PartitionedFormula>& phis,
                                         const std::set<cl::Elem>& base,
                                         const cl::SolutionCountSet& S) {
  std::set<cl::Elem> cur = base;
  for (;;) {
    std::set<cl::Elem> next = cur;
    for (const auto& pf : phis) {
      std::vector<std::vector<cl::Elem>> lefts{{}};
      for (int sort : pf.left_type()) {
        std::vector<std::vector<cl::Elem>> grown;
        for (const auto& pre : lefts)
          for (const auto& e : cur)
            if (e.sort == sort) {
              auto t = pre;
              t.push_back(e);
              grown.push_back(std::move(t));
            }
        lefts = std::move(grown);
      }
      for (const auto& a : lefts) {
        auto sols = solution_set(s, pf, a);
        if (!S.contains(sols.size())) continue;
        for (const auto& tup : sols)
          for (const auto& e : tup) next.insert(e);
      }
    }
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

/// All nonempty base sets of a small finite structure.
inline std::vector<std::set<cl::Elem>> all_base_sets(const cl::StructureSpec& s) {
  auto elems = all_elems(s);
  std::vector<std::set<cl::Elem>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << elems.size()); ++mask) {
    std::set<cl::Elem> base;
    for (size_t i = 0; i < elems.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) base.insert(elems[i]);
    out.push_back(std::move(base));
  }
  return out;
}

}  // namespace oracles

#endif
