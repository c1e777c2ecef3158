#ifndef CLOSURELAB_CLOSURE_HPP
#define CLOSURELAB_CLOSURE_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "closurelab/formula.hpp"
#include "closurelab/structure.hpp"

namespace closurelab {

/// Budget-aware answer to |{b-bar : phi(a-bar; b-bar)}|. Exact only when the
/// search space was exhausted; an infinite solution set is reported as
/// Unknown with the oracle flag, never as a number.
struct CountVerdict {
  enum Kind { Exact, AtLeast, Unknown } kind = Unknown;
  std::uint64_t k = 0;
  bool infinite_per_oracle = false;

  static CountVerdict exact(std::uint64_t n) { return {Exact, n, false}; }
  static CountVerdict at_least(std::uint64_t n) { return {AtLeast, n, false}; }
  static CountVerdict unknown() { return {Unknown, 0, false}; }
  static CountVerdict infinite_flagged() { return {Unknown, 0, true}; }

  bool operator==(const CountVerdict& o) const {
    return kind == o.kind && (kind == Unknown || k == o.k) &&
           infinite_per_oracle == o.infinite_per_oracle;
  }
};

enum class MembershipVerdict { Member, NonMember, Unknown };

/// The paper's S: either a finite nonempty set of naturals or all of N.
struct SolutionCountSet {
  bool all_of_n = false;
  std::set<std::uint64_t> values;

  static SolutionCountSet AllOfN() { return {true, {}}; }
  static SolutionCountSet of(std::set<std::uint64_t> vs) {
    if (vs.empty()) throw std::invalid_argument("finite S must be nonempty");
    return {false, std::move(vs)};
  }

  bool contains(std::uint64_t k) const { return all_of_n || values.count(k) > 0; }
  std::uint64_t max_value() const { return values.empty() ? 0 : *values.rbegin(); }
};

struct SolveResult {
  CountVerdict verdict;
  std::vector<std::vector<Elem>> witnesses;  // complete exactly when Exact
};

namespace detail {

inline void check_left_tuple(const StructureSpec& s, const PartitionedFormula& pf,
                             const std::vector<Elem>& a) {
  auto lt = pf.left_type();
  if (a.size() != lt.size()) throw SortError("left tuple arity mismatch");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].sort != lt[i]) throw SortError("left tuple sort mismatch");
    if (!s.has_element(a[i])) throw SortError("left tuple element not in structure");
  }
}

// Top-level positive conjuncts of a formula (descending through And).
inline void positive_conjuncts(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == FormulaKind::And) {
    positive_conjuncts(f.left(), out);
    positive_conjuncts(f.right(), out);
  } else {
    out.push_back(f);
  }
}

struct Enumeration {
  std::vector<std::vector<Elem>> tuples;
  bool exhaustive = false;
};

// Candidate right-tuples via a relation's support-bound hint, when some
// positive atom covers all right variables with everything else bound left.
inline std::optional<Enumeration> support_candidates(const StructureSpec& s,
                                                     const PartitionedFormula& pf,
                                                     const Assignment& left_env) {
  if (s.finite()) return std::nullopt;
  const auto& rb = s.rules();
  std::vector<Formula> conjs;
  positive_conjuncts(pf.formula(), conjs);
  for (const auto& c : conjs) {
    if (c.kind() != FormulaKind::Atom) continue;
    // every right variable must occur among the atom's arguments
    bool covers = true;
    for (const auto& rv : pf.right()) {
      bool found = false;
      for (const auto& av : c.vars())
        if (av.name == rv.name) { found = true; break; }
      if (!found) { covers = false; break; }
    }
    if (!covers) continue;
    RuleBasedBody::Partial partial;
    bool usable = true;
    for (const auto& av : c.vars()) {
      auto it = left_env.find(av.name);
      if (it != left_env.end()) {
        partial.push_back(it->second);
      } else {
        bool is_right = false;
        for (const auto& rv : pf.right())
          if (rv.name == av.name) { is_right = true; break; }
        if (!is_right) { usable = false; break; }  // bound variable leaked in
        partial.emplace_back(std::nullopt);
      }
    }
    if (!usable) continue;
    auto cands = rb.rel_support[c.relation()](partial);
    if (!cands) continue;
    // project each candidate completion onto the right tuple
    std::set<std::vector<Elem>> seen;
    Enumeration en;
    en.exhaustive = true;
    for (const auto& tup : *cands) {
      std::vector<Elem> rt(pf.right().size(), Elem{});
      std::vector<bool> set(pf.right().size(), false);
      bool consistent = true;
      for (size_t i = 0; i < c.vars().size() && consistent; ++i) {
        if (partial[i]) {
          if (tup[i] != *partial[i]) consistent = false;
          continue;
        }
        for (size_t j = 0; j < pf.right().size(); ++j)
          if (pf.right()[j].name == c.vars()[i].name) {
            if (set[j] && rt[j] != tup[i]) consistent = false;
            rt[j] = tup[i];
            set[j] = true;
          }
      }
      if (!consistent) continue;
      if (seen.insert(rt).second) en.tuples.push_back(rt);
    }
    return en;
  }
  return std::nullopt;
}

}  // namespace detail

/// Solutions of phi(a-bar; .) with witness tuples. On finite structures this
/// is exhaustive; on rule-based structures it uses support-bound hints when a
/// covering atom provides them, and staged enumeration otherwise.
inline SolveResult solve_solutions(const StructureSpec& s, const PartitionedFormula& pf,
                                   const std::vector<Elem>& a, const StageBudget& b) {
  b.check();
  detail::check_left_tuple(s, pf, a);
  Assignment left_env;
  for (size_t i = 0; i < a.size(); ++i) left_env[pf.left()[i].name] = a[i];

  SolveResult res;
  std::vector<std::vector<Elem>> candidates;
  bool exhaustive = false;

  if (auto en = detail::support_candidates(s, pf, left_env)) {
    candidates = std::move(en->tuples);
    exhaustive = en->exhaustive;
  } else {
    // staged cartesian enumeration of the right tuple space
    exhaustive = true;
    candidates.push_back({});
    for (const auto& rv : pf.right()) {
      auto [elems, ex] = s.sort_elements(rv.sort, b.domain_horizon);
      exhaustive = exhaustive && ex;
      std::vector<std::vector<Elem>> next;
      for (const auto& pre : candidates)
        for (const auto& e : elems) {
          auto t = pre;
          t.push_back(e);
          next.push_back(std::move(t));
        }
      candidates = std::move(next);
      if (!s.finite() && candidates.size() > 4 * b.solution_cap + 4096)
        break;  // keep staged search bounded
    }
    if (!pf.right().empty() && candidates.size() == 1 && candidates[0].empty())
      candidates.clear();  // a right sort had no elements below horizon
    // partially-built tuples from an early break are unusable
    for (const auto& t : candidates)
      if (t.size() != pf.right().size()) { candidates.clear(); exhaustive = false; break; }
  }

  bool saw_unknown = false;
  bool cap_hit = false;
  for (const auto& rt : candidates) {
    Assignment env = left_env;
    bool ok = true;
    for (size_t i = 0; i < pf.right().size(); ++i) {
      if (rt[i].sort != pf.right()[i].sort || !s.has_element(rt[i])) { ok = false; break; }
      env[pf.right()[i].name] = rt[i];
    }
    if (!ok) continue;
    TruthVerdict v = eval(s, pf.formula(), env, b);
    if (v == TruthVerdict::True) {
      res.witnesses.push_back(rt);
      if (res.witnesses.size() >= b.solution_cap) { cap_hit = true; break; }
    } else if (v == TruthVerdict::Unknown) {
      saw_unknown = true;
    }
  }

  std::uint64_t found = res.witnesses.size();
  if (cap_hit) {
    res.verdict = CountVerdict::at_least(found);
  } else if (exhaustive && !saw_unknown) {
    res.verdict = CountVerdict::exact(found);
  } else if (found > 0) {
    res.verdict = CountVerdict::at_least(found);
  } else {
    res.verdict = CountVerdict::unknown();
  }
  return res;
}

inline CountVerdict count_solutions(const StructureSpec& s, const PartitionedFormula& pf,
                                    const std::vector<Elem>& a, const StageBudget& b) {
  return solve_solutions(s, pf, a, b).verdict;
}

/// Is phi algebraic at a-bar (finite, possibly empty, solution set)?
inline MembershipVerdict in_acl0(const StructureSpec& s, const PartitionedFormula& pf,
                                 const std::vector<Elem>& a, const StageBudget& b) {
  CountVerdict v = count_solutions(s, pf, a, b);
  if (v.kind == CountVerdict::Exact) return MembershipVerdict::Member;
  if (s.analytic) {
    if (auto ans = s.analytic(pf, a))
      return ans->infinite ? MembershipVerdict::NonMember : MembershipVerdict::Member;
  }
  return MembershipVerdict::Unknown;
}

/// Is phi definable at a-bar (singleton solution set)?
inline MembershipVerdict in_dcl0(const StructureSpec& s, const PartitionedFormula& pf,
                                 const std::vector<Elem>& a, const StageBudget& b) {
  CountVerdict v = count_solutions(s, pf, a, b);
  if (v.kind == CountVerdict::Exact)
    return v.k == 1 ? MembershipVerdict::Member : MembershipVerdict::NonMember;
  if (v.kind == CountVerdict::AtLeast && v.k >= 2) return MembershipVerdict::NonMember;
  if (s.analytic) {
    if (auto ans = s.analytic(pf, a))
      return (!ans->infinite && ans->count == 1) ? MembershipVerdict::Member
                                                 : MembershipVerdict::NonMember;
  }
  return MembershipVerdict::Unknown;
}

struct TraceEntry {
  std::uint64_t iter;
  Elem added;
  size_t phi_index;
  std::vector<Elem> a;
};

struct SuppressedEntry {
  std::uint64_t iter;
  size_t phi_index;
  std::vector<Elem> a;
};

struct ClosureResult {
  std::set<Elem> elements;
  std::uint64_t iterations_used = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
  std::vector<SuppressedEntry> suppressed;
};

namespace detail {

// One scan: fire every phi on every left tuple over `current` that includes,
// when `recent` is nonempty, at least one recent element. Returns added set.
inline std::set<Elem> cl_scan(const StructureSpec& s,
                              const std::vector<PartitionedFormula>& phis,
                              const std::set<Elem>& current, const std::set<Elem>& recent,
                              const SolutionCountSet& S, const StageBudget& b,
                              std::uint64_t iter, ClosureResult* log) {
  std::set<Elem> added;
  for (size_t pi = 0; pi < phis.size(); ++pi) {
    const auto& pf = phis[pi];
    auto lt = pf.left_type();
    // all left-type tuples over `current` (with repetition)
    std::vector<std::vector<Elem>> tuples{{}};
    for (int sort : lt) {
      std::vector<std::vector<Elem>> next;
      for (const auto& pre : tuples)
        for (const auto& e : current)
          if (e.sort == sort) {
            auto t = pre;
            t.push_back(e);
            next.push_back(std::move(t));
          }
      tuples = std::move(next);
    }
    for (const auto& a : tuples) {
      if (!recent.empty()) {
        bool touches = lt.empty();
        for (const auto& e : a)
          if (recent.count(e)) { touches = true; break; }
        if (!touches) continue;
      }
      SolveResult sr = solve_solutions(s, pf, a, b);
      const CountVerdict& v = sr.verdict;
      bool fires = v.kind == CountVerdict::Exact && S.contains(v.k);
      if (fires) {
        for (const auto& w : sr.witnesses)
          for (const auto& e : w)
            if (!current.count(e) && added.insert(e).second && log)
              log->trace.push_back({iter, e, pi, a});
      } else {
        // certified non-membership of the count in S is a decided non-fire;
        // anything else is a budget suppression
        bool decided_out =
            (v.kind == CountVerdict::Exact) ||
            (!S.all_of_n && v.kind == CountVerdict::AtLeast && v.k > S.max_value());
        if (!decided_out && log)
          log->suppressed.push_back({iter, pi, a});
      }
    }
  }
  return added;
}

}  // namespace detail

/// One application of the closure step cl^1.
inline std::set<Elem> cl_step(const StructureSpec& s,
                              const std::vector<PartitionedFormula>& phis,
                              const std::set<Elem>& B, const SolutionCountSet& S,
                              const StageBudget& b) {
  b.check();
  for (const auto& e : B)
    if (!s.has_element(e)) throw SortError("base element not in structure");
  auto added = detail::cl_scan(s, phis, B, {}, S, b, 1, nullptr);
  std::set<Elem> out = B;
  out.insert(added.begin(), added.end());
  return out;
}

/// Iterates cl^1 up to the closure-iteration budget.
inline ClosureResult cl_fixpoint(const StructureSpec& s,
                                 const std::vector<PartitionedFormula>& phis,
                                 const std::set<Elem>& B, const SolutionCountSet& S,
                                 const StageBudget& b) {
  b.check();
  for (const auto& e : B)
    if (!s.has_element(e)) throw SortError("base element not in structure");
  ClosureResult res;
  res.elements = B;
  std::set<Elem> recent;  // empty on the first scan: consider all tuples
  for (std::uint64_t it = 1; it <= b.closure_iterations; ++it) {
    res.suppressed.clear();  // keep only the last iteration's suppressions
    auto added = detail::cl_scan(s, phis, res.elements, recent, S, b, it, &res);
    res.iterations_used = it;
    if (added.empty()) {
      res.converged = true;
      break;
    }
    res.elements.insert(added.begin(), added.end());
    recent = std::move(added);
  }
  return res;
}

inline MembershipVerdict acl_set_member(const StructureSpec& s,
                                        const std::vector<PartitionedFormula>& phis,
                                        const std::set<Elem>& A, const Elem& target,
                                        const StageBudget& b,
                                        ClosureResult* out_result = nullptr) {
  auto res = cl_fixpoint(s, phis, A, SolutionCountSet::AllOfN(), b);
  if (out_result) *out_result = res;
  if (res.elements.count(target)) return MembershipVerdict::Member;
  if (res.converged && s.finite() && res.suppressed.empty())
    return MembershipVerdict::NonMember;
  return MembershipVerdict::Unknown;
}

inline MembershipVerdict dcl_set_member(const StructureSpec& s,
                                        const std::vector<PartitionedFormula>& phis,
                                        const std::set<Elem>& A, const Elem& target,
                                        const StageBudget& b,
                                        ClosureResult* out_result = nullptr) {
  auto res = cl_fixpoint(s, phis, A, SolutionCountSet::of({1}), b);
  if (out_result) *out_result = res;
  if (res.elements.count(target)) return MembershipVerdict::Member;
  if (res.converged && s.finite() && res.suppressed.empty())
    return MembershipVerdict::NonMember;
  return MembershipVerdict::Unknown;
}

/// For all-binary Phi: Z_S edges by solution counting, then forward
/// reachability from B. Must agree with cl_fixpoint on the same inputs.
inline std::set<Elem> closure_via_reachability(const StructureSpec& s,
                                               const std::vector<PartitionedFormula>& phis,
                                               const std::set<Elem>& B,
                                               const SolutionCountSet& S,
                                               const StageBudget& b) {
  b.check();
  for (const auto& pf : phis)
    if (pf.left().size() != 1 || pf.right().size() != 1)
      throw std::invalid_argument("closure_via_reachability: non-binary formula in Phi");
  for (const auto& e : B)
    if (!s.has_element(e)) throw SortError("base element not in structure");
  std::set<Elem> reached = B;
  std::vector<Elem> frontier(B.begin(), B.end());
  while (!frontier.empty()) {
    std::vector<Elem> next;
    for (const auto& a : frontier) {
      for (const auto& pf : phis) {
        if (pf.left()[0].sort != a.sort) continue;
        SolveResult sr = solve_solutions(s, pf, {a}, b);
        if (sr.verdict.kind == CountVerdict::Exact && S.contains(sr.verdict.k))
          for (const auto& w : sr.witnesses)
            if (reached.insert(w[0]).second) next.push_back(w[0]);
      }
    }
    frontier = std::move(next);
  }
  return reached;
}

/// Line-oriented trace export: `iter=2 add=X#5 via=phi3 a=(X#1,X#2)`.
inline std::string trace_to_text(const ClosureResult& res, const Signature& sig) {
  std::ostringstream os;
  for (const auto& t : res.trace) {
    os << "iter=" << t.iter << " add=" << print_elem(t.added, sig) << " via=phi"
       << t.phi_index << " a=(";
    for (size_t i = 0; i < t.a.size(); ++i) {
      if (i) os << ',';
      os << print_elem(t.a[i], sig);
    }
    os << ")\n";
  }
  for (const auto& t : res.suppressed) {
    os << "iter=" << t.iter << " suppressed=phi" << t.phi_index << " a=(";
    for (size_t i = 0; i < t.a.size(); ++i) {
      if (i) os << ',';
      os << print_elem(t.a[i], sig);
    }
    os << ")\n";
  }
  return os.str();
}

}  // namespace closurelab

#endif
