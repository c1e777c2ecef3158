#ifndef CLOSURELAB_REDUCTIONS_HPP
#define CLOSURELAB_REDUCTIONS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "closurelab/closure.hpp"
#include "closurelab/formula.hpp"
#include "closurelab/structure.hpp"

namespace closurelab {

/// The conjunction asserting k distinct realizations of the right tuple,
/// with one partition tau_j per omitted fresh block.
struct UpsilonBundle {
  Formula formula;
  std::vector<PartitionedFormula> partitions;
};

namespace detail {

inline std::vector<Var> fresh_tuple(const std::vector<Var>& like, const std::string& suffix) {
  std::vector<Var> out;
  out.reserve(like.size());
  for (const auto& v : like) out.push_back({v.name + suffix, v.sort});
  return out;
}

inline Formula tuple_eq(const std::vector<Var>& a, const std::vector<Var>& b) {
  std::vector<Formula> eqs;
  for (size_t i = 0; i < a.size(); ++i) eqs.push_back(Formula::eq(a[i], b[i]));
  return Formula::conj(eqs);
}

inline Formula substituted(const Formula& f, const std::vector<Var>& from,
                           const std::vector<Var>& to) {
  std::map<std::string, Var> ren;
  for (size_t i = 0; i < from.size(); ++i) ren[from[i].name] = to[i];
  return f.substitute(ren);
}

}  // namespace detail

inline UpsilonBundle build_upsilon(const PartitionedFormula& pf, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("build_upsilon: k must be >= 1");
  if (pf.right().empty())
    throw std::invalid_argument("build_upsilon: right part must be nonempty");
  std::vector<std::vector<Var>> blocks;
  for (std::uint64_t j = 0; j < k; ++j)
    blocks.push_back(detail::fresh_tuple(pf.right(), "#upsilon_" + std::to_string(j)));

  std::vector<Formula> parts;
  for (std::uint64_t i = 0; i < k; ++i)
    for (std::uint64_t j = i + 1; j < k; ++j)
      parts.push_back(Formula::lnot(detail::tuple_eq(blocks[i], blocks[j])));
  for (std::uint64_t j = 0; j < k; ++j)
    parts.push_back(detail::substituted(pf.formula(), pf.right(), blocks[j]));
  Formula upsilon = Formula::conj(parts);

  UpsilonBundle out;
  out.formula = upsilon;
  for (std::uint64_t j = 0; j < k; ++j) {
    std::vector<Var> left = pf.left();
    for (std::uint64_t i = 0; i < k; ++i)
      if (i != j) left.insert(left.end(), blocks[i].begin(), blocks[i].end());
    out.partitions.emplace_back(upsilon, left, blocks[j]);
  }
  return out;
}

/// Psi(x-bar z-bar; y-bar) := phi(x-bar, y-bar) | (y-bar = z-bar).
inline PartitionedFormula build_psi(const PartitionedFormula& pf) {
  if (pf.right().empty())
    throw std::invalid_argument("build_psi: right part must be nonempty");
  auto z = detail::fresh_tuple(pf.right(), "#psi");
  Formula psi = Formula::lor(pf.formula(), detail::tuple_eq(pf.right(), z));
  std::vector<Var> left = pf.left();
  left.insert(left.end(), z.begin(), z.end());
  return PartitionedFormula(psi, left, pf.right());
}

using MembershipOracle =
    std::function<MembershipVerdict(const PartitionedFormula&, const std::vector<Elem>&)>;

/// Computes the CL count from ACL and DCL oracles, per the two-sided
/// reduction: the ACL oracle settles finiteness, then Psi (k = 0) and
/// Upsilon (k >= 1) instances of the DCL oracle pin the count. Parameter
/// tuples range over `s` below the domain horizon.
inline CountVerdict cl_from_acl_dcl(const StructureSpec& s, const PartitionedFormula& pf,
                                    const std::vector<Elem>& a,
                                    const MembershipOracle& acl_oracle,
                                    const MembershipOracle& dcl_oracle,
                                    const StageBudget& b) {
  b.check();
  MembershipVerdict acl = acl_oracle(pf, a);
  if (acl == MembershipVerdict::NonMember) return CountVerdict::infinite_flagged();
  if (acl == MembershipVerdict::Unknown) return CountVerdict::unknown();

  // all right-type parameter tuples below the horizon
  std::vector<std::vector<Elem>> space{{}};
  bool exhaustive = true;
  for (const auto& rv : pf.right()) {
    auto [elems, ex] = s.sort_elements(rv.sort, b.domain_horizon);
    exhaustive = exhaustive && ex;
    std::vector<std::vector<Elem>> next;
    for (const auto& pre : space)
      for (const auto& e : elems) {
        auto t = pre;
        t.push_back(e);
        next.push_back(std::move(t));
      }
    space = std::move(next);
  }

  bool zero_disproved = false;
  for (std::uint64_t k = 0; k <= b.solution_cap; ++k) {
    if (exhaustive && k > space.size()) break;  // count cannot exceed the space
    if (k == 0) {
      if (space.size() >= 2) {
        PartitionedFormula psi = build_psi(pf);
        bool all_member = true;
        for (size_t which = 0; which < 2; ++which) {
          std::vector<Elem> args = a;
          args.insert(args.end(), space[which].begin(), space[which].end());
          MembershipVerdict v = dcl_oracle(psi, args);
          if (v == MembershipVerdict::Unknown) return CountVerdict::unknown();
          if (v == MembershipVerdict::NonMember) { all_member = false; break; }
        }
        if (all_member) return CountVerdict::exact(0);
        zero_disproved = true;
      } else if (exhaustive && space.empty()) {
        return CountVerdict::exact(0);
      }
      // a one-tuple space offers no second witness for the Psi test;
      // elimination of k = 1 below settles it instead
      continue;
    }
    UpsilonBundle ub = build_upsilon(pf, k);
    for (std::uint64_t j = 0; j < k; ++j) {
      // parameter blocks: one right-type tuple per block other than j
      std::vector<size_t> idx(k - 1, 0);
      bool done = (k > 1) && space.empty();
      while (!done) {
        std::vector<Elem> args = a;
        for (size_t t = 0; t < k - 1; ++t)
          args.insert(args.end(), space[idx[t]].begin(), space[idx[t]].end());
        MembershipVerdict v = dcl_oracle(ub.partitions[j], args);
        if (v == MembershipVerdict::Member) return CountVerdict::exact(k);
        if (v == MembershipVerdict::Unknown) return CountVerdict::unknown();
        if (k == 1) break;
        size_t t = k - 1;
        while (t > 0) {
          --t;
          if (++idx[t] < space.size()) break;
          if (t == 0) { done = true; break; }
          idx[t] = 0;
        }
      }
      if (k == 1) break;
    }
    if (exhaustive && k == space.size()) {
      // every count 1..|space| was decisively ruled out; the count is 0
      // unless that too was disproved, in which case the oracles conflict
      return zero_disproved ? CountVerdict::unknown() : CountVerdict::exact(0);
    }
  }
  return CountVerdict::unknown();
}

}  // namespace closurelab

#endif
