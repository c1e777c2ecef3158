#ifndef CLOSURELAB_STRUCTURE_HPP
#define CLOSURELAB_STRUCTURE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "closurelab/formula.hpp"
#include "closurelab/signature.hpp"

namespace closurelab {

/// An element of a many-sorted structure: (sort index, ordinal within sort).
struct Elem {
  int sort = -1;
  std::uint64_t ord = 0;

  bool operator==(const Elem& o) const { return sort == o.sort && ord == o.ord; }
  bool operator!=(const Elem& o) const { return !(*this == o); }
  bool operator<(const Elem& o) const {
    return sort != o.sort ? sort < o.sort : ord < o.ord;
  }
};

inline std::string print_elem(const Elem& e, const Signature& sig) {
  return sig.sort_name(e.sort) + "#" + std::to_string(e.ord);
}

inline Elem parse_elem(const std::string& text, const Signature& sig) {
  auto hash = text.rfind('#');
  if (hash == std::string::npos)
    throw SortError("element must be written Sort#k: " + text);
  int sort = sig.find_sort(text.substr(0, hash));
  if (sort < 0) throw SortError("unknown sort in element: " + text);
  return Elem{sort, std::stoull(text.substr(hash + 1))};
}

struct StageBudget {
  std::uint64_t domain_horizon = 64;
  std::uint64_t closure_iterations = 16;
  std::uint64_t solution_cap = 1024;

  void check() const {
    if (domain_horizon == 0 || closure_iterations == 0 || solution_cap == 0)
      throw std::invalid_argument("all budget fields must be positive");
  }
};

enum class TruthVerdict { True, False, Unknown };

inline TruthVerdict tv_not(TruthVerdict v) {
  if (v == TruthVerdict::True) return TruthVerdict::False;
  if (v == TruthVerdict::False) return TruthVerdict::True;
  return TruthVerdict::Unknown;
}

/// Finite structure: per-sort element counts (ordinals 0..n-1) and explicit
/// relation tables.
struct FiniteTables {
  std::vector<std::uint64_t> sort_size;
  std::vector<std::set<std::vector<Elem>>> tuples;

  bool operator==(const FiniteTables& o) const {
    return sort_size == o.sort_size && tuples == o.tuples;
  }
};

/// Countable structure given by decision procedures. Each relation carries a
/// support-bound hint: for a partial argument binding, either the finite list
/// of completing tuples or nullopt ("unbounded").
struct RuleBasedBody {
  using Partial = std::vector<std::optional<Elem>>;
  using Support = std::function<std::optional<std::vector<std::vector<Elem>>>(const Partial&)>;

  std::vector<std::function<bool(std::uint64_t)>> sort_member;
  // all members of the sort have ordinal < bound, when known
  std::vector<std::optional<std::uint64_t>> sort_bound;
  std::vector<std::function<bool(const std::vector<Elem>&)>> rel_decide;
  std::vector<Support> rel_support;
};

struct OracleAnswer {
  bool infinite = false;
  std::uint64_t count = 0;
};

/// Analytic ground-truth for |{b-bar : phi(a-bar; b-bar)}| on queries the
/// oracle recognizes; nullopt on everything else.
using AnalyticOracle =
    std::function<std::optional<OracleAnswer>(const PartitionedFormula&, const std::vector<Elem>&)>;

struct StructureSpec {
  Signature sig;
  std::variant<FiniteTables, RuleBasedBody> body;
  AnalyticOracle analytic;  // may be empty

  bool finite() const { return std::holds_alternative<FiniteTables>(body); }
  const FiniteTables& tables() const { return std::get<FiniteTables>(body); }
  const RuleBasedBody& rules() const { return std::get<RuleBasedBody>(body); }

  bool has_element(const Elem& e) const {
    if (e.sort < 0 || e.sort >= sig.sort_count()) return false;
    if (finite()) return e.ord < tables().sort_size[e.sort];
    return rules().sort_member[e.sort](e.ord);
  }

  /// Elements of a sort with ordinal below `horizon`, plus whether that list
  /// is certified exhaustive for the whole sort.
  std::pair<std::vector<Elem>, bool> sort_elements(int sort, std::uint64_t horizon) const {
    std::vector<Elem> out;
    if (finite()) {
      for (std::uint64_t i = 0; i < tables().sort_size[sort]; ++i)
        out.push_back({sort, i});
      return {out, true};
    }
    const auto& rb = rules();
    std::uint64_t limit = horizon;
    bool exhaustive = false;
    if (rb.sort_bound[sort] && *rb.sort_bound[sort] <= horizon) {
      limit = *rb.sort_bound[sort];
      exhaustive = true;
    }
    for (std::uint64_t i = 0; i < limit; ++i)
      if (rb.sort_member[sort](i)) out.push_back({sort, i});
    return {out, exhaustive};
  }

  bool relation_holds(int rel, const std::vector<Elem>& args) const {
    if (finite()) return tables().tuples[rel].count(args) > 0;
    return rules().rel_decide[rel](args);
  }
};

/// Replaces Goedel codes: a map from numeric codes to structures.
class StructureRegistry {
public:
  void add(std::uint64_t code, StructureSpec s) {
    if (map_.count(code)) throw std::invalid_argument("duplicate structure code");
    map_.emplace(code, std::move(s));
  }
  const StructureSpec& get(std::uint64_t code) const { return map_.at(code); }
  bool contains(std::uint64_t code) const { return map_.count(code) > 0; }

private:
  std::map<std::uint64_t, StructureSpec> map_;
};

using Assignment = std::map<std::string, Elem>;

namespace detail {

inline TruthVerdict eval_rec(const StructureSpec& s, const Formula& f,
                             Assignment& env, const StageBudget& b) {
  switch (f.kind()) {
    case FormulaKind::Atom: {
      std::vector<Elem> args;
      args.reserve(f.vars().size());
      for (const auto& v : f.vars()) args.push_back(env.at(v.name));
      return s.relation_holds(f.relation(), args) ? TruthVerdict::True
                                                  : TruthVerdict::False;
    }
    case FormulaKind::Eq:
      return env.at(f.vars()[0].name) == env.at(f.vars()[1].name)
                 ? TruthVerdict::True
                 : TruthVerdict::False;
    case FormulaKind::Not:
      return tv_not(eval_rec(s, f.child(), env, b));
    case FormulaKind::And: {
      TruthVerdict l = eval_rec(s, f.left(), env, b);
      if (l == TruthVerdict::False) return TruthVerdict::False;
      TruthVerdict r = eval_rec(s, f.right(), env, b);
      if (r == TruthVerdict::False) return TruthVerdict::False;
      if (l == TruthVerdict::True && r == TruthVerdict::True) return TruthVerdict::True;
      return TruthVerdict::Unknown;
    }
    case FormulaKind::Or: {
      TruthVerdict l = eval_rec(s, f.left(), env, b);
      if (l == TruthVerdict::True) return TruthVerdict::True;
      TruthVerdict r = eval_rec(s, f.right(), env, b);
      if (r == TruthVerdict::True) return TruthVerdict::True;
      if (l == TruthVerdict::False && r == TruthVerdict::False) return TruthVerdict::False;
      return TruthVerdict::Unknown;
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      bool is_exists = f.kind() == FormulaKind::Exists;
      // nested enumeration of the quantified tuple
      const auto& binders = f.vars();
      std::vector<std::pair<std::vector<Elem>, bool>> domains;
      bool all_exhaustive = true;
      for (const auto& v : binders) {
        domains.push_back(s.sort_elements(v.sort, b.domain_horizon));
        all_exhaustive = all_exhaustive && domains.back().second;
      }
      bool saw_unknown = false;
      std::vector<std::uint64_t> idx(binders.size(), 0);
      bool done = binders.empty();
      while (!done) {
        bool in_range = true;
        for (size_t i = 0; i < binders.size(); ++i)
          if (idx[i] >= domains[i].first.size()) { in_range = false; break; }
        if (!in_range) break;
        for (size_t i = 0; i < binders.size(); ++i)
          env[binders[i].name] = domains[i].first[idx[i]];
        TruthVerdict v = eval_rec(s, f.child(), env, b);
        for (const auto& bv : binders) env.erase(bv.name);
        if (is_exists && v == TruthVerdict::True) return TruthVerdict::True;
        if (!is_exists && v == TruthVerdict::False) return TruthVerdict::False;
        if (v == TruthVerdict::Unknown) saw_unknown = true;
        // advance
        size_t k = binders.size();
        while (k > 0) {
          --k;
          if (++idx[k] < domains[k].first.size()) break;
          if (k == 0) { done = true; break; }
          idx[k] = 0;
        }
        if (binders.size() == 0) done = true;
      }
      if (saw_unknown || !all_exhaustive) return TruthVerdict::Unknown;
      return is_exists ? TruthVerdict::False : TruthVerdict::True;
    }
  }
  return TruthVerdict::Unknown;
}

}  // namespace detail

/// Satisfaction under a stage budget. Exact on finite structures; on
/// rule-based structures quantifiers range below the domain horizon and an
/// unexhausted sort yields Unknown instead of a guess.
inline TruthVerdict eval(const StructureSpec& s, const Formula& f,
                         const Assignment& assignment, const StageBudget& b) {
  b.check();
  auto fv = f.free_vars();
  if (fv.size() != assignment.size())
    throw SortError("assignment must cover exactly the free variables");
  for (const auto& v : fv) {
    auto it = assignment.find(v.name);
    if (it == assignment.end())
      throw SortError("assignment missing variable " + v.name);
    if (it->second.sort != v.sort)
      throw SortError("ill-sorted assignment for variable " + v.name);
    if (!s.has_element(it->second))
      throw SortError("assignment maps " + v.name + " outside the structure");
  }
  Assignment env = assignment;
  return detail::eval_rec(s, f, env, b);
}

/// Views a finite structure through the rule-based interface (table-backed
/// predicates with exact support hints).
inline StructureSpec as_rule_based(const StructureSpec& s) {
  if (!s.finite()) return s;
  auto tables = std::make_shared<FiniteTables>(s.tables());
  RuleBasedBody rb;
  for (int j = 0; j < s.sig.sort_count(); ++j) {
    std::uint64_t n = tables->sort_size[j];
    rb.sort_member.push_back([n](std::uint64_t i) { return i < n; });
    rb.sort_bound.push_back(n);
  }
  for (int r = 0; r < s.sig.relation_count(); ++r) {
    rb.rel_decide.push_back([tables, r](const std::vector<Elem>& args) {
      return tables->tuples[r].count(args) > 0;
    });
    rb.rel_support.push_back(
        [tables, r](const RuleBasedBody::Partial& partial)
            -> std::optional<std::vector<std::vector<Elem>>> {
          std::vector<std::vector<Elem>> out;
          for (const auto& tup : tables->tuples[r]) {
            bool ok = true;
            for (size_t i = 0; i < partial.size(); ++i)
              if (partial[i] && *partial[i] != tup[i]) { ok = false; break; }
            if (ok) out.push_back(tup);
          }
          return out;
        });
  }
  StructureSpec out;
  out.sig = s.sig;
  out.body = std::move(rb);
  out.analytic = s.analytic;
  return out;
}

/// Finite induced substructure on the elements with ordinal below `horizon`.
/// Ordinals are compacted per sort; `elem_map`, when given, receives the
/// old-element to new-element mapping.
inline StructureSpec truncate(const StructureSpec& s, std::uint64_t horizon,
                              std::map<Elem, Elem>* elem_map = nullptr) {
  if (s.finite()) throw std::invalid_argument("truncate: structure is already finite");
  if (horizon == 0) throw std::invalid_argument("truncate: horizon must be positive");
  const auto& rb = s.rules();
  std::map<Elem, Elem> remap;
  FiniteTables ft;
  for (int j = 0; j < s.sig.sort_count(); ++j) {
    std::uint64_t limit = horizon;
    if (rb.sort_bound[j] && *rb.sort_bound[j] < limit) limit = *rb.sort_bound[j];
    std::uint64_t next = 0;
    for (std::uint64_t i = 0; i < limit; ++i)
      if (rb.sort_member[j](i)) remap[{j, i}] = {j, next++};
    ft.sort_size.push_back(next);
  }
  for (int r = 0; r < s.sig.relation_count(); ++r) {
    std::set<std::vector<Elem>> tups;
    const auto& type = s.sig.relation(r).type;
    std::vector<std::vector<Elem>> per_pos;
    for (int srt : type) {
      std::vector<Elem> elems;
      for (const auto& [old_e, new_e] : remap)
        if (old_e.sort == srt) elems.push_back(old_e);
      per_pos.push_back(std::move(elems));
    }
    std::vector<size_t> idx(type.size(), 0);
    bool done = false;
    if (type.empty()) {
      if (rb.rel_decide[r]({})) tups.insert({});
      done = true;
    }
    for (const auto& p : per_pos)
      if (p.empty()) done = true;
    while (!done) {
      std::vector<Elem> args;
      for (size_t i = 0; i < type.size(); ++i) args.push_back(per_pos[i][idx[i]]);
      if (rb.rel_decide[r](args)) {
        std::vector<Elem> mapped;
        for (const auto& e : args) mapped.push_back(remap.at(e));
        tups.insert(mapped);
      }
      size_t k = type.size();
      while (k > 0) {
        --k;
        if (++idx[k] < per_pos[k].size()) break;
        if (k == 0) { done = true; break; }
        idx[k] = 0;
      }
    }
    ft.tuples.push_back(std::move(tups));
  }
  if (elem_map) *elem_map = remap;
  StructureSpec out;
  out.sig = s.sig;
  out.body = std::move(ft);
  return out;
}

/// Exact |{b-bar : s |= phi(a-bar; b-bar)}| by exhaustive enumeration.
inline std::uint64_t brute_force_count(const StructureSpec& s,
                                       const PartitionedFormula& pf,
                                       const std::vector<Elem>& a) {
  if (!s.finite()) throw std::invalid_argument("brute_force_count: structure must be finite");
  auto lt = pf.left_type();
  if (a.size() != lt.size()) throw SortError("brute_force_count: left tuple arity mismatch");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].sort != lt[i]) throw SortError("brute_force_count: left tuple sort mismatch");
    if (!s.has_element(a[i])) throw SortError("brute_force_count: element not in structure");
  }
  Assignment base;
  for (size_t i = 0; i < a.size(); ++i) base[pf.left()[i].name] = a[i];
  const auto& right = pf.right();
  StageBudget b;  // irrelevant on finite structures
  std::uint64_t count = 0;
  std::vector<std::uint64_t> idx(right.size(), 0);
  bool done = false;
  while (!done) {
    bool in_range = true;
    for (size_t i = 0; i < right.size(); ++i)
      if (idx[i] >= s.tables().sort_size[right[i].sort]) { in_range = false; break; }
    if (!in_range && !right.empty()) break;
    Assignment env = base;
    for (size_t i = 0; i < right.size(); ++i)
      env[right[i].name] = Elem{right[i].sort, idx[i]};
    if (eval(s, pf.formula(), env, b) == TruthVerdict::True) ++count;
    if (right.empty()) break;
    size_t k = right.size();
    while (k > 0) {
      --k;
      if (++idx[k] < s.tables().sort_size[right[k].sort]) break;
      if (k == 0) { done = true; break; }
      idx[k] = 0;
    }
  }
  return count;
}

}  // namespace closurelab

#endif
