#ifndef CLOSURELAB_TRANSFORMS_HPP
#define CLOSURELAB_TRANSFORMS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "closurelab/formula.hpp"
#include "closurelab/signature.hpp"
#include "closurelab/structure.hpp"

namespace closurelab {

/// Adds a fresh sort "N" (a copy of the naturals) and a relation "S"
/// instantiated as the successor digraph, rule-based with support bound 1 in
/// each direction. The input structure is untouched otherwise.
inline StructureSpec augment_with_nat(const StructureSpec& s) {
  if (s.sig.find_sort("N") >= 0)
    throw SortError("augment_with_nat: sort N already present");
  if (s.sig.find_relation("S") >= 0)
    throw SortError("augment_with_nat: relation S already present");
  StructureSpec out = as_rule_based(s);
  RuleBasedBody rb = out.rules();
  int nat = out.sig.add_sort("N");
  out.sig.add_relation("S", {nat, nat});
  rb.sort_member.push_back([](std::uint64_t) { return true; });
  rb.sort_bound.push_back(std::nullopt);
  rb.rel_decide.push_back([](const std::vector<Elem>& args) {
    return args[0].ord + 1 == args[1].ord;
  });
  rb.rel_support.push_back(
      [nat](const RuleBasedBody::Partial& p)
          -> std::optional<std::vector<std::vector<Elem>>> {
        std::vector<std::vector<Elem>> out;
        if (p[0] && p[1]) {
          if (p[0]->ord + 1 == p[1]->ord) out.push_back({*p[0], *p[1]});
        } else if (p[0]) {
          out.push_back({*p[0], Elem{nat, p[0]->ord + 1}});
        } else if (p[1]) {
          if (p[1]->ord > 0) out.push_back({Elem{nat, p[1]->ord - 1}, *p[1]});
        } else {
          return std::nullopt;
        }
        return out;
      });
  out.body = std::move(rb);
  return out;
}

/// One limit step: from gamma(x-bar, y) with y the lone right variable of
/// sort N, returns
///   [A y:N gamma] | [E y,z:N (S(y,z) & !gamma(y) & gamma(z))],
/// whose value is the eventual value of gamma along N whenever gamma flips
/// at most once. Raises the certified quantifier level by exactly one.
inline Formula gamma_prime(const PartitionedFormula& gamma, const Signature& sig) {
  if (gamma.right().size() != 1)
    throw SortError("gamma_prime: right part must be a single variable");
  const Var& y = gamma.right()[0];
  int succ = sig.find_relation("S");
  if (succ < 0 || sig.relation(succ).type != TupleType{y.sort, y.sort})
    throw SortError("gamma_prime: last variable is not of the successor sort");

  Var z{y.name + "#lim", y.sort};
  Formula body = gamma.formula();
  Formula shifted = body.substitute({{y.name, z}});
  Formula always = Formula::forall({y}, body);
  Formula flips_up = Formula::exists(
      {y, z}, Formula::land(Formula::land(Formula::atom(sig, succ, {y, z}),
                                          Formula::lnot(body)),
                            shifted));
  return Formula::lor(always, flips_up).normalized();
}

struct FlipError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A relation family given through total procedures whose iterated limits
/// (each coordinate flipping at most once) define the intended relations.
/// `sig` must contain sort "N" with relation "S" of type N*N; every other
/// relation R of type X-bar gets a procedure f(a-bar, l_0..l_{depth-1}).
struct LimitPresentation {
  using Fn = std::function<bool(const std::vector<Elem>&,
                                const std::vector<std::uint64_t>&)>;

  Signature sig;
  std::vector<std::uint64_t> sort_size;  // per sort; the N entry is ignored
  std::vector<Fn> f;                     // per relation; the S entry is ignored
  std::uint64_t depth = 0;
  std::uint64_t check_horizon = 64;      // last-coordinate scan range per query
};

struct LimitEncoding {
  StructureSpec structure;      // relations R of type X-bar * N^depth
  std::map<int, Formula> phi;   // base relation index -> formula over structure.sig
};

namespace detail {

inline void limit_indices(const LimitPresentation& lp, int& nat, int& succ) {
  nat = lp.sig.find_sort("N");
  succ = lp.sig.find_relation("S");
  if (nat < 0 || succ < 0 || lp.sig.relation(succ).type != TupleType{nat, nat})
    throw SortError("limit presentation needs sort N and relation S : N*N");
}

inline std::string flip_message(const Signature& sig, const std::string& rel,
                                const std::vector<Elem>& a,
                                const std::vector<std::uint64_t>& prefix) {
  std::ostringstream os;
  os << "flip uniqueness violated: relation " << rel << " at a=(";
  for (size_t i = 0; i < a.size(); ++i)
    os << (i ? "," : "") << print_elem(a[i], sig);
  os << ") prefix=(";
  for (size_t i = 0; i < prefix.size(); ++i) os << (i ? "," : "") << prefix[i];
  os << ")";
  return os.str();
}

}  // namespace detail

/// Materializes a limit presentation as a rule-based structure (relations of
/// type X-bar * N^depth decided by the procedures) together with, for each
/// base relation, the depth-fold limit formula recovering it. Every relation
/// query scans the last coordinate and raises FlipError if the procedure
/// flips more than once on the tested range.
inline LimitEncoding limit_encode(const LimitPresentation& lp) {
  int nat, succ;
  detail::limit_indices(lp, nat, succ);
  if (lp.sort_size.size() != static_cast<size_t>(lp.sig.sort_count()) ||
      lp.f.size() != static_cast<size_t>(lp.sig.relation_count()))
    throw std::invalid_argument("limit_encode: presentation tables misaligned");

  Signature sig_out;
  for (const auto& name : lp.sig.sorts()) sig_out.add_sort(name);
  for (int r = 0; r < lp.sig.relation_count(); ++r) {
    TupleType type = lp.sig.relation(r).type;
    if (r != succ) {
      for (int srt : type)
        if (srt == nat)
          throw std::invalid_argument("limit_encode: base relation " +
                                      lp.sig.relation(r).name +
                                      " may not use sort N");
      for (std::uint64_t d = 0; d < lp.depth; ++d) type.push_back(nat);
    }
    sig_out.add_relation(lp.sig.relation(r).name, std::move(type));
  }

  RuleBasedBody rb;
  for (int j = 0; j < sig_out.sort_count(); ++j) {
    if (j == nat) {
      rb.sort_member.push_back([](std::uint64_t) { return true; });
      rb.sort_bound.push_back(std::nullopt);
    } else {
      std::uint64_t n = lp.sort_size[j];
      rb.sort_member.push_back([n](std::uint64_t i) { return i < n; });
      rb.sort_bound.push_back(n);
    }
  }
  auto shared = std::make_shared<LimitPresentation>(lp);
  for (int r = 0; r < sig_out.relation_count(); ++r) {
    if (r == succ) {
      rb.rel_decide.push_back([](const std::vector<Elem>& args) {
        return args[0].ord + 1 == args[1].ord;
      });
      rb.rel_support.push_back(
          [nat](const RuleBasedBody::Partial& p)
              -> std::optional<std::vector<std::vector<Elem>>> {
            std::vector<std::vector<Elem>> out;
            if (p[0] && p[1]) {
              if (p[0]->ord + 1 == p[1]->ord) out.push_back({*p[0], *p[1]});
            } else if (p[0]) {
              out.push_back({*p[0], Elem{nat, p[0]->ord + 1}});
            } else if (p[1]) {
              if (p[1]->ord > 0) out.push_back({Elem{nat, p[1]->ord - 1}, *p[1]});
            } else {
              return std::nullopt;
            }
            return out;
          });
      continue;
    }
    if (!lp.f[r])
      throw std::invalid_argument("limit_encode: missing procedure for relation " +
                                  lp.sig.relation(r).name);
    size_t base_arity = lp.sig.relation(r).type.size();
    auto split = [base_arity, shared](const std::vector<Elem>& args,
                                      std::vector<Elem>& base,
                                      std::vector<std::uint64_t>& ells) {
      base.assign(args.begin(), args.begin() + base_arity);
      for (size_t i = base_arity; i < args.size(); ++i) ells.push_back(args[i].ord);
    };
    auto decide = [r, shared, split](const std::vector<Elem>& args) {
      std::vector<Elem> base;
      std::vector<std::uint64_t> ells;
      split(args, base, ells);
      if (!ells.empty()) {
        // last-coordinate flip scan for this prefix
        std::vector<std::uint64_t> probe = ells;
        std::uint64_t hi = std::max(ells.back() + 1, shared->check_horizon);
        int flips = 0;
        probe.back() = 0;
        bool prev = shared->f[r](base, probe);
        for (std::uint64_t t = 1; t <= hi; ++t) {
          probe.back() = t;
          bool cur = shared->f[r](base, probe);
          if (cur != prev) ++flips;
          prev = cur;
        }
        if (flips > 1) {
          std::vector<std::uint64_t> prefix(ells.begin(), ells.end() - 1);
          throw FlipError(detail::flip_message(shared->sig,
                                               shared->sig.relation(r).name,
                                               base, prefix));
        }
      }
      return shared->f[r](base, ells);
    };
    rb.rel_decide.push_back(decide);
    int nat_local = nat;
    auto type = sig_out.relation(r).type;
    rb.rel_support.push_back(
        [decide, type, nat_local, shared](const RuleBasedBody::Partial& p)
            -> std::optional<std::vector<std::vector<Elem>>> {
          // enumerable only when every unbound position is a finite base sort
          std::vector<std::vector<Elem>> cand{{}};
          for (size_t i = 0; i < p.size(); ++i) {
            std::vector<Elem> choices;
            if (p[i]) {
              choices.push_back(*p[i]);
            } else {
              if (type[i] == nat_local) return std::nullopt;
              for (std::uint64_t v = 0; v < shared->sort_size[type[i]]; ++v)
                choices.push_back({type[i], v});
            }
            std::vector<std::vector<Elem>> next;
            for (const auto& pre : cand)
              for (const auto& c : choices) {
                auto t = pre;
                t.push_back(c);
                next.push_back(std::move(t));
              }
            cand = std::move(next);
          }
          std::vector<std::vector<Elem>> out;
          for (const auto& t : cand)
            if (decide(t)) out.push_back(t);
          return out;
        });
  }

  LimitEncoding out;
  out.structure.sig = sig_out;
  out.structure.body = std::move(rb);
  for (int r = 0; r < sig_out.relation_count(); ++r) {
    if (r == succ) continue;
    std::vector<Var> vars;
    size_t base_arity = lp.sig.relation(r).type.size();
    for (size_t i = 0; i < base_arity; ++i)
      vars.push_back({"x" + std::to_string(i), lp.sig.relation(r).type[i]});
    for (std::uint64_t d = 0; d < lp.depth; ++d)
      vars.push_back({"l" + std::to_string(d), nat});
    Formula cur = Formula::atom(sig_out, r, vars);
    for (std::uint64_t d = lp.depth; d > 0; --d) {
      std::vector<Var> left(vars.begin(), vars.begin() + base_arity + d - 1);
      cur = gamma_prime(PartitionedFormula(cur, left, {vars[base_arity + d - 1]}),
                        sig_out);
    }
    out.phi.emplace(r, cur);
  }
  return out;
}

/// Scans every level of a presentation on [0, horizon) and raises FlipError
/// on any prefix whose last coordinate flips more than once. Coordinates
/// beyond the scanned level are approximated by their value at horizon - 1.
inline void check_flip_uniqueness(const LimitPresentation& lp, std::uint64_t horizon) {
  int nat, succ;
  detail::limit_indices(lp, nat, succ);
  if (horizon < 2) throw std::invalid_argument("check_flip_uniqueness: horizon too small");
  for (int r = 0; r < lp.sig.relation_count(); ++r) {
    if (r == succ) continue;
    const auto& type = lp.sig.relation(r).type;
    std::vector<std::vector<Elem>> tuples{{}};
    for (int srt : type) {
      std::vector<std::vector<Elem>> next;
      for (const auto& pre : tuples)
        for (std::uint64_t v = 0; v < lp.sort_size[srt]; ++v) {
          auto t = pre;
          t.push_back({srt, v});
          next.push_back(std::move(t));
        }
      tuples = std::move(next);
    }
    for (const auto& a : tuples) {
      // level k: coordinates 0..k-1 explicit, the rest held at horizon - 1
      for (std::uint64_t k = 1; k <= lp.depth; ++k) {
        std::vector<std::uint64_t> prefix(k - 1, 0);
        bool more = true;
        while (more) {
          int flips = 0;
          bool prev = false;
          for (std::uint64_t t = 0; t < horizon; ++t) {
            std::vector<std::uint64_t> ells = prefix;
            ells.push_back(t);
            ells.resize(lp.depth, horizon - 1);
            bool cur = lp.f[r](a, ells);
            if (t > 0 && cur != prev) ++flips;
            prev = cur;
          }
          if (flips > 1)
            throw FlipError(detail::flip_message(lp.sig, lp.sig.relation(r).name,
                                                 a, prefix));
          size_t i = prefix.size();
          more = false;
          while (i > 0) {
            --i;
            if (++prefix[i] < horizon) { more = true; break; }
            prefix[i] = 0;
          }
        }
      }
    }
  }
}

/// Loads a depth-1 presentation for unary base relations from text lines
/// `R a l value`. Each line sets f(a, t) = value for all t >= l (until a
/// later listed l overrides it); unlisted (a, l) below the first entry are
/// false. Lines starting with '#' and blank lines are skipped.
inline LimitPresentation load_limit_table(const std::string& text, Signature sig,
                                          std::vector<std::uint64_t> sort_size) {
  LimitPresentation lp;
  lp.sig = std::move(sig);
  lp.sort_size = std::move(sort_size);
  lp.depth = 1;
  int nat, succ;
  detail::limit_indices(lp, nat, succ);

  // (relation, element) -> sorted flip points l -> value
  auto table = std::make_shared<std::map<std::pair<int, Elem>,
                                         std::map<std::uint64_t, bool>>>();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string rel_name, elem_text;
    std::uint64_t ell;
    int value;
    if (!(ls >> rel_name)) continue;
    if (rel_name[0] == '#') continue;
    if (!(ls >> elem_text >> ell >> value) || (value != 0 && value != 1))
      throw std::invalid_argument("limit table line must be `R a l value`: " + line);
    int r = lp.sig.find_relation(rel_name);
    if (r < 0 || r == succ)
      throw std::invalid_argument("limit table: unknown relation " + rel_name);
    if (lp.sig.relation(r).type.size() != 1)
      throw std::invalid_argument("limit table: relation " + rel_name +
                                  " is not unary");
    Elem a = parse_elem(elem_text, lp.sig);
    (*table)[{r, a}][ell] = value != 0;
  }
  for (int r = 0; r < lp.sig.relation_count(); ++r) {
    if (r == succ) {
      lp.f.emplace_back();
      continue;
    }
    lp.f.push_back([table, r](const std::vector<Elem>& a,
                              const std::vector<std::uint64_t>& ells) {
      auto it = table->find({r, a[0]});
      if (it == table->end()) return false;
      bool value = false;
      for (const auto& [ell, v] : it->second) {
        if (ell > ells[0]) break;
        value = v;
      }
      return value;
    });
  }
  return lp;
}

struct MorleyizationResult {
  Signature ksig;                 // input signature plus one symbol per formula
  StructureSpec an;               // finite; new symbols hold on the solution sets
  std::vector<Formula> new_atoms; // per input formula, the defining atom
  std::vector<int> new_rels;      // per input formula, its relation index in ksig
  std::vector<Formula> inputs;
};

/// Extends a finite structure with one fresh relation per input formula,
/// instantiated as that formula's solution set, so each input acquires a
/// quantifier-free (atomic) definition. Dropping the new symbols returns the
/// input structure table-for-table.
inline MorleyizationResult morleyize(const StructureSpec& s,
                                     const std::vector<Formula>& formulas,
                                     std::uint64_t n) {
  if (!s.finite()) throw std::invalid_argument("morleyize: structure must be finite");
  for (const auto& f : formulas)
    if (bc_sigma_level(f) > n)
      throw std::invalid_argument("morleyize: formula exceeds level " +
                                  std::to_string(n));

  MorleyizationResult out;
  out.ksig = s.sig;
  out.inputs = formulas;
  FiniteTables ft = s.tables();
  StageBudget budget;
  for (size_t i = 0; i < formulas.size(); ++i) {
    auto fv = formulas[i].free_vars();
    TupleType type;
    for (const auto& v : fv) type.push_back(v.sort);
    std::string name = "Q" + std::to_string(i);
    while (out.ksig.find_relation(name) >= 0) name += "_m";
    int rel = out.ksig.add_relation(name, type);
    out.new_rels.push_back(rel);

    std::set<std::vector<Elem>> tups;
    std::vector<std::uint64_t> idx(fv.size(), 0);
    bool done = false;
    while (!done) {
      bool in_range = true;
      for (size_t j = 0; j < fv.size(); ++j)
        if (idx[j] >= ft.sort_size[fv[j].sort]) { in_range = false; break; }
      if (!in_range && !fv.empty()) break;
      Assignment env;
      std::vector<Elem> tup;
      for (size_t j = 0; j < fv.size(); ++j) {
        env[fv[j].name] = Elem{fv[j].sort, idx[j]};
        tup.push_back(env[fv[j].name]);
      }
      if (eval(s, formulas[i], env, budget) == TruthVerdict::True)
        tups.insert(tup);
      if (fv.empty()) break;
      size_t k = fv.size();
      while (k > 0) {
        --k;
        if (++idx[k] < ft.sort_size[fv[k].sort]) break;
        if (k == 0) { done = true; break; }
        idx[k] = 0;
      }
    }
    ft.tuples.push_back(std::move(tups));
    out.new_atoms.push_back(Formula::atom(out.ksig, rel, fv));
  }
  out.an.sig = out.ksig;
  out.an.body = std::move(ft);
  return out;
}

}  // namespace closurelab

#endif
