#ifndef CLOSURELAB_FORMULA_HPP
#define CLOSURELAB_FORMULA_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "closurelab/signature.hpp"

namespace closurelab {

struct Var {
  std::string name;
  int sort = -1;

  bool operator==(const Var& o) const { return name == o.name && sort == o.sort; }
  bool operator!=(const Var& o) const { return !(*this == o); }
  bool operator<(const Var& o) const {
    return name != o.name ? name < o.name : sort < o.sort;
  }
};

enum class FormulaKind { Atom, Eq, Not, And, Or, Exists, Forall };

class Formula;

namespace detail {
struct FormulaNode {
  FormulaKind kind;
  int rel = -1;                       // Atom
  std::vector<Var> vars;              // Atom args / quantifier binders
  std::shared_ptr<const FormulaNode> lhs, rhs;  // children (rhs for And/Or)
};
}  // namespace detail

/// Immutable first-order formula over a many-sorted relational signature.
/// Well-sortedness is checked at construction; bound variables never shadow
/// an outer variable (enforced by renaming in `normalized`).
class Formula {
public:
  Formula() = default;

  FormulaKind kind() const { return node_->kind; }
  int relation() const { return node_->rel; }
  const std::vector<Var>& vars() const { return node_->vars; }
  Formula child() const { return Formula(node_->lhs); }
  Formula left() const { return Formula(node_->lhs); }
  Formula right() const { return Formula(node_->rhs); }
  bool valid() const { return node_ != nullptr; }

  static Formula atom(const Signature& sig, int rel, std::vector<Var> args) {
    const auto& r = sig.relation(rel);
    if (args.size() != r.type.size())
      throw SortError("atom " + r.name + ": arity mismatch");
    for (size_t i = 0; i < args.size(); ++i) {
      if (args[i].sort < 0) args[i].sort = r.type[i];
      if (args[i].sort != r.type[i])
        throw SortError("atom " + r.name + ": variable " + args[i].name +
                        " has sort " + sig.sort_name(args[i].sort) +
                        ", expected " + sig.sort_name(r.type[i]));
    }
    auto n = std::make_shared<detail::FormulaNode>();
    n->kind = FormulaKind::Atom;
    n->rel = rel;
    n->vars = std::move(args);
    return Formula(n);
  }

  static Formula eq(Var a, Var b) {
    if (a.sort != b.sort)
      throw SortError("equality between variables of different sorts: " +
                      a.name + ", " + b.name);
    auto n = std::make_shared<detail::FormulaNode>();
    n->kind = FormulaKind::Eq;
    n->vars = {std::move(a), std::move(b)};
    return Formula(n);
  }

  static Formula lnot(Formula f) {
    auto n = std::make_shared<detail::FormulaNode>();
    n->kind = FormulaKind::Not;
    n->lhs = f.node_;
    return Formula(n);
  }

  static Formula land(Formula a, Formula b) { return binary(FormulaKind::And, a, b); }
  static Formula lor(Formula a, Formula b) { return binary(FormulaKind::Or, a, b); }

  /// Left-fold of a nonempty list under And (resp. Or).
  static Formula conj(const std::vector<Formula>& fs) { return fold(FormulaKind::And, fs); }
  static Formula disj(const std::vector<Formula>& fs) { return fold(FormulaKind::Or, fs); }

  static Formula exists(std::vector<Var> binders, Formula body) {
    return quant(FormulaKind::Exists, std::move(binders), body);
  }
  static Formula forall(std::vector<Var> binders, Formula body) {
    return quant(FormulaKind::Forall, std::move(binders), body);
  }

  /// Free variables ordered by first occurrence (left-to-right).
  std::vector<Var> free_vars() const {
    std::vector<Var> out;
    std::set<std::string> bound;
    collect_free(node_, bound, out);
    return out;
  }

  /// Renames bound variables so that no bound name repeats an outer bound
  /// name or a free-variable name.
  Formula normalized() const {
    std::set<std::string> used;
    for (const auto& v : free_vars()) used.insert(v.name);
    std::map<std::string, std::string> ren;
    return Formula(rename_bound(node_, used, ren));
  }

  /// Renames free occurrences per `ren` (name -> new variable of same sort).
  Formula substitute(const std::map<std::string, Var>& ren) const {
    return Formula(subst(node_, ren));
  }

  bool operator==(const Formula& o) const { return structurally_equal(node_, o.node_); }
  bool operator!=(const Formula& o) const { return !(*this == o); }

private:
  friend class PartitionedFormula;
  explicit Formula(std::shared_ptr<const detail::FormulaNode> n) : node_(std::move(n)) {}

  static Formula binary(FormulaKind k, Formula a, Formula b) {
    auto n = std::make_shared<detail::FormulaNode>();
    n->kind = k;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Formula(n);
  }

  static Formula fold(FormulaKind k, const std::vector<Formula>& fs) {
    if (fs.empty()) throw std::invalid_argument("empty connective fold");
    Formula acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = binary(k, acc, fs[i]);
    return acc;
  }

  static Formula quant(FormulaKind k, std::vector<Var> binders, Formula body) {
    if (binders.empty()) throw std::invalid_argument("empty quantifier tuple");
    for (const auto& v : binders)
      if (v.sort < 0) throw SortError("unsorted quantified variable " + v.name);
    auto n = std::make_shared<detail::FormulaNode>();
    n->kind = k;
    n->vars = std::move(binders);
    n->lhs = body.node_;
    return Formula(n);
  }

  using NodePtr = std::shared_ptr<const detail::FormulaNode>;

  static void collect_free(const NodePtr& n, std::set<std::string>& bound,
                           std::vector<Var>& out) {
    switch (n->kind) {
      case FormulaKind::Atom:
      case FormulaKind::Eq:
        for (const auto& v : n->vars) {
          if (bound.count(v.name)) continue;
          bool seen = false;
          for (const auto& w : out)
            if (w.name == v.name) { seen = true; break; }
          if (!seen) out.push_back(v);
        }
        break;
      case FormulaKind::Not:
        collect_free(n->lhs, bound, out);
        break;
      case FormulaKind::And:
      case FormulaKind::Or:
        collect_free(n->lhs, bound, out);
        collect_free(n->rhs, bound, out);
        break;
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::vector<std::string> added;
        for (const auto& v : n->vars)
          if (bound.insert(v.name).second) added.push_back(v.name);
        collect_free(n->lhs, bound, out);
        for (const auto& s : added) bound.erase(s);
        break;
      }
    }
  }

  static NodePtr rename_bound(const NodePtr& n, std::set<std::string>& used,
                              std::map<std::string, std::string>& ren) {
    auto m = std::make_shared<detail::FormulaNode>(*n);
    switch (n->kind) {
      case FormulaKind::Atom:
      case FormulaKind::Eq:
        for (auto& v : m->vars) {
          auto it = ren.find(v.name);
          if (it != ren.end()) v.name = it->second;
        }
        return m;
      case FormulaKind::Not:
        m->lhs = rename_bound(n->lhs, used, ren);
        return m;
      case FormulaKind::And:
      case FormulaKind::Or:
        m->lhs = rename_bound(n->lhs, used, ren);
        m->rhs = rename_bound(n->rhs, used, ren);
        return m;
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::map<std::string, std::string> saved;
        for (auto& v : m->vars) {
          std::string fresh = v.name;
          if (used.count(fresh)) {
            int c = 1;
            do {
              fresh = v.name + "_" + std::to_string(c++);
            } while (used.count(fresh));
          }
          used.insert(fresh);
          auto it = ren.find(v.name);
          saved[v.name] = (it != ren.end()) ? it->second : std::string();
          ren[v.name] = fresh;
          v.name = fresh;
        }
        m->lhs = rename_bound(n->lhs, used, ren);
        for (auto& [orig, prev] : saved) {
          if (prev.empty()) ren.erase(orig);
          else ren[orig] = prev;
        }
        return m;
      }
    }
    return m;
  }

  static NodePtr subst(const NodePtr& n, const std::map<std::string, Var>& ren) {
    auto m = std::make_shared<detail::FormulaNode>(*n);
    switch (n->kind) {
      case FormulaKind::Atom:
      case FormulaKind::Eq:
        for (auto& v : m->vars) {
          auto it = ren.find(v.name);
          if (it != ren.end()) {
            if (it->second.sort != v.sort)
              throw SortError("substitution changes sort of " + v.name);
            v = it->second;
          }
        }
        return m;
      case FormulaKind::Not:
        m->lhs = subst(n->lhs, ren);
        return m;
      case FormulaKind::And:
      case FormulaKind::Or:
        m->lhs = subst(n->lhs, ren);
        m->rhs = subst(n->rhs, ren);
        return m;
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::map<std::string, Var> inner = ren;
        for (const auto& v : m->vars) inner.erase(v.name);
        m->lhs = subst(n->lhs, inner);
        return m;
      }
    }
    return m;
  }

  static bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->rel != b->rel) return false;
    if (a->vars.size() != b->vars.size()) return false;
    for (size_t i = 0; i < a->vars.size(); ++i)
      if (a->vars[i] != b->vars[i]) return false;
    if ((a->lhs == nullptr) != (b->lhs == nullptr)) return false;
    if (a->lhs && !structurally_equal(a->lhs, b->lhs)) return false;
    if ((a->rhs == nullptr) != (b->rhs == nullptr)) return false;
    if (a->rhs && !structurally_equal(a->rhs, b->rhs)) return false;
    return true;
  }

  NodePtr node_;
};

/// Quantifier rank; a quantifier over an m-variable tuple adds m.
inline std::uint64_t quantifier_rank(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Eq:
      return 0;
    case FormulaKind::Not:
      return quantifier_rank(f.child());
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(quantifier_rank(f.left()), quantifier_rank(f.right()));
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return f.vars().size() + quantifier_rank(f.child());
  }
  return 0;
}

/// Least n such that f is syntactically certified a Boolean combination of
/// Sigma_n formulas. A syntactic upper bound; no prenexing is performed.
inline std::uint64_t bc_sigma_level(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Eq:
      return 0;
    case FormulaKind::Not:
      return bc_sigma_level(f.child());
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(bc_sigma_level(f.left()), bc_sigma_level(f.right()));
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return bc_sigma_level(f.child()) + 1;
  }
  return 0;
}

namespace detail {
// precedence levels: or=1, and=2, not=3, primary=4
inline void print_rec(const Formula& f, const Signature& sig, int parent_prec,
                      std::ostringstream& os) {
  auto wrap = [&](int prec, auto&& body) {
    bool paren = prec < parent_prec;
    if (paren) os << '(';
    body();
    if (paren) os << ')';
  };
  switch (f.kind()) {
    case FormulaKind::Atom:
      os << sig.relation(f.relation()).name << '(';
      for (size_t i = 0; i < f.vars().size(); ++i) {
        if (i) os << ',';
        os << f.vars()[i].name;
      }
      os << ')';
      break;
    case FormulaKind::Eq:
      wrap(1, [&] { os << f.vars()[0].name << " = " << f.vars()[1].name; });
      break;
    case FormulaKind::Not:
      os << '!';
      print_rec(f.child(), sig, 4, os);
      break;
    case FormulaKind::And:
      wrap(2, [&] {
        print_rec(f.left(), sig, 2, os);
        os << " & ";
        print_rec(f.right(), sig, 3, os);
      });
      break;
    case FormulaKind::Or:
      wrap(1, [&] {
        print_rec(f.left(), sig, 1, os);
        os << " | ";
        print_rec(f.right(), sig, 2, os);
      });
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      wrap(1, [&] {
        os << (f.kind() == FormulaKind::Exists ? 'E' : 'A') << ' ';
        for (size_t i = 0; i < f.vars().size(); ++i) {
          if (i) os << ',';
          os << f.vars()[i].name;
        }
        os << " : ";
        for (size_t i = 0; i < f.vars().size(); ++i) {
          if (i) os << ',';
          os << sig.sort_name(f.vars()[i].sort);
        }
        os << " . ";
        print_rec(f.child(), sig, 0, os);
      });
      break;
  }
}
}  // namespace detail

inline std::string print_formula(const Formula& f, const Signature& sig) {
  std::ostringstream os;
  detail::print_rec(f, sig, 0, os);
  return os.str();
}

/// A formula with a designated split of its free variables into a left part
/// x-bar and a right part y-bar.
class PartitionedFormula {
public:
  PartitionedFormula() = default;
  PartitionedFormula(Formula f, std::vector<Var> left, std::vector<Var> right)
      : formula_(f.normalized()), left_(std::move(left)), right_(std::move(right)) {
    auto fv = formula_.free_vars();
    if (fv.size() != left_.size() + right_.size())
      throw SortError("partition does not cover the free variables");
    for (const auto& v : fv) {
      bool in_l = contains(left_, v.name), in_r = contains(right_, v.name);
      if (in_l == in_r)
        throw SortError("variable " + v.name + " must appear in exactly one part");
    }
    for (auto* part : {&left_, &right_})
      for (auto& v : *part)
        for (const auto& w : fv)
          if (w.name == v.name) v.sort = w.sort;
  }

  const Formula& formula() const { return formula_; }
  const std::vector<Var>& left() const { return left_; }
  const std::vector<Var>& right() const { return right_; }

  TupleType left_type() const { return type_of(left_); }
  TupleType right_type() const { return type_of(right_); }

  bool operator==(const PartitionedFormula& o) const {
    return formula_ == o.formula_ && left_ == o.left_ && right_ == o.right_;
  }

private:
  static bool contains(const std::vector<Var>& vs, const std::string& name) {
    for (const auto& v : vs)
      if (v.name == name) return true;
    return false;
  }
  static TupleType type_of(const std::vector<Var>& vs) {
    TupleType t;
    t.reserve(vs.size());
    for (const auto& v : vs) t.push_back(v.sort);
    return t;
  }

  Formula formula_;
  std::vector<Var> left_, right_;
};

/// Same formula, new left part; remaining free variables become the right
/// part in their original order.
inline PartitionedFormula repartition(const PartitionedFormula& pf,
                                      const std::vector<std::string>& new_left) {
  auto fv = pf.formula().free_vars();
  std::vector<Var> left, right;
  for (const auto& name : new_left) {
    bool found = false;
    for (const auto& v : fv)
      if (v.name == name) {
        left.push_back(v);
        found = true;
        break;
      }
    if (!found) throw SortError("repartition: unknown variable " + name);
  }
  for (const auto& v : fv) {
    bool in_left = false;
    for (const auto& l : left)
      if (l.name == v.name) { in_left = true; break; }
    if (!in_left) right.push_back(v);
  }
  return PartitionedFormula(pf.formula(), std::move(left), std::move(right));
}

/// Canonical textual form: `[x:S,y:S ; z:S] formula`. The bracket header pins
/// the partition and the sorts of the free variables; `print_partitioned` and
/// `parse_formula` round-trip through it.
inline std::string print_partitioned(const PartitionedFormula& pf, const Signature& sig) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < pf.left().size(); ++i) {
    if (i) os << ',';
    os << pf.left()[i].name << ':' << sig.sort_name(pf.left()[i].sort);
  }
  os << " ; ";
  for (size_t i = 0; i < pf.right().size(); ++i) {
    if (i) os << ',';
    os << pf.right()[i].name << ':' << sig.sort_name(pf.right()[i].sort);
  }
  os << "] " << print_formula(pf.formula(), sig);
  return os.str();
}

}  // namespace closurelab

#endif
