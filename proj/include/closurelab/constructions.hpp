#ifndef CLOSURELAB_CONSTRUCTIONS_HPP
#define CLOSURELAB_CONSTRUCTIONS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "closurelab/closure.hpp"
#include "closurelab/formula.hpp"
#include "closurelab/structure.hpp"

namespace closurelab {

// ---------------------------------------------------------------------------
// Enumeration sources
// ---------------------------------------------------------------------------

/// A finite injective list of pairs (e, n) — "machine e converges on input n"
/// — plus a set of columns declared analytically infinite. The listed pairs
/// of an infinite column are its observed prefix; such a column is never
/// certified finished.
struct EnumerationSource {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::set<std::uint64_t> infinite_columns;

  void validate() const {
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (const auto& p : pairs)
      if (!seen.insert(p).second)
        throw std::invalid_argument("enumeration source repeats pair (" +
                                    std::to_string(p.first) + "," +
                                    std::to_string(p.second) + ")");
  }

  /// Entries of column e, in listed order.
  std::vector<std::uint64_t> column(std::uint64_t e) const {
    std::vector<std::uint64_t> out;
    for (const auto& p : pairs)
      if (p.first == e) out.push_back(p.second);
    return out;
  }

  std::uint64_t column_size(std::uint64_t e) const { return column(e).size(); }
  bool column_infinite(std::uint64_t e) const { return infinite_columns.count(e) > 0; }

  std::uint64_t max_column_index() const {
    std::uint64_t m = 0;
    for (const auto& p : pairs) m = std::max(m, p.first + 1);
    for (auto e : infinite_columns) m = std::max(m, e + 1);
    return m;
  }

  /// Parses "3:0,1,2;5:0" — semicolon-separated columns, each `e:n,n,...`.
  /// An empty string is the empty source.
  static EnumerationSource parse(const std::string& text) {
    EnumerationSource src;
    std::istringstream in(text);
    std::string col;
    while (std::getline(in, col, ';')) {
      if (col.empty()) continue;
      auto colon = col.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("source column must be e:n,...: " + col);
      std::uint64_t e = std::stoull(col.substr(0, colon));
      std::istringstream ns(col.substr(colon + 1));
      std::string n;
      while (std::getline(ns, n, ','))
        if (!n.empty()) src.pairs.emplace_back(e, std::stoull(n));
    }
    src.validate();
    return src;
  }
};

/// A small two-symbol Turing machine table; `next == -1` halts after the
/// step executes.
struct MachineSpec {
  struct Step {
    int write = 0;
    int move = 0;  // -1, 0, +1
    int next = -1;
  };
  std::vector<std::array<Step, 2>> delta;
};

/// Steps taken until halting on input n (tape seeded with n+1 ones), or
/// nullopt if still running after max_steps.
inline std::optional<std::uint64_t> machine_halting_time(const MachineSpec& m,
                                                         std::uint64_t input,
                                                         std::uint64_t max_steps) {
  if (m.delta.empty()) return std::nullopt;
  std::map<long long, int> tape;
  for (std::uint64_t i = 0; i <= input; ++i) tape[static_cast<long long>(i)] = 1;
  long long pos = 0;
  int state = 0;
  for (std::uint64_t step = 1; step <= max_steps; ++step) {
    int sym = tape.count(pos) ? tape[pos] : 0;
    const auto& tr = m.delta[state][sym];
    tape[pos] = tr.write;
    pos += tr.move;
    if (tr.next < 0) return step;
    if (tr.next >= static_cast<int>(m.delta.size())) return std::nullopt;
    state = tr.next;
  }
  return std::nullopt;
}

/// Dovetailed step-bounded halting enumeration: pairs appear ordered by
/// halting time, then machine index, then input. The result is an ordinary
/// seeded source; nothing downstream consults the machines again.
inline EnumerationSource enumerate_halting(const std::vector<MachineSpec>& machines,
                                           std::uint64_t max_input,
                                           std::uint64_t max_steps) {
  std::vector<std::vector<std::optional<std::uint64_t>>> time(machines.size());
  for (size_t e = 0; e < machines.size(); ++e)
    for (std::uint64_t n = 0; n <= max_input; ++n)
      time[e].push_back(machine_halting_time(machines[e], n, max_steps));
  EnumerationSource src;
  for (std::uint64_t t = 1; t <= max_steps; ++t)
    for (size_t e = 0; e < machines.size(); ++e)
      for (std::uint64_t n = 0; n <= max_input; ++n)
        if (time[e][n] && *time[e][n] == t) src.pairs.emplace_back(e, n);
  src.validate();
  return src;
}

// ---------------------------------------------------------------------------
// Shared numeric conventions
// ---------------------------------------------------------------------------

/// Cantor pairing; fixed here so element layouts are stable across runs.
inline std::uint64_t cantor_pair(std::uint64_t x, std::uint64_t y) {
  return (x + y) * (x + y + 1) / 2 + y;
}

inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t z) {
  std::uint64_t w = 0;
  while ((w + 1) * (w + 2) / 2 <= z) ++w;
  std::uint64_t y = z - w * (w + 1) / 2;
  return {w - y, y};
}

inline std::uint64_t nth_prime(std::uint64_t n) {
  std::uint64_t count = 0;
  for (std::uint64_t p = 2;; ++p) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= p; ++d)
      if (p % d == 0) { prime = false; break; }
    if (prime && count++ == n) return p;
  }
}

/// Writes m = p^j for a prime p, if possible.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> prime_power_split(
    std::uint64_t m) {
  if (m < 2) return std::nullopt;
  std::uint64_t p = 2;
  while (m % p != 0) {
    ++p;
    if (p * p > m) { p = m; break; }
  }
  std::uint64_t j = 0, rest = m;
  while (rest % p == 0) { rest /= p; ++j; }
  if (rest != 1) return std::nullopt;
  return std::make_pair(p, j);
}

inline std::uint64_t prime_index(std::uint64_t p) {
  for (std::uint64_t n = 0;; ++n)
    if (nth_prime(n) == p) return n;
}

// ---------------------------------------------------------------------------
// Sorted halting structure
// ---------------------------------------------------------------------------

/// Same-sort probe formulas: for each sort X_i, the formula (x = x) & (y = y)
/// with both variables declared of sort X_i, split as (x ; y). Sort assertion
/// is carried by the typing.
inline std::vector<PartitionedFormula> xi_formulas(const Signature& sig) {
  std::vector<PartitionedFormula> out;
  for (int i = 0; i < sig.sort_count(); ++i) {
    Var x{"x", i}, y{"y", i};
    Formula f = Formula::land(Formula::eq(x, x), Formula::eq(y, y));
    out.emplace_back(f, std::vector<Var>{x}, std::vector<Var>{y});
  }
  return out;
}

namespace detail {

/// Shape check for a xi formula: (x = x) & (y = y), one left and one right
/// variable, all of the same sort. Tolerant of variable names.
inline bool is_xi_shape(const PartitionedFormula& pf, int sort) {
  if (pf.left().size() != 1 || pf.right().size() != 1) return false;
  if (pf.left()[0].sort != sort || pf.right()[0].sort != sort) return false;
  const Formula& f = pf.formula();
  if (f.kind() != FormulaKind::And) return false;
  for (const Formula& side : {f.left(), f.right()}) {
    if (side.kind() != FormulaKind::Eq) return false;
    if (side.vars()[0] != side.vars()[1]) return false;
  }
  return f.left().vars()[0].name == pf.left()[0].name &&
         f.right().vars()[0].name == pf.right()[0].name;
}

}  // namespace detail

/// One sort X_e per column, with singleton predicates C_e (ordinal 0) and
/// D_e (ordinal 1); the remaining ordinals 2, 3, ... stand for the column's
/// entries, so |X_e| = column size + 2. Infinite columns give unbounded
/// sorts. The attached oracle answers xi-shaped count queries exactly.
inline StructureSpec build_sorted_halting(const EnumerationSource& src,
                                          std::uint64_t min_sorts = 1) {
  src.validate();
  std::uint64_t count = std::max<std::uint64_t>(src.max_column_index(),
                                                std::max<std::uint64_t>(min_sorts, 1));
  StructureSpec out;
  for (std::uint64_t e = 0; e < count; ++e)
    out.sig.add_sort("X" + std::to_string(e));
  for (std::uint64_t e = 0; e < count; ++e)
    out.sig.add_relation("C" + std::to_string(e), {static_cast<int>(e)});
  for (std::uint64_t e = 0; e < count; ++e)
    out.sig.add_relation("D" + std::to_string(e), {static_cast<int>(e)});

  RuleBasedBody rb;
  for (std::uint64_t e = 0; e < count; ++e) {
    if (src.column_infinite(e)) {
      rb.sort_member.push_back([](std::uint64_t) { return true; });
      rb.sort_bound.push_back(std::nullopt);
    } else {
      std::uint64_t n = src.column_size(e) + 2;
      rb.sort_member.push_back([n](std::uint64_t i) { return i < n; });
      rb.sort_bound.push_back(n);
    }
  }
  for (int which = 0; which < 2; ++which) {
    for (std::uint64_t e = 0; e < count; ++e) {
      std::uint64_t target = which;  // C at ordinal 0, D at ordinal 1
      rb.rel_decide.push_back([target](const std::vector<Elem>& args) {
        return args[0].ord == target;
      });
      int sort = static_cast<int>(e);
      rb.rel_support.push_back(
          [target, sort](const RuleBasedBody::Partial& p)
              -> std::optional<std::vector<std::vector<Elem>>> {
            std::vector<std::vector<Elem>> out;
            if (p[0]) {
              if (p[0]->ord == target) out.push_back({*p[0]});
            } else {
              out.push_back({Elem{sort, target}});
            }
            return out;
          });
    }
  }
  out.body = std::move(rb);
  EnumerationSource copy = src;
  out.analytic = [copy](const PartitionedFormula& pf, const std::vector<Elem>& a)
      -> std::optional<OracleAnswer> {
    if (a.size() != 1) return std::nullopt;
    int sort = a[0].sort;
    if (!detail::is_xi_shape(pf, sort)) return std::nullopt;
    OracleAnswer ans;
    if (copy.column_infinite(sort)) {
      ans.infinite = true;
    } else {
      ans.count = copy.column_size(sort) + 2;
    }
    return ans;
  };
  return out;
}

/// Oracle-side |X_e|: nullopt when the column is infinite.
inline std::optional<std::uint64_t> sorted_halting_size(const EnumerationSource& src,
                                                        std::uint64_t e) {
  if (src.column_infinite(e)) return std::nullopt;
  return src.column_size(e) + 2;
}

// ---------------------------------------------------------------------------
// Chain graph (stagewise prime-power chains)
// ---------------------------------------------------------------------------

/// One prime-power chain built from the F pool. Vertices are stored as
/// segments of consecutive pool indices (materializing them would be
/// infeasible for large orders); path order is segment order.
struct ChainRecord {
  std::uint64_t prime = 0;
  std::uint64_t exponent = 0;
  std::vector<std::uint64_t> exponent_history;  // after creation and each extension
  std::vector<std::pair<std::uint64_t, std::uint64_t>> segments;  // (first pool index, length)

  std::uint64_t order() const {
    std::uint64_t n = 0;
    for (const auto& s : segments) n += s.second;
    return n;
  }

  /// Path position of pool index t, if it belongs to this chain.
  std::optional<std::uint64_t> position(std::uint64_t t) const {
    std::uint64_t off = 0;
    for (const auto& s : segments) {
      if (t >= s.first && t < s.first + s.second) return off + (t - s.first);
      off += s.second;
    }
    return std::nullopt;
  }
};

struct ChainInventory {
  std::vector<ChainRecord> chains;  // index n: the chain of order a power of p_n
  std::uint64_t pool_consumed = 0;  // F pool prefix length in use

  /// Columns whose one-sided (resp. two-sided) infinite chain has a vertex
  /// below the ordinal horizon.
  std::pair<std::uint64_t, std::uint64_t> infinite_chain_counts(std::uint64_t horizon) const;

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& c : chains)
      os << "prime=" << c.prime << " order=" << c.order()
         << " parity=" << c.exponent % 2 << "\n";
    return os.str();
  }
};

namespace chainlayout {

// Pool element t sits at ordinal 2t; the one-sided chain i has vertex j at
// ordinal 4*pair(i,j)+1; the two-sided chain i has zigzag position j at
// ordinal 4*pair(i,j)+3 (position j stands for integer 0,1,-1,2,-2,...).

inline std::uint64_t pool_ord(std::uint64_t t) { return 2 * t; }
inline std::uint64_t nchain_ord(std::uint64_t i, std::uint64_t j) {
  return 4 * cantor_pair(i, j) + 1;
}
inline std::uint64_t zchain_ord(std::uint64_t i, std::uint64_t j) {
  return 4 * cantor_pair(i, j) + 3;
}

inline long long zigzag(std::uint64_t j) {
  if (j == 0) return 0;
  if (j % 2 == 1) return static_cast<long long>((j + 1) / 2);
  return -static_cast<long long>(j / 2);
}

struct Decoded {
  enum Kind { Pool, NChain, ZChain } kind;
  std::uint64_t index = 0;  // pool index, or chain index i
  std::uint64_t pos = 0;    // j within the chain
};

inline Decoded decode(std::uint64_t ord) {
  if (ord % 2 == 0) return {Decoded::Pool, ord / 2, 0};
  auto [i, j] = cantor_unpair(ord / 4);
  return {ord % 4 == 1 ? Decoded::NChain : Decoded::ZChain, i, j};
}

}  // namespace chainlayout

struct ChainGraph {
  StructureSpec structure;  // sort V, symmetric relation E
  ChainInventory inventory;
};

inline std::pair<std::uint64_t, std::uint64_t> ChainInventory::infinite_chain_counts(
    std::uint64_t horizon) const {
  std::uint64_t n = 0, z = 0;
  for (std::uint64_t i = 0; chainlayout::nchain_ord(i, 0) < horizon; ++i) ++n;
  for (std::uint64_t i = 0; chainlayout::zchain_ord(i, 0) < horizon; ++i) ++z;
  return {n, z};
}

/// Runs the stage construction: at each odd stage 2s+1 a fresh finite chain
/// of order p_s^(2+f(s,s)) is assembled from the least unused pool elements;
/// at each even stage 2s+2, every column n <= s whose f-value flips between
/// s and s+1 has its chain extended to the next exponent (which then carries
/// the new value's parity). The background one- and two-sided infinite
/// chains exist from the start, rule-based.
inline ChainGraph build_chain_graph(
    const std::function<int(std::uint64_t, std::uint64_t)>& f, std::uint64_t stages) {
  auto f01 = [&f](std::uint64_t n, std::uint64_t s) {
    int v = f(n, s);
    if (v != 0 && v != 1)
      throw std::invalid_argument("limit function must return 0 or 1, got " +
                                  std::to_string(v) + " at (" + std::to_string(n) +
                                  "," + std::to_string(s) + ")");
    return static_cast<std::uint64_t>(v);
  };

  auto inv = std::make_shared<ChainInventory>();
  std::uint64_t& next_free = inv->pool_consumed;
  auto take = [&next_free](std::uint64_t count) {
    std::pair<std::uint64_t, std::uint64_t> seg{next_free, count};
    next_free += count;
    return seg;
  };
  auto ipow = [](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
  };

  for (std::uint64_t stage = 1; stage <= stages; ++stage) {
    if (stage % 2 == 1) {
      std::uint64_t s = (stage - 1) / 2;
      ChainRecord c;
      c.prime = nth_prime(s);
      c.exponent = 2 + f01(s, s);
      c.exponent_history.push_back(c.exponent);
      c.segments.push_back(take(ipow(c.prime, c.exponent)));
      inv->chains.push_back(std::move(c));
    } else {
      std::uint64_t s = (stage - 2) / 2;
      for (std::uint64_t n = 0; n <= s; ++n) {
        if (f01(n, s) == f01(n, s + 1)) continue;
        ChainRecord& c = inv->chains[n];
        std::uint64_t grown = ipow(c.prime, c.exponent + 1);
        c.segments.push_back(take(grown - c.order()));
        c.exponent += 1;
        c.exponent_history.push_back(c.exponent);
      }
    }
  }

  ChainGraph out;
  out.structure.sig.add_sort("V");
  out.structure.sig.add_relation("E", {0, 0});

  std::uint64_t consumed = inv->pool_consumed;
  RuleBasedBody rb;
  rb.sort_member.push_back([consumed](std::uint64_t ord) {
    // unused pool elements have no edges yet and stay outside the structure
    if (ord % 2 == 0) return ord / 2 < consumed;
    return true;
  });
  rb.sort_bound.push_back(std::nullopt);

  using chainlayout::Decoded;
  // full neighbor list of a member vertex (always 1 or 2 entries)
  auto neighbors = [inv](std::uint64_t ord) {
    std::vector<std::uint64_t> out;
    Decoded d = chainlayout::decode(ord);
    if (d.kind == Decoded::NChain) {
      if (d.pos > 0) out.push_back(chainlayout::nchain_ord(d.index, d.pos - 1));
      out.push_back(chainlayout::nchain_ord(d.index, d.pos + 1));
    } else if (d.kind == Decoded::ZChain) {
      long long z = chainlayout::zigzag(d.pos);
      for (long long nz : {z - 1, z + 1})
        for (std::uint64_t j = 0;; ++j)
          if (chainlayout::zigzag(j) == nz) {
            out.push_back(chainlayout::zchain_ord(d.index, j));
            break;
          }
    } else {
      for (const auto& c : inv->chains) {
        auto pos = c.position(d.index);
        if (!pos) continue;
        std::uint64_t order = c.order();
        auto at = [&c](std::uint64_t p) {
          std::uint64_t off = 0;
          for (const auto& s : c.segments) {
            if (p < off + s.second) return chainlayout::pool_ord(s.first + (p - off));
            off += s.second;
          }
          throw std::logic_error("chain position out of range");
        };
        if (*pos > 0) out.push_back(at(*pos - 1));
        if (*pos + 1 < order) out.push_back(at(*pos + 1));
        break;
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  rb.rel_decide.push_back([neighbors](const std::vector<Elem>& args) {
    auto ns = neighbors(args[0].ord);
    return std::find(ns.begin(), ns.end(), args[1].ord) != ns.end();
  });
  rb.rel_support.push_back(
      [neighbors](const RuleBasedBody::Partial& p)
          -> std::optional<std::vector<std::vector<Elem>>> {
        std::vector<std::vector<Elem>> out;
        if (p[0]) {
          for (auto n : neighbors(p[0]->ord)) {
            Elem other{0, n};
            if (!p[1] || *p[1] == other) out.push_back({*p[0], other});
          }
          return out;
        }
        if (p[1]) {
          for (auto n : neighbors(p[1]->ord)) out.push_back({Elem{0, n}, *p[1]});
          return out;
        }
        return std::nullopt;
      });
  out.structure.body = std::move(rb);
  out.inventory = *inv;
  return out;
}

/// Reads exponent parities back from the graph alone: a connected component
/// all of whose vertices lie (with their full neighborhoods) below the
/// horizon is a finished finite chain; its order must be a prime power p^j
/// and the parity of j is reported for that prime's column. Chains cut off
/// by the horizon are simply absent, never misreported.
inline std::map<std::uint64_t, std::uint64_t> decode_parities(const StructureSpec& s,
                                                              std::uint64_t horizon) {
  if (s.finite() || s.sig.find_relation("E") < 0 || s.sig.sort_count() != 1)
    throw std::invalid_argument("decode_parities: expected a rule-based chain graph");
  const auto& rb = s.rules();
  const auto& support = rb.rel_support[s.sig.find_relation("E")];

  auto full_neighbors = [&support](std::uint64_t ord) {
    auto rows = support({Elem{0, ord}, std::nullopt});
    if (!rows) throw std::invalid_argument("decode_parities: E needs a support bound");
    std::vector<std::uint64_t> out;
    for (const auto& row : *rows) out.push_back(row[1].ord);
    return out;
  };

  std::map<std::uint64_t, std::uint64_t> parities;
  std::set<std::uint64_t> visited;
  for (std::uint64_t ord = 0; ord < horizon; ++ord) {
    if (!rb.sort_member[0](ord) || visited.count(ord)) continue;
    // explore the component; abandon it if it leaks past the horizon
    std::vector<std::uint64_t> comp{ord}, queue{ord};
    std::set<std::uint64_t> seen{ord};
    bool closed = true;
    std::uint64_t degree_one = 0;
    while (!queue.empty() && closed) {
      std::uint64_t v = queue.back();
      queue.pop_back();
      auto ns = full_neighbors(v);
      if (ns.size() == 1) ++degree_one;
      for (auto n : ns) {
        if (n >= horizon) { closed = false; break; }
        if (seen.insert(n).second) {
          comp.push_back(n);
          queue.push_back(n);
        }
      }
    }
    for (auto v : comp) visited.insert(v);
    if (!closed) continue;
    if (comp.size() < 2 || degree_one != 2) continue;
    auto split = prime_power_split(comp.size());
    if (!split)
      throw std::invalid_argument("decode_parities: finite chain of order " +
                                  std::to_string(comp.size()) +
                                  " is not a prime power");
    parities[prime_index(split->first)] = split->second % 2;
  }
  return parities;
}

// ---------------------------------------------------------------------------
// Path witness structure
// ---------------------------------------------------------------------------

namespace pathlayout {

// Ordinal 0 is the distinguished element; every other ordinal encodes
// (q, tag) as 1 + 5q + tag:
//   tag 0: a_i (i = q)                  endpoint, unary A
//   tag 1: b_i (i = q)                  endpoint, unary B
//   tag 2: interior vertex t of the order-(i+2) chain, q = pair(i,t), t < i; unary H
//   tag 3: r_{i,j}, the j-th element of the infinite family of column i,
//          q = pair(i,j); unary C
//   tag 4: element t of the size-k finite family of column i,
//          q = pair(pair(i,k),t), t < k; unary C

constexpr std::uint64_t star_ord = 0;
inline std::uint64_t a_ord(std::uint64_t i) { return 1 + 5 * i; }
inline std::uint64_t b_ord(std::uint64_t i) { return 2 + 5 * i; }
inline std::uint64_t h_ord(std::uint64_t i, std::uint64_t t) {
  return 3 + 5 * cantor_pair(i, t);
}
inline std::uint64_t r_ord(std::uint64_t i, std::uint64_t j) {
  return 4 + 5 * cantor_pair(i, j);
}
inline std::uint64_t p_ord(std::uint64_t i, std::uint64_t k, std::uint64_t t) {
  return 5 + 5 * cantor_pair(cantor_pair(i, k), t);
}

struct Decoded {
  enum Kind { Star, A, B, H, R, P } kind;
  std::uint64_t i = 0, j = 0, k = 0, t = 0;
};

inline std::optional<Decoded> decode(std::uint64_t ord) {
  if (ord == star_ord) return Decoded{Decoded::Star};
  std::uint64_t tag = (ord - 1) % 5, q = (ord - 1) / 5;
  switch (tag) {
    case 0: return Decoded{Decoded::A, q};
    case 1: return Decoded{Decoded::B, q};
    case 2: {
      auto [i, t] = cantor_unpair(q);
      if (t >= i) return std::nullopt;
      return Decoded{Decoded::H, i, 0, 0, t};
    }
    case 3: {
      auto [i, j] = cantor_unpair(q);
      return Decoded{Decoded::R, i, j};
    }
    default: {
      auto [ik, t] = cantor_unpair(q);
      auto [i, k] = cantor_unpair(ik);
      if (t >= k) return std::nullopt;
      return Decoded{Decoded::P, i, 0, k, t};
    }
  }
}

inline bool member(std::uint64_t ord) { return decode(ord).has_value(); }

/// Vertex at position p of the order-(i+2) E-chain: a_i, interiors, b_i.
inline std::uint64_t chain_vertex(std::uint64_t i, std::uint64_t p) {
  if (p == 0) return a_ord(i);
  if (p == i + 1) return b_ord(i);
  return h_ord(i, p - 1);
}

/// Vertex at position p of the order-(k+2) finite path of (i, k):
/// a_i, the finite family, b_i.
inline std::uint64_t path_vertex(std::uint64_t i, std::uint64_t k, std::uint64_t p) {
  if (p == 0) return a_ord(i);
  if (p == k + 1) return b_ord(i);
  return p_ord(i, k, p - 1);
}

}  // namespace pathlayout

/// Whether the size-k finite family of column e has its witness spoiled
/// (a second solution through the distinguished element).
inline bool path_spoiled(const EnumerationSource& src, std::uint64_t e, std::uint64_t k) {
  if (src.column_infinite(e)) return true;
  for (const auto& p : src.pairs)
    if (p.first == e && k <= p.second) return true;
  return false;
}

/// Oracle-side answer to "is b_e reachable in one-solution closure from
/// {a_e}?" — yes iff the column is finite, witnessed by the least unspoiled k.
inline bool path_witness_member(const EnumerationSource& src, std::uint64_t e) {
  return !src.column_infinite(e);
}

inline std::optional<std::uint64_t> path_least_unspoiled(const EnumerationSource& src,
                                                         std::uint64_t e) {
  if (src.column_infinite(e)) return std::nullopt;
  std::uint64_t k = 0;
  for (const auto& p : src.pairs)
    if (p.first == e) k = std::max(k, p.second + 1);
  return k;
}

/// The single-sorted structure over universe Y: unary A, B, C, D, H, the
/// chain graph E, and the ternary F whose r-indexed slices are the infinite
/// path of each column (slice a_e), the finite candidate paths (slices
/// r_{e,k}), and the spoiling triples F(r_{e,k}, a_e, star).
inline StructureSpec build_path_witness(const EnumerationSource& src) {
  src.validate();
  StructureSpec out;
  out.sig.add_sort("Y");
  for (const char* name : {"A", "B", "C", "D", "H"})
    out.sig.add_relation(name, {0});
  out.sig.add_relation("E", {0, 0});
  out.sig.add_relation("F", {0, 0, 0});

  using pathlayout::Decoded;
  RuleBasedBody rb;
  rb.sort_member.push_back(pathlayout::member);
  rb.sort_bound.push_back(std::nullopt);

  auto unary_kind = [](int rel) {
    switch (rel) {
      case 0: return std::vector<Decoded::Kind>{Decoded::A};
      case 1: return std::vector<Decoded::Kind>{Decoded::B};
      case 2: return std::vector<Decoded::Kind>{Decoded::R, Decoded::P};
      case 3: return std::vector<Decoded::Kind>{Decoded::Star};
      default: return std::vector<Decoded::Kind>{Decoded::H};
    }
  };
  for (int rel = 0; rel < 5; ++rel) {
    auto kinds = unary_kind(rel);
    rb.rel_decide.push_back([kinds](const std::vector<Elem>& args) {
      auto d = pathlayout::decode(args[0].ord);
      return d && std::find(kinds.begin(), kinds.end(), d->kind) != kinds.end();
    });
    rb.rel_support.push_back(
        [kinds](const RuleBasedBody::Partial& p)
            -> std::optional<std::vector<std::vector<Elem>>> {
          if (!p[0]) return std::nullopt;  // each class is infinite
          std::vector<std::vector<Elem>> out;
          auto d = pathlayout::decode(p[0]->ord);
          if (d && std::find(kinds.begin(), kinds.end(), d->kind) != kinds.end())
            out.push_back({*p[0]});
          return out;
        });
  }

  // E: the disjoint chains of order i+2
  auto e_chain_pos = [](std::uint64_t ord)
      -> std::optional<std::pair<std::uint64_t, std::uint64_t>> {  // (i, position)
    auto d = pathlayout::decode(ord);
    if (!d) return std::nullopt;
    switch (d->kind) {
      case Decoded::A: return std::make_pair(d->i, std::uint64_t{0});
      case Decoded::B: return std::make_pair(d->i, d->i + 1);
      case Decoded::H: return std::make_pair(d->i, d->t + 1);
      default: return std::nullopt;
    }
  };
  auto e_neighbors = [e_chain_pos](std::uint64_t ord) {
    std::vector<std::uint64_t> out;
    auto cp = e_chain_pos(ord);
    if (!cp) return out;
    auto [i, p] = *cp;
    if (p > 0) out.push_back(pathlayout::chain_vertex(i, p - 1));
    if (p < i + 1) out.push_back(pathlayout::chain_vertex(i, p + 1));
    return out;
  };
  rb.rel_decide.push_back([e_neighbors](const std::vector<Elem>& args) {
    auto ns = e_neighbors(args[0].ord);
    return std::find(ns.begin(), ns.end(), args[1].ord) != ns.end();
  });
  rb.rel_support.push_back(
      [e_neighbors](const RuleBasedBody::Partial& p)
          -> std::optional<std::vector<std::vector<Elem>>> {
        std::vector<std::vector<Elem>> out;
        if (p[0]) {
          for (auto n : e_neighbors(p[0]->ord)) {
            Elem other{0, n};
            if (!p[1] || *p[1] == other) out.push_back({*p[0], other});
          }
          return out;
        }
        if (p[1]) {
          for (auto n : e_neighbors(p[1]->ord)) out.push_back({Elem{0, n}, *p[1]});
          return out;
        }
        return std::nullopt;
      });

  // F: successor pairs of each indexed slice
  EnumerationSource copy = src;
  auto f_successors = [copy](std::uint64_t r, std::uint64_t s)
      -> std::optional<std::vector<std::uint64_t>> {  // nullopt: unbounded slice row
    auto dr = pathlayout::decode(r);
    auto ds = pathlayout::decode(s);
    std::vector<std::uint64_t> out;
    if (!dr || !ds) return out;
    if (dr->kind == Decoded::A) {
      // infinite path a_i -> r_{i,0} -> r_{i,1} -> ...
      if (ds->kind == Decoded::A && ds->i == dr->i)
        out.push_back(pathlayout::r_ord(dr->i, 0));
      else if (ds->kind == Decoded::R && ds->i == dr->i)
        out.push_back(pathlayout::r_ord(dr->i, ds->j + 1));
      return out;
    }
    if (dr->kind == Decoded::R) {
      std::uint64_t i = dr->i, k = dr->j;
      std::optional<std::uint64_t> pos;
      if (ds->kind == Decoded::A && ds->i == i) pos = 0;
      if (ds->kind == Decoded::P && ds->i == i && ds->k == k) pos = ds->t + 1;
      if (pos && *pos < k + 1) out.push_back(pathlayout::path_vertex(i, k, *pos + 1));
      if (ds->kind == Decoded::A && ds->i == i && path_spoiled(copy, i, k))
        out.push_back(pathlayout::star_ord);
      return out;
    }
    return out;
  };
  rb.rel_decide.push_back([f_successors](const std::vector<Elem>& args) {
    auto succ = f_successors(args[0].ord, args[1].ord);
    if (!succ) return false;
    return std::find(succ->begin(), succ->end(), args[2].ord) != succ->end();
  });
  rb.rel_support.push_back(
      [f_successors, copy](const RuleBasedBody::Partial& p)
          -> std::optional<std::vector<std::vector<Elem>>> {
        if (!p[0]) return std::nullopt;  // first coordinates form an infinite class
        std::uint64_t r = p[0]->ord;
        std::vector<std::vector<Elem>> out;
        auto emit = [&](std::uint64_t s, std::uint64_t t) {
          if (p[1] && p[1]->ord != s) return;
          if (p[2] && p[2]->ord != t) return;
          out.push_back({Elem{0, r}, Elem{0, s}, Elem{0, t}});
        };
        auto dr = pathlayout::decode(r);
        if (!dr) return out;
        if (dr->kind == Decoded::A && !p[1]) return std::nullopt;  // infinite slice
        if (p[1]) {
          auto succ = f_successors(r, p[1]->ord);
          if (!succ) return std::nullopt;
          for (auto t : *succ) emit(p[1]->ord, t);
          return out;
        }
        // r is a finite slice index: enumerate the whole slice
        if (dr->kind == Decoded::R) {
          std::uint64_t i = dr->i, k = dr->j;
          for (std::uint64_t pos = 0; pos <= k; ++pos)
            emit(pathlayout::path_vertex(i, k, pos),
                 pathlayout::path_vertex(i, k, pos + 1));
          if (path_spoiled(copy, i, k))
            emit(pathlayout::a_ord(i), pathlayout::star_ord);
        }
        return out;
      });

  out.body = std::move(rb);
  return out;
}

/// The one-formula family F(x, y; z) used for closure queries on the path
/// witness and its relatives.
inline PartitionedFormula gamma_family(const Signature& sig) {
  int f = sig.find_relation("F");
  if (f < 0 || sig.relation(f).type.size() != 3)
    throw SortError("gamma_family: signature lacks a ternary F");
  int sort = sig.relation(f).type[0];
  Var x{"x", sort}, y{"y", sort}, z{"z", sort};
  return PartitionedFormula(Formula::atom(sig, f, {x, y, z}), {x, y}, {z});
}

/// Symbolic element names for the path-witness universe: `star`, `a<i>`,
/// `b<i>`, `r<i>_<j>`, `p<i>_<k>_<t>`, `h<i>_<t>`.
inline Elem path_named_elem(const std::string& name) {
  auto nums = [&name](size_t from, size_t want) {
    std::vector<std::uint64_t> out;
    std::istringstream in(name.substr(from));
    std::string part;
    while (std::getline(in, part, '_'))
      if (!part.empty()) out.push_back(std::stoull(part));  // accepts a0 and a_0
    if (out.size() != want)
      throw std::invalid_argument("bad element name: " + name);
    return out;
  };
  if (name == "star") return {0, pathlayout::star_ord};
  if (name.empty()) throw std::invalid_argument("empty element name");
  switch (name[0]) {
    case 'a': return {0, pathlayout::a_ord(nums(1, 1)[0])};
    case 'b': return {0, pathlayout::b_ord(nums(1, 1)[0])};
    case 'r': {
      auto v = nums(1, 2);
      return {0, pathlayout::r_ord(v[0], v[1])};
    }
    case 'h': {
      auto v = nums(1, 2);
      return {0, pathlayout::h_ord(v[0], v[1])};
    }
    case 'p': {
      auto v = nums(1, 3);
      return {0, pathlayout::p_ord(v[0], v[1], v[2])};
    }
    default: throw std::invalid_argument("bad element name: " + name);
  }
}

// ---------------------------------------------------------------------------
// Bipartite pair
// ---------------------------------------------------------------------------

/// Directed edges from endpoint a_e to endpoint b_m, stored as index pairs
/// (so bipartiteness is structural). A column in `infinite_a` is adjacent to
/// b_{pair(e, j)} for every j, by convention, and may not carry listed edges.
struct BipartiteGraph {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;  // (e, m)
  std::set<std::uint64_t> infinite_a;

  void validate() const {
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (const auto& e : edges) {
      if (!seen.insert(e).second)
        throw std::invalid_argument("bipartite graph repeats an edge");
      if (infinite_a.count(e.first))
        throw std::invalid_argument(
            "bipartite graph lists edges for an infinite column");
    }
  }

  bool adjacent(std::uint64_t e, std::uint64_t m) const {
    if (infinite_a.count(e)) return cantor_unpair(m).first == e;
    return std::find(edges.begin(), edges.end(), std::make_pair(e, m)) != edges.end();
  }

  std::optional<std::vector<std::uint64_t>> neighbors(std::uint64_t e) const {
    if (infinite_a.count(e)) return std::nullopt;
    std::vector<std::uint64_t> out;
    for (const auto& edge : edges)
      if (edge.first == e) out.push_back(edge.second);
    return out;
  }
};

/// a_e adjacent to one b per listed column entry (so degree = column size);
/// infinite columns become infinite-degree vertices.
inline BipartiteGraph bipartite_from_source_degrees(const EnumerationSource& src) {
  BipartiteGraph g;
  g.infinite_a = src.infinite_columns;
  std::map<std::uint64_t, std::uint64_t> next_j;
  for (const auto& p : src.pairs) {
    if (g.infinite_a.count(p.first)) continue;
    g.edges.emplace_back(p.first, cantor_pair(p.first, next_j[p.first]++));
  }
  g.validate();
  return g;
}

/// a_e adjacent to a single b exactly when the column contains 0.
inline BipartiteGraph bipartite_singleton(const EnumerationSource& src) {
  BipartiteGraph g;
  std::set<std::uint64_t> done;
  for (const auto& p : src.pairs)
    if (p.second == 0 && done.insert(p.first).second)
      g.edges.emplace_back(p.first, cantor_pair(p.first, 0));
  for (auto e : src.infinite_columns)
    if (done.insert(e).second) g.edges.emplace_back(e, cantor_pair(e, 0));
  g.validate();
  return g;
}

namespace bilayout {

// The three distinguished elements: u2 is the unary-D element (ordinal 0);
// u0 and u1 are the first two elements of the infinite family of column 0.
inline std::uint64_t u_ord(int i) {
  switch (i) {
    case 0: return pathlayout::r_ord(0, 0);
    case 1: return pathlayout::r_ord(0, 1);
    default: return pathlayout::star_ord;
  }
}

inline std::optional<int> u_index(std::uint64_t ord) {
  for (int i = 0; i < 3; ++i)
    if (u_ord(i) == ord) return i;
  return std::nullopt;
}

/// The i-th vertex of the fixed infinite path through the universe minus
/// the three distinguished elements, in ordinal order.
inline std::uint64_t path_vertex(std::uint64_t i) {
  std::uint64_t seen = 0;
  for (std::uint64_t ord = 0;; ++ord) {
    if (!pathlayout::member(ord) || u_index(ord)) continue;
    if (seen++ == i) return ord;
  }
}

inline std::optional<std::uint64_t> path_index(std::uint64_t ord) {
  if (!pathlayout::member(ord) || u_index(ord)) return std::nullopt;
  std::uint64_t idx = 0;
  for (std::uint64_t o = 0; o < ord; ++o)
    if (pathlayout::member(o) && !u_index(o)) ++idx;
  return idx;
}

}  // namespace bilayout

/// psi(x, y; z) := F(x,y,z) & !F(x,z,y).
inline PartitionedFormula psi_formula(const Signature& sig) {
  int f = sig.find_relation("F");
  if (f < 0 || sig.relation(f).type.size() != 3)
    throw SortError("psi_formula: signature lacks a ternary F");
  int sort = sig.relation(f).type[0];
  Var x{"x", sort}, y{"y", sort}, z{"z", sort};
  Formula psi = Formula::land(Formula::atom(sig, f, {x, y, z}),
                              Formula::lnot(Formula::atom(sig, f, {x, z, y})));
  return PartitionedFormula(psi, {x, y}, {z});
}

namespace detail {

inline bool is_psi_shape(const PartitionedFormula& pf) {
  if (pf.left().size() != 2 || pf.right().size() != 1) return false;
  const Formula& f = pf.formula();
  if (f.kind() != FormulaKind::And) return false;
  if (f.left().kind() != FormulaKind::Atom) return false;
  if (f.right().kind() != FormulaKind::Not ||
      f.right().child().kind() != FormulaKind::Atom)
    return false;
  const Formula& pos = f.left();
  const Formula& neg = f.right().child();
  if (pos.relation() != neg.relation() || pos.vars().size() != 3) return false;
  const std::string &x = pf.left()[0].name, &y = pf.left()[1].name,
                    &z = pf.right()[0].name;
  return pos.vars()[0].name == x && pos.vars()[1].name == y &&
         pos.vars()[2].name == z && neg.vars()[0].name == x &&
         neg.vars()[1].name == z && neg.vars()[2].name == y;
}

/// One of the two structures of the pair: the shared reduct plus the
/// three-element cycle slices and the given bipartite edges on slice u2.
inline StructureSpec build_bipartite_one(const BipartiteGraph& g) {
  StructureSpec out;
  out.sig.add_sort("Y");
  for (const char* name : {"A", "B", "C", "D", "H", "U"})
    out.sig.add_relation(name, {0});
  out.sig.add_relation("E", {0, 0});
  out.sig.add_relation("F", {0, 0, 0});

  // reuse the path-witness unary/E tables via its builder
  StructureSpec base = build_path_witness(EnumerationSource{});
  RuleBasedBody rb;
  rb.sort_member = base.rules().sort_member;
  rb.sort_bound = base.rules().sort_bound;
  for (int rel = 0; rel < 5; ++rel) {
    rb.rel_decide.push_back(base.rules().rel_decide[rel]);
    rb.rel_support.push_back(base.rules().rel_support[rel]);
  }
  rb.rel_decide.push_back([](const std::vector<Elem>& args) {
    return bilayout::u_index(args[0].ord).has_value();
  });
  rb.rel_support.push_back(
      [](const RuleBasedBody::Partial& p)
          -> std::optional<std::vector<std::vector<Elem>>> {
        std::vector<std::vector<Elem>> out;
        if (p[0]) {
          if (bilayout::u_index(p[0]->ord)) out.push_back({*p[0]});
        } else {
          for (int i = 0; i < 3; ++i) out.push_back({Elem{0, bilayout::u_ord(i)}});
        }
        return out;
      });
  rb.rel_decide.push_back(base.rules().rel_decide[5]);  // E
  rb.rel_support.push_back(base.rules().rel_support[5]);

  auto graph = std::make_shared<BipartiteGraph>(g);
  // successors of s in slice u_i (nullopt: unbounded)
  auto slice_succ = [graph](int i, std::uint64_t s)
      -> std::optional<std::vector<std::uint64_t>> {
    std::vector<std::uint64_t> out;
    if (s == bilayout::u_ord(i)) {
      out.push_back(bilayout::u_ord((i + 1) % 3));
      return out;
    }
    if (i == 2) {
      auto d = pathlayout::decode(s);
      if (d && d->kind == pathlayout::Decoded::A) {
        auto ns = graph->neighbors(d->i);
        if (!ns) return std::nullopt;
        for (auto m : *ns) out.push_back(pathlayout::b_ord(m));
      }
      return out;
    }
    auto idx = bilayout::path_index(s);
    if (!idx) return out;
    if (i == 0) {
      out.push_back(bilayout::path_vertex(*idx + 1));
    } else if (*idx > 0) {
      out.push_back(bilayout::path_vertex(*idx - 1));
    }
    return out;
  };
  rb.rel_decide.push_back([slice_succ](const std::vector<Elem>& args) {
    auto i = bilayout::u_index(args[0].ord);
    if (!i) return false;
    auto succ = slice_succ(*i, args[1].ord);
    if (!succ) {
      // infinite-degree row: membership is still decidable directly
      auto d = pathlayout::decode(args[1].ord);
      auto db = pathlayout::decode(args[2].ord);
      return d && db && d->kind == pathlayout::Decoded::A &&
             db->kind == pathlayout::Decoded::B &&
             cantor_unpair(db->i).first == d->i;
    }
    return std::find(succ->begin(), succ->end(), args[2].ord) != succ->end();
  });
  rb.rel_support.push_back(
      [slice_succ](const RuleBasedBody::Partial& p)
          -> std::optional<std::vector<std::vector<Elem>>> {
        std::vector<std::vector<Elem>> out;
        std::vector<int> firsts;
        if (p[0]) {
          auto i = bilayout::u_index(p[0]->ord);
          if (!i) return out;
          firsts.push_back(*i);
        } else {
          firsts = {0, 1, 2};
        }
        for (int i : firsts) {
          if (!p[1]) return std::nullopt;  // every slice has infinitely many rows
          auto succ = slice_succ(i, p[1]->ord);
          if (!succ) return std::nullopt;
          for (auto t : *succ) {
            if (p[2] && p[2]->ord != t) continue;
            out.push_back({Elem{0, bilayout::u_ord(i)}, *p[1], Elem{0, t}});
          }
        }
        return out;
      });

  out.body = std::move(rb);
  auto graph_copy = graph;
  out.analytic = [graph_copy](const PartitionedFormula& pf,
                              const std::vector<Elem>& a)
      -> std::optional<OracleAnswer> {
    if (a.size() != 2 || !is_psi_shape(pf)) return std::nullopt;
    auto i = bilayout::u_index(a[0].ord);
    if (!i) return OracleAnswer{false, 0};
    if (a[1].ord == bilayout::u_ord(*i)) return OracleAnswer{false, 1};
    if (*i == 2) {
      auto d = pathlayout::decode(a[1].ord);
      if (d && d->kind == pathlayout::Decoded::A) {
        if (graph_copy->infinite_a.count(d->i)) return OracleAnswer{true, 0};
        auto ns = graph_copy->neighbors(d->i);
        return OracleAnswer{false, static_cast<std::uint64_t>(ns->size())};
      }
      return OracleAnswer{false, 0};
    }
    auto idx = bilayout::path_index(a[1].ord);
    if (!idx) return OracleAnswer{false, 0};
    if (*i == 0) return OracleAnswer{false, 1};
    return OracleAnswer{false, *idx > 0 ? std::uint64_t{1} : std::uint64_t{0}};
  };
  return out;
}

}  // namespace detail

/// Two structures on the same universe agreeing everywhere except on the
/// F-slice of the third distinguished element, where each carries its own
/// bipartite edge set.
inline std::pair<StructureSpec, StructureSpec> build_bipartite_pair(
    const BipartiteGraph& g0, const BipartiteGraph& g1) {
  g0.validate();
  g1.validate();
  return {detail::build_bipartite_one(g0), detail::build_bipartite_one(g1)};
}

/// Symbolic element names for the bipartite universe: `u0`, `u1`, `u2`,
/// plus every path-witness name.
inline Elem bipartite_named_elem(const std::string& name) {
  if (name.size() == 2 && name[0] == 'u' && name[1] >= '0' && name[1] <= '2')
    return {0, bilayout::u_ord(name[1] - '0')};
  return path_named_elem(name);
}

}  // namespace closurelab

#endif
