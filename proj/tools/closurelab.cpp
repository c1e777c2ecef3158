// closurelab: batch CLI over the closure workbench.
//
// Exit codes: 0 decided, 2 undecided at the given budget, 1 error.
// Output is line-oriented `key=value` text and deterministic for fixed
// inputs. Set CLOSURELAB_TRACE=1 for full closure traces.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "closurelab/closure.hpp"
#include "closurelab/constructions.hpp"
#include "closurelab/parser.hpp"
#include "closurelab/reductions.hpp"
#include "closurelab/transforms.hpp"

namespace cl = closurelab;

namespace {

bool trace_enabled() {
  const char* v = std::getenv("CLOSURELAB_TRACE");
  return v && std::string(v) == "1";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

// ---- structure sources ----------------------------------------------------

struct Inputs {
  std::string structure_file;
  std::string construct;  // sorted-halting | chain-graph | path-witness | bipartite
  int variant = 0;        // which of the bipartite pair
  std::string source_text;
  std::string infinite_text;
  std::string limit_fn;   // table:<file>
  std::uint64_t stages = 20;
  std::uint64_t min_sorts = 1;

  std::uint64_t budget = 0;  // 0: untouched defaults
  std::uint64_t horizon = 0, iters = 0, cap = 0;

  cl::StageBudget make_budget() const {
    cl::StageBudget b;
    if (budget) b = {budget, budget, budget};
    if (horizon) b.domain_horizon = horizon;
    if (iters) b.closure_iterations = iters;
    if (cap) b.solution_cap = cap;
    return b;
  }

  cl::EnumerationSource make_source() const {
    auto src = cl::EnumerationSource::parse(source_text);
    for (const auto& e : split(infinite_text, ','))
      src.infinite_columns.insert(std::stoull(e));
    src.validate();
    return src;
  }

  std::function<int(std::uint64_t, std::uint64_t)> make_limit_fn() const {
    if (limit_fn.empty() || limit_fn == "zero")
      return [](std::uint64_t, std::uint64_t) { return 0; };
    if (limit_fn.rfind("table:", 0) != 0)
      throw std::runtime_error("--limit-fn must be `zero` or `table:<file>`");
    // lines `n s v`: f(n, .) jumps to v at stage s; value 0 before any entry
    auto table = std::make_shared<std::map<std::uint64_t, std::map<std::uint64_t, int>>>();
    std::istringstream in(read_file(limit_fn.substr(6)));
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::uint64_t n, s;
      int v;
      std::string first;
      if (!(ls >> first)) continue;
      if (first[0] == '#') continue;
      n = std::stoull(first);
      if (!(ls >> s >> v))
        throw std::runtime_error("limit-fn line must be `n s v`: " + line);
      (*table)[n][s] = v;
    }
    return [table](std::uint64_t n, std::uint64_t s) {
      auto it = table->find(n);
      if (it == table->end()) return 0;
      int value = 0;
      for (const auto& [at, v] : it->second) {
        if (at > s) break;
        value = v;
      }
      return value;
    };
  }

  cl::StructureSpec make_structure() const {
    if (!structure_file.empty()) return cl::parse_structure(read_file(structure_file));
    if (construct == "sorted-halting")
      return cl::build_sorted_halting(make_source(), min_sorts);
    if (construct == "chain-graph")
      return cl::build_chain_graph(make_limit_fn(), stages).structure;
    if (construct == "path-witness") return cl::build_path_witness(make_source());
    if (construct == "bipartite") {
      auto src = make_source();
      auto pair = cl::build_bipartite_pair(cl::bipartite_from_source_degrees(src),
                                           cl::bipartite_singleton(src));
      return variant == 0 ? pair.first : pair.second;
    }
    throw std::runtime_error("need --structure <file> or --construct <name>");
  }

  cl::Elem resolve_elem(const cl::StructureSpec& s, const std::string& text) const {
    try {
      return cl::parse_elem(text, s.sig);
    } catch (const cl::SortError&) {
      if (construct == "path-witness") return cl::path_named_elem(text);
      if (construct == "bipartite") return cl::bipartite_named_elem(text);
      if (construct == "sorted-halting" && text.size() >= 2 &&
          (text[0] == 'C' || text[0] == 'D')) {
        int sort = s.sig.find_sort("X" + text.substr(1));
        if (sort >= 0)
          return cl::Elem{sort, text[0] == 'C' ? std::uint64_t{0} : std::uint64_t{1}};
      }
      throw;
    }
  }

  /// Default formula family for closure-set queries on constructions.
  std::vector<cl::PartitionedFormula> default_family(const cl::StructureSpec& s) const {
    if (construct == "sorted-halting") return cl::xi_formulas(s.sig);
    if (construct == "path-witness") return {cl::gamma_family(s.sig)};
    if (construct == "bipartite") return {cl::psi_formula(s.sig)};
    if (construct == "chain-graph")
      return {cl::parse_formula("E(x;y)", s.sig)};
    throw std::runtime_error("no --formula given and no default family");
  }
};

cl::Assignment parse_assign(const Inputs& in, const cl::StructureSpec& s,
                            const cl::PartitionedFormula& pf, const std::string& text) {
  cl::Assignment out;
  for (const auto& item : split(text, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--assign entries must be v=Sort#k: " + item);
    out[item.substr(0, eq)] = in.resolve_elem(s, item.substr(eq + 1));
  }
  (void)pf;
  return out;
}

std::vector<cl::Elem> left_tuple(const cl::PartitionedFormula& pf,
                                 const cl::Assignment& assign) {
  std::vector<cl::Elem> a;
  for (const auto& v : pf.left()) {
    auto it = assign.find(v.name);
    if (it == assign.end())
      throw std::runtime_error("--assign misses left variable " + v.name);
    a.push_back(it->second);
  }
  return a;
}

std::string elem_list(const std::set<cl::Elem>& elems, const cl::Signature& sig) {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : elems) {
    if (!first) os << ',';
    os << cl::print_elem(e, sig);
    first = false;
  }
  return os.str();
}

const char* verdict_name(cl::MembershipVerdict v) {
  switch (v) {
    case cl::MembershipVerdict::Member: return "Member";
    case cl::MembershipVerdict::NonMember: return "NonMember";
    default: return "Unknown";
  }
}

int finish_membership(cl::MembershipVerdict v) {
  return v == cl::MembershipVerdict::Unknown ? 2 : 0;
}

// Point query against ACL0/DCL0 with a provenance line for the verdict.
int run_point_query(bool dcl, const cl::StructureSpec& s,
                    const cl::PartitionedFormula& pf, const std::vector<cl::Elem>& a,
                    const cl::StageBudget& b) {
  cl::CountVerdict cv = cl::count_solutions(s, pf, a, b);
  cl::MembershipVerdict v =
      dcl ? cl::in_dcl0(s, pf, a, b) : cl::in_acl0(s, pf, a, b);
  std::cout << "verdict=" << verdict_name(v) << "\n";
  if (v == cl::MembershipVerdict::Member) {
    if (cv.kind == cl::CountVerdict::Exact)
      std::cout << "witness=count k=" << cv.k << "\n";
    else
      std::cout << "witness=oracle\n";
  } else if (v == cl::MembershipVerdict::NonMember) {
    if (cv.kind == cl::CountVerdict::Exact)
      std::cout << "certificate=count k=" << cv.k << "\n";
    else if (cv.kind == cl::CountVerdict::AtLeast)
      std::cout << "certificate=at-least k=" << cv.k << "\n";
    else
      std::cout << "certificate=oracle\n";
  }
  return finish_membership(v);
}

int run_set_query(bool dcl, const Inputs& in, const cl::StructureSpec& s,
                  const std::vector<cl::PartitionedFormula>& phis,
                  const std::string& base_text, const std::string& target_text,
                  const cl::StageBudget& b) {
  std::set<cl::Elem> base;
  for (const auto& name : split(base_text, ','))
    base.insert(in.resolve_elem(s, name));
  cl::Elem target = in.resolve_elem(s, target_text);
  cl::ClosureResult res;
  cl::MembershipVerdict v = dcl ? cl::dcl_set_member(s, phis, base, target, b, &res)
                                : cl::acl_set_member(s, phis, base, target, b, &res);
  std::cout << "verdict=" << verdict_name(v) << "\n";
  if (v == cl::MembershipVerdict::Member) {
    bool found = false;
    for (const auto& t : res.trace)
      if (t.added == target) {
        std::cout << "witness=iter=" << t.iter << " via=phi" << t.phi_index << " a=(";
        for (size_t i = 0; i < t.a.size(); ++i)
          std::cout << (i ? "," : "") << cl::print_elem(t.a[i], s.sig);
        std::cout << ")\n";
        found = true;
        break;
      }
    if (!found) std::cout << "witness=base\n";
  } else if (v == cl::MembershipVerdict::NonMember) {
    std::cout << "certificate=converged iterations=" << res.iterations_used << "\n";
  }
  std::cout << "size=" << res.elements.size() << "\n";
  if (trace_enabled()) std::cout << cl::trace_to_text(res, s.sig);
  return finish_membership(v);
}

cl::SolutionCountSet parse_S(const std::string& text) {
  std::string t = text;
  if (!t.empty() && t.front() == '{') t = t.substr(1, t.size() - 2);
  if (t == "all-finite" || t.empty()) return cl::SolutionCountSet::AllOfN();
  std::set<std::uint64_t> vals;
  for (const auto& part : split(t, ',')) vals.insert(std::stoull(part));
  return cl::SolutionCountSet::of(vals);
}

// Signature and sizes inferred from a depth-1 limit table file: each
// mentioned relation becomes unary over its elements' sort, sorts are sized
// by the largest mentioned ordinal plus two.
cl::LimitPresentation presentation_from_table(const std::string& path) {
  std::string text = read_file(path);
  std::map<std::string, std::string> rel_sort;
  std::map<std::string, std::uint64_t> sort_max;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string rel, elem;
    if (!(ls >> rel >> elem)) continue;
    if (rel[0] == '#') continue;
    auto hash = elem.rfind('#');
    if (hash == std::string::npos)
      throw std::runtime_error("limit table element must be Sort#k: " + elem);
    std::string sort = elem.substr(0, hash);
    std::uint64_t ord = std::stoull(elem.substr(hash + 1));
    auto it = rel_sort.find(rel);
    if (it != rel_sort.end() && it->second != sort)
      throw std::runtime_error("limit table relation " + rel + " mixes sorts");
    rel_sort[rel] = sort;
    auto& m = sort_max[sort];
    m = std::max(m, ord + 1);
  }
  if (rel_sort.empty()) throw std::runtime_error("limit table is empty");
  cl::Signature sig;
  for (const auto& [sort, mx] : sort_max) sig.add_sort(sort);
  int nat = sig.add_sort("N");
  for (const auto& [rel, sort] : rel_sort)
    sig.add_relation(rel, {sig.find_sort(sort)});
  sig.add_relation("S", {nat, nat});
  std::vector<std::uint64_t> sizes;
  for (const auto& name : sig.sorts())
    sizes.push_back(name == "N" ? 0 : sort_max[name] + 1);
  return cl::load_limit_table(text, sig, sizes);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closure workbench for many-sorted relational structures"};
  app.require_subcommand(1);

  Inputs in;
  std::string formula_text, assign_text, S_text = "all-finite";
  std::vector<std::string> formula_list;
  std::string base_text, target_text;
  std::uint64_t k = 1, level = 0, depth = 1, horizon_arg = 64;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--structure", in.structure_file, "structure file");
    c->add_option("--construct", in.construct,
                  "sorted-halting|chain-graph|path-witness|bipartite");
    c->add_option("--variant", in.variant, "which structure of the bipartite pair");
    c->add_option("--source", in.source_text, "enumeration seed, e.g. \"3:0,1,2;5:0\"");
    c->add_option("--infinite", in.infinite_text, "columns declared infinite, e.g. \"9\"");
    c->add_option("--limit-fn", in.limit_fn, "zero or table:<file>");
    c->add_option("--stages", in.stages, "chain-graph stage count");
    c->add_option("--min-sorts", in.min_sorts, "sorted-halting minimum sort count");
    c->add_option("--budget", in.budget, "sets horizon, iters and cap at once");
    c->add_option("--horizon", in.horizon, "domain enumeration horizon");
    c->add_option("--iters", in.iters, "closure iteration budget");
    c->add_option("--cap", in.cap, "solution cap");
  };

  auto* c_eval = app.add_subcommand("eval", "evaluate a formula under an assignment");
  add_common(c_eval);
  c_eval->add_option("--formula", formula_text)->required();
  c_eval->add_option("--assign", assign_text);

  auto* c_count = app.add_subcommand("count", "count right-tuple solutions");
  add_common(c_count);
  c_count->add_option("--formula", formula_text)->required();
  c_count->add_option("--assign", assign_text);

  auto* c_acl = app.add_subcommand("acl", "algebraicity query (point or closure set)");
  add_common(c_acl);
  c_acl->add_option("--formula", formula_list);
  c_acl->add_option("--assign", assign_text);
  c_acl->add_option("--base", base_text);
  c_acl->add_option("--target", target_text);
  c_acl->add_option("--S", S_text);

  auto* c_dcl = app.add_subcommand("dcl", "definability query (point or closure set)");
  add_common(c_dcl);
  c_dcl->add_option("--formula", formula_list);
  c_dcl->add_option("--assign", assign_text);
  c_dcl->add_option("--base", base_text);
  c_dcl->add_option("--target", target_text);
  c_dcl->add_option("--S", S_text);

  auto* c_closure = app.add_subcommand("closure", "iterate the closure operator");
  add_common(c_closure);
  c_closure->add_option("--formula", formula_list);
  c_closure->add_option("--base", base_text)->required();
  c_closure->add_option("--S", S_text);

  auto* c_reduce = app.add_subcommand("reduce", "formula reductions");
  std::string reduction;
  c_reduce->add_option("kind", reduction, "upsilon|psi")->required();
  add_common(c_reduce);
  c_reduce->add_option("--formula", formula_text)->required();
  c_reduce->add_option("--k", k, "realization count for upsilon");

  auto* c_morley = app.add_subcommand("morleyize", "add atomic definitions");
  add_common(c_morley);
  c_morley->add_option("--formula", formula_list)->required();
  c_morley->add_option("--level", level, "certified quantifier level bound");

  auto* c_limit = app.add_subcommand("limit-encode",
                                     "materialize a depth-1 limit table");
  c_limit->add_option("--limit-fn", in.limit_fn)->required();
  c_limit->add_option("--depth", depth);
  c_limit->add_option("--horizon", horizon_arg);

  auto* c_construct = app.add_subcommand("construct", "build and summarize");
  std::string which;
  c_construct->add_option("name", which,
                          "sorted-halting|chain-graph|path-witness|bipartite")
      ->required();
  add_common(c_construct);

  auto* c_decode = app.add_subcommand("decode-parities",
                                      "read chain parities from the graph");
  add_common(c_decode);

  CLI11_PARSE(app, argc, argv);

  try {
    cl::StageBudget budget = in.make_budget();

    if (app.got_subcommand(c_eval) || app.got_subcommand(c_count)) {
      cl::StructureSpec s = in.make_structure();
      cl::PartitionedFormula pf = cl::parse_formula(formula_text, s.sig);
      cl::Assignment assign = parse_assign(in, s, pf, assign_text);
      if (app.got_subcommand(c_eval)) {
        cl::TruthVerdict v = cl::eval(s, pf.formula(), assign, budget);
        std::cout << "verdict="
                  << (v == cl::TruthVerdict::True
                          ? "True"
                          : v == cl::TruthVerdict::False ? "False" : "Unknown")
                  << "\n";
        return v == cl::TruthVerdict::Unknown ? 2 : 0;
      }
      std::vector<cl::Elem> a = left_tuple(pf, assign);
      cl::SolveResult sr = cl::solve_solutions(s, pf, a, budget);
      switch (sr.verdict.kind) {
        case cl::CountVerdict::Exact:
          std::cout << "verdict=Exact k=" << sr.verdict.k << "\n";
          break;
        case cl::CountVerdict::AtLeast:
          std::cout << "verdict=AtLeast k=" << sr.verdict.k << "\n";
          break;
        default:
          std::cout << "verdict=Unknown\n";
      }
      if (trace_enabled())
        for (const auto& w : sr.witnesses) {
          std::cout << "solution=(";
          for (size_t i = 0; i < w.size(); ++i)
            std::cout << (i ? "," : "") << cl::print_elem(w[i], s.sig);
          std::cout << ")\n";
        }
      return sr.verdict.kind == cl::CountVerdict::Exact ? 0 : 2;
    }

    if (app.got_subcommand(c_acl) || app.got_subcommand(c_dcl)) {
      bool dcl = app.got_subcommand(c_dcl);
      cl::StructureSpec s = in.make_structure();
      if (!target_text.empty()) {
        std::vector<cl::PartitionedFormula> phis;
        for (const auto& f : formula_list)
          phis.push_back(cl::parse_formula(f, s.sig));
        if (phis.empty()) phis = in.default_family(s);
        return run_set_query(dcl, in, s, phis, base_text, target_text, budget);
      }
      if (formula_list.size() != 1)
        throw std::runtime_error("point query needs exactly one --formula");
      cl::PartitionedFormula pf = cl::parse_formula(formula_list[0], s.sig);
      cl::Assignment assign = parse_assign(in, s, pf, assign_text);
      return run_point_query(dcl, s, pf, left_tuple(pf, assign), budget);
    }

    if (app.got_subcommand(c_closure)) {
      cl::StructureSpec s = in.make_structure();
      std::vector<cl::PartitionedFormula> phis;
      for (const auto& f : formula_list) phis.push_back(cl::parse_formula(f, s.sig));
      if (phis.empty()) phis = in.default_family(s);
      std::set<cl::Elem> base;
      for (const auto& name : split(base_text, ','))
        base.insert(in.resolve_elem(s, name));
      cl::ClosureResult res = cl::cl_fixpoint(s, phis, base, parse_S(S_text), budget);
      std::cout << "verdict=" << (res.converged ? "Converged" : "Unknown") << "\n";
      std::cout << "iterations=" << res.iterations_used << "\n";
      std::cout << "size=" << res.elements.size() << "\n";
      std::cout << "elements=" << elem_list(res.elements, s.sig) << "\n";
      if (trace_enabled()) std::cout << cl::trace_to_text(res, s.sig);
      return res.converged ? 0 : 2;
    }

    if (app.got_subcommand(c_reduce)) {
      cl::StructureSpec s = in.make_structure();
      cl::PartitionedFormula pf = cl::parse_formula(formula_text, s.sig);
      if (reduction == "psi") {
        std::cout << "psi=" << cl::print_partitioned(cl::build_psi(pf), s.sig) << "\n";
        return 0;
      }
      if (reduction == "upsilon") {
        cl::UpsilonBundle ub = cl::build_upsilon(pf, k);
        std::cout << "formula=" << cl::print_formula(ub.formula, s.sig) << "\n";
        for (size_t j = 0; j < ub.partitions.size(); ++j)
          std::cout << "tau" << j << "="
                    << cl::print_partitioned(ub.partitions[j], s.sig) << "\n";
        return 0;
      }
      throw std::runtime_error("reduce kind must be upsilon or psi");
    }

    if (app.got_subcommand(c_morley)) {
      cl::StructureSpec s = in.make_structure();
      std::vector<cl::Formula> fs;
      for (const auto& f : formula_list)
        fs.push_back(cl::parse_formula(f, s.sig).formula());
      std::uint64_t n = level;
      if (n == 0)
        for (const auto& f : fs) n = std::max(n, cl::bc_sigma_level(f));
      cl::MorleyizationResult mr = cl::morleyize(s, fs, n);
      for (size_t i = 0; i < fs.size(); ++i) {
        int rel = mr.new_rels[i];
        std::cout << "relation=" << mr.ksig.relation(rel).name
                  << " atom=" << cl::print_formula(mr.new_atoms[i], mr.ksig) << "\n";
        std::cout << "table=";
        bool first = true;
        for (const auto& tup : mr.an.tables().tuples[rel]) {
          std::cout << (first ? "" : ";") << "(";
          for (size_t j = 0; j < tup.size(); ++j)
            std::cout << (j ? "," : "") << cl::print_elem(tup[j], mr.ksig);
          std::cout << ")";
          first = false;
        }
        std::cout << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(c_limit)) {
      if (depth != 1)
        throw std::runtime_error("only depth-1 tables are loadable from text");
      if (in.limit_fn.rfind("table:", 0) != 0)
        throw std::runtime_error("--limit-fn must be table:<file>");
      cl::LimitPresentation lp = presentation_from_table(in.limit_fn.substr(6));
      lp.check_horizon = horizon_arg;
      cl::check_flip_uniqueness(lp, horizon_arg);
      std::cout << "flip_check=ok\n";
      cl::LimitEncoding enc = cl::limit_encode(lp);
      for (const auto& [rel, phi] : enc.phi) {
        const auto& name = enc.structure.sig.relation(rel).name;
        std::cout << "phi_" << name << "=" << cl::print_formula(phi, enc.structure.sig)
                  << "\n";
        int sort = enc.structure.sig.relation(rel).type[0];
        for (std::uint64_t ord = 0; ord < lp.sort_size[sort]; ++ord) {
          cl::Elem a{sort, ord};
          bool limit = lp.f[rel]({a}, {horizon_arg - 1});
          std::cout << "limit " << name << " " << cl::print_elem(a, lp.sig) << " "
                    << (limit ? 1 : 0) << "\n";
        }
      }
      return 0;
    }

    if (app.got_subcommand(c_construct)) {
      in.construct = which;
      if (which == "sorted-halting") {
        auto src = in.make_source();
        cl::StructureSpec s = in.make_structure();
        for (int e = 0; e < s.sig.sort_count(); ++e) {
          auto size = cl::sorted_halting_size(src, e);
          std::cout << "sort=" << s.sig.sort_name(e) << " size="
                    << (size ? std::to_string(*size) : std::string("infinite"))
                    << "\n";
        }
        return 0;
      }
      if (which == "chain-graph") {
        cl::ChainGraph g = cl::build_chain_graph(in.make_limit_fn(), in.stages);
        std::cout << g.inventory.to_text();
        std::cout << "pool_consumed=" << g.inventory.pool_consumed << "\n";
        return 0;
      }
      if (which == "path-witness") {
        auto src = in.make_source();
        in.make_structure();  // validates
        std::uint64_t cols = std::max<std::uint64_t>(src.max_column_index(), 1);
        for (std::uint64_t e = 0; e < cols; ++e) {
          auto least = cl::path_least_unspoiled(src, e);
          std::cout << "column=" << e << " witness="
                    << (least ? std::to_string(*least) : std::string("none")) << "\n";
        }
        return 0;
      }
      if (which == "bipartite") {
        auto src = in.make_source();
        auto g0 = cl::bipartite_from_source_degrees(src);
        auto g1 = cl::bipartite_singleton(src);
        cl::build_bipartite_pair(g0, g1);  // validates
        std::cout << "edges0=" << g0.edges.size() << " infinite0="
                  << g0.infinite_a.size() << "\n";
        std::cout << "edges1=" << g1.edges.size() << "\n";
        return 0;
      }
      throw std::runtime_error("unknown construction: " + which);
    }

    if (app.got_subcommand(c_decode)) {
      cl::ChainGraph g = cl::build_chain_graph(in.make_limit_fn(), in.stages);
      std::uint64_t h = in.horizon ? in.horizon
                                   : 2 * g.inventory.pool_consumed + 256;
      auto parities = cl::decode_parities(g.structure, h);
      for (const auto& [column, parity] : parities)
        std::cout << "column=" << column << " parity=" << parity << "\n";
      return 0;
    }

    throw std::runtime_error("no subcommand");
  } catch (const std::exception& e) {
    std::cerr << "error=" << e.what() << "\n";
    return 1;
  }
}
