#ifndef CLOSURELAB_PARSER_HPP
#define CLOSURELAB_PARSER_HPP

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "closurelab/formula.hpp"
#include "closurelab/signature.hpp"
#include "closurelab/structure.hpp"

namespace closurelab {

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

namespace detail {

struct Token {
  enum Kind { Ident, Number, Punct, End } kind;
  std::string text;
  size_t offset;
};

inline std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                              s[j] == '_' || s[j] == '#'))
        ++j;
      out.push_back({Token::Ident, s.substr(i, j - i), i});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Token::Number, s.substr(i, j - i), i});
      i = j;
    } else {
      out.push_back({Token::Punct, std::string(1, c), i});
      ++i;
    }
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

// Raw parse tree prior to sort inference.
struct PNode {
  FormulaKind kind;
  int rel = -1;
  std::vector<std::string> var_names;   // atom args / eq operands / binders
  std::vector<int> var_sorts;           // parallel; -1 = to infer
  std::vector<std::unique_ptr<PNode>> kids;
  size_t offset = 0;
};

class FormulaParser {
public:
  FormulaParser(const std::string& text, const Signature& sig)
      : toks_(tokenize(text)), sig_(sig) {}

  PartitionedFormula parse() {
    std::vector<std::pair<std::string, int>> header_left, header_right;
    bool have_header = false;
    if (peek().kind == Token::Punct && peek().text == "[") {
      have_header = true;
      next();
      header_left = parse_decls();
      expect_punct(";");
      header_right = parse_decls();
      expect_punct("]");
    }
    auto root = parse_or();
    if (peek().kind != Token::End)
      throw ParseError("unexpected trailing input", peek().offset);
    // seed sorts from header declarations, then infer the rest
    for (auto* decls : {&header_left, &header_right})
      for (auto& [name, sort] : *decls)
        if (sort >= 0) force_sort(name, sort);
    infer(*root);
    resolve(*root);
    Formula f = build(*root);
    auto fv = f.free_vars();
    std::vector<Var> left, right;
    auto find_fv = [&](const std::string& name) -> const Var* {
      for (const auto& v : fv)
        if (v.name == name) return &v;
      return nullptr;
    };
    if (have_header) {
      for (auto& [name, sort] : header_left) {
        const Var* v = find_fv(name);
        if (!v) throw ParseError("declared variable " + name + " is not free", 0);
        left.push_back(*v);
      }
      for (auto& [name, sort] : header_right) {
        const Var* v = find_fv(name);
        if (!v) throw ParseError("declared variable " + name + " is not free", 0);
        right.push_back(*v);
      }
    } else {
      // No header: the first semicolon inside an argument list splits the
      // free variables by first occurrence; with no semicolon all go right.
      for (const auto& v : fv) {
        if (first_occurrence_.count(v.name) &&
            first_semicolon_ != SIZE_MAX &&
            first_occurrence_[v.name] < first_semicolon_)
          left.push_back(v);
        else
          right.push_back(v);
      }
    }
    return PartitionedFormula(f, std::move(left), std::move(right));
  }

private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  void expect_punct(const std::string& p) {
    if (peek().kind != Token::Punct || peek().text != p)
      throw ParseError("expected '" + p + "'", peek().offset);
    next();
  }
  std::string expect_ident() {
    if (peek().kind != Token::Ident)
      throw ParseError("expected identifier", peek().offset);
    return next().text;
  }

  std::vector<std::pair<std::string, int>> parse_decls() {
    std::vector<std::pair<std::string, int>> out;
    while (peek().kind == Token::Ident) {
      std::string name = next().text;
      int sort = -1;
      if (peek().kind == Token::Punct && peek().text == ":") {
        next();
        std::string sn = expect_ident();
        sort = sig_.find_sort(sn);
        if (sort < 0) throw ParseError("unknown sort " + sn, peek().offset);
      }
      out.emplace_back(name, sort);
      if (peek().kind == Token::Punct && peek().text == ",") next();
      else break;
    }
    return out;
  }

  std::unique_ptr<PNode> parse_or() {
    auto l = parse_and();
    while (peek().kind == Token::Punct && peek().text == "|") {
      next();
      auto r = parse_and();
      auto n = std::make_unique<PNode>();
      n->kind = FormulaKind::Or;
      n->kids.push_back(std::move(l));
      n->kids.push_back(std::move(r));
      l = std::move(n);
    }
    return l;
  }

  std::unique_ptr<PNode> parse_and() {
    auto l = parse_unary();
    while (peek().kind == Token::Punct && peek().text == "&") {
      next();
      auto r = parse_unary();
      auto n = std::make_unique<PNode>();
      n->kind = FormulaKind::And;
      n->kids.push_back(std::move(l));
      n->kids.push_back(std::move(r));
      l = std::move(n);
    }
    return l;
  }

  std::unique_ptr<PNode> parse_unary() {
    if (peek().kind == Token::Punct && peek().text == "!") {
      size_t off = next().offset;
      auto n = std::make_unique<PNode>();
      n->kind = FormulaKind::Not;
      n->offset = off;
      n->kids.push_back(parse_unary());
      return n;
    }
    // quantifier: E/A followed by an identifier (an atom would be followed by '(')
    if (peek().kind == Token::Ident && (peek().text == "E" || peek().text == "A") &&
        peek(1).kind == Token::Ident)
      return parse_quant();
    return parse_primary();
  }

  std::unique_ptr<PNode> parse_quant() {
    auto n = std::make_unique<PNode>();
    n->offset = peek().offset;
    n->kind = next().text == "E" ? FormulaKind::Exists : FormulaKind::Forall;
    while (true) {
      n->var_names.push_back(expect_ident());
      if (peek().kind == Token::Punct && peek().text == ",") next();
      else break;
    }
    expect_punct(":");
    for (size_t i = 0; i < n->var_names.size(); ++i) {
      std::string sn = expect_ident();
      int sort = sig_.find_sort(sn);
      if (sort < 0) throw ParseError("unknown sort " + sn, peek().offset);
      n->var_sorts.push_back(sort);
      if (i + 1 < n->var_names.size()) expect_punct(",");
    }
    expect_punct(".");
    n->kids.push_back(parse_or());
    return n;
  }

  std::unique_ptr<PNode> parse_primary() {
    if (peek().kind == Token::Punct && peek().text == "(") {
      next();
      auto n = parse_or();
      expect_punct(")");
      return n;
    }
    if (peek().kind != Token::Ident)
      throw ParseError("expected formula", peek().offset);
    size_t off = peek().offset;
    std::string name = next().text;
    if (peek().kind == Token::Punct && peek().text == "(") {
      // relation atom
      int rel = sig_.find_relation(name);
      if (rel < 0) throw ParseError("unknown relation " + name, off);
      next();
      auto n = std::make_unique<PNode>();
      n->kind = FormulaKind::Atom;
      n->rel = rel;
      n->offset = off;
      while (true) {
        if (peek().kind != Token::Ident)
          throw ParseError("expected variable in atom " + name, peek().offset);
        size_t voff = peek().offset;
        auto [vname, vsort] = parse_varref();
        record_occurrence(vname, voff);
        n->var_names.push_back(vname);
        n->var_sorts.push_back(vsort);
        if (peek().kind == Token::Punct && (peek().text == "," || peek().text == ";")) {
          if (peek().text == ";" && first_semicolon_ == SIZE_MAX)
            first_semicolon_ = peek().offset;
          next();
          continue;
        }
        break;
      }
      expect_punct(")");
      return n;
    }
    // equality: v1 = v2 (the first varref was already consumed)
    int sort1 = -1;
    if (peek().kind == Token::Punct && peek().text == ":") {
      next();
      std::string sn = expect_ident();
      sort1 = sig_.find_sort(sn);
      if (sort1 < 0) throw ParseError("unknown sort " + sn, off);
    }
    record_occurrence(name, off);
    expect_punct("=");
    size_t voff = peek().offset;
    auto [v2, sort2] = parse_varref();
    record_occurrence(v2, voff);
    auto n = std::make_unique<PNode>();
    n->kind = FormulaKind::Eq;
    n->offset = off;
    n->var_names = {name, v2};
    n->var_sorts = {sort1, sort2};
    return n;
  }

  std::pair<std::string, int> parse_varref() {
    std::string name = expect_ident();
    int sort = -1;
    if (peek().kind == Token::Punct && peek().text == ":") {
      next();
      std::string sn = expect_ident();
      sort = sig_.find_sort(sn);
      if (sort < 0) throw ParseError("unknown sort " + sn, peek().offset);
    }
    return {name, sort};
  }

  void record_occurrence(const std::string& name, size_t off) {
    if (!first_occurrence_.count(name)) first_occurrence_[name] = off;
  }

  // --- sort inference over variable names, scoped by quantifiers ---

  void force_sort(const std::string& name, int sort) {
    auto it = inferred_.find(name);
    if (it != inferred_.end() && it->second != sort)
      throw ParseError("conflicting sorts for variable " + name, 0);
    inferred_[name] = sort;
  }

  void infer(PNode& n) {
    // Fixpoint over equality constraints; atoms pin sorts immediately.
    collect_constraints(n, {});
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [a, bb] : eq_constraints_) {
        auto ia = inferred_.find(a), ib = inferred_.find(bb);
        if (ia != inferred_.end() && ib == inferred_.end()) {
          inferred_[bb] = ia->second;
          changed = true;
        } else if (ib != inferred_.end() && ia == inferred_.end()) {
          inferred_[a] = ib->second;
          changed = true;
        } else if (ia != inferred_.end() && ib != inferred_.end() &&
                   ia->second != ib->second) {
          throw ParseError("sort mismatch in equality between " + a + " and " + bb, n.offset);
        }
      }
    }
  }

  void collect_constraints(PNode& n, std::map<std::string, int> bound) {
    switch (n.kind) {
      case FormulaKind::Atom: {
        const auto& type = sig_.relation(n.rel).type;
        if (n.var_names.size() != type.size())
          throw ParseError("arity mismatch in atom " + sig_.relation(n.rel).name,
                           n.offset);
        for (size_t i = 0; i < n.var_names.size(); ++i) {
          int expected = type[i];
          auto it = bound.find(n.var_names[i]);
          if (it != bound.end()) {
            if (it->second != expected)
              throw ParseError("sort mismatch in atom " + sig_.relation(n.rel).name +
                               ": variable " + n.var_names[i], n.offset);
          } else {
            if (n.var_sorts[i] >= 0 && n.var_sorts[i] != expected)
              throw ParseError("sort mismatch in atom " + sig_.relation(n.rel).name +
                               ": variable " + n.var_names[i], n.offset);
            auto ii = inferred_.find(n.var_names[i]);
            if (ii != inferred_.end() && ii->second != expected)
              throw ParseError("sort mismatch in atom " + sig_.relation(n.rel).name +
                               ": variable " + n.var_names[i], n.offset);
            inferred_[n.var_names[i]] = expected;
          }
        }
        break;
      }
      case FormulaKind::Eq: {
        for (size_t i = 0; i < 2; ++i) {
          auto it = bound.find(n.var_names[i]);
          if (it == bound.end() && n.var_sorts[i] >= 0)
            force_sort(n.var_names[i], n.var_sorts[i]);
        }
        bool b0 = bound.count(n.var_names[0]), b1 = bound.count(n.var_names[1]);
        if (b0 && b1) {
          if (bound[n.var_names[0]] != bound[n.var_names[1]])
            throw ParseError("sort mismatch in equality", n.offset);
        } else if (b0) {
          force_sort(n.var_names[1], bound[n.var_names[0]]);
        } else if (b1) {
          force_sort(n.var_names[0], bound[n.var_names[1]]);
        } else {
          eq_constraints_.emplace_back(n.var_names[0], n.var_names[1]);
        }
        break;
      }
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        auto inner = bound;
        for (size_t i = 0; i < n.var_names.size(); ++i)
          inner[n.var_names[i]] = n.var_sorts[i];
        collect_constraints(*n.kids[0], std::move(inner));
        break;
      }
      default:
        for (auto& k : n.kids) collect_constraints(*k, bound);
    }
  }

  void resolve(PNode& n) { resolve_rec(n, {}); }

  void resolve_rec(PNode& n, std::map<std::string, int> bound) {
    switch (n.kind) {
      case FormulaKind::Atom:
      case FormulaKind::Eq:
        for (size_t i = 0; i < n.var_names.size(); ++i) {
          auto it = bound.find(n.var_names[i]);
          int sort = it != bound.end() ? it->second
                     : inferred_.count(n.var_names[i]) ? inferred_[n.var_names[i]]
                                                       : -1;
          if (sort < 0)
            throw ParseError("cannot infer sort of variable " + n.var_names[i] +
                             " (annotate as name:Sort)", n.offset);
          n.var_sorts[i] = sort;
        }
        break;
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        auto inner = bound;
        for (size_t i = 0; i < n.var_names.size(); ++i)
          inner[n.var_names[i]] = n.var_sorts[i];
        resolve_rec(*n.kids[0], std::move(inner));
        break;
      }
      default:
        for (auto& k : n.kids) resolve_rec(*k, bound);
    }
  }

  Formula build(const PNode& n) {
    switch (n.kind) {
      case FormulaKind::Atom: {
        std::vector<Var> args;
        for (size_t i = 0; i < n.var_names.size(); ++i)
          args.push_back({n.var_names[i], n.var_sorts[i]});
        return Formula::atom(sig_, n.rel, std::move(args));
      }
      case FormulaKind::Eq:
        return Formula::eq({n.var_names[0], n.var_sorts[0]},
                           {n.var_names[1], n.var_sorts[1]});
      case FormulaKind::Not:
        return Formula::lnot(build(*n.kids[0]));
      case FormulaKind::And:
        return Formula::land(build(*n.kids[0]), build(*n.kids[1]));
      case FormulaKind::Or:
        return Formula::lor(build(*n.kids[0]), build(*n.kids[1]));
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::vector<Var> binders;
        for (size_t i = 0; i < n.var_names.size(); ++i)
          binders.push_back({n.var_names[i], n.var_sorts[i]});
        Formula body = build(*n.kids[0]);
        return n.kind == FormulaKind::Exists ? Formula::exists(binders, body)
                                             : Formula::forall(binders, body);
      }
    }
    throw ParseError("internal parser error", n.offset);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  const Signature& sig_;
  std::map<std::string, size_t> first_occurrence_;
  size_t first_semicolon_ = SIZE_MAX;
  std::map<std::string, int> inferred_;
  std::vector<std::pair<std::string, std::string>> eq_constraints_;
};

}  // namespace detail

inline PartitionedFormula parse_formula(const std::string& text, const Signature& sig) {
  detail::FormulaParser p(text, sig);
  return p.parse();
}

/// Parses the finite-structure text format:
///   language { sort X; rel E : X*X; }
///   structure { X = {0,1,2}; E = {(0,1),(1,2)}; }
inline StructureSpec parse_structure(const std::string& text) {
  auto toks = detail::tokenize(text);
  size_t pos = 0;
  auto peek = [&]() -> const detail::Token& {
    return pos < toks.size() ? toks[pos] : toks.back();
  };
  auto next = [&]() -> const detail::Token& {
    return toks[pos < toks.size() - 1 ? pos++ : pos];
  };
  auto expect = [&](const std::string& p) {
    if (peek().kind != detail::Token::Punct || peek().text != p)
      throw ParseError("expected '" + p + "'", peek().offset);
    next();
  };
  auto expect_kw = [&](const std::string& kw) {
    if (peek().kind != detail::Token::Ident || peek().text != kw)
      throw ParseError("expected '" + kw + "'", peek().offset);
    next();
  };
  auto expect_ident = [&]() {
    if (peek().kind != detail::Token::Ident)
      throw ParseError("expected identifier", peek().offset);
    return next().text;
  };
  auto expect_number = [&]() -> std::uint64_t {
    if (peek().kind != detail::Token::Number)
      throw ParseError("expected number", peek().offset);
    return std::stoull(next().text);
  };

  Signature sig;
  expect_kw("language");
  expect("{");
  while (!(peek().kind == detail::Token::Punct && peek().text == "}")) {
    std::string kw = expect_ident();
    if (kw == "sort") {
      sig.add_sort(expect_ident());
    } else if (kw == "rel") {
      std::string name = expect_ident();
      expect(":");
      TupleType type;
      while (true) {
        std::string sn = expect_ident();
        int s = sig.find_sort(sn);
        if (s < 0) throw ParseError("unknown sort " + sn, peek().offset);
        type.push_back(s);
        if (peek().kind == detail::Token::Punct && peek().text == "*") next();
        else break;
      }
      sig.add_relation(name, std::move(type));
    } else {
      throw ParseError("expected 'sort' or 'rel'", peek().offset);
    }
    expect(";");
  }
  expect("}");

  FiniteTables ft;
  ft.sort_size.assign(sig.sort_count(), 0);
  ft.tuples.assign(sig.relation_count(), {});
  std::vector<bool> sort_seen(sig.sort_count(), false);

  expect_kw("structure");
  expect("{");
  while (!(peek().kind == detail::Token::Punct && peek().text == "}")) {
    std::string name = expect_ident();
    size_t name_off = toks[pos - 1].offset;
    expect("=");
    expect("{");
    int sort = sig.find_sort(name);
    int rel = sig.find_relation(name);
    if (sort >= 0) {
      std::set<std::uint64_t> elems;
      while (peek().kind == detail::Token::Number) {
        std::uint64_t v = expect_number();
        if (!elems.insert(v).second)
          throw ParseError("duplicate element " + std::to_string(v), peek().offset);
        if (peek().kind == detail::Token::Punct && peek().text == ",") next();
        else break;
      }
      for (std::uint64_t i = 0; i < elems.size(); ++i)
        if (!elems.count(i))
          throw ParseError("sort " + name + " must list ordinals 0..n-1", name_off);
      ft.sort_size[sort] = elems.size();
      sort_seen[sort] = true;
    } else if (rel >= 0) {
      const auto& type = sig.relation(rel).type;
      while (peek().kind == detail::Token::Punct && peek().text == "(") {
        next();
        std::vector<Elem> tup;
        for (size_t i = 0; i < type.size(); ++i) {
          tup.push_back({type[i], expect_number()});
          if (i + 1 < type.size()) expect(",");
        }
        expect(")");
        if (!ft.tuples[rel].insert(tup).second)
          throw ParseError("duplicate tuple in relation " + name, name_off);
        if (peek().kind == detail::Token::Punct && peek().text == ",") next();
        else break;
      }
    } else {
      throw ParseError("unknown sort or relation " + name, name_off);
    }
    expect("}");
    expect(";");
  }
  expect("}");
  if (peek().kind != detail::Token::End)
    throw ParseError("unexpected trailing input", peek().offset);

  for (int r = 0; r < sig.relation_count(); ++r)
    for (const auto& tup : ft.tuples[r])
      for (const auto& e : tup)
        if (e.ord >= ft.sort_size[e.sort])
          throw ParseError("tuple element outside declared sort " +
                           sig.sort_name(e.sort), 0);

  StructureSpec out;
  out.sig = std::move(sig);
  out.body = std::move(ft);
  return out;
}

}  // namespace closurelab

#endif
