#ifndef CLOSURELAB_SIGNATURE_HPP
#define CLOSURELAB_SIGNATURE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace closurelab {

struct SortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ordered list of sort indices; the type of a relation symbol or of a
/// variable tuple. May be empty.
using TupleType = std::vector<int>;

struct RelationSymbol {
  std::string name;
  TupleType type;
};

/// A many-sorted relational signature: sort names plus typed relation symbols.
class Signature {
public:
  Signature() = default;
  Signature(std::vector<std::string> sorts, std::vector<RelationSymbol> relations)
      : sorts_(std::move(sorts)), relations_(std::move(relations)) {
    validate();
  }

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<RelationSymbol>& relations() const { return relations_; }

  int sort_count() const { return static_cast<int>(sorts_.size()); }
  int relation_count() const { return static_cast<int>(relations_.size()); }

  const std::string& sort_name(int i) const { return sorts_.at(i); }
  const RelationSymbol& relation(int i) const { return relations_.at(i); }

  int find_sort(const std::string& name) const {
    for (int i = 0; i < sort_count(); ++i)
      if (sorts_[i] == name) return i;
    return -1;
  }

  int find_relation(const std::string& name) const {
    for (int i = 0; i < relation_count(); ++i)
      if (relations_[i].name == name) return i;
    return -1;
  }

  int add_sort(const std::string& name) {
    if (find_sort(name) >= 0) throw SortError("duplicate sort name: " + name);
    sorts_.push_back(name);
    return sort_count() - 1;
  }

  int add_relation(const std::string& name, TupleType type) {
    if (find_relation(name) >= 0) throw SortError("duplicate relation name: " + name);
    for (int s : type)
      if (s < 0 || s >= sort_count())
        throw SortError("relation " + name + ": sort index out of range");
    relations_.push_back({name, std::move(type)});
    return relation_count() - 1;
  }

  bool operator==(const Signature& o) const {
    if (sorts_ != o.sorts_) return false;
    if (relations_.size() != o.relations_.size()) return false;
    for (size_t i = 0; i < relations_.size(); ++i)
      if (relations_[i].name != o.relations_[i].name ||
          relations_[i].type != o.relations_[i].type)
        return false;
    return true;
  }

private:
  void validate() const {
    for (size_t i = 0; i < relations_.size(); ++i) {
      for (size_t j = i + 1; j < relations_.size(); ++j)
        if (relations_[i].name == relations_[j].name)
          throw SortError("duplicate relation name: " + relations_[i].name);
      for (int s : relations_[i].type)
        if (s < 0 || s >= sort_count())
          throw SortError("relation " + relations_[i].name + ": sort index out of range");
    }
  }

  std::vector<std::string> sorts_;
  std::vector<RelationSymbol> relations_;
};

}  // namespace closurelab

#endif
