#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rael/logic/term.hpp"

namespace rael::logic {

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constant -> object class, sorted by constant name.
class ObjectTable {
 public:
  using Entry = std::pair<Symbol, Symbol>;

  ObjectTable() = default;
  ObjectTable(std::initializer_list<Entry> entries);

  /// Throws StateError if the object is already declared with another class.
  void add(Symbol object, Symbol cls);
  std::optional<Symbol> class_of(Symbol object) const;
  bool contains(Symbol object) const { return class_of(object).has_value(); }
  std::vector<Symbol> objects_of_class(Symbol cls) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const ObjectTable&, const ObjectTable&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Finite set of ground atoms plus the objects they mention. Atoms are kept in
/// canonical (name-lexicographic) order, so equality ignores insertion order.
/// Immutable; copies share one representation.
class SymbolicState {
 public:
  SymbolicState();
  /// Throws StateError if an atom is non-ground or mentions an undeclared constant.
  SymbolicState(std::vector<Atom> atoms, ObjectTable objects);

  const std::vector<Atom>& atoms() const { return data_->atoms; }
  const ObjectTable& objects() const { return data_->objects; }
  std::size_t size() const { return data_->atoms.size(); }

  bool contains(const Atom& atom) const;
  /// Contiguous run of atoms with the given predicate (possibly empty).
  std::span<const Atom> with_predicate(Symbol predicate) const;

  std::size_t hash() const { return data_->hash; }

  friend bool operator==(const SymbolicState& a, const SymbolicState& b) {
    if (a.data_ == b.data_) return true;
    return a.data_->hash == b.data_->hash && a.data_->atoms == b.data_->atoms && a.data_->objects == b.data_->objects;
  }

 private:
  struct Run {
    Symbol predicate;
    std::uint32_t begin;
    std::uint32_t end;
  };
  struct Data {
    std::vector<Atom> atoms;
    ObjectTable objects;
    std::vector<Run> runs;
    std::size_t hash = 0;
  };

  std::shared_ptr<const Data> data_;
};

}  // namespace rael::logic

template <>
struct std::hash<rael::logic::SymbolicState> {
  std::size_t operator()(const rael::logic::SymbolicState& s) const noexcept { return s.hash(); }
};
