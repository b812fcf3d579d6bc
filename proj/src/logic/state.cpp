#include "rael/logic/state.hpp"

#include <algorithm>

namespace rael::logic {

ObjectTable::ObjectTable(std::initializer_list<Entry> entries) {
  for (const auto& [obj, cls] : entries) add(obj, cls);
}

void ObjectTable::add(Symbol object, Symbol cls) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), object,
                             [](const Entry& e, Symbol o) { return e.first < o; });
  if (it != entries_.end() && it->first == object) {
    if (it->second != cls)
      throw StateError("object " + object.name() + " declared as both " + it->second.name() + " and " + cls.name());
    return;
  }
  entries_.insert(it, {object, cls});
}

std::optional<Symbol> ObjectTable::class_of(Symbol object) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), object,
                             [](const Entry& e, Symbol o) { return e.first < o; });
  if (it != entries_.end() && it->first == object) return it->second;
  return std::nullopt;
}

std::vector<Symbol> ObjectTable::objects_of_class(Symbol cls) const {
  std::vector<Symbol> out;
  for (const auto& [obj, c] : entries_)
    if (c == cls) out.push_back(obj);
  return out;
}

SymbolicState::SymbolicState() {
  static const auto empty = std::make_shared<const Data>();
  data_ = empty;
}

SymbolicState::SymbolicState(std::vector<Atom> atoms, ObjectTable objects) {
  auto d = std::make_shared<Data>();
  d->atoms = std::move(atoms);
  d->objects = std::move(objects);
  for (const auto& a : d->atoms) {
    for (const auto& t : a.args) {
      if (t.is_variable()) throw StateError("state atom is not ground: " + a.predicate.name());
      if (!d->objects.contains(t.name()))
        throw StateError("constant " + t.name().name() + " in " + a.predicate.name() + " missing from object table");
    }
  }
  auto& list = d->atoms;
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());

  for (std::uint32_t i = 0; i < list.size();) {
    std::uint32_t j = i;
    while (j < list.size() && list[j].predicate == list[i].predicate) ++j;
    d->runs.push_back({list[i].predicate, i, j});
    i = j;
  }

  std::size_t h = list.size();
  for (const auto& a : list) h = h * 1000003u ^ hash_value(a);
  for (const auto& [obj, cls] : d->objects.entries()) h = h * 1000003u ^ (obj.hash() + 31 * cls.hash());
  d->hash = h;
  data_ = std::move(d);
}

bool SymbolicState::contains(const Atom& atom) const {
  auto run = with_predicate(atom.predicate);
  return std::binary_search(run.begin(), run.end(), atom);
}

std::span<const Atom> SymbolicState::with_predicate(Symbol predicate) const {
  for (const auto& r : data_->runs)
    if (r.predicate == predicate) return std::span<const Atom>(data_->atoms.data() + r.begin, r.end - r.begin);
  return {};
}

}  // namespace rael::logic
