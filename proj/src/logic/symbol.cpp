#include "rael/logic/symbol.hpp"

#include <mutex>
#include <unordered_set>

namespace rael::logic {
namespace {

// Node-based set: element addresses survive rehashing, so a Symbol can hold a
// raw pointer and read its name without locking.
struct SymbolTable {
  std::mutex mutex;
  std::unordered_set<std::string> names;

  const std::string* intern(std::string_view name) {
    std::lock_guard lock(mutex);
    return &*names.emplace(name).first;
  }
};

SymbolTable& table() {
  static SymbolTable instance;
  return instance;
}

const std::string* empty_name() {
  static const std::string* const empty = table().intern("");
  return empty;
}

}  // namespace

Symbol::Symbol() : name_(empty_name()) {}

Symbol::Symbol(std::string_view name) : name_(table().intern(name)) {}

}  // namespace rael::logic
