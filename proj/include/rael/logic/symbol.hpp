#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace rael::logic {

/// Interned identifier. Equality and hashing are by identity; ordering is by
/// name so that canonical orders do not depend on interning order.
class Symbol {
 public:
  Symbol();
  explicit Symbol(std::string_view name);

  const std::string& name() const { return *name_; }
  bool empty() const { return name_->empty(); }

  friend bool operator==(Symbol a, Symbol b) { return a.name_ == b.name_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.name_ == b.name_) return std::strong_ordering::equal;
    return a.name_->compare(*b.name_) < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  std::size_t hash() const { return std::hash<const void*>{}(name_); }

 private:
  const std::string* name_;
};

}  // namespace rael::logic

template <>
struct std::hash<rael::logic::Symbol> {
  std::size_t operator()(rael::logic::Symbol s) const noexcept { return s.hash(); }
};
