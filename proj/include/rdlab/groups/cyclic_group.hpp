#pragma once

#include "rdlab/core.hpp"

#include <algorithm>
#include <compare>
#include <string>
#include <vector>

namespace rdlab {

/// Residue in [0, order).
struct Residue {
  std::int64_t value = 0;

  auto operator<=>(const Residue&) const = default;
  bool operator==(const Residue&) const = default;
};

inline std::size_t hash_value(const Residue& r) { return hash_combine(0xc1c, static_cast<std::size_t>(r.value)); }

/// Finite cyclic group Z_m generated by a, with L(a^k) = min(k, m - k).
class CyclicGroup {
 public:
  using element_type = Residue;

  explicit CyclicGroup(std::int64_t order) : order_(order) {
    if (order < 1) throw PreconditionFailed("cyclic group order must be >= 1");
  }

  std::int64_t order() const noexcept { return order_; }

  Residue identity() const { return {}; }
  Residue power(std::int64_t k) const { return Residue{((k % order_) + order_) % order_}; }

  Residue multiply(const Residue& a, const Residue& b) const { return power(a.value + b.value); }
  Residue inverse(const Residue& a) const { return power(-a.value); }

  Rational length(const Residue& a) const { return Rational(std::min(a.value, order_ - a.value) % order_); }

  bool is_identity(const Residue& a) const { return a.value == 0; }
  bool compatible(const Residue& a) const { return a.value >= 0 && a.value < order_; }
  bool contains(const Residue& a) const { return compatible(a); }

  std::vector<Residue> moves() const {
    if (order_ == 1) return {};
    if (order_ == 2) return {power(1)};
    return {power(1), power(-1)};
  }

  /// "a^3", "a", or "1".
  std::string format(const Residue& a) const {
    if (a.value == 0) return "1";
    if (a.value == 1) return "a";
    return "a^" + std::to_string(a.value);
  }

  Residue parse(std::string_view text) const {
    auto s = detail::trim(text);
    if (s == "1") return identity();
    if (s.empty() || s.front() != 'a') throw ParseError("bad cyclic element '" + std::string(s) + "'");
    if (s.size() == 1) return power(1);
    if (s[1] != '^') throw ParseError("bad cyclic element '" + std::string(s) + "'");
    return power(detail::parse_int(s.substr(2), "exponent"));
  }

 private:
  std::int64_t order_;
};

}  // namespace rdlab
