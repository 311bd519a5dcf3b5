#pragma once

#include "rdlab/core.hpp"

#include <compare>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

namespace rdlab {

struct LatticePoint {
  std::vector<std::int64_t> coords;

  auto operator<=>(const LatticePoint&) const = default;
  bool operator==(const LatticePoint&) const = default;
};

inline std::size_t hash_value(const LatticePoint& p) {
  std::size_t h = 0x1a77;
  for (auto c : p.coords) h = hash_combine(h, static_cast<std::size_t>(c));
  return h;
}

/// Z^n with the weighted word length L(v) = sum_i w_i |v_i|, all weights >= 1.
class WeightedAbelianGroup {
 public:
  using element_type = LatticePoint;

  explicit WeightedAbelianGroup(std::vector<Rational> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw PreconditionFailed("weighted abelian group needs at least one weight");
    for (const auto& w : weights_)
      if (w < 1) throw PreconditionFailed("weight " + to_string(w) + " < 1 breaks properness");
  }

  std::size_t dimension() const noexcept { return weights_.size(); }
  const std::vector<Rational>& weights() const noexcept { return weights_; }

  LatticePoint identity() const { return LatticePoint{std::vector<std::int64_t>(weights_.size(), 0)}; }

  LatticePoint point(std::vector<std::int64_t> coords) const {
    if (coords.size() != weights_.size()) throw PreconditionFailed("dimension mismatch");
    return LatticePoint{std::move(coords)};
  }

  LatticePoint multiply(const LatticePoint& a, const LatticePoint& b) const {
    LatticePoint out = a;
    for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += b.coords[i];
    return out;
  }

  LatticePoint inverse(const LatticePoint& a) const {
    LatticePoint out = a;
    for (auto& c : out.coords) c = -c;
    return out;
  }

  Rational length(const LatticePoint& a) const {
    Rational total(0);
    for (std::size_t i = 0; i < a.coords.size(); ++i) total += weights_[i] * std::abs(a.coords[i]);
    return total;
  }

  bool is_identity(const LatticePoint& a) const {
    for (auto c : a.coords)
      if (c != 0) return false;
    return true;
  }

  bool compatible(const LatticePoint& a) const { return a.coords.size() == weights_.size(); }
  bool contains(const LatticePoint& a) const { return compatible(a); }

  std::vector<LatticePoint> moves() const {
    std::vector<LatticePoint> out;
    for (std::size_t i = 0; i < weights_.size(); ++i)
      for (std::int64_t s : {1, -1}) {
        auto p = identity();
        p.coords[i] = s;
        out.push_back(std::move(p));
      }
    return out;
  }

  /// Direct lattice enumeration of {v : sum w_i |v_i| <= r}, unsorted.
  std::optional<std::vector<LatticePoint>> direct_ball(const Rational& r, std::size_t cap) const {
    std::vector<LatticePoint> out;
    if (r < 0) return out;
    std::vector<std::int64_t> current(weights_.size(), 0);
    fill(0, r, current, out, cap);
    return out;
  }

  /// "(1,-2,0)".
  std::string format(const LatticePoint& a) const {
    std::string out = "(";
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(a.coords[i]);
    }
    return out + ")";
  }

  LatticePoint parse(std::string_view text) const {
    auto s = detail::trim(text);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ParseError("lattice point must look like (x,y,...)");
    s = s.substr(1, s.size() - 2);
    std::vector<std::int64_t> coords;
    std::size_t start = 0;
    while (true) {
      auto comma = s.find(',', start);
      coords.push_back(detail::parse_int(detail::trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)), "coordinate"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (coords.size() != weights_.size())
      throw ParseError("expected " + std::to_string(weights_.size()) + " coordinates, got " + std::to_string(coords.size()));
    return LatticePoint{std::move(coords)};
  }

 private:
  void fill(std::size_t axis, const Rational& budget, std::vector<std::int64_t>& current,
            std::vector<LatticePoint>& out, std::size_t cap) const {
    if (axis == weights_.size()) {
      if (out.size() >= cap) throw BudgetExceeded("lattice ball enumeration exceeded element cap", cap);
      out.push_back(LatticePoint{current});
      return;
    }
    auto reach = boost::rational_cast<std::int64_t>(floor(budget / weights_[axis]));
    for (std::int64_t v = -reach; v <= reach; ++v) {
      current[axis] = v;
      fill(axis + 1, budget - weights_[axis] * std::abs(v), current, out, cap);
    }
    current[axis] = 0;
  }

  std::vector<Rational> weights_;
};

}  // namespace rdlab
