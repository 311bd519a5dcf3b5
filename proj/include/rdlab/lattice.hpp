#pragma once

// Exact point counts for weighted l1 balls in Z^n and their Minkowski sums
// with cubes {-m..m}^n.

#include "rdlab/groups/weighted_abelian.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace rdlab {

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw PreconditionFailed("lattice count overflows 64 bits");
  return a + b;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw PreconditionFailed("lattice count overflows 64 bits");
  return a * b;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) out = checked_mul(out, n - k + i) / i;
  return out;
}

/// Sum over t in N^n with sum w_i t_i <= budget of prod weight(t_i).
template <class PerAxis>
std::uint64_t axis_sum(const std::vector<Rational>& weights, std::size_t axis, const Rational& budget,
                       PerAxis&& per_axis, std::map<std::pair<std::size_t, Rational>, std::uint64_t>& memo) {
  if (axis == weights.size()) return 1;
  auto key = std::make_pair(axis, budget);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint64_t total = 0;
  auto reach = boost::rational_cast<std::int64_t>(floor(budget / weights[axis]));
  for (std::int64_t t = 0; t <= reach; ++t)
    total = checked_add(total, checked_mul(per_axis(t), axis_sum(weights, axis + 1, budget - weights[axis] * t, per_axis, memo)));
  memo.emplace(key, total);
  return total;
}

}  // namespace detail

/// |{v in Z^n : |v|_1 <= rho}| = sum_k 2^k C(n,k) C(rho,k).
inline std::uint64_t l1_ball_count(std::uint64_t n, std::uint64_t rho) {
  std::uint64_t total = 0;
  for (std::uint64_t k = 0; k <= n; ++k)
    total = detail::checked_add(total, detail::checked_mul(detail::checked_mul(std::uint64_t{1} << k, detail::binomial(n, k)),
                                                           detail::binomial(rho, k)));
  return total;
}

/// |{v : sum w_i |v_i| <= r}|.
inline std::uint64_t weighted_ball_count(const std::vector<Rational>& weights, const Rational& r) {
  if (r < 0) return 0;
  std::map<std::pair<std::size_t, Rational>, std::uint64_t> memo;
  return detail::axis_sum(weights, 0, r, [](std::int64_t t) -> std::uint64_t { return t == 0 ? 1 : 2; }, memo);
}

/// |ball(r) + {-m..m}^n|, closed form: y lies in the sum iff the weighted l1
/// distance from y to the cube is at most r, and each coordinate at cube
/// distance t > 0 has two choices while t = 0 has 2m + 1.
inline std::uint64_t box_sum_count(const std::vector<Rational>& weights, const Rational& r, std::int64_t m) {
  if (r < 0) return 0;
  const auto side = static_cast<std::uint64_t>(2 * m + 1);
  std::map<std::pair<std::size_t, Rational>, std::uint64_t> memo;
  return detail::axis_sum(weights, 0, r, [side](std::int64_t t) -> std::uint64_t { return t == 0 ? side : 2; }, memo);
}

struct BoxSumEnumeration {
  std::uint64_t count = 0;
  std::uint64_t points_visited = 0;
};

/// |ball(r) + {-m..m}^n| by visiting every point of the bounding box and
/// testing membership: y is in the sum iff y - clamp(y) lies in ball(r).
inline BoxSumEnumeration box_sum_enumerate(const WeightedAbelianGroup& group, const Rational& r, std::int64_t m,
                                           std::uint64_t point_cap) {
  const auto n = group.dimension();
  std::vector<std::int64_t> reach(n);
  std::uint64_t box = 1;
  for (std::size_t i = 0; i < n; ++i) {
    reach[i] = m + boost::rational_cast<std::int64_t>(floor(r / group.weights()[i]));
    box = detail::checked_mul(box, static_cast<std::uint64_t>(2 * reach[i] + 1));
  }
  if (box > point_cap) throw BudgetExceeded("box-sum enumeration needs " + std::to_string(box) + " points", point_cap);
  BoxSumEnumeration out;
  std::vector<std::int64_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = -reach[i];
  LatticePoint offset{std::vector<std::int64_t>(n, 0)};
  while (true) {
    ++out.points_visited;
    for (std::size_t i = 0; i < n; ++i) offset.coords[i] = y[i] - std::clamp<std::int64_t>(y[i], -m, m);
    if (group.length(offset) <= r) ++out.count;
    std::size_t axis = 0;
    while (axis < n && y[axis] == reach[axis]) {
      y[axis] = -reach[axis];
      ++axis;
    }
    if (axis == n) break;
    ++y[axis];
  }
  return out;
}

/// |S + {-m..m}^n| for an arbitrary finite S: sweep the first n-1 coordinates
/// of the bounding box and take the union of intervals on the last one.
inline std::uint64_t union_of_cubes_count(const std::vector<LatticePoint>& S, std::int64_t m) {
  if (S.empty()) return 0;
  const auto n = S.front().coords.size();
  std::vector<std::int64_t> lo(n, std::numeric_limits<std::int64_t>::max()), hi(n, std::numeric_limits<std::int64_t>::min());
  for (const auto& s : S)
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], s.coords[i] - m);
      hi[i] = std::max(hi[i], s.coords[i] + m);
    }
  std::uint64_t total = 0;
  std::vector<std::int64_t> prefix(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) prefix[i] = lo[i];
  std::vector<std::pair<std::int64_t, std::int64_t>> intervals;
  while (true) {
    intervals.clear();
    for (const auto& s : S) {
      bool hit = true;
      for (std::size_t i = 0; i + 1 < n && hit; ++i) hit = std::abs(prefix[i] - s.coords[i]) <= m;
      if (hit) intervals.emplace_back(s.coords[n - 1] - m, s.coords[n - 1] + m);
    }
    std::sort(intervals.begin(), intervals.end());
    std::int64_t covered_to = std::numeric_limits<std::int64_t>::min();
    for (auto [a, b] : intervals) {
      if (b <= covered_to) continue;
      auto start = std::max(a, covered_to + 1);
      total += static_cast<std::uint64_t>(b - start + 1);
      covered_to = b;
    }
    std::size_t axis = 0;
    while (axis + 1 < n && prefix[axis] == hi[axis]) {
      prefix[axis] = lo[axis];
      ++axis;
    }
    if (axis + 1 >= n) break;
    ++prefix[axis];
  }
  return total;
}

}  // namespace rdlab
