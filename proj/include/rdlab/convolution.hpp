#pragma once

#include "rdlab/enumeration.hpp"
#include "rdlab/groups/concepts.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace rdlab {

class EmptySupport : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

/// Finitely supported function G -> R_+. Only positive values are stored.
template <class E>
class SparseFunction {
 public:
  using map_type = std::map<E, double>;

  SparseFunction() = default;

  static SparseFunction delta(E e) {
    SparseFunction f;
    f.set(std::move(e), 1.0);
    return f;
  }

  template <class Range>
  static SparseFunction indicator(const Range& elements) {
    SparseFunction f;
    for (const auto& e : elements) f.set(e, 1.0);
    return f;
  }

  /// Stores v at e; v == 0 removes the entry.
  void set(E e, double v) {
    if (!std::isfinite(v) || v < 0) throw PreconditionFailed("function values must be finite and nonnegative");
    if (v == 0)
      entries_.erase(e);
    else
      entries_[std::move(e)] = v;
  }

  void add(const E& e, double v) { set(e, value(e) + v); }

  double value(const E& e) const {
    auto it = entries_.find(e);
    return it == entries_.end() ? 0.0 : it->second;
  }

  const map_type& entries() const noexcept { return entries_; }
  std::size_t support_size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::vector<E> support() const {
    std::vector<E> out;
    out.reserve(entries_.size());
    for (const auto& [e, v] : entries_) out.push_back(e);
    return out;
  }

  bool operator==(const SparseFunction&) const = default;

 private:
  map_type entries_;
};

namespace detail {

/// Sum of f(v) over values, added in ascending order so that the result
/// depends only on the multiset of values.
template <class E, class F>
double ordered_sum(const SparseFunction<E>& f, F&& transform) {
  std::vector<double> terms;
  terms.reserve(f.support_size());
  for (const auto& [e, v] : f.entries()) terms.push_back(transform(v));
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

template <GroupBackend G>
void require_function(const G& group, const SparseFunction<element_t<G>>& f, std::string_view where) {
  for (const auto& [e, v] : f.entries()) require_compatible(group, e, where);
}

}  // namespace detail

template <class E>
double l2_norm_squared(const SparseFunction<E>& f) {
  return detail::ordered_sum(f, [](double v) { return v * v; });
}

template <class E>
double l2_norm(const SparseFunction<E>& f) {
  return std::sqrt(l2_norm_squared(f));
}

template <class E>
double l1_norm(const SparseFunction<E>& f) {
  return detail::ordered_sum(f, [](double v) { return v; });
}

/// Maximal length over the support.
template <GroupBackend G>
Rational propagation(const G& group, const SparseFunction<element_t<G>>& f) {
  if (f.empty()) throw EmptySupport("propagation of a function with empty support");
  Rational best(0);
  for (const auto& [e, v] : f.entries()) {
    require_compatible(group, e, "propagation");
    best = std::max(best, group.length(e));
  }
  return best;
}

/// (phi * psi)(k) = sum_g phi(g) psi(g^-1 k). Summation runs over phi's then
/// psi's support in canonical order, so results are reproducible bit for bit.
template <GroupBackend G>
SparseFunction<element_t<G>> convolve(const G& group, const SparseFunction<element_t<G>>& phi,
                                      const SparseFunction<element_t<G>>& psi) {
  detail::require_function(group, phi, "convolve");
  detail::require_function(group, psi, "convolve");
  std::unordered_map<element_t<G>, double, Hash> acc;
  for (const auto& [g, a] : phi.entries())
    for (const auto& [h, b] : psi.entries()) acc[group.multiply(g, h)] += a * b;
  SparseFunction<element_t<G>> out;
  for (auto& [k, v] : acc) out.set(k, v);
  return out;
}

/// ||phi * psi||^2 / (||phi||^2 ||psi||^2).
template <GroupBackend G>
double rd_ratio(const G& group, const SparseFunction<element_t<G>>& phi, const SparseFunction<element_t<G>>& psi) {
  if (phi.empty() || psi.empty()) throw EmptySupport("rd_ratio needs nonempty supports");
  auto conv = convolve(group, phi, psi);
  return l2_norm_squared(conv) / (l2_norm_squared(phi) * l2_norm_squared(psi));
}

/// G-invariant set of triples: all of G^3, or G.H^3 for a subgroup H given
/// by its membership predicate.
template <class E>
class TripleSet {
 public:
  enum class Kind { all, subgroup_cosets };

  static TripleSet all() { return TripleSet(Kind::all, {}, "all"); }

  static TripleSet subgroup_cosets(std::function<bool(const E&)> in_subgroup, std::string name = "G.H^3") {
    return TripleSet(Kind::subgroup_cosets, std::move(in_subgroup), std::move(name));
  }

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  /// (x, z, y) in G.H^3 iff x^-1 z and x^-1 y both lie in H.
  template <GroupBackend G>
    requires std::same_as<element_t<G>, E>
  bool contains(const G& group, const E& x, const E& z, const E& y) const {
    if (kind_ == Kind::all) return true;
    auto xi = group.inverse(x);
    return in_subgroup_(group.multiply(xi, z)) && in_subgroup_(group.multiply(xi, y));
  }

 private:
  TripleSet(Kind kind, std::function<bool(const E&)> pred, std::string name)
      : kind_(kind), in_subgroup_(std::move(pred)), name_(std::move(name)) {}

  Kind kind_;
  std::function<bool(const E&)> in_subgroup_;
  std::string name_;
};

/// y -> sum over z with (1, z, y) in T of phi(z) psi(z^-1 y), i.e. the
/// relative convolution of the kernels (x, y) -> phi(x^-1 y) evaluated at x = 1.
template <GroupBackend G>
SparseFunction<element_t<G>> relative_convolve(const G& group, const SparseFunction<element_t<G>>& phi,
                                               const SparseFunction<element_t<G>>& psi,
                                               const TripleSet<element_t<G>>& triples) {
  detail::require_function(group, phi, "relative_convolve");
  detail::require_function(group, psi, "relative_convolve");
  const auto one = group.identity();
  std::unordered_map<element_t<G>, double, Hash> acc;
  for (const auto& [z, a] : phi.entries())
    for (const auto& [h, b] : psi.entries()) {
      auto y = group.multiply(z, h);
      if (!triples.contains(group, one, z, y)) continue;
      acc[y] += a * b;
    }
  SparseFunction<element_t<G>> out;
  for (auto& [k, v] : acc) out.set(k, v);
  return out;
}

struct OperatorNormEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t window_size = 0;
};

/// Lower bound for the operator norm of f -> phi * f on l^2(G): the largest
/// singular value of that operator restricted to functions supported on
/// ball(window_radius), by power iteration on A^T A from the uniform vector.
template <GroupBackend G>
OperatorNormEstimate operator_norm_estimate(const G& group, const SparseFunction<element_t<G>>& phi,
                                            const Rational& window_radius, std::size_t max_iters, double tol,
                                            std::size_t cap = kDefaultElementCap) {
  if (phi.empty()) throw EmptySupport("operator_norm_estimate needs a nonempty support");
  if (max_iters == 0) throw PreconditionFailed("max_iters must be positive");
  detail::require_function(group, phi, "operator_norm_estimate");
  auto window = ball(group, window_radius, cap);

  // Column j of A lists (row, value) for y = g x_j over g in supp(phi).
  std::unordered_map<element_t<G>, std::size_t, Hash> rows;
  std::vector<std::vector<std::pair<std::size_t, double>>> columns(window.size());
  for (std::size_t j = 0; j < window.size(); ++j)
    for (const auto& [g, v] : phi.entries()) {
      auto y = group.multiply(g, window.elements[j]);
      auto [it, inserted] = rows.try_emplace(std::move(y), rows.size());
      columns[j].emplace_back(it->second, v);
    }

  const std::size_t n = window.size();
  std::vector<double> f(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> image(rows.size());
  std::vector<double> back(n);
  OperatorNormEstimate out;
  out.window_size = n;
  double previous = 0.0;
  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    std::fill(image.begin(), image.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (auto [row, v] : columns[j]) image[row] += v * f[j];
    double sq = 0.0;
    for (double x : image) sq += x * x;
    double sigma = std::sqrt(sq);
    out.value = std::max(out.value, sigma);
    out.iterations = iter;
    if (iter > 1 && std::abs(sigma - previous) <= tol * sigma) {
      out.converged = true;
      break;
    }
    previous = sigma;
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (auto [row, v] : columns[j]) acc += v * image[row];
      back[j] = acc;
      norm += acc * acc;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (std::size_t j = 0; j < n; ++j) f[j] = back[j] / norm;
  }
  return out;
}

}  // namespace rdlab
