#pragma once

#include "rdlab/core.hpp"

#include <concepts>
#include <string>
#include <string_view>
#include <vector>

namespace rdlab {

/// A group with canonical element payloads and a proper length function.
///
/// moves() must have the geodesic-prefix property: every element g admits a
/// product of moves m_1...m_n = g whose prefixes have nondecreasing length
/// bounded by L(g). Ball enumeration relies on it.
template <class G>
concept GroupBackend = requires(const G& g, const typename G::element_type& a, std::string_view text) {
  typename G::element_type;
  requires std::totally_ordered<typename G::element_type>;
  { hash_value(a) } -> std::convertible_to<std::size_t>;
  { g.identity() } -> std::same_as<typename G::element_type>;
  { g.multiply(a, a) } -> std::same_as<typename G::element_type>;
  { g.inverse(a) } -> std::same_as<typename G::element_type>;
  { g.length(a) } -> std::same_as<Rational>;
  { g.is_identity(a) } -> std::same_as<bool>;
  { g.compatible(a) } -> std::same_as<bool>;
  { g.contains(a) } -> std::same_as<bool>;
  { g.moves() } -> std::same_as<std::vector<typename G::element_type>>;
  { g.format(a) } -> std::same_as<std::string>;
  { g.parse(text) } -> std::same_as<typename G::element_type>;
};

template <GroupBackend G>
using element_t = typename G::element_type;

/// Throws BackendMismatch unless the element fits the backend's shape.
template <GroupBackend G>
void require_compatible(const G& group, const element_t<G>& a, std::string_view where) {
  if (!group.compatible(a)) throw BackendMismatch(std::string(where) + ": element does not belong to this backend");
}

/// Left-invariant pseudo-distance d(x, y) = L(x^-1 y).
template <GroupBackend G>
Rational distance(const G& group, const element_t<G>& x, const element_t<G>& y) {
  return group.length(group.multiply(group.inverse(x), y));
}

}  // namespace rdlab
