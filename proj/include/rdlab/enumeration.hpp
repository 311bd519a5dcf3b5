#pragma once

#include "rdlab/groups/concepts.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <unordered_set>
#include <vector>

namespace rdlab {

inline constexpr std::size_t kDefaultElementCap = 10'000'000;

/// Elements of length <= radius (or exactly radius for spheres), sorted by
/// (length, canonical payload), with their lengths alongside.
template <class E>
struct Ball {
  Rational radius;
  std::vector<E> elements;
  std::vector<Rational> lengths;

  std::size_t size() const noexcept { return elements.size(); }
  bool empty() const noexcept { return elements.empty(); }
};

namespace detail {

template <class E>
Ball<E> sorted_ball(const Rational& r, std::vector<E> elements, std::vector<Rational> lengths) {
  std::vector<std::size_t> order(elements.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (lengths[a] != lengths[b]) return lengths[a] < lengths[b];
    return elements[a] < elements[b];
  });
  Ball<E> out{r, {}, {}};
  out.elements.reserve(order.size());
  out.lengths.reserve(order.size());
  for (auto i : order) {
    out.elements.push_back(std::move(elements[i]));
    out.lengths.push_back(lengths[i]);
  }
  return out;
}

}  // namespace detail

/// Exhaustive ball {g : L(g) <= r}. Frontier expansion over the backend's
/// moves, or direct lattice enumeration where the backend offers it.
template <GroupBackend G>
Ball<element_t<G>> ball(const G& group, const Rational& r, std::size_t cap = kDefaultElementCap) {
  using E = element_t<G>;
  if (r < 0) throw PreconditionFailed("ball radius must be >= 0");
  std::vector<E> elements;
  bool enumerated = false;
  if constexpr (requires { group.direct_ball(r, cap); }) {
    if (auto direct = group.direct_ball(r, cap)) {
      elements = std::move(*direct);
      enumerated = true;
    }
  }
  if (!enumerated) {
    std::unordered_set<E, Hash> seen;
    std::deque<E> frontier;
    auto moves = group.moves();
    seen.insert(group.identity());
    frontier.push_back(group.identity());
    while (!frontier.empty()) {
      E g = std::move(frontier.front());
      frontier.pop_front();
      for (const auto& m : moves) {
        E h = group.multiply(g, m);
        if (group.length(h) > r || seen.contains(h)) continue;
        if (seen.size() >= cap) throw BudgetExceeded("ball enumeration exceeded element cap", cap);
        seen.insert(h);
        frontier.push_back(std::move(h));
      }
      elements.push_back(std::move(g));
    }
  }
  std::vector<Rational> lengths;
  lengths.reserve(elements.size());
  for (const auto& e : elements) lengths.push_back(group.length(e));
  return detail::sorted_ball(r, std::move(elements), std::move(lengths));
}

/// Elements of length exactly r.
template <GroupBackend G>
Ball<element_t<G>> sphere(const G& group, const Rational& r, std::size_t cap = kDefaultElementCap) {
  auto full = ball(group, r, cap);
  Ball<element_t<G>> out{r, {}, {}};
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (full.lengths[i] != r) continue;
    out.elements.push_back(std::move(full.elements[i]));
    out.lengths.push_back(full.lengths[i]);
  }
  return out;
}

/// Distinct lengths attained in a ball, ascending.
template <class E>
std::vector<Rational> attained_lengths(const Ball<E>& b) {
  std::vector<Rational> out;
  for (const auto& l : b.lengths)
    if (out.empty() || out.back() != l) out.push_back(l);
  return out;
}

/// {s x : s in S, x in X}, deduplicated, sorted by payload.
template <GroupBackend G>
std::vector<element_t<G>> product_set(const G& group, const std::vector<element_t<G>>& S,
                                      const std::vector<element_t<G>>& X) {
  std::unordered_set<element_t<G>, Hash> out;
  for (const auto& s : S) require_compatible(group, s, "product_set");
  for (const auto& x : X) require_compatible(group, x, "product_set");
  for (const auto& s : S)
    for (const auto& x : X) out.insert(group.multiply(s, x));
  std::vector<element_t<G>> sorted(out.begin(), out.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

/// CSV with columns element,length.
template <GroupBackend G>
void write_ball_csv(std::ostream& out, const G& group, const Ball<element_t<G>>& b) {
  out << "element,length\n";
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto text = group.format(b.elements[i]);
    bool quote = text.find_first_of(",\"") != std::string::npos;
    if (quote) {
      std::string escaped;
      for (char c : text) escaped += c == '"' ? std::string("\"\"") : std::string(1, c);
      text = "\"" + escaped + "\"";
    }
    out << text << ',' << to_string(b.lengths[i]) << '\n';
  }
}

}  // namespace rdlab
