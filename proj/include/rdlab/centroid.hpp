#pragma once

#include "rdlab/concurrency.hpp"
#include "rdlab/enumeration.hpp"
#include "rdlab/groups.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace rdlab {

/// co : G x G -> G, the group acting on itself by left multiplication (free action, K = 1).
template <class E>
using CentroidMap = std::function<E(const E&, const E&)>;

// ---------------------------------------------------------------------------
// Tree medians

/// Median of (1, g, k) in the Cayley tree: the longest common prefix.
inline FreeWord tree_median(const FreeWord& g, const FreeWord& k) {
  std::size_t n = 0;
  while (n < g.letters.size() && n < k.letters.size() && g.letters[n] == k.letters[n]) ++n;
  return FreeWord{{g.letters.begin(), g.letters.begin() + static_cast<std::ptrdiff_t>(n)}};
}

inline CentroidMap<FreeWord> median_map(const FreeGroup& group) {
  return [group](const FreeWord& g, const FreeWord& k) {
    require_compatible(group, g, "tree_median");
    require_compatible(group, k, "tree_median");
    return tree_median(g, k);
  };
}

inline CentroidMap<VertexElement> median_map(const VertexGroup& group) {
  const auto& free = group.as<FreeGroup>("tree_median");
  return [free](const VertexElement& g, const VertexElement& k) -> VertexElement {
    auto pg = std::get_if<FreeWord>(&g);
    auto pk = std::get_if<FreeWord>(&k);
    if (!pg || !pk || !free.compatible(*pg) || !free.compatible(*pk))
      throw BackendMismatch("tree_median: element does not belong to this backend");
    return tree_median(*pg, *pk);
  };
}

inline Element tree_median(const Group& group, const Element& g, const Element& k) {
  const auto& free = group.as<FreeGroup>("tree_median");
  require_compatible(group, g, "tree_median");
  require_compatible(group, k, "tree_median");
  (void)free;
  return tree_median(std::get<FreeWord>(g), std::get<FreeWord>(k));
}

// ---------------------------------------------------------------------------
// Products

/// Componentwise centroid on a complete-graph product (a direct product):
/// co((a_v)_v, (b_v)_v) = (co_v(a_v, b_v))_v.
inline CentroidMap<SyllableWord> product_centroid(const GraphProduct& gp, std::vector<CentroidMap<VertexElement>> factors) {
  if (factors.size() != gp.size()) throw PreconditionFailed("product_centroid: one centroid map per vertex required");
  std::vector<std::size_t> all(gp.size());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = v;
  if (!gp.is_clique(all)) throw PreconditionFailed("product_centroid: graph must be complete");
  return [gp, factors = std::move(factors)](const SyllableWord& x, const SyllableWord& y) {
    auto component = [&](const SyllableWord& w, std::size_t v) {
      for (const auto& s : w.syllables)
        if (s.vertex == v) return s.value;
      return gp.vertex_group(v).identity();
    };
    std::vector<Syllable> parts;
    for (std::size_t v = 0; v < gp.size(); ++v) parts.push_back({v, factors[v](component(x, v), component(y, v))});
    return gp.from_syllables(parts);
  };
}

inline CentroidMap<SyllableWord> product_centroid(const GraphProduct& gp, CentroidMap<VertexElement> co_a,
                                                  CentroidMap<VertexElement> co_b) {
  return product_centroid(gp, std::vector<CentroidMap<VertexElement>>{std::move(co_a), std::move(co_b)});
}

/// Tree median on a free group; product of medians on a direct product of
/// free vertex groups.
inline CentroidMap<Element> default_centroid_map(const Group& group) {
  if (const auto* free = group.get_if<FreeGroup>()) {
    auto co = median_map(*free);
    return [co](const Element& g, const Element& k) -> Element {
      auto pg = std::get_if<FreeWord>(&g);
      auto pk = std::get_if<FreeWord>(&k);
      if (!pg || !pk) throw BackendMismatch("centroid: element does not belong to this backend");
      return co(*pg, *pk);
    };
  }
  if (const auto* gp = group.get_if<GraphProduct>()) {
    std::vector<CentroidMap<VertexElement>> factors;
    for (std::size_t v = 0; v < gp->size(); ++v) {
      if (!gp->vertex_group(v).get_if<FreeGroup>())
        throw PreconditionFailed("centroid: vertex " + std::to_string(v) + " is not a free group");
      factors.push_back(median_map(gp->vertex_group(v)));
    }
    auto co = product_centroid(*gp, std::move(factors));
    return [co](const Element& g, const Element& k) -> Element {
      auto pg = std::get_if<SyllableWord>(&g);
      auto pk = std::get_if<SyllableWord>(&k);
      if (!pg || !pk) throw BackendMismatch("centroid: element does not belong to this backend");
      return co(*pg, *pk);
    };
  }
  throw PreconditionFailed("centroid: no centroid map for this backend");
}

// ---------------------------------------------------------------------------
// Counting conditions

/// Exact count of a defining set. For truncated modes (c2, rc2) the count is a
/// lower bound for the supremum and `stabilized` says whether it stayed
/// unchanged over the last two unit radius increments; exact modes leave it empty.
struct CountReport {
  std::string mode;
  std::string fixed_element;
  Rational radius;
  std::uint64_t count = 0;
  std::optional<bool> stabilized;
  bool truncated = false;
};

namespace detail {

/// |{key(x) : x in domain}| with per-worker sets merged afterwards.
template <class E, class Key, class Fn>
std::uint64_t distinct_count(const std::vector<E>& domain, Fn&& key_of) {
  std::vector<std::unordered_set<Key, Hash>> partial(std::min(worker_count(), std::max<std::size_t>(1, domain.size())));
  parallel_chunks(domain.size(), [&](std::size_t worker, std::size_t begin, std::size_t end) {
    for (auto i = begin; i < end; ++i) partial[worker].insert(key_of(domain[i]));
  });
  for (std::size_t w = 1; w < partial.size(); ++w) partial[0].merge(partial[w]);
  return partial.empty() ? 0 : partial[0].size();
}

/// Counts distinct keys over a length-sorted domain; also returns the counts
/// at radius - 1 and radius - 2 for the stabilization flag.
template <class E, class Key, class Fn>
CountReport truncated_count(const Ball<E>& domain, const Rational& radius, Fn&& key_of, std::string mode) {
  std::unordered_set<Key, Hash> seen;
  std::optional<std::uint64_t> at_minus2, at_minus1;
  const Rational r1 = radius - 1, r2 = radius - 2;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (r2 >= 0 && !at_minus2 && domain.lengths[i] > r2) at_minus2 = seen.size();
    if (r1 >= 0 && !at_minus1 && domain.lengths[i] > r1) at_minus1 = seen.size();
    seen.insert(key_of(domain.elements[i]));
  }
  if (r2 >= 0 && !at_minus2) at_minus2 = seen.size();
  if (r1 >= 0 && !at_minus1) at_minus1 = seen.size();
  CountReport out;
  out.mode = std::move(mode);
  out.radius = radius;
  out.count = seen.size();
  out.truncated = true;
  out.stabilized = at_minus2 && at_minus1 && *at_minus2 == out.count && *at_minus1 == out.count;
  return out;
}

}  // namespace detail

/// (c1): |{co(g, k) : L(g) <= r}|.
template <GroupBackend G>
CountReport verify_c1(const G& group, const CentroidMap<element_t<G>>& co, const element_t<G>& k, const Rational& r,
                      std::size_t cap = kDefaultElementCap) {
  require_compatible(group, k, "verify_c1");
  auto domain = ball(group, r, cap);
  CountReport out{"c1", group.format(k), r, 0, std::nullopt, false};
  out.count = detail::distinct_count<element_t<G>, element_t<G>>(domain.elements,
                                                                  [&](const element_t<G>& g) { return co(g, k); });
  return out;
}

/// (c2), truncated: |{co(g, k) : k in ball(R)}|.
template <GroupBackend G>
CountReport verify_c2(const G& group, const CentroidMap<element_t<G>>& co, const element_t<G>& g, const Rational& R,
                      std::size_t cap = kDefaultElementCap) {
  require_compatible(group, g, "verify_c2");
  auto domain = ball(group, R, cap);
  auto out = detail::truncated_count<element_t<G>, element_t<G>>(
      domain, R, [&](const element_t<G>& k) { return co(g, k); }, "c2");
  out.fixed_element = group.format(g);
  return out;
}

/// (c3): |{g^-1 co(g, g h) : L(g) <= r}|.
template <GroupBackend G>
CountReport verify_c3(const G& group, const CentroidMap<element_t<G>>& co, const element_t<G>& h, const Rational& r,
                      std::size_t cap = kDefaultElementCap) {
  require_compatible(group, h, "verify_c3");
  auto domain = ball(group, r, cap);
  CountReport out{"c3", group.format(h), r, 0, std::nullopt, false};
  out.count = detail::distinct_count<element_t<G>, element_t<G>>(domain.elements, [&](const element_t<G>& g) {
    return group.multiply(group.inverse(g), co(g, group.multiply(g, h)));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Graph products: clique factorization and the relative centroid map

/// g = g1 s1 w and h = w^-1 s2 h1 as factorizations, with s1, s2 in the clique
/// subgroup G_C, lambda(s1) = lambda(s2) = lambda(s1 s2) = |C| and
/// lambda(g h) = lambda(g) + lambda(h) - q, q = |C| + 2 lambda(w).
struct CliqueFactorization {
  SyllableWord g1, s1, w, s2, h1;
  std::vector<std::size_t> clique;
  std::size_t q = 0;

  bool operator==(const CliqueFactorization&) const = default;
};

/// Every violated invariant of `f` as a message; empty means sound.
inline std::vector<std::string> factorization_violations(const GraphProduct& gp, const SyllableWord& g,
                                                         const SyllableWord& h, const CliqueFactorization& f) {
  std::vector<std::string> issues;
  auto lam = [&](const SyllableWord& x) { return gp.syllable_length(x); };
  auto gh = gp.multiply(g, h);
  auto g_parts = std::vector<SyllableWord>{f.g1, f.s1, f.w};
  auto h_parts = std::vector<SyllableWord>{gp.inverse(f.w), f.s2, f.h1};
  auto product = [&](const std::vector<SyllableWord>& parts) {
    auto acc = gp.identity();
    for (const auto& p : parts) acc = gp.multiply(acc, p);
    return acc;
  };
  if (product(g_parts) != g)
    issues.push_back("g != g1 s1 w");
  else if (!is_factorization(gp, g, g_parts))
    issues.push_back("g = g1 s1 w is not a factorization");
  if (product(h_parts) != h)
    issues.push_back("h != w^-1 s2 h1");
  else if (!is_factorization(gp, h, h_parts))
    issues.push_back("h = w^-1 s2 h1 is not a factorization");
  if (!std::is_sorted(f.clique.begin(), f.clique.end()) ||
      std::adjacent_find(f.clique.begin(), f.clique.end()) != f.clique.end())
    issues.push_back("clique vertex list not strictly increasing");
  if (!gp.is_clique(f.clique)) issues.push_back("C is not a clique");
  if (!gp.in_subgroup(f.s1, f.clique) || !gp.in_subgroup(f.s2, f.clique)) issues.push_back("s1 or s2 outside G_C");
  auto c = f.clique.size();
  if (lam(f.s1) != c || lam(f.s2) != c || lam(gp.multiply(f.s1, f.s2)) != c)
    issues.push_back("lambda(s1), lambda(s2), lambda(s1 s2) not all |C|");
  if (lam(g) + lam(h) < lam(gh) || f.q != lam(g) + lam(h) - lam(gh))
    issues.push_back("q != lambda(g) + lambda(h) - lambda(gh)");
  if (f.q != c + 2 * lam(f.w)) issues.push_back("q != |C| + 2 lambda(w)");
  return issues;
}

/// Reads the factorization off an instrumented reduction of g h: syllables
/// of g that cancel against h form w, pairs that merge without vanishing give
/// C, s1 and s2, and the untouched remainders give g1 and h1.
inline CliqueFactorization clique_factorize(const GraphProduct& gp, const SyllableWord& g, const SyllableWord& h) {
  if (!gp.contains(g) || !gp.contains(h)) throw BackendMismatch("clique_factorize: elements must be canonical words of this graph product");
  enum class Role { untouched, merged, cancelled };
  const std::size_t m = g.syllables.size();
  std::vector<TaggedSyllable> word;
  for (std::size_t i = 0; i < m; ++i) word.push_back({g.syllables[i], i});
  std::vector<Role> g_role(m, Role::untouched), h_role(h.syllables.size(), Role::untouched);
  for (std::size_t j = 0; j < h.syllables.size(); ++j) {
    auto outcome = gp.absorb(word, h.syllables[j], m + j);
    if (outcome.kind == AbsorbOutcome::Kind::appended) continue;
    auto partner = outcome.partner_tag;
    if (partner >= m || g_role[partner] != Role::untouched)
      throw ContractViolation("clique_factorize: syllable of h interacted with a syllable not from g");
    auto role = outcome.kind == AbsorbOutcome::Kind::merged ? Role::merged : Role::cancelled;
    g_role[partner] = role;
    h_role[j] = role;
  }
  auto pick = [&](const SyllableWord& x, const std::vector<Role>& roles, Role r) {
    std::vector<Syllable> part;
    for (std::size_t i = 0; i < roles.size(); ++i)
      if (roles[i] == r) part.push_back(x.syllables[i]);
    return gp.from_syllables(part);
  };
  CliqueFactorization f;
  f.g1 = pick(g, g_role, Role::untouched);
  f.s1 = pick(g, g_role, Role::merged);
  f.w = pick(g, g_role, Role::cancelled);
  f.s2 = pick(h, h_role, Role::merged);
  f.h1 = pick(h, h_role, Role::untouched);
  for (std::size_t i = 0; i < m; ++i)
    if (g_role[i] == Role::merged) f.clique.push_back(g.syllables[i].vertex);
  std::sort(f.clique.begin(), f.clique.end());
  f.q = gp.syllable_length(g) + gp.syllable_length(h) - gp.syllable_length(gp.normal_order(word));
  if (auto issues = factorization_violations(gp, g, h, f); !issues.empty())
    throw ContractViolation("clique_factorize: " + issues.front());
  return f;
}

template <class E>
struct RcTriple {
  E alpha, beta, gamma;
  bool operator==(const RcTriple&) const = default;
};

template <class E>
using RcMap = std::function<RcTriple<E>(const E&, const E&)>;

/// rc(g, k) = (g1, g1 s1, g1 s1 s2) from the clique factorization of (g, g^-1 k).
inline RcTriple<SyllableWord> graph_product_rc(const GraphProduct& gp, const SyllableWord& g, const SyllableWord& k) {
  auto f = clique_factorize(gp, g, gp.multiply(gp.inverse(g), k));
  auto beta = gp.multiply(f.g1, f.s1);
  auto gamma = gp.multiply(beta, f.s2);
  return {f.g1, std::move(beta), std::move(gamma)};
}

inline RcMap<SyllableWord> clique_rc_map(const GraphProduct& gp) {
  return [gp](const SyllableWord& g, const SyllableWord& k) { return graph_product_rc(gp, g, k); };
}

inline RcMap<Element> clique_rc_map(const Group& group) {
  auto inner = clique_rc_map(group.as<GraphProduct>("graph_product_rc"));
  return [inner](const Element& g, const Element& k) -> RcTriple<Element> {
    auto pg = std::get_if<SyllableWord>(&g);
    auto pk = std::get_if<SyllableWord>(&k);
    if (!pg || !pk) throw BackendMismatch("graph_product_rc: element does not belong to this backend");
    auto t = inner(*pg, *pk);
    return {std::move(t.alpha), std::move(t.beta), std::move(t.gamma)};
  };
}

enum class RcMode { rc1, rc2, rc3 };

inline const char* to_string(RcMode mode) {
  switch (mode) {
    case RcMode::rc1: return "rc1";
    case RcMode::rc2: return "rc2";
    case RcMode::rc3: return "rc3";
  }
  return "?";
}

template <class E>
struct ElementPair {
  E first, second;
  auto operator<=>(const ElementPair&) const = default;
  bool operator==(const ElementPair&) const = default;
};

template <class E>
std::size_t hash_value(const ElementPair<E>& p) {
  return hash_combine(hash_value(p.first), hash_value(p.second));
}

/// rc1 fixes k and counts pairs (alpha, gamma) over L(g) <= r; rc2 fixes g and
/// counts (alpha, beta) over k in ball(r) (truncated); rc3 fixes h and counts
/// g^-1 (beta, gamma) of rc(g, g h) over L(g) <= r.
template <GroupBackend G>
CountReport verify_rc(const G& group, const RcMap<element_t<G>>& rc, RcMode mode, const element_t<G>& fixed,
                      const Rational& r, std::size_t cap = kDefaultElementCap) {
  using E = element_t<G>;
  using P = ElementPair<E>;
  require_compatible(group, fixed, "verify_rc");
  auto domain = ball(group, r, cap);
  if (mode == RcMode::rc2) {
    auto out = detail::truncated_count<E, P>(
        domain, r,
        [&](const E& k) {
          auto t = rc(fixed, k);
          return P{t.alpha, t.beta};
        },
        "rc2");
    out.fixed_element = group.format(fixed);
    return out;
  }
  CountReport out{to_string(mode), group.format(fixed), r, 0, std::nullopt, false};
  if (mode == RcMode::rc1) {
    out.count = detail::distinct_count<E, P>(domain.elements, [&](const E& g) {
      auto t = rc(g, fixed);
      return P{t.alpha, t.gamma};
    });
  } else {
    out.count = detail::distinct_count<E, P>(domain.elements, [&](const E& g) {
      auto t = rc(g, group.multiply(g, fixed));
      auto gi = group.inverse(g);
      return P{group.multiply(gi, t.beta), group.multiply(gi, t.gamma)};
    });
  }
  return out;
}

/// (rc4) with P(t) = t: d(alpha, beta) <= L(g), d(alpha, gamma) <= L(k), d(beta, gamma) <= L(g^-1 k).
struct Rc4Report {
  Rational d_alpha_beta, d_alpha_gamma, d_beta_gamma;
  Rational length_g, length_k, length_h;
  bool holds = false;
};

template <GroupBackend G>
Rc4Report rc4_report(const G& group, const RcMap<element_t<G>>& rc, const element_t<G>& g, const element_t<G>& k) {
  require_compatible(group, g, "verify_rc4");
  require_compatible(group, k, "verify_rc4");
  auto t = rc(g, k);
  Rc4Report out;
  out.d_alpha_beta = distance(group, t.alpha, t.beta);
  out.d_alpha_gamma = distance(group, t.alpha, t.gamma);
  out.d_beta_gamma = distance(group, t.beta, t.gamma);
  out.length_g = group.length(g);
  out.length_k = group.length(k);
  out.length_h = distance(group, g, k);
  out.holds = out.d_alpha_beta <= out.length_g && out.d_alpha_gamma <= out.length_k && out.d_beta_gamma <= out.length_h;
  return out;
}

template <GroupBackend G>
bool verify_rc4(const G& group, const RcMap<element_t<G>>& rc, const element_t<G>& g, const element_t<G>& k) {
  return rc4_report(group, rc, g, k).holds;
}

}  // namespace rdlab
