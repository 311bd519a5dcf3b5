#pragma once

#include "rdlab/groups/concepts.hpp"
#include "rdlab/groups/cyclic_group.hpp"
#include "rdlab/groups/free_group.hpp"
#include "rdlab/groups/graph_product.hpp"
#include "rdlab/groups/variant_group.hpp"
#include "rdlab/groups/weighted_abelian.hpp"

#include <span>

namespace rdlab {

/// Any configured backend.
using Group = VariantGroup<FreeGroup, WeightedAbelianGroup, CyclicGroup, GraphProduct>;
using Element = Group::element_type;

inline std::size_t syllable_length(const Group& group, const Element& g) {
  const auto& gp = group.as<GraphProduct>("syllable_length");
  require_compatible(group, g, "syllable_length");
  return gp.syllable_length(std::get<SyllableWord>(g));
}

/// Whether g = u_1 ... u_n has lambda(g) = sum lambda(u_i).
/// Throws PreconditionFailed when the parts do not multiply to g.
inline bool is_factorization(const GraphProduct& gp, const SyllableWord& g, std::span<const SyllableWord> parts) {
  auto product = gp.identity();
  std::size_t total = 0;
  for (const auto& p : parts) {
    product = gp.multiply(product, p);
    total += gp.syllable_length(p);
  }
  if (product != g) throw PreconditionFailed("is_factorization: parts do not multiply to g");
  return gp.syllable_length(g) == total;
}

inline bool is_factorization(const Group& group, const Element& g, std::span<const Element> parts) {
  const auto& gp = group.as<GraphProduct>("is_factorization");
  require_compatible(group, g, "is_factorization");
  std::vector<SyllableWord> words;
  for (const auto& p : parts) {
    require_compatible(group, p, "is_factorization");
    words.push_back(std::get<SyllableWord>(p));
  }
  return is_factorization(gp, std::get<SyllableWord>(g), words);
}

}  // namespace rdlab
