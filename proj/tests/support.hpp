#pragma once

#include "rdlab/groups.hpp"

#include <random>
#include <vector>

namespace rdlab::testing {

inline FreeGroup f2() { return FreeGroup(2); }

/// Z with unit weight, elements "(k)".
inline WeightedAbelianGroup zed(Rational weight = Rational(1)) { return WeightedAbelianGroup({weight}); }

inline VertexGroup infinite_cyclic() { return VertexGroup(FreeGroup(1)); }

/// Path u - v - w on vertices 0 - 1 - 2, Z vertex groups.
inline GraphProduct path_uvw() {
  return GraphProduct({infinite_cyclic(), infinite_cyclic(), infinite_cyclic()}, {{0, 1}, {1, 2}});
}

/// 5-cycle 0-1-2-3-4-0, Z vertex groups.
inline GraphProduct pentagon() {
  std::vector<VertexGroup> vs(5, infinite_cyclic());
  return GraphProduct(std::move(vs), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
}

/// a_v^e as a syllable word.
inline SyllableWord gen(const GraphProduct& gp, std::size_t v, int e = 1) {
  return gp.syllable(v, VertexElement(FreeGroup(1).generator(1, e)));
}

inline SyllableWord word(const GraphProduct& gp, std::initializer_list<std::pair<std::size_t, int>> letters) {
  auto out = gp.identity();
  for (auto [v, e] : letters) out = gp.multiply(out, gen(gp, v, e));
  return out;
}

inline FreeWord free_word(std::initializer_list<int> letters) { return FreeGroup(2).reduce(letters); }

/// Random product of `steps` generator moves.
template <GroupBackend G>
element_t<G> random_walk(const G& group, std::size_t steps, std::mt19937_64& rng) {
  auto moves = group.moves();
  auto x = group.identity();
  for (std::size_t i = 0; i < steps; ++i) x = group.multiply(x, moves[rng() % moves.size()]);
  return x;
}

/// Random graph-product element with syllable length exactly `lambda` (or
/// less if the draw cancels; retried until it hits).
inline SyllableWord random_syllable_word(const GraphProduct& gp, std::size_t lambda, std::mt19937_64& rng,
                                         int max_exponent = 2) {
  while (true) {
    auto x = gp.identity();
    for (std::size_t i = 0; i < lambda; ++i) {
      int e = static_cast<int>(rng() % static_cast<unsigned>(max_exponent)) + 1;
      if (rng() & 1) e = -e;
      x = gp.multiply(x, gen(gp, rng() % gp.size(), e));
    }
    if (gp.syllable_length(x) == lambda) return x;
  }
}

}  // namespace rdlab::testing
