#pragma once

#include "rdlab/groups/cyclic_group.hpp"
#include "rdlab/groups/free_group.hpp"
#include "rdlab/groups/variant_group.hpp"
#include "rdlab/groups/weighted_abelian.hpp"

#include <algorithm>
#include <compare>
#include <string>
#include <utility>
#include <vector>

namespace rdlab {

/// Backends allowed as vertex groups of a graph product.
using VertexGroup = VariantGroup<FreeGroup, WeightedAbelianGroup, CyclicGroup>;
using VertexElement = VertexGroup::element_type;

/// One nontrivial factor lying in a single vertex group.
struct Syllable {
  std::size_t vertex = 0;
  VertexElement value;

  auto operator<=>(const Syllable&) const = default;
  bool operator==(const Syllable&) const = default;
};

/// Reduced syllable sequence in normal order: among all shuffles of the
/// reduced form it is the one whose vertex sequence is lexicographically least.
struct SyllableWord {
  std::vector<Syllable> syllables;

  auto operator<=>(const SyllableWord&) const = default;
  bool operator==(const SyllableWord&) const = default;
};

inline std::size_t hash_value(const SyllableWord& w) {
  std::size_t h = 0x9a9f;
  for (const auto& s : w.syllables) h = hash_combine(hash_combine(h, s.vertex), hash_value(s.value));
  return h;
}

/// Syllable tagged with its provenance, used while instrumenting a reduction.
struct TaggedSyllable {
  Syllable syllable;
  std::size_t tag = 0;
};

/// What happened when one syllable was pushed onto a reduced word.
struct AbsorbOutcome {
  enum class Kind { appended, merged, cancelled };
  Kind kind = Kind::appended;
  std::size_t partner_tag = 0;  // tag of the syllable it merged with or cancelled
};

/// Graph product of vertex groups over a simple graph, with length
/// L(g) = sum_i L_{v_i}(g_i) + lambda(g) over a reduced form.
class GraphProduct {
 public:
  using element_type = SyllableWord;
  using Edge = std::pair<std::size_t, std::size_t>;

  GraphProduct(std::vector<VertexGroup> vertex_groups, const std::vector<Edge>& edges)
      : vertex_groups_(std::move(vertex_groups)),
        adjacency_(vertex_groups_.size(), std::vector<bool>(vertex_groups_.size(), false)) {
    if (vertex_groups_.empty()) throw PreconditionFailed("graph product needs at least one vertex");
    for (auto [u, v] : edges) {
      if (u >= size() || v >= size()) throw PreconditionFailed("edge endpoint out of range");
      if (u == v) throw PreconditionFailed("graph has a loop at vertex " + std::to_string(u));
      if (adjacency_[u][v]) throw PreconditionFailed("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
      adjacency_[u][v] = adjacency_[v][u] = true;
    }
  }

  std::size_t size() const noexcept { return vertex_groups_.size(); }
  const VertexGroup& vertex_group(std::size_t v) const { return vertex_groups_.at(v); }
  bool adjacent(std::size_t u, std::size_t v) const { return adjacency_[u][v]; }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t u = 0; u < size(); ++u)
      for (std::size_t v = u + 1; v < size(); ++v)
        if (adjacency_[u][v]) out.emplace_back(u, v);
    return out;
  }

  bool is_clique(const std::vector<std::size_t>& vertices) const {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i] >= size()) return false;
      for (std::size_t j = i + 1; j < vertices.size(); ++j)
        if (!adjacent(vertices[i], vertices[j])) return false;
    }
    return true;
  }

  SyllableWord identity() const { return {}; }

  /// Element of the vertex group G_v, embedded.
  SyllableWord syllable(std::size_t v, VertexElement x) const {
    return from_syllables({Syllable{v, std::move(x)}});
  }

  /// Canonical form of an arbitrary product of (possibly trivial, mergeable) syllables.
  SyllableWord from_syllables(const std::vector<Syllable>& raw) const {
    std::vector<TaggedSyllable> word;
    for (const auto& s : raw) {
      check_syllable_shape(s);
      absorb(word, s, 0);
    }
    return normal_order(word);
  }

  SyllableWord multiply(const SyllableWord& a, const SyllableWord& b) const {
    std::vector<TaggedSyllable> word;
    word.reserve(a.syllables.size() + b.syllables.size());
    for (const auto& s : a.syllables) word.push_back({s, 0});
    for (const auto& s : b.syllables) absorb(word, s, 0);
    return normal_order(word);
  }

  SyllableWord inverse(const SyllableWord& a) const {
    std::vector<TaggedSyllable> word;
    word.reserve(a.syllables.size());
    for (auto it = a.syllables.rbegin(); it != a.syllables.rend(); ++it)
      word.push_back({Syllable{it->vertex, vertex_groups_[it->vertex].inverse(it->value)}, 0});
    return normal_order(word);
  }

  Rational length(const SyllableWord& a) const {
    Rational total(static_cast<std::int64_t>(a.syllables.size()));
    for (const auto& s : a.syllables) total += vertex_groups_[s.vertex].length(s.value);
    return total;
  }

  std::size_t syllable_length(const SyllableWord& a) const noexcept { return a.syllables.size(); }

  bool is_identity(const SyllableWord& a) const noexcept { return a.syllables.empty(); }

  bool compatible(const SyllableWord& a) const {
    for (const auto& s : a.syllables)
      if (s.vertex >= size() || !vertex_groups_[s.vertex].compatible(s.value)) return false;
    return true;
  }

  bool contains(const SyllableWord& a) const {
    if (!compatible(a)) return false;
    for (const auto& s : a.syllables)
      if (!vertex_groups_[s.vertex].contains(s.value) || vertex_groups_[s.vertex].is_identity(s.value)) return false;
    return from_syllables(a.syllables) == a;
  }

  /// Single-syllable words built from each vertex group's moves.
  std::vector<SyllableWord> moves() const {
    std::vector<SyllableWord> out;
    for (std::size_t v = 0; v < size(); ++v)
      for (auto& m : vertex_groups_[v].moves()) out.push_back(SyllableWord{{Syllable{v, std::move(m)}}});
    return out;
  }

  /// True iff every syllable lies in a vertex group from `vertices`.
  bool in_subgroup(const SyllableWord& a, const std::vector<std::size_t>& vertices) const {
    for (const auto& s : a.syllables)
      if (std::find(vertices.begin(), vertices.end(), s.vertex) == vertices.end()) return false;
    return true;
  }

  /// "v0:a^2 | v2:a^-1"; identity is "1".
  std::string format(const SyllableWord& a) const {
    if (a.syllables.empty()) return "1";
    std::string out;
    for (const auto& s : a.syllables) {
      if (!out.empty()) out += " | ";
      out += "v" + std::to_string(s.vertex) + ":" + vertex_groups_[s.vertex].format(s.value);
    }
    return out;
  }

  SyllableWord parse(std::string_view text) const {
    auto s = detail::trim(text);
    if (s == "1" || s.empty()) return identity();
    std::vector<Syllable> raw;
    std::size_t start = 0;
    while (true) {
      auto bar = s.find('|', start);
      auto piece = detail::trim(s.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
      auto colon = piece.find(':');
      if (piece.size() < 3 || piece.front() != 'v' || colon == std::string_view::npos)
        throw ParseError("bad syllable '" + std::string(piece) + "', expected v<i>:<element>");
      auto v = detail::parse_int(piece.substr(1, colon - 1), "vertex index");
      if (v < 0 || static_cast<std::size_t>(v) >= size()) throw ParseError("vertex index out of range in '" + std::string(piece) + "'");
      auto vertex = static_cast<std::size_t>(v);
      raw.push_back(Syllable{vertex, vertex_groups_[vertex].parse(piece.substr(colon + 1))});
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    return from_syllables(raw);
  }

  /// Pushes `s` onto the reduced word `word` (kept reduced, not normal-ordered).
  /// The syllable merges with the rightmost same-vertex syllable it can reach
  /// by commuting past adjacent-vertex syllables; a trivial product vanishes.
  AbsorbOutcome absorb(std::vector<TaggedSyllable>& word, const Syllable& s, std::size_t tag) const {
    const auto& vg = vertex_groups_[s.vertex];
    if (vg.is_identity(s.value)) return {AbsorbOutcome::Kind::cancelled, tag};
    for (std::size_t i = word.size(); i-- > 0;) {
      auto u = word[i].syllable.vertex;
      if (u == s.vertex) {
        auto partner = word[i].tag;
        auto product = vg.multiply(word[i].syllable.value, s.value);
        if (vg.is_identity(product)) {
          word.erase(word.begin() + static_cast<std::ptrdiff_t>(i));
          return {AbsorbOutcome::Kind::cancelled, partner};
        }
        word[i].syllable.value = std::move(product);
        return {AbsorbOutcome::Kind::merged, partner};
      }
      if (!adjacent(u, s.vertex)) break;
    }
    word.push_back({s, tag});
    return {AbsorbOutcome::Kind::appended, tag};
  }

  /// Lexicographically least shuffle of a reduced word: repeatedly emit the
  /// smallest-vertex syllable that commutes with everything still before it.
  SyllableWord normal_order(const std::vector<TaggedSyllable>& reduced) const {
    SyllableWord out;
    out.syllables.reserve(reduced.size());
    std::vector<bool> used(reduced.size(), false);
    for (std::size_t emitted = 0; emitted < reduced.size(); ++emitted) {
      std::size_t best = reduced.size();
      for (std::size_t i = 0; i < reduced.size(); ++i) {
        if (used[i]) continue;
        auto v = reduced[i].syllable.vertex;
        bool free_to_move = true;
        for (std::size_t j = 0; j < i && free_to_move; ++j)
          if (!used[j] && !adjacent(reduced[j].syllable.vertex, v)) free_to_move = false;
        if (free_to_move && (best == reduced.size() || v < reduced[best].syllable.vertex)) best = i;
      }
      used[best] = true;
      out.syllables.push_back(reduced[best].syllable);
    }
    return out;
  }

 private:
  void check_syllable_shape(const Syllable& s) const {
    if (s.vertex >= size()) throw BackendMismatch("syllable vertex out of range");
    if (!vertex_groups_[s.vertex].compatible(s.value)) throw BackendMismatch("syllable value not in its vertex group");
  }

  std::vector<VertexGroup> vertex_groups_;
  std::vector<std::vector<bool>> adjacency_;
};

/// Complete-graph product of the given vertex groups, i.e. their direct product.
inline GraphProduct direct_product(std::vector<VertexGroup> factors) {
  std::vector<GraphProduct::Edge> edges;
  for (std::size_t u = 0; u < factors.size(); ++u)
    for (std::size_t v = u + 1; v < factors.size(); ++v) edges.emplace_back(u, v);
  return GraphProduct(std::move(factors), edges);
}

}  // namespace rdlab
