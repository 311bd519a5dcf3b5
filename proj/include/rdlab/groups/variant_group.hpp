#pragma once

#include "rdlab/groups/concepts.hpp"

#include <optional>
#include <type_traits>
#include <utility>
#include <variant>

namespace rdlab {

/// Runtime choice among several backends. Its elements are variants of the
/// backends' elements; mixing alternatives raises BackendMismatch.
template <GroupBackend... Backends>
class VariantGroup {
 public:
  using element_type = std::variant<typename Backends::element_type...>;
  using backend_type = std::variant<Backends...>;

  template <class B>
    requires(std::is_same_v<std::decay_t<B>, Backends> || ...)
  VariantGroup(B backend) : backend_(std::move(backend)) {}

  const backend_type& backend() const noexcept { return backend_; }

  template <class B>
  const B* get_if() const noexcept {
    return std::get_if<B>(&backend_);
  }

  template <class B>
  const B& as(std::string_view what) const {
    if (auto p = get_if<B>()) return *p;
    throw BackendMismatch(std::string(what) + ": unsupported backend kind");
  }

  element_type identity() const {
    return std::visit([](const auto& g) -> element_type { return g.identity(); }, backend_);
  }

  element_type multiply(const element_type& a, const element_type& b) const {
    return std::visit(
        [&](const auto& g) -> element_type { return g.multiply(unwrap(g, a, "multiply"), unwrap(g, b, "multiply")); },
        backend_);
  }

  element_type inverse(const element_type& a) const {
    return std::visit([&](const auto& g) -> element_type { return g.inverse(unwrap(g, a, "inverse")); }, backend_);
  }

  Rational length(const element_type& a) const {
    return std::visit([&](const auto& g) { return g.length(unwrap(g, a, "length")); }, backend_);
  }

  bool is_identity(const element_type& a) const {
    return std::visit([&](const auto& g) { return g.is_identity(unwrap(g, a, "is_identity")); }, backend_);
  }

  bool compatible(const element_type& a) const {
    return std::visit(
        [&](const auto& g) {
          using E = typename std::decay_t<decltype(g)>::element_type;
          auto p = std::get_if<E>(&a);
          return p != nullptr && g.compatible(*p);
        },
        backend_);
  }

  bool contains(const element_type& a) const {
    return std::visit(
        [&](const auto& g) {
          using E = typename std::decay_t<decltype(g)>::element_type;
          auto p = std::get_if<E>(&a);
          return p != nullptr && g.contains(*p);
        },
        backend_);
  }

  std::vector<element_type> moves() const {
    return std::visit(
        [](const auto& g) {
          std::vector<element_type> out;
          for (auto& m : g.moves()) out.emplace_back(std::move(m));
          return out;
        },
        backend_);
  }

  std::optional<std::vector<element_type>> direct_ball(const Rational& r, std::size_t cap) const {
    return std::visit(
        [&](const auto& g) -> std::optional<std::vector<element_type>> {
          if constexpr (requires { g.direct_ball(r, cap); }) {
            auto inner = g.direct_ball(r, cap);
            if (!inner) return std::nullopt;
            std::vector<element_type> out;
            out.reserve(inner->size());
            for (auto& e : *inner) out.emplace_back(std::move(e));
            return out;
          } else {
            return std::nullopt;
          }
        },
        backend_);
  }

  std::string format(const element_type& a) const {
    return std::visit([&](const auto& g) { return g.format(unwrap(g, a, "format")); }, backend_);
  }

  element_type parse(std::string_view text) const {
    return std::visit([&](const auto& g) -> element_type { return g.parse(text); }, backend_);
  }

 private:
  template <class B>
  static const typename B::element_type& unwrap(const B& g, const element_type& a, const char* where) {
    auto p = std::get_if<typename B::element_type>(&a);
    if (p == nullptr || !g.compatible(*p))
      throw BackendMismatch(std::string(where) + ": element does not belong to this backend");
    return *p;
  }

  backend_type backend_;
};

}  // namespace rdlab
