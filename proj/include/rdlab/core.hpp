#pragma once

// Shared vocabulary: exact lengths, polynomials, error types, hashing.

#include <boost/rational.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace rdlab {

/// Exact nonnegative length values. Integer lengths are rationals with denominator 1.
using Rational = boost::rational<std::int64_t>;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Elements or functions from a different backend were mixed.
class BackendMismatch : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured element cap.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string what, std::size_t cap)
      : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// A caller-side precondition does not hold (bad argument, empty support, ...).
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// An internal invariant check failed. Always a bug or a refuted claim.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Text that does not denote an element of the backend.
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Rationals

inline std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline Rational floor(const Rational& q) {
  auto n = q.numerator();
  auto d = q.denominator();
  auto f = n / d;
  if (n % d != 0 && n < 0) --f;
  return Rational(f);
}

namespace detail {

inline std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses "7", "-3/4" or a finite decimal such as "1.25" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto s = detail::trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = detail::parse_int(detail::trim(s.substr(0, slash)), "rational");
    auto den = detail::parse_int(detail::trim(s.substr(slash + 1)), "rational");
    if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }
  std::string mantissa(s);
  std::int64_t exponent = 0;
  if (auto e = mantissa.find_first_of("eE"); e != std::string::npos) {
    exponent = detail::parse_int(std::string_view(mantissa).substr(e + 1), "exponent");
    mantissa.resize(e);
  }
  if (auto dot = mantissa.find('.'); dot != std::string::npos) {
    exponent -= static_cast<std::int64_t>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
  }
  if (mantissa.empty() || mantissa == "-" || mantissa == "+")
    throw ParseError("invalid rational: '" + std::string(s) + "'");
  Rational value(detail::parse_int(mantissa, "rational"));
  if (exponent > 18 || exponent < -18) throw ParseError("exponent out of range in '" + std::string(s) + "'");
  std::int64_t scale = 1;
  for (std::int64_t i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  return exponent < 0 ? value / scale : value * scale;
}

/// Exact rational for a double, via its shortest round-trip decimal form.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ParseError("non-finite number");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw ParseError("cannot format number");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

/// Shortest round-trip decimal text of a double; stable across runs.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Polynomials with nonnegative rational coefficients, lowest degree first.

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coefficients) : coefficients_(std::move(coefficients)) {
    while (!coefficients_.empty() && coefficients_.back() == Rational(0)) coefficients_.pop_back();
  }

  /// "0,0,1" is r^2.
  static Polynomial parse(std::string_view text) {
    std::vector<Rational> cs;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      cs.push_back(parse_rational(piece));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return Polynomial(std::move(cs));
  }

  const std::vector<Rational>& coefficients() const noexcept { return coefficients_; }

  /// Degree; the zero polynomial reports -1.
  int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }

  bool nonnegative() const {
    for (const auto& c : coefficients_)
      if (c < 0) return false;
    return true;
  }

  Rational operator()(const Rational& x) const {
    Rational acc(0);
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + to_double(*it);
    return acc;
  }

  std::string to_string() const {
    if (coefficients_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
      if (i) out += ",";
      out += rdlab::to_string(coefficients_[i]);
    }
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Rational> out(std::max(a.coefficients_.size(), b.coefficients_.size()), Rational(0));
    for (std::size_t i = 0; i < a.coefficients_.size(); ++i) out[i] += a.coefficients_[i];
    for (std::size_t i = 0; i < b.coefficients_.size(); ++i) out[i] += b.coefficients_[i];
    return Polynomial(std::move(out));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.coefficients_.empty() || b.coefficients_.empty()) return {};
    std::vector<Rational> out(a.coefficients_.size() + b.coefficients_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.coefficients_.size(); ++i)
      for (std::size_t j = 0; j < b.coefficients_.size(); ++j) out[i + j] += a.coefficients_[i] * b.coefficients_[j];
    return Polynomial(std::move(out));
  }

  friend Polynomial operator*(const Rational& s, const Polynomial& p) {
    auto cs = p.coefficients_;
    for (auto& c : cs) c *= s;
    return Polynomial(std::move(cs));
  }

  /// p(a*x + b) as a polynomial in x.
  Polynomial compose_affine(const Rational& a, const Rational& b) const {
    Polynomial result;
    Polynomial power({Rational(1)});
    Polynomial lin({b, a});
    for (const auto& c : coefficients_) {
      result = result + c * power;
      power = power * lin;
    }
    return result;
  }

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<Rational> coefficients_;
};

// ---------------------------------------------------------------------------
// Hashing. Element types provide hash_value() found by ADL.

inline std::size_t hash_combine(std::size_t seed, std::size_t v) noexcept {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

template <class... Ts>
std::size_t hash_value(const std::variant<Ts...>& v);

struct Hash {
  template <class T>
  std::size_t operator()(const T& x) const {
    return hash_value(x);
  }
};

template <class... Ts>
std::size_t hash_value(const std::variant<Ts...>& v) {
  return hash_combine(v.index(), std::visit([](const auto& x) { return hash_value(x); }, v));
}

/// FNV-1a, used for config digests embedded in reports.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

}  // namespace rdlab
