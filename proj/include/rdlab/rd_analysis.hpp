#pragma once

// Empirical RD scans, the Rapid Expansion inequality, Følner cubes in Z^n
// and the free-abelian counterexample driver.

#include "rdlab/concurrency.hpp"
#include "rdlab/convolution.hpp"
#include "rdlab/enumeration.hpp"
#include "rdlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace rdlab {

// ---------------------------------------------------------------------------
// rd_scan

enum class Sampler { delta, ball, sphere, random_subset, random_weighted };

inline std::string to_string(Sampler s) {
  switch (s) {
    case Sampler::delta: return "delta";
    case Sampler::ball: return "ball";
    case Sampler::sphere: return "sphere";
    case Sampler::random_subset: return "random-subset";
    case Sampler::random_weighted: return "random-weighted";
  }
  return "?";
}

inline Sampler parse_sampler(std::string_view text) {
  for (auto s : {Sampler::delta, Sampler::ball, Sampler::sphere, Sampler::random_subset, Sampler::random_weighted})
    if (text == to_string(s)) return s;
  throw ParseError("unknown sampler '" + std::string(text) +
                   "' (expected delta, ball, sphere, random-subset or random-weighted)");
}

struct ScanConfig {
  Rational r_max{0};
  std::vector<Sampler> samplers{Sampler::ball, Sampler::sphere, Sampler::random_subset, Sampler::random_weighted};
  std::uint64_t seed = 0;
  std::size_t trials = 32;                // per random sampler and radius
  std::optional<Rational> psi_radius;     // unset: psi = phi
  std::optional<Polynomial> bound;        // comparison bound P(r)
  std::size_t cap = kDefaultElementCap;
  double tolerance = 1e-12;               // relative slack for floating ratios against P(r)
};

struct ScanRow {
  Rational r;
  std::string sampler;
  double max_ratio = 0.0;
  std::string argmax;
  std::optional<double> bound;
  std::optional<bool> pass;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t cap = 0;
  std::string psi_domain;
  std::optional<Polynomial> bound;

  bool all_pass() const {
    for (const auto& row : rows)
      if (row.pass == false) return false;
    return true;
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform in (0, 1], built from raw bits so it is the same on every platform.
inline double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

template <class E>
SparseFunction<E> random_function(const std::vector<E>& domain, bool weighted, std::mt19937_64& rng) {
  SparseFunction<E> f;
  for (const auto& e : domain)
    if (rng() & 1) f.set(e, weighted ? unit_interval(rng) : 1.0);
  if (f.empty()) f.set(domain[rng() % domain.size()], weighted ? unit_interval(rng) : 1.0);
  return f;
}

}  // namespace detail

/// Max of rd_ratio over phi drawn by each sampler with prop(phi) <= r, for
/// each attained length r <= r_max. psi_set, when nonempty, is paired with
/// every phi; otherwise psi comes from cfg.psi_radius or equals phi.
template <GroupBackend G>
ScanReport rd_scan(const G& group, const ScanConfig& cfg, const std::vector<SparseFunction<element_t<G>>>& psi_set) {
  using E = element_t<G>;
  if (cfg.r_max < 0) throw PreconditionFailed("r_max must be >= 0");
  if (cfg.samplers.empty()) throw PreconditionFailed("rd_scan needs at least one sampler");
  const auto big = ball(group, cfg.r_max, cfg.cap);
  const auto radii = attained_lengths(big);

  ScanReport report;
  report.seed = cfg.seed;
  report.trials = cfg.trials;
  report.cap = cfg.cap;
  report.bound = cfg.bound;

  std::vector<SparseFunction<E>> psis = psi_set;
  std::vector<std::string> psi_labels;
  for (std::size_t i = 0; i < psis.size(); ++i) psi_labels.push_back("given#" + std::to_string(i));
  if (!psi_set.empty()) {
    report.psi_domain = "given(" + std::to_string(psi_set.size()) + ")";
  } else if (cfg.psi_radius) {
    auto domain = ball(group, *cfg.psi_radius, cfg.cap).elements;
    report.psi_domain = "ball(" + to_string(*cfg.psi_radius) + ")";
    psis.push_back(SparseFunction<E>::indicator(domain));
    psi_labels.push_back("ball");
    std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ 0x5eedULL));
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      psis.push_back(detail::random_function(domain, t % 2 == 1, rng));
      psi_labels.push_back("random#" + std::to_string(t));
    }
  } else {
    report.psi_domain = "phi";
  }

  struct Task {
    std::size_t radius_index;
    Sampler sampler;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (auto s : cfg.samplers) tasks.push_back({i, s});

  auto rows = parallel_map(tasks.size(), [&](std::size_t t) {
    const auto& r = radii[tasks[t].radius_index];
    const auto sampler = tasks[t].sampler;
    std::vector<E> within, on_sphere;
    for (std::size_t i = 0; i < big.size() && big.lengths[i] <= r; ++i) {
      within.push_back(big.elements[i]);
      if (big.lengths[i] == r) on_sphere.push_back(big.elements[i]);
    }
    std::vector<SparseFunction<E>> phis;
    std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(t + 1)));
    switch (sampler) {
      case Sampler::delta: phis.push_back(SparseFunction<E>::delta(group.identity())); break;
      case Sampler::ball: phis.push_back(SparseFunction<E>::indicator(within)); break;
      case Sampler::sphere: phis.push_back(SparseFunction<E>::indicator(on_sphere)); break;
      case Sampler::random_subset:
      case Sampler::random_weighted:
        for (std::size_t k = 0; k < cfg.trials; ++k)
          phis.push_back(detail::random_function(within, sampler == Sampler::random_weighted, rng));
        break;
    }
    ScanRow row;
    row.r = r;
    row.sampler = to_string(sampler);
    row.max_ratio = -1.0;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      auto phi_label = phis.size() == 1 ? std::string("full") : "trial#" + std::to_string(i);
      if (psis.empty()) {
        double q = rd_ratio(group, phis[i], phis[i]);
        if (q > row.max_ratio) {
          row.max_ratio = q;
          row.argmax = "phi=" + phi_label + ";psi=phi";
        }
        continue;
      }
      for (std::size_t j = 0; j < psis.size(); ++j) {
        double q = rd_ratio(group, phis[i], psis[j]);
        if (q > row.max_ratio) {
          row.max_ratio = q;
          row.argmax = "phi=" + phi_label + ";psi=" + psi_labels[j];
        }
      }
    }
    if (cfg.bound) {
      double b = to_double((*cfg.bound)(r));
      row.bound = b;
      row.pass = row.max_ratio <= b * (1.0 + cfg.tolerance);
    }
    return row;
  });
  report.rows = std::move(rows);
  return report;
}

template <GroupBackend G>
ScanReport rd_scan(const G& group, const ScanConfig& cfg) {
  return rd_scan(group, cfg, {});
}

// ---------------------------------------------------------------------------
// Weighted Cauchy-Schwarz

/// (sum phi)^2 / sum phi^2, never more than |supp(phi)|.
template <class E>
double cauchy_schwarz_functional(const SparseFunction<E>& phi) {
  if (phi.empty()) throw EmptySupport("cauchy_schwarz_functional needs a nonempty support");
  double s = l1_norm(phi);
  return s * s / l2_norm_squared(phi);
}

// ---------------------------------------------------------------------------
// Rapid Expansion

struct ExpansionReport {
  std::uint64_t S = 0;
  std::uint64_t X = 0;
  std::uint64_t SX = 0;
  Rational r{0};
  Rational p_of_r{0};
  double bound = 0.0;  // |S||X| / P(r)
  bool satisfies = true;

  std::string verdict() const { return satisfies ? "satisfies" : "violates"; }
};

/// Report from exact cardinalities. The verdict compares |SX| P(r) with
/// |S||X| in 128-bit integers, never through the rounded bound.
inline ExpansionReport expansion_from_counts(std::uint64_t S, std::uint64_t X, std::uint64_t SX, const Rational& r,
                                             const Polynomial& P) {
  if (!P.nonnegative()) throw PreconditionFailed("polynomial coefficients must be nonnegative");
  ExpansionReport out{S, X, SX, r, P(r), 0.0, true};
  using wide = __int128;
  wide lhs = static_cast<wide>(SX) * out.p_of_r.numerator();
  wide rhs = static_cast<wide>(S) * static_cast<wide>(X) * out.p_of_r.denominator();
  out.satisfies = lhs >= rhs;
  out.bound = out.p_of_r == Rational(0) ? (S * X == 0 ? 0.0 : std::numeric_limits<double>::infinity())
                              : static_cast<double>(S) * static_cast<double>(X) / to_double(out.p_of_r);
  return out;
}

/// |SX| >= |S||X| / P(r) with r the propagation of S.
template <GroupBackend G>
ExpansionReport rapid_expansion_check(const G& group, const std::vector<element_t<G>>& S,
                                      const std::vector<element_t<G>>& X, const Polynomial& P) {
  if (!P.nonnegative()) throw PreconditionFailed("polynomial coefficients must be nonnegative");
  std::unordered_set<element_t<G>, Hash> s_set(S.begin(), S.end()), x_set(X.begin(), X.end());
  auto sx = product_set(group, S, X);
  Rational r(0);
  for (const auto& s : s_set) r = std::max(r, group.length(s));
  return expansion_from_counts(s_set.size(), x_set.size(), sx.size(), r, P);
}

// ---------------------------------------------------------------------------
// Følner cubes

struct FolnerResult {
  std::int64_t m = 0;       // half-side of X = {-m..m}^n
  std::uint64_t X = 0;
  std::uint64_t SX = 0;
  std::string method;       // "ball-closed-form" or "sweep"
};

/// The cube {-m..m}^n as explicit points.
inline std::vector<LatticePoint> cube_points(std::size_t n, std::int64_t m, std::size_t cap = kDefaultElementCap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total = detail::checked_mul(total, static_cast<std::uint64_t>(2 * m + 1));
  if (total > cap) throw BudgetExceeded("cube has " + std::to_string(total) + " points", cap);
  std::vector<LatticePoint> out;
  out.reserve(total);
  std::vector<std::int64_t> y(n, -m);
  while (true) {
    out.push_back(LatticePoint{y});
    std::size_t axis = 0;
    while (axis < n && y[axis] == m) y[axis++] = -m;
    if (axis == n) break;
    ++y[axis];
  }
  return out;
}

/// Least m with |S X_m| <= target |X_m|. Balls use the closed form, other
/// sets the exact interval sweep.
inline FolnerResult folner_cube_search(const WeightedAbelianGroup& group, const std::vector<LatticePoint>& S,
                                       const Rational& target, std::int64_t max_half_side = 100000) {
  if (target <= 1) throw PreconditionFailed("expansion target must exceed 1");
  for (const auto& s : S) require_compatible(group, s, "folner_cube_search");
  std::vector<LatticePoint> distinct(S.begin(), S.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  Rational r(0);
  for (const auto& s : distinct) r = std::max(r, group.length(s));
  const bool is_ball = !distinct.empty() && distinct.size() == weighted_ball_count(group.weights(), r);
  const auto n = group.dimension();
  for (std::int64_t m = 0; m <= max_half_side; ++m) {
    std::uint64_t x = 1;
    for (std::size_t i = 0; i < n; ++i) x = detail::checked_mul(x, static_cast<std::uint64_t>(2 * m + 1));
    std::uint64_t sx = distinct.empty() ? 0 : is_ball ? box_sum_count(group.weights(), r, m) : union_of_cubes_count(distinct, m);
    using wide = __int128;
    if (static_cast<wide>(sx) * target.denominator() <= static_cast<wide>(x) * target.numerator())
      return {m, x, sx, is_ball ? "ball-closed-form" : "sweep"};
  }
  throw BudgetExceeded("no Følner cube with half-side <= " + std::to_string(max_half_side), static_cast<std::size_t>(max_half_side));
}

// ---------------------------------------------------------------------------
// Counterexample driver

struct CounterexampleOptions {
  std::optional<Rational> radius;           // override the computed threshold
  std::int64_t max_half_side = 10000;
  std::uint64_t point_cap = 3'000'000;      // exact Minkowski enumeration
  std::size_t element_cap = kDefaultElementCap;
};

struct CounterexampleReport {
  std::size_t n = 0;
  Polynomial P;
  Rational first_radius{0};   // least r > 0 with |ball(r)| > 2P(r)
  Rational radius{0};         // least r > 0 from which that holds for good
  std::uint64_t horizon = 0;  // beyond horizon the inequality is certified
  std::uint64_t ball_size = 0;
  Rational two_p{0};
  bool ball_exceeds_two_p = false;
  FolnerResult folner;
  BoxSumEnumeration enumeration;
  ExpansionReport expansion;
};

namespace detail {

/// f(rho) = sum_k 2^k C(n,k) C(rho,k): the l1 ball count as a polynomial.
inline Polynomial l1_count_polynomial(std::size_t n) {
  Polynomial total;
  for (std::size_t k = 0; k <= n; ++k) {
    Polynomial falling({Rational(1)});
    for (std::size_t i = 0; i < k; ++i) falling = falling * Polynomial({Rational(-static_cast<std::int64_t>(i)), Rational(1)});
    Rational c(static_cast<std::int64_t>((std::uint64_t{1} << k) * binomial(n, k)));
    for (std::size_t i = 2; i <= k; ++i) c /= static_cast<std::int64_t>(i);
    total = total + c * falling;
  }
  return total;
}

}  // namespace detail

/// Z^n with weights n: balls of radius r are l1 balls of radius floor(r/n),
/// of size ~ (r/n)^n / n! * 2^n. For deg P < n the ball eventually beats 2P;
/// cubes are Følner sets, so |SX| <= 2|X| < |S||X|/P(r) and the expansion
/// inequality fails.
inline CounterexampleReport counterexample_demo(std::size_t n, const Polynomial& P, const CounterexampleOptions& options = {}) {
  if (n < 1 || n > 10) throw PreconditionFailed("counterexample dimension must be in 1..10");
  if (!P.nonnegative()) throw PreconditionFailed("polynomial coefficients must be nonnegative");
  if (P.degree() >= static_cast<int>(n))
    throw PreconditionFailed("deg P = " + std::to_string(P.degree()) + " must be below n = " + std::to_string(n));

  const auto nn = static_cast<std::int64_t>(n);
  WeightedAbelianGroup group(std::vector<Rational>(n, Rational(nn)));
  CounterexampleReport out;
  out.n = n;
  out.P = P;

  // D(rho) = f(rho) - 2 P(n rho + n - 1) bounds the gap on the whole block
  // r in [n rho, n rho + n - 1]. Past its Cauchy root bound D > 0.
  auto f = detail::l1_count_polynomial(n);
  auto D = f + Rational(-2) * P.compose_affine(Rational(nn), Rational(nn - 1));
  const auto& cs = D.coefficients();
  Rational worst(0);
  for (std::size_t i = 0; i + 1 < cs.size(); ++i) worst = std::max(worst, abs(cs[i] / cs.back()));
  auto rho_star = boost::rational_cast<std::int64_t>(floor(worst)) + 2;
  out.horizon = static_cast<std::uint64_t>(rho_star * nn);
  if (out.horizon > 50'000'000) throw BudgetExceeded("threshold horizon too large", 50'000'000);

  auto holds = [&](std::int64_t r) {
    Rational count(static_cast<std::int64_t>(l1_ball_count(n, static_cast<std::uint64_t>(r / nn))));
    return count > 2 * P(Rational(r));
  };
  std::optional<std::int64_t> first;
  std::int64_t last_failure = 0;
  for (std::int64_t r = 1; r < rho_star * nn; ++r) {
    if (holds(r)) {
      if (!first) first = r;
    } else {
      last_failure = r;
    }
  }
  out.first_radius = Rational(first.value_or(last_failure + 1));
  out.radius = options.radius.value_or(Rational(last_failure + 1));
  if (out.radius < 0) throw PreconditionFailed("radius must be >= 0");

  auto S = ball(group, out.radius, options.element_cap);
  out.ball_size = S.size();
  auto expected = l1_ball_count(n, static_cast<std::uint64_t>(boost::rational_cast<std::int64_t>(floor(out.radius / nn))));
  if (out.ball_size != expected || out.ball_size != weighted_ball_count(group.weights(), out.radius))
    throw ContractViolation("ball size " + std::to_string(out.ball_size) + " disagrees with the lattice formula " +
                            std::to_string(expected));
  out.two_p = 2 * P(out.radius);
  out.ball_exceeds_two_p = Rational(static_cast<std::int64_t>(out.ball_size)) > out.two_p;

  out.folner = folner_cube_search(group, S.elements, Rational(2), options.max_half_side);
  out.enumeration = box_sum_enumerate(group, out.radius, out.folner.m, options.point_cap);
  if (out.enumeration.count != out.folner.SX)
    throw ContractViolation("Minkowski sum: enumeration gives " + std::to_string(out.enumeration.count) +
                            ", closed form gives " + std::to_string(out.folner.SX));
  out.expansion = expansion_from_counts(out.ball_size, out.folner.X, out.enumeration.count, out.radius, P);
  if (out.ball_exceeds_two_p && out.expansion.satisfies)
    throw ContractViolation("|S| > 2P(r) and |SX| <= 2|X| yet the expansion inequality holds");
  return out;
}

}  // namespace rdlab
