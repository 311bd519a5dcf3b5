#pragma once

// rd-lab: parse a group config, run one operation, write its report.
// Exit codes: 0 success, 1 a checked bound or invariant failed, 2 usage,
// config or budget errors.

#include "rdlab/centroid.hpp"
#include "rdlab/concurrency.hpp"
#include "rdlab/convolution.hpp"
#include "rdlab/enumeration.hpp"
#include "rdlab/groups.hpp"
#include "rdlab/io/config.hpp"
#include "rdlab/io/reports.hpp"
#include "rdlab/rd_analysis.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace rdlab::cli {

inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;

namespace detail {

struct Common {
  std::string group_path;
  std::string out_path;
  std::size_t cap = kDefaultElementCap;
};

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    atomic_write(path, content);
}

inline std::vector<std::pair<std::string, std::string>> caps(const Common& c) {
  return {{"element_cap", std::to_string(c.cap)}};
}

inline Rational rational_arg(const std::string& text, const std::string& name) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw ParseError(name + ": " + e.what());
  }
}

inline Polynomial polynomial_arg(const std::string& text, const std::string& name) {
  Polynomial p;
  try {
    p = Polynomial::parse(text);
  } catch (const Error& e) {
    throw ParseError(name + ": " + e.what());
  }
  if (!p.nonnegative()) throw ParseError(name + ": polynomial coefficients must be nonnegative");
  return p;
}

inline void require_positive_cap(const Common& c) {
  if (c.cap == 0) throw ParseError("--cap must be positive");
}

/// {"elements": ["...", ...]}
inline std::vector<Element> element_list(const Group& group, const std::string& path) {
  nlohmann::json j;
  {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path + ": malformed JSON (" + e.what() + ")");
    }
  }
  if (!j.is_object() || j.size() != 1 || !j.contains("elements") || !j["elements"].is_array())
    throw ParseError(path + ": expected {\"elements\": [...]}");
  std::vector<Element> out;
  for (const auto& e : j["elements"]) {
    if (!e.is_string()) throw ParseError(path + ": elements must be strings");
    out.push_back(group.parse(e.get<std::string>()));
  }
  return out;
}

inline SparseFunction<Element> function_file(const Group& group, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return function_from_json(group, nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": malformed JSON (" + e.what() + ")");
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Fixed elements: explicit --fixed values, or every element of ball(--fixed-radius).
inline std::vector<Element> fixed_elements(const Group& group, const std::vector<std::string>& fixed,
                                           const std::optional<std::string>& fixed_radius, std::size_t cap) {
  std::vector<Element> out;
  for (const auto& f : fixed) out.push_back(group.parse(f));
  if (fixed_radius) {
    auto b = ball(group, rational_arg(*fixed_radius, "--fixed-radius"), cap);
    out.insert(out.end(), b.elements.begin(), b.elements.end());
  }
  if (out.empty()) throw ParseError("give --fixed or --fixed-radius");
  return out;
}

}  // namespace detail

/// Runs one rd-lab invocation; report goes to --out or to `out`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Rapid Decay laboratory: balls, convolutions, centroid counts and expansion checks.", "rd-lab"};
  app.require_subcommand(1);
  Common common;
  std::string radius_text, rmax_text = "0", bound_text, poly_text, mode, seed_text = "0";
  std::string phi_path, psi_path, triples = "all", s_path, x_path;
  std::optional<std::string> s_radius, x_radius, psi_radius, fixed_radius, cx_radius;
  std::vector<std::string> samplers, fixed, windows;
  std::size_t trials = 32, max_iters = 1000, n = 0;
  std::int64_t max_half_side = 10000;
  std::uint64_t point_cap = 3'000'000;
  double tol = 1e-10;

  auto add_group = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--group", common.group_path, "group config JSON")->required();
    if (with_out) sub->add_option("--out", common.out_path, "report path (default stdout)");
    sub->add_option("--cap", common.cap, "element cap for ball enumeration");
  };

  auto* ball_cmd = app.add_subcommand("ball", "enumerate ball(r) as CSV element,length");
  add_group(ball_cmd);
  ball_cmd->add_option("--radius", radius_text, "radius")->required();

  auto* conv_cmd = app.add_subcommand("conv", "convolve two functions, report norms and the RD ratio");
  add_group(conv_cmd);
  conv_cmd->add_option("--phi", phi_path, "function JSON")->required();
  conv_cmd->add_option("--psi", psi_path, "function JSON")->required();
  conv_cmd->add_option("--triples", triples, "all, or clique:v1,v2,... for G.H^3 with H a clique subgroup");

  auto* scan_cmd = app.add_subcommand("rd-scan", "scan rd ratios by radius and sampler");
  add_group(scan_cmd);
  scan_cmd->add_option("--rmax", rmax_text, "largest radius")->required();
  scan_cmd->add_option("--sampler", samplers, "delta, ball, sphere, random-subset, random-weighted (repeatable)");
  scan_cmd->add_option("--seed", seed_text, "64-bit seed");
  scan_cmd->add_option("--trials", trials, "samples per random sampler and radius");
  scan_cmd->add_option("--psi-radius", psi_radius, "draw psi from ball(R) instead of psi = phi");
  scan_cmd->add_option("--bound", bound_text, "comparison bound P, coefficients lowest degree first");

  auto* centroid_cmd = app.add_subcommand("centroid-check", "count conditions c1, c2, c3 for the default centroid map");
  add_group(centroid_cmd);
  centroid_cmd->add_option("--mode", mode, "c1, c2 or c3")->required()->check(CLI::IsMember({"c1", "c2", "c3"}));
  centroid_cmd->add_option("--radius", radius_text, "r (c1, c3) or truncation R (c2)")->required();
  centroid_cmd->add_option("--fixed", fixed, "fixed element (repeatable)");
  centroid_cmd->add_option("--fixed-radius", fixed_radius, "use every element of ball(R) as fixed element");
  centroid_cmd->add_option("--bound", bound_text, "P: fail when count > P(r) (c2: P(L(g)))");

  auto* rc_cmd = app.add_subcommand("rc-check", "relative centroid conditions for a graph product");
  add_group(rc_cmd);
  rc_cmd->add_option("--mode", mode, "rc1, rc2, rc3 or rc4")->required()->check(CLI::IsMember({"rc1", "rc2", "rc3", "rc4"}));
  rc_cmd->add_option("--radius", radius_text, "radius")->required();
  rc_cmd->add_option("--fixed", fixed, "fixed element (repeatable)");
  rc_cmd->add_option("--fixed-radius", fixed_radius, "use every element of ball(R) as fixed element");
  rc_cmd->add_option("--bound", bound_text, "P: fail when count > P(r)");

  auto* exp_cmd = app.add_subcommand("expansion", "check |SX| >= |S||X|/P(r)");
  add_group(exp_cmd);
  exp_cmd->add_option("--S", s_path, "element list JSON for S");
  exp_cmd->add_option("--X", x_path, "element list JSON for X");
  exp_cmd->add_option("--s-radius", s_radius, "S = ball(R)");
  exp_cmd->add_option("--x-radius", x_radius, "X = ball(R)");
  exp_cmd->add_option("--poly", poly_text, "P, coefficients lowest degree first")->required();

  auto* cx_cmd = app.add_subcommand("counterexample", "expansion failure in Z^n with weights n");
  cx_cmd->add_option("--n", n, "dimension")->required();
  cx_cmd->add_option("--poly", poly_text, "P with deg P < n")->required();
  cx_cmd->add_option("--radius", cx_radius, "override the computed radius");
  cx_cmd->add_option("--max-half-side", max_half_side, "Følner search cap");
  cx_cmd->add_option("--point-cap", point_cap, "exact Minkowski enumeration cap");
  cx_cmd->add_option("--out", common.out_path, "report path (default stdout)");
  cx_cmd->add_option("--cap", common.cap, "element cap for ball enumeration");

  auto* op_cmd = app.add_subcommand("opnorm", "lower bounds for the convolution operator norm");
  add_group(op_cmd);
  op_cmd->add_option("--phi", phi_path, "function JSON (default: indicator of the generators)");
  op_cmd->add_option("--window", windows, "window radius (repeatable)")->required();
  op_cmd->add_option("--max-iters", max_iters, "power iteration cap");
  op_cmd->add_option("--tol", tol, "relative convergence tolerance");

  auto fail = [&](int code, const std::string& message) {
    std::string line = message;
    for (auto& c : line)
      if (c == '\n') c = ' ';
    err << "rd-lab: " << line << "\n";
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, e.what());
  }

  try {
    worker_count();  // rejects a malformed RD_LAB_THREADS up front
    require_positive_cap(common);
    std::optional<GroupConfig> cfg;
    if (!common.group_path.empty()) cfg = validate_config_file(common.group_path);
    ReportMeta meta;
    meta.config_digest = cfg ? cfg->digest : "none";
    meta.caps = caps(common);

    if (*ball_cmd) {
      meta.command = "ball";
      auto b = ball(cfg->group, rational_arg(radius_text, "--radius"), common.cap);
      emit(common.out_path, ball_csv(cfg->group, b, meta), out);
      return kOk;
    }

    if (*conv_cmd) {
      meta.command = "conv";
      const auto& group = cfg->group;
      auto phi = function_file(group, phi_path);
      auto psi = function_file(group, psi_path);
      SparseFunction<Element> result;
      if (triples == "all") {
        result = convolve(group, phi, psi);
      } else if (triples.rfind("clique:", 0) == 0) {
        const auto& gp = group.as<GraphProduct>("--triples clique");
        std::vector<std::size_t> vertices;
        std::string list = triples.substr(7);
        std::size_t start = 0;
        while (start <= list.size()) {
          auto comma = list.find(',', start);
          auto piece = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
          auto v = rdlab::detail::parse_int(piece, "--triples vertex");
          if (v < 0 || static_cast<std::size_t>(v) >= gp.size()) throw ParseError("--triples vertex out of range");
          vertices.push_back(static_cast<std::size_t>(v));
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        if (!gp.is_clique(vertices)) throw ParseError("--triples vertices do not span a clique");
        auto T = TripleSet<Element>::subgroup_cosets(
            [gp, vertices](const Element& x) { return gp.in_subgroup(std::get<SyllableWord>(x), vertices); },
            "G.H^3 " + triples);
        result = relative_convolve(group, phi, psi, T);
      } else {
        throw ParseError("--triples must be 'all' or 'clique:v1,v2,...'");
      }
      ordered_json j;
      j["meta"] = meta_json(meta);
      j["triples"] = triples;
      j["phi_l2_squared"] = l2_norm_squared(phi);
      j["psi_l2_squared"] = l2_norm_squared(psi);
      j["result_l2_squared"] = l2_norm_squared(result);
      if (!phi.empty()) j["phi_propagation"] = to_string(propagation(group, phi));
      if (!phi.empty() && !psi.empty())
        j["rd_ratio"] = l2_norm_squared(result) / (l2_norm_squared(phi) * l2_norm_squared(psi));
      j["result"] = function_to_json(group, result);
      emit(common.out_path, dump(j), out);
      return kOk;
    }

    if (*scan_cmd) {
      meta.command = "rd-scan";
      ScanConfig sc;
      sc.r_max = rational_arg(rmax_text, "--rmax");
      sc.seed = static_cast<std::uint64_t>(rdlab::detail::parse_int(seed_text, "--seed"));
      sc.trials = trials;
      sc.cap = common.cap;
      if (!samplers.empty()) {
        sc.samplers.clear();
        for (const auto& s : samplers) sc.samplers.push_back(parse_sampler(s));
      }
      if (psi_radius) sc.psi_radius = rational_arg(*psi_radius, "--psi-radius");
      if (!bound_text.empty()) sc.bound = polynomial_arg(bound_text, "--bound");
      meta.seed = sc.seed;
      meta.caps.emplace_back("trials", std::to_string(trials));
      auto report = rd_scan(cfg->group, sc);
      emit(common.out_path, scan_csv(report, meta), out);
      return report.all_pass() ? kOk : fail(kCheckFailed, "rd ratio exceeded the configured bound");
    }

    if (*centroid_cmd) {
      meta.command = "centroid-check";
      const auto& group = cfg->group;
      auto co = default_centroid_map(group);
      auto r = rational_arg(radius_text, "--radius");
      std::optional<Polynomial> bound;
      if (!bound_text.empty()) bound = polynomial_arg(bound_text, "--bound");
      std::vector<CountReport> reports;
      bool ok = true;
      for (const auto& x : fixed_elements(group, fixed, fixed_radius, common.cap)) {
        auto rep = mode == "c1"   ? verify_c1(group, co, x, r, common.cap)
                   : mode == "c2" ? verify_c2(group, co, x, r, common.cap)
                                  : verify_c3(group, co, x, r, common.cap);
        if (bound) {
          auto at = mode == "c2" ? group.length(x) : r;
          ok = ok && Rational(static_cast<std::int64_t>(rep.count)) <= (*bound)(at);
        }
        reports.push_back(std::move(rep));
      }
      emit(common.out_path, count_csv(reports, meta), out);
      return ok ? kOk : fail(kCheckFailed, "a centroid count exceeded the configured bound");
    }

    if (*rc_cmd) {
      meta.command = "rc-check";
      const auto& group = cfg->group;
      auto rc = clique_rc_map(group);
      auto r = rational_arg(radius_text, "--radius");
      std::optional<Polynomial> bound;
      if (!bound_text.empty()) bound = polynomial_arg(bound_text, "--bound");
      std::vector<CountReport> reports;
      bool ok = true;
      auto fixed_list = fixed_elements(group, fixed, fixed_radius, common.cap);
      if (mode == "rc4") {
        // count = number of k in ball(r) with (rc4) holding for (fixed, k)
        auto domain = ball(group, r, common.cap);
        for (const auto& g : fixed_list) {
          CountReport rep{"rc4", group.format(g), r, 0, std::nullopt, false};
          for (const auto& k : domain.elements) rep.count += verify_rc4(group, rc, g, k) ? 1 : 0;
          ok = ok && rep.count == domain.size();
          reports.push_back(std::move(rep));
        }
      } else {
        auto m = mode == "rc1" ? RcMode::rc1 : mode == "rc2" ? RcMode::rc2 : RcMode::rc3;
        for (const auto& x : fixed_list) {
          auto rep = verify_rc(group, rc, m, x, r, common.cap);
          if (bound) ok = ok && Rational(static_cast<std::int64_t>(rep.count)) <= (*bound)(r);
          reports.push_back(std::move(rep));
        }
      }
      emit(common.out_path, count_csv(reports, meta), out);
      return ok ? kOk : fail(kCheckFailed, "a relative centroid condition failed");
    }

    if (*exp_cmd) {
      meta.command = "expansion";
      const auto& group = cfg->group;
      auto pick = [&](const std::string& path, const std::optional<std::string>& radius, const char* name) {
        if (path.empty() == !radius.has_value())
          throw ParseError(std::string("give exactly one of --") + name + " and --" + (name[0] == 'S' ? "s" : "x") + "-radius");
        return radius ? ball(group, rational_arg(*radius, "radius"), common.cap).elements : element_list(group, path);
      };
      auto S = pick(s_path, s_radius, "S");
      auto X = pick(x_path, x_radius, "X");
      auto report = rapid_expansion_check(group, S, X, polynomial_arg(poly_text, "--poly"));
      auto j = to_json(report);
      j["meta"] = meta_json(meta);
      emit(common.out_path, dump(j), out);
      return kOk;
    }

    if (*cx_cmd) {
      meta.command = "counterexample";
      CounterexampleOptions options;
      if (cx_radius) options.radius = rational_arg(*cx_radius, "--radius");
      options.max_half_side = max_half_side;
      options.point_cap = point_cap;
      options.element_cap = common.cap;
      if (n < 1 || n > 10) throw ParseError("--n must be in 1..10");
      nlohmann::json synthetic = {{"type", "weighted_abelian"}, {"weights", std::vector<std::size_t>(n, n)}};
      meta.config_digest = hex64(fnv1a(synthetic.dump()));
      meta.caps.emplace_back("max_half_side", std::to_string(max_half_side));
      meta.caps.emplace_back("point_cap", std::to_string(point_cap));
      auto report = counterexample_demo(n, polynomial_arg(poly_text, "--poly"), options);
      auto j = to_json(report);
      j["meta"] = meta_json(meta);
      emit(common.out_path, dump(j), out);
      if (!report.ball_exceeds_two_p)
        return fail(kCheckFailed, "|S| <= 2P(r) at the requested radius; no witness");
      return kOk;
    }

    if (*op_cmd) {
      meta.command = "opnorm";
      const auto& group = cfg->group;
      SparseFunction<Element> phi;
      if (phi_path.empty()) {
        for (const auto& m : group.moves()) phi.set(m, 1.0);
        if (phi.empty()) throw ParseError("group has no generators; pass --phi");
      } else {
        phi = function_file(group, phi_path);
      }
      if (max_iters == 0) throw ParseError("--max-iters must be positive");
      meta.caps.emplace_back("max_iters", std::to_string(max_iters));
      ordered_json j;
      j["meta"] = meta_json(meta);
      j["phi"] = function_to_json(group, phi);
      j["estimates"] = ordered_json::array();
      for (const auto& w : windows) {
        auto radius = rational_arg(w, "--window");
        j["estimates"].push_back(to_json(operator_norm_estimate(group, phi, radius, max_iters, tol, common.cap), radius));
      }
      emit(common.out_path, dump(j), out);
      return kOk;
    }
    return fail(kUsage, "no subcommand");
  } catch (const ConfigError& e) {
    return fail(kUsage, std::string("config error: ") + e.what());
  } catch (const ContractViolation& e) {
    return fail(kCheckFailed, std::string("invariant violated: ") + e.what());
  } catch (const BudgetExceeded& e) {
    return fail(kUsage, std::string("budget exceeded: ") + e.what());
  } catch (const Error& e) {
    return fail(kUsage, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kUsage, e.what());
  } catch (const std::exception& e) {
    return fail(kUsage, e.what());
  }
}

}  // namespace rdlab::cli
