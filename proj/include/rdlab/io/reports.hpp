#pragma once

// CSV and JSON serialization of module reports. Every report carries the
// config digest, the seed and the caps that bounded the run.

#include "rdlab/centroid.hpp"
#include "rdlab/convolution.hpp"
#include "rdlab/enumeration.hpp"
#include "rdlab/rd_analysis.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

namespace rdlab {

using ordered_json = nlohmann::ordered_json;

struct ReportMeta {
  std::string command;
  std::string config_digest = "none";
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> caps;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Writes to a sibling temp file and renames it into place.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move report into " + path.string());
  }
}

inline std::string csv_field(std::string text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// "# key=value" lines preceding the CSV header.
inline std::string csv_preamble(const ReportMeta& meta) {
  std::string out = "# command=" + meta.command + "\n# config_digest=" + meta.config_digest + "\n# seed=" +
                    (meta.seed ? std::to_string(*meta.seed) : std::string("none")) + "\n";
  for (const auto& [k, v] : meta.caps) out += "# " + k + "=" + v + "\n";
  return out;
}

inline ordered_json meta_json(const ReportMeta& meta) {
  ordered_json caps = ordered_json::object();
  for (const auto& [k, v] : meta.caps) caps[k] = v;
  ordered_json out;
  out["command"] = meta.command;
  out["config_digest"] = meta.config_digest;
  out["seed"] = meta.seed ? ordered_json(*meta.seed) : ordered_json(nullptr);
  out["caps"] = std::move(caps);
  return out;
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV reports

template <GroupBackend G>
std::string ball_csv(const G& group, const Ball<element_t<G>>& b, const ReportMeta& meta) {
  std::ostringstream out;
  out << csv_preamble(meta);
  write_ball_csv(out, group, b);
  return out.str();
}

inline std::string count_csv(const std::vector<CountReport>& reports, const ReportMeta& meta) {
  std::string out = csv_preamble(meta) + "mode,fixed_element,radius,count,stabilized\n";
  for (const auto& r : reports) {
    out += csv_field(r.mode) + "," + csv_field(r.fixed_element) + "," + to_string(r.radius) + "," + std::to_string(r.count) +
           "," + (r.stabilized ? (*r.stabilized ? "true" : "false") : "") + "\n";
  }
  return out;
}

inline std::string scan_csv(const ScanReport& report, const ReportMeta& meta) {
  std::string out = csv_preamble(meta);
  out += "# psi_domain=" + report.psi_domain + "\n";
  if (report.bound) out += "# bound_polynomial=" + csv_field(report.bound->to_string()) + "\n";
  out += "r,sampler,max_ratio,bound,pass\n";
  for (const auto& row : report.rows) {
    out += to_string(row.r) + "," + row.sampler + "," + format_double(row.max_ratio) + "," +
           (row.bound ? format_double(*row.bound) : "") + "," + (row.pass ? (*row.pass ? "true" : "false") : "") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON reports

inline ordered_json to_json(const ExpansionReport& r) {
  ordered_json out;
  out["S"] = r.S;
  out["X"] = r.X;
  out["SX"] = r.SX;
  out["bound"] = r.bound;
  out["verdict"] = r.verdict();
  out["r"] = to_string(r.r);
  out["P_of_r"] = to_string(r.p_of_r);
  return out;
}

inline ordered_json to_json(const CounterexampleReport& r) {
  ordered_json out;
  out["n"] = r.n;
  out["weights"] = r.n;
  out["polynomial"] = r.P.to_string();
  out["first_radius"] = to_string(r.first_radius);
  out["radius"] = to_string(r.radius);
  out["certified_horizon"] = r.horizon;
  out["ball_size"] = r.ball_size;
  out["two_P_of_r"] = to_string(r.two_p);
  out["ball_exceeds_two_P"] = r.ball_exceeds_two_p;
  out["cube_half_side"] = r.folner.m;
  out["cube_side"] = 2 * r.folner.m + 1;
  out["folner_method"] = r.folner.method;
  out["minkowski_points_visited"] = r.enumeration.points_visited;
  out["minkowski_closed_form"] = r.folner.SX;
  out["expansion"] = to_json(r.expansion);
  out["S"] = r.expansion.S;
  out["X"] = r.expansion.X;
  out["SX"] = r.expansion.SX;
  out["bound"] = r.expansion.bound;
  out["verdict"] = r.expansion.verdict();
  return out;
}

inline ordered_json to_json(const OperatorNormEstimate& e, const Rational& window) {
  ordered_json out;
  out["window_radius"] = to_string(window);
  out["window_size"] = e.window_size;
  out["estimate"] = e.value;
  out["iterations"] = e.iterations;
  out["converged"] = e.converged;
  return out;
}

/// {"entries":[{"element": "...", "value": v}, ...]} in canonical element order.
template <GroupBackend G>
ordered_json function_to_json(const G& group, const SparseFunction<element_t<G>>& f) {
  ordered_json entries = ordered_json::array();
  for (const auto& [e, v] : f.entries()) entries.push_back({{"element", group.format(e)}, {"value", v}});
  return ordered_json{{"entries", std::move(entries)}};
}

template <GroupBackend G>
SparseFunction<element_t<G>> function_from_json(const G& group, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
    throw ParseError("function JSON needs an \"entries\" array");
  for (const auto& [key, value] : j.items())
    if (key != "entries") throw ParseError("unknown key \"" + key + "\" in function JSON");
  SparseFunction<element_t<G>> f;
  std::set<element_t<G>> seen;
  std::size_t i = 0;
  for (const auto& entry : j["entries"]) {
    auto where = "entries[" + std::to_string(i++) + "]";
    if (!entry.is_object() || entry.size() != 2 || !entry.contains("element") || !entry.contains("value") ||
        !entry["element"].is_string() || !entry["value"].is_number())
      throw ParseError(where + " must be {\"element\": string, \"value\": number}");
    auto e = group.parse(entry["element"].get<std::string>());
    if (!seen.insert(e).second) throw ParseError(where + " repeats element " + group.format(e));
    double v = entry["value"].get<double>();
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParseError(where + " has a negative or non-finite value");
    f.set(std::move(e), v);
  }
  return f;
}

}  // namespace rdlab
