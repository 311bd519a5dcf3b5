#pragma once

#include "rdlab/groups.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rdlab {

/// Schema violations of a group configuration, all of them.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues) : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid group config: ";
    for (std::size_t i = 0; i < issues.size(); ++i) out += (i ? "; " : "") + issues[i];
    return out;
  }
  std::vector<std::string> issues_;
};

namespace detail {

using nlohmann::json;

class ConfigReader {
 public:
  std::vector<std::string> issues;

  std::optional<Group> top(const json& j) {
    auto type = kind(j, "");
    if (!type) return std::nullopt;
    if (*type == "graph_product") {
      auto gp = graph_product(j);
      if (!gp) return std::nullopt;
      return Group(std::move(*gp));
    }
    auto v = vertex(j, "", *type);
    if (!v) return std::nullopt;
    return std::visit([](const auto& b) { return Group(b); }, v->backend());
  }

 private:
  void issue(const std::string& path, const std::string& message) {
    issues.push_back((path.empty() ? std::string("/") : path) + ": " + message);
  }

  std::optional<std::string> kind(const json& j, const std::string& path) {
    if (!j.is_object()) {
      issue(path, "expected an object");
      return std::nullopt;
    }
    auto it = j.find("type");
    if (it == j.end() || !it->is_string()) {
      issue(path, "missing string field \"type\"");
      return std::nullopt;
    }
    auto t = it->get<std::string>();
    if (t != "free" && t != "weighted_abelian" && t != "cyclic" && t != "graph_product") {
      issue(path + "/type", "unknown group type \"" + t + "\"");
      return std::nullopt;
    }
    return t;
  }

  void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (auto a : allowed) ok = ok || it.key() == a;
      if (!ok) issue(path + "/" + it.key(), "unknown field");
    }
  }

  std::optional<std::int64_t> positive_int(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
      issue(path, std::string("missing field \"") + key + "\"");
      return std::nullopt;
    }
    if (!it->is_number_integer()) {
      issue(path + "/" + key, "expected an integer");
      return std::nullopt;
    }
    auto v = it->get<std::int64_t>();
    if (v < 1) {
      issue(path + "/" + key, "must be >= 1, got " + std::to_string(v));
      return std::nullopt;
    }
    return v;
  }

  std::optional<VertexGroup> vertex(const json& j, const std::string& path, const std::string& type) {
    if (type == "free") {
      only_keys(j, path, {"type", "rank"});
      auto rank = positive_int(j, path, "rank");
      if (!rank) return std::nullopt;
      if (*rank > 1'000'000) {
        issue(path + "/rank", "rank too large");
        return std::nullopt;
      }
      return VertexGroup(FreeGroup(static_cast<int>(*rank)));
    }
    if (type == "cyclic") {
      only_keys(j, path, {"type", "order"});
      auto order = positive_int(j, path, "order");
      if (!order) return std::nullopt;
      return VertexGroup(CyclicGroup(*order));
    }
    only_keys(j, path, {"type", "weights"});
    auto it = j.find("weights");
    if (it == j.end() || !it->is_array() || it->empty()) {
      issue(path + "/weights", "expected a nonempty array of weights");
      return std::nullopt;
    }
    std::vector<Rational> weights;
    bool ok = true;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& w = (*it)[i];
      auto wpath = path + "/weights/" + std::to_string(i);
      try {
        Rational q;
        if (w.is_number_integer())
          q = Rational(w.get<std::int64_t>());
        else if (w.is_number_float())
          q = rational_from_double(w.get<double>());
        else if (w.is_string())
          q = parse_rational(w.get<std::string>());
        else
          throw ParseError("expected a number or \"p/q\" string");
        if (q < 1) {
          issue(wpath, "weight " + to_string(q) + " < 1 (properness requires weights >= 1)");
          ok = false;
        }
        weights.push_back(q);
      } catch (const Error& e) {
        issue(wpath, e.what());
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return VertexGroup(WeightedAbelianGroup(std::move(weights)));
  }

  std::optional<GraphProduct> graph_product(const json& j) {
    only_keys(j, "", {"type", "vertices", "edges", "vertex_groups"});
    auto k = positive_int(j, "", "vertices");
    std::vector<VertexGroup> groups;
    bool ok = k.has_value();
    auto vg = j.find("vertex_groups");
    if (vg == j.end() || !vg->is_array()) {
      issue("/vertex_groups", "expected an array of vertex group configs");
      ok = false;
    } else {
      if (k && vg->size() != static_cast<std::size_t>(*k)) {
        issue("/vertex_groups", "expected " + std::to_string(*k) + " entries, got " + std::to_string(vg->size()));
        ok = false;
      }
      for (std::size_t i = 0; i < vg->size(); ++i) {
        auto path = "/vertex_groups/" + std::to_string(i);
        auto type = kind((*vg)[i], path);
        if (!type) {
          ok = false;
          continue;
        }
        if (*type == "graph_product") {
          issue(path + "/type", "nested graph products are not supported as vertex groups");
          ok = false;
          continue;
        }
        auto g = vertex((*vg)[i], path, *type);
        if (g)
          groups.push_back(std::move(*g));
        else
          ok = false;
      }
    }
    std::vector<GraphProduct::Edge> edges;
    auto ej = j.find("edges");
    if (ej == j.end() || !ej->is_array()) {
      issue("/edges", "expected an array of [i,j] pairs");
      ok = false;
    } else {
      std::set<std::pair<std::int64_t, std::int64_t>> seen;
      for (std::size_t i = 0; i < ej->size(); ++i) {
        const auto& e = (*ej)[i];
        auto path = "/edges/" + std::to_string(i);
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
          issue(path, "expected [i,j] with integer endpoints");
          ok = false;
          continue;
        }
        auto a = e[0].get<std::int64_t>();
        auto b = e[1].get<std::int64_t>();
        if (a < 0 || b < 0 || (k && (a >= *k || b >= *k))) {
          issue(path, "endpoint out of range");
          ok = false;
          continue;
        }
        if (a == b) {
          issue(path, "loop at vertex " + std::to_string(a));
          ok = false;
          continue;
        }
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
          issue(path, "duplicate edge " + std::to_string(a) + "-" + std::to_string(b));
          ok = false;
          continue;
        }
        edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
      }
    }
    if (!ok) return std::nullopt;
    return GraphProduct(std::move(groups), edges);
  }
};

}  // namespace detail

/// Builds a group from its JSON config; every schema violation is reported.
inline Group group_from_json(const nlohmann::json& config) {
  detail::ConfigReader reader;
  auto group = reader.top(config);
  if (!group || !reader.issues.empty()) {
    if (reader.issues.empty()) reader.issues.push_back("/: invalid config");
    throw ConfigError(reader.issues);
  }
  return std::move(*group);
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path + ": malformed JSON (" + std::string(e.what()) + ")"});
  }
}

/// A validated group config and its digest.
struct GroupConfig {
  Group group;
  nlohmann::json source;
  std::string digest;  // FNV-1a of the compact canonical dump
};

inline GroupConfig validate_config(const nlohmann::json& config) {
  auto group = group_from_json(config);
  return GroupConfig{std::move(group), config, hex64(fnv1a(config.dump()))};
}

inline GroupConfig validate_config_file(const std::string& path) { return validate_config(read_json_file(path)); }

}  // namespace rdlab
