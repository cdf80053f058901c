#include "gpcert/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gpcert/errors.hpp"
#include "gpcert/groups.hpp"

namespace gpcert {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("config: " + path + " must be an object");
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::vector<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const std::string& key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("config: unknown key '" + it.key() + "' in " + path);
  }
}

std::int64_t get_int(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("config: " + path + " is missing \"" + key + "\"");
  if (!it->is_number_integer()) throw ConfigError("config: " + path + "." + key + " must be an integer");
  return it->get<std::int64_t>();
}

std::int64_t get_int_or(const json& obj, const std::string& key, const std::string& path,
                        std::int64_t fallback) {
  if (obj.find(key) == obj.end()) return fallback;
  return get_int(obj, key, path);
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("config: " + path + " is missing \"" + key + "\"");
  if (!it->is_string()) throw ConfigError("config: " + path + "." + key + " must be a string");
  return it->get<std::string>();
}

std::vector<std::string> get_string_array(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw ConfigError("config: " + path + " must be an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) {
      throw ConfigError("config: " + path + "[" + std::to_string(i) + "] must be a string");
    }
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

VertexGroupSpec parse_group(const json& g, const std::string& path) {
  require_object(g, path);
  const std::string kind = get_string(g, "kind", path);
  if (kind == "cyclic") {
    reject_unknown_keys(g, path, {"kind", "modulus", "generators"});
    const std::int64_t modulus = get_int(g, "modulus", path);
    std::vector<std::int64_t> residues;
    if (g.find("generators") != g.end()) {
      const json& arr = g.at("generators");
      if (!arr.is_array()) throw ConfigError("config: " + path + ".generators must be an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number_integer()) {
          throw ConfigError("config: " + path + ".generators[" + std::to_string(i) +
                            "] must be an integer residue");
        }
        residues.push_back(arr[i].get<std::int64_t>());
      }
    }
    return make_cyclic(modulus, residues);
  }
  if (kind == "free-abelian") {
    reject_unknown_keys(g, path, {"kind", "rank"});
    const std::int64_t rank = get_int(g, "rank", path);
    if (rank < 1 || rank > 1'000'000) throw ConfigError("config: " + path + ".rank out of range");
    return make_free_abelian(static_cast<int>(rank));
  }
  if (kind == "free") {
    reject_unknown_keys(g, path, {"kind", "rank", "max_letters"});
    const std::int64_t rank = get_int(g, "rank", path);
    if (rank < 1 || rank > 1'000'000) throw ConfigError("config: " + path + ".rank out of range");
    const std::int64_t max_letters = get_int_or(g, "max_letters", path, 64);
    return make_free(static_cast<int>(rank), max_letters);
  }
  if (kind == "table") {
    reject_unknown_keys(g, path, {"kind", "labels", "table", "generators"});
    if (g.find("labels") == g.end() || g.find("table") == g.end()) {
      throw ConfigError("config: " + path + " needs \"labels\" and \"table\"");
    }
    const std::vector<std::string> labels = get_string_array(g.at("labels"), path + ".labels");
    const json& rows = g.at("table");
    if (!rows.is_array()) throw ConfigError("config: " + path + ".table must be an array of rows");
    std::vector<std::vector<std::string>> table;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      table.push_back(get_string_array(rows[i], path + ".table[" + std::to_string(i) + "]"));
    }
    std::vector<std::string> generators;
    if (g.find("generators") != g.end()) {
      generators = get_string_array(g.at("generators"), path + ".generators");
    }
    return make_finite_table(labels, table, generators);
  }
  throw ConfigError("config: " + path + ".kind must be one of \"cyclic\", \"free-abelian\", " +
                    "\"free\", \"table\" (got \"" + kind + "\")");
}

json emit_group(const VertexGroupSpec& g) {
  json out;
  switch (g.kind) {
    case GroupKind::Cyclic: {
      out["kind"] = "cyclic";
      out["modulus"] = g.modulus;
      json gens = json::array();
      for (const GroupElement& e : g.generators) gens.push_back(e.v.at(0));
      out["generators"] = std::move(gens);
      break;
    }
    case GroupKind::FreeAbelian:
      out["kind"] = "free-abelian";
      out["rank"] = g.rank;
      break;
    case GroupKind::Free:
      out["kind"] = "free";
      out["rank"] = g.rank;
      out["max_letters"] = g.max_letters;
      break;
    case GroupKind::FiniteTable: {
      out["kind"] = "table";
      out["labels"] = g.labels;
      json rows = json::array();
      for (const auto& row : g.table) {
        json cells = json::array();
        for (int idx : row) cells.push_back(g.labels.at(static_cast<std::size_t>(idx)));
        rows.push_back(std::move(cells));
      }
      out["table"] = std::move(rows);
      json gens = json::array();
      for (const GroupElement& e : g.generators) {
        gens.push_back(g.labels.at(static_cast<std::size_t>(e.v.at(0))));
      }
      out["generators"] = std::move(gens);
      break;
    }
  }
  return out;
}

// Normalized re-emission: declaration order for vertices, each edge with its
// lower-index endpoint first, edge list sorted by endpoint indices, defaults
// and budgets explicit. json sorts object keys, so the dump is canonical.
std::string canonicalize(const ProductGraph& graph, std::int64_t default_ball) {
  json out;
  json vertices = json::array();
  for (const VertexInfo& v : graph.vertices) {
    json jv;
    jv["id"] = v.id;
    jv["weight"] = v.weight;
    jv["group"] = emit_group(v.group);
    vertices.push_back(std::move(jv));
  }
  out["vertices"] = std::move(vertices);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t u = 0; u < graph.vertices.size(); ++u) {
    for (std::size_t v = u + 1; v < graph.vertices.size(); ++v) {
      if (graph.adj[u][v]) edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
  }
  json jedges = json::array();
  for (const auto& [u, v] : edges) {
    jedges.push_back(json::array({graph.vertices[static_cast<std::size_t>(u)].id,
                                  graph.vertices[static_cast<std::size_t>(v)].id}));
  }
  out["edges"] = std::move(jedges);
  out["budgets"] = {{"node_cap", graph.node_cap}, {"max_syllables", graph.max_syllables}};
  out["defaults"] = {{"ball", default_ball}};
  return out.dump(2) + "\n";
}

}  // namespace

WorkbenchConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(std::string("config JSON: ") + e.what(), pos);
  }
  require_object(doc, "the document");
  reject_unknown_keys(doc, "the document", {"vertices", "edges", "budgets", "defaults"});

  const auto vit = doc.find("vertices");
  if (vit == doc.end() || !vit->is_array() || vit->empty()) {
    throw ConfigError("config: \"vertices\" must be a non-empty array");
  }
  std::vector<VertexInfo> vertices;
  for (std::size_t i = 0; i < vit->size(); ++i) {
    const std::string path = "vertices[" + std::to_string(i) + "]";
    const json& jv = (*vit)[i];
    require_object(jv, path);
    reject_unknown_keys(jv, path, {"id", "weight", "group"});
    VertexInfo info;
    info.id = get_string(jv, "id", path);
    info.weight = get_int(jv, "weight", path);
    const auto git = jv.find("group");
    if (git == jv.end()) throw ConfigError("config: " + path + " is missing \"group\"");
    info.group = parse_group(*git, path + ".group");
    vertices.push_back(std::move(info));
  }

  std::vector<std::pair<std::string, std::string>> edges;
  if (doc.find("edges") != doc.end()) {
    const json& jedges = doc.at("edges");
    if (!jedges.is_array()) throw ConfigError("config: \"edges\" must be an array");
    for (std::size_t i = 0; i < jedges.size(); ++i) {
      const std::string path = "edges[" + std::to_string(i) + "]";
      const json& je = jedges[i];
      if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string()) {
        throw ConfigError("config: " + path + " must be a pair of vertex ids");
      }
      edges.emplace_back(je[0].get<std::string>(), je[1].get<std::string>());
    }
  }

  WorkbenchConfig cfg;
  cfg.graph = make_product_graph(std::move(vertices), edges);

  if (doc.find("budgets") != doc.end()) {
    const json& budgets = doc.at("budgets");
    require_object(budgets, "budgets");
    reject_unknown_keys(budgets, "budgets", {"node_cap", "max_syllables"});
    cfg.graph.node_cap = get_int_or(budgets, "node_cap", "budgets", cfg.graph.node_cap);
    cfg.graph.max_syllables =
        get_int_or(budgets, "max_syllables", "budgets", cfg.graph.max_syllables);
    if (cfg.graph.node_cap < 1) throw ConfigError("config: budgets.node_cap must be >= 1");
    if (cfg.graph.max_syllables < 1) throw ConfigError("config: budgets.max_syllables must be >= 1");
  }
  if (doc.find("defaults") != doc.end()) {
    const json& defaults = doc.at("defaults");
    require_object(defaults, "defaults");
    reject_unknown_keys(defaults, "defaults", {"ball"});
    cfg.default_ball_radius = get_int_or(defaults, "ball", "defaults", cfg.default_ball_radius);
    if (cfg.default_ball_radius < 0) throw ConfigError("config: defaults.ball must be >= 0");
  }

  cfg.canonical_text = canonicalize(cfg.graph, cfg.default_ball_radius);
  return cfg;
}

WorkbenchConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

WorkbenchConfig with_node_cap(const WorkbenchConfig& cfg, std::int64_t node_cap) {
  if (node_cap < 1) throw ConfigError("config: node budget must be >= 1");
  WorkbenchConfig out = cfg;
  out.graph.node_cap = node_cap;
  out.canonical_text = canonicalize(out.graph, out.default_ball_radius);
  return out;
}

}  // namespace gpcert
