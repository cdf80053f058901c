#include "gpcert/certio.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gpcert/apc.hpp"
#include "gpcert/asdim.hpp"
#include "gpcert/covers.hpp"
#include "gpcert/decomp.hpp"
#include "gpcert/errors.hpp"
#include "gpcert/graphprod.hpp"
#include "gpcert/metric.hpp"

namespace gpcert {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "gpcert/1";

// --- canonical serialization and integrity digest ----------------------------

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

// The digest covers the canonical dump of the document without the digest
// field itself; json objects iterate in sorted key order, so the dump is
// canonical. The digest is an integrity checksum (detects accidental edits),
// not a signature — semantic validity rests on the rebuild comparison.
std::string canonical_payload(json doc) {
  doc.erase("digest");
  return doc.dump(2) + "\n";
}

std::string finalize_document(json doc) {
  doc["digest"] = fnv1a64_hex(canonical_payload(doc));
  return doc.dump(2) + "\n";
}

// First path at which two documents differ, depth-first in key order; empty
// when equal.
std::string first_difference(const json& a, const json& b, const std::string& path) {
  if (a == b) return "";
  if (a.type() != b.type() || a.is_primitive()) return path;
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) return path + "." + it.key();
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!a.contains(it.key())) return path + "." + it.key();
    }
    for (auto it = a.begin(); it != a.end(); ++it) {
      const std::string d = first_difference(it.value(), b.at(it.key()), path + "." + it.key());
      if (!d.empty()) return d;
    }
    return path;
  }
  const std::size_t shared = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < shared; ++i) {
    const std::string d = first_difference(a[i], b[i], path + "[" + std::to_string(i) + "]");
    if (!d.empty()) return d;
  }
  return path + ".length";
}

// --- strict envelope accessors ------------------------------------------------

std::string env_string(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_string()) {
    throw ConfigError(std::string("artifact: missing or non-string \"") + key + "\"");
  }
  return obj.at(key).get<std::string>();
}

std::int64_t env_int(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw ConfigError(std::string("artifact: missing or non-integer \"") + key + "\"");
  }
  return obj.at(key).get<std::int64_t>();
}

std::vector<std::int64_t> env_int_array(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_array()) {
    throw ConfigError(std::string("artifact: missing or non-array \"") + key + "\"");
  }
  std::vector<std::int64_t> out;
  for (const json& v : obj.at(key)) {
    if (!v.is_number_integer()) {
      throw ConfigError(std::string("artifact: \"") + key + "\" must hold integers");
    }
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

// --- shared rendering helpers --------------------------------------------------

std::string join_int_list(const std::vector<std::int64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string budget_line(const ProductGraph& graph) {
  return "budgets: node_cap=" + std::to_string(graph.node_cap) +
         ", max_syllables=" + std::to_string(graph.max_syllables);
}

json render_word_sets(const ProductGraph& graph, const SetFamily<GPWord>& fam) {
  std::vector<std::vector<std::string>> sets;
  for (const auto& set : fam.sets) {
    std::vector<std::string> words;
    words.reserve(set.size());
    for (const auto& w : set) words.push_back(print_word(graph, w));
    std::sort(words.begin(), words.end());
    sets.push_back(std::move(words));
  }
  std::sort(sets.begin(), sets.end());
  return json(sets);
}

json render_point_sets(const SetFamily<ZPoint>& fam) {
  auto sets = fam.sets;
  for (auto& s : sets) std::sort(s.begin(), s.end());
  std::sort(sets.begin(), sets.end());
  return json(sets);
}

// Certified diameter bound in O(set size): everything lies within `far` of
// the anchor, so any two elements are within 2*far of each other.
std::int64_t family_mesh_bound(const ProductGraph& graph, const SetFamily<GPWord>& fam) {
  std::int64_t worst = 0;
  for (const auto& set : fam.sets) {
    if (set.empty()) continue;
    std::int64_t far = 0;
    for (const auto& w : set) far = std::max(far, syllable_distance(graph, set.front(), w));
    worst = std::max(worst, 2 * far);
  }
  return worst;
}

const char* shape_name(LightShape shape) {
  switch (shape) {
    case LightShape::Empty:
      return "empty";
    case LightShape::FiniteCore:
      return "finite-core";
    case LightShape::AbelianCore:
      return "abelian-core";
    case LightShape::Branching:
      return "branching";
  }
  return "unknown";
}

json vertex_ids(const ProductGraph& graph, const std::vector<int>& indices) {
  json out = json::array();
  for (int v : indices) out.push_back(graph.vertices.at(static_cast<std::size_t>(v)).id);
  return out;
}

json embedded_config(const WorkbenchConfig& cfg) { return json::parse(cfg.canonical_text); }

// --- union-cover input document -------------------------------------------------

ZPoint parse_point(const json& jp, int dim, const std::string& path) {
  if (!jp.is_array() || static_cast<int>(jp.size()) != dim) {
    throw ConfigError("union input: " + path + " must be an array of " + std::to_string(dim) +
                      " integers");
  }
  ZPoint p;
  for (const json& c : jp) {
    if (!c.is_number_integer()) throw ConfigError("union input: " + path + " must hold integers");
    p.push_back(c.get<std::int64_t>());
  }
  return p;
}

std::vector<ZPoint> parse_points(const json& arr, int dim, const std::string& path) {
  if (!arr.is_array()) throw ConfigError("union input: " + path + " must be an array of points");
  std::vector<ZPoint> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_point(arr[i], dim, path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SetFamily<ZPoint> parse_point_family(const json& jf, int dim, const std::string& path) {
  if (!jf.is_object()) throw ConfigError("union input: " + path + " must be an object");
  SetFamily<ZPoint> fam;
  fam.label = env_string(jf, "label");
  if (!jf.contains("sets") || !jf.at("sets").is_array()) {
    throw ConfigError("union input: " + path + ".sets must be an array");
  }
  const json& sets = jf.at("sets");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    fam.sets.push_back(parse_points(sets[i], dim, path + ".sets[" + std::to_string(i) + "]"));
  }
  return fam;
}

UnionCoverInput parse_union_input(const json& doc) {
  if (!doc.is_object()) throw ConfigError("union input: document must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const char* known[] = {"dim",    "scales",         "gaps",          "bounds",
                                  "pieces", "piece_families", "shared_region", "shared_cover"};
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("union input: unknown key '" + it.key() + "'");
  }
  UnionCoverInput in;
  const std::int64_t dim = env_int(doc, "dim");
  if (dim < 1 || dim > 16) throw ConfigError("union input: dim must be in 1..16");
  in.dim = static_cast<int>(dim);
  in.scales = env_int_array(doc, "scales");
  in.gaps = env_int_array(doc, "gaps");
  in.bounds = env_int_array(doc, "bounds");
  if (!doc.contains("pieces") || !doc.at("pieces").is_array()) {
    throw ConfigError("union input: \"pieces\" must be an array");
  }
  const json& pieces = doc.at("pieces");
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const std::string path = "pieces[" + std::to_string(p) + "]";
    if (!pieces[p].is_object()) throw ConfigError("union input: " + path + " must be an object");
    UnionPiece piece;
    piece.label = env_string(pieces[p], "label");
    if (!pieces[p].contains("elements")) {
      throw ConfigError("union input: " + path + " is missing \"elements\"");
    }
    piece.elements = parse_points(pieces[p].at("elements"), in.dim, path + ".elements");
    in.pieces.push_back(std::move(piece));
  }
  if (!doc.contains("piece_families") || !doc.at("piece_families").is_array()) {
    throw ConfigError("union input: \"piece_families\" must be an array (one entry per scale)");
  }
  const json& pf = doc.at("piece_families");
  for (std::size_t s = 0; s < pf.size(); ++s) {
    const std::string path = "piece_families[" + std::to_string(s) + "]";
    if (!pf[s].is_array()) throw ConfigError("union input: " + path + " must be an array");
    std::vector<SetFamily<ZPoint>> row;
    for (std::size_t p = 0; p < pf[s].size(); ++p) {
      row.push_back(parse_point_family(pf[s][p], in.dim, path + "[" + std::to_string(p) + "]"));
    }
    in.piece_families.push_back(std::move(row));
  }
  if (doc.contains("shared_region")) {
    in.shared_region = parse_points(doc.at("shared_region"), in.dim, "shared_region");
  }
  if (doc.contains("shared_cover")) {
    const json& sc = doc.at("shared_cover");
    if (!sc.is_array()) throw ConfigError("union input: \"shared_cover\" must be an array");
    for (std::size_t s = 0; s < sc.size(); ++s) {
      in.shared_cover.push_back(
          parse_point_family(sc[s], in.dim, "shared_cover[" + std::to_string(s) + "]"));
    }
  }
  return in;
}

json render_point_family(const SetFamily<ZPoint>& fam) {
  json out;
  out["label"] = fam.label;
  out["sets"] = render_point_sets(fam);
  return out;
}

// Normalized re-emission of a union-cover problem: set elements and sets
// sorted, everything else in declaration order.
json render_union_input(const UnionCoverInput& in) {
  json out;
  out["dim"] = in.dim;
  out["scales"] = in.scales;
  out["gaps"] = in.gaps;
  out["bounds"] = in.bounds;
  json pieces = json::array();
  for (const UnionPiece& p : in.pieces) {
    json jp;
    jp["label"] = p.label;
    auto elems = p.elements;
    std::sort(elems.begin(), elems.end());
    jp["elements"] = elems;
    pieces.push_back(std::move(jp));
  }
  out["pieces"] = std::move(pieces);
  json pf = json::array();
  for (const auto& row : in.piece_families) {
    json jrow = json::array();
    for (const auto& fam : row) jrow.push_back(render_point_family(fam));
    pf.push_back(std::move(jrow));
  }
  out["piece_families"] = std::move(pf);
  auto region = in.shared_region;
  std::sort(region.begin(), region.end());
  out["shared_region"] = region;
  json sc = json::array();
  for (const auto& fam : in.shared_cover) sc.push_back(render_point_family(fam));
  out["shared_cover"] = std::move(sc);
  return out;
}

// --- game transcript rendering ---------------------------------------------------

const char* mrange_name(MRange range) {
  switch (range) {
    case MRange::All:
      return "all";
    case MRange::Geq0:
      return "m>=0";
    case MRange::Leq0:
      return "m<=0";
    case MRange::Single:
      return "single";
  }
  return "unknown";
}

json render_space_json(const AmbientZ& ambient, const Space& space) {
  json out;
  out["label"] = space.label;
  out["model"] = space.extensional ? "ball-model" : "symbolic";
  out["box"] = print_space_spec(ambient, space);
  if (space.extensional) {
    auto pts = space.points;
    std::sort(pts.begin(), pts.end());
    out["points"] = pts;
  }
  if (!space.universe_note.empty()) out["note"] = space.universe_note;
  return out;
}

json render_piece(const AmbientZ& ambient, const PieceGroup& piece) {
  json out;
  out["space"] = render_space_json(ambient, piece.space);
  out["slab_axis"] = piece.slab_axis;
  if (piece.slab_axis >= 0) {
    out["offset"] = piece.offset;
    out["period"] = piece.period;
    out["width"] = piece.width;
    out["blocks"] = mrange_name(piece.range);
  }
  return out;
}

json render_transcript_body(const GameTranscript& t) {
  json out;
  out["ambient"] = {{"dim", t.ambient.dim}, {"weights", t.ambient.weights}};
  out["scales"] = t.scales;
  json start = json::array();
  for (const Space& s : t.start.spaces) start.push_back(render_space_json(t.ambient, s));
  out["start"] = std::move(start);
  json steps = json::array();
  for (const GameStep& step : t.steps) {
    json js;
    js["scale"] = step.scale;
    json sources = json::array();
    for (const SourceDecomposition& sd : step.dec.per_source) {
      json jsrc;
      jsrc["source"] = render_space_json(t.ambient, sd.source);
      json colors = json::array();
      for (const auto& color : sd.colors) {
        json jcolor = json::array();
        for (const PieceGroup& piece : color) jcolor.push_back(render_piece(t.ambient, piece));
        colors.push_back(std::move(jcolor));
      }
      jsrc["colors"] = std::move(colors);
      sources.push_back(std::move(jsrc));
    }
    js["sources"] = std::move(sources);
    steps.push_back(std::move(js));
  }
  out["steps"] = std::move(steps);
  out["failed"] = t.failed;
  if (t.failed) {
    out["failure"] = t.failure;
    out["final_bound"] = nullptr;
  } else {
    out["final_bound"] = t.final_bound;
  }
  if (!t.universe_note.empty()) out["note"] = t.universe_note;
  return out;
}

Strategy strategy_by_name(const std::string& name) {
  if (name == "zn") return make_slab_strategy();
  throw ConfigError("unknown strategy '" + name + "' (available: zn)");
}

// --- verify dispatch ---------------------------------------------------------------

Artifact rebuild_from_inputs(const std::string& kind, const json& inputs) {
  if (kind == "asdim-cover" || kind == "apc-free-cover" || kind == "tree-cover") {
    if (!inputs.contains("config")) throw ConfigError("artifact: inputs missing \"config\"");
    const WorkbenchConfig cfg = parse_config(inputs.at("config").dump(2) + "\n");
    if (kind == "asdim-cover") {
      return make_asdim_certificate(cfg, env_int(inputs, "scale"), env_int(inputs, "ball_radius"));
    }
    if (kind == "apc-free-cover") {
      return make_apc_free_certificate(cfg, env_int_array(inputs, "scales"),
                                       env_int(inputs, "ball_radius"));
    }
    return make_tree_certificate(cfg, env_int(inputs, "syllable_cap"), env_int(inputs, "depth"),
                                 env_int(inputs, "cover_scale"));
  }
  if (kind == "union-cover") {
    if (!inputs.contains("problem")) throw ConfigError("artifact: inputs missing \"problem\"");
    return make_union_certificate(inputs.at("problem").dump(2) + "\n");
  }
  if (kind == "sfdc-transcript") {
    return make_game_transcript(env_string(inputs, "space"), env_string(inputs, "strategy"),
                                env_int_array(inputs, "scales"));
  }
  throw ConfigError("artifact: unknown kind \"" + kind + "\"");
}

}  // namespace

// --- certificate builders -----------------------------------------------------------

Artifact make_asdim_certificate(const WorkbenchConfig& cfg, std::int64_t scale,
                                std::int64_t ball_radius) {
  if (scale < 0) throw ConfigError("scale must be >= 0");
  if (ball_radius < 0) throw ConfigError("ball radius must be >= 0");
  const ProductGraph& graph = cfg.graph;
  const AsdimWitness wit = build_asdim_witness(graph, scale, ball_radius);

  std::vector<ScaledFamily> scaled;
  scaled.reserve(wit.families.size());
  for (const auto& fam : wit.families) scaled.push_back(ScaledFamily{&fam, scale});
  if (const auto bad = find_cover_violation(graph, scaled, ball_radius)) {
    throw VerificationError("family " + bad->family + " sets " + std::to_string(bad->set_a) +
                            " and " + std::to_string(bad->set_b) + " hold " + bad->word_a +
                            " and " + bad->word_b + " at distance " +
                            std::to_string(bad->distance));
  }
  if (!covers_ball(graph, wit.families, ball_radius)) {
    throw VerificationError("families do not cover the ball exactly");
  }

  json doc;
  doc["format"] = kFormat;
  doc["kind"] = "asdim-cover";
  doc["theorem"] = "asdim-graph-product";
  doc["inputs"] = {{"config", embedded_config(cfg)},
                   {"scale", scale},
                   {"ball_radius", ball_radius}};
  doc["structure"] = {{"shape", shape_name(wit.structure.shape)},
                      {"core", vertex_ids(graph, wit.structure.core)},
                      {"branch", vertex_ids(graph, wit.structure.branch)},
                      {"coordinates", static_cast<std::int64_t>(wit.structure.coords.size()) +
                                          (wit.structure.branch_coordinate ? 1 : 0)},
                      {"family_count", wit.structure.color_count}};
  doc["permissible_count"] = wit.permissible.size();
  json families = json::array();
  std::int64_t mesh_all = 0;
  for (const auto& fam : wit.families) {
    const std::int64_t fam_mesh = graph_family_mesh(graph, fam, 10'000);
    mesh_all = std::max(mesh_all, fam_mesh);
    json jf;
    jf["label"] = fam.label;
    jf["mesh"] = fam_mesh;
    jf["sets"] = render_word_sets(graph, fam);
    families.push_back(std::move(jf));
  }
  doc["families"] = std::move(families);
  doc["mesh"] = mesh_all;
  doc["verified_disjoint_gt"] = scale;
  doc["covers_ball"] = true;
  doc["verified"] = true;

  Artifact art;
  art.text = finalize_document(doc);
  art.header = {"scale: " + std::to_string(scale),
                "ball radius: " + std::to_string(ball_radius), budget_line(graph),
                "mesh: " + std::to_string(mesh_all)};
  art.summary = std::to_string(wit.families.size()) + " families, disjoint > " +
                std::to_string(scale) + ", covering: true";
  return art;
}

Artifact make_apc_free_certificate(const WorkbenchConfig& cfg,
                                   const std::vector<std::int64_t>& scales,
                                   std::int64_t ball_radius) {
  if (ball_radius < 0) throw ConfigError("ball radius must be >= 0");
  const ProductGraph& graph = cfg.graph;
  const ApcFreeWitness wit = build_apc_free_witness(graph, scales, ball_radius);

  json doc;
  doc["format"] = kFormat;
  doc["kind"] = "apc-free-cover";
  doc["theorem"] = "apc-free-product";
  doc["inputs"] = {{"config", embedded_config(cfg)},
                   {"scales", scales},
                   {"ball_radius", ball_radius}};
  doc["effective_scales"] = wit.scales;
  doc["tail_threshold"] = wit.tail_threshold;
  doc["factor_family_counts"] = {{"a", wit.a_family_count}, {"b", wit.b_family_count}};
  json families = json::array();
  for (std::size_t i = 0; i < wit.families.size(); ++i) {
    json jf;
    jf["label"] = wit.families[i].label;
    jf["scale"] = wit.scales[i];
    jf["mesh_bound"] = family_mesh_bound(graph, wit.families[i]);
    jf["sets"] = render_word_sets(graph, wit.families[i]);
    families.push_back(std::move(jf));
  }
  doc["families"] = std::move(families);
  doc["covers_ball"] = true;
  doc["verified"] = true;

  Artifact art;
  art.text = finalize_document(doc);
  art.header = {"scales: " + join_int_list(scales) +
                    " (effective: " + join_int_list(wit.scales) + ")",
                "ball radius: " + std::to_string(ball_radius), budget_line(graph)};
  art.summary = std::to_string(wit.families.size()) + " families, scales " +
                join_int_list(wit.scales) + ", covering: true";
  return art;
}

Artifact make_tree_certificate(const WorkbenchConfig& cfg, std::int64_t syllable_cap,
                               std::int64_t depth, std::int64_t cover_scale) {
  const ProductGraph& graph = cfg.graph;
  const SyllableTree tree = build_syllable_tree(graph, syllable_cap, depth);
  const auto cover = tree_cover(tree, cover_scale);

  json doc;
  doc["format"] = kFormat;
  doc["kind"] = "tree-cover";
  doc["theorem"] = "free-product-syllable-tree";
  doc["inputs"] = {{"config", embedded_config(cfg)},
                   {"syllable_cap", syllable_cap},
                   {"depth", depth},
                   {"cover_scale", cover_scale}};
  json vertices = json::array();
  for (const GPWord& w : tree.vertices) vertices.push_back(print_word(graph, w));
  doc["vertices"] = std::move(vertices);
  doc["metric_comparison"] = {{"group_vs_edges_factor", tree.syllable_cap},
                              {"edges_vs_group_factor", 2},
                              {"verified", tree.metrics_verified}};
  json families = json::array();
  for (const auto& fam : cover) {
    auto sets = fam.sets;
    for (auto& s : sets) std::sort(s.begin(), s.end());
    std::sort(sets.begin(), sets.end());
    json jf;
    jf["label"] = fam.label;
    jf["sets"] = json(sets);
    families.push_back(std::move(jf));
  }
  doc["families"] = std::move(families);
  doc["mesh_bound"] = 6 * cover_scale;
  doc["verified_disjoint_gt"] = cover_scale;
  doc["covers_tree"] = true;
  doc["verified"] = true;

  Artifact art;
  art.text = finalize_document(doc);
  art.header = {"syllable cap: " + std::to_string(syllable_cap),
                "depth: " + std::to_string(depth),
                "cover scale: " + std::to_string(cover_scale),
                "vertices: " + std::to_string(tree.vertices.size()), budget_line(graph)};
  art.summary = std::to_string(cover.size()) + " families, disjoint > " +
                std::to_string(cover_scale) + ", mesh <= " + std::to_string(6 * cover_scale) +
                ", covering: true";
  return art;
}

Artifact make_union_certificate(const std::string& input_json_text) {
  json raw;
  try {
    raw = json::parse(input_json_text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(std::string("union input JSON: ") + e.what(), pos);
  }
  // Canonicalize before assembling so the certificate's embedded problem
  // reproduces the identical result on re-verification.
  const json canon = render_union_input(parse_union_input(raw));
  const UnionCoverInput in = parse_union_input(canon);
  const UnionCoverResult out = assemble_union_cover(in);
  if (!out.covers_union) throw VerificationError("assembled cover does not cover the union");

  json doc;
  doc["format"] = kFormat;
  doc["kind"] = "union-cover";
  doc["theorem"] = "apc-union";
  doc["inputs"] = {{"problem", canon}};
  doc["gaps"] = out.gaps;
  doc["meshes"] = out.meshes;
  doc["hypothesis_note"] = out.hypothesis_note;
  json families = json::array();
  for (const auto& fam : out.families) families.push_back(render_point_family(fam));
  doc["families"] = std::move(families);
  doc["covers_union"] = true;
  doc["verified"] = true;

  Artifact art;
  art.text = finalize_document(doc);
  art.header = {"scales: " + join_int_list(in.scales), "gaps: " + join_int_list(out.gaps),
                "declared bounds: " + join_int_list(in.bounds),
                "pieces: " + std::to_string(in.pieces.size()),
                "meshes: " + join_int_list(out.meshes)};
  art.summary =
      std::to_string(out.families.size()) + " families, covering: true";
  return art;
}

Artifact make_game_transcript(const std::string& space_spec, const std::string& strategy_name,
                              const std::vector<std::int64_t>& scales) {
  const MetricFamily start = parse_space_spec(space_spec);
  const Strategy strategy = strategy_by_name(strategy_name);
  const GameTranscript t = run_game(start, strategy, scales);
  if (!t.failed) {
    const DecompositionReport check = verify_transcript(t);
    if (!check.pass()) {
      throw VerificationError("fresh transcript failed re-verification: " + check.violations[0]);
    }
  }

  json doc;
  doc["format"] = kFormat;
  doc["kind"] = "sfdc-transcript";
  doc["theorem"] = "sfdc-game";
  doc["inputs"] = {{"space", print_space_spec(t.ambient, t.start.spaces.at(0))},
                   {"strategy", strategy_name},
                   {"scales", scales}};
  json body = render_transcript_body(t);
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  doc["verified"] = !t.failed;

  Artifact art;
  art.text = finalize_document(doc);
  art.failed = t.failed;
  art.header = {"space: " + print_space_spec(t.ambient, t.start.spaces.at(0)),
                "strategy: " + strategy_name, "scales: " + join_int_list(scales)};
  if (t.failed) {
    art.summary = "failed after " + std::to_string(t.steps.size()) + " steps: " + t.failure;
  } else {
    art.summary = std::to_string(t.steps.size()) + " steps, final bound " +
                  std::to_string(t.final_bound) + ", verified: true";
  }
  return art;
}

// --- re-verification -----------------------------------------------------------------

std::string verify_artifact_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(std::string("artifact JSON: ") + e.what(), pos);
  }
  if (!doc.is_object()) throw ConfigError("artifact: document must be an object");
  const std::string stored_digest = env_string(doc, "digest");
  const std::string computed = fnv1a64_hex(canonical_payload(doc));
  if (stored_digest != computed) {
    throw VerificationError("digest mismatch: stored " + stored_digest + ", computed " + computed);
  }
  const std::string format = env_string(doc, "format");
  if (format != kFormat) throw ConfigError("artifact: unsupported format \"" + format + "\"");
  const std::string kind = env_string(doc, "kind");
  if (!doc.contains("inputs") || !doc.at("inputs").is_object()) {
    throw ConfigError("artifact: missing \"inputs\"");
  }

  const Artifact rebuilt = rebuild_from_inputs(kind, doc.at("inputs"));
  const json rebuilt_doc = json::parse(rebuilt.text);
  json stored_payload = doc;
  stored_payload.erase("digest");
  json rebuilt_payload = rebuilt_doc;
  rebuilt_payload.erase("digest");
  if (stored_payload != rebuilt_payload) {
    const std::string where = first_difference(stored_payload, rebuilt_payload, "$");
    throw VerificationError("content mismatch at " + where +
                            " (stored artifact differs from the rebuilt one)");
  }
  if (doc.value("failed", false)) {
    throw VerificationError("artifact is marked failed: " + doc.value("failure", std::string()));
  }
  return rebuilt.summary;
}

// --- file IO ----------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ConfigError("cannot move '" + tmp + "' into place");
  }
}

}  // namespace gpcert
