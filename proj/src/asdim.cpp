#include "gpcert/asdim.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "gpcert/errors.hpp"
#include "gpcert/groups.hpp"
#include "gpcert/metric.hpp"

namespace gpcert {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

// The subword of syllables at branching vertices, in place. Within a reduced
// word two same-vertex branch syllables always have a branch separator, so
// the extracted word is itself reduced.
GPWord branch_part(const LightStructure& light, const GPWord& b) {
  GPWord out;
  for (const auto& s : b) {
    if (std::binary_search(light.branch.begin(), light.branch.end(), s.vertex)) {
      out.push_back(s);
    }
  }
  return out;
}

struct PlacementKey {
  std::vector<std::int64_t> windows;
  std::string anchor;
};

// Window arithmetic shared by the base cover and the full witness. Every
// windowed coordinate is measured in weighted units; colors differ by a shift
// of L per color index.
//
// With a single coordinate the two colors partition the line exactly into
// alternating blocks of length L = 2(R+1); consecutive same-color blocks are
// L > R apart. With several coordinates each color keeps, per coordinate, a
// window of length Lambda - 2*margin out of every Lambda = L * color_count,
// safety margin `margin` on each side; same-color windows are 2*margin > R
// apart and any single value can fall in the margin zone of at most one color
// (2*margin <= L), so with coords + 1 colors some color is always unblocked.
struct Placer {
  const ProductGraph& graph;
  const LightStructure& light;
  std::int64_t R;
  std::int64_t L;
  std::int64_t coord_count;
  std::int64_t color_count;
  bool single;
  std::int64_t lambda;
  std::int64_t margin;

  Placer(const ProductGraph& graph_in, const LightStructure& light_in, std::int64_t r_in)
      : graph(graph_in), light(light_in), R(r_in) {
    L = 2 * (R + 1);
    coord_count =
        static_cast<std::int64_t>(light.coords.size()) + (light.branch_coordinate ? 1 : 0);
    color_count = light.color_count;
    single = coord_count == 1;
    lambda = L * color_count;
    margin = R / 2 + 1;
  }

  // Weighted coordinate values of a light element, branch norm last.
  std::vector<std::int64_t> values(const GPWord& b) const {
    std::vector<std::int64_t> vals;
    vals.reserve(static_cast<std::size_t>(coord_count));
    for (const auto& c : light.coords) {
      std::int64_t z = 0;
      for (const auto& s : b) {
        if (s.vertex == c.vertex) {
          z = s.elem.v[static_cast<std::size_t>(c.component)];
          break;  // a core syllable appears at most once in a reduced word
        }
      }
      vals.push_back(graph.vertices[static_cast<std::size_t>(c.vertex)].weight * z);
    }
    if (light.branch_coordinate) {
      vals.push_back(syllable_norm(graph, branch_part(light, b)));
    }
    return vals;
  }

  // Window placement of one value under one color: window index, or blocked.
  // Also reports the window's lower edge (for ancestor thresholds).
  std::optional<std::pair<std::int64_t, std::int64_t>> window(std::int64_t value,
                                                              std::int64_t color) const {
    const std::int64_t rel = value - color * L;
    if (single) {
      const std::int64_t m = floor_div(rel, 2 * L);
      const std::int64_t off = rel - 2 * L * m;
      if (off >= L) return std::nullopt;
      return std::pair{m, color * L + 2 * L * m};
    }
    const std::int64_t m = floor_div(rel, lambda);
    const std::int64_t off = rel - lambda * m;
    if (off < margin || off >= lambda - margin) return std::nullopt;
    return std::pair{m, color * L + lambda * m + margin};
  }

  std::optional<PlacementKey> place(const GPWord& b, std::int64_t color) const {
    PlacementKey key;
    if (coord_count == 0) return key;
    const auto vals = values(b);
    std::int64_t branch_lo = 0;
    for (std::int64_t j = 0; j < coord_count; ++j) {
      const auto w = window(vals[static_cast<std::size_t>(j)], color);
      if (!w) return std::nullopt;
      key.windows.push_back(w->first);
      if (light.branch_coordinate && j == coord_count - 1) branch_lo = w->second;
    }
    if (light.branch_coordinate) {
      const std::int64_t t = std::max<std::int64_t>(0, branch_lo - (R + 1 + light.rewind));
      GPWord anc = branch_part(light, b);
      while (syllable_norm(graph, anc) > t) word_parent_step(graph, anc);
      key.anchor = print_word(graph, anc);
    }
    return key;
  }
};

std::string bucket_string(const std::string& translate, const PlacementKey& key) {
  std::ostringstream out;
  out << translate << "/";
  for (std::int64_t m : key.windows) out << m << ",";
  out << "/" << key.anchor;
  return out.str();
}

// Group words by (color, bucket) and emit one sorted family per color with
// sets ordered by their lexicographically smallest member.
std::vector<SetFamily<GPWord>> assemble_colors(
    const ProductGraph& graph, std::int64_t color_count,
    const std::vector<std::map<std::string, std::vector<GPWord>>>& buckets) {
  std::vector<SetFamily<GPWord>> families;
  for (std::int64_t c = 0; c < color_count; ++c) {
    SetFamily<GPWord> fam;
    fam.label = "color-" + std::to_string(c);
    std::vector<std::pair<std::string, std::vector<GPWord>>> sets;
    for (const auto& [key, words] : buckets[static_cast<std::size_t>(c)]) {
      std::vector<std::pair<std::string, GPWord>> tagged;
      tagged.reserve(words.size());
      for (const auto& w : words) tagged.emplace_back(print_word(graph, w), w);
      std::sort(tagged.begin(), tagged.end());
      std::vector<GPWord> set;
      set.reserve(tagged.size());
      for (auto& [_, w] : tagged) set.push_back(std::move(w));
      sets.emplace_back(tagged.front().first, std::move(set));
    }
    std::sort(sets.begin(), sets.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, set] : sets) fam.sets.push_back(std::move(set));
    families.push_back(std::move(fam));
  }
  return families;
}

}  // namespace

LightStructure analyze_light_structure(const ProductGraph& graph, std::int64_t R) {
  LightStructure light;
  light.sub = gamma_r(graph, R);
  const auto& verts = light.sub.vertices;

  for (int v : verts) {
    const auto& g = graph.vertices[static_cast<std::size_t>(v)].group;
    if (g.kind == GroupKind::Free) {
      throw RefusalError("free vertex groups below the scale are not supported");
    }
  }

  for (int v : verts) {
    bool universal = true;
    for (int u : verts) {
      if (u != v && !graph.adjacent(u, v)) {
        universal = false;
        break;
      }
    }
    (universal ? light.core : light.branch).push_back(v);
  }

  for (std::size_t i = 0; i < light.branch.size(); ++i) {
    for (std::size_t j = i + 1; j < light.branch.size(); ++j) {
      if (graph.adjacent(light.branch[i], light.branch[j])) {
        throw RefusalError("light subgraph is not a clique joined to an edgeless rest");
      }
    }
  }
  for (int v : light.branch) {
    const auto& g = graph.vertices[static_cast<std::size_t>(v)].group;
    if (g.kind == GroupKind::FreeAbelian && g.rank >= 2) {
      throw RefusalError("free-abelian rank >= 2 outside the light core is not supported");
    }
  }

  bool any_abelian = false;
  for (int v : verts) {
    const auto& g = graph.vertices[static_cast<std::size_t>(v)].group;
    if (g.kind == GroupKind::FreeAbelian) {
      any_abelian = true;
      light.max_vertex_dim = std::max(light.max_vertex_dim, static_cast<std::int64_t>(g.rank));
    }
  }
  for (int v : light.core) {
    const auto& g = graph.vertices[static_cast<std::size_t>(v)].group;
    if (g.kind == GroupKind::FreeAbelian) {
      for (std::int64_t comp = 0; comp < g.rank; ++comp) {
        light.coords.push_back(BrickCoordinate{v, static_cast<int>(comp)});
      }
    }
  }

  if (verts.empty()) {
    light.shape = LightShape::Empty;
  } else if (light.branch.empty()) {
    light.shape = any_abelian ? LightShape::AbelianCore : LightShape::FiniteCore;
  } else {
    light.shape = LightShape::Branching;
    light.branch_coordinate = true;
    for (int v : light.branch) {
      const auto& vert = graph.vertices[static_cast<std::size_t>(v)];
      const std::int64_t step = vert.group.kind == GroupKind::FreeAbelian
                                    ? vert.weight
                                    : vert.weight * vg_diameter(vert.group);
      light.rewind = std::max(light.rewind, step);
    }
  }

  light.clique_size = verts.empty() ? 0 : clique_number(graph, verts);
  const std::int64_t coord_count =
      static_cast<std::int64_t>(light.coords.size()) + (light.branch_coordinate ? 1 : 0);
  light.color_count = coord_count == 0 ? 1 : coord_count + 1;
  return light;
}

std::vector<SetFamily<GPWord>> build_base_cover(const ProductGraph& graph, std::int64_t R,
                                                std::int64_t ball_radius) {
  const LightStructure light = analyze_light_structure(graph, R);
  const Placer placer(graph, light, R);
  const auto ball = gp_ball_subgroup(graph, light.sub.vertices, ball_radius, graph.node_cap);

  std::vector<std::map<std::string, std::vector<GPWord>>> buckets(
      static_cast<std::size_t>(light.color_count));
  for (const auto& b : ball) {
    for (std::int64_t c = 0; c < light.color_count; ++c) {
      if (const auto key = placer.place(b, c)) {
        buckets[static_cast<std::size_t>(c)][bucket_string("", *key)].push_back(b);
        break;
      }
    }
  }
  return assemble_colors(graph, light.color_count, buckets);
}

AsdimWitness build_asdim_witness(const ProductGraph& graph, std::int64_t R,
                                 std::int64_t ball_radius) {
  AsdimWitness wit;
  wit.scale = R;
  wit.ball_radius = ball_radius;
  wit.structure = analyze_light_structure(graph, R);
  wit.base = build_base_cover(graph, R, ball_radius);

  const Placer placer(graph, wit.structure, R);
  const auto ball = gp_ball(graph, GPWord{}, ball_radius, graph.node_cap);

  std::vector<std::map<std::string, std::vector<GPWord>>> buckets(
      static_cast<std::size_t>(wit.structure.color_count));
  std::map<std::string, GPWord> permissible;
  for (const auto& g : ball) {
    const auto [x, b] = decompose_xb(graph, g, R);
    const std::string x_str = print_word(graph, x);
    permissible.emplace(x_str, x);
    for (std::int64_t c = 0; c < wit.structure.color_count; ++c) {
      if (const auto key = placer.place(b, c)) {
        buckets[static_cast<std::size_t>(c)][bucket_string(x_str, *key)].push_back(g);
        break;
      }
    }
  }
  wit.families = assemble_colors(graph, wit.structure.color_count, buckets);
  wit.permissible.reserve(permissible.size());
  for (auto& [_, x] : permissible) wit.permissible.push_back(std::move(x));
  return wit;
}

std::optional<CrossViolation> find_cover_violation(const ProductGraph& graph,
                                                   const std::vector<ScaledFamily>& families,
                                                   std::int64_t ball_radius) {
  std::int64_t r_max = 0;
  for (const auto& f : families) r_max = std::max(r_max, f.r);

  std::map<GPWord, std::vector<std::pair<std::size_t, std::size_t>>> membership;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& sets = families[f].family->sets;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      for (const auto& w : sets[s]) membership[w].emplace_back(f, s);
    }
  }

  const auto ball = gp_ball(graph, GPWord{}, ball_radius, graph.node_cap);
  const auto steps = gp_ball(graph, GPWord{}, r_max, graph.node_cap);
  for (const auto& p : ball) {
    const auto pm = membership.find(p);
    if (pm == membership.end()) continue;
    for (const auto& z : steps) {
      if (z.empty()) continue;
      const std::int64_t dist = syllable_norm(graph, z);
      const GPWord q = gp_multiply(graph, p, z);
      const auto qm = membership.find(q);
      if (qm == membership.end()) continue;
      for (const auto& [fa, sa] : pm->second) {
        if (dist > families[fa].r) continue;
        for (const auto& [fb, sb] : qm->second) {
          if (fa == fb && sa != sb) {
            return CrossViolation{families[fa].family->label, sa,          sb,
                                  print_word(graph, p),       print_word(graph, q),
                                  dist};
          }
        }
      }
    }
  }
  return std::nullopt;
}

bool covers_ball(const ProductGraph& graph, const std::vector<SetFamily<GPWord>>& families,
                 std::int64_t ball_radius) {
  const auto ball = gp_ball(graph, GPWord{}, ball_radius, graph.node_cap);
  std::map<GPWord, bool> seen;
  for (const auto& p : ball) seen[p] = false;
  for (const auto& fam : families) {
    for (const auto& set : fam.sets) {
      for (const auto& w : set) {
        const auto it = seen.find(w);
        if (it == seen.end()) return false;  // element outside the ball
        it->second = true;
      }
    }
  }
  for (const auto& [_, hit] : seen) {
    if (!hit) return false;
  }
  return true;
}

}  // namespace gpcert
