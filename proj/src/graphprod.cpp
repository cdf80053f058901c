#include "gpcert/graphprod.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <set>

#include "gpcert/errors.hpp"

namespace gpcert {

namespace {

bool id_char_ok(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

const VertexGroupSpec& group_of(const ProductGraph& graph, int v) {
  return graph.vertices[static_cast<std::size_t>(v)].group;
}

std::int64_t weight_of(const ProductGraph& graph, int v) {
  return graph.vertices[static_cast<std::size_t>(v)].weight;
}

// Total order used to break ties among shuffle-independent syllables.
bool vertex_before(const ProductGraph& graph, int u, int v) {
  return std::make_pair(weight_of(graph, u), u) < std::make_pair(weight_of(graph, v), v);
}

// Append one non-identity syllable to a reduced word, merging it with the
// latest same-vertex syllable it can commute back to. Keeps the word reduced.
void push_syllable(const ProductGraph& graph, GPWord& out, const Syllable& s) {
  std::size_t merge_at = out.size();
  bool mergeable = false;
  for (std::size_t k = out.size(); k-- > 0;) {
    if (out[k].vertex == s.vertex) {
      merge_at = k;
      mergeable = true;
      break;
    }
    if (!graph.adjacent(out[k].vertex, s.vertex)) break;
  }
  if (mergeable) {
    const auto& g = group_of(graph, s.vertex);
    GroupElement merged = vg_multiply(g, out[merge_at].elem, s.elem);
    if (vg_is_identity(g, merged)) {
      out.erase(out.begin() + static_cast<std::ptrdiff_t>(merge_at));
    } else {
      out[merge_at].elem = std::move(merged);
    }
  } else {
    out.push_back(s);
  }
}

// Reduced but not yet canonically ordered.
GPWord reduce_core(const ProductGraph& graph, const GPWord& word) {
  GPWord out;
  out.reserve(word.size());
  for (const auto& s : word) {
    if (vg_is_identity(group_of(graph, s.vertex), s.elem)) continue;
    push_syllable(graph, out, s);
  }
  return out;
}

// i must precede j (positions i < j in the word) whenever their syllables
// cannot be swapped: same vertex, or distinct non-adjacent vertices.
bool dep_related(const ProductGraph& graph, const GPWord& w, std::size_t i, std::size_t j) {
  const int u = w[i].vertex;
  const int v = w[j].vertex;
  return u == v || !graph.adjacent(u, v);
}

void require_mask_width(const GPWord& w) {
  if (w.size() > 64) throw BudgetError("word exceeds the syllable cap");
}

// down[i] = set of positions forced to precede i, as a transitive closure.
std::vector<std::uint64_t> down_masks(const ProductGraph& graph, const GPWord& w) {
  require_mask_width(w);
  std::vector<std::uint64_t> down(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (dep_related(graph, w, j, i)) down[i] |= (std::uint64_t{1} << j) | down[j];
    }
  }
  return down;
}

// up[i] = set of positions forced to follow i, as a transitive closure.
std::vector<std::uint64_t> up_masks(const ProductGraph& graph, const GPWord& w) {
  require_mask_width(w);
  std::vector<std::uint64_t> up(w.size(), 0);
  for (std::size_t i = w.size(); i-- > 0;) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      if (dep_related(graph, w, i, j)) up[i] |= (std::uint64_t{1} << j) | up[j];
    }
  }
  return up;
}

// Emit the positions in `chosen` in the unique greedy order: among positions
// all of whose forced predecessors (within `chosen`) are already emitted,
// take the one at the smallest (weight, vertex index). Appends to out.
void emit_greedy(const ProductGraph& graph, const GPWord& w,
                 const std::vector<std::uint64_t>& down, std::uint64_t chosen, GPWord& out) {
  std::uint64_t remaining = chosen;
  while (remaining != 0) {
    int best = -1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if ((remaining & (std::uint64_t{1} << i)) == 0) continue;
      if ((down[i] & remaining) != 0) continue;  // must wait
      if (best < 0 || vertex_before(graph, w[i].vertex, w[static_cast<std::size_t>(best)].vertex)) {
        best = static_cast<int>(i);
      }
    }
    out.push_back(w[static_cast<std::size_t>(best)]);
    remaining &= ~(std::uint64_t{1} << best);
  }
}

GPWord canonical_order(const ProductGraph& graph, const GPWord& reduced) {
  if (reduced.size() <= 1) return reduced;
  const auto down = down_masks(graph, reduced);
  const std::uint64_t all = (reduced.size() == 64) ? ~std::uint64_t{0}
                                                   : (std::uint64_t{1} << reduced.size()) - 1;
  GPWord out;
  out.reserve(reduced.size());
  emit_greedy(graph, reduced, down, all, out);
  return out;
}

bool is_light(const ProductGraph& graph, const GPWord& w, std::size_t i, std::int64_t r) {
  return weight_of(graph, w[i].vertex) <= r;
}

}  // namespace

int ProductGraph::vertex_index(const std::string& id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

bool ProductGraph::weights_injective() const {
  std::set<std::int64_t> seen;
  for (const auto& v : vertices) {
    if (!seen.insert(v.weight).second) return false;
  }
  return true;
}

ProductGraph make_product_graph(std::vector<VertexInfo> vertices,
                                const std::vector<std::pair<std::string, std::string>>& edges) {
  if (vertices.empty()) throw ConfigError("a product graph needs at least one vertex");
  ProductGraph graph;
  graph.vertices = std::move(vertices);
  std::set<std::string> ids;
  for (const auto& v : graph.vertices) {
    if (v.id.empty()) throw ConfigError("vertex id must be non-empty");
    if (v.id == "e") throw ConfigError("vertex id 'e' is reserved for the empty word");
    for (char c : v.id) {
      if (!id_char_ok(c)) {
        throw ConfigError("vertex id '" + v.id + "' contains a character outside [A-Za-z0-9_-]");
      }
    }
    if (!ids.insert(v.id).second) throw ConfigError("duplicate vertex id '" + v.id + "'");
    if (v.weight < 1) throw ConfigError("vertex weights must be positive integers");
  }
  const std::size_t n = graph.vertices.size();
  graph.adj.assign(n, std::vector<bool>(n, false));
  std::set<std::pair<int, int>> seen_edges;
  for (const auto& [a, b] : edges) {
    const int u = graph.vertex_index(a);
    const int v = graph.vertex_index(b);
    if (u < 0) throw ConfigError("edge endpoint '" + a + "' is not a vertex");
    if (v < 0) throw ConfigError("edge endpoint '" + b + "' is not a vertex");
    if (u == v) throw ConfigError("loop edge at vertex '" + a + "'");
    const auto key = std::minmax(u, v);
    if (!seen_edges.insert(key).second) {
      throw ConfigError("duplicate edge {" + a + "," + b + "}");
    }
    graph.adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
    graph.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = true;
  }
  return graph;
}

void validate_word(const ProductGraph& graph, const GPWord& word) {
  for (const auto& s : word) {
    if (s.vertex < 0 || s.vertex >= static_cast<int>(graph.vertices.size())) {
      throw ConfigError("syllable refers to an unknown vertex");
    }
    if (!vg_is_valid(group_of(graph, s.vertex), s.elem)) {
      throw ConfigError("syllable element invalid for vertex '" +
                        graph.vertices[static_cast<std::size_t>(s.vertex)].id + "'");
    }
  }
}

GPWord reduce(const ProductGraph& graph, const GPWord& word) {
  validate_word(graph, word);
  GPWord reduced = reduce_core(graph, word);
  if (static_cast<std::int64_t>(reduced.size()) > graph.max_syllables) {
    throw BudgetError("word exceeds the syllable cap");
  }
  return canonical_order(graph, reduced);
}

GPWord gp_multiply(const ProductGraph& graph, const GPWord& a, const GPWord& b) {
  GPWord joined;
  joined.reserve(a.size() + b.size());
  joined.insert(joined.end(), a.begin(), a.end());
  joined.insert(joined.end(), b.begin(), b.end());
  return reduce(graph, joined);
}

GPWord gp_invert(const ProductGraph& graph, const GPWord& a) {
  validate_word(graph, a);
  GPWord rev;
  rev.reserve(a.size());
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    rev.push_back(Syllable{it->vertex, vg_invert(group_of(graph, it->vertex), it->elem)});
  }
  return reduce(graph, rev);
}

SubgraphR gamma_r(const ProductGraph& graph, std::int64_t r) {
  if (r < 0) throw ConfigError("scale must be non-negative");
  SubgraphR sub;
  sub.r = r;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    if (graph.vertices[i].weight <= r) sub.vertices.push_back(static_cast<int>(i));
  }
  return sub;
}

bool in_gamma_r(const ProductGraph& graph, const GPWord& word, std::int64_t r) {
  validate_word(graph, word);
  for (const auto& s : word) {
    if (weight_of(graph, s.vertex) > r) return false;
  }
  return true;
}

GPWord standard_form(const ProductGraph& graph, const GPWord& word, std::int64_t r) {
  const GPWord w = reduce(graph, word);
  const std::size_t n = w.size();
  if (n == 0) return w;
  if (in_gamma_r(graph, w, r)) return w;  // every presentation already ends light
  const auto up = up_masks(graph, w);
  // Best achievable final position (0-based) of each light syllable over all
  // reduced presentations: everything forced after it must still follow.
  int pivot = -1;
  std::size_t best_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_light(graph, w, i, r)) continue;
    const std::size_t pos = n - 1 - static_cast<std::size_t>(std::popcount(up[i]));
    if (pivot < 0 || pos > best_pos ||
        (pos == best_pos &&
         vertex_before(graph, w[i].vertex, w[static_cast<std::size_t>(pivot)].vertex))) {
      pivot = static_cast<int>(i);
      best_pos = pos;
    }
  }
  if (pivot < 0) return w;  // nothing light to move
  const auto down = down_masks(graph, w);
  const std::uint64_t all =
      (n == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  const std::uint64_t pivot_bit = std::uint64_t{1} << pivot;
  const std::uint64_t tail = up[static_cast<std::size_t>(pivot)];
  GPWord out;
  out.reserve(n);
  emit_greedy(graph, w, down, all & ~(pivot_bit | tail), out);
  out.push_back(w[static_cast<std::size_t>(pivot)]);
  emit_greedy(graph, w, down, tail, out);
  return out;
}

bool is_permissible(const ProductGraph& graph, const GPWord& word, std::int64_t r) {
  const GPWord w = reduce(graph, word);
  if (w.empty()) return true;
  const auto up = up_masks(graph, w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_light(graph, w, i, r) && up[i] == 0) return false;
  }
  return true;
}

std::pair<GPWord, GPWord> decompose_xb(const ProductGraph& graph, const GPWord& word,
                                       std::int64_t r) {
  GPWord x = reduce(graph, word);
  GPWord b;
  for (;;) {
    const auto up = up_masks(graph, x);
    int strip = -1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!is_light(graph, x, i, r) || up[i] != 0) continue;
      if (strip < 0 ||
          vertex_before(graph, x[i].vertex, x[static_cast<std::size_t>(strip)].vertex)) {
        strip = static_cast<int>(i);
      }
    }
    if (strip < 0) break;
    b = gp_multiply(graph, GPWord{x[static_cast<std::size_t>(strip)]}, b);
    x.erase(x.begin() + strip);
  }
  return {canonical_order(graph, x), b};
}

int clique_number(const ProductGraph& graph, const std::vector<int>& subset) {
  int best = 0;
  std::vector<int> clique;
  // Depth-first over subset positions; every member must be adjacent to all
  // chosen so far.
  auto rec = [&](auto&& self, std::size_t from) -> void {
    best = std::max(best, static_cast<int>(clique.size()));
    for (std::size_t p = from; p < subset.size(); ++p) {
      const int v = subset[p];
      bool ok = true;
      for (int u : clique) {
        if (!graph.adjacent(u, v)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      clique.push_back(v);
      self(self, p + 1);
      clique.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

int clique_number(const ProductGraph& graph) {
  std::vector<int> all;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) all.push_back(static_cast<int>(i));
  return clique_number(graph, all);
}

std::string print_word(const ProductGraph& graph, const GPWord& word) {
  validate_word(graph, word);
  if (word.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i > 0) out += "*";
    const auto& s = word[i];
    const auto& g = group_of(graph, s.vertex);
    out += graph.vertices[static_cast<std::size_t>(s.vertex)].id;
    const bool caret = g.kind == GroupKind::Cyclic || (g.kind == GroupKind::FreeAbelian && g.rank == 1);
    if (caret) {
      out += "^" + vg_print(g, s.elem);
    } else {
      out += "[" + vg_print(g, s.elem) + "]";
    }
  }
  return out;
}

GPWord parse_word(const ProductGraph& graph, const std::string& text) {
  if (text.empty() || text == "e") return {};
  GPWord out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t id_start = pos;
    while (pos < text.size() && id_char_ok(text[pos])) ++pos;
    if (pos == id_start) throw ParseError("expected a vertex id", id_start);
    const std::string id = text.substr(id_start, pos - id_start);
    const int v = graph.vertex_index(id);
    if (v < 0) throw ParseError("unknown vertex id '" + id + "'", id_start);
    const auto& g = group_of(graph, v);
    const bool caret = g.kind == GroupKind::Cyclic || (g.kind == GroupKind::FreeAbelian && g.rank == 1);
    GroupElement elem;
    if (caret) {
      if (pos >= text.size() || text[pos] != '^') {
        throw ParseError("expected '^' after vertex '" + id + "'", pos);
      }
      ++pos;
      const std::size_t lit_start = pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])) != 0) ++pos;
      elem = vg_parse(g, text.substr(lit_start, pos - lit_start), lit_start);
    } else {
      if (pos >= text.size() || text[pos] != '[') {
        throw ParseError("expected '[' after vertex '" + id + "'", pos);
      }
      ++pos;
      const std::size_t lit_start = pos;
      const std::size_t close = text.find(']', pos);
      if (close == std::string::npos) {
        throw ParseError("missing ']' closing the element literal", pos);
      }
      elem = vg_parse(g, text.substr(lit_start, close - lit_start), lit_start);
      pos = close + 1;
    }
    out.push_back(Syllable{v, std::move(elem)});
    if (pos == text.size()) break;
    if (text[pos] != '*') throw ParseError("expected '*' between syllables", pos);
    ++pos;
  }
  validate_word(graph, out);
  return out;
}

}  // namespace gpcert
