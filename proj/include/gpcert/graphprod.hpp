#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gpcert/groups.hpp"

namespace gpcert {

struct VertexInfo {
  std::string id;
  std::int64_t weight = 1;
  VertexGroupSpec group;
};

// A finite simple graph with one vertex group per vertex; adjacent vertex
// groups commute elementwise in the product.
struct ProductGraph {
  std::vector<VertexInfo> vertices;
  std::vector<std::vector<bool>> adj;
  std::int64_t max_syllables = 32;      // cap on reduced word length
  std::int64_t node_cap = 5'000'000;    // cap on search-tree nodes

  int vertex_index(const std::string& id) const;  // -1 when absent
  bool adjacent(int u, int v) const {
    return adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
  }
  bool weights_injective() const;
};

// Validates ids (charset [A-Za-z0-9_-], "e" reserved for the empty word),
// positive weights, and edges (existing endpoints, no loops, no duplicates).
ProductGraph make_product_graph(std::vector<VertexInfo> vertices,
                                const std::vector<std::pair<std::string, std::string>>& edges);

struct Syllable {
  int vertex = 0;
  GroupElement elem;
  friend bool operator==(const Syllable&, const Syllable&) = default;
  friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

using GPWord = std::vector<Syllable>;

// Throws ConfigError unless every syllable has a known vertex and an element
// valid for that vertex's group. Identity elements are tolerated on input
// words; they are dropped by reduce and never appear in normal forms.
void validate_word(const ProductGraph& graph, const GPWord& word);

// Canonical normal form: identities dropped, same-vertex syllables merged
// whenever the letters between them commute past, and the result ordered by
// the leftmost-greedy rule — repeatedly emit, among syllables not forced to
// wait for an earlier one, the one with the smallest (weight, vertex index).
// Two words present the same element iff their normal forms are equal.
GPWord reduce(const ProductGraph& graph, const GPWord& word);

GPWord gp_multiply(const ProductGraph& graph, const GPWord& a, const GPWord& b);
GPWord gp_invert(const ProductGraph& graph, const GPWord& a);

// The induced subgraph on vertices of weight <= r.
struct SubgraphR {
  std::int64_t r = 0;
  std::vector<int> vertices;  // ascending vertex indices
};

SubgraphR gamma_r(const ProductGraph& graph, std::int64_t r);

// True iff every syllable of the word lies at a vertex of weight <= r; the
// empty word qualifies.
bool in_gamma_r(const ProductGraph& graph, const GPWord& word, std::int64_t r);

// A reduced presentation of the same element in which the last syllable from
// a weight-<= r vertex sits as far right as any reduced presentation allows.
GPWord standard_form(const ProductGraph& graph, const GPWord& word, std::int64_t r);

// True iff no reduced presentation of the element ends with a syllable from a
// weight-<= r vertex. The identity is permissible.
bool is_permissible(const ProductGraph& graph, const GPWord& word, std::int64_t r);

// Factor g = x * b with x permissible at scale r and b supported on
// weight-<= r vertices; the pair of group elements is unique.
std::pair<GPWord, GPWord> decompose_xb(const ProductGraph& graph, const GPWord& word,
                                       std::int64_t r);

int clique_number(const ProductGraph& graph);
int clique_number(const ProductGraph& graph, const std::vector<int>& subset);

// Word grammar: `e` or syllables joined by `*`. A syllable is `id^k` for
// cyclic and rank-1 free-abelian vertices, and `id[literal]` otherwise
// (coordinate vector, letter string, or table label).
std::string print_word(const ProductGraph& graph, const GPWord& word);
GPWord parse_word(const ProductGraph& graph, const std::string& text);

}  // namespace gpcert
