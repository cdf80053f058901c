#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpcert/covers.hpp"
#include "gpcert/graphprod.hpp"

namespace gpcert {

// Shape of the light subgraph (vertices of weight <= R), which determines how
// the base cover of the light subgroup is built:
//   Empty        no light vertices; the light subgroup is trivial
//   FiniteCore   complete subgraph, every light vertex group finite
//   AbelianCore  complete subgraph with at least one free-abelian group
//   Branching    a universal core plus an edgeless branching rest
enum class LightShape { Empty, FiniteCore, AbelianCore, Branching };

// One integer coordinate that carries windows: component `component` of the
// free-abelian group at `vertex`, measured in weighted units.
struct BrickCoordinate {
  int vertex = 0;
  int component = 0;
};

struct LightStructure {
  SubgraphR sub;                        // the light subgraph
  LightShape shape = LightShape::Empty;
  std::vector<int> core;                // universal light vertices (ascending)
  std::vector<int> branch;              // remaining light vertices (ascending)
  std::vector<BrickCoordinate> coords;  // windowed coordinates from the core
  bool branch_coordinate = false;       // extra coordinate: norm of the branch part
  std::int64_t rewind = 0;              // ancestor-threshold back-off
  std::int64_t max_vertex_dim = 0;      // largest free-abelian rank among light groups
  std::int64_t clique_size = 0;         // clique number of the light subgraph
  std::int64_t color_count = 1;         // families produced by the base cover
};

// Classify the light subgraph. Refuses shapes the certificate builder cannot
// handle: free vertex groups at light vertices, free-abelian groups of rank
// >= 2 outside the core, and edges between two non-core light vertices.
LightStructure analyze_light_structure(const ProductGraph& graph, std::int64_t R);

// Cover of the light subgroup's ball by `color_count` families, each
// R-disjoint with uniformly bounded sets, jointly covering the ball.
std::vector<SetFamily<GPWord>> build_base_cover(const ProductGraph& graph, std::int64_t R,
                                                std::int64_t ball_radius);

struct AsdimWitness {
  std::int64_t scale = 0;
  std::int64_t ball_radius = 0;
  LightStructure structure;
  std::vector<GPWord> permissible;          // permissible elements found in the ball
  std::vector<SetFamily<GPWord>> base;      // base cover of the light ball
  std::vector<SetFamily<GPWord>> families;  // cover of the full ball
};

// Cover the radius-`ball_radius` ball by structure.color_count families, each
// `R`-disjoint: every element splits as (permissible) * (light) and inherits
// its light part's base-cover placement inside the permissible translate.
AsdimWitness build_asdim_witness(const ProductGraph& graph, std::int64_t R,
                                 std::int64_t ball_radius);

// --- exact verification over an enumerated ball ------------------------------

struct CrossViolation {
  std::string family;
  std::size_t set_a = 0;
  std::size_t set_b = 0;
  std::string word_a;
  std::string word_b;
  std::int64_t distance = 0;
};

struct ScaledFamily {
  const SetFamily<GPWord>* family = nullptr;
  std::int64_t r = 0;  // required separation: distinct sets must be > r apart
};

// Exhaustive cross-set distance check for every family at its own scale: for
// each ball element p and each z with ||z|| <= r, p and p*z must not sit in
// distinct sets of the same family. Exact for families contained in the ball.
std::optional<CrossViolation> find_cover_violation(const ProductGraph& graph,
                                                   const std::vector<ScaledFamily>& families,
                                                   std::int64_t ball_radius);

// True when the union of all families equals the enumerated ball exactly.
bool covers_ball(const ProductGraph& graph, const std::vector<SetFamily<GPWord>>& families,
                 std::int64_t ball_radius);

}  // namespace gpcert
