#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpcert/covers.hpp"
#include "gpcert/graphprod.hpp"

namespace gpcert {

// --- tree of bounded-syllable elements in a two-factor free product ---------

// Rooted tree on the elements all of whose syllables have weighted norm at
// most syllable_cap, enumerated up to depth_bound syllables. Edges append one
// syllable, so the edge metric counts syllable edits. Building verifies the
// comparison with the group metric on every enumerated pair:
//   d(g, h) <= syllable_cap * edge_distance(g, h)   and
//   edge_distance(g, h) <= 2 * d(g, h).
struct SyllableTree {
  const ProductGraph* graph = nullptr;
  std::int64_t syllable_cap = 0;
  std::int64_t depth_bound = 0;
  std::vector<GPWord> vertices;       // breadth-first; [0] is the identity
  std::vector<std::int64_t> parent;   // parent index; -1 at the root
  std::vector<std::int64_t> depth;    // syllable count
  bool metrics_verified = false;
};

SyllableTree build_syllable_tree(const ProductGraph& graph, std::int64_t syllable_cap,
                                 std::int64_t depth_bound, std::int64_t pair_cap = 50'000'000);

// Unit-edge tree distance between two vertex indices.
std::int64_t tree_edge_distance(const SyllableTree& tree, std::int64_t i, std::int64_t j);

// Two families of vertex-index sets covering the tree: annuli of depth 2R,
// split by the ancestor R levels below the annulus floor, colored by annulus
// parity. Each call verifies: both families R-disjoint in the edge metric,
// mesh <= 6R, and joint coverage. The second family may carry no sets.
std::vector<SetFamily<std::int64_t>> tree_cover(const SyllableTree& tree, std::int64_t R);

// --- cover certificate for a free product of two factors --------------------

// Families for the ball of A * B at a non-decreasing scale sequence. The
// factor kinds fix how many scales each side consumes: a rank-1 free-abelian
// factor takes two, a finite factor takes one. With n + k input scales the
// result has n + k + 2 families:
//   - families 1..n+k hold the elements whose final syllable is heavier than
//     the threshold r = (last input scale), bucketed by the prefix before
//     that syllable and by the factor's own interval cover;
//   - two tail families hold everything else, windowed by total norm with
//     window length 2(r+1) and keyed by a rewound ancestor.
// The last two scales repeat the final input scale. Every family is verified
// at its own scale on the enumerated ball, and the union is verified to
// cover the ball exactly.
struct ApcFreeWitness {
  std::vector<std::int64_t> scales;  // effective sequence, n + k + 2 entries
  std::int64_t ball_radius = 0;
  std::int64_t tail_threshold = 0;   // r: final-syllable norms above this are "long"
  int a_family_count = 0;            // n
  int b_family_count = 0;            // k
  std::vector<SetFamily<GPWord>> families;
};

ApcFreeWitness build_apc_free_witness(const ProductGraph& graph,
                                      const std::vector<std::int64_t>& scales,
                                      std::int64_t ball_radius);

// --- assembling a cover of a union of pieces from per-piece covers ----------

struct UnionPiece {
  std::string label;
  std::vector<ZPoint> elements;
};

// Input model: pieces X_0..X_{p-1} in Z^dim, each carrying one family per
// scale index i with a shared separation scales[i] and a shared size bound
// bounds[i]; plus a shared region with its own cover family per scale. The
// assembly trims each piece family to the piece minus the shared region and
// saturates the shared family over the trimmed sets at distance gaps[i].
struct UnionCoverInput {
  int dim = 1;
  std::vector<std::int64_t> scales;  // non-decreasing separation per index
  std::vector<std::int64_t> gaps;    // saturation distance per index, <= scales[i]
  std::vector<std::int64_t> bounds;  // declared mesh bound per index, >= gaps[i]
  std::vector<UnionPiece> pieces;
  std::vector<std::vector<SetFamily<ZPoint>>> piece_families;  // [scale][piece]
  std::vector<ZPoint> shared_region;
  std::vector<SetFamily<ZPoint>> shared_cover;  // per scale; may be shorter
};

struct UnionCoverResult {
  std::vector<std::int64_t> gaps;               // verified separation per family
  std::vector<SetFamily<ZPoint>> families;      // one per scale index
  std::vector<std::int64_t> meshes;             // exact mesh per family
  std::string hypothesis_note;                  // which separation convention was checked
  bool covers_union = false;
};

// Checks every hypothesis before assembling and re-checks the output:
//   - each piece family scales[i]-disjoint, mesh <= bounds[i], covering its piece
//   - trimmed pieces pairwise further than 5 * scales.back() apart
//   - shared family i must be 5 * scales[i]-disjoint (the stricter per-index
//     reading; recorded in hypothesis_note) and jointly cover the region
//   - output family i gaps[i]-disjoint and the union covers all pieces.
// Violations raise VerificationError naming the offending sets.
UnionCoverResult assemble_union_cover(const UnionCoverInput& in);

}  // namespace gpcert
