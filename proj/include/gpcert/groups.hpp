#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace gpcert {

enum class GroupKind { Cyclic, FreeAbelian, Free, FiniteTable };

// Uniform element representation across all vertex-group kinds:
//   Cyclic       — {residue} with 0 <= residue < modulus
//   FreeAbelian  — rank coordinates
//   Free         — reduced letter sequence over ±1..±rank (empty = identity)
//   FiniteTable  — {index into labels}
struct GroupElement {
  std::vector<std::int64_t> v;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

struct VertexGroupSpec {
  GroupKind kind = GroupKind::Cyclic;
  std::int64_t modulus = 0;     // Cyclic
  int rank = 0;                 // FreeAbelian / Free
  std::int64_t max_letters = 64;  // Free: cap on reduced length
  std::vector<std::string> labels;        // FiniteTable
  std::vector<std::vector<int>> table;    // FiniteTable: table[i][j] = i*j
  int identity_index = 0;                 // FiniteTable
  std::vector<int> inverse;               // FiniteTable
  std::vector<GroupElement> generators;   // the declared generating set
  std::vector<std::int64_t> norm_table;   // Cyclic/FiniteTable: word length per element
  std::vector<std::int64_t> parent_step;  // Cyclic/FiniteTable: one geodesic step toward identity
};

VertexGroupSpec make_cyclic(std::int64_t modulus,
                            const std::vector<std::int64_t>& generator_residues = {});
VertexGroupSpec make_free_abelian(int rank);
VertexGroupSpec make_free(int rank, std::int64_t max_letters = 64);
VertexGroupSpec make_finite_table(const std::vector<std::string>& labels,
                                  const std::vector<std::vector<std::string>>& table_labels,
                                  const std::vector<std::string>& generator_labels = {});

GroupElement vg_identity(const VertexGroupSpec& g);
bool vg_is_identity(const VertexGroupSpec& g, const GroupElement& a);
bool vg_is_valid(const VertexGroupSpec& g, const GroupElement& a);
GroupElement vg_multiply(const VertexGroupSpec& g, const GroupElement& a, const GroupElement& b);
GroupElement vg_invert(const VertexGroupSpec& g, const GroupElement& a);

// Unweighted word length with respect to the declared generating set.
std::int64_t vg_norm(const VertexGroupSpec& g, const GroupElement& a);
std::int64_t vg_norm_weighted(const VertexGroupSpec& g, const GroupElement& a,
                              std::int64_t weight);

// All elements of weighted norm <= radius, sorted by representation.
std::vector<GroupElement> vg_ball(const VertexGroupSpec& g, std::int64_t radius,
                                  std::int64_t weight, std::int64_t node_cap = 5'000'000);

// One generator step toward the identity along a fixed geodesic tree;
// decreases vg_norm by exactly 1. Precondition: a is not the identity.
GroupElement vg_parent_step(const VertexGroupSpec& g, const GroupElement& a);

// Largest vg_norm over the whole group. Finite kinds only; ConfigError for
// free-abelian and free groups.
std::int64_t vg_diameter(const VertexGroupSpec& g);

// Element literal without the vertex id (the part inside the word grammar's
// brackets, or the bare exponent for cyclic / rank-1 free-abelian).
std::string vg_print(const VertexGroupSpec& g, const GroupElement& a);
GroupElement vg_parse(const VertexGroupSpec& g, const std::string& text,
                      std::size_t offset_base = 0);

}  // namespace gpcert
