#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gpcert/graphprod.hpp"

namespace gpcert {

// Weighted norm as the sum over syllables of the normal form of
// (vertex weight) x (generator word length inside the vertex group). Agrees
// with gp_norm everywhere (tested against the search) and is the fast path
// used by the cover verifiers.
std::int64_t syllable_norm(const ProductGraph& graph, const GPWord& word);
std::int64_t syllable_distance(const ProductGraph& graph, const GPWord& g, const GPWord& h);

// One generator step toward the identity: shorten the last syllable by one
// generator, dropping the syllable entirely when it reaches the identity.
// Precondition: w is reduced and non-empty.
void word_parent_step(const ProductGraph& graph, GPWord& w);

// Exact weighted word norm via uniform-cost search from the identity over the
// union of vertex generating sets. node_cap 0 uses graph.node_cap; exceeding
// the cap raises BudgetError rather than returning a wrong answer.
std::int64_t gp_norm(const ProductGraph& graph, const GPWord& word, std::int64_t node_cap = 0);

// d(g, h) = ||g^{-1} h||; left-invariant metric.
std::int64_t gp_distance(const ProductGraph& graph, const GPWord& g, const GPWord& h,
                         std::int64_t node_cap = 0);

// All elements at distance <= radius from center, as sorted normal forms.
std::vector<GPWord> gp_ball(const ProductGraph& graph, const GPWord& center, std::int64_t radius,
                            std::int64_t node_cap = 0);

// Ball of the subgroup generated by the listed vertices' groups (words
// supported on those vertices), around the identity.
std::vector<GPWord> gp_ball_subgroup(const ProductGraph& graph, const std::vector<int>& vertices,
                                     std::int64_t radius, std::int64_t node_cap = 0);

// Exact rational arithmetic for control functions; den > 0, normalized.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;
  friend bool operator==(const Frac&, const Frac&) = default;
};

Frac make_frac(std::int64_t num, std::int64_t den = 1);
Frac frac_add(Frac a, Frac b);
Frac frac_sub(Frac a, Frac b);
Frac frac_mul(Frac a, Frac b);
int frac_cmp(Frac a, Frac b);  // -1, 0, +1
Frac frac_parse(const std::string& text, std::size_t offset_base = 0);
std::string frac_print(Frac f);

// Non-decreasing piecewise-linear control: flat before the first point,
// interpolating between points, extended beyond the last with tail_slope.
struct PiecewiseLinear {
  std::vector<std::pair<Frac, Frac>> points;  // (x, y), x strictly increasing
  Frac tail_slope;
};

PiecewiseLinear make_piecewise_linear(std::vector<std::pair<Frac, Frac>> points, Frac tail_slope);
Frac pl_eval(const PiecewiseLinear& f, Frac x);

// Linear shorthand: "t", "2t", "t/3", "t/3+2", "2t-1", or a constant "5/2".
PiecewiseLinear pl_parse(const std::string& text);

struct ControlPair {
  PiecewiseLinear rho1;
  PiecewiseLinear rho2;
};

// One sampled pair of distances: dx in the source space, dy in the target.
struct CoarseSample {
  std::int64_t dx = 0;
  std::int64_t dy = 0;
};

struct CoarseReport {
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

// Checks rho1(dx) <= dy <= rho2(dx) for every sample, exactly.
CoarseReport verify_coarse_map(const std::vector<CoarseSample>& samples, const ControlPair& cp);

}  // namespace gpcert
