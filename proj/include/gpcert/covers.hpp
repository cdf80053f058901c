#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gpcert/errors.hpp"
#include "gpcert/graphprod.hpp"
#include "gpcert/metric.hpp"

namespace gpcert {

// A labelled list of finite subsets of some ambient space. Element types in
// use: GPWord (graph products), std::int64_t (tree vertex ids), ZPoint (Z^n).
template <typename P>
struct SetFamily {
  std::string label;
  std::vector<std::vector<P>> sets;
};

template <typename P>
using DistanceFn = std::function<std::int64_t(const P&, const P&)>;

struct DisjointnessViolation {
  std::size_t set_a = 0;
  std::size_t set_b = 0;
  std::int64_t distance = 0;
};

// Exact minimum pairwise-set distance check: a violation is a pair of
// distinct sets at distance <= r.
template <typename P>
std::optional<DisjointnessViolation> find_disjointness_violation(const SetFamily<P>& family,
                                                                 std::int64_t r,
                                                                 const DistanceFn<P>& dist) {
  for (std::size_t a = 0; a < family.sets.size(); ++a) {
    for (std::size_t b = a + 1; b < family.sets.size(); ++b) {
      for (const auto& p : family.sets[a]) {
        for (const auto& q : family.sets[b]) {
          const std::int64_t d = dist(p, q);
          if (d <= r) return DisjointnessViolation{a, b, d};
        }
      }
    }
  }
  return std::nullopt;
}

template <typename P>
bool is_r_disjoint(const SetFamily<P>& family, std::int64_t r, const DistanceFn<P>& dist) {
  return !find_disjointness_violation(family, r, dist).has_value();
}

// Exact diameter by pair scan; refuses sets larger than element_cap instead
// of silently running forever.
template <typename P>
std::int64_t set_diameter(const std::vector<P>& set, const DistanceFn<P>& dist,
                          std::int64_t element_cap = 4000) {
  if (static_cast<std::int64_t>(set.size()) > element_cap) {
    throw BudgetError("set too large for a pairwise diameter scan");
  }
  std::int64_t best = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      best = std::max(best, dist(set[i], set[j]));
    }
  }
  return best;
}

// Max over sets of the set diameter; 0 for an empty family.
template <typename P>
std::int64_t mesh(const SetFamily<P>& family, const DistanceFn<P>& dist,
                  std::int64_t element_cap = 4000) {
  std::int64_t best = 0;
  for (const auto& set : family.sets) {
    best = std::max(best, set_diameter(set, dist, element_cap));
  }
  return best;
}

// Keep only elements satisfying `keep`, dropping sets that become empty.
template <typename P, typename Pred>
SetFamily<P> restrict_family(const SetFamily<P>& family, Pred keep) {
  SetFamily<P> out;
  out.label = family.label;
  for (const auto& set : family.sets) {
    std::vector<P> kept;
    for (const auto& p : set) {
      if (keep(p)) kept.push_back(p);
    }
    if (!kept.empty()) out.sets.push_back(std::move(kept));
  }
  return out;
}

// The d-saturated union: each V-set absorbs every U-set within distance d of
// it; U-sets farther than d from every V-set survive on their own. Elements
// of merged sets are sorted and deduplicated.
template <typename P>
SetFamily<P> saturated_union(const SetFamily<P>& v_family, const SetFamily<P>& u_family,
                             std::int64_t d, const DistanceFn<P>& dist) {
  const auto set_distance = [&](const std::vector<P>& s1, const std::vector<P>& s2) {
    std::int64_t best = -1;
    for (const auto& p : s1) {
      for (const auto& q : s2) {
        const std::int64_t cur = dist(p, q);
        if (best < 0 || cur < best) best = cur;
      }
    }
    return best;  // -1 when either set is empty
  };
  SetFamily<P> out;
  out.label = v_family.label;
  std::vector<bool> absorbed(u_family.sets.size(), false);
  for (const auto& v_set : v_family.sets) {
    std::vector<P> merged = v_set;
    for (std::size_t u = 0; u < u_family.sets.size(); ++u) {
      const std::int64_t sd = set_distance(v_set, u_family.sets[u]);
      if (sd >= 0 && sd <= d) {
        absorbed[u] = true;
        merged.insert(merged.end(), u_family.sets[u].begin(), u_family.sets[u].end());
      }
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    out.sets.push_back(std::move(merged));
  }
  for (std::size_t u = 0; u < u_family.sets.size(); ++u) {
    if (!absorbed[u]) out.sets.push_back(u_family.sets[u]);
  }
  return out;
}

// --- Z^n ambient -----------------------------------------------------------

using ZPoint = std::vector<std::int64_t>;

std::int64_t l1_distance(const ZPoint& a, const ZPoint& b);
DistanceFn<ZPoint> z_metric();

// --- Graph-product ambient -------------------------------------------------

DistanceFn<GPWord> graph_metric(const ProductGraph& graph);

// Left-translate every element of every set by x; mesh and within-family
// disjointness scales are preserved by left-invariance.
SetFamily<GPWord> translate_family(const ProductGraph& graph, const GPWord& x,
                                   const SetFamily<GPWord>& family);

// True when the Cayley graph of the product is a tree: no commuting edges and
// every vertex group is infinite cyclic, free, or of order two.
bool cayley_is_tree(const ProductGraph& graph);

// Diameter of a set of group elements: pair scan for small sets, and the
// exact two-sweep method when the Cayley graph is a tree; refuses otherwise.
std::int64_t graph_set_diameter(const ProductGraph& graph, const std::vector<GPWord>& set,
                                std::int64_t pairwise_cap = 2000);
std::int64_t graph_family_mesh(const ProductGraph& graph, const SetFamily<GPWord>& family,
                               std::int64_t pairwise_cap = 2000);

// --- Property A ------------------------------------------------------------

struct WeightedPoint {
  ZPoint y;
  std::int64_t n = 1;
  friend bool operator==(const WeightedPoint&, const WeightedPoint&) = default;
  friend auto operator<=>(const WeightedPoint&, const WeightedPoint&) = default;
};

struct PropertyAFamily {
  std::vector<ZPoint> domain;
  std::vector<std::vector<WeightedPoint>> sets;  // A_x per domain point
  std::int64_t r = 0;
  Frac eps;
  std::int64_t range = 0;  // the R of condition (3)
};

struct PropertyAReport {
  bool base_points_present = true;    // (x,1) in A_x
  bool ratios_small = true;           // |sym diff| / |intersection| < eps on close pairs
  bool within_range = true;           // members lie within distance R of the center
  std::vector<std::string> failures;  // first witness per failed condition
  bool pass() const { return base_points_present && ratios_small && within_range; }
};

PropertyAReport verify_property_A(const PropertyAFamily& fam);

}  // namespace gpcert
