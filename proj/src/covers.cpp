#include "gpcert/covers.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace gpcert {

namespace {

std::string format_point(const ZPoint& p) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out << ",";
    out << p[i];
  }
  out << ")";
  return out.str();
}

}  // namespace

std::int64_t l1_distance(const ZPoint& a, const ZPoint& b) {
  if (a.size() != b.size()) throw ConfigError("points have different dimensions");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += std::llabs(a[i] - b[i]);
  }
  return total;
}

DistanceFn<ZPoint> z_metric() {
  return [](const ZPoint& a, const ZPoint& b) { return l1_distance(a, b); };
}

DistanceFn<GPWord> graph_metric(const ProductGraph& graph) {
  return [&graph](const GPWord& a, const GPWord& b) { return syllable_distance(graph, a, b); };
}

SetFamily<GPWord> translate_family(const ProductGraph& graph, const GPWord& x,
                                   const SetFamily<GPWord>& family) {
  SetFamily<GPWord> out;
  out.label = family.label;
  out.sets.reserve(family.sets.size());
  for (const auto& set : family.sets) {
    std::vector<GPWord> moved;
    moved.reserve(set.size());
    for (const auto& u : set) {
      moved.push_back(gp_multiply(graph, x, u));
    }
    out.sets.push_back(std::move(moved));
  }
  return out;
}

bool cayley_is_tree(const ProductGraph& graph) {
  for (const auto& row : graph.adj) {
    for (bool edge : row) {
      if (edge) return false;
    }
  }
  for (const auto& vert : graph.vertices) {
    const auto& g = vert.group;
    switch (g.kind) {
      case GroupKind::Cyclic:
        if (g.modulus != 2) return false;
        break;
      case GroupKind::FreeAbelian:
        if (g.rank != 1) return false;
        break;
      case GroupKind::Free:
        break;
      case GroupKind::FiniteTable:
        if (g.labels.size() != 2) return false;
        break;
    }
  }
  return true;
}

std::int64_t graph_set_diameter(const ProductGraph& graph, const std::vector<GPWord>& set,
                                std::int64_t pairwise_cap) {
  if (set.size() <= 1) return 0;
  if (static_cast<std::int64_t>(set.size()) <= pairwise_cap) {
    std::int64_t best = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        best = std::max(best, syllable_distance(graph, set[i], set[j]));
      }
    }
    return best;
  }
  if (!cayley_is_tree(graph)) {
    throw BudgetError("set too large for a pairwise diameter scan");
  }
  // Two-sweep diameter, exact in any tree metric: the point farthest from an
  // arbitrary start lies on a diametral pair of the set.
  const auto farthest_from = [&](const GPWord& p) {
    std::size_t best_idx = 0;
    std::int64_t best = -1;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const std::int64_t d = syllable_distance(graph, p, set[i]);
      if (d > best) {
        best = d;
        best_idx = i;
      }
    }
    return std::pair<std::size_t, std::int64_t>{best_idx, best};
  };
  const auto first = farthest_from(set.front());
  const auto second = farthest_from(set[first.first]);
  return second.second;
}

std::int64_t graph_family_mesh(const ProductGraph& graph, const SetFamily<GPWord>& family,
                               std::int64_t pairwise_cap) {
  std::int64_t best = 0;
  for (const auto& set : family.sets) {
    best = std::max(best, graph_set_diameter(graph, set, pairwise_cap));
  }
  return best;
}

PropertyAReport verify_property_A(const PropertyAFamily& fam) {
  PropertyAReport report;
  if (fam.domain.size() != fam.sets.size()) {
    throw ConfigError("one set is required per domain point");
  }
  if (frac_cmp(fam.eps, make_frac(0)) <= 0) throw ConfigError("eps must be positive");
  if (fam.r < 0 || fam.range < 0) throw ConfigError("scales must be non-negative");

  std::vector<std::vector<WeightedPoint>> sets = fam.sets;
  for (auto& set : sets) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }

  for (std::size_t i = 0; i < fam.domain.size(); ++i) {
    const WeightedPoint base{fam.domain[i], 1};
    if (!std::binary_search(sets[i].begin(), sets[i].end(), base)) {
      report.base_points_present = false;
      report.failures.push_back("set at " + format_point(fam.domain[i]) +
                                " does not contain its own base point with multiplicity 1");
      break;
    }
  }

  for (std::size_t i = 0; i < fam.domain.size() && report.ratios_small; ++i) {
    for (std::size_t j = i + 1; j < fam.domain.size(); ++j) {
      if (l1_distance(fam.domain[i], fam.domain[j]) > fam.r) continue;
      // Sorted-merge count of the intersection and symmetric difference.
      std::size_t a = 0;
      std::size_t b = 0;
      std::int64_t inter = 0;
      std::int64_t sym = 0;
      while (a < sets[i].size() && b < sets[j].size()) {
        if (sets[i][a] == sets[j][b]) {
          ++inter;
          ++a;
          ++b;
        } else if (sets[i][a] < sets[j][b]) {
          ++sym;
          ++a;
        } else {
          ++sym;
          ++b;
        }
      }
      sym += static_cast<std::int64_t>(sets[i].size() - a);
      sym += static_cast<std::int64_t>(sets[j].size() - b);
      const bool ok = inter > 0 && sym * fam.eps.den < inter * fam.eps.num;
      if (!ok) {
        report.ratios_small = false;
        std::ostringstream msg;
        msg << "pair " << format_point(fam.domain[i]) << ", " << format_point(fam.domain[j]);
        if (inter == 0) {
          msg << " has empty intersection";
        } else {
          msg << " has difference/overlap ratio " << sym << "/" << inter << " >= "
              << frac_print(fam.eps);
        }
        report.failures.push_back(msg.str());
        break;
      }
    }
  }

  for (std::size_t i = 0; i < fam.domain.size() && report.within_range; ++i) {
    for (const auto& member : sets[i]) {
      if (l1_distance(fam.domain[i], member.y) > fam.range) {
        report.within_range = false;
        report.failures.push_back("member " + format_point(member.y) + " of the set at " +
                                  format_point(fam.domain[i]) + " lies beyond the support radius");
        break;
      }
    }
  }

  return report;
}

}  // namespace gpcert
