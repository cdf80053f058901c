#include "gpcert/apc.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gpcert/asdim.hpp"
#include "gpcert/errors.hpp"
#include "gpcert/metric.hpp"

namespace gpcert {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

void require_two_free_factors(const ProductGraph& graph, const char* what) {
  if (graph.vertices.size() != 2 || graph.adjacent(0, 1)) {
    throw RefusalError(std::string(what) + " needs exactly two factors with no commuting edge");
  }
}

// Non-identity elements of one factor with weighted norm <= cap, sorted.
std::vector<GroupElement> factor_syllables(const VertexInfo& vert, std::int64_t cap) {
  std::vector<GroupElement> out;
  for (auto& e : vg_ball(vert.group, cap, vert.weight)) {
    if (!vg_is_identity(vert.group, e)) out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

// --- tree of bounded-syllable elements ---------------------------------------

SyllableTree build_syllable_tree(const ProductGraph& graph, std::int64_t syllable_cap,
                                 std::int64_t depth_bound, std::int64_t pair_cap) {
  require_two_free_factors(graph, "the bounded-syllable tree");
  if (syllable_cap < 0) throw ConfigError("syllable cap must be non-negative");
  if (depth_bound < 1) throw ConfigError("depth bound must be at least 1");

  SyllableTree tree;
  tree.graph = &graph;
  tree.syllable_cap = syllable_cap;
  tree.depth_bound = depth_bound;
  tree.vertices.push_back(GPWord{});
  tree.parent.push_back(-1);
  tree.depth.push_back(0);

  const std::array<std::vector<GroupElement>, 2> syls = {
      factor_syllables(graph.vertices[0], syllable_cap),
      factor_syllables(graph.vertices[1], syllable_cap)};

  // Breadth-first: children of word w append one syllable from the factor
  // other than w's final one (either factor at the root).
  for (std::size_t head = 0; head < tree.vertices.size(); ++head) {
    if (tree.depth[head] >= depth_bound) continue;
    const GPWord w = tree.vertices[head];  // copy: vector may reallocate below
    for (int v = 0; v < 2; ++v) {
      if (!w.empty() && w.back().vertex == v) continue;
      for (const auto& e : syls[static_cast<std::size_t>(v)]) {
        GPWord child = w;
        child.push_back(Syllable{v, e});
        tree.vertices.push_back(std::move(child));
        tree.parent.push_back(static_cast<std::int64_t>(head));
        tree.depth.push_back(tree.depth[head] + 1);
        if (static_cast<std::int64_t>(tree.vertices.size()) > graph.node_cap) {
          throw BudgetError("bounded-syllable tree exceeds the node budget");
        }
      }
    }
  }

  // Compare the edge metric with the group metric on every enumerated pair:
  // d <= cap * d_e and d_e <= 2 d.
  const std::int64_t n = static_cast<std::int64_t>(tree.vertices.size());
  if (n * (n - 1) / 2 > pair_cap) {
    throw BudgetError("pairwise metric comparison exceeds the pair budget");
  }
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      const std::int64_t de = tree_edge_distance(tree, i, j);
      const std::int64_t d = syllable_distance(graph, tree.vertices[static_cast<std::size_t>(i)],
                                               tree.vertices[static_cast<std::size_t>(j)]);
      if (d > syllable_cap * de || de > 2 * d) {
        throw VerificationError(
            "metric comparison fails between " +
            print_word(graph, tree.vertices[static_cast<std::size_t>(i)]) + " and " +
            print_word(graph, tree.vertices[static_cast<std::size_t>(j)]) +
            ": group distance " + std::to_string(d) + ", edge distance " + std::to_string(de));
      }
    }
  }
  tree.metrics_verified = true;
  return tree;
}

std::int64_t tree_edge_distance(const SyllableTree& tree, std::int64_t i, std::int64_t j) {
  const std::int64_t n = static_cast<std::int64_t>(tree.vertices.size());
  if (i < 0 || i >= n || j < 0 || j >= n) throw ConfigError("tree vertex index out of range");
  std::int64_t d = 0;
  while (i != j) {
    if (tree.depth[static_cast<std::size_t>(i)] < tree.depth[static_cast<std::size_t>(j)]) {
      std::swap(i, j);
    }
    i = tree.parent[static_cast<std::size_t>(i)];
    ++d;
  }
  return d;
}

std::vector<SetFamily<std::int64_t>> tree_cover(const SyllableTree& tree, std::int64_t R) {
  if (R < 1) throw ConfigError("cover scale must be at least 1");
  const std::int64_t L = 2 * R;
  const std::int64_t n = static_cast<std::int64_t>(tree.vertices.size());

  // Bucket each vertex by (annulus, ancestor R levels below the annulus
  // floor); the root anchors every annulus-0 vertex.
  std::array<std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::int64_t>>, 2>
      buckets;
  for (std::int64_t v = 0; v < n; ++v) {
    const std::int64_t m = tree.depth[static_cast<std::size_t>(v)] / L;
    const std::int64_t anchor_depth = m * L - R;
    std::int64_t anchor = v;
    if (anchor_depth <= 0) {
      anchor = 0;
    } else {
      while (tree.depth[static_cast<std::size_t>(anchor)] > anchor_depth) {
        anchor = tree.parent[static_cast<std::size_t>(anchor)];
      }
    }
    buckets[static_cast<std::size_t>(m % 2)][{m, anchor}].push_back(v);
  }

  std::vector<SetFamily<std::int64_t>> families(2);
  families[0].label = "annuli-even";
  families[1].label = "annuli-odd";
  for (int parity = 0; parity < 2; ++parity) {
    for (auto& [key, set] : buckets[static_cast<std::size_t>(parity)]) {
      families[static_cast<std::size_t>(parity)].sets.push_back(std::move(set));
    }
    std::sort(families[static_cast<std::size_t>(parity)].sets.begin(),
              families[static_cast<std::size_t>(parity)].sets.end());
  }

  // Verify the three claims on the enumerated tree.
  const DistanceFn<std::int64_t> dist = [&tree](const std::int64_t& a, const std::int64_t& b) {
    return tree_edge_distance(tree, a, b);
  };
  std::int64_t covered = 0;
  for (std::size_t parity = 0; parity < 2; ++parity) {
    const auto& fam = families[parity];
    if (auto bad = find_disjointness_violation(fam, R, dist)) {
      throw VerificationError("tree cover family " + fam.label + " sets " +
                              std::to_string(bad->set_a) + " and " + std::to_string(bad->set_b) +
                              " are only " + std::to_string(bad->distance) + " apart");
    }
    for (const auto& set : fam.sets) {
      covered += static_cast<std::int64_t>(set.size());
      if (set_diameter(set, dist, n) > 6 * R) {
        throw VerificationError("tree cover family " + fam.label +
                                " has a set wider than six times the scale");
      }
    }
  }
  if (covered != n) throw VerificationError("tree cover does not partition the tree");
  return families;
}

// --- cover certificate for a free product of two factors --------------------

namespace {

// How one factor's elements are split at its scale slice. A rank-1
// free-abelian factor alternates blocks of len_units exponents (family 0)
// with gaps of gap_units exponents (family 1); finite factors put the whole
// group into one family.
struct FactorPlan {
  int scale_count = 1;
  std::int64_t len_units = 0;
  std::int64_t gap_units = 0;
};

FactorPlan plan_factor(const VertexInfo& vert, const std::int64_t* slice) {
  FactorPlan plan;
  switch (vert.group.kind) {
    case GroupKind::Free:
      throw RefusalError("free factors are not supported");
    case GroupKind::FreeAbelian:
      if (vert.group.rank != 1) {
        throw RefusalError("free-abelian factors of rank >= 2 are not supported");
      }
      plan.scale_count = 2;
      if (slice != nullptr) {
        plan.gap_units = floor_div(slice[0], vert.weight) + 1;
        plan.len_units = floor_div(slice[1], vert.weight) + 1;
      }
      break;
    case GroupKind::Cyclic:
    case GroupKind::FiniteTable:
      plan.scale_count = 1;
      break;
  }
  return plan;
}

// (local family index, block id) of one exponent under the block/gap split.
std::pair<int, std::int64_t> locate_exponent(const FactorPlan& plan, std::int64_t exp) {
  const std::int64_t period = plan.len_units + plan.gap_units;
  const std::int64_t q = floor_div(exp, period);
  const std::int64_t off = exp - q * period;
  if (off < plan.len_units) return {0, q};
  return {1, q};
}

}  // namespace

ApcFreeWitness build_apc_free_witness(const ProductGraph& graph,
                                      const std::vector<std::int64_t>& scales,
                                      std::int64_t ball_radius) {
  require_two_free_factors(graph, "the free-product certificate");
  if (ball_radius < 0) throw ConfigError("ball radius must be non-negative");

  // Scale layout: factor 0 consumes the first slice, factor 1 the rest.
  const int n = plan_factor(graph.vertices[0], nullptr).scale_count;
  const int k = plan_factor(graph.vertices[1], nullptr).scale_count;
  if (static_cast<int>(scales.size()) != n + k) {
    throw ConfigError("these factors need exactly " + std::to_string(n + k) + " scales, got " +
                      std::to_string(scales.size()));
  }
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 0) throw ConfigError("scales must be non-negative");
    if (i > 0 && scales[i] < scales[i - 1]) throw ConfigError("scales must be non-decreasing");
  }

  const std::int64_t r = scales.back();
  const std::array<FactorPlan, 2> plans = {plan_factor(graph.vertices[0], scales.data()),
                                           plan_factor(graph.vertices[1], scales.data() + n)};

  // Tail windows: length L on the total norm, ancestors rewound below the
  // window floor by the scale plus the largest single-step norm jump.
  const std::int64_t L = 2 * (r + 1);
  std::int64_t delta = 0;
  for (const auto& vert : graph.vertices) {
    const bool finite =
        vert.group.kind == GroupKind::Cyclic || vert.group.kind == GroupKind::FiniteTable;
    delta = std::max(delta, finite ? vert.weight * vg_diameter(vert.group) : vert.weight);
  }

  const auto ball = gp_ball(graph, GPWord{}, ball_radius);

  const int family_count = n + k + 2;
  std::vector<std::map<std::string, std::vector<GPWord>>> buckets(
      static_cast<std::size_t>(family_count));
  for (const auto& p : ball) {
    if (!p.empty()) {
      const Syllable& last = p.back();
      const auto& vert = graph.vertices[static_cast<std::size_t>(last.vertex)];
      const std::int64_t ns = vert.weight * vg_norm(vert.group, last.elem);
      if (ns > r) {
        // Final syllable heavier than the threshold: bucket by the prefix and
        // by the factor's own split of that syllable.
        const GPWord prefix(p.begin(), p.end() - 1);
        int local = 0;
        std::int64_t block = 0;
        if (vert.group.kind == GroupKind::FreeAbelian) {
          std::tie(local, block) =
              locate_exponent(plans[static_cast<std::size_t>(last.vertex)], last.elem.v[0]);
        }
        const int fam = (last.vertex == 0 ? 0 : n) + local;
        buckets[static_cast<std::size_t>(fam)]
               [print_word(graph, prefix) + "|" + std::to_string(block)]
                   .push_back(p);
        continue;
      }
    }
    // Tail: short (or no) final syllable. Window the total norm and key by
    // the ancestor rewound to the pre-window level.
    const std::int64_t tau = syllable_norm(graph, p);
    const std::int64_t m = tau / L;
    const std::int64_t lo = m * L;
    const std::int64_t t = std::max<std::int64_t>(0, lo - (r + 1 + delta));
    GPWord anc = p;
    while (syllable_norm(graph, anc) > t) word_parent_step(graph, anc);
    const int fam = n + k + static_cast<int>(m % 2);
    buckets[static_cast<std::size_t>(fam)]
           [std::to_string(m) + "|" + print_word(graph, anc)]
               .push_back(p);
  }

  ApcFreeWitness wit;
  wit.ball_radius = ball_radius;
  wit.tail_threshold = r;
  wit.a_family_count = n;
  wit.b_family_count = k;
  wit.scales = scales;
  wit.scales.push_back(r);
  wit.scales.push_back(r);

  for (int f = 0; f < family_count; ++f) {
    SetFamily<GPWord> fam;
    if (f < n + k) {
      const int v = f < n ? 0 : 1;
      fam.label = "final-" + graph.vertices[static_cast<std::size_t>(v)].id + "-" +
                  std::to_string(f - (v == 0 ? 0 : n) + 1);
    } else {
      fam.label = (f == n + k) ? "tails-even" : "tails-odd";
    }
    std::vector<std::pair<std::string, std::vector<GPWord>>> sets;
    for (auto& [key, words] : buckets[static_cast<std::size_t>(f)]) {
      std::vector<std::pair<std::string, GPWord>> tagged;
      tagged.reserve(words.size());
      for (auto& w : words) tagged.emplace_back(print_word(graph, w), std::move(w));
      std::sort(tagged.begin(), tagged.end());
      std::vector<GPWord> set;
      set.reserve(tagged.size());
      for (auto& [_, w] : tagged) set.push_back(std::move(w));
      sets.emplace_back(tagged.front().first, std::move(set));
    }
    std::sort(sets.begin(), sets.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, set] : sets) fam.sets.push_back(std::move(set));
    wit.families.push_back(std::move(fam));
  }

  std::vector<ScaledFamily> scaled;
  for (int f = 0; f < family_count; ++f) {
    scaled.push_back(ScaledFamily{&wit.families[static_cast<std::size_t>(f)],
                                  wit.scales[static_cast<std::size_t>(f)]});
  }
  if (auto bad = find_cover_violation(graph, scaled, ball_radius)) {
    throw VerificationError("family " + bad->family + " sets " + std::to_string(bad->set_a) +
                            " and " + std::to_string(bad->set_b) + " hold " + bad->word_a +
                            " and " + bad->word_b + " at distance " +
                            std::to_string(bad->distance));
  }
  if (!covers_ball(graph, wit.families, ball_radius)) {
    throw VerificationError("assembled families do not cover the ball");
  }
  return wit;
}

// --- assembling a cover of a union of pieces ---------------------------------

namespace {

std::string format_zpoint(const ZPoint& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(p[i]);
  }
  return out + ")";
}

void require_dim(const std::vector<ZPoint>& pts, int dim, const std::string& where) {
  for (const auto& p : pts) {
    if (static_cast<int>(p.size()) != dim) {
      throw ConfigError(where + " has a point of the wrong dimension");
    }
  }
}

std::int64_t family_set_distance(const std::vector<ZPoint>& a, const std::vector<ZPoint>& b) {
  std::int64_t best = -1;
  for (const auto& x : a) {
    for (const auto& y : b) {
      const std::int64_t d = l1_distance(x, y);
      if (best < 0 || d < best) best = d;
    }
  }
  return best;
}

}  // namespace

UnionCoverResult assemble_union_cover(const UnionCoverInput& in) {
  const std::size_t m = in.scales.size();
  if (in.dim < 1) throw ConfigError("dimension must be at least 1");
  if (m == 0) throw ConfigError("at least one scale is required");
  if (in.gaps.size() != m || in.bounds.size() != m) {
    throw ConfigError("gaps and bounds must match the scale count");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (in.scales[i] < 0) throw ConfigError("scales must be non-negative");
    if (i > 0 && in.scales[i] < in.scales[i - 1]) {
      throw ConfigError("scales must be non-decreasing");
    }
    if (in.gaps[i] < 0 || in.gaps[i] > in.scales[i]) {
      throw ConfigError("each gap must lie between 0 and its scale");
    }
    if (in.bounds[i] < in.gaps[i]) throw ConfigError("each bound must be at least its gap");
  }
  if (in.pieces.empty()) throw ConfigError("at least one piece is required");
  if (in.piece_families.size() != m) {
    throw ConfigError("piece families must provide one row per scale");
  }
  for (const auto& row : in.piece_families) {
    if (row.size() != in.pieces.size()) {
      throw ConfigError("each scale row must provide one family per piece");
    }
  }
  if (in.shared_cover.size() > m) {
    throw ConfigError("shared cover has more families than scales");
  }
  for (const auto& piece : in.pieces) require_dim(piece.elements, in.dim, "piece " + piece.label);
  require_dim(in.shared_region, in.dim, "shared region");
  for (const auto& fam : in.shared_cover) {
    for (const auto& set : fam.sets) require_dim(set, in.dim, "shared cover " + fam.label);
  }
  for (const auto& row : in.piece_families) {
    for (const auto& fam : row) {
      for (const auto& set : fam.sets) require_dim(set, in.dim, "piece family " + fam.label);
    }
  }

  const auto dist = z_metric();

  // Per-piece hypotheses: declared separation, declared bound, coverage.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < in.pieces.size(); ++a) {
      const auto& fam = in.piece_families[i][a];
      if (auto bad = find_disjointness_violation(fam, in.scales[i], dist)) {
        throw VerificationError("piece family " + fam.label + " (scale index " +
                                std::to_string(i + 1) + ") sets " + std::to_string(bad->set_a) +
                                " and " + std::to_string(bad->set_b) + " are only " +
                                std::to_string(bad->distance) + " apart");
      }
      for (const auto& set : fam.sets) {
        if (set_diameter(set, dist, 100'000) > in.bounds[i]) {
          throw VerificationError("piece family " + fam.label +
                                  " exceeds its declared bound at scale index " +
                                  std::to_string(i + 1));
        }
      }
    }
  }
  for (std::size_t a = 0; a < in.pieces.size(); ++a) {
    std::set<ZPoint> covered;
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& set : in.piece_families[i][a].sets) covered.insert(set.begin(), set.end());
    }
    for (const auto& p : in.pieces[a].elements) {
      if (covered.find(p) == covered.end()) {
        throw VerificationError("piece " + in.pieces[a].label +
                                " is not covered by its own families at " + format_zpoint(p));
      }
    }
  }

  // Trim the pieces by the shared region; trimmed pieces must be far apart.
  const std::set<ZPoint> region(in.shared_region.begin(), in.shared_region.end());
  std::vector<std::vector<ZPoint>> trimmed(in.pieces.size());
  for (std::size_t a = 0; a < in.pieces.size(); ++a) {
    for (const auto& p : in.pieces[a].elements) {
      if (region.find(p) == region.end()) trimmed[a].push_back(p);
    }
  }
  const std::int64_t piece_gap = 5 * in.scales.back();
  for (std::size_t a = 0; a < trimmed.size(); ++a) {
    for (std::size_t b = a + 1; b < trimmed.size(); ++b) {
      if (trimmed[a].empty() || trimmed[b].empty()) continue;
      const std::int64_t d = family_set_distance(trimmed[a], trimmed[b]);
      if (d <= piece_gap) {
        throw VerificationError("trimmed pieces " + in.pieces[a].label + " and " +
                                in.pieces[b].label + " are only " + std::to_string(d) +
                                " apart (need > " + std::to_string(piece_gap) + ")");
      }
    }
  }

  // Shared-cover hypotheses: per-index separation and coverage of the region.
  for (std::size_t i = 0; i < in.shared_cover.size(); ++i) {
    const auto& fam = in.shared_cover[i];
    const std::int64_t need = 5 * in.scales[i];
    if (auto bad = find_disjointness_violation(fam, need, dist)) {
      throw VerificationError("shared family " + fam.label + " sets " +
                              std::to_string(bad->set_a) + " and " + std::to_string(bad->set_b) +
                              " are only " + std::to_string(bad->distance) + " apart (need > " +
                              std::to_string(need) + ")");
    }
  }
  {
    std::set<ZPoint> covered;
    for (const auto& fam : in.shared_cover) {
      for (const auto& set : fam.sets) covered.insert(set.begin(), set.end());
    }
    for (const auto& p : in.shared_region) {
      if (covered.find(p) == covered.end()) {
        throw VerificationError("shared region element " + format_zpoint(p) +
                                " is not covered by the shared cover");
      }
    }
  }

  // Assemble: saturate each shared family over the pooled trimmed sets.
  UnionCoverResult out;
  out.gaps = in.gaps;
  out.hypothesis_note =
      "shared family separation checked per index: family i must be 5*scales[i]-separated";
  for (std::size_t i = 0; i < m; ++i) {
    SetFamily<ZPoint> pooled;
    pooled.label = "trimmed-" + std::to_string(i + 1);
    for (std::size_t a = 0; a < in.pieces.size(); ++a) {
      for (const auto& set : in.piece_families[i][a].sets) {
        std::vector<ZPoint> cut;
        for (const auto& p : set) {
          if (region.find(p) == region.end()) cut.push_back(p);
        }
        if (!cut.empty()) pooled.sets.push_back(std::move(cut));
      }
    }
    SetFamily<ZPoint> shared;
    shared.label = "shared-" + std::to_string(i + 1);
    if (i < in.shared_cover.size()) shared.sets = in.shared_cover[i].sets;
    SetFamily<ZPoint> merged = saturated_union(shared, pooled, in.gaps[i], dist);
    merged.label = "assembled-" + std::to_string(i + 1);

    if (auto bad = find_disjointness_violation(merged, in.gaps[i], dist)) {
      throw VerificationError("assembled family " + merged.label + " sets " +
                              std::to_string(bad->set_a) + " and " + std::to_string(bad->set_b) +
                              " are only " + std::to_string(bad->distance) + " apart");
    }
    std::int64_t worst = 0;
    for (const auto& set : merged.sets) {
      worst = std::max(worst, set_diameter(set, dist, 200'000));
    }
    out.meshes.push_back(worst);
    out.families.push_back(std::move(merged));
  }

  // The assembled families must jointly cover every piece element.
  std::set<ZPoint> covered;
  for (const auto& fam : out.families) {
    for (const auto& set : fam.sets) covered.insert(set.begin(), set.end());
  }
  for (const auto& piece : in.pieces) {
    for (const auto& p : piece.elements) {
      if (covered.find(p) == covered.end()) {
        throw VerificationError("assembled cover misses " + format_zpoint(p) + " of piece " +
                                piece.label);
      }
    }
  }
  out.covers_union = true;
  return out;
}

}  // namespace gpcert
