#include "gpcert/decomp.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gpcert/errors.hpp"

namespace gpcert {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::int64_t pos_mod(std::int64_t a, std::int64_t m) { return a - floor_div(a, m) * m; }

bool interval_bounded(const Interval& i) { return !i.lo_unbounded && !i.hi_unbounded; }

// Aligned extremes of an axis set; nullopt when the axis holds no point.
struct AxisSpan {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

std::optional<AxisSpan> bounded_axis_span(const AxisSet& a) {
  if (!interval_bounded(a.range)) return std::nullopt;
  if (a.stride <= 1) {
    if (a.range.lo > a.range.hi) return AxisSpan{0, 0};
    return AxisSpan{a.range.lo, a.range.hi};
  }
  const std::int64_t r = pos_mod(a.resid, a.stride);
  const std::int64_t lo = r + ceil_div(a.range.lo - r, a.stride) * a.stride;
  const std::int64_t hi = r + floor_div(a.range.hi - r, a.stride) * a.stride;
  if (hi < lo) return AxisSpan{0, 0};
  return AxisSpan{lo, hi};
}

void require_ambient(const AmbientZ& ambient) {
  if (ambient.dim < 1) throw ConfigError("the ambient lattice needs at least one axis");
  if (!ambient.weights.empty() && static_cast<int>(ambient.weights.size()) != ambient.dim)
    throw ConfigError("ambient weights must list one weight per axis");
  for (std::int64_t w : ambient.weights)
    if (w < 1) throw ConfigError("ambient weights must be positive");
}

std::int64_t axis_weight(const AmbientZ& ambient, int axis) {
  return ambient.weights.empty() ? 1 : ambient.weights[static_cast<std::size_t>(axis)];
}

std::int64_t weighted_l1(const AmbientZ& ambient, const ZPoint& a, const ZPoint& b) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != ambient.dim)
    throw ConfigError("point dimension differs from the ambient lattice");
  std::int64_t total = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const std::int64_t d = a[j] >= b[j] ? a[j] - b[j] : b[j] - a[j];
    total += axis_weight(ambient, static_cast<int>(j)) * d;
  }
  return total;
}

std::string format_point(const ZPoint& p) {
  std::ostringstream out;
  out << "(";
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j) out << ",";
    out << p[j];
  }
  out << ")";
  return out.str();
}

std::string space_name(const Space& s) { return s.label.empty() ? std::string("space") : s.label; }

std::vector<ZPoint> sorted_points(const std::vector<ZPoint>& pts) {
  std::vector<ZPoint> out = pts;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- slab-group arithmetic ---------------------------------------------------
// Blocks of a group live on one axis in coordinate units:
// block m = [offset + m*period, offset + m*period + width - 1].

bool unit_in_group(const PieceGroup& g, std::int64_t x) {
  if (g.range == MRange::Single || g.period <= 0)
    return g.offset <= x && x <= g.offset + g.width - 1;
  std::int64_t m_hi = floor_div(x - g.offset, g.period);
  std::int64_t m_lo = ceil_div(x - g.offset - g.width + 1, g.period);
  if (g.range == MRange::Geq0) m_lo = std::max<std::int64_t>(m_lo, 0);
  if (g.range == MRange::Leq0) m_hi = std::min<std::int64_t>(m_hi, 0);
  return m_lo <= m_hi;
}

// Distance between block 0 of A and a copy of B's block 0 shifted by delta.
std::int64_t block_gap(const PieceGroup& a, const PieceGroup& b, std::int64_t delta) {
  std::int64_t gap = 0;
  gap = std::max(gap, delta - (a.width - 1));
  gap = std::max(gap, -delta - (b.width - 1));
  return gap;
}

bool m_allowed(MRange r, std::int64_t m) {
  switch (r) {
    case MRange::All: return true;
    case MRange::Geq0: return m >= 0;
    case MRange::Leq0: return m <= 0;
    case MRange::Single: return m == 0;
  }
  return false;
}

// Minimum unit distance between any two distinct blocks of the pair (or of
// the group itself when a == b); nullopt when the pair has no two blocks.
std::optional<std::int64_t> min_pair_units(const PieceGroup& a, const PieceGroup& b, bool same) {
  if (same) {
    if (a.range == MRange::Single) return std::nullopt;
    return std::max<std::int64_t>(0, a.period - a.width + 1);
  }
  const bool a_single = a.range == MRange::Single;
  const bool b_single = b.range == MRange::Single;
  if (a_single && b_single) return block_gap(a, b, b.offset - a.offset);
  if (a_single || b_single) {
    const PieceGroup& s = a_single ? a : b;
    const PieceGroup& f = a_single ? b : a;
    const std::int64_t m0 = floor_div(s.offset - f.offset, f.period);
    std::vector<std::int64_t> candidates = {m0, m0 + 1, 0};
    std::optional<std::int64_t> best;
    for (std::int64_t m : candidates) {
      if (!m_allowed(f.range, m)) continue;
      const std::int64_t d = block_gap(s, f, f.offset + m * f.period - s.offset);
      if (!best || d < *best) best = d;
    }
    return best;
  }
  // two infinite families; callers enforce a common period
  const std::int64_t sigma = a.period;
  const std::int64_t d0 = b.offset - a.offset;
  const std::int64_t k0 = floor_div(-d0, sigma);
  std::vector<std::int64_t> candidates = {k0, k0 + 1, 0};
  const bool k_nonpos = a.range == MRange::Geq0 && b.range == MRange::Leq0;
  const bool k_nonneg = a.range == MRange::Leq0 && b.range == MRange::Geq0;
  std::optional<std::int64_t> best;
  for (std::int64_t k : candidates) {
    if (k_nonpos && k > 0) continue;
    if (k_nonneg && k < 0) continue;
    const std::int64_t d = block_gap(a, b, d0 + k * sigma);
    if (!best || d < *best) best = d;
  }
  return best;
}

constexpr std::int64_t kProbeCap = 2'000'000;
constexpr std::int64_t kPairCap = 50'000'000;

// --- verification ------------------------------------------------------------

struct GroupRef {
  int color = 0;
  std::size_t index = 0;
  const PieceGroup* g = nullptr;
  bool passthrough = false;
};

std::string group_name(const GroupRef& ref) {
  std::ostringstream out;
  const std::string label = ref.g->space.label;
  out << "piece " << (label.empty() ? std::to_string(ref.index) : label) << " (color " << ref.color
      << ")";
  return out.str();
}

void check_extensional_source(const AmbientZ& ambient, const SourceDecomposition& sd,
                              std::int64_t r, DecompositionReport& rep, std::int64_t& pair_budget) {
  const std::string name = space_name(sd.source);
  const std::vector<ZPoint> source = sorted_points(sd.source.points);
  std::set<ZPoint> covered;
  for (int c = 0; c < 2; ++c) {
    for (const PieceGroup& g : sd.colors[static_cast<std::size_t>(c)]) {
      if (!g.space.extensional || g.slab_axis >= 0 || g.range != MRange::Single)
        throw RefusalError("extensional pieces must be explicit point sets");
      if (g.space.points.empty()) {
        rep.violations.push_back(name + ": a color-" + std::to_string(c) + " piece is empty");
        continue;
      }
      int listed = 0;
      for (const ZPoint& p : g.space.points) {
        if (!std::binary_search(source.begin(), source.end(), p)) {
          if (listed++ < 3)
            rep.violations.push_back(name + ": piece " + space_name(g.space) + " contains " +
                                     format_point(p) + " outside the source");
        } else {
          covered.insert(p);
        }
      }
    }
  }
  int missing = 0;
  for (const ZPoint& p : source) {
    if (!covered.count(p) && missing++ < 3)
      rep.violations.push_back(name + ": source point " + format_point(p) +
                               " is not covered by any piece");
  }
  for (int c = 0; c < 2; ++c) {
    const auto& groups = sd.colors[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        std::optional<std::int64_t> best;
        ZPoint wa, wb;
        for (const ZPoint& p : groups[i].space.points) {
          for (const ZPoint& q : groups[j].space.points) {
            if (--pair_budget < 0)
              throw BudgetError("extensional separation check exceeds the pair budget");
            const std::int64_t d = weighted_l1(ambient, p, q);
            if (!best || d < *best) {
              best = d;
              wa = p;
              wb = q;
            }
          }
        }
        if (best && *best <= r) {
          std::ostringstream out;
          out << name << ": color-" << c << " pieces " << space_name(groups[i].space) << " and "
              << space_name(groups[j].space) << " are only " << *best << " apart at scale " << r
              << " (" << format_point(wa) << " vs " << format_point(wb) << ")";
          rep.violations.push_back(out.str());
        }
      }
    }
  }
}

void check_symbolic_source(const AmbientZ& ambient, const SourceDecomposition& sd, std::int64_t r,
                           DecompositionReport& rep) {
  const std::string name = space_name(sd.source);
  const SymBox& src = sd.source.box;
  const int dim = ambient.dim;
  if (static_cast<int>(src.axes.size()) != dim) {
    rep.violations.push_back(name + ": box dimension differs from the ambient lattice");
    return;
  }
  for (const AxisSet& axis : src.axes)
    if (axis.stride != 1)
      throw RefusalError("symbolic sources with lattice strides are not supported");

  std::vector<GroupRef> groups;
  for (int c = 0; c < 2; ++c) {
    const auto& list = sd.colors[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const PieceGroup& g = list[i];
      if (g.space.extensional)
        throw RefusalError("a symbolic source cannot split into extensional pieces");
      if (static_cast<int>(g.space.box.axes.size()) != dim) {
        rep.violations.push_back(name + ": a piece has the wrong box dimension");
        continue;
      }
      GroupRef ref{c, i, &g, g.slab_axis < 0};
      if (ref.passthrough && !(g.space.box == src))
        throw RefusalError("free-form symbolic pieces are not supported");
      groups.push_back(ref);
    }
  }

  bool source_empty = false;
  for (const AxisSet& axis : src.axes) {
    const auto span = bounded_axis_span(axis);
    if (span && span->lo == 0 && span->hi == 0 && interval_bounded(axis.range) &&
        axis.range.lo > axis.range.hi)
      source_empty = true;
  }
  if (groups.empty()) {
    if (!source_empty) rep.violations.push_back(name + ": the source has no pieces");
    return;
  }

  // All slab groups of one source must agree on the axis they split.
  int slab_axis = -1;
  for (const GroupRef& ref : groups) {
    if (ref.passthrough) continue;
    if (ref.g->slab_axis < 0 || ref.g->slab_axis >= dim) {
      rep.violations.push_back(name + ": " + group_name(ref) + " names an axis outside the lattice");
      return;
    }
    if (slab_axis < 0) slab_axis = ref.g->slab_axis;
    if (ref.g->slab_axis != slab_axis)
      throw RefusalError("pieces of one source may only split a single shared axis");
  }

  // Structure and template conformity.
  bool structure_ok = true;
  for (const GroupRef& ref : groups) {
    if (ref.passthrough) continue;
    const PieceGroup& g = *ref.g;
    if (g.width < 1) {
      rep.violations.push_back(name + ": " + group_name(ref) + " has a non-positive block width");
      structure_ok = false;
    }
    if (g.range != MRange::Single && g.period < 1) {
      rep.violations.push_back(name + ": " + group_name(ref) + " has a non-positive period");
      structure_ok = false;
    }
    for (int j = 0; j < dim; ++j) {
      if (j == slab_axis) continue;
      if (!(g.space.box.axes[static_cast<std::size_t>(j)] ==
            src.axes[static_cast<std::size_t>(j)])) {
        rep.violations.push_back(name + ": " + group_name(ref) +
                                 " differs from the source on axis " + std::to_string(j));
        structure_ok = false;
      }
    }
    const AxisSet& rep_axis = g.space.box.axes[static_cast<std::size_t>(slab_axis)];
    const Interval want{false, false, g.offset, g.offset + g.width - 1};
    if (rep_axis.stride != 1 || !(rep_axis.range == want)) {
      rep.violations.push_back(name + ": " + group_name(ref) +
                               " representative block does not match its slab parameters");
      structure_ok = false;
    }
  }
  if (!structure_ok) return;

  bool has_passthrough = false;
  for (const GroupRef& ref : groups) has_passthrough = has_passthrough || ref.passthrough;

  std::vector<GroupRef> slabs;
  for (const GroupRef& ref : groups)
    if (!ref.passthrough) slabs.push_back(ref);

  std::int64_t sigma = 0;
  for (const GroupRef& ref : slabs) {
    if (ref.g->range == MRange::Single) continue;
    if (sigma == 0) sigma = ref.g->period;
    if (ref.g->period != sigma)
      throw RefusalError("slab groups with different periods are not supported");
  }

  if (!slabs.empty()) {
    const AxisSet& axis = src.axes[static_cast<std::size_t>(slab_axis)];
    const Interval& inter = axis.range;

    // Containment of every block in the source interval.
    for (const GroupRef& ref : slabs) {
      const PieceGroup& g = *ref.g;
      const bool up_unbounded = g.range == MRange::All || g.range == MRange::Geq0;
      const bool down_unbounded = g.range == MRange::All || g.range == MRange::Leq0;
      if (up_unbounded && !inter.hi_unbounded)
        rep.violations.push_back(name + ": " + group_name(ref) + " leaves the source above");
      if (down_unbounded && !inter.lo_unbounded)
        rep.violations.push_back(name + ": " + group_name(ref) + " leaves the source below");
      if (!down_unbounded && !inter.lo_unbounded && g.offset < inter.lo)
        rep.violations.push_back(name + ": " + group_name(ref) + " starts below the source");
      if (!up_unbounded && !inter.hi_unbounded && g.offset + g.width - 1 > inter.hi)
        rep.violations.push_back(name + ": " + group_name(ref) + " ends above the source");
    }

    // Coverage of the source interval (periodic beyond the probed window).
    if (!has_passthrough) {
      std::int64_t anchor_lo = 0, anchor_hi = 0;
      bool have_anchor = false;
      bool have_family = false;
      for (const GroupRef& ref : slabs) {
        const std::int64_t a0 = ref.g->offset;
        const std::int64_t a1 = ref.g->offset + ref.g->width - 1;
        if (!have_anchor) {
          anchor_lo = a0;
          anchor_hi = a1;
          have_anchor = true;
        } else {
          anchor_lo = std::min(anchor_lo, a0);
          anchor_hi = std::max(anchor_hi, a1);
        }
        have_family = have_family || ref.g->range != MRange::Single;
      }
      bool probe_ok = true;
      std::int64_t probe_lo = 0, probe_hi = 0;
      if (interval_bounded(inter)) {
        probe_lo = inter.lo;
        probe_hi = inter.hi;
      } else if (!have_family) {
        rep.violations.push_back(name +
                                 ": an unbounded axis cannot be covered by finitely many blocks");
        probe_ok = false;
      } else {
        probe_lo = inter.lo_unbounded ? anchor_lo - 2 * sigma : inter.lo;
        probe_hi = inter.hi_unbounded ? anchor_hi + 2 * sigma : inter.hi;
      }
      if (probe_ok) {
        if (static_cast<__int128>(probe_hi) - probe_lo + 1 > kProbeCap)
          throw BudgetError("symbolic union check exceeds the probe budget");
        int missing = 0;
        for (std::int64_t x = probe_lo; x <= probe_hi; ++x) {
          bool covered = false;
          for (const GroupRef& ref : slabs) covered = covered || unit_in_group(*ref.g, x);
          if (!covered && missing++ < 3)
            rep.violations.push_back(name + ": axis " + std::to_string(slab_axis) + " value " +
                                     std::to_string(x) + " is not covered by any piece");
        }
      }
    }

    // Separation within each color.
    const std::int64_t w = axis_weight(ambient, slab_axis);
    for (int c = 0; c < 2; ++c) {
      std::vector<const GroupRef*> color_groups;
      for (const GroupRef& ref : groups)
        if (ref.color == c) color_groups.push_back(&ref);
      for (std::size_t i = 0; i < color_groups.size(); ++i) {
        for (std::size_t j = i; j < color_groups.size(); ++j) {
          const GroupRef& a = *color_groups[i];
          const GroupRef& b = *color_groups[j];
          std::optional<std::int64_t> units;
          if (a.passthrough || b.passthrough) {
            if (i == j) continue;  // a single whole-source piece pairs with nothing
            units = 0;             // everything else overlaps a whole-source piece
          } else {
            units = min_pair_units(*a.g, *b.g, i == j);
          }
          if (!units) continue;
          const std::int64_t metric = w * *units;
          if (metric <= r) {
            std::ostringstream out;
            out << name << ": color-" << c << " " << group_name(a);
            if (i == j)
              out << " repeats at distance ";
            else
              out << " meets " << group_name(b) << " at distance ";
            out << metric << " <= scale " << r;
            rep.violations.push_back(out.str());
          }
        }
      }
    }
  }
}

Space make_passthrough(const Space& source) { return source; }

SourceDecomposition passthrough_move(const Space& space) {
  SourceDecomposition sd;
  sd.source = space;
  PieceGroup g;
  g.space = make_passthrough(space);
  g.slab_axis = -1;
  g.range = MRange::Single;
  sd.colors[0].push_back(g);
  return sd;
}

int lowest_unbounded_axis(const Space& space) {
  for (std::size_t j = 0; j < space.box.axes.size(); ++j)
    if (!interval_bounded(space.box.axes[j].range)) return static_cast<int>(j);
  return -1;
}

// Split one space along its lowest unbounded axis into alternating blocks of
// roughly 2(R+1) metric units.
SourceDecomposition slab_move(const AmbientZ& ambient, const Space& space, std::int64_t r) {
  SourceDecomposition sd;
  sd.source = space;
  const BoundReport br = space_bound(ambient, space);
  if (br.bounded) return passthrough_move(space);
  const int a = lowest_unbounded_axis(space);
  if (a < 0) throw ConfigError("an unbounded space must have an unbounded axis");
  const std::int64_t w = axis_weight(ambient, a);
  const AxisSet& axis = space.box.axes[static_cast<std::size_t>(a)];

  if (space.extensional) {
    const std::int64_t stride = std::max<std::int64_t>(1, axis.stride);
    const std::int64_t units = std::max<std::int64_t>(1, (2 * (r + 1)) / (w * stride));
    const std::int64_t resid = stride > 1 ? pos_mod(axis.resid, stride) : 0;
    std::map<std::int64_t, std::vector<ZPoint>> buckets;
    for (const ZPoint& p : space.points) {
      const std::int64_t idx = floor_div(p[static_cast<std::size_t>(a)] - resid, stride);
      buckets[floor_div(idx, units)].push_back(p);
    }
    for (auto& [block, pts] : buckets) {
      PieceGroup g;
      g.slab_axis = -1;
      g.range = MRange::Single;
      g.space.extensional = true;
      std::sort(pts.begin(), pts.end());
      g.space.points = pts;
      g.space.box = space.box;
      AxisSet& na = g.space.box.axes[static_cast<std::size_t>(a)];
      na.range = Interval{false, false, resid + block * units * stride,
                          resid + ((block + 1) * units - 1) * stride};
      g.space.label = space.label + "|" + std::to_string(block);
      g.space.universe_note = space.universe_note;
      sd.colors[static_cast<std::size_t>(pos_mod(block, 2))].push_back(g);
    }
    return sd;
  }

  const std::int64_t units = std::max<std::int64_t>(1, (2 * (r + 1)) / w);
  const Interval& inter = axis.range;
  for (int c = 0; c < 2; ++c) {
    PieceGroup g;
    g.slab_axis = a;
    g.width = units;
    g.period = 2 * units;
    if (inter.lo_unbounded && inter.hi_unbounded) {
      g.range = MRange::All;
      g.offset = c * units;
    } else if (!inter.lo_unbounded) {
      g.range = MRange::Geq0;
      g.offset = inter.lo + c * units;
    } else {
      g.range = MRange::Leq0;
      g.offset = inter.hi - (c + 1) * units + 1;
    }
    g.space.extensional = false;
    g.space.box = space.box;
    g.space.box.axes[static_cast<std::size_t>(a)].range =
        Interval{false, false, g.offset, g.offset + units - 1};
    g.space.label = space.label + (c == 0 ? "/even" : "/odd");
    sd.colors[static_cast<std::size_t>(c)].push_back(g);
  }
  return sd;
}

MetricFamily map_family(const ExpansiveMap& f, const MetricFamily& fam) {
  MetricFamily out;
  out.ambient = map_ambient(f, fam.ambient);
  for (const Space& s : fam.spaces) out.spaces.push_back(map_space(f, s));
  return out;
}

std::int64_t control_ceiling(const PiecewiseLinear& rho, std::int64_t r) {
  const Frac y = pl_eval(rho, make_frac(r));
  return ceil_div(y.num, y.den);
}

std::string join_int64(const std::vector<std::int64_t>& xs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out << ",";
    out << xs[i];
  }
  return out.str();
}

}  // namespace

bool spaces_equal(const Space& a, const Space& b) {
  if (a.extensional != b.extensional) return false;
  if (!(a.box == b.box)) return false;
  if (a.extensional) return sorted_points(a.points) == sorted_points(b.points);
  return true;
}

DecompositionReport verify_decomposition(const AmbientZ& ambient, const RDecomposition& dec) {
  require_ambient(ambient);
  DecompositionReport rep;
  if (dec.R < 0) rep.violations.push_back("the decomposition scale is negative");
  std::int64_t pair_budget = kPairCap;
  for (const SourceDecomposition& sd : dec.per_source) {
    if (sd.source.extensional)
      check_extensional_source(ambient, sd, dec.R, rep, pair_budget);
    else
      check_symbolic_source(ambient, sd, dec.R, rep);
  }
  return rep;
}

MetricFamily successor_family(const AmbientZ& ambient, const RDecomposition& dec) {
  require_ambient(ambient);
  MetricFamily out;
  out.ambient = ambient;
  for (const SourceDecomposition& sd : dec.per_source) {
    for (int c = 0; c < 2; ++c) {
      const auto& list = sd.colors[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < list.size(); ++i) {
        Space s = list[i].space;
        s.label = space_name(sd.source) + "." + std::to_string(c) + "." + std::to_string(i);
        if (list[i].range != MRange::Single && s.universe_note.empty()) {
          s.universe_note = "represents every block of a period-" + std::to_string(list[i].period) +
                            " family on axis " + std::to_string(list[i].slab_axis);
        }
        out.spaces.push_back(std::move(s));
      }
    }
  }
  return out;
}

BoundReport space_bound(const AmbientZ& ambient, const Space& space) {
  require_ambient(ambient);
  if (static_cast<int>(space.box.axes.size()) != ambient.dim)
    throw ConfigError("space box dimension differs from the ambient lattice");
  std::int64_t total = 0;
  for (int j = 0; j < ambient.dim; ++j) {
    const auto span = bounded_axis_span(space.box.axes[static_cast<std::size_t>(j)]);
    if (!span) return BoundReport{false, 0};
    total += axis_weight(ambient, j) * (span->hi - span->lo);
  }
  return BoundReport{true, total};
}

BoundReport is_uniformly_bounded(const MetricFamily& family) {
  BoundReport out{true, 0};
  for (const Space& s : family.spaces) {
    const BoundReport br = space_bound(family.ambient, s);
    if (!br.bounded) return BoundReport{false, 0};
    out.bound = std::max(out.bound, br.bound);
  }
  return out;
}

Strategy make_slab_strategy() {
  return [](const MetricFamily& fam, std::int64_t r) {
    if (r < 0) throw ConfigError("decomposition scales must be non-negative");
    require_ambient(fam.ambient);
    RDecomposition dec;
    dec.R = r;
    for (const Space& space : fam.spaces)
      dec.per_source.push_back(slab_move(fam.ambient, space, r));
    return dec;
  };
}

Strategy make_subgroup_union_strategy(std::vector<LatticeSubgroup> chain) {
  auto first_done = std::make_shared<bool>(false);
  return [chain, first_done](const MetricFamily& fam, std::int64_t r) {
    if (r < 0) throw ConfigError("decomposition scales must be non-negative");
    require_ambient(fam.ambient);
    RDecomposition dec;
    dec.R = r;
    if (*first_done) {
      for (const Space& space : fam.spaces)
        dec.per_source.push_back(slab_move(fam.ambient, space, r));
      return dec;
    }
    const int dim = fam.ambient.dim;
    if (chain.empty()) throw ConfigError("the subgroup chain is empty");
    for (const LatticeSubgroup& g : chain)
      if (static_cast<int>(g.strides.size()) != dim)
        throw ConfigError("chain member " + g.label + " has the wrong dimension");
    for (const Space& space : fam.spaces)
      if (!space.extensional)
        throw RefusalError("the subgroup-chain first move needs ball-model spaces");

    const ZPoint origin(static_cast<std::size_t>(dim), 0);
    const auto member = [&](const LatticeSubgroup& g, const ZPoint& p) {
      for (int j = 0; j < dim; ++j) {
        const std::int64_t s = g.strides[static_cast<std::size_t>(j)];
        const std::int64_t x = p[static_cast<std::size_t>(j)];
        if (s == 1) continue;
        if (s == 0 && x != 0) return false;
        if (s >= 2 && pos_mod(x, s) != 0) return false;
      }
      return true;
    };
    int pick = -1;
    for (std::size_t i = 0; i < chain.size() && pick < 0; ++i) {
      bool ok = true;
      for (const Space& space : fam.spaces) {
        for (const ZPoint& p : space.points) {
          if (weighted_l1(fam.ambient, p, origin) <= r && !member(chain[i], p)) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) pick = static_cast<int>(i);
    }
    if (pick < 0)
      throw RefusalError("no subgroup in the chain contains the scale-" + std::to_string(r) +
                         " ball of the model");
    const LatticeSubgroup& g = chain[static_cast<std::size_t>(pick)];
    for (const Space& space : fam.spaces) {
      SourceDecomposition sd;
      sd.source = space;
      std::map<std::vector<std::int64_t>, std::vector<ZPoint>> buckets;
      for (const ZPoint& p : space.points) {
        std::vector<std::int64_t> key;
        for (int j = 0; j < dim; ++j) {
          const std::int64_t s = g.strides[static_cast<std::size_t>(j)];
          if (s == 1) continue;
          key.push_back(s == 0 ? p[static_cast<std::size_t>(j)]
                               : pos_mod(p[static_cast<std::size_t>(j)], s));
        }
        buckets[key].push_back(p);
      }
      for (auto& [key, pts] : buckets) {
        PieceGroup piece;
        piece.slab_axis = -1;
        piece.range = MRange::Single;
        piece.space.extensional = true;
        std::sort(pts.begin(), pts.end());
        piece.space.points = pts;
        piece.space.box = space.box;
        std::size_t ki = 0;
        for (int j = 0; j < dim; ++j) {
          const std::int64_t s = g.strides[static_cast<std::size_t>(j)];
          AxisSet& axis = piece.space.box.axes[static_cast<std::size_t>(j)];
          if (s == 1) continue;
          const std::int64_t v = key[ki++];
          if (s == 0) {
            axis.range = Interval{false, false, v, v};
            axis.stride = 1;
            axis.resid = 0;
          } else {
            axis.stride = s;
            axis.resid = v;
          }
        }
        piece.space.label = space.label + "|" + g.label + "(" + join_int64(key) + ")";
        piece.space.universe_note = space.universe_note;
        sd.colors[0].push_back(std::move(piece));
      }
      dec.per_source.push_back(std::move(sd));
    }
    *first_done = true;
    return dec;
  };
}

ZPoint map_point(const ExpansiveMap& f, const ZPoint& x) {
  if (f.kind == ExpansiveMap::Kind::Identity) return x;
  if (f.prefix < 1 || f.prefix > static_cast<int>(x.size()))
    throw ConfigError("projection prefix must keep between one and all axes");
  return ZPoint(x.begin(), x.begin() + f.prefix);
}

AmbientZ map_ambient(const ExpansiveMap& f, const AmbientZ& ambient) {
  require_ambient(ambient);
  if (f.kind == ExpansiveMap::Kind::Identity) return ambient;
  if (f.prefix < 1 || f.prefix > ambient.dim)
    throw ConfigError("projection prefix must keep between one and all axes");
  AmbientZ out;
  out.dim = f.prefix;
  if (!ambient.weights.empty())
    out.weights.assign(ambient.weights.begin(), ambient.weights.begin() + f.prefix);
  return out;
}

Space map_space(const ExpansiveMap& f, const Space& space) {
  if (f.kind == ExpansiveMap::Kind::Identity) return space;
  if (f.prefix < 1 || f.prefix > static_cast<int>(space.box.axes.size()))
    throw ConfigError("projection prefix must keep between one and all axes");
  Space out;
  out.label = space.label;
  out.extensional = space.extensional;
  out.universe_note = space.universe_note;
  out.box.axes.assign(space.box.axes.begin(), space.box.axes.begin() + f.prefix);
  if (space.extensional) {
    for (const ZPoint& p : space.points) out.points.push_back(map_point(f, p));
    out.points = sorted_points(out.points);
  }
  return out;
}

DecompositionReport verify_control_samples(const ExpansiveMap& f, const AmbientZ& ambient,
                                           const std::vector<ZPoint>& samples) {
  require_ambient(ambient);
  DecompositionReport rep;
  const AmbientZ image_ambient = map_ambient(f, ambient);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const std::int64_t du = weighted_l1(ambient, samples[i], samples[j]);
      const std::int64_t dv =
          weighted_l1(image_ambient, map_point(f, samples[i]), map_point(f, samples[j]));
      const Frac bound = pl_eval(f.rho, make_frac(du));
      if (frac_cmp(make_frac(dv), bound) > 0) {
        rep.violations.push_back("the control is violated by " + format_point(samples[i]) +
                                 " and " + format_point(samples[j]) + ": image distance " +
                                 std::to_string(dv) + " exceeds rho(" + std::to_string(du) + ")");
      }
    }
  }
  return rep;
}

RDecomposition pullback_decomposition(const ExpansiveMap& f, const MetricFamily& source,
                                      const RDecomposition& image_dec, std::int64_t r) {
  require_ambient(source.ambient);
  if (r < 0) throw ConfigError("decomposition scales must be non-negative");
  const AmbientZ image_ambient = map_ambient(f, source.ambient);
  const std::int64_t s = control_ceiling(f.rho, r);
  RDecomposition at_control = image_dec;
  at_control.R = s;
  const DecompositionReport image_rep = verify_decomposition(image_ambient, at_control);
  if (!image_rep.pass())
    throw VerificationError("the image decomposition is not valid at the control scale " +
                            std::to_string(s) + ": " + image_rep.violations.front());
  if (image_dec.per_source.size() != source.spaces.size())
    throw ConfigError("the image decomposition does not match the mapped family");

  RDecomposition out;
  out.R = r;
  for (std::size_t si = 0; si < source.spaces.size(); ++si) {
    const Space& space = source.spaces[si];
    const SourceDecomposition& img = image_dec.per_source[si];
    if (!spaces_equal(img.source, map_space(f, space)))
      throw ConfigError("the image decomposition lists a different space at position " +
                        std::to_string(si));
    SourceDecomposition sd;
    sd.source = space;
    if (f.kind == ExpansiveMap::Kind::Identity) {
      sd.colors = img.colors;
      out.per_source.push_back(std::move(sd));
      continue;
    }
    if (space.extensional)
      throw RefusalError("pulling back onto a ball model is only supported for the identity map");
    for (int c = 0; c < 2; ++c) {
      for (const PieceGroup& g : img.colors[static_cast<std::size_t>(c)]) {
        // widen the image piece by the hidden axes
        PieceGroup piece = g;
        piece.space.extensional = false;
        piece.space.points.clear();
        SymBox box = space.box;
        for (int j = 0; j < f.prefix; ++j)
          box.axes[static_cast<std::size_t>(j)] = g.space.box.axes[static_cast<std::size_t>(j)];
        piece.space.box = std::move(box);
        piece.space.label = space.label + "/" + space_name(g.space);
        sd.colors[static_cast<std::size_t>(c)].push_back(std::move(piece));
      }
    }
    out.per_source.push_back(std::move(sd));
  }
  const DecompositionReport rep = verify_decomposition(source.ambient, out);
  if (!rep.pass())
    throw VerificationError("the pulled-back decomposition fails at scale " + std::to_string(r) +
                            ": " + rep.violations.front());
  return out;
}

Strategy make_fibered_strategy(const ExpansiveMap& f, Strategy base,
                               std::function<Strategy(const MetricFamily&)> fiber_factory) {
  struct State {
    bool init = false;
    bool base_done = false;
    MetricFamily base_family;
    Strategy fiber;
    bool fiber_ready = false;
  };
  auto st = std::make_shared<State>();
  return [f, base, fiber_factory, st](const MetricFamily& fam, std::int64_t r) {
    if (!st->init) {
      st->base_family = map_family(f, fam);
      st->init = true;
    }
    if (!st->base_done && is_uniformly_bounded(st->base_family).bounded) st->base_done = true;
    if (!st->base_done) {
      const std::int64_t s = control_ceiling(f.rho, r);
      RDecomposition base_dec = base(st->base_family, s);
      base_dec.R = s;
      RDecomposition out = pullback_decomposition(f, fam, base_dec, r);
      st->base_family = successor_family(st->base_family.ambient, base_dec);
      return out;
    }
    if (!st->fiber_ready) {
      st->fiber = fiber_factory(fam);
      st->fiber_ready = true;
    }
    return st->fiber(fam, r);
  };
}

GameTranscript run_game(const MetricFamily& start, const Strategy& strategy,
                        const std::vector<std::int64_t>& scales) {
  require_ambient(start.ambient);
  GameTranscript t;
  t.ambient = start.ambient;
  t.scales = scales;
  t.start = start;
  for (const Space& s : start.spaces) {
    if (s.extensional) {
      t.universe_note = "bounds are certified within the declared ball models, not the full spaces";
      break;
    }
  }
  for (std::int64_t r : scales)
    if (r < 0) throw ConfigError("decomposition scales must be non-negative");

  MetricFamily fam = start;
  for (std::int64_t r : scales) {
    if (is_uniformly_bounded(fam).bounded) break;
    RDecomposition dec = strategy(fam, r);
    dec.R = r;
    bool sources_match = dec.per_source.size() == fam.spaces.size();
    for (std::size_t i = 0; sources_match && i < fam.spaces.size(); ++i)
      sources_match = spaces_equal(dec.per_source[i].source, fam.spaces[i]);
    t.steps.push_back(GameStep{r, dec});
    if (!sources_match) {
      t.failed = true;
      t.failure = "the strategy decomposed a family other than the current one";
      return t;
    }
    const DecompositionReport rep = verify_decomposition(fam.ambient, dec);
    if (!rep.pass()) {
      t.failed = true;
      t.failure = rep.violations.front();
      return t;
    }
    fam = successor_family(fam.ambient, dec);
  }
  const BoundReport br = is_uniformly_bounded(fam);
  if (!br.bounded) {
    t.failed = true;
    t.failure = "the scale sequence was exhausted before the family became uniformly bounded";
    return t;
  }
  t.final_bound = br.bound;
  return t;
}

DecompositionReport verify_transcript(const GameTranscript& transcript) {
  DecompositionReport rep;
  require_ambient(transcript.ambient);
  if (transcript.failed) {
    rep.violations.push_back("the transcript is marked failed: " + transcript.failure);
    return rep;
  }
  if (transcript.steps.size() > transcript.scales.size()) {
    rep.violations.push_back("the transcript has more steps than requested scales");
    return rep;
  }
  MetricFamily fam = transcript.start;
  fam.ambient = transcript.ambient;
  for (std::size_t i = 0; i < transcript.steps.size(); ++i) {
    const GameStep& step = transcript.steps[i];
    const std::string tag = "step " + std::to_string(i + 1);
    if (step.scale != transcript.scales[i])
      rep.violations.push_back(tag + ": scale differs from the requested sequence");
    if (step.dec.R != step.scale)
      rep.violations.push_back(tag + ": the decomposition records a different scale");
    if (step.dec.per_source.size() != fam.spaces.size()) {
      rep.violations.push_back(tag + ": the decomposition does not list every current space");
      return rep;
    }
    for (std::size_t j = 0; j < fam.spaces.size(); ++j) {
      if (!spaces_equal(step.dec.per_source[j].source, fam.spaces[j]))
        rep.violations.push_back(tag + ": source " + std::to_string(j) +
                                 " differs from the current family");
    }
    try {
      const DecompositionReport step_rep = verify_decomposition(transcript.ambient, step.dec);
      for (const std::string& v : step_rep.violations) rep.violations.push_back(tag + ": " + v);
    } catch (const RefusalError& e) {
      rep.violations.push_back(tag + ": unsupported piece shape: " + e.what());
      return rep;
    }
    fam = successor_family(transcript.ambient, step.dec);
  }
  const BoundReport br = is_uniformly_bounded(fam);
  if (!br.bounded)
    rep.violations.push_back("the final family is not uniformly bounded");
  else if (br.bound != transcript.final_bound)
    rep.violations.push_back("the recorded bound " + std::to_string(transcript.final_bound) +
                             " differs from the recomputed bound " + std::to_string(br.bound));
  return rep;
}

// --- space grammar -----------------------------------------------------------

namespace {

struct Cursor {
  const std::string& text;
  std::size_t i = 0;

  void skip_ws() {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  }
  bool done() {
    skip_ws();
    return i >= text.size();
  }
  char peek() { return i < text.size() ? text[i] : '\0'; }
  [[noreturn]] void fail(const std::string& what) { throw ParseError("space spec: " + what, i); }
  std::int64_t integer() {
    skip_ws();
    std::size_t start = i;
    if (peek() == '-' || peek() == '+') ++i;
    std::size_t digits = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == digits) fail("expected an integer");
    return std::stoll(text.substr(start, i - start));
  }
  bool eat(char c) {
    skip_ws();
    if (peek() == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool eat_word(const std::string& w) {
    skip_ws();
    if (text.compare(i, w.size(), w) == 0) {
      i += w.size();
      return true;
    }
    return false;
  }
};

Interval parse_interval(Cursor& c) {
  c.skip_ws();
  bool lo_open = false;
  if (c.eat('[')) {
    lo_open = false;
  } else if (c.eat('(')) {
    lo_open = true;
  } else {
    c.fail("expected '[' or '(' to open an interval");
  }
  Interval out;
  if (c.eat_word("-inf")) {
    if (!lo_open) c.fail("an infinite endpoint needs an open bracket");
    out.lo_unbounded = true;
  } else {
    out.lo = c.integer() + (lo_open ? 1 : 0);
  }
  if (!c.eat(',')) c.fail("expected ',' between interval endpoints");
  bool hi_inf = false;
  if (c.eat_word("+inf") || c.eat_word("inf")) hi_inf = true;
  std::int64_t hi = 0;
  if (!hi_inf) hi = c.integer();
  bool hi_open = false;
  if (c.eat(']')) {
    hi_open = false;
  } else if (c.eat(')')) {
    hi_open = true;
  } else {
    c.fail("expected ']' or ')' to close an interval");
  }
  if (hi_inf) {
    if (!hi_open) c.fail("an infinite endpoint needs an open bracket");
    out.hi_unbounded = true;
  } else {
    out.hi = hi - (hi_open ? 1 : 0);
  }
  if (!out.lo_unbounded && !out.hi_unbounded && out.lo > out.hi) c.fail("the interval is empty");
  return out;
}

}  // namespace

MetricFamily parse_space_spec(const std::string& text) {
  Cursor c{text};
  if (!c.eat('Z')) c.fail("expected 'Z'");
  int dim = 1;
  if (c.eat('^')) {
    const std::int64_t d = c.integer();
    if (d < 1 || d > 16) c.fail("the dimension must be between 1 and 16");
    dim = static_cast<int>(d);
  }
  MetricFamily fam;
  fam.ambient.dim = dim;
  fam.ambient.weights.assign(static_cast<std::size_t>(dim), 1);
  Space space;
  space.label = "X";
  space.box.axes.assign(static_cast<std::size_t>(dim), AxisSet{Interval{true, true, 0, 0}, 1, 0});

  if (c.eat_word("weights")) {
    for (int j = 0; j < dim; ++j) {
      if (j && !c.eat(',')) c.fail("expected ',' in the weight list");
      const std::int64_t w = c.integer();
      if (w < 1) c.fail("weights must be positive");
      fam.ambient.weights[static_cast<std::size_t>(j)] = w;
    }
  }
  if (c.eat_word("box")) {
    for (int j = 0; j < dim; ++j) {
      if (j && !c.eat('x')) c.fail("expected 'x' between box intervals");
      space.box.axes[static_cast<std::size_t>(j)].range = parse_interval(c);
    }
  }
  if (!c.done()) c.fail("unexpected trailing text");
  fam.spaces.push_back(std::move(space));
  return fam;
}

std::string print_space_spec(const AmbientZ& ambient, const Space& space) {
  require_ambient(ambient);
  std::ostringstream out;
  out << "Z";
  if (ambient.dim != 1) out << "^" << ambient.dim;
  bool weighted = false;
  for (int j = 0; j < ambient.dim; ++j) weighted = weighted || axis_weight(ambient, j) != 1;
  if (weighted) {
    out << " weights ";
    for (int j = 0; j < ambient.dim; ++j) {
      if (j) out << ",";
      out << axis_weight(ambient, j);
    }
  }
  bool full = true;
  for (const AxisSet& axis : space.box.axes)
    full = full && axis.range.lo_unbounded && axis.range.hi_unbounded && axis.stride == 1;
  if (!full) {
    out << " box ";
    for (std::size_t j = 0; j < space.box.axes.size(); ++j) {
      if (j) out << "x";
      const AxisSet& axis = space.box.axes[j];
      if (axis.range.lo_unbounded)
        out << "(-inf,";
      else
        out << "[" << axis.range.lo << ",";
      if (axis.range.hi_unbounded)
        out << "inf)";
      else
        out << axis.range.hi << "]";
      if (axis.stride != 1) out << "%" << axis.stride << "=" << axis.resid;
    }
  }
  return out.str();
}

}  // namespace gpcert
