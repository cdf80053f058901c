#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpcert/covers.hpp"
#include "gpcert/metric.hpp"

namespace gpcert {

// --- symbolic subsets of Z^n -------------------------------------------------

// Closed integer interval, possibly unbounded on either side.
struct Interval {
  bool lo_unbounded = false;
  bool hi_unbounded = false;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// One axis of a symbolic box: the values x in `range` with
// x == resid (mod stride). stride 1 keeps the whole range.
struct AxisSet {
  Interval range;
  std::int64_t stride = 1;
  std::int64_t resid = 0;
  friend bool operator==(const AxisSet&, const AxisSet&) = default;
};

struct SymBox {
  std::vector<AxisSet> axes;
  friend bool operator==(const SymBox&, const SymBox&) = default;
};

// The ambient lattice Z^dim under the weighted l1 metric: moving one step
// along axis j costs weights[j].
struct AmbientZ {
  int dim = 1;
  std::vector<std::int64_t> weights;  // one per axis, all >= 1
};

// A metric subspace: either exact symbolic (box authoritative) or an
// extensional ball model (points enumerated within a declared universe; box
// describes the full subset the points model, so boundedness and diameter
// claims come from the box while distances are checked on the points).
struct Space {
  std::string label;
  bool extensional = false;
  SymBox box;
  std::vector<ZPoint> points;
  std::string universe_note;
};

struct MetricFamily {
  AmbientZ ambient;
  std::vector<Space> spaces;
};

// True when the two spaces describe the same subset (labels and notes are
// ignored).
bool spaces_equal(const Space& a, const Space& b);

// --- decompositions ----------------------------------------------------------

// Which blocks m of a slab group exist.
enum class MRange { All, Geq0, Leq0, Single };

// A group of congruent pieces: block m replaces axis slab_axis of the
// representative's box by [offset + m*period, offset + m*period + width - 1].
// `space` is the representative (block m = 0); slab_axis -1 means a single
// piece equal to `space` with no parametrization.
struct PieceGroup {
  Space space;
  int slab_axis = -1;
  std::int64_t offset = 0;
  std::int64_t period = 0;
  std::int64_t width = 0;
  MRange range = MRange::Single;
};

struct SourceDecomposition {
  Space source;
  std::array<std::vector<PieceGroup>, 2> colors;
};

// One move: every source space splits into two colors whose pieces must be
// pairwise further than R apart within each color, jointly reproducing the
// source exactly.
struct RDecomposition {
  std::int64_t R = 0;
  std::vector<SourceDecomposition> per_source;
};

struct DecompositionReport {
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

// Exact checks: union equality and per-color separation > R for each source.
// Symbolic sources accept stride-free boxes decomposed along one shared axis
// into slab groups of a common period (plus whole-source passthrough pieces);
// other symbolic shapes raise RefusalError. Failures are report entries.
DecompositionReport verify_decomposition(const AmbientZ& ambient, const RDecomposition& dec);

// The family formed by the pieces: one representative space per group, in
// source order, color 0 before color 1, labeled source/color.index.
MetricFamily successor_family(const AmbientZ& ambient, const RDecomposition& dec);

struct BoundReport {
  bool bounded = false;
  std::int64_t bound = 0;  // exact max diameter when bounded
};

BoundReport space_bound(const AmbientZ& ambient, const Space& space);
BoundReport is_uniformly_bounded(const MetricFamily& family);

// --- strategies and the decomposition game -----------------------------------

using Strategy = std::function<RDecomposition(const MetricFamily&, std::int64_t)>;

// At scale R, split each space's lowest-indexed unbounded axis into
// alternating blocks of about 2(R+1) metric units (even blocks color 0, odd
// color 1); bounded spaces pass through untouched as one piece.
Strategy make_slab_strategy();

// A member of a subgroup chain in weighted Z^n: per axis, stride 1 keeps the
// axis free, stride 0 pins it to zero, stride k >= 2 restricts to multiples
// of k.
struct LatticeSubgroup {
  std::string label;
  std::vector<std::int64_t> strides;
};

// First move: pick the first chain member containing the scale-R ball (every
// axis free, or too heavy to reach a nonzero value within R) and split the
// modeled ball into its cosets as a single color; later moves run the slab
// strategy on each coset. RefusalError when no chain member qualifies.
Strategy make_subgroup_union_strategy(std::vector<LatticeSubgroup> chain);

// A coordinate map with a certified control function:
// d(f x, f x') <= rho(d(x, x')) on the modeled spaces.
struct ExpansiveMap {
  enum class Kind { Identity, ProjectPrefix };
  Kind kind = Kind::Identity;
  int prefix = 0;  // ProjectPrefix: keep the first `prefix` axes
  PiecewiseLinear rho;
};

ZPoint map_point(const ExpansiveMap& f, const ZPoint& x);
AmbientZ map_ambient(const ExpansiveMap& f, const AmbientZ& ambient);
Space map_space(const ExpansiveMap& f, const Space& space);

// Check the declared control on concrete samples: every pair must satisfy
// d(f x, f x') <= rho(d(x, x')).
DecompositionReport verify_control_samples(const ExpansiveMap& f, const AmbientZ& ambient,
                                           const std::vector<ZPoint>& samples);

// Preimage of a decomposition of the mapped family: the image decomposition
// is first verified at scale S = rho(R) (VerificationError otherwise), then
// pulled back piece by piece (empty preimages dropped) and re-verified at
// scale R.
RDecomposition pullback_decomposition(const ExpansiveMap& f, const MetricFamily& source,
                                      const RDecomposition& image_dec, std::int64_t R);

// Play a base strategy on the mapped family (at the controlled scales,
// via pullback) until the mapped family is uniformly bounded, then continue
// with the strategy the factory yields for the remaining family.
Strategy make_fibered_strategy(const ExpansiveMap& f, Strategy base,
                               std::function<Strategy(const MetricFamily&)> fiber_factory);

// --- the game ----------------------------------------------------------------

struct GameStep {
  std::int64_t scale = 0;
  RDecomposition dec;
};

// Families are implicit: family 0 is `start`, family i+1 is the successor of
// step i's decomposition. A failed transcript keeps the offending step and
// explains the failure.
struct GameTranscript {
  AmbientZ ambient;
  std::vector<std::int64_t> scales;  // the requested sequence
  MetricFamily start;
  std::vector<GameStep> steps;
  bool failed = false;
  std::string failure;
  std::int64_t final_bound = 0;
  std::string universe_note;  // set when any space is a ball model
};

// Decompose step by step until the family is uniformly bounded, verifying
// every move. Stops early once bounded (possibly before any move); marks the
// transcript failed when a move does not verify or the scales run out first.
GameTranscript run_game(const MetricFamily& start, const Strategy& strategy,
                        const std::vector<std::int64_t>& scales);

// Re-derive everything a transcript claims: scale order, source/successor
// chaining, every decomposition, and the final bound.
DecompositionReport verify_transcript(const GameTranscript& transcript);

// --- space grammar -----------------------------------------------------------

// "Z", "Z^3", optionally "weights 1,2,3", optionally
// "box [0,inf)x[-3,3]" with closed/open integer or inf endpoints.
MetricFamily parse_space_spec(const std::string& text);
std::string print_space_spec(const AmbientZ& ambient, const Space& space);

}  // namespace gpcert
