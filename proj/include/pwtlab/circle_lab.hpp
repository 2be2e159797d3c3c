#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pwtlab/arc_union.hpp"
#include "pwtlab/pwt_map.hpp"

namespace pwt {

// Double rotation on the circle: x + alpha + beta mod 1 for x <= delta,
// x + alpha mod 1 for x > delta.
template <class S>
struct DoubleRotation {
  S alpha{};
  S beta{};
  S delta{};

  void check() const {
    if (alpha < S(0) || !(alpha < S(1))) throw Error(Err::InvalidArgument, "alpha must be in [0,1)");
    if (beta < S(0)) throw Error(Err::InvalidArgument, "beta must be >= 0");
    if (delta < S(0) || S(1) < delta) throw Error(Err::InvalidArgument, "delta must be in [0,1]");
  }
};

using DoubleRotationQ = DoubleRotation<Rational>;
using DoubleRotationD = DoubleRotation<double>;

template <class S>
S double_rotation_apply(const DoubleRotation<S>& T, const S& x) {
  return x <= T.delta ? frac_mod1(x + T.alpha + T.beta) : frac_mod1(x + T.alpha);
}

// Set image under the double rotation. The split is half-open at delta (the
// single point x = delta itself follows the lower branch pointwise; set images
// agree up to that measure-zero point).
template <class S>
ArcUnion<S> image_of_set(const DoubleRotation<S>& T, const ArcUnion<S>& set) {
  const ArcUnion<S> low = intersect(set, ArcUnion<S>::segment(S(0), T.delta));
  const ArcUnion<S> high = intersect(set, ArcUnion<S>::segment(T.delta, S(1)));
  return unite(low.translated_mod1(T.alpha + T.beta), high.translated_mod1(T.alpha));
}

// --- random Bernoulli compositions -------------------------------------------

// Symbols: 1 applies the rigid rotation T1, 2 applies the double rotation T2;
// p is the probability of drawing symbol 1. The image is composed on the left
// (the newest map acts on the current image), so the measure trace is
// monotone and exact.
struct RandomRun {
  double p = 0.5;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::string rng_algorithm;
  Itinerary symbols;                                    // length n, values 1|2
  std::vector<Rational> measure_trace;                  // length n+1, index 0 = initial
  std::vector<std::pair<Rational, std::int64_t>> first_below;  // (eps, first n) or -1
  std::vector<RatArcUnion> tail_sets;                   // final-quartile images when retained
};

RandomRun random_compose(const Rational& rot_angle, const DoubleRotationQ& T2, double p,
                         std::uint64_t seed, std::int64_t n, std::vector<Rational> eps_list,
                         bool keep_tail = false, std::int64_t arc_cap = 1000000);

struct Histogram {
  std::vector<double> masses;       // per-bin tail-averaged mass
  double mean_tail_measure = 0;     // equals the sum of masses (exact accumulation)
  std::int64_t tail_iterates = 0;
};

Histogram attractor_histogram(const RandomRun& run, int grid_bins);

// --- constructive arc itinerary (synchronization certificate) -----------------

// Run-length encoded itinerary: (symbol, repeat) blocks in application order.
using ItineraryBlocks = std::vector<std::pair<std::int32_t, std::int64_t>>;

struct ArcItineraryResult {
  ItineraryBlocks blocks;   // canonical form; rotation runs can be very long
  Itinerary symbols;        // expanded form, filled when total length <= 2e6
  std::int64_t total_symbols = 0;
  RatArcUnion final_image;  // exact T_J(circle), recomputed by replay
  bool verified = false;    // contains(target, final_image), exact
  std::vector<Rational> stage1_gap_trace;  // gap length after each stage-1 growth block
  std::int64_t bridge_blocks = 0;          // extra T2 blocks closing stage 1
  std::int64_t stage2_rounds = 0;          // cluster-contraction rounds
  std::int64_t stage2_cuts = 0;            // T2 applications inside stage 2
};

// Builds a finite itinerary J with T_J(circle) inside the target arc
// [target_start, target_start + target_len) and verifies it by exact replay.
// rot_angle is the T1 rotation; it must pass the bounded irrationality check.
// Rotation blocks are positioned exactly (first-hit computation on the
// rotation's rational grid); rotation_budget caps the accepted block length
// and cut_budget the number of T2 applications. Throws SynthesisFailed with
// a diagnostic when a budget is exceeded or the parameters violate the
// geometric preconditions.
ArcItineraryResult arc_itinerary(const Rational& rot_angle, const DoubleRotationQ& T2,
                                 const Rational& target_start, const Rational& target_len,
                                 std::int64_t rotation_budget = 100000,
                                 std::int64_t cut_budget = 100000);

// Exact replay oracle: applies the symbol sequence to the full circle.
RatArcUnion replay_itinerary(const Rational& rot_angle, const DoubleRotationQ& T2,
                             const ItineraryBlocks& blocks, std::int64_t arc_cap = 1000000);
RatArcUnion replay_itinerary(const Rational& rot_angle, const DoubleRotationQ& T2,
                             const Itinerary& symbols, std::int64_t arc_cap = 1000000);

}  // namespace pwt
