#include "pwtlab/circle_lab.hpp"

#include <algorithm>
#include <numeric>

#include "pwtlab/rng.hpp"
#include "rotation_hit.hpp"

namespace pwt {

RandomRun random_compose(const Rational& rot_angle, const DoubleRotationQ& T2, double p,
                         std::uint64_t seed, std::int64_t n, std::vector<Rational> eps_list,
                         bool keep_tail, std::int64_t arc_cap) {
  T2.check();
  if (p < 0 || p > 1) throw Error(Err::InvalidArgument, "Bernoulli parameter must be in [0,1]");
  if (n < 1) throw Error(Err::InvalidArgument, "need at least one step");

  RandomRun run;
  run.p = p;
  run.seed = seed;
  run.n = n;
  run.rng_algorithm = Rng::kAlgorithm;
  run.symbols.reserve(static_cast<std::size_t>(n));
  run.measure_trace.reserve(static_cast<std::size_t>(n) + 1);
  std::sort(eps_list.begin(), eps_list.end());
  for (const Rational& eps : eps_list) run.first_below.push_back({eps, -1});

  Rng rng(seed);
  RatArcUnion image = RatArcUnion::full_circle();
  run.measure_trace.push_back(image.measure());
  const std::int64_t tail_from = n - n / 4;

  for (std::int64_t step_i = 1; step_i <= n; ++step_i) {
    const bool pick_rotation = rng.bernoulli(p);
    if (pick_rotation) {
      image = image.translated_mod1(rot_angle);
      run.symbols.push_back(1);
    } else {
      image = image_of_set(T2, image);
      run.symbols.push_back(2);
    }
    if (static_cast<std::int64_t>(image.size()) > arc_cap)
      throw Error(Err::ArcExplosion, "arc count exceeded the configured cap");
    run.measure_trace.push_back(image.measure());
    for (auto& [eps, first] : run.first_below)
      if (first < 0 && image.measure() < eps) first = step_i;
    if (keep_tail && step_i > tail_from) run.tail_sets.push_back(image);
  }
  return run;
}

Histogram attractor_histogram(const RandomRun& run, int grid_bins) {
  if (grid_bins < 1) throw Error(Err::InvalidArgument, "need at least one bin");
  if (run.tail_sets.empty())
    throw Error(Err::InvalidArgument, "run was recorded without tail sets; rerun with keep_tail");
  Histogram h;
  h.tail_iterates = static_cast<std::int64_t>(run.tail_sets.size());
  std::vector<Rational> exact(static_cast<std::size_t>(grid_bins), Rational(0));
  for (const RatArcUnion& set : run.tail_sets) {
    for (int b = 0; b < grid_bins; ++b) {
      const RatArcUnion bin = RatArcUnion::segment(Rational(b, grid_bins), Rational(b + 1, grid_bins));
      exact[static_cast<std::size_t>(b)] += intersect(set, bin).measure();
    }
  }
  Rational total(0);
  const Rational count(h.tail_iterates);
  for (int b = 0; b < grid_bins; ++b) {
    const Rational avg = exact[static_cast<std::size_t>(b)] / count;
    total += avg;
    h.masses.push_back(avg.to_double());
  }
  h.mean_tail_measure = total.to_double();
  return h;
}

// --- arc itinerary -------------------------------------------------------------

namespace {

const Rational kOne(1);

// Wrap-aware arc [start, start+len) as a set; len <= 1.
RatArcUnion wrap_arc(const Rational& start, const Rational& len) {
  const Rational s = frac_mod1(start);
  if (kOne < s + len) {
    return unite(RatArcUnion::segment(s, kOne), RatArcUnion::segment(Rational(0), s + len - kOne));
  }
  return RatArcUnion::segment(s, s + len);
}

// Open interval (lo, hi) on the circle as a window set. Windows are stored as
// half-open arcs; strictness at both endpoints is enforced later by excluding
// the integer endpoints of the scaled range.
RatArcUnion open_window(const Rational& lo, const Rational& hi) {
  return wrap_arc(lo, hi - lo);
}

// frac(m * a) without building the unreduced product.
Rational frac_mul(std::int64_t m, const Rational& a) {
  __int128 num = static_cast<__int128>(m) * a.num() % a.den();
  if (num < 0) num += a.den();
  return Rational(static_cast<std::int64_t>(num), a.den());
}

// The synthesis walks a small set of tracked positions (hull/cluster starts)
// through rotation blocks and double-rotation cuts, with the full exact image
// set carried along as a consistency witness. Each rotation block is placed
// by an exact first-hit computation on the rotation's rational grid, so
// arbitrarily thin positioning windows resolve in logarithmic time.
struct Synth {
  Rational a;
  DoubleRotationQ T2;
  std::int64_t rotation_cap;  // accepted length of a single rotation block
  std::int64_t cut_budget;

  ItineraryBlocks blocks;
  std::int64_t cuts_used = 0;
  std::int64_t pending = 0;  // rotations not yet applied to the witness set
  RatArcUnion witness = RatArcUnion::full_circle();

  [[noreturn]] void fail(const std::string& why) const { throw Error(Err::SynthesisFailed, why); }

  void flush_witness() {
    if (pending > 0) {
      witness = witness.translated_mod1(frac_mul(pending, a));
      pending = 0;
    }
  }

  void push_rotations(std::int64_t m) {
    if (m <= 0) return;
    if (!blocks.empty() && blocks.back().first == 1)
      blocks.back().second += m;
    else
      blocks.push_back({1, m});
    pending += m;
  }

  // Smallest m >= 0 with frac(ref + m*a) strictly inside some window arc;
  // nullopt when the window holds no admissible grid point.
  std::optional<std::int64_t> try_hit_window(const Rational& ref, const RatArcUnion& window) const {
    if (window.empty()) return std::nullopt;
    __int128 lcm = a.den();
    bool overflow = false;
    auto lcm_with = [&lcm, &overflow](std::int64_t den) {
      const auto g = std::gcd(static_cast<std::int64_t>(lcm % den), den);
      lcm = lcm / (g == 0 ? den : g) * den;
      if (lcm > static_cast<__int128>(4000000000000000000LL)) overflow = true;
    };
    lcm_with(ref.den());
    for (const auto& arc : window.arcs()) {
      lcm_with(arc.first.den());
      lcm_with(arc.second.den());
    }
    if (overflow) throw Error(Err::Overflow, "positioning grid exceeds the integer range");
    const auto D = static_cast<std::int64_t>(lcm);

    auto scaled = [D](const Rational& r) { return r.num() * (D / r.den()); };
    const std::int64_t A = scaled(a) % D;
    const std::int64_t B = ((scaled(ref) % D) + D) % D;
    std::optional<std::int64_t> best;
    for (const auto& [lo, hi] : window.arcs()) {
      const std::int64_t L = scaled(lo) + 1;
      const std::int64_t R = scaled(hi) - 1;
      if (L > R) continue;
      const auto m = detail::min_hit(A, B, D, L, R);
      if (m && (!best || *m < *best)) best = m;
    }
    if (best && *best > rotation_cap) return std::nullopt;
    return best;
  }

  std::int64_t hit_window(const Rational& ref, const RatArcUnion& window, const char* what) const {
    const auto m = try_hit_window(ref, window);
    if (!m) fail(std::string("no admissible position in the window at ") + what);
    return *m;
  }

  // Rotates every tracked position by the first-hit block for ref in window.
  template <class... P>
  void rotate_into(const RatArcUnion& window, const char* what, Rational& ref, P&... pos) {
    const std::int64_t m = hit_window(ref, window, what);
    const Rational shift = frac_mul(m, a);
    ref = frac_mod1(ref + shift);
    ((pos = frac_mod1(pos + shift)), ...);
    push_rotations(m);
  }

  void cut(const char* context) {
    if (++cuts_used > cut_budget) fail(std::string("cut budget exhausted at ") + context);
    flush_witness();
    witness = image_of_set(T2, witness);
    blocks.push_back({2, 1});
  }

  void check_witness_inside(const RatArcUnion& hull, const char* context) {
    flush_witness();
    if (!hull.contains(witness))
      fail(std::string("internal invariant broken (witness escaped hull) at ") + context);
  }

  // Transactional state for retryable stage-2 round attempts. Rotations can
  // merge into the last pre-snapshot block, so its length is restored too.
  struct Snapshot {
    std::size_t block_count;
    std::int64_t last_block_len;
    std::int64_t cuts_used;
    std::int64_t pending;
    RatArcUnion witness;
  };

  Snapshot save() const {
    return {blocks.size(), blocks.empty() ? 0 : blocks.back().second, cuts_used, pending, witness};
  }

  void rollback(Snapshot snap) {
    blocks.resize(snap.block_count);
    if (!blocks.empty()) blocks.back().second = snap.last_block_len;
    cuts_used = snap.cuts_used;
    pending = snap.pending;
    witness = std::move(snap.witness);
  }
};

}  // namespace

ArcItineraryResult arc_itinerary(const Rational& rot_angle, const DoubleRotationQ& T2,
                                 const Rational& target_start, const Rational& target_len,
                                 std::int64_t rotation_budget, std::int64_t cut_budget) {
  T2.check();
  if (!(Rational(0) < target_len))
    throw Error(Err::InvalidArgument, "target arc must have positive length");

  ArcItineraryResult result;
  const RatArcUnion target = wrap_arc(target_start, kOne < target_len ? kOne : target_len);

  if (!(target_len < kOne)) {
    result.final_image = RatArcUnion::full_circle();
    result.verified = true;
    return result;
  }

  const Rational alpha = T2.alpha;
  const Rational beta = T2.beta;
  const Rational delta = T2.delta;
  if (beta.is_zero()) throw Error(Err::InvalidArgument, "T2 must have beta > 0");
  if (!rational_independence_1d(rot_angle, Rational(1), 1000).independent)
    throw Error(Err::InvalidArgument, "T1 angle fails the bounded irrationality check");

  // Geometric preconditions for the synthesis stages.
  const Rational margin = beta / Rational(8);
  if (!(beta < Rational(1, 3))) throw Error(Err::SynthesisFailed, "synthesis needs beta < 1/3");
  if (!(beta + margin < delta) || !(delta < kOne - beta - margin))
    throw Error(Err::SynthesisFailed, "delta too close to the branch edges for gap growth");
  // The rotation orbit and the beta walk must resolve windows of width ~len/8.
  const auto min_den = static_cast<std::int64_t>(64.0 / target_len.to_double()) + 1;
  if (rot_angle.den() < min_den)
    throw Error(Err::SynthesisFailed, "rotation grid too coarse for the requested target");
  if (beta.den() < std::max<std::int64_t>(min_den, static_cast<std::int64_t>(64.0 / beta.to_double())))
    throw Error(Err::SynthesisFailed, "beta grid too coarse for the requested target");

  Synth sy{rot_angle, T2, rotation_budget, cut_budget, {}, 0, 0, RatArcUnion::full_circle()};

  // ---- Stage 1: grow a single gap by beta per "(1...1) 2" block. ----
  sy.cut("initial gap");
  Rational gap_lo = frac_mod1(alpha);  // image of the circle misses [alpha, alpha+beta)
  Rational gap_len = beta;
  result.stage1_gap_trace.push_back(gap_len);
  sy.check_witness_inside(wrap_arc(gap_lo + gap_len, kOne - gap_len), "stage-1 entry");

  while (gap_len < kOne - Rational(2) * beta) {
    // Admissible gap start p in (max(1-g, delta+beta), min(1, 1-g+delta-beta)):
    // the gap then straddles 0, clear of the fold (delta-beta, delta+beta].
    Rational lo = kOne - gap_len;
    if (lo < delta + beta) lo = delta + beta;
    Rational hi = kOne - gap_len + delta - beta;
    if (kOne < hi) hi = kOne;
    if (!(lo < hi)) break;
    sy.rotate_into(open_window(lo, hi), "stage-1 gap", gap_lo);
    const Rational theta = kOne - gap_lo;  // portion of the gap below 0
    sy.cut("stage-1 growth");
    gap_lo = frac_mod1(alpha - theta);
    gap_len += beta;
    result.stage1_gap_trace.push_back(gap_len);
    sy.check_witness_inside(wrap_arc(gap_lo + gap_len, kOne - gap_len), "stage-1 growth");
  }

  // ---- Bridge: collapse the surviving arc [u, u+s) to length exactly beta.
  // Cutting it at w = delta - u in (s - beta, *) maps it onto an arc of
  // extent max(beta, w).
  Rational hull_start = frac_mod1(gap_lo + gap_len);
  Rational hull_len = kOne - gap_len;
  while (beta < hull_len) {
    const Rational s = hull_len;
    Rational w_hi = s - beta / Rational(4);
    if (delta - margin < w_hi) w_hi = delta - margin;
    // Keeps the bridged hull within 4beta/3 so the stage-2 closing window
    // stays inside [0,1).
    const Rational w_cap = beta * Rational(4, 3);
    if (w_cap < w_hi) w_hi = w_cap;
    const Rational w_lo = s - beta;
    if (!(w_lo < w_hi)) sy.fail("bridge window is empty");
    sy.rotate_into(open_window(delta - w_hi, delta - w_lo), "bridge arc", hull_start);
    const Rational w = delta - hull_start;
    sy.cut("bridge");
    ++result.bridge_blocks;
    if (w < beta) {
      hull_start = frac_mod1(delta + alpha);  // pieces join into [delta+alpha, ...+beta)
      hull_len = beta;
    } else {
      hull_start = frac_mod1(hull_start + alpha + beta);  // low piece leads, extent w
      hull_len = w;
    }
    sy.check_witness_inside(wrap_arc(hull_start, hull_len), "bridge");
  }
  // The gap trace records accretion milestones: the bridged hull ends at
  // exactly beta, so the final recorded gap is 1 - beta.
  result.stage1_gap_trace.push_back(kOne - hull_len);

  // ---- Stage 2: two-cluster contraction, factor <= 3/4 per round. ----
  // A solid arc of length exactly beta maps to extent beta under any cut at
  // delta, so the first round opens the hull at the wrap discontinuity: an
  // arc straddling 0 splits into two clusters with gap exactly beta whose
  // gap then walks by beta per cut until the clusters overlap. Later rounds
  // (hull < beta) can also open with a plain delta cut, which starts the
  // walk at beta - k instead; the alternative opening and both walk
  // directions serve as retries when a walk runs into an exactly adjacent
  // (solid) configuration, which happens when the alpha and beta grids share
  // denominators.
  const Rational contraction_goal = target_len * Rational(4, 5);
  while (!(hull_len < contraction_goal)) {
    const Rational k = hull_len;
    const Rational g_lo = beta - k * Rational(3, 4);
    const Rational g_hi = beta - k / Rational(4);

    // One full round attempt; returns the contracted hull or nullopt when the
    // walk reached a degenerate state (everything rolled back by the caller).
    auto attempt = [&](bool wrap_open, int dir,
                       std::int64_t* cuts) -> std::optional<std::pair<Rational, Rational>> {
      Rational hL, wL, hR, wR;
      Rational start = hull_start;
      if (wrap_open) {
        // Straddle 0 with both parts of width in (3k/8, 5k/8); delta stays
        // outside the hull because it is at least 9beta/8 from both edges.
        sy.rotate_into(open_window(kOne - k * Rational(5, 8), kOne - k * Rational(3, 8)),
                       "stage-2 opening cut", start);
        sy.cut("stage-2 open");
        // Upper part [u, 1) rides the high branch, wrapped part [0, u+k-1)
        // the low branch; the low piece slides beta ahead: gap exactly beta.
        hL = frac_mod1(start + alpha);
        wL = kOne - start;
        hR = frac_mod1(alpha + beta);
        wR = start + k - kOne;
      } else {
        // Plain delta cut (needs k < beta): the low piece overtakes by beta,
        // leaving a gap of beta - k between the translated parts.
        sy.rotate_into(open_window(delta - k * Rational(5, 8), delta - k * Rational(3, 8)),
                       "stage-2 opening cut", start);
        sy.cut("stage-2 open");
        hL = frac_mod1(delta + alpha);
        wL = start + k - delta;
        hR = frac_mod1(start + alpha + beta);
        wR = delta - start;
      }
      sy.check_witness_inside(unite(wrap_arc(hL, wL), wrap_arc(hR, wR)), "stage-2 open");

      // Walk the L->R gap g by +-beta. The round ends when g lands in the
      // closing window [beta - 3k/4, beta - k/4] (one more L-low cut then
      // overlaps the clusters into an arc <= 3k/4), or when a walk cut
      // already overlapped them (g past 1 - k), which still shrinks the
      // hull strictly.
      while (true) {
        const Rational g = frac_mod1(hR - hL - wL);
        if (kOne - k < g) break;  // clusters already overlap
        if (g.is_zero() || g == kOne - k) return std::nullopt;  // solid again
        if (!(g < g_lo) && !(g_hi < g)) {
          // Closing cut: L through the low branch, g -> g - beta (overlap).
          const RatArcUnion window =
              intersect(open_window(Rational(0), delta - wL),
                        open_window(delta - (g + wL), kOne - wR - (g + wL)));
          const auto m = sy.try_hit_window(hL, window);
          if (!m) return std::nullopt;
          const Rational shift = frac_mul(*m, sy.a);
          hL = frac_mod1(hL + shift);
          hR = frac_mod1(hR + shift);
          sy.push_rotations(*m);
          sy.cut("stage-2 close");
          ++*cuts;
          hL = frac_mod1(hL + alpha + beta);
          hR = frac_mod1(hR + alpha);
          break;
        }
        const bool send_r_low = dir > 0;  // R low: g += beta; L low: g -= beta
        const Rational g_rl = frac_mod1(hL - hR - wR);
        const RatArcUnion window =
            send_r_low ? intersect(open_window(Rational(0), delta - wR),
                                   open_window(delta - (g_rl + wR), kOne - wL - (g_rl + wR)))
                       : intersect(open_window(Rational(0), delta - wL),
                                   open_window(delta - (g + wL), kOne - wR - (g + wL)));
        const auto m = sy.try_hit_window(send_r_low ? hR : hL, window);
        if (!m) return std::nullopt;
        const Rational shift = frac_mul(*m, sy.a);
        hL = frac_mod1(hL + shift);
        hR = frac_mod1(hR + shift);
        sy.push_rotations(*m);
        sy.cut("stage-2 walk");
        ++*cuts;
        if (send_r_low) {
          hR = frac_mod1(hR + alpha + beta);
          hL = frac_mod1(hL + alpha);
        } else {
          hL = frac_mod1(hL + alpha + beta);
          hR = frac_mod1(hR + alpha);
        }
      }

      const auto hull = smallest_covering_arc(unite(wrap_arc(hL, wL), wrap_arc(hR, wR)));
      if (!(hull.second < k)) return std::nullopt;
      return hull;
    };

    bool progressed = false;
    for (const auto& [wrap_open, dir] :
         {std::pair<bool, int>{true, +1}, {false, +1}, {true, -1}, {false, -1}}) {
      if (!wrap_open && !(k < beta)) continue;  // delta opening needs k < beta
      const Synth::Snapshot snap = sy.save();
      std::int64_t cuts = 0;
      std::optional<std::pair<Rational, Rational>> hull;
      try {
        hull = attempt(wrap_open, dir, &cuts);
      } catch (const Error&) {
        hull.reset();
      }
      if (hull) {
        result.stage2_cuts += cuts;
        hull_start = hull->first;
        hull_len = hull->second;
        progressed = true;
        break;
      }
      sy.rollback(snap);
    }
    if (!progressed) sy.fail("every stage-2 round attempt hit a degenerate configuration");
    ++result.stage2_rounds;
    sy.check_witness_inside(wrap_arc(hull_start, hull_len), "stage-2 collapse");
  }

  // ---- Final placement: rotate the hull interior into the target arc. ----
  sy.rotate_into(open_window(target_start, target_start + target_len - hull_len), "final placement",
                 hull_start);

  // ---- Exact verification by replay. ----
  result.blocks = std::move(sy.blocks);
  for (const auto& [sym, count] : result.blocks) result.total_symbols += count;
  if (result.total_symbols <= 2000000) {
    result.symbols.reserve(static_cast<std::size_t>(result.total_symbols));
    for (const auto& [sym, count] : result.blocks)
      for (std::int64_t i = 0; i < count; ++i) result.symbols.push_back(sym);
  }
  result.final_image = replay_itinerary(rot_angle, T2, result.blocks);
  result.verified = target.contains(result.final_image);
  if (!result.verified)
    throw Error(Err::SynthesisFailed, "replay image escaped the target; synthesis invariant broken");
  return result;
}

RatArcUnion replay_itinerary(const Rational& rot_angle, const DoubleRotationQ& T2,
                             const ItineraryBlocks& blocks, std::int64_t arc_cap) {
  RatArcUnion image = RatArcUnion::full_circle();
  for (const auto& [sym, count] : blocks) {
    if (count < 0) throw Error(Err::InvalidArgument, "negative itinerary block");
    if (sym == 1) {
      image = image.translated_mod1(frac_mul(count, rot_angle));
    } else if (sym == 2) {
      for (std::int64_t i = 0; i < count; ++i) {
        image = image_of_set(T2, image);
        if (static_cast<std::int64_t>(image.size()) > arc_cap)
          throw Error(Err::ArcExplosion, "arc count exceeded the configured cap");
      }
    } else {
      throw Error(Err::InvalidArgument, "itinerary symbols must be 1 or 2");
    }
  }
  return image;
}

RatArcUnion replay_itinerary(const Rational& rot_angle, const DoubleRotationQ& T2,
                             const Itinerary& symbols, std::int64_t arc_cap) {
  ItineraryBlocks blocks;
  for (const std::int32_t s : symbols) {
    if (!blocks.empty() && blocks.back().first == s)
      ++blocks.back().second;
    else
      blocks.push_back({s, 1});
  }
  return replay_itinerary(rot_angle, T2, blocks, arc_cap);
}

}  // namespace pwt
