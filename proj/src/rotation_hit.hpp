#pragma once

// Exact first-hit computation for circle rotations on a rational grid:
// the smallest m >= 0 with (A*m + B) mod M inside an integer range, found by
// counting hits below a trial index with floor sums and binary searching.
// Everything fits signed 128-bit for M up to ~1e15.

#include <cstdint>
#include <optional>

namespace pwt::detail {

using i64 = std::int64_t;
using i128 = __int128;

// sum_{i=0}^{n-1} floor((a*i + b) / m), any-sign a and b, m > 0.
inline i128 floor_sum(i128 n, i128 m, i128 a, i128 b) {
  i128 ans = 0;
  if (a < 0) {
    const i128 a2 = a % m + m;
    ans -= n * (n - 1) / 2 * ((a2 - a) / m);
    a = a2;
  }
  if (b < 0) {
    const i128 b2 = b % m + m;
    ans -= n * ((b2 - b) / m);
    b = b2;
  }
  for (;;) {
    if (a >= m) {
      ans += n * (n - 1) / 2 * (a / m);
      a %= m;
    }
    if (b >= m) {
      ans += n * (b / m);
      b %= m;
    }
    const i128 y_max = a * n + b;
    if (y_max < m) break;
    n = y_max / m;
    b = y_max % m;
    const i128 t = m;
    m = a;
    a = t;
  }
  return ans;
}

// #{ i in [0, n) : (A*i + B) mod M <= T }, with 0 <= T < M.
inline i128 count_le(i128 n, i128 M, i128 A, i128 B, i128 T) {
  return floor_sum(n, M, A, B) - floor_sum(n, M, A, B - T - 1);
}

// Smallest m >= 0 with (A*m + B) mod M in [lo, hi] (0 <= lo <= hi < M);
// nullopt when no such m exists in a full period.
inline std::optional<i64> min_hit(i64 A, i64 B, i64 M, i64 lo, i64 hi) {
  if (M <= 0 || lo < 0 || hi < lo || hi >= M) return std::nullopt;
  A %= M;
  if (A < 0) A += M;
  B %= M;
  if (B < 0) B += M;
  if (B >= lo && B <= hi) return 0;
  if (A == 0) return std::nullopt;

  auto hits_below = [&](i128 x) -> i128 {
    i128 c = count_le(x, M, A, B, hi);
    if (lo > 0) c -= count_le(x, M, A, B, lo - 1);
    return c;
  };
  if (hits_below(M) == 0) return std::nullopt;  // period is M / gcd; M covers it
  i128 good = M, bad = 0;  // hits_below(good) >= 1, hits_below(bad) == 0
  while (good - bad > 1) {
    const i128 mid = bad + (good - bad) / 2;
    if (hits_below(mid) >= 1)
      good = mid;
    else
      bad = mid;
  }
  return static_cast<i64>(good - 1);
}

}  // namespace pwt::detail
