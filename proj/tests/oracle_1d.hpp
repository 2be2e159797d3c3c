#pragma once

// Independent brute-force oracle for exact 1D forward images: with rational
// cuts and vectors, every orbit lives on the lattice of cells of width 1/D
// (D = lcm of all denominators), so the image dynamics is a bitset map.
// Deliberately shares nothing with the interval-union engine it checks.

#include <cstdint>
#include <numeric>
#include <vector>

#include "pwtlab/arc_union.hpp"
#include "pwtlab/pwt_map.hpp"

namespace oracle {

struct LatticeRun {
  std::int64_t iterations = 0;  // smallest n >= 1 with Omega_n == Omega_{n+1}
  pwt::RatArcUnion attractor;
};

inline LatticeRun lattice_oracle(const pwt::Map1D<pwt::Rational>& map, std::int64_t n_cap = 1 << 22) {
  using pwt::Rational;
  std::int64_t D = 1;
  for (const auto& c : map.cuts) D = std::lcm(D, c.den());
  for (const auto& v : map.vectors) D = std::lcm(D, v.den());

  auto scaled = [D](const Rational& r) { return r.num() * (D / r.den()); };
  const std::int64_t base = scaled(map.cuts.front());
  const std::int64_t cells = scaled(map.cuts.back()) - base;

  // Piece of cell j = [base+j, base+j+1)/D and its integer shift.
  std::vector<std::int64_t> shift(static_cast<std::size_t>(cells));
  {
    std::size_t piece = 0;
    for (std::int64_t j = 0; j < cells; ++j) {
      while (scaled(map.cuts[piece + 1]) <= base + j) ++piece;
      shift[static_cast<std::size_t>(j)] = scaled(map.vectors[piece]);
    }
  }

  std::vector<std::uint8_t> cur(static_cast<std::size_t>(cells), 1);
  std::vector<std::uint8_t> next(static_cast<std::size_t>(cells), 0);
  LatticeRun out;
  for (std::int64_t n = 1; n <= n_cap; ++n) {
    std::fill(next.begin(), next.end(), 0);
    for (std::int64_t j = 0; j < cells; ++j)
      if (cur[static_cast<std::size_t>(j)]) next[static_cast<std::size_t>(j + shift[static_cast<std::size_t>(j)])] = 1;
    if (n >= 2 && next == cur) {
      out.iterations = n - 1;
      break;
    }
    cur.swap(next);
  }

  std::vector<std::pair<Rational, Rational>> arcs;
  std::int64_t run_start = -1;
  for (std::int64_t j = 0; j <= cells; ++j) {
    const bool on = j < cells && cur[static_cast<std::size_t>(j)];
    if (on && run_start < 0) run_start = j;
    if (!on && run_start >= 0) {
      arcs.push_back({Rational(base + run_start, D), Rational(base + j, D)});
      run_start = -1;
    }
  }
  out.attractor = pwt::RatArcUnion::from_arcs(std::move(arcs));
  return out;
}

// Random valid 2-branch 1D map with all denominators <= max_den.
inline pwt::Map1D<pwt::Rational> random_two_branch(pwt::Rng& rng, std::int64_t max_den) {
  using pwt::Rational;
  for (;;) {
    const std::int64_t qc = rng.uniform_int(2, max_den);
    const std::int64_t qv = rng.uniform_int(2, max_den);
    const std::int64_t qw = rng.uniform_int(2, max_den);
    const Rational c(rng.uniform_int(1, qc - 1), qc);
    const Rational v0(rng.uniform_int(1, qv - 1), qv);
    const Rational v1(-rng.uniform_int(1, qw - 1), qw);
    if (!(Rational(0) < c) || !(c < Rational(1))) continue;
    if (!(v0 <= Rational(1) - c)) continue;
    if (!(Rational(0) - c <= v1)) continue;
    pwt::Map1D<Rational> m{{Rational(0), c, Rational(1)}, {v0, v1}};
    if (m.maps_into_domain()) return m;
  }
}

}  // namespace oracle
