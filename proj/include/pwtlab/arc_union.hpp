#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pwtlab/error.hpp"
#include "pwtlab/rational.hpp"

namespace pwt {

// Finite union of disjoint half-open arcs [a, b), kept sorted, merged and
// non-empty. Doubles as the line-segment set (no wrap) and the circle set
// (all arcs inside [0,1), mod-1 ops available). With S = Rational every
// operation is exact; with S = double it is the obvious floating version.
template <class S>
class ArcUnion {
 public:
  using Arc = std::pair<S, S>;

  ArcUnion() = default;

  static ArcUnion from_arcs(std::vector<Arc> raw) {
    ArcUnion u;
    u.assign(std::move(raw));
    return u;
  }

  static ArcUnion empty_set() { return ArcUnion(); }

  static ArcUnion segment(const S& a, const S& b) {
    ArcUnion u;
    if (a < b) {
      u.arcs_.push_back({a, b});
      u.total_ = b - a;
    }
    return u;
  }

  static ArcUnion full_circle() { return segment(S(0), S(1)); }

  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t size() const { return arcs_.size(); }
  bool empty() const { return arcs_.empty(); }
  const S& measure() const { return total_; }

  bool contains_point(const S& x) const {
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), x,
                               [](const S& v, const Arc& a) { return v < a.first; });
    if (it == arcs_.begin()) return false;
    --it;
    return x >= it->first && x < it->second;
  }

  // True iff other is a subset of *this.
  bool contains(const ArcUnion& other) const {
    std::size_t i = 0;
    for (const Arc& b : other.arcs_) {
      while (i < arcs_.size() && !(b.first < arcs_[i].second)) ++i;
      if (i == arcs_.size()) return false;
      if (b.first < arcs_[i].first || arcs_[i].second < b.second) return false;
    }
    return true;
  }

  friend bool operator==(const ArcUnion& a, const ArcUnion& b) { return a.arcs_ == b.arcs_; }
  friend bool operator!=(const ArcUnion& a, const ArcUnion& b) { return !(a == b); }

  // Line translation, no wrap.
  ArcUnion translated(const S& t) const {
    ArcUnion u;
    u.arcs_.reserve(arcs_.size());
    for (const Arc& a : arcs_) u.arcs_.push_back({a.first + t, a.second + t});
    u.total_ = total_;
    return u;
  }

  // Circle translation: every arc shifted by t mod 1, wrap-split at 1.
  // Preserves measure exactly in rational mode. Requires a circle set.
  ArcUnion translated_mod1(const S& t) const {
    require_circle();
    const S s = frac_mod1(t);
    std::vector<Arc> out;
    out.reserve(arcs_.size() + 1);
    const S one(1);
    for (const Arc& a : arcs_) {
      S lo = a.first + s;
      S hi = a.second + s;
      if (hi <= one) {
        out.push_back({lo, hi});
      } else if (lo >= one) {
        out.push_back({lo - one, hi - one});
      } else {
        out.push_back({lo, one});
        out.push_back({S(0), hi - one});
      }
    }
    return from_arcs(std::move(out));
  }

  ArcUnion complement_on_circle() const {
    require_circle();
    std::vector<Arc> out;
    S prev(0);
    for (const Arc& a : arcs_) {
      if (prev < a.first) out.push_back({prev, a.first});
      prev = a.second;
    }
    if (prev < S(1)) out.push_back({prev, S(1)});
    return from_arcs(std::move(out));
  }

  friend ArcUnion unite(const ArcUnion& a, const ArcUnion& b) {
    std::vector<Arc> raw;
    raw.reserve(a.arcs_.size() + b.arcs_.size());
    raw.insert(raw.end(), a.arcs_.begin(), a.arcs_.end());
    raw.insert(raw.end(), b.arcs_.begin(), b.arcs_.end());
    return from_arcs(std::move(raw));
  }

  friend ArcUnion intersect(const ArcUnion& a, const ArcUnion& b) {
    std::vector<Arc> out;
    std::size_t i = 0, j = 0;
    while (i < a.arcs_.size() && j < b.arcs_.size()) {
      const S lo = std::max(a.arcs_[i].first, b.arcs_[j].first);
      const S hi = std::min(a.arcs_[i].second, b.arcs_[j].second);
      if (lo < hi) out.push_back({lo, hi});
      if (a.arcs_[i].second < b.arcs_[j].second)
        ++i;
      else
        ++j;
    }
    ArcUnion u;
    u.assign_presorted(std::move(out));
    return u;
  }

  friend ArcUnion subtract(const ArcUnion& a, const ArcUnion& b) {
    std::vector<Arc> out;
    std::size_t j = 0;
    for (const Arc& arc : a.arcs_) {
      S cur = arc.first;
      // b-arcs ending at or before this a-arc can never matter again.
      while (j < b.arcs_.size() && !(arc.first < b.arcs_[j].second)) ++j;
      std::size_t k = j;
      while (k < b.arcs_.size() && b.arcs_[k].first < arc.second) {
        if (cur < b.arcs_[k].first) out.push_back({cur, b.arcs_[k].first});
        if (cur < b.arcs_[k].second) cur = b.arcs_[k].second;
        ++k;
      }
      if (cur < arc.second) out.push_back({cur, arc.second});
    }
    ArcUnion u;
    u.assign_presorted(std::move(out));
    return u;
  }

 private:
  void require_circle() const {
    if (!arcs_.empty() && (arcs_.front().first < S(0) || S(1) < arcs_.back().second))
      throw Error(Err::InvalidArgument, "circle operation on a set outside [0,1)");
  }

  void assign(std::vector<Arc> raw) {
    raw.erase(std::remove_if(raw.begin(), raw.end(), [](const Arc& a) { return !(a.first < a.second); }),
              raw.end());
    std::sort(raw.begin(), raw.end());
    std::vector<Arc> merged;
    merged.reserve(raw.size());
    for (const Arc& a : raw) {
      if (!merged.empty() && !(merged.back().second < a.first)) {
        if (merged.back().second < a.second) merged.back().second = a.second;
      } else {
        merged.push_back(a);
      }
    }
    assign_presorted(std::move(merged));
  }

  // Input already sorted, disjoint, non-adjacent would still merge; callers
  // from intersect/subtract produce sorted non-overlapping arcs but may leave
  // adjacent pairs, so merge adjacency here too.
  void assign_presorted(std::vector<Arc> arcs) {
    std::vector<Arc> merged;
    merged.reserve(arcs.size());
    for (const Arc& a : arcs) {
      if (!(a.first < a.second)) continue;
      if (!merged.empty() && !(merged.back().second < a.first)) {
        if (merged.back().second < a.second) merged.back().second = a.second;
      } else {
        merged.push_back(a);
      }
    }
    arcs_ = std::move(merged);
    total_ = S(0);
    for (const Arc& a : arcs_) total_ += a.second - a.first;
  }

  std::vector<Arc> arcs_;
  S total_{};
};

using RatArcUnion = ArcUnion<Rational>;

// Shortest arc [start, start+len) mod 1 covering the whole circle set; len = 0
// for the empty set and 1 when no single proper arc works. The cover is the
// complement of the longest gap, where the gap through 0 counts as one gap.
template <class S>
std::pair<S, S> smallest_covering_arc(const ArcUnion<S>& u) {
  if (u.empty()) return {S(0), S(0)};
  const ArcUnion<S> comp = u.complement_on_circle();
  if (comp.empty()) return {S(0), S(1)};
  const auto& gaps = comp.arcs();
  S best_start = gaps.front().second;
  S best_len = gaps.front().second - gaps.front().first;
  for (const auto& g : gaps) {
    const S len = g.second - g.first;
    if (best_len < len) {
      best_len = len;
      best_start = g.second;
    }
  }
  // A gap ending at 1 and a gap starting at 0 join into one gap through 0.
  const bool touch_lo = !(S(0) < gaps.front().first);
  const bool touch_hi = !(gaps.back().second < S(1));
  if (touch_lo && touch_hi && gaps.size() >= 2) {
    const S wrap_len = (S(1) - gaps.back().first) + gaps.front().second;
    if (best_len < wrap_len) {
      best_len = wrap_len;
      best_start = gaps.front().second;
    }
  }
  return {frac_mod1(best_start), S(1) - best_len};
}

}  // namespace pwt
