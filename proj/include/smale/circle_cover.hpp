// Covering a finite subset of the circle R/Z by equal-length open intervals
// whose complementary gaps stay long relative to the interval length. The
// construction collapses clusters of nearby points, solves the quotient
// circle recursively, pulls intervals back and enlarges them to a common
// length. Everything runs in exact rational arithmetic and the three
// postconditions are re-verified before returning.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "smale/common.hpp"

namespace smale {

using Rational = boost::multiprecision::cpp_rational;

inline Rational rational_pow(Rational base, int exp) {
  Rational r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline Rational rational_mod1(Rational x) {
  using boost::multiprecision::cpp_int;
  cpp_int n = numerator(x), d = denominator(x);
  cpp_int q = n / d;
  if (n < 0 && q * d != n) q -= 1;  // floor division
  return x - Rational(q);
}

// Exact dyadic value of a double.
inline Rational rational_from_double(double x) {
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [1/2, 1)
  auto mant = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mant);
  int shift = exp - 53;
  Rational two(2);
  while (shift > 0) {
    r *= two;
    --shift;
  }
  while (shift < 0) {
    r /= two;
    ++shift;
  }
  return r;
}

// Accepts "p/q", integers, and plain decimals ("0.125"), all parsed exactly.
inline Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational num(s.substr(0, slash));
    Rational den(s.substr(slash + 1));
    if (den == 0) throw Error("ParseError", "zero denominator in '" + s + "'");
    return num / den;
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    int frac = static_cast<int>(s.size() - dot - 1);
    bool neg = !digits.empty() && digits[0] == '-';
    if (neg) digits.erase(digits.begin());
    // strip leading zeros; "0xyz" would otherwise read as octal
    size_t nz = digits.find_first_not_of('0');
    digits = (nz == std::string::npos) ? "0" : digits.substr(nz);
    Rational num(digits);
    if (neg) num = -num;
    Rational den = rational_pow(10, frac);
    return num / den;
  }
  return Rational(s);
}

struct CircleArc {
  Rational start;  // in [0,1)
  Rational length;
  bool contains_strict(const Rational& p) const {
    Rational rel = rational_mod1(p - start);
    return rel > 0 && rel < length;
  }
};

struct CircleCover {
  Rational kappa;
  std::vector<CircleArc> intervals;
  std::vector<Rational> points;  // the input X, deduplicated mod 1
  Rational a;
  int depth = 0;  // recursion depth used

  Rational lower_bracket() const {
    int d = static_cast<int>(points.size());
    return rational_pow(a / 2, d) / rational_pow(Rational(d), 2 * d);
  }
};

namespace detail_cover {

struct CoreResult {
  Rational kappa;
  std::vector<Rational> starts;  // interval starts on the (sub)circle [0,1)
  int depth = 1;
};

// Covers sorted points in [0,1) (first point at 0) on the unit circle.
inline CoreResult cover_core(const std::vector<Rational>& pts, const Rational& a) {
  int d = static_cast<int>(pts.size());
  Rational ell = rational_pow(a / 2, d) / rational_pow(Rational(d), 2 * d);
  CoreResult res;

  if (d == 1) {
    res.kappa = a / 2;
    res.starts = {rational_mod1(pts[0] - res.kappa / 2)};
    return res;
  }

  // Cyclic arcs between consecutive points.
  std::vector<Rational> arc(d);
  for (int i = 0; i < d; ++i) {
    Rational next = (i + 1 < d) ? pts[i + 1] : pts[0] + 1;
    arc[i] = next - pts[i];
  }
  Rational thr = (1 + 1 / a) * ell;
  Rational min_arc = arc[0];
  for (const auto& g : arc) min_arc = std::min(min_arc, g);

  if (min_arc > thr) {
    res.kappa = ell;
    for (const auto& p : pts) res.starts.push_back(rational_mod1(p - ell / 2));
    return res;
  }

  if (d == 2) {
    // Collapse the short arc; one interval covers the cluster. The long arc
    // exceeds the threshold because the two arcs sum to 1.
    int short_i = arc[0] <= arc[1] ? 0 : 1;
    Rational delta = arc[short_i];
    Rational mid = rational_mod1(pts[short_i] + delta / 2);
    res.kappa = delta + ell;
    res.starts = {rational_mod1(mid - res.kappa / 2)};
    return res;
  }

  // Collapse every arc not exceeding the threshold; chains of short arcs
  // merge transitively into clusters.
  std::vector<bool> short_arc(d);
  for (int i = 0; i < d; ++i) short_arc[i] = arc[i] <= thr;
  int start_pt = -1;
  for (int i = 0; i < d; ++i) {
    int prev = (i + d - 1) % d;
    if (!short_arc[prev]) {
      start_pt = i;
      break;
    }
  }
  // At least one long arc exists: the short ones sum to < 1.

  struct Cluster {
    Rational quotient_coord;  // on the collapsed circle, origin at cluster 0
    Rational first_original;  // unrolled original coordinate of first point
    Rational collapsed_len;   // total length of arcs removed inside it
  };
  std::vector<Cluster> clusters;
  Rational removed = 0;  // collapsed length seen so far along the walk
  {
    // The arc entering start_pt is long, so no cluster wraps around.
    Rational unrolled = pts[start_pt];
    int pos = 0;
    while (pos < d) {
      Cluster c;
      c.first_original = unrolled;
      c.quotient_coord = unrolled - pts[start_pt] - removed;
      c.collapsed_len = 0;
      int idx = (start_pt + pos) % d;
      while (pos + 1 < d && short_arc[idx]) {
        c.collapsed_len += arc[idx];
        removed += arc[idx];
        unrolled += arc[idx];
        ++pos;
        idx = (start_pt + pos) % d;
      }
      clusters.push_back(c);
      if (pos + 1 < d) unrolled += arc[idx];  // cross the long trailing arc
      ++pos;
    }
  }
  Rational total_removed = 0;
  for (const auto& c : clusters) total_removed += c.collapsed_len;
  Rational L = 1 - total_removed;

  std::vector<Rational> quotient_pts;
  for (const auto& c : clusters) quotient_pts.push_back(c.quotient_coord / L);

  Rational a_prime = a * Rational(d - 2) / Rational(d - 1);
  CoreResult sub = cover_core(quotient_pts, a_prime);
  res.depth = sub.depth + 1;

  res.kappa = sub.kappa * L + Rational(d - 1) * thr;

  // Pull each quotient interval back: rescale, reinsert collapsed arcs that
  // fall inside, then enlarge symmetrically to the common length.
  for (const auto& s : sub.starts) {
    Rational y1 = rational_mod1(s) * L;  // on the collapsed circle [0, L)
    Rational y2 = y1 + sub.kappa * L;    // may pass L (interval wraps)
    // Insertions strictly before y1 fix the start; insertions inside the
    // cyclic span [y1, y2] stretch the pulled-back interval.
    Rational before = 0, inside = 0;
    for (const auto& c : clusters) {
      const Rational& v = c.quotient_coord;
      if (v < y1) before += c.collapsed_len;
      if ((v >= y1 && v <= y2) || (v + L >= y1 && v + L <= y2)) inside += c.collapsed_len;
    }
    Rational orig_start = pts[start_pt] + y1 + before;
    Rational len = (y2 - y1) + inside;
    Rational pad = (res.kappa - len) / 2;
    res.starts.push_back(rational_mod1(orig_start - pad));
  }
  return res;
}

}  // namespace detail_cover

// Verifies the three postconditions exactly; returns a reason on failure.
inline std::optional<std::string> verify_cover(const CircleCover& c) {
  int d = static_cast<int>(c.points.size());
  Rational lo = c.lower_bracket();
  if (c.kappa < lo || c.kappa > c.a / 2) return "kappa outside bracket";
  for (const auto& iv : c.intervals)
    if (iv.length != c.kappa) return "unequal interval length";
  for (const auto& p : c.points) {
    bool covered = false;
    for (const auto& iv : c.intervals) covered = covered || iv.contains_strict(p);
    if (!covered) return "point not covered";
  }
  // Complement gaps: sort starts cyclically and measure the holes.
  std::vector<Rational> starts;
  for (const auto& iv : c.intervals) starts.push_back(rational_mod1(iv.start));
  std::sort(starts.begin(), starts.end());
  int m = static_cast<int>(starts.size());
  for (int i = 0; i < m; ++i) {
    Rational next = (i + 1 < m) ? starts[i + 1] : starts[0] + 1;
    Rational gap = next - (starts[i] + c.kappa);
    if (m == 1) gap = 1 - c.kappa;
    if (gap <= 0) return "intervals overlap";
    if (gap * c.a <= c.kappa) return "gap not larger than kappa/a";
  }
  (void)d;
  return std::nullopt;
}

inline CircleCover cover_circle(std::vector<Rational> X, const Rational& a) {
  if (X.empty()) throw Error("InvalidArgument", "X must be nonempty");
  if (!(a > 0 && a < Rational(1, 2)))
    throw Error("InvalidArgument", "a must lie in (0, 1/2)");
  for (auto& p : X) p = rational_mod1(p);
  std::sort(X.begin(), X.end());
  X.erase(std::unique(X.begin(), X.end()), X.end());
  int d = static_cast<int>(X.size());

  // Rotation-normalized frame: anchor at the point whose cyclic gap sequence,
  // starting with the gap before it, is lexicographically maximal. Ties only
  // occur for rotation-symmetric configurations, where any choice agrees.
  std::vector<Rational> gap(d);
  for (int i = 0; i < d; ++i) {
    Rational next = (i + 1 < d) ? X[i + 1] : X[0] + 1;
    gap[i] = next - X[i];
  }
  int anchor = 0;
  auto seq_less = [&](int i, int j) {
    for (int k = 0; k < d; ++k) {
      const Rational& gi = gap[(i + d - 1 + k) % d];
      const Rational& gj = gap[(j + d - 1 + k) % d];
      if (gi != gj) return gi < gj;
    }
    return false;
  };
  for (int i = 1; i < d; ++i)
    if (seq_less(anchor, i)) anchor = i;

  std::vector<Rational> anchored(d);
  for (int i = 0; i < d; ++i) anchored[i] = rational_mod1(X[(anchor + i) % d] - X[anchor]);
  std::sort(anchored.begin(), anchored.end());

  auto core = detail_cover::cover_core(anchored, a);
  CircleCover cover;
  cover.kappa = core.kappa;
  cover.a = a;
  cover.points = X;
  cover.depth = core.depth;
  for (const auto& s : core.starts)
    cover.intervals.push_back({rational_mod1(s + X[anchor]), core.kappa});
  if (auto why = verify_cover(cover))
    throw Error("PostconditionViolated", *why);
  return cover;
}

}  // namespace smale
