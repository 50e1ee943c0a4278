// Shared basics: error type, deterministic seed splitting, directed
// rounding and axis-aligned boxes used by the interval computations.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smale {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// -------------------------------------------------------------------------
// Deterministic seed derivation. Sub-seeds are obtained in counter mode from
// the master seed so that parallel or reordered trials see identical streams.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t split_seed(std::uint64_t master, std::string_view tag,
                                std::uint64_t counter = 0) {
  return splitmix64(splitmix64(master ^ fnv1a(tag)) ^ counter);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view tag,
                                std::uint64_t counter = 0) {
  return std::mt19937_64(split_seed(master, tag, counter));
}

// -------------------------------------------------------------------------
// Directed rounding.

inline double round_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double round_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

// Closed interval with outward/inward rounded affine images.
struct Interval {
  double lo = 0.0, hi = 0.0;

  bool empty() const { return lo > hi; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

  Interval intersect(const Interval& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
  Interval hull(const Interval& o) const {
    return {std::min(lo, o.lo), std::max(hi, o.hi)};
  }
  // Plain image under x -> a*x + b with a > 0.
  Interval affine(double a, double b) const { return {a * lo + b, a * hi + b}; }
  // Outward-rounded image under x -> a*x + b with a > 0.
  Interval affine_out(double a, double b) const {
    return {round_down(a * lo + b), round_up(a * hi + b)};
  }
  // Inward-rounded image (certifies containment of the true image).
  Interval affine_in(double a, double b) const {
    return {round_up(a * lo + b), round_down(a * hi + b)};
  }
  Interval inflate(double eps) const { return {lo - eps, hi + eps}; }
};

// Axis-aligned box, one Interval per coordinate.
struct Box {
  std::vector<Interval> axes;

  Box() = default;
  explicit Box(int dim) : axes(dim) {}
  static Box unit(int dim) {
    Box b(dim);
    for (auto& a : b.axes) a = {0.0, 1.0};
    return b;
  }
  static Box centered_unit(int dim) {
    Box b(dim);
    for (auto& a : b.axes) a = {-0.5, 0.5};
    return b;
  }
  int dim() const { return static_cast<int>(axes.size()); }
  bool empty() const {
    for (const auto& a : axes)
      if (a.empty()) return true;
    return axes.empty();
  }
  bool contains(const Box& o) const {
    for (int i = 0; i < dim(); ++i)
      if (!axes[i].contains(o.axes[i])) return false;
    return true;
  }
  bool contains_point(const Vec& p) const {
    for (int i = 0; i < dim(); ++i)
      if (!axes[i].contains(p[i])) return false;
    return true;
  }
  bool intersects(const Box& o) const {
    for (int i = 0; i < dim(); ++i)
      if (!axes[i].intersects(o.axes[i])) return false;
    return true;
  }
  double max_width() const {
    double w = 0.0;
    for (const auto& a : axes) w = std::max(w, a.width());
    return w;
  }
  Vec midpoint() const {
    Vec m(dim());
    for (int i = 0; i < dim(); ++i) m[i] = axes[i].mid();
    return m;
  }
};

inline double sup_norm(const Vec& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace smale
