// Locally constant linear cocycles over subshifts: exponent estimation by
// orthonormalized products, holonomies as stabilizing partial products,
// fiber-bunching and pinching/bunching inequalities, the decision procedure
// for measures on projective space invariant under a pair of matrices, and
// a stationary-cloud probe.
#pragma once

#include <Eigen/Eigenvalues>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smale/common.hpp"
#include "smale/subshift.hpp"

namespace smale {

class LocallyConstantCocycle {
 public:
  LocallyConstantCocycle(SubshiftOfFiniteType base, int l, int r, int dim)
      : base_(std::move(base)), l_(l), r_(r), dim_(dim) {
    if (l_ > 0 || r_ < 0) throw Error("InvalidArgument", "window must satisfy l <= 0 <= r");
  }

  static LocallyConstantCocycle constant(SubshiftOfFiniteType base, const Mat& A) {
    LocallyConstantCocycle c(std::move(base), 0, 0, static_cast<int>(A.rows()));
    for (Symbol s = 0; s < c.base_.alphabet_size(); ++s) c.values_[{s}] = A;
    return c;
  }
  static LocallyConstantCocycle from_symbol_map(SubshiftOfFiniteType base,
                                                const std::vector<Mat>& by_symbol) {
    LocallyConstantCocycle c(std::move(base), 0, 0, static_cast<int>(by_symbol[0].rows()));
    for (Symbol s = 0; s < c.base_.alphabet_size(); ++s) c.values_[{s}] = by_symbol[s];
    return c;
  }

  const SubshiftOfFiniteType& base() const { return base_; }
  int window_l() const { return l_; }
  int window_r() const { return r_; }
  int window_len() const { return r_ - l_ + 1; }
  int dim() const { return dim_; }

  void set_value(const Word& cylinder, Mat A) {
    if (static_cast<int>(cylinder.size()) != window_len())
      throw Error("InvalidArgument", "cylinder word length mismatch");
    values_[cylinder] = std::move(A);
  }
  const std::map<Word, Mat>& values() const { return values_; }

  // Every admissible cylinder must carry an invertible value. Returns the
  // worst condition number seen.
  double validate() const {
    auto words = base_.admissible_words(window_len());
    double worst = 1.0;
    for (const auto& w : words) {
      auto it = values_.find(w);
      if (it == values_.end())
        throw Error("InvalidModel", "missing cocycle value on cylinder " + word_to_string(w));
      Eigen::JacobiSVD<Mat> svd(it->second);
      double smin = svd.singularValues().minCoeff();
      double smax = svd.singularValues().maxCoeff();
      if (!(smin > 0)) throw Error("InvalidModel", "singular cocycle value");
      worst = std::max(worst, smax / smin);
    }
    return worst;
  }

  // A(sigma^n x): depends on coordinates n + l .. n + r.
  const Mat& value_at(const SymbolicPoint& x, long n) const {
    Word w(window_len());
    for (int i = 0; i < window_len(); ++i) w[i] = x.at(n + l_ + i);
    auto it = values_.find(w);
    if (it == values_.end())
      throw Error("InvalidModel", "missing cocycle value on cylinder " + word_to_string(w));
    return it->second;
  }

  // Value from a raw symbol block s[t + l .. t + r] within a sampled path
  // whose index 0 corresponds to coordinate `origin`.
  const Mat& value_from_path(const std::vector<Symbol>& path, long origin, long t) const {
    Word w(window_len());
    for (int i = 0; i < window_len(); ++i) w[i] = path[t + l_ + i - origin];
    return values_.at(w);
  }

  bool all_values_diagonal(double tol = 0.0) const {
    for (const auto& [w, A] : values_) {
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          if (i != j && std::abs(A(i, j)) > tol) return false;
    }
    return true;
  }

 private:
  SubshiftOfFiniteType base_;
  int l_, r_, dim_;
  std::map<Word, Mat> values_;
};

// -------------------------------------------------------------------------
// Lyapunov exponents by repeated orthonormalization along sampled orbits.

struct LyapunovReport {
  std::vector<double> exponents;        // sorted descending
  std::vector<double> standard_errors;  // matching order
  std::optional<std::vector<double>> exact;  // closed form for diagonal cocycles
  int orbits = 0;
  int orbit_len = 0;
};

inline LyapunovReport lyapunov_exponents(const LocallyConstantCocycle& coc,
                                         const ParryMeasure& mu, int n_orbits, int orbit_len,
                                         std::uint64_t seed) {
  if (orbit_len < 10 * coc.dim())
    throw Error("InvalidArgument", "orbit length must be at least 10 d");
  int d = coc.dim();
  const auto& sft = coc.base();
  LyapunovReport rep;
  rep.orbits = n_orbits;
  rep.orbit_len = orbit_len;

  std::vector<std::vector<double>> per_orbit(n_orbits);
  for (int o = 0; o < n_orbits; ++o) {
    auto rng = make_rng(seed, "lyapunov-orbit", o);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // sample a stationary chain covering coordinates l .. orbit_len - 1 + r
    long origin = coc.window_l();
    long need = orbit_len - 1 + coc.window_r() - origin + 1;
    std::vector<Symbol> path(need);
    {
      double u = unif(rng);
      Symbol s = 0;
      double acc = 0.0;
      for (int i = 0; i < sft.alphabet_size(); ++i) {
        acc += mu.stationary[i];
        if (u <= acc) {
          s = i;
          break;
        }
        s = i;
      }
      path[0] = s;
      for (long t = 1; t < need; ++t) {
        double v = unif(rng);
        double a = 0.0;
        Symbol nx = path[t - 1];
        for (int i = 0; i < sft.alphabet_size(); ++i) {
          a += mu.transition_probs(path[t - 1], i);
          if (v <= a) {
            nx = i;
            break;
          }
          nx = i;
        }
        path[t] = nx;
      }
    }
    Mat Q = Mat::Identity(d, d);
    std::vector<double> sums(d, 0.0);
    for (long t = 0; t < orbit_len; ++t) {
      Mat M = coc.value_from_path(path, origin, t) * Q;
      Eigen::HouseholderQR<Mat> qr(M);
      Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
      Q = qr.householderQ();
      for (int i = 0; i < d; ++i) {
        double rii = R(i, i);
        if (std::abs(rii) < 1e-300)
          throw Error("Degenerate", "orthonormalization collapsed");
        if (rii < 0) Q.col(i) = -Q.col(i);
        sums[i] += std::log(std::abs(rii));
      }
    }
    for (int i = 0; i < d; ++i) sums[i] /= orbit_len;
    std::sort(sums.begin(), sums.end(), std::greater<>());
    per_orbit[o] = sums;
  }

  rep.exponents.assign(d, 0.0);
  rep.standard_errors.assign(d, 0.0);
  for (int i = 0; i < d; ++i) {
    double mean = 0.0;
    for (int o = 0; o < n_orbits; ++o) mean += per_orbit[o][i];
    mean /= n_orbits;
    double var = 0.0;
    for (int o = 0; o < n_orbits; ++o) var += (per_orbit[o][i] - mean) * (per_orbit[o][i] - mean);
    var /= std::max(1, n_orbits - 1);
    rep.exponents[i] = mean;
    rep.standard_errors[i] = std::sqrt(var / n_orbits);
  }

  if (coc.all_values_diagonal()) {
    std::vector<double> exact(d, 0.0);
    for (const auto& [w, A] : coc.values()) {
      double m = mu.cylinder_measure(w);
      for (int i = 0; i < d; ++i) exact[i] += m * std::log(std::abs(A(i, i)));
    }
    std::sort(exact.begin(), exact.end(), std::greater<>());
    rep.exact = exact;
  }
  return rep;
}

// Measure-average of log |det A|; for diagonal cocycles this is the exact
// exponent sum.
inline double average_log_det(const LocallyConstantCocycle& coc, const ParryMeasure& mu) {
  double s = 0.0;
  for (const auto& [w, A] : coc.values()) s += mu.cylinder_measure(w) * std::log(std::abs(A.determinant()));
  return s;
}

// -------------------------------------------------------------------------
// Periodic points and local stable variations, used by the pair samplers.

inline std::vector<SymbolicPoint> periodic_points(const SubshiftOfFiniteType& sft, int p_max,
                                                  int cap = 512) {
  std::vector<SymbolicPoint> out;
  for (int p = 1; p <= p_max; ++p) {
    auto words = sft.admissible_words(p);
    for (const auto& w : words) {
      if (!sft.allowed(w.back(), w.front())) continue;
      out.push_back(SymbolicPoint::periodic(w));
      if (static_cast<int>(out.size()) >= cap) return out;
    }
  }
  return out;
}

// A point in the same local stable set as x (coordinates agree for i >= 0)
// whose past is re-randomized through admissible predecessors.
inline std::optional<SymbolicPoint> random_local_stable_variation(const SubshiftOfFiniteType& sft,
                                                                  const SymbolicPoint& x,
                                                                  std::mt19937_64& rng,
                                                                  int preperiod = 4) {
  int n = sft.alphabet_size();
  auto predecessors = [&](Symbol s) {
    std::vector<Symbol> pre;
    for (Symbol a = 0; a < n; ++a)
      if (sft.allowed(a, s)) pre.push_back(a);
    return pre;
  };
  // Copy coordinates 0 .. horizon-1 from x, with the horizon aligned to the
  // phase of x's right period so the copied tail continues seamlessly.
  long p = static_cast<long>(x.right_period.size());
  long horizon = std::max<long>(x.core_end(), 1);
  horizon += ((x.core_end() - horizon) % p + p) % p;
  // backward walk for the preperiod, then close a cycle
  std::vector<Symbol> past;  // past[k] = y_{-1-k}
  Symbol cur = x.at(0);
  for (int k = 0; k < preperiod; ++k) {
    auto pre = predecessors(cur);
    if (pre.empty()) return std::nullopt;
    cur = pre[rng() % pre.size()];
    past.push_back(cur);
  }
  // close a cycle through `cur` by a backward walk until `cur` repeats
  std::vector<Symbol> cycle{cur};
  Symbol walk = cur;
  for (int guard = 0; guard < 4 * n + 4; ++guard) {
    auto pre = predecessors(walk);
    if (pre.empty()) return std::nullopt;
    walk = pre[rng() % pre.size()];
    if (walk == cur) break;
    cycle.push_back(walk);
  }
  if (cycle.size() > 1 && cycle.back() != cur && !sft.allowed(cur, cycle.back()))
    return std::nullopt;
  // assemble: left period is the cycle reversed (reading forward in time)
  std::vector<Symbol> period(cycle.rbegin(), cycle.rend());
  SymbolicPoint z;
  z.right_period = x.right_period;
  z.core_start = -static_cast<long>(past.size());
  z.core.assign(past.rbegin(), past.rend());
  for (long i = 0; i < horizon; ++i) z.core.push_back(x.at(i));
  z.left_period = period;
  if (!z.admissible(sft)) return std::nullopt;
  return z;
}

// -------------------------------------------------------------------------
// Fiber bunching along local stable pairs.

struct FiberBunchingReport {
  bool pass = true;
  double worst_ratio = 0.0;  // max over tested (pair, n) of lhs / rhs
  int worst_n = -1;
  std::string witness;
};

inline FiberBunchingReport fiber_bunching_check(const LocallyConstantCocycle& coc, double C,
                                                double eps, int n_max, int p_max = 4,
                                                int samples = 16, std::uint64_t seed = 0) {
  if (!(C > 0) || !(eps > 0)) throw Error("InvalidArgument", "C and eps must be positive");
  coc.validate();
  FiberBunchingReport rep;
  auto points = periodic_points(coc.base(), p_max);
  auto rng = make_rng(seed, "bunching-pairs");
  std::vector<std::pair<SymbolicPoint, SymbolicPoint>> pairs;
  for (const auto& x : points) {
    for (int s = 0; s < samples; ++s) {
      auto y = random_local_stable_variation(coc.base(), x, rng);
      if (y) pairs.push_back({x, *y});
    }
  }
  for (const auto& [x, y] : pairs) {
    Mat An = Mat::Identity(coc.dim(), coc.dim());
    for (int n = 0; n <= n_max; ++n) {
      double lhs = An.operatorNorm() * An.inverse().operatorNorm() *
                   (coc.value_at(x, n) - coc.value_at(y, n)).operatorNorm();
      double rhs = C * std::exp(-eps * n);
      double ratio = lhs / rhs;
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.worst_n = n;
        rep.witness = "periodic base point with re-randomized past";
      }
      if (!(lhs < rhs)) rep.pass = false;
      An = coc.value_at(x, n) * An;
    }
  }
  return rep;
}

// -------------------------------------------------------------------------
// Holonomies: stabilizing partial products of the limit formula.

struct HolonomyMap {
  Mat matrix;
  double residual = 0.0;
  bool converged = false;
  double intertwining_residual = 0.0;
  std::string side;
};

namespace detail_cocycle {

inline bool same_local_stable(const SymbolicPoint& x, const SymbolicPoint& y, long horizon) {
  for (long i = 0; i <= horizon; ++i)
    if (x.at(i) != y.at(i)) return false;
  return true;
}
inline bool same_local_unstable(const SymbolicPoint& x, const SymbolicPoint& y, long horizon) {
  for (long i = 0; i >= -horizon; --i)
    if (x.at(i) != y.at(i)) return false;
  return true;
}

inline Mat stable_partial(const LocallyConstantCocycle& coc, const SymbolicPoint& x,
                          const SymbolicPoint& y, int n) {
  int d = coc.dim();
  Mat left = Mat::Identity(d, d);   // A(y)^{-1} ... A(sigma^n y)^{-1}
  Mat right = Mat::Identity(d, d);  // A(sigma^n x) ... A(x)
  for (int k = 0; k <= n; ++k) {
    left = left * coc.value_at(y, k).inverse();
    right = coc.value_at(x, k) * right;
  }
  return left * right;
}

inline Mat unstable_partial(const LocallyConstantCocycle& coc, const SymbolicPoint& x,
                            const SymbolicPoint& y, int n) {
  int d = coc.dim();
  Mat left = Mat::Identity(d, d);   // A(sigma^{-1} y) ... A(sigma^{-n} y)
  Mat right = Mat::Identity(d, d);  // A(sigma^{-n} x)^{-1} ... A(sigma^{-1} x)^{-1}
  for (int k = 1; k <= n; ++k) {
    left = left * coc.value_at(y, -k);
    right = coc.value_at(x, -k).inverse() * right;
  }
  return left * right;
}

}  // namespace detail_cocycle

inline HolonomyMap holonomy(const LocallyConstantCocycle& coc, const SymbolicPoint& x,
                            const SymbolicPoint& y, const std::string& side, double tol = 1e-12,
                            int n_max = 64) {
  bool stable = side == "stable";
  if (!stable && side != "unstable")
    throw Error("InvalidArgument", "side must be 'stable' or 'unstable'");
  long horizon = 4 + 2 * (std::max(x.left_period.size() + x.right_period.size(),
                                   y.left_period.size() + y.right_period.size()) +
                          x.core.size() + y.core.size());
  bool related = stable ? detail_cocycle::same_local_stable(x, y, horizon)
                        : detail_cocycle::same_local_unstable(x, y, horizon);
  if (!related)
    throw Error("NotComparable", "points are not in the same local " + side + " set");

  HolonomyMap out;
  out.side = side;
  Mat prev = stable ? detail_cocycle::stable_partial(coc, x, y, 0)
                    : detail_cocycle::unstable_partial(coc, x, y, 0);
  for (int n = 1; n <= n_max; ++n) {
    Mat cur = stable ? detail_cocycle::stable_partial(coc, x, y, n)
                     : detail_cocycle::unstable_partial(coc, x, y, n);
    out.residual = (cur - prev).operatorNorm();
    prev = cur;
    if (out.residual < tol) {
      out.converged = true;
      break;
    }
  }
  out.matrix = prev;

  // Intertwining: H(sigma x, sigma y) A(x) = A(y) H(x, y) for the stable
  // side; the mirrored identity holds for the unstable side.
  SymbolicPoint sx = x.shifted(stable ? 1 : -1);
  SymbolicPoint sy = y.shifted(stable ? 1 : -1);
  Mat shifted = stable ? detail_cocycle::stable_partial(coc, sx, sy, n_max)
                       : detail_cocycle::unstable_partial(coc, sx, sy, n_max);
  if (stable) {
    out.intertwining_residual =
        (shifted * coc.value_at(x, 0) - coc.value_at(y, 0) * out.matrix).operatorNorm();
  } else {
    out.intertwining_residual =
        (shifted * coc.value_at(x, -1).inverse() - coc.value_at(y, -1).inverse() * out.matrix)
            .operatorNorm();
  }
  return out;
}

// -------------------------------------------------------------------------
// Invariant measures on projective space for a pair of matrices. The
// B-invariant ergodic classes are point masses on eigendirections, uniform
// measures on elliptic 2-blocks, and finite combinations; each extreme class
// is tested for invariance under the second matrix.

struct CommonMeasureResult {
  bool exists = false;
  std::string witness;
  std::vector<std::string> rejected;
};

namespace detail_cocycle {

inline double direction_angle_gap(const Vec& a, const Vec& b) {
  Vec u = a.normalized(), v = b.normalized();
  double c = std::abs(u.dot(v));
  return std::sqrt(std::max(0.0, 1.0 - c * c));  // sin of the angle
}

}  // namespace detail_cocycle

inline CommonMeasureResult common_invariant_measure_test(const Mat& B, const Mat& Bp,
                                                         double tol = 1e-9) {
  int d = static_cast<int>(B.rows());
  if (d < 2) throw Error("InvalidArgument", "dimension must be at least 2");
  CommonMeasureResult res;

  Eigen::EigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success) throw Error("IllConditioned", "eigen decomposition failed");
  {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
    double cond = svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
    if (!(cond < 1e8)) throw Error("IllConditioned", "eigenbasis condition exceeds 1e8");
  }

  auto evals = es.eigenvalues();
  auto evecs = es.eigenvectors();

  // Real eigendirections of B (point-mass candidates).
  std::vector<Vec> directions;
  std::vector<std::pair<Vec, Vec>> planes;  // elliptic blocks (re, im)
  for (int i = 0; i < d; ++i) {
    if (std::abs(evals[i].imag()) <= 1e-12 * std::max(1.0, std::abs(evals[i].real()))) {
      Vec v(d);
      for (int k = 0; k < d; ++k) v[k] = evecs(k, i).real();
      if (v.norm() < 1e-12) continue;
      bool dup = false;
      for (const auto& u : directions)
        dup = dup || detail_cocycle::direction_angle_gap(u, v) < 1e-10;
      if (!dup) directions.push_back(v.normalized());
    } else if (evals[i].imag() > 0) {
      Vec re(d), im(d);
      for (int k = 0; k < d; ++k) {
        re[k] = evecs(k, i).real();
        im[k] = evecs(k, i).imag();
      }
      planes.push_back({re, im});
    }
  }

  // (i) point masses fixed by both matrices
  for (const auto& v : directions) {
    Vec w = Bp * v;
    if (w.norm() > 1e-300 && detail_cocycle::direction_angle_gap(v, w) <= tol) {
      res.exists = true;
      res.witness = "common eigendirection point mass";
      return res;
    }
  }
  if (!directions.empty())
    res.rejected.push_back("point masses on eigendirections moved by the second matrix");

  // (ii) permuted point masses: the second matrix permutes the finite set of
  // eigendirections, so the uniform combination is invariant for both.
  if (directions.size() >= 2) {
    bool permutes = true;
    for (const auto& v : directions) {
      Vec w = Bp * v;
      bool hit = false;
      for (const auto& u : directions)
        hit = hit || (w.norm() > 1e-300 && detail_cocycle::direction_angle_gap(u, w) <= tol);
      permutes = permutes && hit;
    }
    if (permutes) {
      res.exists = true;
      res.witness = "uniform mass on a permuted eigendirection set";
      return res;
    }
    res.rejected.push_back("eigendirection set not permuted");
  }

  // (iii) uniform measures on elliptic blocks: the plane must be invariant
  // and the restriction conjugate into the orthogonal group of the block's
  // normal coordinates.
  for (const auto& [re, im] : planes) {
    Mat S(d, 2);
    S.col(0) = re;
    S.col(1) = im;
    Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeThinU);
    Mat U = svd.matrixU();  // orthonormal basis of the plane
    Mat img = Bp * S;
    // plane invariance
    Mat proj = U * (U.transpose() * img);
    double off = (img - proj).norm() / std::max(1.0, img.norm());
    if (off > tol) {
      res.rejected.push_back("elliptic plane not invariant under the second matrix");
      continue;
    }
    // restriction in normal-form coordinates must be a scalar multiple of an
    // orthogonal map to preserve the uniform measure
    Mat M = (S.transpose() * S).ldlt().solve(S.transpose() * img);  // 2x2
    Mat G = M.transpose() * M;
    double scale = 0.5 * (G(0, 0) + G(1, 1));
    double dev = std::max(std::abs(G(0, 0) - scale), std::abs(G(1, 1) - scale));
    dev = std::max(dev, std::abs(G(0, 1)));
    if (dev <= tol * std::max(1.0, scale)) {
      res.exists = true;
      res.witness = "rotation-invariant mass on an elliptic block";
      return res;
    }
    res.rejected.push_back("elliptic block restriction is not conformal");
  }
  return res;
}

// -------------------------------------------------------------------------
// Pinching and bunching inequalities evaluated on per-block growth bounds.

struct BlockRates {
  double min_rate = 0.0;  // log growth per unit time
  double max_rate = 0.0;
};

struct PinchBunchBlockReport {
  double pinch_upper = 0.0, pinch_lower = 0.0;  // the two pinching quantities
  double bunch_forward = 0.0, bunch_backward = 0.0;
  bool pinched = false, bunched = false;
};

struct PinchBunchReport {
  std::vector<PinchBunchBlockReport> blocks;  // in ascending rate order
};

inline PinchBunchReport pinching_bunching_check(std::vector<BlockRates> blocks, double alpha,
                                                int n) {
  if (n < 1) throw Error("InvalidArgument", "horizon must be at least 1");
  std::sort(blocks.begin(), blocks.end(),
            [](const BlockRates& a, const BlockRates& b) { return a.min_rate < b.min_rate; });
  double gmax = -std::numeric_limits<double>::infinity();
  double gmin = std::numeric_limits<double>::infinity();
  double stable_max = -std::numeric_limits<double>::infinity();
  double unstable_min = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    gmax = std::max(gmax, b.max_rate);
    gmin = std::min(gmin, b.min_rate);
    if (b.max_rate < 0) stable_max = std::max(stable_max, b.max_rate);
    if (b.min_rate > 0) unstable_min = std::min(unstable_min, b.min_rate);
  }
  PinchBunchReport rep;
  int m = static_cast<int>(blocks.size());
  for (int j = 0; j < m; ++j) {
    PinchBunchBlockReport r;
    // ||Df^n|E_j|| ||(Df^n|E_{j+1})^{-1}|| ||Df^n||^alpha, neighbor above
    r.pinch_upper = (j + 1 < m)
                        ? std::exp(n * (blocks[j].max_rate - blocks[j + 1].min_rate)) *
                              std::exp(n * alpha * gmax)
                        : 0.0;
    // ||(Df^n|E_j)^{-1}|| ||Df^n|E_{j-1}|| ||(Df^n)^{-1}||^alpha, neighbor below
    r.pinch_lower = (j > 0) ? std::exp(n * (blocks[j - 1].max_rate - blocks[j].min_rate)) *
                                  std::exp(-n * alpha * gmin)
                            : 0.0;
    r.pinched = r.pinch_upper < 1.0 && r.pinch_lower < 1.0;
    // ||Df^n|E_j|| ||(Df^n|E_j)^{-1}|| ||Df^n|E^s||^alpha
    double spread = std::exp(n * (blocks[j].max_rate - blocks[j].min_rate));
    r.bunch_forward = std::isfinite(stable_max)
                          ? spread * std::exp(n * alpha * stable_max)
                          : 0.0;
    // ||Df^{-n}|E^u||^alpha ||Df^{-n}|E_j|| ||(Df^{-n}|E_j)^{-1}||
    r.bunch_backward = std::isfinite(unstable_min)
                           ? spread * std::exp(-n * alpha * unstable_min)
                           : 0.0;
    r.bunched = r.bunch_forward < 1.0 && r.bunch_backward < 1.0;
    rep.blocks.push_back(r);
  }
  return rep;
}

// -------------------------------------------------------------------------
// Stationary-cloud probe: push a weighted cloud of directions through the
// supplied operators, renormalize and merge, and report the change of the
// second-moment matrix between sweeps.

struct ProjectiveCloud {
  std::vector<Vec> points;  // unit vectors, sign-canonicalized
  std::vector<double> weights;

  Mat moment_matrix() const {
    int d = points.empty() ? 0 : static_cast<int>(points[0].size());
    Mat M = Mat::Zero(d, d);
    for (size_t i = 0; i < points.size(); ++i) M += weights[i] * points[i] * points[i].transpose();
    return M;
  }
};

struct ProbeReport {
  ProjectiveCloud cloud;
  double residual = 0.0;
  bool converged = false;
  int iterations_used = 0;
};

namespace detail_cocycle {

inline void canonicalize(Vec& v) {
  v.normalize();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-14) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
}

}  // namespace detail_cocycle

inline ProbeReport projective_stationary_probe(const std::vector<Mat>& operators, int iterations,
                                               std::uint64_t seed, int cloud_size = 64,
                                               double tol = 1e-6) {
  if (operators.empty()) throw Error("InvalidArgument", "need at least one operator");
  int d = static_cast<int>(operators[0].rows());
  ProbeReport rep;
  ProjectiveCloud cloud;
  if (d == 2) {
    for (int k = 0; k < cloud_size; ++k) {
      double a = M_PI * k / cloud_size;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      detail_cocycle::canonicalize(v);
      cloud.points.push_back(v);
      cloud.weights.push_back(1.0 / cloud_size);
    }
  } else {
    auto rng = make_rng(seed, "probe-init");
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < cloud_size; ++k) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = g(rng);
      detail_cocycle::canonicalize(v);
      cloud.points.push_back(v);
      cloud.weights.push_back(1.0 / cloud_size);
    }
  }

  Mat prev = cloud.moment_matrix();
  for (int it = 0; it < iterations; ++it) {
    ProjectiveCloud next;
    for (size_t i = 0; i < cloud.points.size(); ++i) {
      for (const auto& O : operators) {
        Vec w = O * cloud.points[i];
        if (w.norm() < 1e-300) throw Error("Degenerate", "operator annihilated a direction");
        detail_cocycle::canonicalize(w);
        next.points.push_back(w);
        next.weights.push_back(cloud.weights[i] / operators.size());
      }
    }
    // merge nearest directions until the cloud size is restored
    while (static_cast<int>(next.points.size()) > cloud_size) {
      size_t bi = 0, bj = 1;
      double best = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < next.points.size(); ++i)
        for (size_t j = i + 1; j < next.points.size(); ++j) {
          double gsin = detail_cocycle::direction_angle_gap(next.points[i], next.points[j]);
          if (gsin < best) {
            best = gsin;
            bi = i;
            bj = j;
          }
        }
      double wsum = next.weights[bi] + next.weights[bj];
      Vec merged = next.weights[bi] * next.points[bi] +
                   next.weights[bj] * (next.points[bi].dot(next.points[bj]) >= 0
                                           ? next.points[bj]
                                           : Vec(-next.points[bj]));
      if (merged.norm() < 1e-300) merged = next.points[bi];
      detail_cocycle::canonicalize(merged);
      next.points[bi] = merged;
      next.weights[bi] = wsum;
      next.points.erase(next.points.begin() + bj);
      next.weights.erase(next.weights.begin() + bj);
    }
    cloud = next;
    Mat M = cloud.moment_matrix();
    rep.residual = (M - prev).norm();
    prev = M;
    rep.iterations_used = it + 1;
    if (rep.residual < tol && it > 2) {
      rep.converged = true;
      break;
    }
  }
  rep.cloud = cloud;
  return rep;
}

}  // namespace smale
