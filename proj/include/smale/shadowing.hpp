// Shadowing for finite sequences of hyperbolic affine (or nearly affine)
// maps: the bounded-solution solver for the deviation recursion, a Picard
// iteration for small nonlinear remainders, the two-sided uniqueness decay
// estimate, and pseudo-orbits assembled from horseshoe orbit segments.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "smale/common.hpp"
#include "smale/horseshoe.hpp"

namespace smale {

// Maps g_n(x) = diag(Lu_n, Ls_n) x + b_n + r_n(x) for n in [n0, n1).
// Points of orbits and pseudo-orbits live at indices [n0, n1].
class HyperbolicSequence {
 public:
  HyperbolicSequence(int n0, int n1, int d_u, int d_s)
      : n0_(n0), n1_(n1), du_(d_u), ds_(d_s) {
    if (n1 <= n0) throw Error("InvalidArgument", "window must contain a step");
    int steps = n1 - n0;
    lu_.assign(steps, Mat::Identity(du_, du_));
    ls_.assign(steps, Mat::Identity(ds_, ds_));
    b_.assign(steps, Vec::Zero(du_ + ds_));
  }

  int n0() const { return n0_; }
  int n1() const { return n1_; }
  int steps() const { return n1_ - n0_; }
  int d_u() const { return du_; }
  int d_s() const { return ds_; }
  int d() const { return du_ + ds_; }

  void set_step(int n, Mat lu, Mat ls, Vec b) {
    int i = index(n);
    lu_[i] = std::move(lu);
    ls_[i] = std::move(ls);
    b_[i] = std::move(b);
  }
  void set_remainder(std::function<Vec(int, const Vec&)> r, double c1_size) {
    r_ = std::move(r);
    eta_bar_ = c1_size;
  }
  bool has_remainder() const { return static_cast<bool>(r_); }
  double eta_bar() const { return eta_bar_; }

  const Mat& lu(int n) const { return lu_[index(n)]; }
  const Mat& ls(int n) const { return ls_[index(n)]; }
  const Vec& offset(int n) const { return b_[index(n)]; }

  Vec apply_linear(int n, const Vec& x) const {
    int i = index(n);
    Vec y(d());
    y.head(du_) = lu_[i] * x.head(du_);
    y.tail(ds_) = ls_[i] * x.tail(ds_);
    return y + b_[i];
  }
  Vec apply(int n, const Vec& x) const {
    Vec y = apply_linear(n, x);
    if (r_) y += r_(n, x);
    return y;
  }

  // Certified hyperbolicity margin from sup-operator norms: requires
  // ||Ls|| < e^-kappa and ||Lu^{-1}|| < e^-kappa at every step.
  double kappa() const {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps(); ++i) {
      if (ds_ > 0) {
        double ns = sup_operator_norm(ls_[i]);
        if (ns >= 1.0) return 0.0;
        worst = std::min(worst, -std::log(ns));
      }
      if (du_ > 0) {
        Mat inv = lu_[i].inverse();
        double nu = sup_operator_norm(inv);
        if (nu >= 1.0) return 0.0;
        worst = std::min(worst, -std::log(nu));
      }
    }
    return worst;
  }
  double theta() const { return 1.0 / (1.0 - std::exp(-kappa())); }

  static double sup_operator_norm(const Mat& m) {
    double best = 0.0;
    for (int i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
    return best;
  }

 private:
  int index(int n) const {
    if (n < n0_ || n >= n1_) throw Error("InvalidArgument", "step index out of window");
    return n - n0_;
  }
  int n0_, n1_, du_, ds_;
  std::vector<Mat> lu_, ls_;
  std::vector<Vec> b_;
  std::function<Vec(int, const Vec&)> r_;
  double eta_bar_ = 0.0;
};

struct PseudoOrbit {
  int n0 = 0;
  std::vector<Vec> points;  // points[i] = x_{n0+i}

  int n1() const { return n0 + static_cast<int>(points.size()) - 1; }
  const Vec& at(int n) const { return points[n - n0]; }

  std::vector<double> jumps(const HyperbolicSequence& seq) const {
    std::vector<double> out;
    for (int n = n0; n < n1(); ++n) out.push_back(sup_norm(seq.apply(n, at(n)) - at(n + 1)));
    return out;
  }
  double max_jump(const HyperbolicSequence& seq) const {
    double e = 0.0;
    for (double j : jumps(seq)) e = std::max(e, j);
    return e;
  }
};

struct ShadowOrbit {
  int n0 = 0;
  std::vector<Vec> points;
  double max_deviation = 0.0;
  std::string clamp = "zero-deviation ends";

  const Vec& at(int n) const { return points[n - n0]; }

  double orbit_residual(const HyperbolicSequence& seq) const {
    double r = 0.0;
    for (int n = n0; n < n0 + static_cast<int>(points.size()) - 1; ++n)
      r = std::max(r, sup_norm(seq.apply(n, points[n - n0]) - points[n + 1 - n0]));
    return r;
  }
};

// Bounded solution of u_{n+1} = L_n u_n + e_n on the window: stable
// components accumulate forward from a zero clamp at the left end, unstable
// components accumulate backward from a zero clamp at the right end.
inline std::vector<Vec> bounded_solution(const HyperbolicSequence& seq,
                                         const std::vector<Vec>& e) {
  int N = seq.steps();
  int du = seq.d_u(), ds = seq.d_s();
  std::vector<Vec> u(N + 1, Vec::Zero(seq.d()));
  for (int i = 0; i < N; ++i) {
    int n = seq.n0() + i;
    u[i + 1].tail(ds) = seq.ls(n) * u[i].tail(ds) + e[i].tail(ds);
  }
  for (int i = N - 1; i >= 0; --i) {
    int n = seq.n0() + i;
    u[i].head(du) = seq.lu(n).partialPivLu().solve(u[i + 1].head(du) - e[i].head(du));
  }
  return u;
}

inline ShadowOrbit shadow_affine(const HyperbolicSequence& seq, const PseudoOrbit& pseudo) {
  if (seq.has_remainder())
    throw Error("InvalidArgument", "affine solver requires zero remainders");
  if (pseudo.n0 != seq.n0() || pseudo.n1() != seq.n1())
    throw Error("InvalidArgument", "pseudo-orbit window mismatch");
  if (!(seq.kappa() > 0)) throw Error("InvalidArgument", "sequence is not hyperbolic");
  int N = seq.steps();
  std::vector<Vec> e(N);
  for (int i = 0; i < N; ++i) {
    int n = seq.n0() + i;
    e[i] = seq.apply(n, pseudo.at(n)) - pseudo.at(n + 1);
  }
  auto u = bounded_solution(seq, e);
  ShadowOrbit orbit;
  orbit.n0 = pseudo.n0;
  orbit.points.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    orbit.points[i] = pseudo.points[i] + u[i];
    orbit.max_deviation = std::max(orbit.max_deviation, sup_norm(u[i]));
  }
  return orbit;
}

inline ShadowOrbit shadow_nonlinear(const HyperbolicSequence& seq, const PseudoOrbit& pseudo,
                                    double tol = 1e-10, int max_iter = 100) {
  double kappa = seq.kappa();
  if (!(kappa > 0)) throw Error("InvalidArgument", "sequence is not hyperbolic");
  double admissible = (1.0 - std::exp(-kappa)) / 4.0;
  if (seq.has_remainder() && !(seq.eta_bar() < admissible))
    throw Error("AdmissibilityViolated",
                "remainder C1 size " + std::to_string(seq.eta_bar()) +
                    " not below (1 - e^-kappa)/4 = " + std::to_string(admissible));
  int N = seq.steps();
  std::vector<Vec> u(N + 1, Vec::Zero(seq.d()));
  ShadowOrbit orbit;
  orbit.n0 = pseudo.n0;
  orbit.points = pseudo.points;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Vec> e(N);
    for (int i = 0; i < N; ++i) {
      int n = seq.n0() + i;
      // e_n(u) = g_n(x_n + u_n) - x_{n+1} - L_n u_n; its fixed point under
      // the bounded solve is the orbit deviation.
      e[i] = seq.apply(n, pseudo.at(n) + u[i]) - pseudo.at(n + 1);
      e[i].head(seq.d_u()) -= seq.lu(n) * u[i].head(seq.d_u());
      e[i].tail(seq.d_s()) -= seq.ls(n) * u[i].tail(seq.d_s());
    }
    auto next = bounded_solution(seq, e);
    double delta = 0.0;
    for (int i = 0; i <= N; ++i) delta = std::max(delta, sup_norm(next[i] - u[i]));
    u = next;
    for (int i = 0; i <= N; ++i) orbit.points[i] = pseudo.points[i] + u[i];
    double residual = orbit.orbit_residual(seq);
    if (residual <= tol) {
      orbit.max_deviation = 0.0;
      for (int i = 0; i <= N; ++i)
        orbit.max_deviation = std::max(orbit.max_deviation, sup_norm(u[i]));
      return orbit;
    }
    (void)delta;
  }
  throw Error("NotConverged", "residual " + std::to_string(orbit.orbit_residual(seq)) +
                                  " after " + std::to_string(max_iter) + " iterations");
}

struct DecayCheck {
  bool pass = true;
  std::vector<double> margins;  // per k: bound - observed, >= 0 when passing
};

inline DecayCheck uniqueness_decay_check(const HyperbolicSequence& seq, const ShadowOrbit& a,
                                         const ShadowOrbit& b, int k1, int k2,
                                         double orbit_tol = 1e-9) {
  if (!(seq.kappa() > 0)) throw Error("InvalidArgument", "sequence is not hyperbolic");
  if (a.orbit_residual(seq) > orbit_tol || b.orbit_residual(seq) > orbit_tol)
    throw Error("NotAnOrbit", "inputs do not satisfy the orbit relation");
  double kappa = seq.kappa();
  DecayCheck res;
  double d1 = sup_norm(a.at(k1) - b.at(k1));
  double d2 = sup_norm(a.at(k2) - b.at(k2));
  for (int k = k1; k <= k2; ++k) {
    double bound = std::exp(-kappa * (k - k1)) * d1 + std::exp(-kappa * (k2 - k)) * d2;
    double observed = sup_norm(a.at(k) - b.at(k));
    double margin = bound - observed;
    res.margins.push_back(margin);
    if (margin < -1e-12) res.pass = false;
  }
  return res;
}

// -------------------------------------------------------------------------
// Pseudo-orbits from horseshoe orbit segments: each length-N branch word
// codes a periodic anchor point whose exact orbit segment is one block.

struct ConcatenationResult {
  PseudoOrbit pseudo;
  ShadowOrbit orbit;
  Vec coded_point;        // shadow point at time 0
  double max_segment_gap = 0.0;
};

inline HyperbolicSequence sequence_from_branches(const StandardAffineHorseshoe& h,
                                                 const std::vector<int>& branch_at_time,
                                                 int n0) {
  int du = h.d_u(), ds = h.d_s();
  HyperbolicSequence seq(n0, n0 + static_cast<int>(branch_at_time.size()), du, ds);
  for (size_t i = 0; i < branch_at_time.size(); ++i) {
    int j = branch_at_time[i];
    Mat lu = Mat::Zero(du, du), ls = Mat::Zero(ds, ds);
    Vec b = Vec::Zero(h.d());
    for (int t = 0; t < du; ++t) {
      lu(t, t) = h.diag_entry(t);
      b[t] = -h.diag_entry(t) * h.translation(j)[t];
    }
    for (int t = 0; t < ds; ++t) {
      ls(t, t) = h.diag_entry(du + t);
      b[du + t] = h.translation(j)[du + t];
    }
    seq.set_step(n0 + static_cast<int>(i), lu, ls, b);
  }
  return seq;
}

inline ConcatenationResult concatenate_segments(const StandardAffineHorseshoe& h,
                                                const std::vector<Word>& alphabet,
                                                const std::vector<int>& code,
                                                double eps0 = 1.0, int anchor_window = 40) {
  h.require_valid();
  if (alphabet.empty() || code.empty()) throw Error("InvalidArgument", "empty code");
  size_t N = alphabet.front().size();
  for (const auto& w : alphabet) {
    if (w.size() != N) throw Error("InadmissibleWord", "unequal segment lengths");
    for (Symbol s : w)
      if (s < 0 || s >= h.branch_count()) throw Error("InadmissibleWord", "unknown branch");
  }

  // Orbit sample of a word: the exact coded point of the shifted periodic
  // extension at each segment time. Truncation error stays uniform instead
  // of compounding through forward iteration.
  auto segment_point = [&](const Word& w, long shift) {
    Itinerary it;
    it.W = anchor_window;
    it.symbols.resize(2 * anchor_window + 1);
    for (int t = -anchor_window; t <= anchor_window; ++t) {
      long idx = (((t + shift) % static_cast<long>(N)) + N) % N;
      it.symbols[t + anchor_window] = w[idx];
    }
    return point_from_itinerary(h, it).point;
  };

  PseudoOrbit pseudo;
  pseudo.n0 = 0;
  std::vector<int> branches;
  for (int c : code) {
    if (c < 0 || c >= static_cast<int>(alphabet.size()))
      throw Error("InadmissibleWord", "code letter out of range");
    for (size_t t = 0; t < N; ++t) {
      pseudo.points.push_back(segment_point(alphabet[c], static_cast<long>(t)));
      branches.push_back(alphabet[c][t]);
    }
  }
  pseudo.points.push_back(segment_point(alphabet[code.front()], 0));

  auto seq = sequence_from_branches(h, branches, 0);
  ConcatenationResult res;
  res.max_segment_gap = pseudo.max_jump(seq);
  if (res.max_segment_gap > eps0)
    throw Error("GapTooLarge", "segment endpoint gap " + std::to_string(res.max_segment_gap));
  res.pseudo = pseudo;
  res.orbit = shadow_affine(seq, pseudo);
  res.coded_point = res.orbit.at(0);
  return res;
}

}  // namespace smale
