// Standard affine horseshoes on the unit cube: diagonal hyperbolic linear
// part, one translation per branch, unstable/stable sub-rectangles. Carries
// the symbolic coding, the Lyapunov data consumed by the entropy hypothesis
// checks, the center-attractor dichotomy and the unstable disintegration
// with its reverse-doubling search.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smale/common.hpp"
#include "smale/subshift.hpp"

namespace smale {

struct ValidationClause {
  std::string name;
  double margin = 0.0;
  bool ok = false;
};

struct ValidationReport {
  std::vector<ValidationClause> clauses;
  bool valid() const {
    for (const auto& c : clauses)
      if (!c.ok) return false;
    return true;
  }
  std::string first_violation() const {
    for (const auto& c : clauses)
      if (!c.ok) return c.name;
    return "";
  }
};

class StandardAffineHorseshoe {
 public:
  StandardAffineHorseshoe(int d_uu, int d_c, int d_s, Vec diag, std::vector<Vec> branches,
                          bool simple_spectrum = false)
      : d_uu_(d_uu), d_c_(d_c), d_s_(d_s), diag_(std::move(diag)),
        branches_(std::move(branches)), simple_spectrum_(simple_spectrum) {
    if (d_uu_ < 0 || d_c_ < 0 || d_s_ < 0 || d() <= 0)
      throw Error("InvalidModel", "dimensions must be nonnegative with d > 0");
    if (diag_.size() != d()) throw Error("InvalidModel", "diag size mismatch");
    for (int i = 0; i < diag_.size(); ++i)
      if (!(diag_[i] > 0)) throw Error("InvalidModel", "diagonal entries must be positive");
    if (branches_.empty()) throw Error("InvalidModel", "at least one branch required");
    for (const auto& v : branches_)
      if (v.size() != d()) throw Error("InvalidModel", "branch translation size mismatch");
  }

  int d_uu() const { return d_uu_; }
  int d_c() const { return d_c_; }
  int d_s() const { return d_s_; }
  int d_u() const { return d_uu_ + d_c_; }
  int d() const { return d_uu_ + d_c_ + d_s_; }
  int branch_count() const { return static_cast<int>(branches_.size()); }
  bool simple_spectrum_flag() const { return simple_spectrum_; }

  double diag_entry(int i) const { return diag_[i]; }
  const Vec& translation(int j) const { return branches_[j]; }

  // Branch translations anchor the sub-rectangles:
  //   B_j^u = (A^u)^{-1}(B^u) + v_j^u   and   B_j^s = A^s(B^s) + v_j^s,
  // so the branch map sends B_j^u x B^s onto B^u x B_j^s via
  //   f_j(z) = (A^u (z^u - v_j^u), A^s z^s + v_j^s).
  Vec apply(int j, const Vec& x) const {
    Vec y(d());
    for (int i = 0; i < d_u(); ++i) y[i] = diag_[i] * (x[i] - branches_[j][i]);
    for (int i = d_u(); i < d(); ++i) y[i] = diag_[i] * x[i] + branches_[j][i];
    return y;
  }
  Vec apply_inverse(int j, const Vec& x) const {
    Vec y(d());
    for (int i = 0; i < d_u(); ++i) y[i] = x[i] / diag_[i] + branches_[j][i];
    for (int i = d_u(); i < d(); ++i) y[i] = (x[i] - branches_[j][i]) / diag_[i];
    return y;
  }

  // The inverse branch on the unstable factor, a contraction onto B_j^u.
  Vec t_unstable(int j, const Vec& y) const {
    Vec out(d_u());
    for (int i = 0; i < d_u(); ++i) out[i] = y[i] / diag_[i] + branches_[j][i];
    return out;
  }
  Box t_unstable_box(int j, const Box& b) const {
    Box out(d_u());
    for (int i = 0; i < d_u(); ++i)
      out.axes[i] = b.axes[i].affine_out(1.0 / diag_[i], branches_[j][i]);
    return out;
  }

  // Plain arithmetic: validation margins should reflect the model, not the
  // rounding mode. The certification paths use the rounded variants.
  Box unstable_subrect(int j) const {
    Box out(d_u());
    for (int i = 0; i < d_u(); ++i)
      out.axes[i] = Interval{0.0, 1.0}.affine(1.0 / diag_[i], branches_[j][i]);
    return out;
  }
  Box stable_subrect(int j) const {
    Box out(d_s_);
    for (int i = 0; i < d_s_; ++i) {
      int k = d_u() + i;
      out.axes[i] = Interval{0.0, 1.0}.affine(diag_[k], branches_[j][k]);
    }
    return out;
  }

  // Hyperbolicity margin: min |log entry| over unstable and stable entries.
  double kappa() const {
    double k = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d(); ++i) k = std::min(k, std::abs(std::log(diag_[i])));
    return k;
  }
  double beta() const {  // |det A_uu|
    double b = 1.0;
    for (int i = 0; i < d_uu_; ++i) b *= diag_[i];
    return b;
  }
  double det_center() const {
    double c = 1.0;
    for (int i = d_uu_; i < d_u(); ++i) c *= diag_[i];
    return c;
  }

  ValidationReport validate() const {
    ValidationReport rep;
    double unstable_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d_u(); ++i) unstable_margin = std::min(unstable_margin, diag_[i] - 1.0);
    rep.clauses.push_back({"unstable expansion margin", unstable_margin, unstable_margin > 0});
    double stable_margin = std::numeric_limits<double>::infinity();
    for (int i = d_u(); i < d(); ++i) stable_margin = std::min(stable_margin, 1.0 - diag_[i]);
    if (d_s_ == 0) stable_margin = 0.0;
    rep.clauses.push_back({"stable contraction margin", stable_margin, d_s_ == 0 || stable_margin > 0});

    auto box_gap = [](const Box& a, const Box& b) {
      double g = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < a.dim(); ++i) {
        g = std::max(g, b.axes[i].lo - a.axes[i].hi);
        g = std::max(g, a.axes[i].lo - b.axes[i].hi);
      }
      return g;
    };
    auto contain_slack = [](const Box& inner, const Box& outer) {
      double s = std::numeric_limits<double>::infinity();
      for (int i = 0; i < inner.dim(); ++i) {
        s = std::min(s, inner.axes[i].lo - outer.axes[i].lo);
        s = std::min(s, outer.axes[i].hi - inner.axes[i].hi);
      }
      return s;
    };

    double u_gap = std::numeric_limits<double>::infinity();
    double u_slack = std::numeric_limits<double>::infinity();
    Box bu = Box::unit(d_u());
    for (int j = 0; j < branch_count(); ++j) {
      Box rj = unstable_subrect(j);
      u_slack = std::min(u_slack, contain_slack(rj, bu));
      for (int l = j + 1; l < branch_count(); ++l)
        u_gap = std::min(u_gap, box_gap(rj, unstable_subrect(l)));
    }
    if (branch_count() == 1) u_gap = std::numeric_limits<double>::infinity();
    // gap 0 = shared boundary face; interiors stay disjoint, which is what
    // the coding needs, so only genuine overlap invalidates.
    rep.clauses.push_back({"unstable sub-rectangles disjoint", u_gap, u_gap >= 0});
    rep.clauses.push_back({"unstable sub-rectangles inside cube", u_slack, u_slack >= 0});

    if (d_s_ > 0) {
      double s_gap = std::numeric_limits<double>::infinity();
      double s_slack = std::numeric_limits<double>::infinity();
      Box bs = Box::unit(d_s_);
      for (int j = 0; j < branch_count(); ++j) {
        Box rj = stable_subrect(j);
        s_slack = std::min(s_slack, contain_slack(rj, bs));
        for (int l = j + 1; l < branch_count(); ++l)
          s_gap = std::min(s_gap, box_gap(rj, stable_subrect(l)));
      }
      if (branch_count() == 1) s_gap = std::numeric_limits<double>::infinity();
      rep.clauses.push_back({"stable sub-rectangles disjoint", s_gap, s_gap >= 0});
      rep.clauses.push_back({"stable sub-rectangles inside cube", s_slack, s_slack >= 0});
    }

    if (simple_spectrum_) {
      double sep = std::numeric_limits<double>::infinity();
      for (int i = 0; i < d(); ++i)
        for (int j = i + 1; j < d(); ++j) sep = std::min(sep, std::abs(diag_[i] - diag_[j]));
      rep.clauses.push_back({"simple spectrum", sep, sep > 0});
    }
    return rep;
  }

  void require_valid() const {
    auto rep = validate();
    if (!rep.valid()) throw Error("InvalidModel", rep.first_violation());
  }

  // Hyperbolicity alone; the spectral/entropy arithmetic does not depend on
  // the packing of the sub-rectangles.
  void require_hyperbolic() const {
    for (int i = 0; i < d_u(); ++i)
      if (!(diag_[i] > 1.0)) throw Error("InvalidModel", "unstable expansion margin");
    for (int i = d_u(); i < d(); ++i)
      if (!(diag_[i] < 1.0)) throw Error("InvalidModel", "stable contraction margin");
  }

 private:
  int d_uu_, d_c_, d_s_;
  Vec diag_;
  std::vector<Vec> branches_;
  bool simple_spectrum_;
};

// -------------------------------------------------------------------------
// Finite itinerary window [-W, W].

struct Itinerary {
  int W = 1;
  std::vector<int> symbols;  // size 2W+1; time t lives at index t+W

  static Itinerary constant(int j, int W) {
    Itinerary it;
    it.W = W;
    it.symbols.assign(2 * W + 1, j);
    return it;
  }
  int at(int t) const { return symbols[t + W]; }
  // Truncated shift: drops the leftmost symbol, duplicates the rightmost.
  Itinerary shifted() const {
    Itinerary s;
    s.W = W - 1;
    s.symbols.assign(symbols.begin() + 2, symbols.end());
    return s;
  }
};

struct CodedPoint {
  Vec point;
  double error_bound = 0.0;
};

// Unstable coordinates from the forward symbols (nested branch contractions),
// stable coordinates from the strictly past symbols. Truncation error decays
// with the hyperbolicity margin.
inline CodedPoint point_from_itinerary(const StandardAffineHorseshoe& h, const Itinerary& it) {
  int du = h.d_u(), ds = h.d_s(), W = it.W;
  Vec u(du);
  for (int i = 0; i < du; ++i) u[i] = 0.5;
  for (int t = W; t >= 0; --t) {
    int j = it.at(t);
    for (int i = 0; i < du; ++i) u[i] = u[i] / h.diag_entry(i) + h.translation(j)[i];
  }
  Vec s(ds);
  for (int i = 0; i < ds; ++i) s[i] = 0.5;
  for (int m = W; m >= 1; --m) {
    int j = it.at(-m);
    for (int i = 0; i < ds; ++i) {
      int k = du + i;
      s[i] = h.diag_entry(k) * s[i] + h.translation(j)[k];
    }
  }
  Vec x(h.d());
  x.head(du) = u;
  x.tail(ds) = s;
  double lam_u = 0.0, lam_s = 0.0;
  for (int i = 0; i < du; ++i) lam_u = std::max(lam_u, 1.0 / h.diag_entry(i));
  for (int i = du; i < h.d(); ++i) lam_s = std::max(lam_s, h.diag_entry(i));
  double bound = std::pow(lam_u, W + 1);
  if (ds > 0) bound = std::max(bound, std::pow(lam_s, W));
  return {x, bound};
}

// -------------------------------------------------------------------------
// Exact Lyapunov data of the diagonal linear part.

struct LyapunovSpectrum {
  std::vector<std::pair<double, int>> exponents;  // (log modulus, multiplicity), descending
  double chi_u_inf = 0.0;   // smallest positive exponent on the unstable side
  double chi_u_max = 0.0;   // largest unstable exponent
  double log_jac_u = 0.0;   // sum of unstable logs
  double log_det_uu = 0.0;
  double log_det_c = 0.0;
};

inline LyapunovSpectrum lyapunov_spectrum(const StandardAffineHorseshoe& h) {
  h.require_hyperbolic();
  LyapunovSpectrum sp;
  std::vector<double> logs;
  for (int i = 0; i < h.d(); ++i) logs.push_back(std::log(h.diag_entry(i)));
  std::vector<double> sorted(logs);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double l : sorted) {
    if (!sp.exponents.empty() && std::abs(sp.exponents.back().first - l) < 1e-15)
      sp.exponents.back().second++;
    else
      sp.exponents.push_back({l, 1});
  }
  sp.chi_u_inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < h.d_u(); ++i) {
    sp.chi_u_inf = std::min(sp.chi_u_inf, logs[i]);
    sp.chi_u_max = std::max(sp.chi_u_max, logs[i]);
    sp.log_jac_u += logs[i];
  }
  for (int i = 0; i < h.d_uu(); ++i) sp.log_det_uu += logs[i];
  for (int i = h.d_uu(); i < h.d_u(); ++i) sp.log_det_c += logs[i];
  return sp;
}

// -------------------------------------------------------------------------
// Entropy hypothesis arithmetic: the almost-Pesin inequality, the exponent
// ratio window for c, and the determinant inequality equivalent to
// beta^(2-c) < (J H)^2.

struct EntropyHypothesisReport {
  bool almost_pesin_ok = false;
  double c = 0.0;
  bool exponent_ratio_ok = false, entropy_floor_ok = false, determinant_gap_ok = false;
  std::map<std::string, double> margins;
};

inline EntropyHypothesisReport blender_entropy_hypothesis(
    const StandardAffineHorseshoe& h, int k, std::optional<double> h_top_opt = std::nullopt) {
  h.require_hyperbolic();
  if (k < 1) throw Error("InvalidArgument", "smoothness k must be >= 1");
  auto sp = lyapunov_spectrum(h);
  double h_top = h_top_opt ? *h_top_opt : std::log(static_cast<double>(h.branch_count()));
  EntropyHypothesisReport rep;
  double almost_pesin_threshold = sp.log_jac_u - sp.chi_u_inf / (2.0 * k);
  rep.margins["almost_pesin"] = h_top - almost_pesin_threshold;
  rep.almost_pesin_ok = rep.margins["almost_pesin"] > 0;
  if (!rep.almost_pesin_ok) return rep;

  // Largest c in (0,1) below the exponent-ratio bound, backed off from the open edge.
  double c_hi = std::min(1.0, sp.chi_u_inf / (k * sp.chi_u_max));
  rep.c = c_hi * (1.0 - 1e-9);
  rep.margins["exponent_ratio"] = sp.chi_u_inf - rep.c * k * sp.chi_u_max;
  rep.exponent_ratio_ok = rep.margins["exponent_ratio"] > 0;
  rep.margins["entropy_floor"] = h_top - (sp.log_jac_u - 0.5 * rep.c * sp.chi_u_max);
  rep.entropy_floor_ok = rep.margins["entropy_floor"] > 0;

  // determinant gap with H = branch_count - 1 and beta = |det A_uu|:
  // log H - log Jac_u > -(c/2) log beta, i.e. beta^(2-c) < (J H)^2.
  int H = h.branch_count() - 1;
  double log_beta = sp.log_det_uu;
  if (H >= 1) {
    rep.margins["determinant_gap"] = std::log(static_cast<double>(H)) - sp.log_jac_u + 0.5 * rep.c * log_beta;
    rep.determinant_gap_ok = rep.margins["determinant_gap"] > 0;
  } else {
    rep.margins["determinant_gap"] = -std::numeric_limits<double>::infinity();
    rep.determinant_gap_ok = false;
  }
  return rep;
}

// -------------------------------------------------------------------------
// Empirical check of the cylinder-hit bound: the number of depth-n center
// compositions whose image contains a point never exceeds beta^n.

struct PlaqueHitReport {
  int max_count = 0;
  double bound = 0.0;
  bool exhaustive = false;
  Vec worst_point;
};

inline PlaqueHitReport plaque_hit_bound_check(const StandardAffineHorseshoe& h, int n, int samples,
                                              std::uint64_t seed) {
  h.require_valid();
  if (h.d_c() < 1) throw Error("UnsupportedDimension", "needs a center factor");
  int dc = h.d_c();
  int du = h.d_u();
  int branches = h.branch_count();

  // Forward center map of branch j (inverse of the center contraction).
  auto forward = [&](int j, Vec z) {
    for (int i = 0; i < dc; ++i) {
      int k = h.d_uu() + i;
      z[i] = h.diag_entry(k) * (z[i] - h.translation(j)[k]);
    }
    return z;
  };
  auto in_cube = [&](const Vec& z) {
    for (int i = 0; i < dc; ++i)
      if (z[i] < -1e-12 || z[i] > 1.0 + 1e-12) return false;
    return true;
  };
  // Counts words (j_1..j_n) with x in the image of the composition; walking
  // from the outer factor inward turns membership into a pruned preimage DFS.
  auto count_hits = [&](const Vec& x) {
    struct Rec {
      int dc, branches;
      std::function<Vec(int, Vec)> fwd;
      std::function<bool(const Vec&)> inside;
      int operator()(const Vec& z, int depth) const {
        if (!inside(z)) return 0;
        if (depth == 0) return 1;
        int total = 0;
        for (int j = 0; j < branches; ++j) total += (*this)(fwd(j, z), depth - 1);
        return total;
      }
    };
    Rec rec{dc, branches, forward, in_cube};
    return rec(x, n);
  };

  PlaqueHitReport rep;
  rep.bound = std::ceil(std::pow(h.beta(), n));
  rep.exhaustive = std::pow(static_cast<double>(branches), n) <= 1e6;

  auto rng = make_rng(seed, "plaque-hit");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> points;
  for (int s = 0; s < samples; ++s) {
    Vec x(dc);
    for (int i = 0; i < dc; ++i) x[i] = unif(rng);
    points.push_back(x);
  }
  // Midpoints of depth-1 center images are natural high-multiplicity probes.
  for (int j = 0; j < branches; ++j) {
    Vec mid(dc);
    for (int i = 0; i < dc; ++i) {
      int k = h.d_uu() + i;
      mid[i] = 0.5 / h.diag_entry(k) + h.translation(j)[k];
    }
    points.push_back(mid);
  }
  (void)du;
  for (const auto& x : points) {
    int c = count_hits(x);
    if (c > rep.max_count) {
      rep.max_count = c;
      rep.worst_point = x;
    }
  }
  if (rep.max_count > rep.bound)
    throw Error("BoundViolated", "cylinder-hit count " + std::to_string(rep.max_count) +
                                     " exceeds beta^n = " + std::to_string(rep.bound));
  return rep;
}

// -------------------------------------------------------------------------
// Center-attractor dichotomy. For an affine model the attractor diameter of
// the center system is a closed-form geometric series; zero diameter means
// the strong-unstable and stable laminations are jointly integrable.

struct EssentialCenterReport {
  bool essential = false;
  double center_diameter = 0.0;
};

inline EssentialCenterReport essential_center_test(const StandardAffineHorseshoe& h, double tol) {
  if (h.d_c() != 1) throw Error("UnsupportedDimension", "center factor must be one-dimensional");
  h.require_valid();
  int k = h.d_uu();
  double rate = 1.0 / h.diag_entry(k);  // center contraction of the branch inverses
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int j = 0; j < h.branch_count(); ++j) {
    double t = h.translation(j)[k];  // center translate of T_j
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  EssentialCenterReport rep;
  rep.center_diameter = (hi - lo) / (1.0 - rate);
  rep.essential = rep.center_diameter >= tol;
  return rep;
}

// -------------------------------------------------------------------------
// Unstable disintegration: interval-valued mass of balls in an unstable
// slice, by conservative cylinder subdivision.

struct MassInterval {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
};

struct SelfSimilarUnstableMeasure {
  Vec weights;  // probability over branches
  static SelfSimilarUnstableMeasure uniform(int branches) {
    SelfSimilarUnstableMeasure m;
    m.weights = Vec::Constant(branches, 1.0 / branches);
    return m;
  }
};

inline MassInterval unstable_ball_mass(const StandardAffineHorseshoe& h,
                                       const Itinerary& base_itinerary, double r,
                                       double resolution = 1e-4,
                                       std::optional<SelfSimilarUnstableMeasure> measure = {},
                                       int max_depth = 60) {
  h.require_valid();
  auto mu = measure ? *measure : SelfSimilarUnstableMeasure::uniform(h.branch_count());
  if (std::abs(mu.weights.sum() - 1.0) > 1e-12)
    throw Error("InvalidArgument", "branch weights must sum to 1");
  auto coded = point_from_itinerary(h, base_itinerary);
  int du = h.d_u();
  if (r <= 0.0) return {0.0, 0.0};

  // Center-error of the coded point shrinks the certified ball both ways.
  double err = coded.error_bound;
  Box ball_outer(du), ball_inner(du);
  for (int i = 0; i < du; ++i) {
    double c = coded.point[i];
    ball_outer.axes[i] = {round_down(c - r - err), round_up(c + r + err)};
    ball_inner.axes[i] = {round_up(c - r + err), round_down(c + r - err)};
  }

  MassInterval total{0.0, 0.0};
  // Each frame carries the composed contraction of its cylinder word, with
  // new branch maps appended on the inner side so children boxes nest.
  struct Frame {
    Vec scale, offset;  // cylinder box = offset + scale * [0,1] per axis
    double weight;
    int depth;
  };
  Frame root{Vec::Ones(du), Vec::Zero(du), 1.0, 0};
  std::vector<Frame> stack{root};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    Box box(du);
    for (int i = 0; i < du; ++i)
      box.axes[i] = {round_down(f.offset[i]), round_up(f.offset[i] + f.scale[i])};
    if (!box.intersects(ball_outer)) continue;
    if (!ball_inner.empty() && ball_inner.contains(box)) {
      total.lo += f.weight;
      total.hi += f.weight;
      continue;
    }
    if (f.weight <= resolution * 0.5 || f.depth >= max_depth) {
      total.hi += f.weight;  // undecided cylinder
      continue;
    }
    for (int j = 0; j < h.branch_count(); ++j) {
      Frame child;
      child.scale = Vec(du);
      child.offset = Vec(du);
      for (int i = 0; i < du; ++i) {
        child.scale[i] = f.scale[i] / h.diag_entry(i);
        child.offset[i] = f.offset[i] + f.scale[i] * h.translation(j)[i];
      }
      child.weight = f.weight * mu.weights[j];
      child.depth = f.depth + 1;
      stack.push_back(child);
    }
  }
  if (total.width() > std::max(resolution * h.branch_count(), 1e-12) * 16)
    throw Error("ResolutionExceeded", "ball mass uncertainty " + std::to_string(total.width()));
  return total;
}

// -------------------------------------------------------------------------
// Search for a reverse-doubling certificate (eta r)-balls carrying less than
// half the mass of r-balls, with interval-rigorous comparisons.

struct ReverseDoublingResult {
  bool certified = false;
  double rho = 0.0, eta = 0.0;
  double worst_ratio = 0.0;  // max over tested (x, r) of hi(small)/lo(big)
  int tested_points = 0;
};

inline ReverseDoublingResult reverse_doubling_search(
    const StandardAffineHorseshoe& h, const std::vector<double>& rho_grid,
    const std::vector<double>& eta_grid, int samples, std::uint64_t seed,
    double resolution = 1e-4, int radii_per_rho = 6) {
  auto ess = essential_center_test(h, 1e-9);
  if (!ess.essential)
    throw Error("PreconditionFailed", "reverse doubling needs an essential center");
  h.require_valid();

  auto rng = make_rng(seed, "reverse-doubling");
  std::uniform_int_distribution<int> branch(0, h.branch_count() - 1);
  int W = 40;
  std::vector<Itinerary> xs;
  for (int s = 0; s < samples; ++s) {
    Itinerary it;
    it.W = W;
    it.symbols.resize(2 * W + 1);
    for (auto& sym : it.symbols) sym = branch(rng);
    xs.push_back(it);
  }

  ReverseDoublingResult best;
  best.worst_ratio = std::numeric_limits<double>::infinity();
  for (double rho : rho_grid) {
    for (double eta : eta_grid) {
      if (!(eta > 0 && eta < 1)) continue;
      double worst = 0.0;
      bool ok = true;
      int tested = 0;
      for (const auto& x : xs) {
        for (int i = 0; i < radii_per_rho && ok; ++i) {
          double r = rho * std::pow(0.7, i);
          auto big = unstable_ball_mass(h, x, r, resolution);
          auto small = unstable_ball_mass(h, x, eta * r, resolution);
          ++tested;
          if (big.lo <= 0) {
            ok = false;
            break;
          }
          double ratio = small.hi / big.lo;
          worst = std::max(worst, ratio);
          if (!(small.hi < 0.5 * big.lo)) ok = false;
        }
        if (!ok) break;
      }
      if (ok) {
        ReverseDoublingResult res;
        res.certified = true;
        res.rho = rho;
        res.eta = eta;
        res.worst_ratio = worst;
        res.tested_points = tested;
        return res;
      }
      if (worst < best.worst_ratio && worst > 0) {
        best.certified = false;
        best.rho = rho;
        best.eta = eta;
        best.worst_ratio = worst;
        best.tested_points = tested;
      }
    }
  }
  return best;
}

// The canonical 3-d model used across the test suite: diag(4, 3/2, 1/4)
// with two branches whose center system is the overlapping pair of
// contractions with rate 2/3 and translates +-1/6 in the centered frame.
inline StandardAffineHorseshoe make_blender_model() {
  Vec diag(3);
  diag << 4.0, 1.5, 0.25;
  Vec v0(3), v1(3);
  v0 << 0.0, 0.0, 0.0;
  v1 << 0.75, 1.0 / 3.0, 0.75;
  return StandardAffineHorseshoe(1, 1, 1, diag, {v0, v1});
}

// Same unstable/stable frame with a shared center translate: the center
// attractor is a point and the laminations are jointly integrable.
inline StandardAffineHorseshoe make_jointly_integrable_model() {
  Vec diag(3);
  diag << 4.0, 1.5, 0.25;
  Vec v0(3), v1(3);
  v0 << 0.0, 0.0, 0.0;
  v1 << 0.75, 0.0, 0.75;
  return StandardAffineHorseshoe(1, 1, 1, diag, {v0, v1});
}

// The classical planar two-branch model.
inline StandardAffineHorseshoe make_smale_model() {
  Vec diag(2);
  diag << 4.0, 0.25;
  Vec v0(2), v1(2);
  v0 << 0.0, 0.0;
  v1 << 0.75, 0.75;
  return StandardAffineHorseshoe(1, 0, 1, diag, {v0, v1});
}

}  // namespace smale
