// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here. Golden values frozen from seeded runs are
// marked as such next to the assertion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smale/blender.hpp"
#include "smale/center_ifs.hpp"
#include "smale/circle_cover.hpp"
#include "smale/cocycle.hpp"
#include "smale/horseshoe.hpp"
#include "smale/katok.hpp"
#include "smale/shadowing.hpp"
#include "smale/subshift.hpp"

using namespace smale;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream log;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      log << (log.str().empty() ? "" : "; ") << what;
    }
  }
};

GridSet interval_grid(long cells, double lo, double hi) {
  GridSet g(1, cells, Box::centered_unit(1));
  for (long i = 0; i < cells; ++i) {
    double a = -0.5 + static_cast<double>(i) / cells;
    double b = a + 1.0 / cells;
    if (a >= lo - 1e-12 && b <= hi + 1e-12) g.set(i, true);
  }
  return g;
}

CenterIfs scalar_ifs(double rate, std::vector<double> translations) {
  CenterIfs ifs;
  ifs.rates = Vec::Constant(1, rate);
  for (double t : translations) ifs.translations.push_back(Vec::Constant(1, t));
  return ifs;
}

int scan_occurrences(const Word& text, const Word& pat) {
  int count = 0;
  for (size_t s = 0; s + pat.size() <= text.size(); ++s) {
    bool m = true;
    for (size_t i = 0; i < pat.size() && m; ++i) m = text[s + i] == pat[i];
    if (m) ++count;
  }
  return count;
}

// Dense linear-system oracle for the bounded deviation solve.
std::vector<Vec> dense_bounded_solution(const HyperbolicSequence& seq, const std::vector<Vec>& e) {
  int N = seq.steps(), d = seq.d(), du = seq.d_u();
  int unknowns = (N + 1) * d;
  Mat A = Mat::Zero(unknowns, unknowns);
  Vec rhs = Vec::Zero(unknowns);
  int row = 0;
  for (int i = 0; i < N; ++i) {
    int n = seq.n0() + i;
    for (int a = 0; a < d; ++a) {
      A(row, (i + 1) * d + a) = 1.0;
      for (int b = 0; b < d; ++b) {
        double lab = 0.0;
        if (a < du && b < du) lab = seq.lu(n)(a, b);
        if (a >= du && b >= du) lab = seq.ls(n)(a - du, b - du);
        A(row, i * d + b) -= lab;
      }
      rhs[row] = e[i][a];
      ++row;
    }
  }
  for (int a = du; a < d; ++a) A(row++, a) = 1.0;
  for (int a = 0; a < du; ++a) A(row++, N * d + a) = 1.0;
  Vec sol = A.fullPivLu().solve(rhs);
  std::vector<Vec> u(N + 1, Vec::Zero(d));
  for (int i = 0; i <= N; ++i) u[i] = sol.segment(i * d, d);
  return u;
}

// --------------------------------------------------------------------------

void criterion_1_entropy(Check& c) {
  for (int n = 1; n <= 64; ++n) {
    double h = SubshiftOfFiniteType::full_shift(n).top_entropy();
    c.require(std::abs(h - std::log(double(n))) <= 1e-12,
              "full " + std::to_string(n) + "-shift entropy off by more than 1e-12");
  }
  double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  double h = SubshiftOfFiniteType::golden_mean().top_entropy();
  c.require(std::abs(h - std::log(phi)) <= 1e-10, "golden-mean entropy off by more than 1e-10");
}

void criterion_2_extraction(Check& c) {
  auto sft = SubshiftOfFiniteType::full_shift(2);
  auto ext = extract_full_shift(sft, 0.3);
  c.require(!ext.degenerate, "extraction degenerate");
  c.require(ext.embedded_entropy() > std::log(2.0) - 0.3, "entropy slack bound fails");
  Word ww(ext.marker);
  ww.insert(ww.end(), ext.marker.begin(), ext.marker.end());
  c.require(scan_occurrences(ww, ext.marker) == 2, "marker self-overlaps");
  c.require(ext.verify_disjointness(), "shift disjointness certificate fails");
  c.require(ext.verify_concatenations(sft), "concatenation admissibility fails");
  // empirical double-marker scan across sampled concatenations
  std::mt19937_64 rng(11);
  double total = std::exp(ext.log_word_count());
  Word text;
  for (int i = 0; i < 5; ++i) {
    auto w = ext.word_at(static_cast<std::uint64_t>(rng() % (std::uint64_t)total));
    text.insert(text.end(), w.begin(), w.end());
  }
  for (size_t s = 0; s + ww.size() <= text.size(); ++s) {
    bool m = true;
    for (size_t i = 0; i < ww.size() && m; ++i) m = text[s + i] == ww[i];
    if (m) c.require(s % ext.k == 0, "double marker at a non-multiple of k");
  }
}

void criterion_3_circle(Check& c) {
  std::mt19937_64 rng(20240817);
  for (int trial = 0; trial < 1000; ++trial) {
    int d = 1 + static_cast<int>(rng() % 8);
    std::vector<Rational> X;
    for (int i = 0; i < d; ++i) {
      long den = (rng() % 2) ? 64 : 1000003;
      X.push_back(Rational(static_cast<long>(rng() % den), den));
    }
    long aden = 5 + static_cast<long>(rng() % 995);
    long anum = 1 + static_cast<long>(rng() % ((aden - 1) / 2));
    Rational a(anum, aden);
    if (!(a > 0 && a < Rational(1, 2))) continue;
    CircleCover cover = cover_circle(X, a);  // throws on any violated postcondition
    int dd = static_cast<int>(cover.points.size());
    Rational lo = rational_pow(a / 2, dd) / rational_pow(Rational(dd), 2 * dd);
    c.require(cover.kappa >= lo && cover.kappa <= a / 2, "kappa outside the bracket");
    if (auto why = verify_cover(cover)) c.require(false, *why);
  }
}

void criterion_4_shadowing(Check& c) {
  // closed-form single-jump example, exact values
  {
    HyperbolicSequence seq(-5, 6, 1, 1);
    for (int n = -5; n < 6; ++n) {
      Mat u(1, 1), s(1, 1);
      u << 2.0;
      s << 0.5;
      Vec b = Vec::Zero(2);
      if (n == 0) b << -1.0, -1.0;
      seq.set_step(n, u, s, b);
    }
    PseudoOrbit po;
    po.n0 = -5;
    po.points.assign(12, Vec::Zero(2));
    auto orbit = shadow_affine(seq, po);
    c.require(orbit.at(0)[0] == 0.5 && orbit.at(0)[1] == 0.0, "u_0 != (0.5, 0)");
    c.require(orbit.at(1)[0] == 0.0 && orbit.at(1)[1] == -1.0, "u_1 != (0, -1)");
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  for (double kappa : {std::log(2.0), 1.0}) {
    for (int trial = 0; trial < 100; ++trial) {
      HyperbolicSequence seq(0, 30, 1, 1);
      std::uniform_real_distribution<double> extra(0.0, 1.0);
      for (int n = 0; n < 30; ++n) {
        Mat u(1, 1), s(1, 1);
        u << std::exp(kappa + extra(rng));
        s << std::exp(-kappa - extra(rng));
        Vec b(2);
        b << 0.5 * off(rng), 0.5 * off(rng);
        seq.set_step(n, u, s, b);
      }
      PseudoOrbit base;
      base.n0 = 0;
      base.points.assign(31, Vec::Zero(2));
      auto bounded = shadow_affine(seq, base);
      PseudoOrbit po;
      po.n0 = 0;
      for (int n = 0; n <= 30; ++n) {
        Vec x = bounded.at(n);
        x[0] += 1e-3 * off(rng);
        x[1] += 1e-3 * off(rng);
        po.points.push_back(x);
      }
      auto orbit = shadow_affine(seq, po);
      double theta = 1.0 / (1.0 - std::exp(-seq.kappa()));
      c.require(orbit.orbit_residual(seq) <= 1e-12, "orbit residual above 1e-12");
      c.require(orbit.max_deviation <= theta * po.max_jump(seq) + 1e-12,
                "deviation above theta eps");
      std::vector<Vec> e(30);
      for (int i = 0; i < 30; ++i) e[i] = seq.apply(i, po.at(i)) - po.at(i + 1);
      auto dense = dense_bounded_solution(seq, e);
      for (int i = 0; i <= 30; ++i)
        c.require(sup_norm(orbit.at(i) - (po.at(i) + dense[i])) <= 1e-10,
                  "banded-solve oracle disagrees beyond 1e-10");
      // uniqueness decay against a second true orbit
      ShadowOrbit other;
      other.n0 = 0;
      Vec y = orbit.at(0);
      y[1] += 0.05;
      for (int n = 0; n <= 30; ++n) {
        other.points.push_back(y);
        if (n < 30) y = seq.apply(n, y);
      }
      auto decay = uniqueness_decay_check(seq, orbit, other, 0, 30);
      c.require(decay.pass, "uniqueness decay inequality fails");
    }
  }
}

void criterion_5_recurrent(Check& c) {
  auto overlap = scalar_ifs(2.0 / 3.0, {-1.0 / 6.0, 1.0 / 6.0});
  auto disjoint = scalar_ifs(1.0 / 3.0, {-1.0 / 3.0, 1.0 / 3.0});
  for (long cells : {1000L, 2000L, 4000L}) {
    auto K = interval_grid(cells, -0.4, 0.4);
    c.require(recurrent_compact_check(overlap, K).certified,
              "overlap system not certified at " + std::to_string(cells) + " cells");
    c.require(search_recurrent_compact(overlap, cells).has_value(),
              "overlap search empty at " + std::to_string(cells) + " cells");
    c.require(!search_recurrent_compact(disjoint, cells).has_value(),
              "disjoint search nonempty at " + std::to_string(cells) + " cells");
  }
}

void criterion_6_perturb(Check& c) {
  auto ifs = scalar_ifs(0.5, {0.0, -0.24, 0.0, 0.24});  // J = 1/2, H = 3
  double J = ifs.det();
  int H = ifs.branch_count_nonbase();
  c.require(std::pow(1.0, 2.0 - 0.5) < std::pow(J * H, 2.0), "beta hypothesis fails");
  auto claim = coverage_claim_bruteforce(ifs, 2, 1.0);
  c.require(claim.threshold_count == 1, "threshold count != 1");
  c.require(std::abs(claim.alpha_n - 9.0 / 16.0) <= 1e-15, "alpha_2 != 9/16");
  c.require(claim.measure_lower >= 9.0 / 16.0, "measure of A below 9/16");
  auto rep = perturb_and_verify(ifs, 2, 0.5, 1.0, 20, 0);
  // golden values frozen from the seeded run (seed 0, 20 trials)
  c.require(rep.covering_successes == 0,
            "golden covering-condition count changed: " + std::to_string(rep.covering_successes));
  c.require(rep.certified_successes == rep.covering_successes,
            "a covering success failed certification");
  for (const auto& r : rep.records)
    if (r.covering_ok) c.require(r.certified, "a covering success failed certification");
  // nonvacuous successes on the softer system: every success certifies
  auto soft = scalar_ifs(0.75, {0.0, -0.12, 0.0, 0.12});
  auto rep2 = perturb_and_verify(soft, 6, 0.5, 1.0, 10, 7, 400);
  c.require(rep2.covering_successes >= 5, "soft system produced too few successes");
  c.require(rep2.certified_successes == rep2.covering_successes,
            "a soft-system success failed certification");
}

void criterion_7_blender(Check& c) {
  auto h = make_blender_model();
  auto K = interval_grid(1000, -0.4, 0.4);
  c.require(recurrent_compact_check(extract_center_ifs(h), K).certified,
            "center set not certified");
  auto rep = monte_carlo_blender(h, 200, 60, 1e-9, 0);
  c.require(rep.intersect_count == 200,
            "intersections: " + std::to_string(rep.intersect_count) + "/200");
  c.require(rep.recertified_count == 200,
            "recertified: " + std::to_string(rep.recertified_count) + "/200");
  // disjoint-center model: the gap graph escapes at time 1
  Vec diag(3);
  diag << 4.0, 3.0, 0.25;
  Vec v0(3), v1(3);
  v0 << 0.0, 0.0, 0.0;
  v1 << 0.75, 2.0 / 3.0, 0.75;
  StandardAffineHorseshoe gap_model(1, 1, 1, diag, {v0, v1});
  Vec mid(2);
  mid << 0.5, 0.5;
  auto verdict = blender_graph_test(gap_model, LipschitzGraph::constant(1, 2, mid), 60, 1e-9);
  c.require(verdict.kind == BlenderVerdict::Kind::Escapes, "gap graph did not escape");
  c.require(verdict.exit_time == 1, "gap graph exit time != 1");
}

void criterion_8_robustness(Check& c) {
  auto h = make_blender_model();
  auto K = interval_grid(1000, -0.4, 0.4);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto moved = perturb_translations(h, 1e-3, rng);
    auto set = build_transversal_recurrent_set(moved, K);  // throws if not certified
    auto res = transversal_recurrence_check(moved, set, 4);
    c.require(res.certified, "perturbed product set not certified");
  }
}

void criterion_9_hypothesis(Check& c) {
  Vec diag(3);
  diag << 4.0, 2.0, 1.0 / 3.0;
  auto model = [&](int branches) {
    return StandardAffineHorseshoe(1, 1, 1, diag, std::vector<Vec>(branches, Vec::Zero(3)));
  };
  double threshold = std::log(8.0) - 0.5 * std::log(2.0);
  auto rep5 = blender_entropy_hypothesis(model(5), 1);
  c.require(!rep5.almost_pesin_ok, "five branches should fail the almost-Pesin bound");
  c.require(std::abs(rep5.margins.at("almost_pesin") - (std::log(5.0) - threshold)) <= 1e-12,
            "five-branch margin not reproduced to 1e-12");
  c.require(std::abs(rep5.margins.at("almost_pesin") + 0.124) < 2e-3, "five-branch margin far from -0.124");
  auto rep6 = blender_entropy_hypothesis(model(6), 1);
  c.require(rep6.almost_pesin_ok, "six branches should pass the almost-Pesin bound");
  c.require(std::abs(rep6.margins.at("almost_pesin") - (std::log(6.0) - threshold)) <= 1e-12,
            "six-branch margin not reproduced to 1e-12");
  c.require(std::abs(rep6.margins.at("almost_pesin") - 0.059) < 2e-3, "six-branch margin far from +0.059");
  c.require(rep6.exponent_ratio_ok && rep6.margins.at("exponent_ratio") > 0, "exponent-ratio margin not positive");
  c.require(rep6.entropy_floor_ok && rep6.margins.at("entropy_floor") > 0, "entropy-floor margin not positive");
}

void criterion_10_cocycle(Check& c) {
  auto sft = SubshiftOfFiniteType::full_shift(2);
  auto mu = sft.parry_measure();
  {
    Mat d3 = Mat::Zero(2, 2);
    d3(0, 0) = 3.0;
    d3(1, 1) = 1.0 / 3.0;
    auto coc = LocallyConstantCocycle::constant(sft, d3);
    auto rep = lyapunov_exponents(coc, mu, 20, 60, 1);
    c.require(std::abs(rep.exponents[0] - std::log(3.0)) <= 1e-10, "constant top exponent off");
    c.require(std::abs(rep.exponents[1] + std::log(3.0)) <= 1e-10, "constant bottom exponent off");
  }
  {
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 0.5;
    b(0, 0) = 8.0;
    b(1, 1) = 0.125;
    auto coc = LocallyConstantCocycle::from_symbol_map(sft, {a, b});
    auto rep = lyapunov_exponents(coc, mu, 100, 100, 7);
    c.require(std::abs(rep.exponents[0] - 2.0 * std::log(2.0)) <= 3.0 * rep.standard_errors[0],
              "two-cylinder exponent outside 3 standard errors");
  }
  {
    LocallyConstantCocycle coc(sft, -1, 0, 2);
    Mat m00(2, 2), m01(2, 2), m10(2, 2), m11(2, 2);
    m00 << 2.0, 0.1, 0.0, 0.5;
    m01 << 1.5, 0.0, 0.2, 0.8;
    m10 << 1.1, -0.2, 0.0, 0.9;
    m11 << 0.7, 0.0, 0.1, 1.3;
    coc.set_value({0, 0}, m00);
    coc.set_value({0, 1}, m01);
    coc.set_value({1, 0}, m10);
    coc.set_value({1, 1}, m11);
    SymbolicPoint x;
    x.left_period = {0};
    x.right_period = {0, 1};
    SymbolicPoint y;
    y.left_period = {1};
    y.right_period = {0, 1};
    auto H = holonomy(coc, x, y, "stable", 1e-12, 32);
    c.require(H.converged, "holonomy did not converge");
    c.require((H.matrix - m10.inverse() * m00).operatorNorm() <= 1e-10,
              "surviving-factor holonomy off beyond 1e-10");
    auto zero_window = LocallyConstantCocycle::from_symbol_map(sft, {m00, m01});
    auto H2 = holonomy(zero_window, x, y, "stable", 1e-12, 32);
    c.require((H2.matrix - Mat::Identity(2, 2)).operatorNorm() <= 1e-10,
              "telescoping identity holonomy off beyond 1e-10");
  }
  {
    Mat d21 = Mat::Zero(2, 2);
    d21(0, 0) = 2.0;
    d21(1, 1) = 1.0;
    Mat rot(2, 2);
    rot << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
    c.require(!common_invariant_measure_test(d21, rot).exists,
              "diag/rotation pair should have no common measure");
    c.require(common_invariant_measure_test(d21, d21).exists,
              "equal matrices should share a measure");
  }
}

void criterion_11_katok(Check& c) {
  auto sys = FiniteMetricSystem::make(SubshiftOfFiniteType::full_shift(2),
                                      {CylinderIndicator{{0}}});
  ReturnSetParams prm;
  prm.delta = 0.2;
  prm.gamma = 0.3;
  prm.xi = 0.04;
  prm.rho_j = 1;
  prm.ball_half_width = 0;
  auto ret = select_return_set(sys, prm);
  double h = sys.mu.entropy_rate();
  c.require(static_cast<double>(ret.points.size()) >= std::exp(ret.N * (h - prm.delta)),
            "return set below exp(N (h - delta))");
  auto v = verify_return_set(sys, ret, prm.gamma, 200000, 5);
  c.require(v.separation, "separation certificate fails");
  c.require(v.returns, "return certificate fails");
  c.require(v.birkhoff, "birkhoff certificate fails");
  auto horse = assemble_horseshoe(sys, ret);
  c.require(std::abs(horse.entropy -
                     std::log(double(ret.points.size())) / ret.N) <= 1e-15,
            "assembled entropy is not (1/N) log #Y");
  c.require(horse.entropy > std::log(2.0) - 0.2, "assembled entropy below the floor");
}

void criterion_12_reverse_doubling(Check& c) {
  auto h = make_blender_model();
  auto res = reverse_doubling_search(h, {0.05}, {0.12}, 3, 1, 2e-4);
  // golden pair frozen from the seeded run
  c.require(res.certified, "no certificate found");
  c.require(res.rho == 0.05 && res.eta == 0.12, "certified pair drifted from the golden values");
  c.require(res.worst_ratio < 0.5, "worst mass ratio not below 1/2");
  bool rejected = false;
  try {
    reverse_doubling_search(make_jointly_integrable_model(), {0.05}, {0.12}, 2, 1, 2e-4);
  } catch (const Error& e) {
    rejected = e.kind() == "PreconditionFailed";
  }
  c.require(rejected, "jointly integrable model not rejected");
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<void(Check&)> run;
    double budget_seconds;
  };
  std::vector<Criterion> criteria = {
      {"1 entropy exactness", criterion_1_entropy, 1.0},
      {"2 full-shift extraction", criterion_2_extraction, 10.0},
      {"3 circle covers (1000 exact instances)", criterion_3_circle, 30.0},
      {"4 uniform shadowing", criterion_4_shadowing, 60.0},
      {"5 recurrent compact certification", criterion_5_recurrent, 5.0},
      {"6 composite perturbation pipeline", criterion_6_perturb, 60.0},
      {"7 blender criterion (200 graphs)", criterion_7_blender, 120.0},
      {"8 robustness probe (20 perturbations)", criterion_8_robustness, 60.0},
      {"9 entropy hypothesis arithmetic", criterion_9_hypothesis, 5.0},
      {"10 cocycle suite", criterion_10_cocycle, 60.0},
      {"11 return-set pipeline", criterion_11_katok, 120.0},
      {"12 reverse doubling", criterion_12_reverse_doubling, 60.0},
  };

  int failures = 0;
  for (auto& crit : criteria) {
    Check check;
    auto t0 = std::chrono::steady_clock::now();
    try {
      crit.run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > crit.budget_seconds)
      check.require(false, "runtime " + std::to_string(elapsed) + "s over budget");
    if (check.ok) {
      std::printf("[PASS] criterion %s (%.2fs)\n", crit.name.c_str(), elapsed);
    } else {
      std::printf("[FAIL] criterion %s (%.2fs): %s\n", crit.name.c_str(), elapsed,
                  check.log.str().c_str());
      ++failures;
    }
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d acceptance criteria failed\n", failures);
  return failures;
}
