#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "smale/horseshoe.hpp"

using namespace smale;

namespace {

StandardAffineHorseshoe make_model_421(int branch_count) {
  // diag(4, 2, 1/3) with d_uu = d_c = d_s = 1. Spectral data only; the
  // packing is irrelevant for the hypothesis arithmetic.
  Vec diag(3);
  diag << 4.0, 2.0, 1.0 / 3.0;
  std::vector<Vec> branches;
  for (int j = 0; j < branch_count; ++j) {
    Vec v(3);
    v << 0.0, 0.0, 0.0;
    branches.push_back(v);
  }
  return StandardAffineHorseshoe(1, 1, 1, diag, branches);
}

}  // namespace

TEST_CASE("validation of the classical planar model") {
  auto h = make_smale_model();
  auto rep = h.validate();
  CHECK(rep.valid());
  auto r0 = h.unstable_subrect(0);
  auto r1 = h.unstable_subrect(1);
  CHECK(r0.axes[0].lo == Catch::Approx(0.0));
  CHECK(r0.axes[0].hi == Catch::Approx(0.25));
  CHECK(r1.axes[0].lo == Catch::Approx(0.75));
  CHECK(r1.axes[0].hi == Catch::Approx(1.0));
}

TEST_CASE("overlapping unstable sub-rectangles invalidate the model") {
  Vec diag(2);
  diag << 4.0, 0.25;
  Vec v0(2), v1(2);
  v0 << 0.0, 0.0;
  v1 << 0.1, 0.75;  // [0.1, 0.35] overlaps [0, 0.25]
  StandardAffineHorseshoe h(1, 0, 1, diag, {v0, v1});
  auto rep = h.validate();
  CHECK_FALSE(rep.valid());
  CHECK(rep.first_violation() == "unstable sub-rectangles disjoint");
}

TEST_CASE("unit expansion entry gives margin zero") {
  Vec diag(2);
  diag << 1.0, 0.25;
  Vec v0(2);
  v0 << 0.0, 0.0;
  StandardAffineHorseshoe h(1, 0, 1, diag, {v0});
  auto rep = h.validate();
  CHECK_FALSE(rep.valid());
  CHECK(rep.clauses[0].name == "unstable expansion margin");
  CHECK(rep.clauses[0].margin == Catch::Approx(0.0));
}

TEST_CASE("coded point of the constant itinerary is the branch fixed point") {
  auto h = make_smale_model();
  auto coded = point_from_itinerary(h, Itinerary::constant(0, 20));
  CHECK(std::abs(coded.point[0]) <= coded.error_bound);
  CHECK(std::abs(coded.point[1]) <= coded.error_bound);
}

TEST_CASE("coded point matches long contraction iteration") {
  auto h = make_smale_model();
  // itinerary ...000 . 111...: unstable coordinate is the fixed point of
  // T_1, reached here by iterating the contraction 10^4 times.
  Itinerary it;
  it.W = 30;
  it.symbols.assign(61, 0);
  for (int t = 0; t <= 30; ++t) it.symbols[t + 30] = 1;
  auto coded = point_from_itinerary(h, it);
  double z = 0.5;
  for (int i = 0; i < 10000; ++i) z = z / 4.0 + 0.75;
  CHECK(coded.point[0] == Catch::Approx(z).margin(2 * coded.error_bound + 1e-15));
  CHECK(coded.point[1] == Catch::Approx(0.0).margin(2 * coded.error_bound + 1e-15));
}

TEST_CASE("widening the window moves the point less than the bound") {
  auto h = make_blender_model();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Itinerary it;
    it.W = 12;
    it.symbols.resize(25);
    for (auto& s : it.symbols) s = rng() % 2;
    auto c1 = point_from_itinerary(h, it);
    Itinerary wider;
    wider.W = 17;
    wider.symbols.assign(35, 0);
    for (int t = -12; t <= 12; ++t) wider.symbols[t + 17] = it.at(t);
    for (int t = 13; t <= 17; ++t) {
      wider.symbols[t + 17] = static_cast<int>(rng() % 2);
      wider.symbols[-t + 17] = static_cast<int>(rng() % 2);
    }
    auto c2 = point_from_itinerary(h, wider);
    CHECK(sup_norm(c1.point - c2.point) <= c1.error_bound + 1e-15);
  }
}

TEST_CASE("coding conjugacy: f(point(w)) tracks point(shifted w)") {
  auto h = make_blender_model();
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Itinerary it;
    it.W = 14;
    it.symbols.resize(29);
    for (auto& s : it.symbols) s = static_cast<int>(rng() % 2);
    auto x = point_from_itinerary(h, it);
    Vec fx = h.apply(it.at(0), x.point);
    auto y = point_from_itinerary(h, it.shifted());
    CHECK(sup_norm(fx - y.point) <= 2 * (h.diag_entry(0) * x.error_bound + y.error_bound));
  }
}

TEST_CASE("lyapunov spectrum of diag(4, 2, 1/3)") {
  auto h = make_model_421(1);
  auto sp = lyapunov_spectrum(h);
  REQUIRE(sp.exponents.size() == 3);
  CHECK(sp.exponents[0].first == Catch::Approx(std::log(4.0)));
  CHECK(sp.exponents[1].first == Catch::Approx(std::log(2.0)));
  CHECK(sp.exponents[2].first == Catch::Approx(-std::log(3.0)));
  CHECK(sp.chi_u_inf == Catch::Approx(std::log(2.0)));
  CHECK(sp.chi_u_max == Catch::Approx(std::log(4.0)));
  CHECK(sp.log_jac_u == Catch::Approx(std::log(8.0)));
  CHECK(sp.log_det_uu == Catch::Approx(std::log(4.0)));
  CHECK(sp.log_det_c == Catch::Approx(std::log(2.0)));
}

TEST_CASE("lyapunov spectrum in natural units") {
  Vec diag(2);
  diag << std::exp(1.0), std::exp(-1.0);
  Vec v0(2);
  v0 << 0.0, 0.0;
  StandardAffineHorseshoe h(1, 0, 1, diag, {v0});
  auto sp = lyapunov_spectrum(h);
  CHECK(sp.exponents[0].first == Catch::Approx(1.0));
  CHECK(sp.exponents[1].first == Catch::Approx(-1.0));
}

TEST_CASE("entropy hypothesis arithmetic for diag(4, 2, 1/3), k = 1") {
  double threshold = std::log(8.0) - 0.5 * std::log(2.0);
  auto rep6 = blender_entropy_hypothesis(make_model_421(6), 1);
  CHECK(rep6.almost_pesin_ok);
  CHECK(rep6.margins["almost_pesin"] == Catch::Approx(std::log(6.0) - threshold).margin(1e-12));
  CHECK(rep6.exponent_ratio_ok);
  CHECK(rep6.margins["exponent_ratio"] > 0);
  CHECK(rep6.entropy_floor_ok);
  CHECK(rep6.margins["entropy_floor"] > 0);
  CHECK(rep6.c < std::log(2.0) / std::log(4.0));
  CHECK(rep6.c > 0.49);

  auto rep5 = blender_entropy_hypothesis(make_model_421(5), 1);
  CHECK_FALSE(rep5.almost_pesin_ok);
  CHECK(rep5.margins["almost_pesin"] == Catch::Approx(std::log(5.0) - threshold).margin(1e-12));
}

TEST_CASE("entropy hypothesis is monotone in the branch count") {
  bool seen_ok = false;
  for (int b = 2; b <= 12; ++b) {
    auto rep = blender_entropy_hypothesis(make_model_421(b), 1);
    if (seen_ok) CHECK(rep.almost_pesin_ok);
    seen_ok = seen_ok || rep.almost_pesin_ok;
  }
  CHECK(seen_ok);
}

TEST_CASE("hypothesis collapses as smoothness grows") {
  // Threshold approaches log Jac_u, which log 6 does not reach.
  auto rep = blender_entropy_hypothesis(make_model_421(6), 50);
  CHECK_FALSE(rep.almost_pesin_ok);
}

TEST_CASE("plaque hit bound") {
  SECTION("disjoint center images give count 1") {
    Vec diag(2);
    diag << 4.0, 3.0;
    Vec v0(2), v1(2);
    v0 << 0.0, 0.0;
    v1 << 0.75, 2.0 / 3.0;
    StandardAffineHorseshoe h(1, 1, 0, diag, {v0, v1});
    auto rep = plaque_hit_bound_check(h, 3, 50, 11);
    CHECK(rep.max_count == 1);
  }
  SECTION("two overlapping center branches, beta = 2, depth 3") {
    Vec diag(2);
    diag << 2.0, 1.5;
    Vec v0(2), v1(2);
    v0 << 0.0, 0.0;
    v1 << 0.5, 1.0 / 3.0;
    StandardAffineHorseshoe h(1, 1, 0, diag, {v0, v1});
    REQUIRE(h.validate().valid());
    auto rep = plaque_hit_bound_check(h, 3, 100, 12);
    CHECK(rep.exhaustive);
    CHECK(rep.max_count <= 8);
    CHECK(rep.max_count >= 2);  // the images genuinely overlap
  }
  SECTION("depth 0 counts the empty composition") {
    auto rep = plaque_hit_bound_check(make_blender_model(), 0, 5, 13);
    CHECK(rep.max_count == 1);
  }
}

TEST_CASE("essential center dichotomy") {
  SECTION("shared center translate is jointly integrable") {
    auto rep = essential_center_test(make_jointly_integrable_model(), 1e-9);
    CHECK_FALSE(rep.essential);
    CHECK(rep.center_diameter == Catch::Approx(0.0));
  }
  SECTION("rate 2/3 with translates 1/3 apart has attractor diameter 1") {
    auto rep = essential_center_test(make_blender_model(), 1e-9);
    CHECK(rep.essential);
    CHECK(rep.center_diameter == Catch::Approx(1.0));
  }
  SECTION("single branch") {
    Vec diag(3);
    diag << 4.0, 1.5, 0.25;
    Vec v0(3);
    v0 << 0.0, 0.0, 0.0;
    StandardAffineHorseshoe h(1, 1, 1, diag, {v0});
    auto rep = essential_center_test(h, 1e-9);
    CHECK_FALSE(rep.essential);
  }
  SECTION("center dimension must be 1") {
    Vec diag(3);
    diag << 4.0, 1.5, 1.5;
    Vec v0(3);
    v0 << 0.0, 0.0, 0.0;
    StandardAffineHorseshoe h(1, 2, 0, diag, {v0});
    CHECK_THROWS_AS(essential_center_test(h, 1e-9), Error);
  }
}

TEST_CASE("unstable ball mass on the planar model") {
  auto h = make_smale_model();
  auto base = Itinerary::constant(0, 25);
  SECTION("ball over one depth-1 cylinder carries half the mass") {
    auto m = unstable_ball_mass(h, base, 0.3, 1e-5);
    CHECK(m.lo <= 0.5);
    CHECK(m.hi >= 0.5);
    CHECK(m.width() < 1e-3);
  }
  SECTION("large balls carry full mass, zero radius none") {
    auto full = unstable_ball_mass(h, base, 2.0, 1e-5);
    CHECK(full.lo == Catch::Approx(1.0));
    auto zero = unstable_ball_mass(h, base, 0.0, 1e-5);
    CHECK(zero.hi == 0.0);
  }
  SECTION("monotone in the radius") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(0.01, 1.2);
    for (int t = 0; t < 15; ++t) {
      double r1 = unif(rng), r2 = unif(rng);
      if (r1 > r2) std::swap(r1, r2);
      auto m1 = unstable_ball_mass(h, base, r1, 1e-4);
      auto m2 = unstable_ball_mass(h, base, r2, 1e-4);
      CHECK(m1.lo <= m2.hi + 1e-12);
    }
  }
  SECTION("depth-1 cylinder mass equals its branch weight") {
    // Ball centered at the fixed point of branch 0 of width exactly the
    // first cylinder: [0, 1/4] lies inside radius 0.26, branch 1 outside.
    auto m = unstable_ball_mass(h, base, 0.26, 1e-6);
    CHECK(m.lo == Catch::Approx(0.5).margin(1e-4));
    CHECK(m.hi == Catch::Approx(0.5).margin(1e-4));
  }
}

TEST_CASE("reverse doubling search on the essential model") {
  auto h = make_blender_model();
  auto res = reverse_doubling_search(h, {0.05}, {0.12}, 3, 1, 2e-4);
  CHECK(res.certified);
  CHECK(res.worst_ratio < 0.5);
}

TEST_CASE("reverse doubling rejects the jointly integrable model") {
  CHECK_THROWS_AS(
      reverse_doubling_search(make_jointly_integrable_model(), {0.1}, {0.3}, 2, 1),
      Error);
}

TEST_CASE("reverse doubling fails when eta approaches 1") {
  auto h = make_blender_model();
  // With rho past the slice diameter both balls saturate at full mass.
  auto res = reverse_doubling_search(h, {3.0}, {0.95}, 2, 1, 1e-3, 2);
  CHECK_FALSE(res.certified);
  CHECK(res.worst_ratio >= 0.5);
}
