#include <doctest.h>

#include <cmath>

#include "stokern/oracle.hpp"
#include "stokern/width.hpp"
#include "test_helpers.hpp"

using namespace stokern;

TEST_CASE("enumeration expected width: hand-checked values") {
  Instance inst = testing::two_point_line();
  CHECK(enumerate_expected_width(inst, Vec{1, 0}) == doctest::Approx(0.25).epsilon(1e-12));

  Instance sq = testing::unit_square(1.0);
  PointMatrix pts;
  pts.dim = 2;
  pts.coords = sq.as_existential().coords();
  CHECK(enumerate_expected_width(sq, Vec{1, 0}) == doctest::Approx(width(pts, Vec{1, 0})));

  // Split instance: n=10 points, half at 0 and half at 1, p = 0.1 each.
  Instance neg = make_preset("negative-lemma", 10, 2, 0, 0, 1);
  double closed = std::pow(1.0 - std::pow(0.9, 5), 2);
  CHECK(enumerate_expected_width(neg, Vec{1, 0}) == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("enumeration probabilities sum to one") {
  for (std::uint64_t seed : {3ULL, 9ULL}) {
    Instance inst = seed == 3 ? Instance(testing::random_existential(10, 2, seed))
                              : Instance(testing::random_locational(6, 2, seed));
    double total = 0.0;
    for_each_realization(inst, [&](double p, const PointMatrix&) { total += p; });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("enumeration cap is enforced") {
  Instance big(testing::random_existential(26, 2, 1));
  CHECK_THROWS_AS(enumerate_expected_width(big, Vec{1, 0}), PreconditionError);
}

TEST_CASE("width CDF oracle") {
  Instance inst = testing::two_point_line();
  CHECK(enumerate_width_cdf(inst, Vec{1, 0}, -0.5) == doctest::Approx(0.0));
  CHECK(enumerate_width_cdf(inst, Vec{1, 0}, 0.5) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(enumerate_width_cdf(inst, Vec{1, 0}, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(enumerate_width_cdf(inst, Vec{1, 0}, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("Monte-Carlo estimate brackets the enumeration value") {
  Instance inst(testing::random_existential(4, 2, 55));
  Vec u{0.28, -0.96};
  double exact = enumerate_expected_width(inst, u);
  auto est = mc_width_estimate(inst, u, 100000, 7);
  CHECK(std::abs(est.mean - exact) <= std::max(est.ci_halfwidth_99, 1e-3) * 1.5);

  // deterministic instance: zero-width CI
  Instance det = testing::unit_square(1.0);
  auto d = mc_width_estimate(det, Vec{1, 0}, 2000, 9);
  CHECK(d.ci_halfwidth_99 == doctest::Approx(0.0));
  // determinism under the same seed
  auto d2 = mc_width_estimate(det, Vec{1, 0}, 2000, 9);
  CHECK(d.mean == d2.mean);
}

TEST_CASE("doubling samples roughly halves the CI") {
  Instance inst(testing::random_existential(10, 2, 77));
  Vec u{1, 0};
  auto a = mc_width_estimate(inst, u, 20000, 3);
  auto b = mc_width_estimate(inst, u, 80000, 3);
  double ratio = a.ci_halfwidth_99 / b.ci_halfwidth_99;  // expect ~2 for 4x samples
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.6);
}

TEST_CASE("band check is reflexive and monotone in tau") {
  Instance inst = testing::two_point_line();
  auto ref = [&](std::span<const double> u, double t) { return enumerate_width_cdf(inst, u, t); };
  auto dirs = testing::circle_directions(16);
  std::vector<double> ts{0.25, 0.5, 1.0, 1.5};
  BandReport self = band_check(ref, ref, 0.1, 0.05, dirs, ts);
  CHECK(self.pass_fraction == doctest::Approx(1.0));

  // degenerate tau = 1 passes anything
  auto junk = [](std::span<const double>, double) { return 0.123; };
  CHECK(band_check(ref, junk, 0.0, 1.0, dirs, ts).pass_fraction == doctest::Approx(1.0));

  // growing tau never flips pass -> fail
  auto noisy = [&](std::span<const double> u, double t) {
    return std::min(1.0, std::max(0.0, enumerate_width_cdf(inst, u, t) + 0.2 * std::sin(t * 13)));
  };
  double prev = -1;
  for (double tau : {0.01, 0.1, 0.2, 0.4}) {
    double frac = band_check(ref, noisy, 0.05, tau, dirs, ts).pass_fraction;
    CHECK(frac >= prev);
    prev = frac;
  }
}

TEST_CASE("brute-force planar depth") {
  PointMatrix one;
  one.dim = 2;
  one.coords = {2, 3};
  std::vector<double> w{1.5};
  CHECK(tukey_depth_brute(one, w, Vec{2, 3}) == doctest::Approx(1.5));
  CHECK(tukey_depth_brute(one, w, Vec{10, 10}) == doctest::Approx(0.0));

  // Four unit-weight corners: depth 1 at each corner, 2 at the center.
  PointMatrix corners;
  corners.dim = 2;
  corners.coords = {-1, -1, 1, -1, 1, 1, -1, 1};
  std::vector<double> uw{1, 1, 1, 1};
  CHECK(tukey_depth_brute(corners, uw, Vec{0, 0}) == doctest::Approx(2.0));
  CHECK(tukey_depth_brute(corners, uw, Vec{-1, -1}) == doctest::Approx(1.0));
  // just inside the right edge: a tilted halfplane keeps only one corner
  CHECK(tukey_depth_brute(corners, uw, Vec{0.999, 0}) == doctest::Approx(1.0));
  CHECK(tukey_depth_brute(corners, uw, Vec{1.01, 0}) == doctest::Approx(0.0));
}
