#include <doctest.h>

#include <cmath>

#include "stokern/oracle.hpp"
#include "stokern/width.hpp"
#include "test_helpers.hpp"

using namespace stokern;

TEST_CASE("expected support on the two-point line") {
  Instance inst = testing::two_point_line();
  auto fwd = expected_support(inst, Vec{1, 0});
  CHECK(fwd.f == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fwd.gradient[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fwd.gradient[1] == doctest::Approx(0.0));

  auto rev = expected_support(inst, Vec{-1, 0});
  CHECK(rev.f == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(rev.gradient[0] == doctest::Approx(0.25).epsilon(1e-12));

  CHECK(expected_width(inst, Vec{1, 0}) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("deterministic singleton support") {
  Instance inst(ExistentialSet(2, {3, 4}, {1.0}));
  auto s = expected_support(inst, Vec{0, 1});
  CHECK(s.f == doctest::Approx(4.0));
  CHECK(s.gradient[0] == doctest::Approx(3.0));
  CHECK(s.gradient[1] == doctest::Approx(4.0));
}

TEST_CASE("one locational point has zero width in every direction") {
  LocationDistribution d;
  d.coords = {0, 0, 1, 0};
  d.probs = {0.5, 0.5};
  Instance inst((LocationalSet(2, {d})));
  for (const auto& u : testing::circle_directions(64))
    CHECK(expected_width(inst, u) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("deterministic instance matches plain width") {
  Instance inst = testing::unit_square(1.0);
  PointMatrix pts;
  pts.dim = 2;
  pts.coords = inst.as_existential().coords();
  for (const auto& u : testing::circle_directions(128))
    CHECK(expected_width(inst, u) == doctest::Approx(width(pts, u)).epsilon(1e-12));
}

TEST_CASE("expected width equals the enumeration oracle") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Instance inst = seed % 3 == 0 ? Instance(testing::random_locational(5, 2, seed))
                                  : Instance(testing::random_existential(9, seed % 2 ? 2 : 3, seed));
    auto dirs = inst.dimension() == 2 ? testing::circle_directions(8)
                                      : testing::sphere_directions(8, seed);
    for (const auto& u : dirs) {
      double fast = expected_width(inst, u);
      double slow = enumerate_expected_width(inst, u);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
    }
  }
}

TEST_CASE("probability-of-top table is normalized") {
  // sum_v Pr[v is the realized maximum] + Pr[empty] = 1
  ExistentialSet s = testing::random_existential(12, 2, 77);
  Vec u{0.6, -0.8};
  auto order = projection_order(s, u);
  double survive = 1.0, sum = 0.0;
  for (int k = static_cast<int>(order.size()) - 1; k >= 0; --k) {
    sum += s.prob(order[k]) * survive;
    survive *= 1 - s.prob(order[k]);
  }
  CHECK(sum + survive == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("locational top-probabilities plus absence sum to one") {
  LocationalSet s = testing::random_locational(7, 2, 42);
  Instance inst(s);
  Vec u{0.6, -0.8};
  // Pr[some location is the maximum] + Pr[nothing appears]
  double noneProb = 1.0;
  for (const auto& pt : s.points()) {
    double sum = 0;
    for (double p : pt.probs) sum += p;
    noneProb *= std::max(0.0, 1.0 - sum);
  }
  // recover the total top-probability through the support of the indicator
  // lift: sum of Pr^R equals E[1{nonempty}] = 1 - noneProb
  double mass = 0.0;
  for_each_realization(inst, [&](double p, const PointMatrix& pts) {
    if (pts.size() > 0) mass += p;
  });
  CHECK(mass + noneProb == doctest::Approx(1.0).epsilon(1e-12));
  // and the engine's f splits over that mass: the lifted constant direction
  // (appending a unit coordinate) integrates Pr^R exactly
  std::vector<LocationDistribution> lifted = s.points();
  for (auto& pt : lifted) {
    std::vector<double> nc;
    for (int l = 0; l < pt.locations(); ++l) {
      nc.push_back(pt.coords[2 * l]);
      nc.push_back(pt.coords[2 * l + 1]);
      nc.push_back(1.0);
    }
    pt.coords = std::move(nc);
  }
  LocationalSet s3(3, std::move(lifted));
  double f = expected_support(s3, Vec{0, 0, 1}).f;
  CHECK(f == doctest::Approx(1.0 - noneProb).epsilon(1e-9));
}

TEST_CASE("presorted path agrees with the direct path") {
  ExistentialSet s = testing::random_existential(200, 2, 13);
  Vec u{1 / std::sqrt(5.0), 2 / std::sqrt(5.0)};
  auto order = projection_order(s, u);
  auto direct = expected_support(s, u);
  auto fast = expected_support_presorted(s, u, order);
  CHECK(fast.f == doctest::Approx(direct.f).epsilon(1e-12));
  CHECK(fast.gradient[0] == doctest::Approx(direct.gradient[0]).epsilon(1e-12));
  CHECK(expected_width_presorted(s, u, order) ==
        doctest::Approx(expected_width(s, u)).epsilon(1e-12));
}

TEST_CASE("scaling coordinates scales expected width linearly") {
  ExistentialSet s = testing::random_existential(10, 2, 21);
  Vec u{0.8, 0.6};
  double base = expected_width(s, u);
  for (double scale : {2.0, 0.5}) {
    std::vector<double> coords = s.coords();
    for (double& c : coords) c *= scale;
    ExistentialSet scaled(2, std::move(coords), s.probs());
    CHECK(expected_width(scaled, u) == doctest::Approx(scale * base).epsilon(1e-12));
  }
}

TEST_CASE("angular structure: two-point instance") {
  Instance inst = testing::two_point_line();
  AngularStructure as(inst);
  REQUIRE(as.breakpoints().size() == 1);
  CHECK(as.breakpoints()[0] == doctest::Approx(std::numbers::pi / 2));
  CHECK(as.query_width(0.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(as.query_support(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(as.query_gradient(0.1)[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("angular structure agrees with per-direction recomputation") {
  Rng rng(1234);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Instance inst = seed % 2 ? Instance(testing::random_existential(40, 2, seed))
                             : Instance(testing::random_locational(12, 2, seed));
    AngularStructure as(inst);
    for (int q = 0; q < 400; ++q) {
      double th = rng.uniform(0, 2 * std::numbers::pi);
      Vec u{std::cos(th), std::sin(th)};
      double ref = expected_width(inst, u);
      CHECK(as.query_width(th) == doctest::Approx(ref).epsilon(1e-9));
      double fref = expected_support(inst, u).f;
      CHECK(as.query_support(th) == doctest::Approx(fref).epsilon(1e-9));
    }
    // Breakpoint angles themselves evaluate through the right-hand interval.
    const auto& breaks = as.breakpoints();
    for (std::size_t b = 0; b < breaks.size(); b += std::max<std::size_t>(1, breaks.size() / 50)) {
      double th = breaks[b];
      Vec u{std::cos(th), std::sin(th)};
      CHECK(as.query_width(th) == doctest::Approx(expected_width(inst, u)).epsilon(1e-9));
    }
  }
}

TEST_CASE("angular structure matches gradients strictly inside intervals") {
  Instance inst(testing::random_existential(25, 2, 4));
  AngularStructure as(inst);
  const auto& breaks = as.breakpoints();
  for (std::size_t i = 0; i + 1 < breaks.size(); i += std::max<std::size_t>(1, breaks.size() / 40)) {
    double th = 0.5 * (breaks[i] + breaks[i + 1]);
    if (th == breaks[i] || th == breaks[i + 1]) continue;
    Vec u{std::cos(th), std::sin(th)};
    auto grad = as.query_gradient(th);
    auto ref = expected_support(inst, u).gradient;
    CHECK(grad[0] == doctest::Approx(ref[0]).epsilon(1e-9));
    CHECK(grad[1] == doctest::Approx(ref[1]).epsilon(1e-9));
  }
}

TEST_CASE("angular structure handles co-located points and collinear triples") {
  // duplicate coordinates plus exactly collinear triple
  ExistentialSet s(2, {0, 0, 0, 0, 1, 0, 2, 0, 1, 1}, {0.3, 0.6, 0.5, 0.4, 0.7});
  Instance inst(std::move(s));
  AngularStructure as(inst);
  Rng rng(5);
  for (int q = 0; q < 300; ++q) {
    double th = rng.uniform(0, 2 * std::numbers::pi);
    CHECK(as.query_width(th) ==
          doctest::Approx(expected_width(inst, Vec{std::cos(th), std::sin(th)})).epsilon(1e-9));
  }
}

TEST_CASE("angular structure rejects d != 2 and shared locational coordinates") {
  CHECK_THROWS_AS(AngularStructure(Instance(testing::random_existential(5, 3, 2))),
                  PreconditionError);
  LocationDistribution a, b;
  a.coords = {0, 0};
  a.probs = {1.0};
  b.coords = {0, 0, 1, 1};
  b.probs = {0.5, 0.5};
  CHECK_THROWS_AS(AngularStructure(Instance(LocationalSet(2, {a, b}))), PreconditionError);
}

TEST_CASE("extreme vertex is the expected-support gradient") {
  Instance inst = testing::two_point_line();
  Vec v = extreme_vertex(inst, Vec{1, 0});
  CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-12));
  Vec w = extreme_vertex(inst, Vec{-1, 0});
  CHECK(w[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("expectation polytope of the two-point instance is a segment") {
  ExpectationPolytope M = build_expectation_polytope(testing::two_point_line());
  REQUIRE(M.vertices.size() == 2);
  double lo = std::min(M.vertices.point(0)[0], M.vertices.point(1)[0]);
  double hi = std::max(M.vertices.point(0)[0], M.vertices.point(1)[0]);
  CHECK(lo == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(hi == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("deterministic expectation polytope is the convex hull") {
  Instance sq = testing::unit_square(1.0);
  ExpectationPolytope M = build_expectation_polytope(sq);
  CHECK(M.vertices.size() == 4);
  for (const auto& u : testing::circle_directions(360))
    CHECK(M.support(u) == doctest::Approx(expected_support(sq, u).f).epsilon(1e-9));
}

TEST_CASE("expectation polytope: support matches and the size bound holds") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    ExistentialSet s = testing::random_existential(8, 2, seed, 0.15, 0.95);
    Instance inst(s);
    ExpectationPolytope M = build_expectation_polytope(inst);
    CHECK(M.vertices.size() <= 2 * (8 * 7) / 2 + 2);
    for (const auto& u : testing::circle_directions(720))
      CHECK(M.support(u) == doctest::Approx(expected_support(inst, u).f).epsilon(1e-9));
    // convexity: all cross products of consecutive edges share a sign
    const auto& V = M.vertices;
    int n = V.size();
    if (n >= 3) {
      for (int i = 0; i < n; ++i) {
        auto a = V.point(i), b = V.point((i + 1) % n), c = V.point((i + 2) % n);
        double cr = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        CHECK(cr >= -1e-9);
      }
    }
  }
}
