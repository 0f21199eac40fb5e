#include <doctest.h>

#include <cmath>

#include "stokern/fpowkernel.hpp"
#include "stokern/oracle.hpp"
#include "test_helpers.hpp"

using namespace stokern;

namespace {

PointMatrix mat(int dim, std::vector<double> coords) {
  PointMatrix m;
  m.dim = dim;
  m.coords = std::move(coords);
  return m;
}

// Instance in the open positive quadrant so the polar cone is usable.
ExistentialSet positive_instance(int n, std::uint64_t seed, double pLo) {
  Rng rng(derive_seed(seed, 0x706f73));
  std::vector<double> coords, probs;
  for (int i = 0; i < n; ++i) {
    coords.push_back(rng.uniform(0.2, 2.0));
    coords.push_back(rng.uniform(0.2, 2.0));
    probs.push_back(rng.uniform(pLo, 1.0));
  }
  return ExistentialSet(2, std::move(coords), std::move(probs));
}

std::vector<Vec> polar_dirs(const Instance& inst, int count) {
  std::vector<Vec> out;
  for (int i = 0; i < count * 4 && static_cast<int>(out.size()) < count; ++i) {
    double th = 0.5 * std::numbers::pi * (i + 0.5) / (count * 4);
    Vec u{std::cos(th), std::sin(th)};
    if (polar_contains(inst, u)) out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

TEST_CASE("polar cone membership") {
  ExistentialSet s(2, {1, 0.5, 2, 1}, {0.5, 0.5});
  Instance inst(s);
  CHECK(polar_contains(inst, Vec{1, 0}));
  CHECK(polar_contains(inst, Vec{0, 1}));
  ExistentialSet neg(2, {-1, 0}, {0.5});
  CHECK_FALSE(polar_contains(Instance(neg), Vec{1, 0}));
  // boundary counts as inside (closed cone)
  ExistentialSet edge(2, {0, 1}, {0.5});
  CHECK(polar_contains(Instance(edge), Vec{1, 0}));
}

TEST_CASE("t_r closed forms") {
  CHECK(t_r(mat(2, {1, 0, 2, 0}), Vec{1, 0}, 1) == doctest::Approx(1.0));
  CHECK(t_r(mat(2, {1, 0, 4, 0}), Vec{1, 0}, 2) == doctest::Approx(1.0));
  CHECK(t_r(mat(2, {3, 1}), Vec{1, 0}, 3) == doctest::Approx(0.0));
  CHECK(t_r(mat(2, {}), Vec{1, 0}, 2) == 0.0);
  CHECK_THROWS_AS(t_r(mat(2, {-1, 0}), Vec{1, 0}, 2), PreconditionError);
}

TEST_CASE("T_1 equals the width inside the polar cone") {
  ExistentialSet s = positive_instance(8, 3, 0.5);
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    double th = rng.uniform(0.0, std::numbers::pi / 2);
    Vec u{std::cos(th), std::sin(th)};
    PointMatrix pts = mat(2, s.coords());
    CHECK(t_r(pts, u, 1) == doctest::Approx(width(pts, u)).epsilon(1e-12));
  }
}

TEST_CASE("deterministic input: mixture reproduces T_r within eps") {
  ExistentialSet s = positive_instance(10, 5, 1.0);
  std::vector<double> ones(s.size(), 1.0);
  ExistentialSet det(2, s.coords(), ones);
  Instance inst(det);
  FpowKernel k = fpow_kernel(det, 0.2, 1, 1.0, 7);
  for (const auto& u : polar_dirs(inst, 16)) {
    double ref = enumerate_expected_t_r(inst, u, 1);
    CHECK(k.expected_t_r(u) == doctest::Approx(ref).epsilon(0.2));
  }
}

TEST_CASE("two-point instance: E[T_2] = 0.25 and the kernel tracks it") {
  ExistentialSet s(2, {1, 0, 4, 0}, {0.5, 0.5});
  Instance inst(s);
  double ref = enumerate_expected_t_r(inst, Vec{1, 0}, 2);
  CHECK(ref == doctest::Approx(0.25).epsilon(1e-12));
  FpowKernel k = fpow_kernel(s, 0.2, 2, 0.5, 3);
  CHECK(k.expected_t_r(Vec{1, 0}) == doctest::Approx(0.25).epsilon(0.2));
}

TEST_CASE("relative error over the polar cone on random instances") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ExistentialSet s = positive_instance(10, seed, 0.5);
    Instance inst(s);
    for (int r : {1, 2, 3}) {
      FpowKernel k = fpow_kernel(s, 0.25, r, 0.5, seed);
      for (const auto& u : polar_dirs(inst, 64)) {
        double ref = enumerate_expected_t_r(inst, u, r);
        double got = k.expected_t_r(u);
        if (ref > 1e-9)
          CHECK(std::abs(got - ref) / ref <= 0.25);
        else
          CHECK(std::abs(got - ref) <= 1e-9);
      }
    }
  }
}

TEST_CASE("scaling coordinates by s^r scales E[T_r] by s") {
  ExistentialSet s = positive_instance(8, 11, 0.5);
  Instance inst(s);
  int r = 2;
  double sc = 2.0;
  std::vector<double> coords = s.coords();
  for (double& c : coords) c *= std::pow(sc, r);
  Instance scaled(ExistentialSet(2, std::move(coords), s.probs()));
  for (const auto& u : polar_dirs(inst, 8)) {
    double base = enumerate_expected_t_r(inst, u, r);
    double big = enumerate_expected_t_r(scaled, u, r);
    CHECK(big == doctest::Approx(sc * base).epsilon(1e-9));
  }
}

TEST_CASE("unbiasedness sanity: full realizations instead of kernels") {
  // With kernels replaced by full realizations, the mixture average is an
  // unbiased estimator of E[T_r]; the sampled mean must sit inside a generous
  // confidence band.
  ExistentialSet s = positive_instance(9, 13, 0.5);
  Instance inst(s);
  Vec u = polar_dirs(inst, 1).at(0);
  int r = 2;
  double ref = enumerate_expected_t_r(inst, u, r);
  const int N = 20000;
  double acc = 0, accSq = 0;
  for (int i = 0; i < N; ++i) {
    Realization real = sample_realization(s, derive_seed(99, i));
    PointMatrix pts;
    pts.dim = 2;
    pts.coords = std::move(real.coords);
    double v = t_r(pts, u, r);
    acc += v;
    accSq += v * v;
  }
  double mean = acc / N;
  double sd = std::sqrt(std::max(0.0, accSq / N - mean * mean) / N);
  CHECK(std::abs(mean - ref) <= 4 * sd + 1e-9);
}

TEST_CASE("fpow kernel rejects a violated floor") {
  ExistentialSet s(2, {1, 1, 2, 1}, {0.3, 0.9});
  CHECK_THROWS_AS(fpow_kernel(s, 0.25, 2, 0.5, 1), PreconditionError);
}
