#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stokern/geometry.hpp"
#include "stokern/instance.hpp"

namespace stokern {

// Hard cap on exhaustive enumeration, in realization bits
// (existential: n; locational: sum of ceil(log2(|locations|+1))).
inline constexpr int kEnumerationBitCap = 24;

int realization_bits(const Instance& inst);

// Walks every realization, calling fn(probability, points). Throws
// PreconditionError past the bit cap.
void for_each_realization(const Instance& inst,
                          const std::function<void(double, const PointMatrix&)>& fn);

// Exact E[width] by full enumeration.
double enumerate_expected_width(const Instance& inst, std::span<const double> u);

// Exact Pr[width <= t] by full enumeration (closed inequality).
double enumerate_width_cdf(const Instance& inst, std::span<const double> u, double t);

// Exact E[statistic] by full enumeration.
double enumerate_expected(const Instance& inst,
                          const std::function<double(const PointMatrix&)>& statistic);

struct McEstimate {
  double mean = 0.0;
  double ci_halfwidth_99 = 0.0;
  int samples = 0;
};

// Monte-Carlo mean with a 99% normal-approximation confidence interval;
// deterministic given the seed.
McEstimate mc_estimate(const Instance& inst, int n_samples, std::uint64_t seed,
                       const std::function<double(const PointMatrix&)>& statistic);

McEstimate mc_width_estimate(const Instance& inst, std::span<const double> u, int n_samples,
                             std::uint64_t seed);

// Expected width statistic helpers shared by tests and the CLI.
double realization_width(const PointMatrix& pts, std::span<const double> u);

// One cell of a quantile band check.
struct BandCell {
  Vec direction;
  double t = 0.0;
  double cdf_lo_ref = 0.0;  // CDF_ref((1-eps) t) - tau
  double cdf_kernel = 0.0;
  double cdf_hi_ref = 0.0;  // CDF_ref((1+eps) t) + tau
  bool in_band = false;
};

struct BandReport {
  std::vector<BandCell> cells;
  double pass_fraction = 0.0;
};

// Checks kernel CDF values against the reference band
// CDF_ref((1-eps)t) - tau <= CDF_kernel(t) <= CDF_ref((1+eps)t) + tau
// with 1e-9 slack on both sides. Both CDFs are supplied as callables so the
// reference can be an enumeration and the kernel either exact or sampled.
BandReport band_check(const std::function<double(std::span<const double>, double)>& cdf_ref,
                      const std::function<double(std::span<const double>, double)>& cdf_kernel,
                      double eps, double tau, const std::vector<Vec>& directions,
                      const std::vector<double>& t_values);

// Weighted Tukey depth in the plane: the minimum total weight in a closed
// halfplane whose boundary passes through x. Exact for finite sets
// (candidate boundary directions go through x and one input point).
double tukey_depth_brute(const PointMatrix& pts, std::span<const double> weights,
                         std::span<const double> x);

}  // namespace stokern
