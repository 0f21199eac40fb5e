#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stokern/expkernel.hpp"
#include "stokern/geometry.hpp"
#include "stokern/instance.hpp"

namespace stokern {

// Explicit constants for all sample-count formulas. The analysis only fixes
// them up to O(.), so they are configuration, frozen by the acceptance suite.
struct QuantConfig {
  double c_simple = 4.0;   // mixture sample count multiplier
  double c_poisson = 4.0;  // Poisson-sampling count multiplier
  double c_tukey = 4.0;    // outside-region sample count multiplier
  long long poisson_cap = 8'000'000;  // refuse larger sample counts
  // Iterative region construction (d = 2).
  int fast_directions = 2048;
  double fast_eps2_factor = 0.125;   // eps2 = factor * sqrt(eps1)
  double fast_sample_c = 0.5;        // per-round sample count multiplier
  int exact_region_cap_2d = 600;     // brute-force region size limit, d = 2
  int exact_region_cap_3d = 300;     // d = 3
};

// Mixture of N point sets, each realized with probability 1/N.
struct MixtureKernel {
  int dim = 0;
  std::vector<PointMatrix> sets;
  double epsilon = 0.0, tau = 0.0;
  std::string method = "simple";
  std::uint64_t seed = 0;
  int size() const;  // total point count
  double cdf(std::span<const double> u, double t) const;
};

// Independent points: optional always-present anchors plus sampled points
// sharing one existential probability.
struct BernoulliKernel {
  int dim = 0;
  PointMatrix anchors;           // probability 1
  PointMatrix sampled;
  double sample_prob = 0.0;      // 1 - exp(-lambda/N)
  double lambda = 0.0;           // Poisson mass the samples stand in for
  double epsilon = 0.0, tau = 0.0, delta = 0.0;
  std::string method = "poisson";
  std::uint64_t seed = 0;
  int size() const { return anchors.size() + sampled.size(); }
  // View as an existential instance (for CDF evaluation).
  ExistentialSet as_existential() const;
};

// Region of points whose weighted Tukey depth clears the threshold, plus the
// slightly dilated kernel region K around its deterministic coreset.
struct TukeyRegion {
  int dim = 0;
  double gamma = 0.0;            // depth threshold
  PointMatrix region;            // vertices of H (CCW for d = 2)
  std::vector<Halfspace> region_halfspaces;
  PointMatrix kernel_hull;       // vertices of K
  std::vector<Halfspace> kernel_halfspaces;
  Vec dilation_center;
  double lambda_outside = 0.0;   // total rate outside K
  std::vector<int> outside;      // input indices outside K
  int rounds = 0;                // 0 for the exact construction
  std::vector<double> round_weights;  // remaining rate after each iterative round
  bool contains_in_kernel(std::span<const double> x) const;
};

MixtureKernel quant_simple(const Instance& inst, double eps, double tau, std::uint64_t seed,
                           const QuantConfig& cfg = {});

// Poisson-sampled independent kernel; additive-tau guarantee, no length
// relaxation. Rejects p = 1 and sample counts past the configured cap.
BernoulliKernel quant_poisson(const ExistentialSet& set, double tau, double delta,
                              std::uint64_t seed, const QuantConfig& cfg = {});

// Exact depth-region construction, d in {2,3}.
TukeyRegion tukey_region(const ExistentialSet& set, double tau, double eps,
                         const QuantConfig& cfg = {});

// Iterative near-linear variant, d = 2.
TukeyRegion tukey_region_fast(const ExistentialSet& set, double tau, double eps,
                              std::uint64_t seed, const QuantConfig& cfg = {});

// Region anchors at probability 1 plus Poisson samples of the outside mass.
BernoulliKernel quant_tukey(const ExistentialSet& set, double eps, double tau, double delta,
                            std::uint64_t seed, const QuantConfig& cfg = {},
                            bool fast_region = false);

// Subset quantile kernel under the probability floor; same construction as
// the subset expectation kernel at mu = min(eps, tau).
SubsetKernel quant_subset(const ExistentialSet& set, double eps, double tau, double beta);

// Width CDF along one direction, evaluated at given thresholds.
struct WidthCdf {
  Vec direction;
  std::vector<double> t;
  std::vector<double> value;
  bool exact = true;
  double ci_halfwidth_99 = 0.0;  // 0 when exact
  int samples = 0;               // Monte-Carlo sample count when not exact
};

WidthCdf cdf(const MixtureKernel& kernel, std::span<const double> u, std::vector<double> ts);
WidthCdf cdf(const BernoulliKernel& kernel, std::span<const double> u, std::vector<double> ts,
             std::uint64_t mc_seed = 7, int mc_samples = 100'000);
WidthCdf cdf(const Instance& inst, std::span<const double> u, std::vector<double> ts,
             std::uint64_t mc_seed = 7, int mc_samples = 100'000);

}  // namespace stokern
