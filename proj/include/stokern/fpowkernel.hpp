#pragma once

#include <cstdint>

#include "stokern/geometry.hpp"
#include "stokern/instance.hpp"

namespace stokern {

// True iff <u, s> >= -1e-12 for every candidate location of the instance
// (u lies in the closed polar cone of the input).
bool polar_contains(const Instance& inst, std::span<const double> u);

// T_r(P, u) = max <u,v>^(1/r) - min <u,v>^(1/r) over the realization;
// 0 for the empty or singleton realization. Errors when a negative inner
// product meets the r-th root.
double t_r(const PointMatrix& pts, std::span<const double> u, int r);

// Mixture of per-realization deterministic kernels preserving E[T_r] to
// relative error eps over polar-cone directions, under the probability
// floor beta.
struct FpowKernel {
  int dim = 0;
  int r = 1;
  double epsilon = 0.0;
  double beta = 0.0;
  double eps0 = 0.0;  // per-realization kernel tolerance
  std::uint64_t seed = 0;
  std::vector<PointMatrix> sets;  // each with probability 1/N
  int size() const;
  // (1/N) * sum T_r(E_i, u); exact over the finite mixture.
  double expected_t_r(std::span<const double> u) const;
};

struct FpowConfig {
  double c_samples = 4.0;
  long long sample_cap = 2'000'000;
};

FpowKernel fpow_kernel(const ExistentialSet& set, double eps, int r, double beta,
                       std::uint64_t seed, const FpowConfig& cfg = {});

// Enumeration reference E[T_r] (realization bits capped).
double enumerate_expected_t_r(const Instance& inst, std::span<const double> u, int r);

}  // namespace stokern
