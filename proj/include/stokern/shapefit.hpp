#pragma once

#include <cstdint>

#include "stokern/fpowkernel.hpp"
#include "stokern/instance.hpp"

namespace stokern {

struct FitResult {
  Vec center;
  double value = 0.0;          // coreset objective at the returned center
  int coreset_size = 0;
  double optimizer_gap = 0.0;  // spread across restarts at convergence
};

struct FitConfig {
  int restarts = 16;
  double tol = 1e-8;
  FpowConfig fpow;
};

// Minimizes E[max over the realization of |v - c|] over centers c via the
// square-root-of-quadratic mixture coreset; the mixture objective is convex
// in c. d in {2, 3}.
FitResult expected_meb(const ExistentialSet& set, double eps, double beta, std::uint64_t seed,
                       const FitConfig& cfg = {});

// Minimizes E[max |v - c| - min |v - c|]; the objective is not convex, so
// this reports the best center found across restarts.
FitResult expected_shell(const ExistentialSet& set, double eps, double beta, std::uint64_t seed,
                         const FitConfig& cfg = {});

// Deterministic coreset for E[max |x - v|^2]: lifted points whose upper
// envelope approximates the expected farthest squared distance at every x
// within relative error eps.
struct SqMebCoreset {
  int dim = 0;
  double epsilon = 0.0;
  // Each row (q, w_1..w_d, s) encodes the quadratic q*|x|^2 - 2<w,x> + s.
  std::vector<Vec> quadratics;
  double evaluate(std::span<const double> x) const;  // upper envelope
  int size() const { return static_cast<int>(quadratics.size()); }
};

SqMebCoreset expected_sq_meb_coreset(const Instance& inst, double eps);

// Exact E[max |x - v|^2] by enumeration (bit cap applies).
double enumerate_expected_sq_farthest(const Instance& inst, std::span<const double> x);

// Enumeration references for the fitting objectives.
double enumerate_meb_objective(const Instance& inst, std::span<const double> c);
double enumerate_shell_objective(const Instance& inst, std::span<const double> c);

}  // namespace stokern
