#pragma once

#include <span>
#include <vector>

#include "stokern/geometry.hpp"
#include "stokern/instance.hpp"

namespace stokern {

// Expected support value f = E[max over the realization of <u, .>] (an empty
// realization contributes 0) and its gradient in u, which is the extreme
// vertex of the expectation polytope M in direction u.
struct ExpectedSupport {
  double f = 0.0;
  Vec gradient;
};

// O(n log n) single-direction evaluation (O(m log m) locational).
ExpectedSupport expected_support(const ExistentialSet& set, std::span<const double> u);
ExpectedSupport expected_support(const LocationalSet& set, std::span<const double> u);
ExpectedSupport expected_support(const Instance& inst, std::span<const double> u);

// O(n) path: `order` holds point indices sorted ascending by projection onto
// u (ties in the global canonical order, most extreme last).
ExpectedSupport expected_support_presorted(const ExistentialSet& set, std::span<const double> u,
                                           std::span<const int> order);

// E[width] = f(u) + f(-u).
double expected_width(const ExistentialSet& set, std::span<const double> u);
double expected_width(const LocationalSet& set, std::span<const double> u);
double expected_width(const Instance& inst, std::span<const double> u);
double expected_width_presorted(const ExistentialSet& set, std::span<const double> u,
                                std::span<const int> order);

// The vertex of the expectation polytope M extreme in direction u (= gradient
// of the expected support). Any dimension, either model.
Vec extreme_vertex(const Instance& inst, std::span<const double> u);

// Angular query structure over theta in [0, 2*pi), d = 2 only. Stores, per
// interval of the breakpoint subdivision of [0, pi), the linear-in-(cos,sin)
// coefficients of the expected support in direction u(theta) and in -u(theta);
// queries anywhere on the circle reduce to those two tracks.
class AngularStructure {
 public:
  // Both models; throws on d != 2. Locational inputs must not share exact
  // locations across distinct points.
  explicit AngularStructure(const Instance& inst);

  double query_support(double theta) const;   // f(P, u(theta))
  double query_width(double theta) const;     // f(u) + f(-u)
  Vec query_gradient(double theta) const;     // extreme vertex of M at u(theta)

  const std::vector<double>& breakpoints() const { return breaks_; }  // in [0, pi)
  int interval_count() const { return static_cast<int>(fwdA_.size()); }

 private:
  friend struct AngularBuilder;
  int locate(double theta) const;
  std::vector<double> breaks_;
  // Per interval: f(u(th)) = fwdA*cos + fwdB*sin; f(-u(th)) = -(revA*cos + revB*sin).
  std::vector<double> fwdA_, fwdB_, revA_, revB_;
};

// Explicit expectation polytope in the plane: CCW vertices whose support
// function equals the expected support of the instance.
struct ExpectationPolytope {
  PointMatrix vertices;   // CCW
  int cone_count = 0;     // cones of the direction subdivision used
  double support(std::span<const double> u) const;
};

ExpectationPolytope build_expectation_polytope(const Instance& inst);

// Canonical ascending projection order (most extreme last); exposed for the
// presorted fast path and for tests.
std::vector<int> projection_order(const ExistentialSet& set, std::span<const double> u);

}  // namespace stokern
