#pragma once

#include <optional>

#include "stokern/geometry.hpp"
#include "stokern/instance.hpp"

namespace stokern {

// Deterministic coreset for the expected width: for every direction u,
// (1-eps) * E[width(P,u)] <= width(S,u) <= E[width(P,u)].
// Built from extreme-vertex probes of the expectation polytope; the polytope
// itself is never materialized.
DeterministicKernel exp_kernel(const Instance& inst, double eps);

// Subset variant under a probability floor beta: the output is a subset of
// the input points carrying their original probabilities, built by repeated
// rounds of deterministic kernel extraction and deletion.
struct SubsetKernel {
  ExistentialSet points;            // chosen subset with original probabilities
  std::vector<int> source_indices;  // into the input set
  double epsilon = 0.0;
  double beta = 0.0;
  int rounds = 0;         // peeling rounds executed
  double round_eps = 0.0; // per-round deterministic kernel tolerance
};

SubsetKernel exp_kernel_subset(const ExistentialSet& set, double eps, double beta);

}  // namespace stokern
