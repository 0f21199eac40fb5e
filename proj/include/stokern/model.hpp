#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stokern/errors.hpp"

namespace stokern {

// Tolerance for "location probabilities of one point sum to at most 1".
inline constexpr double kProbSumSlack = 1e-12;

// Points in R^d, each present independently with probability p in (0, 1].
// Immutable after construction; coordinates are stored row-major.
class ExistentialSet {
 public:
  ExistentialSet() = default;
  ExistentialSet(int dimension, std::vector<double> coords, std::vector<double> probs);

  int dimension() const { return dim_; }
  int size() const { return static_cast<int>(probs_.size()); }
  std::span<const double> point(int i) const { return {coords_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)}; }
  double prob(int i) const { return probs_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& probs() const { return probs_; }

  double min_prob() const;

 private:
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> probs_;
};

// One uncertain point of a locational set: a discrete distribution over
// locations. Probabilities sum to at most 1; slack below 1 is the chance the
// point does not appear at all.
struct LocationDistribution {
  std::vector<double> coords;  // |locations| x d, row-major
  std::vector<double> probs;
  int locations() const { return static_cast<int>(probs.size()); }
};

class LocationalSet {
 public:
  LocationalSet() = default;
  LocationalSet(int dimension, std::vector<LocationDistribution> points);

  int dimension() const { return dim_; }
  int size() const { return static_cast<int>(points_.size()); }
  const LocationDistribution& point(int i) const { return points_[i]; }
  const std::vector<LocationDistribution>& points() const { return points_; }

  // Total number of locations m.
  int total_locations() const;
  double min_prob() const;

 private:
  int dim_ = 0;
  std::vector<LocationDistribution> points_;
};

// A realized (deterministic) point set.
struct Realization {
  int dimension = 0;
  std::vector<double> coords;  // |present| x d
  int size() const { return dimension == 0 ? 0 : static_cast<int>(coords.size()) / dimension; }
  std::span<const double> point(int i) const { return {coords.data() + static_cast<std::size_t>(i) * dimension, static_cast<std::size_t>(dimension)}; }
};

struct ValidationIssue {
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  int dimension = 0;
  double beta = 0.0;  // min probability over all points/locations
  bool has_unit_prob = false;
  bool has_duplicate_locations = false;
  std::vector<ValidationIssue> issues;

  void fail(std::string msg) {
    valid = false;
    issues.push_back({std::move(msg)});
  }
  // Throws ValidationError listing every violation.
  void raise_if_invalid() const;
};

ValidationReport validate(const ExistentialSet& set);
ValidationReport validate(const LocationalSet& set);

// Per-point Poisson rates lambda_v = -ln(1 - p_v) and their sum.
struct Lambda {
  std::vector<double> per_point;
  double total = 0.0;
};

// Rejects p_v = 1 (rate diverges).
Lambda lambda_of(const ExistentialSet& set);

Realization sample_realization(const ExistentialSet& set, std::uint64_t seed);
Realization sample_realization(const LocationalSet& set, std::uint64_t seed);

}  // namespace stokern
