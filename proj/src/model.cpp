#include "stokern/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "stokern/rng.hpp"

namespace stokern {

ExistentialSet::ExistentialSet(int dimension, std::vector<double> coords, std::vector<double> probs)
    : dim_(dimension), coords_(std::move(coords)), probs_(std::move(probs)) {
  if (dim_ <= 0) throw ValidationError("dimension must be >= 1");
  if (coords_.size() != probs_.size() * static_cast<std::size_t>(dim_))
    throw ValidationError("coordinate array size does not match point count and dimension");
}

double ExistentialSet::min_prob() const {
  double b = 1.0;
  for (double p : probs_) b = std::min(b, p);
  return probs_.empty() ? 0.0 : b;
}

LocationalSet::LocationalSet(int dimension, std::vector<LocationDistribution> points)
    : dim_(dimension), points_(std::move(points)) {
  if (dim_ <= 0) throw ValidationError("dimension must be >= 1");
  for (const auto& pt : points_) {
    if (pt.coords.size() != pt.probs.size() * static_cast<std::size_t>(dim_))
      throw ValidationError("location array size does not match location count and dimension");
  }
}

int LocationalSet::total_locations() const {
  int m = 0;
  for (const auto& pt : points_) m += pt.locations();
  return m;
}

double LocationalSet::min_prob() const {
  double b = 1.0;
  bool any = false;
  for (const auto& pt : points_)
    for (double p : pt.probs) {
      b = std::min(b, p);
      any = true;
    }
  return any ? b : 0.0;
}

void ValidationReport::raise_if_invalid() const {
  if (valid) return;
  std::ostringstream os;
  os << "invalid instance:";
  for (const auto& issue : issues) os << "\n  - " << issue.message;
  throw ValidationError(os.str());
}

namespace {

bool finite_coords(std::span<const double> c) {
  for (double x : c)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

ValidationReport validate(const ExistentialSet& set) {
  ValidationReport r;
  r.dimension = set.dimension();
  if (set.size() == 0) r.fail("point set is empty");
  double beta = 1.0;
  std::map<std::vector<double>, int> seen;
  for (int i = 0; i < set.size(); ++i) {
    double p = set.prob(i);
    if (!(p > 0.0) || p > 1.0) {
      std::ostringstream os;
      os << "point " << i << ": probability must be in (0,1], got " << p;
      r.fail(os.str());
    }
    if (p == 1.0) r.has_unit_prob = true;
    beta = std::min(beta, p);
    auto c = set.point(i);
    if (!finite_coords(c)) {
      std::ostringstream os;
      os << "point " << i << ": coordinates must be finite";
      r.fail(os.str());
    }
    auto key = std::vector<double>(c.begin(), c.end());
    if (seen.count(key)) r.has_duplicate_locations = true;
    seen[key] = i;
  }
  r.beta = set.size() ? beta : 0.0;
  return r;
}

ValidationReport validate(const LocationalSet& set) {
  ValidationReport r;
  r.dimension = set.dimension();
  if (set.size() == 0) r.fail("point set is empty");
  double beta = 1.0;
  std::map<std::vector<double>, int> seen;
  for (int i = 0; i < set.size(); ++i) {
    const auto& pt = set.point(i);
    if (pt.locations() == 0) {
      std::ostringstream os;
      os << "point " << i << ": needs at least one location";
      r.fail(os.str());
      continue;
    }
    double sum = 0.0;
    for (int s = 0; s < pt.locations(); ++s) {
      double p = pt.probs[s];
      if (!(p > 0.0) || p > 1.0) {
        std::ostringstream os;
        os << "point " << i << " location " << s << ": probability must be in (0,1], got " << p;
        r.fail(os.str());
      }
      beta = std::min(beta, p);
      sum += p;
      std::span<const double> c{pt.coords.data() + static_cast<std::size_t>(s) * set.dimension(),
                                static_cast<std::size_t>(set.dimension())};
      if (!finite_coords(c)) {
        std::ostringstream os;
        os << "point " << i << " location " << s << ": coordinates must be finite";
        r.fail(os.str());
      }
      auto key = std::vector<double>(c.begin(), c.end());
      if (seen.count(key)) r.has_duplicate_locations = true;
      seen[key] = i;
    }
    if (sum > 1.0 + kProbSumSlack) {
      std::ostringstream os;
      os << "point " << i << ": location probabilities sum to " << sum << " > 1";
      r.fail(os.str());
    }
  }
  r.beta = beta;
  return r;
}

Lambda lambda_of(const ExistentialSet& set) {
  Lambda l;
  l.per_point.reserve(set.size());
  for (int i = 0; i < set.size(); ++i) {
    double p = set.prob(i);
    if (p >= 1.0) throw PreconditionError("Poissonization undefined at p=1");
    double lv = -std::log1p(-p);
    l.per_point.push_back(lv);
    l.total += lv;
  }
  return l;
}

Realization sample_realization(const ExistentialSet& set, std::uint64_t seed) {
  Rng rng(seed);
  Realization out;
  out.dimension = set.dimension();
  for (int i = 0; i < set.size(); ++i) {
    if (rng.bernoulli(set.prob(i))) {
      auto c = set.point(i);
      out.coords.insert(out.coords.end(), c.begin(), c.end());
    }
  }
  return out;
}

Realization sample_realization(const LocationalSet& set, std::uint64_t seed) {
  Rng rng(seed);
  Realization out;
  out.dimension = set.dimension();
  const int d = set.dimension();
  for (int i = 0; i < set.size(); ++i) {
    const auto& pt = set.point(i);
    double u = rng.uniform();
    double acc = 0.0;
    for (int s = 0; s < pt.locations(); ++s) {
      acc += pt.probs[s];
      if (u < acc) {
        out.coords.insert(out.coords.end(), pt.coords.begin() + static_cast<std::size_t>(s) * d,
                          pt.coords.begin() + static_cast<std::size_t>(s + 1) * d);
        break;
      }
    }
    // u >= sum of probabilities: the point does not appear.
  }
  return out;
}

}  // namespace stokern
