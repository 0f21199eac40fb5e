#include "stokern/presets.hpp"

#include <cmath>
#include <numbers>

#include "stokern/geometry.hpp"
#include "stokern/rng.hpp"

namespace stokern {

namespace {

constexpr double kPi = std::numbers::pi;

double pick_prob(Rng& rng, double p, double beta) {
  if (p > 0.0) return p;
  double lo = beta > 0.0 ? beta : 0.05;
  return rng.uniform(lo, 1.0);
}

Vec random_in_ball(Rng& rng, int d) {
  while (true) {
    Vec v(d);
    double n2 = 0;
    for (int k = 0; k < d; ++k) {
      v[k] = rng.uniform(-1.0, 1.0);
      n2 += v[k] * v[k];
    }
    if (n2 <= 1.0) return v;
  }
}

double gaussian(Rng& rng) {
  // Box-Muller; one value per call keeps the stream simple and reproducible.
  double u1 = 1.0 - rng.uniform();
  double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * kPi * u2);
}

}  // namespace

Instance make_preset(const std::string& name, int n, int d, double p, double beta,
                     std::uint64_t seed) {
  if (n < 1) throw ValidationError("preset: n must be >= 1");
  if (d < 1 || d > 3) throw ValidationError("preset: d must be in {1, 2, 3}");
  Rng rng(derive_seed(seed, 0x67656e));

  if (name == "uniform-disk") {
    std::vector<double> coords, probs;
    for (int i = 0; i < n; ++i) {
      Vec v = random_in_ball(rng, d);
      coords.insert(coords.end(), v.begin(), v.end());
      probs.push_back(pick_prob(rng, p, beta));
    }
    return Instance(ExistentialSet(d, std::move(coords), std::move(probs)));
  }
  if (name == "circle") {
    std::vector<double> coords, probs;
    for (int i = 0; i < n; ++i) {
      if (d == 1) {
        coords.push_back(i % 2 == 0 ? -1.0 : 1.0);
      } else if (d == 2) {
        double th = 2 * kPi * i / n;
        coords.push_back(std::cos(th));
        coords.push_back(std::sin(th));
      } else {
        // Fibonacci spiral on the sphere.
        double z = 1.0 - 2.0 * (i + 0.5) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = kPi * (1.0 + std::sqrt(5.0)) * i;
        coords.push_back(r * std::cos(th));
        coords.push_back(r * std::sin(th));
        coords.push_back(z);
      }
      probs.push_back(pick_prob(rng, p, beta));
    }
    return Instance(ExistentialSet(d, std::move(coords), std::move(probs)));
  }
  if (name == "clustered") {
    int clusters = std::max(1, std::min(8, n / 8));
    std::vector<Vec> centers;
    for (int c = 0; c < clusters; ++c) centers.push_back(random_in_ball(rng, d));
    std::vector<double> coords, probs;
    for (int i = 0; i < n; ++i) {
      const Vec& c = centers[rng.below(static_cast<std::uint64_t>(clusters))];
      for (int k = 0; k < d; ++k) coords.push_back(c[k] + 0.05 * gaussian(rng));
      probs.push_back(pick_prob(rng, p, beta));
    }
    return Instance(ExistentialSet(d, std::move(coords), std::move(probs)));
  }
  if (name == "negative-lemma") {
    // Half the points at the origin, half at x = 1, each present with 1/n.
    std::vector<double> coords, probs;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) coords.push_back(k == 0 && i >= n / 2 ? 1.0 : 0.0);
      probs.push_back(1.0 / n);
    }
    return Instance(ExistentialSet(d, std::move(coords), std::move(probs)));
  }
  if (name == "locational-grid") {
    std::vector<LocationDistribution> pts;
    for (int i = 0; i < n; ++i) {
      LocationDistribution dist;
      int locs = 2 + static_cast<int>(rng.below(3));
      double remaining = 1.0;
      for (int l = 0; l < locs; ++l) {
        for (int k = 0; k < d; ++k) {
          double cell = std::floor(rng.uniform(-3.0, 4.0));
          dist.coords.push_back(cell / 3.0 + 1e-3 * gaussian(rng));
        }
        double q = l + 1 == locs ? remaining : remaining * rng.uniform(0.15, 0.8);
        // Leave some points with a positive absence probability.
        if (l + 1 == locs && rng.bernoulli(0.3)) q = remaining * rng.uniform(0.5, 0.95);
        dist.probs.push_back(q);
        remaining -= q;
      }
      pts.push_back(std::move(dist));
    }
    return Instance(LocationalSet(d, std::move(pts)));
  }
  throw ValidationError("unknown preset: " + name);
}

}  // namespace stokern
