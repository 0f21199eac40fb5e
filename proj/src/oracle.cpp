#include "stokern/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stokern/rng.hpp"
#include "stokern/width.hpp"

namespace stokern {

int realization_bits(const Instance& inst) {
  if (inst.existential()) {
    // Points with p = 1 are forced and carry no randomness.
    int bits = 0;
    for (double p : inst.as_existential().probs()) bits += p < 1.0 ? 1 : 0;
    return bits;
  }
  int bits = 0;
  for (const auto& pt : inst.as_locational().points())
    bits += static_cast<int>(std::ceil(std::log2(static_cast<double>(pt.locations()) + 1.0)));
  return bits;
}

void for_each_realization(const Instance& inst,
                          const std::function<void(double, const PointMatrix&)>& fn) {
  int bits = realization_bits(inst);
  if (bits > kEnumerationBitCap)
    throw PreconditionError("enumeration cap exceeded: " + std::to_string(bits) + " bits > " +
                            std::to_string(kEnumerationBitCap));
  const int d = inst.dimension();
  PointMatrix pts;
  pts.dim = d;
  if (inst.existential()) {
    const auto& set = inst.as_existential();
    const int n = set.size();
    std::vector<int> free;
    for (int i = 0; i < n; ++i)
      if (set.prob(i) < 1.0) free.push_back(i);
    const int nb = static_cast<int>(free.size());
    const std::uint64_t total = 1ULL << nb;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double prob = 1.0;
      pts.coords.clear();
      int fb = 0;
      for (int i = 0; i < n; ++i) {
        if (set.prob(i) == 1.0) {
          pts.push(set.point(i));
          continue;
        }
        if (mask & (1ULL << fb)) {
          prob *= set.prob(i);
          pts.push(set.point(i));
        } else {
          prob *= 1.0 - set.prob(i);
        }
        ++fb;
      }
      if (prob > 0.0) fn(prob, pts);
    }
    return;
  }
  const auto& set = inst.as_locational();
  const int n = set.size();
  // Mixed-radix counter over per-point choices; the extra top value means
  // "absent" and carries the leftover probability.
  std::vector<int> radix(n), digit(n, 0);
  std::vector<double> absent(n);
  for (int i = 0; i < n; ++i) {
    radix[i] = set.point(i).locations() + 1;
    double sum = 0.0;
    for (double p : set.point(i).probs) sum += p;
    absent[i] = std::max(0.0, 1.0 - sum);
  }
  while (true) {
    double prob = 1.0;
    pts.coords.clear();
    for (int i = 0; i < n; ++i) {
      const auto& pt = set.point(i);
      if (digit[i] < pt.locations()) {
        prob *= pt.probs[digit[i]];
        pts.coords.insert(pts.coords.end(),
                          pt.coords.begin() + static_cast<std::size_t>(digit[i]) * d,
                          pt.coords.begin() + static_cast<std::size_t>(digit[i] + 1) * d);
      } else {
        prob *= absent[i];
      }
    }
    if (prob > 0.0) fn(prob, pts);
    int pos = 0;
    while (pos < n) {
      if (++digit[pos] < radix[pos]) break;
      digit[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
}

double realization_width(const PointMatrix& pts, std::span<const double> u) {
  return width(pts, u);
}

double enumerate_expected_width(const Instance& inst, std::span<const double> u) {
  double acc = 0.0;
  for_each_realization(inst, [&](double p, const PointMatrix& pts) { acc += p * width(pts, u); });
  return acc;
}

double enumerate_width_cdf(const Instance& inst, std::span<const double> u, double t) {
  double acc = 0.0;
  for_each_realization(inst,
                       [&](double p, const PointMatrix& pts) { acc += width(pts, u) <= t ? p : 0.0; });
  return acc;
}

double enumerate_expected(const Instance& inst,
                          const std::function<double(const PointMatrix&)>& statistic) {
  double acc = 0.0;
  for_each_realization(inst, [&](double p, const PointMatrix& pts) { acc += p * statistic(pts); });
  return acc;
}

McEstimate mc_estimate(const Instance& inst, int n_samples, std::uint64_t seed,
                       const std::function<double(const PointMatrix&)>& statistic) {
  McEstimate est;
  est.samples = n_samples;
  double sum = 0.0, sumsq = 0.0;
  PointMatrix pts;
  pts.dim = inst.dimension();
  for (int i = 0; i < n_samples; ++i) {
    Realization r = inst.sample(derive_seed(seed, static_cast<std::uint64_t>(i)));
    pts.coords = std::move(r.coords);
    double x = statistic(pts);
    sum += x;
    sumsq += x * x;
  }
  est.mean = sum / n_samples;
  double var = std::max(0.0, sumsq / n_samples - est.mean * est.mean);
  if (n_samples > 1) var *= static_cast<double>(n_samples) / (n_samples - 1);
  est.ci_halfwidth_99 = 2.5758293035489004 * std::sqrt(var / n_samples);
  return est;
}

McEstimate mc_width_estimate(const Instance& inst, std::span<const double> u, int n_samples,
                             std::uint64_t seed) {
  Vec uu(u.begin(), u.end());
  return mc_estimate(inst, n_samples, seed,
                     [uu](const PointMatrix& pts) { return width(pts, uu); });
}

BandReport band_check(const std::function<double(std::span<const double>, double)>& cdf_ref,
                      const std::function<double(std::span<const double>, double)>& cdf_kernel,
                      double eps, double tau, const std::vector<Vec>& directions,
                      const std::vector<double>& t_values) {
  BandReport rep;
  int pass = 0;
  for (const Vec& u : directions) {
    for (double t : t_values) {
      BandCell cell;
      cell.direction = u;
      cell.t = t;
      cell.cdf_lo_ref = cdf_ref(u, (1.0 - eps) * t) - tau;
      cell.cdf_hi_ref = cdf_ref(u, (1.0 + eps) * t) + tau;
      cell.cdf_kernel = cdf_kernel(u, t);
      cell.in_band = cell.cdf_kernel >= cell.cdf_lo_ref - 1e-9 &&
                     cell.cdf_kernel <= cell.cdf_hi_ref + 1e-9;
      pass += cell.in_band ? 1 : 0;
      rep.cells.push_back(std::move(cell));
    }
  }
  rep.pass_fraction = rep.cells.empty() ? 1.0 : static_cast<double>(pass) / rep.cells.size();
  return rep;
}

double tukey_depth_brute(const PointMatrix& pts, std::span<const double> weights,
                         std::span<const double> x) {
  const int n = pts.size();
  if (n == 0) return 0.0;
  if (pts.dim != 2) throw PreconditionError("tukey_depth_brute requires d = 2");
  // Sort the points by angle around x; a closed halfplane through x covers an
  // angular window of width pi (inclusive ends). Weight at x itself always
  // counts. Candidate boundaries pass through x and one input point.
  double atX = 0.0, total = 0.0;
  std::vector<std::pair<double, double>> ang;  // (angle, weight)
  for (int i = 0; i < n; ++i) {
    double dx = pts.point(i)[0] - x[0], dy = pts.point(i)[1] - x[1];
    double w = weights[i];
    total += w;
    if (dx == 0.0 && dy == 0.0) {
      atX += w;
      continue;
    }
    double a = std::atan2(dy, dx);
    ang.push_back({a, w});
  }
  if (ang.empty()) return total;
  std::sort(ang.begin(), ang.end());
  const int m = static_cast<int>(ang.size());
  constexpr double pi = std::numbers::pi;
  std::vector<double> as(m), pref(m + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    as[i] = ang[i].first;
    pref[i + 1] = pref[i] + ang[i].second;
  }
  const double eps = 1e-12;
  auto rangeSum = [&](double lo, double hi) {
    auto b = std::lower_bound(as.begin(), as.end(), lo - eps) - as.begin();
    auto e = std::upper_bound(as.begin(), as.end(), hi + eps) - as.begin();
    return pref[e] - pref[b];
  };
  // Closed window of angular width exactly pi, wrap-aware.
  auto windowSum = [&](double lo) {
    while (lo <= -pi) lo += 2 * pi;
    while (lo > pi) lo -= 2 * pi;
    double hi = lo + pi;
    if (hi <= pi + eps) return rangeSum(lo, hi);
    return rangeSum(lo, pi) + rangeSum(-pi, hi - 2 * pi);
  };
  // The window weight is piecewise constant in the window start, with jumps
  // only where an end crosses a point angle; minima sit strictly between
  // events, so evaluating at event-interval midpoints is exact.
  std::vector<double> events;
  events.reserve(2 * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double a = as[i];
    double b = as[i] - pi;
    if (b <= -pi) b += 2 * pi;
    events.push_back(a);
    events.push_back(b);
  }
  std::sort(events.begin(), events.end());
  double best = total;
  for (std::size_t i = 0; i < events.size(); ++i) {
    double lo = events[i];
    double hi = i + 1 < events.size() ? events[i + 1] : events[0] + 2 * pi;
    best = std::min(best, windowSum(0.5 * (lo + hi)));
  }
  return best + atX;
}

}  // namespace stokern
