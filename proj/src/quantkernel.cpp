#include "stokern/quantkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "stokern/oracle.hpp"
#include "stokern/rng.hpp"
#include "stokern/width.hpp"

namespace stokern {

namespace {
constexpr double kPi = std::numbers::pi;
}

// --- kernel types -----------------------------------------------------------

int MixtureKernel::size() const {
  int s = 0;
  for (const auto& e : sets) s += e.size();
  return s;
}

double MixtureKernel::cdf(std::span<const double> u, double t) const {
  if (sets.empty()) return 1.0;
  int count = 0;
  for (const auto& e : sets)
    if (width(e, u) <= t) ++count;
  return static_cast<double>(count) / static_cast<double>(sets.size());
}

ExistentialSet BernoulliKernel::as_existential() const {
  std::vector<double> coords, probs;
  coords.reserve(anchors.coords.size() + sampled.coords.size());
  for (int i = 0; i < anchors.size(); ++i) {
    auto c = anchors.point(i);
    coords.insert(coords.end(), c.begin(), c.end());
    probs.push_back(1.0);
  }
  for (int i = 0; i < sampled.size(); ++i) {
    auto c = sampled.point(i);
    coords.insert(coords.end(), c.begin(), c.end());
    probs.push_back(sample_prob);
  }
  return ExistentialSet(dim, std::move(coords), std::move(probs));
}

bool TukeyRegion::contains_in_kernel(std::span<const double> x) const {
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  for (const auto& h : kernel_halfspaces)
    if (dot(h.normal, x) > h.offset + 1e-12 * scale) return false;
  return true;
}

// --- simple mixture -----------------------------------------------------------

MixtureKernel quant_simple(const Instance& inst, double eps, double tau, std::uint64_t seed,
                           const QuantConfig& cfg) {
  if (!(eps > 0.0 && eps <= 0.5) || !(tau > 0.0 && tau <= 0.5))
    throw ValidationError("quant_simple: eps and tau must be in (0, 1/2]");
  inst.validate_report().raise_if_invalid();
  const int d = inst.dimension();
  double raw = cfg.c_simple * std::log(1.0 / eps) / (tau * tau * std::pow(eps, d - 1));
  long long N = static_cast<long long>(std::ceil(raw));
  MixtureKernel out;
  out.dim = d;
  out.epsilon = eps;
  out.tau = tau;
  out.seed = seed;
  out.method = "simple";
  out.sets.reserve(static_cast<std::size_t>(N));
  for (long long i = 0; i < N; ++i) {
    Realization r = inst.sample(derive_seed(seed, static_cast<std::uint64_t>(i)));
    PointMatrix pts;
    pts.dim = d;
    pts.coords = std::move(r.coords);
    if (pts.size() == 0) {
      out.sets.push_back(std::move(pts));  // empty realization: width-0 atom
      continue;
    }
    DeterministicKernel k = eps_kernel(pts, eps);
    out.sets.push_back(std::move(k.points));
  }
  return out;
}

// --- Poisson sampling -----------------------------------------------------------

namespace {

// Draws from the discrete measure lambda_v / lambda via cumulative inversion.
struct RateSampler {
  std::vector<double> cum;
  double total = 0.0;
  explicit RateSampler(const std::vector<double>& rates) {
    cum.reserve(rates.size());
    for (double r : rates) {
      total += r;
      cum.push_back(total);
    }
  }
  int draw(Rng& rng) const {
    double x = rng.uniform() * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), x);
    int i = static_cast<int>(it - cum.begin());
    return std::min(i, static_cast<int>(cum.size()) - 1);
  }
};

}  // namespace

BernoulliKernel quant_poisson(const ExistentialSet& set, double tau, double delta,
                              std::uint64_t seed, const QuantConfig& cfg) {
  if (!(tau > 0.0 && tau <= 0.5)) throw ValidationError("quant_poisson: tau must be in (0, 1/2]");
  if (!(delta > 0.0 && delta < 1.0))
    throw ValidationError("quant_poisson: delta must be in (0, 1)");
  validate(set).raise_if_invalid();
  Lambda lam = lambda_of(set);  // rejects p = 1
  BernoulliKernel out;
  out.dim = set.dimension();
  out.tau = tau;
  out.delta = delta;
  out.seed = seed;
  out.method = "poisson";
  out.lambda = lam.total;
  if (lam.total == 0.0) return out;
  double tau1 = (tau / lam.total) * (tau / lam.total);
  double raw = cfg.c_poisson * std::log(1.0 / delta) / (tau1 * tau1);
  if (raw > static_cast<double>(cfg.poisson_cap))
    throw PreconditionError(
        "quant_poisson: sample count " + std::to_string(static_cast<long long>(raw)) +
        " exceeds the cap; use the depth-region construction for large total rate");
  long long N = std::max<long long>(1, static_cast<long long>(std::ceil(raw)));
  out.sample_prob = -std::expm1(-lam.total / static_cast<double>(N));
  RateSampler sampler(lam.per_point);
  Rng rng(derive_seed(seed, 0x706f6973));
  out.sampled.dim = out.dim;
  out.sampled.coords.reserve(static_cast<std::size_t>(N) * out.dim);
  for (long long i = 0; i < N; ++i) out.sampled.push(set.point(sampler.draw(rng)));
  return out;
}

// --- depth regions -----------------------------------------------------------

namespace {

// Largest projection value q with rate({proj >= q}) >= gamma, by three-way
// partitioning; expected linear time. Ties share a projection value, so the
// canonical order cannot change the result. Returns -inf when the total rate
// falls short.
double quantile_stop(const std::vector<double>& proj, const std::vector<double>& rate,
                     double gamma) {
  std::vector<std::pair<double, double>> items(proj.size());
  for (std::size_t i = 0; i < proj.size(); ++i) items[i] = {proj[i], rate[i]};
  double need = gamma;
  std::vector<std::pair<double, double>> above, below;
  while (!items.empty()) {
    double a = items.front().first;
    double b = items[items.size() / 2].first;
    double c = items.back().first;
    double pivot = std::max(std::min(a, b), std::min(std::max(a, b), c));
    above.clear();
    below.clear();
    double wAbove = 0, wEqual = 0;
    for (const auto& [v, w] : items) {
      if (v > pivot) {
        above.push_back({v, w});
        wAbove += w;
      } else if (v == pivot) {
        wEqual += w;
      } else {
        below.push_back({v, w});
      }
    }
    if (wAbove >= need) {
      items.swap(above);
    } else if (wAbove + wEqual >= need) {
      return pivot;
    } else {
      need -= wAbove + wEqual;
      items.swap(below);
    }
  }
  return -std::numeric_limits<double>::infinity();
}

struct RegionBuild {
  std::vector<Vec> poly;  // CCW vertices
  std::vector<Halfspace> halfspaces;
};

// Exact d = 2 region: one constraint per pair-determined direction.
RegionBuild exact_region_2d(const PointMatrix& pts, const std::vector<double>& rates,
                            double gamma) {
  const int n = pts.size();
  std::vector<double> dirs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double wx = pts.point(i)[0] - pts.point(j)[0];
      double wy = pts.point(i)[1] - pts.point(j)[1];
      if (wx == 0 && wy == 0) continue;
      double a = std::atan2(-wx, wy);  // direction with equal projections
      dirs.push_back(a);
      dirs.push_back(a + kPi);
    }
  dirs.push_back(0);
  dirs.push_back(kPi / 2);
  dirs.push_back(kPi);
  dirs.push_back(3 * kPi / 2);
  std::sort(dirs.begin(), dirs.end());
  dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());

  double bound = 1.0;
  for (int i = 0; i < n; ++i)
    bound = std::max({bound, std::abs(pts.point(i)[0]), std::abs(pts.point(i)[1])});

  std::vector<Halfspace> hs;
  std::vector<double> proj(n);
  for (double a : dirs) {
    Vec u{std::cos(a), std::sin(a)};
    for (int i = 0; i < n; ++i) proj[i] = dot(pts.point(i), u);
    double q = quantile_stop(proj, rates, gamma);
    if (q == -std::numeric_limits<double>::infinity())
      throw PreconditionError("depth region: total rate below the threshold");
    hs.push_back({u, q});
  }
  RegionBuild out;
  out.halfspaces = hs;
  out.poly = halfplane_intersection(hs, 4.0 * bound);
  if (out.poly.empty()) {
    // Degenerate (point or segment) region: recover its deepest point.
    auto [ctr, margin] = largest_inscribed_cube(hs, 2);
    if (margin > -1e-9) out.poly.push_back(ctr);
  }
  return out;
}

// Vertices of the intersection of 3-d halfspaces via polar duality around an
// interior point.
std::vector<Vec> halfspace_vertices_3d(const std::vector<Halfspace>& hs, const Vec& interior) {
  PointMatrix dual;
  dual.dim = 3;
  for (const auto& h : hs) {
    double margin = h.offset - dot(h.normal, interior);
    if (margin <= 1e-12) continue;  // constraint through the interior point: ignore
    Vec w(3);
    for (int k = 0; k < 3; ++k) w[k] = h.normal[k] / margin;
    dual.push(w);
  }
  if (dual.size() < 4) return {};
  std::vector<Vec> verts;
  for (const auto& f : convex_hull_3d(dual)) {
    if (std::abs(f.offset) < 1e-12) continue;
    Vec v(3);
    for (int k = 0; k < 3; ++k) v[k] = f.normal[k] / f.offset + interior[k];
    verts.push_back(v);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end(),
                          [](const Vec& a, const Vec& b) {
                            for (int k = 0; k < 3; ++k)
                              if (std::abs(a[k] - b[k]) > 1e-9) return false;
                            return true;
                          }),
              verts.end());
  return verts;
}

// Interior point maximizing the minimum slack (concave piecewise linear).
Vec interior_point(const std::vector<Halfspace>& hs, int dim) {
  auto [ctr, margin] = largest_inscribed_cube(hs, dim);
  if (!(margin > 0)) throw PreconditionError("depth region is empty or degenerate");
  return ctr;
}

RegionBuild exact_region_3d(const PointMatrix& pts, const std::vector<double>& rates, double gamma,
                            int cap) {
  const int n = pts.size();
  if (n > cap)
    throw PreconditionError("exact 3-d depth region limited to " + std::to_string(cap) +
                            " points");
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Vec a(3), b(3);
        for (int c = 0; c < 3; ++c) {
          a[c] = pts.point(j)[c] - pts.point(i)[c];
          b[c] = pts.point(k)[c] - pts.point(i)[c];
        }
        Vec nrm{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
        double nn = norm(nrm);
        if (nn < 1e-14) continue;
        for (double& x : nrm) x /= nn;
        dirs.push_back(nrm);
        Vec neg = nrm;
        for (double& x : neg) x = -x;
        dirs.push_back(neg);
      }
  for (int axis = 0; axis < 3; ++axis)
    for (double s : {1.0, -1.0}) {
      Vec u(3, 0.0);
      u[axis] = s;
      dirs.push_back(u);
    }
  std::vector<Halfspace> hs;
  std::vector<double> proj(n);
  for (const Vec& u : dirs) {
    for (int i = 0; i < n; ++i) proj[i] = dot(pts.point(i), u);
    double q = quantile_stop(proj, rates, gamma);
    if (q == -std::numeric_limits<double>::infinity())
      throw PreconditionError("depth region: total rate below the threshold");
    hs.push_back({u, q});
  }
  RegionBuild out;
  out.halfspaces = hs;
  Vec interior = interior_point(hs, 3);
  out.poly = halfspace_vertices_3d(hs, interior);
  return out;
}

// Dilate the hull of the chosen kernel points about their centroid and attach
// halfspaces; shared by the exact and iterative paths.
void finish_region(TukeyRegion& reg, const PointMatrix& kernelPts, double eps,
                   const ExistentialSet& set, const Lambda& lam) {
  const int d = reg.dim;
  Vec centroid(d, 0.0);
  for (int i = 0; i < kernelPts.size(); ++i)
    for (int k = 0; k < d; ++k) centroid[k] += kernelPts.point(i)[k] / kernelPts.size();
  reg.dilation_center = centroid;
  PointMatrix dilated;
  dilated.dim = d;
  for (int i = 0; i < kernelPts.size(); ++i) {
    Vec v(d);
    for (int k = 0; k < d; ++k)
      v[k] = centroid[k] + (1.0 + eps) * (kernelPts.point(i)[k] - centroid[k]);
    dilated.push(v);
  }
  if (d == 2) {
    auto hull = convex_hull_2d(dilated);
    PointMatrix hp;
    hp.dim = 2;
    for (int i : hull) hp.push(dilated.point(i));
    reg.kernel_hull = hp;
    if (hull.size() >= 3) {
      for (std::size_t i = 0; i < hull.size(); ++i) {
        auto a = dilated.point(hull[i]);
        auto b = dilated.point(hull[(i + 1) % hull.size()]);
        Vec nrm{b[1] - a[1], -(b[0] - a[0])};
        double nn = std::hypot(nrm[0], nrm[1]);
        if (nn < 1e-15) continue;
        nrm[0] /= nn;
        nrm[1] /= nn;
        reg.kernel_halfspaces.push_back({nrm, nrm[0] * a[0] + nrm[1] * a[1]});
      }
    } else {
      // Degenerate kernel region: axis slabs through its extent.
      for (int axis = 0; axis < 2; ++axis)
        for (double s : {1.0, -1.0}) {
          Vec u(2, 0.0);
          u[axis] = s;
          double best = -std::numeric_limits<double>::infinity();
          for (int i = 0; i < hp.size(); ++i) best = std::max(best, dot(hp.point(i), u));
          reg.kernel_halfspaces.push_back({u, best});
        }
    }
  } else {
    reg.kernel_hull = dilated;
    try {
      for (const auto& f : convex_hull_3d(dilated))
        reg.kernel_halfspaces.push_back({{f.normal[0], f.normal[1], f.normal[2]}, f.offset});
    } catch (const ValidationError&) {
      for (int axis = 0; axis < 3; ++axis)
        for (double s : {1.0, -1.0}) {
          Vec u(3, 0.0);
          u[axis] = s;
          double best = -std::numeric_limits<double>::infinity();
          for (int i = 0; i < dilated.size(); ++i) best = std::max(best, dot(dilated.point(i), u));
          reg.kernel_halfspaces.push_back({u, best});
        }
    }
  }
  reg.lambda_outside = 0.0;
  for (int i = 0; i < set.size(); ++i) {
    if (!reg.contains_in_kernel(set.point(i))) {
      reg.outside.push_back(i);
      reg.lambda_outside += lam.per_point[i];
    }
  }
}

}  // namespace

TukeyRegion tukey_region(const ExistentialSet& set, double tau, double eps,
                         const QuantConfig& cfg) {
  // gamma = ln(2/tau) must stay positive; tau beyond 1/2 is allowed here so
  // depth thresholds like gamma = 1 are expressible directly.
  if (!(tau > 0.0 && tau < 2.0)) throw ValidationError("tukey_region: tau must be in (0, 2)");
  if (!(eps > 0.0 && eps <= 0.5)) throw ValidationError("tukey_region: eps must be in (0, 1/2]");
  validate(set).raise_if_invalid();
  const int d = set.dimension();
  if (d != 2 && d != 3) throw PreconditionError("tukey_region: d must be 2 or 3");
  Lambda lam = lambda_of(set);
  const double gamma = std::log(2.0 / tau);
  if (!(lam.total > (d + 1) * gamma))
    throw PreconditionError("tukey_region: total rate " + std::to_string(lam.total) +
                            " below the Helly threshold " + std::to_string((d + 1) * gamma) +
                            "; use the Poisson-sampling construction");
  PointMatrix pts;
  pts.dim = d;
  pts.coords = set.coords();

  TukeyRegion reg;
  reg.dim = d;
  reg.gamma = gamma;
  RegionBuild rb;
  if (d == 2) {
    if (set.size() > cfg.exact_region_cap_2d)
      throw PreconditionError("exact 2-d depth region limited to " +
                              std::to_string(cfg.exact_region_cap_2d) +
                              " points; use the iterative construction");
    rb = exact_region_2d(pts, lam.per_point, gamma);
  } else {
    rb = exact_region_3d(pts, lam.per_point, gamma, cfg.exact_region_cap_3d);
  }
  if (rb.poly.empty()) throw PreconditionError("depth region is empty or degenerate");
  reg.region.dim = d;
  for (const auto& v : rb.poly) reg.region.push(v);
  reg.region_halfspaces = rb.halfspaces;

  DeterministicKernel k = eps_kernel(reg.region, eps);
  finish_region(reg, k.points, eps, set, lam);
  return reg;
}

TukeyRegion tukey_region_fast(const ExistentialSet& set, double tau, double eps,
                              std::uint64_t seed, const QuantConfig& cfg) {
  if (!(tau > 0.0 && tau <= 0.5) || !(eps > 0.0 && eps <= 0.5))
    throw ValidationError("tukey_region_fast: eps and tau must be in (0, 1/2]");
  validate(set).raise_if_invalid();
  if (set.dimension() != 2) throw PreconditionError("tukey_region_fast: d = 2 only");
  Lambda lam = lambda_of(set);
  const double gamma = std::log(2.0 / tau);
  if (!(lam.total > 3 * gamma))
    throw PreconditionError("tukey_region_fast: total rate below the Helly threshold");
  const int n = set.size();
  PointMatrix pts;
  pts.dim = 2;
  pts.coords = set.coords();
  double bound = 1.0;
  for (int i = 0; i < n; ++i)
    bound = std::max({bound, std::abs(pts.point(i)[0]), std::abs(pts.point(i)[1])});

  auto run = [&](double eps2Factor, double sampleC, TukeyRegion& reg) -> bool {
    const double stop = gamma * std::max(1.0 / std::sqrt(tau), 1.0);
    int zmax = std::max(4, static_cast<int>(std::ceil(std::log2(std::max(2.0, lam.total / stop)))) + 6);
    const double eps1 = eps / (2.0 * (zmax + 1));
    const double eps2 = eps2Factor * std::sqrt(eps1);
    const int D = cfg.fast_directions;
    const long long L =
        std::max<long long>(64, static_cast<long long>(
                                    std::ceil(sampleC * std::log(std::max(4.0, 2.0 * n * zmax)) /
                                              (eps2 * eps2))));

    std::vector<char> alive(n, 1);
    double lamRemaining = lam.total;
    PointMatrix anchors;  // vertices of the previous K, swept as immovable
    anchors.dim = 2;
    // Round 0 seed: points heavy enough to clear the threshold alone.
    {
      PointMatrix heavy;
      heavy.dim = 2;
      for (int i = 0; i < n; ++i)
        if (lam.per_point[i] >= gamma) heavy.push(set.point(i));
      if (heavy.size() > 0) anchors = heavy;
    }
    std::vector<Vec> polyH;
    PointMatrix kernelPts;
    kernelPts.dim = 2;
    Vec center(2, 0.0);
    int round = 0;
    Rng rng(derive_seed(seed, 0x7475));
    double stopAt = std::max(stop, gamma / (3.0 * eps2));
    reg.round_weights.clear();
    reg.round_weights.push_back(lamRemaining);
    while (lamRemaining > stopAt && round < zmax) {
      ++round;
      // Sample an eps2-approximation of the remaining rate mass (or take all).
      std::vector<int> idx;
      std::vector<double> w;
      long long remainingCount = 0;
      for (int i = 0; i < n; ++i) remainingCount += alive[i];
      if (remainingCount <= L) {
        for (int i = 0; i < n; ++i)
          if (alive[i]) {
            idx.push_back(i);
            w.push_back(lam.per_point[i]);
          }
      } else {
        std::vector<double> cum;
        std::vector<int> ids;
        cum.reserve(remainingCount);
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
          if (alive[i]) {
            acc += lam.per_point[i];
            cum.push_back(acc);
            ids.push_back(i);
          }
        for (long long s = 0; s < L; ++s) {
          double x = rng.uniform() * acc;
          auto it = std::upper_bound(cum.begin(), cum.end(), x);
          int pos = std::min<int>(static_cast<int>(it - cum.begin()),
                                  static_cast<int>(ids.size()) - 1);
          idx.push_back(ids[pos]);
          w.push_back(lamRemaining / static_cast<double>(L));
        }
      }
      const double gammaRound = std::max(4.0 * eps2 * lamRemaining, gamma + eps2 * lamRemaining);
      // Quantile sweep over a fixed direction net; anchors stop the sweep.
      std::vector<Halfspace> hs;
      hs.reserve(D);
      std::vector<double> proj(idx.size());
      for (int j = 0; j < D; ++j) {
        double a = 2 * kPi * j / D;
        Vec u{std::cos(a), std::sin(a)};
        double anchorStop = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < anchors.size(); ++i)
          anchorStop = std::max(anchorStop, dot(anchors.point(i), u));
        for (std::size_t i = 0; i < idx.size(); ++i) proj[i] = dot(set.point(idx[i]), u);
        double stopVal = std::max(quantile_stop(proj, w, gammaRound), anchorStop);
        if (stopVal == -std::numeric_limits<double>::infinity()) return false;
        hs.push_back({u, stopVal});
      }
      polyH = halfplane_intersection(hs, 4.0 * bound);
      if (polyH.size() < 3) return false;
      PointMatrix hp;
      hp.dim = 2;
      for (const auto& v : polyH) hp.push(v);
      DeterministicKernel ck = eps_kernel(hp, std::min(0.5, eps1));
      kernelPts = ck.points;
      center.assign(2, 0.0);
      for (int i = 0; i < kernelPts.size(); ++i)
        for (int k = 0; k < 2; ++k) center[k] += kernelPts.point(i)[k] / kernelPts.size();
      PointMatrix dilated;
      dilated.dim = 2;
      for (int i = 0; i < kernelPts.size(); ++i) {
        Vec v(2);
        for (int k = 0; k < 2; ++k)
          v[k] = center[k] + (1.0 + eps1) * (kernelPts.point(i)[k] - center[k]);
        dilated.push(v);
      }
      // Delete everything inside the dilated hull.
      auto hullIdx = convex_hull_2d(dilated);
      std::vector<Halfspace> khs;
      for (std::size_t i = 0; i < hullIdx.size() && hullIdx.size() >= 3; ++i) {
        auto a = dilated.point(hullIdx[i]);
        auto b = dilated.point(hullIdx[(i + 1) % hullIdx.size()]);
        Vec nrm{b[1] - a[1], -(b[0] - a[0])};
        double nn = std::hypot(nrm[0], nrm[1]);
        if (nn < 1e-15) continue;
        nrm[0] /= nn;
        nrm[1] /= nn;
        khs.push_back({nrm, nrm[0] * a[0] + nrm[1] * a[1]});
      }
      if (khs.empty()) return false;
      double lamNext = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        bool inside = true;
        for (const auto& h : khs)
          if (dot(h.normal, set.point(i)) > h.offset + 1e-12 * bound) {
            inside = false;
            break;
          }
        if (inside)
          alive[i] = 0;
        else
          lamNext += lam.per_point[i];
      }
      if (lamNext > 0.5 * lamRemaining && lamNext > stopAt) return false;  // halving failed
      lamRemaining = lamNext;
      reg.round_weights.push_back(lamRemaining);
      anchors.dim = 2;
      anchors.coords.clear();
      for (int i : hullIdx) anchors.push(dilated.point(i));
      if (round >= zmax && lamRemaining > stopAt) return false;
    }
    if (polyH.empty()) {
      // Never entered a round: the heavy-point hull already clears the
      // threshold; treat it as the region.
      if (anchors.size() == 0) return false;
      polyH.clear();
      auto hullIdx = convex_hull_2d(anchors);
      for (int i : hullIdx) polyH.push_back({anchors.point(i)[0], anchors.point(i)[1]});
      PointMatrix hp;
      hp.dim = 2;
      for (const auto& v : polyH) hp.push(v);
      DeterministicKernel ck = eps_kernel(hp, std::min(0.5, eps / 4));
      kernelPts = ck.points;
      center.assign(2, 0.0);
      for (int i = 0; i < kernelPts.size(); ++i)
        for (int k = 0; k < 2; ++k) center[k] += kernelPts.point(i)[k] / kernelPts.size();
    }
    // Final region: shrink H_z so every point of it certifiably clears the
    // threshold; K keeps the last dilation.
    double shrink = std::pow(1.0 + eps1, -std::max(1, round));
    reg.dim = 2;
    reg.gamma = gamma;
    reg.region.dim = 2;
    for (const auto& v : polyH) {
      Vec s(2);
      for (int k = 0; k < 2; ++k) s[k] = center[k] + shrink * (v[k] - center[k]);
      reg.region.push(s);
    }
    reg.rounds = round;
    finish_region(reg, kernelPts, eps1, set, lam);
    return true;
  };

  TukeyRegion reg;
  if (run(cfg.fast_eps2_factor, cfg.fast_sample_c, reg)) return reg;
  TukeyRegion reg2;
  if (run(cfg.fast_eps2_factor / 2.0, cfg.fast_sample_c * 4.0, reg2)) return reg2;
  if (n <= cfg.exact_region_cap_2d) return tukey_region(set, tau, eps, cfg);
  throw PreconditionError(
      "tukey_region_fast: weight halving failed after parameter escalation and the instance "
      "exceeds the exact-construction cap");
}

BernoulliKernel quant_tukey(const ExistentialSet& set, double eps, double tau, double delta,
                            std::uint64_t seed, const QuantConfig& cfg, bool fast_region) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("quant_tukey: delta must be in (0, 1)");
  TukeyRegion reg = fast_region ? tukey_region_fast(set, tau, eps, derive_seed(seed, 1), cfg)
                                : tukey_region(set, tau, eps, cfg);
  Lambda lam = lambda_of(set);
  BernoulliKernel out;
  out.dim = set.dimension();
  out.epsilon = eps;
  out.tau = tau;
  out.delta = delta;
  out.seed = seed;
  out.method = fast_region ? "tukey-fast" : "tukey";
  out.anchors = reg.kernel_hull;
  out.lambda = reg.lambda_outside;
  if (reg.lambda_outside <= 0.0 || reg.outside.empty()) return out;
  double tau1 = tau / reg.lambda_outside;
  double raw = cfg.c_tukey * std::log(1.0 / delta) / (tau1 * tau1);
  long long N = std::max<long long>(1, static_cast<long long>(std::ceil(raw)));
  if (N > cfg.poisson_cap)
    throw PreconditionError("quant_tukey: outside sample count exceeds the cap");
  std::vector<double> rates;
  rates.reserve(reg.outside.size());
  for (int i : reg.outside) rates.push_back(lam.per_point[i]);
  RateSampler sampler(rates);
  Rng rng(derive_seed(seed, 0x7478));
  out.sample_prob = -std::expm1(-reg.lambda_outside / static_cast<double>(N));
  out.sampled.dim = out.dim;
  for (long long i = 0; i < N; ++i) out.sampled.push(set.point(reg.outside[sampler.draw(rng)]));
  return out;
}

SubsetKernel quant_subset(const ExistentialSet& set, double eps, double tau, double beta) {
  double mu = std::min(eps, tau);
  return exp_kernel_subset(set, mu, beta);
}

// --- CDF evaluation -----------------------------------------------------------

WidthCdf cdf(const MixtureKernel& kernel, std::span<const double> u, std::vector<double> ts) {
  WidthCdf out;
  out.direction.assign(u.begin(), u.end());
  out.t = std::move(ts);
  out.exact = true;
  std::vector<double> widths;
  widths.reserve(kernel.sets.size());
  for (const auto& e : kernel.sets) widths.push_back(width(e, u));
  std::sort(widths.begin(), widths.end());
  for (double t : out.t) {
    auto it = std::upper_bound(widths.begin(), widths.end(), t);
    out.value.push_back(widths.empty() ? 1.0
                                       : static_cast<double>(it - widths.begin()) /
                                             static_cast<double>(widths.size()));
  }
  return out;
}

namespace {

WidthCdf cdf_mc_bernoulli(const BernoulliKernel& kernel, std::span<const double> u,
                          std::vector<double> ts, std::uint64_t seed, int samples) {
  WidthCdf out;
  out.direction.assign(u.begin(), u.end());
  out.t = std::move(ts);
  out.exact = false;
  out.samples = samples;
  const double q = kernel.sample_prob;
  const long long N = kernel.sampled.size();
  std::vector<double> anchorProj, anchorNeg;
  Vec neg(u.begin(), u.end());
  for (double& x : neg) x = -x;
  double aMax = -std::numeric_limits<double>::infinity();
  double aMin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kernel.anchors.size(); ++i) {
    aMax = std::max(aMax, dot(kernel.anchors.point(i), u));
    aMin = std::min(aMin, dot(kernel.anchors.point(i), u));
  }
  Rng rng(derive_seed(seed, 0x636466));
  const double logq = std::log1p(-q);
  std::vector<int> counts(out.t.size(), 0);
  std::vector<double> widths;
  widths.reserve(64);
  for (int s = 0; s < samples; ++s) {
    double mx = aMax, mn = aMin;  // anchors always present
    // Geometric skip over the Bernoulli(q) process.
    if (q >= 1.0) {
      for (long long i = 0; i < N; ++i) {
        double p = dot(kernel.sampled.point(i), u);
        mx = std::max(mx, p);
        mn = std::min(mn, p);
      }
    } else if (q > 0.0 && N > 0) {
      long long i = -1;
      while (true) {
        double step = std::floor(std::log(1.0 - rng.uniform()) / logq);
        if (step > static_cast<double>(N)) break;
        i += 1 + static_cast<long long>(step);
        if (i >= N) break;
        double p = dot(kernel.sampled.point(static_cast<int>(i)), u);
        mx = std::max(mx, p);
        mn = std::min(mn, p);
      }
    }
    double w = mx == -std::numeric_limits<double>::infinity() ? 0.0 : mx - mn;
    for (std::size_t k = 0; k < out.t.size(); ++k)
      if (w <= out.t[k]) ++counts[k];
  }
  for (std::size_t k = 0; k < out.t.size(); ++k) {
    double v = static_cast<double>(counts[k]) / samples;
    out.value.push_back(v);
  }
  out.ci_halfwidth_99 = 2.5758293035489004 * std::sqrt(0.25 / samples);
  return out;
}

}  // namespace

WidthCdf cdf(const BernoulliKernel& kernel, std::span<const double> u, std::vector<double> ts,
             std::uint64_t mc_seed, int mc_samples) {
  // Anchors are deterministic; only sampled points contribute realization bits.
  if (kernel.size() > 0 && kernel.sample_prob < 1.0 &&
      kernel.sampled.size() <= kEnumerationBitCap) {
    Instance inst(kernel.as_existential());
    return cdf(inst, u, std::move(ts), mc_seed, mc_samples);
  }
  if (kernel.size() == 0) {
    WidthCdf out;
    out.direction.assign(u.begin(), u.end());
    out.t = std::move(ts);
    for (double t : out.t) out.value.push_back(t >= 0 ? 1.0 : 0.0);
    return out;
  }
  return cdf_mc_bernoulli(kernel, u, std::move(ts), mc_seed, mc_samples);
}

WidthCdf cdf(const Instance& inst, std::span<const double> u, std::vector<double> ts,
             std::uint64_t mc_seed, int mc_samples) {
  WidthCdf out;
  out.direction.assign(u.begin(), u.end());
  out.t = std::move(ts);
  if (realization_bits(inst) <= kEnumerationBitCap) {
    out.exact = true;
    std::vector<double> acc(out.t.size(), 0.0);
    for_each_realization(inst, [&](double p, const PointMatrix& pts) {
      double w = width(pts, u);
      for (std::size_t k = 0; k < out.t.size(); ++k)
        if (w <= out.t[k]) acc[k] += p;
    });
    out.value = std::move(acc);
    return out;
  }
  out.exact = false;
  out.samples = mc_samples;
  std::vector<int> counts(out.t.size(), 0);
  PointMatrix pts;
  pts.dim = inst.dimension();
  for (int s = 0; s < mc_samples; ++s) {
    Realization r = inst.sample(derive_seed(mc_seed, static_cast<std::uint64_t>(s)));
    pts.coords = std::move(r.coords);
    double w = width(pts, u);
    for (std::size_t k = 0; k < out.t.size(); ++k)
      if (w <= out.t[k]) ++counts[k];
  }
  for (std::size_t k = 0; k < out.t.size(); ++k)
    out.value.push_back(static_cast<double>(counts[k]) / mc_samples);
  out.ci_halfwidth_99 = 2.5758293035489004 * std::sqrt(0.25 / mc_samples);
  return out;
}

}  // namespace stokern
