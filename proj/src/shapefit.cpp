#include "stokern/shapefit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stokern/oracle.hpp"
#include "stokern/rng.hpp"
#include "stokern/width.hpp"

namespace stokern {

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

double max_dist(const PointMatrix& pts, std::span<const double> c) {
  double m = 0.0;
  for (int i = 0; i < pts.size(); ++i) m = std::max(m, dist(pts.point(i), c));
  return pts.size() == 0 ? 0.0 : m;
}

double shell_width(const PointMatrix& pts, std::span<const double> c) {
  if (pts.size() == 0) return 0.0;
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pts.size(); ++i) {
    double t = dist(pts.point(i), c);
    mx = std::max(mx, t);
    mn = std::min(mn, t);
  }
  return mx - mn;
}

template <typename F>
double golden_min(F&& f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Coordinate descent by golden section, widened with a few random line
// directions per sweep so kinks off the axes cannot stall it.
template <typename F>
double line_search_descent(F&& obj, Vec& c, double range, double tol, Rng& rng) {
  const int d = static_cast<int>(c.size());
  double cur = obj(c);
  double step = std::max(range, tol * 4);
  while (step > tol) {
    bool improved = false;
    std::vector<Vec> dirs;
    for (int axis = 0; axis < d; ++axis) {
      Vec u(d, 0.0);
      u[axis] = 1.0;
      dirs.push_back(u);
    }
    for (int extra = 0; extra < 2 * d; ++extra) {
      Vec u(d);
      double nn = 0;
      for (int k = 0; k < d; ++k) {
        u[k] = rng.uniform(-1.0, 1.0);
        nn += u[k] * u[k];
      }
      if (nn < 1e-12) continue;
      nn = std::sqrt(nn);
      for (double& x : u) x /= nn;
      dirs.push_back(u);
    }
    for (const Vec& u : dirs) {
      auto slice = [&](double t) {
        Vec p = c;
        for (int k = 0; k < d; ++k) p[k] += t * u[k];
        return obj(p);
      };
      double t = golden_min(slice, -step, step, tol * 0.25);
      double v = slice(t);
      if (v < cur - 1e-15) {
        for (int k = 0; k < d; ++k) c[k] += t * u[k];
        cur = v;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return cur;
}

FitResult fit_common(const ExistentialSet& set, double eps, double beta, std::uint64_t seed,
                     const FitConfig& cfg, bool shell) {
  const int d = set.dimension();
  if (d != 2 && d != 3) throw PreconditionError("shape fitting supports d in {2, 3}");
  FpowKernel kern = fpow_kernel(set, eps, 2, beta, seed, cfg.fpow);
  // Identical mixture members collapse to weights; the objective value is
  // unchanged and evaluation cost drops to the number of distinct sets.
  std::map<std::vector<double>, double> grouped;
  for (const auto& e : kern.sets)
    grouped[e.coords] += 1.0 / static_cast<double>(kern.sets.size());
  std::vector<std::pair<PointMatrix, double>> mixture;
  mixture.reserve(grouped.size());
  for (const auto& [coords, w] : grouped) {
    PointMatrix e;
    e.dim = d;
    e.coords = coords;
    mixture.emplace_back(std::move(e), w);
  }
  auto obj = [&](std::span<const double> c) {
    double acc = 0.0;
    for (const auto& [e, w] : mixture) acc += w * (shell ? shell_width(e, c) : max_dist(e, c));
    return acc;
  };

  // Starting centers: the input centroid plus centroids of sampled kernels.
  std::vector<Vec> starts;
  Vec global(d, 0.0);
  for (int i = 0; i < set.size(); ++i)
    for (int k = 0; k < d; ++k) global[k] += set.point(i)[k] / set.size();
  starts.push_back(global);
  Rng pick(derive_seed(seed, 0x666974));
  for (int r = 0; r < cfg.restarts && !kern.sets.empty(); ++r) {
    const PointMatrix& e = kern.sets[pick.below(kern.sets.size())];
    if (e.size() == 0) continue;
    Vec c(d, 0.0);
    for (int i = 0; i < e.size(); ++i)
      for (int k = 0; k < d; ++k) c[k] += e.point(i)[k] / e.size();
    starts.push_back(std::move(c));
  }
  double range = 1.0;
  for (int i = 0; i < set.size(); ++i)
    for (int k = 0; k < d; ++k) range = std::max(range, std::abs(set.point(i)[k] - global[k]));

  FitResult best;
  best.value = std::numeric_limits<double>::infinity();
  double worstConverged = -std::numeric_limits<double>::infinity();
  Rng rng(derive_seed(seed, 0x6c73));
  for (const Vec& s0 : starts) {
    Vec c = s0;
    double v = line_search_descent(obj, c, 2.0 * range, cfg.tol, rng);
    worstConverged = std::max(worstConverged, v);
    if (v < best.value) {
      best.value = v;
      best.center = c;
    }
  }
  best.coreset_size = kern.size();
  best.optimizer_gap = shell ? std::max(0.0, worstConverged - best.value) : 0.0;
  if (!shell) {
    // Convex objective: the restart spread is a direct convergence gap.
    best.optimizer_gap = std::max(0.0, worstConverged - best.value);
  }
  return best;
}

}  // namespace

FitResult expected_meb(const ExistentialSet& set, double eps, double beta, std::uint64_t seed,
                       const FitConfig& cfg) {
  return fit_common(set, eps, beta, seed, cfg, /*shell=*/false);
}

FitResult expected_shell(const ExistentialSet& set, double eps, double beta, std::uint64_t seed,
                         const FitConfig& cfg) {
  return fit_common(set, eps, beta, seed, cfg, /*shell=*/true);
}

// --- squared-distance envelope coreset ------------------------------------------

double SqMebCoreset::evaluate(std::span<const double> x) const {
  double xx = dot(x, x);
  double best = 0.0;
  for (const auto& q : quadratics) {
    double v = q[0] * xx + q[dim + 1];
    for (int k = 0; k < dim; ++k) v -= 2.0 * q[k + 1] * x[k];
    best = std::max(best, v);
  }
  return best;
}

namespace {

// Expected farthest squared distance E[max |x - v|^2] equals the expected
// support of the lifted instance (1, v, |v|^2) in direction
// (|x|^2, -2x, 1); each extreme-vertex probe of the lifted instance yields a
// quadratic lower bound that is tight at the probed x.
Instance lift_instance(const Instance& inst) {
  const int d = inst.dimension();
  auto lift = [&](std::span<const double> v) {
    Vec y(d + 2);
    y[0] = 1.0;
    double n2 = 0.0;
    for (int k = 0; k < d; ++k) {
      y[k + 1] = v[k];
      n2 += v[k] * v[k];
    }
    y[d + 1] = n2;
    return y;
  };
  if (inst.existential()) {
    const auto& s = inst.as_existential();
    std::vector<double> coords;
    for (int i = 0; i < s.size(); ++i) {
      Vec y = lift(s.point(i));
      coords.insert(coords.end(), y.begin(), y.end());
    }
    return Instance(ExistentialSet(d + 2, std::move(coords), s.probs()));
  }
  const auto& s = inst.as_locational();
  std::vector<LocationDistribution> pts;
  for (const auto& pt : s.points()) {
    LocationDistribution nd;
    nd.probs = pt.probs;
    for (int l = 0; l < pt.locations(); ++l) {
      Vec y = lift(std::span<const double>(pt.coords.data() + static_cast<std::size_t>(l) * d,
                                           static_cast<std::size_t>(d)));
      nd.coords.insert(nd.coords.end(), y.begin(), y.end());
    }
    pts.push_back(std::move(nd));
  }
  return Instance(LocationalSet(d + 2, std::move(pts)));
}

Vec lifted_direction(std::span<const double> x) {
  Vec u(x.size() + 2);
  u[0] = dot(x, x);
  for (std::size_t k = 0; k < x.size(); ++k) u[k + 1] = -2.0 * x[k];
  u[x.size() + 1] = 1.0;
  return u;
}

}  // namespace

SqMebCoreset expected_sq_meb_coreset(const Instance& inst, double eps) {
  if (!(eps > 0.0 && eps <= 0.5))
    throw ValidationError("expected_sq_meb_coreset: eps must be in (0, 1/2]");
  inst.validate_report().raise_if_invalid();
  const int d = inst.dimension();
  SqMebCoreset out;
  out.dim = d;
  out.epsilon = eps;
  Instance lifted = lift_instance(inst);

  // Probe region: the location bounding box inflated 2x.
  Vec lo(d, std::numeric_limits<double>::infinity());
  Vec hi(d, -std::numeric_limits<double>::infinity());
  auto absorb = [&](std::span<const double> p) {
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  };
  if (inst.existential()) {
    const auto& s = inst.as_existential();
    for (int i = 0; i < s.size(); ++i) absorb(s.point(i));
  } else {
    const auto& s = inst.as_locational();
    for (const auto& pt : s.points())
      for (int l = 0; l < pt.locations(); ++l)
        absorb(std::span<const double>(pt.coords.data() + static_cast<std::size_t>(l) * d,
                                       static_cast<std::size_t>(d)));
  }
  Vec mid(d), half(d);
  for (int k = 0; k < d; ++k) {
    mid[k] = 0.5 * (lo[k] + hi[k]);
    half[k] = std::max(1e-9, hi[k] - lo[k]) * 1.0 + 1e-9;
  }

  auto add_probe = [&](std::span<const double> x) {
    Vec g = extreme_vertex(lifted, lifted_direction(x));
    out.quadratics.push_back(std::move(g));
  };
  auto reference = [&](std::span<const double> x) {
    return expected_support(lifted, lifted_direction(x)).f;
  };

  // Adaptive grid refinement until the envelope clears the relative budget on
  // a validation grid between probe points.
  int g = std::max(3, static_cast<int>(std::ceil(2.0 / std::sqrt(eps))));
  for (int attempt = 0; attempt < 4; ++attempt) {
    out.quadratics.clear();
    std::vector<int> digits(d, 0);
    while (true) {
      Vec x(d);
      for (int k = 0; k < d; ++k) x[k] = mid[k] + half[k] * (-1.0 + 2.0 * digits[k] / (g - 1.0));
      add_probe(x);
      int pos = 0;
      while (pos < d) {
        if (++digits[pos] < g) break;
        digits[pos] = 0;
        ++pos;
      }
      if (pos == d) break;
    }
    // Validate at cell midpoints.
    bool ok = true;
    std::fill(digits.begin(), digits.end(), 0);
    while (ok) {
      Vec x(d);
      for (int k = 0; k < d; ++k)
        x[k] = mid[k] + half[k] * (-1.0 + 2.0 * (digits[k] + 0.5) / (g - 1.0));
      double ref = reference(x);
      double got = out.evaluate(x);
      if (got < (1.0 - eps * 0.9) * ref - 1e-12) ok = false;
      int pos = 0;
      while (pos < d) {
        if (++digits[pos] < g - 1) break;
        digits[pos] = 0;
        ++pos;
      }
      if (pos == d) break;
    }
    if (ok) break;
    g = g * 2 - 1;
  }
  // Deduplicate identical quadratics.
  std::sort(out.quadratics.begin(), out.quadratics.end());
  out.quadratics.erase(std::unique(out.quadratics.begin(), out.quadratics.end()),
                       out.quadratics.end());
  return out;
}

double enumerate_expected_sq_farthest(const Instance& inst, std::span<const double> x) {
  return enumerate_expected(inst, [&](const PointMatrix& pts) {
    double m = 0.0;
    for (int i = 0; i < pts.size(); ++i) {
      double t = dist(pts.point(i), x);
      m = std::max(m, t * t);
    }
    return m;
  });
}

double enumerate_meb_objective(const Instance& inst, std::span<const double> c) {
  return enumerate_expected(inst, [&](const PointMatrix& pts) { return max_dist(pts, c); });
}

double enumerate_shell_objective(const Instance& inst, std::span<const double> c) {
  return enumerate_expected(inst, [&](const PointMatrix& pts) { return shell_width(pts, c); });
}

}  // namespace stokern
