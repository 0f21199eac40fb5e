#include "stokern/fpowkernel.hpp"

#include <algorithm>
#include <cmath>

#include "stokern/expkernel.hpp"
#include "stokern/oracle.hpp"
#include "stokern/rng.hpp"

namespace stokern {

bool polar_contains(const Instance& inst, std::span<const double> u) {
  const int d = inst.dimension();
  auto check = [&](std::span<const double> p) { return dot(p, u) >= -1e-12; };
  if (inst.existential()) {
    const auto& s = inst.as_existential();
    for (int i = 0; i < s.size(); ++i)
      if (!check(s.point(i))) return false;
    return true;
  }
  const auto& s = inst.as_locational();
  for (const auto& pt : s.points())
    for (int l = 0; l < pt.locations(); ++l)
      if (!check(std::span<const double>(pt.coords.data() + static_cast<std::size_t>(l) * d,
                                         static_cast<std::size_t>(d))))
        return false;
  return true;
}

double t_r(const PointMatrix& pts, std::span<const double> u, int r) {
  if (r < 1) throw ValidationError("t_r: r must be a positive integer");
  if (pts.size() == 0) return 0.0;
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pts.size(); ++i) {
    double v = dot(pts.point(i), u);
    if (v < -1e-12) throw PreconditionError("t_r: direction outside the polar cone");
    v = std::max(v, 0.0);
    double root = r == 1 ? v : std::pow(v, 1.0 / r);
    mx = std::max(mx, root);
    mn = std::min(mn, root);
  }
  return mx - mn;
}

int FpowKernel::size() const {
  int s = 0;
  for (const auto& e : sets) s += e.size();
  return s;
}

double FpowKernel::expected_t_r(std::span<const double> u) const {
  if (sets.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& e : sets) acc += t_r(e, u, r);
  return acc / static_cast<double>(sets.size());
}

FpowKernel fpow_kernel(const ExistentialSet& set, double eps, int r, double beta,
                       std::uint64_t seed, const FpowConfig& cfg) {
  if (!(eps > 0.0 && eps <= 0.5)) throw ValidationError("fpow_kernel: eps must be in (0, 1/2]");
  if (r < 1) throw ValidationError("fpow_kernel: r must be a positive integer");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("fpow_kernel: beta must be in (0, 1]");
  validate(set).raise_if_invalid();
  if (set.min_prob() < beta)
    throw PreconditionError("probability floor violated: min p < beta");
  const int d = set.dimension();
  FpowKernel out;
  out.dim = d;
  out.r = r;
  out.epsilon = eps;
  out.beta = beta;
  out.seed = seed;
  out.eps0 = r == 1 ? eps / 4.0 : std::pow(eps / (4.0 * (r - 1)), r);
  double expo = (static_cast<double>(r) * d - r + 4.0) / 2.0;
  double raw = cfg.c_samples * std::log(1.0 / eps) / std::pow(eps, expo);
  long long N = std::max<long long>(1, static_cast<long long>(std::ceil(raw)));
  if (N > cfg.sample_cap)
    throw PreconditionError("fpow_kernel: sample count exceeds the cap");
  const double kernelEps = std::min(0.5, std::max(out.eps0, 1e-6));
  out.sets.reserve(static_cast<std::size_t>(N));
  for (long long i = 0; i < N; ++i) {
    Realization real = sample_realization(set, derive_seed(seed, static_cast<std::uint64_t>(i)));
    PointMatrix pts;
    pts.dim = d;
    pts.coords = std::move(real.coords);
    if (pts.size() == 0) {
      out.sets.push_back(std::move(pts));
      continue;
    }
    DeterministicKernel k = eps_kernel(pts, kernelEps);
    out.sets.push_back(std::move(k.points));
  }
  return out;
}

double enumerate_expected_t_r(const Instance& inst, std::span<const double> u, int r) {
  double acc = 0.0;
  for_each_realization(inst, [&](double p, const PointMatrix& pts) { acc += p * t_r(pts, u, r); });
  return acc;
}

}  // namespace stokern
