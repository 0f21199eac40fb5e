#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stokern/json_io.hpp"
#include "stokern/oracle.hpp"
#include "stokern/parallel.hpp"
#include "stokern/presets.hpp"
#include "stokern/rng.hpp"
#include "stokern/serialize.hpp"
#include "stokern/shapefit.hpp"
#include "stokern/width.hpp"

namespace {

using namespace stokern;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

Vec parse_direction(const std::string& s) {
  Vec u;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) u.push_back(std::stod(tok));
  if (u.empty()) throw ValidationError("empty direction");
  double n = norm(u);
  if (n == 0) throw ValidationError("zero direction");
  for (double& x : u) x /= n;
  return u;
}

std::vector<Vec> sweep_directions(int dim, int count, std::uint64_t seed) {
  std::vector<Vec> dirs;
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      double th = 2 * kPi * i / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  Rng rng(derive_seed(seed, 0x646972));
  while (static_cast<int>(dirs.size()) < count) {
    Vec v(dim);
    double n2 = 0;
    for (int k = 0; k < dim; ++k) {
      v[k] = rng.uniform(-1.0, 1.0);
      n2 += v[k] * v[k];
    }
    if (n2 < 1e-9 || n2 > 1.0) continue;
    double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out.precision(17);
  return out;
}

// CDF evaluator for a kernel file of any kind, including raw instances.
struct KernelCdf {
  std::string kind;
  MixtureKernel mixture;
  BernoulliKernel bernoulli;
  Instance instance;
  std::uint64_t mc_seed = 17;
  int mc_samples = 100'000;

  static KernelCdf load(const std::string& path) {
    KernelCdf k;
    json j = read_json_file(path);
    std::string kind = j.value("kind", "");
    if (kind == "mixture") {
      k.kind = "mixture";
      k.mixture = mixture_from_json(j);
    } else if (kind == "bernoulli") {
      k.kind = "bernoulli";
      k.bernoulli = bernoulli_from_json(j);
    } else {
      k.kind = "instance";
      k.instance = instance_from_json(j);
    }
    return k;
  }
  int dimension() const {
    if (kind == "mixture") return mixture.dim;
    if (kind == "bernoulli") return bernoulli.dim;
    return instance.dimension();
  }
  double eval(std::span<const double> u, double t) const {
    std::vector<double> ts{t};
    if (kind == "mixture") return cdf(mixture, u, ts).value[0];
    if (kind == "bernoulli") return cdf(bernoulli, u, ts, mc_seed, mc_samples).value[0];
    return cdf(instance, u, ts, mc_seed, mc_samples).value[0];
  }
};

int run(int argc, char** argv) {
  CLI::App app{"stochastic directional-width coresets"};
  app.require_subcommand(1);
  int threads = default_threads();
  app.add_option("--threads", threads, "parallelism for sweeps and sampling");

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  std::string genPreset = "uniform-disk", genOut = "instance.json";
  int genN = 32, genD = 2;
  double genP = 0.5, genBeta = 0.0;
  std::uint64_t genSeed = 1;
  gen->add_option("--preset", genPreset,
                  "uniform-disk|circle|clustered|negative-lemma|locational-grid");
  gen->add_option("--n", genN, "point count");
  gen->add_option("--d", genD, "dimension");
  gen->add_option("--p", genP, "existential probability (<=0: random in [beta,1])");
  gen->add_option("--beta", genBeta, "probability floor for random probabilities");
  gen->add_option("--seed", genSeed, "random seed");
  gen->add_option("--out", genOut, "output path");

  // --- width -------------------------------------------------------------
  auto* widthCmd = app.add_subcommand("width", "expected width along one direction");
  std::string widthIn, widthDir = "1,0";
  widthCmd->add_option("--in", widthIn, "instance file")->required();
  widthCmd->add_option("--dir", widthDir, "direction, comma separated");

  // --- sweep -------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "angular width sweep to CSV (d = 2)");
  std::string sweepIn, sweepOut = "sweep.csv";
  int sweepSteps = 360;
  bool sweepPerDirection = false;
  sweep->add_option("--in", sweepIn)->required();
  sweep->add_option("--out", sweepOut);
  sweep->add_option("--steps", sweepSteps, "directions over [0, 2*pi)");
  sweep->add_flag("--per-direction", sweepPerDirection,
                  "recompute per direction instead of querying the angular structure");

  // --- polytope ----------------------------------------------------------
  auto* poly = app.add_subcommand("polytope", "explicit expectation polytope (d = 2)");
  std::string polyIn, polyOut = "polytope.json";
  poly->add_option("--in", polyIn)->required();
  poly->add_option("--out", polyOut);

  // --- expkernel ----------------------------------------------------------
  auto* expk = app.add_subcommand("expkernel", "expected-width coreset");
  std::string expIn, expOut = "expkernel.json", expReport;
  double expEps = 0.1, expBeta = 0.0;
  bool expSubset = false;
  int expSweep = 1024;
  expk->add_option("--in", expIn)->required();
  expk->add_option("--eps", expEps);
  expk->add_flag("--subset", expSubset, "subset variant (requires --beta)");
  expk->add_option("--beta", expBeta, "probability floor for the subset variant");
  expk->add_option("--out", expOut);
  expk->add_option("--report", expReport, "sweep report CSV path");
  expk->add_option("--sweep", expSweep, "sweep directions in the report");

  // --- quantkernel --------------------------------------------------------
  auto* quant = app.add_subcommand("quantkernel", "width-distribution coreset");
  std::string qIn, qOut = "quantkernel.json", qMethod = "auto", qBand;
  double qEps = 0.2, qTau = 0.2, qDelta = 0.05, qBeta = 0.0;
  std::uint64_t qSeed = 1;
  int qDirs = 32, qTs = 16;
  quant->add_option("--in", qIn)->required();
  quant->add_option("--eps", qEps);
  quant->add_option("--tau", qTau);
  quant->add_option("--delta", qDelta);
  quant->add_option("--beta", qBeta, "probability floor (subset method)");
  quant->add_option("--method", qMethod, "simple|poisson|tukey|tukey-fast|subset|auto");
  quant->add_option("--seed", qSeed);
  quant->add_option("--out", qOut);
  quant->add_option("--band-report", qBand, "band report CSV (enumeration reference)");
  quant->add_option("--band-directions", qDirs);
  quant->add_option("--band-tvalues", qTs);

  // --- fpowkernel ---------------------------------------------------------
  auto* fpow = app.add_subcommand("fpowkernel", "fractional-power extent coreset");
  std::string fIn, fOut = "fpowkernel.json", fReport;
  double fEps = 0.25, fBeta = 0.5;
  int fR = 2, fDirs = 64;
  std::uint64_t fSeed = 1;
  fpow->add_option("--in", fIn)->required();
  fpow->add_option("--eps", fEps);
  fpow->add_option("--r", fR);
  fpow->add_option("--beta", fBeta);
  fpow->add_option("--seed", fSeed);
  fpow->add_option("--out", fOut);
  fpow->add_option("--report", fReport, "evaluation report CSV (enumeration reference)");
  fpow->add_option("--directions", fDirs);

  // --- eval ----------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "band-check a kernel against a reference");
  std::string evIn, evKernel, evOut = "band.csv", evAgainst = "exact";
  double evEps = 0.2, evTau = 0.2;
  int evDirs = 32, evTs = 16;
  std::uint64_t evSeed = 17;
  eval->add_option("--in", evIn, "reference instance file")->required();
  eval->add_option("--kernel", evKernel, "kernel file (mixture/bernoulli/instance)")->required();
  eval->add_option("--against", evAgainst, "exact|mc");
  eval->add_option("--eps", evEps);
  eval->add_option("--tau", evTau);
  eval->add_option("--directions", evDirs);
  eval->add_option("--tvalues", evTs);
  eval->add_option("--seed", evSeed);
  eval->add_option("--out", evOut);

  // --- fit -----------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "shape fitting on the coreset");
  std::string fitIn, fitShape = "meb", fitOut;
  double fitEps = 0.2, fitBeta = 0.5;
  std::uint64_t fitSeed = 1;
  fit->add_option("shape", fitShape, "meb|shell")->required();
  fit->add_option("--in", fitIn)->required();
  fit->add_option("--eps", fitEps);
  fit->add_option("--beta", fitBeta);
  fit->add_option("--seed", fitSeed);
  fit->add_option("--out", fitOut, "write the JSON result here as well");

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    Instance inst = make_preset(genPreset, genN, genD, genP, genBeta, genSeed);
    save_instance(inst, genOut);
    std::cout << "wrote " << genOut << "\n";
    return 0;
  }
  if (*widthCmd) {
    Instance inst = load_instance(widthIn);
    Vec u = parse_direction(widthDir);
    if (static_cast<int>(u.size()) != inst.dimension())
      throw ValidationError("direction dimension mismatch");
    std::cout.precision(17);
    std::cout << expected_width(inst, u) << "\n";
    return 0;
  }
  if (*sweep) {
    Instance inst = load_instance(sweepIn);
    if (inst.dimension() != 2) throw PreconditionError("sweep requires d = 2");
    auto out = open_out(sweepOut);
    out << "theta,expected_width,f_plus,f_minus\n";
    std::vector<std::array<double, 4>> rows(sweepSteps);
    if (!sweepPerDirection) {
      AngularStructure as(inst);
      for (int i = 0; i < sweepSteps; ++i) {
        double th = 2 * kPi * i / sweepSteps;
        rows[i] = {th, as.query_width(th), as.query_support(th), as.query_support(th + kPi)};
      }
    } else {
      parallel_for(sweepSteps, threads, [&](int i) {
        double th = 2 * kPi * i / sweepSteps;
        Vec u{std::cos(th), std::sin(th)};
        Vec nu{-u[0], -u[1]};
        double fp = expected_support(inst, u).f;
        double fm = expected_support(inst, nu).f;
        rows[i] = {th, fp + fm, fp, fm};
      });
    }
    for (const auto& r : rows) out << r[0] << "," << r[1] << "," << r[2] << "," << r[3] << "\n";
    std::cout << "wrote " << sweepOut << "\n";
    return 0;
  }
  if (*poly) {
    Instance inst = load_instance(polyIn);
    ExpectationPolytope M = build_expectation_polytope(inst);
    json j = {{"dimension", 2}, {"cone_count", M.cone_count}, {"vertices", json::array()}};
    for (int i = 0; i < M.vertices.size(); ++i) {
      auto p = M.vertices.point(i);
      j["vertices"].push_back(std::vector<double>(p.begin(), p.end()));
    }
    write_json_file(j, polyOut);
    std::cout << "wrote " << polyOut << " (" << M.vertices.size() << " vertices)\n";
    return 0;
  }
  if (*expk) {
    Instance inst = load_instance(expIn);
    PointMatrix kernelPts;
    if (expSubset) {
      if (!inst.existential())
        throw PreconditionError("subset variant requires the existential model");
      if (expBeta <= 0) throw ValidationError("--subset requires --beta > 0");
      SubsetKernel k = exp_kernel_subset(inst.as_existential(), expEps, expBeta);
      write_json_file(to_json(k), expOut);
      kernelPts.dim = inst.dimension();
      kernelPts.coords = k.points.coords();
      if (!expReport.empty()) {
        auto out = open_out(expReport);
        out << "direction,omega_P,omega_S,ratio\n";
        Instance sub(k.points);
        for (const Vec& u : sweep_directions(inst.dimension(), expSweep, 7)) {
          double wp = expected_width(inst, u);
          double ws = expected_width(sub, u);
          out << u[0];
          for (std::size_t c = 1; c < u.size(); ++c) out << ";" << u[c];
          out << "," << wp << "," << ws << "," << (wp > 0 ? ws / wp : 1.0) << "\n";
        }
      }
      std::cout << "wrote " << expOut << " (" << k.points.size() << " points)\n";
      return 0;
    }
    DeterministicKernel k = exp_kernel(inst, expEps);
    write_json_file(to_json(k), expOut);
    if (!expReport.empty()) {
      auto out = open_out(expReport);
      out << "direction,omega_P,omega_S,ratio\n";
      for (const Vec& u : sweep_directions(inst.dimension(), expSweep, 7)) {
        double wp = expected_width(inst, u);
        double ws = width(k.points, u);
        out << u[0];
        for (std::size_t c = 1; c < u.size(); ++c) out << ";" << u[c];
        out << "," << wp << "," << ws << "," << (wp > 0 ? ws / wp : 1.0) << "\n";
      }
    }
    std::cout << "wrote " << expOut << " (" << k.points.size() << " points)\n";
    return 0;
  }
  if (*quant) {
    Instance inst = load_instance(qIn);
    std::string method = qMethod;
    json kj;
    if (method == "auto") {
      if (!inst.existential()) {
        method = "simple";
      } else {
        Lambda lam = lambda_of(inst.as_existential());
        method = lam.total <= 3.0 * std::log(2.0 / qTau) ? "poisson" : "tukey";
      }
    }
    if (method == "simple") {
      kj = to_json(quant_simple(inst, qEps, qTau, qSeed));
    } else if (method == "poisson") {
      if (!inst.existential()) throw PreconditionError("poisson requires the existential model");
      kj = to_json(quant_poisson(inst.as_existential(), qTau, qDelta, qSeed));
    } else if (method == "tukey" || method == "tukey-fast") {
      if (!inst.existential())
        throw PreconditionError("depth-region methods require the existential model");
      kj = to_json(quant_tukey(inst.as_existential(), qEps, qTau, qDelta, qSeed, {},
                               method == "tukey-fast"));
    } else if (method == "subset") {
      if (!inst.existential()) throw PreconditionError("subset requires the existential model");
      if (qBeta <= 0) throw ValidationError("subset method requires --beta > 0");
      kj = to_json(quant_subset(inst.as_existential(), qEps, qTau, qBeta));
    } else {
      throw ValidationError("unknown method: " + method);
    }
    kj["requested_method"] = qMethod;
    write_json_file(kj, qOut);
    std::cout << "wrote " << qOut << " (method " << method << ")\n";
    if (!qBand.empty()) {
      KernelCdf kc = KernelCdf::load(qOut);
      auto dirs = sweep_directions(inst.dimension(), qDirs, 11);
      double wmax = 0.0;
      for (const auto& u : dirs) wmax = std::max(wmax, enumerate_expected_width(inst, u));
      std::vector<double> ts;
      for (int i = 1; i <= qTs; ++i) ts.push_back(3.0 * wmax * i / qTs);
      auto ref = [&](std::span<const double> u, double t) {
        return enumerate_width_cdf(inst, u, t);
      };
      auto ker = [&](std::span<const double> u, double t) { return kc.eval(u, t); };
      BandReport rep = band_check(ref, ker, qEps, qTau, dirs, ts);
      auto out = open_out(qBand);
      out << "direction,t,cdf_lo_ref,cdf_kernel,cdf_hi_ref,in_band\n";
      for (const auto& c : rep.cells) {
        out << c.direction[0];
        for (std::size_t k = 1; k < c.direction.size(); ++k) out << ";" << c.direction[k];
        out << "," << c.t << "," << c.cdf_lo_ref << "," << c.cdf_kernel << "," << c.cdf_hi_ref
            << "," << (c.in_band ? 1 : 0) << "\n";
      }
      std::cout << "band pass fraction " << rep.pass_fraction << "\n";
    }
    return 0;
  }
  if (*fpow) {
    Instance inst = load_instance(fIn);
    if (!inst.existential()) throw PreconditionError("fpow kernel requires the existential model");
    FpowKernel k = fpow_kernel(inst.as_existential(), fEps, fR, fBeta, fSeed);
    write_json_file(to_json(k), fOut);
    if (!fReport.empty()) {
      auto out = open_out(fReport);
      out << "direction,Etr_ref,Etr_kernel,rel_err\n";
      int found = 0;
      for (const Vec& u : sweep_directions(inst.dimension(), fDirs * 8, 13)) {
        if (!polar_contains(inst, u)) continue;
        double ref = enumerate_expected_t_r(inst, u, fR);
        double got = k.expected_t_r(u);
        double rel = ref > 0 ? std::abs(got - ref) / ref : std::abs(got - ref);
        out << u[0];
        for (std::size_t c = 1; c < u.size(); ++c) out << ";" << u[c];
        out << "," << ref << "," << got << "," << rel << "\n";
        if (++found >= fDirs) break;
      }
      if (found == 0) std::cout << "note: polar cone is empty; no directions reported\n";
    }
    std::cout << "wrote " << fOut << " (" << k.sets.size() << " sets)\n";
    return 0;
  }
  if (*eval) {
    Instance inst = load_instance(evIn);
    KernelCdf kc = KernelCdf::load(evKernel);
    kc.mc_seed = evSeed;
    if (kc.dimension() != inst.dimension()) throw ValidationError("kernel/instance dimension mismatch");
    auto dirs = sweep_directions(inst.dimension(), evDirs, 11);
    double wmax = 0.0;
    bool exact = evAgainst == "exact" && realization_bits(inst) <= kEnumerationBitCap;
    for (const auto& u : dirs)
      wmax = std::max(wmax, exact ? enumerate_expected_width(inst, u) : expected_width(inst, u));
    std::vector<double> ts;
    for (int i = 1; i <= evTs; ++i) ts.push_back(3.0 * wmax * i / evTs);
    auto ref = [&](std::span<const double> u, double t) {
      if (exact) return enumerate_width_cdf(inst, u, t);
      std::vector<double> one{t};
      return cdf(inst, u, one, derive_seed(evSeed, 5), 100'000).value[0];
    };
    auto ker = [&](std::span<const double> u, double t) { return kc.eval(u, t); };
    BandReport rep = band_check(ref, ker, evEps, evTau, dirs, ts);
    auto out = open_out(evOut);
    out << "direction,t,cdf_lo_ref,cdf_kernel,cdf_hi_ref,in_band\n";
    for (const auto& c : rep.cells) {
      out << c.direction[0];
      for (std::size_t k = 1; k < c.direction.size(); ++k) out << ";" << c.direction[k];
      out << "," << c.t << "," << c.cdf_lo_ref << "," << c.cdf_kernel << "," << c.cdf_hi_ref << ","
          << (c.in_band ? 1 : 0) << "\n";
    }
    std::cout << "band pass fraction " << rep.pass_fraction << "\n";
    return 0;
  }
  if (*fit) {
    Instance inst = load_instance(fitIn);
    if (!inst.existential()) throw PreconditionError("fit requires the existential model");
    FitResult r;
    if (fitShape == "meb")
      r = expected_meb(inst.as_existential(), fitEps, fitBeta, fitSeed);
    else if (fitShape == "shell")
      r = expected_shell(inst.as_existential(), fitEps, fitBeta, fitSeed);
    else
      throw ValidationError("fit shape must be meb or shell");
    json j = to_json(r);
    std::cout << j.dump(2) << "\n";
    if (!fitOut.empty()) write_json_file(j, fitOut);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const stokern::PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return 3;
  } catch (const stokern::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
