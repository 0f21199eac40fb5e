#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stokern/expkernel.hpp"
#include "stokern/fpowkernel.hpp"
#include "stokern/json_io.hpp"
#include "stokern/oracle.hpp"
#include "stokern/presets.hpp"
#include "stokern/quantkernel.hpp"
#include "stokern/shapefit.hpp"
#include "stokern/width.hpp"

namespace py = pybind11;
using namespace stokern;

namespace {

PointMatrix to_matrix(int dim, const std::vector<std::vector<double>>& rows) {
  PointMatrix m;
  m.dim = dim;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != dim)
      throw ValidationError("point dimension mismatch");
    m.push(r);
  }
  return m;
}

std::vector<std::vector<double>> from_matrix(const PointMatrix& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(m.size());
  for (int i = 0; i < m.size(); ++i) {
    auto p = m.point(i);
    rows.emplace_back(p.begin(), p.end());
  }
  return rows;
}

Instance instance_from_arg(const py::object& obj) {
  if (py::isinstance<Instance>(obj)) return obj.cast<Instance>();
  if (py::isinstance<ExistentialSet>(obj)) return Instance(obj.cast<ExistentialSet>());
  if (py::isinstance<LocationalSet>(obj)) return Instance(obj.cast<LocationalSet>());
  throw ValidationError("expected an Instance, ExistentialSet or LocationalSet");
}

}  // namespace

PYBIND11_MODULE(_stokern, m) {
  m.doc() = "Directional-width coresets for stochastic point sets";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);

  py::class_<ExistentialSet>(m, "ExistentialSet")
      .def(py::init([](int dim, const std::vector<std::vector<double>>& pts,
                       const std::vector<double>& probs) {
             std::vector<double> coords;
             for (const auto& p : pts) {
               if (static_cast<int>(p.size()) != dim)
                 throw ValidationError("point dimension mismatch");
               coords.insert(coords.end(), p.begin(), p.end());
             }
             return ExistentialSet(dim, std::move(coords), probs);
           }),
           py::arg("dimension"), py::arg("points"), py::arg("probs"))
      .def_property_readonly("dimension", &ExistentialSet::dimension)
      .def("__len__", &ExistentialSet::size)
      .def_property_readonly("probs", [](const ExistentialSet& s) { return s.probs(); })
      .def_property_readonly("points", [](const ExistentialSet& s) {
        PointMatrix m2;
        m2.dim = s.dimension();
        m2.coords = s.coords();
        return from_matrix(m2);
      });

  py::class_<LocationalSet>(m, "LocationalSet")
      .def(py::init([](int dim,
                       const std::vector<std::vector<std::pair<std::vector<double>, double>>>&
                           pts) {
             std::vector<LocationDistribution> dists;
             for (const auto& locs : pts) {
               LocationDistribution d;
               for (const auto& [c, p] : locs) {
                 if (static_cast<int>(c.size()) != dim)
                   throw ValidationError("location dimension mismatch");
                 d.coords.insert(d.coords.end(), c.begin(), c.end());
                 d.probs.push_back(p);
               }
               dists.push_back(std::move(d));
             }
             return LocationalSet(dim, std::move(dists));
           }),
           py::arg("dimension"), py::arg("points"))
      .def_property_readonly("dimension", &LocationalSet::dimension)
      .def("__len__", &LocationalSet::size)
      .def_property_readonly("total_locations", &LocationalSet::total_locations);

  py::class_<Instance>(m, "Instance")
      .def(py::init<ExistentialSet>())
      .def(py::init<LocationalSet>())
      .def_property_readonly("dimension", &Instance::dimension)
      .def_property_readonly("existential", &Instance::existential)
      .def("__len__", &Instance::size)
      .def("sample",
           [](const Instance& inst, std::uint64_t seed) {
             Realization r = inst.sample(seed);
             PointMatrix m2;
             m2.dim = r.dimension;
             m2.coords = r.coords;
             return from_matrix(m2);
           },
           py::arg("seed"))
      .def("validate", [](const Instance& inst) {
        auto rep = inst.validate_report();
        py::dict d;
        d["valid"] = rep.valid;
        d["beta"] = rep.beta;
        d["dimension"] = rep.dimension;
        std::vector<std::string> issues;
        for (const auto& i : rep.issues) issues.push_back(i.message);
        d["issues"] = issues;
        return d;
      });

  m.def("load_instance", &load_instance, py::arg("path"));
  m.def("save_instance", &save_instance, py::arg("instance"), py::arg("path"));
  m.def("make_preset", &make_preset, py::arg("name"), py::arg("n"), py::arg("d"),
        py::arg("p") = 0.5, py::arg("beta") = 0.0, py::arg("seed") = 1);

  m.def("expected_width",
        [](const py::object& obj, const Vec& u) {
          return expected_width(instance_from_arg(obj), u);
        },
        py::arg("instance"), py::arg("direction"));
  m.def("expected_support",
        [](const py::object& obj, const Vec& u) {
          auto s = expected_support(instance_from_arg(obj), u);
          return py::make_tuple(s.f, s.gradient);
        },
        py::arg("instance"), py::arg("direction"));
  m.def("extreme_vertex",
        [](const py::object& obj, const Vec& u) {
          return extreme_vertex(instance_from_arg(obj), u);
        },
        py::arg("instance"), py::arg("direction"));
  m.def("enumerate_expected_width",
        [](const py::object& obj, const Vec& u) {
          return enumerate_expected_width(instance_from_arg(obj), u);
        },
        py::arg("instance"), py::arg("direction"));
  m.def("enumerate_width_cdf",
        [](const py::object& obj, const Vec& u, double t) {
          return enumerate_width_cdf(instance_from_arg(obj), u, t);
        },
        py::arg("instance"), py::arg("direction"), py::arg("t"));

  py::class_<AngularStructure>(m, "AngularStructure")
      .def(py::init([](const py::object& obj) {
             return AngularStructure(instance_from_arg(obj));
           }),
           py::arg("instance"))
      .def("width", &AngularStructure::query_width, py::arg("theta"))
      .def("support", &AngularStructure::query_support, py::arg("theta"))
      .def("gradient", &AngularStructure::query_gradient, py::arg("theta"))
      .def_property_readonly("breakpoints", &AngularStructure::breakpoints);

  py::class_<ExpectationPolytope>(m, "ExpectationPolytope")
      .def_property_readonly("vertices",
                             [](const ExpectationPolytope& M) { return from_matrix(M.vertices); })
      .def("support", [](const ExpectationPolytope& M, const Vec& u) { return M.support(u); });
  m.def("build_expectation_polytope",
        [](const py::object& obj) { return build_expectation_polytope(instance_from_arg(obj)); },
        py::arg("instance"));

  py::class_<DeterministicKernel>(m, "DeterministicKernel")
      .def_property_readonly("points",
                             [](const DeterministicKernel& k) { return from_matrix(k.points); })
      .def_readonly("epsilon", &DeterministicKernel::epsilon)
      .def_readonly("degenerate", &DeterministicKernel::degenerate)
      .def_readonly("source_indices", &DeterministicKernel::source_indices)
      .def("width", [](const DeterministicKernel& k, const Vec& u) { return width(k.points, u); });

  m.def("eps_kernel",
        [](int dim, const std::vector<std::vector<double>>& pts, double eps) {
          return eps_kernel(to_matrix(dim, pts), eps);
        },
        py::arg("dimension"), py::arg("points"), py::arg("eps"));
  m.def("exp_kernel",
        [](const py::object& obj, double eps) { return exp_kernel(instance_from_arg(obj), eps); },
        py::arg("instance"), py::arg("eps"));

  py::class_<SubsetKernel>(m, "SubsetKernel")
      .def_property_readonly("instance", [](const SubsetKernel& k) { return Instance(k.points); })
      .def_readonly("source_indices", &SubsetKernel::source_indices)
      .def_readonly("epsilon", &SubsetKernel::epsilon)
      .def_readonly("beta", &SubsetKernel::beta)
      .def_readonly("rounds", &SubsetKernel::rounds)
      .def("__len__", [](const SubsetKernel& k) { return k.points.size(); });
  m.def("exp_kernel_subset", &exp_kernel_subset, py::arg("set"), py::arg("eps"), py::arg("beta"));

  py::class_<MixtureKernel>(m, "MixtureKernel")
      .def_property_readonly("sets",
                             [](const MixtureKernel& k) {
                               std::vector<std::vector<std::vector<double>>> out;
                               for (const auto& e : k.sets) out.push_back(from_matrix(e));
                               return out;
                             })
      .def_readonly("epsilon", &MixtureKernel::epsilon)
      .def_readonly("tau", &MixtureKernel::tau)
      .def_readonly("method", &MixtureKernel::method)
      .def("size", &MixtureKernel::size)
      .def("cdf", [](const MixtureKernel& k, const Vec& u, double t) { return k.cdf(u, t); });

  py::class_<BernoulliKernel>(m, "BernoulliKernel")
      .def_property_readonly("anchors",
                             [](const BernoulliKernel& k) { return from_matrix(k.anchors); })
      .def_property_readonly("sampled",
                             [](const BernoulliKernel& k) { return from_matrix(k.sampled); })
      .def_readonly("sample_prob", &BernoulliKernel::sample_prob)
      .def_readonly("lambda_total", &BernoulliKernel::lambda)
      .def_readonly("method", &BernoulliKernel::method)
      .def("size", &BernoulliKernel::size)
      .def("cdf", [](const BernoulliKernel& k, const Vec& u, double t) {
        return cdf(k, u, {t}).value[0];
      });

  py::class_<TukeyRegion>(m, "TukeyRegion")
      .def_property_readonly("region", [](const TukeyRegion& r) { return from_matrix(r.region); })
      .def_property_readonly("kernel_hull",
                             [](const TukeyRegion& r) { return from_matrix(r.kernel_hull); })
      .def_readonly("gamma", &TukeyRegion::gamma)
      .def_readonly("lambda_outside", &TukeyRegion::lambda_outside)
      .def_readonly("rounds", &TukeyRegion::rounds)
      .def_readonly("round_weights", &TukeyRegion::round_weights);

  m.def("quant_simple",
        [](const py::object& obj, double eps, double tau, std::uint64_t seed) {
          return quant_simple(instance_from_arg(obj), eps, tau, seed);
        },
        py::arg("instance"), py::arg("eps"), py::arg("tau"), py::arg("seed") = 1);
  m.def("quant_poisson",
        [](const ExistentialSet& s, double tau, double delta, std::uint64_t seed) {
          return quant_poisson(s, tau, delta, seed);
        },
        py::arg("set"), py::arg("tau"), py::arg("delta"), py::arg("seed") = 1);
  m.def("tukey_region",
        [](const ExistentialSet& s, double tau, double eps) { return tukey_region(s, tau, eps); },
        py::arg("set"), py::arg("tau"), py::arg("eps"));
  m.def("tukey_region_fast",
        [](const ExistentialSet& s, double tau, double eps, std::uint64_t seed) {
          return tukey_region_fast(s, tau, eps, seed);
        },
        py::arg("set"), py::arg("tau"), py::arg("eps"), py::arg("seed") = 1);
  m.def("quant_tukey",
        [](const ExistentialSet& s, double eps, double tau, double delta, std::uint64_t seed,
           bool fast) { return quant_tukey(s, eps, tau, delta, seed, {}, fast); },
        py::arg("set"), py::arg("eps"), py::arg("tau"), py::arg("delta"), py::arg("seed") = 1,
        py::arg("fast") = false);
  m.def("quant_subset", &quant_subset, py::arg("set"), py::arg("eps"), py::arg("tau"),
        py::arg("beta"));

  m.def("tukey_depth",
        [](int dim, const std::vector<std::vector<double>>& pts, const std::vector<double>& w,
           const Vec& x) { return tukey_depth_brute(to_matrix(dim, pts), w, x); },
        py::arg("dimension"), py::arg("points"), py::arg("weights"), py::arg("x"));

  py::class_<FpowKernel>(m, "FpowKernel")
      .def_readonly("r", &FpowKernel::r)
      .def_readonly("epsilon", &FpowKernel::epsilon)
      .def("size", &FpowKernel::size)
      .def("expected_t_r", [](const FpowKernel& k, const Vec& u) { return k.expected_t_r(u); });
  m.def("fpow_kernel",
        [](const ExistentialSet& s, double eps, int r, double beta, std::uint64_t seed) {
          return fpow_kernel(s, eps, r, beta, seed);
        },
        py::arg("set"), py::arg("eps"), py::arg("r"), py::arg("beta"), py::arg("seed") = 1);
  m.def("polar_contains",
        [](const py::object& obj, const Vec& u) { return polar_contains(instance_from_arg(obj), u); },
        py::arg("instance"), py::arg("direction"));
  m.def("t_r",
        [](int dim, const std::vector<std::vector<double>>& pts, const Vec& u, int r) {
          return t_r(to_matrix(dim, pts), u, r);
        },
        py::arg("dimension"), py::arg("points"), py::arg("direction"), py::arg("r"));
  m.def("enumerate_expected_t_r",
        [](const py::object& obj, const Vec& u, int r) {
          return enumerate_expected_t_r(instance_from_arg(obj), u, r);
        },
        py::arg("instance"), py::arg("direction"), py::arg("r"));

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("center", &FitResult::center)
      .def_readonly("value", &FitResult::value)
      .def_readonly("coreset_size", &FitResult::coreset_size)
      .def_readonly("optimizer_gap", &FitResult::optimizer_gap);
  m.def("expected_meb",
        [](const ExistentialSet& s, double eps, double beta, std::uint64_t seed) {
          return expected_meb(s, eps, beta, seed);
        },
        py::arg("set"), py::arg("eps"), py::arg("beta"), py::arg("seed") = 1);
  m.def("expected_shell",
        [](const ExistentialSet& s, double eps, double beta, std::uint64_t seed) {
          return expected_shell(s, eps, beta, seed);
        },
        py::arg("set"), py::arg("eps"), py::arg("beta"), py::arg("seed") = 1);
}
