#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fhlab/blowup.hpp"
#include "fhlab/extension.hpp"
#include "fhlab/frequency.hpp"
#include "fhlab/runner.hpp"
#include "fhlab/scenario.hpp"
#include "fhlab/specfun.hpp"

namespace py = pybind11;
using namespace fhlab;
using cplx = std::complex<double>;

namespace {

fields::SpaceTimeField field_from_array(py::array_t<cplx> arr, double lx, double tspan) {
  const auto buf = arr.request();
  fields::SpaceTimeGrid g;
  if (buf.ndim == 2) {
    g.dim = 1;
    g.nx = {static_cast<int>(buf.shape[0]), 1};
    g.nt = static_cast<int>(buf.shape[1]);
  } else if (buf.ndim == 3) {
    g.dim = 2;
    g.nx = {static_cast<int>(buf.shape[0]), static_cast<int>(buf.shape[1])};
    g.nt = static_cast<int>(buf.shape[2]);
  } else {
    throw std::invalid_argument("expected a (nx, nt) or (nx0, nx1, nt) array");
  }
  g.lx = {lx, lx};
  g.tspan = tspan;
  std::vector<cplx> samples(static_cast<const cplx*>(buf.ptr),
                            static_cast<const cplx*>(buf.ptr) + g.total());
  return fields::SpaceTimeField::from_samples(g, std::move(samples));
}

py::array_t<cplx> array_from(const fields::SpaceTimeField& f) {
  const auto& g = f.grid();
  py::array_t<cplx> out(g.dim == 1 ? std::vector<py::ssize_t>{g.nx[0], g.nt}
                                   : std::vector<py::ssize_t>{g.nx[0], g.nx[1], g.nt});
  std::copy(f.samples().begin(), f.samples().end(), static_cast<cplx*>(out.request().ptr));
  return out;
}

evaluator::EvalPtr builtin(const std::string& name, double s, int dim) {
  scenario::Scenario sc;
  sc.field = name;
  sc.s = s;
  sc.grid.dim = dim;
  sc.grid.nx[1] = dim == 2 ? sc.grid.nx[0] : 1;
  return scenario::make_evaluator(sc);
}

}  // namespace

PYBIND11_MODULE(_fhlab, m) {
  m.doc() = "fractional heat operator laboratory (C++ core)";

  // ---- special functions
  m.def("gamma", &specfun::gamma_pos, py::arg("x"));
  m.def(
      "principal_l",
      [](std::vector<double> xi, double sigma) {
        return specfun::principal_L(std::span<const double>(xi.data(), xi.size()), sigma);
      },
      py::arg("xi"), py::arg("sigma"));
  m.def("macdonald_k", &specfun::macdonald_k, py::arg("nu"), py::arg("z"));
  m.def("phi", &specfun::phi, py::arg("nu"), py::arg("z"));

  // ---- fields and the operator
  py::class_<fields::SpaceTimeField>(m, "Field")
      .def_static("from_samples", &field_from_array, py::arg("samples"), py::arg("lx") = 2.0,
                  py::arg("tspan") = 1.0)
      .def("samples", &array_from)
      .def("l2_norm", &fields::SpaceTimeField::l2_norm)
      .def("linf_norm", &fields::SpaceTimeField::linf_norm)
      .def("band_occupancy", [](const fields::SpaceTimeField& f) { return fields::band_occupancy(f); });

  py::class_<fracheat::FracConfig>(m, "FracConfig")
      .def(py::init([](double s) { return fracheat::FracConfig{s}; }), py::arg("s"))
      .def_readonly("s", &fracheat::FracConfig::s)
      .def_property_readonly("a", &fracheat::FracConfig::a)
      .def_property_readonly("c_s", &fracheat::FracConfig::c_s);

  m.def("frac_heat_multiplier",
        [](const fields::SpaceTimeField& u, double s) {
          return fracheat::frac_heat_multiplier(u, fracheat::FracConfig{s});
        },
        py::arg("u"), py::arg("s"));
  m.def("frac_heat_balakrishnan",
        [](const fields::SpaceTimeField& u, double s) {
          return fracheat::frac_heat_balakrishnan(u, fracheat::FracConfig{s});
        },
        py::arg("u"), py::arg("s"));
  m.def("balakrishnan_symbol",
        [](cplx lam, double s) { return fracheat::balakrishnan_symbol(lam, s); },
        py::arg("lam"), py::arg("s"));
  m.def("parabolic_sobolev_norm",
        [](const fields::SpaceTimeField& u, double s) {
          return fracheat::parabolic_sobolev_norm(u, fracheat::FracConfig{s});
        },
        py::arg("u"), py::arg("s"));
  m.def("manufactured_potential",
        [](const fields::SpaceTimeField& u, double s, double floor) {
          const auto p = fracheat::manufactured_potential(u, fracheat::FracConfig{s}, floor);
          return py::make_tuple(p.v, p.bound, p.grad_bound);
        },
        py::arg("u"), py::arg("s"), py::arg("floor"));

  // ---- extension problem
  py::class_<extension::ExtensionField, std::shared_ptr<extension::ExtensionField>>(m, "Extension")
      .def(py::init([](const fields::SpaceTimeField& u, double s) {
             return extension::ExtensionField(u, fracheat::FracConfig{s},
                                              extension::YGrid::geometric());
           }),
           py::arg("u"), py::arg("s"))
      .def("value",
           [](const extension::ExtensionField& e, std::vector<double> x, double y, double t) {
             x.resize(2, 0.0);
             return e.value(x.data(), y, t);
           })
      .def("jet", [](const extension::ExtensionField& e, std::vector<double> x, double y,
                     double t) {
        x.resize(2, 0.0);
        const auto j = e.jet(x.data(), y, t);
        return py::make_tuple(j.u, j.ux[0], j.ux[1], j.uy, j.ut);
      });
  m.def("neumann_trace",
        [](const fields::SpaceTimeField& u, double s) {
          const auto nt = extension::neumann_trace(
              extension::ExtensionField(u, fracheat::FracConfig{s}, extension::YGrid::geometric()));
          return py::make_tuple(nt.trace, nt.grid_spectral_discrepancy);
        },
        py::arg("u"), py::arg("s"));
  m.def("poisson_check",
        [](const fields::SpaceTimeField& u, double s,
           std::vector<std::tuple<double, double, double>> probes) {
          std::vector<extension::Probe> ps;
          for (auto& [x, y, t] : probes) ps.push_back({{x, 0.0}, y, t});
          return extension::poisson_check(u, fracheat::FracConfig{s}, ps);
        },
        py::arg("u"), py::arg("s"), py::arg("probes"));

  // ---- frequency machinery on builtin closed-form solutions
  m.def("frequency_curve",
        [](const std::string& field, double s, std::vector<double> rs, double C, int dim) {
          const double a = 1.0 - 2.0 * s;
          frequency::FrequencyEngine e(dim, a,
                                       dim == 2 ? frequency::GaussQuadSpec{32, 120, 64}
                                                : frequency::GaussQuadSpec{});
          const auto U = builtin(field, s, dim);
          const auto c = e.adjusted_frequency_curve(*U, nullptr, rs, C, false);
          py::dict out;
          out["r"] = c.r;
          out["H"] = c.H;
          out["I"] = c.I;
          out["N"] = c.N;
          out["N1"] = c.N1;
          out["adjusted"] = c.adjusted;
          out["monotone"] = c.monotone;
          return out;
        },
        py::arg("field"), py::arg("s"), py::arg("rs"), py::arg("C") = 0.0, py::arg("dim") = 1);
  m.def("blowup_fit",
        [](const std::string& field, double s, std::vector<double> rs, int dim) {
          const double a = 1.0 - 2.0 * s;
          frequency::FrequencyEngine e(dim, a);
          const auto rep = blowup::blowup_sequence(builtin(field, s, dim), nullptr, rs, e);
          py::dict out;
          out["kappa_hat"] = rep.kappa_hat;
          out["n_smallest"] = rep.n_smallest;
          out["distance"] = rep.distance;
          out["h_norm"] = rep.h_norm;
          return out;
        },
        py::arg("field"), py::arg("s"), py::arg("rs"), py::arg("dim") = 1);
  m.def("vanishing_order",
        [](const std::string& field, double s, std::vector<double> rs, double x0, double y0,
           double t0, bool thick) {
          const auto U = builtin(field, s, 1);
          blowup::PointFn f = [U](const double* x, double y, double t) {
            return U->value(x, y, t);
          };
          const auto rep = blowup::vanishing_order(f, 1, thick, {x0, 0.0, y0}, t0, rs);
          return py::make_tuple(rep.fitted_order, rep.infinite);
        },
        py::arg("field"), py::arg("s"), py::arg("rs"), py::arg("x0") = 0.0, py::arg("y0") = 0.0,
        py::arg("t0") = 0.0, py::arg("thick") = false);

  // ---- scenario runner
  m.def("run_config",
        [](const std::string& path, const std::string& out_dir, int threads,
           unsigned long long seed) {
          auto cfg = scenario::interpret(scenario::parse_config_file(path));
          runner::RunOptions opt;
          opt.out_dir = out_dir;
          opt.threads = runner::thread_count_from(threads);
          opt.seed = seed;
          const auto rep = runner::run(cfg, opt);
          py::list exps;
          for (const auto& e : rep.experiments) {
            py::dict d;
            d["name"] = e.name;
            d["status"] = e.status;
            d["metrics"] = e.metrics;
            d["outputs"] = e.outputs;
            exps.append(d);
          }
          py::dict out;
          out["scenario"] = rep.scenario_name;
          out["ok"] = rep.ok();
          out["experiments"] = exps;
          return out;
        },
        py::arg("path"), py::arg("out_dir"), py::arg("threads") = 1, py::arg("seed") = 0);

  m.attr("__version__") = runner::kToolVersion;
}
