#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "coxgp/config.hpp"
#include "coxgp/error.hpp"
#include "coxgp/experiment.hpp"
#include "coxgp/io.hpp"
#include "coxgp/kernel_baseline.hpp"
#include "coxgp/parallel.hpp"
#include "coxgp/summaries.hpp"

namespace py = pybind11;
using namespace coxgp;

namespace {

py::array_t<double> as_array(const std::vector<double>& v, std::size_t cols) {
  const auto rows = static_cast<py::ssize_t>(cols ? v.size() / cols : 0);
  py::array_t<double> a({rows, static_cast<py::ssize_t>(cols)});
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::array_t<double> as_vector(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

ExperimentConfig resolve(const std::string& config) {
  if (config.empty()) return preset("smoke");
  if (config.find('{') != std::string::npos) return config_from_json(config);
  return preset(config);
}

std::vector<double> flat_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& z,
                                std::size_t d) {
  if (z.ndim() == 1 && d == 1) return std::vector<double>(z.data(), z.data() + z.size());
  if (z.ndim() != 2 || static_cast<std::size_t>(z.shape(1)) != d) throw Error("points must have shape (m, d)");
  return std::vector<double>(z.data(), z.data() + z.size());
}

py::dict fit_to_dict(const FitResult& fit) {
  const ChainTrace& t = fit.trace;
  std::vector<double> rho, loglik, ell;
  for (const auto& r : t.sweeps) {
    rho.push_back(r.rho_star);
    loglik.push_back(r.loglik);
    ell.insert(ell.end(), r.ell.begin(), r.ell.end());
  }
  py::dict d;
  d["rho_star"] = as_vector(rho);
  d["loglik"] = as_vector(loglik);
  d["ell"] = as_array(ell, t.dim);
  d["pcn_acceptance"] = t.post_burn_in.pcn_rate();
  d["final_zeta"] = t.final_zeta;
  d["z"] = as_array(fit.estimate.grid.points(), fit.estimate.grid.dim());
  d["mean"] = as_vector(fit.estimate.mean);
  d["lower"] = as_vector(fit.estimate.lower);
  d["upper"] = as_vector(fit.estimate.upper);
  if (fit.baseline) d["kernel"] = as_vector(fit.baseline->values);
  std::ostringstream trace;
  write_trace_csv(trace, t);
  d["trace_csv"] = trace.str();
  return d;
}

}  // namespace

PYBIND11_MODULE(_coxgp, m) {
  m.doc() = "Bayesian covariate-driven intensity estimation for replicated point patterns";

  py::register_exception<Error>(m, "CoxgpError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("size", &Dataset::size)
      .def_property_readonly("covariate_dim", &Dataset::covariate_dim)
      .def_property_readonly("total_events", &Dataset::total_events)
      .def("points", [](const Dataset& d, std::size_t i) {
        if (i >= d.size()) throw py::index_error("replicate out of range");
        return as_array(d[i].pattern.coords(), d.window().dim());
      })
      .def("covariates", [](const Dataset& d, std::size_t i) {
        if (i >= d.size()) throw py::index_error("replicate out of range");
        return as_array(d[i].field.values(), d.covariate_dim());
      })
      .def("__len__", &Dataset::size);

  m.def("presets", &preset_names, "Names of the built-in experiment presets.");
  m.def("preset_json", [](const std::string& name) { return config_to_json(preset(name)); },
        "JSON text of a preset.");
  m.def("normalize_config", [](const std::string& text) { return config_to_json(config_from_json(text)); },
        "Parses, validates and re-emits a JSON config.");

  m.def("truth_intensity",
        [](const std::string& name, py::array_t<double, py::array::c_style | py::array::forcecast> z) {
          const TruthSpec t = TruthSpec::from_name(name);
          const std::vector<double> pts = flat_points(z, t.dim());
          std::vector<double> out(pts.size() / t.dim());
          for (std::size_t p = 0; p < out.size(); ++p) {
            out[p] = truth_intensity(t, std::span<const double>(pts.data() + p * t.dim(), t.dim()));
          }
          return as_vector(out);
        },
        py::arg("name"), py::arg("z"));

  m.def("simulate",
        [](std::size_t n, const std::string& config, std::uint64_t seed) {
          const ExperimentConfig c = resolve(config);
          return simulate_dataset(n, c.window, c.fields, c.truth, seed);
        },
        py::arg("n"), py::arg("config") = "", py::arg("seed") = 0,
        "Simulates n replicates under a preset name or JSON config.");

  m.def("load_dataset",
        [](const std::string& points, const std::string& raster, const std::string& preprocess) {
          return load_dataset(points, raster, preprocess_from_string(preprocess));
        },
        py::arg("points"), py::arg("raster"), py::arg("preprocess") = "standardized_normal_cdf");
  m.def("save_dataset",
        [](const Dataset& d, const std::string& points, const std::string& raster) { save_dataset(points, raster, d); },
        py::arg("dataset"), py::arg("points"), py::arg("raster"));

  m.def("fit",
        [](const Dataset& d, const std::string& config, std::uint64_t seed, std::size_t threads) {
          const ExperimentConfig c = resolve(config);
          std::optional<FitResult> fit;
          {
            py::gil_scoped_release release;
            ThreadPool pool(threads);
            fit.emplace(fit_dataset(d, c, seed, &pool));
          }
          return fit_to_dict(*fit);
        },
        py::arg("dataset"), py::arg("config") = "", py::arg("seed") = 0, py::arg("threads") = 1,
        "Runs the sampler and returns traces, posterior summary and kernel baseline.");

  m.def("kernel_estimate",
        [](const Dataset& d, const std::string& config, const std::string& variant) {
          const ExperimentConfig c = resolve(config);
          const KernelEstimate k =
              kernel_estimate_average(d, config_quadrature(c), c.eval_grid(), kernel_variant_from_string(variant));
          py::dict out;
          out["z"] = as_array(k.points, k.dim);
          out["value"] = as_vector(k.values);
          std::vector<double> sup(k.supported.begin(), k.supported.end());
          out["supported"] = as_vector(sup);
          return out;
        },
        py::arg("dataset"), py::arg("config") = "", py::arg("variant") = "plain");

  m.def("silverman_bandwidth", [](const std::vector<double>& s) { return silverman_bandwidth(s); });

  m.def("l2_error",
        [](const std::vector<double>& values, const std::string& truth, std::size_t points_per_axis) {
          const TruthSpec t = TruthSpec::from_name(truth);
          const EvalGrid grid = points_per_axis ? EvalGrid(t.dim(), points_per_axis) : EvalGrid::defaults(t.dim());
          const L2Error e = l2_error(values, t, grid);
          return py::make_tuple(e.absolute, e.relative);
        },
        py::arg("values"), py::arg("truth"), py::arg("points_per_axis") = 0);

  m.def("truth_norm",
        [](const std::string& truth, std::size_t points_per_axis) {
          const TruthSpec t = TruthSpec::from_name(truth);
          return truth_l2_norm(t, points_per_axis ? EvalGrid(t.dim(), points_per_axis) : EvalGrid::defaults(t.dim()));
        },
        py::arg("truth"), py::arg("points_per_axis") = 0);

  m.def("run_experiment",
        [](const std::string& config, bool write_outputs) {
          const ExperimentConfig c = resolve(config);
          ExperimentReport r;
          {
            py::gil_scoped_release release;
            ThreadPool pool(c.threads);
            r = run_experiment(c, write_outputs, &pool);
          }
          return py::make_tuple(summary_csv(r), r.warnings);
        },
        py::arg("config"), py::arg("write_outputs") = false,
        "Runs a replicated study; returns the summary CSV text and warnings.");
}
