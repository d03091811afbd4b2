#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zosa/benchmarks.hpp"
#include "zosa/diagnostics.hpp"
#include "zosa/errors.hpp"
#include "zosa/estimators.hpp"
#include "zosa/harness/config.hpp"
#include "zosa/harness/experiment.hpp"
#include "zosa/harness/validate.hpp"
#include "zosa/optimizers.hpp"

namespace py = pybind11;
using namespace zosa;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return Vector(std::vector<double>(a.data(), a.data() + a.size()));
}

// Explicit shape: the bare count constructor yields zero strides here.
template <class T = double>
py::array_t<T> empty_array(std::size_t n) {
  return py::array_t<T>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(n)});
}

py::array_t<double> to_array(const Vector& v) {
  py::array_t<double> out = empty_array(v.size());
  std::copy(v.values().begin(), v.values().end(), out.mutable_data());
  return out;
}

py::object optional_float(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::object(py::none());
}

// A builtin function name or a Python callable taking a 1-D array.
Objective to_objective(const py::object& f, std::size_t d) {
  if (py::isinstance<py::str>(f)) {
    return bench::make_objective(bench::SyntheticFunction(
        bench::parse_function_kind(f.cast<std::string>()), d));
  }
  if (!PyCallable_Check(f.ptr())) throw py::type_error("objective must be a name or a callable");
  auto fn = std::make_shared<py::object>(f);
  return Objective("python", d, [fn](const Vector& theta) {
    py::gil_scoped_acquire gil;
    return (*fn)(to_array(theta)).cast<double>();
  });
}

py::dict estimate_to_dict(const EstimateResult& r) {
  py::dict out;
  out["grad"] = to_array(r.grad);
  out["sigma"] = r.sigma;
  out["base_loss"] = r.base_loss;
  out["perturbed_losses"] = r.perturbed_losses;
  out["queries"] = r.queries;
  return out;
}

py::object json_to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json python_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict run_to_dict(const RunResult& r) {
  const std::size_t n = r.rows.size();
  auto loss = empty_array(n), gap = empty_array(n), sigma = empty_array(n),
       sigma_pert = empty_array(n), eps = empty_array(n), cos = empty_array(n),
       wall = empty_array(n);
  auto iter = empty_array<std::uint64_t>(n), queries = empty_array<std::uint64_t>(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const TraceRow& row = r.rows[i];
    iter.mutable_data()[i] = row.iter;
    loss.mutable_data()[i] = row.loss;
    gap.mutable_data()[i] = row.gap.value_or(nan);
    sigma.mutable_data()[i] = row.sigma.value_or(nan);
    sigma_pert.mutable_data()[i] = row.sigma_pert.value_or(nan);
    eps.mutable_data()[i] = row.eps_sam_norm.value_or(nan);
    queries.mutable_data()[i] = row.queries_cum;
    cos.mutable_data()[i] = row.cos_true.value_or(nan);
    wall.mutable_data()[i] = row.wall_ms;
  }
  py::dict out;
  out["iter"] = iter;
  out["loss"] = loss;
  out["gap"] = gap;
  out["sigma"] = sigma;
  out["sigma_pert"] = sigma_pert;
  out["eps_sam_norm"] = eps;
  out["queries_cum"] = queries;
  out["cos_true"] = cos;
  out["wall_ms"] = wall;
  out["initial_theta"] = to_array(r.initial_theta);
  out["final_theta"] = to_array(r.final_theta);
  out["initial_loss"] = r.initial_loss;
  out["initial_gap"] = optional_float(r.initial_gap);
  out["optimization_queries"] = r.optimization_queries;
  out["diagnostic_queries"] = r.diagnostic_queries;
  out["budget_exhausted"] = r.budget_exhausted;
  out["failure"] = r.failure ? py::object(py::str(*r.failure)) : py::object(py::none());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zeroth-order optimizers, estimators and benchmark functions.";

  // Translators are tried most recent first, so bases go first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_RuntimeError);
  py::register_exception<PeerError>(m, "PeerError", PyExc_RuntimeError);
  py::register_exception<NonFiniteError>(m, "NonFiniteError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("eval_function", [](const std::string& kind, const Array& theta) {
    const Vector t = to_vector(theta);
    return bench::eval_function(bench::SyntheticFunction(bench::parse_function_kind(kind), t.size()), t);
  }, py::arg("kind"), py::arg("theta"));

  m.def("eval_gradient", [](const std::string& kind, const Array& theta) {
    const Vector t = to_vector(theta);
    return to_array(bench::eval_gradient(
        bench::SyntheticFunction(bench::parse_function_kind(kind), t.size()), t));
  }, py::arg("kind"), py::arg("theta"));

  m.def("cosine_similarity", [](const Array& a, const Array& b) {
    return diag::cosine_similarity(to_vector(a), to_vector(b));
  }, py::arg("a"), py::arg("b"));

  m.def("loss_std", [](const std::vector<double>& losses) { return loss_std(losses); },
        py::arg("losses"));

  m.def("one_sided_estimate",
        [](const py::object& objective, const Array& theta, double epsilon, std::size_t m,
           std::uint64_t seed) {
          const Vector t = to_vector(theta);
          const Objective obj = to_objective(objective, t.size());
          RngStream rng(seed);
          QueryCounter counter;
          EstimateResult r;
          {
            py::gil_scoped_release release;
            r = one_sided_estimate(obj, t, EstimatorConfig{epsilon, m}, rng, counter);
          }
          return estimate_to_dict(r);
        },
        py::arg("objective"), py::arg("theta"), py::arg("epsilon") = 1e-3, py::arg("m") = 32,
        py::arg("seed") = 0,
        "Averaged one-sided Rademacher estimate; returns grad, sigma, base_loss, "
        "perturbed_losses and queries.");

  m.def("classical_estimate",
        [](const py::object& objective, const Array& theta, double epsilon, std::size_t n,
           std::uint64_t seed) {
          const Vector t = to_vector(theta);
          const Objective obj = to_objective(objective, t.size());
          RngStream rng(seed);
          QueryCounter counter;
          Vector g;
          {
            py::gil_scoped_release release;
            g = classical_two_sided_estimate(obj, t, epsilon, n, rng, counter);
          }
          return to_array(g);
        },
        py::arg("objective"), py::arg("theta"), py::arg("epsilon") = 5e-3, py::arg("n") = 32,
        py::arg("seed") = 0);

  m.def("run",
        [](const std::string& kind_name, const py::object& objective, std::size_t dimension,
           std::uint64_t iterations, std::uint64_t seed, std::optional<double> eta,
           std::optional<double> rho, std::optional<double> epsilon, std::optional<std::size_t> m,
           std::optional<std::uint64_t> query_budget, bool track_cosine,
           std::optional<Array> initial_theta) {
          const OptimizerKind kind = parse_optimizer_kind(kind_name);
          OptimizerConfig cfg = OptimizerConfig::defaults(kind);
          if (eta) cfg.eta = *eta;
          if (rho) cfg.rho = *rho;
          if (epsilon) cfg.estimator.epsilon = *epsilon;
          if (m) cfg.estimator.m = *m;
          RunOptions options{query_budget, track_cosine, std::nullopt};
          if (initial_theta) options.initial_theta = to_vector(*initial_theta);
          const Objective obj = to_objective(objective, dimension);
          RunResult r;
          {
            py::gil_scoped_release release;
            r = run(kind, obj, cfg, iterations, seed, options);
          }
          return run_to_dict(r);
        },
        py::arg("kind"), py::arg("objective"), py::arg("dimension"), py::arg("iterations"),
        py::arg("seed") = 0, py::kw_only(), py::arg("eta") = py::none(),
        py::arg("rho") = py::none(), py::arg("epsilon") = py::none(), py::arg("m") = py::none(),
        py::arg("query_budget") = py::none(), py::arg("track_cosine") = false,
        py::arg("initial_theta") = py::none(),
        "Run one optimizer; returns the trace as arrays plus run totals.");

  m.def("validate",
        [](const std::string& kind, const py::dict& params) {
          harness::ValidationParams p;
          for (auto [key, value] : params) {
            const std::string k = key.cast<std::string>();
            if (k == "function") p.function = value.cast<std::string>();
            else if (k == "dimension") p.dimension = value.cast<std::size_t>();
            else if (k == "m") p.m = value.cast<std::size_t>();
            else if (k == "epsilon") p.epsilon = value.cast<double>();
            else if (k == "rho") p.rho = value.cast<double>();
            else if (k == "trials") p.trials = value.cast<std::size_t>();
            else if (k == "tolerance") p.tolerance = value.cast<double>();
            else if (k == "theta") p.theta = value.cast<std::string>();
            else if (k == "seed") p.seed = value.cast<std::uint64_t>();
            else if (k == "workers") p.workers = value.cast<std::size_t>();
            else throw ConfigError(k, "unknown validation parameter");
          }
          harness::ValidationOutcome out;
          {
            py::gil_scoped_release release;
            out = harness::validate(harness::parse_validation_kind(kind), p);
          }
          return json_to_python(out.report);
        },
        py::arg("kind"), py::arg("params") = py::dict(),
        "Run a statistical check (sigma_law, mse_law, alignment, sam_alignment); returns the "
        "report as a dict with a 'pass' entry.");

  m.def("run_experiment",
        [](const py::object& config) {
          const harness::RunSpec spec = harness::parse_run_spec(python_to_json(config));
          harness::ExperimentSummary s;
          {
            py::gil_scoped_release release;
            s = harness::run_experiment(spec);
          }
          return json_to_python(harness::to_json(s));
        },
        py::arg("config"), "Run a configured experiment, writing traces; returns the summary.");
}
