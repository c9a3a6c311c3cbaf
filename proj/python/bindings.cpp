#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bpve/app/commands.hpp"
#include "bpve/app/config.hpp"
#include "bpve/app/parallel.hpp"
#include "bpve/errors.hpp"
#include "bpve/exact_engine.hpp"
#include "bpve/genealogy_sim.hpp"
#include "bpve/moments.hpp"

namespace py = pybind11;
using namespace bpve;

namespace {

Environment environment_from_json(const std::string& text, std::size_t horizon) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw app::ConfigError(std::string("environment: ") + e.what());
  }
  auto d = app::parse_environment(j, "environment");
  d.horizon = horizon;
  return Environment::build(std::move(d));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact genealogy of branching processes in varying environment.";

  py::register_exception<app::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);

  py::class_<Environment>(m, "Environment")
      .def_static("from_json", &environment_from_json, py::arg("text"), py::arg("horizon"))
      .def_property_readonly("horizon", &Environment::horizon)
      .def("describe", &Environment::describe)
      .def("mean", [](const Environment& e, std::size_t k) { return e.law_at(k).mean(); })
      .def("nu", [](const Environment& e, std::size_t k) { return e.law_at(k).nu(); });

  m.def("moments", [](const Environment& env, std::size_t n) {
    const auto t = moment_table(env, n);
    py::dict d;
    d["mean"] = t.mean;
    d["nu"] = t.nu;
    d["log_mu"] = t.log_mu;
    d["rho"] = t.rho;
    d["log_rho"] = t.log_rho;
    return d;
  });
  m.def("survival_curve", [](const Environment& env, std::size_t n) {
    const auto c = survival_curve(env, n);
    return py::make_tuple(c.u, c.log_u);
  }, "(u, log_u) with u[k] = P(Z_n > 0 | Z_k = 1).");
  m.def("shape_identity", py::overload_cast<const Environment&, std::size_t>(&survival_via_shape_identity));
  m.def("mrca", [](const Environment& env, std::size_t n) {
    const auto d = mrca_distribution(env, n);
    py::dict out;
    out["tail"] = d.tail;
    out["cdf"] = d.cdf;
    out["reference"] = d.reference;
    return out;
  });
  m.def("conditional_mean", [](const Environment& env, std::size_t n) {
    return conditional_mean(env, n).exact;
  });
  m.def("sample_reduced", [](const Environment& env, std::size_t n, std::size_t count, std::uint64_t seed,
                             unsigned threads) {
    const ReducedForestSampler sampler(env, survival_curve(env, n));
    std::vector<ReducedPath> paths;
    {
      py::gil_scoped_release release;
      paths = app::replicate(seed, count, threads, [&](std::size_t, Rng& rng) { return sampler.sample(rng); });
    }
    std::vector<std::vector<std::uint64_t>> out;
    out.reserve(paths.size());
    for (auto& p : paths) out.push_back(std::move(p.z));
    return out;
  }, py::arg("env"), py::arg("n"), py::arg("count"), py::arg("seed"), py::arg("threads") = 1);
  m.def("validate", [](std::uint64_t seed, bool inject_fault) {
    py::list out;
    for (const auto& c : app::validation_suite(seed, inject_fault)) {
      py::dict d;
      d["name"] = c.name;
      d["value"] = c.value;
      d["tolerance"] = c.tolerance;
      d["passed"] = c.passed;
      out.append(d);
    }
    return out;
  }, py::arg("seed") = app::kDefaultSeed, py::arg("inject_fault") = false);
}
