#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "optoprep/io.hpp"
#include "optoprep/optimizer.hpp"
#include "optoprep/verify.hpp"

namespace py = pybind11;
using namespace optoprep;

namespace {

SystemParams params_for(double k, int cavity_dim, int mech_dim) {
  SystemParams p;
  p.k = k;
  p.space = {cavity_dim, mech_dim};
  return p;
}

TargetState target_from(const std::string& name, double theta) {
  if (name.rfind("fock", 0) == 0)
    return TargetState::fock(name.size() > 4 ? std::stoi(name.substr(4)) : 2);
  if (name == "superposition" || name == "sup") return TargetState::superposition(theta);
  throw InvalidParameter("unknown target '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cavity-state preparation core";

  m.def(
      "optimize",
      [](const std::string& target, int n_blocks, double eta_max, double k, std::uint64_t seed,
         int restarts, long max_evals, int cavity_dim, int mech_dim, bool exact_replay,
         bool optimize_theta, double theta) {
        OptimizationProblem p;
        p.target = target_from(target, theta);
        p.optimize_theta = optimize_theta;
        p.n_blocks = n_blocks;
        p.eta_max = eta_max;
        p.params = params_for(k, cavity_dim, mech_dim);
        p.seed = seed;
        p.restarts = restarts;
        p.max_evaluations = max_evals;
        OptimizationReport rep;
        {
          py::gil_scoped_release release;
          rep = optimize(p, exact_replay);
        }
        return report_to_json(rep, p);
      },
      py::arg("target") = "fock2", py::arg("n_blocks") = 16, py::arg("eta_max") = 4.0,
      py::arg("k") = 1.0 / 26.0, py::arg("seed") = 1234, py::arg("restarts") = 24,
      py::arg("max_evals") = 50000, py::arg("cavity_dim") = 60, py::arg("mech_dim") = 15,
      py::arg("exact_replay") = false, py::arg("optimize_theta") = false, py::arg("theta") = 0.0,
      "Multistart amplitude optimization; returns the report as a JSON string.");

  m.def(
      "build_pattern",
      [](const std::vector<double>& amplitudes, double k, double eta_max, int cavity_dim,
         int mech_dim) {
        return pattern_to_json(build_pattern(amplitudes, params_for(k, cavity_dim, mech_dim),
                                             eta_max));
      },
      py::arg("amplitudes"), py::arg("k") = 1.0 / 26.0, py::arg("eta_max") = 4.0,
      py::arg("cavity_dim") = 60, py::arg("mech_dim") = 15,
      "Expand block amplitudes into a serialized driving pattern.");

  m.def(
      "phase_schedule",
      [](const std::vector<double>& amplitudes, double k) {
        PhaseLedger led = phase_schedule(amplitudes, k);
        return py::make_tuple(led.psi, led.varphi);
      },
      py::arg("amplitudes"), py::arg("k") = 1.0 / 26.0,
      "Per-period drive phases and the accumulated frame angles.");

  m.def(
      "simulate_exact",
      [](const std::string& pattern_json, const std::string& target, double theta,
         int steps_per_period) {
        DrivingPattern pat = pattern_from_json(pattern_json);
        PropagationConfig cfg;
        cfg.steps_per_period = steps_per_period;
        Vector v0 = Vector::Zero(pat.params.space.composite_dim());
        v0[0] = 1.0;
        SimulationResult res;
        {
          py::gil_scoped_release release;
          res = propagate_exact(pat, pure_state(SpaceTag::Composite, pat.params.space, v0), cfg);
        }
        nlohmann::json out;
        out["fidelity"] = fidelity_fn(res, target_from(target, theta));
        double best_theta = 0.0;
        out["fidelity_best_theta"] = fidelity_fn_best_theta(res, &best_theta);
        out["best_theta"] = best_theta;
        out["norm_defect"] = res.norm_defect;
        out["leakage_warning"] = res.leakage_warning;
        nlohmann::json snaps = nlohmann::json::array();
        for (const auto& s : res.snapshots)
          snaps.push_back({{"time", s.time}, {"populations", s.cavity_populations}});
        out["snapshots"] = snaps;
        return out.dump();
      },
      py::arg("pattern_json"), py::arg("target") = "fock2", py::arg("theta") = 0.0,
      py::arg("steps_per_period") = 400,
      "Exact propagation from the vacuum; returns a JSON summary.");

  m.def(
      "verify",
      [](int panels, bool fast) {
        VerifyOptions opts;
        opts.quadrature_panels = panels;
        opts.include_slope_fits = !fast;
        std::vector<CheckResult> checks;
        {
          py::gil_scoped_release release;
          checks = verify_suite(opts);
        }
        nlohmann::json out = nlohmann::json::array();
        for (const auto& c : checks)
          out.push_back({{"name", c.name},
                         {"pass", c.pass},
                         {"value", c.value},
                         {"bound", c.bound},
                         {"note", c.note}});
        return out.dump();
      },
      py::arg("panels") = 2000, py::arg("fast") = true,
      "Invariant suite results as a JSON list.");

  m.def(
      "config_hash", [](const std::string& text) { return config_hash(text); },
      py::arg("text"), "FNV-1a hash used for output provenance.");
}
