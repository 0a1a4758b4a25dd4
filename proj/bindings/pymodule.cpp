// Python bindings for the core operations: fitting, the four tests,
// pseudo-true parameters, and small simulation sweeps.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "occuscore/asymptotics.hpp"
#include "occuscore/report.hpp"
#include "occuscore/simharness.hpp"

namespace py = pybind11;
using namespace occuscore;

namespace {

Dataset make_dataset(int n1, int k1, int s_d1, int d1, int n2, int k2, int s_d2, int d2) {
  Dataset ds;
  ds.designs = {{n1, k1}, {n2, k2}};
  ds.data = {{s_d1, d1}, {s_d2, d2}};
  validate(ds.data.region1, ds.designs.region1);
  validate(ds.data.region2, ds.designs.region2);
  return ds;
}

py::dict test_dict(const TestOutcome& t) {
  py::dict out;
  out["statistic"] = t.statistic;
  out["df"] = t.df;
  out["p_value"] = t.has_p_value ? py::object(py::float_(t.p_value)) : py::object(py::none());
  out["reject"] = t.reject;
  out["computable"] = t.computable;
  return out;
}

py::dict analyze(int n1, int k1, int s_d1, int d1, int n2, int k2, int s_d2, int d2,
                 double alpha) {
  const Dataset ds = make_dataset(n1, k1, s_d1, d1, n2, k2, s_d2, d2);
  const AnalysisReport rep = analyze_dataset(ds, alpha);

  py::dict out;
  out["alpha"] = alpha;
  py::dict full;
  full["status"] = to_string(rep.full_fit.status);
  full["loglik"] = rep.full_fit.loglik;
  full["psi1"] = rep.full_fit.estimate.psi1;
  full["p1"] = rep.full_fit.estimate.p1;
  full["psi2"] = rep.full_fit.estimate.psi2;
  full["p2"] = rep.full_fit.estimate.p2;
  out["full_fit"] = full;
  py::dict null_fit;
  null_fit["status"] = to_string(rep.null_fit.status);
  null_fit["loglik"] = rep.null_fit.loglik;
  null_fit["psi"] = rep.null_fit.estimate.psi;
  null_fit["p1"] = rep.null_fit.estimate.p1;
  null_fit["p2"] = rep.null_fit.estimate.p2;
  out["null_fit"] = null_fit;
  out["wald"] = test_dict(rep.wald);
  out["lrt"] = test_dict(rep.lrt);
  out["score_expected"] = test_dict(rep.score_expected);
  out["score_observed"] = test_dict(rep.score_observed_standard);
  out["score_observed_modified"] = test_dict(rep.score_observed_modified);
  if (rep.eigenvalues_ok) {
    py::list eigs;
    for (double v : rep.null_info_eigenvalues) eigs.append(v);
    out["null_info_eigenvalues"] = eigs;
  }
  return out;
}

py::dict pseudo_true(double psi1, double p1, double psi2, double p2, int n_sites, int n_visits) {
  const TwoRegionDesign designs{{n_sites, n_visits}, {n_sites, n_visits}};
  const PseudoTrue pt = solve_pseudo_true({psi1, p1, psi2, p2}, designs);
  py::dict out;
  out["psi"] = pt.value.psi;
  out["p1"] = pt.value.p1;
  out["p2"] = pt.value.p2;
  out["converged"] = pt.converged;
  out["residual"] = pt.residual;
  return out;
}

py::list power_sweep(double psi1, double p1, double p2, int n_sites, int n_visits,
                     std::vector<double> r_grid, int replicates, double alpha,
                     std::uint64_t seed) {
  SweepConfig config;
  config.psi1 = psi1;
  config.p1 = p1;
  config.p2 = p2;
  config.designs = {{n_sites, n_visits}, {n_sites, n_visits}};
  config.r_grid = std::move(r_grid);
  config.replicates = replicates;
  config.alpha = alpha;
  config.base_seed = seed;
  validate(config);

  py::list out;
  for (const PowerPoint& pt : run_power_sweep(config)) {
    py::dict row;
    row["r"] = pt.r;
    row["wald"] = pt.wald.rate();
    row["lrt"] = pt.lrt.rate();
    row["score_expected"] = pt.score_expected.rate();
    row["score_observed"] = pt.score_observed.rate();
    row["score_modified"] = pt.score_modified.rate();
    row["n_negative_observed"] = pt.n_negative_observed;
    out.append(row);
  }
  return out;
}

py::dict simulate(double psi, double p, int n_sites, int n_visits, std::uint64_t seed) {
  RandomStream stream = derive_stream(seed, 0, 0);
  const RegionSummary s = simulate_region({n_sites, n_visits}, {psi, p}, stream);
  py::dict out;
  out["s_d"] = s.s_d;
  out["d"] = s.d;
  return out;
}

}  // namespace

PYBIND11_MODULE(_occuscore, m) {
  m.doc() = "Two-sample occupancy comparison under imperfect detection";

  m.def("theta_detect", &theta_detect, py::arg("p"), py::arg("n_visits"),
        "Probability of at least one detection over n_visits visits.");
  m.def("chi2_1_sf", &chi2_1_sf, py::arg("x"));
  m.def("chi2_1_critical", &chi2_1_critical, py::arg("alpha"));
  m.def("analyze", &analyze, py::arg("n1"), py::arg("k1"), py::arg("s_d1"), py::arg("d1"),
        py::arg("n2"), py::arg("k2"), py::arg("s_d2"), py::arg("d2"), py::arg("alpha") = 0.05,
        "Fit both models and run all four tests on two region summaries.");
  m.def("pseudo_true", &pseudo_true, py::arg("psi1"), py::arg("p1"), py::arg("psi2"),
        py::arg("p2"), py::arg("n_sites") = 50, py::arg("n_visits") = 3,
        "Null-constrained parameters at which the expected null score vanishes.");
  m.def("power_sweep", &power_sweep, py::arg("psi1"), py::arg("p1"), py::arg("p2"),
        py::arg("n_sites"), py::arg("n_visits"), py::arg("r_grid"), py::arg("replicates"),
        py::arg("alpha") = 0.05, py::arg("seed") = 1,
        "Monte Carlo rejection rates along a grid of occupancy declines.");
  m.def("simulate", &simulate, py::arg("psi"), py::arg("p"), py::arg("n_sites"),
        py::arg("n_visits"), py::arg("seed"), "One simulated region summary.");
}
