#include "occuscore/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace occuscore {

AnalysisReport analyze_dataset(const Dataset& dataset, double alpha) {
  AnalysisReport rep;
  rep.dataset = dataset;
  rep.alpha = alpha;
  rep.full_fit = fit_full(dataset.data, dataset.designs);
  rep.null_fit = fit_null(dataset.data, dataset.designs);
  rep.wald = wald_test(rep.full_fit, alpha);
  rep.lrt = lr_test(rep.full_fit, rep.null_fit, alpha);
  rep.score_expected = score_test_expected(dataset.data, dataset.designs, rep.null_fit, alpha);
  rep.score_observed_standard =
      score_test_observed(dataset.data, dataset.designs, rep.null_fit, alpha, Rule::Standard);
  rep.score_observed_modified = score_test_observed(dataset.data, dataset.designs, rep.null_fit,
                                                    alpha, Rule::ModifiedNegative);
  if (rep.null_fit.status == FitStatus::Converged) {
    const la::Mat4 j =
        observed_info(dataset.data, dataset.designs, expand_null(rep.null_fit.estimate));
    rep.null_info_eigenvalues = la::sym_eigen(j).values;
    rep.eigenvalues_ok = true;
  }
  return rep;
}

namespace {

nlohmann::json test_json(const TestOutcome& t) {
  nlohmann::json j;
  j["computable"] = t.computable;
  if (!t.computable) return j;
  j["statistic"] = t.statistic;
  j["df"] = t.df;
  if (t.has_p_value)
    j["p_value"] = t.p_value;
  else
    j["p_value"] = nullptr;
  j["reject"] = t.reject;
  j["rule"] = to_string(t.rule);
  return j;
}

nlohmann::json region_json(int label, const RegionDesign& design, const RegionSummary& summary) {
  return {{"region", label},
          {"n_sites", design.n_sites},
          {"n_visits", design.n_visits},
          {"s_d", summary.s_d},
          {"d", summary.d}};
}

}  // namespace

std::string report_to_json(const AnalysisReport& rep) {
  nlohmann::json j;
  j["dataset"]["regions"] = nlohmann::json::array(
      {region_json(1, rep.dataset.designs.region1, rep.dataset.data.region1),
       region_json(2, rep.dataset.designs.region2, rep.dataset.data.region2)});
  j["alpha"] = rep.alpha;

  auto fit_json = [](FitStatus status, double loglik, int iterations,
                     nlohmann::json estimate) {
    nlohmann::json f;
    f["status"] = to_string(status);
    f["iterations"] = iterations;
    if (status == FitStatus::Converged) {
      f["loglik"] = loglik;
      f["estimate"] = std::move(estimate);
    }
    return f;
  };
  j["full_fit"] = fit_json(rep.full_fit.status, rep.full_fit.loglik, rep.full_fit.iterations,
                           {{"psi1", rep.full_fit.estimate.psi1},
                            {"p1", rep.full_fit.estimate.p1},
                            {"psi2", rep.full_fit.estimate.psi2},
                            {"p2", rep.full_fit.estimate.p2}});
  j["null_fit"] = fit_json(rep.null_fit.status, rep.null_fit.loglik, rep.null_fit.iterations,
                           {{"psi", rep.null_fit.estimate.psi},
                            {"p1", rep.null_fit.estimate.p1},
                            {"p2", rep.null_fit.estimate.p2}});

  j["tests"]["wald"] = test_json(rep.wald);
  j["tests"]["lrt"] = test_json(rep.lrt);
  j["tests"]["score_expected"] = test_json(rep.score_expected);
  j["tests"]["score_observed"]["standard"] = test_json(rep.score_observed_standard);
  j["tests"]["score_observed"]["modified"] = test_json(rep.score_observed_modified);

  if (rep.eigenvalues_ok)
    j["null_info_eigenvalues"] = rep.null_info_eigenvalues;
  else
    j["null_info_eigenvalues"] = nullptr;
  return j.dump(2) + "\n";
}

namespace {

void print_test(std::ostringstream& os, const char* name, const TestOutcome& t) {
  os << "  " << name << ": ";
  if (!t.computable) {
    os << "not computable (fit failed or information singular)\n";
    return;
  }
  os << "statistic = " << t.statistic;
  if (t.has_p_value)
    os << ", p = " << t.p_value;
  else
    os << ", p = n/a (negative statistic)";
  os << ", " << (t.reject ? "REJECT" : "do not reject") << " [" << to_string(t.rule) << " rule]\n";
}

}  // namespace

std::string report_to_text(const AnalysisReport& rep, Rule headline_rule) {
  std::ostringstream os;
  os.precision(6);
  const auto& ds = rep.dataset;
  os << "Two-sample occupancy comparison (H0: psi1 = psi2), alpha = " << rep.alpha << "\n";
  os << "  region 1: N=" << ds.designs.region1.n_sites << " K=" << ds.designs.region1.n_visits
     << " s_d=" << ds.data.region1.s_d << " d=" << ds.data.region1.d << "\n";
  os << "  region 2: N=" << ds.designs.region2.n_sites << " K=" << ds.designs.region2.n_visits
     << " s_d=" << ds.data.region2.s_d << " d=" << ds.data.region2.d << "\n";

  os << "Full fit: " << to_string(rep.full_fit.status);
  if (rep.full_fit.status == FitStatus::Converged)
    os << ", loglik = " << rep.full_fit.loglik << ", psi1 = " << rep.full_fit.estimate.psi1
       << ", p1 = " << rep.full_fit.estimate.p1 << ", psi2 = " << rep.full_fit.estimate.psi2
       << ", p2 = " << rep.full_fit.estimate.p2;
  os << "\n";
  os << "Null fit: " << to_string(rep.null_fit.status);
  if (rep.null_fit.status == FitStatus::Converged)
    os << ", loglik = " << rep.null_fit.loglik << ", psi = " << rep.null_fit.estimate.psi
       << ", p1 = " << rep.null_fit.estimate.p1 << ", p2 = " << rep.null_fit.estimate.p2;
  os << "\n";

  os << "Tests:\n";
  print_test(os, "Wald", rep.wald);
  print_test(os, "LRT", rep.lrt);
  print_test(os, "T_E (expected info)", rep.score_expected);
  print_test(os, "T_O (observed info)", rep.score_observed_standard);
  print_test(os, "T_O* (modified rule)", rep.score_observed_modified);

  if (rep.eigenvalues_ok) {
    os << "Eigenvalues of observed information at null fit:";
    for (double v : rep.null_info_eigenvalues) os << " " << v;
    os << "\n";
  }

  const TestOutcome& headline = headline_rule == Rule::ModifiedNegative
                                    ? rep.score_observed_modified
                                    : rep.score_observed_standard;
  if (headline.computable)
    os << "Headline decision (observed score, " << to_string(headline_rule)
       << " rule): " << (headline.reject ? "REJECT H0" : "do not reject H0") << "\n";
  return os.str();
}

}  // namespace occuscore
