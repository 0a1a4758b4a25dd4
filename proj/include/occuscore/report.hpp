#ifndef OCCUSCORE_REPORT_HPP
#define OCCUSCORE_REPORT_HPP

// Full analysis of one dataset: both fits, the four tests, decisions
// under both rejection rules, and the eigenvalues of the observed
// information at the null fit.

#include <array>
#include <string>

#include "occuscore/dataset.hpp"
#include "occuscore/estimation.hpp"
#include "occuscore/hypothesis.hpp"

namespace occuscore {

struct AnalysisReport {
  Dataset dataset{};
  double alpha = 0.05;
  FullFit full_fit{};
  NullFit null_fit{};
  TestOutcome wald{}, lrt{}, score_expected{};
  TestOutcome score_observed_standard{}, score_observed_modified{};
  bool eigenvalues_ok = false;
  std::array<double, 4> null_info_eigenvalues{};
};

AnalysisReport analyze_dataset(const Dataset& dataset, double alpha);

std::string report_to_json(const AnalysisReport& report);
std::string report_to_text(const AnalysisReport& report, Rule headline_rule);

}  // namespace occuscore

#endif
