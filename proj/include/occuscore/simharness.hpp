#ifndef OCCUSCORE_SIMHARNESS_HPP
#define OCCUSCORE_SIMHARNESS_HPP

// Monte Carlo studies: power curves, statistic medians, agreement
// tables, eigenvalue medians of the observed information at the null
// fit, and the per-dataset projected-spectrum experiment. Everything is
// deterministic given the base seed; each replicate consumes only its
// own derived stream, and reductions run in replicate order.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "occuscore/asymptotics.hpp"
#include "occuscore/hypothesis.hpp"

namespace occuscore {

struct SweepConfig {
  double psi1 = 0.8;
  double p1 = 0.5;
  double p2 = 0.5;
  TwoRegionDesign designs{{50, 3}, {50, 3}};
  std::vector<double> r_grid;  // sorted, values in [0,1); psi2 = (1-R) psi1
  int replicates = 10000;
  double alpha = 0.05;
  std::uint64_t base_seed = 1;

  ThetaFull truth_at(double r) const { return {psi1, p1, (1.0 - r) * psi1, p2}; }
};

void validate(const SweepConfig& config);

std::vector<double> make_r_grid(double r_min, double r_max, double r_step);

// One simulated dataset and everything the tests need from it.
struct ReplicateOutcome {
  TwoRegionData data{};
  FitStatus null_status = FitStatus::NoConvergence;
  FitStatus full_status = FitStatus::NoConvergence;
  bool wald_ok = false, lrt_ok = false, te_ok = false, to_ok = false;
  double wald = 0.0, lrt = 0.0, te = 0.0, to = 0.0;
  bool eigs_ok = false;
  std::array<double, 4> null_info_eigs{};  // observed info at the null fit, descending
};

ReplicateOutcome evaluate_replicate(const SweepConfig& config, int r_index, double r,
                                    int replicate, bool want_eigenvalues);

struct TestCell {
  int n_valid = 0;
  int n_reject = 0;
  double rate() const { return n_valid > 0 ? static_cast<double>(n_reject) / n_valid : 0.0; }
};

struct PowerPoint {
  double r = 0.0;
  TestCell wald, lrt, score_expected, score_observed, score_modified, score_positive;
  int n_negative_observed = 0;
  std::map<FitStatus, int> null_failures;
  std::map<FitStatus, int> full_failures;
};

std::vector<PowerPoint> run_power_sweep(const SweepConfig& config);

struct MedianRow {
  double r = 0.0;
  double median_te = 0.0, median_to = 0.0, median_ratio = 0.0;
  double median_to_plus = 0.0, median_to_minus = 0.0;
  int n_valid = 0, n_plus = 0, n_minus = 0;
};

std::vector<MedianRow> run_median_curves(const SweepConfig& config);

enum class AgreementVariant { PositiveOnly, Modified };

const char* to_string(AgreementVariant variant);

struct AgreementRow {
  double r = 0.0;
  double agreement = 0.0;
  int n = 0;  // replicates considered
  AgreementVariant variant = AgreementVariant::PositiveOnly;
};

std::vector<AgreementRow> run_agreement(const SweepConfig& config, AgreementVariant variant);

struct EigenMedianRow {
  double r = 0.0;
  std::array<double, 4> medians{};  // per index, descending order
  int n_valid = 0;
};

std::vector<EigenMedianRow> run_eigen_median_curves(const SweepConfig& config);

// Per-dataset reciprocal leading eigenvalue of the projected matrix at
// the pseudo-true point, with Sigma taken as the empirical covariance
// of the simulated scores. Non-invertible datasets are skipped.
std::vector<double> run_projected_eigen_experiment(const SweepConfig& config, double r);

struct ScatterPoint {
  double r = 0.0;
  int replicate = 0;
  double te = 0.0, to = 0.0;
};

// Per-replicate (T_E, T_O) pairs across the grid, for scatter export.
std::vector<ScatterPoint> collect_scatter(const SweepConfig& config);

// Exact-selection lower median (element (n-1)/2 of the sorted values).
double selection_median(std::vector<double> values);

}  // namespace occuscore

#endif
