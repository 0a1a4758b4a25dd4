#include "occuscore/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace occuscore {

void validate(const SweepConfig& config) {
  validate(config.designs.region1);
  validate(config.designs.region2);
  if (!(config.psi1 > 0.0 && config.psi1 < 1.0 && config.p1 > 0.0 && config.p1 < 1.0 &&
        config.p2 > 0.0 && config.p2 < 1.0))
    throw std::invalid_argument("SweepConfig: probabilities must lie in (0,1)");
  if (config.replicates < 1) throw std::invalid_argument("SweepConfig: replicates must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw std::invalid_argument("SweepConfig: alpha must lie in (0,1)");
  if (!std::is_sorted(config.r_grid.begin(), config.r_grid.end()))
    throw std::invalid_argument("SweepConfig: r_grid must be sorted");
  for (double r : config.r_grid)
    if (!(r >= 0.0 && r < 1.0))
      throw std::invalid_argument("SweepConfig: R values must lie in [0,1)");
}

std::vector<double> make_r_grid(double r_min, double r_max, double r_step) {
  if (r_step <= 0.0) throw std::invalid_argument("r_step must be positive");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double r = r_min + i * r_step;
    if (r > r_max + 1e-12) break;
    grid.push_back(r);
  }
  return grid;
}

ReplicateOutcome evaluate_replicate(const SweepConfig& config, int r_index, double r,
                                    int replicate, bool want_eigenvalues) {
  const ThetaFull truth = config.truth_at(r);
  RandomStream stream = derive_stream(config.base_seed, static_cast<std::uint64_t>(r_index),
                                      static_cast<std::uint64_t>(replicate));
  ReplicateOutcome out;
  out.data.region1 = simulate_region(config.designs.region1, truth.region1(), stream);
  out.data.region2 = simulate_region(config.designs.region2, truth.region2(), stream);

  const NullFit nf = fit_null(out.data, config.designs);
  const FullFit ff = fit_full(out.data, config.designs);
  out.null_status = nf.status;
  out.full_status = ff.status;

  if (ff.status == FitStatus::Converged) {
    const TestOutcome w = wald_test(ff, config.alpha);
    out.wald_ok = w.computable;
    out.wald = w.statistic;
  }
  if (ff.status == FitStatus::Converged && nf.status == FitStatus::Converged) {
    const TestOutcome l = lr_test(ff, nf, config.alpha);
    out.lrt_ok = l.computable;
    out.lrt = l.statistic;
  }
  if (nf.status == FitStatus::Converged) {
    const TestOutcome te = score_test_expected(out.data, config.designs, nf, config.alpha);
    out.te_ok = te.computable;
    out.te = te.statistic;
    const TestOutcome to =
        score_test_observed(out.data, config.designs, nf, config.alpha, Rule::Standard);
    out.to_ok = to.computable;
    out.to = to.statistic;
    if (want_eigenvalues) {
      const la::Mat4 j = observed_info(out.data, config.designs, expand_null(nf.estimate));
      const la::EigenSym<4> eig = la::sym_eigen(j);
      out.null_info_eigs = eig.values;
      out.eigs_ok = true;
    }
  }
  return out;
}

std::vector<PowerPoint> run_power_sweep(const SweepConfig& config) {
  validate(config);
  const double crit = chi2_1_critical(config.alpha);
  std::vector<PowerPoint> out;
  out.reserve(config.r_grid.size());
  for (int ri = 0; ri < static_cast<int>(config.r_grid.size()); ++ri) {
    const double r = config.r_grid[ri];
    PowerPoint pt;
    pt.r = r;
    for (int rep = 0; rep < config.replicates; ++rep) {
      const ReplicateOutcome o = evaluate_replicate(config, ri, r, rep, false);
      if (o.null_status != FitStatus::Converged) ++pt.null_failures[o.null_status];
      if (o.full_status != FitStatus::Converged) ++pt.full_failures[o.full_status];
      if (o.wald_ok) {
        ++pt.wald.n_valid;
        pt.wald.n_reject += o.wald > crit ? 1 : 0;
      }
      if (o.lrt_ok) {
        ++pt.lrt.n_valid;
        pt.lrt.n_reject += o.lrt > crit ? 1 : 0;
      }
      if (o.te_ok) {
        ++pt.score_expected.n_valid;
        pt.score_expected.n_reject += o.te > crit ? 1 : 0;
      }
      if (o.to_ok) {
        ++pt.score_observed.n_valid;
        pt.score_observed.n_reject += o.to > crit ? 1 : 0;
        ++pt.score_modified.n_valid;
        pt.score_modified.n_reject += (o.to > crit || o.to < 0.0) ? 1 : 0;
        if (o.to < 0.0) ++pt.n_negative_observed;
        if (o.to > 0.0) {
          ++pt.score_positive.n_valid;
          pt.score_positive.n_reject += o.to > crit ? 1 : 0;
        }
      }
    }
    out.push_back(std::move(pt));
  }
  return out;
}

double selection_median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t k = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + k, values.end());
  return values[k];
}

std::vector<MedianRow> run_median_curves(const SweepConfig& config) {
  validate(config);
  std::vector<MedianRow> out;
  out.reserve(config.r_grid.size());
  for (int ri = 0; ri < static_cast<int>(config.r_grid.size()); ++ri) {
    const double r = config.r_grid[ri];
    std::vector<double> te, to, ratio, plus, minus;
    for (int rep = 0; rep < config.replicates; ++rep) {
      const ReplicateOutcome o = evaluate_replicate(config, ri, r, rep, false);
      if (!(o.te_ok && o.to_ok)) continue;
      te.push_back(o.te);
      to.push_back(o.to);
      if (o.to != 0.0) ratio.push_back(o.te / o.to);
      if (o.to > 0.0) plus.push_back(o.to);
      if (o.to < 0.0) minus.push_back(o.to);
    }
    MedianRow row;
    row.r = r;
    row.n_valid = static_cast<int>(te.size());
    row.n_plus = static_cast<int>(plus.size());
    row.n_minus = static_cast<int>(minus.size());
    row.median_te = selection_median(std::move(te));
    row.median_to = selection_median(std::move(to));
    row.median_ratio = selection_median(std::move(ratio));
    row.median_to_plus = selection_median(std::move(plus));
    row.median_to_minus = selection_median(std::move(minus));
    out.push_back(row);
  }
  return out;
}

const char* to_string(AgreementVariant variant) {
  return variant == AgreementVariant::PositiveOnly ? "positive_only" : "modified";
}

std::vector<AgreementRow> run_agreement(const SweepConfig& config, AgreementVariant variant) {
  validate(config);
  const double crit = chi2_1_critical(config.alpha);
  std::vector<AgreementRow> out;
  out.reserve(config.r_grid.size());
  for (int ri = 0; ri < static_cast<int>(config.r_grid.size()); ++ri) {
    const double r = config.r_grid[ri];
    int considered = 0, agree = 0;
    for (int rep = 0; rep < config.replicates; ++rep) {
      const ReplicateOutcome o = evaluate_replicate(config, ri, r, rep, false);
      if (!(o.te_ok && o.to_ok)) continue;
      if (variant == AgreementVariant::PositiveOnly && !(o.to > 0.0)) continue;
      ++considered;
      const bool reject_e = o.te > crit;
      const bool reject_o = variant == AgreementVariant::PositiveOnly
                                ? o.to > crit
                                : (o.to > crit || o.to < 0.0);
      agree += reject_e == reject_o ? 1 : 0;
    }
    AgreementRow row;
    row.r = r;
    row.n = considered;
    row.agreement = considered > 0 ? static_cast<double>(agree) / considered : 0.0;
    row.variant = variant;
    out.push_back(row);
  }
  return out;
}

std::vector<EigenMedianRow> run_eigen_median_curves(const SweepConfig& config) {
  validate(config);
  std::vector<EigenMedianRow> out;
  out.reserve(config.r_grid.size());
  for (int ri = 0; ri < static_cast<int>(config.r_grid.size()); ++ri) {
    const double r = config.r_grid[ri];
    std::array<std::vector<double>, 4> eigs;
    for (int rep = 0; rep < config.replicates; ++rep) {
      const ReplicateOutcome o = evaluate_replicate(config, ri, r, rep, true);
      if (!o.eigs_ok) continue;
      for (int k = 0; k < 4; ++k) eigs[k].push_back(o.null_info_eigs[k]);
    }
    EigenMedianRow row;
    row.r = r;
    row.n_valid = static_cast<int>(eigs[0].size());
    for (int k = 0; k < 4; ++k) row.medians[k] = selection_median(std::move(eigs[k]));
    out.push_back(row);
  }
  return out;
}

std::vector<double> run_projected_eigen_experiment(const SweepConfig& config, double r) {
  validate(config);
  if (!(r >= 0.0 && r < 1.0))
    throw std::invalid_argument("run_projected_eigen_experiment: R must lie in [0,1)");
  const ThetaFull truth = config.truth_at(r);
  const PseudoTrue pt = solve_pseudo_true(truth, config.designs);
  if (!pt.converged)
    throw std::runtime_error("run_projected_eigen_experiment: pseudo-true solve failed");
  const ThetaFull at = expand_null(pt.value);

  std::vector<la::Vec<4>> scores;
  std::vector<la::Mat4> infos;
  scores.reserve(config.replicates);
  infos.reserve(config.replicates);
  for (int rep = 0; rep < config.replicates; ++rep) {
    RandomStream stream = derive_stream(config.base_seed, 0, static_cast<std::uint64_t>(rep));
    TwoRegionData data;
    data.region1 = simulate_region(config.designs.region1, truth.region1(), stream);
    data.region2 = simulate_region(config.designs.region2, truth.region2(), stream);
    scores.push_back(full_score(data, config.designs, at));
    infos.push_back(observed_info(data, config.designs, at));
  }

  // empirical covariance of the scores (divisor n-1)
  la::Vec<4> mean{};
  for (const auto& s : scores)
    for (int i = 0; i < 4; ++i) mean[i] += s[i];
  for (int i = 0; i < 4; ++i) mean[i] /= static_cast<double>(scores.size());
  la::Mat4 sigma;
  for (const auto& s : scores)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) sigma(i, j) += (s[i] - mean[i]) * (s[j] - mean[j]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sigma(i, j) /= static_cast<double>(scores.size()) - 1.0;

  std::vector<double> out;
  out.reserve(infos.size());
  for (const auto& j : infos) {
    try {
      const SpectralReport rep = projected_spectrum(j, sigma);
      const double lead = rep.leading();
      if (lead != 0.0) out.push_back(1.0 / lead);
    } catch (const std::domain_error&) {
      // singular information: skipped, matching the fit filtering
    }
  }
  return out;
}

std::vector<ScatterPoint> collect_scatter(const SweepConfig& config) {
  validate(config);
  std::vector<ScatterPoint> out;
  for (int ri = 0; ri < static_cast<int>(config.r_grid.size()); ++ri) {
    const double r = config.r_grid[ri];
    for (int rep = 0; rep < config.replicates; ++rep) {
      const ReplicateOutcome o = evaluate_replicate(config, ri, r, rep, false);
      if (!(o.te_ok && o.to_ok)) continue;
      out.push_back({r, rep, o.te, o.to});
    }
  }
  return out;
}

}  // namespace occuscore
