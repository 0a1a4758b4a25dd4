#include "occuscore/estimation.hpp"

#include <cmath>
#include <limits>

namespace occuscore {

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "Converged";
    case FitStatus::NoConvergence: return "NoConvergence";
    case FitStatus::NonInvertibleInformation: return "NonInvertibleInformation";
    case FitStatus::BoundaryEstimate: return "BoundaryEstimate";
    case FitStatus::DegenerateData: return "DegenerateData";
  }
  return "?";
}

FitStatus combine(FitStatus a, FitStatus b) { return a > b ? a : b; }

namespace {

constexpr double kBoundaryEps = 1e-6;   // probability-scale interior band
constexpr double kStepTol = 1e-10;
constexpr int kMaxIterations = 200;
constexpr double kLogitCap = 40.0;      // iterates past this are boundary runs

double logit(double x) { return std::log(x / (1.0 - x)); }
double inv_logit(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double clamp_prob(double x) { return std::min(0.95, std::max(0.05, x)); }

template <int N>
struct NewtonOutcome {
  la::Vec<N> theta{};
  double loglik = -std::numeric_limits<double>::infinity();
  FitStatus status = FitStatus::NoConvergence;
  int iterations = 0;
};

// Maximize ll over (0,1)^N via Newton on logits with a halving line
// search. `score` and `info` are in probability coordinates; info is
// the negative Hessian there. grad_tol is on the probability-scale
// score max-norm.
template <int N, class LogLik, class Score, class Info>
NewtonOutcome<N> maximize_logit(la::Vec<N> start, LogLik loglik_fn, Score score_fn,
                                Info info_fn, double grad_tol) {
  NewtonOutcome<N> out;
  la::Vec<N> u;
  for (int i = 0; i < N; ++i) u[i] = logit(start[i]);

  auto probs = [](const la::Vec<N>& uu) {
    la::Vec<N> t;
    // keep iterates strictly interior: inv_logit rounds to 0/1 for
    // large |u| and the likelihood rejects closed-boundary values
    for (int i = 0; i < N; ++i)
      t[i] = std::min(1.0 - 1e-12, std::max(1e-12, inv_logit(uu[i])));
    return t;
  };

  la::Vec<N> theta = probs(u);
  double ll = loglik_fn(theta);
  bool converged = false;

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    out.iterations = iter;
    const la::Vec<N> g = score_fn(theta);
    if (la::max_abs(g) < grad_tol) {
      converged = true;
      break;
    }

    la::Vec<N> w, gu;
    for (int i = 0; i < N; ++i) {
      w[i] = theta[i] * (1.0 - theta[i]);
      gu[i] = g[i] * w[i];
    }

    // negative Hessian in logit coordinates:
    //   W J W - diag(g_i w_i (1 - 2 theta_i))
    const la::Mat<N, N> j = info_fn(theta);
    la::Mat<N, N> h;
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) h(i, k) = w[i] * j(i, k) * w[k];
    for (int i = 0; i < N; ++i) h(i, i) -= g[i] * w[i] * (1.0 - 2.0 * theta[i]);

    la::Vec<N> step;
    const auto newton = la::solve<N>(h, gu);
    if (newton && la::dot(*newton, gu) > 0.0) {
      step = *newton;
    } else {
      step = gu;  // indefinite Hessian: fall back to steepest ascent
    }

    double t = 1.0;
    la::Vec<N> u_next = u;
    double ll_next = ll;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      la::Vec<N> trial = u;
      for (int i = 0; i < N; ++i) trial[i] += t * step[i];
      const double ll_trial = loglik_fn(probs(trial));
      // tolerate rounding-level decreases so Newton can polish the
      // optimum instead of stalling one ulp away from it
      if (std::isfinite(ll_trial) && ll_trial >= ll - 1e-11 * (1.0 + std::abs(ll))) {
        u_next = trial;
        ll_next = ll_trial;
        improved = true;
        break;
      }
      t *= 0.5;
    }

    double step_norm = 0.0;
    for (int i = 0; i < N; ++i) step_norm = std::max(step_norm, std::abs(t * step[i]));
    if (!improved || step_norm < kStepTol) {
      converged = la::max_abs(score_fn(probs(u_next))) < grad_tol;
      u = u_next;
      ll = ll_next;
      theta = probs(u);
      break;
    }

    u = u_next;
    ll = ll_next;
    theta = probs(u);

    double cap = 0.0;
    for (int i = 0; i < N; ++i) cap = std::max(cap, std::abs(u[i]));
    if (cap > kLogitCap) {
      out.theta = theta;
      out.loglik = ll;
      out.status = FitStatus::BoundaryEstimate;
      return out;
    }
  }

  out.theta = theta;
  out.loglik = ll;
  if (!converged) {
    out.status = FitStatus::NoConvergence;
    return out;
  }
  for (int i = 0; i < N; ++i)
    if (theta[i] < kBoundaryEps || theta[i] > 1.0 - kBoundaryEps) {
      out.status = FitStatus::BoundaryEstimate;
      return out;
    }
  out.status = FitStatus::Converged;
  return out;
}

}  // namespace

RegionFit fit_region(const RegionSummary& summary, const RegionDesign& design) {
  validate(summary, design);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  RegionFit fit;
  fit.estimate = {nan, nan};
  fit.loglik = nan;

  if (summary.s_d == 0) {
    fit.status = FitStatus::DegenerateData;
    return fit;
  }
  // s_d = N forces psi*theta to 1; d = K*s_d forces p to 1.
  if (summary.s_d == design.n_sites || summary.d == summary.s_d * design.n_visits) {
    fit.status = FitStatus::BoundaryEstimate;
    return fit;
  }

  const double p0 = clamp_prob(static_cast<double>(summary.d) /
                               (static_cast<double>(summary.s_d) * design.n_visits));
  const double psi0 = clamp_prob(static_cast<double>(summary.s_d) / design.n_sites /
                                 theta_detect(p0, design.n_visits));

  auto ll = [&](const la::Vec<2>& t) {
    return region_loglik(summary, design, RegionParams{t[0], t[1]});
  };
  auto sc = [&](const la::Vec<2>& t) {
    const auto s = region_score(summary, design, RegionParams{t[0], t[1]});
    return la::Vec<2>{s[0], s[1]};
  };
  auto info = [&](const la::Vec<2>& t) {
    return region_observed_info(summary.s_d, summary.d, design, RegionParams{t[0], t[1]});
  };

  const auto res =
      maximize_logit<2>({psi0, p0}, ll, sc, info, 1e-8 * design.n_sites);
  fit.estimate = {res.theta[0], res.theta[1]};
  fit.loglik = res.loglik;
  fit.status = res.status;
  fit.iterations = res.iterations;
  if (fit.status == FitStatus::Converged) {
    fit.info = region_observed_info(summary.s_d, summary.d, design, fit.estimate);
    if (la::Lu<2>(fit.info).singular) fit.status = FitStatus::NonInvertibleInformation;
  }
  return fit;
}

FullFit fit_full(const TwoRegionData& data, const TwoRegionDesign& designs) {
  const RegionFit f1 = fit_region(data.region1, designs.region1);
  const RegionFit f2 = fit_region(data.region2, designs.region2);
  FullFit fit;
  fit.estimate = {f1.estimate.psi, f1.estimate.p, f2.estimate.psi, f2.estimate.p};
  fit.loglik = f1.loglik + f2.loglik;
  fit.status = combine(f1.status, f2.status);
  fit.iterations = std::max(f1.iterations, f2.iterations);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      fit.info(i, k) = f1.info(i, k);
      fit.info(2 + i, 2 + k) = f2.info(i, k);
    }
  return fit;
}

NullFit fit_null(const TwoRegionData& data, const TwoRegionDesign& designs) {
  validate(data.region1, designs.region1);
  validate(data.region2, designs.region2);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  NullFit fit;
  fit.estimate = {nan, nan, nan};
  fit.loglik = nan;

  if (data.region1.s_d == 0 || data.region2.s_d == 0) {
    fit.status = FitStatus::DegenerateData;
    return fit;
  }
  if (data.region1.d == data.region1.s_d * designs.region1.n_visits ||
      data.region2.d == data.region2.s_d * designs.region2.n_visits ||
      (data.region1.s_d == designs.region1.n_sites &&
       data.region2.s_d == designs.region2.n_sites)) {
    fit.status = FitStatus::BoundaryEstimate;
    return fit;
  }

  const double p10 = clamp_prob(static_cast<double>(data.region1.d) /
                                (static_cast<double>(data.region1.s_d) * designs.region1.n_visits));
  const double p20 = clamp_prob(static_cast<double>(data.region2.d) /
                                (static_cast<double>(data.region2.s_d) * designs.region2.n_visits));
  const double pooled = static_cast<double>(data.region1.s_d + data.region2.s_d) /
                        (designs.region1.n_sites + designs.region2.n_sites);
  const double psi0 = clamp_prob(
      pooled / (0.5 * (theta_detect(p10, designs.region1.n_visits) +
                       theta_detect(p20, designs.region2.n_visits))));

  auto ll = [&](const la::Vec<3>& t) {
    return total_loglik(data, designs, expand_null(ThetaNull::from_vec(t)));
  };
  auto sc = [&](const la::Vec<3>& t) {
    return null_score(data, designs, ThetaNull::from_vec(t));
  };
  auto info = [&](const la::Vec<3>& t) {
    return null_observed_info(data, designs, ThetaNull::from_vec(t));
  };

  const double grad_tol = 1e-8 * (designs.region1.n_sites + designs.region2.n_sites);
  const auto res = maximize_logit<3>({psi0, p10, p20}, ll, sc, info, grad_tol);
  fit.estimate = ThetaNull::from_vec(res.theta);
  fit.loglik = res.loglik;
  fit.status = res.status;
  fit.iterations = res.iterations;
  if (fit.status == FitStatus::Converged) {
    fit.info = null_observed_info(data, designs, fit.estimate);
    if (la::Lu<3>(fit.info).singular) fit.status = FitStatus::NonInvertibleInformation;
  }
  return fit;
}

}  // namespace occuscore
