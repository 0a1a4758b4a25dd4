#include "occuscore/hypothesis.hpp"

#include <cmath>
#include <stdexcept>

namespace occuscore {

namespace {

// Lower regularized incomplete gamma by its power series (x < a + 1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by modified Lentz continued
// fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: need x >= 0 and a > 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_1_sf(double x) {
  if (x < 0.0) throw std::domain_error("chi2_1_sf: x must be >= 0");
  return gamma_q(0.5, 0.5 * x);
}

double chi2_1_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("chi2_1_critical: alpha must lie in (0,1)");
  thread_local double cached_alpha = -1.0;
  thread_local double cached_crit = 0.0;
  if (alpha == cached_alpha) return cached_crit;
  double lo = 0.0, hi = 1.0;
  while (chi2_1_sf(hi) > alpha) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_1_sf(mid) > alpha ? lo : hi) = mid;
  }
  cached_alpha = alpha;
  cached_crit = 0.5 * (lo + hi);
  return cached_crit;
}

const char* to_string(TestKind kind) {
  switch (kind) {
    case TestKind::Wald: return "Wald";
    case TestKind::LRT: return "LRT";
    case TestKind::ScoreExpected: return "T_E";
    case TestKind::ScoreObserved: return "T_O";
  }
  return "?";
}

const char* to_string(Rule rule) {
  return rule == Rule::Standard ? "standard" : "modified";
}

namespace {

TestOutcome finish(TestKind kind, Rule rule, double statistic, double alpha) {
  TestOutcome out;
  out.kind = kind;
  out.rule = rule;
  out.statistic = statistic;
  out.computable = true;
  const double crit = chi2_1_critical(alpha);
  if (statistic >= 0.0) {
    out.p_value = chi2_1_sf(statistic);
    out.has_p_value = true;
    out.reject = statistic > crit;
  } else {
    out.has_p_value = false;
    out.reject = rule == Rule::ModifiedNegative;
  }
  return out;
}

}  // namespace

TestOutcome wald_test(const FullFit& full_fit, double alpha, WaldVariance variance,
                      const TwoRegionDesign* designs) {
  TestOutcome fail;
  fail.kind = TestKind::Wald;
  if (full_fit.status != FitStatus::Converged) return fail;

  la::Mat4 info = full_fit.info;
  if (variance == WaldVariance::Expected) {
    if (designs == nullptr)
      throw std::invalid_argument("wald_test: expected-variance variant needs designs");
    info = expected_info(full_fit.estimate, full_fit.estimate, *designs);
  }
  const auto inv = la::inverse<4>(info);
  if (!inv) return fail;
  const double diff = full_fit.estimate.psi1 - full_fit.estimate.psi2;
  const double denom = (*inv)(0, 0) + (*inv)(2, 2) - 2.0 * (*inv)(0, 2);
  if (!(denom > 0.0)) return fail;
  return finish(TestKind::Wald, Rule::Standard, diff * diff / denom, alpha);
}

TestOutcome lr_test(const FullFit& full_fit, const NullFit& null_fit, double alpha) {
  TestOutcome fail;
  fail.kind = TestKind::LRT;
  if (full_fit.status != FitStatus::Converged || null_fit.status != FitStatus::Converged)
    return fail;
  const double raw = 2.0 * (full_fit.loglik - null_fit.loglik);
  if (raw < -1e-6) return fail;  // nesting violated: optimizer inconsistency
  return finish(TestKind::LRT, Rule::Standard, std::max(raw, 0.0), alpha);
}

TestOutcome score_test_observed(const TwoRegionData& data, const TwoRegionDesign& designs,
                                const NullFit& null_fit, double alpha, Rule rule) {
  TestOutcome fail;
  fail.kind = TestKind::ScoreObserved;
  fail.rule = rule;
  if (null_fit.status != FitStatus::Converged) return fail;
  const ThetaFull at = expand_null(null_fit.estimate);
  const la::Vec<4> s = full_score(data, designs, at);
  const la::Mat4 j = observed_info(data, designs, at);
  const auto x = la::solve<4>(j, s);
  if (!x) return fail;  // NonInvertibleInformation
  return finish(TestKind::ScoreObserved, rule, la::dot(s, *x), alpha);
}

TestOutcome score_test_expected(const TwoRegionData& data, const TwoRegionDesign& designs,
                                const NullFit& null_fit, double alpha) {
  TestOutcome fail;
  fail.kind = TestKind::ScoreExpected;
  if (null_fit.status != FitStatus::Converged) return fail;
  const ThetaFull at = expand_null(null_fit.estimate);
  const la::Vec<4> s = full_score(data, designs, at);
  const la::Mat4 e = expected_info(at, at, designs);
  const auto x = la::solve<4>(e, s);
  if (!x) return fail;
  return finish(TestKind::ScoreExpected, Rule::Standard, la::dot(s, *x), alpha);
}

}  // namespace occuscore
