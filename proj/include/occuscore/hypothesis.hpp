#ifndef OCCUSCORE_HYPOTHESIS_HPP
#define OCCUSCORE_HYPOTHESIS_HPP

// The four tests of H0: psi1 = psi2, plus the modified rejection rule
// for the observed score test (reject when the statistic exceeds the
// chi-square cut-off OR is negative).

#include "occuscore/estimation.hpp"
#include "occuscore/inference.hpp"

namespace occuscore {

// Upper regularized incomplete gamma Q(a, x), series/continued-fraction.
double gamma_q(double a, double x);

// Survival function of chi-square with one degree of freedom.
double chi2_1_sf(double x);

// Upper quantile: the x with chi2_1_sf(x) = alpha, by bisection.
double chi2_1_critical(double alpha);

enum class TestKind { Wald, LRT, ScoreExpected, ScoreObserved };
enum class Rule { Standard, ModifiedNegative };
enum class WaldVariance { Observed, Expected };

const char* to_string(TestKind kind);
const char* to_string(Rule rule);

struct TestOutcome {
  TestKind kind = TestKind::Wald;
  Rule rule = Rule::Standard;
  double statistic = 0.0;
  int df = 1;
  double p_value = 0.0;
  bool has_p_value = false;  // no p-value for negative observed statistics
  bool reject = false;
  bool computable = false;   // false when a required fit or solve failed
};

// W = (psi1 - psi2)^2 / (v11 + v22 - 2 v12), v from the inverse
// information of the full fit. The Expected variant replaces the
// observed information with the expected one at the estimate and needs
// the designs.
TestOutcome wald_test(const FullFit& full_fit, double alpha,
                      WaldVariance variance = WaldVariance::Observed,
                      const TwoRegionDesign* designs = nullptr);

// 2 (l_full - l_null)
TestOutcome lr_test(const FullFit& full_fit, const NullFit& null_fit, double alpha);

// T_O = S^T J^{-1} S with the full 4x4 observed information at the null
// MLE; may be negative. Quadratic form via a pivoted linear solve.
TestOutcome score_test_observed(const TwoRegionData& data, const TwoRegionDesign& designs,
                                const NullFit& null_fit, double alpha,
                                Rule rule = Rule::Standard);

// Same form with the expected information, truth and evaluation point
// both plugged in at the fitted null.
TestOutcome score_test_expected(const TwoRegionData& data, const TwoRegionDesign& designs,
                                const NullFit& null_fit, double alpha);

}  // namespace occuscore

#endif
