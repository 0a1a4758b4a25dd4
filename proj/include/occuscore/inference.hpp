#ifndef OCCUSCORE_INFERENCE_HPP
#define OCCUSCORE_INFERENCE_HPP

// Analytic log-likelihood, score, observed and expected information,
// and the score-moment formulas for the two-sample model.
//
// Sign convention: the information matrix J is the negative Hessian of
// the log-likelihood, so under the null hypothesis at the MLE it is
// positive definite with probability tending to one. Off the null it
// may be indefinite; that indefiniteness is the whole point here.

#include <array>

#include "occuscore/linalg.hpp"
#include "occuscore/model.hpp"

namespace occuscore {

// Unconstrained parameter vector, order fixed as (psi1, p1, psi2, p2).
struct ThetaFull {
  double psi1 = 0.0, p1 = 0.0, psi2 = 0.0, p2 = 0.0;

  la::Vec<4> to_vec() const { return {psi1, p1, psi2, p2}; }
  static ThetaFull from_vec(const la::Vec<4>& v) { return {v[0], v[1], v[2], v[3]}; }
  RegionParams region1() const { return {psi1, p1}; }
  RegionParams region2() const { return {psi2, p2}; }
};

// Null-constrained vector (psi, p1, p2) with psi1 = psi2 = psi.
struct ThetaNull {
  double psi = 0.0, p1 = 0.0, p2 = 0.0;

  la::Vec<3> to_vec() const { return {psi, p1, p2}; }
  static ThetaNull from_vec(const la::Vec<3>& v) { return {v[0], v[1], v[2]}; }
};

void validate(const ThetaFull& theta);
void validate(const ThetaNull& theta);

// The 4x3 constraint map M with M * (psi, p1, p2) = (psi, p1, psi, p2).
la::Mat<4, 3> constraint_map();

// M * theta', spelled out.
ThetaFull expand_null(const ThetaNull& theta_null);

// Region log-likelihood and score take real-valued sufficient
// statistics; the expected-information path plugs in expectations.
double region_loglik(double s_d, double d, const RegionDesign& design,
                     const RegionParams& params);
std::array<double, 2> region_score(double s_d, double d, const RegionDesign& design,
                                   const RegionParams& params);
la::Mat2 region_observed_info(double s_d, double d, const RegionDesign& design,
                              const RegionParams& params);

double region_loglik(const RegionSummary& s, const RegionDesign& design,
                     const RegionParams& params);
std::array<double, 2> region_score(const RegionSummary& s, const RegionDesign& design,
                                   const RegionParams& params);

double total_loglik(const TwoRegionData& data, const TwoRegionDesign& designs,
                    const ThetaFull& theta);

// S(theta) = (S11, S12, S21, S22)
la::Vec<4> full_score(const TwoRegionData& data, const TwoRegionDesign& designs,
                      const ThetaFull& theta);

// S0(theta') = M^T S(M theta')
la::Vec<3> null_score(const TwoRegionData& data, const TwoRegionDesign& designs,
                      const ThetaNull& theta_null);

enum class InfoMethod { Analytic, FiniteDifference };

// Observed information, 4x4, block diagonal over regions. The finite
// difference path differentiates full_score centrally and symmetrizes.
la::Mat4 observed_info(const TwoRegionData& data, const TwoRegionDesign& designs,
                       const ThetaFull& theta, InfoMethod method = InfoMethod::Analytic);

// M^T J M at M * theta_null.
la::Mat3 null_observed_info(const TwoRegionData& data, const TwoRegionDesign& designs,
                            const ThetaNull& theta_null);

// E_{theta_true}[J(theta_eval)]. The log-likelihood is linear in
// (s_d, d), so this is the analytic information at the expected data
// E(s_d) = N psi_T theta_T and E(d) = K N psi_T p_T. Exact, no
// simulation.
la::Mat4 expected_info(const ThetaFull& theta_true, const ThetaFull& theta_eval,
                       const TwoRegionDesign& designs);

// Which detection probability enters the K*p term of Var(d | s_d).
// TruthRate uses p_T throughout (the conditional distribution of d
// depends on the truth only); MixedLiteral keeps an evaluation-point p
// in that one term for comparison.
enum class CondVarVariant { TruthRate, MixedLiteral };

struct MomentSet {
  la::Vec<4> mu;    // E_{theta_true}[S(M theta_eval)]
  la::Mat4 sigma;   // Cov_{theta_true}[S(M theta_eval)], block diagonal
};

MomentSet score_moments(const ThetaFull& theta_true, const ThetaNull& theta_eval,
                        const TwoRegionDesign& designs,
                        CondVarVariant variant = CondVarVariant::TruthRate);

// Var(d) under (psi_T, p_T); exposed for the simulation cross-checks.
double detections_variance(const RegionDesign& design, const RegionParams& truth,
                           CondVarVariant variant = CondVarVariant::TruthRate);

}  // namespace occuscore

#endif
