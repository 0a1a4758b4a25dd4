#ifndef OCCUSCORE_ASYMPTOTICS_HPP
#define OCCUSCORE_ASYMPTOTICS_HPP

// Large-sample machinery: pseudo-true null parameters, eigenvalue
// curves of the expected information, the projected matrix
// (J^{-1} - M (M^T J M)^{-1} M^T) Sigma, and the spectral decomposition
// of the score statistic as sum_j lambda_j (b_j + U_j)^2.

#include <vector>

#include "occuscore/inference.hpp"
#include "occuscore/rng.hpp"

namespace occuscore {

struct PseudoTrue {
  ThetaNull value{};    // theta'_S
  double residual = 0.0;  // max-norm of the expected null score at the solution
  int iterations = 0;
  bool converged = false;
};

// Solve E_{theta_true}[S0(theta')] = M^T mu(theta_true, theta') = 0 by
// Newton on the logit scale.
PseudoTrue solve_pseudo_true(const ThetaFull& theta_true, const TwoRegionDesign& designs);

enum class MatrixKind { ExpectedInfo, ObservedInfo, ProjectedTimesSigma };

struct SpectralReport {
  std::vector<double> eigenvalues;  // descending
  MatrixKind kind = MatrixKind::ExpectedInfo;
  double effect_size = 0.0;

  // eigenvalue of largest magnitude (the only nonzero one for the
  // rank-1 projected matrix)
  double leading() const;
};

struct AlternativeFamily {
  double psi1 = 0.8;
  double p1 = 0.5;
  double p2 = 0.5;
  TwoRegionDesign designs{{50, 3}, {50, 3}};

  // truth with psi2 = (1 - R) psi1
  ThetaFull truth_at(double r) const { return {psi1, p1, (1.0 - r) * psi1, p2}; }
};

// Eigenvalues of E_{theta_T}[J(M theta'_S)] along an effect-size grid.
std::vector<SpectralReport> expected_info_eigen_curve(const AlternativeFamily& family,
                                                      const std::vector<double>& r_grid);

// Spectrum of B Sigma with B = J^{-1} - M (M^T J M)^{-1} M^T, computed
// through the similar symmetric matrix Sigma^{1/2} B Sigma^{1/2}.
SpectralReport projected_spectrum(const la::Mat4& info, const la::Mat4& sigma);

// Locate the zero crossing of the smallest expected-information
// eigenvalue between r_lo and r_hi, to 1e-4 in R.
double smallest_eigenvalue_crossing(const AlternativeFamily& family, double r_lo, double r_hi);

struct ScoreDecomposition {
  la::Vec<4> lambda{};  // diagonal of Lambda
  la::Vec<4> b{};       // P^T Sigma^{-1/2} mu

  // one draw of sum_j lambda_j (b_j + U_j)^2 with U ~ N(0, I)
  double sample(RandomStream& stream) const;
};

ScoreDecomposition score_decomposition(const la::Mat4& info, const la::Mat4& sigma,
                                       const la::Vec<4>& mu);

}  // namespace occuscore

#endif
