#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "occuscore/asymptotics.hpp"
#include "occuscore/hypothesis.hpp"
#include "occuscore/rng.hpp"

using namespace occuscore;

namespace {

const TwoRegionDesign kDesigns{{50, 3}, {50, 3}};

// Expected constrained log-likelihood: linear in the sufficient
// statistics, so plug in their expectations under the truth.
double expected_null_loglik(const ThetaFull& truth, const ThetaNull& cand,
                            const TwoRegionDesign& designs) {
  const ThetaFull at = expand_null(cand);
  const RegionParams t1 = truth.region1(), t2 = truth.region2();
  const double es1 = designs.region1.n_sites * t1.psi * theta_detect(t1.p, designs.region1.n_visits);
  const double ed1 = designs.region1.n_visits * designs.region1.n_sites * t1.psi * t1.p;
  const double es2 = designs.region2.n_sites * t2.psi * theta_detect(t2.p, designs.region2.n_visits);
  const double ed2 = designs.region2.n_visits * designs.region2.n_sites * t2.psi * t2.p;
  return region_loglik(es1, ed1, designs.region1, at.region1()) +
         region_loglik(es2, ed2, designs.region2, at.region2());
}

// Independent maximizer over (psi, p1, p2): coarse grid plus zooming.
ThetaNull grid_pseudo_true(const ThetaFull& truth, const TwoRegionDesign& designs) {
  double lo[3] = {0.02, 0.02, 0.02}, hi[3] = {0.98, 0.98, 0.98};
  ThetaNull best{0.5, 0.5, 0.5};
  for (int level = 0; level < 5; ++level) {
    const int cells = 24;
    double best_val = -1e300;
    for (int i = 0; i <= cells; ++i)
      for (int j = 0; j <= cells; ++j)
        for (int k = 0; k <= cells; ++k) {
          const ThetaNull cand{lo[0] + (hi[0] - lo[0]) * i / cells,
                               lo[1] + (hi[1] - lo[1]) * j / cells,
                               lo[2] + (hi[2] - lo[2]) * k / cells};
          const double val = expected_null_loglik(truth, cand, designs);
          if (val > best_val) {
            best_val = val;
            best = cand;
          }
        }
    const la::Vec<3> c = best.to_vec();
    for (int d = 0; d < 3; ++d) {
      const double w = (hi[d] - lo[d]) / cells;
      lo[d] = std::max(1e-6, c[d] - 1.5 * w);
      hi[d] = std::min(1.0 - 1e-6, c[d] + 1.5 * w);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("pseudo-true parameters reduce to the truth under the null") {
  const ThetaNull tn{0.7, 0.45, 0.55};
  const PseudoTrue pt = solve_pseudo_true(expand_null(tn), kDesigns);
  REQUIRE(pt.converged);
  CHECK(pt.value.psi == doctest::Approx(tn.psi).epsilon(1e-8));
  CHECK(pt.value.p1 == doctest::Approx(tn.p1).epsilon(1e-8));
  CHECK(pt.value.p2 == doctest::Approx(tn.p2).epsilon(1e-8));
  CHECK(pt.residual < 1e-9);
}

TEST_CASE("pseudo-true point for the reference alternative") {
  // half the occupancy in region 2; the solution to three decimals is
  // (0.673, 0.532, 0.336)
  const ThetaFull truth{0.8, 0.5, 0.4, 0.5};
  const PseudoTrue pt = solve_pseudo_true(truth, kDesigns);
  REQUIRE(pt.converged);
  CHECK(std::abs(pt.value.psi - 0.673) < 1e-3);
  CHECK(std::abs(pt.value.p1 - 0.532) < 1e-3);
  CHECK(std::abs(pt.value.p2 - 0.336) < 1e-3);

  // the expected null score really vanishes there
  const MomentSet mom = score_moments(truth, pt.value, kDesigns);
  const la::Mat<4, 3> m = constraint_map();
  for (int k = 0; k < 3; ++k) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i) v += m(i, k) * mom.mu[i];
    CHECK(std::abs(v) < 1e-8);
  }
}

TEST_CASE("pseudo-true solver agrees with a grid maximizer") {
  for (double r : {0.2, 0.4, 0.6}) {
    const AlternativeFamily family;
    const ThetaFull truth = family.truth_at(r);
    const PseudoTrue pt = solve_pseudo_true(truth, kDesigns);
    REQUIRE(pt.converged);
    const ThetaNull ref = grid_pseudo_true(truth, kDesigns);
    CHECK(std::abs(pt.value.psi - ref.psi) < 2e-4);
    CHECK(std::abs(pt.value.p1 - ref.p1) < 2e-4);
    CHECK(std::abs(pt.value.p2 - ref.p2) < 2e-4);
  }
}

TEST_CASE("expected information loses positive definiteness past R ~ 0.5") {
  const AlternativeFamily family;
  const auto curve = expected_info_eigen_curve(family, {0.0, 0.2, 0.4, 0.6, 0.8});
  REQUIRE(curve.size() == 5);
  for (const auto& rep : curve) REQUIRE(rep.eigenvalues.size() == 4);
  CHECK(curve[0].eigenvalues.back() > 0.0);   // R = 0
  CHECK(curve[1].eigenvalues.back() > 0.0);   // R = 0.2
  CHECK(curve[2].eigenvalues.back() > 0.0);   // R = 0.4
  CHECK(curve[3].eigenvalues.back() < 0.0);   // R = 0.6
  CHECK(curve[4].eigenvalues.back() < 0.0);   // R = 0.8

  const double crossing = smallest_eigenvalue_crossing(family, 0.4, 0.6);
  CHECK(crossing > 0.45);
  CHECK(crossing < 0.55);
}

TEST_CASE("projected matrix is rank one with unit trace under the null") {
  const ThetaNull tn{0.8, 0.5, 0.5};
  const ThetaFull t = expand_null(tn);
  const la::Mat4 j = expected_info(t, t, kDesigns);
  const MomentSet mom = score_moments(t, tn, kDesigns);

  const SpectralReport rep = projected_spectrum(j, mom.sigma);
  REQUIRE(rep.eigenvalues.size() == 4);
  CHECK(rep.leading() == doctest::Approx(1.0).epsilon(1e-8));
  double trace = 0.0;
  for (double v : rep.eigenvalues) trace += v;
  CHECK(trace == doctest::Approx(1.0).epsilon(1e-8));
  // rank one: the rest are numerically zero
  std::vector<double> mags;
  for (double v : rep.eigenvalues) mags.push_back(std::abs(v));
  std::sort(mags.begin(), mags.end());
  CHECK(mags[2] < 1e-8);
}

TEST_CASE("projected spectrum stays rank one across the alternative grid") {
  const AlternativeFamily family;
  for (double r : {0.1, 0.3, 0.45, 0.55, 0.7, 0.9}) {
    const ThetaFull truth = family.truth_at(r);
    const PseudoTrue pt = solve_pseudo_true(truth, kDesigns);
    REQUIRE(pt.converged);
    const ThetaFull at = expand_null(pt.value);
    const la::Mat4 j = expected_info(truth, at, kDesigns);
    const MomentSet mom = score_moments(truth, pt.value, kDesigns);
    const SpectralReport rep = projected_spectrum(j, mom.sigma);

    std::vector<double> mags;
    for (double v : rep.eigenvalues) mags.push_back(std::abs(v));
    std::sort(mags.begin(), mags.end());
    CHECK(mags[2] < 1e-7 * std::max(1.0, mags[3]));

    // similarity invariant: the leading eigenvalue equals tr(B Sigma)
    const auto jinv = la::inverse<4>(j);
    REQUIRE(jinv.has_value());
    const la::Mat<4, 3> m = constraint_map();
    la::Mat3 mtm;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double acc = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int k = 0; k < 4; ++k) acc += m(i, a) * j(i, k) * m(k, b);
        mtm(a, b) = acc;
      }
    const auto mtm_inv = la::inverse<3>(mtm);
    REQUIRE(mtm_inv.has_value());
    la::Mat4 b_mat = *jinv;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        double acc = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) acc += m(i, a) * (*mtm_inv)(a, c) * m(k, c);
        b_mat(i, k) -= acc;
      }
    double trace_bs = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) trace_bs += b_mat(i, k) * mom.sigma(k, i);
    CHECK(rep.leading() == doctest::Approx(trace_bs).epsilon(1e-7));
  }
}

TEST_CASE("score decomposition sampler reproduces chi-square(1) under the null") {
  const ThetaNull tn{0.8, 0.5, 0.5};
  const ThetaFull t = expand_null(tn);
  const la::Mat4 j = expected_info(t, t, kDesigns);
  const MomentSet mom = score_moments(t, tn, kDesigns);
  const ScoreDecomposition dec = score_decomposition(j, mom.sigma, mom.mu);

  for (double v : dec.b) CHECK(std::abs(v) < 1e-7);
  double lambda_sum = 0.0;
  for (double v : dec.lambda) lambda_sum += v;
  CHECK(lambda_sum == doctest::Approx(1.0).epsilon(1e-8));

  RandomStream stream = derive_stream(61, 0, 0);
  const int n = 20000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = dec.sample(stream);
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 1.0 - chi2_1_sf(std::max(draws[i], 0.0));
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.015);
}

TEST_CASE("score decomposition sampler matches its analytic mean off the null") {
  const AlternativeFamily family;
  const ThetaFull truth = family.truth_at(0.6);
  const PseudoTrue pt = solve_pseudo_true(truth, kDesigns);
  REQUIRE(pt.converged);
  const la::Mat4 j = expected_info(truth, expand_null(pt.value), kDesigns);
  const MomentSet mom = score_moments(truth, pt.value, kDesigns);
  const ScoreDecomposition dec = score_decomposition(j, mom.sigma, mom.mu);

  double mean_true = 0.0;
  for (int k = 0; k < 4; ++k) mean_true += dec.lambda[k] * (dec.b[k] * dec.b[k] + 1.0);

  RandomStream stream = derive_stream(62, 0, 0);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = dec.sample(stream);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - mean_true) < 4.0 * se);
}
