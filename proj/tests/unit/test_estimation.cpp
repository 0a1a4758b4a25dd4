#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "occuscore/estimation.hpp"
#include "occuscore/rng.hpp"

using namespace occuscore;

namespace {

const RegionDesign kDesign{50, 3};
const TwoRegionDesign kDesigns{{50, 3}, {50, 3}};

// Independent maximizer: coarse 2-d grid over (psi, p), then repeated
// 10x zoom around the best cell down to ~1e-5 resolution.
RegionParams grid_maximize(const RegionSummary& s, const RegionDesign& design) {
  double lo_psi = 1e-4, hi_psi = 1.0 - 1e-4;
  double lo_p = 1e-4, hi_p = 1.0 - 1e-4;
  RegionParams best{0.5, 0.5};
  for (int level = 0; level < 4; ++level) {
    double best_ll = -1e300;
    const int cells = 40;
    for (int i = 0; i <= cells; ++i)
      for (int j = 0; j <= cells; ++j) {
        const RegionParams cand{lo_psi + (hi_psi - lo_psi) * i / cells,
                                lo_p + (hi_p - lo_p) * j / cells};
        const double ll = region_loglik(s, design, cand);
        if (ll > best_ll) {
          best_ll = ll;
          best = cand;
        }
      }
    const double w_psi = (hi_psi - lo_psi) / cells, w_p = (hi_p - lo_p) / cells;
    lo_psi = std::max(1e-6, best.psi - 1.5 * w_psi);
    hi_psi = std::min(1.0 - 1e-6, best.psi + 1.5 * w_psi);
    lo_p = std::max(1e-6, best.p - 1.5 * w_p);
    hi_p = std::min(1.0 - 1e-6, best.p + 1.5 * w_p);
  }
  return best;
}

}  // namespace

TEST_CASE("degenerate and boundary data are classified without fitting") {
  CHECK(fit_region({0, 0}, kDesign).status == FitStatus::DegenerateData);
  CHECK(fit_region({50, 75}, kDesign).status == FitStatus::BoundaryEstimate);
  CHECK(fit_region({20, 60}, kDesign).status == FitStatus::BoundaryEstimate);  // d = K s_d

  // the two-region fits inherit the worst region status
  CHECK(fit_full({{0, 0}, {30, 45}}, kDesigns).status == FitStatus::DegenerateData);
  CHECK(fit_full({{30, 45}, {50, 80}}, kDesigns).status == FitStatus::BoundaryEstimate);
  CHECK(fit_null({{0, 0}, {30, 45}}, kDesigns).status == FitStatus::DegenerateData);
  CHECK(fit_null({{30, 45}, {50, 80}}, kDesigns).status == FitStatus::BoundaryEstimate);
}

TEST_CASE("fitting noiseless expected data recovers the truth") {
  // E(s_d) = 35, E(d) = 60 at psi = 0.8, p = 0.5 are both integers
  const RegionFit fit = fit_region({35, 60}, kDesign);
  REQUIRE(fit.status == FitStatus::Converged);
  CHECK(fit.estimate.psi == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(fit.estimate.p == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("region fit agrees with an independent grid search") {
  RandomStream stream = derive_stream(41, 0, 0);
  int fitted = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const RegionParams truth{0.2 + 0.7 * stream.uniform(), 0.15 + 0.7 * stream.uniform()};
    const RegionSummary s = simulate_region(kDesign, truth, stream);
    const RegionFit fit = fit_region(s, kDesign);
    if (fit.status != FitStatus::Converged) continue;
    ++fitted;
    const RegionParams ref = grid_maximize(s, kDesign);
    const double ll_fit = region_loglik(s, kDesign, fit.estimate);
    const double ll_ref = region_loglik(s, kDesign, ref);
    // the zoomed grid search must never beat Newton, and no local
    // perturbation of the estimate may improve the likelihood
    CHECK(ll_fit >= ll_ref - 1e-9);
    for (double dpsi : {-1e-4, 0.0, 1e-4})
      for (double dp : {-1e-4, 0.0, 1e-4}) {
        const RegionParams nudged{std::clamp(fit.estimate.psi + dpsi, 1e-9, 1.0 - 1e-9),
                                  std::clamp(fit.estimate.p + dp, 1e-9, 1.0 - 1e-9)};
        CHECK(region_loglik(s, kDesign, nudged) <= ll_fit + 1e-9);
      }
    // first-order condition
    const auto g = region_score(s, kDesign, fit.estimate);
    CHECK(std::abs(g[0]) < 1e-6 * kDesign.n_sites);
    CHECK(std::abs(g[1]) < 1e-6 * kDesign.n_sites);
  }
  CHECK(fitted > 800);  // most draws in this range are interior
}

TEST_CASE("null fit satisfies the constrained stationarity conditions") {
  RandomStream stream = derive_stream(42, 0, 0);
  int fitted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const RegionParams t1{0.3 + 0.5 * stream.uniform(), 0.2 + 0.6 * stream.uniform()};
    const RegionParams t2{0.3 + 0.5 * stream.uniform(), 0.2 + 0.6 * stream.uniform()};
    TwoRegionData data{simulate_region(kDesigns.region1, t1, stream),
                       simulate_region(kDesigns.region2, t2, stream)};
    const NullFit fit = fit_null(data, kDesigns);
    if (fit.status != FitStatus::Converged) continue;
    ++fitted;
    const auto g = null_score(data, kDesigns, fit.estimate);
    for (double v : g) CHECK(std::abs(v) < 1e-6 * (kDesigns.region1.n_sites + kDesigns.region2.n_sites));

    // nestedness: the null optimum never exceeds the full one
    const FullFit full = fit_full(data, kDesigns);
    if (full.status == FitStatus::Converged)
      CHECK(fit.loglik <= full.loglik + 1e-7);
  }
  CHECK(fitted > 350);
}

TEST_CASE("null fit beats a multistart of constrained restarts") {
  RandomStream stream = derive_stream(43, 0, 0);
  int fitted = 0, matched = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const RegionParams t{0.3 + 0.5 * stream.uniform(), 0.2 + 0.6 * stream.uniform()};
    TwoRegionData data{simulate_region(kDesigns.region1, t, stream),
                       simulate_region(kDesigns.region2, t, stream)};
    const NullFit fit = fit_null(data, kDesigns);
    if (fit.status != FitStatus::Converged) continue;
    ++fitted;

    // dense random restarts scored by the constrained likelihood
    double best = -1e300;
    for (int r = 0; r < 400; ++r) {
      const ThetaNull cand{0.02 + 0.96 * stream.uniform(), 0.02 + 0.96 * stream.uniform(),
                           0.02 + 0.96 * stream.uniform()};
      best = std::max(best, total_loglik(data, kDesigns, expand_null(cand)));
    }
    if (fit.loglik >= best - 1e-9) ++matched;
  }
  CHECK(fitted > 140);
  CHECK(matched == fitted);
}

TEST_CASE("full fit is a stationary point of the joint likelihood") {
  RandomStream stream = derive_stream(44, 0, 0);
  int fitted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const RegionParams t1{0.3 + 0.5 * stream.uniform(), 0.2 + 0.6 * stream.uniform()};
    const RegionParams t2{0.3 + 0.5 * stream.uniform(), 0.2 + 0.6 * stream.uniform()};
    TwoRegionData data{simulate_region(kDesigns.region1, t1, stream),
                       simulate_region(kDesigns.region2, t2, stream)};
    const FullFit fit = fit_full(data, kDesigns);
    if (fit.status != FitStatus::Converged) continue;
    ++fitted;
    const double h = 1e-6;
    la::Vec<4> v = fit.estimate.to_vec();
    for (int k = 0; k < 4; ++k) {
      la::Vec<4> up = v, dn = v;
      up[k] += h;
      dn[k] -= h;
      const double fd = (total_loglik(data, kDesigns, ThetaFull::from_vec(up)) -
                         total_loglik(data, kDesigns, ThetaFull::from_vec(dn))) /
                        (2 * h);
      CHECK(std::abs(fd) < 1e-4 * (kDesigns.region1.n_sites + kDesigns.region2.n_sites));
    }
    // the stored information matches the analytic observed information
    const la::Mat4 j = observed_info(data, kDesigns, fit.estimate);
    CHECK(la::frobenius_norm(j - fit.info) < 1e-10 * std::max(1.0, la::frobenius_norm(j)));
  }
  CHECK(fitted > 350);
}

TEST_CASE("status strings and combination order") {
  CHECK(std::string(to_string(FitStatus::Converged)) == "Converged");
  CHECK(combine(FitStatus::Converged, FitStatus::BoundaryEstimate) ==
        FitStatus::BoundaryEstimate);
  CHECK(combine(FitStatus::DegenerateData, FitStatus::NoConvergence) ==
        FitStatus::DegenerateData);
}
