#ifndef OCCUSCORE_ESTIMATION_HPP
#define OCCUSCORE_ESTIMATION_HPP

// Maximum-likelihood fitting for the full (4-parameter) and null
// (3-parameter) models. Newton iterations run on the logit scale so
// iterates stay interior; failures are reported through a status, not
// exceptions, mirroring how failed fits are filtered in the studies.

#include "occuscore/inference.hpp"
#include "occuscore/model.hpp"

namespace occuscore {

enum class FitStatus {
  Converged,
  NoConvergence,
  NonInvertibleInformation,
  BoundaryEstimate,
  DegenerateData,
};

const char* to_string(FitStatus status);

// Worst of two statuses (enum order is best-to-worst).
FitStatus combine(FitStatus a, FitStatus b);

struct RegionFit {
  RegionParams estimate{};
  double loglik = 0.0;
  la::Mat2 info{};  // observed information at the estimate
  FitStatus status = FitStatus::NoConvergence;
  int iterations = 0;
};

struct FullFit {
  ThetaFull estimate{};
  double loglik = 0.0;
  la::Mat4 info{};
  FitStatus status = FitStatus::NoConvergence;
  int iterations = 0;
};

struct NullFit {
  ThetaNull estimate{};
  double loglik = 0.0;
  la::Mat3 info{};  // M^T J M at the estimate
  FitStatus status = FitStatus::NoConvergence;
  int iterations = 0;
};

RegionFit fit_region(const RegionSummary& summary, const RegionDesign& design);

// Two independent region fits; the likelihood factorizes.
FullFit fit_full(const TwoRegionData& data, const TwoRegionDesign& designs);

// Constrained fit with psi shared across regions.
NullFit fit_null(const TwoRegionData& data, const TwoRegionDesign& designs);

}  // namespace occuscore

#endif
