#ifndef OCCUSCORE_MODEL_HPP
#define OCCUSCORE_MODEL_HPP

// Two-sample occupancy data model. Detection counts at occupied sites
// are Binomial(K, p); unoccupied sites contribute structural zeros, so
// per-site counts follow a zero-inflated binomial. The likelihood only
// depends on the sufficient statistics (s_d, d), and simulation works
// at that level directly.

#include <cstdint>

#include "occuscore/rng.hpp"

namespace occuscore {

struct RegionDesign {
  int n_sites = 0;   // N
  int n_visits = 0;  // K
};

struct RegionParams {
  double psi = 0.0;  // occupancy probability
  double p = 0.0;    // per-visit detection probability
};

struct RegionSummary {
  int s_d = 0;  // sites with at least one detection
  int d = 0;    // total detections
};

void validate(const RegionDesign& design);
void validate(const RegionParams& params);
void validate(const RegionSummary& summary, const RegionDesign& design);

// Probability of at least one detection in K visits: 1 - (1-p)^K.
double theta_detect(double p, int n_visits);

// Zero-inflated binomial pmf, y in [0, K]. psi and p may sit on the
// closed interval here (psi=1 recovers the plain binomial).
double zib_pmf(int y, const RegionParams& params, int n_visits);

// Draw (s_d, d) for one region: s_d ~ Binomial(N, psi*theta), then d as
// a sum of s_d zero-truncated Binomial(K, p) counts.
RegionSummary simulate_region(const RegionDesign& design, const RegionParams& params,
                              RandomStream& stream);

struct TwoRegionDesign {
  RegionDesign region1;
  RegionDesign region2;
};

struct TwoRegionData {
  RegionSummary region1;
  RegionSummary region2;
};

}  // namespace occuscore

#endif
