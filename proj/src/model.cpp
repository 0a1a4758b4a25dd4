#include "occuscore/model.hpp"

#include <cmath>
#include <stdexcept>

namespace occuscore {

void validate(const RegionDesign& design) {
  if (design.n_sites < 1 || design.n_visits < 1)
    throw std::invalid_argument("RegionDesign: need n_sites >= 1 and n_visits >= 1");
}

void validate(const RegionParams& params) {
  if (!(params.psi > 0.0 && params.psi < 1.0))
    throw std::invalid_argument("RegionParams: psi must lie in (0,1)");
  if (!(params.p > 0.0 && params.p < 1.0))
    throw std::invalid_argument("RegionParams: p must lie in (0,1)");
}

void validate(const RegionSummary& summary, const RegionDesign& design) {
  validate(design);
  if (summary.s_d < 0 || summary.s_d > design.n_sites)
    throw std::invalid_argument("RegionSummary: s_d out of [0, n_sites]");
  if (summary.s_d == 0) {
    if (summary.d != 0) throw std::invalid_argument("RegionSummary: d must be 0 when s_d is 0");
    return;
  }
  if (summary.d < summary.s_d || summary.d > summary.s_d * design.n_visits)
    throw std::invalid_argument("RegionSummary: d out of [s_d, s_d*n_visits]");
}

double theta_detect(double p, int n_visits) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("theta_detect: p must lie in [0,1]");
  if (n_visits < 1) throw std::domain_error("theta_detect: n_visits must be >= 1");
  return 1.0 - std::pow(1.0 - p, n_visits);
}

double zib_pmf(int y, const RegionParams& params, int n_visits) {
  if (n_visits < 1) throw std::domain_error("zib_pmf: n_visits must be >= 1");
  if (y < 0 || y > n_visits) throw std::domain_error("zib_pmf: y out of [0, n_visits]");
  if (!(params.psi >= 0.0 && params.psi <= 1.0) || !(params.p >= 0.0 && params.p <= 1.0))
    throw std::domain_error("zib_pmf: parameters out of [0,1]");
  const double q = 1.0 - params.p;
  if (y == 0) return 1.0 - params.psi + params.psi * std::pow(q, n_visits);
  double binom = 1.0;  // C(K, y) p^y q^(K-y), built iteratively (K is small)
  for (int i = 0; i < y; ++i)
    binom *= params.p * static_cast<double>(n_visits - i) / static_cast<double>(i + 1);
  for (int i = 0; i < n_visits - y; ++i) binom *= q;
  return params.psi * binom;
}

RegionSummary simulate_region(const RegionDesign& design, const RegionParams& params,
                              RandomStream& stream) {
  validate(design);
  validate(params);
  const double theta = theta_detect(params.p, design.n_visits);
  RegionSummary out;
  out.s_d = stream.binomial(design.n_sites, params.psi * theta);
  for (int i = 0; i < out.s_d; ++i)
    out.d += stream.zero_truncated_binomial(design.n_visits, params.p);
  return out;
}

}  // namespace occuscore
