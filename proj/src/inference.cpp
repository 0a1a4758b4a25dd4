#include "occuscore/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace occuscore {

namespace {

void require_interior(const RegionParams& params) {
  if (!(params.psi > 0.0 && params.psi < 1.0 && params.p > 0.0 && params.p < 1.0))
    throw std::domain_error("parameters must lie strictly inside (0,1)");
}

}  // namespace

void validate(const ThetaFull& theta) {
  require_interior(theta.region1());
  require_interior(theta.region2());
}

void validate(const ThetaNull& theta) {
  for (double v : theta.to_vec())
    if (!(v > 0.0 && v < 1.0))
      throw std::domain_error("ThetaNull components must lie in (0,1)");
}

la::Mat<4, 3> constraint_map() {
  la::Mat<4, 3> m;
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 0) = 1.0;
  m(3, 2) = 1.0;
  return m;
}

ThetaFull expand_null(const ThetaNull& t) { return {t.psi, t.p1, t.psi, t.p2}; }

double region_loglik(double s_d, double d, const RegionDesign& design,
                     const RegionParams& params) {
  require_interior(params);
  const int n = design.n_sites, k = design.n_visits;
  const double theta = theta_detect(params.p, k);
  const double occ = 1.0 - params.psi * theta;
  return s_d * std::log(params.psi) + d * std::log(params.p) +
         (k * s_d - d) * std::log(1.0 - params.p) + (n - s_d) * std::log(occ);
}

std::array<double, 2> region_score(double s_d, double d, const RegionDesign& design,
                                   const RegionParams& params) {
  require_interior(params);
  const int n = design.n_sites, k = design.n_visits;
  const double psi = params.psi, p = params.p, q = 1.0 - p;
  const double theta = theta_detect(p, k);
  const double occ = 1.0 - psi * theta;
  const double s1 = s_d / psi - (n - s_d) * theta / occ;
  const double s2 =
      d / p - (k * s_d - d) / q - (n - s_d) * psi * k * std::pow(q, k - 1) / occ;
  return {s1, s2};
}

la::Mat2 region_observed_info(double s_d, double d, const RegionDesign& design,
                              const RegionParams& params) {
  require_interior(params);
  const int n = design.n_sites, k = design.n_visits;
  const double psi = params.psi, p = params.p, q = 1.0 - p;
  const double theta = theta_detect(p, k);
  const double occ = 1.0 - psi * theta;
  const double occ2 = occ * occ;
  const double qk1 = std::pow(q, k - 1);

  la::Mat2 j;
  j(0, 0) = s_d / (psi * psi) + (n - s_d) * theta * theta / occ2;
  j(0, 1) = (n - s_d) * k * qk1 / occ2;
  j(1, 0) = j(0, 1);
  j(1, 1) = d / (p * p) + (k * s_d - d) / (q * q) +
            (n - s_d) * psi * k * (psi * k * qk1 * qk1 - (k - 1) * std::pow(q, k - 2) * occ) / occ2;
  return j;
}

double region_loglik(const RegionSummary& s, const RegionDesign& design,
                     const RegionParams& params) {
  validate(s, design);
  return region_loglik(static_cast<double>(s.s_d), static_cast<double>(s.d), design, params);
}

std::array<double, 2> region_score(const RegionSummary& s, const RegionDesign& design,
                                   const RegionParams& params) {
  validate(s, design);
  return region_score(static_cast<double>(s.s_d), static_cast<double>(s.d), design, params);
}

double total_loglik(const TwoRegionData& data, const TwoRegionDesign& designs,
                    const ThetaFull& theta) {
  return region_loglik(data.region1, designs.region1, theta.region1()) +
         region_loglik(data.region2, designs.region2, theta.region2());
}

la::Vec<4> full_score(const TwoRegionData& data, const TwoRegionDesign& designs,
                      const ThetaFull& theta) {
  const auto s1 = region_score(data.region1, designs.region1, theta.region1());
  const auto s2 = region_score(data.region2, designs.region2, theta.region2());
  return {s1[0], s1[1], s2[0], s2[1]};
}

la::Vec<3> null_score(const TwoRegionData& data, const TwoRegionDesign& designs,
                      const ThetaNull& theta_null) {
  const la::Vec<4> s = full_score(data, designs, expand_null(theta_null));
  return {s[0] + s[2], s[1], s[3]};
}

namespace {

la::Mat4 observed_info_fd(const TwoRegionData& data, const TwoRegionDesign& designs,
                          const ThetaFull& theta) {
  la::Vec<4> t = theta.to_vec();
  la::Mat4 j;
  for (int kk = 0; kk < 4; ++kk) {
    double h = 1e-5 * std::max(1.0, std::abs(t[kk]));
    while (t[kk] + h >= 1.0 || t[kk] - h <= 0.0) {
      h *= 0.5;
      if (h < 1e-10)
        throw std::domain_error("observed_info: finite-difference step underflow near boundary");
    }
    la::Vec<4> tp = t, tm = t;
    tp[kk] += h;
    tm[kk] -= h;
    const la::Vec<4> sp = full_score(data, designs, ThetaFull::from_vec(tp));
    const la::Vec<4> sm = full_score(data, designs, ThetaFull::from_vec(tm));
    for (int l = 0; l < 4; ++l) j(l, kk) = -(sp[l] - sm[l]) / (2.0 * h);
  }
  return la::symmetrize(j);
}

la::Mat4 assemble_block(const la::Mat2& a, const la::Mat2& b) {
  la::Mat4 j;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      j(i, k) = a(i, k);
      j(2 + i, 2 + k) = b(i, k);
    }
  return j;
}

}  // namespace

la::Mat4 observed_info(const TwoRegionData& data, const TwoRegionDesign& designs,
                       const ThetaFull& theta, InfoMethod method) {
  validate(theta);
  if (method == InfoMethod::FiniteDifference) return observed_info_fd(data, designs, theta);
  const la::Mat2 j1 = region_observed_info(data.region1.s_d, data.region1.d,
                                           designs.region1, theta.region1());
  const la::Mat2 j2 = region_observed_info(data.region2.s_d, data.region2.d,
                                           designs.region2, theta.region2());
  return assemble_block(j1, j2);
}

la::Mat3 null_observed_info(const TwoRegionData& data, const TwoRegionDesign& designs,
                            const ThetaNull& theta_null) {
  const la::Mat4 j = observed_info(data, designs, expand_null(theta_null));
  const la::Mat<4, 3> m = constraint_map();
  return la::transpose(m) * j * m;
}

la::Mat4 expected_info(const ThetaFull& theta_true, const ThetaFull& theta_eval,
                       const TwoRegionDesign& designs) {
  validate(theta_true);
  validate(theta_eval);
  auto region = [](const RegionDesign& design, const RegionParams& truth,
                   const RegionParams& eval) {
    const double theta_t = theta_detect(truth.p, design.n_visits);
    const double es = design.n_sites * truth.psi * theta_t;
    const double ed = design.n_visits * design.n_sites * truth.psi * truth.p;
    return region_observed_info(es, ed, design, eval);
  };
  return assemble_block(region(designs.region1, theta_true.region1(), theta_eval.region1()),
                        region(designs.region2, theta_true.region2(), theta_eval.region2()));
}

namespace {

struct RegionMoments {
  double mu1, mu2, s11, s22, s12;
};

RegionMoments region_moments(const RegionDesign& design, const RegionParams& truth,
                             const RegionParams& eval, CondVarVariant variant) {
  const double n = design.n_sites;
  const double k = design.n_visits;
  const double psi_t = truth.psi, p_t = truth.p;
  const double psi = eval.psi, p = eval.p, q = 1.0 - p;
  const double theta_t = theta_detect(p_t, design.n_visits);
  const double theta = theta_detect(p, design.n_visits);
  const double occ = 1.0 - psi * theta;

  const double es = n * psi_t * theta_t;                  // E(s_d)
  const double vs = n * psi_t * theta_t * (1.0 - psi_t * theta_t);  // Var(s_d)
  const double es2 = vs + es * es;                        // E(s_d^2)

  RegionMoments m;
  m.mu1 = n * (psi_t * theta_t - psi * theta) / (psi * occ);
  m.mu2 = n * psi_t * k * (p_t - p * theta_t) / (p * q) -
          n * (1.0 - psi_t * theta_t) * psi * k * (1.0 - theta) / (occ * q);

  m.s11 = vs / (psi * psi * occ * occ);

  const double p_var = variant == CondVarVariant::TruthRate ? p_t : p;
  const double cond_var_slope =  // Var(d | s_d) / s_d
      (k * k * p_t * p_t - k * p_t * p_t + k * p_var) / theta_t -
      k * k * p_t * p_t / (theta_t * theta_t);
  const double c = (k * p_t - k * p * theta_t) / (theta_t * p * q) +
                   psi * k * (1.0 - theta) / (occ * q);
  m.s22 = es * cond_var_slope / (p * p * q * q) + vs * c * c;

  const double e12 =
      (es2 - psi * theta * n * es) * (k * p_t / theta_t - k * p) / (psi * occ * p * q) -
      (n * (es - psi * theta * n) - es2 + psi * theta * n * es) * psi * k * (1.0 - theta) /
          (psi * occ * occ * q);
  m.s12 = e12 - m.mu1 * m.mu2;
  return m;
}

}  // namespace

MomentSet score_moments(const ThetaFull& theta_true, const ThetaNull& theta_eval,
                        const TwoRegionDesign& designs, CondVarVariant variant) {
  validate(theta_true);
  validate(theta_eval);
  const ThetaFull eval = expand_null(theta_eval);
  const RegionMoments m1 =
      region_moments(designs.region1, theta_true.region1(), eval.region1(), variant);
  const RegionMoments m2 =
      region_moments(designs.region2, theta_true.region2(), eval.region2(), variant);

  MomentSet out;
  out.mu = {m1.mu1, m1.mu2, m2.mu1, m2.mu2};
  out.sigma(0, 0) = m1.s11;
  out.sigma(0, 1) = out.sigma(1, 0) = m1.s12;
  out.sigma(1, 1) = m1.s22;
  out.sigma(2, 2) = m2.s11;
  out.sigma(2, 3) = out.sigma(3, 2) = m2.s12;
  out.sigma(3, 3) = m2.s22;
  return out;
}

double detections_variance(const RegionDesign& design, const RegionParams& truth,
                           CondVarVariant variant) {
  const double n = design.n_sites, k = design.n_visits;
  const double psi_t = truth.psi, p_t = truth.p;
  const double theta_t = theta_detect(p_t, design.n_visits);
  const double p_var = variant == CondVarVariant::TruthRate ? p_t : truth.p;
  const double cond = (k * k * p_t * p_t - k * p_t * p_t + k * p_var) / theta_t -
                      k * k * p_t * p_t / (theta_t * theta_t);
  const double slope = k * p_t / theta_t;  // E(d | s_d) / s_d
  return n * psi_t * theta_t * cond +
         n * psi_t * theta_t * (1.0 - psi_t * theta_t) * slope * slope;
}

}  // namespace occuscore
