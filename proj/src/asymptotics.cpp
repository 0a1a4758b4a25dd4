#include "occuscore/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace occuscore {

namespace {

double logit(double x) { return std::log(x / (1.0 - x)); }
double inv_logit(double u) {
  // clamp away from the closed boundary: the raw transform rounds to
  // 0/1 for large |u| and downstream validation requires (0,1)
  return std::min(1.0 - 1e-12, std::max(1e-12, 1.0 / (1.0 + std::exp(-u))));
}

}  // namespace

// The pseudo-true point maximizes the expected null log-likelihood, so
// rather than root-finding on the expected score we run a monotone
// logit-Newton ascent; the log-likelihood is linear in the sufficient
// statistics, so plugging in their expectations is exact.
PseudoTrue solve_pseudo_true(const ThetaFull& theta_true, const TwoRegionDesign& designs) {
  validate(theta_true);
  PseudoTrue out;

  const RegionParams t1 = theta_true.region1(), t2 = theta_true.region2();
  const double es1 =
      designs.region1.n_sites * t1.psi * theta_detect(t1.p, designs.region1.n_visits);
  const double ed1 = designs.region1.n_visits * designs.region1.n_sites * t1.psi * t1.p;
  const double es2 =
      designs.region2.n_sites * t2.psi * theta_detect(t2.p, designs.region2.n_visits);
  const double ed2 = designs.region2.n_visits * designs.region2.n_sites * t2.psi * t2.p;

  auto eval_at = [](const la::Vec<3>& uu) {
    return ThetaNull{inv_logit(uu[0]), inv_logit(uu[1]), inv_logit(uu[2])};
  };
  auto ell = [&](const ThetaNull& e) {
    return region_loglik(es1, ed1, designs.region1, {e.psi, e.p1}) +
           region_loglik(es2, ed2, designs.region2, {e.psi, e.p2});
  };
  auto escore = [&](const ThetaNull& e) {
    const auto s1 = region_score(es1, ed1, designs.region1, {e.psi, e.p1});
    const auto s2 = region_score(es2, ed2, designs.region2, {e.psi, e.p2});
    return la::Vec<3>{s1[0] + s2[0], s1[1], s2[1]};
  };
  auto einfo = [&](const ThetaNull& e) {
    const la::Mat2 j1 = region_observed_info(es1, ed1, designs.region1, {e.psi, e.p1});
    const la::Mat2 j2 = region_observed_info(es2, ed2, designs.region2, {e.psi, e.p2});
    la::Mat3 j;
    j(0, 0) = j1(0, 0) + j2(0, 0);
    j(0, 1) = j(1, 0) = j1(0, 1);
    j(0, 2) = j(2, 0) = j2(0, 1);
    j(1, 1) = j1(1, 1);
    j(2, 2) = j2(1, 1);
    return j;
  };

  la::Vec<3> u = {logit(0.5 * (theta_true.psi1 + theta_true.psi2)), logit(theta_true.p1),
                  logit(theta_true.p2)};
  ThetaNull e = eval_at(u);
  double ll = ell(e);
  la::Vec<3> g = escore(e);

  for (int iter = 1; iter <= 1000; ++iter) {
    out.iterations = iter;
    if (la::max_abs(g) < 1e-10) {
      out.converged = true;
      break;
    }

    const la::Vec<3> theta = e.to_vec();
    la::Vec<3> w, gu;
    for (int i = 0; i < 3; ++i) {
      w[i] = theta[i] * (1.0 - theta[i]);
      gu[i] = g[i] * w[i];
    }
    const la::Mat3 j = einfo(e);
    la::Mat3 h;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) h(i, k) = w[i] * j(i, k) * w[k];
    for (int i = 0; i < 3; ++i) h(i, i) -= g[i] * w[i] * (1.0 - 2.0 * theta[i]);

    // Newton step with an escalating ridge when the expected null
    // information is indefinite along the path
    la::Vec<3> step = gu;
    double ridge = 0.0;
    double diag_scale = 1.0;
    for (int i = 0; i < 3; ++i) diag_scale = std::max(diag_scale, std::abs(h(i, i)));
    for (int attempt = 0; attempt < 40; ++attempt) {
      la::Mat3 hr = h;
      for (int i = 0; i < 3; ++i) hr(i, i) += ridge;
      const auto cand_step = la::solve<3>(hr, gu);
      if (cand_step && la::dot(*cand_step, gu) > 0.0) {
        step = *cand_step;
        break;
      }
      ridge = ridge == 0.0 ? 1e-8 * diag_scale : 10.0 * ridge;
    }

    double t = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      la::Vec<3> trial = u;
      for (int i = 0; i < 3; ++i) trial[i] += t * step[i];
      const ThetaNull cand = eval_at(trial);
      const double ll_trial = ell(cand);
      if (std::isfinite(ll_trial) && ll_trial >= ll - 1e-12 * (1.0 + std::abs(ll))) {
        u = trial;
        e = cand;
        ll = ll_trial;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
    g = escore(e);
  }

  if (!out.converged && la::max_abs(g) < 1e-10) out.converged = true;
  out.value = e;
  out.residual = la::max_abs(g);
  return out;
}

double SpectralReport::leading() const {
  double lead = 0.0;
  for (double v : eigenvalues)
    if (std::abs(v) > std::abs(lead)) lead = v;
  return lead;
}

std::vector<SpectralReport> expected_info_eigen_curve(const AlternativeFamily& family,
                                                      const std::vector<double>& r_grid) {
  std::vector<SpectralReport> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    if (!(r >= 0.0 && r < 1.0))
      throw std::domain_error("expected_info_eigen_curve: R must lie in [0,1)");
    const ThetaFull truth = family.truth_at(r);
    const PseudoTrue pt = solve_pseudo_true(truth, family.designs);
    if (!pt.converged)
      throw std::runtime_error("expected_info_eigen_curve: pseudo-true solve failed");
    const la::Mat4 info = expected_info(truth, expand_null(pt.value), family.designs);
    const la::EigenSym<4> eig = la::sym_eigen(info);
    SpectralReport rep;
    rep.eigenvalues.assign(eig.values.begin(), eig.values.end());
    rep.kind = MatrixKind::ExpectedInfo;
    rep.effect_size = r;
    out.push_back(std::move(rep));
  }
  return out;
}

namespace {

la::Mat4 projected_matrix(const la::Mat4& info) {
  const auto j_inv = la::inverse<4>(info);
  if (!j_inv) throw std::domain_error("projected_spectrum: information matrix is singular");
  const la::Mat<4, 3> m = constraint_map();
  const la::Mat3 mjm = la::transpose(m) * info * m;
  const auto mjm_inv = la::inverse<3>(mjm);
  if (!mjm_inv) throw std::domain_error("projected_spectrum: M^T J M is singular");
  return *j_inv - m * *mjm_inv * la::transpose(m);
}

}  // namespace

SpectralReport projected_spectrum(const la::Mat4& info, const la::Mat4& sigma) {
  const la::Mat4 b = projected_matrix(info);
  const la::Mat4 sig_half = la::sym_sqrt_and_inv(la::symmetrize(sigma)).sqrt;
  const la::Mat4 congruence = la::symmetrize(sig_half * b * sig_half);
  const la::EigenSym<4> eig = la::sym_eigen(congruence);
  SpectralReport rep;
  rep.eigenvalues.assign(eig.values.begin(), eig.values.end());
  rep.kind = MatrixKind::ProjectedTimesSigma;
  return rep;
}

double smallest_eigenvalue_crossing(const AlternativeFamily& family, double r_lo, double r_hi) {
  auto smallest = [&family](double r) {
    const auto reports = expected_info_eigen_curve(family, {r});
    return reports[0].eigenvalues.back();
  };
  double f_lo = smallest(r_lo), f_hi = smallest(r_hi);
  if (f_lo * f_hi > 0.0)
    throw std::domain_error("smallest_eigenvalue_crossing: no sign change in bracket");
  while (r_hi - r_lo > 1e-4) {
    const double mid = 0.5 * (r_lo + r_hi);
    const double f_mid = smallest(mid);
    if (f_lo * f_mid <= 0.0) {
      r_hi = mid;
      f_hi = f_mid;
    } else {
      r_lo = mid;
      f_lo = f_mid;
    }
  }
  return 0.5 * (r_lo + r_hi);
}

double ScoreDecomposition::sample(RandomStream& stream) const {
  double s = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double z = b[j] + stream.normal();
    s += lambda[j] * z * z;
  }
  return s;
}

ScoreDecomposition score_decomposition(const la::Mat4& info, const la::Mat4& sigma,
                                       const la::Vec<4>& mu) {
  const la::Mat4 b_mat = projected_matrix(info);
  const la::SymSqrt<4> s = la::sym_sqrt_and_inv(la::symmetrize(sigma));
  if (!s.inv_sqrt) throw std::domain_error("score_decomposition: Sigma is singular");
  const la::Mat4 congruence = la::symmetrize(s.sqrt * b_mat * s.sqrt);
  const la::EigenSym<4> eig = la::sym_eigen(congruence);

  ScoreDecomposition out;
  out.lambda = eig.values;
  const la::Vec<4> w = *s.inv_sqrt * mu;
  out.b = la::transpose(eig.vectors) * w;
  return out;
}

}  // namespace occuscore
