#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>

#include "occuscore/simharness.hpp"

using namespace occuscore;

namespace {

SweepConfig small_config() {
  SweepConfig config;
  config.r_grid = {0.0, 0.4, 0.8};
  config.replicates = 1500;
  config.base_seed = 99;
  return config;
}

int total_count(const std::map<FitStatus, int>& failures) {
  int total = 0;
  for (const auto& [status, count] : failures) total += count;
  return total;
}

}  // namespace

TEST_CASE("make_r_grid covers the closed range with the requested step") {
  const auto grid = make_r_grid(0.0, 0.9, 0.025);
  REQUIRE(grid.size() == 37);
  CHECK(grid.front() == doctest::Approx(0.0));
  CHECK(grid.back() == doctest::Approx(0.9));
  CHECK(grid[1] == doctest::Approx(0.025));

  const auto single = make_r_grid(0.6, 0.6, 0.025);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(0.6));
}

TEST_CASE("selection_median is the lower median by exact selection") {
  CHECK(selection_median({3.0}) == 3.0);
  CHECK(selection_median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(selection_median({4.0, 1.0, 3.0, 2.0}) == 2.0);  // lower of the middle pair
}

TEST_CASE("replicate evaluation is deterministic") {
  const SweepConfig config = small_config();
  const ReplicateOutcome a = evaluate_replicate(config, 1, 0.4, 7, true);
  const ReplicateOutcome b = evaluate_replicate(config, 1, 0.4, 7, true);
  CHECK(a.data.region1.s_d == b.data.region1.s_d);
  CHECK(a.data.region2.d == b.data.region2.d);
  CHECK(a.to == b.to);
  CHECK(a.te == b.te);
  CHECK(a.null_info_eigs == b.null_info_eigs);

  // a different replicate index gives a different dataset (almost surely)
  const ReplicateOutcome c = evaluate_replicate(config, 1, 0.4, 8, false);
  CHECK((a.data.region1.s_d != c.data.region1.s_d || a.data.region1.d != c.data.region1.d ||
         a.data.region2.s_d != c.data.region2.s_d || a.data.region2.d != c.data.region2.d));
}

TEST_CASE("power sweep bookkeeping is internally consistent") {
  const SweepConfig config = small_config();
  const auto points = run_power_sweep(config);
  REQUIRE(points.size() == config.r_grid.size());

  const auto points_again = run_power_sweep(config);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].wald.n_reject == points_again[i].wald.n_reject);
    CHECK(points[i].score_observed.n_reject == points_again[i].score_observed.n_reject);
    CHECK(points[i].n_negative_observed == points_again[i].n_negative_observed);
  }

  for (const auto& pt : points) {
    // every replicate is either a valid statistic or an accounted failure
    CHECK(pt.wald.n_valid + total_count(pt.full_failures) == config.replicates);
    CHECK(pt.score_observed.n_valid + total_count(pt.null_failures) == config.replicates);

    // modified rule = standard rejections plus the negative statistics
    CHECK(pt.score_modified.n_valid == pt.score_observed.n_valid);
    CHECK(pt.score_modified.n_reject ==
          pt.score_observed.n_reject + pt.n_negative_observed);

    // positive-only cell drops exactly the negative statistics
    CHECK(pt.score_positive.n_valid == pt.score_observed.n_valid - pt.n_negative_observed);
    CHECK(pt.score_positive.n_reject == pt.score_observed.n_reject);

    CHECK(pt.n_negative_observed >= 0);
    CHECK(pt.n_negative_observed <= pt.score_observed.n_valid);
  }

  // size at the null is in a sane band, power grows with the effect
  const PowerPoint& at_null = points[0];
  CHECK(at_null.lrt.rate() > 0.015);
  CHECK(at_null.lrt.rate() < 0.12);
  CHECK(at_null.score_expected.rate() > 0.015);
  CHECK(at_null.score_expected.rate() < 0.12);
  CHECK(points[2].lrt.rate() > points[0].lrt.rate());
  CHECK(points[2].wald.rate() > points[0].wald.rate());
}

TEST_CASE("median curves partition replicates by the sign of the statistic") {
  SweepConfig config = small_config();
  config.r_grid = {0.0, 0.6};
  config.replicates = 1200;
  const auto rows = run_median_curves(config);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.n_valid > 0);
    CHECK(row.n_plus + row.n_minus == row.n_valid);
    CHECK(row.median_te >= 0.0);
    CHECK(row.median_to_plus >= 0.0);
    if (row.n_minus > 0) CHECK(row.median_to_minus < 0.0);
  }
  // at a strong alternative the median statistics move up
  CHECK(rows[1].median_te > rows[0].median_te);
}

TEST_CASE("agreement rates are proper frequencies and favor the modified rule off-null") {
  SweepConfig config = small_config();
  config.r_grid = {0.0, 0.7};
  config.replicates = 1200;
  const auto pos = run_agreement(config, AgreementVariant::PositiveOnly);
  const auto mod = run_agreement(config, AgreementVariant::Modified);
  REQUIRE(pos.size() == 2);
  REQUIRE(mod.size() == 2);
  for (const auto& row : pos) {
    CHECK(row.n > 0);
    CHECK(row.agreement >= 0.0);
    CHECK(row.agreement <= 1.0);
  }
  CHECK(std::string(to_string(AgreementVariant::Modified)) != "");

  // near the null both variants agree almost always
  CHECK(pos[0].agreement > 0.9);
  CHECK(mod[0].agreement > 0.9);
}

TEST_CASE("eigen median curves expose the sign change of the smallest eigenvalue") {
  SweepConfig config = small_config();
  config.r_grid = {0.0, 0.8};
  config.replicates = 800;
  const auto rows = run_eigen_median_curves(config);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.n_valid > 0);
    for (int k = 0; k + 1 < 4; ++k) CHECK(row.medians[k] >= row.medians[k + 1]);
  }
  CHECK(rows[0].medians[3] > 0.0);  // null: observed info PD at the fit
  CHECK(rows[1].medians[3] < 0.0);  // strong alternative: indefinite
}

TEST_CASE("projected eigen experiment returns finite reciprocals") {
  SweepConfig config = small_config();
  config.replicates = 400;
  const auto values = run_projected_eigen_experiment(config, 0.6);
  CHECK(values.size() > 300);
  for (double v : values) CHECK(std::isfinite(v));
}

TEST_CASE("scatter collection sizes follow the valid counts") {
  SweepConfig config = small_config();
  config.r_grid = {0.0, 0.5};
  config.replicates = 600;
  const auto scatter = collect_scatter(config);
  CHECK(!scatter.empty());
  std::size_t at_null = 0;
  for (const auto& pt : scatter) {
    CHECK((pt.r == 0.0 || pt.r == 0.5));
    CHECK(pt.replicate >= 0);
    CHECK(pt.replicate < config.replicates);
    if (pt.r == 0.0) ++at_null;
  }
  CHECK(at_null > 0);
  CHECK(at_null < scatter.size());
}

TEST_CASE("config validation rejects bad grids") {
  SweepConfig config = small_config();
  CHECK_NOTHROW(validate(config));
  config.r_grid = {0.5, 0.2};
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config.r_grid = {0.0, 1.2};
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config = small_config();
  config.replicates = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
}
