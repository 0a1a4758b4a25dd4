// occuscore command line: analyze a two-region detection dataset or run
// the simulation studies (power, medians, agreement, eigenvalue curves,
// the analytic eigenvalue curves, and the per-dataset projected-spectrum
// experiment), writing CSV artifacts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "occuscore/csv.hpp"
#include "occuscore/report.hpp"
#include "occuscore/simharness.hpp"

namespace fs = std::filesystem;
using namespace occuscore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct SweepOptions {
  double psi1 = 0.8;
  double p1 = 0.5;
  double p2 = 0.5;
  int n_visits = 3;
  int n1 = 50;
  int n2 = 50;
  double r_min = 0.0;
  double r_max = 0.9;
  double r_step = 0.025;
  int replicates = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  SweepConfig to_config() const {
    SweepConfig cfg;
    cfg.psi1 = psi1;
    cfg.p1 = p1;
    cfg.p2 = p2;
    cfg.designs = {{n1, n_visits}, {n2, n_visits}};
    cfg.r_grid = make_r_grid(r_min, r_max, r_step);
    cfg.replicates = replicates;
    cfg.alpha = alpha;
    cfg.base_seed = seed;
    return cfg;
  }
};

void add_sweep_flags(CLI::App* cmd, SweepOptions& opt, bool with_grid = true) {
  cmd->add_option("--psi1", opt.psi1, "occupancy probability in region 1")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--p1", opt.p1, "detection probability in region 1")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--p2", opt.p2, "detection probability in region 2")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--K", opt.n_visits, "visits per site")->check(CLI::PositiveNumber);
  cmd->add_option("--N1", opt.n1, "sites in region 1")->check(CLI::PositiveNumber);
  cmd->add_option("--N2", opt.n2, "sites in region 2")->check(CLI::PositiveNumber);
  if (with_grid) {
    cmd->add_option("--r-min", opt.r_min, "smallest effect size R")
        ->check(CLI::Range(0.0, 1.0 - 1e-9));
    cmd->add_option("--r-max", opt.r_max, "largest effect size R")
        ->check(CLI::Range(0.0, 1.0 - 1e-9));
    cmd->add_option("--r-step", opt.r_step, "grid step in R")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--reps", opt.replicates, "simulation replicates per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", opt.alpha, "significance level")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--seed", opt.seed, "base random seed");
  cmd->add_option("--out-dir", opt.out_dir, "output directory for CSV files");
}

nlohmann::json config_json(const SweepOptions& opt, const std::string& command) {
  return {{"command", command}, {"psi1", opt.psi1},   {"p1", opt.p1},
          {"p2", opt.p2},       {"K", opt.n_visits},  {"N1", opt.n1},
          {"N2", opt.n2},       {"r_min", opt.r_min}, {"r_max", opt.r_max},
          {"r_step", opt.r_step}, {"reps", opt.replicates}, {"alpha", opt.alpha},
          {"seed", opt.seed},   {"out_dir", opt.out_dir}};
}

// Echo the resolved configuration to stdout and into the output
// directory, so any run can be reproduced from its log.
void write_config(const SweepOptions& opt, const std::string& command) {
  const nlohmann::json j = config_json(opt, command);
  std::cout << "config: " << j.dump() << "\n";
  fs::create_directories(opt.out_dir);
  std::ofstream out(fs::path(opt.out_dir) / (command + "_config.json"), std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write config file in " + opt.out_dir);
  out << j.dump(2) << "\n";
}

std::string out_path(const SweepOptions& opt, const char* name) {
  return (fs::path(opt.out_dir) / name).string();
}

int cmd_power(const SweepOptions& opt) {
  write_config(opt, "power");
  const auto points = run_power_sweep(opt.to_config());
  csv::Writer w(out_path(opt, "power.csv"), "R,test,rate,n_valid");
  for (const auto& pt : points) {
    auto emit = [&](const char* test, const TestCell& cell) {
      w.row({csv::fmt(pt.r), test, csv::fmt(cell.rate()), csv::fmt(cell.n_valid)});
    };
    emit("Wald", pt.wald);
    emit("LRT", pt.lrt);
    emit("T_E", pt.score_expected);
    emit("T_O", pt.score_observed);
    emit("T_O_star", pt.score_modified);
    emit("T_O_plus", pt.score_positive);
  }
  std::cout << "wrote " << out_path(opt, "power.csv") << "\n";
  return kExitOk;
}

int cmd_medians(const SweepOptions& opt) {
  write_config(opt, "medians");
  const SweepConfig cfg = opt.to_config();
  const auto rows = run_median_curves(cfg);
  csv::Writer w(out_path(opt, "medians.csv"),
                "R,median_T_E,median_T_O,median_ratio,median_T_O_plus,median_T_O_minus,"
                "n_valid,n_plus,n_minus");
  for (const auto& row : rows)
    w.row({csv::fmt(row.r), csv::fmt(row.median_te), csv::fmt(row.median_to),
           csv::fmt(row.median_ratio), csv::fmt(row.median_to_plus),
           csv::fmt(row.median_to_minus), csv::fmt(row.n_valid), csv::fmt(row.n_plus),
           csv::fmt(row.n_minus)});
  const auto scatter = collect_scatter(cfg);
  csv::Writer ws(out_path(opt, "scatter.csv"), "R,replicate,T_E,T_O");
  for (const auto& pt : scatter)
    ws.row({csv::fmt(pt.r), csv::fmt(pt.replicate), csv::fmt(pt.te), csv::fmt(pt.to)});
  std::cout << "wrote " << out_path(opt, "medians.csv") << " and "
            << out_path(opt, "scatter.csv") << "\n";
  return kExitOk;
}

int cmd_agreement(const SweepOptions& opt) {
  write_config(opt, "agreement");
  const SweepConfig cfg = opt.to_config();
  csv::Writer w(out_path(opt, "agreement.csv"), "R,variant,agreement,n");
  for (const auto variant : {AgreementVariant::PositiveOnly, AgreementVariant::Modified})
    for (const auto& row : run_agreement(cfg, variant))
      w.row({csv::fmt(row.r), to_string(row.variant), csv::fmt(row.agreement), csv::fmt(row.n)});
  std::cout << "wrote " << out_path(opt, "agreement.csv") << "\n";
  return kExitOk;
}

int cmd_eigen(const SweepOptions& opt) {
  write_config(opt, "eigen");
  const auto rows = run_eigen_median_curves(opt.to_config());
  csv::Writer w(out_path(opt, "eigen.csv"),
                "R,median_eig1,median_eig2,median_eig3,median_eig4,n_valid");
  for (const auto& row : rows)
    w.row({csv::fmt(row.r), csv::fmt(row.medians[0]), csv::fmt(row.medians[1]),
           csv::fmt(row.medians[2]), csv::fmt(row.medians[3]), csv::fmt(row.n_valid)});
  std::cout << "wrote " << out_path(opt, "eigen.csv") << "\n";
  return kExitOk;
}

int cmd_asymptotics(const SweepOptions& opt) {
  write_config(opt, "asymptotics");
  AlternativeFamily family;
  family.psi1 = opt.psi1;
  family.p1 = opt.p1;
  family.p2 = opt.p2;
  family.designs = {{opt.n1, opt.n_visits}, {opt.n2, opt.n_visits}};
  const auto grid = make_r_grid(opt.r_min, opt.r_max, opt.r_step);

  const auto curve = expected_info_eigen_curve(family, grid);
  csv::Writer w(out_path(opt, "asym_eigen.csv"), "R,eig1,eig2,eig3,eig4");
  for (const auto& rep : curve)
    w.row({csv::fmt(rep.effect_size), csv::fmt(rep.eigenvalues[0]), csv::fmt(rep.eigenvalues[1]),
           csv::fmt(rep.eigenvalues[2]), csv::fmt(rep.eigenvalues[3])});

  // reciprocal leading eigenvalue of the projected matrix, analytic Sigma
  csv::Writer wp(out_path(opt, "asym_projected.csv"), "R,inv_leading_eigenvalue");
  for (double r : grid) {
    const ThetaFull truth = family.truth_at(r);
    const PseudoTrue pt = solve_pseudo_true(truth, family.designs);
    const MomentSet mom = score_moments(truth, pt.value, family.designs);
    const la::Mat4 info = expected_info(truth, expand_null(pt.value), family.designs);
    const SpectralReport rep = projected_spectrum(info, mom.sigma);
    const double lead = rep.leading();
    wp.row({csv::fmt(r), csv::fmt(lead != 0.0 ? 1.0 / lead : 0.0)});
  }
  std::cout << "wrote " << out_path(opt, "asym_eigen.csv") << " and "
            << out_path(opt, "asym_projected.csv") << "\n";
  return kExitOk;
}

int cmd_fig6(const SweepOptions& opt, double r, double psi2_override) {
  write_config(opt, "fig6");
  if (psi2_override > 0.0) r = 1.0 - psi2_override / opt.psi1;
  const auto values = run_projected_eigen_experiment(opt.to_config(), r);
  csv::Writer w(out_path(opt, "fig6.csv"), "replicate,inv_leading_eigenvalue");
  for (std::size_t i = 0; i < values.size(); ++i)
    w.row({csv::fmt(static_cast<int>(i)), csv::fmt(values[i])});
  std::cout << "wrote " << out_path(opt, "fig6.csv") << " (" << values.size()
            << " usable replicates at R=" << r << ")\n";
  return kExitOk;
}

int cmd_test(const std::string& input, double alpha, const std::string& format,
             const std::string& rule_name, const std::string& out_file) {
  Dataset dataset;
  try {
    dataset = load_dataset(input);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  const AnalysisReport rep = analyze_dataset(dataset, alpha);
  const Rule rule = rule_name == "standard" ? Rule::Standard : Rule::ModifiedNegative;
  const std::string text =
      format == "json" ? report_to_json(rep) : report_to_text(rep, rule);
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) {
      std::cerr << "I/O error: cannot open " << out_file << "\n";
      return kExitIo;
    }
    out << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sample occupancy tests with the observed-information score statistic"};
  app.require_subcommand(1);

  SweepOptions opt;

  std::string test_input, test_format = "text", test_rule = "modified", test_out;
  double test_alpha = 0.05;
  auto* test = app.add_subcommand("test", "analyze a two-region dataset file");
  test->add_option("input", test_input, "dataset file (CSV or JSON)")->required();
  test->add_option("--alpha", test_alpha, "significance level")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  test->add_option("--format", test_format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  test->add_option("--rule", test_rule, "headline rejection rule for the observed score test")
      ->check(CLI::IsMember({"standard", "modified"}));
  test->add_option("--out", test_out, "write the report to this file instead of stdout");

  auto* power = app.add_subcommand("power", "rejection-rate sweep over effect size");
  add_sweep_flags(power, opt);
  auto* medians = app.add_subcommand("medians", "statistic medians and scatter export");
  add_sweep_flags(medians, opt);
  auto* agreement = app.add_subcommand("agreement", "decision agreement between T_E and T_O rules");
  add_sweep_flags(agreement, opt);
  auto* eigen = app.add_subcommand("eigen", "median eigenvalues of the observed information");
  add_sweep_flags(eigen, opt);
  auto* asym = app.add_subcommand("asymptotics", "analytic eigenvalue and projected-matrix curves");
  add_sweep_flags(asym, opt);

  double fig6_r = 0.6, fig6_psi2 = -1.0;
  auto* fig6 = app.add_subcommand("fig6", "per-dataset projected-spectrum experiment at fixed R");
  add_sweep_flags(fig6, opt, /*with_grid=*/false);
  fig6->add_option("--r", fig6_r, "effect size R")->check(CLI::Range(0.0, 1.0 - 1e-9));
  fig6->add_option("--psi2", fig6_psi2, "region-2 occupancy (overrides --r)")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (test->parsed()) return cmd_test(test_input, test_alpha, test_format, test_rule, test_out);
    if (power->parsed()) return cmd_power(opt);
    if (medians->parsed()) return cmd_medians(opt);
    if (agreement->parsed()) return cmd_agreement(opt);
    if (eigen->parsed()) return cmd_eigen(opt);
    if (asym->parsed()) return cmd_asymptotics(opt);
    if (fig6->parsed()) return cmd_fig6(opt, fig6_r, fig6_psi2);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
