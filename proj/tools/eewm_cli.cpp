// Command-line front end: attack, design, wss-check and experiment.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eewm/attack.hpp"
#include "eewm/design.hpp"
#include "eewm/harness.hpp"
#include "eewm/matrix_io.hpp"
#include "eewm/wss.hpp"

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient watermark design under optimal linear removal attacks"};
  app.require_subcommand(1);

  std::string host_path, watermark_path;
  double r0 = 0.0;
  auto* attack = app.add_subcommand("attack", "Solve the optimal linear attack for a target correlation");
  attack->add_option("--host", host_path, "Host covariance CSV")->required()->check(CLI::ExistingFile);
  attack->add_option("--watermark", watermark_path, "Watermark covariance CSV")->required()->check(CLI::ExistingFile);
  attack->add_option("--r0", r0, "Target average correlation")->required();

  double p_w = 0.0;
  int brute_trials = 0;
  std::uint64_t design_seed = 1;
  auto* design = app.add_subcommand("design", "Optimal watermark covariance for a host");
  design->add_option("--host", host_path, "Host covariance CSV")->required()->check(CLI::ExistingFile);
  design->add_option("--pw", p_w, "Watermark power budget")->required();
  design->add_option("--brute-trials", brute_trials, "Random-search trials for the optimality oracle")
      ->check(CLI::NonNegativeNumber);
  design->add_option("--seed", design_seed, "Seed for the random search");

  double rho = 0.0, sigma2 = 1.0;
  std::vector<int> sizes{32, 64, 128, 256, 512};
  auto* wss = app.add_subcommand("wss-check", "Toeplitz eigenvalue and PSD-condition check for an AR(1) host");
  wss->add_option("--rho", rho, "AR(1) correlation")->required();
  wss->add_option("--sigma2", sigma2, "AR(1) variance");
  wss->add_option("--pw", p_w, "Watermark power budget")->required();
  wss->add_option("--sizes", sizes, "Comma-separated dimensions")->delimiter(',');

  std::string config_path, out_path;
  std::uint64_t seed_override = 0;
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment and write results CSV");
  experiment->add_option("--config", config_path, "Experiment config file")->required();
  experiment->add_option("--out", out_path, "Output CSV path")->required();
  auto* seed_opt = experiment->add_option("--seed", seed_override, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*attack) {
      const auto host = eewm::load_covariance_csv(host_path);
      const auto watermark = eewm::load_covariance_csv(watermark_path);
      const auto sol = eewm::solve_attack(host, watermark, r0);
      std::cout << host.dim() << ',' << num(sol.gamma) << ',' << num(sol.lagrange) << ','
                << num(sol.r_target) << ',' << num(sol.distortion) << '\n';
    } else if (*design) {
      const auto host = eewm::load_covariance_csv(host_path);
      const auto sol = eewm::optimal_watermark_covariance(host, p_w);
      std::string brute;
      if (brute_trials > 0) {
        brute = num(eewm::brute_force_best_covariance(host, p_w, brute_trials, design_seed).best_energy);
      }
      std::cout << "N,c,lambda,alpha,E_opt,E_brute_best,stationarity_residual\n"
                << host.dim() << ',' << num(sol.c) << ',' << num(sol.lagrange) << ','
                << num(sol.alpha) << ',' << num(sol.residual_energy) << ',' << brute << ','
                << num(eewm::stationarity_residual(host, sol.c_w_opt, sol.lagrange)) << '\n';
    } else if (*wss) {
      std::cout << "N,eigen_gap,psd_ratio_error\n";
      for (int n : sizes) {
        const auto host = eewm::toeplitz_from_autocorr(eewm::ar1_autocorr(sigma2, rho, n));
        const double gap = eewm::toeplitz_eigen_gap(host, eewm::ar1_psd(sigma2, rho, n));
        const auto check = eewm::psd_condition_check(host, p_w);
        std::cout << n << ',' << num(gap) << ',' << num(check.max_psd_ratio_error) << '\n';
      }
    } else if (*experiment) {
      auto config = eewm::load_config(config_path);
      if (*seed_opt) config.seed = seed_override;
      eewm::emit_csv(eewm::run_experiment(config), std::filesystem::path(out_path));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
