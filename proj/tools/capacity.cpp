#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "bdbc/io.hpp"

namespace {

int cmd_sweep(const std::string& config_path, int points_override,
              const std::string& out_override) {
  bdbc::ScenarioConfig cfg = bdbc::load_config(config_path);
  if (points_override > 0) cfg.sweep_points = points_override;
  if (!out_override.empty()) cfg.output_dir = out_override;
  const int rc = bdbc::run_scenario(cfg);
  if (rc == 2)
    std::fprintf(stderr, "warning: some boundary solves failed certification\n");
  std::printf("wrote %s\n", cfg.output_dir.c_str());
  return rc;
}

int cmd_simulate(const std::string& config_path, double rate_fraction,
                 const std::vector<int>& block_lengths, long trials, std::uint64_t seed,
                 bool seed_given, const std::string& out_override) {
  bdbc::ScenarioConfig cfg = bdbc::load_config(config_path);
  bdbc::SimScenario sc = cfg.sim.value_or(bdbc::SimScenario{});
  if (sc.epsilon_p <= 0.0) sc.epsilon_p = 0.05 * cfg.power;
  if (rate_fraction > 0.0) sc.rate_fraction = rate_fraction;
  if (!block_lengths.empty()) sc.block_lengths = block_lengths;
  if (trials > 0) sc.trials = trials;
  if (seed_given) sc.seed = seed;
  if (!out_override.empty()) cfg.output_dir = out_override;

  const bdbc::BidirectionalChannel ch = cfg.channel();
  const bdbc::MaxminResult mm = bdbc::maxmin_rate(ch, cfg.solver);
  const double base = std::min(mm.rates.r1, mm.rates.r2);
  const double target = sc.rate_fraction * base;
  std::printf("maxmin rate %.6f bits/use, simulating at %.6f bits/use\n", base, target);

  const std::vector<bdbc::SimRow> rows =
      bdbc::simulate_block_lengths(ch, mm.q, target, target, sc);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string path =
      (std::filesystem::path(cfg.output_dir) / "sim.csv").string();
  bdbc::write_text_file(path, bdbc::sim_csv(rows));
  for (const bdbc::SimRow& r : rows) {
    std::printf("n=%4d  err1=%.4f  err2=%.4f  erasures1=%ld  power_repairs=%ld\n",
                r.block_length, double(r.stats.errors_node1) / double(r.stats.trials),
                double(r.stats.errors_node2) / double(r.stats.trials),
                r.stats.erasures_node1, r.stats.power_violations);
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_maxmin(const std::string& config_path) {
  const bdbc::ScenarioConfig cfg = bdbc::load_config(config_path);
  const bdbc::BidirectionalChannel ch = cfg.channel();
  const bdbc::MaxminResult mm = bdbc::maxmin_rate(ch, cfg.solver);
  std::printf("maxmin point: r1 = %.9f bits, r2 = %.9f bits\n", mm.rates.r1, mm.rates.r2);
  std::printf("weight toward node 1: %.9f\n", mm.weight_to_node1);
  std::printf("trace(Q) = %.9f of budget %.9f\n", mm.q.trace(), ch.power);
  std::printf("kkt: stationarity %.3e, slack(trace) %.3e, slack(cone) %.3e\n",
              mm.certificate.stationarity_residual, mm.certificate.comp_slack_trace,
              mm.certificate.comp_slack_cone);
  if (!mm.converged) {
    std::fprintf(stderr, "warning: bisection did not reach |r1 - r2| <= 1e-4\n");
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacity region of the two-phase MIMO relay broadcast link"};
  app.require_subcommand(1);

  std::string config_path;
  int points = 0;
  std::string out_dir;
  CLI::App* sweep = app.add_subcommand("sweep", "trace the rate-region boundary");
  sweep->add_option("--config", config_path, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--points", points, "number of boundary weights");
  sweep->add_option("--out", out_dir, "output directory override");

  double rate_fraction = 0.0;
  std::vector<int> block_lengths;
  long trials = 0;
  std::uint64_t seed = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo decoding error rates");
  simulate->add_option("--config", config_path, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--rate-fraction", rate_fraction, "fraction of the maxmin rate");
  simulate->add_option("--block-lengths", block_lengths, "block lengths to simulate")
      ->delimiter(',');
  simulate->add_option("--trials", trials, "trials per block length");
  CLI::Option* seed_opt = simulate->add_option("--seed", seed, "simulation seed");
  simulate->add_option("--out", out_dir, "output directory override");

  CLI::App* maxmin = app.add_subcommand("maxmin", "equal-rate operating point");
  maxmin->add_option("--config", config_path, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(config_path, points, out_dir);
    if (simulate->parsed())
      return cmd_simulate(config_path, rate_fraction, block_lengths, trials, seed,
                          seed_opt->count() > 0, out_dir);
    if (maxmin->parsed()) return cmd_maxmin(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
