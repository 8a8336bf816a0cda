#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carnotflow/runner.hpp"
#include "carnotflow/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic-game solver for singular parabolic equations on Carnot groups"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;

  auto* solve_cmd = app.add_subcommand("solve", "run the solver on a config file");
  solve_cmd->add_option("config", config_path, "config file")->required();
  solve_cmd->add_option("--out", out_dir, "output directory override");
  solve_cmd->add_option("--threads", threads, "worker threads (default: THREADS env or all)");

  std::string suite;
  std::uint64_t seed = 42;
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  verify_cmd->add_option("suite", suite, "algebra | operators | adversary | regularity | oracle")
      ->required();
  verify_cmd->add_option("--seed", seed, "random seed");
  verify_cmd->add_option("--threads", threads, "worker threads");

  std::string parameter;
  std::vector<double> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "re-solve over a parameter range");
  sweep_cmd->add_option("config", config_path, "config file")->required();
  sweep_cmd->add_option("--param", parameter, "epsilon | h")->required();
  sweep_cmd->add_option("--values", values, "parameter values")->required()->delimiter(',');
  sweep_cmd->add_option("--out", out_dir, "output directory override");
  sweep_cmd->add_option("--threads", threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  const int nthreads = carnotflow::resolve_threads(threads);

  try {
    if (solve_cmd->parsed()) {
      const carnotflow::RunConfig cfg = carnotflow::parse_config_file(config_path);
      const carnotflow::SolveArtifacts art = carnotflow::run_solve(cfg, nthreads, out_dir);
      std::printf("wrote %zu layer files, manifest %s (%.2fs)\n", art.layer_files.size(),
                  art.manifest_file.c_str(), art.wall_seconds);
      return 0;
    }
    if (verify_cmd->parsed()) {
      const carnotflow::SuiteReport rep = carnotflow::run_suite(suite, seed, nthreads);
      for (const auto& c : rep.checks)
        std::printf("%s %s.%s %s\n", c.pass ? "PASS" : "FAIL", rep.suite.c_str(),
                    c.name.c_str(), c.detail.c_str());
      return rep.all_pass() ? 0 : 1;
    }
    if (sweep_cmd->parsed()) {
      const carnotflow::RunConfig cfg = carnotflow::parse_config_file(config_path);
      const auto rows = carnotflow::run_sweep(cfg, parameter, values, nthreads, out_dir);
      std::printf("%s,t_final,oracle_error,successive_diff\n", parameter.c_str());
      for (const auto& r : rows)
        std::printf("%g,%g,%g,%g\n", r.value, r.t_final, r.oracle_error, r.successive_diff);
      return 0;
    }
  } catch (const carnotflow::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 1;
  }
  return 2;
}
