// Command-line driver: run single experiments, batteries of experiments,
// list the stock scenarios, or pre-compute the quadrature calibration and
// barrier kits.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "fraclab/experiment.hpp"

using namespace fraclab;

namespace {

std::filesystem::path default_out_root() {
  if (const char* env = std::getenv("FRACLAB_OUT")) return env;
  return "out";
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) raise(Errc::config_invalid, "--config is required (or use --scenario)");
  return ExperimentConfig::from_json(read_json(path));
}

void print_report_summary(const RunReport& rep) {
  const auto& analyses = rep.body["analyses"];
  std::cout << "scenario " << rep.config.scenario << "  hash "
            << rep.body["config_hash"].get<std::string>() << "\n";
  std::cout << "  kit: theta=" << rep.body["kit"]["theta"].get<double>()
            << " eps0=" << rep.body["kit"]["eps0"].get<double>()
            << " beta1=" << rep.body["kit"]["beta1"].get<double>() << "\n";
  for (const auto& a : analyses) {
    std::cout << "  eps=" << a["eps_visc"].get<double>()
              << "  alpha_hat=" << a["fit"]["alpha_hat"].get<double>()
              << "  C_hat=" << a["fit"]["C_hat"].get<double>()
              << "  pe=" << (a["point_estimate"]["pass"].get<bool>() ? "pass" : "FAIL")
              << "  diminish=" << (a["diminish"]["pass"].get<bool>() ? "pass" : "FAIL")
              << "  theorem=" << (a["theorem"]["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
  }
  if (!rep.body["sweep"].is_null() && !rep.body["sweep"].empty()) {
    std::cout << "  sweep: alpha_ratio=" << rep.body["sweep"]["alpha_ratio"].get<double>()
              << " C_ratio=" << rep.body["sweep"]["C_ratio"].get<double>() << "\n";
  }
  std::cout << "  exit_code=" << rep.exit_code << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: drift + fractional diffusion regularity laboratory"};
  app.require_subcommand(1);

  std::string config_path, scenario_id, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int jobs = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (JSON)");
    cmd->add_option("--out", out_dir, "output directory root");
    cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      have_seed = true;
    });
    cmd->add_option("--jobs", jobs, "parallel runs");
  };

  auto* cmd_run = app.add_subcommand("run", "run one experiment");
  cmd_run->add_option("--scenario", scenario_id, "stock scenario id (instead of --config)");
  add_common(cmd_run);

  auto* cmd_battery = app.add_subcommand("battery", "run the stock scenarios (or a config list)");
  std::vector<std::string> battery_configs;
  cmd_battery->add_option("configs", battery_configs, "config files; empty = stock scenarios");
  add_common(cmd_battery);

  app.add_subcommand("scenarios", "list the stock scenarios");

  auto* cmd_calibrate = app.add_subcommand(
      "calibrate", "pre-compute the barrier kits used by the stock scenarios");
  add_common(cmd_calibrate);

  CLI11_PARSE(app, argc, argv);

  RunOptions opt;
  opt.out_root = out_dir.empty() ? default_out_root() : std::filesystem::path(out_dir);
  if (have_seed) opt.seed_override = seed;

  try {
    if (app.got_subcommand("scenarios")) {
      for (const auto& id : scenario_ids()) {
        ExperimentConfig c = stock_scenario(id);
        std::cout << id << "  s=" << c.s << "  drift=" << c.drift.kind
                  << "  eps_visc=" << c.eps_visc.size() << " value(s)"
                  << (c.gauge && c.s < 0.5 ? "  [gauged]" : "") << "\n";
      }
      return 0;
    }
    if (app.got_subcommand("calibrate")) {
      for (const auto& id : scenario_ids()) {
        ExperimentConfig c = stock_scenario(id);
        FractionalOrder order = FractionalOrder::of(c.s);
        double speed = c.kit.speed > 0 ? c.kit.speed : c.drift.sup_norm;
        BarrierKit kit = obtain_kit(c, opt, order, speed);
        std::cout << "kit s=" << c.s << " A=" << speed << " mu=" << c.kit.mu
                  << ": theta=" << kit.theta << " eps0=" << kit.eps0 << " beta1=" << kit.beta1
                  << "\n";
      }
      return 0;
    }
    if (app.got_subcommand("run")) {
      ExperimentConfig cfg =
          scenario_id.empty() ? load_config(config_path) : stock_scenario(scenario_id);
      RunReport rep = run(cfg, opt);
      print_report_summary(rep);
      return rep.exit_code;
    }
    if (app.got_subcommand("battery")) {
      std::vector<ExperimentConfig> configs;
      if (battery_configs.empty()) {
        for (const auto& id : scenario_ids()) configs.push_back(stock_scenario(id));
      } else {
        for (const auto& p : battery_configs) configs.push_back(load_config(p));
      }
      BatterySummary sum = run_battery(configs, opt, jobs);
      std::filesystem::create_directories(opt.out_root);
      write_json(sum.aggregate, opt.out_root / "battery.json");
      // aggregate CSV: scenario, s, alpha_hat, theta, pass counters
      std::ofstream csv(opt.out_root / "battery.csv");
      csv << "scenario,s,alpha_hat,theta,exit_code\n";
      for (const auto& row : sum.aggregate) {
        csv << row.value("scenario", std::string()) << ',' << row.value("s", 0.0) << ','
            << row.value("alpha_hat", 0.0) << ',' << row.value("theta", 0.0) << ','
            << row.value("exit_code", 1) << '\n';
      }
      int worst = 0;
      for (const auto& r : sum.reports) worst = std::max(worst, r.exit_code);
      for (const auto& e : sum.errors)
        if (!e.empty()) {
          std::cerr << "error: " << e << "\n";
          worst = std::max(worst, 1);
        }
      std::cout << sum.reports.size() << " report(s) written under " << opt.out_root << "\n";
      return worst;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
