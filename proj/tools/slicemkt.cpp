#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "slicemkt/experiments.hpp"
#include "slicemkt/stackelberg.hpp"

using namespace slicemkt;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
  std::string config_path;
  std::string seeds;
  std::string out_dir;
  int iterations = -1;
};

ExperimentConfig load_with_overrides(const CliOptions& opt) {
  ExperimentConfig cfg =
      opt.config_path.empty() ? default_experiment() : load_config(opt.config_path);
  if (!opt.seeds.empty()) {
    cfg.seeds.clear();
    std::istringstream is(opt.seeds);
    std::string item;
    while (std::getline(is, item, ',')) cfg.seeds.push_back(std::stoull(item));
  }
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (opt.iterations > 0) cfg.scenario.training.iterations = opt.iterations;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_meta(const ExperimentConfig& cfg, const fs::path& path, double seconds) {
  std::ostringstream os;
  os << "config_hash " << config_hash(cfg) << '\n';
  os << "seeds";
  for (auto s : cfg.seeds) os << ' ' << s;
  os << '\n';
  os << "iterations " << cfg.scenario.training.iterations << '\n';
  os << "wall_time_s " << seconds << '\n';
  write_file(path, os.str());
}

int cmd_converge(const CliOptions& opt) {
  const ExperimentConfig cfg = load_with_overrides(opt);
  fs::create_directories(cfg.out_dir);
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrainingHistory> histories;
  const ConvergenceReport report = run_convergence_experiment(cfg, &histories);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  emit_convergence_csv(csv, report);
  write_file(fs::path(cfg.out_dir) / "convergence.csv", csv.str());
  for (const auto& h : histories) {
    std::ostringstream hs;
    history_to_csv(hs, h);
    std::ostringstream name;
    name << "history_" << to_string(h.strategy) << "_seed" << h.seed << ".csv";
    write_file(fs::path(cfg.out_dir) / name.str(), hs.str());
  }
  write_meta(cfg, fs::path(cfg.out_dir) / "convergence_meta.txt", secs);

  std::cout << "ordering " << (report.ordering_ok ? "pass" : "fail") << '\n'
            << "plateau " << (report.plateau_ok ? "pass" : "fail") << '\n';
  return report.ordering_ok && report.plateau_ok ? 0 : 1;
}

int cmd_sweep(const CliOptions& opt, SweepAxis axis) {
  ExperimentConfig cfg = load_with_overrides(opt);
  cfg.sweep_axis = axis;
  if (cfg.sweep_values.empty()) {
    if (axis == SweepAxis::Bandwidth) cfg.sweep_values = {5, 10, 20};
    else cfg.sweep_values = {1, 2, 3, 4, 5};
  }
  if (axis != SweepAxis::Bandwidth &&
      (cfg.algorithms.size() != 2 || cfg.algorithms[0] != Strategy::CostMaddpg))
    cfg.algorithms = {Strategy::CostMaddpg, Strategy::StMaddpg};
  cfg.validate();
  fs::create_directories(cfg.out_dir);

  const auto start = std::chrono::steady_clock::now();
  const SweepReport report = axis == SweepAxis::Bandwidth
                                 ? run_pricing_sweep(cfg)
                                 : run_population_sweep(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const char* stem = axis == SweepAxis::Bandwidth    ? "sweep_bandwidth"
                     : axis == SweepAxis::NumSellers ? "sweep_sellers"
                                                     : "sweep_buyers";
  std::ostringstream csv;
  emit_sweep_csv(csv, report);
  write_file(fs::path(cfg.out_dir) / (std::string(stem) + ".csv"), csv.str());
  write_meta(cfg, fs::path(cfg.out_dir) / (std::string(stem) + "_meta.txt"), secs);

  bool ok = true;
  if (axis == SweepAxis::Bandwidth) {
    std::cout << "price_monotonic " << (report.monotonic_price_ok ? "pass" : "fail")
              << '\n'
              << "qty_monotonic " << (report.monotonic_qty_ok ? "pass" : "fail")
              << '\n';
    ok = report.monotonic_price_ok && report.monotonic_qty_ok;
  } else if (axis == SweepAxis::NumSellers) {
    std::cout << "seller_utility_decreasing "
              << (report.seller_utility_decreasing_ok ? "pass" : "fail") << '\n'
              << "cost_below_st_at_max "
              << (report.cost_below_st_at_max_sellers ? "pass" : "fail") << '\n';
    ok = report.seller_utility_decreasing_ok && report.cost_below_st_at_max_sellers;
  } else {
    std::cout << "cost_above_st_buyers "
              << (report.cost_above_st_buyers_at_max ? "pass" : "fail") << '\n';
    ok = report.cost_above_st_buyers_at_max;
  }
  return ok ? 0 : 1;
}

int cmd_oracle(const CliOptions& opt, bool singleton) {
  const ExperimentConfig cfg = load_with_overrides(opt);
  MarketEnv env(cfg.scenario, cfg.seeds.front());
  const StackelbergGame game =
      env.build_game(singleton ? MarketMode::Singleton : MarketMode::Coalition);
  const EquilibriumSolution sol = solve_se_bruteforce(game);
  std::cout << solution_to_line(game_hash(game), sol) << '\n';
  std::cout << "prices:";
  for (double p : sol.prices) std::cout << ' ' << p;
  std::cout << "\nquantities:";
  for (int q : sol.quantities) std::cout << ' ' << q;
  std::cout << "\nepsilon_equilibrium: " << (sol.epsilon_equilibrium ? "yes" : "no")
            << '\n';
  const SeCheck check = verify_se(game, sol);
  std::cout << "verify_se: " << (check.pass ? "pass" : "fail")
            << " max_gain " << check.max_gain << '\n';
  return check.pass ? 0 : 1;
}

int cmd_check(const CliOptions& opt) {
  const ExperimentConfig cfg = load_with_overrides(opt);
  int failures = 0;
  auto expect = [&](bool ok, const char* what) {
    std::cout << (ok ? "pass " : "FAIL ") << what << '\n';
    if (!ok) ++failures;
  };

  TenantQos q{500e3, 0.010, 1.0};
  expect(std::abs(qos_rate(500e3, q) - 0.5) < 1e-12, "qos_rate at threshold");
  expect(std::abs(qos_delay(0.010, q) - 0.5) < 1e-12, "qos_delay at threshold");
  expect(std::abs(ue_delay_s(2.0, 1.0) - 1.0) < 1e-12, "mm1 delay");
  expect(std::abs(path_loss_db(1.0, 1.0) + 27.55) < 1e-12, "free-space path loss");

  // short deterministic training run, bookkeeping and reproducibility
  ScenarioConfig s = cfg.scenario;
  s.training.iterations = 40;
  s.training.warmup = 16;
  s.training.batch_size = 16;
  const TrainingHistory a = train_strategy(s, Strategy::CostMaddpg, cfg.seeds.front());
  const TrainingHistory b = train_strategy(s, Strategy::CostMaddpg, cfg.seeds.front());
  std::ostringstream ca, cb;
  history_to_csv(ca, a);
  history_to_csv(cb, b);
  expect(ca.str() == cb.str(), "determinism of (config, seed)");
  bool books = true;
  for (const auto& r : a.rows) {
    double s_sum = 0.0;
    for (double v : r.seller_rewards) s_sum += v;
    for (double v : r.buyer_rewards) s_sum += v;
    if (std::abs(s_sum - r.system_utility) > 1e-9) books = false;
  }
  expect(books, "system utility equals summed rewards");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network-slicing resource market simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  CliOptions opt;
  app.add_option("--config", opt.config_path, "config file (key=value lines)");
  app.add_option("--seeds", opt.seeds, "comma-separated seed list override");
  app.add_option("--out", opt.out_dir, "output directory override");
  app.add_option("--iterations", opt.iterations, "training iterations override");

  auto* converge = app.add_subcommand("converge", "convergence comparison of all algorithms");
  auto* swb = app.add_subcommand("sweep-bandwidth", "bandwidth sweep (price/quantity trends)");
  auto* sws = app.add_subcommand("sweep-sellers", "seller-count sweep");
  auto* swy = app.add_subcommand("sweep-buyers", "buyer-count sweep");
  auto* oracle = app.add_subcommand("oracle", "print the brute-force Stackelberg equilibrium");
  bool singleton = false;
  oracle->add_flag("--singleton", singleton, "use singleton buyers instead of coalitions");
  auto* check = app.add_subcommand("check", "run the quick invariant suite");
  for (auto* sub : {converge, swb, sws, swy, oracle, check}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (converge->parsed()) return cmd_converge(opt);
    if (swb->parsed()) return cmd_sweep(opt, SweepAxis::Bandwidth);
    if (sws->parsed()) return cmd_sweep(opt, SweepAxis::NumSellers);
    if (swy->parsed()) return cmd_sweep(opt, SweepAxis::NumBuyers);
    if (oracle->parsed()) return cmd_oracle(opt, singleton);
    if (check->parsed()) return cmd_check(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
