#include "slicemkt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace slicemkt {

namespace {

void put_csv(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

int coalition_count(const std::string& partition) {
  if (partition.empty()) return 0;
  return 1 + static_cast<int>(std::count(partition.begin(), partition.end(), '|'));
}

// Post-convergence means over the final fifth of the run (at least 100 rows).
SweepRow summarize(const std::vector<TrainingHistory>& runs, double sweep_value,
                   Strategy alg) {
  SweepRow row;
  row.sweep_value = sweep_value;
  row.algorithm = alg;
  double price = 0.0, qty = 0.0, seller_u = 0.0, buyer_u = 0.0, coal_u = 0.0;
  long count = 0;
  for (const auto& h : runs) {
    const int n = static_cast<int>(h.rows.size());
    const int tail = std::max(std::min(100, n), n / 5);
    for (int i = n - tail; i < n; ++i) {
      const auto& r = h.rows[i];
      double p = 0.0;
      for (double v : r.prices) p += v;
      price += p / r.prices.size();
      double q = 0.0;
      for (double v : r.buyer_qty) q += v;
      qty += q / r.buyer_qty.size();
      double su = 0.0;
      for (double v : r.seller_rewards) su += v;
      seller_u += su / r.seller_rewards.size();
      double bu = 0.0;
      for (double v : r.buyer_rewards) bu += v;
      buyer_u += bu / r.buyer_rewards.size();
      const int zc = std::max(1, coalition_count(r.partition));
      coal_u += bu / zc;  // buyer rewards sum exactly to coalition utilities
      ++count;
    }
  }
  if (count == 0) throw std::domain_error("summarize: no rows");
  row.mean_price = price / count;
  row.mean_qty_per_buyer = qty / count;
  row.mean_seller_utility = seller_u / count;
  row.mean_buyer_utility = buyer_u / count;
  row.mean_coalition_utility = coal_u / count;
  return row;
}

std::vector<TrainingHistory> run_cell(const ScenarioConfig& scenario, Strategy alg,
                                      const std::vector<std::uint64_t>& seeds) {
  std::vector<TrainingHistory> runs;
  runs.reserve(seeds.size());
  for (std::uint64_t seed : seeds) runs.push_back(train_strategy(scenario, alg, seed));
  return runs;
}

ScenarioConfig scenario_for(const ExperimentConfig& cfg, SweepAxis axis,
                            double value) {
  ScenarioConfig s = cfg.scenario;
  switch (axis) {
    case SweepAxis::Bandwidth: {
      const double hz = value * 1e6;
      s.radio.num_prbs =
          static_cast<int>(std::lround(hz / s.radio.prb_bandwidth_hz));
      s.radio.system_bandwidth_hz = s.radio.num_prbs * s.radio.prb_bandwidth_hz;
      break;
    }
    case SweepAxis::NumSellers:
      s.num_sellers = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::NumBuyers:
      s.num_buyers = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::None:
      break;
  }
  s.validate();
  return s;
}

const SweepRow& find_row(const SweepReport& report, Strategy alg, double value) {
  for (const auto& r : report.rows)
    if (r.algorithm == alg && r.sweep_value == value) return r;
  throw std::logic_error("find_row: missing sweep cell");
}

}  // namespace

ConvergenceReport run_convergence_experiment(const ExperimentConfig& cfg,
                                             std::vector<TrainingHistory>* histories) {
  cfg.validate();
  ConvergenceReport report;
  report.algorithms = cfg.algorithms;
  report.config_hash_value = config_hash(cfg);
  const int iters = cfg.scenario.training.iterations;
  report.window_size = std::min(250, iters);
  report.num_windows = iters / report.window_size;
  if (report.num_windows < 1)
    throw std::invalid_argument("run_convergence_experiment: run too short");

  for (Strategy alg : cfg.algorithms) {
    std::vector<double> wins(report.num_windows, 0.0);
    for (std::uint64_t seed : cfg.seeds) {
      TrainingHistory h = train_strategy(cfg.scenario, alg, seed);
      for (int w = 0; w < report.num_windows; ++w)
        wins[w] += window_mean_system_utility(h, w * report.window_size,
                                              (w + 1) * report.window_size);
      if (histories) histories->push_back(std::move(h));
    }
    for (double& v : wins) v /= static_cast<double>(cfg.seeds.size());
    report.window_means.push_back(std::move(wins));
  }

  // Joint min-max normalization so the curves are comparable.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& wins : report.window_means)
    for (double v : wins) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const double span = hi > lo ? hi - lo : 1.0;
  for (const auto& wins : report.window_means) {
    std::vector<double> norm(wins.size());
    for (size_t w = 0; w < wins.size(); ++w) norm[w] = (wins[w] - lo) / span;
    report.normalized.push_back(std::move(norm));
  }

  // Final-window ordering in the declared algorithm order.
  report.ordering_ok = true;
  const int last = report.num_windows - 1;
  for (size_t a = 0; a + 1 < report.window_means.size(); ++a)
    if (!(report.window_means[a][last] > report.window_means[a + 1][last]))
      report.ordering_ok = false;

  // Lead algorithm reaches 95% of its final plateau by iteration 1000
  // (window index 1000/window_size - 1), measured on the normalized curve.
  if (!report.normalized.empty()) {
    const auto& lead = report.normalized.front();
    const int by_window =
        std::min(last, std::max(0, 1000 / report.window_size - 1));
    report.plateau_ok = lead[by_window] >= 0.95 * lead[last];
  }
  return report;
}

SweepReport run_pricing_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_axis != SweepAxis::Bandwidth)
    throw std::invalid_argument("run_pricing_sweep: sweep axis must be bandwidth");
  SweepReport report;
  report.axis = cfg.sweep_axis;
  report.config_hash_value = config_hash(cfg);
  std::vector<double> values = cfg.sweep_values;
  std::sort(values.begin(), values.end());

  for (Strategy alg : cfg.algorithms)
    for (double v : values)
      report.rows.push_back(summarize(
          run_cell(scenario_for(cfg, cfg.sweep_axis, v), alg, cfg.seeds), v, alg));

  report.monotonic_price_ok = true;
  report.monotonic_qty_ok = true;
  if (values.size() < 2) return report;  // degenerate sweep: nothing to compare
  for (Strategy alg : cfg.algorithms) {
    if (alg != Strategy::CostMaddpg && alg != Strategy::StMaddpg) continue;
    for (size_t i = 0; i + 1 < values.size(); ++i) {
      const auto& a = find_row(report, alg, values[i]);
      const auto& b = find_row(report, alg, values[i + 1]);
      if (b.mean_price > a.mean_price + 1e-9) report.monotonic_price_ok = false;
      if (b.mean_qty_per_buyer + 1e-9 < a.mean_qty_per_buyer)
        report.monotonic_qty_ok = false;
    }
  }
  return report;
}

SweepReport run_population_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_axis != SweepAxis::NumSellers && cfg.sweep_axis != SweepAxis::NumBuyers)
    throw std::invalid_argument(
        "run_population_sweep: sweep axis must be num_sellers or num_buyers");
  SweepReport report;
  report.axis = cfg.sweep_axis;
  report.config_hash_value = config_hash(cfg);
  std::vector<double> values = cfg.sweep_values;
  std::sort(values.begin(), values.end());

  for (Strategy alg : cfg.algorithms)
    for (double v : values)
      report.rows.push_back(summarize(
          run_cell(scenario_for(cfg, cfg.sweep_axis, v), alg, cfg.seeds), v, alg));

  const double vmax = values.back();
  if (cfg.sweep_axis == SweepAxis::NumSellers) {
    report.seller_utility_decreasing_ok = true;
    for (Strategy alg : {Strategy::CostMaddpg, Strategy::StMaddpg}) {
      if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), alg) ==
          cfg.algorithms.end())
        continue;
      for (size_t i = 0; i + 1 < values.size(); ++i) {
        const auto& a = find_row(report, alg, values[i]);
        const auto& b = find_row(report, alg, values[i + 1]);
        if (b.mean_seller_utility > a.mean_seller_utility + 1e-9)
          report.seller_utility_decreasing_ok = false;
      }
    }
    const auto& cost = find_row(report, Strategy::CostMaddpg, vmax);
    const auto& st = find_row(report, Strategy::StMaddpg, vmax);
    report.cost_below_st_at_max_sellers =
        cost.mean_seller_utility <= st.mean_seller_utility + 1e-9;
  } else {
    const auto& cost = find_row(report, Strategy::CostMaddpg, vmax);
    const auto& st = find_row(report, Strategy::StMaddpg, vmax);
    report.cost_above_st_buyers_at_max =
        cost.mean_coalition_utility > st.mean_buyer_utility;
  }
  return report;
}

void emit_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "algorithm,window,iter_begin,iter_end,mean_system_utility,normalized\n";
  for (size_t a = 0; a < report.algorithms.size(); ++a)
    for (int w = 0; w < report.num_windows; ++w) {
      os << to_string(report.algorithms[a]) << ',' << w << ','
         << w * report.window_size << ',' << (w + 1) * report.window_size << ',';
      put_csv(os, report.window_means[a][w]);
      os << ',';
      put_csv(os, report.normalized[a][w]);
      os << '\n';
    }
}

void emit_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "axis,sweep_value,algorithm,mean_price,mean_qty_per_buyer,"
        "mean_seller_utility,mean_buyer_utility,mean_coalition_utility\n";
  const char* axis = report.axis == SweepAxis::Bandwidth     ? "bandwidth_mhz"
                     : report.axis == SweepAxis::NumSellers  ? "num_sellers"
                     : report.axis == SweepAxis::NumBuyers   ? "num_buyers"
                                                             : "none";
  for (const auto& r : report.rows) {
    os << axis << ',';
    put_csv(os, r.sweep_value);
    os << ',' << to_string(r.algorithm) << ',';
    put_csv(os, r.mean_price);
    os << ',';
    put_csv(os, r.mean_qty_per_buyer);
    os << ',';
    put_csv(os, r.mean_seller_utility);
    os << ',';
    put_csv(os, r.mean_buyer_utility);
    os << ',';
    put_csv(os, r.mean_coalition_utility);
    os << '\n';
  }
}

}  // namespace slicemkt
