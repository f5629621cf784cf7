#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "slicemkt/config.hpp"
#include "slicemkt/trainer.hpp"

namespace slicemkt {

// Convergence comparison of all configured algorithms, reported as
// window-averaged (default 250 iterations) system utility, min-max
// normalized jointly across algorithms.
struct ConvergenceReport {
  std::vector<Strategy> algorithms;
  int window_size = 250;
  int num_windows = 0;
  std::vector<std::vector<double>> window_means;  // [algorithm][window], raw
  std::vector<std::vector<double>> normalized;    // joint min-max of the above
  bool ordering_ok = false;  // final window ranks algorithms in declared order
  bool plateau_ok = false;   // lead algorithm at >= 95% of plateau by iter 1000
  std::uint64_t config_hash_value = 0;
};

// Per-cell summary of a sweep: post-convergence means over the final fifth
// of the run, averaged over seeds.
struct SweepRow {
  double sweep_value = 0.0;
  Strategy algorithm = Strategy::CostMaddpg;
  double mean_price = 0.0;              // across sellers
  double mean_qty_per_buyer = 0.0;      // PRBs bought
  double mean_seller_utility = 0.0;     // per seller
  double mean_buyer_utility = 0.0;      // per buyer
  double mean_coalition_utility = 0.0;  // per coalition
};

struct SweepReport {
  SweepAxis axis = SweepAxis::None;
  std::vector<SweepRow> rows;  // grouped by algorithm, sweep values ascending
  // pricing sweep (bandwidth axis)
  bool monotonic_price_ok = false;  // non-increasing in bandwidth
  bool monotonic_qty_ok = false;    // non-decreasing in bandwidth
  // population sweeps
  bool seller_utility_decreasing_ok = false;
  bool cost_below_st_at_max_sellers = false;
  bool cost_above_st_buyers_at_max = false;
  std::uint64_t config_hash_value = 0;
};

// Runs every algorithm over the seed list. Optionally hands back all raw
// histories (in algorithm-major, seed-minor order) for CSV export.
ConvergenceReport run_convergence_experiment(
    const ExperimentConfig& cfg, std::vector<TrainingHistory>* histories = nullptr);

// sweep_values are bandwidths in MHz; the PRB width stays fixed so the PRB
// count scales with bandwidth.
SweepReport run_pricing_sweep(const ExperimentConfig& cfg);

// sweep_values are seller or buyer counts, per cfg.sweep_axis.
SweepReport run_population_sweep(const ExperimentConfig& cfg);

// Deterministic CSV emission (stable column order, %.17g values).
void emit_convergence_csv(std::ostream& os, const ConvergenceReport& report);
void emit_sweep_csv(std::ostream& os, const SweepReport& report);

}  // namespace slicemkt
