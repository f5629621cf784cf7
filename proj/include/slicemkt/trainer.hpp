#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "slicemkt/config.hpp"
#include "slicemkt/env.hpp"

namespace slicemkt {

struct IterationRow {
  int iteration = 0;
  std::vector<double> prices;          // currency, per seller
  std::vector<double> buyer_qty;       // PRBs, per buyer
  std::vector<double> seller_rewards;  // unscaled utilities
  std::vector<double> buyer_rewards;
  double system_utility = 0.0;  // exactly the sum of the reward columns
  double critic_loss_mean = 0.0;
  double actor_q_mean = 0.0;
  double noise_scale = 0.0;
  int clip_violations = 0;
  double se_gap = -1.0;  // normalized distance to the oracle SE; -1 if none
  std::string partition;
};

struct TrainingHistory {
  Strategy strategy = Strategy::CostMaddpg;
  std::uint64_t seed = 0;
  int num_sellers = 0;
  int num_buyers = 0;
  bool aborted = false;  // training diverged; rows hold the partial history
  std::vector<IterationRow> rows;
};

// Runs one full training (or random-play) session. Deterministic in
// (config, strategy, seed).
TrainingHistory train_strategy(const ScenarioConfig& cfg, Strategy strategy,
                               std::uint64_t seed);

// One row per iteration, documented header, %.17g numbers; byte-deterministic.
void history_to_csv(std::ostream& os, const TrainingHistory& h);

// Mean system utility over rows [from, to).
double window_mean_system_utility(const TrainingHistory& h, int from, int to);

}  // namespace slicemkt
