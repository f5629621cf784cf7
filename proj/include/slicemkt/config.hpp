#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicemkt/netmodel.hpp"

namespace slicemkt {

enum class Strategy { CostMaddpg, StMaddpg, SaDdpg, Random };
enum class SweepAxis { None, Bandwidth, NumSellers, NumBuyers };

const char* to_string(Strategy s);

struct TrainingParams {
  int iterations = 2500;
  int batch_size = 128;
  int replay_capacity = 100000;
  int warmup = 300;  // transitions collected before learning starts
  double gamma = 0.9;
  double tau = 0.001;
  double lr_actor = 0.001;
  double lr_critic = 0.001;
  double noise_initial = 0.3;
  double noise_floor = 0.01;
  double noise_decay_fraction = 0.6;
  double reward_scale = 0.01;  // scales rewards entering the networks only
  int own_action_points = 16;  // leader target-max discretization
};

// One simulated market scenario. Default setup:
// 5 tenants (2 eMBB, 2 uRLLC, 1 mMTC), 50 UEs each, 20 MHz / 100 PRBs,
// 30 dBm, -174 dBm/Hz, 500 m x 500 m, price range [1, 2] on 100 points,
// quantities 1..50.
struct ScenarioConfig {
  RadioConfig radio;           // prb_bandwidth_hz derived as bandwidth / PRBs
  double area_m = 500.0;
  int num_sellers = 2;
  int num_buyers = 3;
  int ues_per_tenant = 50;
  int buyer_base_prbs = 2;     // holdings a buyer starts each slot with
  int buyer_required_prbs = 30;
  double price_min = 1.0;
  double price_max = 2.0;
  int price_points = 100;
  int qty_max = 50;
  double mno_unit_price = 1.5;
  double signaling_cost_coeff = 2.0;
  double qos_value_coeff = 100.0;
  double reputation_min = 0.8;
  double reputation_max = 1.0;
  double qos_eta = 1.0;
  double packet_size_bits = 1000.0;
  double arrival_embb_pps = 100.0;
  double arrival_urllc_pps = 50.0;
  double arrival_mmtc_pps = 5.0;
  double r_min_embb_bps = 500e3;  // per UE
  double r_min_mmtc_bps = 15e3;   // per UE
  double tau_max_urllc_s = 0.010; // per UE (mean across the slice)
  TrainingParams training;

  void validate() const;
};

struct ExperimentConfig {
  std::string scenario_name = "default";
  ScenarioConfig scenario;
  std::vector<Strategy> algorithms = {Strategy::CostMaddpg, Strategy::StMaddpg,
                                      Strategy::SaDdpg, Strategy::Random};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  SweepAxis sweep_axis = SweepAxis::None;
  std::vector<double> sweep_values;
  std::string out_dir = "out";

  void validate() const;
};

// Built-in defaults; an empty config file yields exactly this.
ExperimentConfig default_experiment();

// Strict key=value parser ('#' comments, blank lines allowed). Unknown keys
// or malformed values raise std::runtime_error with a line diagnostic.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Stable content hash over every scenario and experiment field.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace slicemkt
