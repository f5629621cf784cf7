#include "slicemkt/config.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slicemkt {

namespace {

void hash_mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

std::uint64_t double_bits(double d) {
  std::uint64_t u;
  std::memcpy(&u, &d, sizeof(u));
  return u;
}

[[noreturn]] void fail(int line_no, const std::string& line, const std::string& why) {
  std::ostringstream os;
  os << "config error at line " << line_no << " (\"" << line << "\"): " << why;
  throw std::runtime_error(os.str());
}

double parse_double(int line_no, const std::string& line, const std::string& v) {
  size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(line_no, line, "not a number");
  }
  if (pos != v.size()) fail(line_no, line, "trailing characters after number");
  return d;
}

int parse_int(int line_no, const std::string& line, const std::string& v) {
  size_t pos = 0;
  long n = 0;
  try {
    n = std::stol(v, &pos);
  } catch (const std::exception&) {
    fail(line_no, line, "not an integer");
  }
  if (pos != v.size()) fail(line_no, line, "trailing characters after integer");
  return static_cast<int>(n);
}

Strategy parse_strategy(int line_no, const std::string& line, const std::string& v) {
  if (v == "cost") return Strategy::CostMaddpg;
  if (v == "st") return Strategy::StMaddpg;
  if (v == "sa") return Strategy::SaDdpg;
  if (v == "random") return Strategy::Random;
  fail(line_no, line, "unknown algorithm '" + v + "' (expected cost|st|sa|random)");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::CostMaddpg: return "cost-maddpg";
    case Strategy::StMaddpg: return "st-maddpg";
    case Strategy::SaDdpg: return "sa-ddpg";
    case Strategy::Random: return "random";
  }
  return "?";
}

void ScenarioConfig::validate() const {
  radio.validate();
  if (area_m <= 0) throw std::invalid_argument("ScenarioConfig: non-positive area");
  if (num_sellers < 1) throw std::invalid_argument("ScenarioConfig: need at least one seller");
  if (num_buyers < 1) throw std::invalid_argument("ScenarioConfig: need at least one buyer");
  if (ues_per_tenant < 1) throw std::invalid_argument("ScenarioConfig: need UEs per tenant");
  if (buyer_base_prbs < 0 || buyer_required_prbs < 0)
    throw std::invalid_argument("ScenarioConfig: negative PRB counts");
  const int buyer_total = buyer_base_prbs * num_buyers;
  if (buyer_total + num_sellers > radio.num_prbs)
    throw std::invalid_argument(
        "ScenarioConfig: PRB pool too small for the tenant population");
  if (price_min <= 0 || price_max <= price_min)
    throw std::invalid_argument("ScenarioConfig: bad price range");
  if (price_points < 2) throw std::invalid_argument("ScenarioConfig: too few price points");
  if (qty_max < 1) throw std::invalid_argument("ScenarioConfig: bad quantity range");
  if (mno_unit_price <= 0)
    throw std::invalid_argument("ScenarioConfig: MNO price must be positive");
  if (signaling_cost_coeff < 0 || qos_value_coeff < 0)
    throw std::invalid_argument("ScenarioConfig: negative cost/value coefficient");
  if (reputation_min < 0 || reputation_max > 1 || reputation_max < reputation_min)
    throw std::invalid_argument("ScenarioConfig: reputation range outside [0,1]");
  if (qos_eta <= 0) throw std::invalid_argument("ScenarioConfig: non-positive eta");
  if (packet_size_bits <= 0 || arrival_embb_pps < 0 || arrival_urllc_pps < 0 ||
      arrival_mmtc_pps < 0)
    throw std::invalid_argument("ScenarioConfig: bad traffic parameters");
  if (r_min_embb_bps <= 0 || r_min_mmtc_bps <= 0 || tau_max_urllc_s <= 0)
    throw std::invalid_argument("ScenarioConfig: bad QoS thresholds");
  const auto& t = training;
  if (t.iterations < 1 || t.batch_size < 1 || t.replay_capacity < t.batch_size ||
      t.warmup < 0)
    throw std::invalid_argument("ScenarioConfig: bad training sizes");
  if (t.gamma < 0 || t.gamma >= 1 || t.tau <= 0 || t.tau > 1)
    throw std::invalid_argument("ScenarioConfig: gamma/tau out of range");
  if (t.lr_actor < 0 || t.lr_critic < 0)
    throw std::invalid_argument("ScenarioConfig: negative learning rate");
  if (t.noise_initial < 0 || t.noise_floor < 0 || t.noise_decay_fraction <= 0 ||
      t.noise_decay_fraction > 1)
    throw std::invalid_argument("ScenarioConfig: bad noise schedule");
  if (t.reward_scale <= 0)
    throw std::invalid_argument("ScenarioConfig: non-positive reward scale");
  if (t.own_action_points < 2)
    throw std::invalid_argument("ScenarioConfig: own-action grid too small");
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (algorithms.empty()) throw std::invalid_argument("ExperimentConfig: no algorithms");
  if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: no seeds");
  if (sweep_axis != SweepAxis::None && sweep_values.empty())
    throw std::invalid_argument("ExperimentConfig: sweep axis without values");
  if (out_dir.empty()) throw std::invalid_argument("ExperimentConfig: empty output dir");
}

ExperimentConfig default_experiment() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  double bandwidth_hz = cfg.scenario.radio.system_bandwidth_hz;
  bool bandwidth_set = false, prbs_set = false;

  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, raw, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) fail(line_no, raw, "empty key or value");

    auto& s = cfg.scenario;
    if (key == "bandwidth_mhz") {
      bandwidth_hz = parse_double(line_no, raw, val) * 1e6;
      bandwidth_set = true;
    } else if (key == "num_prbs") {
      s.radio.num_prbs = parse_int(line_no, raw, val);
      prbs_set = true;
    } else if (key == "bs_power_dbm") {
      s.radio.bs_power_dbm = parse_double(line_no, raw, val);
    } else if (key == "noise_density_dbm_hz") {
      s.radio.noise_density_dbm_hz = parse_double(line_no, raw, val);
    } else if (key == "carrier_freq_mhz") {
      s.radio.carrier_freq_mhz = parse_double(line_no, raw, val);
    } else if (key == "area_m") {
      s.area_m = parse_double(line_no, raw, val);
    } else if (key == "num_sellers") {
      s.num_sellers = parse_int(line_no, raw, val);
    } else if (key == "num_buyers") {
      s.num_buyers = parse_int(line_no, raw, val);
    } else if (key == "ues_per_tenant") {
      s.ues_per_tenant = parse_int(line_no, raw, val);
    } else if (key == "buyer_base_prbs") {
      s.buyer_base_prbs = parse_int(line_no, raw, val);
    } else if (key == "buyer_required_prbs") {
      s.buyer_required_prbs = parse_int(line_no, raw, val);
    } else if (key == "price_min") {
      s.price_min = parse_double(line_no, raw, val);
    } else if (key == "price_max") {
      s.price_max = parse_double(line_no, raw, val);
    } else if (key == "price_points") {
      s.price_points = parse_int(line_no, raw, val);
    } else if (key == "qty_max") {
      s.qty_max = parse_int(line_no, raw, val);
    } else if (key == "mno_unit_price") {
      s.mno_unit_price = parse_double(line_no, raw, val);
    } else if (key == "signaling_cost_coeff") {
      s.signaling_cost_coeff = parse_double(line_no, raw, val);
    } else if (key == "qos_value_coeff") {
      s.qos_value_coeff = parse_double(line_no, raw, val);
    } else if (key == "reputation_min") {
      s.reputation_min = parse_double(line_no, raw, val);
    } else if (key == "reputation_max") {
      s.reputation_max = parse_double(line_no, raw, val);
    } else if (key == "qos_eta") {
      s.qos_eta = parse_double(line_no, raw, val);
    } else if (key == "packet_size_bits") {
      s.packet_size_bits = parse_double(line_no, raw, val);
    } else if (key == "arrival_embb_pps") {
      s.arrival_embb_pps = parse_double(line_no, raw, val);
    } else if (key == "arrival_urllc_pps") {
      s.arrival_urllc_pps = parse_double(line_no, raw, val);
    } else if (key == "arrival_mmtc_pps") {
      s.arrival_mmtc_pps = parse_double(line_no, raw, val);
    } else if (key == "r_min_embb_bps") {
      s.r_min_embb_bps = parse_double(line_no, raw, val);
    } else if (key == "r_min_mmtc_bps") {
      s.r_min_mmtc_bps = parse_double(line_no, raw, val);
    } else if (key == "tau_max_urllc_s") {
      s.tau_max_urllc_s = parse_double(line_no, raw, val);
    } else if (key == "iterations") {
      s.training.iterations = parse_int(line_no, raw, val);
    } else if (key == "batch_size") {
      s.training.batch_size = parse_int(line_no, raw, val);
    } else if (key == "replay_capacity") {
      s.training.replay_capacity = parse_int(line_no, raw, val);
    } else if (key == "warmup") {
      s.training.warmup = parse_int(line_no, raw, val);
    } else if (key == "gamma") {
      s.training.gamma = parse_double(line_no, raw, val);
    } else if (key == "tau") {
      s.training.tau = parse_double(line_no, raw, val);
    } else if (key == "lr_actor") {
      s.training.lr_actor = parse_double(line_no, raw, val);
    } else if (key == "lr_critic") {
      s.training.lr_critic = parse_double(line_no, raw, val);
    } else if (key == "noise_initial") {
      s.training.noise_initial = parse_double(line_no, raw, val);
    } else if (key == "noise_floor") {
      s.training.noise_floor = parse_double(line_no, raw, val);
    } else if (key == "noise_decay_fraction") {
      s.training.noise_decay_fraction = parse_double(line_no, raw, val);
    } else if (key == "reward_scale") {
      s.training.reward_scale = parse_double(line_no, raw, val);
    } else if (key == "own_action_points") {
      s.training.own_action_points = parse_int(line_no, raw, val);
    } else if (key == "scenario_name") {
      cfg.scenario_name = val;
    } else if (key == "algorithms") {
      cfg.algorithms.clear();
      for (const auto& item : split_list(val))
        cfg.algorithms.push_back(parse_strategy(line_no, raw, trim(item)));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& item : split_list(val))
        cfg.seeds.push_back(
            static_cast<std::uint64_t>(parse_int(line_no, raw, trim(item))));
    } else if (key == "sweep_axis") {
      if (val == "none") cfg.sweep_axis = SweepAxis::None;
      else if (val == "bandwidth") cfg.sweep_axis = SweepAxis::Bandwidth;
      else if (val == "num_sellers") cfg.sweep_axis = SweepAxis::NumSellers;
      else if (val == "num_buyers") cfg.sweep_axis = SweepAxis::NumBuyers;
      else fail(line_no, raw, "unknown sweep axis");
    } else if (key == "sweep_values") {
      cfg.sweep_values.clear();
      for (const auto& item : split_list(val))
        cfg.sweep_values.push_back(parse_double(line_no, raw, trim(item)));
    } else if (key == "out_dir") {
      cfg.out_dir = val;
    } else {
      fail(line_no, raw, "unknown key '" + key + "'");
    }
  }

  // The PRB grid must tile the bandwidth: derive the PRB width.
  if (bandwidth_set || prbs_set) {
    cfg.scenario.radio.system_bandwidth_hz = bandwidth_hz;
    cfg.scenario.radio.prb_bandwidth_hz =
        bandwidth_hz / cfg.scenario.radio.num_prbs;
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("config validation: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto& s = cfg.scenario;
  for (double d :
       {s.radio.system_bandwidth_hz, s.radio.prb_bandwidth_hz, s.radio.bs_power_dbm,
        s.radio.noise_density_dbm_hz, s.radio.carrier_freq_mhz, s.area_m,
        s.price_min, s.price_max, s.mno_unit_price, s.signaling_cost_coeff,
        s.qos_value_coeff, s.reputation_min, s.reputation_max, s.qos_eta,
        s.packet_size_bits, s.arrival_embb_pps, s.arrival_urllc_pps,
        s.arrival_mmtc_pps, s.r_min_embb_bps, s.r_min_mmtc_bps, s.tau_max_urllc_s,
        s.training.gamma, s.training.tau, s.training.lr_actor, s.training.lr_critic,
        s.training.noise_initial, s.training.noise_floor,
        s.training.noise_decay_fraction, s.training.reward_scale})
    hash_mix(h, double_bits(d));
  for (int i :
       {s.radio.num_prbs, s.num_sellers, s.num_buyers, s.ues_per_tenant,
        s.buyer_base_prbs, s.buyer_required_prbs, s.price_points, s.qty_max,
        s.training.iterations, s.training.batch_size, s.training.replay_capacity,
        s.training.warmup, s.training.own_action_points})
    hash_mix(h, static_cast<std::uint64_t>(i));
  for (char c : cfg.scenario_name) hash_mix(h, static_cast<std::uint64_t>(c));
  for (Strategy a : cfg.algorithms) hash_mix(h, static_cast<std::uint64_t>(a));
  for (std::uint64_t sd : cfg.seeds) hash_mix(h, sd);
  hash_mix(h, static_cast<std::uint64_t>(cfg.sweep_axis));
  for (double v : cfg.sweep_values) hash_mix(h, double_bits(v));
  return h;
}

}  // namespace slicemkt
