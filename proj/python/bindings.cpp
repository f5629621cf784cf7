// Python bindings for the core simulator: configuration, environment,
// equilibrium oracle, training, and the experiment runners.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "slicemkt/coalition.hpp"
#include "slicemkt/config.hpp"
#include "slicemkt/env.hpp"
#include "slicemkt/experiments.hpp"
#include "slicemkt/netmodel.hpp"
#include "slicemkt/stackelberg.hpp"
#include "slicemkt/trainer.hpp"

namespace py = pybind11;
using namespace slicemkt;

namespace {

std::string history_csv(const TrainingHistory& h) {
  std::ostringstream os;
  history_to_csv(os, h);
  return os.str();
}

std::string convergence_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  emit_convergence_csv(os, r);
  return os.str();
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  emit_sweep_csv(os, r);
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Network-slicing resource-trading market simulator";

  py::enum_<Strategy>(m, "Strategy")
      .value("COST_MADDPG", Strategy::CostMaddpg)
      .value("ST_MADDPG", Strategy::StMaddpg)
      .value("SA_DDPG", Strategy::SaDdpg)
      .value("RANDOM", Strategy::Random);

  py::enum_<SweepAxis>(m, "SweepAxis")
      .value("NONE", SweepAxis::None)
      .value("BANDWIDTH", SweepAxis::Bandwidth)
      .value("NUM_SELLERS", SweepAxis::NumSellers)
      .value("NUM_BUYERS", SweepAxis::NumBuyers);

  py::enum_<MarketMode>(m, "MarketMode")
      .value("COALITION", MarketMode::Coalition)
      .value("SINGLETON", MarketMode::Singleton);

  py::class_<RadioConfig>(m, "RadioConfig")
      .def(py::init<>())
      .def_readwrite("system_bandwidth_hz", &RadioConfig::system_bandwidth_hz)
      .def_readwrite("num_prbs", &RadioConfig::num_prbs)
      .def_readwrite("prb_bandwidth_hz", &RadioConfig::prb_bandwidth_hz)
      .def_readwrite("bs_power_dbm", &RadioConfig::bs_power_dbm)
      .def_readwrite("noise_density_dbm_hz", &RadioConfig::noise_density_dbm_hz)
      .def_readwrite("carrier_freq_mhz", &RadioConfig::carrier_freq_mhz);

  py::class_<TrainingParams>(m, "TrainingParams")
      .def(py::init<>())
      .def_readwrite("iterations", &TrainingParams::iterations)
      .def_readwrite("batch_size", &TrainingParams::batch_size)
      .def_readwrite("replay_capacity", &TrainingParams::replay_capacity)
      .def_readwrite("warmup", &TrainingParams::warmup)
      .def_readwrite("gamma", &TrainingParams::gamma)
      .def_readwrite("tau", &TrainingParams::tau)
      .def_readwrite("lr_actor", &TrainingParams::lr_actor)
      .def_readwrite("lr_critic", &TrainingParams::lr_critic)
      .def_readwrite("noise_initial", &TrainingParams::noise_initial)
      .def_readwrite("noise_floor", &TrainingParams::noise_floor)
      .def_readwrite("noise_decay_fraction", &TrainingParams::noise_decay_fraction)
      .def_readwrite("reward_scale", &TrainingParams::reward_scale)
      .def_readwrite("own_action_points", &TrainingParams::own_action_points);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("radio", &ScenarioConfig::radio)
      .def_readwrite("area_m", &ScenarioConfig::area_m)
      .def_readwrite("num_sellers", &ScenarioConfig::num_sellers)
      .def_readwrite("num_buyers", &ScenarioConfig::num_buyers)
      .def_readwrite("ues_per_tenant", &ScenarioConfig::ues_per_tenant)
      .def_readwrite("buyer_base_prbs", &ScenarioConfig::buyer_base_prbs)
      .def_readwrite("buyer_required_prbs", &ScenarioConfig::buyer_required_prbs)
      .def_readwrite("price_min", &ScenarioConfig::price_min)
      .def_readwrite("price_max", &ScenarioConfig::price_max)
      .def_readwrite("price_points", &ScenarioConfig::price_points)
      .def_readwrite("qty_max", &ScenarioConfig::qty_max)
      .def_readwrite("mno_unit_price", &ScenarioConfig::mno_unit_price)
      .def_readwrite("signaling_cost_coeff", &ScenarioConfig::signaling_cost_coeff)
      .def_readwrite("qos_value_coeff", &ScenarioConfig::qos_value_coeff)
      .def_readwrite("reputation_min", &ScenarioConfig::reputation_min)
      .def_readwrite("reputation_max", &ScenarioConfig::reputation_max)
      .def_readwrite("qos_eta", &ScenarioConfig::qos_eta)
      .def_readwrite("training", &ScenarioConfig::training)
      .def("validate", &ScenarioConfig::validate);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("scenario_name", &ExperimentConfig::scenario_name)
      .def_readwrite("scenario", &ExperimentConfig::scenario)
      .def_readwrite("algorithms", &ExperimentConfig::algorithms)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_readwrite("sweep_axis", &ExperimentConfig::sweep_axis)
      .def_readwrite("sweep_values", &ExperimentConfig::sweep_values)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def("validate", &ExperimentConfig::validate);

  m.def("default_experiment", &default_experiment);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("config_hash", &config_hash, py::arg("config"));
  m.def("strategy_name",
        [](Strategy s) { return std::string(to_string(s)); });

  // Radio / QoS formulas.
  m.def("path_loss_db", &path_loss_db, py::arg("distance_m"), py::arg("freq_mhz"));
  m.def("ue_delay_s", &ue_delay_s, py::arg("service_rate_pps"),
        py::arg("arrival_rate_pps"));

  py::class_<StepResult>(m, "StepResult")
      .def_readonly("prices", &StepResult::prices)
      .def_readonly("buyer_qty", &StepResult::buyer_qty)
      .def_readonly("coalition_qty", &StepResult::coalition_qty)
      .def_readonly("coalition_seller", &StepResult::coalition_seller)
      .def_readonly("seller_rewards", &StepResult::seller_rewards)
      .def_readonly("coalition_utilities", &StepResult::coalition_utilities)
      .def_readonly("buyer_rewards", &StepResult::buyer_rewards)
      .def_readonly("system_utility", &StepResult::system_utility)
      .def_readonly("clip_violations", &StepResult::clip_violations)
      .def_property_readonly("partition", [](const StepResult& r) {
        return r.partition.describe();
      });

  py::class_<MarketEnv>(m, "MarketEnv")
      .def(py::init<const ScenarioConfig&, std::uint64_t>(), py::arg("config"),
           py::arg("seed"))
      .def_property_readonly("num_sellers", &MarketEnv::num_sellers)
      .def_property_readonly("num_buyers", &MarketEnv::num_buyers)
      .def("buyer_satisfaction", &MarketEnv::buyer_satisfaction, py::arg("buyer"),
           py::arg("extra_prbs"))
      .def("price_from_action", &MarketEnv::price_from_action, py::arg("raw"))
      .def("qty_from_action", &MarketEnv::qty_from_action, py::arg("raw"))
      .def("step", &MarketEnv::step, py::arg("seller_actions"),
           py::arg("buyer_actions"), py::arg("mode") = MarketMode::Coalition)
      .def("coalition_trade_utility", &MarketEnv::coalition_trade_utility,
           py::arg("members"), py::arg("price"), py::arg("total_qty"))
      .def("member_allocation", &MarketEnv::member_allocation, py::arg("members"),
           py::arg("total_qty"))
      .def("solve_equilibrium", [](const MarketEnv& env, MarketMode mode) {
        return solve_se_bruteforce(env.build_game(mode));
      }, py::arg("mode") = MarketMode::Coalition)
      .def("verify_equilibrium", [](const MarketEnv& env, MarketMode mode,
                                    const EquilibriumSolution& sol) {
        return verify_se(env.build_game(mode), sol);
      }, py::arg("mode"), py::arg("solution"));

  py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
      .def_readonly("prices", &EquilibriumSolution::prices)
      .def_readonly("quantities", &EquilibriumSolution::quantities)
      .def_readonly("leader_utilities", &EquilibriumSolution::leader_utilities)
      .def_readonly("follower_utilities", &EquilibriumSolution::follower_utilities)
      .def_readonly("epsilon_equilibrium", &EquilibriumSolution::epsilon_equilibrium)
      .def_readonly("epsilon", &EquilibriumSolution::epsilon);

  py::class_<SeCheck>(m, "SeCheck")
      .def_readonly("ok", &SeCheck::pass)
      .def_readonly("max_gain", &SeCheck::max_gain);

  py::class_<IterationRow>(m, "IterationRow")
      .def_readonly("iteration", &IterationRow::iteration)
      .def_readonly("prices", &IterationRow::prices)
      .def_readonly("buyer_qty", &IterationRow::buyer_qty)
      .def_readonly("seller_rewards", &IterationRow::seller_rewards)
      .def_readonly("buyer_rewards", &IterationRow::buyer_rewards)
      .def_readonly("system_utility", &IterationRow::system_utility)
      .def_readonly("critic_loss", &IterationRow::critic_loss_mean)
      .def_readonly("actor_q", &IterationRow::actor_q_mean)
      .def_readonly("noise", &IterationRow::noise_scale)
      .def_readonly("se_gap", &IterationRow::se_gap)
      .def_readonly("partition", &IterationRow::partition);

  py::class_<TrainingHistory>(m, "TrainingHistory")
      .def_readonly("strategy", &TrainingHistory::strategy)
      .def_readonly("seed", &TrainingHistory::seed)
      .def_readonly("aborted", &TrainingHistory::aborted)
      .def_readonly("rows", &TrainingHistory::rows)
      .def("to_csv", &history_csv)
      .def("window_mean", &window_mean_system_utility, py::arg("begin"),
           py::arg("end"));

  m.def("train_strategy", &train_strategy, py::arg("config"), py::arg("strategy"),
        py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("algorithms", &ConvergenceReport::algorithms)
      .def_readonly("window_size", &ConvergenceReport::window_size)
      .def_readonly("num_windows", &ConvergenceReport::num_windows)
      .def_readonly("window_means", &ConvergenceReport::window_means)
      .def_readonly("normalized", &ConvergenceReport::normalized)
      .def_readonly("ordering_ok", &ConvergenceReport::ordering_ok)
      .def_readonly("plateau_ok", &ConvergenceReport::plateau_ok)
      .def("to_csv", &convergence_csv);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("sweep_value", &SweepRow::sweep_value)
      .def_readonly("algorithm", &SweepRow::algorithm)
      .def_readonly("mean_price", &SweepRow::mean_price)
      .def_readonly("mean_qty_per_buyer", &SweepRow::mean_qty_per_buyer)
      .def_readonly("mean_seller_utility", &SweepRow::mean_seller_utility)
      .def_readonly("mean_buyer_utility", &SweepRow::mean_buyer_utility)
      .def_readonly("mean_coalition_utility", &SweepRow::mean_coalition_utility);

  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("axis", &SweepReport::axis)
      .def_readonly("rows", &SweepReport::rows)
      .def_readonly("monotonic_price_ok", &SweepReport::monotonic_price_ok)
      .def_readonly("monotonic_qty_ok", &SweepReport::monotonic_qty_ok)
      .def_readonly("seller_utility_decreasing_ok",
                    &SweepReport::seller_utility_decreasing_ok)
      .def_readonly("cost_below_st_at_max_sellers",
                    &SweepReport::cost_below_st_at_max_sellers)
      .def_readonly("cost_above_st_buyers_at_max",
                    &SweepReport::cost_above_st_buyers_at_max)
      .def("to_csv", &sweep_csv);

  m.def("run_convergence_experiment",
        [](const ExperimentConfig& cfg) { return run_convergence_experiment(cfg); },
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_pricing_sweep", &run_pricing_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_population_sweep", &run_population_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
