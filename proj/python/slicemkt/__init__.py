"""Network-slicing resource-trading market simulator."""

from ._core import (  # noqa: F401
    ConvergenceReport,
    EquilibriumSolution,
    ExperimentConfig,
    IterationRow,
    MarketEnv,
    MarketMode,
    RadioConfig,
    ScenarioConfig,
    SeCheck,
    StepResult,
    Strategy,
    SweepAxis,
    SweepReport,
    SweepRow,
    TrainingHistory,
    TrainingParams,
    config_hash,
    default_experiment,
    load_config,
    parse_config,
    path_loss_db,
    run_convergence_experiment,
    run_population_sweep,
    run_pricing_sweep,
    strategy_name,
    train_strategy,
    ue_delay_s,
)

__all__ = [
    "ConvergenceReport",
    "EquilibriumSolution",
    "ExperimentConfig",
    "IterationRow",
    "MarketEnv",
    "MarketMode",
    "RadioConfig",
    "ScenarioConfig",
    "SeCheck",
    "StepResult",
    "Strategy",
    "SweepAxis",
    "SweepReport",
    "SweepRow",
    "TrainingHistory",
    "TrainingParams",
    "config_hash",
    "default_experiment",
    "load_config",
    "parse_config",
    "path_loss_db",
    "run_convergence_experiment",
    "run_population_sweep",
    "run_pricing_sweep",
    "strategy_name",
    "train_strategy",
    "ue_delay_s",
]
