"""Risk rings for UAV missile evasion: simulation, surrogates, and live assessment.

The pipeline mirrors the operational loop: simulate single-missile
engagements under each of eight compass evasive policies (`flightdyn`,
`missile`, `episodes`), train a per-policy miss-distance surrogate on the
labeled trajectories (`surrogate`), and aggregate the surrogates over all
observed launches into the per-heading risk ring an operator steers by
(`awareness`).  `scenario`, `session`, `service` and `cli` wrap that core
in files, live sessions, HTTP streaming, and batch commands.
"""

from .awareness import (
    RingEntry,
    RiskRing,
    SensorNoiseConfig,
    assess,
    color_map,
    monte_carlo_assess,
    ring_to_dict,
    ring_to_text,
    safest_policy,
)
from .dataset import Dataset, DatasetFormatError
from .episodes import (
    FEATURE_NAMES,
    LaunchObservation,
    LaunchRecord,
    ScenarioDraw,
    collect_dataset,
    feature_vector,
    observe_state,
    run_episode,
    sample_initial_conditions,
    simulate_episode,
)
from .flightdyn import (
    AircraftParams,
    AircraftState,
    ControlCommand,
    DEFAULT_AIRCRAFT,
    PolicyId,
    evasive_policy_control,
    level_state,
    shortest_arc,
    step_aircraft,
)
from .missile import (
    DEFAULT_GUIDANCE,
    GuidanceConfig,
    MissilePhase,
    MissileState,
    cpa_within_step,
    guidance_command,
    launch_missile,
    missile_inactive,
    pn_lateral_accel,
    step_missile,
)
from .scenario import LaunchEvent, Scenario, load_scenario, parse_scenario
from .session import SessionState, create_session, run_replay, session_step
from .surrogate import (
    MlpModel,
    TrainConfig,
    backward,
    forward,
    load_model,
    load_model_set,
    mse_loss,
    predict_batch,
    save_model,
    train,
    write_manifest,
)

__all__ = [
    "AircraftParams",
    "AircraftState",
    "ControlCommand",
    "DEFAULT_AIRCRAFT",
    "DEFAULT_GUIDANCE",
    "Dataset",
    "DatasetFormatError",
    "FEATURE_NAMES",
    "GuidanceConfig",
    "LaunchEvent",
    "LaunchObservation",
    "LaunchRecord",
    "MissilePhase",
    "MissileState",
    "MlpModel",
    "PolicyId",
    "RingEntry",
    "RiskRing",
    "Scenario",
    "ScenarioDraw",
    "SensorNoiseConfig",
    "SessionState",
    "TrainConfig",
    "assess",
    "backward",
    "collect_dataset",
    "color_map",
    "cpa_within_step",
    "create_session",
    "evasive_policy_control",
    "feature_vector",
    "forward",
    "guidance_command",
    "launch_missile",
    "level_state",
    "load_model",
    "load_model_set",
    "load_scenario",
    "missile_inactive",
    "monte_carlo_assess",
    "mse_loss",
    "observe_state",
    "parse_scenario",
    "pn_lateral_accel",
    "predict_batch",
    "ring_to_dict",
    "ring_to_text",
    "run_episode",
    "run_replay",
    "safest_policy",
    "sample_initial_conditions",
    "save_model",
    "session_step",
    "shortest_arc",
    "simulate_episode",
    "step_aircraft",
    "step_missile",
    "train",
    "write_manifest",
]
