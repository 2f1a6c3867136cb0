"""Batch command line: collect / train / assess / replay / serve."""

from __future__ import annotations

import argparse
import os
import sys

from .awareness import monte_carlo_assess, assess, ring_to_text
from .dataset import Dataset
from .episodes import collect_dataset, observation_from_geometry, LaunchRecord, launcher_position
from .flightdyn import AircraftParams, DEFAULT_AIRCRAFT, PolicyId, level_state
from .missile import DEFAULT_GUIDANCE, GuidanceConfig
from .scenario import load_scenario
from .session import run_replay
from .surrogate import TrainConfig, load_model_set, save_model, train


def _aircraft(args) -> AircraftParams:
    return AircraftParams.from_file(args.aircraft) if args.aircraft else DEFAULT_AIRCRAFT


def _guidance(args) -> GuidanceConfig:
    return GuidanceConfig.from_file(args.missile) if args.missile else DEFAULT_GUIDANCE


def cmd_collect(args) -> int:
    dataset = collect_dataset(
        policy=PolicyId[args.policy.upper()],
        n_episodes=args.episodes,
        seed=args.seed,
        sample_period_s=args.sample_period,
        aircraft=_aircraft(args),
        guidance=_guidance(args),
        workers=args.workers,
    )
    dataset.write(args.out)
    print(f"wrote {len(dataset)} samples from {dataset.n_episodes} episodes to {args.out}")
    return 0


def cmd_train(args) -> int:
    dataset = Dataset.read(args.dataset)
    cfg = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        seed=args.seed,
        val_fraction=args.val_fraction,
    )
    model = train(dataset, cfg)
    save_model(model, args.out)
    md = model.metadata
    print(
        f"trained {dataset.policy.name} on {md['n_train_samples']} samples: "
        f"train mse {md['final_train_mse']:.6f}, val mse "
        f"{'n/a' if md['final_val_mse'] is None else format(md['final_val_mse'], '.6f')} "
        f"(normalized); saved to {args.out}"
    )
    return 0


def _scenario_and_models(args):
    scenario = load_scenario(args.scenario)
    manifest = args.manifest or scenario.manifest_path
    if manifest is None:
        raise SystemExit("no model manifest: pass --manifest or add [models] to the scenario")
    return scenario, load_model_set(manifest)


def cmd_assess(args) -> int:
    scenario, models = _scenario_and_models(args)
    uav = level_state(scenario.uav_altitude_m, scenario.uav_speed_mps, scenario.uav_heading_rad)
    observations = []
    for event in scenario.launches:
        position = launcher_position(
            uav.position_m, event.range_m, event.bearing_rad, event.altitude_m
        )
        record = LaunchRecord(position_m=position, speed_mps=event.speed_mps, time_s=event.time_s)
        observations.append(observation_from_geometry(uav, record, max(event.time_s, args.at)))
    if not observations:
        raise SystemExit("scenario has no launch events")
    if args.monte_carlo:
        noise = scenario.noise
        if noise is None:
            raise SystemExit("--monte-carlo needs a [noise] section in the scenario")
        ring = monte_carlo_assess(uav, observations, models, noise, seed=scenario.seed)
    else:
        ring = assess(uav, observations, models)
    sys.stdout.write(ring_to_text(ring, scenario.red_below_m, scenario.orange_below_m))
    return 0


def cmd_replay(args) -> int:
    scenario, models = _scenario_and_models(args)
    policy = None if args.policy.lower() == "auto" else PolicyId[args.policy.upper()]
    result = run_replay(scenario, models, policy, _aircraft(args), _guidance(args))
    with open(args.out, "w") as fh:
        fh.write(result.trace_text)
    print(
        f"outcome={result.outcome} duration={result.duration_s:.1f}s "
        f"min_md={result.min_md_m:.1f}m trace={args.out}"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host = args.host or os.environ.get("RISKRING_HOST", "127.0.0.1")
    port = args.port or int(os.environ.get("RISKRING_PORT", "8000"))
    app = create_app(time_scale=args.time_scale)
    if args.scenario:
        scenario = load_scenario(args.scenario)
        manifest = args.manifest or scenario.manifest_path
        if manifest is None:
            raise SystemExit("no model manifest configured")
        app.state.manager.load(scenario, load_model_set(manifest))
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskring",
        description="Missile-evasion risk rings: simulate, train surrogates, assess, replay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collect", help="simulate episodes for one policy into a dataset")
    p.add_argument("--policy", required=True, choices=[x.name for x in PolicyId])
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--sample-period", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--aircraft", help="aircraft constants file (default: built-in)")
    p.add_argument("--missile", help="guidance constants file (default: built-in)")
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("train", help="train one policy surrogate from a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--learning-rate", type=float, default=3e-4)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("assess", help="print the risk ring for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--manifest", help="model-set manifest (default: from the scenario)")
    p.add_argument("--monte-carlo", action="store_true")
    p.add_argument("--at", type=float, default=0.0, help="assessment time, seconds")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("replay", help="fly a scenario to its outcome and write a trace")
    p.add_argument("--scenario", required=True)
    p.add_argument("--manifest")
    p.add_argument("--policy", default="auto", help="auto or one of N..NW")
    p.add_argument("--out", required=True)
    p.add_argument("--aircraft")
    p.add_argument("--missile")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the live-session HTTP service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--scenario", help="preload this scenario")
    p.add_argument("--manifest")
    p.add_argument("--time-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
