import math

import numpy as np
import pytest

from riskring.episodes import LaunchObservation
from riskring.flightdyn import PolicyId
from riskring.surrogate import MlpModel, init_parameters, save_model, write_manifest


def random_model_set(seed=0) -> dict[PolicyId, MlpModel]:
    """Untrained per-policy models with sane normalization stats; good enough
    for aggregation, serialization and service tests."""
    models = {}
    for policy in PolicyId:
        rng = np.random.default_rng((seed, int(policy)))
        weights, biases = init_parameters(rng)
        models[policy] = MlpModel(
            weights=weights,
            biases=biases,
            feature_mean=np.array(
                [8000.0, 0.0, 0.0, math.pi, 330.0, 60000.0, 300.0, 40.0, 0.0, 10000.0]
            ),
            feature_std=np.array(
                [1500.0, 0.4, 0.2, 1.8, 20.0, 12000.0, 12.0, 25.0, 1.8, 600.0]
            ),
            label_mean=9000.0,
            label_std=7000.0,
            policy=policy,
            metadata={
                "feature_min": [6000, -1.4, -0.53, 0.0, 300, 40000, 280, 0.0, -math.pi, 9000],
                "feature_max": [10000, 1.4, 0.53, 2 * math.pi, 365, 80000, 320, 120.0, math.pi, 11000],
            },
        )
    return models


def random_threats(rng, k):
    return [
        LaunchObservation(
            rho_m=float(rng.uniform(40e3, 80e3)),
            nu_mps=float(rng.uniform(280, 320)),
            tau_s=float(rng.uniform(0, 100)),
            eta_rad=float(rng.uniform(-math.pi, math.pi)),
            beta_m=float(rng.uniform(9000, 11000)),
        )
        for _ in range(k)
    ]


def write_model_set(models, directory) -> str:
    """Save a model set plus manifest into `directory`; returns manifest path."""
    paths = {}
    for policy, model in models.items():
        name = f"{policy.name.lower()}.bvrm"
        save_model(model, directory / name)
        paths[policy] = name
    manifest = directory / "manifest.txt"
    write_manifest(paths, manifest)
    return str(manifest)


@pytest.fixture(scope="session")
def shared_random_models():
    return random_model_set()


@pytest.fixture(scope="session")
def shared_manifest(shared_random_models, tmp_path_factory):
    directory = tmp_path_factory.mktemp("models")
    return write_model_set(shared_random_models, directory)
