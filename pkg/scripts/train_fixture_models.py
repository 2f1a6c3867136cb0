"""Regenerate the committed desk-scale model fixtures in tests/fixtures/models/.

Eight per-policy surrogates trained on 1,500 episodes each, 20 epochs.
Deterministic given the seeds below; run from the repository root:

    python scripts/train_fixture_models.py

Trains two policies at a time (each training is single-threaded).
"""

import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "models")
N_EPISODES = 1500
COLLECT_SEED_BASE = 100
TRAIN_SEED = 7
EPOCHS = 20


def build_one(policy_index: int) -> str:
    from riskring.episodes import collect_dataset
    from riskring.flightdyn import PolicyId
    from riskring.surrogate import TrainConfig, save_model, train

    policy = PolicyId(policy_index)
    t0 = time.perf_counter()
    dataset = collect_dataset(
        policy, n_episodes=N_EPISODES, seed=COLLECT_SEED_BASE + policy_index, workers=1
    )
    t1 = time.perf_counter()
    model = train(dataset, TrainConfig(epochs=EPOCHS, seed=TRAIN_SEED))
    t2 = time.perf_counter()
    path = os.path.join(FIXTURE_DIR, f"{policy.name.lower()}.bvrm")
    save_model(model, path)
    md = model.metadata
    labels = dataset.labels
    baseline = ((labels - labels.mean()) ** 2).mean() / dataset.labels.std() ** 2
    return (
        f"{policy.name:2s}: {len(dataset)} samples, hit rate "
        f"{(labels == 0).mean():.2f}, train mse {md['final_train_mse']:.4f}, "
        f"val mse {md['final_val_mse']:.4f} (collect {t1 - t0:.0f}s train {t2 - t1:.0f}s)"
    )


def main() -> None:
    os.makedirs(FIXTURE_DIR, exist_ok=True)
    with ProcessPoolExecutor(max_workers=2) as pool:
        for line in pool.map(build_one, range(8)):
            print(line, flush=True)

    from riskring.flightdyn import PolicyId
    from riskring.surrogate import write_manifest

    write_manifest(
        {p: f"{p.name.lower()}.bvrm" for p in PolicyId},
        os.path.join(FIXTURE_DIR, "manifest.txt"),
    )
    print("manifest written", flush=True)


if __name__ == "__main__":
    sys.exit(main())
