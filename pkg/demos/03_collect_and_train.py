"""Small end-to-end surrogate build: collect episodes, train, inspect fit.

Uses a few hundred episodes so it finishes in about a minute; the committed
fixture models under tests/fixtures/models were built the same way at
larger scale (scripts/train_fixture_models.py).
"""

import numpy as np

from riskring.episodes import collect_dataset
from riskring.flightdyn import PolicyId
from riskring.surrogate import TrainConfig, predict_batch, train

POLICY = PolicyId.E
N_EPISODES = 300


def main():
    dataset = collect_dataset(POLICY, n_episodes=N_EPISODES, seed=11)
    labels = dataset.labels
    print(
        f"collected {len(dataset)} samples from {N_EPISODES} episodes "
        f"(hit rate {(labels == 0).mean():.2f}, "
        f"median escape MD {np.median(labels[labels > 0]) / 1e3:.1f} km)"
    )

    model = train(dataset, TrainConfig(epochs=10, seed=3))
    md = model.metadata
    print(
        f"trained: {md['n_train_samples']} train / {md['n_val_samples']} val samples, "
        f"train mse {md['final_train_mse']:.3f}, val mse {md['final_val_mse']:.3f} (normalized)"
    )

    # predicted vs simulated labels on held-out-ish rows
    preds = predict_batch(model, dataset.features[::97])
    truth = labels[::97]
    err_km = np.abs(preds - truth) / 1e3
    print(f"spot check on {len(truth)} rows: median |error| {np.median(err_km):.2f} km")
    print("full-scale training uses 50,000 episodes and 400 epochs per policy")


if __name__ == "__main__":
    main()
