"""Multi-threat aggregation into the per-policy risk ring.

For every policy and every observed launch, the per-policy surrogate
predicts a miss distance; the policy's entry is the minimum over threats
(the threat you must worry about), and the safest policy is the argmax of
those minima with ties resolved toward the lowest policy index (North
first, clockwise).

Every prediction goes through the single-vector `forward` path.  BLAS does
not guarantee bitwise-equal results between batched and single-vector
products, and the aggregation contract is exact equality with an
independent double loop, so batching is deliberately avoided here; the
whole 8-policy x 6-threat ring still evaluates in a few milliseconds.

Monte-Carlo uncertainty propagation re-runs the assessment on Gaussian
perturbations of the observations (sensor noise) and reports
sort-and-index empirical quantiles per policy.  The conservative low
quantile is the default decision statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .episodes import FIRING_DISTANCE_RANGE_M, LaunchObservation, feature_vector
from .flightdyn import AircraftState, PolicyId
from .surrogate import MlpModel, predict_one

CATEGORY_RED = "red"
CATEGORY_ORANGE = "orange"
CATEGORY_GREEN = "green"

DEFAULT_RED_THRESHOLD_M = 200.0
DEFAULT_ORANGE_THRESHOLD_M = 2000.0

RING_FORMAT_VERSION = 1


def color_map(
    md_m: float,
    red_below_m: float = DEFAULT_RED_THRESHOLD_M,
    orange_below_m: float = DEFAULT_ORANGE_THRESHOLD_M,
) -> str:
    """Display category for a miss distance; boundaries are inclusive upward."""
    if md_m < 0.0:
        raise ValueError("miss distance must be non-negative")
    if md_m < red_below_m:
        return CATEGORY_RED
    if md_m < orange_below_m:
        return CATEGORY_ORANGE
    return CATEGORY_GREEN


@dataclass(frozen=True, slots=True)
class RingEntry:
    """One policy's worst-case estimate; band is (low, median, high) when
    Monte-Carlo sampling produced one."""

    policy: PolicyId
    md_m: float
    extrapolated: bool = False
    band: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.band is not None:
            low, median, high = self.band
            if not (low <= median <= high):
                raise ValueError(f"band {self.band} must be ordered low <= median <= high")


@dataclass(frozen=True, slots=True)
class RiskRing:
    """Eight entries in compass order plus the safest policy."""

    entries: tuple[RingEntry, ...]
    safest: PolicyId

    def __post_init__(self):
        if len(self.entries) != 8:
            raise ValueError(f"a risk ring has exactly 8 entries, got {len(self.entries)}")
        if [e.policy for e in self.entries] != list(PolicyId):
            raise ValueError("entries must be in compass order N..NW")
        best = self.entries[self.safest].md_m
        if any(e.md_m > best for e in self.entries):
            raise ValueError("safest policy must carry the largest estimate")

    def __getitem__(self, policy: PolicyId) -> RingEntry:
        return self.entries[PolicyId(policy)]


@dataclass(frozen=True, slots=True)
class SensorNoiseConfig:
    """Standard deviations of the launch-observation errors plus sampling knobs.

    The reference magnitudes are 100 m range, 1 s launch-time, 0.1 deg
    bearing, 100 m altitude and 5 m/s speed.  Set `values_are_variances`
    when the configured numbers are variances instead of standard
    deviations; they are then square-rooted before use.
    """

    sigma_rho_m: float = 100.0
    sigma_tau_s: float = 1.0
    sigma_eta_rad: float = math.radians(0.1)
    sigma_beta_m: float = 100.0
    sigma_nu_mps: float = 5.0
    sample_count: int = 256
    quantile: float = 0.1
    values_are_variances: bool = False

    def __post_init__(self):
        sigmas = (self.sigma_rho_m, self.sigma_tau_s, self.sigma_eta_rad,
                  self.sigma_beta_m, self.sigma_nu_mps)
        if any(s < 0.0 for s in sigmas):
            raise ValueError("noise magnitudes must be >= 0")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if not 0.0 < self.quantile < 1.0:
            raise ValueError("quantile must be in (0, 1)")

    def stddevs(self) -> tuple[float, float, float, float, float]:
        raw = (self.sigma_rho_m, self.sigma_tau_s, self.sigma_eta_rad,
               self.sigma_beta_m, self.sigma_nu_mps)
        if self.values_are_variances:
            return tuple(math.sqrt(v) for v in raw)
        return raw


def wrap_pi(angle_rad: float) -> float:
    """Wrap to (-pi, pi]; values already in range pass through unchanged."""
    r = math.remainder(angle_rad, 2.0 * math.pi)
    return math.pi if r <= -math.pi else r


def _perturbed_observation(obs: LaunchObservation, noise_row) -> LaunchObservation:
    """One Gaussian-perturbed observation; noise_row is the scaled 5-tuple
    (rho, tau, eta, beta, nu)."""
    return LaunchObservation(
        rho_m=max(0.0, obs.rho_m + noise_row[0]),
        nu_mps=obs.nu_mps + noise_row[4],
        tau_s=max(0.0, obs.tau_s + noise_row[1]),
        eta_rad=wrap_pi(obs.eta_rad + noise_row[2]),
        beta_m=obs.beta_m + noise_row[3],
    )


def _check_model_set(models: dict) -> None:
    missing = [p.name for p in PolicyId if p not in models]
    if missing:
        raise ValueError(f"model set is missing policies: {', '.join(missing)}")


def _is_extrapolated(model: MlpModel, obs: LaunchObservation) -> bool:
    """Outside the supported envelope: rho beyond the collection range, or
    tau beyond the range this model saw in training."""
    if not FIRING_DISTANCE_RANGE_M[0] <= obs.rho_m <= FIRING_DISTANCE_RANGE_M[1]:
        return True
    fmin = model.metadata.get("feature_min")
    fmax = model.metadata.get("feature_max")
    if fmin is not None and fmax is not None:
        if not fmin[7] <= obs.tau_s <= fmax[7]:
            return True
    return False


def _clamped(model: MlpModel, obs: LaunchObservation) -> LaunchObservation:
    rho = min(max(obs.rho_m, FIRING_DISTANCE_RANGE_M[0]), FIRING_DISTANCE_RANGE_M[1])
    tau = obs.tau_s
    fmin = model.metadata.get("feature_min")
    fmax = model.metadata.get("feature_max")
    if fmin is not None and fmax is not None:
        tau = min(max(tau, fmin[7]), fmax[7])
    if rho == obs.rho_m and tau == obs.tau_s:
        return obs
    return LaunchObservation(rho_m=rho, nu_mps=obs.nu_mps, tau_s=tau,
                             eta_rad=obs.eta_rad, beta_m=obs.beta_m)


def _min_estimates(
    uav: AircraftState,
    threats: list[LaunchObservation],
    models: dict[PolicyId, MlpModel],
    clamp_features: bool,
) -> list[float]:
    """Per-policy minimum prediction over threats (the Monte-Carlo hot path).

    Without clamping, the feature vector for a threat is shared across all
    eight policies; with clamping it depends on each model's training range.
    """
    if clamp_features:
        mins = []
        for policy in PolicyId:
            model = models[policy]
            best = math.inf
            for obs in threats:
                md = predict_one(model, feature_vector(uav, _clamped(model, obs)))
                if md < best:
                    best = md
            mins.append(best)
        return mins
    features = [feature_vector(uav, obs) for obs in threats]
    mins = []
    for policy in PolicyId:
        model = models[policy]
        best = math.inf
        for x in features:
            md = predict_one(model, x)
            if md < best:
                best = md
        mins.append(best)
    return mins


def assess(
    uav: AircraftState,
    threats: list[LaunchObservation],
    models: dict[PolicyId, MlpModel],
    clamp_features: bool = False,
) -> RiskRing:
    """Deterministic risk ring: per policy, the minimum predicted miss
    distance over all observed threats.

    Entries whose inputs fall outside the training envelope are flagged as
    extrapolated rather than clamped (the surrogate is known to be
    overconfident out of range); pass `clamp_features=True` to clamp
    instead.
    """
    if not threats:
        raise ValueError("assess requires at least one threat")
    _check_model_set(models)
    mins = _min_estimates(uav, threats, models, clamp_features)
    entries = []
    for policy in PolicyId:
        model = models[policy]
        extrapolated = any(_is_extrapolated(model, obs) for obs in threats)
        entries.append(
            RingEntry(policy=policy, md_m=mins[policy], extrapolated=extrapolated)
        )
    return RiskRing(entries=tuple(entries), safest=_argmax_policy([e.md_m for e in entries]))


def _argmax_policy(values) -> PolicyId:
    best = max(values)
    for policy in PolicyId:  # lowest index wins ties
        if values[policy] == best:
            return policy
    raise AssertionError("unreachable")


def safest_policy(ring: RiskRing) -> PolicyId:
    """Argmax of the per-policy estimates, ties to the lowest policy index."""
    return _argmax_policy([e.md_m for e in ring.entries])


def sorted_quantile(sorted_values: np.ndarray, q: float) -> float:
    """Nearest-rank quantile of an ascending array: element ceil(q*n)-1."""
    n = len(sorted_values)
    idx = min(n - 1, max(0, math.ceil(q * n) - 1))
    return float(sorted_values[idx])


def monte_carlo_assess(
    uav: AircraftState,
    threats: list[LaunchObservation],
    models: dict[PolicyId, MlpModel],
    noise: SensorNoiseConfig = SensorNoiseConfig(),
    seed: int = 0,
    clamp_features: bool = False,
    select_on: str = "low",
) -> RiskRing:
    """Risk ring with empirical uncertainty bands from sensor-noise sampling.

    Draws `noise.sample_count` Gaussian perturbations of every observation,
    reassesses each draw, and records per policy the q-quantile (low),
    median, and (1-q)-quantile (high).  The entry value and the safest
    policy use the conservative low quantile by default
    (`select_on="median"` switches to the median).  With all-zero noise the
    bands collapse exactly to the deterministic assessment.
    """
    if select_on not in ("low", "median"):
        raise ValueError("select_on must be 'low' or 'median'")
    if not threats:
        raise ValueError("assess requires at least one threat")
    _check_model_set(models)

    baseline = assess(uav, threats, models, clamp_features=clamp_features)
    sig = np.asarray(noise.stddevs())
    rng = np.random.default_rng(seed)
    # one scaled draw tensor up front; python floats index fastest in the loop
    scaled = (rng.normal(size=(noise.sample_count, len(threats), 5)) * sig).tolist()

    n_threats = len(threats)
    per_policy = np.empty((8, noise.sample_count))
    if clamp_features:
        # model-dependent clamping forces the per-draw scalar path
        for k in range(noise.sample_count):
            perturbed = [
                _perturbed_observation(obs, scaled[k][j]) for j, obs in enumerate(threats)
            ]
            mins = _min_estimates(uav, perturbed, models, clamp_features=True)
            for policy in PolicyId:
                per_policy[policy, k] = mins[policy]
    else:
        # features are policy-independent: build every draw's rows once and
        # run them through the same compiled per-row predictor
        from ._fastmlp import predict_rows_compiled

        rows = np.empty((noise.sample_count * n_threats, 10))
        r = 0
        for k in range(noise.sample_count):
            for j, obs in enumerate(threats):
                rows[r] = feature_vector(uav, _perturbed_observation(obs, scaled[k][j]))
                r += 1
        for policy in PolicyId:
            values = predict_rows_compiled(models[policy], rows)
            per_policy[policy] = values.reshape(noise.sample_count, n_threats).min(axis=1)

    entries = []
    for policy in PolicyId:
        ordered = np.sort(per_policy[policy])
        low = sorted_quantile(ordered, noise.quantile)
        median = sorted_quantile(ordered, 0.5)
        high = sorted_quantile(ordered, 1.0 - noise.quantile)
        entries.append(
            RingEntry(
                policy=policy,
                md_m=low if select_on == "low" else median,
                extrapolated=baseline.entries[policy].extrapolated,
                band=(low, median, high),
            )
        )
    return RiskRing(entries=tuple(entries), safest=_argmax_policy([e.md_m for e in entries]))


def ring_to_dict(
    ring: RiskRing,
    red_below_m: float = DEFAULT_RED_THRESHOLD_M,
    orange_below_m: float = DEFAULT_ORANGE_THRESHOLD_M,
) -> dict:
    """JSON-ready form of the ring, categories included (the service payload)."""
    return {
        "format_version": RING_FORMAT_VERSION,
        "thresholds": {"red_below_m": red_below_m, "orange_below_m": orange_below_m},
        "entries": [
            {
                "policy": e.policy.name,
                "md_m": e.md_m,
                "category": color_map(e.md_m, red_below_m, orange_below_m),
                "extrapolated": e.extrapolated,
                "band": None
                if e.band is None
                else {"low_m": e.band[0], "median_m": e.band[1], "high_m": e.band[2]},
            }
            for e in ring.entries
        ],
        "safest": ring.safest.name,
    }


def ring_to_text(
    ring: RiskRing,
    red_below_m: float = DEFAULT_RED_THRESHOLD_M,
    orange_below_m: float = DEFAULT_ORANGE_THRESHOLD_M,
) -> str:
    """Line-oriented text form: one line per policy N..NW, safest last."""
    lines = [f"risk_ring format_version={RING_FORMAT_VERSION}"]
    for e in ring.entries:
        line = (
            f"policy={e.policy.name} md_m={e.md_m!r} "
            f"category={color_map(e.md_m, red_below_m, orange_below_m)} "
            f"extrapolated={int(e.extrapolated)}"
        )
        if e.band is not None:
            line += f" low_m={e.band[0]!r} median_m={e.band[1]!r} high_m={e.band[2]!r}"
        lines.append(line)
    lines.append(f"safest policy={ring.safest.name} md_m={ring.entries[ring.safest].md_m!r}")
    return "\n".join(lines) + "\n"
