"""Seeded Monte Carlo oracle for the sequential-measurement scenario.

Simulates experimental runs: every Bob draws a setting from his input
weights, samples an outcome from the selective square-root-instrument
distribution on the current pair state, and collapses it; Alice is sampled
projectively at the end (measurements on opposite wings commute, which the
test suite checks rather than assumes).

Randomness comes from the counter-based Philox generator with fixed integer
seeding.  Per-trajectory substreams start at counter ``index << 128``, so any
subset of trajectories reproduces identically regardless of execution order.

:func:`estimate_chsh` offers two interchangeable samplers:

* ``"tree"`` (default): enumerate every (setting, outcome) history of the
  chain once through the selective instrument, then draw all shots from the
  resulting leaf distribution in a single multinomial.  Distribution-identical
  to per-shot simulation by the chain rule, and fast enough for 10^6-shot
  certification runs.
* ``"trajectories"``: literal per-shot sequential simulation via
  :func:`run_trajectory`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .povm import NullOutcomeError, Wing, luders_selective, outcome_probability
from .qops import DensityMatrix, IDENTITY_2, kron, sharp_projector, singlet
from .scenario import CHSH_SIGNS, ScenarioConfig

OUTCOMES = (+1, -1)

MIN_RECOMMENDED_SHOTS = 10_000

# Branches below this weight carry no statistical mass and are pruned.
_BRANCH_TOL = 1e-14


@dataclass(frozen=True)
class TrajectoryRecord:
    """Settings and outcomes of one simulated run, with its seed lineage."""

    alice_setting: int
    alice_outcome: int
    bob_settings: tuple[int, ...]
    bob_outcomes: tuple[int, ...]
    seed_lineage: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.alice_setting not in (0, 1) or any(s not in (0, 1) for s in self.bob_settings):
            raise ValueError("setting indices must be 0 or 1")
        if self.alice_outcome not in OUTCOMES or any(o not in OUTCOMES for o in self.bob_outcomes):
            raise ValueError("outcomes must be +1 or -1")


@dataclass(frozen=True)
class EstimateReport:
    """A sampled CHSH value: sample mean, sample-sigma/sqrt(shots), shots, seed."""

    estimate: float
    standard_error: float
    shots: int
    seed: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if not (self.standard_error >= 0.0):
            raise ValueError("standard error must be nonnegative")


def _draw_binary(rng: np.random.Generator, p_first: float) -> int:
    return 0 if rng.random() < p_first else 1


def run_trajectory(
    cfg: ScenarioConfig, rng: np.random.Generator, seed_lineage: tuple[int, ...] = ()
) -> TrajectoryRecord:
    """Simulate one run: Bob chain in order, then Alice.

    Draw order (fixed for reproducibility): for each Bob, one uniform for the
    setting then one for the outcome; finally one uniform for Alice's setting
    and one for her outcome.
    """
    rho = singlet()
    bob_settings = []
    bob_outcomes = []
    for k in range(1, cfg.n_bobs + 1):
        setting = _draw_binary(rng, cfg.input_weights[k - 1][0])
        m = cfg.measurement(k, setting)
        dist = outcome_probability(rho, Wing.BOB, m)
        outcome = OUTCOMES[_draw_binary(rng, dist.p_plus)]
        _, rho = luders_selective(rho, Wing.BOB, m, outcome)
        bob_settings.append(setting)
        bob_outcomes.append(outcome)

    alice_setting = _draw_binary(rng, 0.5)
    p_plus = _alice_plus_probability(rho, cfg, alice_setting)
    alice_outcome = OUTCOMES[_draw_binary(rng, p_plus)]
    return TrajectoryRecord(
        alice_setting=alice_setting,
        alice_outcome=alice_outcome,
        bob_settings=tuple(bob_settings),
        bob_outcomes=tuple(bob_outcomes),
        seed_lineage=seed_lineage,
    )


def _alice_plus_probability(rho: DensityMatrix, cfg: ScenarioConfig, setting: int) -> float:
    proj = kron(sharp_projector(cfg.alice_settings[setting], +1), IDENTITY_2)
    return float(np.trace(proj @ rho.matrix).real)


def _run_trajectory_alice_first(
    cfg: ScenarioConfig, rng: np.random.Generator, seed_lineage: tuple[int, ...] = ()
) -> TrajectoryRecord:
    """Same experiment with Alice measured (and collapsed) before the Bob chain."""
    rho = singlet()
    alice_setting = _draw_binary(rng, 0.5)
    p_plus = _alice_plus_probability(rho, cfg, alice_setting)
    alice_outcome = OUTCOMES[_draw_binary(rng, p_plus)]
    proj = kron(sharp_projector(cfg.alice_settings[alice_setting], alice_outcome), IDENTITY_2)
    collapsed = proj @ rho.matrix @ proj
    rho = DensityMatrix(collapsed / collapsed.trace().real)

    bob_settings = []
    bob_outcomes = []
    for k in range(1, cfg.n_bobs + 1):
        setting = _draw_binary(rng, cfg.input_weights[k - 1][0])
        m = cfg.measurement(k, setting)
        dist = outcome_probability(rho, Wing.BOB, m)
        outcome = OUTCOMES[_draw_binary(rng, dist.p_plus)]
        _, rho = luders_selective(rho, Wing.BOB, m, outcome)
        bob_settings.append(setting)
        bob_outcomes.append(outcome)
    return TrajectoryRecord(
        alice_setting=alice_setting,
        alice_outcome=alice_outcome,
        bob_settings=tuple(bob_settings),
        bob_outcomes=tuple(bob_outcomes),
        seed_lineage=seed_lineage,
    )


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Philox substream for one trajectory: key = seed, counter = index << 128."""
    return np.random.Generator(np.random.Philox(key=seed, counter=index << 128))


def sample_trajectories(
    cfg: ScenarioConfig, shots: int, seed: int, alice_first: bool = False
) -> list[TrajectoryRecord]:
    """Independent trajectories on per-index substreams of the given seed."""
    runner = _run_trajectory_alice_first if alice_first else run_trajectory
    return [runner(cfg, trajectory_rng(seed, i), seed_lineage=(seed, i)) for i in range(shots)]


def leaf_distribution(cfg: ScenarioConfig, bob_index: int) -> np.ndarray:
    """Joint law of (Alice setting, Alice outcome, Bob-n setting, Bob-n outcome).

    Built by enumerating all selective-instrument branches of Bobs
    1..bob_index, so it is exactly the distribution :func:`run_trajectory`
    samples from (later Bobs cannot influence these marginals).  Shape
    (2, 2, 2, 2), indexed [i, a_idx, j, b_idx] with outcome index 0 -> +1.
    """
    cfg._check_bob_index(bob_index)
    branches: list[tuple[float, DensityMatrix, int, int]] = [(1.0, singlet(), -1, -1)]
    for k in range(1, bob_index + 1):
        grown: list[tuple[float, DensityMatrix, int, int]] = []
        for weight, rho, _, _ in branches:
            for setting in (0, 1):
                w = cfg.input_weights[k - 1][setting]
                if w <= 0.0:
                    continue
                m = cfg.measurement(k, setting)
                for b_idx, outcome in enumerate(OUTCOMES):
                    try:
                        p, post = luders_selective(rho, Wing.BOB, m, outcome)
                    except NullOutcomeError:
                        continue
                    q = weight * w * p
                    if q > _BRANCH_TOL:
                        grown.append((q, post, setting, b_idx))
        branches = grown

    probs = np.zeros((2, 2, 2, 2))
    for weight, rho, j, b_idx in branches:
        for i in (0, 1):
            p_plus = _alice_plus_probability(rho, cfg, i)
            probs[i, 0, j, b_idx] += 0.5 * weight * p_plus
            probs[i, 1, j, b_idx] += 0.5 * weight * (1.0 - p_plus)
    total = probs.sum()
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"leaf distribution sums to {total!r}")
    return probs / total


def _cell_statistic(cfg: ScenarioConfig, bob_index: int) -> np.ndarray:
    """Per-trajectory CHSH statistic by cell: sign(i,j) * a * b / (p(i) * w_j)."""
    weights = cfg.input_weights[bob_index - 1]
    stat = np.zeros((2, 2, 2, 2))
    for i in (0, 1):
        for a_idx, a in enumerate(OUTCOMES):
            for j in (0, 1):
                if weights[j] <= 0.0:
                    continue
                for b_idx, b in enumerate(OUTCOMES):
                    stat[i, a_idx, j, b_idx] = CHSH_SIGNS[i][j] * a * b / (0.5 * weights[j])
    return stat


def _report_from_counts(
    counts: np.ndarray, stat: np.ndarray, shots: int, seed: int
) -> EstimateReport:
    estimate = float((counts * stat).sum() / shots)
    if shots > 1:
        second_moment = float((counts * stat * stat).sum())
        sample_var = max((second_moment - shots * estimate * estimate) / (shots - 1), 0.0)
    else:
        sample_var = 0.0
    return EstimateReport(
        estimate=estimate,
        standard_error=math.sqrt(sample_var / shots),
        shots=shots,
        seed=seed,
    )


def estimate_chsh(
    cfg: ScenarioConfig, bob_index: int, shots: int, seed: int, method: str = "tree"
) -> EstimateReport:
    """Sampled CHSH value between Alice and Bob ``bob_index``.

    Deterministic for fixed (cfg, bob_index, shots, seed, method).  The
    estimate is the sample mean of the per-trajectory statistic
    sign(i, j) * a * b / (p(i) p(j)); the standard error is its sample
    deviation over sqrt(shots).
    """
    cfg._check_bob_index(bob_index)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if shots < MIN_RECOMMENDED_SHOTS:
        warnings.warn(
            f"shots = {shots} is below the recommended minimum {MIN_RECOMMENDED_SHOTS}; "
            "the standard error may be unreliable",
            stacklevel=2,
        )
    stat = _cell_statistic(cfg, bob_index)

    if method == "tree":
        probs = leaf_distribution(cfg, bob_index)
        rng = np.random.Generator(np.random.Philox(key=seed))
        counts = rng.multinomial(shots, probs.reshape(-1)).reshape(probs.shape)
    elif method == "trajectories":
        counts = np.zeros((2, 2, 2, 2))
        for record in sample_trajectories(cfg, shots, seed):
            i = record.alice_setting
            a_idx = OUTCOMES.index(record.alice_outcome)
            j = record.bob_settings[bob_index - 1]
            b_idx = OUTCOMES.index(record.bob_outcomes[bob_index - 1])
            counts[i, a_idx, j, b_idx] += 1
    else:
        raise ValueError(f"unknown method {method!r}; expected 'tree' or 'trajectories'")

    return _report_from_counts(counts, stat, shots, seed)
