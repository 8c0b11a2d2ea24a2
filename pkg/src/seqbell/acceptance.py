"""The certification table: every headline claim as a pass/fail check.

Each criterion is a deterministic, self-contained check with a pinned
tolerance.  ``seqbell verify`` prints one line per criterion and exits
nonzero if any fails; the pytest suite runs the same table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import analysis, mc, povm, qops, scenario

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CriterionResult:
    criterion_id: str
    description: str
    passed: bool
    detail: str


def _ac1_optimality_identity() -> tuple[bool, str]:
    lams = np.linspace(0.0, 1.0, 10_000)
    worst = 0.0
    for lam in lams:
        pq = povm.quality_of(float(lam))
        worst = max(worst, abs(pq.quality_f**2 + pq.precision_g**2 - 1.0))
    return worst <= 1e-14, f"max |F^2+G^2-1| = {worst:.3e} over {lams.size} points (tol 1e-14)"


def _ac2_update_equivalence() -> tuple[bool, str]:
    rng = np.random.default_rng(210)
    lams = np.linspace(0.0, 1.0, 20)
    worst = 0.0
    for i in range(100):
        rho = qops.random_density_matrix(rng)
        direction = qops.random_unit_direction(rng)
        wing = povm.Wing.BOB if i % 2 == 0 else povm.Wing.ALICE
        for lam in lams:
            m = povm.UnsharpMeasurement(direction, float(lam))
            via_luders = povm.luders_nonselective(rho, wing, m)
            via_pointer = povm.pointer_model_update(rho, wing, direction, povm.quality_of(float(lam)))
            worst = max(worst, float(np.max(np.abs(via_luders.matrix - via_pointer.matrix))))
    return worst <= 1e-12, f"max entrywise gap = {worst:.3e} on 100 states x 20 sharpness values (tol 1e-12)"


def _ac3_first_bob_chsh() -> tuple[bool, str]:
    worst = 0.0
    for lam in np.linspace(0.01, 1.0, 100):
        cfg = scenario.default_config(1, (float(lam),))
        engine = scenario.chsh_value(cfg, 1).chsh_value
        worst = max(worst, abs(engine - 2.0 * SQRT2 * float(lam)))
    return worst <= 1e-10, f"max |engine - 2*sqrt(2)*lam| = {worst:.3e} on 100-point grid (tol 1e-10)"


def _ac4_second_bob_chsh() -> tuple[bool, str]:
    worst = 0.0
    grid = np.linspace(1.0 / 30.0, 1.0, 30)
    for lam1 in grid:
        expected_factor = SQRT2 * (1.0 + math.sqrt(1.0 - float(lam1) ** 2))
        for lam2 in grid:
            cfg = scenario.default_config(2, (float(lam1), float(lam2)))
            engine = scenario.chsh_value(cfg, 2).chsh_value
            worst = max(worst, abs(engine - float(lam2) * expected_factor))
    return worst <= 1e-10, f"max |engine - lam2*sqrt(2)*(1+sqrt(1-lam1^2))| = {worst:.3e} on 30x30 grid (tol 1e-10)"


def _ac5_double_violation_window() -> tuple[bool, str]:
    report = analysis.double_violation_region(resolution=0.001)
    low, high = scenario.violation_window_bob1()
    if report.window is None:
        return False, "no feasible window found"
    err_low = abs(report.window[0] - low)
    err_high = abs(report.window[1] - high)
    ok = err_low <= 0.001 and err_high <= 0.001
    return ok, (
        f"window [{report.window[0]:.5f}, {report.window[1]:.5f}] brackets "
        f"({low:.5f}, {high:.5f}); endpoint errors {err_low:.2e}, {err_high:.2e} (tol 0.001)"
    )


def _ac6_lam2_threshold() -> tuple[bool, str]:
    lam1 = 1.0 / SQRT2 + 1e-6
    onset = analysis.bob2_violation_onset(lam1, resolution=0.0005)
    target = 2.0 / (SQRT2 + 1.0)
    err = abs(onset - target)
    cfg = scenario.default_config(2, (lam1, onset))
    engine_at_onset = scenario.chsh_value(cfg, 2).chsh_value
    ok = err <= 0.001 and engine_at_onset > 2.0
    return ok, (
        f"onset lam2 = {onset:.4f} vs threshold {target:.4f} (err {err:.2e}, tol 0.001); "
        f"engine CHSH_2 at onset = {engine_at_onset:.6f} > 2"
    )


def _ac7_impossibility_bound() -> tuple[bool, str]:
    report = analysis.max_chsh3_under_double_violation(resolution=0.005)
    sup = report.analytic_value
    grid_max = report.extremal_value
    assert sup is not None and grid_max is not None
    margin = 2.0 - max(sup, grid_max)
    ok = (
        abs(sup - 1.8833) <= 0.002
        and grid_max <= sup + 1e-12
        and grid_max >= 1.8833 - 10 * 0.005
        and margin > 0.11
    )
    return ok, (
        f"sup CHSH_3 = {sup:.4f} (|sup - 1.8833| = {abs(sup - 1.8833):.2e}, tol 0.002); "
        f"grid max = {grid_max:.4f}; margin below 2 = {margin:.4f} > 0.11"
    )


def _ac8_oracle_equivalence() -> tuple[bool, str]:
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 5))
        lams = tuple(float(v) for v in rng.uniform(0.001, 1.0, n))
        cfg = scenario.default_config(n, lams)
        for bob in range(1, n + 1):
            engine = scenario.chsh_value(cfg, bob).chsh_value
            closed = scenario.closed_form_chsh(lams, bob)
            worst = max(worst, abs(engine - closed))
    return worst <= 1e-10, f"max |engine - closed form| = {worst:.3e} over 500 random configs, n <= 4 (tol 1e-10)"


def _ac9_monte_carlo_consistency() -> tuple[bool, str]:
    configs = [
        (0.8,),
        (0.8, 0.9),
        (1.0 / SQRT2, 2.0 / (SQRT2 + 1.0), 1.0),
    ]
    shots = 1_000_000
    details = []
    ok = True
    for lams in configs:
        cfg = scenario.default_config(len(lams), lams)
        bob = len(lams)
        exact = scenario.chsh_value(cfg, bob).chsh_value
        hits = 0
        for seed in range(100):
            report = mc.estimate_chsh(cfg, bob, shots, seed)
            if abs(report.estimate - exact) <= 5.0 * report.standard_error:
                hits += 1
        ok = ok and hits >= 99
        details.append(f"n={len(lams)}: {hits}/100 seeds within 5 SE")
    return ok, "; ".join(details) + f" at {shots} shots (need >= 99)"


def _ac10_pairwise_regions() -> tuple[bool, str]:
    regions = analysis.pairwise_regions(resolution=0.02)
    details = []
    ok = True
    for pair, report in regions.items():
        if report.feasible_count == 0 or report.extremal_cell is None:
            ok = False
            details.append(f"{pair}: EMPTY")
            continue
        cell = report.extremal_cell
        cfg = scenario.default_config(len(cell), cell)
        other = ({1, 2, 3} - set(pair)).pop()
        values = {b: scenario.chsh_value(cfg, b).chsh_value for b in (1, 2, 3)}
        witness_ok = values[pair[0]] > 2.0 and values[pair[1]] > 2.0 and values[other] <= 2.0
        ok = ok and witness_ok
        details.append(
            f"{pair}: {report.feasible_count} cells, witness lam={tuple(round(v, 3) for v in cell)} "
            f"engine CHSH=({values[1]:.3f},{values[2]:.3f},{values[3]:.3f})"
        )
    return ok, "; ".join(details)


def _ac11_state_sanity() -> tuple[bool, str]:
    # Deliberately corrupted matrices must be rejected.
    good = qops.singlet().matrix.copy()
    rejected = 0
    bad_hermitian = good.copy()
    bad_hermitian[0, 1] = 0.5
    bad_trace = good * 1.5
    bad_psd = np.diag([0.7, 0.5, -0.1, -0.1]).astype(complex)
    for bad in (bad_hermitian, bad_trace, bad_psd):
        try:
            qops.DensityMatrix(bad)
        except ValueError:
            rejected += 1

    # Every state produced along random chains passes the invariants, and
    # every constructed measurement has a complete effect pair.
    rng = np.random.default_rng(1111)
    states_checked = 0
    effects_checked = 0
    worst_completeness = 0.0
    for _ in range(25):
        n = int(rng.integers(1, 5))
        lams = tuple(float(v) for v in rng.uniform(0.05, 1.0, n))
        cfg = scenario.default_config(n, lams)
        for bob in range(1, n + 1):
            rho = scenario.propagated_state(cfg, bob)
            m = rho.matrix
            assert qops.is_hermitian(m, 1e-12)
            assert abs(m.trace().real - 1.0) <= 1e-12
            assert qops.is_psd(m, 1e-10)
            states_checked += 1
            for setting in (0, 1):
                meas = cfg.measurement(bob, setting)
                total = povm.effect(meas, +1) + povm.effect(meas, -1)
                worst_completeness = max(
                    worst_completeness, float(np.max(np.abs(total - qops.IDENTITY_2)))
                )
                effects_checked += 1
    ok = rejected == 3 and worst_completeness <= 1e-12
    return ok, (
        f"{rejected}/3 corrupted matrices rejected; {states_checked} propagated states valid; "
        f"effect completeness gap {worst_completeness:.2e} over {effects_checked} measurements (tol 1e-12)"
    )


_CRITERIA: tuple[tuple[str, str, Callable[[], tuple[bool, str]]], ...] = (
    ("AC1", "optimal pointer identity F^2 + G^2 = 1", _ac1_optimality_identity),
    ("AC2", "pointer update equals square-root instrument update", _ac2_update_equivalence),
    ("AC3", "first-Bob CHSH = 2*sqrt(2)*lam_1", _ac3_first_bob_chsh),
    ("AC4", "second-Bob CHSH = lam_2*sqrt(2)*(1+sqrt(1-lam_1^2))", _ac4_second_bob_chsh),
    ("AC5", "double-violation window (0.70711, 0.91018)", _ac5_double_violation_window),
    ("AC6", "second-Bob violation onset at lam_2 = 0.8284", _ac6_lam2_threshold),
    ("AC7", "sup CHSH_3 = 1.8833 < 2 under double violation", _ac7_impossibility_bound),
    ("AC8", "engine matches closed-form recursion to 1e-10", _ac8_oracle_equivalence),
    ("AC9", "Monte Carlo estimates within 5 SE of exact values", _ac9_monte_carlo_consistency),
    ("AC10", "all three exclusive pairwise-violation regions nonempty", _ac10_pairwise_regions),
    ("AC11", "state invariants and effect completeness hold throughout", _ac11_state_sanity),
)

CRITERION_IDS = tuple(cid for cid, _, _ in _CRITERIA)


def run_criterion(criterion_id: str) -> CriterionResult:
    for cid, description, check in _CRITERIA:
        if cid == criterion_id:
            passed, detail = check()
            return CriterionResult(cid, description, passed, detail)
    raise KeyError(f"unknown criterion {criterion_id!r}; known: {', '.join(CRITERION_IDS)}")


def run_all(only: Iterable[str] | None = None) -> list[CriterionResult]:
    wanted = list(only) if only is not None else list(CRITERION_IDS)
    for cid in wanted:
        if cid not in CRITERION_IDS:
            raise KeyError(f"unknown criterion {cid!r}; known: {', '.join(CRITERION_IDS)}")
    return [run_criterion(cid) for cid in wanted]
