"""Parameter-space studies over the sharpness cube.

Grid sweeps of the closed-form CHSH recursion locate violation regions and
constrained extrema; analytic boundary evaluations accompany every grid
result, and reported cells are kept small enough that each one can be
re-verified through the density-matrix engine.

The headline computation is the constrained maximum of the third observer's
CHSH value subject to the first two both violating: the supremum sits on the
constraint boundary at (1/sqrt(2), 2/(sqrt(2)+1), 1) and evaluates to about
1.8832, strictly below the local bound 2.  Grid maxima certify the same gap
numerically at every resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .povm import quality_of
from .scenario import (
    TSIRELSON_BOUND,
    chsh_value,
    closed_form_chsh,
    default_config,
    violation_window_bob1,
)

# Cap on cells stored in a report; keeps engine re-verification cheap.
MAX_REPORTED_CELLS = 64


@dataclass(frozen=True)
class GridRange:
    """Inclusive grid over one sharpness axis."""

    lo: float
    hi: float
    step: float

    def __post_init__(self) -> None:
        if not (0.0 < self.lo < self.hi <= 1.0):
            raise ValueError(f"need 0 < lo < hi <= 1, got ({self.lo!r}, {self.hi!r})")
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive, got {self.step!r}")

    def points(self) -> np.ndarray:
        count = int(round((self.hi - self.lo) / self.step))
        pts = self.lo + self.step * np.arange(count + 1)
        return np.minimum(pts[pts <= self.hi + self.step / 2], 1.0)


@dataclass(frozen=True)
class Constraint:
    """One Bob's CHSH compared against a threshold.

    ``exceeds=True`` (the default) demands CHSH strictly above the threshold;
    ``exceeds=False`` demands CHSH at or below it (an exclusion).
    """

    bob_index: int
    threshold: float
    exceeds: bool = True

    def __post_init__(self) -> None:
        if self.bob_index < 1:
            raise ValueError("bob_index must be >= 1")
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")

    def satisfied(self, chsh: float) -> bool:
        return chsh > self.threshold if self.exceeds else chsh <= self.threshold


@dataclass(frozen=True)
class SweepSpec:
    """A grid sweep: one range (or pinned value) per Bob, targets, constraints."""

    ranges: tuple[GridRange | float, ...]
    target_bobs: tuple[int, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        n = len(self.ranges)
        if n < 1:
            raise ValueError("at least one axis is required")
        for r in self.ranges:
            if isinstance(r, float) and not (0.0 < r <= 1.0):
                raise ValueError(f"pinned sharpness must lie in (0, 1], got {r!r}")
        for b in self.target_bobs:
            if not 1 <= b <= n:
                raise ValueError(f"target bob {b} outside chain of length {n}")
        for c in self.constraints:
            if c.bob_index > n:
                raise ValueError(f"constraint on bob {c.bob_index} outside chain of length {n}")


@dataclass(frozen=True)
class RegionReport:
    """Feasible cells of a sweep with the extremal cell and analytic anchors.

    ``feasible_cells`` is a deterministic sample of at most
    ``MAX_REPORTED_CELLS`` cells that always contains the extremal one;
    ``feasible_count`` is the full count.  Construction re-checks that every
    reported cell satisfies the constraints and that the extremal value is
    the maximum objective over the reported cells.
    """

    target_bobs: tuple[int, ...]
    constraints: tuple[Constraint, ...]
    resolution: float
    feasible_count: int
    feasible_cells: tuple[tuple[float, ...], ...]
    cell_chsh: tuple[tuple[float, ...], ...]
    extremal_cell: tuple[float, ...] | None
    extremal_value: float | None
    objective_bobs: tuple[int, ...]
    refinement_depth: int = 0
    analytic_boundary: tuple[float, ...] | None = None
    analytic_value: float | None = None
    window: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if len(self.feasible_cells) != len(self.cell_chsh):
            raise ValueError("cell listings out of sync")
        for cell in self.feasible_cells:
            for c in self.constraints:
                if not c.satisfied(closed_form_chsh(cell, c.bob_index)):
                    raise ValueError(f"reported cell {cell} violates constraint {c}")
        if self.feasible_cells:
            best = max(self._objective(cell) for cell in self.feasible_cells)
            if self.extremal_value is None or self.extremal_value < best - 1e-12:
                raise ValueError("extremal value is not the maximum over reported cells")

    def _objective(self, cell: tuple[float, ...]) -> float:
        return min(closed_form_chsh(cell, b) for b in self.objective_bobs)


def _axis_points(r: GridRange | float) -> np.ndarray:
    return r.points() if isinstance(r, GridRange) else np.array([float(r)])


def _chsh_mesh(axes: list[np.ndarray], bob_index: int) -> np.ndarray:
    """Closed-form CHSH of one Bob, broadcastable over the grid axes."""
    n = len(axes)

    def shaped(k: int, values: np.ndarray) -> np.ndarray:
        shape = [1] * n
        shape[k] = values.size
        return values.reshape(shape)

    value = TSIRELSON_BOUND * shaped(bob_index - 1, axes[bob_index - 1])
    for k in range(bob_index - 1):
        value = value * shaped(k, (1.0 + np.sqrt(1.0 - axes[k] ** 2)) / 2.0)
    return value


def run_sweep(
    spec: SweepSpec,
    objective_bobs: tuple[int, ...] | None = None,
    refinement_depth: int = 0,
) -> RegionReport:
    """Evaluate a sweep and assemble its region report.

    The per-cell objective is the minimum CHSH value over ``objective_bobs``
    (the strength of a joint violation; a single Bob maximizes his own
    value).  Defaults to the target Bobs.  Deterministic: cells are visited
    in grid order and sampled evenly when there are more than
    ``MAX_REPORTED_CELLS``.
    """
    axes = [_axis_points(r) for r in spec.ranges]
    shape = tuple(ax.size for ax in axes)
    if objective_bobs is None:
        objective_bobs = spec.target_bobs

    mask = np.ones(shape, dtype=bool)
    for c in spec.constraints:
        mesh = np.broadcast_to(_chsh_mesh(axes, c.bob_index), shape)
        mask &= (mesh > c.threshold) if c.exceeds else (mesh <= c.threshold)
    feasible_count = int(mask.sum())

    step = min((r.step for r in spec.ranges if isinstance(r, GridRange)), default=0.0)
    base = dict(
        target_bobs=spec.target_bobs,
        constraints=spec.constraints,
        resolution=step,
        objective_bobs=objective_bobs,
        refinement_depth=refinement_depth,
    )
    if feasible_count == 0:
        return RegionReport(
            feasible_count=0,
            feasible_cells=(),
            cell_chsh=(),
            extremal_cell=None,
            extremal_value=None,
            **base,
        )

    objective = np.broadcast_to(_chsh_mesh(axes, objective_bobs[0]), shape)
    for b in objective_bobs[1:]:
        objective = np.minimum(objective, np.broadcast_to(_chsh_mesh(axes, b), shape))

    masked = np.where(mask, objective, -np.inf)
    flat_best = int(np.argmax(masked))
    extremal_value = float(masked.reshape(-1)[flat_best])

    flat_feasible = np.flatnonzero(mask.reshape(-1))
    if flat_feasible.size > MAX_REPORTED_CELLS:
        picks = flat_feasible[np.linspace(0, flat_feasible.size - 1, MAX_REPORTED_CELLS).astype(int)]
    else:
        picks = flat_feasible
    picks = np.unique(np.append(picks, flat_best))

    def cell_at(flat: int) -> tuple[float, ...]:
        idx = np.unravel_index(int(flat), shape)
        return tuple(float(axes[k][idx[k]]) for k in range(len(axes)))

    cells = [cell_at(flat) for flat in picks]
    chsh_rows = [tuple(closed_form_chsh(cell, b) for b in spec.target_bobs) for cell in cells]

    return RegionReport(
        feasible_count=feasible_count,
        feasible_cells=tuple(cells),
        cell_chsh=tuple(chsh_rows),
        extremal_cell=cell_at(flat_best),
        extremal_value=extremal_value,
        **base,
    )


def double_violation_region(resolution: float = 0.001) -> RegionReport:
    """Sweep lam_1 with lam_2 = 1 for simultaneous first/second-Bob violation.

    The feasible set brackets the open interval
    (1/sqrt(2), sqrt(2(sqrt(2)-1))) with endpoint error at most one step.
    """
    if resolution > 0.01:
        raise ValueError("resolution must be <= 0.01 for a meaningful window bracket")
    spec = SweepSpec(
        ranges=(GridRange(resolution, 1.0, resolution), 1.0),
        target_bobs=(1, 2),
        constraints=(Constraint(1, 2.0), Constraint(2, 2.0)),
    )
    report = run_sweep(spec)
    window = None
    if report.feasible_count:
        lam1_values = [cell[0] for cell in report.feasible_cells]
        window = (min(lam1_values), max(lam1_values))
    return replace(report, analytic_boundary=violation_window_bob1(), window=window)


def max_chsh3_under_double_violation(resolution: float = 0.005, refine: int = 0) -> RegionReport:
    """Constrained maximum of the third Bob's CHSH with the first two violating.

    Scans the full (lam_1, lam_2, lam_3) cube at the given resolution; the
    report also carries the analytic boundary evaluation at
    (1/sqrt(2), 2/(sqrt(2)+1), 1), which upper-bounds every feasible cell
    because the objective falls monotonically away from that corner.
    ``refine`` extra passes re-scan around the incumbent at 1/5 the step.
    """
    if resolution > 0.005:
        raise ValueError("resolution must be <= 0.005 for the certificate")
    constraints = (Constraint(1, 2.0), Constraint(2, 2.0))

    report = run_sweep(
        SweepSpec(
            ranges=(GridRange(resolution, 1.0, resolution),) * 3,
            target_bobs=(1, 2, 3),
            constraints=constraints,
        ),
        objective_bobs=(3,),
    )

    step = resolution
    for depth in range(1, refine + 1):
        if report.extremal_cell is None:
            break
        fine = step / 5.0
        ranges = tuple(
            GridRange(max(fine, c - 2 * step), min(1.0, c + 2 * step), fine)
            for c in report.extremal_cell
        )
        candidate = run_sweep(
            SweepSpec(ranges=ranges, target_bobs=(1, 2, 3), constraints=constraints),
            objective_bobs=(3,),
            refinement_depth=depth,
        )
        if candidate.extremal_value is not None and candidate.extremal_value > report.extremal_value:
            report = replace(
                candidate,
                feasible_count=report.feasible_count,
                resolution=resolution,
            )
        step = fine

    lam1 = 1.0 / math.sqrt(2.0)
    lam2 = 2.0 / (math.sqrt(2.0) + 1.0)
    boundary = (lam1, lam2, 1.0)
    return replace(report, analytic_boundary=boundary, analytic_value=closed_form_chsh(boundary, 3))


def pairwise_regions(resolution: float = 0.02) -> dict[tuple[int, int], RegionReport]:
    """Regions where exactly one pair of the first three Bobs violates CHSH.

    For each pair in {(1,2), (1,3), (2,3)} the report covers cells of the
    sharpness cube where both members exceed 2 while the remaining Bob stays
    at or below 2.  All three regions are nonempty.
    """
    axis = GridRange(resolution, 1.0, resolution)
    out: dict[tuple[int, int], RegionReport] = {}
    for pair in ((1, 2), (1, 3), (2, 3)):
        other = ({1, 2, 3} - set(pair)).pop()
        spec = SweepSpec(
            ranges=(axis, axis, axis),
            target_bobs=(1, 2, 3),
            constraints=(
                Constraint(pair[0], 2.0),
                Constraint(pair[1], 2.0),
                Constraint(other, 2.0, exceeds=False),
            ),
        )
        out[pair] = run_sweep(spec, objective_bobs=pair)
    return out


def bob2_violation_onset(lam1: float, resolution: float = 0.0005) -> float:
    """Smallest grid sharpness at which the second Bob violates, given lam_1.

    The analytic threshold is 2 / (sqrt(2) (1 + sqrt(1 - lam1^2)));
    at lam_1 = 1/sqrt(2) this is 2/(sqrt(2)+1).
    """
    grid = np.minimum(resolution * np.arange(1, int(round(1.0 / resolution)) + 1), 1.0)
    values = TSIRELSON_BOUND * grid * (1.0 + math.sqrt(1.0 - lam1 * lam1)) / 2.0
    hits = np.flatnonzero(values > 2.0)
    if hits.size == 0:
        raise ValueError(f"no violating sharpness exists for lam1 = {lam1!r}")
    return float(grid[hits[0]])


@dataclass(frozen=True)
class TradeoffPoint:
    """One row of the optimal-pointer curve: sharpness, F, G, first-Bob CHSH."""

    sharpness: float
    quality_f: float
    precision_g: float
    chsh_first: float


def tradeoff_curve(lambdas) -> tuple[TradeoffPoint, ...]:
    """Optimal-pointer curve (lam, F, G, CHSH_1) over a sharpness grid."""
    rows = []
    for lam in lambdas:
        lam = float(lam)
        pq = quality_of(lam)
        rows.append(
            TradeoffPoint(
                sharpness=lam,
                quality_f=pq.quality_f,
                precision_g=pq.precision_g,
                chsh_first=TSIRELSON_BOUND * lam,
            )
        )
    return tuple(rows)


def verify_region_with_engine(report: RegionReport, tol: float = 1e-9) -> bool:
    """Re-evaluate every reported cell through the density-matrix engine.

    Confirms the constraints hold for the engine values (not just the closed
    form) and that engine and closed form agree within ``tol`` per cell.
    """
    for cell, closed_row in zip(report.feasible_cells, report.cell_chsh):
        cfg = default_config(len(cell), cell)
        engine_by_bob = {b: chsh_value(cfg, b).chsh_value for b in report.target_bobs}
        for b, closed_value in zip(report.target_bobs, closed_row):
            if abs(engine_by_bob[b] - closed_value) > tol:
                return False
        for c in report.constraints:
            engine_value = engine_by_bob.get(c.bob_index)
            if engine_value is None:
                engine_value = chsh_value(cfg, c.bob_index).chsh_value
            if not c.satisfied(engine_value):
                return False
    return True
