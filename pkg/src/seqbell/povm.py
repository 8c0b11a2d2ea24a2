"""Single-parameter unsharp two-outcome measurements and their state updates.

An unsharp measurement along direction n with sharpness ``lam`` in [0, 1]
is the effect pair

    E(+-) = lam * P(+-) + (1 - lam) / 2 * I,

a convex mixture of the sharp projectors with white noise.  The square-root
(generalized Lueders) instrument gives the selective and non-selective
post-measurement states; the non-selective update is equivalent to the
(F, G) pointer parameterization with quality F = sqrt(1 - lam^2) and
precision G = lam, which saturates F^2 + G^2 = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qops import (
    ALG_TOL,
    BlochDirection,
    DensityMatrix,
    IDENTITY_2,
    dir_op,
    kron,
    sharp_projector,
)

# Conditional states are undefined below this outcome probability.
NULL_OUTCOME_TOL = 1e-14


class Wing(enum.Enum):
    """Which qubit of the pair a local operation acts on."""

    ALICE = "alice"
    BOB = "bob"


class NullOutcomeError(ValueError):
    """Raised when conditioning on an outcome of (numerically) zero probability."""


@dataclass(frozen=True)
class UnsharpMeasurement:
    """A measurement direction together with its sharpness lam in [0, 1].

    lam = 1 is the sharp (projective) limit, lam = 0 the trivial white-noise
    limit that yields no information and leaves the state untouched.
    """

    direction: BlochDirection
    sharpness: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.sharpness <= 1.0) or not math.isfinite(self.sharpness):
            raise ValueError(f"sharpness must lie in [0, 1], got {self.sharpness!r}")


@dataclass(frozen=True)
class PointerQuality:
    """Quality factor F (state preservation) and precision G (information gain).

    Attainable pointers satisfy F^2 + G^2 <= 1; equality characterizes the
    optimal trade-off, realized by the unsharp family with G = lam.
    """

    quality_f: float
    precision_g: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.quality_f <= 1.0):
            raise ValueError(f"quality factor must lie in [0, 1], got {self.quality_f!r}")
        if not (0.0 <= self.precision_g <= 1.0):
            raise ValueError(f"precision must lie in [0, 1], got {self.precision_g!r}")
        if self.quality_f**2 + self.precision_g**2 > 1.0 + ALG_TOL:
            raise ValueError("unattainable pointer: F^2 + G^2 > 1")


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the +1 and -1 outcomes of a two-outcome measurement."""

    p_plus: float
    p_minus: float

    def __post_init__(self) -> None:
        for p in (self.p_plus, self.p_minus):
            if not (-ALG_TOL <= p <= 1.0 + ALG_TOL):
                raise ValueError(f"probability {p!r} outside [0, 1]")
        if abs(self.p_plus + self.p_minus - 1.0) > ALG_TOL:
            raise ValueError("outcome probabilities do not sum to 1")
        object.__setattr__(self, "p_plus", min(max(self.p_plus, 0.0), 1.0))
        object.__setattr__(self, "p_minus", min(max(self.p_minus, 0.0), 1.0))


def effect(m: UnsharpMeasurement, outcome: int) -> np.ndarray:
    """Effect operator lam * P(outcome) + (1 - lam)/2 * I; eigenvalues (1 +- lam)/2."""
    if outcome not in (+1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    lam = m.sharpness
    return lam * sharp_projector(m.direction, outcome) + (1.0 - lam) / 2.0 * IDENTITY_2


def effect_sqrt(m: UnsharpMeasurement, outcome: int) -> np.ndarray:
    """Closed-form PSD square root of the effect: a*I + outcome*b*(n.sigma).

    With s(+-) = sqrt((1 +- lam)/2), the coefficients are a = (s+ + s-)/2 and
    b = (s+ - s-)/2.  Agrees with the generic Hermitian square root; using
    the closed form keeps spectral-routine noise out of the update path.
    """
    if outcome not in (+1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    lam = m.sharpness
    s_plus = math.sqrt((1.0 + lam) / 2.0)
    s_minus = math.sqrt((1.0 - lam) / 2.0)
    a = (s_plus + s_minus) / 2.0
    b = (s_plus - s_minus) / 2.0
    return a * IDENTITY_2 + outcome * b * dir_op(m.direction)


def _embed(op: np.ndarray, wing: Wing) -> np.ndarray:
    """Lift a single-qubit operator to the pair; identity on the other wing."""
    if wing is Wing.ALICE:
        return kron(op, IDENTITY_2)
    if wing is Wing.BOB:
        return kron(IDENTITY_2, op)
    raise ValueError(f"unknown wing {wing!r}")


def outcome_probability(rho: DensityMatrix, wing: Wing, m: UnsharpMeasurement) -> OutcomeDistribution:
    """Outcome law p(+-) = tr[(I (x) E(+-)) rho] for a measurement on one wing."""
    p_plus = float(np.trace(_embed(effect(m, +1), wing) @ rho.matrix).real)
    return OutcomeDistribution(p_plus, 1.0 - p_plus)


def luders_selective(
    rho: DensityMatrix, wing: Wing, m: UnsharpMeasurement, outcome: int
) -> tuple[float, DensityMatrix]:
    """Probability and renormalized post-state sqrt(E) rho sqrt(E) / p.

    Raises :class:`NullOutcomeError` when the outcome probability is below
    1e-14, where the conditional state is undefined.
    """
    k = _embed(effect_sqrt(m, outcome), wing)
    unnormalized = k @ rho.matrix @ k
    p = float(unnormalized.trace().real)
    if p < NULL_OUTCOME_TOL:
        raise NullOutcomeError(
            f"conditioning on null event: outcome {outcome:+d} has probability {p!r}"
        )
    return p, DensityMatrix(unnormalized / p)


def luders_nonselective(rho: DensityMatrix, wing: Wing, m: UnsharpMeasurement) -> DensityMatrix:
    """Outcome-averaged update sum over +- of sqrt(E) rho sqrt(E); trace preserving."""
    out = np.zeros((4, 4), dtype=complex)
    for outcome in (+1, -1):
        k = _embed(effect_sqrt(m, outcome), wing)
        out += k @ rho.matrix @ k
    return DensityMatrix(out)


def quality_of(lam: float) -> PointerQuality:
    """Pointer figures of the unsharp family: F = sqrt(1 - lam^2), G = lam."""
    if not (0.0 <= lam <= 1.0) or not math.isfinite(lam):
        raise ValueError(f"sharpness must lie in [0, 1], got {lam!r}")
    return PointerQuality(quality_f=math.sqrt(1.0 - lam * lam), precision_g=lam)


def pointer_model_update(
    rho: DensityMatrix, wing: Wing, n: BlochDirection, pq: PointerQuality
) -> DensityMatrix:
    """(F, G)-parameterized non-selective update F*rho + (1-F) * sum P rho P.

    For pq = quality_of(lam) this coincides entrywise with
    :func:`luders_nonselective` at sharpness lam.
    """
    f = pq.quality_f
    dephased = np.zeros((4, 4), dtype=complex)
    for outcome in (+1, -1):
        p = _embed(sharp_projector(n, outcome), wing)
        dephased += p @ rho.matrix @ p
    return DensityMatrix(f * rho.matrix + (1.0 - f) * dephased)
