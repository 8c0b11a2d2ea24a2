"""Exact small-dimension complex linear algebra for two-qubit simulations.

Operators are plain ``numpy`` arrays of shape (2, 2) or (4, 4) with dtype
complex128.  Validated state and direction wrappers (:class:`DensityMatrix`,
:class:`BlochDirection`) enforce their invariants at construction time so
that everything downstream can assume well-formed inputs.

Tensor ordering convention: the FIRST factor of every Kronecker product acts
on Alice's qubit, the SECOND on Bob's.  This is fixed globally and asserted
in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tolerances: algebraic identities at 1e-12, spectral checks at 1e-10.
ALG_TOL = 1e-12
SPECTRAL_TOL = 1e-10

IDENTITY_2 = np.eye(2, dtype=complex)
IDENTITY_4 = np.eye(4, dtype=complex)

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_finite(m: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError(f"{what} contains NaN or Inf entries")


def is_hermitian(m: np.ndarray, tol: float = ALG_TOL) -> bool:
    """True when max |M - M^dagger| entrywise is within ``tol``."""
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_psd(m: np.ndarray, tol: float = SPECTRAL_TOL) -> bool:
    """True when M is Hermitian and its smallest eigenvalue is >= -tol."""
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, max(tol, ALG_TOL)):
        return False
    return bool(np.min(np.linalg.eigvalsh(m)) >= -tol)


def is_projector(m: np.ndarray, tol: float = ALG_TOL) -> bool:
    """True when M is Hermitian and idempotent within ``tol``."""
    m = np.asarray(m, dtype=complex)
    return is_hermitian(m, tol) and bool(np.max(np.abs(m @ m - m)) <= tol)


@dataclass(frozen=True)
class BlochDirection:
    """A measurement axis: real unit 3-vector on the Bloch sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError("direction components must be finite")
        norm_sq = self.x**2 + self.y**2 + self.z**2
        if abs(norm_sq - 1.0) > ALG_TOL:
            raise ValueError(f"direction is not unit: |n|^2 = {norm_sq!r}")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "BlochDirection":
        """Build a direction from an arbitrary nonzero 3-vector."""
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(x / norm, y / norm, z / norm)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "BlochDirection") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self) -> "BlochDirection":
        return BlochDirection(-self.x, -self.y, -self.z)


X_AXIS = BlochDirection(1.0, 0.0, 0.0)
Y_AXIS = BlochDirection(0.0, 1.0, 0.0)
Z_AXIS = BlochDirection(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated 4x4 two-qubit state.

    Construction rejects any matrix that is not Hermitian (1e-12), unit
    trace (1e-12), or positive semidefinite (eigenvalues >= -1e-10).  The
    wrapped array is made read-only so states are immutable values.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        _check_finite(m, "density matrix")
        if not is_hermitian(m, ALG_TOL):
            raise ValueError("density matrix is not Hermitian within 1e-12")
        tr = m.trace()
        if abs(tr - 1.0) > ALG_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.min(np.linalg.eigvalsh(m)) < -SPECTRAL_TOL:
            raise ValueError("density matrix has a negative eigenvalue beyond 1e-10")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def pauli(axis: str) -> np.ndarray:
    """Standard Pauli matrix for axis "X", "Y" or "Z"."""
    key = axis.upper()
    if key not in _PAULI:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected X, Y or Z")
    return _PAULI[key].copy()


def dir_op(n: BlochDirection) -> np.ndarray:
    """Spin observable n.sigma along a unit direction; eigenvalues +-1."""
    return n.x * _PAULI["X"] + n.y * _PAULI["Y"] + n.z * _PAULI["Z"]


def sharp_projector(n: BlochDirection, outcome: int) -> np.ndarray:
    """Rank-1 projector (I + outcome * n.sigma) / 2 for outcome +-1."""
    if outcome not in (+1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    return (IDENTITY_2 + outcome * dir_op(n)) / 2.0


def singlet() -> DensityMatrix:
    """The maximally entangled pair state with correlation -a.b along any axes."""
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0 / math.sqrt(2.0)   # |01>
    psi[2] = -1.0 / math.sqrt(2.0)  # |10>
    return DensityMatrix(np.outer(psi, psi.conj()))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product; ``a`` acts on Alice's wing, ``b`` on Bob's."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def expectation(rho: DensityMatrix, obs: np.ndarray) -> float:
    """Real expectation tr[rho * obs] of a Hermitian two-qubit observable."""
    obs = np.asarray(obs, dtype=complex)
    if not is_hermitian(obs, ALG_TOL):
        raise ValueError("observable is not Hermitian within 1e-12")
    value = np.trace(rho.matrix @ obs)
    if abs(value.imag) >= SPECTRAL_TOL:
        raise ValueError(f"trace has imaginary residue {value.imag!r}")
    return float(value.real)


def hermitian_sqrt(a: np.ndarray) -> np.ndarray:
    """Unique PSD square root of a 2x2 Hermitian PSD matrix.

    Uses the closed trace/determinant form instead of an iterative
    eigensolver: sqrt(A) = (A + sqrt(det A) * I) / sqrt(tr A + 2 sqrt(det A)).
    """
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    _check_finite(a, "matrix")
    if not is_hermitian(a, ALG_TOL):
        raise ValueError("matrix is not Hermitian within 1e-12")
    tr = a.trace().real
    det = np.linalg.det(a).real
    # 2x2 Hermitian eigenvalues in closed form: (tr +- sqrt(tr^2 - 4 det)) / 2.
    disc = max(tr * tr - 4.0 * det, 0.0)
    eig_min = (tr - math.sqrt(disc)) / 2.0
    if eig_min < -SPECTRAL_TOL:
        raise ValueError(f"matrix has negative eigenvalue {eig_min!r}")
    if tr <= ALG_TOL:
        return np.zeros((2, 2), dtype=complex)
    sqrt_det = math.sqrt(max(det, 0.0))
    denom = math.sqrt(tr + 2.0 * sqrt_det)
    return (a + sqrt_det * IDENTITY_2) / denom


def random_unit_direction(rng: np.random.Generator) -> BlochDirection:
    """Uniformly random Bloch direction drawn from the given generator."""
    v = rng.normal(size=3)
    while np.linalg.norm(v) < 1e-6:
        v = rng.normal(size=3)
    return BlochDirection.normalized(*v)


def random_density_matrix(rng: np.random.Generator) -> DensityMatrix:
    """Random full-rank two-qubit state (normalized Wishart draw)."""
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    return DensityMatrix(m / m.trace())
