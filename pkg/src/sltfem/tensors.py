"""Mandel-vector algebra for symmetric 2x2 tensors and 4th-order operators.

A symmetric 2x2 tensor t is stored as the orthonormal Mandel vector
(t11, t22, sqrt(2)*t12), so the Frobenius inner product of tensors equals
the Euclidean dot product of their vectors, and the fourth-order stiffness
becomes a symmetric 3x3 matrix whose square root is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotPositiveDefinite

SQRT2 = np.sqrt(2.0)

# Mandel vector of the 2x2 identity
IDENTITY_M = np.array([1.0, 1.0, 0.0])


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric 2x2 tensor in Mandel form: (t11, t22, sqrt(2)*t12)."""

    m1: float
    m2: float
    m3: float

    @classmethod
    def from_mandel(cls, m) -> "SymTensor2":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0]), float(m[1]), float(m[2]))

    @classmethod
    def from_matrix(cls, t) -> "SymTensor2":
        t = np.asarray(t, dtype=float)
        return cls(float(t[0, 0]), float(t[1, 1]), float(SQRT2 * 0.5 * (t[0, 1] + t[1, 0])))

    @property
    def mandel(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3])

    def to_matrix(self) -> np.ndarray:
        off = self.m3 / SQRT2
        return np.array([[self.m1, off], [off, self.m2]])

    def norm(self) -> float:
        """Frobenius norm of the represented tensor."""
        return float(np.linalg.norm(self.mandel))

    def dot(self, other: "SymTensor2") -> float:
        """Double contraction A:B."""
        return float(self.mandel @ other.mandel)

    def trace(self) -> float:
        return self.m1 + self.m2

    def principal_values(self) -> tuple[float, float]:
        """Eigenvalues of the 2x2 tensor, (max, min)."""
        mean = 0.5 * (self.m1 + self.m2)
        rad = np.hypot(0.5 * (self.m1 - self.m2), self.m3 / SQRT2)
        return (mean + rad, mean - rad)


def _check_spd(mat: np.ndarray, what: str) -> None:
    eigmin = float(np.linalg.eigvalsh(mat).min())
    if eigmin <= 0.0:
        raise NotPositiveDefinite(f"{what}: smallest eigenvalue {eigmin:.6g} <= 0")


@dataclass(frozen=True)
class Stiffness3:
    """Fourth-order stiffness operator as a symmetric 3x3 Mandel matrix."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=float)
        if mat.shape != (3, 3):
            raise ValueError("Stiffness3 expects a 3x3 matrix")
        if not np.allclose(mat, mat.T, rtol=0.0, atol=1e-12 * max(1.0, abs(mat).max())):
            raise ValueError("Stiffness3 must be symmetric")
        mat = 0.5 * (mat + mat.T)
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)
        _check_spd(mat, "stiffness")

    def apply(self, eps: SymTensor2) -> SymTensor2:
        return SymTensor2.from_mandel(self.entries @ eps.mandel)

    def max_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).max())


@dataclass(frozen=True)
class Compliance3:
    """Inverse of the stiffness operator, same Mandel convention."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = 0.5 * (np.asarray(self.entries, dtype=float) + np.asarray(self.entries, dtype=float).T)
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)
        _check_spd(mat, "compliance")

    def apply(self, sigma: SymTensor2) -> SymTensor2:
        return SymTensor2.from_mandel(self.entries @ sigma.mandel)


def structural_mandel(fiber_angle: float) -> np.ndarray:
    """Mandel vector of the structural tensor m (x) m for a unit fiber m."""
    c, s = np.cos(fiber_angle), np.sin(fiber_angle)
    return np.array([c * c, s * s, SQRT2 * c * s])


def build_stiffness(lam: float, mu: float, gamma: float, fiber_angle: float = 0.0) -> Stiffness3:
    """Transversely isotropic stiffness 2*mu*eps + lam*tr(eps)*I + gamma*(eps:M)*M.

    Raises NotPositiveDefinite if the parameter set (e.g. a too-negative
    gamma) breaks positive definiteness.
    """
    if mu <= 0.0:
        raise NotPositiveDefinite(f"mu={mu} must be positive")
    v_m = structural_mandel(fiber_angle)
    mat = 2.0 * mu * np.eye(3) + lam * np.outer(IDENTITY_M, IDENTITY_M) + gamma * np.outer(v_m, v_m)
    return Stiffness3(mat)


def build_compliance(E: Stiffness3) -> Compliance3:
    """Exact 3x3 inverse of the stiffness matrix."""
    return Compliance3(np.linalg.inv(E.entries))


def energy_norm_m(eps_m: np.ndarray, E_mat: np.ndarray) -> np.ndarray:
    """sqrt(eps : E[eps]) for an array of Mandel vectors, shape (..., 3)."""
    eps_m = np.asarray(eps_m, dtype=float)
    q = np.einsum("...i,ij,...j->...", eps_m, E_mat, eps_m)
    return np.sqrt(np.maximum(q, 0.0))


def energy_norm(eps: SymTensor2, E: Stiffness3) -> float:
    """Energy norm ||E^(1/2)[eps]||, computed as the quadratic form."""
    return float(energy_norm_m(eps.mandel, E.entries))
