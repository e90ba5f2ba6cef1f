"""Model parameters and finite truncations of the parity-class Jacobi matrices.

Each parity sector of the quantum Rabi Hamiltonian acts as an infinite
symmetric tridiagonal (Jacobi) operator with diagonal entries
``d(k) = k + sign * (-1)**k * delta`` and off-diagonal entries
``a(k) = g * sqrt(k)``, ``k = 0, 1, 2, ...``.  The operator itself is never
stored; :func:`build_truncated` materializes the leading ``M x M`` block on
demand, which is all the eigensolver ever needs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Parity",
    "ModelParams",
    "TridiagonalMatrix",
    "diagonal_entry",
    "offdiagonal_entry",
    "build_truncated",
]


class Parity(enum.Enum):
    """Parity class of the Rabi spectrum; PLUS uses d_plus, MINUS uses d_minus."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value

    @property
    def label(self) -> str:
        return "plus" if self is Parity.PLUS else "minus"

    @classmethod
    def from_label(cls, label: str) -> "Parity":
        for p in cls:
            if p.label == label:
                return p
        raise ValueError(f"unknown parity label {label!r}")


@dataclass(frozen=True)
class ModelParams:
    """Coupling strength g and level-splitting parameter delta.

    delta = 0 is accepted: it is the exactly solvable degenerate case whose
    spectrum is a pair of displaced oscillators (used as a test anchor).
    """

    g: float
    delta: float

    def __post_init__(self) -> None:
        if not (self.g > 0.0):
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if not (self.delta >= 0.0):
            raise ValueError(f"level splitting delta must be >= 0, got {self.delta}")


@dataclass(frozen=True)
class TridiagonalMatrix:
    """A finite symmetric tridiagonal matrix; off-diagonal stored once.

    ``diag`` has length M, ``offdiag`` length M - 1.  Arrays are copied and
    frozen so instances can be shared freely across workers.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        diag = np.array(self.diag, dtype=np.float64, copy=True)
        offdiag = np.array(self.offdiag, dtype=np.float64, copy=True)
        if diag.ndim != 1 or diag.size < 1:
            raise ValueError("diag must be a nonempty 1-d array")
        if offdiag.ndim != 1 or offdiag.size != diag.size - 1:
            raise ValueError(
                f"offdiag must have length {diag.size - 1}, got {offdiag.size}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise ValueError("matrix entries must be finite")
        diag.flags.writeable = False
        offdiag.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)
        object.__setattr__(self, "dim", int(diag.size))


def diagonal_entry(k: int, parity: Parity, params: ModelParams) -> float:
    """Diagonal entry d(k) = k + parity.sign * (-1)**k * delta, k >= 0."""
    if k < 0:
        raise ValueError(f"diagonal index must be >= 0, got {k}")
    alt = 1.0 if k % 2 == 0 else -1.0
    return float(k) + parity.sign * alt * params.delta


def offdiagonal_entry(k: int, params: ModelParams) -> float:
    """Off-diagonal entry a(k) = g * sqrt(k), defined for k >= 1 only."""
    if k < 1:
        raise ValueError(f"off-diagonal index must be >= 1, got {k}")
    return params.g * math.sqrt(k)


def build_truncated(parity: Parity, params: ModelParams, dim: int) -> TridiagonalMatrix:
    """Leading dim x dim block of the parity-class Jacobi operator."""
    if dim < 1:
        raise ValueError(f"truncation dimension must be >= 1, got {dim}")
    k = np.arange(dim, dtype=np.float64)
    alt = 1.0 - 2.0 * (np.arange(dim) % 2)
    diag = k + parity.sign * params.delta * alt
    offdiag = params.g * np.sqrt(np.arange(1, dim, dtype=np.float64))
    return TridiagonalMatrix(diag=diag, offdiag=offdiag)
