"""Complex linear-algebra primitives shared by the quantum-side modules.

States and operators are immutable wrappers around complex numpy arrays; every
operation here is a pure function, so values can be shared freely between
workers. Matrices and vectors interchange as JSON nested arrays of
``[re, im]`` pairs (see ``to_pairs`` / ``from_pairs``), which is the wire
format used by every other module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import defaults

__all__ = [
    "StateVector",
    "OperatorMatrix",
    "Propagator",
    "DimensionMismatch",
    "inner",
    "matexp",
    "eigh",
    "to_pairs",
    "from_pairs",
]

OPERATOR_KINDS = ("hermitian", "normal", "general")


class DimensionMismatch(ValueError):
    """Operands live in Hilbert spaces of different dimension."""


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_vector(values) -> np.ndarray:
    vec = np.array(values, dtype=np.complex128, order="C")
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError(f"expected a nonempty 1-d amplitude list, got shape {vec.shape}")
    if not np.all(np.isfinite(vec.view(np.float64))):
        raise ValueError("amplitudes must be finite")
    return _freeze(vec)


def _as_matrix(values) -> np.ndarray:
    mat = np.array(values, dtype=np.complex128, order="C")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    return _freeze(mat)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector for a ket in an n-dimensional Hilbert space.

    ``normalized=True`` asserts sum |a_k|^2 = 1 and is verified on
    construction; unflagged vectors may carry any finite amplitudes.
    """

    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_vector(self.amplitudes))
        if self.normalized:
            err = abs(self.norm() ** 2 - 1.0)
            if err > defaults().state_normalization:
                raise ValueError(f"state flagged normalized but sum|a|^2 deviates by {err:.3e}")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, normalized=True)

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector(self.amplitudes * complex(factor))

    def to_pairs(self) -> list:
        return to_pairs(self.amplitudes)

    @classmethod
    def from_pairs(cls, data, normalized: bool = False) -> "StateVector":
        return cls(from_pairs(data), normalized=normalized)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Square complex matrix with a declared, verified kind.

    kind "hermitian" requires M = M^dagger entrywise, "normal" requires
    M M^dagger = M^dagger M, and "general" accepts anything finite (the
    generic Hamiltonian here is non-normal).
    """

    entries: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_matrix(self.entries))
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"kind must be one of {OPERATOR_KINDS}, got {self.kind!r}")
        m = self.entries
        if self.kind == "hermitian":
            err = float(np.max(np.abs(m - m.conj().T)))
            if err > defaults().hermitian:
                raise ValueError(f"matrix declared hermitian deviates from M=M^dag by {err:.3e}")
        elif self.kind == "normal":
            comm = m @ m.conj().T - m.conj().T @ m
            err = float(np.max(np.abs(comm)))
            if err > defaults().normality:
                raise ValueError(f"matrix declared normal has |[M,M^dag]| = {err:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, kind=self.kind)

    def to_pairs(self) -> list:
        return to_pairs(self.entries)

    @classmethod
    def from_pairs(cls, data, kind: str = "general") -> "OperatorMatrix":
        return cls(from_pairs(data), kind=kind)

    @classmethod
    def hermitian(cls, values) -> "OperatorMatrix":
        return cls(values, kind="hermitian")


@dataclass(frozen=True, eq=False)
class Propagator:
    """Finite-time development matrix exp(-i H t / hbar) with its metadata."""

    matrix: np.ndarray
    duration: float
    hbar: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, state: StateVector) -> StateVector:
        if state.dim != self.dim:
            raise DimensionMismatch(f"propagator dim {self.dim} vs state dim {state.dim}")
        return StateVector(self.matrix @ state.amplitudes)

    def compose(self, other: "Propagator") -> "Propagator":
        if other.dim != self.dim:
            raise DimensionMismatch("cannot compose propagators of different dimension")
        return Propagator(self.matrix @ other.matrix, self.duration + other.duration, self.hbar)


def inner(f: StateVector, i: StateVector) -> complex:
    """Bracket <f|i> = sum_k conj(f_k) i_k."""
    if f.dim != i.dim:
        raise DimensionMismatch(f"<f|i> needs equal dims, got {f.dim} and {i.dim}")
    return complex(np.vdot(f.amplitudes, i.amplitudes))


def _expm(m: np.ndarray) -> np.ndarray:
    # Scaling-and-squaring with a Taylor core; valid for non-normal input,
    # where a unitary-diagonalization shortcut would be wrong.
    norm = float(np.linalg.norm(m, np.inf))
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
    a = m / (2.0**squarings)
    result = np.eye(m.shape[0], dtype=np.complex128)
    term = np.eye(m.shape[0], dtype=np.complex128)
    for k in range(1, 40):
        term = term @ a / k
        result = result + term
        if float(np.max(np.abs(term))) <= 1e-18 * max(1.0, float(np.max(np.abs(result)))):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def matexp(h: OperatorMatrix, t: float, hbar: float = 1.0) -> Propagator:
    """Propagator exp(-i H t / hbar); accepts any finite H, including non-normal."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    generator = (-1j * float(t) / float(hbar)) * h.entries
    return Propagator(_expm(generator), duration=float(t), hbar=float(hbar))


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude component of each column made real positive.
    fixed = vectors.copy()
    for k in range(fixed.shape[1]):
        col = fixed[:, k]
        j = int(np.argmax(np.abs(col)))
        pivot = col[j]
        if abs(pivot) > 0:
            fixed[:, k] = col * (pivot.conjugate() / abs(pivot))
    return fixed


def _order_degenerate(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    # Within an eigenvalue tie, order columns by first differing component
    # (real part, then imaginary part) so output is deterministic.
    scale = max(1.0, float(np.max(np.abs(values))))
    out = vectors.copy()
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[start] > 1e-12 * scale:
            if k - start > 1:
                block = [out[:, j].copy() for j in range(start, k)]
                block.sort(key=lambda c: tuple(x for comp in c for x in (comp.real, comp.imag)))
                for offset, col in enumerate(block):
                    out[:, start + offset] = col
            start = k
    return out


def eigh(o: OperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns ascending real eigenvalues and a matrix whose columns are the
    orthonormal eigenvectors under the deterministic phase convention
    (largest-magnitude component real positive; degenerate blocks ordered by
    first differing component).
    """
    m = o.entries
    herm_err = float(np.max(np.abs(m - m.conj().T)))
    if herm_err > defaults().hermitian:
        raise ValueError(f"eigh requires a Hermitian operator; deviation {herm_err:.3e}")
    values, vectors = np.linalg.eigh(m)
    vectors = _fix_phases(vectors)
    vectors = _order_degenerate(values, vectors)
    return values.astype(np.float64), _freeze(vectors)


def to_pairs(array: np.ndarray) -> list:
    """Complex ndarray -> nested lists of [re, im] pairs (JSON interchange)."""
    arr = np.asarray(array, dtype=np.complex128)
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def from_pairs(data: Sequence) -> np.ndarray:
    """Nested lists of [re, im] pairs -> complex ndarray."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.shape[-1] != 2:
        raise ValueError("interchange data must end in [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
