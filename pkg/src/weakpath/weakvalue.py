"""Weak values, weak-value time series, projector weight distributions.

The central quantity is

    <f| exp(-i H (t_f - t)/hbar) O exp(-i H (t - t_i)/hbar) |i>
    -----------------------------------------------------------
              <f| exp(-i H (t_f - t_i)/hbar) |i>

which is generally complex even for Hermitian O. The weight distribution
splits the numerator over the eigenprojectors of O, normalized so the weights
sum to one; with no post-selection bias (f(t) = i(t)) they reduce to Born-rule
probabilities, otherwise they are quasi-probabilities that may be negative or
complex. ``reality_report`` is the diagnostic used to certify the cases where
the series comes out real.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .config import defaults
from .evolution import BoundaryPair, evolve_final, evolve_initial
from .hilbert import DimensionMismatch, OperatorMatrix, StateVector, eigh, inner, matexp

__all__ = [
    "OrthogonalBoundaryStates",
    "WeakValueSeries",
    "WeightDistribution",
    "RealityReport",
    "weak_value",
    "weak_value_series",
    "weight_distribution",
    "reality_report",
]


class OrthogonalBoundaryStates(ValueError):
    """|<f|U|i>| fell below the configured epsilon; weak values blow up here."""

    def __init__(self, modulus: float, epsilon: float):
        self.modulus = modulus
        self.epsilon = epsilon
        super().__init__(
            f"boundary states are (numerically) orthogonal: |<f|U|i>| = {modulus:.3e} "
            f"<= epsilon = {epsilon:.3e}"
        )


@dataclass(frozen=True, eq=False)
class WeakValueSeries:
    """Weak values sampled on a time grid, with the shared denominator."""

    times: np.ndarray
    values: np.ndarray
    denominator: complex

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.complex128)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-d arrays of equal length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def ill_conditioned(self) -> bool:
        return abs(self.denominator) <= defaults().denominator_epsilon

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,re,im\n")
        for t, v in zip(self.times, self.values):
            buf.write(f"{float(t)!r},{float(v.real)!r},{float(v.imag)!r}\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
            "denominator": [float(self.denominator.real), float(self.denominator.imag)],
        }


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    """Normalized projector weights over the (merged) eigenvalues of O."""

    eigenvalues: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.complex128)
        if lam.shape != w.shape or lam.ndim != 1:
            raise ValueError("eigenvalues and weights must be 1-d arrays of equal length")
        total = complex(np.sum(w))
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"weights must sum to 1, got {total}")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "weights", w)

    @property
    def weak_value(self) -> complex:
        return complex(np.sum(self.eigenvalues * self.weights))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("eigenvalue,re,im\n")
        for lam, w in zip(self.eigenvalues, self.weights):
            buf.write(f"{float(lam)!r},{float(w.real)!r},{float(w.imag)!r}\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "weights": [[float(w.real), float(w.imag)] for w in self.weights],
        }


@dataclass(frozen=True)
class RealityReport:
    max_imag_abs: float
    max_imag_over_real: float
    is_real: bool
    tol: float

    def to_json(self) -> dict:
        return {
            "max_imag_abs": self.max_imag_abs,
            "max_imag_over_real": self.max_imag_over_real,
            "is_real": self.is_real,
            "tol": self.tol,
        }


def _check_observable(o: OperatorMatrix, dim: int) -> None:
    if o.dim != dim:
        raise DimensionMismatch(f"observable dim {o.dim} vs state dim {dim}")
    err = float(np.max(np.abs(o.entries - o.entries.conj().T)))
    if err > defaults().hermitian:
        raise ValueError(f"observable must be Hermitian; deviation {err:.3e}")


def _denominator(pair: BoundaryPair, h: OperatorMatrix, hbar: float) -> complex:
    u_total = matexp(h, pair.duration, hbar)
    denom = inner(pair.final, u_total.apply(pair.initial))
    eps = defaults().denominator_epsilon
    if abs(denom) <= eps:
        raise OrthogonalBoundaryStates(abs(denom), eps)
    return denom


def _check_time(pair: BoundaryPair, t: float) -> None:
    if not (pair.t_i <= t <= pair.t_f):
        raise ValueError(f"t={t} outside [{pair.t_i}, {pair.t_f}]")


def weak_value(
    o: OperatorMatrix, pair: BoundaryPair, h: OperatorMatrix, t: float, hbar: float = 1.0
) -> complex:
    """The quotient <f(t)|O|i(t)> / <f|U(t_f - t_i)|i> at one time."""
    _check_time(pair, t)
    _check_observable(o, pair.dim)
    denom = _denominator(pair, h, hbar)
    i_t = evolve_initial(pair.initial, h, pair.t_i, t, hbar)
    f_t = evolve_final(pair.final, h, pair.t_f, t, hbar)
    numer = inner(f_t, StateVector(o.entries @ i_t.amplitudes))
    return numer / denom


def weak_value_series(
    o: OperatorMatrix,
    pair: BoundaryPair,
    h: OperatorMatrix,
    grid,
    hbar: float = 1.0,
) -> WeakValueSeries:
    """Pointwise weak values along an ascending grid in [t_i, t_f].

    The denominator is computed once; each grid point costs two propagators.
    """
    times = np.asarray(grid, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("grid must be a nonempty 1-d time list")
    if np.any(np.diff(times) < 0):
        raise ValueError("grid must be ascending")
    if times[0] < pair.t_i or times[-1] > pair.t_f:
        raise ValueError("grid must lie inside [t_i, t_f]")
    _check_observable(o, pair.dim)
    denom = _denominator(pair, h, hbar)
    values = np.empty(times.shape, dtype=np.complex128)
    for k, t in enumerate(times):
        i_t = evolve_initial(pair.initial, h, pair.t_i, float(t), hbar)
        f_t = evolve_final(pair.final, h, pair.t_f, float(t), hbar)
        values[k] = inner(f_t, StateVector(o.entries @ i_t.amplitudes)) / denom
    return WeakValueSeries(times=times, values=values, denominator=denom)


def _merged_projectors(o: OperatorMatrix) -> tuple[np.ndarray, list[np.ndarray]]:
    # Splitting a degenerate eigenspace is basis-dependent noise, so
    # eigenvalues closer than a relative gap share one projector.
    values, vectors = eigh(o)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    gap = defaults().projector_merge_rel_gap * scale
    merged_values: list[float] = []
    projectors: list[np.ndarray] = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > gap:
            block = vectors[:, start:k]
            projectors.append(block @ block.conj().T)
            merged_values.append(float(np.mean(values[start:k])))
            start = k
    return np.asarray(merged_values), projectors


def weight_distribution(
    o: OperatorMatrix, pair: BoundaryPair, h: OperatorMatrix, t: float, hbar: float = 1.0
) -> WeightDistribution:
    """Weights w_k = <f(t)|P_k|i(t)> / <f(t)|i(t)> over merged eigenprojectors."""
    _check_time(pair, t)
    _check_observable(o, pair.dim)
    denom = _denominator(pair, h, hbar)
    i_t = evolve_initial(pair.initial, h, pair.t_i, t, hbar)
    f_t = evolve_final(pair.final, h, pair.t_f, t, hbar)
    values, projectors = _merged_projectors(o)
    weights = np.array(
        [inner(f_t, StateVector(p @ i_t.amplitudes)) / denom for p in projectors],
        dtype=np.complex128,
    )
    return WeightDistribution(eigenvalues=values, weights=weights)


def reality_report(series: WeakValueSeries, tol: float | None = None) -> RealityReport:
    """is_real holds iff max|Im| <= tol * max(1, max|Re|)."""
    if series.ill_conditioned:
        raise ValueError("series is ill-conditioned; reality diagnostics are meaningless")
    if tol is None:
        tol = defaults().reality
    max_imag = float(np.max(np.abs(series.values.imag)))
    ref = max(1.0, float(np.max(np.abs(series.values.real))))
    ratio = max_imag / ref
    return RealityReport(
        max_imag_abs=max_imag, max_imag_over_real=ratio, is_real=ratio <= tol, tol=float(tol)
    )
