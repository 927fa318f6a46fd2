"""Boundary-state selection by transition-amplitude maximization.

Over normalized pairs, |<f|U|i>| with U = exp(-i H (t_f - t_i)/hbar) is
maximized exactly by the top singular pair of U, so the selected value is
sigma_max(U). The SVD runs on the exact propagator matrix, never on H:
sigma_max of the exponential is not the exponential of anything simple when H
is non-normal. For Hermitian H the propagator is unitary, every singular value
is 1, and the maximizing set is a whole manifold; the returned pair is then
one deterministic representative and ``degenerate`` is set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import defaults
from .evolution import BoundaryPair
from .hilbert import OperatorMatrix, StateVector, matexp
from .weakvalue import RealityReport, WeakValueSeries, reality_report, weak_value_series

__all__ = ["MaximizedOverlap", "SuiteEntry", "SelectedSuite", "maximize_overlap", "selected_weak_value_suite"]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(vec)))
    pivot = vec[j]
    if abs(pivot) > 0:
        vec = vec * (pivot.conjugate() / abs(pivot))
    return vec


@dataclass(frozen=True, eq=False)
class MaximizedOverlap:
    initial: StateVector
    final: StateVector
    value: float
    degenerate: bool

    def to_json(self) -> dict:
        return {
            "initial": self.initial.to_pairs(),
            "final": self.final.to_pairs(),
            "value": self.value,
            "degenerate": self.degenerate,
        }


def maximize_overlap(
    h: OperatorMatrix, t_i: float, t_f: float, hbar: float = 1.0
) -> MaximizedOverlap:
    """Top singular pair of the propagator: f left, i right, value sigma_max."""
    if not t_f > t_i:
        raise ValueError(f"need t_f > t_i, got t_i={t_i}, t_f={t_f}")
    u = matexp(h, t_f - t_i, hbar).matrix
    left, sigma, right_h = np.linalg.svd(u)
    i_vec = _fix_phase(right_h[0, :].conj())
    f_vec = _fix_phase(left[:, 0])
    if len(sigma) > 1:
        degenerate = bool(sigma[0] - sigma[1] <= defaults().singular_degeneracy_rel_gap * sigma[0])
    else:
        degenerate = False
    return MaximizedOverlap(
        initial=StateVector(i_vec, normalized=True),
        final=StateVector(f_vec, normalized=True),
        value=float(sigma[0]),
        degenerate=degenerate,
    )


@dataclass(frozen=True, eq=False)
class SuiteEntry:
    name: str
    observable: OperatorMatrix
    series: WeakValueSeries
    report: RealityReport
    note: str | None = None

    def record(self, value: float, degenerate: bool) -> dict:
        return {
            "observable_name": self.name,
            "value": value,
            "degenerate": degenerate,
            "max_imag_abs": self.report.max_imag_abs,
        }


@dataclass(frozen=True, eq=False)
class SelectedSuite:
    selection: MaximizedOverlap
    t_i: float
    t_f: float
    entries: list[SuiteEntry]

    def records(self) -> list[dict]:
        return [e.record(self.selection.value, self.selection.degenerate) for e in self.entries]


def selected_weak_value_suite(
    h: OperatorMatrix,
    observables,
    t_i: float,
    t_f: float,
    grid,
    hbar: float = 1.0,
    reality_tol: float | None = None,
) -> SelectedSuite:
    """maximize_overlap, then a weak-value series plus reality report per observable.

    ``observables`` is a sequence of (name, OperatorMatrix) with every matrix
    Hermitian. Orthogonal boundary states cannot occur when value > 0.
    """
    selected = maximize_overlap(h, t_i, t_f, hbar)
    pair = BoundaryPair(initial=selected.initial, final=selected.final, t_i=t_i, t_f=t_f)
    note = (
        "selected pair is one representative of the maximizing set"
        if selected.degenerate
        else None
    )
    entries = []
    for name, o in observables:
        series = weak_value_series(o, pair, h, grid, hbar)
        entries.append(
            SuiteEntry(
                name=name,
                observable=o,
                series=series,
                report=reality_report(series, reality_tol),
                note=note,
            )
        )
    return SelectedSuite(selection=selected, t_i=t_i, t_f=t_f, entries=entries)
