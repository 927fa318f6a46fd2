"""Time development of boundary states under a possibly non-normal Hamiltonian.

The initial ket obeys i*hbar d/dt |i(t)> = H |i(t)> and the final ket obeys
i*hbar d/dt |f(t)> = H^dagger |f(t)>; together these make the bracket
<f(t)|i(t)> independent of t for any H, which is what keeps the weak-value
denominator time independent. Nothing here renormalizes: norm drift under
non-Hermitian H is physical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import defaults
from .hilbert import DimensionMismatch, OperatorMatrix, StateVector, inner, matexp

__all__ = ["BoundaryPair", "evolve_initial", "evolve_final", "bracket"]


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """A past state at t_i and a future state at t_f.

    Both states are required normalized unless ``require_normalized=False``
    (rescaling either state by a nonzero constant leaves every weak value
    unchanged, so unnormalized pairs are meaningful).
    """

    initial: StateVector
    final: StateVector
    t_i: float
    t_f: float
    require_normalized: bool = True

    def __post_init__(self):
        if self.final.dim != self.initial.dim:
            raise DimensionMismatch(
                f"boundary states differ in dimension: {self.initial.dim} vs {self.final.dim}"
            )
        if not self.t_f > self.t_i:
            raise ValueError(f"need t_f > t_i, got t_i={self.t_i}, t_f={self.t_f}")
        if self.require_normalized:
            tol = defaults().state_normalization
            for name, state in (("initial", self.initial), ("final", self.final)):
                err = abs(state.norm() ** 2 - 1.0)
                if err > tol:
                    raise ValueError(f"{name} state is not normalized (sum|a|^2 off by {err:.3e})")

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def duration(self) -> float:
        return self.t_f - self.t_i


def evolve_initial(
    state: StateVector, h: OperatorMatrix, t_from: float, t_to: float, hbar: float = 1.0
) -> StateVector:
    """exp(-i H (t_to - t_from) / hbar) applied to the state; forward only."""
    if t_to < t_from:
        raise ValueError(f"evolve_initial runs forward: t_to={t_to} < t_from={t_from}")
    if h.dim != state.dim:
        raise DimensionMismatch(f"H dim {h.dim} vs state dim {state.dim}")
    return matexp(h, t_to - t_from, hbar).apply(state)


def evolve_final(
    state: StateVector, h: OperatorMatrix, t_from: float, t_to: float, hbar: float = 1.0
) -> StateVector:
    """Development of the future state, generator H^dagger.

    Either direction is allowed: the common use is backward, from t_f down to
    t, which gives exp(+i H^dag (t_f - t)/hbar) |f(t_f)> and preserves
    <f(t)|i(t)> exactly.
    """
    if h.dim != state.dim:
        raise DimensionMismatch(f"H dim {h.dim} vs state dim {state.dim}")
    generator = OperatorMatrix(h.entries.conj().T, kind=h.kind)
    return matexp(generator, t_to - t_from, hbar).apply(state)


def bracket(pair: BoundaryPair, h: OperatorMatrix, t: float, hbar: float = 1.0) -> complex:
    """<f(t)|i(t)> at any t in [t_i, t_f]; constant in t up to rounding."""
    i_t = evolve_initial(pair.initial, h, pair.t_i, t, hbar)
    f_t = evolve_final(pair.final, h, pair.t_f, t, hbar)
    return inner(f_t, i_t)
