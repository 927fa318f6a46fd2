"""Global numeric defaults shared by every module.

All tolerances quoted in the module contracts live here so a run can tighten or
loosen them in one place; ``set_defaults`` mutates the active instance,
``reset_defaults`` restores the shipped values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Defaults:
    state_normalization: float = 1e-12
    hermitian: float = 1e-12
    normality: float = 1e-12
    unitarity: float = 1e-10
    eigen_residual: float = 1e-10
    denominator_epsilon: float = 1e-12
    projector_merge_rel_gap: float = 1e-9
    singular_degeneracy_rel_gap: float = 1e-9
    reality: float = 1e-8
    residual_rel: float = 1e-8
    enumeration_cap: int = 10_000_000


_ACTIVE = Defaults()


def defaults() -> Defaults:
    return _ACTIVE


def set_defaults(**overrides: float | int) -> Defaults:
    global _ACTIVE
    _ACTIVE = replace(_ACTIVE, **overrides)
    return _ACTIVE


def reset_defaults() -> Defaults:
    global _ACTIVE
    _ACTIVE = Defaults()
    return _ACTIVE
