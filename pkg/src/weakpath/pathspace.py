"""Discrete path lattices, real-exponent path weights, and path sums.

A history q is a sequence of T+1 site indices on an n-site lattice. Two weight
conventions coexist and are deliberately kept side by side:

* complex per-step amplitudes, prod_t <q_{t+1}|U_step|q_t>, built from a
  transfer matrix so the path sum reproduces the operator theory exactly
  (up to float rounding), and
* real path exponents S_P with weight exp(S_P[q]/hbar), which are genuine
  probabilities: every average they produce is real and bounded by the
  observable's range.

Path functionals (``s_p`` arguments) are batched: they receive an integer
array of shape (m, T+1) and return m floats. Wrap a scalar function with
``per_path`` if that is more convenient. Exact enumeration is capped
(config ``enumeration_cap``, default 10^7 paths); past the cap use
``metropolis_sample``. Enumeration runs in fixed-size chunks in a fixed
order, so reductions are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .config import defaults
from .hilbert import Propagator, StateVector
from .weakvalue import OrthogonalBoundaryStates

__all__ = [
    "PathLattice",
    "Path",
    "PathAction",
    "Boundary",
    "EnumerationCapExceeded",
    "MetropolisDiagnosticError",
    "MetropolisResult",
    "action_from_transfer",
    "weak_value_pathsum",
    "our_average",
    "metropolis_sample",
    "probability_of_value",
    "sample_average",
    "argmax_path",
    "hamming_peak",
    "per_path",
]

_CHUNK = 1 << 16


class EnumerationCapExceeded(ValueError):
    """Too many paths for exact enumeration; use metropolis_sample instead."""


class MetropolisDiagnosticError(RuntimeError):
    """The sampler made no progress; the proposal needs retuning."""


@dataclass(frozen=True)
class PathLattice:
    """n-site configuration space sampled at T time steps of width dt."""

    sites: int
    steps: int
    dt: float = 1.0

    def __post_init__(self):
        if self.sites < 1:
            raise ValueError("sites must be a positive integer")
        if self.steps < 1:
            raise ValueError("steps must be a positive integer")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def path_count(self) -> int:
        return self.sites ** (self.steps + 1)

    @property
    def slices(self) -> int:
        return self.steps + 1

    def require_enumerable(self, cap: int | None = None) -> None:
        cap = defaults().enumeration_cap if cap is None else cap
        if self.path_count > cap:
            raise EnumerationCapExceeded(
                f"{self.path_count} paths exceed the enumeration cap {cap}; "
                "use metropolis_sample for this lattice"
            )


@dataclass(frozen=True)
class Path:
    """One history: a site index per time slice."""

    points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(int(p) for p in self.points))

    def __len__(self) -> int:
        return len(self.points)


def _as_points(path) -> np.ndarray:
    pts = np.asarray(path.points if isinstance(path, Path) else path, dtype=np.int64)
    if pts.ndim != 1:
        raise ValueError("a path is a 1-d sequence of site indices")
    return pts


@dataclass(frozen=True, eq=False)
class PathAction:
    """Per-step amplitude table; step_matrix[to, frm] = amplitude of frm -> to."""

    step_matrix: np.ndarray
    description: str = ""

    def __post_init__(self):
        m = np.array(self.step_matrix, dtype=np.complex128, order="C")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("step_matrix must be square")
        if not np.all(np.isfinite(m.view(np.float64))):
            raise ValueError("step amplitudes must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "step_matrix", m)

    @property
    def sites(self) -> int:
        return self.step_matrix.shape[0]

    @classmethod
    def from_function(cls, fn: Callable[[int, int], complex], sites: int, description: str = "") -> "PathAction":
        table = np.array([[complex(fn(frm, to)) for frm in range(sites)] for to in range(sites)])
        return cls(step_matrix=table, description=description)

    def step_weight(self, frm: int, to: int) -> complex:
        return complex(self.step_matrix[to, frm])

    def amplitudes(self, paths: np.ndarray) -> np.ndarray:
        """prod_t <q_{t+1}|U_step|q_t> for a batch of paths, shape (m, T+1)."""
        pts = np.asarray(paths, dtype=np.int64)
        amp = np.ones(pts.shape[0], dtype=np.complex128)
        for t in range(pts.shape[1] - 1):
            amp *= self.step_matrix[pts[:, t + 1], pts[:, t]]
        return amp

    def amplitude(self, path) -> complex:
        return complex(self.amplitudes(_as_points(path)[None, :])[0])


def action_from_transfer(u_step: Propagator, description: str | None = None) -> PathAction:
    """Discrete bridge: per-step amplitude <q'|U_step|q>, so that the sum over
    interior sites of a path amplitude reproduces matrix elements of U_step^T
    exactly, up to float rounding."""
    if description is None:
        description = f"transfer matrix of a {u_step.dim}-site step, dt={u_step.duration!r}"
    return PathAction(step_matrix=u_step.matrix, description=description)


@dataclass(frozen=True, eq=False)
class Boundary:
    """Endpoint handling: amplitude-weighted by boundary states (the default
    convention, matching the operator formulation) or clamped to fixed sites."""

    kind: str
    initial_state: np.ndarray | None = None
    final_state: np.ndarray | None = None
    initial_site: int | None = None
    final_site: int | None = None

    @classmethod
    def weighted(cls, initial, final) -> "Boundary":
        i = initial.amplitudes if isinstance(initial, StateVector) else np.asarray(initial, dtype=np.complex128)
        f = final.amplitudes if isinstance(final, StateVector) else np.asarray(final, dtype=np.complex128)
        if i.ndim != 1 or f.ndim != 1 or i.shape != f.shape:
            raise ValueError("boundary states must be 1-d and of equal length")
        return cls(kind="amplitude", initial_state=i, final_state=f)

    @classmethod
    def clamped(cls, initial_site: int, final_site: int) -> "Boundary":
        return cls(kind="clamped", initial_site=int(initial_site), final_site=int(final_site))

    def factors(self, paths: np.ndarray) -> np.ndarray:
        pts = np.asarray(paths, dtype=np.int64)
        if self.kind == "amplitude":
            return np.conj(self.final_state[pts[:, -1]]) * self.initial_state[pts[:, 0]]
        if self.kind == "clamped":
            return ((pts[:, 0] == self.initial_site) & (pts[:, -1] == self.final_site)).astype(np.float64)
        raise ValueError(f"unknown boundary kind {self.kind!r}")


def iter_path_chunks(lattice: PathLattice, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """All paths in a fixed order (slice 0 is the fastest-varying digit)."""
    total = lattice.path_count
    length = lattice.slices
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        pts = np.empty((idx.size, length), dtype=np.int64)
        rem = idx
        for k in range(length):
            pts[:, k] = rem % lattice.sites
            rem = rem // lattice.sites
        yield pts


def per_path(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Lift a scalar path functional to the batched (m, T+1) convention."""

    def batched(paths: np.ndarray) -> np.ndarray:
        return np.array([float(fn(p)) for p in np.asarray(paths)], dtype=np.float64)

    return batched


def hamming_peak(target, strength: float) -> Callable[[np.ndarray], np.ndarray]:
    """S_P[q] = -strength * (number of slices where q differs from the target
    path); sharply favors the target as strength/hbar grows."""
    tgt = _as_points(target)

    def s_p(paths: np.ndarray) -> np.ndarray:
        pts = np.asarray(paths, dtype=np.int64)
        return -float(strength) * np.count_nonzero(pts != tgt[None, :], axis=1).astype(np.float64)

    return s_p


def _site_values(o_diag, sites: int) -> np.ndarray:
    if callable(o_diag):
        vals = np.array([float(o_diag(s)) for s in range(sites)], dtype=np.float64)
    else:
        vals = np.asarray(o_diag, dtype=np.float64)
        if vals.shape != (sites,):
            raise ValueError(f"o_diag must give one real value per site; expected {sites} values")
    if not np.all(np.isfinite(vals)):
        raise ValueError("o_diag values must be finite")
    return vals


def _check_t_index(t_index: int, lattice: PathLattice) -> int:
    t_index = int(t_index)
    if not 0 <= t_index <= lattice.steps:
        raise ValueError(f"t_index must lie in [0, {lattice.steps}]")
    return t_index


def weak_value_pathsum(
    action: PathAction,
    o_diag,
    t_index: int,
    initial,
    final,
    lattice: PathLattice,
) -> complex:
    """Path-sum weak value of a diagonal observable at one time slice.

    Numerator: sum over all paths of conj(f[q_T]) * amplitude(q) * i[q_0]
    * O(q_t); denominator the same without the O factor. Equal to the
    operator-form weak value when the action came from the same step
    propagator.
    """
    boundary = Boundary.weighted(initial, final)
    if boundary.initial_state.shape[0] != action.sites:
        raise ValueError("boundary state dimension must match the action's site count")
    if lattice.sites != action.sites:
        raise ValueError("lattice sites must match the action's site count")
    lattice.require_enumerable()
    t_index = _check_t_index(t_index, lattice)
    o_vals = _site_values(o_diag, lattice.sites)
    numer = 0.0 + 0.0j
    denom = 0.0 + 0.0j
    for pts in iter_path_chunks(lattice):
        contrib = boundary.factors(pts) * action.amplitudes(pts)
        denom += complex(np.sum(contrib))
        numer += complex(np.sum(contrib * o_vals[pts[:, t_index]]))
    eps = defaults().denominator_epsilon
    if abs(denom) <= eps:
        raise OrthogonalBoundaryStates(abs(denom), eps)
    return numer / denom


def our_average(
    s_p: Callable[[np.ndarray], np.ndarray],
    o_diag,
    t_index: int,
    lattice: PathLattice,
    hbar: float = 1.0,
) -> float:
    """The real-weight average sum exp(S_P/hbar) O(q_t) / sum exp(S_P/hbar).

    Always real, with strictly positive weights, so it lies inside the range
    of O; stabilized against overflow by a streaming max-shift.
    """
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    lattice.require_enumerable()
    t_index = _check_t_index(t_index, lattice)
    o_vals = _site_values(o_diag, lattice.sites)
    shift = -np.inf
    z = 0.0
    acc = 0.0
    for pts in iter_path_chunks(lattice):
        logw = np.asarray(s_p(pts), dtype=np.float64) / hbar
        if logw.shape != (pts.shape[0],):
            raise ValueError("s_p must return one float per path (batched convention)")
        chunk_max = float(np.max(logw))
        if chunk_max == -np.inf:
            continue  # the whole chunk carries zero weight
        if chunk_max > shift:
            rescale = np.exp(shift - chunk_max) if np.isfinite(shift) else 0.0
            z *= rescale
            acc *= rescale
            shift = chunk_max
        w = np.exp(logw - shift)
        z += float(np.sum(w))
        acc += float(np.sum(w * o_vals[pts[:, t_index]]))
    if z <= 0.0:
        raise ValueError("all path weights vanished; S_P is -inf everywhere")
    return acc / z


def argmax_path(s_p: Callable[[np.ndarray], np.ndarray], lattice: PathLattice) -> Path:
    """The single history with the highest exponent (ties: first in order)."""
    lattice.require_enumerable()
    best = -np.inf
    best_points: np.ndarray | None = None
    for pts in iter_path_chunks(lattice):
        logw = np.asarray(s_p(pts), dtype=np.float64)
        k = int(np.argmax(logw))
        if best_points is None or logw[k] > best:
            best = float(logw[k])
            best_points = pts[k].copy()
    return Path(tuple(int(x) for x in best_points))


@dataclass(frozen=True, eq=False)
class MetropolisResult:
    samples: np.ndarray
    acceptance_rate: float
    autocorrelation_estimate: float
    n_chains: int
    burn_in: int
    seed: int

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


def _integrated_autocorrelation(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    x = x - x.mean()
    var = float(np.dot(x, x)) / len(x)
    if var <= 0.0:
        return 1.0
    tau = 1.0
    max_lag = min(len(x) // 2, 1000)
    for k in range(1, max_lag):
        rho = float(np.dot(x[:-k], x[k:])) / ((len(x) - k) * var)
        if rho <= 0.05:
            break
        tau += 2.0 * rho
        if k >= 5.0 * tau:
            break
    return tau


def metropolis_sample(
    s_p: Callable[[np.ndarray], np.ndarray],
    lattice: PathLattice,
    hbar: float,
    n_samples: int,
    burn_in: int,
    proposal: str = "single_slice",
    seed: int = 0,
    n_chains: int = 8,
) -> MetropolisResult:
    """Sample paths from exp(S_P/hbar) with single-slice uniform resampling.

    Independent chains (merged after burn-in) advance together, one recorded
    path per sweep of T+1 proposals per chain. Fixed seed makes the output bit
    reproducible. Zero accepted proposals over the whole burn-in raises a
    diagnostic instead of returning garbage.
    """
    if n_samples <= 0 or burn_in <= 0:
        raise ValueError("n_samples and burn_in must be positive")
    if proposal != "single_slice":
        raise ValueError(f"unknown proposal {proposal!r}; supported: 'single_slice'")
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    rng = np.random.default_rng(seed)
    length = lattice.slices
    chains = max(1, min(int(n_chains), n_samples))
    paths = rng.integers(0, lattice.sites, size=(chains, length))
    logw = np.asarray(s_p(paths), dtype=np.float64) / hbar
    chain_ids = np.arange(chains)

    def sweep() -> int:
        nonlocal paths, logw
        accepted = 0
        for _ in range(length):
            slots = rng.integers(0, length, size=chains)
            sites = rng.integers(0, lattice.sites, size=chains)
            prop = paths.copy()
            prop[chain_ids, slots] = sites
            new_logw = np.asarray(s_p(prop), dtype=np.float64) / hbar
            with np.errstate(invalid="ignore"):
                log_ratio = new_logw - logw
            log_ratio = np.where(np.isnan(log_ratio), -np.inf, log_ratio)
            accept = np.log(rng.random(chains)) < log_ratio
            paths[accept] = prop[accept]
            logw[accept] = new_logw[accept]
            accepted += int(np.count_nonzero(accept))
        return accepted

    burn_accepted = 0
    for _ in range(burn_in):
        burn_accepted += sweep()
    if burn_accepted == 0:
        raise MetropolisDiagnosticError(
            "no proposal was accepted during burn-in; retune the proposal "
            "(or check that S_P is finite somewhere reachable)"
        )

    per_chain = -(-n_samples // chains)
    recorded = np.empty((chains, per_chain, length), dtype=np.int64)
    accepted = 0
    for s in range(per_chain):
        accepted += sweep()
        recorded[:, s, :] = paths
    samples = recorded.reshape(chains * per_chain, length)[:n_samples]

    mid = recorded[:, :, length // 2]
    taus = [_integrated_autocorrelation(mid[c]) for c in range(chains)]
    return MetropolisResult(
        samples=samples,
        acceptance_rate=accepted / (per_chain * length * chains),
        autocorrelation_estimate=float(np.mean(taus)),
        n_chains=chains,
        burn_in=burn_in,
        seed=seed,
    )


def sample_average(
    samples: np.ndarray, o_diag, t_index: int, n_batches: int = 50
) -> tuple[float, float]:
    """Empirical mean of O(q_t) over sampled paths with a batch-means standard
    error (robust to the sampler's autocorrelation)."""
    pts = np.asarray(samples, dtype=np.int64)
    if callable(o_diag):
        o_vals = _site_values(o_diag, int(pts.max()) + 1)
    else:
        o_vals = np.asarray(o_diag, dtype=np.float64)
    series = o_vals[pts[:, int(t_index)]]
    n_batches = max(2, min(n_batches, len(series)))
    usable = (len(series) // n_batches) * n_batches
    batches = series[:usable].reshape(n_batches, -1).mean(axis=1)
    stderr = float(np.std(batches, ddof=1) / np.sqrt(n_batches))
    return float(series.mean()), stderr


def probability_of_value(
    o_diag,
    value: float,
    t_index: int,
    lattice: PathLattice,
    *,
    s_p: Callable[[np.ndarray], np.ndarray] | None = None,
    action: PathAction | None = None,
    boundary: Boundary | None = None,
    hbar: float = 1.0,
) -> float | complex:
    """Weight of the event O(q_t) = value.

    Real-weight mode (``s_p`` given): a genuine probability in [0, 1]; all
    attained values sum to 1. Weak-weight mode (``action`` given): the complex
    quasi-weight; the values still sum to 1 but entries may be negative or
    complex. A value not attained by O gives 0.
    """
    if (s_p is None) == (action is None):
        raise ValueError("give exactly one of s_p (real mode) or action (weak mode)")
    lattice.require_enumerable()
    t_index = _check_t_index(t_index, lattice)
    o_vals = _site_values(o_diag, lattice.sites)
    matched = np.abs(o_vals - float(value)) <= 1e-12 * max(1.0, abs(float(value)))
    if s_p is not None:
        if boundary is not None and boundary.kind != "clamped":
            raise ValueError("real-weight mode accepts only clamped (or no) boundaries")
        shift = -np.inf
        z = 0.0
        acc = 0.0
        for pts in iter_path_chunks(lattice):
            logw = np.asarray(s_p(pts), dtype=np.float64) / hbar
            if boundary is not None:
                keep = boundary.factors(pts) > 0
            else:
                keep = np.ones(pts.shape[0], dtype=bool)
            if not np.any(keep):
                continue
            logw = logw[keep]
            pts_kept = pts[keep]
            chunk_max = float(np.max(logw))
            if chunk_max == -np.inf:
                continue
            if chunk_max > shift:
                rescale = np.exp(shift - chunk_max) if np.isfinite(shift) else 0.0
                z *= rescale
                acc *= rescale
                shift = chunk_max
            w = np.exp(logw - shift)
            z += float(np.sum(w))
            acc += float(np.sum(w * matched[pts_kept[:, t_index]]))
        if z <= 0.0:
            raise ValueError("no path carries weight under the given S_P and boundary")
        return acc / z
    if boundary is None:
        boundary = Boundary.weighted(
            np.ones(lattice.sites, dtype=np.complex128), np.ones(lattice.sites, dtype=np.complex128)
        )
    numer = 0.0 + 0.0j
    denom = 0.0 + 0.0j
    for pts in iter_path_chunks(lattice):
        contrib = boundary.factors(pts) * action.amplitudes(pts)
        denom += complex(np.sum(contrib))
        numer += complex(np.sum(contrib * matched[pts[:, t_index]]))
    eps = defaults().denominator_epsilon
    if abs(denom) <= eps:
        raise OrthogonalBoundaryStates(abs(denom), eps)
    return numer / denom
