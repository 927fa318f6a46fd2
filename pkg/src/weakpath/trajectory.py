"""Continuous-configuration favored paths: discretized action, stationarity,
ascent optimization, and the two-peak dwell/transit scenario.

The real path exponent is the trapezoidal discretization of the integral of
(kinetic - potential), with finite-difference velocities. ``sign_mode``
resolves the deliberate overall-sign freedom: "potential_favored" weights
standing on potential peaks highest (ascent there is bounded for fixed
endpoints), "kinetic_favored" keeps the conventional mechanics sign. An
additional nonzero ``scale`` multiplies the whole action; it rescales every
action value linearly but cannot move the stationary set, and
``stationarity_residual`` is therefore defined from the canonical equation of
motion m q'' + grad V = 0 and ignores both knobs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Trajectory",
    "ActionModel",
    "OptimizerConfig",
    "FavoredPathResult",
    "SlowRollEntry",
    "SlowRollReport",
    "TwoGaussianPeaks",
    "action_value",
    "stationarity_residual",
    "find_favored_path",
    "energy_series",
    "find_potential_maxima",
    "dwell_statistics",
    "two_peak_candidates",
    "slow_roll_scenario",
]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Positions on a uniform time grid; endpoints may be pinned or free."""

    times: np.ndarray
    positions: np.ndarray
    fixed_start: bool = True
    fixed_end: bool = True

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim == 1:
            pos = pos[:, None]
        if times.ndim != 1 or times.size < 2:
            raise ValueError("need at least two time samples")
        if pos.shape[0] != times.size:
            raise ValueError("positions must have one row per time sample")
        spacing = np.diff(times)
        if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=1e-12) or spacing[0] <= 0:
            raise ValueError("time grid must be uniform and increasing")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(times))):
            raise ValueError("times and positions must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", pos)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def steps(self) -> int:
        return self.times.size - 1

    @property
    def dims(self) -> int:
        return self.positions.shape[1]

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def with_positions(self, positions: np.ndarray) -> "Trajectory":
        return Trajectory(self.times, positions, self.fixed_start, self.fixed_end)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t," + ",".join(f"q{i + 1}" for i in range(self.dims)) + "\n")
        for t, row in zip(self.times, self.positions):
            buf.write(f"{float(t)!r}," + ",".join(repr(float(x)) for x in row) + "\n")
        return buf.getvalue()


SIGN_MODES = ("potential_favored", "kinetic_favored")


@dataclass(frozen=True, eq=False)
class ActionModel:
    """Masses, potential, sign convention and overall scale of the exponent."""

    masses: np.ndarray
    potential: Callable[[np.ndarray], float]
    dt: float
    sign_mode: str = "potential_favored"
    hbar: float = 1.0
    scale: float = 1.0
    potential_grad: Callable[[np.ndarray], np.ndarray] | None = None
    potential_hess: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=np.float64)
        if masses.ndim != 1 or np.any(masses <= 0):
            raise ValueError("masses must be a 1-d list of positive reals")
        if self.sign_mode not in SIGN_MODES:
            raise ValueError(f"sign_mode must be one of {SIGN_MODES}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if self.scale == 0.0 or not np.isfinite(self.scale):
            raise ValueError("scale must be nonzero and finite")
        object.__setattr__(self, "masses", masses)

    @property
    def dims(self) -> int:
        return self.masses.shape[0]

    @property
    def sign(self) -> float:
        return -1.0 if self.sign_mode == "potential_favored" else 1.0

    def scaled(self, factor: float) -> "ActionModel":
        return replace(self, scale=self.scale * factor)

    def grad_v(self, x: np.ndarray) -> np.ndarray:
        if self.potential_grad is not None:
            return np.asarray(self.potential_grad(x), dtype=np.float64)
        g = np.empty(self.dims)
        for i in range(self.dims):
            h = 1e-6 * max(1.0, abs(float(x[i])))
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            g[i] = (self.potential(xp) - self.potential(xm)) / (2 * h)
        return g

    def hess_v(self, x: np.ndarray) -> np.ndarray:
        if self.potential_hess is not None:
            return np.asarray(self.potential_hess(x), dtype=np.float64)
        hess = np.empty((self.dims, self.dims))
        for i in range(self.dims):
            h = 1e-5 * max(1.0, abs(float(x[i])))
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            hess[:, i] = (self.grad_v(xp) - self.grad_v(xm)) / (2 * h)
        return 0.5 * (hess + hess.T)


def _check_consistent(traj: Trajectory, model: ActionModel) -> None:
    if traj.dims != model.dims:
        raise ValueError(f"trajectory has {traj.dims} coordinates, model {model.dims} masses")
    if abs(traj.dt - model.dt) > 1e-9 * model.dt:
        raise ValueError(f"trajectory dt {traj.dt!r} does not match model dt {model.dt!r}")
    if traj.steps < 1:
        raise ValueError("trajectory needs at least one step")


def _potential_values(traj: Trajectory, model: ActionModel) -> np.ndarray:
    vals = np.empty(traj.steps + 1)
    for t in range(traj.steps + 1):
        vals[t] = model.potential(traj.positions[t])
        if not np.isfinite(vals[t]):
            raise ValueError(f"potential evaluated non-finite at slice {t}")
    return vals


def _base_action(traj: Trajectory, model: ActionModel) -> float:
    # integral of (K - V): kinetic from finite differences, potential by trapezoid.
    # Overflow to inf is tolerated here; optimizer line searches reject it.
    diffs = np.diff(traj.positions, axis=0)
    v = _potential_values(traj, model)
    with np.errstate(over="ignore", invalid="ignore"):
        kinetic = float(np.sum(model.masses[None, :] * diffs**2) / (2.0 * model.dt))
        pot = model.dt * (0.5 * v[0] + float(np.sum(v[1:-1])) + 0.5 * v[-1])
        return kinetic - pot


def action_value(traj: Trajectory, model: ActionModel) -> float:
    """Discretized exponent under the model's sign convention and scale;
    additive under concatenation of trajectories on the same grid."""
    _check_consistent(traj, model)
    return model.scale * model.sign * _base_action(traj, model)


def stationarity_residual(traj: Trajectory, model: ActionModel) -> float:
    """Max norm over interior slices of m q'' + grad V, the discrete equation
    of motion; invariant under sign_mode and scale by construction."""
    _check_consistent(traj, model)
    if traj.steps < 2:
        raise ValueError("residual needs at least one interior slice (T >= 2)")
    q = traj.positions
    accel = (q[2:] - 2 * q[1:-1] + q[:-2]) / model.dt**2
    grads = np.empty_like(accel)
    for k in range(accel.shape[0]):
        grads[k] = model.grad_v(q[k + 1])
    return float(np.max(np.abs(model.masses[None, :] * accel + grads)))


def _base_gradient(traj: Trajectory, model: ActionModel) -> np.ndarray:
    # gradient of the base (K - V) action with respect to every slice
    q = traj.positions
    diffs = np.diff(q, axis=0)
    m = model.masses[None, :]
    g = np.zeros_like(q)
    g[:-1] -= m * diffs / model.dt
    g[1:] += m * diffs / model.dt
    weights = np.ones(q.shape[0])
    weights[0] = weights[-1] = 0.5
    for t in range(q.shape[0]):
        g[t] -= model.dt * weights[t] * model.grad_v(q[t])
    return g


def _variable_slices(traj: Trajectory) -> np.ndarray:
    idx = list(range(1, traj.steps))
    if not traj.fixed_start:
        idx = [0] + idx
    if not traj.fixed_end:
        idx = idx + [traj.steps]
    return np.asarray(idx, dtype=np.int64)


def energy_series(traj: Trajectory, model: ActionModel) -> np.ndarray:
    """K + V at interior slices (central-difference velocities)."""
    _check_consistent(traj, model)
    q = traj.positions
    vel = (q[2:] - q[:-2]) / (2.0 * model.dt)
    kin = 0.5 * np.sum(model.masses[None, :] * vel**2, axis=1)
    pot = np.array([model.potential(q[t]) for t in range(1, traj.steps)])
    return kin + pot


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 500
    ascent_iterations: int = 100
    newton: bool = True
    newton_iterations: int = 40
    gradient_tolerance: float = 1e-10
    residual_rel_tolerance: float = 1e-8
    initial_step: float = 1.0
    bump_size: float = 1e-5
    improvement_tolerance: float = 1e-12


@dataclass(frozen=True, eq=False)
class FavoredPathResult:
    trajectory: Trajectory
    action: float
    residual: float
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "action": self.action,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _block_tridiag_solve(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # diag: (n, d, d); off: (n-1, d, d) symmetric coupling; rhs: (n, d)
    n = diag.shape[0]
    diag = diag.copy()
    rhs = rhs.copy()
    for k in range(1, n):
        factor = off[k - 1] @ np.linalg.inv(diag[k - 1])
        diag[k] -= factor @ off[k - 1].T
        rhs[k] -= factor @ rhs[k - 1]
    out = np.empty_like(rhs)
    out[-1] = np.linalg.solve(diag[-1], rhs[-1])
    for k in range(n - 2, -1, -1):
        out[k] = np.linalg.solve(diag[k], rhs[k] - off[k].T @ out[k + 1])
    return out


def _newton_step(traj: Trajectory, model: ActionModel, variables: np.ndarray) -> np.ndarray:
    # One Newton direction for grad(base action) = 0 on the variable slices.
    q = traj.positions
    d = model.dims
    n = variables.size
    grad = _base_gradient(traj, model)[variables]
    weights = np.ones(q.shape[0])
    weights[0] = weights[-1] = 0.5
    diag = np.empty((n, d, d))
    off = np.empty((max(n - 1, 0), d, d))
    m_over_dt = model.masses / model.dt
    for row, t in enumerate(variables):
        coupling = 2.0 if 0 < t < traj.steps else 1.0
        diag[row] = coupling * np.diag(m_over_dt) - model.dt * weights[t] * model.hess_v(q[t])
        if row + 1 < n and variables[row + 1] == t + 1:
            off[row] = -np.diag(m_over_dt)
        elif row + 1 < n:
            off[row] = np.zeros((d, d))
    try:
        return _block_tridiag_solve(diag, off, -grad)
    except np.linalg.LinAlgError:
        return -grad


def _bump_improvement(traj: Trajectory, model: ActionModel, eps: float) -> float:
    # Largest action gain from a single-coordinate bump, computed locally:
    # only the two adjacent kinetic terms and one potential sample move.
    q = traj.positions
    m = model.masses
    dt = model.dt
    weights = np.ones(q.shape[0])
    weights[0] = weights[-1] = 0.5
    best = -np.inf
    factor = model.scale * model.sign
    for t in _variable_slices(traj):
        for i in range(model.dims):
            for e in (eps, -eps):
                dk = 0.0
                if t > 0:
                    d_prev = q[t, i] - q[t - 1, i]
                    dk += m[i] * ((d_prev + e) ** 2 - d_prev**2) / (2 * dt)
                if t < traj.steps:
                    d_next = q[t + 1, i] - q[t, i]
                    dk += m[i] * ((d_next - e) ** 2 - d_next**2) / (2 * dt)
                bumped = q[t].copy()
                bumped[i] += e
                dv = dt * weights[t] * (model.potential(bumped) - model.potential(q[t]))
                gain = factor * (dk - dv)
                if gain > best:
                    best = gain
    return best


def _residual_scale(traj: Trajectory, model: ActionModel) -> float:
    grads = [np.max(np.abs(model.grad_v(traj.positions[t]))) for t in range(traj.steps + 1)]
    return max(1.0, float(np.max(grads)))


def find_favored_path(
    model: ActionModel, init: Trajectory, config: OptimizerConfig | None = None
) -> FavoredPathResult:
    """Maximize the action by damped gradient ascent, then Newton refinement.

    Convergence requires a small equation-of-motion residual (relative to the
    force scale along the path), stationarity at any free endpoints, and no
    first-order improving coordinate bump of size ``config.bump_size``.
    Hitting the iteration cap returns the best trajectory found with
    ``converged=False`` rather than raising.
    """
    _check_consistent(init, model)
    if config is None:
        config = OptimizerConfig()
    variables = _variable_slices(init)
    if variables.size == 0:
        raise ValueError("trajectory has no free slices to optimize")
    traj = init
    factor = model.scale * model.sign
    iterations = 0

    current = action_value(traj, model)
    step = config.initial_step
    for _ in range(min(config.ascent_iterations, config.max_iterations)):
        grad = factor * _base_gradient(traj, model)
        g_var = grad[variables]
        if not np.all(np.isfinite(g_var)):
            break
        gnorm = float(np.max(np.abs(g_var)))
        if gnorm <= config.gradient_tolerance:
            break
        iterations += 1
        moved = False
        for _ in range(60):
            candidate = traj.positions.copy()
            candidate[variables] += step * g_var
            try:
                cand_traj = traj.with_positions(candidate)
                cand_value = action_value(cand_traj, model)
            except (ValueError, OverflowError, FloatingPointError):
                cand_value = np.nan
            with np.errstate(over="ignore"):
                armijo = current + 1e-4 * step * float(np.sum(g_var**2))
            if np.isfinite(cand_value) and np.isfinite(armijo) and cand_value > armijo:
                traj = cand_traj
                current = cand_value
                step = min(step * 1.5, 1e6)
                moved = True
                break
            step *= 0.5
        if not moved:
            break

    if config.newton:
        best_traj = traj
        best_norm = float(np.max(np.abs(_base_gradient(traj, model)[variables])))
        for _ in range(config.newton_iterations):
            if not np.isfinite(best_norm) or best_norm <= 1e-15:
                break
            delta = _newton_step(best_traj, model, variables)
            if not np.all(np.isfinite(delta)):
                break
            damping = 1.0
            improved = False
            while damping > 1e-8:
                candidate = best_traj.positions.copy()
                candidate[variables] += damping * delta
                try:
                    cand_traj = best_traj.with_positions(candidate)
                    cand_norm = float(
                        np.max(np.abs(_base_gradient(cand_traj, model)[variables]))
                    )
                except (ValueError, OverflowError, FloatingPointError):
                    cand_norm = np.inf
                if cand_norm < best_norm:
                    best_traj = cand_traj
                    best_norm = cand_norm
                    improved = True
                    break
                damping *= 0.5
            iterations += 1
            if not improved:
                break
        traj = best_traj
        current = action_value(traj, model)

    residual = stationarity_residual(traj, model)
    res_tol = config.residual_rel_tolerance * _residual_scale(traj, model)
    endpoint_ok = True
    grad = _base_gradient(traj, model)
    for t in (0, traj.steps):
        if t in variables:
            endpoint_ok = endpoint_ok and float(np.max(np.abs(grad[t]))) / model.dt <= res_tol
    bump_gain = _bump_improvement(traj, model, config.bump_size)
    bump_ok = bump_gain <= config.improvement_tolerance * max(1.0, abs(current))
    converged = bool(residual <= res_tol and endpoint_ok and bump_ok)
    return FavoredPathResult(
        trajectory=traj,
        action=current,
        residual=residual,
        iterations=iterations,
        converged=converged,
    )


@dataclass(frozen=True)
class TwoGaussianPeaks:
    """Two Gaussian bumps on a linear slope; the named two-peak family (1-d)."""

    height_a: float = 1.0
    center_a: float = -1.0
    width_a: float = 0.35
    height_b: float = 0.8
    center_b: float = 1.0
    width_b: float = 0.35
    slope: float = 0.0

    def __call__(self, q) -> float:
        x = float(np.asarray(q, dtype=np.float64).reshape(-1)[0])
        za = (x - self.center_a) / self.width_a
        zb = (x - self.center_b) / self.width_b
        return (
            self.height_a * float(np.exp(-0.5 * za * za))
            + self.height_b * float(np.exp(-0.5 * zb * zb))
            + self.slope * x
        )

    def grad(self, q) -> np.ndarray:
        x = float(np.asarray(q, dtype=np.float64).reshape(-1)[0])
        za = (x - self.center_a) / self.width_a
        zb = (x - self.center_b) / self.width_b
        d = (
            -self.height_a * za / self.width_a * float(np.exp(-0.5 * za * za))
            - self.height_b * zb / self.width_b * float(np.exp(-0.5 * zb * zb))
            + self.slope
        )
        return np.array([d])

    def to_json(self) -> dict:
        return {
            "height_a": self.height_a,
            "center_a": self.center_a,
            "width_a": self.width_a,
            "height_b": self.height_b,
            "center_b": self.center_b,
            "width_b": self.width_b,
            "slope": self.slope,
        }


def find_potential_maxima(
    potential: Callable, lo: float, hi: float, samples: int = 2001
) -> list[tuple[float, float]]:
    """Interior local maxima of a 1-d potential on [lo, hi], refined by golden
    section; returned sorted by position."""
    xs = np.linspace(lo, hi, samples)
    vals = np.array([potential(np.array([x])) for x in xs])
    maxima = []
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    for k in range(1, samples - 1):
        if vals[k] > vals[k - 1] and vals[k] >= vals[k + 1]:
            a, b = xs[k - 1], xs[k + 1]
            c = b - golden * (b - a)
            d = a + golden * (b - a)
            fc = potential(np.array([c]))
            fd = potential(np.array([d]))
            for _ in range(90):
                if fc > fd:
                    b, d, fd = d, c, fc
                    c = b - golden * (b - a)
                    fc = potential(np.array([c]))
                else:
                    a, c, fc = c, d, fd
                    d = a + golden * (b - a)
                    fd = potential(np.array([d]))
            x_star = 0.5 * (a + b)
            maxima.append((float(x_star), float(potential(np.array([x_star])))))
    return sorted(maxima)


def dwell_statistics(
    traj: Trajectory, peaks: Sequence[float], epsilon: float
) -> tuple[list[float], int, list[float]]:
    """Per-peak dwell fractions, transit count, transit durations."""
    x = traj.positions[:, 0]
    labels = np.full(x.shape, -1, dtype=np.int64)
    for k, p in enumerate(peaks):
        labels[np.abs(x - p) <= epsilon] = k
    dwell = [float(np.count_nonzero(labels == k)) / labels.size for k in range(len(peaks))]
    transits: list[float] = []
    prev = -1
    exit_time = traj.times[0]
    for t, lab in zip(traj.times, labels):
        if lab >= 0:
            if prev >= 0 and lab != prev:
                transits.append(float(t - exit_time))
            prev = lab
            exit_time = t
    return dwell, len(transits), transits


def two_peak_candidates(
    peaks: Sequence[float], duration: float, steps: int, dt: float
) -> dict[str, Trajectory]:
    """The three canonical candidates: dwell at each peak, and one transit
    (hold, cosine ramp over the middle fifth, hold)."""
    times = np.arange(steps + 1) * dt
    p0, p1 = float(peaks[0]), float(peaks[1])
    ramp_lo, ramp_hi = 0.4 * duration, 0.6 * duration
    transit = np.empty(steps + 1)
    for k, t in enumerate(times):
        if t <= ramp_lo:
            transit[k] = p0
        elif t >= ramp_hi:
            transit[k] = p1
        else:
            phase = (t - ramp_lo) / (ramp_hi - ramp_lo)
            transit[k] = p0 + (p1 - p0) * 0.5 * (1.0 - np.cos(np.pi * phase))
    return {
        "dwell_peak_0": Trajectory(times, np.full(steps + 1, p0)),
        "dwell_peak_1": Trajectory(times, np.full(steps + 1, p1)),
        "transit_0_to_1": Trajectory(times, transit),
    }


@dataclass(frozen=True, eq=False)
class SlowRollEntry:
    label: str
    result: FavoredPathResult
    dwell_fractions: list[float]
    transit_count: int
    transit_durations: list[float]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "action": self.result.action,
            "residual": self.result.residual,
            "converged": self.result.converged,
            "dwell_fractions": self.dwell_fractions,
            "transit_count": self.transit_count,
            "transit_durations": self.transit_durations,
            "initial_position": [float(x) for x in self.result.trajectory.positions[0]],
            "final_position": [float(x) for x in self.result.trajectory.positions[-1]],
        }


@dataclass(frozen=True, eq=False)
class SlowRollReport:
    peaks: list[tuple[float, float]]
    epsilon: float
    entries: list[SlowRollEntry]

    def to_json(self) -> dict:
        return {
            "peaks": [{"position": p, "value": v} for p, v in self.peaks],
            "epsilon": self.epsilon,
            "entries": [e.to_json() for e in self.entries],
        }


def slow_roll_scenario(
    model: ActionModel,
    duration: float,
    restarts: int = 4,
    *,
    domain: tuple[float, float],
    steps: int = 200,
    seed: int = 0,
    config: OptimizerConfig | None = None,
) -> SlowRollReport:
    """Rank candidate near-stationary paths on a two-peak potential.

    Candidates are the three canonical ones plus ``restarts`` seeded random
    smooth paths, each refined by find_favored_path; entries are sorted by
    action (descending) with lexicographic initial condition as tie-break.
    The output is descriptive: dwell fractions near each peak and transit
    counts/durations, no cosmology claims attached.
    """
    maxima = find_potential_maxima(model.potential, domain[0], domain[1])
    if len(maxima) < 2:
        raise ValueError(f"potential has {len(maxima)} local maxima in {domain}; need at least 2")
    top_two = sorted(sorted(maxima, key=lambda pv: -pv[1])[:2])
    peak_positions = [p for p, _ in top_two]
    epsilon = 0.05 * abs(peak_positions[1] - peak_positions[0])
    dt = duration / steps
    scenario_model = replace(model, dt=dt)
    candidates = dict(two_peak_candidates(peak_positions, duration, steps, dt))
    rng = np.random.default_rng(seed)
    times = np.arange(steps + 1) * dt
    span = abs(peak_positions[1] - peak_positions[0])
    for r in range(restarts):
        ends = rng.choice(peak_positions, size=2)
        base = np.linspace(ends[0], ends[1], steps + 1)
        wiggle = np.zeros(steps + 1)
        for mode in range(1, 4):
            wiggle += rng.normal(0.0, 0.1 * span) * np.sin(np.pi * mode * times / duration)
        candidates[f"restart_{r}"] = Trajectory(times, base + wiggle)

    entries = []
    for label, init in candidates.items():
        result = find_favored_path(scenario_model, init, config)
        dwell, count, durations = dwell_statistics(result.trajectory, peak_positions, epsilon)
        entries.append(
            SlowRollEntry(
                label=label,
                result=result,
                dwell_fractions=dwell,
                transit_count=count,
                transit_durations=durations,
            )
        )

    def sort_key(entry: SlowRollEntry):
        head = tuple(float(x) for x in entry.result.trajectory.positions[0])
        return (-entry.result.action, head, entry.label)

    entries.sort(key=sort_key)
    deduped: list[SlowRollEntry] = []
    for entry in entries:
        duplicate = False
        for kept in deduped:
            dev = float(
                np.max(np.abs(entry.result.trajectory.positions - kept.result.trajectory.positions))
            )
            if dev <= 1e-6 * max(1.0, span):
                duplicate = True
                break
        if not duplicate:
            deduped.append(entry)
    return SlowRollReport(peaks=top_two, epsilon=epsilon, entries=deduped)
