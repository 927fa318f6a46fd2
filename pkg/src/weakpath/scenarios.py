"""Scenario registry for the CLI: validation, execution, artifact writing.

Each scenario consumes one TOML config (a ``kind``, an ``[output]`` table and
a ``[parameters]`` table), validates every numeric parameter against the
module preconditions before any computation starts, and writes its results
plus a manifest under its declared output directory only. Identical config
and seed give byte-identical numeric outputs; wall time lives only in the
manifest.
"""

from __future__ import annotations

import json
import platform
import time
from dataclasses import dataclass
from pathlib import Path as FsPath
import numpy as np

from . import __version__
from .clock import ClockModel, SplitSpec, clock_stand, double_slit_demo, two_amplitude_suppression
from .evolution import BoundaryPair
from .hilbert import OperatorMatrix, StateVector, from_pairs, matexp
from .pathspace import (
    Path,
    PathAction,
    PathLattice,
    action_from_transfer,
    hamming_peak,
    metropolis_sample,
    our_average,
    sample_average,
    weak_value_pathsum,
)
from .selection import maximize_overlap, selected_weak_value_suite
from .trajectory import (
    ActionModel,
    OptimizerConfig,
    Trajectory,
    TwoGaussianPeaks,
    action_value,
    find_favored_path,
    find_potential_maxima,
    slow_roll_scenario,
    two_peak_candidates,
)
from .weakvalue import weak_value

__all__ = ["ConfigError", "ScenarioConfig", "RunResult", "SCENARIO_KINDS", "list_scenarios", "run", "render_toml"]


class ConfigError(ValueError):
    """A config field failed validation; carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    parameters: dict
    out_dir: FsPath
    fmt: str = "csv"
    seed: int = 0


@dataclass(frozen=True)
class RunResult:
    exit_code: int
    manifest: dict


def _need(table: dict, field: str, path: str):
    if field not in table:
        raise ConfigError(f"{path}.{field}", "missing required field")
    return table[field]


def _number(table: dict, field: str, path: str, *, default=None, minimum=None, strict=False):
    if field not in table:
        if default is None:
            raise ConfigError(f"{path}.{field}", "missing required field")
        return default
    value = table[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{field}", f"expected a number, got {value!r}")
    value = float(value)
    if minimum is not None and (value <= minimum if strict else value < minimum):
        op = ">" if strict else ">="
        raise ConfigError(f"{path}.{field}", f"must be {op} {minimum}, got {value}")
    return value


def _integer(table: dict, field: str, path: str, *, default=None, minimum=None):
    if field not in table:
        if default is None:
            raise ConfigError(f"{path}.{field}", "missing required field")
        return default
    value = table[field]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{field}", f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}.{field}", f"must be >= {minimum}, got {value}")
    return value


def _matrix(table: dict, field: str, path: str, *, dim=None, hermitian=False) -> np.ndarray:
    raw = _need(table, field, path)
    try:
        mat = from_pairs(raw)
    except Exception as exc:
        raise ConfigError(f"{path}.{field}", f"not valid [re, im] matrix data ({exc})")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ConfigError(f"{path}.{field}", f"must be square, got shape {mat.shape}")
    if dim is not None and mat.shape[0] != dim:
        raise ConfigError(f"{path}.{field}", f"expected dimension {dim}, got {mat.shape[0]}")
    if hermitian and float(np.max(np.abs(mat - mat.conj().T))) > 1e-12:
        raise ConfigError(f"{path}.{field}", "must be Hermitian")
    return mat


def _observables(table: dict, path: str, dim: int) -> list[tuple[str, OperatorMatrix]]:
    raw = _need(table, "observables", path)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}.observables", "must be a nonempty array of tables")
    out = []
    for k, item in enumerate(raw):
        sub = f"{path}.observables[{k}]"
        if not isinstance(item, dict):
            raise ConfigError(sub, "must be a table")
        name = item.get("name", f"O{k}")
        if "diag" in item:
            diag = item["diag"]
            if not isinstance(diag, list) or len(diag) != dim:
                raise ConfigError(f"{sub}.diag", f"must be a list of {dim} reals")
            mat = np.diag(np.asarray(diag, dtype=np.float64)).astype(np.complex128)
        else:
            mat = _matrix(item, "matrix", sub, dim=dim, hermitian=True)
        out.append((str(name), OperatorMatrix(mat, kind="hermitian")))
    return out


def _write_json(path: FsPath, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _check(name: str, passed: bool, detail) -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


# ---------------------------------------------------------------- weakvalue_suite


def _validate_weakvalue_suite(p: dict) -> dict:
    path = "parameters"
    hbar = _number(p, "hbar", path, minimum=0.0, strict=True)
    t_i = _number(p, "t_i", path, default=0.0)
    t_f = _number(p, "t_f", path)
    if not t_f > t_i:
        raise ConfigError(f"{path}.t_f", f"must exceed t_i={t_i}")
    h = _matrix(p, "hamiltonian", path)
    observables = _observables(p, path, h.shape[0])
    grid_points = _integer(p, "grid_points", path, default=50, minimum=2)
    reality_tol = _number(p, "reality_tol", path, default=1e-8, minimum=0.0, strict=True)
    return {
        "hbar": hbar,
        "t_i": t_i,
        "t_f": t_f,
        "hamiltonian": OperatorMatrix(h),
        "observables": observables,
        "grid_points": grid_points,
        "reality_tol": reality_tol,
    }


def _run_weakvalue_suite(v: dict, out_dir: FsPath, fmt: str, seed: int):
    grid = np.linspace(v["t_i"], v["t_f"], v["grid_points"])
    suite = selected_weak_value_suite(
        v["hamiltonian"], v["observables"], v["t_i"], v["t_f"], grid, v["hbar"], v["reality_tol"]
    )
    outputs = []
    for entry in suite.entries:
        stem = f"series_{entry.name}"
        if fmt == "csv":
            target = out_dir / f"{stem}.csv"
            target.write_text(entry.series.to_csv(), encoding="utf-8")
        else:
            target = out_dir / f"{stem}.json"
            _write_json(target, entry.series.to_json())
        outputs.append(target.name)
    records = out_dir / "records.json"
    _write_json(records, suite.records())
    outputs.append(records.name)
    checks = [
        _check(
            f"reality_{entry.name}",
            entry.report.is_real,
            {"max_imag_abs": entry.report.max_imag_abs, "tol": entry.report.tol},
        )
        for entry in suite.entries
    ]
    summary = {
        "value": suite.selection.value,
        "degenerate": suite.selection.degenerate,
        "all_real": all(e.report.is_real for e in suite.entries),
    }
    return outputs, checks, summary


# ---------------------------------------------------------------- maximization


def _validate_maximization(p: dict) -> dict:
    path = "parameters"
    hbar = _number(p, "hbar", path, minimum=0.0, strict=True)
    t_i = _number(p, "t_i", path, default=0.0)
    t_f = _number(p, "t_f", path)
    if not t_f > t_i:
        raise ConfigError(f"{path}.t_f", f"must exceed t_i={t_i}")
    h = _matrix(p, "hamiltonian", path)
    return {"hbar": hbar, "t_i": t_i, "t_f": t_f, "hamiltonian": OperatorMatrix(h)}


def _run_maximization(v: dict, out_dir: FsPath, fmt: str, seed: int):
    result = maximize_overlap(v["hamiltonian"], v["t_i"], v["t_f"], v["hbar"])
    target = out_dir / "maximization.json"
    _write_json(target, result.to_json())
    u = matexp(v["hamiltonian"], v["t_f"] - v["t_i"], v["hbar"]).matrix
    image = u @ result.initial.amplitudes
    # U i = value * f up to one global phase
    phase = np.vdot(result.final.amplitudes, image)
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    misfit = float(np.max(np.abs(image - result.value * phase * result.final.amplitudes)))
    checks = [_check("singular_pair_consistency", misfit <= 1e-9, {"misfit": misfit})]
    summary = {"value": result.value, "degenerate": result.degenerate}
    return [target.name], checks, summary


# ---------------------------------------------------------------- pathsum_equivalence


def _validate_pathsum_equivalence(p: dict) -> dict:
    path = "parameters"
    hbar = _number(p, "hbar", path, minimum=0.0, strict=True)
    sites = _integer(p, "sites", path, minimum=2)
    steps = _integer(p, "steps", path, minimum=1)
    dt = _number(p, "dt", path, default=1.0, minimum=0.0, strict=True)
    h = _matrix(p, "hamiltonian", path, dim=sites)
    n_pairs = _integer(p, "n_pairs", path, default=10, minimum=1)
    tolerance = _number(p, "tolerance", path, default=1e-12, minimum=0.0, strict=True)
    lattice = PathLattice(sites=sites, steps=steps, dt=dt)
    lattice.require_enumerable()
    return {
        "hbar": hbar,
        "lattice": lattice,
        "hamiltonian": OperatorMatrix(h),
        "n_pairs": n_pairs,
        "tolerance": tolerance,
    }


def _random_state(rng: np.random.Generator, dim: int) -> StateVector:
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(vec).normalize()


def _run_pathsum_equivalence(v: dict, out_dir: FsPath, fmt: str, seed: int):
    rng = np.random.default_rng(seed)
    lattice: PathLattice = v["lattice"]
    h: OperatorMatrix = v["hamiltonian"]
    u_step = matexp(h, lattice.dt, v["hbar"])
    action = action_from_transfer(u_step)
    rows = []
    worst = 0.0
    for k in range(v["n_pairs"]):
        initial = _random_state(rng, lattice.sites)
        final = _random_state(rng, lattice.sites)
        o_diag = rng.uniform(-1.0, 1.0, size=lattice.sites)
        pair = BoundaryPair(initial, final, 0.0, lattice.steps * lattice.dt)
        observable = OperatorMatrix(np.diag(o_diag).astype(np.complex128), kind="hermitian")
        for t_index in range(lattice.steps + 1):
            lhs = weak_value_pathsum(action, o_diag, t_index, initial, final, lattice)
            rhs = weak_value(observable, pair, h, t_index * lattice.dt, v["hbar"])
            diff = abs(lhs - rhs)
            worst = max(worst, diff)
            rows.append({"pair": k, "t_index": t_index, "difference": diff})
    target = out_dir / "equivalence.json"
    _write_json(target, {"max_abs_difference": worst, "rows": rows})
    checks = [_check("pathsum_matches_operator", worst <= v["tolerance"],
                     {"max_abs_difference": worst, "tolerance": v["tolerance"]})]
    return [target.name], checks, {"max_abs_difference": worst}


# ---------------------------------------------------------------- metropolis


def _validate_s_p(p: dict, path: str, lattice: PathLattice):
    raw = _need(p, "s_p", path)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}.s_p", "must be a table")
    kind = raw.get("kind")
    if kind == "zero":
        return ("zero", lambda pts: np.zeros(np.asarray(pts).shape[0]))
    if kind == "hamming_peak":
        target = raw.get("target")
        if not isinstance(target, list) or len(target) != lattice.slices:
            raise ConfigError(f"{path}.s_p.target", f"must list {lattice.slices} site indices")
        if any((not isinstance(x, int)) or x < 0 or x >= lattice.sites for x in target):
            raise ConfigError(f"{path}.s_p.target", f"site indices must lie in [0, {lattice.sites})")
        strength = _number(raw, "strength", f"{path}.s_p", minimum=0.0, strict=True)
        return ("hamming_peak", hamming_peak(target, strength))
    raise ConfigError(f"{path}.s_p.kind", f"unknown kind {kind!r}; use 'zero' or 'hamming_peak'")


def _validate_metropolis(p: dict) -> dict:
    path = "parameters"
    sites = _integer(p, "sites", path, minimum=2)
    if sites > 65535:
        raise ConfigError(f"{path}.sites", "must fit the uint16 sample format (<= 65535)")
    steps = _integer(p, "steps", path, minimum=1)
    dt = _number(p, "dt", path, default=1.0, minimum=0.0, strict=True)
    lattice = PathLattice(sites=sites, steps=steps, dt=dt)
    hbar = _number(p, "hbar", path, minimum=0.0, strict=True)
    n_samples = _integer(p, "n_samples", path, minimum=1)
    burn_in = _integer(p, "burn_in", path, minimum=1)
    n_chains = _integer(p, "n_chains", path, default=8, minimum=1)
    t_index = _integer(p, "t_index", path, default=steps // 2, minimum=0)
    if t_index > steps:
        raise ConfigError(f"{path}.t_index", f"must be <= steps={steps}")
    observable = p.get("observable")
    if observable is None:
        observable = list(range(sites))
    if not isinstance(observable, list) or len(observable) != sites:
        raise ConfigError(f"{path}.observable", f"must list {sites} real values")
    kind, s_p = _validate_s_p(p, path, lattice)
    compare_exact = p.get("compare_exact", True)
    if not isinstance(compare_exact, bool):
        raise ConfigError(f"{path}.compare_exact", "must be a boolean")
    return {
        "lattice": lattice,
        "hbar": hbar,
        "n_samples": n_samples,
        "burn_in": burn_in,
        "n_chains": n_chains,
        "t_index": t_index,
        "observable": np.asarray(observable, dtype=np.float64),
        "s_p_kind": kind,
        "s_p": s_p,
        "compare_exact": compare_exact,
    }


def _run_metropolis(v: dict, out_dir: FsPath, fmt: str, seed: int):
    lattice: PathLattice = v["lattice"]
    result = metropolis_sample(
        v["s_p"], lattice, v["hbar"], v["n_samples"], v["burn_in"],
        seed=seed, n_chains=v["n_chains"],
    )
    bin_path = out_dir / "samples.bin"
    bin_path.write_bytes(result.samples.astype("<u2").tobytes())
    mean, stderr = sample_average(result.samples, v["observable"], v["t_index"])
    sidecar = {
        "dtype": "uint16",
        "byte_order": "little",
        "shape": list(result.samples.shape),
        "lattice": {"sites": lattice.sites, "steps": lattice.steps, "dt": lattice.dt},
        "seed": seed,
        "n_chains": result.n_chains,
        "burn_in": result.burn_in,
        "acceptance_rate": result.acceptance_rate,
        "autocorrelation_estimate": result.autocorrelation_estimate,
        "observable_mean": mean,
        "observable_stderr": stderr,
        "t_index": v["t_index"],
    }
    side_path = out_dir / "samples.json"
    _write_json(side_path, sidecar)
    outputs = [bin_path.name, side_path.name]
    checks = []
    summary = {"acceptance_rate": result.acceptance_rate, "mean": mean, "stderr": stderr}
    if v["compare_exact"]:
        lattice.require_enumerable()
        exact = our_average(v["s_p"], v["observable"], v["t_index"], lattice, v["hbar"])
        gap = abs(mean - exact)
        budget = 5.0 * max(stderr, 1e-15)
        checks.append(
            _check("sampler_matches_enumeration", gap <= budget,
                   {"mc_mean": mean, "exact": exact, "gap": gap, "budget": budget})
        )
        summary["exact"] = exact
    return outputs, checks, summary


# ---------------------------------------------------------------- favored_path


def _build_potential(spec, path: str, dims: int):
    if not isinstance(spec, dict):
        raise ConfigError(path, "must be a table")
    kind = spec.get("kind")
    if kind == "free":
        return (lambda q: 0.0), (lambda q: np.zeros(dims)), (lambda q: np.zeros((dims, dims))), {"kind": "free"}
    if kind == "harmonic":
        stiffness = spec.get("stiffness", 1.0)
        if isinstance(stiffness, (int, float)) and not isinstance(stiffness, bool):
            k_arr = np.full(dims, float(stiffness))
        elif isinstance(stiffness, list) and len(stiffness) == dims:
            k_arr = np.asarray(stiffness, dtype=np.float64)
        else:
            raise ConfigError(f"{path}.stiffness", f"must be a number or list of {dims} numbers")
        if np.any(k_arr <= 0):
            raise ConfigError(f"{path}.stiffness", "must be positive")
        center = spec.get("center", [0.0] * dims)
        if not isinstance(center, list) or len(center) != dims:
            raise ConfigError(f"{path}.center", f"must list {dims} coordinates")
        c_arr = np.asarray(center, dtype=np.float64)

        def v_fn(q):
            return 0.5 * float(np.sum(k_arr * (np.asarray(q) - c_arr) ** 2))

        def g_fn(q):
            return k_arr * (np.asarray(q) - c_arr)

        def h_fn(_q):
            return np.diag(k_arr)

        return v_fn, g_fn, h_fn, {"kind": "harmonic", "stiffness": k_arr.tolist(), "center": center}
    if kind == "two_gaussian_peaks":
        if dims != 1:
            raise ConfigError(path, "two_gaussian_peaks is one-dimensional")
        fields = {}
        for name, default in (
            ("height_a", 1.0), ("center_a", -1.0), ("width_a", 0.35),
            ("height_b", 0.8), ("center_b", 1.0), ("width_b", 0.35), ("slope", 0.0),
        ):
            fields[name] = _number(spec, name, path, default=default)
        for name in ("width_a", "width_b"):
            if fields[name] <= 0:
                raise ConfigError(f"{path}.{name}", "must be positive")
        pot = TwoGaussianPeaks(**fields)
        return pot, pot.grad, None, {"kind": "two_gaussian_peaks", **pot.to_json()}
    raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}")


def _optimizer_config(p: dict, path: str) -> OptimizerConfig:
    kwargs = {}
    for name in ("max_iterations", "ascent_iterations", "newton_iterations"):
        if name in p:
            kwargs[name] = _integer(p, name, path, minimum=1)
    for name in ("gradient_tolerance", "residual_rel_tolerance", "initial_step", "bump_size"):
        if name in p:
            kwargs[name] = _number(p, name, path, minimum=0.0, strict=True)
    if "newton" in p:
        if not isinstance(p["newton"], bool):
            raise ConfigError(f"{path}.newton", "must be a boolean")
        kwargs["newton"] = p["newton"]
    return OptimizerConfig(**kwargs)


def _validate_favored_path(p: dict) -> dict:
    path = "parameters"
    masses = p.get("masses")
    if not isinstance(masses, list) or not masses or any(
        isinstance(m, bool) or not isinstance(m, (int, float)) or m <= 0 for m in masses
    ):
        raise ConfigError(f"{path}.masses", "must be a nonempty list of positive reals")
    dims = len(masses)
    duration = _number(p, "duration", path, minimum=0.0, strict=True)
    steps = _integer(p, "steps", path, minimum=2)
    hbar = _number(p, "hbar", path, minimum=0.0, strict=True)
    scale = _number(p, "scale", path, default=1.0)
    if scale == 0.0:
        raise ConfigError(f"{path}.scale", "must be nonzero")
    sign_mode = p.get("sign_mode", "potential_favored")
    if sign_mode not in ("potential_favored", "kinetic_favored"):
        raise ConfigError(f"{path}.sign_mode", f"unknown mode {sign_mode!r}")
    for name in ("start", "end"):
        pt = p.get(name)
        if not isinstance(pt, list) or len(pt) != dims:
            raise ConfigError(f"{path}.{name}", f"must list {dims} coordinates")
    v_fn, g_fn, h_fn, meta = _build_potential(_need(p, "potential", path), f"{path}.potential", dims)
    optimizer = _optimizer_config(p.get("optimizer", {}), f"{path}.optimizer")
    model = ActionModel(
        masses=np.asarray(masses, dtype=np.float64),
        potential=v_fn,
        dt=duration / steps,
        sign_mode=sign_mode,
        hbar=hbar,
        scale=scale,
        potential_grad=g_fn,
        potential_hess=h_fn,
    )
    return {
        "model": model,
        "steps": steps,
        "duration": duration,
        "start": np.asarray(p["start"], dtype=np.float64),
        "end": np.asarray(p["end"], dtype=np.float64),
        "potential_meta": meta,
        "optimizer": optimizer,
    }


def _run_favored_path(v: dict, out_dir: FsPath, fmt: str, seed: int):
    steps = v["steps"]
    dt = v["duration"] / steps
    times = np.arange(steps + 1) * dt
    positions = np.linspace(v["start"], v["end"], steps + 1)
    init = Trajectory(times, positions)
    result = find_favored_path(v["model"], init, v["optimizer"])
    traj_path = out_dir / "trajectory.csv"
    traj_path.write_text(result.trajectory.to_csv(), encoding="utf-8")
    report_path = out_dir / "report.json"
    _write_json(report_path, {**result.to_json(), "potential": v["potential_meta"]})
    checks = [_check("optimizer_converged", result.converged,
                     {"residual": result.residual, "iterations": result.iterations})]
    return [traj_path.name, report_path.name], checks, result.to_json()


# ---------------------------------------------------------------- slow_roll


def _validate_slow_roll(p: dict) -> dict:
    path = "parameters"
    masses = p.get("masses", [1.0])
    if not isinstance(masses, list) or len(masses) != 1 or masses[0] <= 0:
        raise ConfigError(f"{path}.masses", "must be a single positive mass (scenario is 1-d)")
    duration = _number(p, "duration", path, minimum=0.0, strict=True)
    steps = _integer(p, "steps", path, default=200, minimum=2)
    restarts = _integer(p, "restarts", path, default=4, minimum=0)
    hbar = _number(p, "hbar", path, minimum=0.0, strict=True)
    scale = _number(p, "scale", path, default=1.0)
    if scale == 0.0:
        raise ConfigError(f"{path}.scale", "must be nonzero")
    sign_mode = p.get("sign_mode", "potential_favored")
    if sign_mode not in ("potential_favored", "kinetic_favored"):
        raise ConfigError(f"{path}.sign_mode", f"unknown mode {sign_mode!r}")
    v_fn, g_fn, h_fn, meta = _build_potential(_need(p, "potential", path), f"{path}.potential", 1)
    if meta.get("kind") != "two_gaussian_peaks":
        raise ConfigError(f"{path}.potential.kind", "slow_roll needs the two_gaussian_peaks family")
    domain = p.get("domain")
    if not isinstance(domain, list) or len(domain) != 2 or domain[0] >= domain[1]:
        raise ConfigError(f"{path}.domain", "must be [lo, hi] with lo < hi")
    maxima = find_potential_maxima(v_fn, float(domain[0]), float(domain[1]))
    if len(maxima) < 2:
        raise ConfigError(f"{path}.potential", f"found {len(maxima)} local maxima in domain; need 2")
    optimizer = _optimizer_config(p.get("optimizer", {}), f"{path}.optimizer")
    model = ActionModel(
        masses=np.asarray(masses, dtype=np.float64),
        potential=v_fn,
        dt=duration / steps,
        sign_mode=sign_mode,
        hbar=hbar,
        scale=scale,
        potential_grad=g_fn,
        potential_hess=h_fn,
    )
    return {
        "model": model,
        "duration": duration,
        "steps": steps,
        "restarts": restarts,
        "domain": (float(domain[0]), float(domain[1])),
        "potential_meta": meta,
        "optimizer": optimizer,
    }


def _run_slow_roll(v: dict, out_dir: FsPath, fmt: str, seed: int):
    report = slow_roll_scenario(
        v["model"], v["duration"], v["restarts"],
        domain=v["domain"], steps=v["steps"], seed=seed, config=v["optimizer"],
    )
    report_path = out_dir / "slow_roll.json"
    _write_json(report_path, {**report.to_json(), "potential": v["potential_meta"]})
    outputs = [report_path.name]
    for entry in report.entries:
        target = out_dir / f"path_{entry.label}.csv"
        target.write_text(entry.result.trajectory.to_csv(), encoding="utf-8")
        outputs.append(target.name)
    dwellers = [e for e in report.entries if e.label.startswith("dwell_")]
    checks = [
        _check(
            "dwell_paths_stationary",
            bool(dwellers) and all(e.result.converged for e in dwellers),
            {e.label: e.result.residual for e in dwellers},
        )
    ]
    # ranking of the three canonical candidates must match direct evaluation
    peaks = [pos for pos, _ in report.peaks]
    canonical = two_peak_candidates(peaks, v["duration"], v["steps"], v["duration"] / v["steps"])
    direct = sorted(canonical, key=lambda lab: -action_value(canonical[lab], v["model"]))
    by_label = {e.label: k for k, e in enumerate(report.entries)}
    reported = sorted((lab for lab in canonical if lab in by_label), key=lambda lab: by_label[lab])
    checks.append(
        _check("ranking_matches_direct_evaluation", reported == direct,
               {"direct": direct, "reported": reported})
    )
    summary = {"entries": len(report.entries), "top": report.entries[0].label}
    return outputs, checks, summary


# ---------------------------------------------------------------- double_slit


def _validate_double_slit(p: dict) -> dict:
    path = "parameters"
    sites = _integer(p, "sites", path, minimum=2)
    steps = _integer(p, "steps", path, minimum=2)
    dt = _number(p, "dt", path, default=1.0, minimum=0.0, strict=True)
    lattice = PathLattice(sites=sites, steps=steps, dt=dt)
    period = _number(p, "clock_period", path, minimum=0.0, strict=True)
    rates = p.get("clock_rates")
    if not isinstance(rates, list) or len(rates) != sites or any(
        isinstance(r, bool) or not isinstance(r, (int, float)) or r <= 0 for r in rates
    ):
        raise ConfigError(f"{path}.clock_rates", f"must list {sites} positive rates")
    if "step_matrix" in p:
        step = _matrix(p, "step_matrix", path, dim=sites)
    else:
        step = np.eye(sites, dtype=np.complex128)
    split_raw = _need(p, "split", path)
    if not isinstance(split_raw, dict):
        raise ConfigError(f"{path}.split", "must be a table")
    split_index = _integer(split_raw, "split_index", f"{path}.split", minimum=0)
    rejoin_index = _integer(split_raw, "rejoin_index", f"{path}.split", minimum=1)
    bundles = {}
    for name in ("bundle_a", "bundle_b"):
        raw = split_raw.get(name)
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.split.{name}", "must be a nonempty array of paths")
        paths = []
        for j, pts in enumerate(raw):
            if (
                not isinstance(pts, list)
                or len(pts) != lattice.slices
                or any((not isinstance(x, int)) or x < 0 or x >= sites for x in pts)
            ):
                raise ConfigError(
                    f"{path}.split.{name}[{j}]",
                    f"must list {lattice.slices} site indices in [0, {sites})",
                )
            paths.append(Path(tuple(pts)))
        bundles[name] = tuple(paths)
    try:
        split = SplitSpec(
            bundle_a=bundles["bundle_a"],
            bundle_b=bundles["bundle_b"],
            split_index=split_index,
            rejoin_index=rejoin_index,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}.split", str(exc))
    return {
        "lattice": lattice,
        "clock": ClockModel.per_site(rates, period),
        "action_matrix": step,
        "split": split,
    }


def _run_double_slit(v: dict, out_dir: FsPath, fmt: str, seed: int):
    lattice: PathLattice = v["lattice"]
    action = PathAction(step_matrix=v["action_matrix"], description="double slit step")
    report = double_slit_demo(lattice, action, v["clock"], v["split"])
    report_path = out_dir / "double_slit.json"
    _write_json(report_path, report.to_json())
    outputs = [report_path.name]
    for name, bundle in (("a", v["split"].bundle_a), ("b", v["split"].bundle_b)):
        series = clock_stand(bundle[0], v["clock"], dt=lattice.dt)
        target = out_dir / f"delay_branch_{name}.csv"
        target.write_text(series.to_csv(), encoding="utf-8")
        outputs.append(target.name)
    oracle = two_amplitude_suppression(
        report.branch_weights[0], report.branch_weights[1],
        report.delta_mean_a, report.delta_mean_b,
    )
    equal_weights = abs(report.branch_weights[0] - report.branch_weights[1]) <= 1e-12 * max(
        report.branch_weights
    )
    suppression_ok = (not equal_weights) or abs(report.suppression_factor - oracle) <= 1e-12
    checks = [
        _check("suppression_in_unit_interval",
               0.0 <= report.suppression_factor <= 1.0, report.suppression_factor),
        _check("probabilities_add_clocklessly",
               abs(sum(report.clockless_split_probabilities) - 1.0) <= 1e-12,
               list(report.clockless_split_probabilities)),
        _check("suppression_matches_two_amplitude_formula", suppression_ok,
               {"suppression": report.suppression_factor, "two_amplitude": oracle}),
    ]
    summary = report.to_json()
    return outputs, checks, summary


# ---------------------------------------------------------------- registry


_PAULI_X = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]

SCENARIOS: dict[str, dict] = {
    "weakvalue_suite": {
        "description": "maximized boundary pair, then weak-value series and reality reports per observable",
        "validator": _validate_weakvalue_suite,
        "runner": _run_weakvalue_suite,
        "example": {
            "kind": "weakvalue_suite",
            "seed": 0,
            "output": {"directory": "out/weakvalue_suite", "format": "csv"},
            "parameters": {
                "hbar": 1.0,
                "t_i": 0.0,
                "t_f": 2.0,
                "grid_points": 50,
                "hamiltonian": _PAULI_X,
                "observables": [{"name": "n0", "diag": [1.0, 0.0]}],
            },
        },
    },
    "maximization": {
        "description": "top singular pair of the propagator: the overlap-maximizing boundary states",
        "validator": _validate_maximization,
        "runner": _run_maximization,
        "example": {
            "kind": "maximization",
            "seed": 0,
            "output": {"directory": "out/maximization", "format": "json"},
            "parameters": {
                "hbar": 1.0,
                "t_i": 0.0,
                "t_f": 1.0,
                "hamiltonian": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, -1.0]]],
            },
        },
    },
    "pathsum_equivalence": {
        "description": "transfer-matrix path sums against operator weak values on an enumerable lattice",
        "validator": _validate_pathsum_equivalence,
        "runner": _run_pathsum_equivalence,
        "example": {
            "kind": "pathsum_equivalence",
            "seed": 0,
            "output": {"directory": "out/pathsum", "format": "json"},
            "parameters": {
                "hbar": 1.0,
                "sites": 2,
                "steps": 4,
                "dt": 0.3,
                "n_pairs": 10,
                "tolerance": 1e-12,
                "hamiltonian": _PAULI_X,
            },
        },
    },
    "metropolis": {
        "description": "seeded path sampler with diagnostics, checked against exact enumeration",
        "validator": _validate_metropolis,
        "runner": _run_metropolis,
        "example": {
            "kind": "metropolis",
            "seed": 11,
            "output": {"directory": "out/metropolis", "format": "json"},
            "parameters": {
                "sites": 2,
                "steps": 6,
                "dt": 1.0,
                "hbar": 0.5,
                "n_samples": 20000,
                "burn_in": 200,
                "n_chains": 8,
                "t_index": 3,
                "observable": [0.0, 1.0],
                "s_p": {"kind": "hamming_peak", "target": [1, 1, 0, 1, 0, 1, 1], "strength": 1.0},
                "compare_exact": True,
            },
        },
    },
    "favored_path": {
        "description": "stationary-trajectory optimizer on a named potential with a residual certificate",
        "validator": _validate_favored_path,
        "runner": _run_favored_path,
        "example": {
            "kind": "favored_path",
            "seed": 0,
            "output": {"directory": "out/favored_path", "format": "csv"},
            "parameters": {
                "hbar": 1.0,
                "masses": [1.0],
                "duration": 2.0,
                "steps": 200,
                "start": [1.0],
                "end": [float(np.cos(2.0))],
                "sign_mode": "potential_favored",
                "potential": {"kind": "harmonic", "stiffness": 1.0},
            },
        },
    },
    "slow_roll": {
        "description": "two-peak dwell/transit scenario: ranked near-stationary paths and statistics",
        "validator": _validate_slow_roll,
        "runner": _run_slow_roll,
        "example": {
            "kind": "slow_roll",
            "seed": 3,
            "output": {"directory": "out/slow_roll", "format": "json"},
            "parameters": {
                "hbar": 1.0,
                "masses": [1.0],
                "duration": 6.0,
                "steps": 120,
                "restarts": 3,
                "sign_mode": "potential_favored",
                "domain": [-2.5, 2.5],
                "potential": {
                    "kind": "two_gaussian_peaks",
                    "height_a": 1.0,
                    "center_a": -1.0,
                    "width_a": 0.35,
                    "height_b": 0.7,
                    "center_b": 1.0,
                    "width_b": 0.35,
                    "slope": 0.0,
                },
            },
        },
    },
    "double_slit": {
        "description": "two-bundle interference accounting: delay ratios, suppression, which-path weak value",
        "validator": _validate_double_slit,
        "runner": _run_double_slit,
        "example": {
            "kind": "double_slit",
            "seed": 0,
            "output": {"directory": "out/double_slit", "format": "json"},
            "parameters": {
                "sites": 2,
                "steps": 4,
                "dt": 1.0,
                "clock_period": 1.0,
                "clock_rates": [1.0, 1.125],
                "split": {
                    "split_index": 0,
                    "rejoin_index": 4,
                    "bundle_a": [[0, 0, 0, 0, 0]],
                    "bundle_b": [[0, 1, 1, 1, 0]],
                },
            },
        },
    },
}

SCENARIO_KINDS = tuple(SCENARIOS)


def list_scenarios() -> list[dict]:
    """Deterministic listing: kind, one-line description, example config."""
    return [
        {"kind": kind, "description": SCENARIOS[kind]["description"], "example": SCENARIOS[kind]["example"]}
        for kind in SCENARIO_KINDS
    ]


def load_config(raw: dict, *, out_override=None, seed_override=None, format_override=None) -> ScenarioConfig:
    kind = raw.get("kind")
    if kind not in SCENARIOS:
        raise ConfigError("kind", f"unknown scenario kind {kind!r}; see `weakpath list`")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", f"must be a nonnegative integer, got {seed!r}")
    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output", "must be a table")
    directory = output.get("directory", f"out/{kind}")
    fmt = output.get("format", "csv")
    if format_override is not None:
        fmt = format_override
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format", f"must be 'csv' or 'json', got {fmt!r}")
    if out_override is not None:
        directory = out_override
    if seed_override is not None:
        seed = seed_override
    parameters = raw.get("parameters")
    if not isinstance(parameters, dict):
        raise ConfigError("parameters", "missing [parameters] table")
    return ScenarioConfig(
        kind=kind, parameters=parameters, out_dir=FsPath(directory), fmt=fmt, seed=seed
    )


def run(config: ScenarioConfig) -> RunResult:
    """Validate, execute, and write artifacts plus a manifest.

    Exit code semantics: 0 success, 1 validation failure (raised as
    ConfigError before any computation), 2 computation error (module
    exceptions propagate to the caller), 3 invariant-check failure.
    """
    spec = SCENARIOS[config.kind]
    validated = spec["validator"](dict(config.parameters))
    config.out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    outputs, checks, summary = spec["runner"](validated, config.out_dir, config.fmt, config.seed)
    wall = time.perf_counter() - started
    all_passed = all(c["passed"] for c in checks)
    manifest = {
        "scenario": config.kind,
        "seed": config.seed,
        "format": config.fmt,
        "parameters": _jsonable(config.parameters),
        "versions": {
            "weakpath": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": wall,
        "outputs": outputs,
        "checks": checks,
        "summary": _jsonable(summary),
        "status": "ok" if all_passed else "invariant_check_failed",
    }
    _write_json(config.out_dir / "manifest.json", manifest)
    return RunResult(exit_code=0 if all_passed else 3, manifest=manifest)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def render_toml(config: dict) -> str:
    """Minimal TOML rendering for the embedded example configs."""
    lines = _render_table(config, ())
    return "\n".join(lines) + "\n"


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise TypeError(f"cannot render {type(value).__name__} as TOML")


def _render_table(table: dict, path: tuple) -> list[str]:
    lines = []
    for key, value in table.items():
        if isinstance(value, dict) or (
            isinstance(value, list) and value and isinstance(value[0], dict)
        ):
            continue
        lines.append(f"{key} = {_toml_scalar(value)}")
    for key, value in table.items():
        if isinstance(value, dict):
            lines.append("")
            lines.append(f"[{'.'.join(path + (key,))}]")
            lines.extend(_render_table(value, path + (key,)))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for item in value:
                lines.append("")
                lines.append(f"[[{'.'.join(path + (key,))}]]")
                lines.extend(_render_table(item, path + (key,)))
    return lines
