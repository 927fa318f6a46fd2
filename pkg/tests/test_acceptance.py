"""Acceptance gate: every published criterion at its stated tolerance and
time budget, one printed PASS/FAIL line each (run `pytest -s` to see them).

The oracles used here are independent of the code paths they certify: grid
search and power iteration against the SVD, itertools enumeration and matrix
powers against the chunked path sums, truncated Taylor series against the
scaled-and-squared exponential, closed forms against the optimizer.
"""

import time

import numpy as np
import pytest

from weakpath.clock import ClockModel, SplitSpec, double_slit_demo, two_path_probability
from weakpath.evolution import BoundaryPair, bracket, evolve_final, evolve_initial
from weakpath.hilbert import OperatorMatrix, StateVector, matexp
from weakpath.pathspace import (
    Path,
    PathAction,
    PathLattice,
    action_from_transfer,
    argmax_path,
    hamming_peak,
    metropolis_sample,
    our_average,
    sample_average,
    weak_value_pathsum,
)
from weakpath.selection import maximize_overlap, selected_weak_value_suite
from weakpath.trajectory import (
    ActionModel,
    Trajectory,
    action_value,
    find_favored_path,
    slow_roll_scenario,
    stationarity_residual,
    two_peak_candidates,
    TwoGaussianPeaks,
)
from weakpath.weakvalue import weak_value, weight_distribution

from oracles import grid_search_max_overlap


def _report(num: int, name: str, limit: float, elapsed: float, passed: bool, detail: str):
    status = "PASS" if passed else "FAIL"
    print(f"[criterion {num:02d}] {status} ({elapsed:.2f}s / {limit:.0f}s) {name}: {detail}")


def _finish(num, name, limit, started, passed, detail):
    elapsed = time.perf_counter() - started
    _report(num, name, limit, elapsed, passed, detail)
    assert passed, f"criterion {num}: {detail}"
    assert elapsed < limit, f"criterion {num} exceeded its {limit:.0f}s budget ({elapsed:.2f}s)"


def random_state(rng, dim):
    return StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim)).normalize()


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return OperatorMatrix((m + m.conj().T) / 2, kind="hermitian")


def random_general(rng, dim):
    return OperatorMatrix(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))


def test_criterion_01_real_action_maximization():
    name, limit = "real-action maximization reaches unit overlap", 5.0
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    all_degenerate = True
    for k in range(20):
        dim = 2 + k % 7
        result = maximize_overlap(random_hermitian(rng, dim), 0.0, 1.0 + 0.1 * k)
        worst = max(worst, abs(result.value - 1.0))
        all_degenerate = all_degenerate and result.degenerate
    passed = worst <= 1e-10 and all_degenerate
    _finish(1, name, limit, started, passed,
            f"max |value-1| = {worst:.2e}, degeneracy flagged: {all_degenerate}")


def test_criterion_02_svd_matches_grid_search():
    name, limit = "selected value matches brute-force grid search", 60.0
    started = time.perf_counter()
    rng = np.random.default_rng(102)
    worst = 0.0
    for k in range(10):
        dim = 2 + k % 2
        h = random_general(rng, dim)
        result = maximize_overlap(h, 0.0, 1.0)
        oracle = grid_search_max_overlap(matexp(h, 1.0).matrix)
        worst = max(worst, abs(result.value - oracle))
    _finish(2, name, limit, started, worst <= 1e-4, f"max |svd - grid| = {worst:.2e}")


def test_criterion_03_reality_for_hermitian_generators():
    name, limit = "weak values real for Hermitian H with selected pairs", 30.0
    started = time.perf_counter()
    rng = np.random.default_rng(103)
    grid_points = 50
    worst_ratio = 0.0
    for k in range(20):
        dim = 2 + k % 7
        h = random_hermitian(rng, dim)
        observables = [(f"o{j}", random_hermitian(rng, dim)) for j in range(5)]
        suite = selected_weak_value_suite(
            h, observables, 0.0, 2.0, np.linspace(0.0, 2.0, grid_points), reality_tol=1e-8
        )
        for entry in suite.entries:
            worst_ratio = max(worst_ratio, entry.report.max_imag_over_real)
            assert entry.report.is_real
    _finish(3, name, limit, started, worst_ratio <= 1e-8,
            f"max |Im|/max(1, |Re|) = {worst_ratio:.2e} over 20 H x 5 observables x 50 t")


def test_criterion_04_pathsum_operator_equivalence():
    name, limit = "path sums equal operator weak values on enumerable lattices", 60.0
    started = time.perf_counter()
    rng = np.random.default_rng(104)
    dt = 0.3
    worst = 0.0
    for sites in (2, 3):
        for steps in range(1, 7):
            h = random_general(rng, sites)
            lattice = PathLattice(sites=sites, steps=steps, dt=dt)
            action = action_from_transfer(matexp(h, dt))
            for _ in range(10):
                initial = random_state(rng, sites)
                final = random_state(rng, sites)
                o_diag = rng.uniform(-1.0, 1.0, size=sites)
                pair = BoundaryPair(initial, final, 0.0, steps * dt)
                observable = OperatorMatrix(np.diag(o_diag), kind="hermitian")
                for t_index in range(steps + 1):
                    lhs = weak_value_pathsum(action, o_diag, t_index, initial, final, lattice)
                    rhs = weak_value(observable, pair, h, t_index * dt)
                    worst = max(worst, abs(lhs - rhs))
    _finish(4, name, limit, started, worst <= 1e-12, f"max discrepancy = {worst:.2e}")


def test_criterion_05_weight_distribution_identities():
    name, limit = "projector weights sum to one and average to the weak value", 10.0
    started = time.perf_counter()
    rng = np.random.default_rng(105)
    worst_sum = 0.0
    worst_mean = 0.0
    worst_negative = 0.0
    for k in range(100):
        dim = 2 + k % 4
        h = random_general(rng, dim)
        state = random_state(rng, dim)
        t = float(rng.uniform(0.1, 0.9))
        if k % 3 == 0:
            # no post-selection bias: pick f so that f(t) = i(t); for the
            # zero-generator sub-case this is literally f = i
            if k % 6 == 0:
                h = OperatorMatrix(np.zeros((dim, dim)))
                pair = BoundaryPair(state, state, 0.0, 1.0)
            else:
                i_t = evolve_initial(state, h, 0.0, t)
                f = evolve_final(i_t, h, t, 1.0).normalize()
                pair = BoundaryPair(state, f, 0.0, 1.0)
        else:
            pair = BoundaryPair(state, random_state(rng, dim), 0.0, 1.0)
        o = random_hermitian(rng, dim)
        dist = weight_distribution(o, pair, h, t)
        worst_sum = max(worst_sum, abs(np.sum(dist.weights) - 1.0))
        worst_mean = max(worst_mean, abs(dist.weak_value - weak_value(o, pair, h, t)))
        if k % 3 == 0:
            worst_negative = max(
                worst_negative,
                float(np.max(-dist.weights.real)),
                float(np.max(np.abs(dist.weights.imag))),
            )
    passed = worst_sum <= 1e-10 and worst_mean <= 1e-10 and worst_negative <= 1e-12
    _finish(5, name, limit, started, passed,
            f"sum defect {worst_sum:.2e}, mean defect {worst_mean:.2e}, "
            f"unbiased negativity {worst_negative:.2e}")


def test_criterion_06_interference_law():
    name, limit = "two-path suppression follows the half-angle cosine law", 5.0
    started = time.perf_counter()
    deltas = np.linspace(-3 * np.pi, 3 * np.pi, 1000)
    worst = max(
        abs(two_path_probability(d / (2 * np.pi), 0.0) - np.cos(d / 2.0) ** 2) for d in deltas
    )
    integer_defect = max(abs(two_path_probability(float(k), 0.0) - 1.0) for k in range(-3, 4))
    # equal-weight two-bundle demo against the explicit amplitude sum
    lattice = PathLattice(sites=2, steps=4, dt=1.0)
    action = PathAction(step_matrix=np.ones((2, 2)))
    clock = ClockModel.per_site([1.0, 1.08], period=1.0)
    split = SplitSpec(
        bundle_a=(Path((0, 0, 0, 0, 0)),),
        bundle_b=(Path((0, 1, 1, 1, 0)),),
        split_index=0,
        rejoin_index=4,
    )
    report = double_slit_demo(lattice, action, clock, split)
    amp = np.exp(2j * np.pi * report.delta_mean_a) + np.exp(2j * np.pi * report.delta_mean_b)
    oracle = abs(amp) ** 2 / 4.0
    demo_defect = abs(report.suppression_factor - oracle)
    passed = worst <= 1e-12 and integer_defect <= 1e-12 and demo_defect <= 1e-12
    _finish(6, name, limit, started, passed,
            f"grid defect {worst:.2e}, integer-period defect {integer_defect:.2e}, "
            f"demo vs two-amplitude oracle {demo_defect:.2e}")


def test_criterion_07_metropolis_consistency():
    name, limit = "sampled averages agree with exact enumeration", 60.0
    started = time.perf_counter()
    lattice = PathLattice(sites=2, steps=6, dt=1.0)
    target = (1, 0, 1, 1, 0, 1, 1)
    s_p = hamming_peak(target, 1.0)
    hbar = 0.5
    result = metropolis_sample(s_p, lattice, hbar, n_samples=100_000, burn_in=200, seed=1007)
    observables = [
        (np.array([0.0, 1.0]), 3),
        (np.array([1.0, -1.0]), 5),
        (np.array([0.0, 1.0]), 0),
    ]
    details = []
    passed = True
    for o_diag, t_index in observables:
        mc, stderr = sample_average(result.samples, o_diag, t_index)
        exact = our_average(s_p, o_diag, t_index, lattice, hbar=hbar)
        sigmas = abs(mc - exact) / max(stderr, 1e-15)
        details.append(f"{sigmas:.2f}")
        passed = passed and sigmas <= 5.0
    _finish(7, name, limit, started, passed,
            f"|mc - exact| in standard errors: {', '.join(details)} (10^5 samples)")


def test_criterion_08_dominant_path_limit():
    name, limit = "averages collapse onto the argmax path as hbar shrinks", 30.0
    started = time.perf_counter()
    lattice = PathLattice(sites=2, steps=6, dt=1.0)
    target = (1, 0, 1, 1, 0, 1, 1)
    s_p = hamming_peak(target, 2.0)
    o_diag = np.array([0.0, 1.0])
    top = argmax_path(s_p, lattice)
    top_value = float(o_diag[top.points[3]])
    gaps = [
        abs(our_average(s_p, o_diag, 3, lattice, hbar=h) - top_value)
        for h in (1.0, 0.3, 0.1, 0.03)
    ]
    passed = all(a > b for a, b in zip(gaps, gaps[1:]))
    _finish(8, name, limit, started, passed,
            "gaps " + " > ".join(f"{g:.2e}" for g in gaps))


def _harmonic_model(dt):
    return ActionModel(
        masses=[1.0],
        potential=lambda q: 0.5 * float(q[0]) ** 2,
        dt=dt,
        sign_mode="potential_favored",
        potential_grad=lambda q: np.asarray(q, dtype=float),
        potential_hess=lambda q: np.eye(1),
    )


def test_criterion_09_classical_stationarity():
    name, limit = "optimizer recovers the analytic oscillator arc", 30.0
    started = time.perf_counter()
    duration = 2.0
    steps = 1200
    times = np.linspace(0.0, duration, steps + 1)
    init = Trajectory(times, np.linspace(1.0, np.cos(duration), steps + 1))
    result = find_favored_path(_harmonic_model(duration / steps), init)
    deviation = float(np.max(np.abs(result.trajectory.positions[:, 0] - np.cos(times))))
    residuals = []
    for halved in (100, 200):
        grid = np.linspace(0.0, duration, halved + 1)
        residuals.append(
            stationarity_residual(Trajectory(grid, np.cos(grid)), _harmonic_model(duration / halved))
        )
    order = float(np.log2(residuals[0] / residuals[1]))
    passed = result.converged and deviation <= 1e-6 and order >= 1.8
    _finish(9, name, limit, started, passed,
            f"max deviation {deviation:.2e}, residual order under dt-halving {order:.2f}")


def test_criterion_10_sign_and_constant_invariance():
    name, limit = "scaling the action moves values, never the stationary set", 10.0
    started = time.perf_counter()
    times = np.linspace(0.0, 2.0, 61)
    traj = Trajectory(times, np.cos(times))
    base_model = _harmonic_model(2.0 / 60)
    base_residual = stationarity_residual(traj, base_model)
    residual_defect = max(
        abs(stationarity_residual(traj, base_model.scaled(c)) - base_residual)
        for c in (-1.0, 2.0, 10.0)
    )
    pot = TwoGaussianPeaks(height_a=1.0, center_a=-1.0, height_b=0.7, center_b=1.0)
    model = ActionModel(masses=[1.0], potential=pot, dt=0.05, potential_grad=pot.grad)
    candidates = two_peak_candidates([-1.0, 1.0], 6.0, 120, 0.05)
    rank = sorted(candidates, key=lambda lab: -action_value(candidates[lab], model))
    rank_flipped = sorted(
        candidates, key=lambda lab: -action_value(candidates[lab], model.scaled(-1.0))
    )
    passed = residual_defect <= 1e-12 and rank_flipped == rank[::-1]
    _finish(10, name, limit, started, passed,
            f"residual defect {residual_defect:.2e}, ranking reversed: {rank_flipped == rank[::-1]}")


def test_criterion_11_slow_roll_scenario():
    name, limit = "two-peak scenario finds dwellers and ranks them consistently", 60.0
    started = time.perf_counter()
    pot = TwoGaussianPeaks(height_a=1.0, center_a=-1.0, height_b=0.7, center_b=1.0)
    model = ActionModel(masses=[1.0], potential=pot, dt=0.05, potential_grad=pot.grad)
    report = slow_roll_scenario(
        model, duration=6.0, restarts=2, domain=(-2.5, 2.5), steps=120, seed=1011
    )
    by_label = {e.label: e for e in report.entries}
    dwellers_ok = all(
        by_label[lab].result.converged
        and by_label[lab].dwell_fractions[peak] == pytest.approx(1.0)
        for lab, peak in (("dwell_peak_0", 0), ("dwell_peak_1", 1))
    )
    peaks = [p for p, _ in report.peaks]
    candidates = two_peak_candidates(peaks, 6.0, 120, 0.05)
    direct = sorted(candidates, key=lambda lab: -action_value(candidates[lab], model))
    order = {e.label: k for k, e in enumerate(report.entries)}
    reported = sorted(candidates, key=lambda lab: order[lab])
    passed = dwellers_ok and reported == direct
    _finish(11, name, limit, started, passed,
            f"dwellers stationary: {dwellers_ok}, ranking consistent: {reported == direct}")


def test_criterion_12_bracket_conservation():
    name, limit = "the boundary bracket is constant in time for any generator", 10.0
    started = time.perf_counter()
    rng = np.random.default_rng(112)
    worst = 0.0
    for k in range(50):
        dim = 2 + k % 5
        h = random_hermitian(rng, dim) if k % 4 == 0 else random_general(rng, dim)
        pair = BoundaryPair(random_state(rng, dim), random_state(rng, dim), 0.0, 2.0)
        values = [bracket(pair, h, t) for t in np.linspace(0.0, 2.0, 6)]
        worst = max(worst, max(abs(v - values[0]) for v in values))
    _finish(12, name, limit, started, worst <= 1e-10,
            f"max bracket spread = {worst:.2e} over 50 generator/pair draws")
