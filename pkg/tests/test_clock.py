import numpy as np
import pytest

from weakpath.clock import (
    ClockModel,
    SplitSpec,
    clock_stand,
    combined_action,
    double_slit_demo,
    two_amplitude_suppression,
    two_path_probability,
)
from weakpath.pathspace import Path, PathAction, PathLattice
from weakpath.trajectory import Trajectory


class TestClockStand:
    def test_standard_clock_has_zero_delay(self):
        model = ClockModel.constant(1.0, period=0.25)
        series = clock_stand(Path((0, 1, 0, 1, 1)), model, dt=0.5)
        assert np.array_equal(series.c, series.c_standard)
        assert np.all(series.delta == 0.0)

    def test_constant_fast_clock_drifts_linearly(self):
        r = 0.4
        model = ClockModel.constant(1.0 + r, period=2.0)
        series = clock_stand(Path((0, 0, 0, 0)), model, dt=0.5)
        expected = -r * series.times / 2.0
        assert np.max(np.abs(series.delta - expected)) < 1e-12

    def test_two_segment_rate_matches_piecewise_integral(self):
        # site 0 ticks at 1, site 1 at 2; path sits 3 slices then hops
        model = ClockModel.per_site([1.0, 2.0], period=1.0)
        series = clock_stand(Path((0, 0, 0, 1, 1, 1)), model, dt=0.25)
        # trapezoid: 1,1,1 then the crossing cell (1+2)/2, then 2,2
        expected_c = np.array([0.0, 0.25, 0.5, 0.5 + 0.375, 0.875 + 0.5, 1.375 + 0.5])
        assert np.max(np.abs(series.c - expected_c)) < 1e-10

    def test_time_dependent_rate_on_trajectory(self):
        # rate = 1 + t along a resting trajectory: c(t) = t + t^2/2 exactly
        traj = Trajectory(np.linspace(0, 1, 101), np.zeros(101))
        model = ClockModel(period=1.0, rate=lambda _q, t: 1.0 + t)
        series = clock_stand(traj, model)
        expected = series.times + series.times**2 / 2
        assert np.max(np.abs(series.c - expected)) < 1e-12  # trapezoid exact for linear rates

    def test_delay_composes_over_segments(self):
        model = ClockModel.per_site([1.3, 0.7], period=0.5)
        points = (0, 1, 1, 0, 1, 0, 0)
        dt = 0.3
        whole = clock_stand(Path(points), model, dt=dt)
        first = clock_stand(Path(points[:4]), model, dt=dt)
        second = clock_stand(Path(points[3:]), model, dt=dt, t0=3 * dt)
        recombined = first.delta[-1] + second.delta[-1]
        assert abs(whole.delta[-1] - recombined) < 1e-12

    def test_nonpositive_rate_rejected(self):
        model = ClockModel(period=1.0, rate=lambda q, t: 0.0)
        with pytest.raises(ValueError, match="positive"):
            clock_stand(Path((0, 0)), model, dt=1.0)

    def test_discrete_path_requires_dt(self):
        model = ClockModel.constant(1.0, period=1.0)
        with pytest.raises(ValueError, match="dt"):
            clock_stand(Path((0, 0)), model)

    def test_csv_emission(self):
        model = ClockModel.constant(1.5, period=1.0)
        series = clock_stand(Path((0, 0, 0)), model, dt=1.0)
        lines = series.to_csv().strip().split("\n")
        assert lines[0] == "t,c_standard,c,delta"
        assert len(lines) == 4


class TestCombinedAction:
    def test_zero_delay_is_purely_real(self):
        value = combined_action(-3.2, 0.0)
        assert value == -3.2 + 0.0j

    def test_pure_phase(self):
        assert combined_action(0.0, np.pi) == complex(0.0, np.pi)

    def test_clock_removal_differs_by_clock_term_exactly(self):
        # separable exponent: rest + clock contributions known by construction
        s_rest, s_clock, delta = -1.7, 0.4, 0.23
        full_form = combined_action(s_rest + s_clock, delta)
        removed_form = combined_action(s_rest, delta)
        assert (full_form - removed_form).real == pytest.approx(s_clock, abs=1e-15)
        assert full_form.imag == removed_form.imag == delta


class TestTwoPathProbability:
    def test_matching_delays(self):
        assert two_path_probability(0.37, 0.37) == pytest.approx(1.0)

    def test_half_period_mismatch_destroys(self):
        assert two_path_probability(0.5, 0.0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("k", range(-3, 4))
    def test_integer_period_shift_no_decrease(self, k):
        assert two_path_probability(float(k), 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_in_branches(self):
        assert two_path_probability(0.21, 0.83) == pytest.approx(two_path_probability(0.83, 0.21))

    def test_cosine_law_on_grid(self):
        deltas = np.linspace(-3.0, 3.0, 241)
        for d in deltas:
            expected = np.cos(np.pi * d) ** 2  # cos^2(Delta/2), Delta = 2 pi d
            assert abs(two_path_probability(d, 0.0) - expected) < 1e-12

    def test_periodic_and_bounded(self):
        for d in np.linspace(0, 1, 17):
            p = two_path_probability(d, 0.0)
            assert 0.0 <= p <= 1.0
            assert abs(two_path_probability(d + 2.0, 0.0) - p) < 1e-12


class TestTwoAmplitudeSuppression:
    def test_equal_weights_reduce_to_cosine_law(self):
        for d in np.linspace(-1, 1, 21):
            general = two_amplitude_suppression(0.7, 0.7, d, 0.0)
            assert abs(general - two_path_probability(d, 0.0)) < 1e-12

    def test_explicit_sum_oracle(self):
        w_a, w_b, da, db = 0.9, 0.4, 0.31, -0.12
        lhs = two_amplitude_suppression(w_a, w_b, da, db)
        amp = w_a * np.exp(2j * np.pi * da) + w_b * np.exp(2j * np.pi * db)
        assert abs(lhs - abs(amp) ** 2 / (w_a + w_b) ** 2) < 1e-14

    def test_zero_weights_rejected(self):
        with pytest.raises(ValueError):
            two_amplitude_suppression(0.0, 0.0, 0.1, 0.2)


def symmetric_split(steps=4):
    length = steps + 1
    return SplitSpec(
        bundle_a=(Path((0,) * length),),
        bundle_b=(Path((0,) + (1,) * (length - 2) + (0,)),),
        split_index=0,
        rejoin_index=steps,
    )


class TestSplitSpec:
    def test_empty_bundle_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            SplitSpec(bundle_a=(), bundle_b=(Path((0, 0)),), split_index=0, rejoin_index=1)

    def test_common_endpoints_required(self):
        with pytest.raises(ValueError, match="endpoints"):
            SplitSpec(
                bundle_a=(Path((0, 0, 0)),),
                bundle_b=(Path((0, 1, 1)),),
                split_index=0,
                rejoin_index=2,
            )

    def test_window_ordering(self):
        with pytest.raises(ValueError):
            SplitSpec(
                bundle_a=(Path((0, 0, 0)),),
                bundle_b=(Path((0, 1, 0)),),
                split_index=2,
                rejoin_index=1,
            )


class TestDoubleSlitDemo:
    def test_identical_clocks_add_probabilities(self):
        lattice = PathLattice(sites=2, steps=4, dt=1.0)
        action = PathAction(step_matrix=np.ones((2, 2)))
        clock = ClockModel.constant(1.0, period=1.0)
        report = double_slit_demo(lattice, action, clock, symmetric_split())
        assert report.suppression_factor == pytest.approx(1.0)
        assert report.amplitude_weighted_factor == pytest.approx(1.0)
        assert sum(report.clockless_split_probabilities) == pytest.approx(1.0)

    def test_half_period_mismatch_suppresses_fully(self):
        # branch b sits on site 1 with trapezoid weight 3 cells, so a rate
        # excess of 1/6 accumulates exactly half a period over the window
        lattice = PathLattice(sites=2, steps=4, dt=1.0)
        action = PathAction(step_matrix=np.ones((2, 2)))
        clock = ClockModel.per_site([1.0, 1.0 + 1.0 / 6.0], period=1.0)
        report = double_slit_demo(lattice, action, clock, symmetric_split())
        assert abs(report.delta_mean_a - report.delta_mean_b) == pytest.approx(0.5, abs=1e-12)
        assert report.suppression_factor < 1e-12
        # explicit two-amplitude oracle
        w_a, w_b = report.branch_weights
        amp = w_a * np.exp(2j * np.pi * report.delta_mean_a) + w_b * np.exp(
            2j * np.pi * report.delta_mean_b
        )
        oracle = abs(amp) ** 2 / (w_a + w_b) ** 2
        assert abs(report.amplitude_weighted_factor - oracle) < 1e-14
        # the which-path question has no answer at total destructive interference
        assert report.which_path_weak_value is None

    def test_which_path_weak_value_against_projector_weights(self):
        # identity transfer, uniform boundary states: every weight sits on the
        # two constant-during-split paths, so the branch projector weight is
        # w_a / (w_a + w_b) computed by hand
        lattice = PathLattice(sites=3, steps=4, dt=1.0)
        step = np.eye(3)
        step[0, 1] = step[1, 0] = 1.0  # allow hops between the slit sites
        step[2, 0] = step[0, 2] = 1.0
        step[2, 1] = step[1, 2] = 1.0
        action = PathAction(step_matrix=step)
        clock = ClockModel.constant(1.0, period=1.0)
        split = SplitSpec(
            bundle_a=(Path((2, 0, 0, 0, 2)),),
            bundle_b=(Path((2, 1, 1, 1, 2)),),
            split_index=0,
            rejoin_index=4,
        )
        report = double_slit_demo(lattice, action, clock, split)
        assert report.which_path_weak_value == pytest.approx(0.5)
        assert report.which_path_weak_value.imag == pytest.approx(0.0, abs=1e-14)

    def test_clock_mismatch_makes_which_path_complex(self):
        lattice = PathLattice(sites=2, steps=4, dt=1.0)
        action = PathAction(step_matrix=np.ones((2, 2)))
        clock = ClockModel.per_site([1.0, 1.05], period=1.0)
        report = double_slit_demo(lattice, action, clock, symmetric_split())
        assert abs(report.which_path_weak_value.imag) > 1e-3

    def test_clockless_limit_reproduces_raw_ratio_exactly(self):
        rng = np.random.default_rng(5)
        lattice = PathLattice(sites=2, steps=4, dt=1.0)
        weights = rng.uniform(0.2, 1.5, size=(2, 2))
        action = PathAction(step_matrix=weights)
        clock = ClockModel.constant(1.0, period=1.0)
        split = symmetric_split()
        report = double_slit_demo(lattice, action, clock, split)
        w_a = np.prod([weights[0, 0]] * 4)
        w_b = weights[1, 0] * weights[1, 1] * weights[1, 1] * weights[0, 1]
        assert report.branch_weights[0] == w_a
        assert report.branch_weights[1] == pytest.approx(w_b, rel=1e-15)
        assert report.which_path_weak_value == w_a / (w_a + w_b)
        assert report.suppression_factor == 1.0

    def test_complex_weight_action_rejected_for_probability_comparison(self):
        lattice = PathLattice(sites=2, steps=4, dt=1.0)
        action = PathAction(step_matrix=np.ones((2, 2)) * (1.0 + 1.0j))
        clock = ClockModel.constant(1.0, period=1.0)
        with pytest.raises(ValueError, match="real-weight"):
            double_slit_demo(lattice, action, clock, symmetric_split())

    def test_report_serializes(self):
        lattice = PathLattice(sites=2, steps=4, dt=1.0)
        action = PathAction(step_matrix=np.ones((2, 2)))
        clock = ClockModel.constant(1.0, period=1.0)
        payload = double_slit_demo(lattice, action, clock, symmetric_split()).to_json()
        assert set(payload) == {
            "delta_mean_a",
            "delta_mean_b",
            "suppression_factor",
            "amplitude_weighted_factor",
            "clockless_split_probabilities",
            "which_path_weak_value",
            "branch_weights",
        }
