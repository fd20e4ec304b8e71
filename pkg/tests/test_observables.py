"""Qubit frequency, imbalance, susceptibility, sweeps, and curvatures."""

import io
import math
import warnings

import numpy as np
import pytest

from conftest import (
    two_level_gap,
    two_level_gap_curvature,
    two_level_imbalance,
    two_level_susceptibility,
)
from finitejj.errors import RegimeWarning, WindowConvergenceError
from finitejj.eigensolve import dense_all
from finitejj.hamiltonian import build
from finitejj.model import CircuitParams
from finitejj.observables import (
    SweepTable,
    WindowPolicy,
    band_sweep,
    charge_susceptibility,
    dispersion_curvature,
    expected_imbalance,
    initial_half_width,
    qubit_frequency,
    susceptibility_curvature,
)

FULL = WindowPolicy.full()


def params(pairs, ejec, ng=0.0, ec=1.0):
    return CircuitParams.from_pairs(pairs, e_j=ejec * ec, e_c=ec, n_g=ng)


class TestWindowPolicy:
    def test_validation(self):
        with pytest.raises(ValueError):
            WindowPolicy(mode="bogus")
        with pytest.raises(ValueError):
            WindowPolicy(mode="fixed")
        with pytest.raises(ValueError):
            WindowPolicy(mode="adaptive", w_initial=2)
        with pytest.raises(ValueError):
            WindowPolicy(mode="adaptive", rtol=0.0)

    def test_initial_half_width_rule(self):
        assert initial_half_width(params(10, 50.0)) == 16
        # E_J/(8 E_C) = 625 -> sigma = 5 -> ceil(40)
        assert initial_half_width(params(1000, 5000.0)) == 40


class TestQubitFrequency:
    def test_minimal_junction_gap(self):
        assert qubit_frequency(params(1, 1.0), FULL) == pytest.approx(2.0, rel=1e-12)

    def test_adaptive_matches_dense_full_window(self):
        p = params(400, 50.0)
        dense = dense_all(build(p)).values
        reference = dense[1] - dense[0]
        adaptive = qubit_frequency(p, WindowPolicy.adaptive())
        assert adaptive == pytest.approx(reference, rel=1e-9)

    def test_window_cap_raises(self):
        p = params(500_000_000, 50.0)
        with pytest.raises(WindowConvergenceError):
            qubit_frequency(p, WindowPolicy(mode="adaptive", w_initial=16, w_max=16))


class TestExpectedImbalance:
    def test_zero_at_symmetric_point(self):
        for pairs, ejec in [(10, 0.2), (11, 1.0), (60, 30.0)]:
            assert abs(expected_imbalance(params(pairs, ejec), FULL)) < 1e-12

    def test_staircase_saturation(self):
        value = expected_imbalance(params(10, 0.2, ng=20.0), FULL)
        assert value == pytest.approx(5.0, abs=1e-3)
        value = expected_imbalance(params(10, 0.2, ng=-20.0), FULL)
        assert value == pytest.approx(-5.0, abs=1e-3)

    def test_two_level_closed_form(self):
        for ng in (0.1, 0.5, 1.0, 3.0):
            mine = expected_imbalance(params(1, 1.0, ng=ng), FULL)
            assert mine == pytest.approx(two_level_imbalance(1.0, 1.0, ng), rel=1e-10)

    def test_odd_in_offset_charge(self):
        for pairs, ejec, ng in [(10, 0.2, 0.3), (10, 0.2, 0.5), (60, 20.0, 2.0)]:
            plus = expected_imbalance(params(pairs, ejec, ng=ng), FULL)
            minus = expected_imbalance(params(pairs, ejec, ng=-ng), FULL)
            assert plus + minus == pytest.approx(0.0, abs=1e-10)

    def test_hard_bound(self):
        for pairs, ejec, ng in [(10, 0.2, 4.0), (10, 0.2, 15.0), (9, 2.0, 7.3), (4, 30.0, 1.9)]:
            value = expected_imbalance(params(pairs, ejec, ng=ng), FULL)
            assert abs(value) <= pairs / 2.0 + 1e-9 * max(1.0, pairs / 2.0)

    def test_windowed_agrees_with_full(self):
        p = params(400, 50.0, ng=0.3)
        full = expected_imbalance(p, FULL)
        windowed = expected_imbalance(p, WindowPolicy.adaptive())
        assert windowed == pytest.approx(full, rel=1e-9, abs=1e-9)


class TestChargeSusceptibility:
    def test_two_level_value_at_zero(self):
        result = charge_susceptibility(params(1, 1.0), FULL)
        assert result.value == pytest.approx(0.5, rel=1e-7)
        assert result.value == pytest.approx(two_level_susceptibility(1.0, 1.0, 0.0), rel=1e-7)

    def test_peak_matches_degenerate_formula(self):
        # peak at n_g = 1/2 for 2N = 10, E_J/E_C = 0.2
        result = charge_susceptibility(params(10, 0.2, ng=0.5), FULL)
        peak = (10.0 * 1.0) / (0.2 * math.sqrt(11.0**2 - 1.0))
        assert result.value == pytest.approx(peak, rel=0.02)

    def test_vanishes_deep_in_saturation(self):
        result = charge_susceptibility(params(10, 0.2, ng=25.0), FULL)
        assert abs(result.value) < 1e-6

    def test_even_in_offset_charge(self):
        for pairs, ejec, ng in [(10, 0.2, 0.5), (60, 20.0, 1.0)]:
            plus = charge_susceptibility(params(pairs, ejec, ng=ng), FULL).value
            minus = charge_susceptibility(params(pairs, ejec, ng=-ng), FULL).value
            assert plus == pytest.approx(minus, abs=1e-8 * max(1.0, abs(plus)))

    def test_richardson_refines(self):
        result = charge_susceptibility(params(10, 0.2, ng=0.5), FULL)
        peak_width = 0.2 * math.sqrt(120.0) / (2.0 * 10.0)  # gap / (2 E_C), by hand
        assert result.error_estimate < 0.05 * abs(result.value)
        assert result.step == pytest.approx(1e-4)
        assert peak_width > result.step  # step resolves the feature

    def test_hellmann_feynman_cross_check_fields(self):
        result = charge_susceptibility(params(10, 5.0, ng=0.37), FULL)
        assert result.e0_slope_fd == pytest.approx(result.e0_slope_hf, abs=1e-7)

    def test_step_validation(self):
        with pytest.raises(ValueError):
            charge_susceptibility(params(10, 1.0), FULL, step=-0.1)


class TestHellmannFeynman:
    @pytest.mark.parametrize(
        "pairs,ejec,ng",
        [(10, 0.2, 0.3), (10, 5.0, 0.37), (60, 50.0, 1.7), (11, 1.0, -0.83)],
    )
    def test_slope_identity(self, pairs, ejec, ng):
        # dE_0/dn_g against -2 E_C (<n> - n_g), residual under 1e-7 E_C
        p = params(pairs, ejec, ng=ng)
        h = 1e-5 * max(1.0, abs(ng))

        def e0(x):
            return dense_all(build(p.with_ng(x))).values[0]

        slope_fd = (e0(ng + h) - e0(ng - h)) / (2.0 * h)
        slope_hf = -2.0 * 1.0 * (expected_imbalance(p, FULL) - ng)
        assert abs(slope_fd - slope_hf) < 1e-7


class TestBandSweep:
    def test_row_and_column_contract(self):
        table = band_sweep(params(10, 0.2), np.linspace(-2, 2, 41), levels=3, policy=FULL)
        assert table.grid.size == 41
        assert set(table.columns) == {"E0", "E1", "E2", "converged"}
        assert np.all(table.columns["converged"] == 1.0)
        assert table.meta["pairs_total"] == 10

    def test_minima_shift_with_parity(self):
        grid = np.linspace(-2.0, 2.0, 81)

        def minima(pairs):
            table = band_sweep(params(pairs, 0.2), grid, levels=1, policy=FULL)
            e0 = table.columns["E0"]
            inner = (e0[1:-1] < e0[:-2]) & (e0[1:-1] < e0[2:])
            return grid[1:-1][inner]

        assert minima(10) == pytest.approx([-1.0, 0.0, 1.0], abs=1e-9)
        assert minima(11) == pytest.approx([-1.5, -0.5, 0.5, 1.5], abs=1e-9)

    def test_bands_even_in_offset_charge(self):
        grid = np.linspace(-2.0, 2.0, 33)
        table = band_sweep(params(10, 0.2), grid, levels=3, policy=FULL)
        for name in ("E0", "E1", "E2"):
            col = table.columns[name]
            assert np.max(np.abs(col - col[::-1])) < 1e-10 * max(1.0, np.max(np.abs(col)))

    def test_large_offset_tail_bounded(self):
        # Deep in saturation the charge pins at n = N, so the bands follow
        # E_C (n_g - N)^2 + 2 E_C (n_g - N) k + k^2: equally spaced levels
        # with the quadratic remainder measured from the band edge.  The
        # remainder settles to k^2 and stops drifting as n_g grows.
        offsets = np.array([30.0, 60.0, 120.0])
        table = band_sweep(params(10, 1.0), offsets, levels=3, policy=FULL)
        edge = offsets - 5.0
        for k in range(3):
            resid = table.columns[f"E{k}"] - edge**2 - 2.0 * edge * k
            assert np.max(np.abs(resid - k * k)) < 0.05 * max(1.0, k * k)
            assert np.max(np.abs(np.diff(resid))) < 0.01

    def test_subtract_ground_option(self):
        grid = np.linspace(-1.0, 1.0, 5)
        table = band_sweep(params(10, 0.2), grid, levels=2, policy=FULL, subtract_ground=True)
        assert np.all(table.columns["E0"] == 0.0)

    def test_failed_points_flagged_not_dropped(self):
        policy = WindowPolicy(mode="adaptive", w_initial=16, w_max=16)
        table = band_sweep(params(500_000_000, 50.0), np.array([0.0, 1.0]), levels=2, policy=policy)
        assert table.grid.size == 2
        assert np.all(table.columns["converged"] == 0.0)
        assert np.all(np.isnan(table.columns["E0"]))

    def test_optional_columns(self):
        grid = np.linspace(-1.0, 1.0, 5)
        table = band_sweep(
            params(10, 0.2),
            grid,
            levels=1,
            policy=FULL,
            include_imbalance=True,
            include_susceptibility=True,
        )
        assert "n_expect" in table.columns
        assert "chi" in table.columns
        center = table.columns["n_expect"][2]
        assert abs(center) < 1e-10

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            band_sweep(params(10, 0.2), [], levels=1, policy=FULL)
        with pytest.raises(ValueError):
            band_sweep(params(10, 0.2), [0.0, 0.0], levels=1, policy=FULL)
        with pytest.raises(ValueError):
            band_sweep(params(10, 0.2), [0.0, 1.0], levels=0, policy=FULL)


class TestSweepTableSerialization:
    def make_table(self):
        return band_sweep(
            params(10, 0.2),
            np.linspace(-1.0, 1.0, 7),
            levels=2,
            policy=FULL,
            include_imbalance=True,
        )

    def test_csv_round_trip_exact(self):
        table = self.make_table()
        buffer = io.StringIO()
        table.to_csv(buffer)
        back = SweepTable.read_csv(io.StringIO(buffer.getvalue()))
        assert np.array_equal(back.grid, table.grid)
        for name, col in table.columns.items():
            assert np.array_equal(back.columns[name], col), name
        assert back.meta == table.meta

    def test_json_round_trip_exact(self):
        table = self.make_table()
        buffer = io.StringIO()
        table.to_json(buffer)
        buffer.seek(0)
        back = SweepTable.read_json(buffer)
        assert np.array_equal(back.grid, table.grid)
        for name, col in table.columns.items():
            assert np.array_equal(back.columns[name], col), name

    def test_csv_shape(self):
        table = self.make_table()
        buffer = io.StringIO()
        table.to_csv(buffer)
        lines = buffer.getvalue().strip().split("\r\n")
        assert lines[0].startswith("# meta ")
        assert lines[1] == "n_g,E0,E1,n_expect,converged"
        assert len(lines) == 2 + 7


class TestDispersionCurvature:
    def test_minimal_junction_sanity(self):
        # exact two-level gap curvature is 2 E_C^2 / E_J
        with pytest.warns(RegimeWarning):
            result = dispersion_curvature(params(1, 1.0), FULL, step=1.0 / 64.0)
        assert result.value == pytest.approx(two_level_gap_curvature(1.0, 1.0, 0.0), rel=1e-6)

    def test_transmon_ratio_approaches_one(self):
        deviations = []
        for ejec in (10.0, 20.0, 50.0):
            result = dispersion_curvature(params(400, ejec), FULL)
            deviations.append(abs(result.ratio - 1.0))
        assert deviations[0] > deviations[1] > deviations[2]
        assert deviations[-1] < 0.01

    def test_parity_flips_deviation_sign(self):
        even = dispersion_curvature(params(60, 10.0), FULL)
        odd = dispersion_curvature(params(61, 10.0), FULL)
        assert (even.ratio - 1.0) * (odd.ratio - 1.0) < 0.0

    def test_reference_formula(self):
        result = dispersion_curvature(params(60, 40.0), FULL)
        assert result.reference == pytest.approx(-math.sqrt(2.0 * 40.0) / (2.0 * 30.0**2))

    def test_charge_regime_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            dispersion_curvature(params(10, 0.2), FULL)
        assert any(isinstance(w.message, RegimeWarning) for w in caught)

    def test_cpb_curvature_negative_for_even_total(self):
        # Sharp charge-regime features also trip the step check; only the
        # stencil-stable signs are asserted here.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            even = dispersion_curvature(params(10, 0.2), FULL)
            odd = dispersion_curvature(params(11, 0.2), FULL)
        assert even.value < 0.0
        assert odd.value > 0.0


class TestSusceptibilityCurvature:
    def test_transmon_ratio_approaches_one(self):
        low = susceptibility_curvature(params(400, 50.0), FULL)
        high = susceptibility_curvature(params(400, 100.0), FULL)
        assert abs(high.ratio - 1.0) < abs(low.ratio - 1.0)
        assert abs(high.ratio - 1.0) < 0.10

    def test_parity_flips_deviation_sign(self):
        even = susceptibility_curvature(params(60, 10.0), FULL)
        odd = susceptibility_curvature(params(61, 10.0), FULL)
        assert (even.ratio - 1.0) * (odd.ratio - 1.0) < 0.0

    def test_reference_formula(self):
        result = susceptibility_curvature(params(60, 40.0), FULL)
        assert result.reference == pytest.approx(-3.0 * 40.0 / (2.0 * 30.0**4))

    def test_step_instability_flagged_for_underresolved_peak(self):
        # 2N odd puts a susceptibility peak at n_g = 0 whose width is far
        # below the stencil step, so halving the step must disagree loudly.
        from finitejj.errors import StepInstabilityWarning

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = susceptibility_curvature(params(11, 0.05), FULL)
        assert result.unstable
        assert any(isinstance(w.message, StepInstabilityWarning) for w in caught)

    def test_smooth_case_not_flagged(self):
        result = susceptibility_curvature(params(400, 50.0), FULL)
        assert not result.unstable
        assert result.refined == pytest.approx(result.value, rel=0.05)

    def test_cpb_sign_between_peaks(self):
        # Between the half-integer peaks the susceptibility has a local
        # minimum at n_g = 0 for 2N even (curvature positive); for 2N odd a
        # peak sits at n_g = 0 instead (curvature negative).  The dense
        # oracle fixes these signs; see the dispersion test for the parity
        # pattern of the band curvature itself.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            even = susceptibility_curvature(params(10, 0.2), FULL)
            odd = susceptibility_curvature(params(11, 0.2), FULL)
        assert even.value > 0.0
        assert odd.value < 0.0
