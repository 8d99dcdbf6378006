import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GAMMA, N
from sirthreshold import InvalidRange, ThresholdProblem, quantifiers
from sirthreshold.sweep import SweepGrid, axis, grid_values, r0_profile, sweep, write_profile_csv, write_sweep_csv

# Coarse step keeps the sweep tests fast; quantifier values are compared
# only against runs with the same settings.
FAST = {"dt": 0.01}


def grid(r0=(1.8, 3.0, 3), m=(2.0, 12.0, 3), **kw):
    base = {"n": N, "gamma": GAMMA, "s0": 99.0, "i0": 1.0}
    base.update(kw)
    return SweepGrid(r0, m, **base)


class TestAxis:
    def test_endpoints(self):
        values = axis(1.8, 3.0, 25)
        assert values[0] == 1.8 and values[-1] == 3.0
        assert len(values) == 25

    def test_single_point(self):
        assert axis(2.0, 2.0, 1) == [2.0]
        with pytest.raises(InvalidRange):
            axis(2.0, 3.0, 1)

    def test_empty_range(self):
        with pytest.raises(InvalidRange):
            axis(3.0, 2.0, 4)

    @given(st.floats(0.1, 10.0), st.floats(1e-3, 10.0), st.integers(2, 50))
    def test_refinement_keeps_samples(self, lo, width, count):
        coarse = axis(lo, lo + width, count)
        fine = axis(lo, lo + width, 2 * count - 1)
        assert fine[::2] == coarse


class TestGrid:
    def test_rejects_threshold_at_initial_infected(self):
        with pytest.raises(InvalidRange):
            grid(m=(1.0, 12.0, 3))

    def test_rejects_threshold_above_capacity(self):
        with pytest.raises(InvalidRange):
            grid(m=(2.0, 100.0, 3))

    def test_rejects_bad_base(self):
        with pytest.raises(ValueError):
            grid(n=-1.0)

    def test_shape(self):
        g = grid((1.8, 3.0, 4), (2.0, 12.0, 5))
        assert g.shape == (4, 5)


class TestSweep:
    def test_all_below_threshold(self):
        cells = sweep(grid((1.1, 1.3, 2), (50.0, 60.0, 2)))
        assert len(cells) == 4
        for c in cells:
            assert (c.q3, c.q4, c.q5) == (0.0, 0.0, 0.0)
            assert c.q1 < 0 and c.q2 < 0

    def test_row_major(self):
        g = grid()
        cells = sweep(g, **FAST)
        assert [(c.r0, c.m) for c in cells] == [(r, m) for r in g.r0_values for m in g.m_values]

    def test_single_cell_matches_quantifiers(self):
        cells = sweep(grid((2.5, 2.5, 1), (10.0, 10.0, 1)))
        qs = quantifiers(ThresholdProblem.from_values(N, GAMMA, 2.5, 99.0, 1.0, 10.0))
        assert cells[0].values == (qs.q1, qs.q2, qs.q3, qs.q4, qs.q5)

    def test_cells_independent(self):
        g = grid()
        cells = sweep(g, **FAST)
        c = cells[4]
        alone = sweep(grid((c.r0, c.r0, 1), (c.m, c.m, 1)), **FAST)[0]
        assert alone.values == c.values

    def test_workers_bitwise(self):
        g = grid((1.8, 3.0, 4), (2.0, 12.0, 3))
        serial = sweep(g, workers=1, **FAST)
        parallel = sweep(g, workers=3, **FAST)
        a, b = io.StringIO(), io.StringIO()
        write_sweep_csv(serial, a)
        write_sweep_csv(parallel, b)
        assert a.getvalue() == b.getvalue()

    def test_refinement_stability(self):
        coarse = sweep(grid((1.8, 3.0, 3), (2.0, 12.0, 3)), **FAST)
        fine = sweep(grid((1.8, 3.0, 5), (2.0, 12.0, 5)), **FAST)
        fine_grid = np.array([c.values for c in fine]).reshape(5, 5, 5)[::2, ::2]
        assert np.array_equal(fine_grid.reshape(9, 5), np.array([c.values for c in coarse]))

    def test_regime_markers(self):
        cells = sweep(grid((0.5, 2.0, 2), (5.0, 10.0, 2)), **FAST)
        low = [c for c in cells if c.r0 == 0.5]
        assert all(c.note == "RegimeError" for c in low)
        assert all(math.isnan(v) for c in low for v in c.values)
        assert all(not c.note for c in cells if c.r0 == 2.0)

    def test_monotone(self):
        g = grid((1.8, 3.0, 5), (1.5, 12.0, 6))
        cells = sweep(g, **FAST)
        for name in ("q1", "q2", "q3", "q4", "q5"):
            values = grid_values(cells, g, name)
            assert np.all(np.diff(values, axis=0) >= 0)
            assert np.all(np.diff(values, axis=1) <= 0)

    def test_csv(self):
        g = grid((2.0, 2.5, 2), (5.0, 10.0, 2))
        cells = sweep(g, **FAST) + sweep(grid((0.5, 0.5, 1), (5.0, 5.0, 1)), **FAST)
        out = io.StringIO()
        write_sweep_csv(cells, out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "r0,m,q1,q2,q3,q4,q5"
        assert len(lines) == 6
        assert lines[-1].endswith("nan,nan,nan,nan,nan")
        back = np.genfromtxt(io.StringIO(out.getvalue()), delimiter=",", skip_header=1)
        assert np.array_equal(back[:4], np.array([[c.r0, c.m, *c.values] for c in cells[:4]]))


@pytest.fixture(scope="module")
def table():
    template = ThresholdProblem.from_values(N, GAMMA, 2.0, 99.0, 1.0, 10.0)
    return r0_profile(template, None, 10.0, 41, **FAST)


class TestProfile:
    def test_starts_at_critical(self, table):
        assert table.r0[0] == table.r0_critical
        assert table.column("q", 1)[0] == 0.0

    def test_q1_derivative_is_one(self, table):
        assert np.allclose(table.column("dq", 1), 1.0, rtol=0, atol=1e-12)

    def test_q1_normalised_is_linear(self, table):
        expected = (table.r0 - table.r0[0]) / (table.r0[-1] - table.r0[0])
        assert np.allclose(table.column("nq", 1), expected, atol=1e-12)

    def test_normalised_ends_at_one(self, table):
        assert np.all(table.nq[-1] == 1.0)

    def test_log_derivative_guard(self, table):
        assert np.all(np.isnan(table.lq[0]))
        assert np.all(np.isfinite(table.lq[1:]))

    def test_q2_slope_matches_closed_form(self, table):
        # d/dR0 of the peak formula: (N/R0^2) ln(R0 S0 / N)
        exact = N / table.r0 ** 2 * np.log(table.r0 * 99.0 / N)
        assert np.allclose(table.column("dq", 2)[1:-1], exact[1:-1], rtol=2e-2)

    def test_q2_flattening(self, table):
        slope = table.column("dq", 2)
        assert slope[-1] < slope[np.searchsorted(table.r0, 2.0)]

    @pytest.mark.xfail(strict=True, reason="the peak flattens only to about 13% of its slope at R0=2, not below 5%")
    def test_q2_slope_ratio_below_five_percent(self, table):
        slope = table.column("dq", 2)
        at_two = np.interp(2.0, table.r0, slope)
        assert slope[-1] < 0.05 * at_two

    def test_q2_slope_ratio_value(self):
        exact = lambda r: N / r ** 2 * math.log(r * 99.0 / N)  # noqa: E731
        assert exact(10.0) / exact(2.0) == pytest.approx(0.13424, abs=1e-4)

    def test_rejects_below_critical(self):
        template = ThresholdProblem.from_values(N, GAMMA, 2.0, 99.0, 1.0, 10.0)
        with pytest.raises(InvalidRange):
            r0_profile(template, 1.5, 10.0, 5)

    def test_rejects_too_few_points(self):
        template = ThresholdProblem.from_values(N, GAMMA, 2.0, 99.0, 1.0, 10.0)
        with pytest.raises(InvalidRange):
            r0_profile(template, None, 10.0, 2)

    def test_csv_header(self, table):
        out = io.StringIO()
        write_profile_csv(table, out)
        header = out.getvalue().splitlines()[0].split(",")
        assert header[:6] == ["r0", "q1", "q2", "q3", "q4", "q5"]
        assert header[-1] == "lq5" and len(header) == 21
