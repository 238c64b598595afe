"""Orchestration: source design, sweep bookkeeping, and (slow) the
end-to-end antenna characterization on a compact layout."""

import numpy as np
import pytest

from cpwbench.fdtd.sparams import Resonance, SParamSweep
from cpwbench.layout import LayoutError, reference_layout
from cpwbench.pipeline import (
    AntennaResult,
    SolverSettings,
    SweepReport,
    SweepRow,
    band_pulse,
    simulate_antenna,
    sweep_parameter,
)
from tests.test_ports import SMALL


class TestBandPulse:
    def test_spectrum_covers_band(self):
        for fmin, fmax in ((1e9, 8e9), (2e9, 6e9)):
            wf = band_pulse(fmin, fmax)
            f = np.linspace(fmin, fmax, 201)
            rel = wf.spectrum(f) / wf.spectrum(np.array([wf.center_hz]))[0]
            assert rel.min() > 10 ** (-20 / 20)

    def test_centered_on_band(self):
        wf = band_pulse(2e9, 6e9)
        assert wf.center_hz == pytest.approx(4e9)


class TestSolverSettings:
    def test_frequency_grid(self):
        grid = SolverSettings(fmin=1e9, fmax=8e9, f_points=8).frequency_grid()
        assert grid[0] == 1e9 and grid[-1] == 8e9 and len(grid) == 8


class TestAcceptedPower:
    def test_interpolates_on_the_grid(self):
        freqs = np.array([1e9, 2e9, 3e9])
        sweep = SParamSweep(freqs, np.array([0.0, 0.5, 1.0], dtype=complex))
        result = AntennaResult(
            layout=reference_layout(),
            settings=SolverSettings(),
            sweep=sweep,
            resonances=(),
            incident_power=np.array([1.0, 1.0, 1.0]),
        )
        assert result.accepted_power(1e9) == pytest.approx(1.0)
        assert result.accepted_power(2e9) == pytest.approx(0.75)
        assert result.accepted_power(3e9) == pytest.approx(0.0)


class TestSweepBookkeeping:
    def _row(self, value, f_low, f_high=None):
        res = [Resonance(f_low, -15.0, 5e8)]
        if f_high is not None:
            res.append(Resonance(f_high, -12.0, 1e9))
        return SweepRow(value=value, resonances=tuple(res))

    def test_band_extraction(self):
        row = self._row(1.0, 2.4e9, 5.8e9)
        assert row.f_low == 2.4e9 and row.f_high == 5.8e9
        assert self._row(1.0, 2.4e9).f_high is None
        assert SweepRow(value=1.0, resonances=()).f_low is None

    def test_trends(self):
        def report(f_lows):
            rows = tuple(self._row(float(i), f) for i, f in enumerate(f_lows))
            return SweepReport(parameter="substrate_permittivity", rows=rows, results=())

        assert report([3e9, 2.7e9, 2.4e9]).trend_f_low == "decreasing"
        assert report([2.4e9, 2.7e9, 3e9]).trend_f_low == "increasing"
        assert report([2.4e9, 3e9, 2.7e9]).trend_f_low == "mixed"
        assert report([2.4e9]).trend_f_low == "undetermined"

    def test_requires_three_values(self):
        with pytest.raises(ValueError, match="3 values"):
            sweep_parameter(reference_layout(), "pattern_width", [1e-3, 2e-3])

    def test_invalid_point_fails_before_any_solve(self):
        # one value out of range aborts immediately (no solver time)
        with pytest.raises(LayoutError):
            sweep_parameter(
                reference_layout(), "slot_width", [10e-3, 12e-3, 1.0]
            )

    def test_unknown_parameter(self):
        with pytest.raises(KeyError):
            sweep_parameter(reference_layout(), "wingspan", [1e-3, 2e-3, 3e-3])


@pytest.mark.slow
class TestEndToEnd:
    def test_compact_antenna_characterization(self):
        settings = SolverSettings(f_points=101, monitor_frequencies=(5.8e9,))
        result = simulate_antenna(SMALL, settings)
        mag = np.abs(result.sweep.s11)
        # passive structure: no gain anywhere on the sweep
        assert np.all(mag < 1.05)
        assert np.all(result.incident_power > 0)
        assert result.steps_incident > 0 and result.steps_total > 0
        # monitors produced aligned artifacts
        assert set(result.current_maps) == {5.8e9}
        assert set(result.patterns) == {5.8e9}
        stats = result.region_stats[5.8e9]
        assert stats.pattern_mean > 0
        pattern = result.patterns[5.8e9]
        assert np.isfinite(pattern.gain_dbi).all()
        assert pattern.radiated_power <= pattern.accepted_power * 1.5
