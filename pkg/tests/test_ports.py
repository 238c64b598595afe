"""CPW port behaviour: band coverage gate, probe placement, and the
shorted-line reflection benchmark."""

import numpy as np
import pytest

from cpwbench.cpw import Substrate
from cpwbench.fdtd.mesh import rasterize
from cpwbench.fdtd.ports import BandCoverageError, attach_cpw_port
from cpwbench.fdtd.solver import Simulation, gaussian_sine_pulse
from cpwbench.fdtd.sparams import extract_s11
from cpwbench.layout import AntennaLayout
from cpwbench.pipeline import band_pulse

# compact layout so the shorted-line benchmark runs quickly
SMALL = AntennaLayout(
    pattern_width=6e-3,
    pattern_height=4e-3,
    slot_width=2e-3,
    slot_height=1e-3,
    slot_offset_x=1e-3,
    slot_offset_y=1e-3,
    ground_width=4e-3,
    ground_height=3e-3,
    feed_strip_width=2.8e-3,
    feed_gap=0.2e-3,
    feed_length=4e-3,
    board_width=12e-3,
    board_height=14e-3,
    substrate=Substrate(relative_permittivity=3.2, thickness=0.22e-3, loss_tangent=0.0),
)


class TestBandCoverage:
    def test_narrowband_source_rejected(self):
        domain, materials = rasterize(SMALL, 10.0, line_only=True)
        sim = Simulation(domain, materials)
        narrow = gaussian_sine_pulse(4.5e9, 2e-9)  # far too narrow for 1-8 GHz
        with pytest.raises(BandCoverageError):
            attach_cpw_port(sim, SMALL, narrow, band=(1e9, 8e9))

    def test_band_pulse_accepted(self):
        domain, materials = rasterize(SMALL, 10.0, line_only=True)
        sim = Simulation(domain, materials)
        attach_cpw_port(sim, SMALL, band_pulse(1e9, 8e9), band=(1e9, 8e9))

    def test_spectrumless_waveform_rejected(self):
        domain, materials = rasterize(SMALL, 10.0, line_only=True)
        sim = Simulation(domain, materials)
        with pytest.raises(BandCoverageError):
            attach_cpw_port(sim, SMALL, lambda t: 0.0, band=(1e9, 8e9))


class TestProbePlacement:
    def test_planes_ordered_with_clearance(self):
        domain, materials = rasterize(SMALL, 10.0, line_only=True)
        sim = Simulation(domain, materials)
        port = attach_cpw_port(sim, SMALL, band_pulse(1e9, 8e9))
        assert domain.y.n_pml_lo < port.j_excite < port.j_reference
        assert domain.y.nodes[port.j_reference] < 0.0  # before the board edge


def _run_line(layout, short_at=None, steps=4000):
    domain, materials = rasterize(layout, 10.0, line_only=True)
    if short_at is not None:
        materials.extra_pec_walls.append(("y", domain.y.index_of(short_at)))
    sim = Simulation(domain, materials)
    waveform = band_pulse(1e9, 8e9)
    port = attach_cpw_port(sim, layout, waveform, band=(1e9, 8e9))
    sim.run(steps)
    return port, waveform


@pytest.mark.slow
class TestShortedLine:
    def test_total_reflection(self):
        inc_port, waveform = _run_line(SMALL)
        tot_port, _ = _run_line(SMALL, short_at=4e-3)
        freqs = np.linspace(1e9, 8e9, 141)
        sweep = extract_s11(
            inc_port.voltage_series(), tot_port.voltage_series(), freqs,
            source_center_hz=waveform.center_hz, source_tau_s=waveform.tau_s,
        )
        mag = np.abs(sweep.s11)
        assert np.all(np.abs(mag - 1.0) < 0.05)
