"""Physics validation of the time-domain field solver on canonical
vacuum problems: wave speed, absorbing boundaries, stability, passivity."""

import numpy as np
import pytest

from cpwbench.fdtd.mesh import empty_domain
from cpwbench.fdtd.solver import InstabilityError, Simulation, gaussian_sine_pulse
from cpwbench.fdtd.sparams import dft
from cpwbench.units import C0

CELL = 0.5e-3


def _point_ex_source(i, j, k, waveform):
    def inject(sim, t):
        sim.ex[i, j, k] += waveform(t)

    return inject


class TestPhaseVelocity:
    def test_within_one_percent_at_twenty_cells_per_wavelength(self):
        # wavelength of 20 cells -> f0 = c / 10 mm; broadside propagation
        # from a transverse dipole, phase slope between two on-axis probes
        f0 = C0 / (20 * CELL)
        domain, materials = empty_domain((10e-3, 10e-3, 48e-3), CELL, pml_cells=8)
        sim = Simulation(domain, materials)
        waveform = gaussian_sine_pulse(f0, 5e-11)
        i0 = domain.x.index_of(5e-3)
        j0 = domain.y.index_of(5e-3)
        k_src = domain.z.index_of(4e-3)
        z1, z2 = 34e-3, 38e-3  # 3 and 3.4 wavelengths from the source
        k1, k2 = domain.z.index_of(z1), domain.z.index_of(z2)
        rec1, rec2, times = [], [], []

        def probe(sim_, t):
            times.append(t)
            rec1.append(float(sim_.ex[i0, j0, k1]))
            rec2.append(float(sim_.ex[i0, j0, k2]))

        sim.add_source(_point_ex_source(i0, j0, k_src, waveform))
        sim.add_e_probe(probe)
        sim.run(700)

        t = np.asarray(times)
        p1 = dft(t, np.asarray(rec1), np.array([f0]))[0]
        p2 = dft(t, np.asarray(rec2), np.array([f0]))[0]
        dphi = -np.angle(p2 / p1)  # phase lag accumulated over the gap
        dz = domain.z.nodes[k2] - domain.z.nodes[k1]
        assert 0 < dphi < np.pi  # separation below half a wavelength
        v = 2 * np.pi * f0 * dz / dphi
        assert abs(v - C0) / C0 < 0.01


class TestAbsorbingBoundary:
    def test_reflection_below_minus_forty_db(self):
        # identical source/probe pair in a small box and in one whose
        # walls are 10 mm farther out; the difference isolates wall
        # reflections of the small box (plus the bigger box's own,
        # which only overestimates the result)
        waveform = gaussian_sine_pulse(C0 / (20 * CELL), 1.5e-11)
        records = []
        for size in (10e-3, 30e-3):
            domain, materials = empty_domain((size, size, size), CELL, pml_cells=10)
            sim = Simulation(domain, materials)
            c = size / 2
            i0, j0, k0 = (domain.x.index_of(c), domain.y.index_of(c), domain.z.index_of(c))
            kp = domain.z.index_of(c + 2.5e-3)
            rec = []
            sim.add_source(_point_ex_source(i0, j0, k0, waveform))
            sim.add_e_probe(lambda s, t, rec=rec, i=i0, j=j0, k=kp: rec.append(float(s.ex[i, j, k])))
            sim.run(600)
            records.append(np.asarray(rec))

        small, big = records
        incident = np.max(np.abs(big))
        reflected = np.max(np.abs(small - big))
        assert reflected / incident < 10 ** (-40 / 20)


class TestStability:
    def test_time_step_above_limit_is_rejected(self):
        domain, materials = empty_domain((8e-3, 8e-3, 8e-3), CELL, pml_cells=8)
        with pytest.raises(ValueError, match="stability limit"):
            Simulation(domain, materials, dt=1.05 * domain.cfl_limit())

    def test_violating_the_limit_blows_up(self):
        domain, materials = empty_domain((8e-3, 8e-3, 8e-3), CELL, pml_cells=8)
        sim = Simulation(domain, materials, dt=1.05 * domain.cfl_limit(), enforce_cfl=False)
        i = domain.x.index_of(4e-3)
        sim.ex[i, i, i] = 1.0
        with pytest.raises(InstabilityError):
            sim.run(2000)

    def test_at_the_limit_stays_finite(self):
        domain, materials = empty_domain((8e-3, 8e-3, 8e-3), CELL, pml_cells=8)
        sim = Simulation(domain, materials)  # dt from the domain, inside the limit
        i = domain.x.index_of(4e-3)
        sim.ex[i, i, i] = 1.0
        sim.run(800)
        assert np.isfinite(sim.ex).all()


class TestPassivity:
    def test_energy_decays_monotonically_after_source_stops(self):
        domain, materials = empty_domain((12e-3, 12e-3, 12e-3), CELL, pml_cells=10)
        sim = Simulation(domain, materials)
        waveform = gaussian_sine_pulse(C0 / (20 * CELL), 2e-11)
        i0 = domain.x.index_of(6e-3)
        sim.add_source(_point_ex_source(i0, i0, i0, waveform))
        t_end = waveform.delay_s + 4.5 * waveform.tau_s
        sim.run(int(np.ceil(t_end / sim.dt)) + 1)
        energies = []
        for _ in range(12):
            sim.run(25)
            energies.append(sim.field_energy())
        diffs = np.diff(energies)
        assert np.all(diffs <= 1e-9 * energies[0])
        # and the box largely empties out (a soft E source leaves a
        # small static residue that only the absorber edge can drain)
        assert energies[-1] < 0.05 * energies[0]
