"""CPW port: odd-mode gap excitation plus voltage/current probes.

The excitation is a soft Ex source imposed across both gaps of the
feed line at one y-plane, with opposite polarity in the two gaps so
the strip is driven against both grounds (the CPW mode).  Voltage is
the gap line integral of Ex at the reference plane averaged over the
two gaps; current is the Ampere loop of H around the center strip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from cpwbench.fdtd.mesh import FEED_EXTENSION, MaterialGrid, SimulationDomain
from cpwbench.layout import AntennaLayout

__all__ = ["BandCoverageError", "CpwPort", "attach_cpw_port"]

MIN_PROBE_CLEARANCE_CELLS = 3


class BandCoverageError(ValueError):
    """Source spectrum does not cover the requested analysis band."""


def _gap_cells(domain: SimulationDomain, layout: AntennaLayout):
    """Ex cell index ranges spanning the left and right feed gaps."""
    xc = domain.x.centers
    half_w = layout.feed_strip_width / 2
    outer = half_w + layout.feed_gap
    left = np.nonzero((xc > -outer) & (xc < -half_w))[0]
    right = np.nonzero((xc > half_w) & (xc < outer))[0]
    if len(left) < 2 or len(right) < 2:
        raise ValueError("feed gap resolved with fewer than 2 cells")
    return left, right


@dataclass
class CpwPort:
    """Excitation/probing surfaces on the feed line.

    j_excite / j_reference are y node indices; the reference plane must
    sit on the line between the absorbing boundary and the antenna with
    at least MIN_PROBE_CLEARANCE_CELLS cells of clearance to each.
    """

    j_excite: int
    j_reference: int
    gap_left: np.ndarray
    gap_right: np.ndarray
    k_sheet: int
    strip_nodes: np.ndarray  # x node indices of the strip's Ey edges
    voltage: list = field(default_factory=list)
    current: list = field(default_factory=list)
    times_v: list = field(default_factory=list)
    times_i: list = field(default_factory=list)

    def record_voltage(self, sim, t) -> None:
        dxp = sim.domain.x.primal
        k = self.k_sheet
        j = self.j_reference
        ex = sim.ex
        v_right = float(np.dot(ex[self.gap_right, j, k], dxp[self.gap_right]))
        v_left = -float(np.dot(ex[self.gap_left, j, k], dxp[self.gap_left]))
        self.voltage.append(0.5 * (v_left + v_right))
        self.times_v.append(t)

    def record_current(self, sim, t) -> None:
        """Discrete Ampere loop enclosing the strip's Ey edges: the
        curl summed over their dual faces telescopes to the boundary
        integral, giving the +y strip current exactly."""
        dom = sim.domain
        dxd = dom.x.dual
        k = self.k_sheet
        j = self.j_reference  # H row at y center j_reference + 1/2
        nodes = self.strip_nodes
        hx_jump = sim.hx[nodes, j, k] - sim.hx[nodes, j, k - 1]
        i_val = float(np.dot(hx_jump, dxd[nodes]))
        i_val += (float(sim.hz[nodes[0] - 1, j, k]) - float(sim.hz[nodes[-1], j, k])) * dom.z.dual[k]
        self.current.append(i_val)
        self.times_i.append(t)

    def inject(self, sim, t, waveform, amplitude) -> None:
        g = amplitude * waveform(t)
        k = self.k_sheet
        j = self.j_excite
        sim.ex[self.gap_right, j, k] += g
        sim.ex[self.gap_left, j, k] -= g

    def voltage_series(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.times_v), np.asarray(self.voltage)

    def current_series(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.times_i), np.asarray(self.current)


def attach_cpw_port(
    sim,
    layout: AntennaLayout,
    waveform,
    band: tuple[float, float] = (1e9, 8e9),
    amplitude: float = 1.0,
) -> CpwPort:
    """Build a CPW port on the feed extension and attach it to ``sim``.

    The excitation plane sits a few cells inside the front padding, the
    reference plane halfway between it and the board edge.  Raises
    BandCoverageError when the waveform spectrum falls below -20 dB of
    its peak anywhere in ``band``.
    """
    spectrum = getattr(waveform, "spectrum", None)
    if spectrum is None:
        raise BandCoverageError("waveform has no spectrum; cannot verify band coverage")
    f_check = np.linspace(band[0], band[1], 101)
    rel = spectrum(f_check) / np.max(spectrum(np.linspace(band[0], band[1], 2001)))
    floor = 10 ** (-20 / 20)
    if np.min(rel) < floor:
        worst = f_check[int(np.argmin(rel))]
        raise BandCoverageError(
            f"source spectrum is {20 * math.log10(max(np.min(rel), 1e-30)):.1f} dB at "
            f"{worst / 1e9:.2f} GHz; need >= -20 dB across "
            f"{band[0] / 1e9:g}-{band[1] / 1e9:g} GHz"
        )

    domain = sim.domain
    j_zero = domain.y.index_of(0.0)
    j_pml_edge = domain.y.n_pml_lo
    j_excite = domain.y.index_of(-0.75 * FEED_EXTENSION)
    j_reference = domain.y.index_of(-0.4 * FEED_EXTENSION)
    if (
        j_excite - j_pml_edge < MIN_PROBE_CLEARANCE_CELLS
        or j_reference - j_excite < 2
        or j_zero - j_reference < 2
    ):
        raise ValueError(
            "feed run-in too short: the excitation plane needs "
            f">= {MIN_PROBE_CLEARANCE_CELLS} cells clearance from the absorbing wall "
            "and the reference plane must sit between it and the board edge"
        )

    left, right = _gap_cells(domain, layout)
    xn = domain.x.nodes
    strip_nodes = np.nonzero(np.abs(xn) <= layout.feed_strip_width / 2 + 1e-12)[0]

    port = CpwPort(
        j_excite=j_excite,
        j_reference=j_reference,
        gap_left=left,
        gap_right=right,
        k_sheet=domain.k_sheet,
        strip_nodes=strip_nodes,
    )
    sim.add_source(lambda s, t: port.inject(s, t, waveform, amplitude))
    sim.add_e_probe(port.record_voltage)
    sim.add_h_probe(port.record_current)
    return port
