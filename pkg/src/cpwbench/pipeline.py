"""End-to-end antenna simulation and sweep orchestration.

One antenna characterization is two time-domain runs on the identical
mesh: an incident run where the feed cross-section is extruded through
the whole domain (a matched line, giving the incident voltage wave)
and a total run with the actual antenna.  S11 comes from the DFT ratio
of (total - incident) to incident at the reference plane; optional
monitors on the total run produce surface-current maps and far-field
gain patterns at selected frequencies.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field

import numpy as np

from cpwbench.fdtd.currents import SheetCurrentMonitor, region_statistics
from cpwbench.fdtd.farfield import SurfaceMonitor, compute_far_field
from cpwbench.fdtd.mesh import rasterize
from cpwbench.fdtd.ports import attach_cpw_port
from cpwbench.fdtd.solver import Simulation, gaussian_sine_pulse
from cpwbench.fdtd.sparams import Resonance, SParamSweep, dft, extract_s11, resonances
from cpwbench.layout import AntennaLayout, validate_layout, with_parameter

__all__ = [
    "AntennaResult",
    "SolverSettings",
    "SweepReport",
    "SweepRow",
    "band_pulse",
    "simulate_antenna",
    "sweep_parameter",
]

_SPECTRUM_FLOOR = 0.13  # amplitude at band edges; comfortably above the -20 dB gate
_DECAY_WINDOW = 250  # steps between ring-down checks


@dataclass(frozen=True)
class SolverSettings:
    """Everything the solver runs need besides the layout."""

    resolution: float = 10.0  # fine-region cells per mm
    fmin: float = 1e9
    fmax: float = 8e9
    f_points: int = 401
    pml_cells: int = 10
    air_padding: float | None = None
    max_steps: int = 30000
    decay_db: float = -60.0  # port-voltage ring-down stop level
    sheet_resistance: float | None = None
    monitor_frequencies: tuple[float, ...] = ()
    monitor_interval: int = 10

    def frequency_grid(self) -> np.ndarray:
        return np.linspace(self.fmin, self.fmax, self.f_points)


@dataclass(frozen=True)
class AntennaResult:
    layout: AntennaLayout
    settings: SolverSettings
    sweep: SParamSweep
    resonances: tuple[Resonance, ...]
    incident_power: np.ndarray  # spectral forward power on the sweep grid
    current_maps: dict = field(default_factory=dict)  # frequency -> CurrentMap
    region_stats: dict = field(default_factory=dict)  # frequency -> RegionStats
    patterns: dict = field(default_factory=dict)  # frequency -> FarFieldPattern
    steps_incident: int = 0
    steps_total: int = 0

    def accepted_power(self, frequency: float) -> float:
        """Forward power times (1 - |S11|^2), interpolated on the grid."""
        s_mag = np.interp(frequency, self.sweep.frequencies, np.abs(self.sweep.s11))
        p_inc = np.interp(frequency, self.sweep.frequencies, self.incident_power)
        return float(p_inc * (1.0 - s_mag**2))


def band_pulse(fmin: float, fmax: float):
    """Gaussian sine burst whose spectrum stays above the port's
    -20 dB coverage gate across [fmin, fmax]."""
    center = 0.5 * (fmin + fmax)
    half_band = 0.5 * (fmax - fmin)
    tau = math.sqrt(-math.log(_SPECTRUM_FLOOR)) / (math.pi * half_band)
    return gaussian_sine_pulse(center, tau)


def _run_until_decayed(sim: Simulation, port, waveform, settings: SolverSettings) -> int:
    """Step until the port voltage rings down to ``decay_db`` of its
    peak (after the source has died out) or ``max_steps`` is reached."""
    t_source_end = waveform.delay_s + 4.0 * waveform.tau_s
    floor = 10.0 ** (settings.decay_db / 20.0)
    peak = 0.0
    while sim.step_index < settings.max_steps:
        n = min(_DECAY_WINDOW, settings.max_steps - sim.step_index)
        sim.step(n)
        recent = np.abs(np.asarray(port.voltage[-n:]))
        peak = max(peak, float(recent.max(initial=0.0)))
        if sim.time > t_source_end and peak > 0 and recent.max() < peak * floor:
            break
    return sim.step_index


def _incident_run(layout: AntennaLayout, settings: SolverSettings, waveform):
    domain, materials = rasterize(
        layout,
        settings.resolution,
        fmin=settings.fmin,
        fmax=settings.fmax,
        pml_cells=settings.pml_cells,
        air_padding=settings.air_padding,
        sheet_resistance=settings.sheet_resistance,
        line_only=True,
    )
    sim = Simulation(domain, materials)
    port = attach_cpw_port(sim, layout, waveform, band=(settings.fmin, settings.fmax))
    steps = _run_until_decayed(sim, port, waveform, settings)
    return port, steps


def simulate_antenna(layout: AntennaLayout, settings: SolverSettings | None = None) -> AntennaResult:
    """Characterize one layout: S11 sweep, resonances, and (when
    monitor frequencies are set) current maps and far-field patterns."""
    settings = settings or SolverSettings()
    report = validate_layout(layout)
    if not report.ok:
        raise ValueError(f"invalid layout: {report.violations}")
    waveform = band_pulse(settings.fmin, settings.fmax)
    frequencies = settings.frequency_grid()

    inc_port, steps_inc = _incident_run(layout, settings, waveform)

    domain, materials = rasterize(
        layout,
        settings.resolution,
        fmin=settings.fmin,
        fmax=settings.fmax,
        pml_cells=settings.pml_cells,
        air_padding=settings.air_padding,
        sheet_resistance=settings.sheet_resistance,
    )
    sim = Simulation(domain, materials)
    port = attach_cpw_port(sim, layout, waveform, band=(settings.fmin, settings.fmax))
    current_mon = surface_mon = None
    if settings.monitor_frequencies:
        current_mon = SheetCurrentMonitor(
            domain, materials, settings.monitor_frequencies, settings.monitor_interval
        )
        surface_mon = SurfaceMonitor(
            domain, materials, settings.monitor_frequencies, settings.monitor_interval
        )
        sim.add_monitor(current_mon)
        sim.add_monitor(surface_mon)
    steps_tot = _run_until_decayed(sim, port, waveform, settings)

    sweep = extract_s11(
        inc_port.voltage_series(),
        port.voltage_series(),
        frequencies,
        source_center_hz=waveform.center_hz,
        source_tau_s=waveform.tau_s,
    )
    found = tuple(resonances(sweep))

    t_v, v_inc = inc_port.voltage_series()
    t_i, i_inc = inc_port.current_series()
    v_spec = dft(t_v, v_inc, frequencies)
    i_spec = dft(t_i, i_inc, frequencies)
    incident_power = 0.5 * np.real(v_spec * np.conj(i_spec))

    result = AntennaResult(
        layout=layout,
        settings=settings,
        sweep=sweep,
        resonances=found,
        incident_power=incident_power,
        steps_incident=steps_inc,
        steps_total=steps_tot,
    )
    if settings.monitor_frequencies:
        for f in settings.monitor_frequencies:
            cmap = current_mon.current_map(f)
            result.current_maps[f] = cmap
            result.region_stats[f] = region_statistics(cmap, layout)
            result.patterns[f] = compute_far_field(
                surface_mon, f, accepted_power=result.accepted_power(f)
            )
    return result


# --------------------------------------------------------------------------
# parameter sweeps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    value: float
    resonances: tuple[Resonance, ...]

    @property
    def f_low(self) -> float | None:
        return self.resonances[0].frequency if self.resonances else None

    @property
    def f_high(self) -> float | None:
        return self.resonances[-1].frequency if len(self.resonances) >= 2 else None


def _trend(values) -> str:
    """Sign pattern of pairwise differences -> monotonic direction."""
    vals = [v for v in values if v is not None]
    if len(vals) < 2:
        return "undetermined"
    diffs = np.sign(np.diff(vals))
    if np.all(diffs > 0):
        return "increasing"
    if np.all(diffs < 0):
        return "decreasing"
    if np.all(diffs == 0):
        return "flat"
    return "mixed"


@dataclass(frozen=True)
class SweepReport:
    parameter: str
    rows: tuple[SweepRow, ...]  # ordered by sweep value
    results: tuple[AntennaResult, ...]

    @property
    def trend_f_low(self) -> str:
        return _trend([r.f_low for r in self.rows])

    @property
    def trend_f_high(self) -> str:
        return _trend([r.f_high for r in self.rows])


def _sweep_point(args):
    layout, settings = args
    return simulate_antenna(layout, settings)


def sweep_parameter(
    layout: AntennaLayout,
    parameter: str,
    values,
    settings: SolverSettings | None = None,
    jobs: int = 1,
) -> SweepReport:
    """Simulate the layout once per parameter value.

    All swept layouts are validated up front so an invalid point aborts
    the sweep before any solver time is spent.  Points are independent;
    ``jobs`` > 1 runs them in separate processes.
    """
    settings = settings or SolverSettings()
    values = [float(v) for v in values]
    if len(values) < 3:
        raise ValueError("a sweep needs at least 3 values")
    layouts = [with_parameter(layout, parameter, v) for v in values]  # fail fast

    order = np.argsort(values)
    tasks = [(layouts[i], settings) for i in order]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    rows = tuple(
        SweepRow(value=values[i], resonances=res.resonances)
        for i, res in zip(order, results)
    )
    return SweepReport(parameter=parameter, rows=rows, results=tuple(results))
