"""S11 extraction from incident/total port records, resonance finding."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = ["SParamSweep", "Resonance", "TruncationWarning", "dft", "extract_s11", "resonances"]


class TruncationWarning(UserWarning):
    """Port record had not decayed to the requested floor when it ended."""


def dft(times: np.ndarray, values: np.ndarray, frequencies: np.ndarray) -> np.ndarray:
    """Single-sided DFT of an arbitrarily sampled uniform series at the
    requested frequencies (e^{-j w t} convention, scaled by dt)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    dt = times[1] - times[0] if len(times) > 1 else 1.0
    phases = np.exp(-2j * np.pi * np.outer(frequencies, times))
    return phases @ values * dt


@dataclass(frozen=True)
class SParamSweep:
    """One-port reflection data on a strictly increasing frequency grid."""

    frequencies: np.ndarray
    s11: np.ndarray
    source_center_hz: float = 0.0
    source_tau_s: float = 0.0

    def __post_init__(self):
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if self.frequencies.shape != self.s11.shape:
            raise ValueError("frequency and s11 arrays must have equal shape")

    @property
    def magnitude_db(self) -> np.ndarray:
        return 20.0 * np.log10(np.maximum(np.abs(self.s11), 1e-300))


@dataclass(frozen=True)
class Resonance:
    frequency: float
    depth_db: float
    bandwidth: float  # -10 dB crossing width, Hz (0 when the dip never recrosses)


def _check_decayed(times, values, floor_db: float = -60.0) -> None:
    peak = np.max(np.abs(values))
    if peak == 0:
        return
    tail = np.max(np.abs(values[int(len(values) * 0.95):]))
    tail_db = 20 * np.log10(max(tail / peak, 1e-300))
    if tail_db > floor_db:
        remainder = (tail / peak) ** 2
        warnings.warn(
            f"record ends at {tail_db:.1f} dB of peak (energy remainder ~{remainder:.2e}); "
            "spectra may show truncation ripple",
            TruncationWarning,
            stacklevel=3,
        )


def extract_s11(
    incident: tuple[np.ndarray, np.ndarray],
    total: tuple[np.ndarray, np.ndarray],
    frequencies: np.ndarray,
    source_center_hz: float = 0.0,
    source_tau_s: float = 0.0,
) -> SParamSweep:
    """S11(f) = DFT(reflected V) / DFT(incident V) at the reference plane.

    ``incident``/``total`` are (times, voltage) pairs from runs on the
    identical grid and source; reflected = total - incident.  Emits a
    TruncationWarning when either record has not decayed to -60 dB.
    """
    t_inc, v_inc = incident
    t_tot, v_tot = total
    n = max(len(v_inc), len(v_tot))
    dt = t_inc[1] - t_inc[0]
    if abs((t_tot[1] - t_tot[0]) - dt) > 1e-18:
        raise ValueError("incident and total runs must share the time step")
    v_i = np.zeros(n)
    v_i[: len(v_inc)] = v_inc
    v_t = np.zeros(n)
    v_t[: len(v_tot)] = v_tot
    times = t_inc[0] + dt * np.arange(n)
    _check_decayed(times, v_t)
    _check_decayed(times, v_i)
    frequencies = np.asarray(frequencies, dtype=float)
    spec_inc = dft(times, v_i, frequencies)
    spec_ref = dft(times, v_t - v_i, frequencies)
    return SParamSweep(
        frequencies=frequencies,
        s11=spec_ref / spec_inc,
        source_center_hz=source_center_hz,
        source_tau_s=source_tau_s,
    )


def resonances(sweep: SParamSweep, threshold_db: float = -10.0) -> list[Resonance]:
    """Local |S11| minima deeper than the threshold, ascending in
    frequency, with their -10 dB crossing bandwidths.

    Minimum locations are refined by a parabolic fit through the three
    samples around each dip.
    """
    mag = sweep.magnitude_db
    freqs = sweep.frequencies
    if len(mag) == 0:
        return []
    out: list[Resonance] = []
    for i in range(1, len(mag) - 1):
        if not (mag[i] < mag[i - 1] and mag[i] <= mag[i + 1] and mag[i] < threshold_db):
            continue
        # parabolic refinement
        a, b, c = mag[i - 1], mag[i], mag[i + 1]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom > 0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
        f0 = freqs[i] + shift * (freqs[min(i + 1, len(freqs) - 1)] - freqs[i - 1]) / 2
        depth = b - 0.25 * (a - c) * shift

        cross = -10.0
        f_lo = freqs[0]
        for m in range(i, 0, -1):
            if mag[m - 1] >= cross > mag[m]:
                f_lo = np.interp(cross, [mag[m], mag[m - 1]], [freqs[m], freqs[m - 1]])
                break
        else:
            m = 0
        f_hi = freqs[-1]
        for m in range(i, len(mag) - 1):
            if mag[m] < cross <= mag[m + 1]:
                f_hi = np.interp(cross, [mag[m], mag[m + 1]], [freqs[m], freqs[m + 1]])
                break
        bw = max(f_hi - f_lo, 0.0)
        out.append(Resonance(frequency=float(f0), depth_db=float(depth), bandwidth=float(bw)))
    # merge duplicates from plateaus: keep the deeper of near-identical dips
    merged: list[Resonance] = []
    for r in out:
        if merged and abs(r.frequency - merged[-1].frequency) < 1e-3 * r.frequency:
            if r.depth_db < merged[-1].depth_db:
                merged[-1] = r
        else:
            merged.append(r)
    return merged
