"""Surface-current maps on the metallization sheet.

The sheet current density follows from the jump of the tangential
magnetic field across the zero-thickness metal plane:

    Js = z_hat x (H_above - H_below)   =>   Jx = -dHy, Jy = +dHx

A monitor accumulates H phasors just above and below the sheet by
running DFTs at a fixed set of frequencies during the time stepping;
maps are then assembled on the cell-center grid and masked to metal
cells so bare dielectric reads exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpwbench.fdtd.mesh import MaterialGrid, SimulationDomain
from cpwbench.layout import AntennaLayout

__all__ = ["CurrentMap", "RegionStats", "SheetCurrentMonitor", "region_statistics"]


@dataclass(frozen=True)
class CurrentMap:
    """Complex sheet current on the metallization plane.

    jx / jy are cell-center sampled (nx, ny) arrays in A/m (per unit
    source amplitude); cells without metal are identically zero.
    """

    frequency: float
    x: np.ndarray  # cell-center coordinates, m
    y: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    metal: np.ndarray  # bool, cells carrying metal

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(np.abs(self.jx), np.abs(self.jy))

    @property
    def normalized(self) -> np.ndarray:
        mag = self.magnitude
        peak = mag.max()
        return mag / peak if peak > 0 else mag


class SheetCurrentMonitor:
    """Attachable monitor; accumulate() is driven by the simulation.

    frequencies outside the source's usable band would produce noise
    maps, so map requests only accept frequencies registered here.
    """

    def __init__(
        self,
        domain: SimulationDomain,
        materials: MaterialGrid,
        frequencies,
        interval: int = 10,
    ):
        self.domain = domain
        self.materials = materials
        self.frequencies = np.atleast_1d(np.asarray(frequencies, dtype=float))
        self.interval = interval
        nx, ny, _ = domain.shape
        nf = len(self.frequencies)
        # Hx jump sampled at (x-node, y-center), Hy jump at (x-center, y-node)
        self._dhx = np.zeros((nf, nx + 1, ny), dtype=np.complex128)
        self._dhy = np.zeros((nf, nx, ny + 1), dtype=np.complex128)
        self._weight = np.zeros(nf)

    def accumulate(self, sim, t_e: float, t_h: float) -> None:
        k = self.domain.k_sheet
        nx, ny, _ = self.domain.shape
        dhx = sim.hx[: nx + 1, :ny, k] - sim.hx[: nx + 1, :ny, k - 1]
        dhy = sim.hy[:nx, : ny + 1, k] - sim.hy[:nx, : ny + 1, k - 1]
        dt_eff = sim.dt * self.interval
        for m, f in enumerate(self.frequencies):
            phase = np.exp(-2j * np.pi * f * t_h) * dt_eff
            self._dhx[m] += phase * dhx
            self._dhy[m] += phase * dhy
            self._weight[m] += dt_eff

    def _freq_index(self, frequency: float) -> int:
        rel = np.abs(self.frequencies - frequency) / max(frequency, 1.0)
        m = int(np.argmin(rel))
        if rel[m] > 1e-6:
            monitored = ", ".join(f"{f / 1e9:g} GHz" for f in self.frequencies)
            raise ValueError(
                f"{frequency / 1e9:g} GHz was not monitored (available: {monitored})"
            )
        return m

    def current_map(self, frequency: float) -> CurrentMap:
        """Assemble the map for one of the monitored frequencies."""
        m = self._freq_index(frequency)
        dom, mat = self.domain, self.materials
        nx, ny, _ = dom.shape
        # interpolate both components to cell centers
        jy = 0.5 * (self._dhx[m][:-1, :] + self._dhx[m][1:, :])
        jx = -0.5 * (self._dhy[m][:, :-1] + self._dhy[m][:, 1:])
        metal = np.zeros((nx, ny), dtype=bool)
        metal |= mat.pec_ex[:, :-1] | mat.pec_ex[:, 1:]
        metal |= mat.pec_ey[:-1, :] | mat.pec_ey[1:, :]
        jx = np.where(metal, jx, 0.0)
        jy = np.where(metal, jy, 0.0)
        return CurrentMap(
            frequency=float(self.frequencies[m]),
            x=dom.x.centers,
            y=dom.y.centers,
            jx=jx,
            jy=jy,
            metal=metal,
        )


@dataclass(frozen=True)
class RegionStats:
    """Mean |Js| over named regions of the radiating pattern."""

    frequency: float
    pattern_mean: float
    vertical_limbs_mean: float  # pattern metal beside the slot
    bottom_limb_mean: float  # pattern metal between feed edge and slot

    @property
    def vertical_dominance(self) -> float:
        return self.vertical_limbs_mean / self.pattern_mean if self.pattern_mean else 0.0

    @property
    def bottom_dominance(self) -> float:
        return self.bottom_limb_mean / self.pattern_mean if self.pattern_mean else 0.0


def _region_mask(cmap: CurrentMap, x0, y0, x1, y1) -> np.ndarray:
    return (
        (cmap.x[:, None] > x0)
        & (cmap.x[:, None] < x1)
        & (cmap.y[None, :] > y0)
        & (cmap.y[None, :] < y1)
        & cmap.metal
    )


def region_statistics(cmap: CurrentMap, layout: AntennaLayout) -> RegionStats:
    """Where the current concentrates on the pattern.

    The slot splits the pattern into two vertical limbs (left/right of
    the slot) and a bottom limb (between the pattern's lower edge and
    the slot); their means against the whole-pattern mean show which
    part of the structure resonates at the map's frequency.
    """
    px0, py0, px1, py1 = layout.pattern_rect()
    sx0, sy0, sx1, sy1 = layout.slot_rect()
    mag = cmap.magnitude

    def mean_over(mask):
        return float(mag[mask].mean()) if mask.any() else 0.0

    pattern = mean_over(_region_mask(cmap, px0, py0, px1, py1))
    left = _region_mask(cmap, px0, sy0, sx0, sy1)
    right = _region_mask(cmap, sx1, sy0, px1, sy1)
    vertical = mean_over(left | right)
    bottom = mean_over(_region_mask(cmap, px0, py0, px1, sy0))
    return RegionStats(
        frequency=cmap.frequency,
        pattern_mean=pattern,
        vertical_limbs_mean=vertical,
        bottom_limb_mean=bottom,
    )
