"""Near-to-far-field transform over a closed surveillance box.

Tangential E and H phasors are accumulated by DFT on the six faces of
a box placed in the air padding (inside the absorbing layers, outside
the structure).  Equivalent surface currents Js = n x H, Ms = -n x E
then give the radiation integrals N and L, the radiation intensity

    U = k^2 / (32 pi^2 eta) * (|L_phi + eta N_theta|^2
                               + |L_theta - eta N_phi|^2),

and gain referenced to the power accepted by the port.  The feed line
necessarily pierces the back face on its way into the absorbing wall;
that one face is exempt from the no-metal-crossing check, every other
crossing is an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpwbench.fdtd.mesh import MaterialGrid, SimulationDomain
from cpwbench.units import C0, ETA0

__all__ = ["FarFieldBoxError", "FarFieldPattern", "SurfaceMonitor", "compute_far_field"]

_KINDS = {"ex": "cnn", "ey": "ncn", "ez": "nnc", "hx": "ncc", "hy": "cnc", "hz": "ccn"}
_AXES = "xyz"


class FarFieldBoxError(ValueError):
    """Surveillance box is malformed or crossed by metal."""


def _axis_slice(arr, axis, a, b):
    idx = [slice(None)] * 3
    idx[axis] = slice(a, b)
    return arr[tuple(idx)]


def _face_sample(arr, kinds, normal_axis, face_idx, cell_ranges):
    """Interpolate a field array to one face: node-located along the
    normal, cell-centered along the tangentials."""
    out = arr
    for ax in range(3):
        if ax == normal_axis:
            if kinds[ax] == "n":
                out = _axis_slice(out, ax, face_idx, face_idx + 1)
            else:
                out = 0.5 * (
                    _axis_slice(out, ax, face_idx - 1, face_idx)
                    + _axis_slice(out, ax, face_idx, face_idx + 1)
                )
        else:
            lo, hi = cell_ranges[ax]
            if kinds[ax] == "c":
                out = _axis_slice(out, ax, lo, hi)
            else:
                out = 0.5 * (_axis_slice(out, ax, lo, hi) + _axis_slice(out, ax, lo + 1, hi + 1))
    return np.squeeze(out, axis=normal_axis)


class _Face:
    def __init__(self, domain, normal_axis, sign, face_idx, cell_ranges, n_freq):
        self.normal_axis = normal_axis
        self.sign = sign
        self.face_idx = face_idx
        self.cell_ranges = cell_ranges
        self.t1, self.t2 = [ax for ax in range(3) if ax != normal_axis]
        axes = (domain.x, domain.y, domain.z)
        c1 = axes[self.t1].centers[slice(*cell_ranges[self.t1])]
        c2 = axes[self.t2].centers[slice(*cell_ranges[self.t2])]
        d1 = axes[self.t1].primal[slice(*cell_ranges[self.t1])]
        d2 = axes[self.t2].primal[slice(*cell_ranges[self.t2])]
        self.area = np.outer(d1, d2)
        pts = np.zeros((3, len(c1), len(c2)))
        pts[normal_axis] = axes[normal_axis].nodes[face_idx]
        pts[self.t1] = c1[:, None]
        pts[self.t2] = c2[None, :]
        self.points = pts.reshape(3, -1)
        shape = (n_freq,) + self.area.shape
        self.e1 = np.zeros(shape, np.complex128)
        self.e2 = np.zeros(shape, np.complex128)
        self.h1 = np.zeros(shape, np.complex128)
        self.h2 = np.zeros(shape, np.complex128)

    def accumulate(self, sim, phase_e, phase_h, dt_eff):
        na, fi, cr = self.normal_axis, self.face_idx, self.cell_ranges
        comp = sim.component
        e1 = _face_sample(comp("e" + _AXES[self.t1]), _KINDS["e" + _AXES[self.t1]], na, fi, cr)
        e2 = _face_sample(comp("e" + _AXES[self.t2]), _KINDS["e" + _AXES[self.t2]], na, fi, cr)
        h1 = _face_sample(comp("h" + _AXES[self.t1]), _KINDS["h" + _AXES[self.t1]], na, fi, cr)
        h2 = _face_sample(comp("h" + _AXES[self.t2]), _KINDS["h" + _AXES[self.t2]], na, fi, cr)
        for m in range(len(phase_e)):
            self.e1[m] += (phase_e[m] * dt_eff) * e1
            self.e2[m] += (phase_e[m] * dt_eff) * e2
            self.h1[m] += (phase_h[m] * dt_eff) * h1
            self.h2[m] += (phase_h[m] * dt_eff) * h2

    def equivalent_currents(self, m):
        """Weighted Js = n x H and Ms = -n x E, flattened over the face."""
        n_vec = np.zeros(3)
        n_vec[self.normal_axis] = self.sign
        h = np.zeros((3,) + self.h1[m].shape, np.complex128)
        e = np.zeros_like(h)
        h[self.t1], h[self.t2] = self.h1[m], self.h2[m]
        e[self.t1], e[self.t2] = self.e1[m], self.e2[m]
        js = np.cross(n_vec, h, axisb=0, axisc=0).reshape(3, -1)
        ms = -np.cross(n_vec, e, axisb=0, axisc=0).reshape(3, -1)
        w = self.area.reshape(-1)
        return js * w, ms * w


@dataclass(frozen=True)
class FarFieldPattern:
    """Gain over the full sphere for one frequency.

    gain_dbi is referenced to ``accepted_power`` when available and to
    the integrated radiated power (i.e. directivity) otherwise.
    """

    frequency: float
    theta: np.ndarray  # polar angle grid, rad
    phi: np.ndarray  # azimuth grid, rad
    gain_dbi: np.ndarray  # (n_theta, n_phi)
    radiated_power: float
    accepted_power: float | None

    @property
    def peak_gain_dbi(self) -> float:
        return float(np.max(self.gain_dbi))

    @property
    def peak_direction(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmax(self.gain_dbi)), self.gain_dbi.shape)
        return float(self.theta[i]), float(self.phi[j])


class SurfaceMonitor:
    """Accumulates face phasors for the far-field transform.

    The box sits ``margin_cells`` inside the absorbing-layer boundary on
    every side.  Raises FarFieldBoxError if metal crosses any face
    other than the feed-side (y-low) one.
    """

    def __init__(
        self,
        domain: SimulationDomain,
        materials: MaterialGrid,
        frequencies,
        interval: int = 10,
        margin_cells: int = 2,
    ):
        self.domain = domain
        self.frequencies = np.atleast_1d(np.asarray(frequencies, dtype=float))
        self.interval = interval
        axes = (domain.x, domain.y, domain.z)
        lo = [ax.n_pml_lo + margin_cells for ax in axes]
        hi = [ax.n_cells - ax.n_pml_hi - margin_cells for ax in axes]
        if any(h - l < 4 for l, h in zip(lo, hi)):
            raise FarFieldBoxError("domain too small to fit a surveillance box")
        self._check_metal_crossings(materials, lo, hi)
        cell_ranges = [(lo[0], hi[0]), (lo[1], hi[1]), (lo[2], hi[2])]
        nf = len(self.frequencies)
        self.faces = []
        for ax in range(3):
            self.faces.append(_Face(domain, ax, -1.0, lo[ax], cell_ranges, nf))
            self.faces.append(_Face(domain, ax, +1.0, hi[ax], cell_ranges, nf))

    def _check_metal_crossings(self, materials: MaterialGrid, lo, hi) -> None:
        if not materials.has_metal():
            return
        k = materials.k_sheet
        if not (lo[2] < k < hi[2]):
            raise FarFieldBoxError("surveillance box must enclose the metallization plane")
        ex, ey = materials.pec_ex, materials.pec_ey
        jlo, jhi = lo[1], hi[1]
        for i_face in (lo[0], hi[0]):
            on_plane = ey[i_face, jlo:jhi].any()
            spanning = (ex[i_face - 1, jlo : jhi + 1] & ex[i_face, jlo : jhi + 1]).any()
            if on_plane or spanning:
                raise FarFieldBoxError("metal crosses a side face of the surveillance box")
        ilo, ihi = lo[0], hi[0]
        # y-low face is the feed side: the line runs through it by design
        j_face = hi[1]
        on_plane = ex[ilo:ihi, j_face].any()
        spanning = (ey[ilo : ihi + 1, j_face - 1] & ey[ilo : ihi + 1, j_face]).any()
        if on_plane or spanning:
            raise FarFieldBoxError("metal crosses the front face of the surveillance box")

    def accumulate(self, sim, t_e: float, t_h: float) -> None:
        dt_eff = sim.dt * self.interval
        phase_e = np.exp(-2j * np.pi * self.frequencies * t_e)
        phase_h = np.exp(-2j * np.pi * self.frequencies * t_h)
        for face in self.faces:
            face.accumulate(sim, phase_e, phase_h, dt_eff)

    def _freq_index(self, frequency: float) -> int:
        rel = np.abs(self.frequencies - frequency) / max(frequency, 1.0)
        m = int(np.argmin(rel))
        if rel[m] > 1e-6:
            monitored = ", ".join(f"{f / 1e9:g} GHz" for f in self.frequencies)
            raise ValueError(
                f"{frequency / 1e9:g} GHz was not monitored (available: {monitored})"
            )
        return m


def compute_far_field(
    monitor: SurfaceMonitor,
    frequency: float,
    accepted_power: float | None = None,
    n_theta: int = 37,
    n_phi: int = 72,
) -> FarFieldPattern:
    """Radiation-integral evaluation over a regular (theta, phi) grid."""
    m = monitor._freq_index(frequency)
    f = monitor.frequencies[m]
    k0 = 2 * np.pi * f / C0
    points = np.concatenate([face.points for face in monitor.faces], axis=1)
    js = np.concatenate([face.equivalent_currents(m)[0] for face in monitor.faces], axis=1)
    ms = np.concatenate([face.equivalent_currents(m)[1] for face in monitor.faces], axis=1)

    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    intensity = np.zeros((n_theta, n_phi))
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    for it in range(n_theta):
        # r_hat / theta_hat / phi_hat for one theta row, all phi
        r_hat = np.stack([st[it] * cp, st[it] * sp, np.full(n_phi, ct[it])])
        th_hat = np.stack([ct[it] * cp, ct[it] * sp, np.full(n_phi, -st[it])])
        ph_hat = np.stack([-sp, cp, np.zeros(n_phi)])
        phase = np.exp(1j * k0 * (r_hat.T @ points))  # (n_phi, n_points)
        n_vec = phase @ js.T  # (n_phi, 3)
        l_vec = phase @ ms.T
        n_th = np.einsum("pc,cp->p", n_vec, th_hat)
        n_ph = np.einsum("pc,cp->p", n_vec, ph_hat)
        l_th = np.einsum("pc,cp->p", l_vec, th_hat)
        l_ph = np.einsum("pc,cp->p", l_vec, ph_hat)
        intensity[it] = (k0**2 / (32 * np.pi**2 * ETA0)) * (
            np.abs(l_ph + ETA0 * n_th) ** 2 + np.abs(l_th - ETA0 * n_ph) ** 2
        )

    # integrate U over the sphere (trapezoid in theta, periodic in phi)
    p_rad = float(np.trapezoid(intensity.sum(axis=1) * (2 * np.pi / n_phi) * st, theta))
    ref = accepted_power if accepted_power is not None else p_rad
    gain = 10.0 * np.log10(np.maximum(4 * np.pi * intensity / ref, 1e-30))
    return FarFieldPattern(
        frequency=float(f),
        theta=theta,
        phi=phi,
        gain_dbi=gain,
        radiated_power=p_rad,
        accepted_power=accepted_power,
    )
