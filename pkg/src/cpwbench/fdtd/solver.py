"""Leapfrog time-stepping core: Yee updates, CPML, sources, monitors.

Fields live on the staggered lattice with the usual offsets (array
index (i, j, k), node coordinates xn/yn/zn, cell centers xc/yc/zc):

    Ex (xc[i], yn[j], zn[k])      Hx (xn[i], yc[j], zc[k])
    Ey (xn[i], yc[j], zn[k])      Hy (xc[i], yn[j], zc[k])
    Ez (xn[i], yn[j], zc[k])      Hz (xc[i], yc[j], zn[k])

All six arrays are allocated (nx+1, ny+1, nz+1) float32; the unused
outermost entries stay zero, which doubles as the PEC backstop behind
the absorbing layers.  A simulation instance is single-owner and not
shareable mid-run; results pulled out of it are plain immutable arrays.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from cpwbench.fdtd.mesh import MaterialGrid, SimulationDomain
from cpwbench.units import EPS0, ETA0, MU0

__all__ = ["InstabilityError", "Simulation", "gaussian_sine_pulse"]

F32 = np.float32


class InstabilityError(RuntimeError):
    """Non-finite field detected; reports the offending step index."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"non-finite field value detected at step {step}")


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------


@njit(cache=True, fastmath=True)
def _update_h_bulk(ex, ey, ez, hx, hy, hz, dtmu,
                   inv_dxp, inv_dyp, inv_dzp, ikhx, ikhy, ikhz):
    nx = ex.shape[0] - 1
    ny = ex.shape[1] - 1
    nz = ex.shape[2] - 1
    for i in range(nx + 1):
        for j in range(ny):
            iy = ikhy[j] * inv_dyp[j]
            for k in range(nz):
                hx[i, j, k] += dtmu * (
                    (ey[i, j, k + 1] - ey[i, j, k]) * inv_dzp[k] * ikhz[k]
                    - (ez[i, j + 1, k] - ez[i, j, k]) * iy
                )
    for i in range(nx):
        ix = ikhx[i] * inv_dxp[i]
        for j in range(ny + 1):
            for k in range(nz):
                hy[i, j, k] += dtmu * (
                    (ez[i + 1, j, k] - ez[i, j, k]) * ix
                    - (ex[i, j, k + 1] - ex[i, j, k]) * inv_dzp[k] * ikhz[k]
                )
    for i in range(nx):
        ix = ikhx[i] * inv_dxp[i]
        for j in range(ny):
            iy = ikhy[j] * inv_dyp[j]
            for k in range(nz + 1):
                hz[i, j, k] += dtmu * (
                    (ex[i, j + 1, k] - ex[i, j, k]) * iy
                    - (ey[i + 1, j, k] - ey[i, j, k]) * ix
                )


@njit(cache=True, fastmath=True)
def _update_e_bulk(ex, ey, ez, hx, hy, hz,
                   cax, cbx, cay, cby, caz, cbz,
                   inv_dxd, inv_dyd, inv_dzd, ikex, ikey, ikez):
    nx = ex.shape[0] - 1
    ny = ex.shape[1] - 1
    nz = ex.shape[2] - 1
    for i in range(nx):
        for j in range(1, ny):
            iy = ikey[j] * inv_dyd[j]
            for k in range(1, nz):
                curl = (
                    (hz[i, j, k] - hz[i, j - 1, k]) * iy
                    - (hy[i, j, k] - hy[i, j, k - 1]) * inv_dzd[k] * ikez[k]
                )
                ex[i, j, k] = cax[i, j, k] * ex[i, j, k] + cbx[i, j, k] * curl
    for i in range(1, nx):
        ix = ikex[i] * inv_dxd[i]
        for j in range(ny):
            for k in range(1, nz):
                curl = (
                    (hx[i, j, k] - hx[i, j, k - 1]) * inv_dzd[k] * ikez[k]
                    - (hz[i, j, k] - hz[i - 1, j, k]) * ix
                )
                ey[i, j, k] = cay[i, j, k] * ey[i, j, k] + cby[i, j, k] * curl
    for i in range(1, nx):
        ix = ikex[i] * inv_dxd[i]
        for j in range(1, ny):
            iy = ikey[j] * inv_dyd[j]
            for k in range(nz):
                curl = (
                    (hy[i, j, k] - hy[i - 1, j, k]) * ix
                    - (hx[i, j, k] - hx[i, j - 1, k]) * iy
                )
                ez[i, j, k] = caz[i, j, k] * ez[i, j, k] + cbz[i, j, k] * curl


# Convolutional-boundary corrections.  Each kernel revisits only the
# thin slabs where the recursive accumulators are active (idx lists the
# slab indices along its axis) and adds the convolution term on top of
# the bulk update; the linearity of the update makes the split exact.


@njit(cache=True, fastmath=True)
def _cpml_h_x(ex, ey, ez, hy, hz, dtmu, inv_dxp, bhx, chx, idx, p_hyx, p_hzx):
    ny = ex.shape[1] - 1
    nz = ex.shape[2] - 1
    for n in range(len(idx)):
        i = idx[n]
        b = bhx[i]
        c = chx[i]
        inv = inv_dxp[i]
        for j in range(ny + 1):
            for k in range(nz):
                dez = (ez[i + 1, j, k] - ez[i, j, k]) * inv
                p = b * p_hyx[i, j, k] + c * dez
                p_hyx[i, j, k] = p
                hy[i, j, k] += dtmu * p
        for j in range(ny):
            for k in range(nz + 1):
                dey = (ey[i + 1, j, k] - ey[i, j, k]) * inv
                p = b * p_hzx[i, j, k] + c * dey
                p_hzx[i, j, k] = p
                hz[i, j, k] -= dtmu * p


@njit(cache=True, fastmath=True)
def _cpml_h_y(ex, ey, ez, hx, hz, dtmu, inv_dyp, bhy, chy, idx, p_hxy, p_hzy):
    nx = ex.shape[0] - 1
    nz = ex.shape[2] - 1
    for n in range(len(idx)):
        j = idx[n]
        b = bhy[j]
        c = chy[j]
        inv = inv_dyp[j]
        for i in range(nx + 1):
            for k in range(nz):
                dez = (ez[i, j + 1, k] - ez[i, j, k]) * inv
                p = b * p_hxy[i, j, k] + c * dez
                p_hxy[i, j, k] = p
                hx[i, j, k] -= dtmu * p
        for i in range(nx):
            for k in range(nz + 1):
                dex = (ex[i, j + 1, k] - ex[i, j, k]) * inv
                p = b * p_hzy[i, j, k] + c * dex
                p_hzy[i, j, k] = p
                hz[i, j, k] += dtmu * p


@njit(cache=True, fastmath=True)
def _cpml_h_z(ex, ey, ez, hx, hy, dtmu, inv_dzp, bhz, chz, idx, p_hxz, p_hyz):
    nx = ex.shape[0] - 1
    ny = ex.shape[1] - 1
    for i in range(nx + 1):
        for j in range(ny):
            for n in range(len(idx)):
                k = idx[n]
                dey = (ey[i, j, k + 1] - ey[i, j, k]) * inv_dzp[k]
                p = bhz[k] * p_hxz[i, j, k] + chz[k] * dey
                p_hxz[i, j, k] = p
                hx[i, j, k] += dtmu * p
    for i in range(nx):
        for j in range(ny + 1):
            for n in range(len(idx)):
                k = idx[n]
                dex = (ex[i, j, k + 1] - ex[i, j, k]) * inv_dzp[k]
                p = bhz[k] * p_hyz[i, j, k] + chz[k] * dex
                p_hyz[i, j, k] = p
                hy[i, j, k] -= dtmu * p


@njit(cache=True, fastmath=True)
def _cpml_e_x(hy, hz, ey, ez, cby, cbz, inv_dxd, bex, cex, idx, p_eyx, p_ezx):
    ny = hy.shape[1] - 1
    nz = hy.shape[2] - 1
    for n in range(len(idx)):
        i = idx[n]
        b = bex[i]
        c = cex[i]
        inv = inv_dxd[i]
        for j in range(ny):
            for k in range(1, nz):
                dhz = (hz[i, j, k] - hz[i - 1, j, k]) * inv
                p = b * p_eyx[i, j, k] + c * dhz
                p_eyx[i, j, k] = p
                ey[i, j, k] -= cby[i, j, k] * p
        for j in range(1, ny):
            for k in range(nz):
                dhy = (hy[i, j, k] - hy[i - 1, j, k]) * inv
                p = b * p_ezx[i, j, k] + c * dhy
                p_ezx[i, j, k] = p
                ez[i, j, k] += cbz[i, j, k] * p


@njit(cache=True, fastmath=True)
def _cpml_e_y(hx, hz, ex, ez, cbx, cbz, inv_dyd, bey, cey, idx, p_exy, p_ezy):
    nx = hx.shape[0] - 1
    nz = hx.shape[2] - 1
    for n in range(len(idx)):
        j = idx[n]
        b = bey[j]
        c = cey[j]
        inv = inv_dyd[j]
        for i in range(nx):
            for k in range(1, nz):
                dhz = (hz[i, j, k] - hz[i, j - 1, k]) * inv
                p = b * p_exy[i, j, k] + c * dhz
                p_exy[i, j, k] = p
                ex[i, j, k] += cbx[i, j, k] * p
        for i in range(1, nx):
            for k in range(nz):
                dhx = (hx[i, j, k] - hx[i, j - 1, k]) * inv
                p = b * p_ezy[i, j, k] + c * dhx
                p_ezy[i, j, k] = p
                ez[i, j, k] -= cbz[i, j, k] * p


@njit(cache=True, fastmath=True)
def _cpml_e_z(hx, hy, ex, ey, cbx, cby, inv_dzd, bez, cez, idx, p_exz, p_eyz):
    nx = hx.shape[0] - 1
    ny = hx.shape[1] - 1
    for i in range(nx):
        for j in range(1, ny):
            for n in range(len(idx)):
                k = idx[n]
                dhy = (hy[i, j, k] - hy[i, j, k - 1]) * inv_dzd[k]
                p = bez[k] * p_exz[i, j, k] + cez[k] * dhy
                p_exz[i, j, k] = p
                ex[i, j, k] -= cbx[i, j, k] * p
    for i in range(1, nx):
        for j in range(ny):
            for n in range(len(idx)):
                k = idx[n]
                dhx = (hx[i, j, k] - hx[i, j, k - 1]) * inv_dzd[k]
                p = bez[k] * p_eyz[i, j, k] + cez[k] * dhx
                p_eyz[i, j, k] = p
                ey[i, j, k] += cby[i, j, k] * p


@njit(cache=True)
def _max_abs(arr):
    m = 0.0
    flat = arr.ravel()
    for i in range(flat.size):
        v = abs(flat[i])
        if v > m:
            m = v
    return m


@njit(cache=True)
def _field_energy(ex, ey, ez, hx, hy, hz, eps_r, dxp, dyp, dzp, dxd, dyd, dzd):
    """Quadratic energy functional, J (cell-averaged material weighting)."""
    nx, ny, nz = eps_r.shape
    e_sum = 0.0
    h_sum = 0.0
    for i in range(nx):
        for j in range(ny + 1):
            for k in range(nz + 1):
                vol = dxp[i] * dyd[j] * dzd[k]
                e_sum += ex[i, j, k] * ex[i, j, k] * vol * _edge_eps(eps_r, i, j, k, 0)
    for i in range(nx + 1):
        for j in range(ny):
            for k in range(nz + 1):
                vol = dxd[i] * dyp[j] * dzd[k]
                e_sum += ey[i, j, k] * ey[i, j, k] * vol * _edge_eps(eps_r, i, j, k, 1)
    for i in range(nx + 1):
        for j in range(ny + 1):
            for k in range(nz):
                vol = dxd[i] * dyd[j] * dzp[k]
                e_sum += ez[i, j, k] * ez[i, j, k] * vol * _edge_eps(eps_r, i, j, k, 2)
    for i in range(nx + 1):
        for j in range(ny):
            for k in range(nz):
                h_sum += hx[i, j, k] * hx[i, j, k] * dxd[i] * dyp[j] * dzp[k]
    for i in range(nx):
        for j in range(ny + 1):
            for k in range(nz):
                h_sum += hy[i, j, k] * hy[i, j, k] * dxp[i] * dyd[j] * dzp[k]
    for i in range(nx):
        for j in range(ny):
            for k in range(nz + 1):
                h_sum += hz[i, j, k] * hz[i, j, k] * dxp[i] * dyp[j] * dzd[k]
    return 0.5 * EPS0 * e_sum + 0.5 * MU0 * h_sum


@njit(cache=True, inline="always")
def _edge_eps(eps_r, i, j, k, axis):
    nx, ny, nz = eps_r.shape
    if axis == 0:
        ic = min(i, nx - 1)
        acc = 0.0
        for jj in (max(j - 1, 0), min(j, ny - 1)):
            for kk in (max(k - 1, 0), min(k, nz - 1)):
                acc += eps_r[ic, jj, kk]
        return acc / 4.0
    if axis == 1:
        jc = min(j, ny - 1)
        acc = 0.0
        for ii in (max(i - 1, 0), min(i, nx - 1)):
            for kk in (max(k - 1, 0), min(k, nz - 1)):
                acc += eps_r[ii, jc, kk]
        return acc / 4.0
    kc = min(k, nz - 1)
    acc = 0.0
    for ii in (max(i - 1, 0), min(i, nx - 1)):
        for jj in (max(j - 1, 0), min(j, ny - 1)):
            acc += eps_r[ii, jj, kc]
    return acc / 4.0


# --------------------------------------------------------------------------
# CPML coefficient profiles
# --------------------------------------------------------------------------

_CPML_ORDER = 3
_CPML_KAPPA_MAX = 4.0
_CPML_ALPHA_MAX = 0.03  # S/m


def _cpml_profiles(axis, dt):
    """1-D stretched-coordinate coefficients for one axis.

    Returns (ik_e, b_e, c_e, ik_h, b_h, c_h), each len n+1 float32:
    E-side coefficients indexed at node locations, H-side at cell
    centers.  c == 0 outside the absorbing slabs (kernels skip the
    convolution there).
    """
    nodes = axis.nodes
    n = axis.n_cells
    m = _CPML_ORDER

    def coeffs(coords, valid):
        sigma = np.zeros(n + 1)
        kappa = np.ones(n + 1)
        alpha = np.zeros(n + 1)
        lo, hi = axis.n_pml_lo, axis.n_pml_hi
        if lo > 0:
            edge = nodes[lo]
            depth_total = edge - nodes[0]
            local = nodes[1] - nodes[0]
            smax = 0.8 * (m + 1) / (ETA0 * local)
            for idx in range(n + 1):
                if not valid[idx]:
                    continue
                d = edge - coords[idx]
                if 0 < d <= depth_total + 1e-15:
                    rho = d / depth_total
                    sigma[idx] = smax * rho**m
                    kappa[idx] = 1 + (_CPML_KAPPA_MAX - 1) * rho**m
                    alpha[idx] = _CPML_ALPHA_MAX * (1 - rho)
        if hi > 0:
            edge = nodes[n - hi]
            depth_total = nodes[n] - edge
            local = nodes[n] - nodes[n - 1]
            smax = 0.8 * (m + 1) / (ETA0 * local)
            for idx in range(n + 1):
                if not valid[idx]:
                    continue
                d = coords[idx] - edge
                if 0 < d <= depth_total + 1e-15:
                    rho = d / depth_total
                    sigma[idx] = smax * rho**m
                    kappa[idx] = 1 + (_CPML_KAPPA_MAX - 1) * rho**m
                    alpha[idx] = _CPML_ALPHA_MAX * (1 - rho)
        b = np.exp(-(sigma / kappa + alpha) * dt / EPS0)
        c = np.zeros(n + 1)
        active = sigma > 0
        c[active] = (
            sigma[active]
            * (b[active] - 1.0)
            / (sigma[active] * kappa[active] + kappa[active] ** 2 * alpha[active])
        )
        b[~active] = 0.0
        return (1.0 / kappa).astype(F32), b.astype(F32), c.astype(F32)

    node_valid = np.ones(n + 1, dtype=bool)
    center_coords = np.concatenate([0.5 * (nodes[:-1] + nodes[1:]), [nodes[-1]]])
    center_valid = np.concatenate([np.ones(n, dtype=bool), [False]])
    ik_e, b_e, c_e = coeffs(nodes, node_valid)
    ik_h, b_h, c_h = coeffs(center_coords, center_valid)
    return ik_e, b_e, c_e, ik_h, b_h, c_h


# --------------------------------------------------------------------------
# waveform
# --------------------------------------------------------------------------


def gaussian_sine_pulse(center_hz: float, tau_s: float, delay_s: float | None = None):
    """Gaussian-modulated sine burst; spectrum peaks at ``center_hz``
    with envelope exp(-(pi*(f - fc)*tau)^2)."""
    t0 = 4.5 * tau_s if delay_s is None else delay_s

    def wave(t: float) -> float:
        u = (t - t0) / tau_s
        return math.sin(2 * math.pi * center_hz * (t - t0)) * math.exp(-u * u)

    wave.center_hz = center_hz
    wave.tau_s = tau_s
    wave.delay_s = t0
    wave.spectrum = lambda f: np.exp(-((np.pi * (np.asarray(f) - center_hz) * tau_s) ** 2))
    return wave


# --------------------------------------------------------------------------
# simulation driver
# --------------------------------------------------------------------------


class Simulation:
    """Owns field state and advances it; attach sources/probes/monitors
    before calling :meth:`run`."""

    def __init__(
        self,
        domain: SimulationDomain,
        materials: MaterialGrid,
        dt: float | None = None,
        enforce_cfl: bool = True,
        check_interval: int = 10,
    ):
        self.domain = domain
        self.materials = materials
        self.dt = domain.dt if dt is None else dt
        if enforce_cfl and self.dt > domain.cfl_limit() * (1 + 1e-12):
            raise ValueError(
                f"dt {self.dt:.3e} exceeds the stability limit {domain.cfl_limit():.3e}"
            )
        self.check_interval = check_interval
        self.step_index = 0
        nx, ny, nz = domain.shape
        shape = (nx + 1, ny + 1, nz + 1)
        self.ex = np.zeros(shape, F32)
        self.ey = np.zeros(shape, F32)
        self.ez = np.zeros(shape, F32)
        self.hx = np.zeros(shape, F32)
        self.hy = np.zeros(shape, F32)
        self.hz = np.zeros(shape, F32)
        self._psi = [np.zeros(shape, F32) for _ in range(12)]
        self._build_coefficients()
        self.sources: list = []
        self.e_probes: list = []
        self.h_probes: list = []
        self.monitors: list = []

    # -- setup ------------------------------------------------------------

    def _build_coefficients(self):
        dom, mat = self.domain, self.materials
        nx, ny, nz = dom.shape
        dt = self.dt
        eps = mat.eps_r.astype(np.float64)
        sig = mat.sigma.astype(np.float64)

        self.cax, self.cbx = self._edge_coeffs(eps, sig, 0, dt)
        self.cay, self.cby = self._edge_coeffs(eps, sig, 1, dt)
        self.caz, self.cbz = self._edge_coeffs(eps, sig, 2, dt)

        # PEC sheet and optional finite-sheet-resistance mode
        k = mat.k_sheet
        if mat.sheet_resistance is None:
            self.cax[:, :, k][:nx, :][mat.pec_ex] = 0.0
            self.cbx[:, :, k][:nx, :][mat.pec_ex] = 0.0
            self.cay[:, :, k][:, :ny][mat.pec_ey] = 0.0
            self.cby[:, :, k][:, :ny][mat.pec_ey] = 0.0
        else:
            # thin-sheet conductivity sigma_s = 1 / (Rs * t_eff), folded
            # into the standard lossy-edge coefficients
            t_eff = dom.z.dual[k]
            sigma_s = 1.0 / (mat.sheet_resistance * t_eff)
            for mask, (ca, cb) in (
                (mat.pec_ex, (self.cax, self.cbx)),
                (mat.pec_ey, (self.cay, self.cby)),
            ):
                full = np.zeros(ca.shape[:2], dtype=bool)
                full[: mask.shape[0], : mask.shape[1]] = mask
                f = sigma_s * dt / (2.0 * EPS0)
                ca[:, :, k][full] = (1 - f) / (1 + f)
                cb[:, :, k][full] = (dt / EPS0) / (1 + f)
        for axis_name, idx in mat.extra_pec_walls:
            if axis_name != "y":
                raise NotImplementedError("only y-plane PEC walls are used")
            for ca, cb in ((self.cax, self.cbx), (self.caz, self.cbz)):
                ca[:, idx, :] = 0.0
                cb[:, idx, :] = 0.0

        self.inv_dxp = (1.0 / dom.x.primal).astype(F32)
        self.inv_dyp = (1.0 / dom.y.primal).astype(F32)
        self.inv_dzp = (1.0 / dom.z.primal).astype(F32)
        self.inv_dxd = (1.0 / dom.x.dual).astype(F32)
        self.inv_dyd = (1.0 / dom.y.dual).astype(F32)
        self.inv_dzd = (1.0 / dom.z.dual).astype(F32)
        self.dtmu = F32(dt / MU0)
        self._cpml_x = _cpml_profiles(dom.x, dt)
        self._cpml_y = _cpml_profiles(dom.y, dt)
        self._cpml_z = _cpml_profiles(dom.z, dt)

        # slab index lists for the convolution-correction kernels
        def active(c, lo, hi):
            idx = np.nonzero(c != 0)[0]
            return idx[(idx >= lo) & (idx <= hi)].astype(np.int64)

        self._slab_e = tuple(
            active(prof[2], 1, n - 1)
            for prof, n in zip((self._cpml_x, self._cpml_y, self._cpml_z), (nx, ny, nz))
        )
        self._slab_h = tuple(
            active(prof[5], 0, n - 1)
            for prof, n in zip((self._cpml_x, self._cpml_y, self._cpml_z), (nx, ny, nz))
        )

    @staticmethod
    def _edge_coeffs(eps, sig, axis, dt):
        """ca/cb arrays at edge locations for E along `axis`."""
        nx, ny, nz = eps.shape
        shape = (nx + 1, ny + 1, nz + 1)
        trans = [ax for ax in range(3) if ax != axis]

        def avg(cells):
            # pad along transverse axes so edge j uses cells j-1 and j,
            # clamped at the boundaries
            padded = np.pad(
                cells,
                [(1, 1) if ax in trans else (0, 1) for ax in range(3)],
                mode="edge",
            )
            acc = np.zeros(shape)
            for da in (0, 1):
                for db in (0, 1):
                    offs = {trans[0]: da, trans[1]: db, axis: 0}
                    sl = tuple(
                        slice(offs.get(ax, 0), offs.get(ax, 0) + shape[ax]) for ax in range(3)
                    )
                    acc += padded[sl]
            return acc / 4.0

        eps_e = avg(eps)
        sig_e = avg(sig)
        f = sig_e * dt / (2.0 * EPS0 * eps_e)
        ca = ((1.0 - f) / (1.0 + f)).astype(F32)
        cb = ((dt / (EPS0 * eps_e)) / (1.0 + f)).astype(F32)
        return ca, cb

    # -- attachments ------------------------------------------------------

    def add_source(self, inject) -> None:
        """``inject(sim, t)`` called after each E update."""
        self.sources.append(inject)

    def add_e_probe(self, record) -> None:
        self.e_probes.append(record)

    def add_h_probe(self, record) -> None:
        self.h_probes.append(record)

    def add_monitor(self, monitor) -> None:
        """Monitor objects expose accumulate(sim, t_e, t_h) and interval."""
        self.monitors.append(monitor)

    # -- stepping ---------------------------------------------------------

    @property
    def time(self) -> float:
        return self.step_index * self.dt

    def step(self, n: int = 1) -> None:
        """Advance n leapfrog steps (all H, then all E, then sources)."""
        ikex, bex, cex, ikhx, bhx, chx = self._cpml_x
        ikey, bey, cey, ikhy, bhy, chy = self._cpml_y
        ikez, bez, cez, ikhz, bhz, chz = self._cpml_z
        (p_exy, p_exz, p_eyz, p_eyx, p_ezx, p_ezy,
         p_hxy, p_hxz, p_hyz, p_hyx, p_hzx, p_hzy) = self._psi
        idx_hx, idx_hy, idx_hz = self._slab_h
        idx_ex, idx_ey, idx_ez = self._slab_e
        for _ in range(n):
            _update_h_bulk(self.ex, self.ey, self.ez, self.hx, self.hy, self.hz, self.dtmu,
                           self.inv_dxp, self.inv_dyp, self.inv_dzp, ikhx, ikhy, ikhz)
            _cpml_h_x(self.ex, self.ey, self.ez, self.hy, self.hz, self.dtmu,
                      self.inv_dxp, bhx, chx, idx_hx, p_hyx, p_hzx)
            _cpml_h_y(self.ex, self.ey, self.ez, self.hx, self.hz, self.dtmu,
                      self.inv_dyp, bhy, chy, idx_hy, p_hxy, p_hzy)
            _cpml_h_z(self.ex, self.ey, self.ez, self.hx, self.hy, self.dtmu,
                      self.inv_dzp, bhz, chz, idx_hz, p_hxz, p_hyz)
            t_h = (self.step_index + 0.5) * self.dt
            for record in self.h_probes:
                record(self, t_h)
            _update_e_bulk(self.ex, self.ey, self.ez, self.hx, self.hy, self.hz,
                           self.cax, self.cbx, self.cay, self.cby, self.caz, self.cbz,
                           self.inv_dxd, self.inv_dyd, self.inv_dzd, ikex, ikey, ikez)
            _cpml_e_x(self.hy, self.hz, self.ey, self.ez, self.cby, self.cbz,
                      self.inv_dxd, bex, cex, idx_ex, p_eyx, p_ezx)
            _cpml_e_y(self.hx, self.hz, self.ex, self.ez, self.cbx, self.cbz,
                      self.inv_dyd, bey, cey, idx_ey, p_exy, p_ezy)
            _cpml_e_z(self.hx, self.hy, self.ex, self.ey, self.cbx, self.cby,
                      self.inv_dzd, bez, cez, idx_ez, p_exz, p_eyz)
            t_e = (self.step_index + 1) * self.dt
            for inject in self.sources:
                inject(self, t_e)
            for record in self.e_probes:
                record(self, t_e)
            for mon in self.monitors:
                if (self.step_index + 1) % mon.interval == 0:
                    mon.accumulate(self, t_e, t_h)
            self.step_index += 1
            if self.step_index % self.check_interval == 0:
                self._check_finite()

    def _check_finite(self) -> None:
        for arr in (self.ex, self.ey, self.ez):
            m = _max_abs(arr)
            if not math.isfinite(m) or m > 1e30:
                raise InstabilityError(self.step_index)

    def run(self, steps: int) -> None:
        self.step(steps)

    def field_energy(self) -> float:
        dom = self.domain
        return _field_energy(
            self.ex, self.ey, self.ez, self.hx, self.hy, self.hz,
            self.materials.eps_r,
            dom.x.primal, dom.y.primal, dom.z.primal,
            dom.x.dual, dom.y.dual, dom.z.dual,
        )

    def component(self, name: str) -> np.ndarray:
        return {"ex": self.ex, "ey": self.ey, "ez": self.ez,
                "hx": self.hx, "hy": self.hy, "hz": self.hz}[name]
