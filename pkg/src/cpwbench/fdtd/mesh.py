"""Nonuniform Yee mesh construction and layout rasterization.

Each axis is meshed independently: geometry edges become fixed grid
nodes carrying a local target cell size, intervals between them are
filled with smoothly graded cells (adjacent-size ratio bounded), and
graded air padding plus an absorbing-layer slab is appended on open
faces.  The fine cell size is set by the ``resolution`` argument
(cells per mm) and must resolve the CPW feed gap with at least two
cells; everything farther from the feed coarsens toward a cap tied to
the shortest analysis wavelength.

Metallization is rasterized as a zero-thickness PEC sheet on the
substrate top face: boolean masks over the Ex / Ey edges lying in that
plane.  The feed strip and grounds are extruded backward (y < 0)
through the padding and absorbing layers so the feed line is matched
at the back wall.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cpwbench.layout import AntennaLayout, validate_layout
from cpwbench.units import C0, EPS0
from cpwbench.cpw import Substrate

__all__ = ["Axis", "SimulationDomain", "MaterialGrid", "ResolutionError", "rasterize", "build_axis"]

DEFAULT_PML_CELLS = 10
MIN_PML_CELLS = 8
LOSS_REFERENCE_HZ = 2.4e9  # loss tangent -> conductivity mapping frequency
FEED_EXTENSION = 6e-3  # finely meshed feed run-in below y = 0 for the port planes


class ResolutionError(ValueError):
    """Grid resolution cannot represent a required geometric feature."""


@dataclass(frozen=True)
class Axis:
    """One grid axis: node coordinates plus absorbing-slab cell counts."""

    nodes: np.ndarray
    n_pml_lo: int
    n_pml_hi: int

    @property
    def n_cells(self) -> int:
        return len(self.nodes) - 1

    @property
    def primal(self) -> np.ndarray:
        """Cell sizes, len n_cells."""
        return np.diff(self.nodes)

    @property
    def dual(self) -> np.ndarray:
        """Node-centered spacings, len n_cells + 1 (half cells at the ends)."""
        p = self.primal
        d = np.empty(len(self.nodes))
        d[0] = p[0] / 2
        d[-1] = p[-1] / 2
        d[1:-1] = 0.5 * (p[:-1] + p[1:])
        return d

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def index_of(self, coord: float) -> int:
        """Nearest node index."""
        return int(np.argmin(np.abs(self.nodes - coord)))


def _grade_interval(length, d0, d1, d_max, ratio=1.35):
    """Cell sizes filling ``length``, ramping d0 -> d1 with bounded growth.

    Sizes are rescaled at the end so they sum to length exactly; the
    rescale factor stays within the growth ratio, preserving smoothness.
    """
    if length <= 0:
        return []
    if length <= 1.001 * min(d0, d1):
        return [length]
    lo: list[float] = []
    hi: list[float] = []
    cur_lo, cur_hi = d0, d1
    remaining = length
    while remaining > 1e-9 * length:
        if cur_lo <= cur_hi:
            side, cur = lo, cur_lo
        else:
            side, cur = hi, cur_hi
        if remaining < cur * (1.0 - 1e-12):
            # remnant smaller than a full step: pool it with the cells
            # around the lo/hi junction and re-split evenly, so no cell
            # ends up more than one growth ratio below its neighbours
            pool, m = remaining, 1
            while lo or hi:
                tails = [lst[-1] for lst in (lo, hi) if lst]
                if pool / m >= max(tails) / ratio:
                    break
                donor = lo if (lo and (not hi or lo[-1] >= hi[-1])) else hi
                pool += donor.pop()
                m += 1
            lo.extend([pool / m] * m)
            break
        side.append(cur)
        remaining -= cur
        if side is lo:
            cur_lo = min(cur_lo * ratio, d_max)
        else:
            cur_hi = min(cur_hi * ratio, d_max)
    sizes = np.array(lo + hi[::-1])
    return list(sizes * (length / sizes.sum()))


def _pad_section(d_edge, pad, d_max, ratio=1.35):
    """Graded padding, growing outward from d_edge until >= pad long."""
    sizes: list[float] = []
    cur = d_edge
    total = 0.0
    while total < pad:
        cur = min(cur * ratio, d_max)
        sizes.append(cur)
        total += cur
    return sizes


def build_axis(
    points, pad_lo, pad_hi, d_max, pml_cells=DEFAULT_PML_CELLS, ratio=1.35, pad_d_max=None
) -> Axis:
    """Mesh one axis from (coordinate, local size) fixed points.

    Coinciding points keep the smaller size.  ``pad_lo``/``pad_hi`` are
    physical padding lengths appended before the PML slabs (PML cells
    continue at the outermost padding size).  ``pad_d_max`` lets the
    empty padding coarsen past the interior cap (it only has to resolve
    the free-space wavelength).
    """
    if pad_d_max is None:
        pad_d_max = d_max
    pts: dict[float, float] = {}
    for coord, size in sorted(points):
        key = round(coord, 12)
        pts[key] = min(size, pts.get(key, np.inf))
    coords = sorted(pts)
    sizes: list[float] = []
    for a, b in zip(coords[:-1], coords[1:]):
        sizes.extend(_grade_interval(b - a, pts[a], pts[b], d_max, ratio))
    # grow padding from the actual outermost interior cell, not the
    # boundary point's target size, to keep the size ramp smooth
    lo_pad = _pad_section(sizes[0] if sizes else pts[coords[0]], pad_lo, pad_d_max, ratio)[::-1]
    hi_pad = _pad_section(sizes[-1] if sizes else pts[coords[-1]], pad_hi, pad_d_max, ratio)
    lo_pml = [lo_pad[0] if lo_pad else d_max] * pml_cells
    hi_pml = [hi_pad[-1] if hi_pad else d_max] * pml_cells
    all_sizes = lo_pml + lo_pad + sizes + hi_pad + hi_pml
    nodes = coords[0] - sum(lo_pml + lo_pad) + np.concatenate([[0.0], np.cumsum(all_sizes)])
    return Axis(nodes=nodes, n_pml_lo=pml_cells, n_pml_hi=pml_cells)


@dataclass(frozen=True)
class SimulationDomain:
    """Grid geometry plus the stable time step."""

    x: Axis
    y: Axis
    z: Axis
    dt: float
    safety: float
    k_sheet: int  # z node index of the metallization plane

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.x.n_cells, self.y.n_cells, self.z.n_cells)

    @property
    def n_cells(self) -> int:
        nx, ny, nz = self.shape
        return nx * ny * nz

    def cfl_limit(self) -> float:
        s = sum(1.0 / np.min(ax.primal) ** 2 for ax in (self.x, self.y, self.z))
        return 1.0 / (C0 * np.sqrt(s))


@dataclass
class MaterialGrid:
    """Cell permittivity/conductivity plus the PEC sheet masks."""

    eps_r: np.ndarray  # (nx, ny, nz) float32, relative permittivity per cell
    sigma: np.ndarray  # (nx, ny, nz) float32, S/m per cell
    pec_ex: np.ndarray  # (nx, ny+1) bool, Ex edges on the sheet plane
    pec_ey: np.ndarray  # (nx+1, ny) bool, Ey edges on the sheet plane
    k_sheet: int
    sheet_resistance: float | None = None  # ohm/sq; None -> ideal PEC
    extra_pec_walls: list = field(default_factory=list)  # list of ("y", j) full-section walls

    def has_metal(self) -> bool:
        return bool(self.pec_ex.any() or self.pec_ey.any())


def _mark_rect(mask, centers_a, nodes_b, rect_a, rect_b, value=True):
    """Set mask cells whose first coord center is strictly inside
    (rect_a) and second coord node inside [rect_b] (inclusive)."""
    tol = 1e-12
    ia = np.nonzero((centers_a > rect_a[0] + tol) & (centers_a < rect_a[1] - tol))[0]
    ib = np.nonzero((nodes_b >= rect_b[0] - tol) & (nodes_b <= rect_b[1] + tol))[0]
    if len(ia) and len(ib):
        mask[np.ix_(ia, ib)] = value


def _mark_rect_interior(mask, centers_a, nodes_b, rect_a, rect_b):
    """Clear mask where the edge lies strictly inside the rect (slot cut:
    boundary edges remain metal)."""
    tol = 1e-12
    ia = np.nonzero((centers_a > rect_a[0] + tol) & (centers_a < rect_a[1] - tol))[0]
    ib = np.nonzero((nodes_b > rect_b[0] + tol) & (nodes_b < rect_b[1] - tol))[0]
    if len(ia) and len(ib):
        mask[np.ix_(ia, ib)] = False


def rasterize(
    layout: AntennaLayout,
    resolution: float,
    fmin: float = 1e9,
    fmax: float = 8e9,
    pml_cells: int = DEFAULT_PML_CELLS,
    air_padding: float | None = None,
    safety: float = 0.99,
    sheet_resistance: float | None = None,
    line_only: bool = False,
) -> tuple[SimulationDomain, MaterialGrid]:
    """Mesh a layout and build its material grid.

    resolution : cells per mm for the fine region (feed gap, substrate).
    air_padding : meters of air before the absorbing layers on every
        open face; defaults to an eighth of the free-space wavelength at
        ``fmin``.
    line_only : extrude the feed cross-section (and substrate) through
        the whole domain instead of placing the antenna - the matched
        "incident" companion used for S11 normalization.

    Raises ResolutionError when the feed gap would span fewer than two
    cells at the requested resolution.
    """
    report = validate_layout(layout)
    if not report.ok:
        raise ValueError(f"invalid layout: {report.violations}")
    if pml_cells < MIN_PML_CELLS:
        raise ValueError(f"absorbing layer must be >= {MIN_PML_CELLS} cells, got {pml_cells}")

    dx_fine = 1e-3 / resolution
    gap_cells = layout.feed_gap / dx_fine
    if gap_cells < 2.0 - 1e-9:
        need = int(np.ceil(2.0 / (layout.feed_gap / 1e-3)))
        raise ResolutionError(
            f"feed gap ({layout.feed_gap * 1e3:.3g} mm) spans {gap_cells:.2f} cells at "
            f"{resolution:g} cells/mm; need >= 2 cells (>= {need} cells/mm)"
        )
    med = 4.0 * dx_fine
    coarse = min(12.0 * dx_fine, C0 / fmax / 12.0)
    d_air = C0 / fmax / 12.0  # empty padding only carries free-space waves
    pad = C0 / fmin / 8.0 if air_padding is None else air_padding

    lay = layout
    half_w = lay.feed_strip_width / 2
    gap_out = half_w + lay.feed_gap
    gnd_out = gap_out + lay.ground_width
    sx0, _, sx1, _ = lay.slot_rect()
    x_points = [
        (-half_w, dx_fine),
        (half_w, dx_fine),
        (-gap_out, dx_fine),
        (gap_out, dx_fine),
        (-gnd_out, med),
        (gnd_out, med),
        (sx0, med),
        (sx1, med),
        (-lay.pattern_width / 2, med),
        (lay.pattern_width / 2, med),
        (-lay.board_width / 2, coarse),
        (lay.board_width / 2, coarse),
    ]
    _, py0, _, py1 = lay.pattern_rect()
    _, sy0, _, sy1 = lay.slot_rect()
    y_points = [
        (-FEED_EXTENSION, med),
        (0.0, med),
        (lay.ground_height, med),
        (lay.feed_length, med),
        (sy0, med),
        (sy1, med),
        (py1, med),
        (lay.board_height, coarse),
    ]
    t = lay.substrate.thickness
    dz_sub = t / 2.0
    z_points = [(0.0, dz_sub), (t, dz_sub)]

    x_axis = build_axis(x_points, pad, pad, coarse, pml_cells, pad_d_max=d_air)
    y_axis = build_axis(y_points, pad, pad, coarse, pml_cells, pad_d_max=d_air)
    z_axis = build_axis(z_points, pad, pad, coarse, pml_cells, pad_d_max=d_air)

    k_sheet = z_axis.index_of(t)
    s = sum(1.0 / np.min(ax.primal) ** 2 for ax in (x_axis, y_axis, z_axis))
    dt = safety / (C0 * np.sqrt(s))
    domain = SimulationDomain(x=x_axis, y=y_axis, z=z_axis, dt=dt, safety=safety, k_sheet=k_sheet)

    materials = _build_materials(domain, lay, sheet_resistance, line_only)
    return domain, materials


def _build_materials(
    domain: SimulationDomain, lay: AntennaLayout, sheet_resistance, line_only: bool
) -> MaterialGrid:
    nx, ny, nz = domain.shape
    xc, yc, zc = domain.x.centers, domain.y.centers, domain.z.centers
    xn, yn = domain.x.nodes, domain.y.nodes
    t = lay.substrate.thickness

    eps = np.ones((nx, ny, nz), dtype=np.float32)
    sigma = np.zeros((nx, ny, nz), dtype=np.float32)
    in_sub_z = (zc > 0) & (zc < t)
    in_sub_x = np.abs(xc) <= lay.board_width / 2 + 1e-12
    y_top = yc[-1] + 1.0 if line_only else lay.board_height
    in_sub_y = yc <= y_top  # extruded backward through the feed padding
    sub = np.ix_(np.nonzero(in_sub_x)[0], np.nonzero(in_sub_y)[0], np.nonzero(in_sub_z)[0])
    eps[sub] = lay.substrate.relative_permittivity
    sigma[sub] = (
        2 * np.pi * LOSS_REFERENCE_HZ
        * EPS0
        * lay.substrate.relative_permittivity
        * lay.substrate.loss_tangent
    )

    pec_ex = np.zeros((nx, ny + 1), dtype=bool)
    pec_ey = np.zeros((nx + 1, ny), dtype=bool)
    y_bot = yn[0] - 1.0  # feed extruded through the back absorbing wall
    half_w = lay.feed_strip_width / 2
    if line_only:
        rects = [(-half_w, y_bot, half_w, yc[-1] + 1.0)]
        for gx0, _, gx1, _ in lay.ground_rects():
            rects.append((gx0, y_bot, gx1, yc[-1] + 1.0))
    else:
        rects = [(-half_w, y_bot, half_w, lay.feed_length)]
        for gx0, _, gx1, gy1 in lay.ground_rects():
            rects.append((gx0, y_bot, gx1, gy1))
        rects.append(lay.pattern_rect())
    for x0, y0, x1, y1 in rects:
        _mark_rect(pec_ex, xc, yn, (x0, x1), (y0, y1))
        _mark_rect(pec_ey.T, yc, xn, (y0, y1), (x0, x1))
    if not line_only:
        slot = lay.slot_rect()
        _mark_rect_interior(pec_ex, xc, yn, (slot[0], slot[2]), (slot[1], slot[3]))
        _mark_rect_interior(pec_ey.T, yc, xn, (slot[1], slot[3]), (slot[0], slot[2]))

    return MaterialGrid(
        eps_r=eps,
        sigma=sigma,
        pec_ex=pec_ex,
        pec_ey=pec_ey,
        k_sheet=domain.k_sheet,
        sheet_resistance=sheet_resistance,
    )


def empty_domain(
    extent,
    cell_size,
    pml_cells: int = DEFAULT_PML_CELLS,
    safety: float = 0.99,
    eps_r: float = 1.0,
) -> tuple[SimulationDomain, MaterialGrid]:
    """Uniform vacuum box (used by the physics validation tests)."""
    axes = []
    for length, d in zip(extent, np.broadcast_to(cell_size, (3,))):
        n = int(round(length / d))
        sizes = [d] * (n + 2 * pml_cells)
        nodes = -d * pml_cells + np.concatenate([[0.0], np.cumsum(sizes)])
        axes.append(Axis(nodes=nodes, n_pml_lo=pml_cells, n_pml_hi=pml_cells))
    s = sum(1.0 / np.min(ax.primal) ** 2 for ax in axes)
    dt = safety / (C0 * np.sqrt(s))
    domain = SimulationDomain(x=axes[0], y=axes[1], z=axes[2], dt=dt, safety=safety, k_sheet=0)
    nx, ny, nz = domain.shape
    materials = MaterialGrid(
        eps_r=np.full((nx, ny, nz), eps_r, dtype=np.float32),
        sigma=np.zeros((nx, ny, nz), dtype=np.float32),
        pec_ex=np.zeros((nx, ny + 1), dtype=bool),
        pec_ey=np.zeros((nx + 1, ny), dtype=bool),
        k_sheet=0,
    )
    return domain, materials
