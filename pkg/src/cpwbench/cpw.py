"""Closed-form coplanar-waveguide transmission-line math.

Characteristic impedance of a CPW on a thin dielectric:

    Z0 = (30*pi / sqrt(eps_eff)) * K(k') / K(k)

with modulus ``k = s / (w + s)`` (``w`` strip width, ``s`` gap),
complementary modulus ``k' = sqrt(1 - k^2)``, complete elliptic
integral ``K``, and ``eps_eff = (eps_sub + 1) / 2``.

Note on the modulus convention: the ``s/(w+s)`` form used here follows
the design procedure this package reproduces.  The more common
conformal-mapping result for a CPW on a thick substrate uses
``k = w/(w + 2s)``; with that convention Z0 *increases* with the gap,
with this one it *decreases*.  Callers synthesizing a geometry should
not assume one direction - :func:`synthesize_gap_for_impedance`
brackets the root without a sign assumption.

All lengths are meters, frequencies Hz, impedances ohms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from cpwbench.units import C0

__all__ = [
    "Substrate",
    "CpwCrossSection",
    "complete_elliptic_integral",
    "complementary_modulus",
    "cpw_modulus",
    "effective_permittivity",
    "characteristic_impedance",
    "synthesize_gap_for_impedance",
    "guide_wavelength",
    "SynthesisInfeasibleError",
]


class SynthesisInfeasibleError(ValueError):
    """Target impedance is not reachable inside the search bracket."""


@dataclass(frozen=True)
class Substrate:
    """Lossy dielectric substrate.

    relative_permittivity : dimensionless, >= 1 (1 = free space)
    thickness : m
    loss_tangent : dimensionless, in [0, 1)
    """

    relative_permittivity: float
    thickness: float
    loss_tangent: float = 0.0

    def __post_init__(self):
        if not self.relative_permittivity >= 1.0:
            raise ValueError(
                f"relative_permittivity must be >= 1, got {self.relative_permittivity}"
            )
        if not self.thickness > 0.0:
            raise ValueError(f"thickness must be > 0, got {self.thickness}")
        if not 0.0 <= self.loss_tangent < 1.0:
            raise ValueError(f"loss_tangent must be in [0, 1), got {self.loss_tangent}")


@dataclass(frozen=True)
class CpwCrossSection:
    """CPW cross-section: center strip of width ``strip_width`` separated
    from coplanar grounds by gaps of width ``gap`` (both in meters)."""

    strip_width: float
    gap: float
    substrate: Substrate

    def __post_init__(self):
        if not self.strip_width > 0.0:
            raise ValueError(f"strip_width must be > 0, got {self.strip_width}")
        if not self.gap > 0.0:
            raise ValueError(f"gap must be > 0, got {self.gap}")


def complete_elliptic_integral(k: float) -> float:
    """Complete elliptic integral of the first kind K(k).

    Evaluated by the arithmetic-geometric mean: with a0 = 1,
    b0 = sqrt(1 - k^2), the AGM limit M(a0, b0) gives
    K = pi / (2 M).  Quadratic convergence; relative accuracy is at
    machine level for any k in [0, 1).

    Raises ValueError for k < 0 or k >= 1 (K diverges at k = 1).
    """
    if not 0.0 <= k < 1.0:
        raise ValueError(f"elliptic modulus must satisfy 0 <= k < 1, got {k}")
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    # quadratic convergence: machine precision in well under 30 rounds;
    # the iteration cap guards against a last-ulp oscillation
    for _ in range(30):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def complementary_modulus(k: float) -> float:
    """k' = sqrt(1 - k^2) for k in [0, 1]."""
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"modulus must satisfy 0 <= k <= 1, got {k}")
    return math.sqrt((1.0 - k) * (1.0 + k))


def cpw_modulus(cross_section: CpwCrossSection) -> float:
    """Geometric modulus k = s / (w + s), strictly inside (0, 1)."""
    w, s = cross_section.strip_width, cross_section.gap
    return s / (w + s)


def effective_permittivity(substrate: Substrate) -> float:
    """eps_eff = (eps_sub + 1) / 2 for a mode straddling air and substrate."""
    return 0.5 * (substrate.relative_permittivity + 1.0)


def characteristic_impedance(cross_section: CpwCrossSection) -> float:
    """CPW characteristic impedance in ohms."""
    k = cpw_modulus(cross_section)
    kp = complementary_modulus(k)
    eps_eff = effective_permittivity(cross_section.substrate)
    return (30.0 * math.pi / math.sqrt(eps_eff)) * (
        complete_elliptic_integral(kp) / complete_elliptic_integral(k)
    )


def synthesize_gap_for_impedance(
    strip_width: float,
    substrate: Substrate,
    target_z0: float,
    tolerance: float = 0.01,
) -> float:
    """Find the gap s giving the target characteristic impedance.

    Bracketed bisection over s in [0.1 um, 10 * strip_width]; stops when
    |Z0(w, s) - target| <= tolerance (ohms).  Z0 is strictly monotonic
    in s (decreasing under the s/(w+s) modulus convention), so a sign
    change over the bracket is necessary and sufficient.

    Raises SynthesisInfeasibleError when the target lies outside the
    impedance range achievable over the bracket.
    """
    if strip_width <= 0:
        raise ValueError(f"strip_width must be > 0, got {strip_width}")
    s_lo, s_hi = 0.1e-6, 10.0 * strip_width

    def z0(s: float) -> float:
        return characteristic_impedance(CpwCrossSection(strip_width, s, substrate))

    f_lo = z0(s_lo) - target_z0
    f_hi = z0(s_hi) - target_z0
    if f_lo * f_hi > 0.0:
        raise SynthesisInfeasibleError(
            f"target {target_z0:.3f} ohm outside achievable range "
            f"[{min(z0(s_lo), z0(s_hi)):.3f}, {max(z0(s_lo), z0(s_hi)):.3f}] ohm "
            f"for strip_width={strip_width:.6g} m"
        )
    for _ in range(200):
        s_mid = 0.5 * (s_lo + s_hi)
        f_mid = z0(s_mid) - target_z0
        if abs(f_mid) <= tolerance:
            return s_mid
        if f_lo * f_mid <= 0.0:
            s_hi = s_mid
        else:
            s_lo, f_lo = s_mid, f_mid
    raise SynthesisInfeasibleError("bisection failed to converge")  # pragma: no cover


def guide_wavelength(frequency: float, substrate: Substrate) -> float:
    """Guide wavelength lambda_g = c / (f * sqrt(eps_eff)), in meters."""
    if frequency <= 0.0:
        raise ValueError(f"frequency must be > 0, got {frequency}")
    return C0 / (frequency * math.sqrt(effective_permittivity(substrate)))
