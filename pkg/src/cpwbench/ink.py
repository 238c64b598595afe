"""Printability assessment for conductive nanoparticle inks.

The jetting behaviour of a drop-on-demand ink is characterised by the
Ohnesorge number

    Oh = eta / sqrt(sigma * rho * l)

(eta viscosity, sigma surface tension, rho density, l nozzle diameter,
all SI).  Good jettability windows used as defaults here:

    Oh in [0.1, 0.5], eta in [2, 20] mPa*s, sigma in [35, 70] mN/m,
    contact angle < 90 deg (warn below 20 deg: excessive spreading).

Worked reference value: a silver-nanoparticle ink with eta = 3.2 mPa*s,
sigma = 44.7 mN/m, rho = 1.2 g/ml at a 200 um nozzle gives

    Oh = 0.0032 / sqrt(0.0447 * 1200 * 2e-4) = 0.0309

which *fails* the 0.1 lower bound.  A figure of "approximately 0.14"
is sometimes quoted for this same ink; that number is not reproducible
from the stated parameters in SI units (it is consistent with a unit
slip, e.g. a nozzle diameter two decades smaller).  This module always
evaluates in SI and reports the discrepancy rather than hiding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "InkProperties",
    "PrinterConfig",
    "PrintabilityWindows",
    "CriterionCheck",
    "PrintabilityReport",
    "ohnesorge_number",
    "assess_printability",
]


@dataclass(frozen=True)
class InkProperties:
    """Ink rheology: viscosity in mPa*s, surface tension in mN/m,
    density in g/ml (the customary datasheet units)."""

    viscosity_mpas: float
    surface_tension_mnm: float
    density_gml: float

    def __post_init__(self):
        for name in ("viscosity_mpas", "surface_tension_mnm", "density_gml"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class PrinterConfig:
    """Drop-on-demand printer head: nozzle diameter in micrometers."""

    nozzle_diameter_um: float

    def __post_init__(self):
        if not self.nozzle_diameter_um > 0.0:
            raise ValueError(f"nozzle_diameter_um must be > 0, got {self.nozzle_diameter_um}")


@dataclass(frozen=True)
class PrintabilityWindows:
    """Acceptance windows; printer-class heuristics, overridable."""

    ohnesorge: tuple[float, float] = (0.1, 0.5)
    viscosity_mpas: tuple[float, float] = (2.0, 20.0)
    surface_tension_mnm: tuple[float, float] = (35.0, 70.0)
    contact_angle_max_deg: float = 90.0
    contact_angle_warn_deg: float = 20.0


@dataclass(frozen=True)
class CriterionCheck:
    criterion: str
    value: float
    window: str
    status: str  # "pass" | "warn" | "fail"


@dataclass(frozen=True)
class PrintabilityReport:
    ohnesorge: float
    checks: tuple[CriterionCheck, ...] = field(default=())

    @property
    def printable(self) -> bool:
        return all(c.status != "fail" for c in self.checks)


def ohnesorge_number(ink: InkProperties, printer: PrinterConfig) -> float:
    """Oh = eta / sqrt(sigma * rho * l), evaluated in SI units."""
    eta = ink.viscosity_mpas * 1e-3  # mPa*s -> Pa*s
    sigma = ink.surface_tension_mnm * 1e-3  # mN/m -> N/m
    rho = ink.density_gml * 1e3  # g/ml -> kg/m^3
    length = printer.nozzle_diameter_um * 1e-6  # um -> m
    return eta / math.sqrt(sigma * rho * length)


def _window_check(name: str, value: float, lo: float, hi: float, unit: str) -> CriterionCheck:
    status = "pass" if lo <= value <= hi else "fail"
    return CriterionCheck(name, value, f"[{lo:g}, {hi:g}] {unit}".rstrip(), status)


def assess_printability(
    ink: InkProperties,
    printer: PrinterConfig,
    contact_angle_deg: float,
    windows: PrintabilityWindows | None = None,
) -> PrintabilityReport:
    """Evaluate the four jettability/wetting criteria for an ink.

    Contact angle must be in (0, 180) degrees; angles at or above the
    hydrophobic limit fail, angles below the spreading threshold warn.
    """
    if not 0.0 < contact_angle_deg < 180.0:
        raise ValueError(f"contact angle must be in (0, 180) deg, got {contact_angle_deg}")
    win = windows or PrintabilityWindows()
    oh = ohnesorge_number(ink, printer)

    if contact_angle_deg >= win.contact_angle_max_deg:
        wetting_status = "fail"
    elif contact_angle_deg < win.contact_angle_warn_deg:
        wetting_status = "warn"
    else:
        wetting_status = "pass"

    checks = (
        _window_check("ohnesorge", oh, *win.ohnesorge, ""),
        _window_check("viscosity", ink.viscosity_mpas, *win.viscosity_mpas, "mPa*s"),
        _window_check("surface_tension", ink.surface_tension_mnm, *win.surface_tension_mnm, "mN/m"),
        CriterionCheck(
            "contact_angle",
            contact_angle_deg,
            f"[{win.contact_angle_warn_deg:g}, {win.contact_angle_max_deg:g}) deg",
            wetting_status,
        ),
    )
    return PrintabilityReport(ohnesorge=oh, checks=checks)
