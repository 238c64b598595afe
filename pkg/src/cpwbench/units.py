"""Unit constants and helpers.

All internal quantities are SI (meters, seconds, Hz, ohms, kg, ...).
User-facing files and reports use mm / um / GHz; every conversion goes
through the factors defined here so there is exactly one place where a
unit slip could live.
"""

import math

C0 = 299_792_458.0  # speed of light, m/s
EPS0 = 8.8541878128e-12  # vacuum permittivity, F/m
MU0 = 1.25663706212e-6  # vacuum permeability, H/m
ETA0 = math.sqrt(MU0 / EPS0)  # vacuum wave impedance, ohm

M = 1.0
MM = 1e-3
UM = 1e-6
GHZ = 1e9
MHZ = 1e6

# length-unit suffixes accepted in config files, factor to meters
LENGTH_UNITS = {"m": M, "mm": MM, "um": UM, "cm": 1e-2}


def mm(value_m: float) -> float:
    """Meters -> millimeters (for reports)."""
    return value_m / MM


def um(value_m: float) -> float:
    """Meters -> micrometers (for reports)."""
    return value_m / UM
