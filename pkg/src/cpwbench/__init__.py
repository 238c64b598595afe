"""CPW-fed dual-band printed monopole antenna workbench.

Closed-form coplanar-waveguide synthesis, conductive-ink printability
checks, and a full-wave time-domain field solver for S11, surface
currents and far-field gain of planar antenna layouts.
"""

__version__ = "0.1.0"

from cpwbench.cpw import (
    CpwCrossSection,
    Substrate,
    characteristic_impedance,
    complete_elliptic_integral,
    effective_permittivity,
    guide_wavelength,
    synthesize_gap_for_impedance,
)
from cpwbench.ink import InkProperties, PrinterConfig, assess_printability, ohnesorge_number
from cpwbench.layout import AntennaLayout, reference_layout, validate_layout

__all__ = [
    "AntennaLayout",
    "CpwCrossSection",
    "InkProperties",
    "PrinterConfig",
    "Substrate",
    "assess_printability",
    "characteristic_impedance",
    "complete_elliptic_integral",
    "effective_permittivity",
    "guide_wavelength",
    "ohnesorge_number",
    "reference_layout",
    "synthesize_gap_for_impedance",
    "validate_layout",
]
