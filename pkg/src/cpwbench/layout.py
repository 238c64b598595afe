"""Parametric geometry of the CPW-fed slotted rectangular monopole.

Geometry convention (all coordinates in meters, z out of the board):

* the board occupies x in [-board_width/2, board_width/2],
  y in [0, board_height]; metallization sits on the substrate top face;
* the feed strip is centered on x = 0 and runs from y = 0 to
  y = feed_length, flanked by two gaps of width feed_gap and two
  ground rectangles (ground_width wide, ground_height tall each);
* the radiating pattern is a rectangle centered on x = 0 from
  y = feed_length to y = feed_length + pattern_height, with a
  rectangular slot cut out of it; slot_offset_x/y locate the slot's
  lower-left corner relative to the pattern's lower-left corner.

Layouts are immutable; parameter edits go through
:func:`with_parameter`, which re-validates the result.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum

from cpwbench.cpw import CpwCrossSection, Substrate, guide_wavelength

__all__ = [
    "AntennaLayout",
    "LayoutError",
    "LayoutReport",
    "TuningHint",
    "EffectTarget",
    "initial_pattern_length",
    "validate_layout",
    "with_parameter",
    "tuning_hint",
    "tuning_hints",
    "reference_layout",
    "SWEEPABLE_FIELDS",
]


class LayoutError(ValueError):
    """Raised when an edit would produce an invalid layout."""

    def __init__(self, report: "LayoutReport"):
        self.report = report
        super().__init__("; ".join(f"{f}: {m}" for f, m in report.violations))


@dataclass(frozen=True)
class LayoutReport:
    violations: tuple[tuple[str, str], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class AntennaLayout:
    """Full metallization geometry of the antenna, lengths in meters."""

    pattern_width: float
    pattern_height: float
    slot_width: float
    slot_height: float
    slot_offset_x: float
    slot_offset_y: float
    ground_width: float
    ground_height: float
    feed_strip_width: float
    feed_gap: float
    feed_length: float
    board_width: float
    board_height: float
    substrate: Substrate

    def feed_cross_section(self) -> CpwCrossSection:
        return CpwCrossSection(self.feed_strip_width, self.feed_gap, self.substrate)

    # derived rectangles (x0, y0, x1, y1), used by validation and rasterization
    def pattern_rect(self) -> tuple[float, float, float, float]:
        return (
            -self.pattern_width / 2,
            self.feed_length,
            self.pattern_width / 2,
            self.feed_length + self.pattern_height,
        )

    def slot_rect(self) -> tuple[float, float, float, float]:
        px0, py0, _, _ = self.pattern_rect()
        return (
            px0 + self.slot_offset_x,
            py0 + self.slot_offset_y,
            px0 + self.slot_offset_x + self.slot_width,
            py0 + self.slot_offset_y + self.slot_height,
        )

    def strip_rect(self) -> tuple[float, float, float, float]:
        return (-self.feed_strip_width / 2, 0.0, self.feed_strip_width / 2, self.feed_length)

    def ground_rects(self) -> tuple[tuple[float, float, float, float], ...]:
        inner = self.feed_strip_width / 2 + self.feed_gap
        return (
            (-inner - self.ground_width, 0.0, -inner, self.ground_height),
            (inner, 0.0, inner + self.ground_width, self.ground_height),
        )


_POSITIVE_FIELDS = (
    "pattern_width",
    "pattern_height",
    "slot_width",
    "slot_height",
    "slot_offset_x",
    "slot_offset_y",
    "ground_width",
    "ground_height",
    "feed_strip_width",
    "feed_gap",
    "feed_length",
    "board_width",
    "board_height",
)


def validate_layout(layout: AntennaLayout) -> LayoutReport:
    """Check every geometric invariant; violations are data, not faults."""
    bad: list[tuple[str, str]] = []
    for name in _POSITIVE_FIELDS:
        if not getattr(layout, name) > 0.0:
            bad.append((name, "non-positive dimension"))
    if bad:
        return LayoutReport(tuple(bad))

    lay = layout
    if lay.slot_offset_x + lay.slot_width >= lay.pattern_width or lay.slot_offset_y + lay.slot_height >= lay.pattern_height:
        bad.append(("slot_width", "slot exceeds pattern"))
    cpw_span = lay.feed_strip_width + 2 * lay.feed_gap + 2 * lay.ground_width
    if cpw_span > lay.board_width:
        bad.append(("ground_width", "feed strip + gaps + grounds wider than board"))
    if lay.pattern_width > lay.board_width:
        bad.append(("pattern_width", "pattern wider than board"))
    if lay.feed_length + lay.pattern_height > lay.board_height:
        bad.append(("pattern_height", "pattern extends past board top"))
    if lay.ground_height > lay.feed_length:
        bad.append(("ground_height", "grounds overlap the pattern region"))
    if lay.ground_height > lay.board_height:
        bad.append(("ground_height", "ground taller than board"))
    return LayoutReport(tuple(bad))


# fields accepted by with_parameter / sweep configs; substrate properties
# are flattened so a sweep can ramp them like any geometric knob
SWEEPABLE_FIELDS = _POSITIVE_FIELDS + (
    "substrate_permittivity",
    "substrate_thickness",
    "substrate_loss_tangent",
)


def with_parameter(layout: AntennaLayout, field: str, value: float) -> AntennaLayout:
    """Pure single-field edit; raises LayoutError if the result is invalid."""
    if field not in SWEEPABLE_FIELDS:
        raise KeyError(f"unknown layout field {field!r}; valid: {', '.join(SWEEPABLE_FIELDS)}")
    if field.startswith("substrate_"):
        sub_field = field.removeprefix("substrate_")
        sub_field = {"permittivity": "relative_permittivity"}.get(sub_field, sub_field)
        try:
            new_sub = dataclasses.replace(layout.substrate, **{sub_field: value})
        except ValueError as exc:
            raise LayoutError(LayoutReport(((field, str(exc)),))) from exc
        new = dataclasses.replace(layout, substrate=new_sub)
    else:
        new = dataclasses.replace(layout, **{field: value})
    report = validate_layout(new)
    if not report.ok:
        raise LayoutError(report)
    return new


class EffectTarget(Enum):
    LOWER_BAND_FREQUENCY = "lower_band_frequency"
    UPPER_BAND_FREQUENCY = "upper_band_frequency"
    BOTH_FREQUENCIES = "both_frequencies"
    RETURN_LOSS_DEPTH = "return_loss_depth"
    IMPEDANCE_MATCH = "impedance_match"


@dataclass(frozen=True)
class TuningHint:
    """Qualitative effect of increasing one layout parameter."""

    parameter: str
    affects: tuple[EffectTarget, ...]
    direction: str  # monotonic sense for the first target, or "unspecified"


# One entry per swept knob.  Directions are recorded only where they
# are empirically established for this antenna family; the
# pattern_height direction (shorter pattern -> lower bands) runs
# against the usual shorter-resonator intuition - treat it as
# observational.
_TUNING_TABLE = {
    "ground_height": TuningHint(
        "ground_height",
        (EffectTarget.LOWER_BAND_FREQUENCY, EffectTarget.IMPEDANCE_MATCH),
        "unspecified",
    ),
    "pattern_width": TuningHint(
        "pattern_width", (EffectTarget.UPPER_BAND_FREQUENCY,), "unspecified"
    ),
    "pattern_height": TuningHint(
        "pattern_height", (EffectTarget.BOTH_FREQUENCIES,), "increasing height raises both bands"
    ),
    "slot_height": TuningHint(
        "slot_height", (EffectTarget.RETURN_LOSS_DEPTH, EffectTarget.BOTH_FREQUENCIES), "unspecified"
    ),
    "slot_width": TuningHint(
        "slot_width", (EffectTarget.RETURN_LOSS_DEPTH, EffectTarget.BOTH_FREQUENCIES), "unspecified"
    ),
    "substrate_permittivity": TuningHint(
        "substrate_permittivity",
        (EffectTarget.BOTH_FREQUENCIES, EffectTarget.RETURN_LOSS_DEPTH),
        "increasing permittivity lowers the centre frequencies",
    ),
}


def tuning_hint(field: str) -> TuningHint:
    """Qualitative tuning knowledge for one swept parameter."""
    try:
        return _TUNING_TABLE[field]
    except KeyError:
        raise KeyError(f"no tuning hint recorded for {field!r}") from None


def tuning_hints() -> tuple[TuningHint, ...]:
    return tuple(_TUNING_TABLE.values())


def initial_pattern_length(lower_band_hz: float, substrate: Substrate) -> float:
    """Quarter guide wavelength seed for the radiating pattern height."""
    return guide_wavelength(lower_band_hz, substrate) / 4.0


def reference_layout() -> AntennaLayout:
    """The committed reference dual-band layout (see data/reference_layout.cfg)."""
    from importlib.resources import files

    from cpwbench.configio import parse_layout_config

    text = files("cpwbench.data").joinpath("reference_layout.cfg").read_text()
    return parse_layout_config(text)
