"""Config parsing and result file formats.

Config files are flat ``name = value [unit]`` lines with ``#`` comments.
Lengths accept ``m | cm | mm | um``; other keys have a fixed unit (or
none) as listed in LAYOUT_KEYS / INK_KEYS.  Unknown keys are errors,
and every error names the offending line and key.

Result formats: Touchstone 1.0 one-port files (``# HZ S RI R 50``),
plain CSV (dot decimal separator, fixed column order), and flat binary
field snapshots with a self-describing text header.
"""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from cpwbench.cpw import Substrate
from cpwbench.layout import AntennaLayout, LayoutReport, validate_layout
from cpwbench.ink import InkProperties, PrinterConfig
from cpwbench.units import LENGTH_UNITS, MM

__all__ = [
    "ConfigError",
    "parse_layout_config",
    "serialize_layout",
    "parse_ink_config",
    "parse_design_config",
    "DesignSpec",
    "write_touchstone",
    "read_touchstone",
    "write_s11_csv",
    "read_s11_csv",
    "save_field_snapshot",
    "load_field_snapshot",
    "atomic_write_text",
]


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}" if line is not None else "config"
        if key:
            where += f", key {key!r}"
        super().__init__(f"{where}: {message}")


# key -> unit class: "length" (suffix required), "none" (bare number),
# or a tuple of accepted unit tokens whose first entry is canonical.
LAYOUT_KEYS: dict[str, str | tuple[str, ...]] = {
    "pattern_width": "length",
    "pattern_height": "length",
    "slot_width": "length",
    "slot_height": "length",
    "slot_offset_x": "length",
    "slot_offset_y": "length",
    "ground_width": "length",
    "ground_height": "length",
    "feed_strip_width": "length",
    "feed_gap": "length",
    "feed_length": "length",
    "board_width": "length",
    "board_height": "length",
    "substrate_permittivity": "none",
    "substrate_thickness": "length",
    "substrate_loss_tangent": "none",
}
LAYOUT_DEFAULTS = {"substrate_loss_tangent": 0.0}

DESIGN_KEYS: dict[str, str | tuple[str, ...]] = {
    "substrate_permittivity": "none",
    "substrate_thickness": "length",
    "frequency": ("GHz",),
    "strip_width": "length",
    "target_impedance": ("ohm",),
}
DESIGN_DEFAULTS = {"target_impedance": 50.0}

INK_KEYS: dict[str, str | tuple[str, ...]] = {
    "viscosity": ("mPa.s", "mPa*s"),
    "surface_tension": ("mN/m",),
    "density": ("g/ml",),
    "nozzle_diameter": "length",
    "contact_angle": ("deg",),
}


def _parse_entries(text: str, known: dict) -> dict[str, tuple[float, int]]:
    """Parse ``key = value unit`` lines; values returned in SI/canonical units."""
    out: dict[str, tuple[float, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'name = value unit'", line=lineno)
        key, _, rhs = (t.strip() for t in line.partition("="))
        if key not in known:
            raise ConfigError(
                f"unknown key; valid keys: {', '.join(sorted(known))}", line=lineno, key=key
            )
        if key in out:
            raise ConfigError("duplicate key", line=lineno, key=key)
        parts = rhs.split()
        if not parts:
            raise ConfigError("missing value", line=lineno, key=key)
        try:
            value = float(parts[0])
        except ValueError:
            raise ConfigError(f"malformed number {parts[0]!r}", line=lineno, key=key) from None
        unit = parts[1] if len(parts) > 1 else None
        spec = known[key]
        if spec == "length":
            if unit is None:
                raise ConfigError("missing length unit (m|cm|mm|um)", line=lineno, key=key)
            if unit not in LENGTH_UNITS:
                raise ConfigError(f"unknown length unit {unit!r}", line=lineno, key=key)
            value *= LENGTH_UNITS[unit]
        elif spec == "none":
            if unit is not None:
                raise ConfigError("dimensionless key takes no unit", line=lineno, key=key)
        else:
            if unit is None:
                raise ConfigError(f"missing unit, expected {spec[0]!r}", line=lineno, key=key)
            if unit not in spec:
                raise ConfigError(f"expected unit {spec[0]!r}, got {unit!r}", line=lineno, key=key)
        out[key] = (value, lineno)
    return out


def parse_layout_config(text: str) -> AntennaLayout:
    """Parse an antenna layout config; raises ConfigError on any problem."""
    entries = _parse_entries(text, LAYOUT_KEYS)
    values = {k: v for k, (v, _) in entries.items()}
    for key, default in LAYOUT_DEFAULTS.items():
        values.setdefault(key, default)
    missing = sorted(set(LAYOUT_KEYS) - set(values))
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    try:
        substrate = Substrate(
            relative_permittivity=values.pop("substrate_permittivity"),
            thickness=values.pop("substrate_thickness"),
            loss_tangent=values.pop("substrate_loss_tangent"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), key="substrate_permittivity") from exc
    layout = AntennaLayout(substrate=substrate, **values)
    report = validate_layout(layout)
    if not report.ok:
        field, msg = report.violations[0]
        line = entries.get(field, (0.0, None))[1]
        raise ConfigError(f"layout invariant violated: {msg}", line=line, key=field)
    return layout


def serialize_layout(layout: AntennaLayout, header: str | None = None) -> str:
    """Emit a layout config in millimeters at 1 um resolution."""
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    for key, spec in LAYOUT_KEYS.items():
        if key == "substrate_permittivity":
            buf.write(f"{key} = {layout.substrate.relative_permittivity:g}\n")
        elif key == "substrate_thickness":
            buf.write(f"{key} = {layout.substrate.thickness / MM:.3f} mm\n")
        elif key == "substrate_loss_tangent":
            buf.write(f"{key} = {layout.substrate.loss_tangent:g}\n")
        else:
            buf.write(f"{key} = {getattr(layout, key) / MM:.3f} mm\n")
    return buf.getvalue()


@dataclass(frozen=True)
class DesignSpec:
    """Inputs for the closed-form feed-line design report."""

    substrate: Substrate
    frequency_hz: float
    strip_width: float
    target_impedance: float


def parse_design_config(text: str) -> DesignSpec:
    """Parse a design config (substrate, band frequency, strip width)."""
    entries = _parse_entries(text, DESIGN_KEYS)
    values = {k: v for k, (v, _) in entries.items()}
    for key, default in DESIGN_DEFAULTS.items():
        values.setdefault(key, default)
    missing = sorted(set(DESIGN_KEYS) - set(values))
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    try:
        substrate = Substrate(
            relative_permittivity=values["substrate_permittivity"],
            thickness=values["substrate_thickness"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc), key="substrate_permittivity") from exc
    if values["frequency"] <= 0:
        raise ConfigError("frequency must be > 0", key="frequency")
    if values["target_impedance"] <= 0:
        raise ConfigError("target_impedance must be > 0", key="target_impedance")
    return DesignSpec(
        substrate=substrate,
        frequency_hz=values["frequency"] * 1e9,
        strip_width=values["strip_width"],
        target_impedance=values["target_impedance"],
    )


def parse_ink_config(text: str) -> tuple[InkProperties, PrinterConfig, float]:
    """Parse an ink config -> (ink, printer, contact angle in degrees)."""
    entries = _parse_entries(text, INK_KEYS)
    missing = sorted(set(INK_KEYS) - set(entries))
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    values = {k: v for k, (v, _) in entries.items()}
    ink = InkProperties(
        viscosity_mpas=values["viscosity"],
        surface_tension_mnm=values["surface_tension"],
        density_gml=values["density"],
    )
    printer = PrinterConfig(nozzle_diameter_um=values["nozzle_diameter"] / 1e-6)
    return ink, printer, values["contact_angle"]


# --------------------------------------------------------------------------
# Touchstone 1.0 (one-port)
# --------------------------------------------------------------------------

_FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


def write_touchstone(path: str, frequencies_hz, s11, comments: Iterable[str] = ()) -> None:
    """Write a one-port Touchstone 1.0 file (``# HZ S RI R 50``).

    Values are printed with %.17g so a read/write cycle through
    read_touchstone reproduces the file byte for byte.
    """
    freqs = np.asarray(frequencies_hz, dtype=float)
    s = np.asarray(s11, dtype=complex)
    if freqs.ndim != 1 or freqs.shape != s.shape:
        raise ValueError("frequencies and s11 must be 1-D arrays of equal length")
    if np.any(np.diff(freqs) <= 0):
        raise ValueError("frequencies must be strictly increasing")
    lines = [f"! {c}" for c in comments]
    lines.append("# HZ S RI R 50")
    for f, v in zip(freqs, s):
        lines.append(f"{f:.17g} {v.real:.17g} {v.imag:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_touchstone(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a one-port Touchstone file -> (frequencies_hz, complex s11)."""
    scale = 1.0
    fmt = "RI"
    freqs: list[float] = []
    vals: list[complex] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("!"):
                continue
            if line.startswith("#"):
                tokens = line[1:].upper().split()
                for i, tok in enumerate(tokens):
                    if tok in _FREQ_UNITS:
                        scale = _FREQ_UNITS[tok]
                    elif tok in ("RI", "MA", "DB"):
                        fmt = tok
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ValueError(f"malformed touchstone data line: {line!r}")
            f, a, b = float(parts[0]), float(parts[1]), float(parts[2])
            if fmt == "RI":
                v = complex(a, b)
            elif fmt == "MA":
                v = a * np.exp(1j * np.deg2rad(b))
            else:  # DB
                v = 10 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))
            freqs.append(f * scale)
            vals.append(v)
    return np.asarray(freqs), np.asarray(vals)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def write_s11_csv(path: str, frequencies_hz, s11) -> None:
    freqs = np.asarray(frequencies_hz, dtype=float)
    s = np.asarray(s11, dtype=complex)
    mag_db = 20.0 * np.log10(np.maximum(np.abs(s), 1e-300))
    phase = np.rad2deg(np.angle(s))
    lines = ["frequency_hz,magnitude_db,phase_deg"]
    for f, m, p in zip(freqs, mag_db, phase):
        lines.append(f"{f:.17g},{m:.17g},{p:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_s11_csv(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1], data[:, 2]


# --------------------------------------------------------------------------
# Field snapshots: text header + raw little-endian array
# --------------------------------------------------------------------------

_SNAPSHOT_MAGIC = "cpwbench-field 1"


def save_field_snapshot(path, array, spacings, component: str, step: int) -> None:
    """Dump one field component with grid spacing metadata.

    ``spacings`` is the (dx, dy, dz) triple of per-cell sizes in meters.
    """
    arr = np.ascontiguousarray(array, dtype="<f4")
    if arr.ndim != 3:
        raise ValueError("snapshot array must be 3-D")
    header = [
        _SNAPSHOT_MAGIC,
        f"component {component}",
        f"step {step}",
        "shape " + " ".join(str(n) for n in arr.shape),
        "dtype float32",
    ]
    for name, sp in zip(("dx", "dy", "dz"), spacings):
        header.append(name + " " + " ".join(f"{v:.17g}" for v in np.asarray(sp)))
    header.append("end")
    payload = ("\n".join(header) + "\n").encode() + arr.tobytes()
    _atomic_write_bytes(path, payload)


def load_field_snapshot(path):
    """Read a snapshot -> (array, (dx, dy, dz), component, step)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    head, _, rest = blob.partition(b"end\n")
    meta: dict[str, str] = {}
    lines = head.decode().splitlines()
    if lines[0] != _SNAPSHOT_MAGIC:
        raise ValueError(f"not a field snapshot: {lines[0]!r}")
    for line in lines[1:]:
        name, _, val = line.partition(" ")
        meta[name] = val
    shape = tuple(int(t) for t in meta["shape"].split())
    arr = np.frombuffer(rest, dtype="<f4").reshape(shape)
    spacings = tuple(
        np.array([float(t) for t in meta[name].split()]) for name in ("dx", "dy", "dz")
    )
    return arr, spacings, meta["component"], int(meta["step"])


# --------------------------------------------------------------------------
# atomic writes (write-temp-then-rename)
# --------------------------------------------------------------------------


def atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode())


def _atomic_write_bytes(path, payload: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
