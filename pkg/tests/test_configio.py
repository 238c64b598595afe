"""Config parsing, serialization, and interchange-file round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpwbench.configio import (
    ConfigError,
    parse_design_config,
    parse_ink_config,
    parse_layout_config,
    read_s11_csv,
    read_touchstone,
    serialize_layout,
    write_s11_csv,
    write_touchstone,
    load_field_snapshot,
    save_field_snapshot,
)
from cpwbench.layout import reference_layout

VALID_LAYOUT = """
pattern_width = 24 mm
pattern_height = 20 mm
slot_width = 18 mm
slot_height = 8 mm
slot_offset_x = 3 mm
slot_offset_y = 4 mm
ground_width = 11 mm
ground_height = 5 mm
feed_strip_width = 2.8 mm
feed_gap = 0.2 mm
feed_length = 5.5 mm
board_width = 26 mm
board_height = 36 mm
substrate_permittivity = 3.2
substrate_thickness = 220 um
substrate_loss_tangent = 0.05
"""

VALID_INK = """
viscosity = 3.2 mPa.s
surface_tension = 44.7 mN/m
density = 1.2 g/ml
nozzle_diameter = 200 um
contact_angle = 45 deg
"""

VALID_DESIGN = """
substrate_permittivity = 3.2
substrate_thickness = 0.22 mm
frequency = 2.4 GHz
strip_width = 2.8 mm
target_impedance = 50 ohm
"""


class TestLayoutConfig:
    def test_parse_valid(self):
        layout = parse_layout_config(VALID_LAYOUT)
        assert layout.pattern_width == pytest.approx(24e-3)
        assert layout.substrate.thickness == pytest.approx(220e-6)
        assert layout.substrate.relative_permittivity == 3.2

    def test_units_are_converted(self):
        a = parse_layout_config(VALID_LAYOUT)
        b = parse_layout_config(VALID_LAYOUT.replace("220 um", "0.22 mm"))
        assert a.substrate.thickness == pytest.approx(b.substrate.thickness, rel=1e-12)

    def test_serialize_round_trip(self):
        layout = reference_layout()
        again = parse_layout_config(serialize_layout(layout))
        assert again == layout

    def test_missing_key(self):
        text = VALID_LAYOUT.replace("board_width = 26 mm", "")
        with pytest.raises(ConfigError, match="board_width"):
            parse_layout_config(text)

    def test_unknown_key_reports_line(self):
        text = VALID_LAYOUT + "bogus_key = 3 mm\n"
        with pytest.raises(ConfigError) as err:
            parse_layout_config(text)
        assert err.value.line is not None

    def test_bad_unit(self):
        with pytest.raises(ConfigError):
            parse_layout_config(VALID_LAYOUT.replace("24 mm", "24 furlongs"))

    def test_comments_and_blank_lines_ignored(self):
        layout = parse_layout_config("# hi\n\n" + VALID_LAYOUT + "\n# bye\n")
        assert layout.pattern_height == pytest.approx(20e-3)


class TestInkConfig:
    def test_parse_valid(self):
        ink, printer, angle = parse_ink_config(VALID_INK)
        assert ink.viscosity_mpas == pytest.approx(3.2)
        assert printer.nozzle_diameter_um == pytest.approx(200.0)
        assert angle == pytest.approx(45.0)

    def test_missing_key(self):
        with pytest.raises(ConfigError):
            parse_ink_config(VALID_INK.replace("density = 1.2 g/ml", ""))


class TestDesignConfig:
    def test_parse_valid(self):
        spec = parse_design_config(VALID_DESIGN)
        assert spec.frequency_hz == pytest.approx(2.4e9)
        assert spec.strip_width == pytest.approx(2.8e-3)
        assert spec.target_impedance == pytest.approx(50.0)

    def test_default_impedance(self):
        spec = parse_design_config(VALID_DESIGN.replace("target_impedance = 50 ohm", ""))
        assert spec.target_impedance == 50.0


class TestParserFuzz:
    """The parsers must reject malformed input with ConfigError (or a
    ValueError from value validation) — never crash any other way."""

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=300))
    def test_layout_parser_total(self, text):
        try:
            parse_layout_config(text)
        except ValueError:
            pass

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=200))
    def test_ink_parser_total(self, text):
        try:
            parse_ink_config(text)
        except ValueError:
            pass

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.sampled_from(
                    ["pattern_width", "feed_gap", "bogus", "substrate_permittivity"]
                ),
                st.floats(allow_nan=True, allow_infinity=True),
                st.sampled_from(["mm", "um", "", "GHz"]),
            ),
            max_size=8,
        )
    )
    def test_structured_garbage(self, entries):
        text = "\n".join(f"{k} = {v} {u}" for k, v, u in entries)
        try:
            parse_layout_config(text)
        except ValueError:
            pass


class TestTouchstone:
    def test_bit_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        freqs = np.linspace(1e9, 8e9, 101)
        s11 = rng.standard_normal(101) + 1j * rng.standard_normal(101)
        p1, p2 = tmp_path / "a.s1p", tmp_path / "b.s1p"
        write_touchstone(p1, freqs, s11, comments=("reference sweep",))
        f2, s2 = read_touchstone(p1)
        assert np.array_equal(f2, freqs)
        assert np.array_equal(s2, s11)
        write_touchstone(p2, f2, s2, comments=("reference sweep",))
        assert p1.read_bytes() == p2.read_bytes()

    def test_header_present(self, tmp_path):
        p = tmp_path / "a.s1p"
        write_touchstone(p, [1e9, 2e9], [0.1 + 0.2j, 0.3 - 0.4j])
        assert "# HZ S RI R 50" in p.read_text()

    def test_shape_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            write_touchstone(tmp_path / "a.s1p", [1e9, 2e9], [0.1])


class TestS11Csv:
    def test_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(11)
        freqs = np.linspace(1e9, 8e9, 64)
        s11 = 0.9 * (rng.standard_normal(64) + 1j * rng.standard_normal(64))
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_s11_csv(p1, freqs, s11)
        f, mag_db, phase = read_s11_csv(p1)
        assert np.array_equal(f, freqs)
        assert np.array_equal(mag_db, 20 * np.log10(np.abs(s11)))
        assert np.array_equal(phase, np.rad2deg(np.angle(s11)))
        write_s11_csv(p2, freqs, s11)
        assert p1.read_bytes() == p2.read_bytes()


class TestFieldSnapshot:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        arr = rng.standard_normal((4, 5, 6)).astype(np.float32)
        p = tmp_path / "snap.bin"
        dx, dy, dz = np.full(4, 1e-3), np.full(5, 2e-3), np.full(6, 0.5e-3)
        save_field_snapshot(p, arr, (dx, dy, dz), "ez", step=120)
        back, spacings, component, step = load_field_snapshot(p)
        assert np.array_equal(back, arr)
        assert all(np.array_equal(a, b) for a, b in zip(spacings, (dx, dy, dz)))
        assert component == "ez"
        assert step == 120
