"""Command-line front end.

The CLI is a thin client of the HTTP service: by default it spins up
the app in-process (no network), and ``--server URL`` points it at a
running instance instead.  All heavy lifting — parsing, synthesis, the
field solver — happens behind the service endpoints, so the CLI only
reads config files, shapes requests, and writes report files.

Exit codes: 0 success, 2 bad configuration or arguments, 3 solver
fault, 4 synthesis infeasible.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from cpwbench.configio import atomic_write_text, write_s11_csv, write_touchstone

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INFEASIBLE = 4

_KIND_CODES = {"config": EXIT_CONFIG, "solver": EXIT_SOLVER, "infeasible": EXIT_INFEASIBLE}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _make_client(server: str | None):
    """In-process test client by default, HTTP client when --server is set."""
    if server:
        import httpx

        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from starlette.testclient import TestClient

    from cpwbench.service import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(client, endpoint: str, payload: dict) -> dict:
    resp = client.post(endpoint, json=payload)
    if resp.status_code == 200:
        return resp.json()
    try:
        body = resp.json()
    except ValueError:
        raise CliError(f"server error ({resp.status_code}): {resp.text}", EXIT_SOLVER)
    detail = body.get("detail", resp.text)
    if isinstance(detail, list):  # pydantic request validation
        detail = "; ".join(str(d.get("msg", d)) for d in detail)
        return _fail(detail, EXIT_CONFIG)
    code = _KIND_CODES.get(body.get("kind", ""), EXIT_SOLVER)
    raise CliError(str(detail), code)


def _fail(message: str, code: int):
    raise CliError(message, code)


def _read_config(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_CONFIG) from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_design(args, client) -> int:
    body = _post(client, "/design", {"config": _read_config(args.config)})
    lines = [
        "feed-line design report",
        f"  effective permittivity   {body['effective_permittivity']:.6g}",
        f"  guide wavelength         {body['guide_wavelength_m'] * 1e3:.3f} mm",
        f"  quarter-wave seed length {body['seed_length_m'] * 1e3:.3f} mm",
        f"  strip width              {body['strip_width_m'] * 1e3:.3f} mm",
        f"  target impedance         {body['target_impedance_ohm']:.2f} ohm",
        f"  synthesized gap          {body['synthesized_gap_m'] * 1e3:.4f} mm",
    ]
    text = "\n".join(lines) + "\n"
    print(text, end="")
    out = _out_dir(args)
    atomic_write_text(out / "design.txt", text)
    csv = (
        "effective_permittivity,guide_wavelength_m,seed_length_m,"
        "strip_width_m,target_impedance_ohm,synthesized_gap_m\n"
        f"{body['effective_permittivity']:.17g},{body['guide_wavelength_m']:.17g},"
        f"{body['seed_length_m']:.17g},{body['strip_width_m']:.17g},"
        f"{body['target_impedance_ohm']:.17g},{body['synthesized_gap_m']:.17g}\n"
    )
    atomic_write_text(out / "design.csv", csv)
    return EXIT_OK


def cmd_check_ink(args, client) -> int:
    body = _post(client, "/check-ink", {"config": _read_config(args.config)})
    lines = [f"Ohnesorge number: {body['ohnesorge']:.3g}"]
    for check in body["checks"]:
        lines.append(
            f"  {check['name']:<16} {check['value']:>10.4g}  "
            f"{check['window']}  {check['status'].upper()}"
        )
    lines.append(f"printable: {'yes' if body['printable'] else 'no'}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    atomic_write_text(_out_dir(args) / "ink_report.txt", text)
    return EXIT_OK


def _resonance_table(resonances: list[dict]) -> str:
    if not resonances:
        return "no resonances below -10 dB\n"
    lines = ["frequency_ghz  depth_db  bandwidth_ghz"]
    for r in resonances:
        lines.append(
            f"{r['frequency_hz'] / 1e9:13.4f}  {r['depth_db']:8.2f}  "
            f"{r['bandwidth_hz'] / 1e9:13.4f}"
        )
    return "\n".join(lines) + "\n"


def cmd_simulate(args, client) -> int:
    payload = {
        "config": _read_config(args.config),
        "resolution": args.resolution,
        "fmin_hz": args.fmin * 1e9,
        "fmax_hz": args.fmax * 1e9,
        "f_points": args.fpoints,
    }
    body = _post(client, "/simulate", payload)
    out = _out_dir(args)
    name = Path(args.config).stem or "antenna"
    freqs = body["frequencies_hz"]
    s11 = [complex(re, im) for re, im in zip(body["s11_real"], body["s11_imag"])]
    write_touchstone(out / f"{name}.s1p", freqs, s11)
    write_s11_csv(out / "s11.csv", freqs, s11)
    table = _resonance_table(body["resonances"])
    print(table, end="")
    atomic_write_text(out / "resonances.txt", table)
    return EXIT_OK


def cmd_sweep(args, client) -> int:
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(f"bad --values: {exc}", EXIT_CONFIG) from exc
    payload = {
        "config": _read_config(args.config),
        "parameter": args.param,
        "values": values,
        "resolution": args.resolution,
        "fmin_hz": args.fmin * 1e9,
        "fmax_hz": args.fmax * 1e9,
        "f_points": args.fpoints,
        "jobs": args.jobs,
    }
    body = _post(client, "/sweep", payload)
    out = _out_dir(args)
    freqs = body["frequencies_hz"]

    csv_lines = [
        "value,f_low_hz,depth_low_db,bandwidth_low_hz,f_high_hz,depth_high_db,bandwidth_high_hz"
    ]
    for row in body["rows"]:
        s11 = [complex(re, im) for re, im in zip(row["s11_real"], row["s11_imag"])]
        point_dir = out / f"{args.param}={row['value']:g}"
        point_dir.mkdir(parents=True, exist_ok=True)
        write_touchstone(point_dir / "antenna.s1p", freqs, s11)
        write_s11_csv(point_dir / "s11.csv", freqs, s11)
        res = row["resonances"]
        low = res[0] if res else None
        high = res[-1] if len(res) >= 2 else None

        def cell(r, key):
            return f"{r[key]:.17g}" if r else ""

        csv_lines.append(
            f"{row['value']:.17g},"
            f"{cell(low, 'frequency_hz')},{cell(low, 'depth_db')},{cell(low, 'bandwidth_hz')},"
            f"{cell(high, 'frequency_hz')},{cell(high, 'depth_db')},{cell(high, 'bandwidth_hz')}"
        )
    atomic_write_text(out / "sweep.csv", "\n".join(csv_lines) + "\n")
    summary = (
        f"parameter: {body['parameter']}\n"
        f"lower-band trend: {body['trend_f_low']}\n"
        f"upper-band trend: {body['trend_f_high']}\n"
    )
    print(summary, end="")
    atomic_write_text(out / "trends.txt", summary)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpwbench",
        description="CPW-fed dual-band monopole design and simulation workbench",
    )
    parser.add_argument("--server", default=None, help="URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to a key-value config file")
        p.add_argument("--out", default=".", help="output directory (default: .)")

    def band(p):
        p.add_argument("--resolution", type=float, default=10.0, help="fine-region cells per mm")
        p.add_argument("--fmin", type=float, default=1.0, help="sweep start, GHz")
        p.add_argument("--fmax", type=float, default=8.0, help="sweep stop, GHz")
        p.add_argument("--fpoints", type=int, default=401, help="frequency points")

    p = sub.add_parser("design", help="closed-form feed-line design report")
    common(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("check-ink", help="ink printability assessment")
    common(p)
    p.set_defaults(func=cmd_check_ink)

    p = sub.add_parser("simulate", help="full-wave S11 characterization of a layout")
    common(p)
    band(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="re-simulate while ramping one layout parameter")
    common(p)
    band(p)
    p.add_argument("--param", required=True, help="layout field to ramp")
    p.add_argument("--values", required=True, help="comma-separated values (SI units)")
    p.add_argument("--jobs", type=int, default=1, help="parallel solver processes")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    client = _make_client(args.server)
    try:
        return args.func(args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
