"""HTTP service exposing the workbench: design, simulate, sweep, ink.

The CLI talks to this app (in-process by default); the endpoints carry
the same key-value config texts the CLI accepts on disk.  Errors are
mapped to a machine-readable ``kind`` so clients can translate them to
exit codes: ``config`` (bad input), ``infeasible`` (synthesis has no
solution), ``solver`` (numerical fault).
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

import cpwbench
from cpwbench.configio import ConfigError, parse_design_config, parse_ink_config, parse_layout_config
from cpwbench.cpw import (
    SynthesisInfeasibleError,
    effective_permittivity,
    guide_wavelength,
    synthesize_gap_for_impedance,
)
from cpwbench.fdtd.solver import InstabilityError
from cpwbench.ink import assess_printability
from cpwbench.layout import LayoutError
from cpwbench.pipeline import SolverSettings, simulate_antenna, sweep_parameter

__all__ = ["app", "create_app"]


class DesignRequest(BaseModel):
    config: str


class DesignResponse(BaseModel):
    effective_permittivity: float
    guide_wavelength_m: float
    seed_length_m: float
    strip_width_m: float
    target_impedance_ohm: float
    synthesized_gap_m: float


class InkRequest(BaseModel):
    config: str


class CriterionModel(BaseModel):
    name: str
    value: float
    status: str
    window: str


class InkResponse(BaseModel):
    ohnesorge: float
    printable: bool
    checks: list[CriterionModel]


class SimulateRequest(BaseModel):
    config: str
    resolution: float = 10.0
    fmin_hz: float = 1e9
    fmax_hz: float = 8e9
    f_points: int = Field(default=401, ge=2)
    monitor_frequencies_hz: list[float] = []
    max_steps: int = 30000


class ResonanceModel(BaseModel):
    frequency_hz: float
    depth_db: float
    bandwidth_hz: float


class RegionStatsModel(BaseModel):
    frequency_hz: float
    pattern_mean: float
    vertical_limbs_mean: float
    bottom_limb_mean: float


class PatternModel(BaseModel):
    frequency_hz: float
    peak_gain_dbi: float
    radiated_power: float
    accepted_power: float


class SimulateResponse(BaseModel):
    frequencies_hz: list[float]
    s11_real: list[float]
    s11_imag: list[float]
    resonances: list[ResonanceModel]
    region_stats: list[RegionStatsModel]
    patterns: list[PatternModel]
    steps_incident: int
    steps_total: int


class SweepRequest(BaseModel):
    config: str
    parameter: str
    values: list[float] = Field(min_length=3)
    resolution: float = 10.0
    fmin_hz: float = 1e9
    fmax_hz: float = 8e9
    f_points: int = Field(default=401, ge=2)
    max_steps: int = 30000
    jobs: int = Field(default=1, ge=1)


class SweepRowModel(BaseModel):
    value: float
    resonances: list[ResonanceModel]
    s11_real: list[float]
    s11_imag: list[float]


class SweepResponse(BaseModel):
    parameter: str
    frequencies_hz: list[float]
    rows: list[SweepRowModel]
    trend_f_low: str
    trend_f_high: str


def _error(kind: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message, "kind": kind})


def create_app() -> FastAPI:
    app = FastAPI(title="cpwbench", version=cpwbench.__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return _error("config", str(exc), 422)

    @app.exception_handler(LayoutError)
    async def _layout_error(request: Request, exc: LayoutError):
        return _error("config", str(exc), 422)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        if isinstance(exc, SynthesisInfeasibleError):
            return _error("infeasible", str(exc), 422)
        return _error("config", str(exc), 422)

    @app.exception_handler(KeyError)
    async def _key_error(request: Request, exc: KeyError):
        return _error("config", str(exc.args[0]) if exc.args else "unknown key", 422)

    @app.exception_handler(InstabilityError)
    async def _solver_error(request: Request, exc: InstabilityError):
        return _error("solver", str(exc), 500)

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": cpwbench.__version__}

    @app.post("/design", response_model=DesignResponse)
    async def design(req: DesignRequest):
        spec = parse_design_config(req.config)
        eps_eff = effective_permittivity(spec.substrate)
        lam_g = guide_wavelength(spec.frequency_hz, spec.substrate)
        gap = synthesize_gap_for_impedance(
            spec.strip_width, spec.substrate, spec.target_impedance
        )
        return DesignResponse(
            effective_permittivity=eps_eff,
            guide_wavelength_m=lam_g,
            seed_length_m=lam_g / 4.0,
            strip_width_m=spec.strip_width,
            target_impedance_ohm=spec.target_impedance,
            synthesized_gap_m=gap,
        )

    @app.post("/check-ink", response_model=InkResponse)
    async def check_ink(req: InkRequest):
        ink, printer, angle = parse_ink_config(req.config)
        report = assess_printability(ink, printer, angle)
        return InkResponse(
            ohnesorge=report.ohnesorge,
            printable=report.printable,
            checks=[
                CriterionModel(
                    name=c.criterion, value=c.value, status=c.status, window=c.window
                )
                for c in report.checks
            ],
        )

    @app.post("/simulate", response_model=SimulateResponse)
    async def simulate(req: SimulateRequest):
        layout = parse_layout_config(req.config)
        settings = SolverSettings(
            resolution=req.resolution,
            fmin=req.fmin_hz,
            fmax=req.fmax_hz,
            f_points=req.f_points,
            max_steps=req.max_steps,
            monitor_frequencies=tuple(req.monitor_frequencies_hz),
        )
        result = simulate_antenna(layout, settings)
        return SimulateResponse(
            frequencies_hz=result.sweep.frequencies.tolist(),
            s11_real=result.sweep.s11.real.tolist(),
            s11_imag=result.sweep.s11.imag.tolist(),
            resonances=[
                ResonanceModel(
                    frequency_hz=r.frequency, depth_db=r.depth_db, bandwidth_hz=r.bandwidth
                )
                for r in result.resonances
            ],
            region_stats=[
                RegionStatsModel(
                    frequency_hz=s.frequency,
                    pattern_mean=s.pattern_mean,
                    vertical_limbs_mean=s.vertical_limbs_mean,
                    bottom_limb_mean=s.bottom_limb_mean,
                )
                for s in result.region_stats.values()
            ],
            patterns=[
                PatternModel(
                    frequency_hz=p.frequency,
                    peak_gain_dbi=p.peak_gain_dbi,
                    radiated_power=p.radiated_power,
                    accepted_power=p.accepted_power or 0.0,
                )
                for p in result.patterns.values()
            ],
            steps_incident=result.steps_incident,
            steps_total=result.steps_total,
        )

    @app.post("/sweep", response_model=SweepResponse)
    async def sweep(req: SweepRequest):
        layout = parse_layout_config(req.config)
        settings = SolverSettings(
            resolution=req.resolution,
            fmin=req.fmin_hz,
            fmax=req.fmax_hz,
            f_points=req.f_points,
            max_steps=req.max_steps,
        )
        report = sweep_parameter(layout, req.parameter, req.values, settings, jobs=req.jobs)
        return SweepResponse(
            parameter=report.parameter,
            frequencies_hz=settings.frequency_grid().tolist(),
            rows=[
                SweepRowModel(
                    value=row.value,
                    resonances=[
                        ResonanceModel(
                            frequency_hz=r.frequency,
                            depth_db=r.depth_db,
                            bandwidth_hz=r.bandwidth,
                        )
                        for r in row.resonances
                    ],
                    s11_real=res.sweep.s11.real.tolist(),
                    s11_imag=res.sweep.s11.imag.tolist(),
                )
                for row, res in zip(report.rows, report.results)
            ],
            trend_f_low=report.trend_f_low,
            trend_f_high=report.trend_f_high,
        )

    return app


app = create_app()
