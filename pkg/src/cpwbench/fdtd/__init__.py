"""Full-wave time-domain field solver on a staggered (Yee) grid.

Submodules: mesh (grid + rasterization), solver (leapfrog core + CPML
absorbing boundaries), ports (CPW excitation and probes), sparams
(S11 extraction), currents (surface-current maps), farfield
(near-to-far-field transform).
"""

from cpwbench.fdtd.mesh import MaterialGrid, ResolutionError, SimulationDomain, rasterize
from cpwbench.fdtd.solver import InstabilityError, Simulation
from cpwbench.fdtd.sparams import SParamSweep, extract_s11, resonances

__all__ = [
    "MaterialGrid",
    "ResolutionError",
    "SimulationDomain",
    "rasterize",
    "InstabilityError",
    "Simulation",
    "SParamSweep",
    "extract_s11",
    "resonances",
]
