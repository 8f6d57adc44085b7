"""Handlers package"""
from . import assembly, bounds, build, coloring, heat, potentials, run, spectra

ROUTERS = [
    build.router, coloring.router, potentials.router, assembly.router,
    spectra.router, heat.router, bounds.router, run.router,
]

__all__ = ["assembly", "bounds", "build", "coloring", "heat", "potentials", "run", "spectra", "ROUTERS"]
