"""Services package"""
from .graph_service import graph_service
from .coloring_service import coloring_service
from .potential_service import potential_service
from .assembly_service import assembly_service
from .spectral_service import spectral_service
from .heat_service import heat_service
from .bounds_service import bounds_service


__all__ = [
    "graph_service",
    "coloring_service",
    "potential_service",
    "assembly_service",
    "spectral_service",
    "heat_service",
    "bounds_service",
]
