"""Domain models"""
from .forms import DofMap, FormPair, Splitting
from .graph import CombinatorialGraph, GraphStats, MetricGraph, ValidationReport
from .potential import EdgePotential, EdgeProfile, SequenceSummary, VertexPotential
from .reports import (
    BirmanSchwingerCheck,
    BoundReport,
    Count,
    DimensionFit,
    Eigenpairs,
    HeatProfile,
    Inertia,
    QuasiNorms,
    RatioTable,
    SpectralReport,
    TraceCheck,
)

__all__ = [
    "DofMap", "FormPair", "Splitting",
    "CombinatorialGraph", "MetricGraph", "GraphStats", "ValidationReport",
    "VertexPotential", "EdgeProfile", "EdgePotential", "SequenceSummary",
    "BirmanSchwingerCheck", "BoundReport", "Count", "DimensionFit", "Eigenpairs",
    "HeatProfile", "Inertia", "QuasiNorms", "RatioTable", "SpectralReport", "TraceCheck",
]
