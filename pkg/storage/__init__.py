"""Storage package"""
from .artifacts import ArtifactWriter, csv_text, json_text
from .graph_files import dumps_graph, dumps_potential, loads_graph, loads_potential, read_graph, read_potential

__all__ = [
    "ArtifactWriter",
    "csv_text",
    "json_text",
    "dumps_graph",
    "dumps_potential",
    "loads_graph",
    "loads_potential",
    "read_graph",
    "read_potential",
]
