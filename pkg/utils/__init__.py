"""Utils package"""
from .grids import parse_grid, parse_numbers, parse_window
from .logger import setup_logging
from .sweep import SweepRunner

__all__ = ["setup_logging", "SweepRunner", "parse_grid", "parse_window", "parse_numbers"]
