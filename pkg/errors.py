"""Laboratory exceptions"""
from typing import Any, Dict, Optional


class LabError(Exception):
    """Base error; rendered as the machine-readable error JSON of the CLI"""

    code = "lab_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, "details": self.details}


class GraphValidationError(LabError):
    code = "graph_invalid"


class UnknownIdError(LabError):
    code = "unknown_id"


class GraphSizeError(LabError):
    code = "graph_too_large"


class GraphFormatError(LabError):
    code = "graph_format"


class PotentialError(LabError):
    code = "potential_invalid"


class QuadratureError(LabError):
    code = "quadrature_incompatible"


class MeshTooCoarseError(LabError):
    code = "mesh_too_coarse"


class WindowError(LabError):
    code = "window_invalid"


class NotPositiveDefiniteError(LabError):
    code = "not_positive_definite"


class EigenSolverError(LabError):
    code = "eigensolver_failed"


class IncompleteSpectrumError(LabError):
    code = "spectrum_incomplete"


class HeatSizeError(LabError):
    code = "heat_window_too_large"


class DegenerateWindowError(LabError):
    code = "fit_window_degenerate"


class ProvenanceMismatchError(LabError):
    code = "provenance_mismatch"


class AssumptionError(LabError):
    code = "assumption_violated"


class InvalidParameterError(LabError):
    code = "invalid_parameter"


class ConfigError(LabError):
    code = "config_invalid"
