from .cases import CASE_NAMES, Case, get_case
from .norms import ErrorReport, eoc, error_report, interpolate, seminorms

__all__ = [
    "CASE_NAMES",
    "Case",
    "get_case",
    "ErrorReport",
    "eoc",
    "error_report",
    "interpolate",
    "seminorms",
]
