from .factors import RegularityReport, regularity_report

__all__ = ["RegularityReport", "regularity_report"]
