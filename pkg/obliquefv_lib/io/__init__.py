from .vtk import export_solution

__all__ = ["export_solution"]
