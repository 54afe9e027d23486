import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from obliquefv_lib.analysis.cases import Case, get_case
from obliquefv_lib.analysis.norms import ErrorReport, error_report, interpolate
from obliquefv_lib.assembly.schemes import get_scheme
from obliquefv_lib.assembly.solvers import ConvergenceReport, Solution, solve
from obliquefv_lib.core.config import Dims, ExperimentConfig, format_dims
from obliquefv_lib.core.errors import MeshDegeneracyError, SolverError
from obliquefv_lib.core.field import DiscreteField
from obliquefv_lib.io import tables
from obliquefv_lib.io.vtk import export_solution
from obliquefv_lib.mesh.grid import generate_grid
from obliquefv_lib.mesh.mesh import Mesh, build_mesh, mesh_statistics
from obliquefv_lib.regularity.factors import RegularityReport, regularity_report

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_SOLVER = "solver-failed"
STATUS_MESH = "mesh-degenerate"

EXIT_OK = 0
EXIT_SOLVER = 3
EXIT_MESH = 4


@dataclass
class LevelResult:
    """Outcome of one refinement level; ``errors`` is None when the level failed."""
    dims: Dims
    status: str = STATUS_OK
    diagnostic: str = ""
    statistics: Dict[str, float] = field(default_factory=dict)
    regularity: Optional[RegularityReport] = None
    errors: Optional[ErrorReport] = None
    convergence: Optional[ConvergenceReport] = None
    stabilization: Optional[float] = None
    dofs: int = 0

    @property
    def label(self) -> str:
        return format_dims(self.dims)

    def as_row(self):
        iterations = self.convergence.iterations if self.convergence else 0
        residual = self.convergence.residual if self.convergence else None
        return (self.label, self.status, self.diagnostic, self.stabilization, self.dofs, iterations, residual)


class ObliqueStudy:
    """
    Runs a configured refinement study and writes its tables.

    Each level goes through grid, mesh, regularity, assembly, solve and errors;
    a failing level is recorded and the study moves on.
    """
    def __init__(self, config: Optional[ExperimentConfig] = None):
        self.config = (config or ExperimentConfig()).validate()
        self.case: Case = get_case(self.config.case)
        self.levels: List[LevelResult] = []
        self._last: Optional[tuple] = None

    def mesh(self, dims: Dims) -> Mesh:
        grid = generate_grid(self.config.domain, dims, self.config.amplitude, self.config.seed)
        return build_mesh(grid)

    def solve_level(self, mesh: Mesh) -> tuple:
        """Assemble and solve on one mesh; returns (system, Solution)."""
        scheme = get_scheme(self.config.scheme, self.config.stabilization, self.config.max_obliquity)
        system = scheme.assemble(mesh, self.case)
        return system, solve(system, tol=self.config.tol, max_iter=self.config.max_iter)

    def run_level(self, dims: Dims) -> LevelResult:
        result = LevelResult(dims)
        try:
            mesh = self.mesh(dims)
        except MeshDegeneracyError as error:
            result.status, result.diagnostic = STATUS_MESH, str(error)
            logger.warning("level %s: %s", result.label, error)
            return result

        stats = mesh_statistics(mesh)
        stats["dims"] = result.label
        result.statistics = stats
        result.regularity = regularity_report(mesh)

        try:
            system, solution = self.solve_level(mesh)
        except SolverError as error:
            result.status, result.diagnostic = STATUS_SOLVER, str(error)
            result.convergence = error.report
            logger.warning("level %s: %s", result.label, error)
            return result
        except MeshDegeneracyError as error:
            result.status, result.diagnostic = STATUS_MESH, str(error)
            logger.warning("level %s: %s", result.label, error)
            return result

        result.stabilization = system.parameters.get("R")
        result.dofs = system.size
        result.convergence = solution.report
        result.errors = error_report(
            mesh, solution.field, self.case, scheme=self.config.scheme, dofs=system.size,
            iterations=solution.report.iterations, residual=solution.report.residual,
            stabilization=result.stabilization,
        )
        self._last = (mesh, solution)
        return result

    def run(self) -> List[LevelResult]:
        self.levels = []
        for dims in self.config.levels:
            logger.info("level %s: %s scheme, case %s", format_dims(dims), self.config.scheme, self.config.case)
            self.levels.append(self.run_level(dims))
        return self.levels

    @property
    def reports(self) -> List[ErrorReport]:
        return [level.errors for level in self.levels if level.errors is not None]

    @property
    def exit_status(self) -> int:
        statuses = {level.status for level in self.levels}
        if STATUS_MESH in statuses:
            return EXIT_MESH
        if STATUS_SOLVER in statuses:
            return EXIT_SOLVER
        return EXIT_OK

    def save(self, output_dir: Optional[Union[str, Path]] = None) -> Path:
        """Write config, error, regularity, mesh, level and convergence tables."""
        if not self.levels:
            raise RuntimeError("No study has been run yet")
        directory = Path(output_dir or self.config.output_dir)
        directory.mkdir(parents=True, exist_ok=True)

        self.config.save(directory / "config.txt")
        tables.write_errors(directory / "errors.csv", self.reports, self.config.scheme)
        measured = [level for level in self.levels if level.regularity is not None]
        tables.write_regularity(directory / "regularity.csv",
                                [(level.statistics["h"], level.regularity) for level in measured])
        tables.write_mesh_statistics(directory / "mesh.csv", [level.statistics for level in measured])
        tables.write_levels(directory / "levels.csv", [level.as_row() for level in self.levels])
        for level in self.levels:
            if level.convergence is not None:
                tables.write_convergence(directory / f"convergence_{level.label}.csv", level.convergence.history)
        logger.info("wrote study tables to %s", directory)
        return directory

    def export_last(self, path: Union[str, Path]) -> Path:
        """VTK file of the finest solved level with its error against the exact solution."""
        if self._last is None:
            raise RuntimeError("No level has been solved yet")
        mesh, solution = self._last
        return export_field(mesh, solution, self.case, path)


def export_field(mesh: Mesh, solution: Solution, case: Case, path: Union[str, Path]) -> Path:
    field: DiscreteField = solution.field
    exact = interpolate(mesh, case, with_edges=field.has_edges)
    return export_solution(mesh, field, path, error=field - exact)


def run_study(config: ExperimentConfig) -> int:
    """Run every level, write the tables and return the exit status."""
    study = ObliqueStudy(config)
    study.run()
    study.save()
    return study.exit_status
