import argparse
import logging
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler

from obliquefv_lib.analysis.norms import error_report
from obliquefv_lib.core.config import ExperimentConfig, format_dims, parse_dims
from obliquefv_lib.core.errors import CaseError, ConfigError, GridError, MeshDegeneracyError, SolverError
from obliquefv_lib.io import tables
from obliquefv_lib.regularity.factors import regularity_report
from obliquefv_lib.study import EXIT_MESH, EXIT_OK, EXIT_SOLVER, STATUS_OK, ObliqueStudy, export_field

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2

# flag name -> config key
_CONFIG_FLAGS = {
    "domain": "domain",
    "case": "case",
    "scheme": "scheme",
    "levels": "levels",
    "amplitude": "amplitude",
    "seed": "seed",
    "stabilization": "stabilization",
    "tol": "tol",
    "max_iter": "max_iter",
    "max_obliquity": "max_obliquity",
    "output_dir": "output_dir",
}


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value file; flags below override it")
    parser.add_argument("--domain", help="cube, tesseroid or perturbed-sphere-section")
    parser.add_argument("--case", help="built-in case name")
    parser.add_argument("--scheme", help="central, upwind or splitting")
    parser.add_argument("--levels", help="refinement levels, e.g. '3x3x3, 7x7x7'")
    parser.add_argument("--amplitude", help="perturbation amplitude as a fraction of the spacing")
    parser.add_argument("--seed", help="perturbation seed")
    parser.add_argument("--stabilization", help="R of the central scheme, or 'auto'")
    parser.add_argument("--tol", help="relative residual tolerance")
    parser.add_argument("--max-iter", dest="max_iter", help="iteration limit, or 'auto'")
    parser.add_argument("--max-obliquity", dest="max_obliquity", help="splitting breakdown threshold")
    parser.add_argument("--output-dir", dest="output_dir", help="directory for the study tables")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obliquefv",
        description="Finite volume experiments for the Laplace equation with oblique derivative boundary conditions",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve one level and print its errors")
    _add_config_options(solve)
    solve.add_argument("--dims", help="grid to solve on (default: the first level)")
    solve.add_argument("--vtk", help="also write the solution to this VTK file")
    solve.add_argument("--matrix", help="also write the system matrix in coordinate text form")

    study = commands.add_parser("study", help="run every level and write the tables")
    _add_config_options(study)

    regularity = commands.add_parser("regularity", help="mesh regularity factors of every level")
    _add_config_options(regularity)

    export = commands.add_parser("export", help="solve one level and write a VTK file")
    _add_config_options(export)
    export.add_argument("--dims", help="grid to solve on (default: the first level)")
    export.add_argument("--output", required=True, help="VTK file to write")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    texts = {key: getattr(args, flag) for flag, key in _CONFIG_FLAGS.items() if getattr(args, flag) is not None}
    return config.override(texts).validate()


def _setup_logging(args: argparse.Namespace, console: Console) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]",
                        handlers=[RichHandler(console=console, show_path=False)], force=True)


def _single_level(config: ExperimentConfig, args: argparse.Namespace):
    dims = parse_dims(args.dims) if args.dims else config.levels[0]
    study = ObliqueStudy(config)
    mesh = study.mesh(dims)
    system, solution = study.solve_level(mesh)
    return study, mesh, system, solution


def _command_solve(config: ExperimentConfig, args: argparse.Namespace, console: Console) -> int:
    study, mesh, system, solution = _single_level(config, args)
    report = error_report(mesh, solution.field, study.case, scheme=config.scheme, dofs=system.size,
                          iterations=solution.report.iterations, residual=solution.report.residual,
                          stabilization=system.parameters.get("R"))
    console.print(tables.errors_table([report], config.scheme,
                                      title=f"{config.case} on {format_dims(mesh.grid.dims)}"))
    if args.vtk is not None:
        export_field(mesh, solution, study.case, args.vtk)
    if args.matrix is not None:
        tables.write_matrix(args.matrix, system.matrix)
    return EXIT_OK


def _command_export(config: ExperimentConfig, args: argparse.Namespace, console: Console) -> int:
    if not args.output.strip():
        raise ConfigError("export path is empty")
    study, mesh, _, solution = _single_level(config, args)
    path = export_field(mesh, solution, study.case, args.output)
    console.print(f"wrote {path}")
    return EXIT_OK


def _command_study(config: ExperimentConfig, args: argparse.Namespace, console: Console) -> int:
    study = ObliqueStudy(config)
    study.run()
    directory = study.save()
    console.print(tables.errors_table(study.reports, config.scheme, title=f"{config.case}, {config.scheme} scheme"))
    for level in study.levels:
        if level.status != STATUS_OK:
            console.print(f"[red]level {level.label}: {level.status}[/red] {level.diagnostic}")
    console.print(f"tables written to {directory}")
    return study.exit_status


def _command_regularity(config: ExperimentConfig, args: argparse.Namespace, console: Console) -> int:
    study = ObliqueStudy(config)
    rows = []
    for dims in config.levels:
        mesh = study.mesh(dims)
        rows.append((format_dims(dims), mesh.h, regularity_report(mesh)))
    console.print(tables.regularity_table(rows))
    directory = Path(config.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    tables.write_regularity(directory / "regularity.csv", [(h, report) for _, h, report in rows])
    return EXIT_OK


_COMMANDS = {
    "solve": _command_solve,
    "study": _command_study,
    "regularity": _command_regularity,
    "export": _command_export,
}


def main(argv: Optional[List[str]] = None, console: Optional[Console] = None) -> int:
    """Command-line entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)
    console = console or Console()
    _setup_logging(args, console)
    try:
        config = load_config(args)
        return _COMMANDS[args.command](config, args, console)
    except (ConfigError, GridError, CaseError) as error:
        logger.error("%s", error)
        return EXIT_CONFIG
    except SolverError as error:
        logger.error("%s", error)
        return EXIT_SOLVER
    except MeshDegeneracyError as error:
        logger.error("%s", error)
        return EXIT_MESH


def main_entry() -> None:
    raise SystemExit(main())
