import csv
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from rich.table import Table

from obliquefv_lib.analysis.norms import ErrorReport, eoc
from obliquefv_lib.core.stencil import LinearStencil
from obliquefv_lib.regularity.factors import RegularityReport

PathLike = Union[str, Path]

CENTRAL_NORMS = (("L2_Omega", "l2_omega"), ("L2_Gamma", "l2_gamma"), ("Vh", "vh"), ("VhGamma", "vh_gamma"))
CELL_NORMS = (("L2_Omega", "l2_omega"), ("L2_Gamma", "l2_gamma"), ("VhOmega", "vh_omega"))
REGULARITY_HEADER = ("h", "reg_mesh", "reg_mesh_omega", "reg_mesh_gamma", "varrho")
MESH_HEADER = ("dims", "h", "h_gamma", "cells", "faces", "gamma_faces", "interior_gamma_edges", "vertices")
LEVEL_HEADER = ("dims", "status", "diagnostic", "R", "dofs", "iterations", "residual")


def fmt(value: Optional[float]) -> str:
    """Fixed scientific notation; empty for missing values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return "%.6e" % value


def _write(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def error_columns(scheme: str) -> Tuple[Tuple[str, str], ...]:
    return CENTRAL_NORMS if scheme == "central" else CELL_NORMS


def error_header(scheme: str) -> List[str]:
    header = ["h"]
    for label, _ in error_columns(scheme):
        header += [label, "EOC"]
    return header


def error_rows(reports: Sequence[ErrorReport], scheme: str) -> List[List[str]]:
    """One row per level; each norm is followed by its rate against the previous level."""
    sizes = [report.h for report in reports]
    columns = []
    for _, attribute in error_columns(scheme):
        values = [getattr(report, attribute) for report in reports]
        rates = [None] + eoc(values, sizes) if len(values) > 1 else [None]
        columns.append((values, rates))

    rows = []
    for n, report in enumerate(reports):
        row = [fmt(report.h)]
        for values, rates in columns:
            row += [fmt(values[n]), "" if rates[n] is None else "%.3f" % rates[n]]
        rows.append(row)
    return rows


def write_errors(path: PathLike, reports: Sequence[ErrorReport], scheme: str) -> None:
    _write(path, error_header(scheme), error_rows(reports, scheme))


def write_regularity(path: PathLike, rows: Sequence[Tuple[float, RegularityReport]]) -> None:
    _write(path, REGULARITY_HEADER, [[fmt(h)] + [fmt(v) for v in report.as_row()] for h, report in rows])


def write_mesh_statistics(path: PathLike, rows: Sequence[dict]) -> None:
    lines = []
    for stats in rows:
        lines.append([stats["dims"], fmt(stats["h"]), fmt(stats["h_gamma"])]
                     + [str(stats[key]) for key in MESH_HEADER[3:]])
    _write(path, MESH_HEADER, lines)


def write_levels(path: PathLike, rows: Sequence[Sequence]) -> None:
    """Rows of (dims, status, diagnostic, R, dofs, iterations, residual)."""
    lines = []
    for dims, status, diagnostic, R, dofs, iterations, residual in rows:
        lines.append([dims, status, diagnostic, fmt(R), str(dofs), str(iterations), fmt(residual)])
    _write(path, LEVEL_HEADER, lines)


def write_convergence(path: PathLike, history: Sequence[float]) -> None:
    _write(path, ("iteration", "residual"), [[str(n), fmt(r)] for n, r in enumerate(history)])


def write_stencil(path: PathLike, stencil: LinearStencil) -> None:
    """(dof, coefficient) rows in dof order, then the constant under dof -1."""
    rows = [[str(dof), "%.17g" % coefficient] for dof, coefficient in stencil.rows()]
    rows.append(["-1", "%.17g" % stencil.constant])
    _write(path, ("dof", "coefficient"), rows)


def write_matrix(path: PathLike, matrix: sp.spmatrix) -> None:
    """Coordinate text form, one 'row col value' triple per stored entry, row-major."""
    coo = sp.csr_matrix(matrix).tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"% {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for n in order:
            handle.write(f"{coo.row[n]} {coo.col[n]} {coo.data[n]:.17g}\n")


def errors_table(reports: Sequence[ErrorReport], scheme: str, title: str = "") -> Table:
    table = Table(title=title or f"{scheme} scheme errors")
    for label in error_header(scheme):
        table.add_column(label, justify="right")
    for row in error_rows(reports, scheme):
        table.add_row(*row)
    return table


def regularity_table(rows: Sequence[Tuple[str, float, RegularityReport]]) -> Table:
    table = Table(title="mesh regularity")
    for label in ("dims",) + REGULARITY_HEADER + ("coef. bound",):
        table.add_column(label, justify="right")
    for dims, h, report in rows:
        table.add_row(dims, fmt(h), *[f"{v:.4f}" for v in report.as_row()], f"{report.coefficient_bound:.4f}")
    return table
