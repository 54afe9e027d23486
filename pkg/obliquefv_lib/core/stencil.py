from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np


class LinearStencil:
    """
    Sparse affine functional over the degrees of freedom.

    A stencil evaluates to ``sum(coefficient * x[dof]) + constant``; the constant
    collects every contribution of known data (Dirichlet points, boundary
    Γ-edges, source terms). Coefficients for a repeated dof are merged on insertion.
    """
    __slots__ = ("terms", "constant")

    def __init__(self, terms: Optional[Dict[int, float]] = None, constant: float = 0.0):
        self.terms: Dict[int, float] = dict(terms) if terms else {}
        self.constant = float(constant)

    def add(self, dof: int, coefficient: float) -> None:
        self.terms[dof] = self.terms.get(dof, 0.0) + coefficient

    def add_constant(self, value: float) -> None:
        self.constant += value

    def merge(self, other: 'LinearStencil', scale: float = 1.0) -> None:
        """Accumulate ``scale * other`` into this stencil."""
        for dof, coefficient in other.terms.items():
            self.add(dof, scale * coefficient)
        self.constant += scale * other.constant

    def scaled(self, factor: float) -> 'LinearStencil':
        return LinearStencil(
            {dof: factor * coefficient for dof, coefficient in self.terms.items()},
            factor * self.constant,
        )

    def __neg__(self) -> 'LinearStencil':
        return self.scaled(-1.0)

    def __add__(self, other: 'LinearStencil') -> 'LinearStencil':
        result = LinearStencil(self.terms, self.constant)
        result.merge(other)
        return result

    def __sub__(self, other: 'LinearStencil') -> 'LinearStencil':
        result = LinearStencil(self.terms, self.constant)
        result.merge(other, -1.0)
        return result

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"LinearStencil({len(self.terms)} terms, constant={self.constant:.6e})"

    def coefficient(self, dof: int) -> float:
        return self.terms.get(dof, 0.0)

    def apply(self, values: np.ndarray) -> float:
        """Evaluate the stencil on a full dof vector."""
        if not self.terms:
            return self.constant
        dofs, coefficients = self.arrays()
        return float(coefficients @ values[dofs]) + self.constant

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        dofs = np.fromiter(self.terms.keys(), dtype=np.int64, count=len(self.terms))
        coefficients = np.fromiter(self.terms.values(), dtype=float, count=len(self.terms))
        return dofs, coefficients

    def rows(self) -> List[Tuple[int, float]]:
        """(dof, coefficient) pairs in ascending dof order."""
        return sorted(self.terms.items())

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[int, float]], constant: float = 0.0) -> 'LinearStencil':
        stencil = cls(constant=constant)
        for dof, coefficient in rows:
            stencil.add(int(dof), float(coefficient))
        return stencil
