"""Sparse exact elimination for chain-complex ranks.

Rows are dictionaries ``column -> integer``.  Elimination is fraction-free:
a row is reduced against a pivot row by cross-multiplication and the result
divided by the gcd of its entries, so all stored numbers stay integral and
small.  Pivots are always the smallest column index of a row, which makes
the echelon form depend only on the column order (lexicographic tensor order
in the callers).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping


def _normalize(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    lead = min(row)
    if row[lead] < 0:
        row = {k: -v for k, v in row.items()}
    return row


def integral_row(values: Mapping[int, Fraction]) -> dict[int, int]:
    """Clear denominators of a rational sparse row."""
    den = 1
    for v in values.values():
        d = Fraction(v).denominator
        den = den * d // gcd(den, d)
    return {k: int(Fraction(v) * den) for k, v in values.items() if v != 0}


class EchelonBasis:
    """Incrementally maintained row-echelon basis of a subspace of ℚ^cols."""

    def __init__(self) -> None:
        self.pivots: dict[int, dict[int, int]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping[int, Fraction | int]) -> dict[int, int]:
        r = integral_row(row) if any(isinstance(v, Fraction) for v in row.values()) else {
            k: int(v) for k, v in row.items() if v != 0}
        while r:
            lead = min(r)
            p = self.pivots.get(lead)
            if p is None:
                return r
            a = r[lead]
            b = p[lead]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            new = {k: fa * v for k, v in r.items()}
            for k, v in p.items():
                nv = new.get(k, 0) - fb * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            r = _normalize(new) if new else new
        return r

    def add(self, row: Mapping[int, Fraction | int]) -> bool:
        """Insert a row; returns True when the rank increased."""
        r = self.reduce(row)
        if not r:
            return False
        r = _normalize(r)
        self.pivots[min(r)] = r
        return True

    def contains(self, row: Mapping[int, Fraction | int]) -> bool:
        return not self.reduce(row)


def sparse_rank(rows: Iterable[Mapping[int, Fraction | int]]) -> int:
    basis = EchelonBasis()
    for r in rows:
        basis.add(r)
    return basis.rank


def sparse_nullspace(columns: list[Mapping[int, Fraction | int]]) -> list[dict[int, Fraction]]:
    """Kernel of the matrix whose j-th column is ``columns[j]``.

    Returned vectors are sparse maps ``column index j -> coefficient``.
    The computation reduces the columns while tracking combinations.
    """
    pivots: dict[int, tuple[dict[int, Fraction], dict[int, Fraction]]] = {}
    kernel: list[dict[int, Fraction]] = []
    for j, col in enumerate(columns):
        vec = {k: Fraction(v) for k, v in col.items() if v != 0}
        combo = {j: Fraction(1)}
        while vec:
            lead = min(vec)
            if lead not in pivots:
                break
            pv, pc = pivots[lead]
            f = vec[lead] / pv[lead]
            for k, v in pv.items():
                nv = vec.get(k, 0) - f * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            for k, v in pc.items():
                nv = combo.get(k, 0) - f * v
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        if vec:
            pivots[min(vec)] = (vec, combo)
        else:
            kernel.append(combo)
    return kernel
