"""Exact rational and integer linear algebra on small dense matrices.

Everything here works with :class:`fractions.Fraction` or Python integers;
there is no floating point anywhere in the package.  Vectors are plain
tuples, matrices are lists of row tuples.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

QVec = tuple  # tuple of Fraction
ZVec = tuple  # tuple of int


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an ``int`` into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        s = text.strip()
        if not s:
            raise ValueError("empty rational")
        return Fraction(s)
    raise ValueError(f"not a rational: {text!r}")


def parse_integer(text) -> int:
    if isinstance(text, bool):
        raise ValueError(f"not an integer: {text!r}")
    if isinstance(text, int):
        return text
    if isinstance(text, str):
        return int(text.strip())
    raise ValueError(f"not an integer: {text!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def qvec(values: Iterable) -> QVec:
    return tuple(parse_rational(v) for v in values)


def zvec(values: Iterable) -> ZVec:
    return tuple(parse_integer(v) for v in values)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), 0)


def vsub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vadd(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vscale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def primitive(v: Sequence) -> ZVec:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivots)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        piv = None
        for k in range(row, len(m)):
            if m[k][col] != 0:
                piv = k
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        p = m[row][col]
        m[row] = [x / p for x in m[row]]
        for k in range(len(m)):
            if k != row and m[k][col] != 0:
                f = m[k][col]
                m[k] = [a - f * b for a, b in zip(m[k], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    return m[:row], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of {x : A x = 0} over the rationals."""
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        return [tuple(Fraction(int(i == k)) for i in range(ncols)) for k in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            x[pc] = -red[r][f]
        basis.append(tuple(x))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of A x = b, or None when inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0])
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return tuple(x)


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset, chosen greedily."""
    chosen: list[int] = []
    basis: list[Sequence] = []
    for k, v in enumerate(vectors):
        if rank(basis + [v]) > len(basis):
            basis.append(v)
            chosen.append(k)
    return chosen


def inverse(mat: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(mat)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == k)) for i in range(n)] for k, r in enumerate(mat)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("singular matrix")
    return [r[n:] for r in red]


# ---------------------------------------------------------------------------
# integer lattices


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form: an upper-triangular basis of the row lattice.

    Pivots are positive and entries above a pivot are reduced into
    ``[0, pivot)``, which makes the basis canonical.
    """
    m = [list(int(x) for x in r) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    out_row = 0
    for col in range(ncols):
        # gcd-combine rows out_row.. on this column
        while True:
            nz = [k for k in range(out_row, len(m)) if m[k][col] != 0]
            if not nz:
                break
            k0 = min(nz, key=lambda k: abs(m[k][col]))
            m[out_row], m[k0] = m[k0], m[out_row]
            if m[out_row][col] < 0:
                m[out_row] = [-x for x in m[out_row]]
            p = m[out_row][col]
            done = True
            for k in range(out_row + 1, len(m)):
                if m[k][col] != 0:
                    q = m[k][col] // p
                    m[k] = [a - q * b for a, b in zip(m[k], m[out_row])]
                    if m[k][col] != 0:
                        done = False
            if done:
                break
        if out_row < len(m) and m[out_row][col] != 0:
            p = m[out_row][col]
            for k in range(out_row):
                q = m[k][col] // p
                if q:
                    m[k] = [a - q * b for a, b in zip(m[k], m[out_row])]
            out_row += 1
            if out_row == len(m):
                break
    return [tuple(r) for r in m[:out_row] if any(r)]


def lattice_coordinates(basis: Sequence[Sequence[int]], x: Sequence) -> tuple[Fraction, ...] | None:
    """Coefficients c with x = Σ c_k basis_k (rational), or None if x ∉ span."""
    if not basis:
        return () if not any(x) else None
    cols = [list(col) for col in zip(*basis)]  # A with columns = basis vectors
    return solve(cols, list(x))


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """A ℤ-basis of {x ∈ ℤⁿ : A x = 0} via column-style unimodular reduction."""
    a = [list(int(v) for v in r) for r in rows]
    u = [[int(i == k) for k in range(ncols)] for i in range(ncols)]  # u columns track ops
    # operate on columns of a; mirror on columns of u
    col_start = 0
    for r in range(len(a)):
        while True:
            nz = [c for c in range(col_start, ncols) if a[r][c] != 0]
            if not nz:
                break
            c0 = min(nz, key=lambda c: abs(a[r][c]))
            _swap_cols(a, col_start, c0)
            _swap_cols(u, col_start, c0)
            p = a[r][col_start]
            done = True
            for c in range(col_start + 1, ncols):
                if a[r][c] != 0:
                    q = a[r][c] // p
                    _add_col(a, c, col_start, -q)
                    _add_col(u, c, col_start, -q)
                    if a[r][c] != 0:
                        done = False
            if done:
                break
        if col_start < ncols and a[r][col_start] != 0:
            col_start += 1
    basis = [tuple(u[i][c] for i in range(ncols)) for c in range(col_start, ncols)]
    return hermite_normal_form(basis)


def _swap_cols(m, c1, c2):
    if c1 == c2:
        return
    for row in m:
        row[c1], row[c2] = row[c2], row[c1]


def _add_col(m, target, source, factor):
    for row in m:
        row[target] += factor * row[source]


def saturated_lattice(vectors: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """HNF basis of span(vectors) ∩ ℤⁿ."""
    ints = [primitive(v) for v in vectors if any(v)]
    if not ints:
        return []
    n = len(ints[0])
    perp = nullspace(ints, n)
    if not perp:
        return hermite_normal_form([tuple(int(i == k) for i in range(n)) for k in range(n)])
    perp_int = [primitive(p) for p in perp]
    return integer_kernel(perp_int, n)
