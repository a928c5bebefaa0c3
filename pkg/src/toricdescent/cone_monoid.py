"""Rational pointed cones, cross-sections, Hilbert bases and affine monoids."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Sequence

from .exact_geometry import Polytope, check_pyramidal_extension, convex_hull
from .rational import (
    ZVec,
    dot,
    hermite_normal_form,
    lattice_coordinates,
    nullspace,
    primitive,
    rank,
    saturated_lattice,
    vscale,
    zvec,
)

MAX_HILBERT_DIM = 4


@dataclass(frozen=True)
class Cone:
    rays: tuple[ZVec, ...]
    ambient_dim: int

    @property
    def dim(self) -> int:
        return rank(self.rays)

    def facets(self) -> tuple[ZVec, ...]:
        return _cone_facets(self)

    def equations(self) -> tuple[ZVec, ...]:
        return _cone_equations(self)

    def contains(self, x: Sequence) -> bool:
        return (all(dot(a, x) == 0 for a in self.equations())
                and all(dot(a, x) >= 0 for a in self.facets()))

    def contains_interior(self, x: Sequence) -> bool:
        """Relative interior membership."""
        return (all(dot(a, x) == 0 for a in self.equations())
                and all(dot(a, x) > 0 for a in self.facets()))


def cone(rays: Sequence[Sequence]) -> Cone:
    """Pointed cone generated by the given rays, reduced to its extremal rays."""
    vecs = [primitive(zvec(r)) for r in rays]
    if not vecs:
        raise ValueError("a cone needs at least one ray")
    if any(not any(v) for v in vecs):
        raise ValueError("zero ray")
    n = len(vecs[0])
    vecs = sorted(set(vecs))
    hull = convex_hull(vecs)
    origin = tuple(0 for _ in range(n))
    if hull.contains(origin):
        raise ValueError("cone is not pointed")
    phi = _positive_functional(vecs)
    section = convex_hull([vscale(Fraction(1, dot(phi, r)), r) for r in vecs])
    keep = [r for r in vecs if vscale(Fraction(1, dot(phi, r)), r) in section.vertex_set()]
    return Cone(tuple(keep), n)


def _candidate_covectors(n: int, bound: int):
    for c in product(range(-bound, bound + 1), repeat=n):
        if max(abs(x) for x in c) == bound:
            yield c


def _positive_functional(vecs: Sequence[Sequence], max_bound: int = 64) -> ZVec:
    """Integer φ with φ(v) ≥ 1 on all vectors minimising max φ(v) at the smallest coefficient bound."""
    n = len(vecs[0])
    for bound in range(1, max_bound + 1):
        best = None
        for c in sorted(_candidate_covectors(n, bound)):
            vals = [dot(c, v) for v in vecs]
            if min(vals) < 1:
                continue
            key = (max(vals), c)
            if best is None or key < best:
                best = key
        if best is not None:
            return tuple(best[1])
    raise ValueError("no positive functional with small coefficients found")


def _smallest_grading(vecs: Sequence[Sequence], max_bound: int = 64) -> ZVec:
    """Integer φ ≥ 1 on vecs with smallest max-coefficient, lexicographically first."""
    n = len(vecs[0])
    for bound in range(1, max_bound + 1):
        for c in sorted(_candidate_covectors(n, bound)):
            if all(dot(c, v) >= 1 for v in vecs):
                return tuple(c)
    raise ValueError("no positive grading exists (monoid has units)")


@dataclass(frozen=True)
class CrossSection:
    functional: ZVec
    polytope: Polytope


def cross_section(c: Cone, functional: Sequence[int] | None = None) -> CrossSection:
    phi = tuple(functional) if functional is not None else _positive_functional(c.rays)
    if any(dot(phi, r) <= 0 for r in c.rays):
        raise ValueError("functional not positive on the cone")
    return CrossSection(phi, convex_hull([vscale(Fraction(1, dot(phi, r)), r) for r in c.rays]))


@lru_cache(maxsize=1024)
def _cone_facets(c: Cone) -> tuple[ZVec, ...]:
    """Inward integer normals a with a·x ≥ 0 on the cone, one per facet."""
    sec = cross_section(c)
    phi = sec.functional
    out = []
    for a, b in sec.polytope.facets:
        # a·y ≥ b on the section y = x/φ(x)  ⇔  a·x − b φ(x) ≥ 0
        out.append(primitive([ai - b * pi for ai, pi in zip(a, phi)]))
    return tuple(sorted(set(out)))


@lru_cache(maxsize=1024)
def _cone_equations(c: Cone) -> tuple[ZVec, ...]:
    return tuple(primitive(v) for v in nullspace(c.rays, c.ambient_dim))


# ---------------------------------------------------------------------------
# Hilbert bases


def _to_lattice_cone(c: Cone, lattice: Sequence[Sequence[int]]):
    coords = []
    for r in c.rays:
        x = lattice_coordinates(lattice, r)
        if x is None:
            raise ValueError("lattice not full-rank in span of the cone")
        coords.append(primitive(x))
    return coords


def hilbert_basis(c: Cone, lattice: Sequence[Sequence[int]] | None = None) -> list[ZVec]:
    """Minimal generating set of C ∩ L (L defaults to ℤⁿ ∩ span C).

    The cone is rewritten in coordinates of L, where it becomes full
    dimensional.  Every lattice point of the cone is a nonnegative integer
    combination of extremal generators plus a lattice point of the closed
    zonotope Σ[0,1]·g; irreducible elements are sieved from that finite set.
    """
    if c.dim > MAX_HILBERT_DIM:
        raise ValueError(f"Hilbert bases supported up to dimension {MAX_HILBERT_DIM}")
    if lattice is None:
        lat = saturated_lattice(c.rays)
    else:
        lat = hermite_normal_form(lattice)
        if len(lat) != c.dim or rank(list(lat) + list(c.rays)) != c.dim:
            raise ValueError("lattice not full-rank in span of the cone")
    gens = _to_lattice_cone(c, lat)
    r = len(lat)
    local = cone(gens)
    cands = set(_zonotope_points(local.rays, r)) | set(local.rays)
    cands.discard(tuple([0] * r))
    pts = sorted(cands)
    basis = [x for x in pts
             if not any(y != x and local.contains(tuple(a - b for a, b in zip(x, y))) for y in pts)]
    out = [tuple(sum(xi * li[k] for xi, li in zip(x, lat)) for k in range(c.ambient_dim)) for x in basis]
    return sorted(out)


def _zonotope_points(gens: Sequence[ZVec], r: int) -> list[ZVec]:
    normals = []
    if r == 1:
        normals = [(1,)]
    else:
        for sub in combinations(gens, r - 1):
            if rank(sub) == r - 1:
                normals.append(primitive(nullspace(sub, r)[0]))
    normals = sorted(set(normals))
    slabs = []
    for a in normals:
        vals = [dot(a, g) for g in gens]
        slabs.append((a, sum(v for v in vals if v < 0), sum(v for v in vals if v > 0)))
    lo = [sum(min(0, g[k]) for g in gens) for k in range(r)]
    hi = [sum(max(0, g[k]) for g in gens) for k in range(r)]
    out = []
    for x in product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        if all(mn <= dot(a, x) <= mx for a, mn, mx in slabs):
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# affine monoids


@dataclass(frozen=True)
class AffineMonoid:
    generators: tuple[ZVec, ...]
    lattice: tuple[ZVec, ...]

    @property
    def rank(self) -> int:
        return len(self.lattice)

    @property
    def ambient_dim(self) -> int:
        return len(self.generators[0])

    def cone(self) -> Cone:
        return cone([g for g in self.generators if any(g)])


def affine_monoid(generators: Sequence[Sequence]) -> AffineMonoid:
    gens = tuple(sorted(set(zvec(g) for g in generators)))
    if not gens:
        raise ValueError("a monoid needs generators")
    nonzero = [g for g in gens if any(g)]
    if not nonzero:
        raise ValueError("trivial monoid")
    _smallest_grading(nonzero)  # positivity check
    return AffineMonoid(tuple(g for g in gens if any(g)), tuple(hermite_normal_form(nonzero)))


def monoid_from_cone(c: Cone) -> AffineMonoid:
    """The normal monoid C ∩ ℤⁿ, generated by its Hilbert basis."""
    return affine_monoid(hilbert_basis(c))


@dataclass(frozen=True)
class Grading:
    functional: ZVec

    def degree(self, x: Sequence[int]) -> int:
        return dot(self.functional, x)


def positive_grading(m: AffineMonoid) -> Grading:
    return Grading(_smallest_grading(m.generators))


def monoid_membership(m: AffineMonoid, x: Sequence[int]) -> bool:
    x = tuple(int(v) for v in x)
    if not any(x):
        return True
    if lattice_coordinates(m.lattice, x) is None:
        return False
    phi = positive_grading(m).functional
    if dot(phi, x) <= 0:
        return False
    gens = sorted(m.generators, key=lambda g: (dot(phi, g), g))

    @lru_cache(maxsize=None)
    def reach(k: int, rem: tuple) -> bool:
        if not any(rem):
            return True
        if k == len(gens) or dot(phi, rem) <= 0:
            return False
        g = gens[k]
        y = rem
        while dot(phi, y) >= 0:
            if reach(k + 1, y):
                return True
            y = tuple(a - b for a, b in zip(y, g))
        return False

    return reach(0, x)


@dataclass(frozen=True)
class NormalityResult:
    normal: bool
    witness: ZVec | None
    integral_closure: tuple[ZVec, ...]


def normality(m: AffineMonoid) -> NormalityResult:
    hb = hilbert_basis(m.cone(), m.lattice)
    for h in hb:
        if not monoid_membership(m, h):
            return NormalityResult(False, h, tuple(hb))
    return NormalityResult(True, None, tuple(hb))


def interior_membership(m: AffineMonoid, x: Sequence[int]) -> bool:
    x = tuple(int(v) for v in x)
    if not any(x):
        return True
    return monoid_membership(m, x) and m.cone().contains_interior(x)


def dilate(m: AffineMonoid, c: int):
    if c < 2:
        raise ValueError("dilation factor must be at least 2")
    gens = [tuple(c * v for v in g) for g in m.generators]
    return affine_monoid(gens), (lambda x: tuple(c * v for v in x))


@dataclass(frozen=True)
class MonoidExtension:
    ok: bool
    reason: str = ""
    section_m: CrossSection | None = None
    section_n: CrossSection | None = None
    apex: tuple | None = None
    complexity: int | None = None


def monoid_pyramidal_extension(m: AffineMonoid, n: AffineMonoid) -> MonoidExtension:
    """Check that M ⊂ N is a pyramidal extension of normal monoids."""
    if set(m.generators) == set(n.generators):
        return MonoidExtension(False, "proper inclusion required")
    if not normality(m).normal:
        return MonoidExtension(False, "not normal")
    if not normality(n).normal:
        return MonoidExtension(False, "not normal")
    if tuple(m.lattice) != tuple(n.lattice):
        return MonoidExtension(False, "groups of differences differ")
    sec_n = cross_section(n.cone())
    try:
        sec_m = cross_section(m.cone(), sec_n.functional)
    except ValueError:
        return MonoidExtension(False, "M not inside N")
    w = check_pyramidal_extension(sec_m.polytope, sec_n.polytope)
    if w is None:
        return MonoidExtension(False, "cross-sections do not form a pyramidal extension")
    return MonoidExtension(True, "", sec_m, sec_n, w.apex, w.complexity)
