"""The graded 2×2 matrix rings Λ(D_j, t) and the data that drive the descent.

A basis monomial is a matrix unit pattern (slot) together with a lattice
point.  The four slots are ``E11`` (upper-left), ``DIAG`` (scalar matrix),
``E12`` (upper-right) and ``E21`` (lower-left); the lower-right unit is never
stored, products landing there are rewritten as ``DIAG − E11``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import floor
from typing import Mapping, Sequence

from .cone_monoid import (
    AffineMonoid,
    Cone,
    cone,
    cross_section,
    monoid_pyramidal_extension,
    positive_grading,
)
from .exact_geometry import Polytope, convex_hull
from .rational import QVec, ZVec, dot, primitive, qvec, vadd, vscale, zvec

SLOTS = ("E11", "DIAG", "E12", "E21")
_SLOT_RANK = {s: k for k, s in enumerate(SLOTS)}
_UNITS = {
    "E11": {(1, 1): 1},
    "DIAG": {(1, 1): 1, (2, 2): 1},
    "E12": {(1, 2): 1},
    "E21": {(2, 1): 1},
}


@dataclass(frozen=True)
class BasisMonomial:
    slot: str
    point: ZVec
    degree: int

    def sort_key(self):
        return (self.degree, _SLOT_RANK[self.slot], self.point)

    def __lt__(self, other: "BasisMonomial") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.slot}{list(self.point)}"


RingElement = dict  # BasisMonomial -> Fraction


def machine_bound_n(i: int) -> int:
    return 2 ** (2 ** (i + 1) - 1) - 2


@dataclass(frozen=True)
class GammaLink:
    """Certificate that high-degree monomials of Λ_j factor through Λ_{j+1}."""

    j: int
    m0: ZVec
    exponent: int  # λ'' = DIAG(exponent · m0)
    shift_bound: int  # γ_{j+1} + exponent·deg(m0)
    region_bound: Fraction  # LP bound on the bad region inside D_j
    gamma: int


@dataclass(frozen=True)
class DescentInstance:
    N: AffineMonoid
    M: AffineMonoid
    grading: ZVec
    section_functional: ZVec
    v: QVec
    t: ZVec
    i: int
    s: int
    n: int
    cones: tuple[Cone, ...]
    sections: tuple[Polytope, ...]
    gammas: tuple[int, ...]
    links: tuple[GammaLink, ...]

    @property
    def ambient_dim(self) -> int:
        return len(self.t)

    @property
    def deg_t(self) -> int:
        return self.degree(self.t)

    def degree(self, m: Sequence[int]) -> int:
        return dot(self.grading, m)

    def monomial(self, slot: str, point: Sequence[int]) -> BasisMonomial:
        p = tuple(int(x) for x in point)
        return BasisMonomial(slot, p, self.degree(p))

    def in_ring(self, j: int, mono: BasisMonomial) -> bool:
        d = self.cones[j]
        m = mono.point
        if mono.slot in ("E11", "DIAG"):
            return d.contains(m)
        if mono.slot == "E21":
            return d.contains(m) or d.contains(tuple(a - b for a, b in zip(m, self.t)))
        if mono.slot == "E12":
            return d.contains(m) and d.contains(tuple(a + b for a, b in zip(m, self.t)))
        raise ValueError(f"unknown slot {mono.slot}")


# ---------------------------------------------------------------------------
# lattice points of a cone at a fixed degree


@lru_cache(maxsize=100000)
def cone_points_at_degree(c: Cone, grading: ZVec, k: int) -> tuple[ZVec, ...]:
    """All lattice points x of the cone with grading(x) = k."""
    n = c.ambient_dim
    if k < 0:
        return ()
    if k == 0:
        return (tuple([0] * n),)
    corners = [vscale(Fraction(k, dot(grading, r)), r) for r in c.rays]
    lo = [floor(min(p[a] for p in corners)) for a in range(n)]
    hi = [-floor(-max(p[a] for p in corners)) for a in range(n)]
    solve_ax = max(range(n), key=lambda a: (abs(grading[a]) == 1, grading[a] != 0, -a))
    g = grading[solve_ax]
    free_axes = [a for a in range(n) if a != solve_ax]
    out = []
    for vals in product(*[range(lo[a], hi[a] + 1) for a in free_axes]):
        rest = k - sum(grading[a] * x for a, x in zip(free_axes, vals))
        if rest % g:
            continue
        x = [0] * n
        for a, val in zip(free_axes, vals):
            x[a] = val
        x[solve_ax] = rest // g
        x = tuple(x)
        if c.contains(x):
            out.append(x)
    return tuple(sorted(out))


def minkowski_section(a: Polytope, b: Polytope, w: Fraction) -> Polytope:
    pts = [vadd(vscale(1 - w, p), vscale(w, q)) for p in a.vertices for q in b.vertices]
    return convex_hull(pts)


# ---------------------------------------------------------------------------
# construction


def _section_of(c: Cone, psi: ZVec) -> Polytope:
    return cross_section(c, psi).polytope


def _region_bound(inner: Cone, outer: Cone, grading: ZVec, shift: ZVec, factor: int) -> Fraction:
    """max deg over {m ∈ inner : a·m ≤ factor·a·shift for some facet a of outer}."""
    best = Fraction(0)
    for a in outer.facets():
        lim = factor * dot(a, shift)
        if lim <= 0:
            continue
        for r in inner.rays:
            ar = dot(a, r)
            if ar <= 0:
                raise ValueError("inner cone not inside the interior of the outer cone")
            best = max(best, Fraction(dot(grading, r) * lim, ar))
    return best


def _min_degree_point(c: Cone, grading: ZVec) -> ZVec:
    k = 1
    while True:
        pts = cone_points_at_degree(c, grading, k)
        if pts:
            return pts[0]
        k += 1


def build_instance(N: AffineMonoid, M: AffineMonoid, D: Cone, Dprime: Cone,
                   v: Sequence, t: Sequence[int], i: int, s: int) -> DescentInstance:
    """Validate the data and build the cone chain and the γ-chain."""
    if i < 1:
        raise ValueError("i must be at least 1")
    if s < 2:
        raise ValueError("s must be at least 2")
    ext = monoid_pyramidal_extension(M, N)
    if not ext.ok:
        raise ValueError(f"M ⊂ N is not a pyramidal extension: {ext.reason}")
    grading = positive_grading(N).functional
    psi = ext.section_n.functional
    v = qvec(v)
    t = zvec(t)
    nd = len(t)
    if not any(t):
        raise ValueError("t must be nonzero")
    if dot(psi, v) != 1 or not ext.section_n.polytope.contains(v) or ext.section_m.polytope.contains(v):
        raise ValueError("v must lie in Φ(N) \\ Φ(M)")
    scale = Fraction(dot(psi, t))
    if scale <= 0 or vscale(scale, v) != tuple(Fraction(x) for x in t):
        raise ValueError("t is not on the ray through v")
    for name, c in (("D", D), ("D'", Dprime)):
        if c.dim != nd:
            raise ValueError(f"{name} must be full-dimensional")
    cm = M.cone()
    for name, c in (("D", D), ("D'", Dprime)):
        if not all(cm.contains_interior(r) for r in c.rays):
            raise ValueError(f"{name} not inside the interior of cone(M)")
    if not all(Dprime.contains_interior(r) for r in D.rays):
        raise ValueError("D not inside the interior of D'")

    n = machine_bound_n(i)
    sec0 = _section_of(D, psi)
    sec1 = _section_of(Dprime, psi)
    sections = [sec0]
    cones = [D]
    for j in range(1, n):
        sec = minkowski_section(sec0, sec1, Fraction(j, n))
        sections.append(sec)
        cones.append(cone([primitive(p) for p in sec.vertices]))
    sections.append(sec1)
    cones.append(Dprime)
    for j in range(n):
        if not all(cones[j + 1].contains_interior(r) for r in cones[j].rays):
            raise ValueError(f"chain not strictly nested at link {j}")

    deg_t = dot(grading, t)
    gammas = [0] * (n + 1)
    gammas[n] = s
    links = []
    for j in range(n - 1, -1, -1):
        inner, outer = cones[j], cones[j + 1]
        m0 = _min_degree_point(outer, grading)
        c = gammas[j + 1] + 1
        shift_bound = gammas[j + 1] + c * dot(grading, m0)
        region = _region_bound(inner, outer, grading, m0, c)
        gamma = max(gammas[j + 1] + 1, shift_bound, floor(region + deg_t))
        gammas[j] = gamma
        links.append(GammaLink(j, m0, c, shift_bound, region, gamma))
    links.sort(key=lambda lk: lk.j)
    return DescentInstance(N, M, grading, psi, v, t, i, s, n, tuple(cones), tuple(sections),
                           tuple(gammas), tuple(links))


# ---------------------------------------------------------------------------
# bases and multiplication


def lambda_basis_slice(inst: DescentInstance, j: int, d: int) -> list[BasisMonomial]:
    return list(_basis_slice(inst, j, d))


@lru_cache(maxsize=100000)
def _basis_slice(inst: DescentInstance, j: int, d: int) -> tuple[BasisMonomial, ...]:
    c = inst.cones[j]
    g = inst.grading
    pts = cone_points_at_degree(c, g, d)
    out = []
    for m in pts:
        out.append(BasisMonomial("E11", m, d))
        out.append(BasisMonomial("DIAG", m, d))
        if c.contains(vadd(m, inst.t)):
            out.append(BasisMonomial("E12", m, d))
    e21 = set(pts)
    if d >= inst.deg_t:
        e21 |= {vadd(q, inst.t) for q in cone_points_at_degree(c, g, d - inst.deg_t)}
    out.extend(BasisMonomial("E21", tuple(m), d) for m in e21)
    return tuple(sorted(out))


def monomial_product(a: BasisMonomial, b: BasisMonomial) -> dict[BasisMonomial, int]:
    units: dict[tuple[int, int], int] = {}
    for (r1, c1), x in _UNITS[a.slot].items():
        for (r2, c2), y in _UNITS[b.slot].items():
            if c1 == r2:
                units[(r1, c2)] = units.get((r1, c2), 0) + x * y
    p = vadd(a.point, b.point)
    deg = a.degree + b.degree
    out: dict[BasisMonomial, int] = {}
    c11 = units.get((1, 1), 0)
    c22 = units.get((2, 2), 0)
    if c22:
        out[BasisMonomial("DIAG", p, deg)] = c22
    if c11 - c22:
        out[BasisMonomial("E11", p, deg)] = c11 - c22
    if units.get((1, 2)):
        out[BasisMonomial("E12", p, deg)] = units[(1, 2)]
    if units.get((2, 1)):
        out[BasisMonomial("E21", p, deg)] = units[(2, 1)]
    return out


def multiply(inst: DescentInstance, j: int, x: Mapping[BasisMonomial, Fraction],
             y: Mapping[BasisMonomial, Fraction]) -> RingElement:
    out: dict[BasisMonomial, Fraction] = {}
    for a, ca in x.items():
        for b, cb in y.items():
            for mono, k in monomial_product(a, b).items():
                val = out.get(mono, 0) + Fraction(ca) * cb * k
                if val:
                    out[mono] = val
                else:
                    out.pop(mono, None)
    for mono in out:
        if not inst.in_ring(j, mono):
            raise AssertionError(f"product left the ring: {mono}")
    return out


# ---------------------------------------------------------------------------
# exceptional monomials


@dataclass
class ExceptionalReport:
    j: int
    monomials: list[BasisMonomial]
    threshold: int
    facet_bounds: list[tuple[ZVec, Fraction]] = field(default_factory=list)


def exceptional_monomials(inst: DescentInstance, j: int) -> ExceptionalReport:
    """Monomials of Λ_j whose lattice point lies outside cone(M).

    Only ``E21`` monomials in ``t + D_j`` can be exceptional since
    ``D_j ⊂ cone(M)``.  For each facet ``f`` of cone(M) with ``f·t < 0`` the
    bad region ``{m ∈ t + D_j : f·m < 0}`` is bounded and its maximal degree
    is attained at a vertex ``t + r·(−f·t)/(f·r)``.
    """
    cm = inst.M.cone()
    dj = inst.cones[j]
    g = inst.grading
    bounds = []
    for f in cm.facets():
        ft = dot(f, inst.t)
        if ft >= 0:
            continue
        best = Fraction(0)
        for r in dj.rays:
            fr = dot(f, r)
            if fr <= 0:
                raise ValueError("bad region unbounded: D_j not inside the interior of cone(M)")
            best = max(best, Fraction(dot(g, r) * -ft, fr))
        bounds.append((f, inst.deg_t + best))
    top = max((b for _, b in bounds), default=Fraction(0))
    threshold = floor(top)
    found = []
    for d in range(0, threshold + 1):
        for mono in _basis_slice(inst, j, d):
            if not cm.contains(mono.point):
                found.append(mono)
    return ExceptionalReport(j, sorted(found), threshold, bounds)


# ---------------------------------------------------------------------------
# factoring through the next ring


def divis_factor(inst: DescentInstance, j: int, lam: BasisMonomial) -> tuple[BasisMonomial, BasisMonomial]:
    if j >= inst.n:
        raise ValueError("no next ring in the chain")
    if lam.degree <= inst.gammas[j]:
        raise ValueError("degree too low for the factorisation")
    link = inst.links[j]
    shift = tuple(link.exponent * x for x in link.m0)
    central = inst.monomial("DIAG", shift)
    rest = inst.monomial(lam.slot, tuple(a - b for a, b in zip(lam.point, shift)))
    if not inst.in_ring(j + 1, rest) or rest.degree <= inst.gammas[j + 1]:
        raise AssertionError("factorisation certificate violated")
    return rest, central
