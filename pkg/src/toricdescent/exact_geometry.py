"""Exact polytope combinatorics over the rationals.

Polytopes are stored by their irredundant vertices together with an
H-description relative to their affine hull: a list of affine equations
cutting out the hull and a list of facet inequalities ``a·x ≥ b`` with
primitive integer ``a``.  Facets are found by exhaustive enumeration of
hyperplanes through affinely independent point subsets, which is plenty at
the sizes this package works with (dimension at most four, a few dozen
points).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .rational import (
    QVec,
    dot,
    independent_subset,
    inverse,
    nullspace,
    primitive,
    qvec,
    rank,
    rref,
    solve,
    vadd,
    vscale,
    vsub,
)

Halfspace = tuple  # (normal: tuple[int, ...], offset: Fraction)


@dataclass(frozen=True)
class Polytope:
    vertices: tuple[QVec, ...]
    facets: tuple[Halfspace, ...]
    equations: tuple[Halfspace, ...]
    incidence: tuple[tuple[bool, ...], ...]  # vertex x facet
    dim: int

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    def facet_vertex_sets(self) -> list[frozenset[int]]:
        return [frozenset(v for v in range(len(self.vertices)) if self.incidence[v][f])
                for f in range(len(self.facets))]

    def in_affine_hull(self, x: Sequence) -> bool:
        return all(dot(a, x) == b for a, b in self.equations)

    def contains(self, x: Sequence) -> bool:
        return self.in_affine_hull(x) and all(dot(a, x) >= b for a, b in self.facets)

    def contains_strictly(self, x: Sequence) -> bool:
        """Membership in the relative interior."""
        return self.in_affine_hull(x) and all(dot(a, x) > b for a, b in self.facets)

    def contains_polytope(self, other: "Polytope") -> bool:
        return all(self.contains(v) for v in other.vertices)

    def facet_polytope(self, f: int) -> "Polytope":
        return convex_hull([self.vertices[v] for v in range(len(self.vertices)) if self.incidence[v][f]])

    def centroid(self) -> QVec:
        k = len(self.vertices)
        return tuple(sum(col, Fraction(0)) / k for col in zip(*self.vertices))

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def __eq__(self, other) -> bool:  # equality of point sets
        return isinstance(other, Polytope) and self.vertex_set() == other.vertex_set()

    def __hash__(self) -> int:
        return hash(self.vertex_set())


def _scale_halfspace(a: Sequence, b: Fraction) -> Halfspace:
    """Rescale (a, b) by a positive factor so that a is primitive integral."""
    ai = primitive(a)
    k = next(i for i, x in enumerate(a) if x != 0)
    factor = Fraction(ai[k]) / Fraction(a[k])
    return ai, Fraction(b) * factor


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Exact convex hull; works for lower-dimensional point sets too."""
    pts = sorted(set(qvec(p) for p in points))
    if not pts:
        raise ValueError("convex hull of an empty point set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise ValueError("points of different dimensions")
    o = pts[0]
    diffs = [vsub(p, o) for p in pts[1:]]
    basis = [diffs[k] for k in independent_subset(diffs)]
    d = len(basis)

    if d == 0:
        equations = tuple(_scale_halfspace(a, dot(a, o)) for a in nullspace([], n))
        return Polytope((o,), (), equations, ((),), 0)

    eqs = nullspace(basis, n)
    equations = tuple(_scale_halfspace(a, dot(a, o)) for a in eqs)

    # local coordinates y with x - o = Σ y_k basis_k
    _, piv = rref(basis)
    bp_t = [[basis[k][c] for k in range(d)] for c in piv]
    minv = inverse(bp_t)

    def local(p):
        w = [p[c] - o[c] for c in piv]
        return tuple(sum((minv[r][c] * w[c] for c in range(d)), Fraction(0)) for r in range(d))

    locs = [local(p) for p in pts]

    local_facets: dict[tuple, tuple] = {}
    if d == 1:
        vals = [y[0] for y in locs]
        local_facets[((1,), min(vals))] = ((Fraction(1),), min(vals))
        local_facets[((-1,), -max(vals))] = ((Fraction(-1),), -max(vals))
    else:
        for combo in combinations(range(len(pts)), d):
            base = locs[combo[0]]
            spans = [vsub(locs[c], base) for c in combo[1:]]
            if rank(spans) != d - 1:
                continue
            normal = nullspace(spans, d)[0]
            c0 = dot(normal, base)
            vals = [dot(normal, y) for y in locs]
            if all(v >= c0 for v in vals):
                pass
            elif all(v <= c0 for v in vals):
                normal = tuple(-x for x in normal)
                c0 = -c0
            else:
                continue
            key_n = primitive(normal)
            k = next(i for i, x in enumerate(normal) if x != 0)
            key = (key_n, c0 * Fraction(key_n[k]) / normal[k])
            local_facets.setdefault(key, (normal, c0))

    facets = []
    local_list = []
    for normal, c0 in local_facets.values():
        # n·y = n·Minv (x-o)[piv]
        coeff = [sum((normal[r] * minv[r][c] for r in range(d)), Fraction(0)) for c in range(d)]
        a = [Fraction(0)] * n
        for c, pc in enumerate(piv):
            a[pc] = coeff[c]
        b = c0 + dot(a, o)
        facets.append(_scale_halfspace(a, b))
        local_list.append((normal, c0))

    order = sorted(range(len(facets)), key=lambda k: facets[k])
    facets = [facets[k] for k in order]
    local_list = [local_list[k] for k in order]

    vertices = []
    for p, y in zip(pts, locs):
        tight = [nrm for nrm, c0 in local_list if dot(nrm, y) == c0]
        if len(tight) >= d and rank(tight) == d:
            vertices.append(p)
    incidence = tuple(tuple(dot(a, v) == b for a, b in facets) for v in vertices)
    return Polytope(tuple(vertices), tuple(facets), equations, incidence, d)


# ---------------------------------------------------------------------------
# combinatorial type


def combinatorial_type_equal(p: Polytope, q: Polytope) -> tuple[bool, dict[int, int] | None]:
    """Decide whether two polytopes have the same vertex-facet incidence up to relabelling."""
    if p.dim != q.dim or len(p.vertices) != len(q.vertices) or len(p.facets) != len(q.facets):
        return False, None
    fp = p.facet_vertex_sets()
    fq = q.facet_vertex_sets()
    if sorted(map(len, fp)) != sorted(map(len, fq)):
        return False, None
    deg_p = [sum(row) for row in p.incidence]
    deg_q = [sum(row) for row in q.incidence]
    if sorted(deg_p) != sorted(deg_q):
        return False, None
    nv = len(p.vertices)
    order = sorted(range(nv), key=lambda v: -deg_p[v])
    target_sets = Counter(fq)

    def consistent(assign: dict[int, int]) -> bool:
        dom = set(assign)
        img = set(assign.values())
        left = Counter(frozenset(assign[v] for v in f & dom) for f in fp)
        right = Counter(g & img for g in fq)
        return left == right

    assign: dict[int, int] = {}
    used: set[int] = set()

    def search(k: int) -> bool:
        if k == nv:
            return Counter(frozenset(assign[v] for v in f) for f in fp) == target_sets
        v = order[k]
        for w in range(nv):
            if w in used or deg_q[w] != deg_p[v]:
                continue
            assign[v] = w
            used.add(w)
            if consistent(assign) and search(k + 1):
                return True
            del assign[v]
            used.discard(w)
        return False

    if search(0):
        return True, dict(assign)
    return False, None


# ---------------------------------------------------------------------------
# pyramids and complexity


@dataclass(frozen=True)
class PyramidWitness:
    apex: QVec
    base: int  # facet index


def pyramid_witnesses(p: Polytope) -> list[PyramidWitness]:
    if p.dim == 0:
        raise ValueError("a point is not a pyramid over anything")
    nv = len(p.vertices)
    out = []
    for f, fset in enumerate(p.facet_vertex_sets()):
        if len(fset) == nv - 1:
            (apex,) = set(range(nv)) - fset
            out.append(PyramidWitness(p.vertices[apex], f))
    return out


def is_pyramid(p: Polytope, all_witnesses: bool = False):
    """A witness (apex, base facet) when P = pyr(apex, base); None otherwise."""
    ws = pyramid_witnesses(p)
    if all_witnesses:
        return ws
    return ws[0] if ws else None


@dataclass(frozen=True)
class ComplexityCertificate:
    value: int
    base: Polytope
    apexes: tuple[QVec, ...]  # v_1, ..., v_i with P_k = pyr(v_k, P_{k-1})

    @property
    def tower_length(self) -> int:
        return len(self.apexes) + 1


@lru_cache(maxsize=4096)
def _complexity_cached(p: Polytope) -> ComplexityCertificate:
    if p.dim == 0:
        return ComplexityCertificate(0, p, ())
    ws = pyramid_witnesses(p)
    if not ws:
        return ComplexityCertificate(p.dim, p, ())
    best = None
    for w in ws:
        sub = _complexity_cached(p.facet_polytope(w.base))
        cand = ComplexityCertificate(sub.value, sub.base, sub.apexes + (w.apex,))
        if best is None or cand.value < best.value:
            best = cand
    return best


def complexity(p: Polytope) -> ComplexityCertificate:
    """𝔠(P) = dim P minus the length of a maximal tower of pyramids ending at P."""
    return _complexity_cached(p)


def pyramid_over(p: Polytope, apex: Sequence) -> Polytope:
    q = convex_hull(list(p.vertices) + [qvec(apex)])
    if q.dim != p.dim + 1:
        raise ValueError("apex lies in the affine hull of the base")
    return q


# ---------------------------------------------------------------------------
# maps and cuts


def homothety(p: Polytope, center: Sequence, factor) -> Polytope:
    factor = Fraction(factor)
    if factor <= 0:
        raise ValueError("homothety factor must be positive")
    c = qvec(center)
    return convex_hull([vadd(c, vscale(factor, vsub(v, c))) for v in p.vertices])


def cut_vertex(q: Polytope, v: Sequence, chord: tuple[Sequence, object]) -> tuple[Polytope, Polytope]:
    """Cut the pyramid at vertex ``v`` off ``q`` along the hyperplane ``a·x = b``."""
    v = qvec(v)
    if v not in q.vertices:
        raise ValueError("not a vertex of the polytope")
    a = qvec(chord[0])
    b = Fraction(chord[1])
    sv = dot(a, v) - b
    if sv == 0:
        raise ValueError("chord passes through a vertex")
    inter = []
    far = []
    for w in q.vertices:
        if w == v:
            continue
        sw = dot(a, w) - b
        if sw == 0:
            raise ValueError("chord passes through a vertex")
        if (sw > 0) == (sv > 0):
            raise ValueError("chord does not separate the vertex from the others")
        t = sv / (sv - sw)
        inter.append(vadd(v, vscale(t, vsub(w, v))))
        far.append(w)
    return convex_hull(far + inter), convex_hull([v] + inter)


@dataclass(frozen=True)
class ExtensionWitness:
    apex: QVec
    region: Polytope
    complexity: int


def check_pyramidal_extension(p: Polytope, q: Polytope) -> ExtensionWitness | None:
    """Decide whether P ⊂ Q arises by cutting a pyramid off Q at one vertex."""
    if p.dim != q.dim or p.dim == 0:
        return None
    if not q.contains_polytope(p):
        return None
    outside = [w for w in q.vertices if not p.contains(w)]
    if len(outside) != 1:
        return None
    v = outside[0]
    if not p.in_affine_hull(v):
        return None
    violated = [f for f, (a, b) in enumerate(p.facets) if dot(a, v) < b]
    if len(violated) != 1:
        return None
    if convex_hull(list(p.vertices) + [v]).vertex_set() != q.vertex_set():
        return None
    base = p.facet_polytope(violated[0])
    region = convex_hull(list(base.vertices) + [v])
    return ExtensionWitness(v, region, complexity(region).value)


# ---------------------------------------------------------------------------
# admissible sequences

SHRINK = "pyramidal-shrink"
GROW = "grow"


@dataclass
class AdmissibleSequence:
    origin: Polytope
    target: Polytope
    steps: list[tuple[Polytope, str]] = field(default_factory=list)
    error: str | None = None

    @property
    def final(self) -> Polytope:
        return self.steps[-1][0] if self.steps else self.origin

    @property
    def reaches_target(self) -> bool:
        return self.target.contains_polytope(self.final)


@dataclass(frozen=True)
class SequenceCheck:
    ok: bool
    index: int | None = None
    reason: str = ""


def validate_admissible_sequence(seq: AdmissibleSequence) -> SequenceCheck:
    """Check containment in the origin and the shrink-or-grow rule step by step."""
    prev = seq.origin
    for k, (poly, kind) in enumerate(seq.steps):
        if poly.dim != seq.origin.dim:
            return SequenceCheck(False, k, "dimension changed")
        if not seq.origin.contains_polytope(poly):
            return SequenceCheck(False, k, "step leaves the origin polytope")
        if kind == SHRINK:
            if check_pyramidal_extension(poly, prev) is None:
                return SequenceCheck(False, k, "shrink is not a pyramidal extension")
        elif kind == GROW:
            if not poly.contains_polytope(prev):
                return SequenceCheck(False, k, "grow step does not contain its predecessor")
        else:
            return SequenceCheck(False, k, f"unknown step kind {kind!r}")
        prev = poly
    return SequenceCheck(True)


def _interior_candidates(target: Polytope) -> list[QVec]:
    xi = target.centroid()
    out = [xi]
    for k in range(1, 6):
        w = Fraction(1, 2 ** k)
        for v in target.vertices:
            out.append(vadd(vscale(1 - w, xi), vscale(w, v)))
    return [c for c in out if target.contains_strictly(c)]


def _reduce_to_simplex(current: Polytope, xi: QVec) -> list[Polytope] | None:
    """Drop vertices one at a time while keeping xi in the relative interior."""
    steps = []
    while len(current.vertices) > current.dim + 1:
        for v in current.vertices:
            cand = convex_hull([w for w in current.vertices if w != v])
            if cand.dim == current.dim and cand.contains_strictly(xi):
                steps.append(cand)
                current = cand
                break
        else:
            return None
    return steps


def _cevian_round(tri: Polytope, xi: QVec) -> list[Polytope]:
    """Three corner cuts taking a triangle to the cevian triangle of xi."""
    a, b, c = tri.vertices
    mat = [[a[k] - c[k], b[k] - c[k]] for k in range(len(a))]
    uv = solve(mat, vsub(xi, c))
    u, v = uv
    w = 1 - u - v
    ap = vscale(1 / (v + w), vadd(vscale(v, b), vscale(w, c)))
    bp = vscale(1 / (u + w), vadd(vscale(u, a), vscale(w, c)))
    cp = vscale(1 / (u + v), vadd(vscale(u, a), vscale(v, b)))
    return [convex_hull([cp, b, c, bp]), convex_hull([cp, ap, c, bp]), convex_hull([cp, ap, bp])]


def _segment_step(seg: Polytope, xi: QVec) -> Polytope:
    a, b = seg.vertices
    da = sum((x - y) ** 2 for x, y in zip(a, xi))
    db = sum((x - y) ** 2 for x, y in zip(b, xi))
    if da >= db:
        return convex_hull([vscale(Fraction(1, 2), vadd(a, xi)), b])
    return convex_hull([a, vscale(Fraction(1, 2), vadd(b, xi))])


def build_admissible_sequence(p: Polytope, target: Polytope, apexes: Sequence[Sequence] = (),
                              budget: int = 500) -> AdmissibleSequence:
    """Shrink ``p`` into ``target`` by corner cuts; optionally lift by apexes.

    Strategy in dimension two: drop vertices (cuts along diagonals) until a
    triangle containing an interior point ξ of the target remains, then
    repeatedly cut the triangle down to the cevian triangle of ξ.  Each round
    keeps ξ in the interior and shrinks the triangle geometrically towards ξ.
    In dimension one the endpoint farther from ξ is moved half-way to ξ.
    """
    apexes = [qvec(a) for a in apexes]

    def lift(poly: Polytope) -> Polytope:
        return convex_hull(list(poly.vertices) + apexes) if apexes else poly

    seq = AdmissibleSequence(lift(p), lift(target))
    if target.contains_polytope(p):
        return seq
    if p.dim > 2:
        raise ValueError("base polytopes of dimension > 2 are not supported")
    if target.dim != p.dim or not p.contains_polytope(target):
        raise ValueError("target must be a full-dimensional subpolytope of the base")

    base_steps: list[Polytope] = []
    if p.dim == 1:
        xi = target.centroid()
        cur = p
        while not target.contains_polytope(cur) and len(base_steps) < budget:
            cur = _segment_step(cur, xi)
            base_steps.append(cur)
    elif p.dim == 2:
        reduction = None
        for xi in _interior_candidates(target):
            if not p.contains_strictly(xi):
                continue
            reduction = _reduce_to_simplex(p, xi)
            if reduction is not None:
                break
        if reduction is None:
            raise ValueError("no interior point of the target admits a reduction")
        base_steps.extend(reduction)
        cur = base_steps[-1] if base_steps else p
        while not target.contains_polytope(cur) and len(base_steps) < budget:
            for poly in _cevian_round(cur, xi):
                base_steps.append(poly)
                cur = poly
                if target.contains_polytope(cur):
                    break
    else:
        raise ValueError("a point cannot be shrunk")

    seq.steps = [(lift(q), SHRINK) for q in base_steps[:budget]]
    if not seq.reaches_target:
        seq.error = "budget exhausted before reaching the target"
    return seq
