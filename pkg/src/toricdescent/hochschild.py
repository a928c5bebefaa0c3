"""Truncated Hochschild complexes C_*(Λ_j, s) and the descent step.

A tensor is a tuple of :class:`BasisMonomial` factors; a chain is a dict
``tensor -> Fraction`` (its canonical expansion).  The complex C_i(Λ_j, s) is
spanned by the tensors having at least one factor of degree in ``{1,…,s−1}``;
the remaining tensors span the subcomplex C_i(Λ_[s]) and are projected away
after each face map.  Every face map preserves total degree, so homology is
computed slice by slice in (i, d).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import floor
from typing import Iterable, Mapping, Sequence

from . import delta_machine as dm
from .lambda_ring import (
    BasisMonomial,
    DescentInstance,
    _basis_slice,
    divis_factor,
    monomial_product,
)
from .rational import dot, vadd, vscale
from .sparse import EchelonBasis, sparse_nullspace

Tensor = tuple  # tuple[BasisMonomial, ...]
Chain = dict  # Tensor -> Fraction

DEFAULT_MAX_TERMS = 200_000
DEFAULT_MAX_DEGREE = 100_000


class SliceBudgetExceeded(RuntimeError):
    """A slice is too large to enumerate within the configured budget."""


# ---------------------------------------------------------------------------
# slices


def is_quotient_tensor(t: Tensor, s: int) -> bool:
    return any(1 <= f.degree <= s - 1 for f in t)


def tensor_degree(t: Tensor) -> int:
    return sum(f.degree for f in t)


def tensor_key(t: Tensor):
    return tuple(f.sort_key() for f in t)


def has_low_monomials(inst: DescentInstance, j: int, s: int) -> bool:
    return any(_basis_slice(inst, j, k) for k in range(1, s))


def _compositions(d: int, parts: int):
    if parts == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _compositions(d - first, parts - 1):
            yield (first,) + rest


def slice_basis(inst: DescentInstance, j: int, i: int, d: int, s: int | None = None,
                max_terms: int = DEFAULT_MAX_TERMS, max_degree: int = DEFAULT_MAX_DEGREE) -> list[Tensor]:
    """Basis tensors of C_i(Λ_j, s) in total degree d, in lexicographic order."""
    s = inst.s if s is None else s
    if i < 0 or d < 1 or s < 2:
        return []
    if not has_low_monomials(inst, j, s):
        return []
    if d > max_degree:
        raise SliceBudgetExceeded(f"degree {d} exceeds the slice degree budget {max_degree}")
    out: list[Tensor] = []
    for comp in _compositions(d, i + 1):
        if not any(1 <= c <= s - 1 for c in comp):
            continue
        factors = [_basis_slice(inst, j, c) for c in comp]
        if not all(factors):
            continue
        for t in product(*factors):
            out.append(t)
            if len(out) > max_terms:
                raise SliceBudgetExceeded(f"slice (j={j}, i={i}, d={d}) exceeds {max_terms} tensors")
    return out


# ---------------------------------------------------------------------------
# face maps and the differential


def _add(out: dict, key, val) -> None:
    nv = out.get(key, 0) + val
    if nv:
        out[key] = nv
    else:
        out.pop(key, None)


def face(t: Tensor, r: int) -> dict[Tensor, int]:
    """Δ_r on a basis tensor, expanded in the basis (no projection)."""
    i = len(t) - 1
    if not 0 <= r <= i or i < 1:
        raise ValueError("face index out of range")
    out: dict[Tensor, int] = {}
    if r < i:
        for m, c in monomial_product(t[r], t[r + 1]).items():
            _add(out, t[:r] + (m,) + t[r + 2:], c)
    else:
        for m, c in monomial_product(t[i], t[0]).items():
            _add(out, (m,) + t[1:i], c)
    return out


def d_r(z: Mapping[Tensor, Fraction], r: int, s: int) -> Chain:
    """Component d_r of the quotient differential: face map, then projection."""
    out: Chain = {}
    for t, c in z.items():
        for u, k in face(t, r % len(t)).items():
            if is_quotient_tensor(u, s):
                _add(out, u, Fraction(c) * k)
    return out


@lru_cache(maxsize=200_000)
def _tensor_boundary(t: Tensor, s: int) -> tuple:
    out: dict[Tensor, int] = {}
    i = len(t) - 1
    if i >= 1:
        for r in range(i + 1):
            sign = -1 if r % 2 else 1
            for u, k in face(t, r).items():
                if is_quotient_tensor(u, s):
                    _add(out, u, sign * k)
    return tuple(out.items())


def boundary(z: Mapping[Tensor, Fraction], s: int) -> Chain:
    """∂ = Σ_r (−1)^r d_r; zero on 0-chains."""
    out: Chain = {}
    for t, c in z.items():
        for u, k in _tensor_boundary(t, s):
            _add(out, u, Fraction(c) * k)
    return out


def chain_add(*chains: Mapping[Tensor, Fraction]) -> Chain:
    out: Chain = {}
    for z in chains:
        for t, c in z.items():
            _add(out, t, Fraction(c))
    return out


def chain_scale(z: Mapping[Tensor, Fraction], a) -> Chain:
    a = Fraction(a)
    return {t: a * c for t, c in z.items()} if a else {}


def _index(tensors: Sequence[Tensor]) -> dict[Tensor, int]:
    return {t: k for k, t in enumerate(tensors)}


def differential(inst: DescentInstance, j: int, i: int, d: int, s: int | None = None,
                 **budget) -> tuple[list[Tensor], list[Tensor], list[dict[int, int]]]:
    """Sparse matrix of ∂_i on the (i, d) slice: one row per source tensor."""
    s = inst.s if s is None else s
    src = slice_basis(inst, j, i, d, s, **budget)
    tgt = slice_basis(inst, j, i - 1, d, s, **budget) if i >= 1 else []
    idx = _index(tgt)
    rows = []
    for t in src:
        img = boundary({t: Fraction(1)}, s)
        row = {}
        for u, c in img.items():
            if u not in idx:
                raise AssertionError(f"boundary left the slice: {u}")
            row[idx[u]] = int(c)
        rows.append(row)
    return src, tgt, rows


def check_dd_zero(inst: DescentInstance, j: int, i: int, d: int, s: int | None = None, **budget) -> int:
    """Check ∂∘∂ = 0 on every tensor of the (i, d) slice; returns the slice size."""
    s = inst.s if s is None else s
    src = slice_basis(inst, j, i, d, s, **budget)
    for t in src:
        if boundary(boundary({t: Fraction(1)}, s), s):
            raise AssertionError(f"∂∂ ≠ 0 on {t}")
    return len(src)


@dataclass(frozen=True)
class HomologyRank:
    j: int
    i: int
    d: int
    dim: int
    cycles: int
    boundaries: int

    @property
    def homology(self) -> int:
        return self.cycles - self.boundaries


def _rank(rows: Iterable[Mapping[int, int]]) -> int:
    basis = EchelonBasis()
    for r in rows:
        if r:
            basis.add(r)
    return basis.rank


def homology_rank(inst: DescentInstance, j: int, i: int, d: int, s: int | None = None,
                  **budget) -> HomologyRank:
    s = inst.s if s is None else s
    src, _, rows = differential(inst, j, i, d, s, **budget) if i >= 1 else (
        slice_basis(inst, j, i, d, s, **budget), [], [])
    rank_out = _rank(rows)
    _, _, rows_in = differential(inst, j, i + 1, d, s, **budget)
    rank_in = _rank(rows_in)
    return HomologyRank(j, i, d, len(src), len(src) - rank_out, rank_in)


def cycle_basis(inst: DescentInstance, j: int, i: int, d: int, s: int | None = None,
                **budget) -> list[Chain]:
    """A basis of Z_i(Λ_j, s)_d as chains."""
    s = inst.s if s is None else s
    if i == 0:
        return [{t: Fraction(1)} for t in slice_basis(inst, j, 0, d, s, **budget)]
    src, _, rows = differential(inst, j, i, d, s, **budget)
    kernel = sparse_nullspace(rows)
    return [{src[k]: c for k, c in vec.items()} for vec in kernel]


def induced_image_rank(inst: DescentInstance, j: int, jp: int, i: int, d: int, s: int | None = None,
                       **budget) -> int:
    """dim Im(HH_i(Λ_j, s)_d → HH_i(Λ_{j'}, s)_d)."""
    s = inst.s if s is None else s
    if jp < j:
        raise ValueError("need j ≤ j'")
    cycles = cycle_basis(inst, j, i, d, s, **budget)
    if not cycles:
        return 0
    tgt = slice_basis(inst, jp, i, d, s, **budget)
    idx = _index(tgt)
    _, _, rows_in = differential(inst, jp, i + 1, d, s, **budget)
    basis = EchelonBasis()
    for r in rows_in:
        if r:
            basis.add(r)
    base = basis.rank
    for z in cycles:
        row = {}
        for t, c in z.items():
            if t not in idx:
                raise AssertionError(f"tensor of Λ_{j} missing from Λ_{jp}: {t}")
            row[idx[t]] = c
        basis.add(row)
    return basis.rank - base


# ---------------------------------------------------------------------------
# δ-invariant, formats and restriction


@dataclass(frozen=True)
class DeltaData:
    ell: int | None
    r: int | None
    delta: int


def sign_pattern(t: Tensor, gamma: int) -> dm.ISeq:
    return tuple(f.degree > gamma for f in t)


def tensor_delta(t: Tensor, gamma: int) -> DeltaData:
    if len(t) == 1:
        high = t[0].degree > gamma
        return DeltaData(0, 0, 0) if high else DeltaData(None, None, -1)
    a = dm.analyze(sign_pattern(t, gamma))
    return DeltaData(a.ell, a.r, a.delta)


def chain_delta(z: Mapping[Tensor, Fraction], gamma: int) -> int:
    """δ of a chain: minimum over its canonical expansion, −1 for zero."""
    if not z:
        return -1
    return min(tensor_delta(t, gamma).delta for t in z)


def delta_data(x, gamma: int):
    if isinstance(x, dict):
        return chain_delta(x, gamma)
    return tensor_delta(x, gamma)


def window(ell: int, r: int, n: int) -> list[int]:
    return [p % n for p in range(ell, r + 1)]


def format_key(t: Tensor, gamma: int):
    """(ℓ, r, factors off the first cluster); tensors with equal keys share the format."""
    dd = tensor_delta(t, gamma)
    if dd.delta < 0:
        raise ValueError("format needs δ ≥ 0")
    inside = set(window(dd.ell, dd.r, len(t)))
    return (dd.ell, dd.r, tuple((u, t[u]) for u in range(len(t)) if u not in inside))


def same_format(a: Tensor, b: Tensor, gamma: int) -> bool:
    return len(a) == len(b) and format_key(a, gamma) == format_key(b, gamma)


def chain_format(z: Mapping[Tensor, Fraction], gamma: int):
    """Common format of all summands; raises if they disagree."""
    keys = {format_key(t, gamma) for t in z}
    if len(keys) != 1:
        raise ValueError("summands do not share a format")
    return next(iter(keys))


def tau(t: Tensor) -> Tensor:
    """Cyclic operator λ_0⊗…⊗λ_i ↦ λ_i⊗λ_0⊗…⊗λ_{i−1}."""
    return (t[-1],) + tuple(t[:-1])


def restrict(z, S: Sequence[int]):
    """Select the factors at the (cyclic) indices of S, in increasing order of S."""
    S = sorted(S)
    if not S:
        raise ValueError("S must be nonempty")
    if isinstance(z, dict):
        if not z:
            return {}
        n = len(next(iter(z)))
        if len({s % n for s in S}) != len(S):
            raise ValueError("S must consist of distinct residues")
        out: Chain = {}
        for t, c in z.items():
            _add(out, tuple(t[s % n] for s in S), Fraction(c))
        return out
    n = len(z)
    if len({s % n for s in S}) != len(S):
        raise ValueError("S must consist of distinct residues")
    return tuple(z[s % n] for s in S)


def restrict_delta(z, gamma: int):
    if isinstance(z, dict):
        if not z:
            return {}
        keys = {format_key(t, gamma) for t in z}
        if len(keys) != 1:
            raise ValueError("format mismatch")
        ell, r, _ = next(iter(keys))
        return restrict(z, range(ell, r + 1))
    dd = tensor_delta(z, gamma)
    if dd.delta < 0:
        raise ValueError("restriction needs δ ≥ 0")
    return restrict(z, range(dd.ell, dd.r + 1))


CASES = ("a", "b", "c", "d", "e", "f", "g")


def classify_pair(lam: Tensor, u: int, mu: Tensor, v: int, gamma: int, s: int) -> list[str]:
    """Which of the seven comparison cases hold for (λ̄, u) and (μ̄, v).

    Preconditions: δ > 0 for both tensors, u and v inside the respective
    cluster windows, d_u(λ̄) and d_v(μ̄) nonzero with equal formats.
    """
    i = len(lam) - 1
    dl, dmu = tensor_delta(lam, gamma), tensor_delta(mu, gamma)
    if dl.delta <= 0 or dmu.delta <= 0:
        raise ValueError("need δ > 0")
    if not (dl.ell <= u <= dl.r - 1 and dmu.ell <= v <= dmu.r - 1):
        raise ValueError("u, v must lie in the cluster windows")
    a = d_r({lam: Fraction(1)}, u % (i + 1), s)
    b = d_r({mu: Fraction(1)}, v % (i + 1), s)
    if not a or not b:
        raise ValueError("d_u(λ̄) and d_v(μ̄) must be nonzero")
    if chain_format(a, gamma) != chain_format(b, gamma):
        raise ValueError("d_u(λ̄) and d_v(μ̄) must share a format")
    L1, R1, L2, R2 = dl.ell, dl.r, dmu.ell, dmu.r

    def F(x):
        return format_key(x, gamma)

    hits = []
    same = L1 == L2 and R1 == R2 and F(lam) == F(mu)
    if same and R1 <= i:
        hits.append("a")
    if same and R1 >= i + 1 and u <= i and v <= i:
        hits.append("b")
    if same and R1 >= i + 1 and u >= i + 1 and v >= i + 1:
        hits.append("c")
    if L1 == L2 - 1 and R1 == R2 - 1 and R1 >= i + 1 and u <= i and v >= i + 1 and F(tau(lam)) == F(mu):
        hits.append("d")
    if L1 == L2 + 1 and R1 == R2 + 1 and R1 >= i + 2 and u >= i + 1 and v <= i and F(tau(mu)) == F(lam):
        hits.append("e")
    if L1 == 0 and L2 == i and R1 + i == R2 and u <= i and v == i and F(tau(mu)) == F(lam):
        hits.append("f")
    if L1 == i and L2 == 0 and R1 == R2 + i and u == i and v <= i and F(tau(lam)) == F(mu):
        hits.append("g")
    return hits


def format_tools(lam: Tensor, mu: Tensor, gamma: int, s: int | None = None,
                 u: int | None = None, v: int | None = None):
    """Same-format test, or the comparison case when u and v are given."""
    if u is None or v is None:
        return {"same_format": same_format(lam, mu, gamma)}
    hits = classify_pair(lam, u, mu, v, gamma, s)
    if len(hits) != 1:
        raise AssertionError(f"classification found {hits or 'no case'}")
    return {"case": hits[0]}


# ---------------------------------------------------------------------------
# i-sequences


def to_isequence(t: Tensor, gamma: int) -> dm.ISeq:
    return sign_pattern(t, gamma)


def isequence_set(z: Mapping[Tensor, Fraction], gamma: int, i: int) -> frozenset:
    """𝔖(z, j): sign patterns of the summands together with (+,…,+)."""
    return frozenset({sign_pattern(t, gamma) for t in z} | {dm.all_plus(i)})


# ---------------------------------------------------------------------------
# sampling cycles


def random_monomial(inst: DescentInstance, j: int, degree: int, rng: random.Random,
                    tries: int = 10_000) -> BasisMonomial | None:
    """A random basis monomial of Λ_j of the given degree (rejection sampling)."""
    c = inst.cones[j]
    g = inst.grading
    for _ in range(tries):
        slot = rng.choice(("E11", "DIAG", "E12", "E21", "E21t"))
        base = degree - inst.deg_t if slot == "E21t" else degree
        if base < 0:
            continue
        if base == 0:
            q = tuple([0] * inst.ambient_dim)
        else:
            corners = [vscale(Fraction(base, dot(g, r)), r) for r in c.rays]
            w = [rng.randint(0, 1 << 20) for _ in corners]
            tot = sum(w) or 1
            p = [sum(Fraction(wk, tot) * corner[a] for wk, corner in zip(w, corners))
                 for a in range(inst.ambient_dim)]
            q = [floor(x) for x in p]
            ax = max(range(len(g)), key=lambda a: abs(g[a]) == 1)
            if abs(g[ax]) != 1:
                continue
            q[ax] += (base - dot(g, q)) * g[ax]
            q = tuple(q)
            if not c.contains(q):
                continue
        if slot == "E21t":
            mono = inst.monomial("E21", vadd(q, inst.t))
        else:
            mono = inst.monomial(slot, q)
        if inst.in_ring(j, mono):
            return mono
    return None


def family_cycles(family: Sequence[Tensor], s: int) -> list[Chain]:
    """Exact basis of the cycles supported on a finite family of tensors."""
    family = sorted(set(family), key=tensor_key)
    images = [boundary({t: Fraction(1)}, s) for t in family]
    targets = sorted({u for img in images for u in img}, key=tensor_key)
    idx = _index(targets)
    columns = [{idx[u]: c for u, c in img.items()} for img in images]
    return [{family[k]: c for k, c in vec.items()} for vec in sparse_nullspace(columns)]


def sample_cycles(inst: DescentInstance, j: int, count: int, seed: int = 0, s: int | None = None,
                  i: int | None = None, families: int = 3, high_offset: int = 50) -> list[Chain]:
    """Random homogeneous cycles of C_i(Λ_j, s) with δ_j ≥ 0.

    A family fixes one low factor (degree in ``{1,…,s−1}``) and ``i`` factors
    of degree > γ_j; its members are all arrangements of these factors.  The
    cycles supported on a family are computed exactly, and a sample is a
    random rational combination of such cycles drawn from a few families of
    one total degree.  For i = 1 every member is already a cycle.
    """
    s = inst.s if s is None else s
    i = inst.i if i is None else i
    rng = random.Random(seed)
    lows = [m for k in range(1, s) for m in _basis_slice(inst, j, k)]
    if not lows or i < 1:
        return []
    gamma = inst.gammas[j]
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        d = (i * (gamma + 1) + rng.randrange(0, high_offset) + max(m.degree for m in lows))
        z: Chain = {}
        for _ in range(rng.randrange(1, families + 1)):
            low = rng.choice(lows)
            rest = d - low.degree
            cuts = sorted(rng.randrange(0, rest - i * (gamma + 1) + 1) for _ in range(i - 1))
            extra = [b - a for a, b in zip([0] + cuts, cuts + [rest - i * (gamma + 1)])]
            highs = [random_monomial(inst, j, gamma + 1 + e, rng) for e in extra]
            if any(h is None for h in highs):
                continue
            members = set()
            for perm in set(permutations(highs)):
                for pos in range(i + 1):
                    members.add(tuple(perm[:pos]) + (low,) + tuple(perm[pos:]))
            for c in family_cycles(list(members), s):
                z = chain_add(z, chain_scale(c, Fraction(rng.choice([-3, -2, -1, 1, 2, 3]),
                                                         rng.choice([1, 1, 2, 3]))))
        if z and not boundary(z, s) and chain_delta(z, gamma) >= 0:
            out.append(z)
    return out


# ---------------------------------------------------------------------------
# the descent step


@dataclass
class DescentStepRecord:
    j: int
    z: Chain
    z_min: Chain
    z_min_prime: Chain
    z_min_second: Chain
    K: list[Tensor]
    factorizations: dict
    hats: dict
    signs: dict
    z_hat: Chain
    z1: Chain
    state: frozenset
    new_state: frozenset
    witness_T: frozenset | None
    delta_classes: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.flags.values())


def _shift(r: int, r0: int, i: int) -> int:
    """r^{(k)}: unchanged when r_0(λ̄_k) ≤ i, shifted by one otherwise."""
    return r if r0 <= i else r + 1


def _validate_cycle(inst: DescentInstance, z: Mapping[Tensor, Fraction], j: int, s: int) -> int:
    if not z:
        raise ValueError("the zero chain has no descent step")
    degs = set()
    lengths = set()
    for t, c in z.items():
        if not isinstance(c, (int, Fraction)) or isinstance(c, bool):
            raise ValueError("coefficients must be exact rationals")
        if c == 0:
            raise ValueError("canonical expansion has a zero coefficient")
        if not is_quotient_tensor(t, s):
            raise ValueError(f"tensor outside C_*(Λ, s): {t}")
        if not all(inst.in_ring(j, f) for f in t):
            raise ValueError(f"tensor outside Λ_{j}: {t}")
        degs.add(tensor_degree(t))
        lengths.add(len(t))
    if len(degs) != 1 or len(lengths) != 1:
        raise ValueError("chain must be homogeneous")
    if boundary(z, s):
        raise ValueError("chain is not a cycle")
    return lengths.pop() - 1


def descent_step(inst: DescentInstance, z: Mapping[Tensor, Fraction], j: int = 0,
                 s: int | None = None) -> DescentStepRecord:
    """Push a cycle of Λ_j with δ_j ≥ 0 one ring up, verifying every identity exactly."""
    s = inst.s if s is None else s
    if j >= inst.n:
        raise ValueError("no next ring in the chain")
    z = {t: Fraction(c) if isinstance(c, int) else c for t, c in z.items()}
    i = _validate_cycle(inst, z, j, s)
    if i < 1:
        raise ValueError("descent needs i ≥ 1")
    g0, g1 = inst.gammas[j], inst.gammas[j + 1]
    if chain_delta(z, g0) < 0:
        raise ValueError("δ_j(z) must be nonnegative")
    n0, n1 = i + 1, i + 2

    def highs(t):
        return sum(f.degree > g0 for f in t)

    hmin = min(highs(t) for t in z)
    z_min = {t: c for t, c in z.items() if highs(t) == hmin}
    dd = {t: tensor_delta(t, g0) for t in z}
    zp = {t: c for t, c in z_min.items() if 1 <= dd[t].ell <= dd[t].r <= i}
    zpp = {t: c for t, c in z_min.items() if t not in zp}
    part = zp if zp else zpp
    dpart = min(dd[t].delta for t in part)
    K = sorted((t for t in part if dd[t].delta == dpart), key=tensor_key)

    facts, hats, signs = {}, {}, {}
    z_hat: Chain = {}
    for t in K:
        r0 = dd[t].r
        pos = r0 % n0
        rest, central = divis_factor(inst, j, t[pos])
        hat = t[:pos] + (rest, central) + t[pos + 1:]
        if not all(inst.in_ring(j + 1, f) for f in hat) or not is_quotient_tensor(hat, s):
            raise AssertionError("λ̂_k is not a basis tensor of C_{i+1}(Λ_{j+1}, s)")
        eps = -1 if (_shift(r0, r0, i) % n1) % 2 == 0 else 1
        facts[t], hats[t], signs[t] = (rest, central), hat, eps
        _add(z_hat, hat, eps * z[t])
    z1 = chain_add(z, boundary(z_hat, s))

    flags: dict[str, bool] = {}
    failures: list[str] = []

    def flag(name, ok, detail=""):
        flags[name] = bool(ok)
        if not ok:
            failures.append(f"{name}: {detail}" if detail else name)

    flag("z1_cycle", not boundary(z1, s), "∂z₁ ≠ 0 in Λ_{j+1}")
    flag("z1_minus_z_boundary", chain_add(z1, chain_scale(z, -1)) == boundary(z_hat, s))

    # (kthsummand): the merged factor reproduces the 𝔎-part of z
    ks: Chain = {t: z[t] for t in K}
    for t in K:
        rr = _shift(dd[t].r, dd[t].r, i) % n1
        sign = -1 if rr % 2 else 1
        ks = chain_add(ks, chain_scale(d_r({hats[t]: Fraction(1)}, rr, s), sign * signs[t] * z[t]))
    flag("kthsummand", not ks, "Σ ξ_k λ̄_k − Σ d_{r₀^{(k)}}(ξ_k λ̂_k) ≠ 0")

    # (cycle0sum) over the cluster windows, in the complex of Λ_j
    c0: Chain = {}
    pairs = []
    for t in K:
        for r in range(dd[t].ell, dd[t].r):
            img = d_r({t: Fraction(1)}, r % n0, s)
            pairs.append((t, r, img))
            sign = -1 if (r % n0) % 2 else 1
            c0 = chain_add(c0, chain_scale(img, sign * z[t]))
    flag("cycle0sum", not c0)

    # (0sum) over the shifted windows 𝒮_k, in the complex of Λ_{j+1}
    s0: Chain = {}
    for t in K:
        r0 = dd[t].r
        for r in range(dd[t].ell, r0):
            rr = _shift(r, r0, i) % n1
            sign = -1 if rr % 2 else 1
            s0 = chain_add(s0, chain_scale(d_r({hats[t]: Fraction(1)}, rr, s), sign * signs[t] * z[t]))
    flag("0sum", not s0)

    # implication (0)
    imp_ok = True
    for t, r, img in pairs:
        if not img and d_r({hats[t]: Fraction(1)}, _shift(r, dd[t].r, i) % n1, s):
            imp_ok = False
    flag("implication0", imp_ok)

    # Δ(k, r) constant on each format class of d'_r(λ̄_k)
    classes: dict = {}
    for t, r, img in pairs:
        if not img:
            continue
        key = chain_format(img, g0)
        r0 = dd[t].r
        delta_val = _shift(r, r0, i) % n1 + _shift(r0, r0, i) % n1 - r % n0
        classes.setdefault(key, []).append((t, r, delta_val))
    const_ok = all(len({dv for _, _, dv in members}) == 1 for members in classes.values())
    flag("delta_constant", const_ok)

    state = isequence_set(z, g0, i)
    new_state = isequence_set(z1, g1, i)
    ok, witness = dm.validate_step(state, new_state, mode="literal")
    flag("claimB", ok, f"{sorted(map(dm.show, state))} → {sorted(map(dm.show, new_state))}")
    return DescentStepRecord(j, z, z_min, zp, zpp, K, facts, hats, signs, z_hat, z1,
                             state, new_state, witness, classes, flags, failures)


# ---------------------------------------------------------------------------
# randomized checks of the restriction and comparison lemmas


@dataclass
class LemmaReport:
    families: int = 0
    restriction_checks: int = 0
    restriction_failures: int = 0
    pairs: int = 0
    case_counts: dict = field(default_factory=dict)
    classification_failures: list = field(default_factory=list)
    format_failures: int = 0

    @property
    def ok(self) -> bool:
        return (self.restriction_failures == 0 and not self.classification_failures
                and self.format_failures == 0)


def face_families(tensors: Iterable[Tensor], gamma: int, s: int) -> dict:
    """Group pairs (λ̄, u), u in the cluster window, by the format of d_u(λ̄) ≠ 0.

    Also checks that all summands of each d_u(λ̄) share one format.
    """
    groups: dict = {}
    for t in tensors:
        dd = tensor_delta(t, gamma)
        if dd.delta <= 0:
            continue
        for u in range(dd.ell, dd.r):
            img = d_r({t: Fraction(1)}, u % len(t), s)
            if not img:
                continue
            groups.setdefault(chain_format(img, gamma), []).append((t, u))
    return groups


def check_restriction_lemma(family: Sequence[Tensor], S: Sequence[int], rng: random.Random) -> bool:
    """Σξ_kλ̄_k = 0 ⟺ Σξ_k(λ̄_k|_S) = 0 for tensors agreeing off S."""
    n = len(family[0])
    off = [u for u in range(n) if u not in {x % n for x in S}]
    if len({tuple(t[u] for u in off) for t in family}) != 1:
        raise ValueError("family members must agree off S")
    coeffs = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in family]
    if len(family) >= 2 and rng.random() < 0.5:
        # force a cancellation: repeat a member with the opposite coefficient
        family = list(family) + [family[0]]
        coeffs = coeffs + [-coeffs[0]]
    full: Chain = {}
    part: Chain = {}
    for t, c in zip(family, coeffs):
        _add(full, t, c)
        _add(part, restrict(t, S), c)
    return (not full) == (not part)


def lemma_checks(inst: DescentInstance, j: int, i: int, degrees: Iterable[int], s: int | None = None,
                 gamma: int | None = None, seed: int = 0, max_pairs: int | None = None,
                 report: LemmaReport | None = None, **budget) -> LemmaReport:
    """Comparison-case classification and restriction checks on slices.

    Every pair of each family is classified unless ``max_pairs`` caps the
    number of pairs drawn (uniformly, with the diagonal always included).
    ``gamma`` overrides the threshold γ_j; it must be at least s − 1 so that
    low factors stay low.
    """
    s = inst.s if s is None else s
    gamma = inst.gammas[j] if gamma is None else gamma
    if gamma < s - 1:
        raise ValueError("threshold must be at least s − 1")
    rng = random.Random(seed)
    rep = report if report is not None else LemmaReport()
    for d in degrees:
        tensors = slice_basis(inst, j, i, d, s, **budget)
        try:
            groups = face_families(tensors, gamma, s)
        except ValueError:
            rep.format_failures += 1
            continue
        for key, members in sorted(groups.items(), key=lambda kv: repr(kv[0])):
            rep.families += 1
            m = len(members)
            if max_pairs is None or m * m <= max_pairs:
                index_pairs = [(a, b) for a in range(m) for b in range(m)]
            else:
                index_pairs = [(a, a) for a in range(min(m, max_pairs // 4))]
                index_pairs += [(rng.randrange(m), rng.randrange(m)) for _ in range(max_pairs - len(index_pairs))]
            for a, b in index_pairs:
                lam, u = members[a]
                mu, v = members[b]
                hits = classify_pair(lam, u, mu, v, gamma, s)
                rep.pairs += 1
                if len(hits) == 1:
                    rep.case_counts[hits[0]] = rep.case_counts.get(hits[0], 0) + 1
                else:
                    rep.classification_failures.append((lam, u, mu, v, hits))
            # restriction lemma on the family of images: summands agree off the cluster window
            ell, r, _ = key
            images = [img for t, u in members for img in d_r({t: Fraction(1)}, u % len(t), s)]
            rep.restriction_checks += 1
            if not check_restriction_lemma(images, range(ell, r + 1), rng):
                rep.restriction_failures += 1
    return rep
