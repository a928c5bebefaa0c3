"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are exact (every comparison is over ℚ or ℤ); the time limits are
pinned below.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

from conftest import rank2_instance
from oracles import brute_complexity, brute_exceptional, brute_hilbert_basis
from toricdescent import delta_machine as dm
from toricdescent import hochschild as hh
from toricdescent.cone_monoid import cone, cross_section, hilbert_basis
from toricdescent.exact_geometry import (
    build_admissible_sequence,
    complexity,
    convex_hull,
    homothety,
    is_pyramid,
    pyramid_over,
    validate_admissible_sequence,
)
from toricdescent.lambda_ring import exceptional_monomials

LIMIT_COMPLEXITY = 30.0
LIMIT_HILBERT = 60.0
LIMIT_MACHINE_I1 = 60.0
LIMIT_MACHINE_I2 = 600.0
LIMIT_SUBLEMMA = 60.0
LIMIT_ORDER = 60.0
LIMIT_DD = 300.0
LIMIT_WINDOW = 1800.0
LIMIT_DESCENT = 600.0
LIMIT_ADMISSIBLE = 60.0
LIMIT_LEMMA = 300.0


def random_polytopes(count: int, seed: int = 2024):
    """Random rational polytopes of dimension ≤ 3 with at most 8 vertices.

    Half are drawn from small lattice boxes (squares, prisms and pyramids
    arise often), half are generic rational point sets; some are embedded in
    a lower-dimensional affine subspace of ℝ³.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.randint(1, 3)
        k = rng.randint(d + 1, 8)
        if rng.random() < 0.5:
            pts = [tuple(Fraction(rng.randint(0, 2)) for _ in range(d)) for _ in range(k)]
        else:
            pts = [tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(d)) for _ in range(k)]
        if d < 3 and rng.random() < 0.3:
            pts = [p + (p[0] + 2 * p[-1],) * (3 - d) for p in pts]
        p = convex_hull(pts)
        if p.dim >= 1 and len(p.vertices) <= 8:
            out.append(p)
    return out


CORPUS = random_polytopes(50)


def test_criterion_01_complexity_oracle(verdict):
    t0 = time.perf_counter()
    mismatches = [p for p in CORPUS if complexity(p).value != brute_complexity(frozenset(p.vertices))]
    elapsed = time.perf_counter() - t0
    values = sorted({complexity(p).value for p in CORPUS})
    verdict(1, not mismatches and elapsed < LIMIT_COMPLEXITY,
            f"complexity vs tower enumeration: {50 - len(mismatches)}/50 exact, "
            f"values seen {values}, {elapsed:.2f} s (limit {LIMIT_COMPLEXITY:.0f} s)")


def test_criterion_02_complexity_axioms(verdict):
    rng = random.Random(7)
    bad = []
    for p in CORPUS:
        c = complexity(p).value
        if (c == p.dim) != (is_pyramid(p) is None):
            bad.append(("dim iff not pyramid", p))
        if len(p.vertices) == p.dim + 1 and c != 0:
            bad.append(("simplex", p))
    lifts = 0
    for p in CORPUS[:20]:
        lifted = convex_hull([v + (Fraction(0),) for v in p.vertices])
        apex = tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(p.ambient_dim)) + (Fraction(1),)
        q = pyramid_over(lifted, apex)
        lifts += 1
        if complexity(q).value != complexity(p).value:
            bad.append(("lift", p))
    verdict(2, not bad and lifts == 20,
            f"axioms on 50 polytopes + {lifts} pyramid lifts: {len(bad)} violations")


def random_cones(count: int, seed: int = 11):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.randint(2, 3)
        k = rng.randint(d, d + 2)
        rays = [tuple(rng.randint(-5, 5) for _ in range(d)) for _ in range(k)]
        if any(not any(r) for r in rays):
            continue
        try:
            c = cone(rays)
        except ValueError:
            continue  # not pointed
        if c.dim == d:
            out.append(c)
    return out


def test_criterion_03_hilbert_oracle(verdict):
    t0 = time.perf_counter()
    cones = random_cones(20)
    mismatches = 0
    sizes = []
    for c in cones:
        phi = cross_section(c).functional
        bound = c.dim * max(sum(a * b for a, b in zip(phi, r)) for r in c.rays)
        hb = hilbert_basis(c)
        sizes.append(len(hb))
        if hb != brute_hilbert_basis(c, phi, bound):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    verdict(3, mismatches == 0 and elapsed < LIMIT_HILBERT,
            f"Hilbert bases vs irreducible sieve: {20 - mismatches}/20 exact, "
            f"basis sizes {min(sizes)}..{max(sizes)}, {elapsed:.2f} s (limit {LIMIT_HILBERT:.0f} s)")


def test_criterion_04_machine_bound(verdict):
    t0 = time.perf_counter()
    r1 = dm.worst_case(1)
    t1 = time.perf_counter() - t0
    t0 = time.perf_counter()
    r2 = dm.worst_case(2, episodes=10 ** 5, seed=1)
    t2 = time.perf_counter() - t0
    ok = (r1.exhaustive and r1.observed_max < 7 and r1.cycle is None and t1 < LIMIT_MACHINE_I1
          and r2.cycle is None and r2.observed_max < 127 and r2.episodes == 10 ** 5 and t2 < LIMIT_MACHINE_I2)
    verdict(4, ok, f"i=1 exhaustive max {r1.observed_max} < 7 ({t1:.2f} s); "
                   f"i=2 exhaustive + identity + 10^5 episodes max {r2.observed_max} < 127 ({t2:.2f} s)")


def test_criterion_05_sublemma_bound(verdict):
    t0 = time.perf_counter()
    results = [dm.sublemma_solve(n) for n in range(1, 6)]
    elapsed = time.perf_counter() - t0
    ok = all(r.observed_max <= r.bound for r in results) and elapsed < LIMIT_SUBLEMMA
    verdict(5, ok, "observed/bound " + ", ".join(f"n={r.n}: {r.observed_max}/{r.bound}" for r in results)
            + f", {elapsed:.2f} s")


def test_criterion_06_order_acyclic(verdict):
    t0 = time.perf_counter()
    results = {i: dm.order_check(i) for i in (1, 2, 3)}
    elapsed = time.perf_counter() - t0
    ok = all(r[0] for r in results.values()) and elapsed < LIMIT_ORDER
    verdict(6, ok, "transformation digraph acyclic per plus-count level for i=1,2,3: "
            + ", ".join(f"i={i}: {'acyclic' if r[0] else 'cycle ' + str(r[1])}" for i, r in results.items())
            + f", {elapsed:.2f} s")


def dd_sweep(inst):
    sizes = 0
    for j in range(inst.n + 1):
        for i in range(4):
            for d in range(1, 13):
                sizes += hh.check_dd_zero(inst, j, i, d, 2)
    return sizes


def test_criterion_07_dd_zero(verdict, documented, variant_t21):
    t0 = time.perf_counter()
    doc_terms = dd_sweep(documented)
    t_doc = time.perf_counter() - t0
    t0 = time.perf_counter()
    var_terms = dd_sweep(variant_t21)
    t_var = time.perf_counter() - t0
    note = "vacuous: every slice is empty" if doc_terms == 0 else f"{doc_terms} tensors"
    verdict(7, t_doc + t_var < LIMIT_DD,
            f"∂∂ = 0 on all slices i ≤ 3, d ≤ 12, j = 0..6 of the documented instance ({note}, {t_doc:.2f} s); "
            f"supplementary t=(2,1): {var_terms} tensors checked exactly ({t_var:.1f} s)")


def test_criterion_08_image_window(verdict, documented):
    t0 = time.perf_counter()
    lo = 2 * documented.gammas[0]
    ranks = {d: hh.induced_image_rank(documented, 0, documented.n, 1, d, 2) for d in range(lo + 1, lo + 6)}
    elapsed = time.perf_counter() - t0
    vacuous = not hh.has_low_monomials(documented, 0, 2)
    verdict(8, all(r == 0 for r in ranks.values()) and elapsed < LIMIT_WINDOW,
            f"image rank HH_1(Λ_0) → HH_1(Λ_6) on d ∈ ({lo}, {lo + 5}]: {sorted(set(ranks.values()))}"
            + (" (vacuous: Λ_0 has no monomial of degree 1, so the slices are zero)" if vacuous else "")
            + f", {elapsed:.2f} s")


def descent_summary(inst, count, i_values, seed):
    records = []
    for i in i_values:
        for j in (0, inst.n // 2, inst.n - 1):
            for z in hh.sample_cycles(inst, j, count, seed=seed + 7 * i + j, s=2, i=i):
                records.append(hh.descent_step(inst, z, j=j, s=2))
    return records


def test_criterion_09_descent_identities(verdict, documented, variant_t21):
    t0 = time.perf_counter()
    cycles = hh.sample_cycles(documented, 0, 10, seed=0)
    records = [hh.descent_step(documented, z) for z in cycles]
    doc_ok = len(records) >= 10 and all(r.ok for r in records)
    supp = descent_summary(variant_t21, 4, (1, 2), seed=3)
    elapsed = time.perf_counter() - t0
    flags = sorted({f for r in supp for f in r.flags})
    supp_ok = all(r.ok for r in supp)
    verdict(9, doc_ok and elapsed < LIMIT_DESCENT,
            f"documented instance: {len(records)} homogeneous cycles with δ₀ ≥ 0 available (need ≥ 10; "
            f"C_1(Λ_0, 2) is zero); supplementary t=(2,1), i ∈ {{1,2}}: {len(supp)} steps, "
            f"flags {flags} {'all true' if supp_ok else 'FAILED'}, {elapsed:.1f} s")


def test_criterion_10_exceptional_monomials(verdict):
    found = {}
    oracle_ok = True
    for t in ((4, 2), (2, 1)):
        inst = rank2_instance(t=t)
        rep = exceptional_monomials(inst, 0)
        found[t] = [(m.slot, m.point) for m in rep.monomials]
        oracle_ok &= rep.monomials == brute_exceptional(inst, 0, rep.threshold + 3)
    expected = {(4, 2): [("E21", (5, 4))], (2, 1): []}
    verdict(10, found == expected and oracle_ok,
            f"t=(4,2): {found[(4, 2)]} (expected {expected[(4, 2)]}); "
            f"t=(2,1): {found[(2, 1)]} (expected {expected[(2, 1)]}); "
            f"brute-force enumeration agrees with the computed sets: {oracle_ok}")


def random_base(rng):
    while True:
        k = rng.choice((3, 4))
        pts = [(Fraction(rng.randint(-20, 20), rng.randint(1, 4)), Fraction(rng.randint(-20, 20), rng.randint(1, 4)))
               for _ in range(k)]
        p = convex_hull(pts)
        if p.dim == 2 and len(p.vertices) == k:
            return p


def test_criterion_11_admissible_sequences(verdict):
    rng = random.Random(17)
    t0 = time.perf_counter()
    lengths, bad = [], 0
    for _ in range(20):
        p = random_base(rng)
        w = [rng.randint(1, 9) for _ in p.vertices]
        center = tuple(sum(Fraction(wk, sum(w)) * v[a] for wk, v in zip(w, p.vertices)) for a in range(2))
        factor = Fraction(rng.randint(1, 7), 8)
        target = homothety(p, center, factor)
        seq = build_admissible_sequence(p, target)
        ok = validate_admissible_sequence(seq).ok and seq.reaches_target and len(seq.steps) <= 500
        bad += not ok
        lengths.append(len(seq.steps))
    elapsed = time.perf_counter() - t0
    verdict(11, bad == 0 and elapsed < LIMIT_ADMISSIBLE,
            f"{20 - bad}/20 validated sequences ending in the target, lengths {min(lengths)}..{max(lengths)} "
            f"(≤ 500), {elapsed:.2f} s")


def test_criterion_12_format_lemmas(verdict, variant_t21):
    rng = random.Random(12)
    insts = {2: variant_t21, 3: rank2_instance(s=3)}
    rep = hh.LemmaReport()
    t0 = time.perf_counter()
    while rep.families < 250 and time.perf_counter() - t0 < LIMIT_LEMMA / 2:
        s = rng.choice((2, 3))
        inst = insts[s]
        j = rng.randint(0, inst.n)
        i = rng.choice((2, 3))
        g = rng.randint(s - 1, 5)
        d = rng.randint(2 * g + 3, 2 * g + 8)
        try:
            hh.lemma_checks(inst, j, i, [d], s=s, gamma=g, seed=rng.randrange(1 << 30),
                            max_pairs=200, report=rep, max_terms=20000)
        except hh.SliceBudgetExceeded:
            continue
    elapsed = time.perf_counter() - t0
    cases = ", ".join(f"{k}:{rep.case_counts.get(k, 0)}" for k in hh.CASES)
    verdict(12, rep.ok and rep.families >= 200 and elapsed < LIMIT_LEMMA,
            f"{rep.families} monomial families, {rep.restriction_checks} restriction checks "
            f"({rep.restriction_failures} failures), {rep.pairs} pairs classified "
            f"({len(rep.classification_failures)} not in exactly one case; {cases}), "
            f"{rep.format_failures} format failures, {elapsed:.1f} s")
