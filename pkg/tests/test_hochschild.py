from __future__ import annotations

import random
from fractions import Fraction

import pytest

from toricdescent import delta_machine as dm
from toricdescent.hochschild import (
    CASES,
    LemmaReport,
    SliceBudgetExceeded,
    boundary,
    check_dd_zero,
    check_restriction_lemma,
    classify_pair,
    cycle_basis,
    d_r,
    descent_step,
    family_cycles,
    format_tools,
    homology_rank,
    induced_image_rank,
    isequence_set,
    lemma_checks,
    restrict,
    restrict_delta,
    sample_cycles,
    slice_basis,
    tau,
    tensor_delta,
)
from toricdescent.lambda_ring import lambda_basis_slice, monomial_product


def mono(inst, d, k=0, j=0, slot=None):
    ms = [m for m in lambda_basis_slice(inst, j, d) if slot is None or m.slot == slot]
    return ms[k % len(ms)]


def pattern_tensor(inst, pattern, gamma, j=0):
    """A tensor whose factors are high (degree γ+1) at '+' and degree 1 at '-'."""
    return tuple(mono(inst, gamma + 1 if c == "+" else 1, k, j) for k, c in enumerate(pattern))


# --- slices -----------------------------------------------------------------


def test_s2_slices_need_a_degree_one_factor(variant_t21):
    for i in range(3):
        for d in range(1, 6):
            for t in slice_basis(variant_t21, 0, i, d, 2):
                assert any(f.degree == 1 for f in t)


def test_s1_slices_are_empty(variant_t21):
    assert all(not slice_basis(variant_t21, 0, i, d, 1) for i in range(3) for d in range(1, 6))


def test_degree_zero_chains_are_monomials(variant_s3):
    for d in (1, 2):
        got = slice_basis(variant_s3, 0, 0, d, 3)
        assert got == [(m,) for m in lambda_basis_slice(variant_s3, 0, d)]


def test_documented_instance_has_no_low_monomials(documented):
    assert all(not lambda_basis_slice(documented, j, 1) for j in range(documented.n + 1))
    assert slice_basis(documented, 0, 1, 8) == []


def test_slice_budget(variant_t21):
    with pytest.raises(SliceBudgetExceeded):
        slice_basis(variant_t21, 0, 2, 12, max_terms=10)
    with pytest.raises(SliceBudgetExceeded):
        slice_basis(variant_t21, 0, 1, 10 ** 9)


# --- differential -------------------------------------------------------------


def test_boundary_of_two_tensor_is_commutator_class(variant_s3):
    a, b = mono(variant_s3, 2, 0), mono(variant_s3, 4, 3)
    expected = {}
    for m, c in monomial_product(a, b).items():
        expected[(m,)] = expected.get((m,), 0) + c
    for m, c in monomial_product(b, a).items():
        expected[(m,)] = expected.get((m,), 0) - c
    expected = {k: v for k, v in expected.items() if v and 1 <= k[0].degree <= 2}
    assert boundary({(a, b): Fraction(1)}, 3) == expected


def test_projection_drops_high_products(variant_t21):
    a, b = mono(variant_t21, 1, 0), mono(variant_t21, 1, 1)
    # the product has degree 2 = s, so it lies in the subcomplex and vanishes
    assert d_r({(a, b): Fraction(1)}, 0, 2) == {}


def test_dd_zero_small_slices(variant_t21, variant_s3):
    for inst in (variant_t21, variant_s3):
        for j in (0, inst.n):
            for i in range(4):
                for d in range(1, 8):
                    check_dd_zero(inst, j, i, d)


# --- homology -----------------------------------------------------------------


def test_homology_ranks(variant_t21):
    for i in range(3):
        for d in range(1, 6):
            h = homology_rank(variant_t21, 6, i, d)
            assert h.homology >= 0
            if i == 0:
                assert h.cycles == h.dim
    assert homology_rank(variant_t21, 6, 1, 4).homology == 1
    assert homology_rank(variant_t21, 6, 1, 5).homology == 1


def test_cycle_basis_consists_of_cycles(variant_t21):
    for z in cycle_basis(variant_t21, 0, 2, 5):
        assert not boundary(z, 2)


def test_image_rank_bounds(variant_t21):
    for d in range(1, 6):
        h0 = homology_rank(variant_t21, 0, 1, d).homology
        h6 = homology_rank(variant_t21, 6, 1, d).homology
        assert induced_image_rank(variant_t21, 3, 3, 1, d) == homology_rank(variant_t21, 3, 1, d).homology
        assert induced_image_rank(variant_t21, 0, 6, 1, d) <= min(h0, h6)
    with pytest.raises(ValueError):
        induced_image_rank(variant_t21, 2, 1, 1, 3)


def test_image_rank_vanishes_above_threshold_vacuously(documented):
    lo = 2 * documented.gammas[0]
    assert all(induced_image_rank(documented, 0, 6, 1, d) == 0 for d in range(lo + 1, lo + 6))


# --- δ, restriction and formats -------------------------------------------------


def test_delta_of_documented_pattern(variant_t21):
    t = pattern_tensor(variant_t21, "++-+-+", 3)
    dd = tensor_delta(t, 3)
    assert (dd.ell, dd.r, dd.delta) == (3, 3, 0)


def test_only_penultimate_low_gives_r_2i_minus_1(variant_t21):
    for i in (2, 3, 4):
        pat = ["+"] * (i + 1)
        pat[i - 1] = "-"
        dd = tensor_delta(pattern_tensor(variant_t21, pat, 3), 3)
        assert dd.r == 2 * i - 1


def test_all_low_has_delta_minus_one(variant_t21):
    assert tensor_delta(pattern_tensor(variant_t21, "---", 3), 3).delta == -1


def test_restrict():
    t = ("a", "b", "c", "d")
    assert restrict(t, range(4)) == t
    assert restrict(t, [2]) == ("c",)
    assert restrict(t, [3, 4]) == ("d", "a")
    assert restrict({t: Fraction(2)}, [1]) == {("b",): Fraction(2)}


def test_restrict_delta_selects_cluster(variant_t21):
    t = pattern_tensor(variant_t21, "-++-", 3)
    assert restrict_delta(t, 3) == t[1:3]


def test_restriction_equivalence_random():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 5)
        S = sorted(rng.sample(range(n), rng.randint(1, n)))
        base = [rng.randint(0, 2) for _ in range(n)]
        family = []
        for _ in range(rng.randint(1, 4)):
            t = list(base)
            for u in S:
                t[u] = rng.randint(0, 2)
            family.append(tuple(t))
        assert check_restriction_lemma(family, S, rng)


def test_same_format_reflexive(variant_t21):
    t = pattern_tensor(variant_t21, "++-", 3)
    assert format_tools(t, t, 3)["same_format"]
    assert tau(t) == (t[2], t[0], t[1])


def test_case_a_on_equal_tensors(variant_s3):
    gamma = 3
    a = mono(variant_s3, gamma + 1, 0)
    b = mono(variant_s3, gamma + 1, 2)
    low = mono(variant_s3, 2, 0)
    t = (low, a, b)
    dd = tensor_delta(t, gamma)
    assert dd.r <= 2
    assert classify_pair(t, dd.ell, t, dd.ell, gamma, 3) == ["a"]


def test_lemma_harness_classifies_uniquely(variant_t21):
    rep = LemmaReport()
    for i in (2, 3):
        lemma_checks(variant_t21, 0, i, range(7, 11), gamma=1, seed=i, max_pairs=200,
                     report=rep, max_terms=20000)
    assert rep.families > 10 and rep.ok
    assert set(rep.case_counts) <= set(CASES)


# --- i-sequence sets and the descent step ------------------------------------


def test_isequence_sets(variant_t21):
    assert isequence_set({}, 3, 2) == {dm.all_plus(2)}
    t = pattern_tensor(variant_t21, "+++", 3)
    assert isequence_set({t: Fraction(1)}, 3, 2) == {dm.all_plus(2)}


def test_family_cycles_are_cycles(variant_t21):
    a, b, c = mono(variant_t21, 1), mono(variant_t21, 7, 1), mono(variant_t21, 9, 2)
    fam = [(a, b, c), (a, c, b), (b, a, c), (c, a, b), (b, c, a), (c, b, a)]
    cycles = family_cycles(fam, 2)
    assert cycles
    for z in cycles:
        assert not boundary(z, 2)


@pytest.mark.parametrize("i,s,j", [(1, 2, 0), (1, 2, 5), (2, 2, 0), (2, 2, 3), (1, 3, 0)])
def test_descent_step_flags(variant_t21, i, s, j):
    cycles = sample_cycles(variant_t21, j, 3, seed=11 * i + j, s=s, i=i)
    assert cycles
    for z in cycles:
        rec = descent_step(variant_t21, z, j=j, s=s)
        assert rec.ok, rec.failures
        assert rec.K


def test_descent_step_case_a_delta_is_r0(variant_t21):
    """For summands with r ≤ i the shifted index sum reduces to r₀."""
    for z in sample_cycles(variant_t21, 0, 3, seed=4, i=2):
        rec = descent_step(variant_t21, z)
        for members in rec.delta_classes.values():
            for t, _r, dv in members:
                r0 = tensor_delta(t, variant_t21.gammas[0]).r
                if r0 <= 2:
                    assert dv == r0


def test_descent_step_rejects_bad_input(variant_t21):
    a = mono(variant_t21, 1)
    with pytest.raises(ValueError):
        descent_step(variant_t21, {})
    with pytest.raises(ValueError):
        descent_step(variant_t21, {(a, a): 0.5})
    b, c = mono(variant_t21, 7, 1), mono(variant_t21, 9, 2)
    with pytest.raises(ValueError):
        descent_step(variant_t21, {(a, b, c): Fraction(1)}, s=2)
