from __future__ import annotations

import pytest

from toricdescent.delta_machine import (
    all_plus,
    all_sequences,
    analyze,
    improvements,
    is_improvement,
    jumpdelta_check,
    literal_cycle,
    machine_bound,
    machine_step,
    order_check,
    parse_sequence,
    precedes,
    show,
    sublemma_solve,
    transformations,
    validate_step,
    worst_case,
)

P = parse_sequence


def test_parse_and_show():
    assert show(P("+-−+")) == "+--+"
    with pytest.raises(ValueError):
        P("+x")
    with pytest.raises(ValueError):
        P("+")


def test_analysis_examples():
    a = analyze(P("++-+-+"))
    assert (a.ell, a.r, a.delta) == (3, 3, 0)
    assert a.initial == (3, 3)
    assert a.clusters == ((0, 1), (3, 3), (5, 7))
    a = analyze(P("++++"))
    assert (a.ell, a.r, a.delta) == (0, 3, 3)
    a = analyze(P("---"))
    assert a.delta == -1 and a.initial is None


def test_only_penultimate_minus():
    for i in range(2, 6):
        sigma = tuple(k != i - 1 for k in range(i + 1))
        assert analyze(sigma).r == 2 * i - 1


def test_transformation_examples():
    assert transformations(all_plus(3)) == {all_plus(3)}
    with pytest.raises(ValueError):
        transformations(P("---"))
    assert transformations(P("+-+")) == {P("+++")}
    assert transformations(P("++-+-+")) == {P(x) for x in ["+-++-+", "++-++-", "++-+++", "++++-+"]}


def test_transformations_add_a_plus_or_keep_count():
    for i in range(1, 5):
        for s in all_sequences(i):
            if any(s):
                for t in transformations(s):
                    assert len(t) == len(s) and sum(t) >= sum(s)


def test_improvements():
    s = P("+-+-")
    assert s in improvements(s)
    assert all(is_improvement(all_plus(3), x) for x in all_sequences(3))
    assert not is_improvement(P("-+"), P("+-"))
    assert len(improvements(s)) == 4


def test_precedes():
    assert precedes(P("+-+"), P("+-+"))
    assert precedes(P("+-+"), P("+++"))
    for i in (1, 2, 3):
        seqs = all_sequences(i)
        for a in seqs:
            for b in seqs:
                if a != b and precedes(a, b):
                    assert not precedes(b, a)


def test_order_check():
    for i in (1, 2, 3, 4):
        ok, cyc = order_check(i)
        assert ok and cyc is None


def test_machine_step_examples():
    top = all_plus(2)
    assert machine_step({top}, []) == {top}
    s = {top, P("+-+")}
    new = machine_step(s, [P("+-+")])
    assert new == {top}
    assert validate_step(s, new, "strict")[0]
    # identity improvement keeps the transformed sequence
    s = {top, P("++-")}
    new = machine_step(s, [P("++-")])
    assert validate_step(s, new)[0]
    with pytest.raises(ValueError):
        machine_step(s, [])


def test_validate_step_requires_top():
    top = all_plus(1)
    assert not validate_step({top, P("+-")}, {P("+-")})[0]


def test_literal_reading_admits_a_self_loop():
    """Under the literal reading a state may map to itself, so runs need not terminate."""
    cyc = literal_cycle(2)
    assert cyc is not None and cyc[0] == cyc[1]
    assert not validate_step(cyc[0], cyc[0], "strict")[0]


def test_machine_bounds():
    assert machine_bound(1) == 7
    assert machine_bound(2) == 127


def test_worst_case_i1():
    res = worst_case(1)
    assert res.exhaustive and res.within_bound
    assert res.observed_max == 2
    assert res.witness[-1] == {all_plus(1)}


def test_sublemma_examples():
    assert sublemma_solve(1).observed_max == 0
    r3 = sublemma_solve(3)
    assert r3.bound == 3 and r3.within_bound
    r4 = sublemma_solve(4)
    assert r4.observed_max <= 7
    assert not sublemma_solve(4, anchored=False).within_bound


def test_jump_clauses_exhaustive():
    seen = set()
    for i in range(1, 5):
        for sigma in all_sequences(i):
            if all(sigma) or not any(sigma):
                continue
            for p in range(1, i + 1):
                try:
                    rep = jumpdelta_check(sigma, p)
                except ValueError:
                    continue  # not a legal deletion from a cluster of length ≥ 2
                assert rep.holds, (show(sigma), p, rep)
                seen.add(rep.clause)
    assert seen == {"a", "c", "none"}
