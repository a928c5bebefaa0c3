"""Command-line front end.

Every subcommand prints a short summary to stdout and, with ``--out``,
writes a JSON report.  Exit codes: 0 success, 1 verification failure,
2 malformed input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Sequence

from . import delta_machine as dm
from . import hochschild as hh
from .cone_monoid import (
    cross_section,
    hilbert_basis,
    normality,
    positive_grading,
)
from .exact_geometry import (
    build_admissible_sequence,
    complexity,
    is_pyramid,
    validate_admissible_sequence,
)
from .lambda_ring import exceptional_monomials
from .rational import format_rational
from .serialization import (
    InputError,
    dump_chain,
    dumps,
    load_chain,
    load_cone,
    load_instance,
    load_json,
    load_monoid,
    load_polytope,
    parse_int_points,
    write_json,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class VerificationFailure(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def _vec(v) -> str:
    return "(" + ", ".join(format_rational(Fraction(x)) for x in v) + ")"


def _emit(args, report: dict, lines: Sequence[str]) -> None:
    """Print the summary (or, with --json, only the report) and write --out."""
    if getattr(args, "json", False):
        sys.stdout.write(dumps(report) + "\n")
    else:
        for line in lines:
            print(line)
    if getattr(args, "out", None):
        write_json(args.out, report)


# ---------------------------------------------------------------------------
# geometry


def cmd_hull(args) -> dict:
    p = load_polytope(load_json(args.points))
    lines = [f"dim {p.dim}, {len(p.vertices)} vertices, {len(p.facets)} facets"]
    lines += [f"  vertex {_vec(v)}" for v in p.vertices]
    lines += [f"  facet {_vec(a)}·x ≥ {format_rational(b)}" for a, b in p.facets]
    return {"polytope": p}, lines


def cmd_complexity(args) -> dict:
    p = load_polytope(load_json(args.polytope))
    cert = complexity(p)
    witnesses = is_pyramid(p, all_witnesses=True) if p.dim > 0 else []
    report = {"complexity": cert.value, "dim": p.dim, "base": cert.base, "apexes": cert.apexes,
              "pyramid_apexes": [w.apex for w in witnesses]}
    return report, [str(cert.value)]


def cmd_admissible(args) -> dict:
    p = load_polytope(load_json(args.polytope))
    target = load_polytope(load_json(args.target))
    apexes = parse_int_points(load_json(args.apexes)) if args.apexes else ()
    seq = build_admissible_sequence(p, target, apexes, budget=args.max_steps)
    check = validate_admissible_sequence(seq)
    report = {"steps": [{"polytope": q, "kind": kind} for q, kind in seq.steps],
              "reaches_target": seq.reaches_target, "valid": check.ok, "reason": check.reason,
              "error": seq.error}
    if seq.error:
        raise BudgetExceeded(seq.error)
    if not check.ok:
        raise VerificationFailure(f"step {check.index}: {check.reason}")
    return report, [f"{len(seq.steps)} steps, valid, final polytope inside the target: {seq.reaches_target}"]


def cmd_cone(args) -> dict:
    c = load_cone(load_json(args.rays))
    sec = cross_section(c)
    report = {"rays": c.rays, "dim": c.dim, "facets": c.facets(), "equations": c.equations(),
              "section_functional": sec.functional, "section": sec.polytope}
    lines = [f"dim {c.dim}, rays {[_vec(r) for r in c.rays]}",
             f"facet normals {[_vec(a) for a in c.facets()]}",
             f"cross-section functional {_vec(sec.functional)}"]
    return report, lines


def cmd_hilbert(args) -> dict:
    c = load_cone(load_json(args.rays))
    lattice = parse_int_points(load_json(args.lattice)) if args.lattice else None
    hb = hilbert_basis(c, lattice)
    return {"hilbert_basis": hb}, [f"{len(hb)} elements: {[_vec(h) for h in hb]}"]


def cmd_normal(args) -> dict:
    m = load_monoid(load_json(args.generators))
    res = normality(m)
    grading = positive_grading(m)
    report = {"normal": res.normal, "witness": res.witness, "integral_closure": res.integral_closure,
              "grading": grading.functional}
    line = "normal" if res.normal else f"not normal, witness {_vec(res.witness)}"
    return report, [line, f"grading {_vec(grading.functional)}"]


# ---------------------------------------------------------------------------
# instances and homology


def _instance(args):
    return load_instance(load_json(args.instance), i=getattr(args, "i", None), s=getattr(args, "s", None),
                         t=getattr(args, "t", None))


def _instance_report(inst) -> dict:
    return {"n": inst.n, "i": inst.i, "s": inst.s, "t": inst.t, "v": inst.v, "grading": inst.grading,
            "section_functional": inst.section_functional, "cones": inst.cones,
            "sections": inst.sections, "gammas": inst.gammas, "links": inst.links}


def cmd_instance(args) -> dict:
    inst = _instance(args)
    lines = [f"n = {inst.n}", f"γ = {list(inst.gammas)}"]
    lines += [f"  D_{j} rays {[_vec(r) for r in c.rays]}" for j, c in enumerate(inst.cones)]
    return _instance_report(inst), lines


def cmd_exceptional(args) -> dict:
    inst = _instance(args)
    reps = [exceptional_monomials(inst, j) for j in range(inst.n + 1)]
    lines = [f"j={r.j}: {[str(m) for m in r.monomials]} (degree bound {r.threshold})" for r in reps]
    return {"exceptional": reps}, lines


def _degrees(args) -> list[int]:
    if args.d is not None:
        return [args.d]
    return list(range(args.deg_min, args.deg_max + 1))


def cmd_hh_rank(args) -> dict:
    inst = _instance(args)
    rows = []
    for d in _degrees(args):
        try:
            rows.append(hh.homology_rank(inst, args.j, args.i, d, inst.s, max_terms=args.max_terms))
        except hh.SliceBudgetExceeded as exc:
            raise BudgetExceeded(str(exc)) from exc
    lines = [f"d={r.d}: dim {r.dim}, cycles {r.cycles}, boundaries {r.boundaries}, HH {r.homology}" for r in rows]
    return {"ranks": rows}, lines


def cmd_hh_image(args) -> dict:
    inst = _instance(args)
    jp = inst.n if args.jp is None else args.jp
    rows = []
    for d in _degrees(args):
        try:
            rows.append({"d": d, "rank": hh.induced_image_rank(inst, args.j, jp, args.i, d, inst.s,
                                                                max_terms=args.max_terms)})
        except hh.SliceBudgetExceeded as exc:
            raise BudgetExceeded(str(exc)) from exc
    lines = [f"d={r['d']}: image rank {r['rank']}" for r in rows]
    return {"j": args.j, "jp": jp, "i": args.i, "images": rows}, lines


def _record_report(rec: hh.DescentStepRecord) -> dict:
    return {"j": rec.j, "z": dump_chain(rec.z), "z_min": dump_chain(rec.z_min),
            "z_min_prime": dump_chain(rec.z_min_prime), "z_min_second": dump_chain(rec.z_min_second),
            "K": [list(t) for t in rec.K],
            "factorizations": [{"tensor": list(t), "rest": f[0], "central": f[1]}
                               for t, f in rec.factorizations.items()],
            "signs": [rec.signs[t] for t in rec.K], "z_hat": dump_chain(rec.z_hat),
            "z1": dump_chain(rec.z1), "state": rec.state, "new_state": rec.new_state,
            "witness_T": rec.witness_T, "flags": rec.flags, "failures": rec.failures,
            "delta_classes": [sorted({dv for _, _, dv in members}) for members in rec.delta_classes.values()]}


def cmd_descend(args) -> dict:
    inst = _instance(args)
    z = load_chain(load_json(args.chain), inst)
    rec = hh.descent_step(inst, z, args.j, inst.s)
    report = _record_report(rec)
    lines = [f"{name}: {'ok' if ok else 'FAILED'}" for name, ok in sorted(rec.flags.items())]
    lines.append(f"𝔖: {sorted(map(dm.show, rec.state))} → {sorted(map(dm.show, rec.new_state))}")
    if not rec.ok:
        if args.out:
            write_json(args.out, report)
        raise VerificationFailure("; ".join(rec.failures))
    return report, lines


# ---------------------------------------------------------------------------
# machines


def cmd_machine_analyze(args) -> dict:
    sigma = dm.parse_sequence(args.sequence)
    a = dm.analyze(sigma)
    trf = sorted(dm.transformations(sigma)) if any(sigma) else []
    report = {"sequence": sigma, "clusters": a.clusters, "ell": a.ell, "r": a.r, "delta": a.delta,
              "transformations": trf}
    lines = [f"ℓ = {a.ell}, r = {a.r}, δ = {a.delta}",
             f"clusters {list(a.clusters)}",
             f"Trf = {[dm.show(t) for t in trf]}"]
    return report, lines


def cmd_machine_worst(args) -> dict:
    try:
        res = dm.worst_case(args.i, episodes=args.episodes, seed=args.seed, budget=args.max_steps)
    except TimeoutError as exc:
        raise BudgetExceeded(str(exc)) from exc
    report = {"i": res.i, "bound": res.bound, "observed_max": res.observed_max, "exhaustive": res.exhaustive,
              "episodes": res.episodes, "witness": res.witness, "within_bound": res.within_bound}
    if not res.within_bound:
        raise VerificationFailure(f"run of length {res.observed_max} reaches the bound {res.bound}")
    return report, [f"bound {res.bound}", f"observed max {res.observed_max}"]


def cmd_sublemma(args) -> dict:
    res = dm.sublemma_solve(args.n, anchored=not args.literal)
    report = {"n": res.n, "bound": res.bound, "observed_max": res.observed_max, "witness": res.witness,
              "anchored": res.anchored, "within_bound": res.within_bound}
    lines = [f"bound {res.bound}", f"observed max {res.observed_max}"]
    if not res.within_bound:
        if args.out:
            write_json(args.out, report)
        raise VerificationFailure(f"longest play {res.observed_max} exceeds {res.bound}")
    return report, lines


def cmd_order_check(args) -> dict:
    ok, cycle = dm.order_check(args.i)
    report = {"i": args.i, "acyclic": ok, "cycle": cycle}
    if not ok:
        raise VerificationFailure(f"cycle {[dm.show(s) for s in cycle]}")
    return report, ["acyclic"]


# ---------------------------------------------------------------------------
# the full pipeline


def certify(inst, deg_max: int, samples: int = 10, seed: int = 0, episodes: int = 0,
            window: int = 5, max_terms: int = hh.DEFAULT_MAX_TERMS) -> dict:
    """build → exceptional sets → slices/homology → image ranks → descent → machine bound."""
    s, i = inst.s, inst.i
    report: dict = {"instance": _instance_report(inst)}
    checks: dict[str, str] = {}

    report["exceptional"] = [exceptional_monomials(inst, j) for j in range(inst.n + 1)]

    dd_sizes, ranks = [], []
    for j in range(inst.n + 1):
        for ii in range(0, i + 2):
            for d in range(1, deg_max + 1):
                size = hh.check_dd_zero(inst, j, ii, d, s, max_terms=max_terms)
                dd_sizes.append({"j": j, "i": ii, "d": d, "size": size})
        for d in range(1, deg_max + 1):
            ranks.append(hh.homology_rank(inst, j, i, d, s, max_terms=max_terms))
    report["slices"] = dd_sizes
    report["homology"] = ranks
    nonempty = sum(1 for x in dd_sizes if x["size"])
    checks["dd_zero"] = "pass" if nonempty else "pass (vacuous: every slice is empty)"

    report["image_ranks_low"] = [{"d": d, "rank": hh.induced_image_rank(inst, 0, inst.n, i, d, s,
                                                                        max_terms=max_terms)}
                                 for d in range(1, deg_max + 1)]
    lo = (i + 1) * inst.gammas[0]
    window_rows, fallback = [], None
    for d in range(lo + 1, lo + window + 1):
        try:
            window_rows.append({"d": d, "rank": hh.induced_image_rank(inst, 0, inst.n, i, d, s,
                                                                      max_terms=max_terms)})
        except hh.SliceBudgetExceeded as exc:
            fallback = f"window slices exceed the budget ({exc}); image ranks reported for d ≤ {deg_max} only"
            break
    report["image_ranks_window"] = window_rows
    report["window_fallback"] = fallback
    if fallback:
        checks["window_image_zero"] = "fallback"
    else:
        empty = all(not hh.has_low_monomials(inst, j, s) for j in (0, inst.n))
        ok = all(r["rank"] == 0 for r in window_rows)
        checks["window_image_zero"] = ("pass (vacuous: no monomials of degree 1..s−1)" if ok and empty
                                       else "pass" if ok else "fail")

    cycles = hh.sample_cycles(inst, 0, samples, seed=seed, s=s) if i == 1 or inst.n < 200 else []
    records = [hh.descent_step(inst, z, 0, s) for z in cycles]
    report["descent"] = [_record_report(r) for r in records]
    if not records:
        checks["descent"] = "unavailable: C_i(Λ_0, s) has no cycle with δ₀ ≥ 0"
    else:
        checks["descent"] = "pass" if all(r.ok for r in records) else "fail"

    if i in (1, 2):
        wc = dm.worst_case(i, episodes=episodes, seed=seed)
        report["machine"] = {"bound": wc.bound, "observed_max": wc.observed_max, "exhaustive": wc.exhaustive,
                             "episodes": wc.episodes}
        checks["machine_bound"] = "pass" if wc.within_bound else "fail"
    report["checks"] = checks
    return report


def cmd_certify(args) -> dict:
    inst = _instance(args)
    try:
        report = certify(inst, args.deg_max, samples=args.samples, seed=args.seed, episodes=args.episodes,
                         max_terms=args.max_terms)
    except hh.SliceBudgetExceeded as exc:
        raise BudgetExceeded(str(exc)) from exc
    lines = [f"n = {inst.n}, γ₀ = {inst.gammas[0]}"]
    lines += [f"{k}: {v}" for k, v in sorted(report["checks"].items())]
    if any(v == "fail" for v in report["checks"].values()):
        if args.out:
            write_json(args.out, report)
        for line in lines:
            print(line)
        raise VerificationFailure("certification failed")
    return report, lines


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricdescent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", help="write the JSON report to this path")
        p.add_argument("--json", action="store_true", help="print the JSON report")
        p.set_defaults(func=func)
        return p

    p = add("hull", cmd_hull, "convex hull of a point set")
    p.add_argument("--points", required=True)
    p = add("complexity", cmd_complexity, "complexity of a polytope")
    p.add_argument("--polytope", required=True)
    p = add("admissible", cmd_admissible, "admissible sequence shrinking a polytope into a target")
    p.add_argument("--polytope", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--apexes")
    p.add_argument("--max-steps", type=int, default=500)
    p = add("cone", cmd_cone, "facets and cross-section of a cone")
    p.add_argument("--rays", required=True)
    p = add("hilbert", cmd_hilbert, "Hilbert basis of a cone")
    p.add_argument("--rays", required=True)
    p.add_argument("--lattice")
    p = add("normal", cmd_normal, "normality of an affine monoid")
    p.add_argument("--generators", required=True)

    def instance_args(p, with_i=True):
        p.add_argument("--instance", required=True)
        p.add_argument("--t", type=int, nargs="+", help="override t")
        p.add_argument("--s", type=int)
        if with_i:
            p.add_argument("--i", type=int)
        p.add_argument("--max-terms", type=int, default=hh.DEFAULT_MAX_TERMS)

    p = add("instance", cmd_instance, "build and validate a descent instance")
    instance_args(p)
    p = add("exceptional", cmd_exceptional, "exceptional monomials of every ring in the chain")
    instance_args(p)
    for name, func, text in (("hh-rank", cmd_hh_rank, "truncated Hochschild homology ranks"),
                             ("hh-image", cmd_hh_image, "rank of the induced map between chain rings")):
        p = add(name, func, text)
        instance_args(p, with_i=False)
        p.add_argument("--i", type=int, required=True)
        p.add_argument("--j", type=int, default=0)
        p.add_argument("--d", type=int)
        p.add_argument("--deg-min", type=int, default=1)
        p.add_argument("--deg-max", type=int, default=8)
        if name == "hh-image":
            p.add_argument("--jp", type=int)
    p = add("descend", cmd_descend, "one verified descent step for a cycle")
    instance_args(p)
    p.add_argument("--chain", required=True)
    p.add_argument("--j", type=int, default=0)
    p = add("machine-analyze", cmd_machine_analyze, "clusters and transformations of an i-sequence")
    p.add_argument("--sequence", required=True)
    p = add("machine-worst", cmd_machine_worst, "longest δ-machine run against the bound")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--episodes", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, help="node budget for the exhaustive search")
    p = add("sublemma", cmd_sublemma, "longest play of the replacement game on a chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--literal", action="store_true", help="allow replacing the maximum")
    p = add("order-check", cmd_order_check, "acyclicity of the transformation digraph")
    p.add_argument("--i", type=int, required=True)
    p = add("certify", cmd_certify, "run the whole verification pipeline on an instance")
    instance_args(p)
    p.add_argument("--deg-max", type=int, default=6)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--episodes", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, lines = args.func(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (BudgetExceeded, hh.SliceBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, ValueError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args, report, lines)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
