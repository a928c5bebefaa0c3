"""Sign sequences, their transformations, and δ-machines.

An *i-sequence* is a tuple of ``i+1`` booleans (``True`` for ``+``) read
cyclically.  Clusters are runs of ``+``; a cluster is reported by its index
range ``(q, r)`` with ``0 ≤ q ≤ i`` and ``r`` possibly exceeding ``i`` when the
run wraps around.  Two clusters are the *same* when they occupy the same
physical positions modulo ``i+1``; a cluster starting at 0 and the wrapping
run that continues through position 0 overlap and are treated as the same
physical cluster.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

ISeq = tuple  # tuple[bool, ...]


def parse_sequence(symbols: Iterable[str] | str) -> ISeq:
    out = []
    for s in symbols:
        if s == "+":
            out.append(True)
        elif s in ("-", "−"):
            out.append(False)
        else:
            raise ValueError(f"bad symbol {s!r}")
    if len(out) < 2:
        raise ValueError("i-sequences have length at least 2")
    return tuple(out)


def show(sigma: ISeq) -> str:
    return "".join("+" if s else "-" for s in sigma)


def all_plus(i: int) -> ISeq:
    return (True,) * (i + 1)


def all_sequences(i: int) -> list[ISeq]:
    return [tuple(p) for p in product((False, True), repeat=i + 1)]


@dataclass(frozen=True)
class Analysis:
    clusters: tuple[tuple[int, int], ...]
    ell: int | None
    r: int | None
    delta: int
    initial: tuple[int, int] | None


@lru_cache(maxsize=None)
def analyze(sigma: ISeq) -> Analysis:
    n = len(sigma)
    i = n - 1
    if all(sigma):
        return Analysis(((0, i),), 0, i, i, (0, i))
    if not any(sigma):
        return Analysis((), None, None, -1, None)
    clusters = []
    for q in range(i + 1):
        if sigma[q] and (q == 0 or not sigma[q - 1]):
            r = q
            while r + 1 <= 2 * i - 1 and sigma[(r + 1) % n]:
                r += 1
            clusters.append((q, r))
    ell = min(q for q in range(i + 1) if sigma[q] and not sigma[(q - 1) % n])
    r = ell
    while sigma[(r + 1) % n]:
        r += 1
    return Analysis(tuple(clusters), ell, r, r - ell, (ell, r))


def delta(sigma: ISeq) -> int:
    return analyze(sigma).delta


def physical(cluster: tuple[int, int], n: int) -> frozenset[int]:
    q, r = cluster
    return frozenset(p % n for p in range(q, r + 1))


@dataclass(frozen=True)
class Contraction:
    deleted: int  # physical position removed
    result: ISeq  # length i
    rule: str

    def new_position(self, p: int) -> int:
        if p == self.deleted:
            raise ValueError("position was deleted")
        return p if p < self.deleted else p - 1


def contractions(sigma: ISeq) -> list[Contraction]:
    n = len(sigma)
    i = n - 1
    a = analyze(sigma)
    if a.delta < 0 or all(sigma):
        return []
    ini = physical(a.initial, n)
    deletions: dict[int, str] = {}
    for p in range(n):
        if not sigma[p]:
            deletions.setdefault(p, "minus")
    for q, r in a.clusters:
        if physical((q, r), n) & ini:
            continue
        if q < i and q < r:
            for p in range(q + 1, r + 1):
                if p != i + 1:
                    deletions.setdefault(p % n, "cluster")
        if q == i and i < r:
            for p in range(i, r + 1):
                if p != i + 1:
                    deletions.setdefault(p % n, "wrap-cluster")
    out = []
    for p in sorted(deletions):
        out.append(Contraction(p, sigma[:p] + sigma[p + 1:], deletions[p]))
    return out


@dataclass(frozen=True)
class Transformation:
    contraction: Contraction
    inserted_at: int
    result: ISeq


def transformation_records(sigma: ISeq) -> list[Transformation]:
    if not any(sigma):
        raise ValueError("transformations are not defined for the all-minus sequence")
    if all(sigma):
        return []
    n = len(sigma)
    a = analyze(sigma)
    anchor = a.r % n
    out = []
    for c in contractions(sigma):
        pos = c.new_position(anchor) + 1
        res = c.result[:pos] + (True,) + c.result[pos:]
        out.append(Transformation(c, pos, res))
    return out


@lru_cache(maxsize=None)
def transformations(sigma: ISeq) -> frozenset:
    if not any(sigma):
        raise ValueError("transformations are not defined for the all-minus sequence")
    if all(sigma):
        return frozenset([sigma])
    return frozenset(t.result for t in transformation_records(sigma))


def is_improvement(new: ISeq, old: ISeq) -> bool:
    if len(new) != len(old):
        raise ValueError("length mismatch")
    return all(b or not a for a, b in zip(old, new))


@lru_cache(maxsize=None)
def improvements(sigma: ISeq) -> frozenset:
    minus = [k for k, s in enumerate(sigma) if not s]
    out = set()
    for mask in product((False, True), repeat=len(minus)):
        t = list(sigma)
        for k, m in zip(minus, mask):
            t[k] = m
        out.add(tuple(t))
    return frozenset(out)


def plus_count(sigma: ISeq) -> int:
    return sum(sigma)


def precedes(a: ISeq, b: ISeq) -> bool:
    if len(a) != len(b):
        raise ValueError("length mismatch")
    if plus_count(b) > plus_count(a):
        return True
    if plus_count(b) < plus_count(a):
        return False
    seen = {a}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            return True
        if not any(x) or all(x):
            continue
        for y in transformations(x):
            if plus_count(y) == plus_count(x) and y not in seen:
                seen.add(y)
                queue.append(y)
    return False


def order_check(i: int) -> tuple[bool, list[ISeq] | None]:
    """No cycle of equal-plus-count transformations through non-constant sequences."""
    if i > 4:
        raise ValueError("order_check supports i ≤ 4")
    graph: dict[ISeq, list[ISeq]] = {}
    for s in all_sequences(i):
        if any(s) and not all(s):
            graph[s] = sorted(t for t in transformations(s)
                              if plus_count(t) == plus_count(s) and not all(t))
    color: dict[ISeq, int] = {}
    stack: list[ISeq] = []

    def dfs(u: ISeq):
        color[u] = 1
        stack.append(u)
        for v in graph[u]:
            if color.get(v) == 1:
                return stack[stack.index(v):] + [v]
            if v not in color:
                found = dfs(v)
                if found:
                    return found
        stack.pop()
        color[u] = 2
        return None

    for s in sorted(graph):
        if s not in color:
            cyc = dfs(s)
            if cyc:
                return False, cyc
    return True, None


# ---------------------------------------------------------------------------
# machines

State = frozenset  # frozenset of ISeq


def _check_step_input(state: State, chosen: Iterable[ISeq]) -> tuple[ISeq, frozenset]:
    state = frozenset(state)
    if not state:
        raise ValueError("empty state")
    i = len(next(iter(state))) - 1
    top = all_plus(i)
    chosen = frozenset(chosen)
    if state - {top} and not chosen:
        raise ValueError("T must be nonempty for a non-terminal state")
    if not chosen <= state - {top}:
        raise ValueError("T must be a subset of S without the all-plus sequence")
    return top, chosen


def machine_step(state: Iterable[ISeq], chosen: Iterable[ISeq], improve=None) -> State:
    """One machine step; ``improve`` maps each system element to an improvement."""
    state = frozenset(state)
    top, chosen = _check_step_input(state, chosen)
    if state == {top}:
        return state
    system = set(state - chosen)
    for s in chosen:
        system |= transformations(s)
    out = {top}
    for x in system:
        y = improve(x) if improve is not None else x
        if not is_improvement(y, x):
            raise ValueError("improvement choice is not an improvement")
        out.add(y)
    return frozenset(out)


def _nonempty_subsets(items: Sequence) -> Iterable[frozenset]:
    for k in range(1, len(items) + 1):
        for c in combinations(items, k):
            yield frozenset(c)


def validate_step(state: Iterable[ISeq], new: Iterable[ISeq], mode: str = "literal") -> tuple[bool, frozenset | None]:
    """Does ``new`` follow from ``state`` by one machine step?

    ``literal``: every element of ``new`` improves some element of the system
    for some admissible T, and ``new`` contains the all-plus sequence.
    ``strict``: additionally every untouched element either survives
    unchanged or is replaced by strict improvements of itself, and every
    element of T is replaced by improvements of its transformations.
    Returns (ok, witnessing T).
    """
    state = frozenset(state)
    new = frozenset(new)
    i = len(next(iter(state))) - 1
    top = all_plus(i)
    if top not in new:
        return False, None
    if state == {top}:
        return (new == state), frozenset()
    candidates = sorted(state - {top})
    for chosen in _nonempty_subsets(candidates):
        if _step_ok(state, chosen, new, top, mode):
            return True, chosen
    return False, None


def _step_ok(state, chosen, new, top, mode) -> bool:
    trf = set()
    for s in chosen:
        trf |= transformations(s)
    rest = state - chosen
    if mode == "literal":
        system = trf | rest
        return all(any(is_improvement(y, x) for x in system) for y in new)
    covered_by_trf = {y for y in new if any(is_improvement(y, x) for x in trf)}
    kept_candidates = sorted(x for x in rest if x in new)
    forced_replaced = [x for x in rest if x not in new]
    for mask in product((False, True), repeat=len(kept_candidates)):
        kept = {x for x, k in zip(kept_candidates, mask) if k}
        replaced = forced_replaced + [x for x, k in zip(kept_candidates, mask) if not k]
        ok = True
        for y in new:
            if y == top or y in covered_by_trf or y in kept:
                continue
            if any(y != x and is_improvement(y, x) for x in replaced):
                continue
            ok = False
            break
        if ok:
            return True
    return False


def _bit_universe(i: int) -> list[ISeq]:
    return sorted(s for s in all_sequences(i) if delta(s) >= 0)


def strict_successors(state: State) -> set[State]:
    """All states reachable in one step under the strict reading."""
    i = len(next(iter(state))) - 1
    top = all_plus(i)
    if state == {top}:
        return {state}
    out: set[State] = set()
    candidates = sorted(state - {top})
    for chosen in _nonempty_subsets(candidates):
        trf_up = set()
        for s in chosen:
            for t in transformations(s):
                trf_up |= improvements(t)
        rest = sorted(state - chosen - {top})
        for mask in product((False, True), repeat=len(rest)):
            kept = {x for x, k in zip(rest, mask) if k}
            free = set(trf_up)
            for x, k in zip(rest, mask):
                if not k:
                    free |= improvements(x) - {x}
            free -= {top}
            base = frozenset(kept | {top})
            free_list = sorted(free - base)
            for sub in product((False, True), repeat=len(free_list)):
                out.add(base | frozenset(y for y, b in zip(free_list, sub) if b))
    return out


@dataclass
class WorstCase:
    i: int
    bound: int
    observed_max: int
    witness: list[State] = field(default_factory=list)
    exhaustive: bool = True
    episodes: int = 0
    cycle: list[State] | None = None

    @property
    def within_bound(self) -> bool:
        return self.cycle is None and self.observed_max < self.bound


def machine_bound(i: int) -> int:
    return 2 ** (2 ** (i + 1) - 1) - 1


def longest_strict_run(i: int, budget: int | None = None) -> WorstCase:
    """Exhaustive longest run over all start states and all strict step choices."""
    universe = _bit_universe(i)
    top = all_plus(i)
    others = [s for s in universe if s != top]
    memo: dict[State, tuple[int, State | None]] = {}
    on_stack: set[State] = set()
    cycle: list[State] = []
    counter = [0]

    def solve(st: State) -> int:
        if st == {top}:
            return 0
        if st in memo:
            return memo[st][0]
        if st in on_stack:
            cycle.append(st)
            raise RecursionError("cycle")
        counter[0] += 1
        if budget is not None and counter[0] > budget:
            raise TimeoutError("budget exhausted")
        on_stack.add(st)
        best, arg = -1, None
        for nxt in sorted(strict_successors(st), key=lambda s: sorted(s)):
            if nxt == st:
                cycle.append(st)
                raise RecursionError("cycle")
            v = solve(nxt)
            if v > best:
                best, arg = v, nxt
        on_stack.discard(st)
        memo[st] = (best + 1, arg)
        return best + 1

    best_start, best_len = None, -1
    try:
        for k in range(len(others) + 1):
            for sub in combinations(others, k):
                st = frozenset(sub) | {top}
                v = solve(st)
                if v > best_len:
                    best_len, best_start = v, st
    except RecursionError:
        return WorstCase(i, machine_bound(i), -1, [], True, 0, list(cycle))
    trace = [best_start]
    while trace[-1] != {top}:
        trace.append(memo[trace[-1]][1])
    return WorstCase(i, machine_bound(i), best_len, trace, True)


def identity_improvement_run(i: int) -> WorstCase:
    """Exhaustive over T choices with every improvement taken as the identity."""
    universe = _bit_universe(i)
    top = all_plus(i)
    others = [s for s in universe if s != top]
    memo: dict[State, tuple[int, State | None]] = {}

    def solve(st: State, depth: int = 0) -> int:
        if st == {top}:
            return 0
        if st in memo:
            return memo[st][0]
        if depth > 10 ** 4:
            raise RecursionError("cycle")
        best, arg = -1, None
        for chosen in _nonempty_subsets(sorted(st - {top})):
            nxt = machine_step(st, chosen)
            if nxt == st:
                raise RecursionError("cycle")
            v = solve(nxt, depth + 1)
            if v > best:
                best, arg = v, nxt
        memo[st] = (best + 1, arg)
        return best + 1

    best_start, best_len = None, -1
    for k in range(len(others) + 1):
        for sub in combinations(others, k):
            st = frozenset(sub) | {top}
            v = solve(st)
            if v > best_len:
                best_len, best_start = v, st
    trace = [best_start]
    while trace[-1] != {top}:
        trace.append(memo[trace[-1]][1])
    return WorstCase(i, machine_bound(i), best_len, trace, True)


def random_episodes(i: int, episodes: int, seed: int = 0, max_steps: int | None = None) -> WorstCase:
    """Random machine runs: random start, random T, random per-element improvements."""
    rng = random.Random(seed)
    universe = _bit_universe(i)
    top = all_plus(i)
    others = [s for s in universe if s != top]
    bound = machine_bound(i)
    limit = max_steps if max_steps is not None else bound
    worst, witness = -1, []
    for _ in range(episodes):
        st = frozenset([s for s in others if rng.random() < 0.5] + [top])
        trace = [st]
        while st != {top} and len(trace) <= limit:
            cand = sorted(st - {top})
            chosen = [s for s in cand if rng.random() < 0.5] or [rng.choice(cand)]

            def improve(x):
                if rng.random() < 0.6:
                    return x
                return rng.choice(sorted(improvements(x)))

            st = machine_step(st, chosen, improve)
            trace.append(st)
        steps = len(trace) - 1
        if steps > worst:
            worst, witness = steps, trace
    return WorstCase(i, bound, worst, witness, False, episodes)


def worst_case(i: int, episodes: int = 0, seed: int = 0, budget: int | None = None) -> WorstCase:
    """Longest run to {(+,…,+)} compared with the termination bound.

    The strict game tree (all start states, all T, all improvement choices)
    is small for i ≤ 2 and is searched exhaustively.  For i = 2 the
    identity-improvement search and ``episodes`` random runs are added as
    independent cross-checks; the reported maximum is the largest of all.
    """
    if i not in (1, 2):
        raise ValueError("worst_case supports i ∈ {1, 2}")
    res = longest_strict_run(i, budget)
    if i == 2 and res.cycle is None:
        ident = identity_improvement_run(2)
        if ident.observed_max > res.observed_max:
            res.observed_max, res.witness = ident.observed_max, ident.witness
        if episodes:
            rnd = random_episodes(2, episodes, seed)
            res.episodes = episodes
            if rnd.observed_max > res.observed_max:
                res.observed_max, res.witness = rnd.observed_max, rnd.witness
    return res


def literal_cycle(i: int) -> list[State] | None:
    """Search for a step S → S permitted by the literal reading of the machine rule."""
    universe = _bit_universe(i)
    top = all_plus(i)
    others = [s for s in universe if s != top]
    for k in range(1, len(others) + 1):
        for sub in combinations(others, k):
            st = frozenset(sub) | {top}
            ok, _ = validate_step(st, st, "literal")
            if ok:
                return [st, st]
    return None


# ---------------------------------------------------------------------------
# the ordered-set game


@dataclass
class SublemmaResult:
    n: int
    bound: int
    observed_max: int
    witness: list[frozenset]
    anchored: bool = True

    @property
    def within_bound(self) -> bool:
        return self.observed_max <= self.bound


def sublemma_solve(n: int, anchored: bool = True) -> SublemmaResult:
    """Longest play of the replacement game on a chain with n elements.

    A move replaces a nonempty set of present elements by arbitrary sets of
    strictly larger elements.  With ``anchored`` (the situation of machine
    runs, where the all-plus sequence is always present and never chosen)
    the maximum stays in every state and is never replaced.  Without it,
    the maximum may be replaced by the empty set.
    """
    if n < 1 or n > 5:
        raise ValueError("sublemma_solve supports 1 ≤ n ≤ 5")
    top = n - 1
    goal = frozenset([top])
    memo: dict[frozenset, tuple[int, frozenset | None]] = {}

    def moves(st: frozenset) -> set[frozenset]:
        out = set()
        items = sorted(st - {top}) if anchored else sorted(st)
        for chosen in _nonempty_subsets(items):
            up = set()
            for x in chosen:
                up |= set(range(x + 1, n))
            rest = st - chosen
            up_list = sorted(up)
            for mask in product((False, True), repeat=len(up_list)):
                nxt = rest | frozenset(z for z, b in zip(up_list, mask) if b)
                if nxt:
                    out.add(nxt)
        return out

    def solve(st: frozenset, path: frozenset) -> int:
        if st == goal:
            return 0
        if st in memo:
            return memo[st][0]
        if st in path:
            raise RuntimeError("cycle in the replacement game")
        best, arg = -1, None
        for nxt in sorted(moves(st), key=sorted):
            v = solve(nxt, path | {st})
            if v > best:
                best, arg = v, nxt
        memo[st] = (best + 1, arg)
        return best + 1

    best_len, best_start = -1, None
    for k in range(1, n + 1):
        for sub in combinations(range(n), k):
            st = frozenset(sub)
            if anchored and top not in st:
                continue
            v = solve(st, frozenset())
            if v > best_len:
                best_len, best_start = v, st
    trace = [best_start]
    while trace[-1] != goal:
        trace.append(memo[trace[-1]][1])
    return SublemmaResult(n, 2 ** (n - 1) - 1, best_len, trace, anchored)


# ---------------------------------------------------------------------------
# deleting a plus from a long cluster


@dataclass(frozen=True)
class JumpReport:
    clause: str  # "a", "c" or "none"
    image_is_initial: bool
    a_condition: bool
    holds: bool


def _physical_clusters(sigma: ISeq) -> list[frozenset[int]]:
    n = len(sigma)
    return sorted({physical(c, n) for c in analyze(sigma).clusters}, key=sorted)


def jumpdelta_check(sigma: ISeq, p: int) -> JumpReport:
    """Delete the '+' at position p (1 ≤ p ≤ i) from a cluster of length ≥ 2 and check the clauses."""
    n = len(sigma)
    i = n - 1
    if not (1 <= p <= i) or not sigma[p] or all(sigma):
        raise ValueError("illegal deletion")
    host = next(c for c in _physical_clusters(sigma) if p in c)
    if len(host) < 2:
        raise ValueError("deletion must come from a cluster of length ≥ 2")
    a = analyze(sigma)
    ini = physical(a.initial, n)
    new = sigma[:p] + sigma[p + 1:]

    def move(q):
        return q if q < p else q - 1

    image_ini = frozenset(move(q) for q in ini if q != p)
    a2 = analyze(new)
    new_ini = physical(a2.initial, n - 1) if a2.initial else frozenset()
    image_is_initial = new_ini == image_ini
    # clause (a): a wrapping cluster (+_i, ..., +_r) other than the initial one, and p = i
    wrap = [c for c in a.clusters if c[0] == i and not physical(c, n) & ini]
    a_condition = bool(wrap) and p == i
    holds = (not image_is_initial) == a_condition
    # clause (b): the cluster through position 0 keeps position 0
    zero_cluster = next((c for c in _physical_clusters(sigma) if 0 in c), None)
    if zero_cluster is not None:
        holds = holds and any(0 in c for c in _physical_clusters(new))
    if p in ini:
        clause = "c"
        holds = holds and image_is_initial
    elif a_condition:
        clause = "a"
    else:
        clause = "none"
    return JumpReport(clause, image_is_initial, a_condition, holds)
