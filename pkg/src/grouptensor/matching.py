"""Multiplicative 3-matchings and product-free triples.

A 3-matching of size m is three indexed lists a, b, c with
a_i b_j c_k = 1 exactly when i = j = k. Lists hold element codes; the
search code works on dense indices and converts at the boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import config
from .errors import InputError, ParameterError, ResourceError, StructuralError
from .groups import Group, make_group


@dataclass(frozen=True)
class Matching:
    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        if not len(self.a) == len(self.b) == len(self.c):
            raise StructuralError(f"list lengths differ: {len(self.a)}, {len(self.b)}, {len(self.c)}")
        for name in "abc":
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))

    @property
    def m(self) -> int:
        return len(self.a)

    @classmethod
    def identity(cls, G: Group) -> "Matching":
        return cls((G.identity,), (G.identity,), (G.identity,))


@dataclass(frozen=True)
class ProductFreeTriple:
    A: frozenset[int]
    B: frozenset[int]
    C: frozenset[int]


@dataclass(frozen=True)
class Verification:
    valid: bool
    violation: tuple[int, int, int] | None = None

    def __bool__(self) -> bool:
        return self.valid


def verify_matching(G: Group, cand: Matching) -> Verification:
    """Check all m**3 index triples; report the first (i, j, k) breaking the rule."""
    for name in "abc":
        seq = getattr(cand, name)
        if len(set(seq)) != len(seq):
            raise StructuralError(f"list {name} has repeated entries")
    if cand.m == 0:
        return Verification(True)
    a, b, c = (G.index(np.array(x, dtype=np.int64)) for x in (cand.a, cand.b, cand.c))
    ab = G.mul_idx(a[:, None], b[None, :])
    abc = G.mul_idx(ab[:, :, None], c[None, None, :])
    hits = abc == 0
    diag = np.arange(cand.m)
    if not hits[diag, diag, diag].all():
        i = int(np.flatnonzero(~hits[diag, diag, diag])[0])
        return Verification(False, (i, i, i))
    hits[diag, diag, diag] = False
    if hits.any():
        i, j, k = (int(x) for x in np.argwhere(hits)[0])
        return Verification(False, (i, j, k))
    return Verification(True)


# ---------------------------------------------------------------------------
# exact search
# ---------------------------------------------------------------------------


def _exact_max_from_table(table: np.ndarray, identity: int) -> tuple[int, list[tuple[int, int, int]]]:
    """Branch and bound on a multiplication table; returns (M, triples of indices).

    The first triple is pinned to (e, e, e) and later triples are taken in
    increasing candidate order. A candidate (a, b, (ab)^-1) can join when its c
    avoids the current C and every forbidden value (a_i b_j)^-1 with i != j,
    and the new cross products miss C.
    """
    n = table.shape[0]
    inv = np.empty(n, dtype=np.int64)
    inv[np.argwhere(table == identity)[:, 0]] = np.argwhere(table == identity)[:, 1]
    tab = table.tolist()
    invl = inv.tolist()
    cands = [(a, b, invl[tab[a][b]]) for a in range(n) for b in range(n) if not (a == identity and b == identity)]

    best_size = 1
    best: list[tuple[int, int, int]] = [(identity, identity, identity)]

    def addable(t, chosen, cset, forbidden):
        a, b, c = t
        if c in cset or c in forbidden:
            return None
        new = set()
        for a2, b2, _ in chosen:
            x = invl[tab[a][b2]]
            y = invl[tab[a2][b]]
            if x in cset or y in cset or x == c or y == c:
                return None
            new.add(x)
            new.add(y)
        return new

    def bound(pool) -> int:
        if not pool:
            return 0
        return min(len({t[0] for t in pool}), len({t[1] for t in pool}), len({t[2] for t in pool}))

    def search(chosen, cset, forbidden, pool):
        nonlocal best_size, best
        if len(chosen) > best_size:
            best_size = len(chosen)
            best = list(chosen)
        if len(chosen) + bound(pool) <= best_size:
            return
        for pos, t in enumerate(pool):
            rest = pool[pos + 1 :]
            if len(chosen) + 1 + bound(rest) <= best_size:
                break
            new = addable(t, chosen, cset, forbidden)
            if new is None:
                continue
            chosen.append(t)
            cset.add(t[2])
            grown = forbidden | new
            nxt = [u for u in rest if addable(u, chosen, cset, grown) is not None]
            search(chosen, cset, grown, nxt)
            chosen.pop()
            cset.discard(t[2])

    start = [(identity, identity, identity)]
    pool = [t for t in cands if addable(t, start, {identity}, set()) is not None]
    search(start, {identity}, set(), pool)
    return best_size, best


def exact_max_matching(G: Group) -> tuple[int, Matching]:
    """M(G) by exhaustive search, with a witness."""
    cap = config.get().exact_matching_max_order
    if G.order > cap:
        raise ResourceError(
            f"exact matching search is capped at order {cap} (got {G.order}); use heuristic_matching"
        )
    size, triples = _exact_max_from_table(np.asarray(G.mul_table), 0)
    idx = np.array(triples, dtype=np.int64).reshape(-1, 3)
    witness = Matching(*(tuple(G.code(idx[:, col]).tolist()) for col in range(3)))
    if not verify_matching(G, witness):
        raise AssertionError("exact search produced an invalid witness")
    return size, witness


# ---------------------------------------------------------------------------
# heuristic search
# ---------------------------------------------------------------------------


class _State:
    """Incremental matching on dense indices with a forbidden-value counter."""

    def __init__(self, table: list[list[int]], inv: list[int]):
        self.tab = table
        self.inv = inv
        self.a: list[int] = []
        self.b: list[int] = []
        self.c: list[int] = []
        self.in_c = [False] * len(inv)
        self.forbidden = [0] * len(inv)

    def _cross(self, a: int, b: int) -> list[int]:
        tab, inv = self.tab, self.inv
        return [inv[tab[a][b2]] for b2 in self.b] + [inv[tab[a2][b]] for a2 in self.a]

    def try_add(self, a: int, b: int, c: int) -> bool:
        if self.in_c[c] or self.forbidden[c]:
            return False
        cross = self._cross(a, b)
        in_c = self.in_c
        if any(in_c[x] or x == c for x in cross):
            return False
        for x in cross:
            self.forbidden[x] += 1
        self.a.append(a)
        self.b.append(b)
        self.c.append(c)
        in_c[c] = True
        return True

    def remove(self, pos: int) -> None:
        a, b, c = self.a.pop(pos), self.b.pop(pos), self.c.pop(pos)
        self.in_c[c] = False
        for x in self._cross(a, b):
            self.forbidden[x] -= 1

    def copy_lists(self):
        return list(self.a), list(self.b), list(self.c)


def _greedy_fill(state: _State, G: Group, rng: np.random.Generator, attempts: int) -> None:
    pairs = rng.integers(0, G.order, size=(attempts, 2))
    cs = G.inv_table[G.mul_idx(pairs[:, 0], pairs[:, 1])]
    for (a, b), c in zip(pairs.tolist(), cs.tolist()):
        state.try_add(a, b, c)


def heuristic_matching(G: Group, seed: int = 0, iters: int = 200) -> Matching:
    """Greedy insertion plus remove-r/reinsert local search (r in {1, 2}).

    The result is re-verified; deterministic for a fixed seed.
    """
    if iters < 0:
        raise ParameterError("iters must be non-negative")
    rng = np.random.default_rng(seed)
    table = np.asarray(G.mul_table).tolist()
    inv = G.inv_table.tolist()
    attempts = min(4 * G.order * G.order, 20000)
    state = _State(table, inv)
    state.try_add(0, 0, 0)
    _greedy_fill(state, G, rng, attempts)
    best = state.copy_lists()
    for _ in range(iters):
        r = int(rng.integers(1, 3))
        for _ in range(min(r, len(state.a))):
            state.remove(int(rng.integers(0, len(state.a))))
        _greedy_fill(state, G, rng, max(attempts // 10, 50))
        if len(state.a) > len(best[0]):
            best = state.copy_lists()
        elif len(state.a) < len(best[0]):
            # fall back to the incumbent
            state = _State(table, inv)
            for a, b, c in zip(*best):
                state.try_add(a, b, c)
    result = Matching(*(tuple(G.code(np.array(col, dtype=np.int64)).tolist()) for col in best))
    if not verify_matching(G, result):
        return Matching.identity(G)
    return result


# ---------------------------------------------------------------------------
# reductions and bounds
# ---------------------------------------------------------------------------


def count_products_to_identity(G: Group, A: Iterable[int], B: Iterable[int], C: Iterable[int]) -> int:
    """#{(a, b, c) in A x B x C : abc = 1}, via a membership bitmap on C."""
    a = G.index(np.array(sorted(set(A)), dtype=np.int64)).reshape(-1)
    b = G.index(np.array(sorted(set(B)), dtype=np.int64)).reshape(-1)
    member = np.zeros(G.order, dtype=bool)
    member[G.index(np.array(sorted(set(C)), dtype=np.int64)).reshape(-1)] = True
    if a.size == 0 or b.size == 0:
        return 0
    needed = G.inv_table[G.mul_idx(a[:, None], b[None, :])]
    return int(member[needed].sum())


def thirds_reduction(G: Group, cand: Matching) -> ProductFreeTriple:
    """Split a valid matching into three disjoint index blocks of size floor(m/3)."""
    if cand.m < 3:
        raise ParameterError(f"thirds reduction needs m >= 3, got {cand.m}")
    if not verify_matching(G, cand):
        raise InputError("thirds reduction needs a valid matching")
    k = cand.m // 3
    triple = ProductFreeTriple(
        frozenset(cand.a[:k]), frozenset(cand.b[k : 2 * k]), frozenset(cand.c[2 * k : 3 * k])
    )
    if count_products_to_identity(G, triple.A, triple.B, triple.C):
        raise AssertionError("thirds reduction produced a triple with abc = 1")
    return triple


def _icbrt_ratio(order: int, d: int) -> int:
    """Largest q with q**3 * d <= order**3, i.e. floor(order / d**(1/3)) exactly."""
    target = order**3
    lo, hi = 0, order
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**3 * d <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo


def gowers_matching_upper(order: int, D: int) -> int:
    """min(order, 3 floor(order / D^(1/3)) + 2) from |A||B||C| <= |G|^3 / D."""
    if D < 1:
        raise ParameterError(f"quasirandomness degree must be >= 1, got {D}")
    if order < 1:
        raise ParameterError(f"order must be positive, got {order}")
    return min(order, 3 * _icbrt_ratio(order, D) + 2)


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------


def matching_to_dict(G: Group, cand: Matching) -> dict:
    return {"group": G.descriptor, "a": list(cand.a), "b": list(cand.b), "c": list(cand.c)}


def save_matching(G: Group, cand: Matching, path: str | Path) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(matching_to_dict(G, cand), indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write matching file {path}: {exc}") from exc


def load_matching(path: str | Path) -> tuple[Group, Matching]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read matching file {path}: {exc}") from exc
    missing = {"group", "a", "b", "c"} - set(data)
    if missing:
        raise InputError(f"{path}: missing keys {sorted(missing)}")
    G = make_group(data["group"])
    return G, Matching(tuple(data["a"]), tuple(data["b"]), tuple(data["c"]))
