"""Conjugacy classes, ell-regular class counts and PSL(2,p) torus classes."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import config
from .errors import ConsistencyError, ParameterError, ResourceError
from .ffla import check_prime
from .groups import Group, encode_matrix


@dataclass(frozen=True)
class ConjugacyClass:
    rep: int  # element index, the smallest in the class
    size: int
    element_order: int


@dataclass(frozen=True)
class ConjugacyData:
    classes: tuple[ConjugacyClass, ...]
    class_of: np.ndarray  # element index -> class index

    def __len__(self) -> int:
        return len(self.classes)


_cache: dict[str, ConjugacyData] = {}


def conjugacy_classes(G: Group) -> ConjugacyData:
    """Orbits of G acting on itself by conjugation, classes ordered by representative."""
    cap = config.get().conjugacy_max_order
    if G.order > cap:
        raise ResourceError(f"conjugacy classes of order {G.order} exceed the cap {cap}")
    if G.descriptor in _cache:
        return _cache[G.descriptor]
    codes = G.elements
    inverses = G._law.inv(codes)
    class_of = np.full(G.order, -1, dtype=np.int64)
    classes = []
    orders = G.order_table
    for i in range(G.order):
        if class_of[i] >= 0:
            continue
        conj = G._law.mul(G._law.mul(codes, codes[i]), inverses)
        members = np.unique(G.index(conj))
        class_of[members] = len(classes)
        classes.append(ConjugacyClass(int(members[0]), int(members.size), int(orders[i])))
    class_of.setflags(write=False)
    data = ConjugacyData(tuple(classes), class_of)
    _cache[G.descriptor] = data
    return data


def ell_regular_count(G: Group, ell: int) -> int:
    """Number of classes whose elements have order coprime to ``ell``."""
    ell = check_prime(ell, "ell")
    return sum(1 for c in conjugacy_classes(G).classes if c.element_order % ell != 0)


def _primitive_root(p: int) -> int:
    factors = [q for q in range(2, p) if (p - 1) % q == 0 and all(q % r for r in range(2, q))]
    for a in range(2, p):
        if all(pow(a, (p - 1) // q, p) != 1 for q in factors):
            return a
    return 1  # p == 2 or 3 handled by callers; 1 generates F_2^x


def _cyclic_subgroup(G: Group, gen_idx: int) -> np.ndarray:
    out = [0]
    cur = gen_idx
    while cur != 0:
        out.append(int(cur))
        cur = int(G.mul_idx(cur, gen_idx))
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class TorusCounts:
    split_count: int
    nonsplit_count: int
    split_order: int
    nonsplit_order: int


def torus_class_counts(G: Group) -> TorusCounts:
    """Classes of PSL(2,p) meeting the split torus and the non-split torus.

    The split torus is generated by the image of diag(a, 1/a) for a primitive
    root a; the non-split torus by any element of order (p+1)/2.
    """
    if G.family != "psl2":
        raise ParameterError(f"torus counts need a psl2 group, got {G.descriptor}")
    p = G.spec.params[0]
    a = _primitive_root(p) if p > 3 else 2
    split_gen = G.index(encode_matrix(G, [[a, 0], [0, pow(a, -1, p)]]))
    split = _cyclic_subgroup(G, split_gen)
    if split.size != (p - 1) // 2:
        raise ConsistencyError(f"split torus has order {split.size}, expected {(p - 1) // 2}")
    want = (p + 1) // 2
    cand = np.flatnonzero(G.order_table == want)
    if cand.size == 0:
        raise ConsistencyError(f"no element of order {want} in {G.descriptor}")
    nonsplit = _cyclic_subgroup(G, int(cand[0]))
    cls = conjugacy_classes(G).class_of
    return TorusCounts(
        split_count=len(set(cls[split].tolist())),
        nonsplit_count=len(set(cls[nonsplit].tolist())),
        split_order=int(split.size),
        nonsplit_order=int(nonsplit.size),
    )


def tori_coprime(p: int) -> bool:
    return gcd((p - 1) // 2, (p + 1) // 2) == 1
