"""Finite groups with canonical integer codes and a dense element table.

Every group is materialised at construction: ``elements[i]`` is the code of
the i-th element (index 0 is the identity) and downstream code addresses
elements by index. Code-level products are vectorised over numpy arrays.

Descriptor grammar: ``cyclic:n``, ``ea:p:n``, ``sl2:p``, ``psl2:p`` and
``prod:<desc>,<desc>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from . import config
from .errors import ParameterError, ResourceError
from .ffla import is_prime

_MAX_CODE = 2**63


class _CyclicLaw:
    def __init__(self, n: int):
        self.n = n
        self.space = n
        self.identity = 0
        self.generators = (1 % n,)

    def mul(self, a, b):
        return (a + b) % self.n

    def inv(self, a):
        return (-a) % self.n


class _ElemAbelianLaw:
    """F_p^n, code = base-p digits (digit i is coordinate i)."""

    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.space = p**n
        self.identity = 0
        self.generators = tuple(p**i for i in range(n))
        self._weights = np.array([p**i for i in range(n)], dtype=np.int64)

    def _digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._weights) % self.p

    def mul(self, a, b):
        return (((self._digits(a) + self._digits(b)) % self.p) * self._weights).sum(-1)

    def inv(self, a):
        return (((-self._digits(a)) % self.p) * self._weights).sum(-1)


class _SL2Law:
    """2x2 matrices of determinant 1 over F_p, code = ((a p + b) p + c) p + d.

    With ``projective`` set, M and -M are identified and the representative is
    the one whose first nonzero row-major entry lies in 1..(p-1)/2.
    """

    def __init__(self, p: int, projective: bool):
        self.p = p
        self.projective = projective
        self.space = p**4
        self.identity = self.encode(np.array([1, 0, 0, 1]))
        self.generators = (
            self.encode(np.array([1, 1, 0, 1])),
            self.encode(np.array([1, 0, 1, 1])),
        )

    def decode(self, code):
        code = np.asarray(code, dtype=np.int64)
        p = self.p
        return np.stack([code // p**3, (code // p**2) % p, (code // p) % p, code % p], axis=-1)

    def canonical(self, m):
        m = np.asarray(m, dtype=np.int64) % self.p
        if not self.projective:
            return m
        half = (self.p - 1) // 2
        first = np.where(m[..., 0] != 0, m[..., 0], np.where(m[..., 1] != 0, m[..., 1], m[..., 2]))
        flip = first > half
        return np.where(flip[..., None], (-m) % self.p, m)

    def encode(self, m):
        m = self.canonical(m)
        p = self.p
        return ((m[..., 0] * p + m[..., 1]) * p + m[..., 2]) * p + m[..., 3]

    def mul(self, x, y):
        a, b = self.decode(x), self.decode(y)
        prod = np.stack(
            [
                a[..., 0] * b[..., 0] + a[..., 1] * b[..., 2],
                a[..., 0] * b[..., 1] + a[..., 1] * b[..., 3],
                a[..., 2] * b[..., 0] + a[..., 3] * b[..., 2],
                a[..., 2] * b[..., 1] + a[..., 3] * b[..., 3],
            ],
            axis=-1,
        )
        return self.encode(prod)

    def inv(self, x):
        a = self.decode(x)
        return self.encode(np.stack([a[..., 3], -a[..., 1], -a[..., 2], a[..., 0]], axis=-1))


class _ProductLaw:
    """Direct product, code = code1 * space2 + code2."""

    def __init__(self, left, right):
        if left.space * right.space >= _MAX_CODE:
            raise ParameterError("direct product code space does not fit in 64 bits")
        self.left, self.right = left, right
        self.space = left.space * right.space
        self.identity = left.identity * right.space + right.identity
        self.generators = tuple(g * right.space + right.identity for g in left.generators) + tuple(
            left.identity * right.space + h for h in right.generators
        )

    def split(self, x):
        x = np.asarray(x, dtype=np.int64)
        return x // self.right.space, x % self.right.space

    def mul(self, x, y):
        x1, x2 = self.split(x)
        y1, y2 = self.split(y)
        return self.left.mul(x1, y1) * self.right.space + self.right.mul(x2, y2)

    def inv(self, x):
        x1, x2 = self.split(x)
        return self.left.inv(x1) * self.right.space + self.right.inv(x2)


@dataclass(frozen=True)
class FamilySpec:
    """Parsed family descriptor."""

    family: str
    params: tuple

    @property
    def descriptor(self) -> str:
        if self.family == "prod":
            left, right = (f"({s.descriptor})" if s.family == "prod" else s.descriptor for s in self.params)
            return f"prod:{left},{right}"
        return ":".join([self.family, *map(str, self.params)])


def _split_top(text: str) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return text[:i], text[i + 1 :]
    raise ParameterError(f"product descriptor needs two factors: {text!r}")


def _int(token: str, desc: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParameterError(f"bad integer {token!r} in descriptor {desc!r}") from None


def parse_descriptor(desc: str) -> FamilySpec:
    """Parse ``cyclic:n | ea:p:n | sl2:p | psl2:p | prod:<d>,<d>``.

    Nested products may parenthesise a factor: ``prod:(prod:cyclic:2,cyclic:2),cyclic:3``.
    """
    desc = desc.strip()
    if desc.startswith("(") and desc.endswith(")"):
        return parse_descriptor(desc[1:-1])
    head, _, rest = desc.partition(":")
    if head == "prod":
        left, right = _split_top(rest)
        return FamilySpec("prod", (parse_descriptor(left), parse_descriptor(right)))
    parts = rest.split(":") if rest else []
    if head == "cyclic" and len(parts) == 1:
        return FamilySpec("cyclic", (_int(parts[0], desc),))
    if head == "ea" and len(parts) == 2:
        return FamilySpec("ea", (_int(parts[0], desc), _int(parts[1], desc)))
    if head in ("sl2", "psl2") and len(parts) == 1:
        return FamilySpec(head, (_int(parts[0], desc),))
    raise ParameterError(f"unrecognised group descriptor {desc!r}")


def _build_law(spec: FamilySpec, cfg: config.Config):
    fam, params = spec.family, spec.params
    if fam == "cyclic":
        (n,) = params
        if n < 1:
            raise ParameterError(f"cyclic group order must be >= 1, got {n}")
        return _CyclicLaw(n), n
    if fam == "ea":
        p, n = params
        if not is_prime(p):
            raise ParameterError(f"ea:p:n needs prime p, got {p}")
        if n < 1:
            raise ParameterError(f"ea:p:n needs n >= 1, got {n}")
        return _ElemAbelianLaw(p, n), p**n
    if fam in ("sl2", "psl2"):
        (p,) = params
        if p % 2 == 0 or not is_prime(p):
            raise ParameterError(f"{fam} needs an odd prime, got {p}")
        if p > cfg.sl2_max_p:
            raise ParameterError(f"{fam}:{p} exceeds the configured prime cap {cfg.sl2_max_p}")
        order = p * (p - 1) * (p + 1)
        return _SL2Law(p, fam == "psl2"), order if fam == "sl2" else order // 2
    if fam == "prod":
        l1, o1 = _build_law(params[0], cfg)
        l2, o2 = _build_law(params[1], cfg)
        return _ProductLaw(l1, l2), o1 * o2
    raise ParameterError(f"unknown family {fam!r}")


class Group:
    """A materialised finite group.

    Attributes:
        spec: parsed family descriptor.
        order: number of elements.
        elements: int64 codes; ``elements[0]`` is the identity.
        generators: codes of the standard generators.
        word_parent, word_gen: BFS factorisation, ``elements[i] =
            elements[word_parent[i]] * generators[word_gen[i]]`` for i > 0.
    """

    def __init__(self, spec: FamilySpec, law, expected_order: int):
        self.spec = spec
        self._law = law
        self.generators = tuple(int(g) for g in law.generators)
        self.identity = int(law.identity)
        codes = [self.identity]
        parent = [-1]
        via = [-1]
        seen = {self.identity: 0}
        frontier = [0]
        gens = np.array(self.generators, dtype=np.int64)
        while frontier:
            fcodes = np.array([codes[i] for i in frontier], dtype=np.int64)
            prods = law.mul(fcodes[:, None], gens[None, :])
            nxt = []
            for row, i in enumerate(frontier):
                for k in range(len(gens)):
                    c = int(prods[row, k])
                    if c not in seen:
                        seen[c] = len(codes)
                        nxt.append(len(codes))
                        codes.append(c)
                        parent.append(i)
                        via.append(k)
            frontier = nxt
            if len(codes) > expected_order:
                break
        if len(codes) != expected_order:
            raise ParameterError(
                f"{spec.descriptor}: generators produced {len(codes)} elements, expected {expected_order}"
            )
        self.order = len(codes)
        self.elements = np.array(codes, dtype=np.int64)
        self.elements.setflags(write=False)
        self.word_parent = np.array(parent, dtype=np.int64)
        self.word_gen = np.array(via, dtype=np.int64)
        self._sort = np.argsort(self.elements, kind="stable")
        self._sorted = self.elements[self._sort]

    # -- identity and description -------------------------------------------

    @property
    def descriptor(self) -> str:
        return self.spec.descriptor

    @property
    def family(self) -> str:
        return self.spec.family

    def __repr__(self) -> str:
        return f"Group({self.descriptor!r}, order={self.order})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and other.descriptor == self.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)

    def __len__(self) -> int:
        return self.order

    @property
    def is_abelian(self) -> bool:
        if self.family in ("cyclic", "ea"):
            return True
        g = np.array(self.generators)
        return bool(np.all(self._law.mul(g[:, None], g[None, :]) == self._law.mul(g[None, :], g[:, None])))

    @cached_property
    def generator_indices(self) -> tuple[int, ...]:
        return tuple(int(i) for i in self.index(np.array(self.generators)))

    # -- code level -----------------------------------------------------------

    def contains(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        pos = np.clip(np.searchsorted(self._sorted, codes), 0, self.order - 1)
        return self._sorted[pos] == codes

    def _check(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        if not np.all(self.contains(codes)):
            bad = codes[~self.contains(codes)].ravel()[:3].tolist()
            raise ParameterError(f"element code(s) {bad} do not belong to {self.descriptor}")
        return codes

    def index(self, codes):
        """Dense index of each code (raises on foreign codes)."""
        codes = self._check(codes)
        out = self._sort[np.searchsorted(self._sorted, codes)]
        return int(out) if out.ndim == 0 else out

    def code(self, idx):
        out = self.elements[np.asarray(idx, dtype=np.int64)]
        return int(out) if np.ndim(out) == 0 else out

    def mul(self, a, b):
        """Product of element codes (scalars or broadcastable arrays)."""
        out = self._law.mul(self._check(a), self._check(b))
        return int(out) if np.ndim(out) == 0 else np.asarray(out, dtype=np.int64)

    def inv(self, a):
        out = self._law.inv(self._check(a))
        return int(out) if np.ndim(out) == 0 else np.asarray(out, dtype=np.int64)

    def power(self, a, k: int):
        a = self._check(a)
        result = np.full(np.shape(a), self.identity, dtype=np.int64)
        base = a
        k = int(k)
        while k:
            if k & 1:
                result = self._law.mul(result, base)
            base = self._law.mul(base, base)
            k >>= 1
        return int(result) if np.ndim(result) == 0 else result

    def element_order(self, a) -> int:
        """Least k >= 1 with a^k = identity."""
        return int(self.order_table[self.index(a)])

    def canonicalize(self, code: int) -> int:
        """Re-canonicalise a raw code (only meaningful for matrix families)."""
        law = self._law
        if isinstance(law, _SL2Law):
            return int(law.encode(law.decode(code)))
        return int(code)

    # -- index level ------------------------------------------------------------

    def mul_idx(self, i, j):
        return self._sort[np.searchsorted(self._sorted, self._law.mul(self.elements[i], self.elements[j]))]

    def inv_idx(self, i):
        return self._sort[np.searchsorted(self._sorted, self._law.inv(self.elements[i]))]

    @property
    def mul_table(self) -> np.ndarray:
        """``table[i, j]`` = index of ``elements[i] * elements[j]``."""
        cap = config.get().mul_table_max_order
        if self.order > cap:
            raise ResourceError(f"multiplication table for order {self.order} exceeds cap {cap}")
        return self._mul_table

    @cached_property
    def _mul_table(self) -> np.ndarray:
        idx = np.arange(self.order)
        table = self.mul_idx(idx[:, None], idx[None, :]).astype(np.int32)
        table.setflags(write=False)
        return table

    @cached_property
    def inv_table(self) -> np.ndarray:
        t = self.inv_idx(np.arange(self.order))
        t.setflags(write=False)
        return t

    @cached_property
    def order_table(self) -> np.ndarray:
        """Element order of every index, via powers at the divisors of |G|."""
        n = self.order
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        orders = np.zeros(n, dtype=np.int64)
        for d in divisors:
            pending = orders == 0
            if not pending.any():
                break
            hit = self.power(self.elements[pending], d) == self.identity
            orders[np.flatnonzero(pending)[hit]] = d
        orders.setflags(write=False)
        return orders

    def word(self, i: int) -> list[int]:
        """Generator positions whose product (left to right) is element i."""
        out = []
        while i:
            out.append(int(self.word_gen[i]))
            i = int(self.word_parent[i])
        return out[::-1]


@lru_cache(maxsize=64)
def _make_cached(desc: str, max_order: int, max_p: int) -> Group:
    spec = parse_descriptor(desc)
    cfg = config.get()
    law, order = _build_law(spec, cfg)
    if order > max_order:
        raise ParameterError(f"{desc}: order {order} exceeds the configured cap {max_order}")
    return Group(spec, law, order)


def make_group(spec: str | FamilySpec) -> Group:
    """Build (or fetch from cache) the group named by a descriptor."""
    desc = spec.descriptor if isinstance(spec, FamilySpec) else parse_descriptor(spec).descriptor
    cfg = config.get()
    return _make_cached(desc, cfg.max_group_order, cfg.sl2_max_p)


def mul(G: Group, a: int, b: int) -> int:
    return G.mul(a, b)


def inv(G: Group, a: int) -> int:
    return G.inv(a)


def element_order(G: Group, a: int) -> int:
    return G.element_order(a)


def quasirandom_degree(G: Group) -> int:
    """Lower bound on the smallest nontrivial complex irrep degree.

    (p-1)/2 for SL(2,p) and PSL(2,p), 1 for abelian groups, the minimum over
    factors for direct products.
    """
    fam = G.spec
    return _qr_degree(fam)


def _qr_degree(spec: FamilySpec) -> int:
    if spec.family in ("sl2", "psl2"):
        return max(1, (spec.params[0] - 1) // 2)
    if spec.family == "prod":
        return min(_qr_degree(spec.params[0]), _qr_degree(spec.params[1]))
    return 1


def encode_matrix(G: Group, m: Sequence[Sequence[int]]) -> int:
    """Code of a 2x2 matrix in an sl2/psl2 group (canonicalised)."""
    law = G._law
    if not isinstance(law, _SL2Law):
        raise ParameterError(f"{G.descriptor} is not a matrix group")
    flat = np.array([m[0][0], m[0][1], m[1][0], m[1][1]], dtype=np.int64)
    return int(law.encode(flat))


def decode_matrix(G: Group, code: int) -> list[list[int]]:
    law = G._law
    if not isinstance(law, _SL2Law):
        raise ParameterError(f"{G.descriptor} is not a matrix group")
    a, b, c, d = (int(x) for x in law.decode(code))
    return [[a, b], [c, d]]
