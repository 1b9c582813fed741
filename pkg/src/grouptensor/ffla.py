"""Dense linear algebra over prime fields F_p.

Two layers live here. The array layer (``rref_array``, ``left_nullspace`` ...)
works on plain ``numpy`` integer arrays plus a modulus and is what the heavy
modules call in their inner loops. :class:`FFMatrix` and :class:`Subspace`
wrap it for the public surface.

Over F_2 elimination runs on bit-packed rows with word-wide XOR; otherwise rows
are reduced with vectorised int64 arithmetic. Products go through float64
BLAS, which is exact while ``n * (p - 1)**2 < 2**53``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from . import config
from .errors import ParameterError, ResourceError

_EXACT_FLOAT = 2**53


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int, what: str = "characteristic") -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ParameterError(f"{what} must be prime, got {p!r}")
    return int(p)


# ---------------------------------------------------------------------------
# array layer
# ---------------------------------------------------------------------------


def mat_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` for integer arrays with entries in [0, p)."""
    if a.shape[-1] != b.shape[0]:
        raise ParameterError(f"dimension mismatch: {a.shape} @ {b.shape}")
    inner = a.shape[-1]
    if inner * (p - 1) ** 2 < _EXACT_FLOAT:
        out = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
        return np.mod(out, p).astype(np.int64)
    return np.mod(np.asarray(a, dtype=object) @ np.asarray(b, dtype=object), p).astype(np.int64)


def _rref_f2(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    rows, cols = m.shape
    words = max(1, (cols + 63) // 64)
    buf = np.zeros((rows, words * 8), dtype=np.uint8)
    if cols:
        packed = np.packbits(np.asarray(m, dtype=np.uint8) & 1, axis=1)
        buf[:, : packed.shape[1]] = packed
    r8 = buf
    r64 = buf.view(np.uint64)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        byte, shift = c >> 3, 7 - (c & 7)
        below = np.flatnonzero((r8[r:, byte] >> shift) & 1)
        if below.size == 0:
            continue
        i = r + int(below[0])
        if i != r:
            r64[[r, i]] = r64[[i, r]]
        hits = (r8[:, byte] >> shift) & 1
        hits[r] = 0
        idx = np.flatnonzero(hits)
        if idx.size:
            w = c >> 6
            r64[idx, w:] ^= r64[r, w:]
        pivots.append(c)
        r += 1
    out = np.unpackbits(r8, axis=1, count=cols).astype(np.int64) if cols else np.zeros((rows, 0), np.int64)
    return out, pivots


def _rref_odd(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    r_ = np.mod(np.asarray(m, dtype=np.int64), p)
    rows, cols = r_.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        below = np.flatnonzero(r_[r:, c])
        if below.size == 0:
            continue
        i = r + int(below[0])
        if i != r:
            r_[[r, i]] = r_[[i, r]]
        lead = int(r_[r, c])
        if lead != 1:
            r_[r, c:] = r_[r, c:] * pow(lead, -1, p) % p
        col = r_[:, c].copy()
        col[r] = 0
        idx = np.flatnonzero(col)
        if idx.size:
            r_[idx, c:] = (r_[idx, c:] - np.outer(col[idx], r_[r, c:])) % p
        pivots.append(c)
        r += 1
    return r_, pivots


def _panel_pivots(s: np.ndarray, p: int) -> tuple[list[int], list[int]]:
    """Forward elimination on a tall panel; returns (pivot columns, source rows).

    The source rows restricted to the pivot columns form an invertible block.
    """
    s = s.copy()
    rows, cols = s.shape
    order = np.arange(rows)
    pcols: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        below = np.flatnonzero(s[r:, c])
        if below.size == 0:
            continue
        i = r + int(below[0])
        if i != r:
            s[[r, i]] = s[[i, r]]
            order[[r, i]] = order[[i, r]]
        inv = pow(int(s[r, c]), -1, p)
        idx = r + 1 + np.flatnonzero(s[r + 1 :, c])
        if idx.size:
            f = s[idx, c] * inv % p
            s[idx, c:] = (s[idx, c:] - np.outer(f, s[r, c:])) % p
        pcols.append(c)
        r += 1
    return pcols, [int(x) for x in order[:r]]


def _rref_blocked(m: np.ndarray, p: int, block: int = 64) -> tuple[np.ndarray, list[int]]:
    # float64 working copy: every update is one BLAS call on the trailing columns
    r_ = np.mod(np.asarray(m, dtype=np.int64), p).astype(np.float64)
    rows, cols = r_.shape
    pivots: list[int] = []
    r = 0
    for c0 in range(0, cols, block):
        if r == rows:
            break
        c1 = min(cols, c0 + block)
        pc, src = _panel_pivots(r_[r:, c0:c1].astype(np.int64), p)
        if not pc:
            continue
        k = len(pc)
        src = [r + i for i in src]
        gcols = [c0 + c for c in pc]
        x = r_[src, c0:]
        inv = inverse_array(x[:, pc].astype(np.int64), p).astype(np.float64)
        x = np.mod(inv @ x, p)
        chosen = set(src)
        rest = [i for i in range(rows) if i not in chosen]
        others = r_[rest]
        tail = others[:, c0:]
        tail -= others[:, gcols] @ x
        np.mod(tail, p, out=tail)
        full_x = np.zeros((k, cols))
        full_x[:, c0:] = x
        # rows above r keep their slots, the new pivot rows follow them
        r_ = np.vstack([others[:r], full_x, others[r:]])
        pivots.extend(gcols)
        r += k
    return r_.astype(np.int64), pivots


def rref_array(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``m`` over F_p and its pivot columns.

    The returned matrix keeps all rows; rows past ``len(pivots)`` are zero.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise ParameterError(f"expected a 2-d array, got shape {m.shape}")
    if p == 2:
        return _rref_f2(m)
    if min(m.shape) > 96:
        return _rref_blocked(m, p)
    return _rref_odd(m, p)


def echelon_basis(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Nonzero rows of the RREF of ``m``: a canonical basis of its row space."""
    r, piv = rref_array(m, p)
    return r[: len(piv)].copy(), piv


def rank_array(m: np.ndarray, p: int) -> int:
    return len(rref_array(m, p)[1])


def kernel_array(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows, canonical RREF) of the right kernel ``{x : m x = 0}``."""
    m = np.asarray(m)
    cols = m.shape[1]
    r, piv = rref_array(m, p)
    pivset = set(piv)
    free = [c for c in range(cols) if c not in pivset]
    if not free:
        return np.zeros((0, cols), dtype=np.int64)
    basis = np.zeros((len(free), cols), dtype=np.int64)
    rk = len(piv)
    for row, f in enumerate(free):
        basis[row, f] = 1
        if rk:
            basis[row, piv] = (-r[:rk, f]) % p
    return echelon_basis(basis, p)[0]


def left_nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows, RREF) of ``{v : v m = 0}``."""
    return kernel_array(np.asarray(m).T, p)


def reduce_rows(x: np.ndarray, basis: np.ndarray, pivots: Sequence[int], p: int) -> np.ndarray:
    """Reduce the rows of ``x`` modulo the row space of an RREF ``basis``."""
    if len(pivots) == 0 or x.shape[0] == 0:
        return np.mod(x, p)
    return np.mod(x - mat_mul(x[:, list(pivots)], basis, p), p)


def _merge_echelon(basis, pivots, front, fpivots, p):
    # front is RREF and already zero on the pivot columns of basis
    if basis.shape[0]:
        basis = reduce_rows(basis, front, fpivots, p)
    rows = np.vstack([basis, front]) if basis.shape[0] else front
    piv = list(pivots) + list(fpivots)
    order = np.argsort(piv, kind="stable")
    return rows[order], [piv[i] for i in order]


def spin_array(
    seeds: np.ndarray, actions: Sequence[np.ndarray], p: int
) -> tuple[np.ndarray, list[int]]:
    """Smallest subspace containing ``seeds`` and closed under ``v -> v @ A``.

    Vectors are rows. Returns the RREF basis and its pivots.
    """
    seeds = np.atleast_2d(np.asarray(seeds, dtype=np.int64))
    n = seeds.shape[1]
    for a in actions:
        if a.shape != (n, n):
            raise ParameterError(f"action of shape {a.shape} on a space of dim {n}")
    basis = np.zeros((0, n), dtype=np.int64)
    pivots: list[int] = []
    front, fpiv = echelon_basis(seeds, p)
    while front.shape[0]:
        basis, pivots = _merge_echelon(basis, pivots, front, fpiv, p)
        if len(pivots) == n:
            break
        images = np.vstack([mat_mul(front, a, p) for a in actions])
        images = reduce_rows(images, basis, pivots, p)
        front, fpiv = echelon_basis(images, p)
    return basis, pivots


def inverse_array(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise ParameterError(f"cannot invert a non-square matrix of shape {m.shape}")
    r, piv = rref_array(np.hstack([np.mod(m, p), np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ParameterError("matrix is singular")
    return r[:, n:].copy()


def charpoly(m: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial ``det(xI - m)`` over F_p, coefficients high to low.

    Hessenberg reduction by similarity, then the usual three-term recurrence.
    """
    h = np.mod(np.asarray(m, dtype=np.int64), p)
    n = h.shape[0]
    for k in range(n - 2):
        nz = np.flatnonzero(h[k + 1 :, k])
        if nz.size == 0:
            continue
        i = k + 1 + int(nz[0])
        if i != k + 1:
            h[[i, k + 1]] = h[[k + 1, i]]
            h[:, [i, k + 1]] = h[:, [k + 1, i]]
        mult = h[k + 2 :, k] * pow(int(h[k + 1, k]), -1, p) % p
        if not mult.any():
            continue
        h[k + 2 :, k:] = (h[k + 2 :, k:] - np.outer(mult, h[k + 1, k:])) % p
        h[:, k + 1] = (h[:, k + 1] + mat_mul(h[:, k + 2 :], mult[:, None], p)[:, 0]) % p
    # polys[j] holds det of the leading j x j block, low-to-high coefficients
    polys = np.zeros((n + 1, n + 1), dtype=np.int64)
    polys[0, 0] = 1
    sub = np.zeros(0, dtype=np.int64)
    for j in range(1, n + 1):
        prev = polys[j - 1]
        new = np.zeros(n + 1, dtype=np.int64)
        new[1:] = prev[:-1]
        new = (new - h[j - 1, j - 1] * prev) % p
        if j > 1:
            s = int(h[j - 1, j - 2])
            sub = np.append(sub, 1) * s % p
            t = h[: j - 1, j - 1] * sub % p
            if t.any():
                new = (new - mat_mul(t[None, :], polys[: j - 1], p)[0]) % p
        polys[j] = new
    return [int(c) for c in polys[n, ::-1]]


def poly_eval_matrix(coeffs: Sequence[int], m: np.ndarray, p: int) -> np.ndarray:
    """``f(m)`` by Horner; ``coeffs`` high to low."""
    n = m.shape[0]
    eye = np.eye(n, dtype=np.int64)
    out = np.zeros((n, n), dtype=np.int64)
    for c in coeffs:
        out = (mat_mul(out, m, p) + int(c) * eye) % p
    return out


def poly_roots(coeffs: Sequence[int], p: int) -> list[int]:
    """Roots in F_p by evaluation at every field element."""
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in coeffs:
        acc = (acc * xs + int(c)) % p
    return [int(x) for x in np.flatnonzero(acc == 0)]


# ---------------------------------------------------------------------------
# public value types
# ---------------------------------------------------------------------------


def _storage(values: np.ndarray, p: int) -> np.ndarray:
    dtype = np.uint8 if p < 256 else np.int64
    out = np.ascontiguousarray(np.mod(np.asarray(values, dtype=np.int64), p).astype(dtype))
    out.setflags(write=False)
    return out


class FFMatrix:
    """Immutable matrix over F_p (byte rows for p < 256)."""

    __slots__ = ("char", "_data")

    def __init__(self, entries, char: int):
        self.char = check_prime(char)
        arr = np.asarray(entries, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ParameterError(f"FFMatrix needs 2-d entries, got shape {arr.shape}")
        self._data = _storage(arr, self.char)

    @classmethod
    def identity(cls, n: int, char: int) -> "FFMatrix":
        return cls(np.eye(n, dtype=np.int64), char)

    @classmethod
    def zeros(cls, rows: int, cols: int, char: int) -> "FFMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), char)

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def data(self) -> np.ndarray:
        """Entries as a fresh int64 array."""
        return self._data.astype(np.int64)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def _same_field(self, other: "FFMatrix") -> None:
        if not isinstance(other, FFMatrix) or other.char != self.char:
            raise ParameterError("operands must be FFMatrix over the same field")

    def __matmul__(self, other: "FFMatrix") -> "FFMatrix":
        self._same_field(other)
        return FFMatrix(mat_mul(self.data, other.data, self.char), self.char)

    def __add__(self, other: "FFMatrix") -> "FFMatrix":
        self._same_field(other)
        if other.shape != self.shape:
            raise ParameterError(f"shape mismatch {self.shape} + {other.shape}")
        return FFMatrix(self.data + other.data, self.char)

    def __sub__(self, other: "FFMatrix") -> "FFMatrix":
        self._same_field(other)
        if other.shape != self.shape:
            raise ParameterError(f"shape mismatch {self.shape} - {other.shape}")
        return FFMatrix(self.data - other.data, self.char)

    def scale(self, c: int) -> "FFMatrix":
        return FFMatrix(self.data * (int(c) % self.char), self.char)

    @property
    def T(self) -> "FFMatrix":
        return FFMatrix(self.data.T, self.char)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FFMatrix)
            and other.char == self.char
            and other.shape == self.shape
            and bool(np.array_equal(other._data, self._data))
        )

    def __hash__(self) -> int:
        return hash((self.char, self.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"FFMatrix({self._data.tolist()}, char={self.char})"

    def rref(self) -> tuple["FFMatrix", int]:
        r, piv = rref_array(self.data, self.char)
        return FFMatrix(r, self.char), len(piv)

    @property
    def rank(self) -> int:
        return rank_array(self.data, self.char)

    def kernel(self) -> "Subspace":
        """``{x : M x = 0}``."""
        return Subspace(kernel_array(self.data, self.char), self.char, ambient=self.cols)

    def solve(self, v) -> np.ndarray | None:
        """Some ``x`` with ``M x = v``, or ``None`` if the system is inconsistent."""
        v = np.mod(np.asarray(v, dtype=np.int64).reshape(-1), self.char)
        if v.shape[0] != self.rows:
            raise ParameterError(f"right-hand side has length {v.shape[0]}, expected {self.rows}")
        r, piv = rref_array(np.hstack([self.data, v[:, None]]), self.char)
        if piv and piv[-1] == self.cols:
            return None
        x = np.zeros(self.cols, dtype=np.int64)
        for row, c in enumerate(piv):
            x[c] = r[row, self.cols]
        return x

    def inverse(self) -> "FFMatrix":
        return FFMatrix(inverse_array(self.data, self.char), self.char)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of F_p^n held by its canonical RREF basis (rows)."""

    basis_rows: np.ndarray
    char: int
    ambient: int

    def __post_init__(self):
        rows = np.asarray(self.basis_rows, dtype=np.int64).reshape(-1, self.ambient)
        basis, piv = echelon_basis(rows, self.char)
        basis.setflags(write=False)
        object.__setattr__(self, "basis_rows", basis)
        object.__setattr__(self, "_pivots", tuple(piv))

    @classmethod
    def span(cls, vectors, char: int, ambient: int) -> "Subspace":
        return cls(np.asarray(vectors, dtype=np.int64).reshape(-1, ambient), char, ambient)

    @classmethod
    def full(cls, ambient: int, char: int) -> "Subspace":
        return cls(np.eye(ambient, dtype=np.int64), char, ambient)

    @classmethod
    def zero(cls, ambient: int, char: int) -> "Subspace":
        return cls(np.zeros((0, ambient), dtype=np.int64), char, ambient)

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    @property
    def dim(self) -> int:
        return self.basis_rows.shape[0]

    @property
    def codim(self) -> int:
        return self.ambient - self.dim

    @cached_property
    def basis(self) -> FFMatrix:
        return FFMatrix(self.basis_rows.reshape(self.dim, self.ambient), self.char)

    def reduce(self, vectors) -> np.ndarray:
        x = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
        return reduce_rows(x, self.basis_rows, self._pivots, self.char)

    def contains(self, vectors) -> bool:
        return not self.reduce(vectors).any()

    def complement_indices(self) -> list[int]:
        """Coordinates whose unit vectors complete the basis to one of F_p^n."""
        piv = set(self._pivots)
        return [i for i in range(self.ambient) if i not in piv]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and other.char == self.char
            and other.ambient == self.ambient
            and np.array_equal(other.basis_rows, self.basis_rows)
        )

    def __hash__(self) -> int:
        return hash((self.char, self.ambient, self.basis_rows.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, char={self.char})"


def rref(m: FFMatrix) -> tuple[FFMatrix, int]:
    return m.rref()


def kernel(m: FFMatrix) -> Subspace:
    return m.kernel()


def solve(m: FFMatrix, v) -> np.ndarray | None:
    return m.solve(v)


def spin(vectors, actions: Sequence[FFMatrix]) -> Subspace:
    """Submodule generated by ``vectors`` (rows) under right multiplication by ``actions``."""
    if not actions:
        raise ParameterError("spin needs at least one action matrix")
    p = actions[0].char
    n = actions[0].rows
    for a in actions:
        if a.char != p or a.shape != (n, n):
            raise ParameterError("actions must be square matrices of equal size over one field")
    seeds = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    if seeds.shape[1] != n:
        raise ParameterError(f"seed vectors have length {seeds.shape[1]}, expected {n}")
    basis, _ = spin_array(seeds, [a.data for a in actions], p)
    return Subspace(basis, p, n)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(n: int, ell: int) -> Iterator[Subspace]:
    """Every subspace of F_ell^n exactly once, by dimension, then pivot set."""
    ell = check_prime(ell)
    if n < 0:
        raise ParameterError(f"dimension must be nonnegative, got {n}")
    cap = config.get().subspace_enum_max_ambient
    if ell**n > cap:
        raise ResourceError(f"{ell}^{n} exceeds the subspace enumeration guard {cap}")
    for k in range(n + 1):
        for pivots in combinations(range(n), k):
            pivset = set(pivots)
            free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivset]
            base = np.zeros((k, n), dtype=np.int64)
            for r, pc in enumerate(pivots):
                base[r, pc] = 1
            for values in product(range(ell), repeat=len(free)):
                rows = base.copy()
                for (r, c), v in zip(free, values):
                    rows[r, c] = v
                yield Subspace(rows, ell, n)
