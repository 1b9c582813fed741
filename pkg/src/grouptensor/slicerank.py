"""Multiplication tensors and slice-rank bounds.

Slice rank here is the minimum, over subspace triples (V1, V2, V3) on which
the trilinear form vanishes, of codim V1 + codim V2 + codim V3. Every such
triple yields an explicit decomposition into that many slices (see
:func:`vanishing_triple_to_slices`), and the minimum is attained. The maximum
over the same triples would be degenerate: zero subspaces always vanish.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import config
from .errors import ConsistencyError, InputError, ParameterError, ResourceError
from .ffla import (
    FFMatrix,
    Subspace,
    check_prime,
    enumerate_subspaces,
    inverse_array,
    kernel_array,
    mat_mul,
    rank_array,
)
from .groups import Group
from .matching import Matching, verify_matching
from .modrep import SimpleSummary


@dataclass(frozen=True)
class Tensor3:
    """Sparse 3-tensor over F_char: sorted (i, j, k, value) entries, values nonzero."""

    dims: tuple[int, int, int]
    char: int
    coeffs: tuple[tuple[int, int, int, int], ...]

    def __post_init__(self):
        check_prime(self.char, "char")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 0:
            raise InputError(f"bad tensor dims {self.dims}")
        object.__setattr__(self, "dims", dims)
        seen = set()
        clean = []
        for entry in self.coeffs:
            i, j, k, v = (int(x) for x in entry)
            if not (0 <= i < dims[0] and 0 <= j < dims[1] and 0 <= k < dims[2]):
                raise InputError(f"entry {(i, j, k)} out of range for dims {dims}")
            if (i, j, k) in seen:
                raise InputError(f"duplicate entry {(i, j, k)}")
            v %= self.char
            if v == 0:
                raise InputError(f"zero value stored at {(i, j, k)}")
            seen.add((i, j, k))
            clean.append((i, j, k, v))
        object.__setattr__(self, "coeffs", tuple(sorted(clean)))

    @classmethod
    def from_dense(cls, arr: np.ndarray, char: int) -> "Tensor3":
        arr = np.mod(np.asarray(arr, dtype=np.int64), char)
        idx = np.argwhere(arr)
        coeffs = tuple((int(i), int(j), int(k), int(arr[i, j, k])) for i, j, k in idx)
        return cls(tuple(arr.shape), char, coeffs)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.dims, dtype=np.int64)
        if self.coeffs:
            c = np.array(self.coeffs, dtype=np.int64)
            out[c[:, 0], c[:, 1], c[:, 2]] = c[:, 3]
        return out

    @property
    def nnz(self) -> int:
        return len(self.coeffs)

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "char": self.char, "entries": [list(e) for e in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> "Tensor3":
        try:
            return cls(tuple(data["dims"]), int(data["char"]), tuple(tuple(e) for e in data["entries"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed tensor record: {exc}") from exc


def save_tensor(T: Tensor3, path: str | Path) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(T.to_dict()) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write tensor file {path}: {exc}") from exc


def load_tensor(path: str | Path) -> Tensor3:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read tensor file {path}: {exc}") from exc
    return Tensor3.from_dict(data)


def diagonal_tensor(n: int, ell: int) -> Tensor3:
    return Tensor3((n, n, n), ell, tuple((i, i, i, 1) for i in range(n)))


# ---------------------------------------------------------------------------
# algebras and their tensors
# ---------------------------------------------------------------------------


def group_algebra_constants(G: Group, ell: int) -> np.ndarray:
    """c[g, h, k] = 1 when k = gh, as a dense (n, n, n) array."""
    ell = check_prime(ell, "ell")
    _tensor_guard(G.order)
    n = G.order
    c = np.zeros((n, n, n), dtype=np.int64)
    g, h = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    c[g, h, G.mul_table[g, h]] = 1
    return c


def matrix_algebra_constants(r: int, ell: int) -> np.ndarray:
    """Matrix units E_ab (basis index a*r + b) with E_ab E_cd = [b == c] E_ad."""
    check_prime(ell, "ell")
    n = r * r
    c = np.zeros((n, n, n), dtype=np.int64)
    for a in range(r):
        for b in range(r):
            for d in range(r):
                c[a * r + b, b * r + d, a * r + d] = 1
    return c


def _tensor_guard(n: int) -> None:
    cap = config.get().tensor_max_order
    if n > cap:
        raise ResourceError(f"tensor side {n} exceeds the cap {cap}")


def build_group_tensor(G: Group, ell: int) -> Tensor3:
    """T_{k[G]}: coefficient 1 at (g, h, gh)."""
    ell = check_prime(ell, "ell")
    _tensor_guard(G.order)
    table = G.mul_table
    n = G.order
    coeffs = tuple((g, h, int(table[g, h]), 1) for g in range(n) for h in range(n))
    return Tensor3((n, n, n), ell, coeffs)


def _products(consts: np.ndarray, x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """Rows x_r * y_r in the algebra (broadcast over leading axes)."""
    n = consts.shape[0]
    flat = consts.reshape(n, n * n)
    left = mat_mul(x.reshape(-1, n), flat, p).reshape(-1, n, n)
    return np.mod(np.einsum("rjk,rj->rk", left, y.reshape(-1, n)), p)


def check_associative(consts: np.ndarray, ell: int, samples: int = 100, seed: int = 0) -> bool:
    """(e_i e_j) e_k == e_i (e_j e_k) on all triples when small, else on random ones."""
    n = consts.shape[0]
    if n**3 <= max(samples, 1000):
        trip = np.array(np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")).reshape(3, -1).T
    else:
        trip = np.random.default_rng(seed).integers(0, n, size=(samples, 3))
    eye = np.eye(n, dtype=np.int64)
    ei, ej, ek = eye[trip[:, 0]], eye[trip[:, 1]], eye[trip[:, 2]]
    lhs = _products(consts, _products(consts, ei, ej, ell), ek, ell)
    rhs = _products(consts, ei, _products(consts, ej, ek, ell), ell)
    return bool(np.array_equal(lhs, rhs))


def build_algebra_tensor(consts: np.ndarray, ell: int) -> Tensor3:
    """c_ijk = coefficient of e_k in e_i e_j, after an associativity spot-check."""
    ell = check_prime(ell, "ell")
    consts = np.mod(np.asarray(consts, dtype=np.int64), ell)
    if consts.ndim != 3 or len(set(consts.shape)) != 1:
        raise InputError(f"structure constants must be (n, n, n), got {consts.shape}")
    _tensor_guard(consts.shape[0])
    if not check_associative(consts, ell):
        raise InputError("structure constants fail the associativity spot-check")
    return Tensor3.from_dense(consts, ell)


def _check_ideal(consts: np.ndarray, J: Subspace) -> None:
    p, n = J.char, consts.shape[0]
    if J.dim == 0:
        return
    rows = J.basis.data
    eye = np.eye(n, dtype=np.int64)
    r = rows.shape[0]
    xs = np.repeat(rows, n, axis=0)
    es = np.tile(eye, (r, 1))
    for prod in (_products(consts, xs, es, p), _products(consts, es, xs, p)):
        if not J.contains(prod):
            raise InputError("subspace is not a two-sided ideal")


def quotient_algebra_constants(consts: np.ndarray, J: Subspace) -> tuple[np.ndarray, list[int]]:
    """Structure constants of A/J on the images of e_s, s outside the pivots of J."""
    p, n = J.char, consts.shape[0]
    keep = J.complement_indices()
    eye = np.eye(n, dtype=np.int64)
    es = eye[keep]
    k = len(keep)
    prods = _products(consts, np.repeat(es, k, axis=0), np.tile(es, (k, 1)), p)
    reduced = J.reduce(prods) if J.dim else prods
    return reduced[:, keep].reshape(k, k, k), keep


def quotient_tensor(consts: np.ndarray, J: Subspace) -> Tensor3:
    """T_{A/J} through the projections P (mode 3) and P' (modes 1, 2).

    S is the set of non-pivot coordinates of J, so {phi(e_s)} is a basis of
    A/J. The projections are taken in the basis {e_s : s in S} + (basis of J),
    where P(e_s) = phi(e_s) and P kills J; in that basis P agrees with the
    quotient map. The result is checked against direct reduction mod J.
    """
    p = J.char
    consts = np.mod(np.asarray(consts, dtype=np.int64), p)
    n = consts.shape[0]
    if J.ambient != n:
        raise InputError(f"ideal lives in dimension {J.ambient}, algebra has dimension {n}")
    _check_ideal(consts, J)
    keep = J.complement_indices()
    k = len(keep)
    eye = np.eye(n, dtype=np.int64)
    adapted = np.vstack([eye[keep], J.basis.data]) if J.dim else eye[keep]
    to_adapted = inverse_array(adapted, p)
    # T_A in the adapted basis: u_a u_b expressed in adapted coordinates
    u = adapted[:k]
    prods = _products(consts, np.repeat(u, k, axis=0), np.tile(u, (k, 1)), p)
    coords = mat_mul(prods, to_adapted, p)
    projected = coords[:, :k].reshape(k, k, k)
    direct, _ = quotient_algebra_constants(consts, J)
    if not np.array_equal(projected, direct):
        raise ConsistencyError("projected tensor differs from the direct quotient tensor")
    return Tensor3.from_dense(projected, p)


# ---------------------------------------------------------------------------
# lower bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalCertificate:
    """Mode indices (a_i), (b_j), (c_k^-1) carving a unit diagonal out of T_{k[G]}."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    tubes: tuple[int, ...]


def matching_certificate(T: Tensor3, cand: Matching, G: Group) -> DiagonalCertificate:
    res = verify_matching(G, cand)
    if not res:
        raise InputError(f"matching fails at index triple {res.violation}")
    if T.dims != (G.order,) * 3:
        raise InputError(f"tensor dims {T.dims} do not match |G| = {G.order}")
    rows = tuple(int(x) for x in np.atleast_1d(G.index(np.array(cand.a))))
    cols = tuple(int(x) for x in np.atleast_1d(G.index(np.array(cand.b))))
    tubes = tuple(int(x) for x in np.atleast_1d(G.inv_table[G.index(np.array(cand.c))]))
    sub = T.dense()[np.ix_(rows, cols, tubes)]
    m = cand.m
    diag = np.zeros((m, m, m), dtype=np.int64)
    diag[np.arange(m), np.arange(m), np.arange(m)] = 1
    if not np.array_equal(sub, diag):
        raise ConsistencyError("matching subtensor is not the unit diagonal")
    return DiagonalCertificate(rows, cols, tubes)


def sr_lower_from_matching(T: Tensor3, cand: Matching, G: Group) -> int:
    """m, certified by an embedded m x m x m unit diagonal."""
    matching_certificate(T, cand, G)
    return cand.m


def sr_lower_semisimple(G: Group, ell: int, summary: SimpleSummary) -> int:
    """dim k[G]/J, which lower-bounds the slice rank of T_{k[G]} in characteristic ell."""
    if summary.group != G or summary.char != ell:
        raise ParameterError("summary was computed for a different group or characteristic")
    return summary.dim_semisimple


# ---------------------------------------------------------------------------
# exact slice rank on tiny tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VanishingTriple:
    V1: Subspace
    V2: Subspace
    V3: Subspace

    @property
    def codim_sum(self) -> int:
        return self.V1.codim + self.V2.codim + self.V3.codim


def _contract(dense: np.ndarray, b1: np.ndarray, b2: np.ndarray, b3: np.ndarray, p: int) -> np.ndarray:
    return np.mod(np.einsum("ai,bj,ck,ijk->abc", b1, b2, b3, dense), p)


def is_vanishing(T: Tensor3, W: VanishingTriple) -> bool:
    """T evaluates to zero on every triple of basis vectors of (V1, V2, V3)."""
    if (W.V1.ambient, W.V2.ambient, W.V3.ambient) != T.dims:
        return False
    if min(W.V1.dim, W.V2.dim, W.V3.dim) == 0:
        return True
    vals = _contract(T.dense(), W.V1.basis.data, W.V2.basis.data, W.V3.basis.data, T.char)
    return not vals.any()


def _slice_guard(T: Tensor3) -> None:
    cap = config.get().slice_rank_max_ambient
    for n in T.dims:
        if T.char**n > cap:
            raise ResourceError(f"exact slice rank needs char**dim <= {cap}, got {T.char}**{n}")


def exact_slice_rank(T: Tensor3) -> tuple[int, VanishingTriple]:
    """Minimum codimension sum over vanishing triples, by subspace enumeration.

    For each (V1, V2) the best V3 is the common kernel of the forms
    T(v1, v2, .), whose codimension is the rank of their span.
    """
    _slice_guard(T)
    p = T.char
    n1, n2, n3 = T.dims
    dense = T.dense()
    subs1 = sorted(enumerate_subspaces(n1, p), key=lambda s: s.codim)
    subs2 = sorted(enumerate_subspaces(n2, p), key=lambda s: s.codim)
    best = n1 + n2 + n3 + 1
    witness = None
    for V1 in subs1:
        if V1.codim >= best:
            break
        b1 = V1.basis.data
        partial = np.mod(np.einsum("ai,ijk->ajk", b1, dense), p) if V1.dim else None
        for V2 in subs2:
            c12 = V1.codim + V2.codim
            if c12 >= best:
                break
            if V1.dim == 0 or V2.dim == 0:
                forms = np.zeros((0, n3), dtype=np.int64)
            else:
                forms = np.mod(np.einsum("bj,ajk->abk", V2.basis.data, partial), p).reshape(-1, n3)
            r = rank_array(forms, p) if forms.size else 0
            if c12 + r < best:
                best = c12 + r
                V3 = Subspace(kernel_array(forms, p), p, n3) if forms.size else Subspace.full(n3, p)
                witness = VanishingTriple(V1, V2, V3)
    if witness is None or not is_vanishing(T, witness):
        raise ConsistencyError("slice rank search produced no vanishing witness")
    return best, witness


@dataclass(frozen=True)
class Slice:
    """covector on ``mode`` times a matrix on the remaining two modes (in order)."""

    mode: int
    covector: np.ndarray
    matrix: np.ndarray


def _adapted(V: Subspace) -> tuple[np.ndarray, np.ndarray, int]:
    """Basis [V; complement unit vectors] and its inverse."""
    n, p = V.ambient, V.char
    eye = np.eye(n, dtype=np.int64)
    rows = [V.basis.data] if V.dim else []
    rows.append(eye[V.complement_indices()])
    q = np.vstack(rows)
    return q, inverse_array(q, p), V.dim


def _mode_product(dense: np.ndarray, m: np.ndarray, mode: int, p: int) -> np.ndarray:
    """Apply ``x -> x @ m`` along one mode."""
    moved = np.moveaxis(dense, mode, -1)
    return np.moveaxis(np.mod(np.tensordot(moved, m, axes=([-1], [0])), p), -1, mode)


def vanishing_triple_to_slices(T: Tensor3, W: VanishingTriple) -> list[Slice]:
    """Explicit decomposition of T into exactly W.codim_sum slices.

    Peel mode 1 along a complement of V1, then mode 2 along a complement of
    V2; what is left lives on V1 x V2 and vanishes on V3, so the complement
    of V3 finishes it.
    """
    if not is_vanishing(T, W):
        raise InputError("triple does not vanish on the tensor")
    p = T.char
    rest = T.dense()
    slices: list[Slice] = []
    for mode, V in enumerate((W.V1, W.V2, W.V3)):
        q, qinv, k = _adapted(V)
        # coordinate a of x in the adapted basis is x @ qinv[:, a]
        for a in range(k, q.shape[0]):
            piece = np.mod(np.tensordot(q[a], np.moveaxis(rest, mode, 0), axes=1), p)
            slices.append(Slice(mode, qinv[:, a].copy(), piece))
        if mode < 2:
            proj = mat_mul(qinv[:, :k], q[:k], p) if k else np.zeros((V.ambient, V.ambient), dtype=np.int64)
            rest = _mode_product(rest, proj.T, mode, p)
    if _reassemble(slices, T.dims, p).tolist() != T.dense().tolist():
        raise ConsistencyError("slices do not sum back to the tensor")
    return slices


def _reassemble(slices: Sequence[Slice], dims: tuple[int, int, int], p: int) -> np.ndarray:
    out = np.zeros(dims, dtype=np.int64)
    for s in slices:
        outer = np.multiply.outer(s.covector, s.matrix)
        out = out + np.moveaxis(outer, 0, s.mode)
    return np.mod(out, p)


def apply_mode_maps(T: Tensor3, maps: Sequence[FFMatrix]) -> Tensor3:
    """T'_{abc} = sum A[a,i] B[b,j] C[c,k] T_{ijk}."""
    if len(maps) != 3:
        raise ParameterError("need one map per mode")
    dense = T.dense()
    for mode, m in enumerate(maps):
        if m.char != T.char or m.cols != T.dims[mode]:
            raise ParameterError(f"map {mode} has shape {m.shape}, mode has size {T.dims[mode]}")
        dense = _mode_product(dense, m.data.T, mode, T.char)
    return Tensor3.from_dense(dense, T.char)


def random_mode_maps(T: Tensor3, rng: np.random.Generator) -> list[FFMatrix]:
    return [FFMatrix(rng.integers(0, T.char, size=(n, n)), T.char) for n in T.dims]


def sr_monotonicity_check(T: Tensor3, maps: Sequence[FFMatrix] | None = None, seed: int = 0) -> bool:
    """Exact slice rank does not grow under linear maps on the three modes.

    Random square maps are drawn from ``seed`` when ``maps`` is omitted.
    """
    if maps is None:
        maps = random_mode_maps(T, np.random.default_rng(seed))
    after = apply_mode_maps(T, maps)
    return exact_slice_rank(after)[0] <= exact_slice_rank(T)[0]


# ---------------------------------------------------------------------------
# the F_p^n polynomial-method bound
# ---------------------------------------------------------------------------


def clp_count(p: int, n: int) -> tuple[int, int]:
    """N = #{x in {0..p-1}^n : sum x <= (p-1)n/3} and the bound min(3N, p^n)."""
    p = check_prime(p, "p")
    if p == 2:
        raise ParameterError("p must be odd")
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    cap = config.get().clp_max_bits
    if n * math.log2(p) > cap:
        raise ResourceError(f"p**n has more than {cap} bits")
    limit = (p - 1) * n // 3
    counts = [1]
    for _ in range(n):
        nxt = [0] * min(len(counts) + p - 1, limit + 1)
        for s, c in enumerate(counts):
            for x in range(p):
                if s + x > limit:
                    break
                nxt[s + x] += c
        counts = nxt
    N = sum(counts)
    return N, min(3 * N, p**n)


def _cp_objective(p: int, t: float) -> float:
    return sum(t**i for i in range(p)) * t ** (-(p - 1) / 3)


def c_p(p: int, tol: float = 1e-6) -> float:
    """inf over 0 < t < 1 of (1 + t + ... + t^(p-1)) t^(-(p-1)/3)."""
    p = check_prime(p, "p")
    if p == 2:
        raise ParameterError("p must be odd")
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    grid = np.linspace(0.001, 0.999, 999)
    vals = [_cp_objective(p, float(t)) for t in grid]
    i = int(np.argmin(vals))
    lo, hi = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, len(grid) - 1)])
    ratio = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - ratio * (hi - lo), lo + ratio * (hi - lo)
    f1, f2 = _cp_objective(p, x1), _cp_objective(p, x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - ratio * (hi - lo)
            f1 = _cp_objective(p, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + ratio * (hi - lo)
            f2 = _cp_objective(p, x2)
    return min(f1, f2)


def clp_growth_rate(p: int, n: int) -> float:
    """log(3 N(p, n)) / n, which tends to log c_p."""
    N, _ = clp_count(p, n)
    return math.log(3 * N) / n
