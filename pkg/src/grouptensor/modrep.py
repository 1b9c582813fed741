"""Modules over F_ell[G]: MeatAxe chopping and the semisimple quotient.

Modules are row spaces: a vector ``v`` is acted on by ``v @ rho(g)``, and
``rho(g) @ rho(h) == rho(gh)`` for every module built here.

Finite fields are perfect, so dim J(k[G]) does not change under extension of
scalars. Each distinct F_ell-simple S with endomorphism field F_{ell^e}
contributes a block of F_ell-dimension d**2 / e to k[G]/J, which is how
:func:`semisimple_summary` gets the dimension of the quotient over the
algebraic closure without extension-field arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor

from . import config
from .errors import ConsistencyError, ContractError, IrreducibilityError, ParameterError, ResourceError
from .ffla import (
    FFMatrix,
    Subspace,
    charpoly,
    check_prime,
    echelon_basis,
    inverse_array,
    kernel_array,
    left_nullspace,
    mat_mul,
    poly_eval_matrix,
    poly_roots,
    rank_array,
    reduce_rows,
    rref_array,
    spin_array,
)
from .groups import Group, decode_matrix, make_group

# modules at or below this dimension get a fully factored characteristic polynomial
_FULL_FACTOR_DIM = 100


@dataclass(eq=False)
class GModule:
    """Action matrices of the group generators (in ``group.generators`` order)."""

    group: Group
    char: int
    gen_actions: tuple[FFMatrix, ...]
    certified_simple: bool = field(default=False, repr=False)

    def __post_init__(self):
        if len(self.gen_actions) != len(self.group.generators):
            raise ParameterError(
                f"{len(self.gen_actions)} action matrices for {len(self.group.generators)} generators"
            )
        n = self.gen_actions[0].rows
        for a in self.gen_actions:
            if a.char != self.char or a.shape != (n, n):
                raise ParameterError("action matrices must be square, equal-sized and over F_char")

    @property
    def dim(self) -> int:
        return self.gen_actions[0].rows

    def arrays(self) -> list[np.ndarray]:
        return [a.data for a in self.gen_actions]

    def element_actions(self) -> np.ndarray:
        """``out[i]`` is the action of element i, built along the BFS words."""
        return _element_actions(self.group, self.arrays(), self.char)

    def word_action(self, word: Sequence[int]) -> np.ndarray:
        mats = self.arrays()
        out = np.eye(self.dim, dtype=np.int64)
        for g in word:
            out = mat_mul(out, mats[g], self.char)
        return out


def _from_arrays(G: Group, mats: Sequence[np.ndarray], p: int, simple: bool = False) -> GModule:
    return GModule(G, p, tuple(FFMatrix(m, p) for m in mats), certified_simple=simple)


def _element_actions(G: Group, mats: Sequence[np.ndarray], p: int) -> np.ndarray:
    n = mats[0].shape[0]
    out = np.zeros((G.order, n, n), dtype=np.int64)
    out[0] = np.eye(n, dtype=np.int64)
    depth = np.zeros(G.order, dtype=np.int64)
    for i in range(1, G.order):
        depth[i] = depth[G.word_parent[i]] + 1
    gstack = np.stack([np.asarray(m, dtype=np.float64) for m in mats])
    for level in range(1, int(depth.max(initial=0)) + 1):
        idx = np.flatnonzero(depth == level)
        par = G.word_parent[idx]
        via = G.word_gen[idx]
        prod = np.matmul(out[par].astype(np.float64), gstack[via])
        out[idx] = np.mod(prod, p).astype(np.int64)
    return out


def check_representation(M: GModule, samples: int = 100, seed: int = 0) -> bool:
    """Sampled check that action(u) @ action(v) equals the action of the element uv."""
    G = M.group
    rng = np.random.default_rng(seed)
    ngen = len(G.generators)
    acts = M.element_actions()
    for _ in range(samples):
        u = rng.integers(0, ngen, size=int(rng.integers(1, 7))).tolist()
        v = rng.integers(0, ngen, size=int(rng.integers(1, 7))).tolist()
        w_code = G.identity
        for g in u + v:
            w_code = G.mul(w_code, G.generators[g])
        lhs = mat_mul(M.word_action(u), M.word_action(v), M.char)
        if not np.array_equal(lhs, acts[G.index(w_code)]):
            return False
    return True


def regular_module(G: Group, ell: int) -> GModule:
    """k[G] with each generator acting by its left-multiplication permutation matrix."""
    ell = check_prime(ell, "ell")
    cap = config.get().modrep_max_order
    if G.order > cap:
        raise ResourceError(f"regular module of order {G.order} exceeds the modrep cap {cap}")
    mats = []
    cols = np.arange(G.order)
    for gi in G.generator_indices:
        m = np.zeros((G.order, G.order), dtype=np.int64)
        m[G.mul_idx(np.full(G.order, gi), cols), cols] = 1
        mats.append(m)
    return _from_arrays(G, mats, ell)


def trivial_module(G: Group, ell: int) -> GModule:
    ell = check_prime(ell, "ell")
    return _from_arrays(G, [np.ones((1, 1), dtype=np.int64)] * len(G.generators), ell, simple=True)


# ---------------------------------------------------------------------------
# MeatAxe
# ---------------------------------------------------------------------------


def _random_element(mats: Sequence[np.ndarray], p: int, rng: np.random.Generator) -> np.ndarray:
    n = mats[0].shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for _ in range(int(rng.integers(1, 4))):
        word = rng.integers(0, len(mats), size=int(rng.integers(1, 5)))
        w = mats[word[0]]
        for g in word[1:]:
            w = mat_mul(w, mats[g], p)
        out = (out + int(rng.integers(1, p)) * w) % p if p > 2 else (out + w) % p
    return out


def _vector_minpoly(a: np.ndarray, v: np.ndarray, p: int) -> list[int]:
    """Minimal polynomial of ``v`` under ``x -> x @ a`` (Krylov by repeated squaring)."""
    n = a.shape[0]
    krylov = v[None, :] % p
    power = a
    while krylov.shape[0] < n + 1:
        krylov = np.vstack([krylov, mat_mul(krylov, power, p)])
        power = mat_mul(power, power, p)
    krylov = krylov[: n + 1]
    r, piv = rref_array(krylov.T, p)
    d = len(piv)
    coeffs = [(-int(c)) % p for c in r[:d, d]]
    return [1] + coeffs[::-1]


def _candidate_factors(a: np.ndarray, p: int, rng: np.random.Generator) -> list[tuple[list[int], int]]:
    """Irreducible factors (with multiplicity) to try, cheapest first."""
    n = a.shape[0]
    if n <= _FULL_FACTOR_DIM:
        _, facs = gf_factor([int(c) for c in charpoly(a, p)], p, ZZ)
        facs = [([int(c) for c in f], int(k)) for f, k in facs]
        return sorted(facs, key=lambda fk: (len(fk[0]), fk[1]))
    v = rng.integers(0, p, size=n)
    mu = _vector_minpoly(a, v, p)
    return [([1, (-lam) % p], 0) for lam in poly_roots(mu, p)]


@dataclass
class _Split:
    basis: np.ndarray
    pivots: list[int]


def _split_or_certify(mats: list[np.ndarray], p: int, rng: np.random.Generator, budget: int) -> _Split | None:
    """A proper submodule of the module, or ``None`` once irreducibility is certified."""
    n = mats[0].shape[0]
    transposed = None
    for _ in range(budget):
        a = _random_element(mats, p, rng)
        for f, _mult in _candidate_factors(a, p, rng):
            fa = poly_eval_matrix(f, a, p)
            null = left_nullspace(fa, p)
            if null.shape[0] == 0:
                continue
            tries = [null[0]] if null.shape[0] == 1 else [null[0], rng.integers(0, p, null.shape[0]) @ null % p]
            if n > _FULL_FACTOR_DIM and null.shape[0] > 1:
                # the whole eigenspace usually spins to a larger, more balanced submodule
                tries.insert(0, null)
            for v in tries:
                if not np.any(v):
                    continue
                sub, piv = spin_array(v, mats, p)
                if len(piv) < n:
                    return _Split(sub, piv)
            if null.shape[0] != len(f) - 1:
                continue
            # Holt-Rees: nullity equals deg f, so one vector on each side decides it
            if transposed is None:
                transposed = [m.T.copy() for m in mats]
            w = left_nullspace(fa.T, p)[0]
            dual, dpiv = spin_array(w, transposed, p)
            if len(dpiv) < n:
                ann = kernel_array(dual, p)
                return _Split(ann, list(echelon_basis(ann, p)[1]))
            return None
    raise IrreducibilityError(
        f"could not split or certify a block of dimension {n} over F_{p} within {budget} random elements"
    )


def _submodule_actions(mats, basis, pivots, p):
    return [mat_mul(basis, m, p)[:, pivots] for m in mats]


def _quotient_actions(mats, basis, pivots, p):
    pivset = set(pivots)
    q = [i for i in range(mats[0].shape[0]) if i not in pivset]
    out = []
    for m in mats:
        rows = m[q]
        out.append((rows[:, q] - mat_mul(rows[:, pivots], basis[:, q], p)) % p)
    return out


def is_irreducible(M: GModule, seed: int = 0) -> bool:
    """Holt-Rees irreducibility test; caches a positive answer on the module."""
    if M.certified_simple:
        return True
    if M.dim == 1:
        M.certified_simple = True
        return True
    rng = np.random.default_rng(seed)
    split = _split_or_certify(M.arrays(), M.char, rng, config.get().chop_retry_budget)
    if split is None:
        M.certified_simple = True
    return split is None


def chop(M: GModule, seed: int = 0) -> list[GModule]:
    """Composition factors of ``M`` with multiplicity, each certified simple.

    Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    budget = config.get().chop_retry_budget
    p = M.char
    pending = [M.arrays()]
    factors: list[GModule] = []
    while pending:
        mats = pending.pop()
        if mats[0].shape[0] == 1:
            factors.append(_from_arrays(M.group, mats, p, simple=True))
            continue
        try:
            split = _split_or_certify(mats, p, rng, budget)
        except IrreducibilityError as exc:
            raise IrreducibilityError(f"{M.group.descriptor} over F_{p}: {exc}") from None
        if split is None:
            factors.append(_from_arrays(M.group, mats, p, simple=True))
            continue
        pending.append(_quotient_actions(mats, split.basis, split.pivots, p))
        pending.append(_submodule_actions(mats, split.basis, split.pivots, p))
    return factors


# ---------------------------------------------------------------------------
# homomorphisms, isomorphism, endomorphism degree
# ---------------------------------------------------------------------------


def _standard_basis(mats: Sequence[np.ndarray], v: np.ndarray, p: int):
    """Spin ``v`` one vector at a time, recording how each basis vector arose."""
    n = mats[0].shape[0]
    vecs = [v % p]
    recipe = [(-1, -1)]
    ech, piv = echelon_basis(vecs[0][None, :], p)
    i = 0
    while i < len(vecs) and len(vecs) < n:
        for g, m in enumerate(mats):
            w = mat_mul(vecs[i][None, :], m, p)
            red = reduce_rows(w, ech, piv, p)
            if red.any():
                vecs.append(w[0])
                recipe.append((i, g))
                ech, piv = echelon_basis(np.vstack([ech, red]), p)
                if len(vecs) == n:
                    break
        i += 1
    return np.array(vecs, dtype=np.int64), recipe


def hom_dimension(M1: GModule, M2: GModule) -> int:
    """dim Hom_G(M1, M2) for a cyclic ``M1`` (every simple module is cyclic).

    A homomorphism is fixed by the image u of one generating vector; the
    conditions on u are linear, one block per (standard basis vector, generator).
    """
    if M1.group != M2.group or M1.char != M2.char:
        raise ParameterError("modules must share group and characteristic")
    p = M1.char
    m1, m2 = M1.arrays(), M2.arrays()
    d1, d2 = M1.dim, M2.dim
    basis, recipe = _standard_basis(m1, np.eye(d1, dtype=np.int64)[0], p)
    if basis.shape[0] != d1:
        raise ContractError("first module is not generated by its first unit vector")
    binv = inverse_array(basis, p)
    words = np.zeros((d1, d2, d2), dtype=np.int64)
    words[0] = np.eye(d2, dtype=np.int64)
    for k in range(1, d1):
        src, g = recipe[k]
        words[k] = mat_mul(words[src], m2[g], p)
    wflat = words.reshape(d1, d2 * d2)
    blocks = []
    for a1, a2 in zip(m1, m2):
        coords = mat_mul(mat_mul(basis, a1, p), binv, p)
        lhs = np.mod(np.matmul(words.astype(np.float64), a2.astype(np.float64)), p).astype(np.int64)
        rhs = mat_mul(coords, wflat, p).reshape(d1, d2, d2)
        blocks.append((lhs - rhs) % p)
    big = np.concatenate(blocks, axis=0).transpose(1, 0, 2).reshape(d2, -1)
    return d2 - rank_array(big, p)


def _require_simple(M: GModule) -> None:
    if not is_irreducible(M):
        raise ContractError(f"module of dimension {M.dim} over F_{M.char} is not simple")


def are_isomorphic(M1: GModule, M2: GModule) -> bool:
    """Isomorphism test for simple modules."""
    _require_simple(M1)
    _require_simple(M2)
    if M1.group != M2.group or M1.char != M2.char:
        raise ParameterError("modules must share group and characteristic")
    if M1.dim != M2.dim:
        return False
    if not _signature(M1) == _signature(M2):
        return False
    return hom_dimension(M1, M2) > 0


def endo_degree(M: GModule) -> int:
    """dim over F_ell of End_G(M) for a simple module: the degree e of its endomorphism field."""
    _require_simple(M)
    return hom_dimension(M, M)


def commutant_dimension(M: GModule) -> int:
    """Solution dimension of E @ rho(g) == rho(g) @ E by direct Kronecker elimination.

    Independent of :func:`hom_dimension`; quadratic in dim**2, so keep it small.
    """
    d, p = M.dim, M.char
    eye = np.eye(d, dtype=np.int64)
    rows = []
    for a in M.arrays():
        # vec(E a - a E) with row-major vec: (I kron a^T) - (a kron I)
        rows.append((np.kron(eye, a.T) - np.kron(a, eye)) % p)
    return d * d - rank_array(np.vstack(rows), p)


_SIG_WORDS = ((0,), (1,), (0, 1), (0, 0, 1), (0, 1, 1), (0, 1, 0, 1, 1))


def _signature(M: GModule) -> tuple:
    # traces of a few fixed words: equal on isomorphic modules
    ngen = len(M.gen_actions)
    out = []
    for w in _SIG_WORDS:
        w = [g % ngen for g in w]
        out.append(int(np.trace(M.word_action(w)) % M.char))
    return tuple(out)


# ---------------------------------------------------------------------------
# semisimple summary and radical
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimpleInfo:
    d: int
    e: int
    mult: int
    witness: GModule = field(repr=False, compare=False)

    @property
    def absolute_dim(self) -> int:
        return self.d // self.e


@dataclass(frozen=True)
class SimpleSummary:
    group: Group
    char: int
    simples: tuple[SimpleInfo, ...]
    dim_semisimple: int
    dim_radical: int

    def as_dict(self) -> dict:
        return {
            "simples": [{"d": s.d, "e": s.e, "mult": s.mult} for s in self.simples],
            "dim_semisimple": self.dim_semisimple,
            "dim_radical": self.dim_radical,
        }


def distinct_simples(factors: Sequence[GModule]) -> list[tuple[GModule, int]]:
    """Group composition factors into isomorphism classes, in first-seen order."""
    reps: list[list] = []
    for f in factors:
        for entry in reps:
            if are_isomorphic(entry[0], f):
                entry[1] += 1
                break
        else:
            reps.append([f, 1])
    return [(m, k) for m, k in reps]


@lru_cache(maxsize=64)
def _summary_cached(desc: str, ell: int, seed: int, cap: int) -> SimpleSummary:
    G = make_group(desc)
    factors = chop(regular_module(G, ell), seed)
    simples = []
    for module, mult in distinct_simples(factors):
        e = endo_degree(module)
        if module.dim % e:
            raise ConsistencyError(f"endomorphism degree {e} does not divide dimension {module.dim}")
        simples.append(SimpleInfo(module.dim, e, mult, module))
    simples.sort(key=lambda s: (s.d, s.e, -s.mult))
    if sum(s.d * s.mult for s in simples) != G.order:
        raise ConsistencyError("composition factor dimensions do not add up to |G|")
    semisimple = sum(s.d * s.d // s.e for s in simples)
    return SimpleSummary(G, ell, tuple(simples), semisimple, G.order - semisimple)


def semisimple_summary(G: Group, ell: int, seed: int = 0) -> SimpleSummary:
    """Distinct simple F_ell[G]-modules and dim k[G]/J(k[G]) = sum of d**2 / e."""
    ell = check_prime(ell, "ell")
    cap = config.get().modrep_max_order
    if G.order > cap:
        raise ResourceError(f"group order {G.order} exceeds the modrep cap {cap}")
    return _summary_cached(G.descriptor, ell, int(seed), cap)


def radical_basis(G: Group, ell: int, summary: SimpleSummary) -> Subspace:
    """Elements of F_ell[G] acting as zero on every distinct simple (coefficient rows)."""
    if summary.group != G or summary.char != ell:
        raise ParameterError("summary was computed for a different group or characteristic")
    blocks = [s.witness.element_actions().reshape(G.order, -1) for s in summary.simples]
    images = np.hstack(blocks)
    radical = left_nullspace(images, ell)
    if radical.shape[0] != summary.dim_radical:
        raise ConsistencyError(
            f"radical has dimension {radical.shape[0]}, summary says {summary.dim_radical}"
        )
    return Subspace(radical, ell, G.order)


# ---------------------------------------------------------------------------
# polynomial representations of SL(2,p)
# ---------------------------------------------------------------------------


def _poly_power(lin: Sequence[int], k: int, p: int) -> np.ndarray:
    out = np.array([1], dtype=np.int64)
    for _ in range(k):
        out = np.convolve(out, np.asarray(lin, dtype=np.int64)) % p
    return out


def _substitution_matrix(m: Sequence[Sequence[int]], deg: int, p: int) -> np.ndarray:
    (a, b), (c, d) = m
    sub = np.zeros((deg + 1, deg + 1), dtype=np.int64)
    for i in range(deg + 1):
        # x^(deg-i) y^i -> (a x + c y)^(deg-i) (b x + d y)^i, indexed by the power of y
        sub[i] = np.convolve(_poly_power([a, c], deg - i, p), _poly_power([b, d], i, p)) % p
    # rows give the substitution on coefficient rows; transpose to multiply like group elements
    return sub.T.copy()


def sym_power_rep(p: int, d: int, projective: bool | None = None) -> GModule:
    """Homogeneous polynomials of degree d in two variables over F_p.

    Basis x^d, x^(d-1) y, ..., y^d. A generator [[a,b],[c,d]] substitutes
    x -> a x + c y, y -> b x + d y. Lives on PSL(2,p) when d is even (the
    default there), else on SL(2,p).
    """
    if check_prime(p, "p") == 2:
        raise ParameterError(f"p must be an odd prime, got {p}")
    if not 0 <= d <= p - 1:
        raise ParameterError(f"degree must lie in 0..{p - 1}, got {d}")
    if projective is None:
        projective = d % 2 == 0
    if projective and d % 2:
        raise ParameterError("odd-degree polynomials do not give PSL(2,p)-modules")
    G = make_group(f"{'psl2' if projective else 'sl2'}:{p}")
    mats = [_substitution_matrix(decode_matrix(G, g), d, p) for g in G.generators]
    return _from_arrays(G, mats, p)


# ---------------------------------------------------------------------------
# trace-chain radical oracle
# ---------------------------------------------------------------------------


def _ilog(n: int, base: int) -> int:
    k = 0
    while base ** (k + 1) <= n:
        k += 1
    return k


def radical_trace_chain(G: Group, ell: int) -> int:
    """dim J(F_ell[G]) from the positive-characteristic trace-form chain.

    I_{-1} = A and I_i = {x in I_{i-1} : g_i(x y) = 0 for all y in A}, where
    g_i(z) = Tr(z^(ell^i)) / ell^i mod ell on integer lifts of regular
    matrices; I_l with l = floor(log_ell |G|) is the radical.
    """
    ell = check_prime(ell, "ell")
    cap = config.get().radical_oracle_max_order
    if G.order > cap:
        raise ResourceError(f"trace-chain oracle is guarded at order {cap}, got {G.order}")
    n = G.order
    table = G.mul_table
    # regular[g] is the left-multiplication matrix of g (column convention)
    regular = np.zeros((n, n, n), dtype=np.float64)
    cols = np.arange(n)
    for g in range(n):
        regular[g, table[g, cols], cols] = 1.0
    ideal = np.eye(n, dtype=np.int64)
    inv = G.inv_table
    for i in range(_ilog(n, ell) + 1):
        mod = ell ** (i + 1)
        step = ell**i
        # x * y for every ideal basis vector x and group element y: (x y)_{h} = x_{h y^-1}
        prods = np.stack([ideal[:, table[cols, inv[y]]] for y in range(n)], axis=1)
        flat = prods.reshape(-1, n).astype(np.float64)
        mats = np.einsum("bg,gij->bij", flat, regular)
        powered = _matrix_power_mod(mats, step, mod)
        traces = np.mod(np.trace(powered, axis1=1, axis2=2), mod).astype(np.int64)
        if np.any(traces % step):
            raise ConsistencyError(f"trace not divisible by {step} at chain step {i}")
        form = ((traces // step) % ell).reshape(ideal.shape[0], n)
        coeffs = left_nullspace(form, ell)
        if coeffs.shape[0] == 0:
            return 0
        ideal = echelon_basis(mat_mul(coeffs, ideal, ell), ell)[0]
    return int(ideal.shape[0])


def _matrix_power_mod(mats: np.ndarray, k: int, mod: int) -> np.ndarray:
    result = None
    base = np.mod(mats, mod)
    while k:
        if k & 1:
            result = base.copy() if result is None else np.mod(np.matmul(result, base), mod)
        k >>= 1
        if k:
            base = np.mod(np.matmul(base, base), mod)
    return result
