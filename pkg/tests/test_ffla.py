from __future__ import annotations

import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from grouptensor import config
from grouptensor.errors import ParameterError, ResourceError
from grouptensor.ffla import (
    FFMatrix,
    Subspace,
    charpoly,
    enumerate_subspaces,
    gaussian_binomial,
    kernel,
    rank_array,
    rref,
    rref_array,
    solve,
    spin,
)

PRIMES = [2, 3, 5, 7, 13]


def _gf_rank(m: np.ndarray, p: int) -> int:
    # plain Gaussian elimination with Python ints, independent of the library
    rows = [list(map(int, r)) for r in np.asarray(m) % p]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def test_identity_rank_and_kernel():
    m = FFMatrix.identity(3, 2)
    r, k = rref(m)
    assert k == 3 and r == m
    assert kernel(m).dim == 0


def test_all_ones_rank_one():
    assert FFMatrix([[1, 1], [1, 1]], 2).rank == 1


def test_zero_kernel_is_full():
    K = kernel(FFMatrix.zeros(3, 3, 5))
    assert K.dim == 3 and K == Subspace.full(3, 5)


def test_entries_reduced_and_validated():
    m = FFMatrix([[7, -1], [3, 4]], 5)
    assert m.data.tolist() == [[2, 4], [3, 4]]
    with pytest.raises(ParameterError):
        FFMatrix([[1]], 4)
    with pytest.raises(ParameterError):
        FFMatrix([[1, 2]], 3) @ FFMatrix([[1, 2]], 3)


@pytest.mark.parametrize("p", PRIMES)
def test_rank_matches_independent_elimination(p):
    rng = np.random.default_rng(p)
    for shape in [(5, 7), (9, 4), (12, 12)]:
        m = rng.integers(0, p, size=shape)
        m[-1] = (m[0] + m[1]) % p  # plant a dependency
        assert FFMatrix(m, p).rank == _gf_rank(m, p)


@pytest.mark.parametrize("p", [2, 3, 7])
def test_blocked_rref_path_matches_small_path(p):
    # 130 x 150 crosses the blocked-elimination threshold
    rng = np.random.default_rng(1)
    left = rng.integers(0, p, size=(130, 60))
    right = rng.integers(0, p, size=(60, 150))
    m = (left @ right) % p
    r, piv = rref_array(m, p)
    assert len(piv) == _gf_rank(m, p)
    # reduced form: pivot columns are unit vectors
    assert np.array_equal(r[: len(piv)][:, piv], np.eye(len(piv), dtype=np.int64))


@settings(max_examples=40, deadline=None)
@given(
    p=st.sampled_from(PRIMES),
    rows=st.integers(1, 6),
    cols=st.integers(1, 6),
    seed=st.integers(0, 2**32 - 1),
)
def test_rref_idempotent_and_rank_nullity(p, rows, cols, seed):
    m = FFMatrix(np.random.default_rng(seed).integers(0, p, size=(rows, cols)), p)
    r, k = m.rref()
    assert r.rref()[0] == r
    K = m.kernel()
    assert k + K.dim == cols
    if K.dim:
        assert not ((m.data @ K.basis.data.T) % p).any()


@settings(max_examples=40, deadline=None)
@given(p=st.sampled_from(PRIMES), seed=st.integers(0, 2**32 - 1))
def test_solve_planted(p, seed):
    rng = np.random.default_rng(seed)
    m = FFMatrix(rng.integers(0, p, size=(5, 4)), p)
    x0 = rng.integers(0, p, size=4)
    v = (m.data @ x0) % p
    x = solve(m, v)
    assert x is not None
    assert np.array_equal((m.data @ x) % p, v)


def test_solve_reports_inconsistency():
    m = FFMatrix([[1, 0], [1, 0]], 3)
    assert solve(m, [1, 2]) is None


def test_inverse():
    m = FFMatrix([[1, 2], [3, 4]], 7)
    assert m @ m.inverse() == FFMatrix.identity(2, 7)


def test_subspace_canonical():
    a = Subspace.span([[1, 1, 0], [0, 1, 1]], 2, 3)
    b = Subspace.span([[1, 0, 1], [0, 1, 1], [1, 1, 0]], 2, 3)
    assert a == b and hash(a) == hash(b)
    assert a.basis == b.basis


def test_spin_examples():
    assert spin([[0, 0, 0]], [FFMatrix.identity(3, 2)]).dim == 0
    assert spin([[1, 0, 0]], [FFMatrix.identity(3, 2)]) == Subspace.span([[1, 0, 0]], 2, 3)
    shift = FFMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]], 2)
    assert spin([[1, 0, 0]], [shift]).dim == 3


def test_spin_invariant():
    rng = np.random.default_rng(5)
    acts = [FFMatrix(rng.integers(0, 3, size=(6, 6)), 3) for _ in range(2)]
    acts = [FFMatrix(np.kron(np.eye(2, dtype=int), a.data[:3, :3]), 3) for a in acts]
    W = spin([[1, 0, 0, 0, 0, 0]], acts)
    images = np.vstack([(W.basis.data @ a.data) % 3 for a in acts])
    assert W.contains(images)
    assert W.dim <= 3


def test_spin_dimension_mismatch():
    with pytest.raises(ParameterError):
        spin([[1, 0]], [FFMatrix.identity(3, 2)])


def _brute_subspaces(n: int, p: int) -> int:
    vecs = [np.array(v) for v in itertools.product(range(p), repeat=n)]
    seen = set()
    for k in range(n + 1):
        for combo in itertools.combinations(vecs, k):
            S = Subspace.span(np.array(combo).reshape(-1, n), p, n) if combo else Subspace.zero(n, p)
            seen.add(S)
    return len(seen)


@pytest.mark.parametrize("n,p,count", [(3, 2, 16), (4, 2, 67), (2, 3, 6)])
def test_enumerate_subspaces_counts(n, p, count):
    subs = list(enumerate_subspaces(n, p))
    assert len(subs) == count
    assert len(set(subs)) == count
    assert count == sum(gaussian_binomial(n, k, p) for k in range(n + 1))


@pytest.mark.parametrize("n,p", [(3, 2), (2, 3)])
def test_enumerate_matches_brute_force(n, p):
    assert len(list(enumerate_subspaces(n, p))) == _brute_subspaces(n, p)


def test_gaussian_binomial_independent():
    # q-binomial via its product formula, computed with sympy rationals
    q = sympy.Symbol("q")
    for n, k in [(4, 2), (5, 2), (3, 1)]:
        num = sympy.prod([(1 - q ** (n - i)) for i in range(k)])
        den = sympy.prod([(1 - q ** (i + 1)) for i in range(k)])
        expr = sympy.cancel(num / den)
        for p in (2, 3):
            assert gaussian_binomial(n, k, p) == expr.subs(q, p)


def test_enumerate_guard():
    config.override(subspace_enum_max_ambient=16)
    with pytest.raises(ResourceError):
        list(enumerate_subspaces(5, 2))


@pytest.mark.parametrize("p", [2, 5, 7])
def test_charpoly_matches_sympy(p):
    m = np.random.default_rng(p).integers(0, p, size=(7, 7))
    x = sympy.Symbol("x")
    ref = sympy.Poly(sympy.Matrix(m.tolist()).charpoly(x).as_expr(), x, modulus=p)
    ours = [c % p for c in charpoly(m, p)]
    assert ours == [int(c) % p for c in ref.all_coeffs()]


def test_rank_array_empty():
    assert rank_array(np.zeros((0, 3), dtype=np.int64), 3) == 0
