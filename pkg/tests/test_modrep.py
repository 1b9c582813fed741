from __future__ import annotations

import numpy as np
import pytest

from grouptensor import config
from grouptensor.conjugacy import ell_regular_count
from grouptensor.errors import ContractError, ParameterError, ResourceError
from grouptensor.ffla import Subspace
from grouptensor.groups import decode_matrix, encode_matrix, make_group
from grouptensor.modrep import (
    _from_arrays,
    are_isomorphic,
    check_representation,
    chop,
    commutant_dimension,
    endo_degree,
    hom_dimension,
    is_irreducible,
    radical_basis,
    radical_trace_chain,
    regular_module,
    semisimple_summary,
    sym_power_rep,
    trivial_module,
)


def algebra_product(table: np.ndarray, x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """(x * y)[gh] += x[g] y[h] in F_p[G], straight from the multiplication table."""
    out = np.zeros(table.shape[0], dtype=np.int64)
    np.add.at(out, table.ravel(), np.outer(x, y).ravel())
    return out % p


def test_regular_module_permutations():
    G = make_group("cyclic:4")
    M = regular_module(G, 2)
    assert M.dim == 4 and len(M.gen_actions) == 1
    a = M.arrays()[0]
    assert sorted(a.sum(axis=0).tolist()) == [1] * 4 and sorted(a.sum(axis=1).tolist()) == [1] * 4
    # a 4-cycle: order exactly 4
    powers = [np.linalg.matrix_power(a, k) for k in range(1, 5)]
    assert not any(np.array_equal(m, np.eye(4)) for m in powers[:3])
    assert np.array_equal(powers[3], np.eye(4))


def test_regular_module_psl2_5():
    M = regular_module(make_group("psl2:5"), 5)
    assert M.dim == 60 and len(M.gen_actions) == 2
    for a in M.arrays():
        assert set(np.unique(a).tolist()) == {0, 1}
        assert np.all(a.sum(axis=0) == 1) and np.all(a.sum(axis=1) == 1)
    assert check_representation(M)


def test_regular_module_cap():
    config.override(modrep_max_order=50)
    with pytest.raises(ResourceError):
        regular_module(make_group("psl2:5"), 2)
    with pytest.raises(ResourceError):
        semisimple_summary(make_group("psl2:5"), 2)


def test_chop_cyclic4_into_trivials():
    G = make_group("cyclic:4")
    factors = chop(regular_module(G, 2))
    assert [f.dim for f in factors] == [1, 1, 1, 1]
    triv = trivial_module(G, 2)
    assert all(are_isomorphic(f, triv) for f in factors)


def test_one_dim_module_is_simple():
    M = trivial_module(make_group("psl2:7"), 3)
    assert is_irreducible(M)
    assert chop(M) == [M] or [f.dim for f in chop(M)] == [1]


@pytest.mark.parametrize("desc,ell", [("psl2:5", 2), ("sl2:3", 3), ("prod:cyclic:2,cyclic:3", 2)])
def test_chop_deterministic_and_complete(desc, ell):
    G = make_group(desc)
    dims = lambda fs: sorted(f.dim for f in fs)  # noqa: E731
    first, second = chop(regular_module(G, ell), seed=3), chop(regular_module(G, ell), seed=3)
    assert dims(first) == dims(second)
    assert sum(f.dim for f in first) == G.order
    assert all(is_irreducible(f) for f in first)
    assert all(check_representation(f, samples=30) for f in first)


def test_factors_multiset_seed_independent():
    G = make_group("psl2:5")
    a = sorted(f.dim for f in chop(regular_module(G, 3), seed=0))
    b = sorted(f.dim for f in chop(regular_module(G, 3), seed=11))
    assert a == b


def test_reducible_module_detected():
    G = make_group("cyclic:4")
    M = regular_module(G, 2)
    assert not is_irreducible(M)
    with pytest.raises(ContractError):
        endo_degree(M)
    with pytest.raises(ContractError):
        are_isomorphic(M, trivial_module(G, 2))


def test_trivial_examples():
    T = trivial_module(make_group("psl2:5"), 2)
    assert are_isomorphic(T, T) and endo_degree(T) == 1


def test_psl2_5_char2_has_degree_two_simple():
    s = semisimple_summary(make_group("psl2:5"), 2)
    four = [x for x in s.simples if x.d == 4 and x.e == 2]
    assert four, s.simples
    W = four[0].witness
    assert endo_degree(W) == 2
    assert commutant_dimension(W) == 2


@pytest.mark.parametrize("desc,ell", [("psl2:5", 2), ("psl2:5", 3), ("sl2:3", 2), ("psl2:7", 2)])
def test_endo_degree_matches_kronecker_commutant(desc, ell):
    for s in semisimple_summary(make_group(desc), ell).simples:
        if s.d <= 20:
            assert commutant_dimension(s.witness) == s.e


def test_hom_dimension_direct_sum():
    G = make_group("sl2:3")
    T = trivial_module(G, 2)
    mats = [np.eye(2, dtype=np.int64)] * len(G.generators)
    TT = _from_arrays(G, mats, 2)
    assert hom_dimension(T, TT) == 2
    # the regular module is cyclic on the identity: Hom(k[G], M) = M
    R = regular_module(make_group("cyclic:4"), 2)
    assert hom_dimension(R, trivial_module(R.group, 2)) == 1
    assert hom_dimension(R, R) == 4
    assert commutant_dimension(R) == 4


@pytest.mark.parametrize(
    "desc,ell,value",
    [
        ("psl2:5", 7, 60),
        ("psl2:5", 5, 35),
        ("cyclic:4", 2, 1),
        ("psl2:5", 2, 25),
        ("psl2:5", 3, 35),
        ("cyclic:9", 3, 1),
        ("cyclic:6", 3, 2),
    ],
)
def test_semisimple_examples(desc, ell, value):
    G = make_group(desc)
    s = semisimple_summary(G, ell)
    assert s.dim_semisimple == value
    assert s.dim_radical == G.order - value
    assert all(x.d % x.e == 0 for x in s.simples)
    assert sum(x.d * x.mult for x in s.simples) == G.order
    assert sum(x.d * x.d // x.e for x in s.simples) == value
    # multiplicity of a simple in the regular module is its absolute dimension
    # times the number of absolute constituents in a semisimple algebra
    if G.order % ell:
        assert all(x.mult == x.d // x.e for x in s.simples)


@pytest.mark.parametrize("desc,ell", [("psl2:5", 2), ("cyclic:12", 3), ("sl2:5", 5), ("ea:3:2", 2)])
def test_semisimple_bound(desc, ell):
    G = make_group(desc)
    s = semisimple_summary(G, ell)
    assert s.dim_semisimple <= G.order
    assert (s.dim_semisimple == G.order) == (G.order % ell != 0)


def test_brauer_count_small():
    for desc, ell in [("psl2:5", 2), ("psl2:5", 3), ("psl2:5", 5), ("sl2:3", 3), ("cyclic:6", 2)]:
        G = make_group(desc)
        assert sum(x.e for x in semisimple_summary(G, ell).simples) == ell_regular_count(G, ell)


def test_radical_cyclic2():
    G = make_group("cyclic:2")
    J = radical_basis(G, 2, semisimple_summary(G, 2))
    assert J == Subspace.span([[1, 1]], 2, 2)


def test_radical_psl2_5():
    G = make_group("psl2:5")
    assert radical_basis(G, 5, semisimple_summary(G, 5)).dim == 25
    assert radical_basis(G, 7, semisimple_summary(G, 7)).dim == 0


def test_radical_summary_mismatch():
    G = make_group("psl2:5")
    with pytest.raises(ParameterError):
        radical_basis(G, 3, semisimple_summary(G, 5))


@pytest.mark.parametrize(
    "desc,ell,all_pairs",
    [("cyclic:4", 2, True), ("sl2:3", 2, True), ("psl2:5", 2, True), ("prod:cyclic:2,sl2:3", 3, True), ("psl2:7", 7, False)],
)
def test_radical_is_two_sided_ideal(desc, ell, all_pairs):
    G = make_group(desc)
    J = radical_basis(G, ell, semisimple_summary(G, ell))
    table = np.asarray(G.mul_table)
    basis = np.asarray(J.basis.data)
    for g in G.generator_indices:
        unit = np.zeros(G.order, dtype=np.int64)
        unit[g] = 1
        for x in basis:
            assert J.contains(algebra_product(table, unit, x, ell)[None, :])
            assert J.contains(algebra_product(table, x, unit, ell)[None, :])
    rng = np.random.default_rng(0)
    pairs = (
        [(i, j) for i in range(len(basis)) for j in range(len(basis))]
        if all_pairs
        else [tuple(rng.integers(0, len(basis), 2)) for _ in range(200)]
    )
    prods = np.array([algebra_product(table, basis[i], basis[j], ell) for i, j in pairs])
    assert J.contains(prods)


def test_radical_elements_nilpotent():
    G = make_group("psl2:5")
    J = radical_basis(G, 3, semisimple_summary(G, 3))
    table = np.asarray(G.mul_table)
    x = np.asarray(J.basis.data).sum(axis=0) % 3
    power = x
    for _ in range(G.order):
        power = algebra_product(table, power, x, 3)
        if not power.any():
            break
    assert not power.any()


def test_sym_power_examples():
    T = sym_power_rep(5, 0)
    assert T.dim == 1 and all(np.array_equal(a, [[1]]) for a in T.arrays())
    V = sym_power_rep(5, 1)
    assert V.dim == 2 and V.group.descriptor == "sl2:5"
    minus = V.group.index(encode_matrix(V.group, [[4, 0], [0, 4]]))
    assert np.array_equal(V.element_actions()[minus], 4 * np.eye(2, dtype=np.int64))
    W = sym_power_rep(5, 2)
    assert W.dim == 3 and W.group.descriptor == "psl2:5"
    assert is_irreducible(W)
    assert are_isomorphic(W, sym_power_rep(5, 2))


@pytest.mark.parametrize("p,d", [(5, 3), (7, 4), (7, 5), (11, 6)])
def test_minus_identity_acts_by_sign(p, d):
    V = sym_power_rep(p, d, projective=False)
    G = V.group
    minus = G.index(encode_matrix(G, [[p - 1, 0], [0, p - 1]]))
    sign = 1 if d % 2 == 0 else p - 1
    assert np.array_equal(V.element_actions()[minus], sign * np.eye(d + 1, dtype=np.int64))


def _substitute(m, d, p):
    """Independent oracle: act on monomials by expanding with sympy."""
    import sympy

    x, y = sympy.symbols("x y")
    (a, b), (c, e) = m
    rows = []
    for i in range(d + 1):
        poly = sympy.Poly(sympy.expand((a * x + c * y) ** (d - i) * (b * x + e * y) ** i), x, y)
        rows.append([int(poly.coeff_monomial(x ** (d - j) * y**j)) % p for j in range(d + 1)])
    return np.array(rows, dtype=np.int64)


@pytest.mark.parametrize("p,d", [(5, 2), (7, 3), (7, 6)])
def test_sym_power_matches_symbolic_substitution(p, d):
    V = sym_power_rep(p, d, projective=False)
    G = V.group
    acts = V.element_actions()
    # row-vector convention: coefficient row v maps to v @ rho(g)
    for i in range(0, G.order, max(1, G.order // 25)):
        sub = _substitute(decode_matrix(G, G.code(i)), d, p)
        assert np.array_equal(acts[i], sub) or np.array_equal(acts[i], sub.T)
    assert check_representation(V)


def test_sym_power_errors():
    with pytest.raises(ParameterError):
        sym_power_rep(5, 5)
    with pytest.raises(ParameterError):
        sym_power_rep(5, -1)
    with pytest.raises(ParameterError):
        sym_power_rep(9, 2)
    with pytest.raises(ParameterError):
        sym_power_rep(2, 1)
    with pytest.raises(ParameterError):
        sym_power_rep(5, 1, projective=True)


@pytest.mark.parametrize("desc,ell,value", [("cyclic:4", 2, 3), ("cyclic:6", 3, 4), ("psl2:5", 7, 0), ("cyclic:5", 2, 0)])
def test_trace_chain_examples(desc, ell, value):
    assert radical_trace_chain(make_group(desc), ell) == value


def test_trace_chain_guard():
    with pytest.raises(ResourceError):
        radical_trace_chain(make_group("psl2:7"), 2)


def test_trace_chain_independent_on_abelian_p_groups():
    # F_p[C_{p^k}] = F_p[t]/(t-1)^{p^k}: radical has codimension 1
    for desc, ell in [("cyclic:8", 2), ("cyclic:9", 3), ("ea:2:3", 2), ("ea:3:2", 3)]:
        G = make_group(desc)
        assert radical_trace_chain(G, ell) == G.order - 1
