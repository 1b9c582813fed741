from __future__ import annotations

from math import ceil

import numpy as np
import pytest

from grouptensor import config
from grouptensor.conjugacy import conjugacy_classes, ell_regular_count, tori_coprime, torus_class_counts
from grouptensor.errors import ParameterError, ResourceError
from grouptensor.groups import make_group


def _naive_classes(G):
    """Orbits by conjugating every element by every element, via the table."""
    t = np.asarray(G.mul_table)
    inv = G.inv_table
    left = set(range(G.order))
    out = []
    while left:
        x = min(left)
        orbit = {int(t[t[g, x], inv[g]]) for g in range(G.order)}
        out.append(orbit)
        left -= orbit
    return out


def test_psl2_5_classes():
    data = conjugacy_classes(make_group("psl2:5"))
    assert len(data) == 5
    assert sorted(c.size for c in data.classes) == sorted([1, 15, 20, 12, 12])


def test_cyclic_classes_singletons():
    data = conjugacy_classes(make_group("cyclic:6"))
    assert len(data) == 6 and all(c.size == 1 for c in data.classes)


def test_psl2_7_six_classes():
    assert len(conjugacy_classes(make_group("psl2:7"))) == 6


@pytest.mark.parametrize("desc", ["psl2:5", "sl2:5", "psl2:7", "prod:cyclic:2,sl2:3", "ea:2:3"])
def test_classes_match_naive(desc):
    G = make_group(desc)
    data = conjugacy_classes(G)
    ours = sorted(sorted(np.flatnonzero(data.class_of == k).tolist()) for k in range(len(data)))
    assert ours == sorted(sorted(o) for o in _naive_classes(G))
    assert sum(c.size for c in data.classes) == G.order


@pytest.mark.parametrize("desc", ["psl2:5", "psl2:7", "sl2:5"])
def test_class_sizes_divide_order_and_centralizers(desc):
    G = make_group(desc)
    t = np.asarray(G.mul_table)
    for c in conjugacy_classes(G).classes:
        assert G.order % c.size == 0
        centralizer = int(np.sum(t[:, c.rep] == t[c.rep, :]))
        assert centralizer * c.size == G.order


@pytest.mark.parametrize("desc,ell,count", [("psl2:5", 2, 4), ("cyclic:6", 3, 2), ("psl2:5", 7, 5)])
def test_ell_regular_examples(desc, ell, count):
    assert ell_regular_count(make_group(desc), ell) == count


def test_ell_must_be_prime():
    with pytest.raises(ParameterError):
        ell_regular_count(make_group("psl2:5"), 4)


def test_conjugacy_cap():
    config.override(conjugacy_max_order=50)
    with pytest.raises(ResourceError):
        conjugacy_classes(make_group("psl2:13"))


def test_torus_p5():
    t = torus_class_counts(make_group("psl2:5"))
    assert (t.split_order, t.nonsplit_order) == (2, 3)
    assert t.split_count >= 1 and t.nonsplit_count >= 1


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23])
def test_torus_bounds(p):
    t = torus_class_counts(make_group(f"psl2:{p}"))
    assert t.split_order == (p - 1) // 2 and t.nonsplit_order == (p + 1) // 2
    assert t.split_count >= ceil((p - 3) / 4)
    assert t.nonsplit_count >= ceil((p - 5) / 4)
    assert t.split_count >= 1 and t.nonsplit_count >= 1


def test_torus_p13_exact():
    t = torus_class_counts(make_group("psl2:13"))
    assert t.split_count >= 3
    # a cyclic group of order n meets ceil((n+1)/2) classes: x and x^-1 fuse
    assert t.split_count == 4 and t.nonsplit_count == 4


def test_torus_needs_psl2():
    with pytest.raises(ParameterError):
        torus_class_counts(make_group("sl2:5"))


def test_tori_coprime():
    assert tori_coprime(5) and tori_coprime(13)
