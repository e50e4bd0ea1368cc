import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellat.errors import BudgetExceeded
from ellat.experiments import (
    Poset,
    antichain_poset,
    build_tower,
    count_ideals,
    doubling_bound,
    embed,
    height,
    ideal_poset,
    lift_antichain,
    nested,
    poset_stats,
    report_csv,
    report_text,
    table41,
    table41_row,
    width,
    width_brute,
)
from ellat.metric import Budget
from ellat.order import equiv, subsumes
from ellat.syntax import TOP, parse

P = parse


def chain(n):
    return Poset(range(n), np.triu(np.ones((n, n), dtype=bool)))


# ---------------------------------------------------------------- posets

def test_poset_validation():
    with pytest.raises(ValueError):
        Poset("ab", [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        Poset("ab", [[0, 0], [0, 1]])
    with pytest.raises(ValueError):
        Poset("abc", [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    with pytest.raises(ValueError):
        Poset("ab", np.eye(3))


def test_small_poset_stats():
    assert poset_stats(chain(4)) == (4, 1, 5)
    assert poset_stats(antichain_poset("abc")) == (1, 3, 8)
    assert poset_stats(Poset((), np.zeros((0, 0)))) == (0, 0, 1)


def test_tower_sizes():
    t = build_tower(3, 2)
    assert [len(p) for p in t.levels] == [3, 8, 20]


@pytest.mark.parametrize("n", range(0, 5))
def test_single_generator_towers_are_chains(n):
    top = build_tower(1, n).levels[n]
    assert height(top) == n + 1 == len(top)
    assert width(top) == 1


def test_powerset_stats():
    p = build_tower(3, 1).levels[1]
    assert (height(p), width(p)) == (4, 3)
    assert width(build_tower(3, 2).levels[2]) == 4


@pytest.mark.parametrize("k", range(1, 7))
def test_sperner_width(k):
    assert width(build_tower(k, 1).levels[1]) == math.comb(k, k // 2)


@pytest.mark.parametrize("k, n", [(1, 4), (2, 3), (3, 2), (4, 2)])
def test_tower_bounds(k, n):
    t = build_tower(k, n)
    for i, p in enumerate(t.levels):
        h, w = height(p), width(p)
        assert len(p) <= h * w
        if i + 1 < len(t.levels):
            # the next level is the ideal lattice, so its size is the ideal count
            ideals = len(t.levels[i + 1])
            assert 2 ** w + len(p) - w <= ideals
            assert height(t.levels[i + 1]) >= w


def test_build_tower_budget():
    with pytest.raises(BudgetExceeded):
        build_tower(4, 3, Budget(steps=1000))
    with pytest.raises(ValueError):
        build_tower(0, 1)


@st.composite
def small_posets(draw):
    n = draw(st.integers(0, 8))
    # random strict upper-triangular relation, closed transitively
    m = np.eye(n, dtype=bool)
    for i, j in itertools.combinations(range(n), 2):
        m[i, j] = draw(st.booleans())
    for k in range(n):
        m |= m[:, [k]] & m[[k], :]
    return Poset(range(n), m)


def brute_ideal_count(p):
    n = len(p)
    return sum(all(not p.leq[i, j] or j in s or i not in s for i in range(n) for j in range(n))
               for k in range(n + 1) for s in map(set, itertools.combinations(range(n), k)))


@given(small_posets())
def test_width_and_ideals_match_brute_force(p):
    assert width(p) == width_brute(p)
    assert count_ideals(p) == brute_ideal_count(p) == len(ideal_poset(p))


def test_lifted_antichains():
    p1 = build_tower(4, 2).levels[1]
    p2 = build_tower(4, 2).levels[2]
    pairs = [p1.index[frozenset(s)] for s in [("A1", "A2"), ("A3", "A4"), ("A1", "A3"), ("A2", "A4")]]
    assert p1.is_antichain(pairs)
    lifted = lift_antichain(p1, p2, [p1.elements[i] for i in pairs])
    assert len(set(lifted)) == math.comb(4, 2) == doubling_bound(4)
    assert p2.is_antichain([p2.index[x] for x in lifted])
    with pytest.raises(ValueError):
        lift_antichain(p1, p2, [p1.elements[pairs[0]]])


# ---------------------------------------------------------------- embedding

@pytest.mark.parametrize("k, n", [(1, 3), (2, 3), (3, 2)])
def test_embedding_reverses_the_order(k, n):
    t = build_tower(k, n)
    for level in range(1, n + 1):
        p = t.levels[level]
        cs = [embed(t, level, e) for e in p.elements]
        for (i, c), (j, d) in itertools.product(enumerate(cs), repeat=2):
            assert bool(p.leq[i, j]) == subsumes(d, c)


def test_embed_examples():
    t = build_tower(3, 2)
    assert embed(t, 1, frozenset({"A1", "A2"})) is P("A1 & A2")
    assert embed(t, 2, frozenset()) is TOP
    full = frozenset(t.levels[1].elements)
    assert equiv(embed(t, 2, full), P("Er.(A1 & A2 & A3)"))
    assert embed(t, 2, full) is nested(3, 1)
    with pytest.raises(ValueError):
        embed(t, 0, "A1")
    with pytest.raises(ValueError):
        embed(t, 1, frozenset({"A9"}))


# ---------------------------------------------------------------- rank table

@pytest.mark.parametrize("k, n, expected", [(3, 1, 8), (4, 1, 16), (3, 2, 20), (1, 3, 4), (2, 1, 4)])
def test_table41_rows(k, n, expected):
    r, bound = table41_row(k, n)
    assert r == expected
    assert bound is not None and bound <= r


def test_table41_budget_is_reported_in_band():
    r, _ = table41_row(5, 3, Budget(steps=100))
    assert r == "budget"


def test_report_flags_the_small_antichain_case():
    rows = table41([(3, 1), (3, 2)])
    text = report_text(rows)
    assert "k=3 n=2" in text
    lines = report_csv(rows).splitlines()
    assert lines[0] == "k,n,rank,width_lower_bound,seconds"
    assert lines[1].startswith("3,1,8,3,") and lines[2].startswith("3,2,20,4,")
