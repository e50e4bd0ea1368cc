import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from ellat.errors import BottomError, BudgetExceeded, ParseError
from ellat.metric import (
    INFINITY,
    RATIO,
    Budget,
    SimilarityTransform,
    ball,
    clear_caches,
    default_steps,
    distance,
    inclusion_exclusion_rank,
    parse_transform,
    rank,
    rank_compare,
    rank_via_decomposition,
    relaxed_instance,
    similarity,
)
from ellat.models import Interpretation
from ellat.neighborhood import is_lower_neighbor, lower, upper
from ellat.oracle import brute_rank_distance
from ellat.order import equiv, lcs, meet, reduce, strictly
from ellat.syntax import BOTTOM, TOP, conjoin, exists, name, parse, parse_signature
from strategies import concepts, random_concept

P = parse
small = concepts(names=("A", "B"), roles=("r",), depth=2)


def nest(n, c, role="r"):
    for _ in range(n):
        c = exists(role, c)
    return c


# ---------------------------------------------------------------- rank

@pytest.mark.parametrize("text, expected", [
    ("TOP", 0),
    ("A", 1),
    ("A & B", 2),
    ("Er.A", 2),
    ("Er.(A & B)", 4),
    ("Er.Er.Er.TOP", 3),
    ("Er.Er.(A & B)", 6),
    ("Er.(A1 & A2 & A3)", 8),
    ("Er.A & Es.B", 4),
])
def test_rank_examples(text, expected):
    assert rank(P(text)) == expected
    assert rank_via_decomposition(P(text)) == expected


def test_rank_of_bottom_is_infinite():
    assert rank(BOTTOM) == INFINITY
    with pytest.raises(BottomError):
        rank_via_decomposition(BOTTOM)


@pytest.mark.parametrize("n", range(0, 11))
def test_nested_rank_families(n):
    assert rank(nest(n, TOP)) == n
    assert rank(nest(n, P("A"))) == n + 1
    assert rank(nest(n, P("A & B"))) == 2 * (n + 1)


def test_rank_matches_longest_chain_in_universe(u_ab_r_2):
    u = u_ab_r_2
    for c in u.classes:
        r = rank(c)
        assert r == rank_via_decomposition(c)
    rng = np.random.default_rng(1)
    for i in rng.choice(len(u), size=40, replace=False):
        assert rank(u.classes[i]) == brute_rank_distance(u, u.classes[i], TOP)[0]


def test_distance_matches_shortest_path_in_universe(u_ab_r_2):
    u = u_ab_r_2
    rng = np.random.default_rng(4)
    for i, j in rng.integers(0, len(u), size=(60, 2)):
        c, d = u.classes[i], u.classes[j]
        assert distance(c, d) == brute_rank_distance(u, c, d)[1]


@given(small, small)
def test_rank_axioms(c, d):
    assert rank(TOP) == 0
    if is_lower_neighbor(c, d):
        assert rank(c) == rank(d) + 1
    if strictly(c, d):
        assert rank(c) > rank(d)
    if equiv(c, d):
        assert rank(c) == rank(d)


@given(small, small)
def test_valuation_law(c, d):
    assert rank(c) + rank(d) == rank(meet(c, d)) + rank(lcs([c, d]))


@given(small, small, small)
def test_inclusion_exclusion(c, d, e):
    assert inclusion_exclusion_rank([c, d, e]) == rank(conjoin(c, d, e))


@given(concepts(names=("A", "B"), roles=("r",), depth=1))
def test_existential_rank_bounds(c):
    k = rank(c)
    assert 1 + k <= rank(exists("r", c)) <= 1 + k ** (1 + k)


@given(small)
def test_jump_to_join_of_uppers(c):
    ups = upper(c)
    if ups:
        assert distance(c, lcs(ups)) == len(ups)


def test_budget():
    clear_caches()
    with pytest.raises(BudgetExceeded):
        rank(P("Er.Er.(A1 & A2 & A3 & A4 & A5)"), Budget(steps=50))
    with pytest.raises(BudgetExceeded):
        Budget(steps=10 ** 9, seconds=-1.0).tick()


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("ELLAT_BUDGET", "123")
    assert default_steps() == 123 and Budget().limit == 123
    monkeypatch.setenv("ELLAT_BUDGET", "lots")
    assert default_steps() == 10 ** 6


# ---------------------------------------------------------------- distance

def test_distance_examples():
    assert distance(P("A"), P("A")) == 0
    assert distance(P("A & B"), P("A")) == 1
    assert distance(P("A"), P("B")) == 2
    assert distance(BOTTOM, BOTTOM) == 0
    assert distance(BOTTOM, P("A")) == INFINITY == distance(TOP, BOTTOM)


@given(small, small, small)
def test_metric_axioms(c, d, e):
    dcd = distance(c, d)
    assert dcd >= 0
    assert (dcd == 0) == equiv(c, d)
    assert dcd == distance(d, c)
    assert distance(c, e) <= dcd + distance(d, e)


# ---------------------------------------------------------------- similarity

def test_similarity_examples():
    assert similarity(P("A"), P("A")) == 1
    assert similarity(P("A"), TOP) == Fraction(1, 2)
    assert similarity(P("A"), P("B")) == Fraction(1, 3)
    assert similarity(P("A"), P("B"), parse_transform("expo:1/2")) == Fraction(1, 4)
    assert similarity(BOTTOM, P("A")) == 0
    assert similarity(BOTTOM, BOTTOM) == 1


def test_transforms():
    assert str(RATIO) == "ratio:1"
    assert parse_transform("expo:0.5") == SimilarityTransform("expo", Fraction(1, 2))
    assert parse_transform("ratio") == RATIO
    f = parse_transform("ratio:1/2")
    assert f(0) == 0 and math.isclose(f(1), math.sqrt(0.5))
    for bad in ["expo:2", "ratio:0", "cosine:1", "ratio:x"]:
        with pytest.raises(ParseError):
            parse_transform(bad)
    for g in [RATIO, parse_transform("expo:0.5"), f]:
        values = [g(x) for x in range(8)]
        assert values[0] == 0
        assert all(a < b < 1 for a, b in zip(values, values[1:]))


@given(small, small, small)
def test_similarity_properties(c, d, e):
    s = similarity
    assert s(c, d) == s(d, c)
    assert 1 + s(c, d) >= s(c, e) + s(e, d)
    if equiv(c, d):
        assert s(c, e) == s(d, e)
    assert (s(c, d) == 1) == equiv(c, d)
    x, y, z = meet(c, meet(d, e)), meet(d, e), e  # x below y below z
    assert s(x, y) >= s(x, z)
    assert s(x, z) <= s(y, z)


@pytest.mark.parametrize("n", range(0, 11))
def test_similarity_is_not_structurally_dependent(n):
    bs = conjoin(*(name(f"B{i}") for i in range(n + 1)))
    assert similarity(name("A") & bs, bs) == 1 - RATIO(1)


# ---------------------------------------------------------------- rank decisions

@pytest.mark.parametrize("text, n, mode, expected", [
    ("Er.Er.TOP", 2, "eq", True),
    ("Er.Er.TOP", 3, "eq", False),
    ("TOP", 0, "le", True),
    ("A", 0, "le", False),
    ("Er.(A1 & A2 & A3)", 5, "ge", True),
    ("Er.(A1 & A2 & A3)", 9, "ge", False),
    ("Er.(A1 & A2 & A3)", 8, "le", True),
    ("Er.(A1 & A2 & A3)", 7, "le", False),
    ("A", 0, "ge", True),
])
def test_rank_compare_examples(text, n, mode, expected):
    assert rank_compare(P(text), n, mode) is expected


def test_rank_compare_agrees_with_rank():
    rng = random.Random(9)
    for _ in range(200):
        c = random_concept(rng, ("A", "B"), ("r",), 2, 2)
        k = rank(c)
        n = rng.randint(0, k + 2)
        assert rank_compare(c, n, "eq") == (k == n)
        assert rank_compare(c, n, "le") == (k <= n)
        assert rank_compare(c, n, "ge") == (k >= n)
    with pytest.raises(ValueError):
        rank_compare(TOP, 1, "lt")
    with pytest.raises(BottomError):
        rank_compare(BOTTOM, 1)


# ---------------------------------------------------------------- balls

def test_ball_examples():
    sig = parse_signature("names=A,B;roles=")
    assert ball(P("A"), 0, sig) == [P("A")]
    assert set(ball(P("A"), 1, sig)) == {P("A"), TOP, P("A & B")}
    assert set(ball(P("A"), 2, sig)) == {P("A"), TOP, P("A & B"), P("B")}
    with pytest.raises(BottomError):
        ball(BOTTOM, 1, sig)


@given(concepts(names=("A", "B"), roles=("r",), depth=1))
def test_ball_members_are_close(c):
    sig = parse_signature("names=A,B;roles=r")
    b = ball(c, 2, sig)
    assert reduce(c) in b
    assert all(distance(c, m) <= 2 for m in b)
    assert set(upper(c)) | set(lower(c, sig)) <= set(b)


def test_relaxed_instance():
    i = Interpretation(["x"], {"A": ["x"]}, {})
    sig = parse_signature("names=A,B;roles=")
    ab = P("A & B")
    assert relaxed_instance("x", ab, 1, i, sig)
    assert not relaxed_instance("x", ab, 0, i, sig)
    assert relaxed_instance("x", P("A"), 0, i, sig)
    with pytest.raises(ValueError):
        relaxed_instance("y", ab, 1, i, sig)
