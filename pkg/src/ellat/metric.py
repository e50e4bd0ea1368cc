"""Rank, distance and similarity on the lattice of concepts.

Ranks are ints, with ``math.inf`` standing in for the rank of the bottom
concept (``INFINITY``).  Arithmetic with it saturates the usual float way.

Long computations take a :class:`Budget`.  Running out raises
:class:`~ellat.errors.BudgetExceeded` instead of returning a number.
"""
from __future__ import annotations

import itertools
import math
import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import BottomError, BudgetExceeded, ParseError
from .models import Interpretation, extension
from .neighborhood import _upper, join_of_uppers, lower
from .order import lcs, meet, reduce
from .syntax import Concept, Signature, signature_of, sort_key

INFINITY = math.inf
DEFAULT_STEPS = 10 ** 6


def default_steps() -> int:
    raw = os.environ.get("ELLAT_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_STEPS


class Budget:
    """Step counter with an optional wall-clock limit."""

    def __init__(self, steps: int | None = None, seconds: float | None = None):
        self.limit = default_steps() if steps is None else steps
        self.seconds = seconds
        self.used = 0
        self._start = time.monotonic()

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(f"step budget of {self.limit} exhausted")
        if self.seconds is not None and time.monotonic() - self._start > self.seconds:
            raise BudgetExceeded(f"time budget of {self.seconds}s exhausted")


# ---------------------------------------------------------------- rank

_rank_cache: dict = {}
_rank_lock = threading.Lock()


def rank(c: Concept, budget: Budget | None = None):
    """Length of every maximal chain from ``c`` up to top.

    Walks upwards by jumping from D to the lcs of its upper neighbors, which is
    exactly as many levels above D as D has upper neighbors.
    """
    if c.is_bottom:
        return INFINITY
    budget = budget or Budget()
    d = reduce(c)
    path = []
    steps = 0
    while not d.is_top:
        known = _rank_cache.get(d)
        if known is not None:
            steps += known
            break
        # a reduced concept has exactly one upper neighbor per top-level atom
        jump = len(d.names) + len(d.exists)
        budget.tick(jump)
        path.append((d, steps))
        steps += jump
        d = join_of_uppers(d)
    with _rank_lock:
        for x, before in path:
            _rank_cache[x] = steps - before
    return steps


def rank_via_decomposition(c: Concept, budget: Budget | None = None):
    """Rank from the name count plus one same-role existential block per role.

    A block is split with the valuation law |X & Y| = |X| + |Y| - |X v Y|
    and a single existential uses |Er.C| = 1 + |conjunction of Er.U over the
    upper neighbors U of C|.
    """
    if c.is_bottom:
        raise BottomError("rank decomposition needs a satisfiable concept")
    budget = budget or Budget()
    c = reduce(c)
    return len(c.names) + sum(_block(frozenset(c.succ(r)), budget) for r in c.roles())


def _minimal(fs: Iterable[Concept]) -> frozenset:
    from .order import subsumes
    fs = set(fs)
    return frozenset(f for f in fs if not any(g is not f and subsumes(g, f) for g in fs))


_block_cache: dict = {}


def _block(fs: frozenset, budget: Budget) -> int:
    # rank of the conjunction of Er.F over the reduced, pairwise incomparable fillers fs
    if not fs:
        return 0
    hit = _block_cache.get(fs)
    if hit is not None:
        return hit
    budget.tick()
    if len(fs) == 1:
        (f,) = fs
        out = 1 + _block(_minimal(_upper(f)), budget)
    else:
        first = min(fs, key=sort_key)
        rest = fs - {first}
        joined = _minimal(lcs((first, g)) for g in rest)
        out = (_block(frozenset((first,)), budget) + _block(rest, budget)
               - _block(joined, budget))
    _block_cache[fs] = out
    return out


def inclusion_exclusion_rank(cs: Iterable[Concept], budget: Budget | None = None):
    """Rank of a conjunction via alternating sums of ranks of lcs-es of subsets."""
    items = [reduce(c) for c in cs]
    total = 0
    for k in range(1, len(items) + 1):
        sign = 1 if k % 2 else -1
        for sub in itertools.combinations(items, k):
            total += sign * rank(lcs(sub), budget)
    return total


def clear_caches() -> None:
    with _rank_lock:
        _rank_cache.clear()
        _block_cache.clear()


# ---------------------------------------------------------------- distance

def distance(c: Concept, d: Concept, budget: Budget | None = None):
    """|c & d| - |c v d|, the length of a shortest path in the neighbor graph."""
    if c.is_bottom or d.is_bottom:
        return 0 if (c.is_bottom and d.is_bottom) else INFINITY
    budget = budget or Budget()
    return rank(meet(c, d), budget) - rank(lcs((c, d)), budget)


@dataclass(frozen=True)
class SimilarityTransform:
    """A monotone sub-additive map f with f(0) = 0 and values below 1.

    ``ratio`` with parameter y is x -> (x / (1 + x)) ** y and ``expo`` with
    parameter y in (0, 1) is x -> 1 - y ** x.
    """
    kind: str = "ratio"
    param: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in ("ratio", "expo"):
            raise ValueError(f"unknown transform {self.kind!r}")
        object.__setattr__(self, "param", Fraction(self.param))
        if self.kind == "expo" and not 0 < self.param < 1:
            raise ValueError("expo needs a base strictly between 0 and 1")
        if self.kind == "ratio" and self.param <= 0:
            raise ValueError("ratio needs a positive exponent")

    def __call__(self, x):
        if x == INFINITY:
            return Fraction(1)
        if self.kind == "ratio":
            base = Fraction(x, 1 + x)
            if self.param.denominator == 1:
                return base ** int(self.param)
            return float(base) ** float(self.param)
        return 1 - self.param ** int(x)

    def __str__(self) -> str:
        return f"{self.kind}:{self.param}"


RATIO = SimilarityTransform()


def parse_transform(text: str) -> SimilarityTransform:
    kind, _, value = text.partition(":")
    try:
        return SimilarityTransform(kind.strip(), Fraction(value.strip() or "1"))
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"bad transform {text!r}: {e}") from None


def similarity(c: Concept, d: Concept, f: SimilarityTransform = RATIO, budget: Budget | None = None):
    """1 - f(distance); exact Fractions unless the transform is irrational."""
    return 1 - f(distance(c, d, budget))


# ---------------------------------------------------------------- rank decisions

def _rank_capped(c: Concept, cap: int):
    # exact rank when it is at most cap, else None
    d = reduce(c)
    steps = 0
    while not d.is_top:
        if steps > cap:
            return None
        known = _rank_cache.get(d)
        if known is not None:
            steps += known
            break
        jump = len(d.names) + len(d.exists)
        if steps + jump <= cap:
            steps += jump
            d = join_of_uppers(d)
        else:
            steps += 1
            d = _upper(d)[0]
    return steps if steps <= cap else None


def rank_compare(c: Concept, n: int, mode: str = "eq") -> bool:
    """Decide rank(c) == n, <= n or >= n without always computing it."""
    if c.is_bottom:
        raise BottomError("rank comparison needs a satisfiable concept")
    if mode == "le":
        return _rank_capped(c, n) is not None
    if mode == "ge":
        return n <= 0 or _rank_capped(c, n - 1) is None
    if mode == "eq":
        return _rank_capped(c, n) == n
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- balls

def ball(c: Concept, n: int, sig: Signature | None = None, budget: Budget | None = None) -> list:
    """All classes within distance ``n`` of ``c``, by search in the neighbor graph."""
    if c.is_bottom:
        raise BottomError("balls around the bottom concept are not supported")
    budget = budget or Budget()
    c = reduce(c)
    if sig is None:
        sig = signature_of(c)
    seen = {c: 0}
    queue = deque([c])
    while queue:
        x = queue.popleft()
        k = seen[x]
        if k == n:
            continue
        for y in itertools.chain(_upper(x), lower(x, sig)):
            if y not in seen:
                budget.tick()
                seen[y] = k + 1
                queue.append(y)
    return sorted(seen, key=sort_key)


def relaxed_instance(elem, c: Concept, n: int, i: Interpretation,
                     sig: Signature | None = None, budget: Budget | None = None) -> bool:
    """True iff ``elem`` is in the extension of some concept within distance ``n`` of ``c``.

    Names of ``sig`` that ``i`` does not interpret are read as empty.
    """
    if elem not in set(i.domain):
        raise ValueError(f"{elem!r} is not a domain element")
    return any(elem in extension(d, i, strict=False) for d in ball(c, n, sig, budget))
