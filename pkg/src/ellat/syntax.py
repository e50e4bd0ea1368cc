"""Concept descriptions: representation, parsing, printing and size measures.

A concept is either the unsatisfiable concept ``BOTTOM`` or a flat conjunction
given by a set of concept names and a set of ``(role, filler)`` existential
restrictions.  Top is the empty conjunction.  Instances are hash-consed, so
two structurally equal concepts are the same Python object and identity
comparison is structural comparison.  That keeps memo tables keyed by
concepts cheap.
"""
from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import ParseError, UnknownNameError

_table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()
_lock = threading.Lock()


class Concept:
    __slots__ = ("names", "exists", "is_bottom", "_text", "_succ", "_measure", "__weakref__")

    names: frozenset
    exists: frozenset

    def __new__(cls, names: Iterable[str] = (), exists: Iterable = ()):
        names = frozenset(names)
        exists = frozenset(exists)
        for _, filler in exists:
            if filler.is_bottom:
                return BOTTOM
        key = (names, exists)
        with _lock:
            obj = _table.get(key)
            if obj is None:
                obj = object.__new__(cls)
                obj.names = names
                obj.exists = exists
                obj.is_bottom = False
                obj._text = None
                obj._succ = None
                obj._measure = None
                _table[key] = obj
        return obj

    @classmethod
    def _bottom(cls) -> "Concept":
        obj = object.__new__(cls)
        obj.names = frozenset()
        obj.exists = frozenset()
        obj.is_bottom = True
        obj._text = "BOT"
        obj._succ = {}
        obj._measure = None
        return obj

    def __reduce__(self):
        if self.is_bottom:
            return (_get_bottom, ())
        return (Concept, (self.names, self.exists))

    # object's identity-based __eq__/__hash__ are structural thanks to interning

    def __lt__(self, other: "Concept") -> bool:
        return sort_key(self) < sort_key(other)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"Concept({to_text(self)!r})"

    @property
    def is_top(self) -> bool:
        return not self.is_bottom and not self.names and not self.exists

    def succ(self, role: str) -> tuple:
        """Fillers of the top-level existentials for ``role``, canonical order."""
        if self._succ is None:
            grouped: dict = {}
            for r, f in self.exists:
                grouped.setdefault(r, []).append(f)
            self._succ = {r: tuple(sorted(fs, key=sort_key)) for r, fs in grouped.items()}
        return self._succ.get(role, ())

    def roles(self) -> tuple:
        return tuple(sorted({r for r, _ in self.exists}))

    def conj(self) -> tuple:
        """Top-level atoms, each wrapped as a single-conjunct Concept."""
        if self.is_bottom:
            return (self,)
        out = [Concept((a,)) for a in sorted(self.names)]
        out.extend(Concept((), ((r, f),)) for r, f in sorted_exists(self))
        return tuple(out)

    def __and__(self, other: "Concept") -> "Concept":
        return conjoin(self, other)


def _get_bottom() -> Concept:
    return BOTTOM


BOTTOM = Concept._bottom()
TOP = Concept()


def name(a: str) -> Concept:
    return Concept((a,))


def exists(role: str, filler: Concept) -> Concept:
    return Concept((), ((role, filler),))


def conjoin(*cs: Concept) -> Concept:
    names: set = set()
    ex: set = set()
    for c in cs:
        if c.is_bottom:
            return BOTTOM
        names |= c.names
        ex |= c.exists
    return Concept(names, ex)


def conjoin_all(cs: Iterable[Concept]) -> Concept:
    return conjoin(*cs)


def sorted_exists(c: Concept) -> list:
    return sorted(c.exists, key=lambda p: (p[0], _filler_text(p[1])))


def sort_key(c: Concept) -> str:
    return to_text(c)


# ---------------------------------------------------------------- printing

def _filler_text(f: Concept) -> str:
    t = to_text(f)
    if len(f.names) + len(f.exists) > 1:
        return "(" + t + ")"
    return t


def to_text(c: Concept) -> str:
    if c._text is not None:
        return c._text
    parts = sorted(c.names)
    parts.extend(f"E{r}.{_filler_text(f)}" for r, f in sorted_exists(c))
    text = " & ".join(parts) if parts else "TOP"
    c._text = text
    return text


# ---------------------------------------------------------------- signature

@dataclass(frozen=True)
class Signature:
    concept_names: tuple = ()
    role_names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "concept_names", tuple(sorted(set(self.concept_names))))
        object.__setattr__(self, "role_names", tuple(sorted(set(self.role_names))))
        if set(self.concept_names) & set(self.role_names):
            raise ValueError("concept and role names must be disjoint")

    def union(self, other: "Signature") -> "Signature":
        return Signature(self.concept_names + other.concept_names,
                         self.role_names + other.role_names)

    def covers(self, other: "Signature") -> bool:
        return (set(other.concept_names) <= set(self.concept_names)
                and set(other.role_names) <= set(self.role_names))

    def __str__(self) -> str:
        return f"names={','.join(self.concept_names)};roles={','.join(self.role_names)}"


def parse_signature(text: str) -> Signature:
    """Read ``names=A,B;roles=r,s``.  Either part may be omitted."""
    names: list = []
    roles: list = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise ParseError(f"bad signature component {part!r}")
        items = [v.strip() for v in value.split(",") if v.strip()]
        key = key.strip()
        if key == "names":
            bad = [v for v in items if not _is_name(v)]
            names.extend(items)
        elif key == "roles":
            bad = [v for v in items if not _is_role(v)]
            roles.extend(items)
        else:
            raise ParseError(f"unknown signature key {key!r}")
        if bad:
            raise ParseError(f"invalid identifier {bad[0]!r} in signature")
    return Signature(tuple(names), tuple(roles))


def signature_of(*cs: Concept) -> Signature:
    names: set = set()
    roles: set = set()
    seen: set = set()
    stack = list(cs)
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        names |= c.names
        for r, f in c.exists:
            roles.add(r)
            stack.append(f)
    return Signature(tuple(names), tuple(roles))


# ---------------------------------------------------------------- parsing

_KEYWORDS = ("TOP", "BOT", "E")


def _is_name(s: str) -> bool:
    return (bool(s) and s[0].isascii() and s[0].isupper()
            and all(ch.isascii() and (ch.isalnum() or ch == "_") for ch in s)
            and s not in _KEYWORDS)


def _is_role(s: str) -> bool:
    return (bool(s) and s[0].isascii() and s[0].islower()
            and all(ch.isascii() and (ch.isalnum() or ch == "_") for ch in s))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def ident(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isascii()
                                             and (self.text[self.pos].isalnum()
                                                  or self.text[self.pos] == "_")):
            self.pos += 1
        return self.text[start:self.pos]

    def fail(self, msg: str, expected=()):
        raise ParseError(msg, self.pos, expected)

    def concept(self) -> Concept:
        parts = [self.atom()]
        while self.peek() == "&":
            self.pos += 1
            parts.append(self.atom())
        return conjoin(*parts)

    def _existential_ahead(self) -> bool:
        # "E" then a role then "." ; otherwise the identifier is an ordinary name
        save = self.pos
        try:
            self.skip()
            if self.text[self.pos:self.pos + 1] != "E":
                return False
            self.pos += 1
            role = self.ident()
            return _is_role(role) and self.peek() == "."
        finally:
            self.pos = save

    def atom(self) -> Concept:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            c = self.concept()
            if self.peek() != ")":
                self.fail("unbalanced parenthesis", ("')'",))
            self.pos += 1
            return c
        if ch == "E" and self._existential_ahead():
            self.skip()
            self.pos += 1
            role = self.ident()
            self.peek()
            self.pos += 1  # the dot
            return exists(role, self.atom())
        start = self.pos
        word = self.ident()
        if word == "TOP":
            return TOP
        if word == "BOT":
            return BOTTOM
        if _is_name(word):
            return name(word)
        self.pos = start
        if word == "E":
            self.fail("malformed existential restriction", ("ROLE '.'",))
        self.fail("unexpected token" if ch else "unexpected end of input",
                  ("TOP", "BOT", "NAME", "E ROLE '.'", "'('"))


def parse(text: str, sig=None):
    """Parse ``text`` in the concept grammar.

    With ``sig`` a Signature, names outside it raise UnknownNameError.  With
    ``sig="infer"`` the result is a pair ``(concept, inferred signature)``.
    """
    p = _Parser(text)
    c = p.concept()
    if p.peek():
        p.fail("trailing input", ("'&'", "end of input"))
    if sig == "infer":
        return c, signature_of(c)
    if isinstance(sig, Signature):
        used = signature_of(c)
        extra = sorted(set(used.concept_names) - set(sig.concept_names))
        extra += sorted(set(used.role_names) - set(sig.role_names))
        if extra:
            raise UnknownNameError(f"names not in signature: {', '.join(extra)}")
    return c


# ---------------------------------------------------------------- measures

class Measures(NamedTuple):
    size: int
    role_depth: int


def measure(c: Concept) -> Measures:
    if c.is_bottom:
        return Measures(1, 0)
    m = c._measure
    if m is None:
        size = len(c.names)
        depth = 0
        for _, f in c.exists:
            fm = measure(f)
            size += 1 + fm.size
            depth = max(depth, 1 + fm.role_depth)
        n = len(c.names) + len(c.exists)
        # n conjuncts need n - 1 binary conjunction nodes; top is one node
        size = size + n - 1 if n else 1
        m = Measures(size, depth)
        c._measure = m
    return m


def size(c: Concept) -> int:
    return measure(c).size


def role_depth(c: Concept) -> int:
    return measure(c).role_depth


def subconcepts(c: Concept) -> set:
    """Subconcepts of the right-nested binary rendering of ``c``."""
    out: set = set()
    stack = [c]
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out.add(x)
        if x.is_bottom:
            continue
        atoms = x.conj()
        if len(atoms) > 1:
            # x = a1 & (a2 & (... & an)): every atom and every suffix is a subconcept
            for i in range(len(atoms)):
                stack.append(atoms[i])
                stack.append(conjoin(*atoms[i:]))
        for _, f in x.exists:
            stack.append(f)
    return out


def restrict(c: Concept, n: int) -> Concept:
    """Keep names everywhere, drop existentials nested deeper than ``n``."""
    if c.is_bottom:
        return c
    if n <= 0:
        return Concept(c.names)
    return Concept(c.names, ((r, restrict(f, n - 1)) for r, f in c.exists))
