"""The five string operations and the operation multisets of a loop sequence.

Every operation is computed on the loop rotated so that location ``x`` comes
first.  With ``l = e B e' C`` (``e'`` the edge at ``y``) the formulas read

* positive splitting  ``([e C], [B e])``,  negative splitting ``([C], [B])``
* negative twisting   ``[B^-1 C]``,        positive twisting  ``[e B^-1 e^-1 C]``

and with ``l = e L``, ``l' = f L'`` (``f`` the edge at ``y`` in ``l'``)

* same edge:    positive merger ``[e L' e L]``,      negative ``[L L'^-1]``
* inverse edge: positive merger ``[e L'^-1 e L]``,   negative ``[L L']``

These agree with the ``a e b ...`` forms for ``x < y`` and are invariant
under rotating the representatives.  Signs are ``+1``/``-1``; the sign of an
operation is fixed by the edge pattern at ``(x, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, NamedTuple, Optional

from .loops import (
    NULL_SEQUENCE,
    EdgeKey,
    Loop,
    LoopSequence,
    edge_inverse,
    invert_word,
    plaquettes_containing,
    _make_sequence,
    step_vertex,
)

TWIST, SPLIT, MERGE, DEFORM, INACTION = "twist", "split", "merge", "deform", "inaction"
FAMILIES = (TWIST, MERGE, SPLIT, DEFORM)


class OperationError(ValueError):
    """An operation was requested at locations that do not admit it."""


def _pattern(kx: EdgeKey, ky: EdgeKey) -> int:
    """+1 if the two locations carry the same edge, -1 if inverse edges, else 0."""
    if kx == ky:
        return 1
    if ky == edge_inverse(kx):
        return -1
    return 0


def _check_loc(l: Loop, x: int) -> None:
    if l.is_null:
        raise OperationError("operation on the null loop")
    if not 0 <= x < len(l):
        raise OperationError(f"location {x} out of range for loop of length {len(l)}")


def _split_parts(l: Loop, x: int, y: int):
    n = len(l)
    start, w = l.rotated(x)
    r = (y - x) % n
    return start, w[0], w[1:r], w[r + 1:]


# -- single-loop operations ---------------------------------------------------

def _splitting(l: Loop, x: int, y: int, pattern: int) -> tuple[Loop, Loop]:
    start, e, b, c = _split_parts(l, x, y)
    head = step_vertex(start, e)
    if pattern > 0:
        return Loop._core(start, (e,) + c), Loop._core(head, b + (e,))
    return Loop._core(start, c), Loop._core(head, b)


def _twisting(l: Loop, x: int, y: int, pattern: int) -> Loop:
    start, e, b, c = _split_parts(l, x, y)
    if pattern > 0:
        return Loop._core(start, invert_word(b) + c)
    return Loop._core(start, (e,) + invert_word(b) + (-e,) + c)


def _merger(l: Loop, lp: Loop, x: int, y: int, pattern: int, sign: int) -> Loop:
    start, w = l.rotated(x)
    _, wp = lp.rotated(y)
    e, rest, rest_p = w[0], w[1:], wp[1:]
    if sign > 0:
        mid = rest_p if pattern > 0 else invert_word(rest_p)
        return Loop._core(start, (e,) + mid + (e,) + rest)
    tail = invert_word(rest_p) if pattern > 0 else rest_p
    return Loop._core(step_vertex(start, e), rest + tail)


def splitting(l: Loop, x: int, y: int, sign: int) -> tuple[Loop, Loop]:
    """Positive (same edge at x, y) or negative (e at x, e^-1 at y) splitting."""
    _check_loc(l, x)
    _check_loc(l, y)
    if x == y:
        raise OperationError("splitting needs two distinct locations")
    pat = _pattern(l.edge_keys[x], l.edge_keys[y])
    if pat == 0:
        raise OperationError(f"locations {x}, {y} carry unrelated edges")
    if pat != sign:
        raise OperationError(f"locations {x}, {y} admit only a {'positive' if pat > 0 else 'negative'} splitting")
    return _splitting(l, x, y, pat)


def twisting(l: Loop, x: int, y: int, sign: int) -> Loop:
    """Negative twisting for the same edge at x, y; positive for an inverse pair."""
    _check_loc(l, x)
    _check_loc(l, y)
    if x == y:
        raise OperationError("twisting needs two distinct locations")
    pat = _pattern(l.edge_keys[x], l.edge_keys[y])
    if pat == 0:
        raise OperationError(f"locations {x}, {y} carry unrelated edges")
    if -pat != sign:
        raise OperationError(f"locations {x}, {y} admit only a {'negative' if pat > 0 else 'positive'} twisting")
    return _twisting(l, x, y, pat)


def merger(l: Loop, lp: Loop, x: int, y: int, sign: int) -> Loop:
    _check_loc(l, x)
    _check_loc(lp, y)
    if sign not in (1, -1):
        raise OperationError("sign must be +1 or -1")
    pat = _pattern(l.edge_keys[x], lp.edge_keys[y])
    if pat == 0:
        raise OperationError(f"location {x} and {y} carry unrelated edges")
    return _merger(l, lp, x, y, pat, sign)


def plaquette_location(p: Loop, key: EdgeKey) -> int:
    inv = edge_inverse(key)
    for y, k in enumerate(p.edge_keys):
        if k == key or k == inv:
            return y
    raise OperationError("plaquette does not contain the edge or its inverse")


def deform(l: Loop, x: int, p: Loop, sign: int) -> Loop:
    """Merge ``l`` at ``x`` with plaquette ``p`` at its matching location."""
    _check_loc(l, x)
    if len(p) != 4:
        raise OperationError("deformation needs a plaquette")
    y = plaquette_location(p, l.edge_keys[x])
    return merger(l, p, x, y, sign)


# -- operation steps ----------------------------------------------------------

class OperationStep(NamedTuple):
    """One labelled transition ``s -> result``.

    ``loops`` holds the loop indices acted on (two for a merger, the first
    one receiving the merged loop); ``locations`` the matching locations.
    """

    family: str
    sign: int
    loops: tuple[int, ...]
    locations: tuple[int, ...]
    result: LoopSequence
    plaquette: Optional[Loop] = None

    @property
    def label(self) -> str:
        if self.family == INACTION:
            return INACTION
        sgn = "+" if self.sign > 0 else "-"
        parts = [f"{self.family}{sgn}", "loops=" + ",".join(map(str, self.loops)),
                 "at=" + ",".join(map(str, self.locations))]
        if self.plaquette is not None:
            from .loops import to_dsl

            parts.append(f"p=[{to_dsl(self.plaquette)}]")
        return " ".join(parts)


def inaction(s: LoopSequence) -> OperationStep:
    return OperationStep(INACTION, 0, (), (), s)


def _positions(l: Loop):
    keys = l.edge_keys
    inv = [edge_inverse(k) for k in keys]
    n = len(keys)
    for x in range(n):
        kx, ix = keys[x], inv[x]
        for y in range(n):
            if y == x:
                continue
            ky = keys[y]
            if ky == kx:
                yield x, y, 1
            elif ky == ix:
                yield x, y, -1


# Operation results depend only on the loop shape (its word) up to the
# translation carried by the start vertex, so they are cached per shape in a
# frame where the loop starts at the origin.

def _origin_loop(steps: tuple[int, ...], dim: int) -> Loop:
    return Loop((0,) * dim, steps)


@lru_cache(maxsize=1 << 17)
def _shape_single(steps: tuple[int, ...], dim: int):
    l = _origin_loop(steps, dim)
    twists, splits = [], []
    for x, y, pat in _positions(l):
        twists.append((x, y, -pat, _twisting(l, x, y, pat)))
        splits.append((x, y, pat, _splitting(l, x, y, pat)))
    return tuple(twists), tuple(splits)


@lru_cache(maxsize=1 << 17)
def _shape_deforms(steps: tuple[int, ...], dim: int):
    l = _origin_loop(steps, dim)
    out = []
    for x, kx in enumerate(l.edge_keys):
        for p in plaquettes_containing(kx, dim):
            y = plaquette_location(p, kx)
            pat = 1 if p.edge_keys[y] == kx else -1
            for sign in (-1, 1):
                out.append((x, y, p, sign, _merger(l, p, x, y, pat, sign)))
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def _shape_merges(steps: tuple[int, ...], other: tuple[int, ...], offset: tuple[int, ...]):
    dim = len(offset)
    l = _origin_loop(steps, dim)
    lp = Loop(offset, other)
    out = []
    for x, kx in enumerate(l.edge_keys):
        ix = edge_inverse(kx)
        for y, ky in enumerate(lp.edge_keys):
            pat = 1 if ky == kx else (-1 if ky == ix else 0)
            if pat:
                for sign in (-1, 1):
                    out.append((x, y, sign, _merger(l, lp, x, y, pat, sign)))
    return tuple(out)


def _shift(l: Loop, o: tuple[int, ...]) -> Loop:
    return l.translate(o) if any(o) else l


# The same located loops recur across the states of a search, so the
# translated results are cached too.

def _kept(*ls: Loop) -> tuple[Loop, ...]:
    return tuple(l for l in ls if l.steps)


@lru_cache(maxsize=1 << 16)
def _located_single(l: Loop, dim: int):
    twists, splits = _shape_single(l.steps, dim)
    o = l.start
    return (tuple((x, y, sg, _kept(_shift(res, o))) for x, y, sg, res in twists),
            tuple((x, y, sg, _kept(_shift(r1, o), _shift(r2, o))) for x, y, sg, (r1, r2) in splits))


@lru_cache(maxsize=1 << 16)
def _located_deforms(l: Loop, dim: int):
    o = l.start
    return tuple((x, y, _shift(p, o), sg, _kept(_shift(res, o)))
                 for x, y, p, sg, res in _shape_deforms(l.steps, dim))


@lru_cache(maxsize=1 << 17)
def _located_merges(lu: Loop, lv: Loop):
    off = tuple(b - a for a, b in zip(lu.start, lv.start))
    o = lu.start
    return tuple((x, y, sg, _kept(_shift(res, o)))
                 for x, y, sg, res in _shape_merges(lu.steps, lv.steps, off))


def iter_operations(s: LoopSequence, dim: int) -> Iterator[OperationStep]:
    """Every twisting, merger, splitting and deformation of ``s`` as distinct steps.

    Order: family (twist, merge, split, deform), then loop index, locations,
    plaquette.  Inaction is not included.
    """
    loops = s.loops
    m = len(loops)
    for r, l in enumerate(loops):
        head, tail = loops[:r], loops[r + 1:]
        for x, y, sign, new in _located_single(l, dim)[0]:
            yield OperationStep(TWIST, sign, (r,), (x, y), _make_sequence(head + new + tail))
    for u in range(m):
        for v in range(m):
            if u == v:
                continue
            lo, hi = min(u, v), max(u, v)
            a, b, c = loops[:lo], loops[lo + 1:hi], loops[hi + 1:]
            for x, y, sign, new in _located_merges(loops[u], loops[v]):
                # the merged loop takes the place of loop u
                rest = a + new + b + c if u < v else a + b + new + c
                yield OperationStep(MERGE, sign, (u, v), (x, y), _make_sequence(rest))
    for r, l in enumerate(loops):
        head, tail = loops[:r], loops[r + 1:]
        for x, y, sign, new in _located_single(l, dim)[1]:
            yield OperationStep(SPLIT, sign, (r,), (x, y), _make_sequence(head + new + tail))
    for r, l in enumerate(loops):
        head, tail = loops[:r], loops[r + 1:]
        for x, y, p, sign, new in _located_deforms(l, dim):
            yield OperationStep(DEFORM, sign, (r,), (x, y), _make_sequence(head + new + tail), p)


def enumerate_full(s: LoopSequence, dim: int) -> dict[tuple[str, int], list[OperationStep]]:
    """The eight multisets T+-, M+-, S+-, D+- keyed by ``(family, sign)``."""
    out: dict[tuple[str, int], list[OperationStep]] = {
        (f, sg): [] for f in FAMILIES for sg in (1, -1)
    }
    if s.is_null:
        return out
    for step in iter_operations(s, dim):
        out[step.family, step.sign].append(step)
    return out


class SignedTerm(NamedTuple):
    coef: int
    result: LoopSequence


@dataclass
class FirstEdgeSums:
    """Signed families of the first-edge loop equation plus ``m = |C_1|``.

    ``coef`` is +1 for negative operations and -1 for positive ones.
    """

    m: int
    edge: EdgeKey
    twist: list[SignedTerm]
    merge: list[SignedTerm]
    split: list[SignedTerm]
    deform: list[SignedTerm]

    def family(self, name: str) -> list[SignedTerm]:
        return getattr(self, name)


FirstEdgeRule = Callable[[Loop], int]


def canonical_first_edge(l: Loop) -> int:
    return 0


def occurrence_sets(l: Loop, key: EdgeKey) -> tuple[list[int], list[int]]:
    """Locations of the edge (A) and of its inverse (B) in ``l``."""
    inv = edge_inverse(key)
    a = [x for x, k in enumerate(l.edge_keys) if k == key]
    b = [x for x, k in enumerate(l.edge_keys) if k == inv]
    return a, b


def enumerate_first_edge(
    s: LoopSequence, dim: int, rule: FirstEdgeRule = canonical_first_edge
) -> FirstEdgeSums:
    if s.is_null:
        raise OperationError("first-edge sums need a non-null sequence")
    l1 = s.loops[0]
    e = l1.edge_keys[rule(l1)]
    A, B = occurrence_sets(l1, e)
    C = sorted(A + B)
    twist, merge, split, deform = [], [], [], []
    for x in C:
        for y in C:
            if x == y:
                continue
            pat = _pattern(l1.edge_keys[x], l1.edge_keys[y])
            # same-edge pairs: negative twist (+), positive split (-)
            twist.append(SignedTerm(pat, s.replace(0, _twisting(l1, x, y, pat))))
            split.append(SignedTerm(-pat, s.replace(0, *_splitting(l1, x, y, pat))))
    for r in range(1, len(s)):
        lr = s.loops[r]
        Ar, Br = occurrence_sets(lr, e)
        for x in C:
            for y in sorted(Ar + Br):
                pat = _pattern(l1.edge_keys[x], lr.edge_keys[y])
                for sign in (-1, 1):
                    merged = _merger(l1, lr, x, y, pat, sign)
                    rest = list(s.loops)
                    rest[0] = merged
                    del rest[r]
                    merge.append(SignedTerm(-sign, LoopSequence(tuple(rest))))
    for p in plaquettes_containing(e, dim):
        for x in C:
            kx = l1.edge_keys[x]
            y = plaquette_location(p, kx)
            pat = 1 if p.edge_keys[y] == kx else -1
            for sign in (-1, 1):
                deform.append(SignedTerm(-sign, s.replace(0, _merger(l1, p, x, y, pat, sign))))
    return FirstEdgeSums(len(C), e, twist, merge, split, deform)


def apply_step_weight(step: OperationStep, length: int):
    """Exact weight factor of a step from a state of length ``length``.

    Returns ``(coefficient, beta_power)``.
    """
    from fractions import Fraction

    if step.family == INACTION:
        return Fraction(1), 0
    coef = Fraction(-step.sign, length)
    return coef, 1 if step.family == DEFORM else 0


__all__ = [
    "OperationError", "OperationStep", "FirstEdgeSums", "SignedTerm",
    "splitting", "twisting", "merger", "deform", "inaction",
    "iter_operations", "enumerate_full", "enumerate_first_edge", "occurrence_sets",
    "canonical_first_edge", "plaquette_location", "apply_step_weight",
    "TWIST", "SPLIT", "MERGE", "DEFORM", "INACTION", "FAMILIES", "NULL_SEQUENCE",
]
