"""Corpora and exact check suites shared by the command line and the tests."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .coefficients import (
    CoefficientEngine,
    catalan,
    coeff_bound,
    frac_str,
    growth_bound,
    guaranteed_regime,
    tail_bound,
)
from .loops import (
    Loop,
    LoopSequence,
    edge_inverse,
    invert_word,
    parse_loop_dsl,
    plaquettes_containing,
)
from .ops import _positions, deform, merger, splitting, twisting
from .trajectories import (
    Budget,
    TrajectorySums,
    BruteForce,
    enumerate_vanishing,
    listing_keys,
)

P = "+1 +2 -1 -2"
P_INV = "+2 +1 -2 -1"

# Planar shapes in the (1,2) plane with total length at most 8.
_SHAPES = [
    ("p", P, 4),
    ("p_inv", P_INV, 4),
    ("domino_x", "+1 +1 +2 -1 -1 -2", 6),
    ("domino_x_inv", "+2 +1 +1 -2 -1 -1", 6),
    ("domino_y", "+1 +2 +2 -1 -2 -2", 6),
    ("domino_y_inv", "+2 +2 +1 -2 -2 -1", 6),
    ("pp", f"{P} {P}", 8),
    ("pp_inv", f"{P_INV} {P_INV}", 8),
    ("p,p", f"{P} ; {P}", 8),
    ("p,p_inv", f"{P} ; {P_INV}", 8),
    ("p,p@(1,0)", f"{P} ; @(1,0) {P}", 8),
    ("p,p_inv@(1,0)", f"{P} ; @(1,0) {P_INV}", 8),
    ("p,p@(0,1)", f"{P} ; @(0,1) {P}", 8),
    ("p,p@(1,1)", f"{P} ; @(1,1) {P}", 8),
    ("p,p@(2,0)", f"{P} ; @(2,0) {P}", 8),
]


def standard_corpus(dim: int = 2, max_length: int = 8) -> list[tuple[str, LoopSequence]]:
    """Plaquettes, doubled plaquettes, dominoes and plaquette pairs with |s| <= max_length."""
    pad = ",0" * (dim - 2)
    out = []
    for name, text, n in _SHAPES:
        if n > max_length:
            continue
        if pad:
            text = text.replace(",0)", f",0{pad})").replace(",1)", f",1{pad})")
        s = parse_loop_dsl(text, dim)
        assert s.length == n, name
        out.append((name, s))
    return out


# -- duality, cross recursion, absolute sums -------------------------------------

@dataclass
class DualityRow:
    name: str
    i: int
    k: int
    a: Fraction
    a_sym: Fraction
    b: Fraction
    T: Fraction
    S: Fraction

    @property
    def duality(self) -> bool:
        return self.T == self.a

    @property
    def cross(self) -> bool:
        return self.a == self.a_sym

    @property
    def absolute(self) -> bool:
        return self.S == self.b and abs(self.a) <= self.b

    def to_json(self) -> dict:
        return {"name": self.name, "i": self.i, "k": self.k,
                **{f: frac_str(getattr(self, f)) for f in ("a", "a_sym", "b", "T", "S")},
                "duality": self.duality, "cross": self.cross, "absolute": self.absolute}


@dataclass
class DualityReport:
    rows: list[DualityRow] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def duality(self) -> bool:
        return all(r.duality for r in self.rows)

    @property
    def cross(self) -> bool:
        return all(r.cross for r in self.rows)

    @property
    def absolute(self) -> bool:
        return all(r.absolute for r in self.rows)

    @property
    def all_equal(self) -> bool:
        return self.duality and self.cross and self.absolute

    def failures(self) -> list[DualityRow]:
        return [r for r in self.rows if not (r.duality and r.cross and r.absolute)]

    def to_json(self) -> dict:
        return {"all_equal": self.all_equal, "duality": self.duality, "cross": self.cross,
                "absolute": self.absolute, "cases": len(self.rows),
                "failures": [r.to_json() for r in self.failures()]}


def check_duality(
    corpus: Iterable[tuple[str, LoopSequence]], dim: int, i_max: int, k_max: int,
    engine: Optional[CoefficientEngine] = None, sums: Optional[TrajectorySums] = None,
) -> DualityReport:
    """Compare a, a_sym, b with the signed and absolute trajectory sums."""
    t0 = time.perf_counter()
    engine = engine or CoefficientEngine(dim)
    sums = sums or TrajectorySums(dim)
    rep = DualityReport()
    for name, s in corpus:
        for k in range(k_max + 1):
            for i in range(i_max + 1):
                rep.rows.append(DualityRow(
                    name, i, k, engine.a(s, i, k), engine.a_sym(s, i, k), engine.b(s, i, k),
                    sums.total(s, i, k).coefficient, sums.total(s, i, k, absolute=True).coefficient,
                ))
    rep.seconds = time.perf_counter() - t0
    return rep


# -- bounds ----------------------------------------------------------------------

def check_bounds(
    corpus: Iterable[tuple[str, LoopSequence]], dim: int, i_max: int, k_max: int,
    engine: Optional[CoefficientEngine] = None,
) -> dict:
    """Catalan coefficient bounds and the growth bound on partial sums plus tails."""
    engine = engine or CoefficientEngine(dim)
    coeff_violations, growth_violations, checked = [], [], 0
    for name, s in corpus:
        for k in range(k_max + 1):
            beta = guaranteed_regime(k, dim) / 2
            partial = Fraction(0)
            for i in range(i_max + 1):
                a, b = engine.a(s, i, k), engine.b(s, i, k)
                bound = coeff_bound(s, i, k, dim)
                checked += 1
                if not (abs(a) <= bound and b <= bound):
                    coeff_violations.append((name, i, k))
                partial += a * beta ** i
            tail = tail_bound(s, k, beta, i_max, dim)
            if tail is None or abs(partial) + tail > growth_bound(s, k, dim):
                growth_violations.append((name, k))
    return {"ok": not coeff_violations and not growth_violations, "checked": checked,
            "coefficient_violations": coeff_violations, "growth_violations": growth_violations}


def catalan_facts(n_max: int = 30) -> bool:
    """C_n <= 4^n and the convolution identity for C_{n+1}."""
    for n in range(n_max + 1):
        if catalan(n) > 4 ** n:
            return False
        if catalan(n + 1) != sum(catalan(j) * catalan(n - j) for j in range(n + 1)):
            return False
    return True


# -- randomized lemma suite --------------------------------------------------------

def random_loop(rng: random.Random, dim: int, max_length: int = 16) -> Loop:
    """Reduced product of random conjugated plaquettes, at most ``max_length`` long."""
    while True:
        word: list[int] = []
        for _ in range(rng.randint(1, 3)):
            i, j = rng.sample(range(1, dim + 1), 2)
            sg = rng.choice((1, -1))
            plaq = [sg * i, j, -sg * i, -j]
            g = [rng.choice((1, -1)) * rng.randint(1, dim) for _ in range(rng.randint(0, 3))]
            word += g + plaq + list(invert_word(g))
        l = Loop._core((0,) * dim, word)
        if not l.is_null and len(l) <= max_length:
            return l


def random_sequence(rng: random.Random, dim: int, max_length: int = 16) -> LoopSequence:
    loops = []
    for _ in range(rng.randint(1, 3)):
        l = random_loop(rng, dim, max_length)
        loops.append(l.translate(tuple(rng.randint(-1, 1) for _ in range(dim))))
    return LoopSequence(tuple(loops))


@dataclass
class LemmaTally:
    applications: int = 0
    violations: int = 0

    def add(self, ok: bool) -> None:
        self.applications += 1
        self.violations += not ok


def _merge_pairs(lu: Loop, lv: Loop) -> list[tuple[int, int]]:
    """Locations ``(x, y)`` where ``lu`` and ``lv`` share an edge in either direction."""
    where: dict = {}
    for y, k in enumerate(lv.edge_keys):
        where.setdefault(k, []).append(y)
    out = []
    for x, k in enumerate(lu.edge_keys):
        for key in (k, edge_inverse(k)):
            out.extend((x, y) for y in where.get(key, ()))
    return out


def check_lemmas(n: int = 10_000, dims: Iterable[int] = (2, 3), max_length: int = 16,
                 seed: int = 0) -> dict[str, LemmaTally]:
    """Length and index inequalities under random operation applications.

    Each lemma receives at least ``n`` applications per dimension.  Every
    application is one operation at randomly drawn admissible locations.
    """
    rng = random.Random(seed)
    names = ("twist", "merge", "deform", "split_positive", "split_negative", "split_index")
    tallies = {name: LemmaTally() for name in names}
    per_seq = 8
    for dim in dims:
        target = {name: t.applications + n for name, t in tallies.items()}
        while any(tallies[k].applications < target[k] for k in tallies):
            s = random_sequence(rng, dim, max_length)
            L, I = s.length, s.index
            for r, l in enumerate(s):
                pos = list(_positions(l))
                for x, y, pat in rng.sample(pos, min(per_seq, len(pos))):
                    t = s.replace(r, twisting(l, x, y, -pat))
                    tallies["twist"].add(t.length <= L and t.index <= I)
                    l1, l2 = splitting(l, x, y, pat)
                    tallies["split_index"].add(s.replace(r, l1, l2).index < I)
                    n_l, gap = len(l), (y - x) % len(l)
                    nonnull = not l1.is_null and not l2.is_null
                    if pat > 0:
                        ok = nonnull and len(l1) <= n_l - gap and len(l2) <= gap
                        tallies["split_positive"].add(ok)
                    else:
                        ok = nonnull and len(l1) <= n_l - gap - 1 and len(l2) <= gap - 1
                        tallies["split_negative"].add(ok)
                for _ in range(per_seq):
                    x = rng.randrange(len(l))
                    p = rng.choice(plaquettes_containing(l.edge_keys[x], dim))
                    t = s.replace(r, deform(l, x, p, rng.choice((1, -1))))
                    tallies["deform"].add(t.length <= L + 4 and t.index <= I + 4)
            for u, v in itertools.permutations(range(len(s)), 2):
                pairs = _merge_pairs(s[u], s[v])
                for x, y in rng.sample(pairs, min(per_seq, len(pairs))):
                    merged = merger(s[u], s[v], x, y, rng.choice((1, -1)))
                    rest = list(s.loops)
                    rest[u] = merged
                    del rest[v]
                    t = LoopSequence(tuple(rest))
                    tallies["merge"].add(t.length <= L and t.index <= I + 1)
    return tallies


# -- pruned versus brute-force enumeration -------------------------------------------

def budgets_up_to(total: int) -> list[Budget]:
    return [Budget(i, a, b, c)
            for i in range(total + 1) for a in range(total + 1 - i)
            for b in range(total + 1 - i - a) for c in range(total + 1 - i - a - b)]


@dataclass
class PruningRow:
    name: str
    budget: Budget
    pruned: int
    brute: int
    equal: bool


def check_pruning(corpus: Iterable[tuple[str, LoopSequence]], dim: int, total: int = 3,
                  skip: Optional[set] = None) -> list[PruningRow]:
    """Pruned and brute-force listings agree exactly as sets of labelled step sequences.

    ``skip`` holds ``(name, budget)`` pairs to leave out.
    """
    rows = []
    for name, s in corpus:
        brute = BruteForce(dim)
        for budget in budgets_up_to(total):
            if skip and (name, budget) in skip:
                continue
            fast = listing_keys(enumerate_vanishing(s, budget, dim, prune=True))
            rows.append(PruningRow(name, budget, len(fast), brute.count(s, budget),
                                   brute.matches(s, budget, fast)))
    return rows


__all__ = [
    "standard_corpus", "check_duality", "DualityReport", "DualityRow", "check_bounds",
    "catalan_facts", "random_loop", "random_sequence", "check_lemmas", "LemmaTally",
    "budgets_up_to", "check_pruning", "PruningRow",
]
