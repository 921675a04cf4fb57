"""Exact series coefficients a_{i,k}(s), b_{i,k}(s) and their bounds.

Three recursions share one engine:

``a``      first-edge recursion, normalized by ``m`` (occurrences of the
           first edge of loop 1)
``a_sym``  the symmetrized recursion over the full operation multisets,
           normalized by ``|s|``
``b``      the symmetrized recursion with every sign set to ``+``

All three are computed in exact rationals and memoized on the
translation-normalized sequence.  By default the recursion is also used at
``i = 0``; ``literal_i0=True`` instead pins ``a_{0,k}(s) = 0`` for non-null
``s`` (see the README for why this is not the default).
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path as FsPath
from typing import Iterable, Optional

from .loops import LoopSequence, filling_bound, parse_loop_dsl, to_dsl
from .ops import (
    DEFORM,
    MERGE,
    SPLIT,
    TWIST,
    FirstEdgeRule,
    canonical_first_edge,
    enumerate_first_edge,
    iter_operations,
)

CACHE_VERSION = 1
CACHE_ENV = "LOOPSTRINGS_CACHE_DIR"

ZERO = Fraction(0)
ONE = Fraction(1)


@lru_cache(maxsize=None)
def catalan(n: int) -> int:
    """n-th Catalan number via C_{n+1} = sum_j C_j C_{n-j}."""
    if n < 0:
        raise ValueError("catalan index must be non-negative")
    if n == 0:
        return 1
    return sum(catalan(j) * catalan(n - 1 - j) for j in range(n))


def bound_constant(dim: int) -> int:
    return 2048 * dim


def coeff_bound(s: LoopSequence, i: int, k: int, dim: int) -> int:
    """K^{(5+k)i + index} |s|^{2k} prod C_{len-1}, with K = 2048 d."""
    K = bound_constant(dim)
    prod = 1
    for n in s.degree_sequence:
        prod *= catalan(n - 1)
    return K ** ((5 + k) * i + s.index) * s.length ** (2 * k) * prod


def growth_bound(s: LoopSequence, k: int, dim: int) -> int:
    """(2^{2k+13} d)^{|s|}."""
    return (2 ** (2 * k + 13) * dim) ** s.length


def normalize(s: LoopSequence) -> LoopSequence:
    """Translate so that loop 1 starts at the origin."""
    if s.is_null:
        return s
    o = s.loops[0].start
    if not any(o):
        return s
    return s.translate(tuple(-c for c in o))


class RecursionCycle(RuntimeError):
    """A coefficient depended on itself: an implementation bug, never math."""


@dataclass
class EngineStats:
    hits: int = 0
    misses: int = 0
    op_cache: int = 0


Signed = list[tuple[int, LoopSequence]]


class CoefficientEngine:
    """Memoized exact recursions in a fixed dimension."""

    def __init__(
        self,
        dim: int,
        first_edge_rule: FirstEdgeRule = canonical_first_edge,
        *,
        literal_i0: bool = False,
        prune: bool = True,
    ):
        if dim < 2:
            raise ValueError("dimension must be at least 2")
        self.dim = dim
        self.rule = first_edge_rule
        self.literal_i0 = literal_i0
        self.prune = prune
        self._fill: dict[LoopSequence, int] = {}
        self._memo: dict[str, dict[tuple, Fraction]] = {"a": {}, "a_sym": {}, "b": {}}
        self._active: set[tuple] = set()
        self._full: dict[LoopSequence, dict[str, Signed]] = {}
        self._first: dict[LoopSequence, tuple[int, dict[str, Signed]]] = {}
        self._collapsed: dict[str, dict] = {"a": {}, "a_sym": {}, "b": {}}
        self.stats = EngineStats()
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)

    # -- operation tables ----------------------------------------------------

    def _check_dim(self, s: LoopSequence) -> None:
        for l in s.loops:
            if l.dim != self.dim:
                raise ValueError(f"loop of dimension {l.dim} given to a dim-{self.dim} engine")

    def full_ops(self, s: LoopSequence) -> dict[str, Signed]:
        """Full operation multisets as ``(sign, result)`` grouped by family."""
        hit = self._full.get(s)
        if hit is None:
            hit = {TWIST: [], MERGE: [], SPLIT: [], DEFORM: []}
            for step in iter_operations(s, self.dim):
                hit[step.family].append((step.sign, normalize(step.result)))
            self._full[s] = hit
        return hit

    def first_edge_ops(self, s: LoopSequence) -> tuple[int, dict[str, Signed]]:
        hit = self._first.get(s)
        if hit is None:
            fe = enumerate_first_edge(s, self.dim, self.rule)
            fams = {
                name: [(t.coef, normalize(t.result)) for t in fe.family(name)]
                for name in (TWIST, MERGE, SPLIT, DEFORM)
            }
            hit = (fe.m, fams)
            self._first[s] = hit
        return hit

    def _terms(self, mode: str, s: LoopSequence) -> tuple[int, dict[str, list[tuple[LoopSequence, int]]]]:
        """Normalizer and per-family ``(result, net integer weight)`` lists."""
        cache = self._collapsed[mode]
        hit = cache.get(s)
        if hit is not None:
            return hit
        if mode == "a":
            norm, fams = self.first_edge_ops(s)
            weigh = lambda g: g  # noqa: E731  first-edge coefs are already signed
        else:
            fams = self.full_ops(s)
            norm = s.length
            weigh = (lambda g: 1) if mode == "b" else (lambda g: -g)  # noqa: E731
        out = {}
        for fam, terms in fams.items():
            net: dict[LoopSequence, int] = {}
            for g, t in terms:
                net[t] = net.get(t, 0) + weigh(g)
            out[fam] = [(t, w) for t, w in net.items() if w]
        hit = (norm, out)
        cache[s] = hit
        return hit

    # -- recursions ----------------------------------------------------------

    def _base(self, s: LoopSequence, i: int, k: int) -> Optional[Fraction]:
        if i < 0 or k < 0:
            return ZERO
        if s.is_null:
            return ONE if i == 0 and k == 0 else ZERO
        if i == 0 and (k == 0 or self.literal_i0):
            # k = 0: only splits are free and they never reach the null state
            return ZERO
        if self.prune and not self.reachable(s, i):
            return ZERO
        return None

    def reachable(self, s: LoopSequence, i: int) -> bool:
        """False when no vanishing history of ``s`` can use exactly ``i`` deformations."""
        L = self._fill.get(s)
        if L is None:
            L = self._fill[s] = filling_bound(s)
        return i >= L and (i - L) % 2 == 0

    def _eval(self, mode: str, s: LoopSequence, i: int, k: int) -> Fraction:
        base = self._base(s, i, k)
        if base is not None:
            return base
        memo = self._memo[mode]
        key = (s, i, k)
        val = memo.get(key)
        if val is not None:
            self.stats.hits += 1
            return val
        if key in self._active:
            raise RecursionCycle(f"{mode}_{{{i},{k}}} depends on itself at {to_dsl(s)}")
        self._active.add(key)
        try:
            self.stats.misses += 1
            val = self._step(mode, s, i, k)
        finally:
            self._active.discard(key)
        memo[key] = val
        return val

    def _step(self, mode: str, s: LoopSequence, i: int, k: int) -> Fraction:
        ev = self._eval
        norm, fams = self._terms(mode, s)
        acc = ZERO
        if k >= 1:
            acc += sum(w * ev(mode, t, i, k - 1) for t, w in fams[TWIST])
        if k >= 2:
            acc += sum(w * ev(mode, t, i, k - 2) for t, w in fams[MERGE])
        acc += sum(w * ev(mode, t, i, k) for t, w in fams[SPLIT])
        if i >= 1:
            acc += sum(w * ev(mode, t, i - 1, k) for t, w in fams[DEFORM])
        return ev(mode, s, i, k - 1) + Fraction(acc) / norm

    def a(self, s: LoopSequence, i: int, k: int) -> Fraction:
        """a_{i,k}(s) by the first-edge recursion."""
        self._check_dim(s)
        return self._eval("a", normalize(s), i, k)

    def a_sym(self, s: LoopSequence, i: int, k: int) -> Fraction:
        """a_{i,k}(s) by the symmetrized recursion."""
        self._check_dim(s)
        return self._eval("a_sym", normalize(s), i, k)

    def b(self, s: LoopSequence, i: int, k: int) -> Fraction:
        """Unsigned companion b_{i,k}(s) >= 0."""
        self._check_dim(s)
        return self._eval("b", normalize(s), i, k)

    def coefficient(self, kind: str, s: LoopSequence, i: int, k: int) -> Fraction:
        return {"a": self.a, "a_sym": self.a_sym, "b": self.b}[kind](s, i, k)

    def memo_entries(self, mode: str = "a") -> Iterable[tuple[LoopSequence, int, int, Fraction]]:
        for (s, i, k), v in self._memo[mode].items():
            yield s, i, k, v

    # -- persistence ---------------------------------------------------------

    def save_cache(self, path: str | os.PathLike) -> None:
        """Write the memo tables as versioned JSON (rationals as "num/den")."""
        doc = {
            "version": CACHE_VERSION,
            "dim": self.dim,
            "literal_i0": self.literal_i0,
            "rule": getattr(self.rule, "__name__", "custom"),
            "tables": {
                mode: [[to_dsl(s), i, k, frac_str(v)] for (s, i, k), v in table.items()]
                for mode, table in self._memo.items()
            },
        }
        path = FsPath(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(doc))
        tmp.replace(path)

    def load_cache(self, path: str | os.PathLike) -> int:
        """Merge a cache file; returns entries loaded (0 if incompatible or missing)."""
        path = FsPath(path)
        if not path.exists():
            return 0
        doc = json.loads(path.read_text())
        if (
            doc.get("version") != CACHE_VERSION
            or doc.get("dim") != self.dim
            or doc.get("literal_i0") != self.literal_i0
            or doc.get("rule") != getattr(self.rule, "__name__", "custom")
        ):
            return 0
        n = 0
        for mode, rows in doc["tables"].items():
            table = self._memo.setdefault(mode, {})
            for dsl, i, k, v in rows:
                table[normalize(parse_loop_dsl(dsl, self.dim)), i, k] = parse_fraction(v)
                n += 1
        return n


def default_cache_path(dim: int) -> FsPath:
    root = os.environ.get(CACHE_ENV) or os.path.join(os.path.expanduser("~"), ".cache", "loopstrings")
    return FsPath(root) / f"coefficients-d{dim}-v{CACHE_VERSION}.json"


# -- rational helpers ---------------------------------------------------------

def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str | int | Fraction) -> Fraction:
    """Exact parse of "num/den", integers and decimals (no float round trip)."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


# -- series -------------------------------------------------------------------

@dataclass
class SeriesResult:
    s: LoopSequence
    k: int
    beta: Fraction
    coefficients: dict[int, Fraction]
    partial_sum: Fraction
    tail_bound: Optional[Fraction]
    K: int
    rigorous: bool
    growth_bound: int
    growth_ok: Optional[bool] = None
    notes: list[str] = field(default_factory=list)

    @property
    def i_max(self) -> int:
        return max(self.coefficients) if self.coefficients else -1

    def to_json(self) -> dict:
        return {
            "loop": to_dsl(self.s),
            "k": self.k,
            "beta": frac_str(self.beta),
            "i_max": self.i_max,
            "coefficients": {str(i): frac_str(v) for i, v in sorted(self.coefficients.items())},
            "partial_sum": frac_str(self.partial_sum),
            "partial_sum_float": float(self.partial_sum),
            "tail_bound": None if self.tail_bound is None else frac_str(self.tail_bound),
            "tail_bound_float": None if self.tail_bound is None else float(self.tail_bound),
            "K": self.K,
            "rigorous": self.rigorous,
            "growth_bound_log2": math.log2(self.growth_bound) if self.growth_bound else 0.0,
            "growth_ok": self.growth_ok,
            "notes": self.notes,
        }


def tail_bound(s: LoopSequence, k: int, beta: Fraction, i_max: int, dim: int) -> Optional[Fraction]:
    """sum_{i > i_max} coeff_bound(s,i,k) |beta|^i, or None outside the convergent regime."""
    K = bound_constant(dim)
    q = Fraction(K) ** (5 + k) * abs(beta)
    if q >= 1:
        return None
    base = Fraction(coeff_bound(s, 0, k, dim))
    return base * q ** (i_max + 1) / (1 - q)


def guaranteed_regime(k: int, dim: int) -> Fraction:
    """Upper limit K^{-(5+k)} on |beta| for the rigorous tail."""
    return Fraction(1, bound_constant(dim) ** (5 + k))


def f_partial(
    engine: CoefficientEngine,
    s: LoopSequence,
    k: int,
    beta: Fraction | str,
    i_max: Optional[int] = None,
    *,
    max_i: int = 4,
    rel_tol: Fraction = Fraction(1, 10 ** 9),
) -> SeriesResult:
    """Partial sum of f_k(s) = sum_i a_{i,k}(s) beta^i with a rigorous tail.

    Without ``i_max`` the order grows until the tail drops below
    ``rel_tol * max(1, |partial|)`` or ``max_i`` is reached.
    """
    beta = parse_fraction(beta)
    dim = engine.dim
    coeffs: dict[int, Fraction] = {}
    partial = ZERO
    notes: list[str] = []
    rigorous = tail_bound(s, k, beta, 0, dim) is not None
    if not rigorous:
        notes.append("beta outside the guaranteed-convergence regime; no rigorous tail")
    i = 0
    while True:
        coeffs[i] = engine.a(s, i, k)
        partial += coeffs[i] * beta ** i
        if i_max is not None:
            if i >= i_max:
                break
        else:
            t = tail_bound(s, k, beta, i, dim)
            if t is not None and t < rel_tol * max(ONE, abs(partial)):
                break
            if i >= max_i:
                notes.append(f"compute budget reached at i_max={i}")
                break
        i += 1
    tail = tail_bound(s, k, beta, i, dim)
    g = growth_bound(s, k, dim)
    ok = None if tail is None else abs(partial) <= g + tail
    return SeriesResult(s, k, beta, coeffs, partial, tail, bound_constant(dim), rigorous, g, ok, notes)


def equation_residual(
    engine: CoefficientEngine, s: LoopSequence, k: int, beta: Fraction, i_max: int
) -> tuple[Fraction, Optional[Fraction]]:
    """Residual of the symmetrized limit equation for truncated series.

    Returns ``(residual, allowance)``: the residual of
    ``|s| f_k(s) = |s| f_{k-1}(s) + T + M + S + beta D`` with every f
    replaced by its order-``i_max`` partial sum, and the bound implied by
    the tails of all series involved.  ``allowance`` is None outside the
    convergent regime.
    """
    dim = engine.dim
    beta = parse_fraction(beta)

    def P(t: LoopSequence, kk: int) -> Fraction:
        if kk < 0:
            return ZERO
        return sum((engine.a(t, i, kk) * beta ** i for i in range(i_max + 1)), ZERO)

    def tau(t: LoopSequence, kk: int) -> Optional[Fraction]:
        if kk < 0 or t.is_null:
            return ZERO
        return tail_bound(t, kk, beta, i_max, dim)

    fams = engine.full_ops(normalize(s))
    n = s.length
    lhs = n * P(s, k)
    rhs = n * P(s, k - 1)
    taus = [n * tau(s, k), n * tau(s, k - 1)] if tau(s, k) is not None else [None]
    for fam, kk, scale in ((TWIST, k - 1, ONE), (MERGE, k - 2, ONE), (SPLIT, k, ONE), (DEFORM, k, beta)):
        for sign, t in fams[fam]:
            rhs += -sign * scale * P(t, kk)
            tt = tau(t, kk)
            taus.append(None if tt is None else abs(scale) * tt)
    allowance = None if any(t is None for t in taus) else sum(taus, ZERO)
    return lhs - rhs, allowance


def coefficient_table(
    engine: CoefficientEngine, s: LoopSequence, i_max: int, k: int, kinds: Iterable[str] = ("a", "b")
) -> dict:
    """JSON-ready table of coefficients for ``0 <= i <= i_max`` at order ``k``."""
    rows = []
    for i in range(i_max + 1):
        row = {"i": i, "k": k}
        for kind in kinds:
            row[kind] = frac_str(engine.coefficient(kind, s, i, k))
        row["bound_log2"] = math.log2(coeff_bound(s, i, k, engine.dim)) if not s.is_null else 0.0
        rows.append(row)
    return {"loop": to_dsl(s), "dim": engine.dim, "rows": rows}


__all__ = [
    "catalan", "coeff_bound", "growth_bound", "bound_constant", "normalize",
    "CoefficientEngine", "RecursionCycle", "SeriesResult", "f_partial", "tail_bound",
    "guaranteed_regime", "equation_residual", "coefficient_table", "frac_str",
    "parse_fraction", "default_cache_path", "CACHE_ENV", "CACHE_VERSION",
]
