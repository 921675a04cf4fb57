"""Vanishing trajectories, their weights, and trajectory sums.

A trajectory is a list of operation-labelled steps ending at the null
sequence.  Each deformation, twisting, merger and inaction draws on a
budget ``(i, a, b, c)``; splittings are free but strictly lower the index,
so every search terminates.  Sums are memoized on the translation-normalized
state and the remaining budget; listings are plain depth-first searches.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterator, Optional

from .coefficients import frac_str, normalize
from .loops import LoopSequence, filling_bound, to_dsl
from .ops import DEFORM, INACTION, MERGE, SPLIT, TWIST, OperationStep, inaction, iter_operations

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Budget:
    i: int = 0
    a: int = 0
    b: int = 0
    c: int = 0

    def __post_init__(self):
        if min(self.i, self.a, self.b, self.c) < 0:
            raise ValueError("budget entries must be non-negative")

    @property
    def k(self) -> int:
        return self.a + 2 * self.b + self.c

    @property
    def genus(self) -> Fraction:
        return Fraction(self.b) + Fraction(self.a + self.c, 2)

    @property
    def total(self) -> int:
        return self.i + self.a + self.b + self.c

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.i, self.a, self.b, self.c

    @staticmethod
    def splits_of(k: int) -> Iterator[tuple[int, int, int]]:
        """All ``(a, b, c)`` with ``a + 2b + c = k``."""
        for b in range(k // 2 + 1):
            for a in range(k - 2 * b + 1):
                yield a, b, k - 2 * b - a


_COST = {DEFORM: (1, 0, 0, 0), TWIST: (0, 1, 0, 0), MERGE: (0, 0, 1, 0), INACTION: (0, 0, 0, 1)}


@dataclass(frozen=True)
class WeightMonomial:
    """``coefficient * beta**beta_power``."""

    coefficient: Fraction
    beta_power: int = 0

    def __mul__(self, other: "WeightMonomial") -> "WeightMonomial":
        return WeightMonomial(self.coefficient * other.coefficient, self.beta_power + other.beta_power)

    def __abs__(self) -> "WeightMonomial":
        return WeightMonomial(abs(self.coefficient), self.beta_power)

    def evaluate(self, beta: Fraction | float):
        return self.coefficient * beta ** self.beta_power

    def to_json(self) -> dict:
        return {"coefficient": frac_str(self.coefficient), "beta_power": self.beta_power}


def step_weight(step: OperationStep, length: int) -> WeightMonomial:
    """Weight of one transition from a state of total length ``length``."""
    if step.family == INACTION:
        return WeightMonomial(ONE, 0)
    coef = Fraction(-step.sign, length)
    return WeightMonomial(coef, 1 if step.family == DEFORM else 0)


@dataclass(frozen=True)
class Trajectory:
    start: LoopSequence
    steps: tuple[OperationStep, ...]

    @property
    def states(self) -> list[LoopSequence]:
        return [self.start] + [st.result for st in self.steps]

    @property
    def terminal(self) -> LoopSequence:
        return self.steps[-1].result if self.steps else self.start

    @property
    def vanishing(self) -> bool:
        states = self.states
        return states[-1].is_null and all(not t.is_null for t in states[:-1])

    def counts(self) -> Budget:
        n = [0, 0, 0, 0]
        for st in self.steps:
            cost = _COST.get(st.family)
            if cost:
                n = [x + y for x, y in zip(n, cost)]
        return Budget(*n)

    @property
    def n_splits(self) -> int:
        return sum(st.family == SPLIT for st in self.steps)

    def weight(self) -> WeightMonomial:
        w = WeightMonomial(ONE, 0)
        for src, st in zip(self.states, self.steps):
            w = w * step_weight(st, src.length)
        return w

    def genus(self) -> Fraction:
        return genus(self)

    def to_json(self) -> dict:
        w = self.weight()
        return {
            "start": to_dsl(self.start),
            "steps": [st.label for st in self.steps],
            "weight_num": w.coefficient.numerator,
            "weight_den": w.coefficient.denominator,
            "beta_power": w.beta_power,
            "genus": frac_str(self.genus()),
        }


def weight(X: Trajectory) -> WeightMonomial:
    return X.weight()


def genus(X: Trajectory) -> Fraction:
    return X.counts().genus


def split_allowance(s: LoopSequence, budget: Budget) -> int:
    """Most splittings any trajectory with this budget can contain."""
    return s.index + 4 * budget.i + budget.b


def _feasible(s: LoopSequence, i: int, a: int, b: int) -> bool:
    # loops vanish only through twists, mergers (up to two each) or deformations
    if len(s) > i + a + 2 * b:
        return False
    L = filling_bound(s)
    return i >= L and (i - L) % 2 == 0


def enumerate_vanishing(
    s: LoopSequence, budget: Budget, dim: int, *, prune: bool = True
) -> list[Trajectory]:
    """All vanishing trajectories from ``s`` consuming exactly ``budget``.

    The default search cuts branches with the split allowance, the loop
    count and the filling bound.  ``prune=False`` gives the brute-force
    reference: no cuts at all (splittings lower the index, so it still
    terminates), with each exact ``(state, remaining budget)`` subtree
    explored once and its listing reused.
    """
    ops = _OpsCache(dim)
    if prune:
        found = _dfs(s, budget.as_tuple(), split_allowance(s, budget), ops)
        return [Trajectory(s, tuple(reversed(steps))) for steps in found]
    memo: dict = {}
    return [Trajectory(s, steps) for steps in _brute(s, budget.as_tuple(), ops, memo)]


class _OpsCache(dict):
    """Operation steps per exact state, shared within one search."""

    def __init__(self, dim: int):
        super().__init__()
        self.dim = dim

    def __missing__(self, s: LoopSequence) -> list[OperationStep]:
        steps = list(iter_operations(s, self.dim))
        self[s] = steps
        return steps


def _dfs(s, rem, splits_left, ops) -> Iterator[list[OperationStep]]:
    i, a, b, c = rem
    if s.is_null:
        if rem == (0, 0, 0, 0):
            yield []
        return
    if not _feasible(s, i, a, b):
        return
    if c:
        for tail in _dfs(s, (i, a, b, c - 1), splits_left, ops):
            tail.append(inaction(s))
            yield tail
    for step in ops[s]:
        fam = step.family
        if fam == SPLIT:
            if splits_left <= 0:
                continue
            nxt, sl = rem, splits_left - 1
        else:
            di, da, db, _ = _COST[fam]
            if i < di or a < da or b < db:
                continue
            nxt, sl = (i - di, a - da, b - db, c), splits_left
        for tail in _dfs(step.result, nxt, sl, ops):
            tail.append(step)
            yield tail


def _brute(s, rem, ops, memo) -> list[tuple[OperationStep, ...]]:
    if s.is_null:
        return [()] if rem == (0, 0, 0, 0) else []
    key = (s, rem)
    hit = memo.get(key)
    if hit is not None:
        return hit
    i, a, b, c = rem
    out: list[tuple[OperationStep, ...]] = []
    if c:
        here = inaction(s)
        out.extend((here,) + t for t in _brute(s, (i, a, b, c - 1), ops, memo))
    for step in ops[s]:
        if step.family == SPLIT:
            nxt = rem
        else:
            di, da, db, _ = _COST[step.family]
            if i < di or a < da or b < db:
                continue
            nxt = (i - di, a - da, b - db, c)
        out.extend((step,) + t for t in _brute(step.result, nxt, ops, memo))
    memo[key] = out
    return out


class TrajectorySums:
    """Memoized signed and absolute trajectory sums in a fixed dimension.

    ``raw(s, (i,a,b,c))`` returns ``(signed, absolute)`` coefficients of
    ``beta**i`` summed over ``X_{i,a,b,c}(s)``.
    """

    def __init__(self, dim: int, *, prune: bool = True):
        self.dim = dim
        self.prune = prune
        self._memo: dict[tuple, tuple[Fraction, Fraction]] = {}
        self._ops: dict[LoopSequence, list[tuple[str, int, LoopSequence, int]]] = {}

    def _moves(self, s: LoopSequence):
        hit = self._ops.get(s)
        if hit is None:
            grouped: dict[tuple[str, int, LoopSequence], int] = {}
            for st in iter_operations(s, self.dim):
                key = (st.family, st.sign, normalize(st.result))
                grouped[key] = grouped.get(key, 0) + 1
            hit = [(f, g, t, n) for (f, g, t), n in grouped.items()]
            self._ops[s] = hit
        return hit

    def raw(self, s: LoopSequence, budget: tuple[int, int, int, int]) -> tuple[Fraction, Fraction]:
        return self._sum(normalize(s), tuple(budget))

    def _sum(self, s: LoopSequence, rem: tuple[int, int, int, int]) -> tuple[Fraction, Fraction]:
        if s.is_null:
            return (ONE, ONE) if rem == (0, 0, 0, 0) else (ZERO, ZERO)
        i, a, b, c = rem
        if self.prune and not _feasible(s, i, a, b):
            return ZERO, ZERO
        key = (s, rem)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        sgn, ab = ZERO, ZERO
        if c:
            t, u = self._sum(s, (i, a, b, c - 1))
            sgn += t
            ab += u
        n = s.length
        acc_s, acc_a = ZERO, ZERO
        for fam, g, t, mult in self._moves(s):
            if fam == SPLIT:
                nxt = rem
            else:
                di, da, db, _ = _COST[fam]
                if i < di or a < da or b < db:
                    continue
                nxt = (i - di, a - da, b - db, c)
            v, w = self._sum(t, nxt)
            acc_s += -g * mult * v
            acc_a += mult * w
        hit = (sgn + acc_s / n, ab + acc_a / n)
        self._memo[key] = hit
        return hit

    def by_budget(self, s: LoopSequence, budget: Budget, absolute: bool = False) -> WeightMonomial:
        v = self.raw(s, budget.as_tuple())[1 if absolute else 0]
        return WeightMonomial(v, budget.i)

    def total(self, s: LoopSequence, i: int, k: int, absolute: bool = False) -> WeightMonomial:
        """T (signed) or S (absolute) over ``X_{i,k}(s)`` as coefficient times beta^i."""
        acc = ZERO
        for a, b, c in Budget.splits_of(k):
            acc += self.raw(s, (i, a, b, c))[1 if absolute else 0]
        return WeightMonomial(acc, i)


def trajectory_sum(
    s: LoopSequence, i: int, k: int, dim: int, absolute: bool = False,
    sums: Optional[TrajectorySums] = None,
) -> WeightMonomial:
    sums = sums or TrajectorySums(dim)
    return sums.total(s, i, k, absolute)


def step_key(step: OperationStep, origin: tuple[int, ...]) -> tuple:
    """Identity of a step relative to ``origin`` (the start of the source state's first loop).

    Given the source state, the key determines the step, and it is unchanged
    when source and step are translated together.
    """
    p = step.plaquette
    rel = None if p is None else (tuple(a - b for a, b in zip(p.start, origin)), p.steps)
    return (step.family, step.sign, step.loops, step.locations, rel)


def _origin(s: LoopSequence) -> tuple[int, ...]:
    return s.loops[0].start


def trajectory_keys(X: Trajectory) -> tuple[tuple, ...]:
    return tuple(step_key(st, _origin(src)) for src, st in zip(X.states, X.steps))


def listing_keys(trajs: list[Trajectory]) -> list[tuple]:
    """Sorted translation-relative step-key sequences of a listing."""
    return sorted(trajectory_keys(X) for X in trajs)


def brute_force_keys(s: LoopSequence, budget: Budget, dim: int) -> list[tuple]:
    """Brute-force listing in key form, exploring every branch without cuts.

    Subtrees are shared between translates of the same state; the keys are
    translation relative, so sharing does not change the listing.
    """
    ops = _OpsCache(dim)
    memo: dict = {}
    return sorted(_brute_keys(normalize(s), budget.as_tuple(), ops, memo))


def _brute_keys(n, rem, ops, memo) -> list[tuple]:
    if n.is_null:
        return [()] if rem == (0, 0, 0, 0) else []
    key = (n, rem)
    hit = memo.get(key)
    if hit is not None:
        return hit
    i, a, b, c = rem
    origin = _origin(n)
    out: list[tuple] = []
    if c:
        here = step_key(inaction(n), origin)
        out.extend((here,) + t for t in _brute_keys(n, (i, a, b, c - 1), ops, memo))
    for step in ops[n]:
        if step.family == SPLIT:
            nxt = rem
        else:
            di, da, db, _ = _COST[step.family]
            if i < di or a < da or b < db:
                continue
            nxt = (i - di, a - da, b - db, c)
        here = step_key(step, origin)
        out.extend((here,) + t for t in _brute_keys(normalize(step.result), nxt, ops, memo))
    memo[key] = out
    return out


class BruteForce:
    """Unpruned search space as a shared DAG of ``(normalized state, remaining budget)`` nodes.

    Every branch is explored, with no cuts. A node stores its path count and a
    map from step key to child node, so a listing can be checked against it
    without materializing the brute-force listing.
    """

    def __init__(self, dim: int):
        self.ops = _OpsCache(dim)
        self._nodes: dict = {}

    def _node(self, n: LoopSequence, rem: tuple[int, int, int, int]):
        key = (n, rem)
        hit = self._nodes.get(key)
        if hit is not None:
            return hit
        if n.is_null:
            hit = (1 if rem == (0, 0, 0, 0) else 0, {})
            self._nodes[key] = hit
            return hit
        i, a, b, c = rem
        origin = _origin(n)
        kids: dict = {}
        moves = [(inaction(n), (i, a, b, c - 1))] if c else []
        for step in self.ops[n]:
            if step.family == SPLIT:
                moves.append((step, rem))
                continue
            di, da, db, _ = _COST[step.family]
            if i >= di and a >= da and b >= db:
                moves.append((step, (i - di, a - da, b - db, c)))
        for step, nxt in moves:
            k = step_key(step, origin)
            if k in kids:
                raise AssertionError(f"duplicate step key {k!r}")
            kids[k] = (normalize(step.result), nxt)
        count = sum(self._node(*child)[0] for child in kids.values())
        hit = (count, kids)
        self._nodes[key] = hit
        return hit

    def count(self, s: LoopSequence, budget: Budget) -> int:
        """Number of vanishing trajectories with exactly this budget."""
        return self._node(normalize(s), budget.as_tuple())[0]

    def contains(self, s: LoopSequence, budget: Budget, keys: tuple[tuple, ...]) -> bool:
        """Whether the step-key sequence is a vanishing trajectory with this budget."""
        node = (normalize(s), budget.as_tuple())
        for k in keys:
            nxt = self._node(*node)[1].get(k)
            if nxt is None:
                return False
            node = nxt
        return node[0].is_null and node[1] == (0, 0, 0, 0)

    def matches(self, s: LoopSequence, budget: Budget, listing: list[tuple]) -> bool:
        """Exact equality of a listing (in key form) with the brute-force listing.

        Distinct members, all present, and as many as there are brute-force paths.
        """
        if len(set(listing)) != len(listing) or len(listing) != self.count(s, budget):
            return False
        return all(self.contains(s, budget, t) for t in listing)


def listing_sum(trajs: list[Trajectory]) -> tuple[Fraction, Fraction]:
    """Signed and absolute weight sums of an explicit listing."""
    sgn = sum((X.weight().coefficient for X in trajs), ZERO)
    ab = sum((abs(X.weight().coefficient) for X in trajs), ZERO)
    return sgn, ab


def write_listing(trajs: list[Trajectory], fh: IO[str]) -> None:
    """One JSON record per line."""
    for X in trajs:
        fh.write(json.dumps(X.to_json(), sort_keys=True) + "\n")


__all__ = [
    "Budget", "WeightMonomial", "Trajectory", "TrajectorySums",
    "enumerate_vanishing", "weight", "genus", "step_weight", "split_allowance",
    "trajectory_sum", "listing_sum", "listing_keys", "step_key", "trajectory_keys", "brute_force_keys", "BruteForce", "write_listing",
]
