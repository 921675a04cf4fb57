"""Lattice geometry and loop algebra on Z^d.

A closed path is stored as a start vertex plus a word of unit steps: ``+k``
is a step along axis ``k`` (1-based), ``-k`` the reverse step.  Backtrack
erasure only looks at the word, so the nonbacktracking core of a closed
path is its cyclic free reduction; the start vertex follows along.

Loops are always kept in canonical form: among all rotations of the edge
list, the one whose sequence of ``(base, axis, sign)`` triples is
lexicographically smallest.  Locations inside a loop are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from operator import add
from typing import Iterable, Iterator, Sequence, Tuple

Vertex = Tuple[int, ...]
Word = Tuple[int, ...]
EdgeKey = Tuple[Vertex, int]


class LoopError(ValueError):
    """Invalid lattice path or loop."""


def step_vertex(v: Vertex, step: int) -> Vertex:
    a = abs(step) - 1
    return v[:a] + (v[a] + (1 if step > 0 else -1),) + v[a + 1:]


def invert_word(word: Sequence[int]) -> Word:
    return tuple(-s for s in reversed(word))


def edge_inverse(key: EdgeKey) -> EdgeKey:
    base, step = key
    return step_vertex(base, step), -step


@dataclass(frozen=True)
class Edge:
    """Directed nearest-neighbour edge from ``base`` along ``sign * axis``."""

    base: Vertex
    axis: int
    sign: int

    @classmethod
    def from_key(cls, key: EdgeKey) -> "Edge":
        base, step = key
        return cls(base, abs(step), 1 if step > 0 else -1)

    @property
    def step(self) -> int:
        return self.sign * self.axis

    @property
    def key(self) -> EdgeKey:
        return self.base, self.step

    @property
    def head(self) -> Vertex:
        return step_vertex(self.base, self.step)

    def inverse(self) -> "Edge":
        return Edge(self.head, self.axis, -self.sign)

    @property
    def positive(self) -> bool:
        # u(e) < v(e) lexicographically exactly when the step is +axis
        return self.sign > 0


@dataclass(frozen=True)
class Path:
    start: Vertex
    steps: Word = ()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def end(self) -> Vertex:
        v = self.start
        for s in self.steps:
            v = step_vertex(v, s)
        return v

    @property
    def closed(self) -> bool:
        return self.end == self.start

    def edges(self) -> list[Edge]:
        out = []
        v = self.start
        for s in self.steps:
            out.append(Edge.from_key((v, s)))
            v = step_vertex(v, s)
        return out

    def inverse(self) -> "Path":
        return Path(self.end, invert_word(self.steps))

    def __add__(self, other: "Path") -> "Path":
        if self.end != other.start:
            raise LoopError("paths do not concatenate: endpoint mismatch")
        return Path(self.start, self.steps + other.steps)


def _reduce(start: Vertex, word: Iterable[int]) -> tuple[Vertex, list[int]]:
    """Cyclic free reduction of a closed word; returns the shifted start."""
    stack: list[int] = []
    for s in word:
        if stack and stack[-1] == -s:
            stack.pop()
        else:
            stack.append(s)
    i, j = 0, len(stack) - 1
    while i < j and stack[i] == -stack[j]:
        start = step_vertex(start, stack[i])
        i += 1
        j -= 1
    return start, stack[i:j + 1]


def _vertices(start: Vertex, word: Sequence[int]) -> list[Vertex]:
    out = [start]
    v = list(start)
    for s in word[:-1]:
        if s > 0:
            v[s - 1] += 1
        else:
            v[-s - 1] -= 1
        out.append(tuple(v))
    return out


def _canonical_rotation(verts: list[Vertex], word: Sequence[int]) -> int:
    n = len(word)
    codes = [(verts[k], abs(word[k]), 1 if word[k] > 0 else -1) for k in range(n)]
    best = min(codes)
    cands = [k for k in range(n) if codes[k] == best]
    if len(cands) == 1:
        return cands[0]
    return min(cands, key=lambda k: codes[k:] + codes[:k])


@dataclass(frozen=True, eq=True)
class Loop:
    """Canonical nonbacktracking cycle.  Build with :meth:`from_word`.

    The null loop has an empty word and an empty start vertex.
    """

    start: Vertex
    steps: Word

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.start, self.steps))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def from_word(cls, start: Sequence[int], word: Iterable[int]) -> "Loop":
        """Nonbacktracking core of the closed path ``start``/``word``."""
        start = tuple(start)
        word = list(word)
        v = start
        for s in word:
            if s == 0 or abs(s) > len(start):
                raise LoopError(f"step {s} invalid in dimension {len(start)}")
            v = step_vertex(v, s)
        if v != start:
            raise LoopError("path is not closed")
        return cls._core(start, word)

    @classmethod
    def _core(cls, start: Vertex, word: Iterable[int]) -> "Loop":
        # trusted path: word is known to be closed from start
        start, red = _reduce(start, word)
        if not red:
            return NULL_LOOP
        verts = _vertices(start, red)
        r = _canonical_rotation(verts, red)
        return _make_loop(verts[r], tuple(red[r:] + red[:r]))

    def __len__(self) -> int:
        return len(self.steps)

    def __repr__(self) -> str:
        return f"Loop({to_dsl(self)!r})"

    @property
    def is_null(self) -> bool:
        return not self.steps

    @property
    def dim(self) -> int:
        return len(self.start)

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        if not self.steps:
            return ()
        return tuple(_vertices(self.start, self.steps))

    @cached_property
    def edge_keys(self) -> tuple[EdgeKey, ...]:
        return tuple(zip(self.vertices, self.steps))

    @property
    def edges(self) -> list[Edge]:
        return [Edge.from_key(k) for k in self.edge_keys]

    @property
    def first_edge(self) -> Edge:
        if self.is_null:
            raise LoopError("the null loop has no edges")
        return Edge.from_key(self.edge_keys[0])

    def rotated(self, x: int) -> tuple[Vertex, Word]:
        """Start vertex and word of the rotation beginning at location ``x``."""
        return self.vertices[x], self.steps[x:] + self.steps[:x]

    def inverse(self) -> "Loop":
        if self.is_null:
            return self
        return Loop._core(self.start, invert_word(self.steps))

    def translate(self, shift: Sequence[int]) -> "Loop":
        if self.is_null:
            return self
        return _make_loop(tuple(map(add, self.start, shift)), self.steps)

    def as_path(self) -> Path:
        return Path(self.start, self.steps)


NULL_LOOP = Loop((), ())


def _make_loop(start: Vertex, steps: Word) -> Loop:
    # trusted constructor for internal hot paths; skips the dataclass __init__
    obj = object.__new__(Loop)
    obj.__dict__.update(start=start, steps=steps)
    return obj


def nonbacktracking_core(path: Path) -> Loop:
    if not path.closed:
        raise LoopError("nonbacktracking core requires a closed path")
    return Loop._core(path.start, path.steps)


def canonicalize(path: Path) -> Loop:
    """Canonical representative of a nonbacktracking cycle; rejects backtracks."""
    if not path.closed:
        raise LoopError("cycle must be closed")
    n = len(path.steps)
    for i in range(n):
        if path.steps[i] == -path.steps[(i + 1) % n] and n > 0:
            raise LoopError(f"backtrack at location {i}")
    return Loop._core(path.start, path.steps)


@dataclass(frozen=True)
class LoopSequence:
    """Minimal representation of a loop sequence (null loops dropped)."""

    loops: tuple[Loop, ...] = ()

    def __post_init__(self):
        if any(not l.steps for l in self.loops):
            object.__setattr__(self, "loops", tuple(l for l in self.loops if l.steps))

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.loops)
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def of(cls, *loops: Loop) -> "LoopSequence":
        return cls(tuple(loops))

    def __iter__(self) -> Iterator[Loop]:
        return iter(self.loops)

    def __len__(self) -> int:
        return len(self.loops)

    def __getitem__(self, r: int) -> Loop:
        return self.loops[r]

    def __repr__(self) -> str:
        return f"LoopSequence({to_dsl(self)!r})"

    @property
    def is_null(self) -> bool:
        return not self.loops

    @property
    def length(self) -> int:
        return sum(len(l) for l in self.loops)

    @property
    def size(self) -> int:
        return len(self.loops)

    @property
    def index(self) -> int:
        return self.length - self.size

    @property
    def degree_sequence(self) -> tuple[int, ...]:
        return tuple(len(l) for l in self.loops)

    def replace(self, r: int, *new: Loop) -> "LoopSequence":
        kept = tuple(l for l in new if l.steps)
        return _make_sequence(self.loops[:r] + kept + self.loops[r + 1:])

    def translate(self, shift: Sequence[int]) -> "LoopSequence":
        return _make_sequence(tuple(l.translate(shift) for l in self.loops))

    def inverse_loop(self, r: int) -> "LoopSequence":
        return self.replace(r, self.loops[r].inverse())


NULL_SEQUENCE = LoopSequence()


def _make_sequence(loops: tuple[Loop, ...]) -> LoopSequence:
    # trusted: every loop is already known to be non-null
    obj = object.__new__(LoopSequence)
    obj.__dict__["loops"] = loops
    return obj


def measures(s: LoopSequence) -> tuple[int, int, int, tuple[int, ...]]:
    """``(|s|, #s, index, degree sequence)``."""
    return s.length, s.size, s.index, s.degree_sequence


def canonical_key(s: LoopSequence) -> tuple:
    """Translation-normalized key: loop 1's smallest vertex moved to the origin."""
    if not s.loops:
        return ()
    o = s.loops[0].start
    return tuple(
        (tuple(a - b for a, b in zip(l.start, o)), l.steps) for l in s.loops
    )


def mod2_chain(s: LoopSequence) -> frozenset[tuple[Vertex, int]]:
    """Undirected edges used an odd number of times, as ``(lower end, axis)``."""
    odd: set[tuple[Vertex, int]] = set()
    for l in s.loops:
        for v, st in l.edge_keys:
            e = (v, st) if st > 0 else (step_vertex(v, st), -st)
            odd ^= {e}
    return frozenset(odd)


def filling_bound(s: LoopSequence) -> int:
    """Lower bound on the plaquettes needed to fill ``s`` mod 2.

    Every operation other than a deformation preserves the mod-2 edge chain
    of the whole sequence, and a deformation adds one plaquette boundary.
    The chain is projected onto each coordinate plane, where the mod-2
    filling is unique; the areas add up because each plaquette lies in one
    plane.  Any vanishing history uses at least this many deformations, and
    the count has the same parity.
    """
    chain = mod2_chain(s)
    if not chain:
        return 0
    dim = len(next(iter(chain))[0])
    total = 0
    for mu in range(1, dim + 1):
        for nu in range(mu + 1, dim + 1):
            cols: dict[int, list[int]] = {}
            for v, axis in chain:
                if axis == mu:
                    cols.setdefault(v[mu - 1], []).append(v[nu - 1])
            for heights in cols.values():
                # projection can stack edges; keep odd multiplicities only
                odd = sorted(h for h in set(heights) if heights.count(h) % 2)
                total += sum(odd[j + 1] - odd[j] for j in range(0, len(odd) - 1, 2))
    return total


def plaquette(corner: Sequence[int], i: int, j: int) -> Loop:
    """Positively oriented plaquette at ``corner`` spanning axes ``i < j``.

    The second-smallest vertex of the unit square is ``corner + unit(j)``,
    so the positive orientation runs ``+j +i -j -i``.
    """
    if not i < j:
        raise LoopError("plaquette axes must satisfy i < j")
    return Loop.from_word(corner, (j, i, -j, -i))


def plaquettes_containing(edge: Edge | EdgeKey, dim: int) -> tuple[Loop, ...]:
    """Positively oriented plaquettes containing ``edge`` or its inverse.

    Ordered by the other axis, then lower corner first; 2(d-1) in total.
    """
    key = edge.key if isinstance(edge, Edge) else edge
    return _plaquettes_at(key, dim)


@lru_cache(maxsize=1 << 16)
def _plaquettes_at(key: EdgeKey, dim: int) -> tuple[Loop, ...]:
    base, step = key
    if step < 0:
        base, step = edge_inverse(key)
    mu = step
    out = []
    for nu in range(1, dim + 1):
        if nu == mu:
            continue
        i, j = min(mu, nu), max(mu, nu)
        out.append(plaquette(step_vertex(base, -nu), i, j))
        out.append(plaquette(base, i, j))
    return tuple(out)


# ---------------------------------------------------------------------------
# loop DSL

_ALIASES = {"x": 1, "y": 2, "z": 3}


class DSLError(ValueError):
    pass


def _parse_token(tok: str, dim: int, where: str) -> int:
    if len(tok) == 2 and tok[0] in _ALIASES and tok[1] in "+-":
        axis = _ALIASES[tok[0]]
        sign = 1 if tok[1] == "+" else -1
    elif len(tok) >= 2 and tok[0] in "+-" and tok[1:].isdigit():
        axis = int(tok[1:])
        sign = 1 if tok[0] == "+" else -1
    else:
        raise DSLError(f"{where}: bad token {tok!r}")
    if not 1 <= axis <= dim:
        raise DSLError(f"{where}: axis {axis} out of range for dim {dim}")
    return sign * axis


def parse_loop(text: str, dim: int, *, where: str = "loop 1") -> Loop:
    text = text.strip()
    start: Vertex = (0,) * dim
    if text.startswith("@"):
        close = text.find(")")
        if not text.startswith("@(") or close < 0:
            raise DSLError(f"{where}: malformed start vertex")
        try:
            start = tuple(int(c) for c in text[2:close].split(","))
        except ValueError:
            raise DSLError(f"{where}: malformed start vertex {text[:close + 1]!r}") from None
        if len(start) != dim:
            raise DSLError(f"{where}: start vertex has {len(start)} coords, expected {dim}")
        text = text[close + 1:]
    word = [
        _parse_token(tok, dim, f"{where}, token {n + 1}")
        for n, tok in enumerate(text.split())
    ]
    v = start
    for s in word:
        v = step_vertex(v, s)
    if v != start:
        raise DSLError(f"{where}: path is not closed (ends at {v}, starts at {start})")
    return Loop._core(start, word)


def parse_loop_dsl(text: str, dim: int) -> LoopSequence:
    """Parse ``;``-separated loops into a minimal loop sequence."""
    if dim < 2:
        raise DSLError("dimension must be at least 2")
    parts = text.split(";")
    loops = [parse_loop(p, dim, where=f"loop {r + 1}") for r, p in enumerate(parts) if p.strip()]
    return LoopSequence(tuple(loops))


def to_dsl(obj: Loop | LoopSequence) -> str:
    if isinstance(obj, Loop):
        if obj.is_null:
            return ""
        start = ",".join(str(c) for c in obj.start)
        return f"@({start}) " + " ".join(f"{s:+d}" for s in obj.steps)
    return " ; ".join(to_dsl(l) for l in obj.loops)
