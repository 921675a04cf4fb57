import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from loopstrings.loops import Loop, LoopSequence, invert_word, parse_loop_dsl

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

P = "+1 +2 -1 -2"
P_INV = "+2 +1 -2 -1"
LEN10 = "+1 +1 +2 -1 -2 -1 -1 +2 +1 -2"


def seq(text, dim=2):
    return parse_loop_dsl(text, dim)


def loop(text, dim=2):
    s = parse_loop_dsl(text, dim)
    assert len(s) == 1
    return s[0]


def return_path(word, dim):
    """Shortest word leading back to the start of ``word``."""
    disp = [0] * dim
    for s in word:
        disp[abs(s) - 1] += 1 if s > 0 else -1
    back = []
    for a, d in enumerate(disp):
        back += [-(a + 1) if d > 0 else a + 1] * abs(d)
    return back


@st.composite
def closed_words(draw, dim=2, max_len=12):
    """Closed lattice words: a random walk plus a way home, shuffled cyclically."""
    steps = st.integers(1, dim).flatmap(lambda a: st.sampled_from((a, -a)))
    w = draw(st.lists(steps, max_size=max_len // 2))
    w = w + return_path(w, dim)
    if w:
        r = draw(st.integers(0, len(w) - 1))
        w = w[r:] + w[:r]
    return w


@st.composite
def loops(draw, dim=2, max_len=12):
    start = tuple(draw(st.lists(st.integers(-3, 3), min_size=dim, max_size=dim)))
    w = draw(closed_words(dim, max_len).filter(lambda w: not Loop.from_word((0,) * dim, w).is_null))
    return Loop.from_word(start, w)


@st.composite
def plaquette_words(draw, dim=2, pieces=3):
    """Products of conjugated plaquettes: closed words with many repeated edges."""
    word = []
    for _ in range(draw(st.integers(1, pieces))):
        i, j = draw(st.permutations(range(1, dim + 1)))[:2]
        sg = draw(st.sampled_from((1, -1)))
        g = draw(st.lists(st.integers(1, dim).flatmap(lambda a: st.sampled_from((a, -a))), max_size=3))
        word += g + [sg * i, j, -sg * i, -j] + list(invert_word(g))
    return word


@st.composite
def rich_loops(draw, dim=2, max_len=16):
    w = draw(plaquette_words(dim).filter(
        lambda w: 0 < len(Loop.from_word((0,) * dim, w)) <= max_len))
    return Loop.from_word((0,) * dim, w)


@st.composite
def rich_sequences(draw, dim=2, max_len=16, max_loops=3):
    ls = draw(st.lists(rich_loops(dim, max_len), min_size=1, max_size=max_loops))
    shifts = draw(st.lists(st.lists(st.integers(-1, 1), min_size=dim, max_size=dim),
                           min_size=len(ls), max_size=len(ls)))
    return LoopSequence(tuple(l.translate(tuple(o)) for l, o in zip(ls, shifts)))


@pytest.fixture
def rng():
    return random.Random(12345)


# PASS/FAIL lines from the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
