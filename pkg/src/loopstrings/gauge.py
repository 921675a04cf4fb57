"""Monte Carlo SO(N) lattice gauge theory on a box with free boundary.

The box is ``{0..L_1-1} x ... x {0..L_d-1}``.  Edge matrices live in one
array of shape ``(chains, d, L_1, ..., L_d, N, N)``; slot ``[c, mu, x]`` is
the edge from ``x`` to ``x + unit(mu)``.  Slots whose edge leaves the box
are kept at the identity and never read, because every plaquette that
would use them is masked out.

Independent chains are updated together.  Within a chain, edges along
``mu`` whose remaining coordinates have the same parity share no
plaquette, so each such class is updated in one vectorized step.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from .loops import Loop, LoopSequence, to_dsl
from .ops import DEFORM, MERGE, SPLIT, TWIST, iter_operations


class BoxError(ValueError):
    """A loop, or a loop derived from it, does not fit in the box."""


# -- geometry ------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeBox:
    dim: int
    sides: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 2 or len(self.sides) != self.dim or min(self.sides) < 2:
            raise BoxError("box needs d >= 2 sides, each at least 2")

    @classmethod
    def cube(cls, dim: int, side: int) -> "LatticeBox":
        return cls(dim, (side,) * dim)

    def contains(self, v: Sequence[int]) -> bool:
        return all(0 <= c < L for c, L in zip(v, self.sides))

    def edges(self) -> list[tuple[tuple[int, ...], int]]:
        """Positive edges ``(x, mu)`` with both ends in the box."""
        out = []
        for mu in range(1, self.dim + 1):
            ranges = [range(L - 1) if a == mu - 1 else range(L) for a, L in enumerate(self.sides)]
            out.extend((x, mu) for x in itertools.product(*ranges))
        return out

    def plaquettes(self) -> list[tuple[tuple[int, ...], int, int]]:
        """Positively oriented plaquettes ``(corner, mu, nu)``, ``mu < nu``."""
        out = []
        for mu in range(1, self.dim + 1):
            for nu in range(mu + 1, self.dim + 1):
                ranges = [
                    range(L - 1) if a in (mu - 1, nu - 1) else range(L)
                    for a, L in enumerate(self.sides)
                ]
                out.extend((x, mu, nu) for x in itertools.product(*ranges))
        return out

    def n_edges(self) -> int:
        return sum(
            (self.sides[m] - 1) * math.prod(L for a, L in enumerate(self.sides) if a != m)
            for m in range(self.dim)
        )

    def n_plaquettes(self) -> int:
        total = 0
        for m, n in itertools.combinations(range(self.dim), 2):
            total += (self.sides[m] - 1) * (self.sides[n] - 1) * math.prod(
                L for a, L in enumerate(self.sides) if a not in (m, n)
            )
        return total

    def check_sequence(self, s: LoopSequence, margin: int = 1) -> None:
        """Every vertex within ``margin`` of ``s`` must lie in the box."""
        for l in s.loops:
            if l.dim != self.dim:
                raise BoxError(f"loop dimension {l.dim} != box dimension {self.dim}")
            for v in l.vertices:
                for a in range(self.dim):
                    if not margin <= v[a] <= self.sides[a] - 1 - margin:
                        raise BoxError(
                            f"loop {to_dsl(l)} leaves the box {self.sides} with margin {margin}"
                        )

    def center(self, s: LoopSequence) -> LoopSequence:
        """Translate ``s`` so its bounding box sits in the middle of this box."""
        verts = [v for l in s.loops for v in l.vertices]
        if not verts:
            return s
        lo = [min(v[a] for v in verts) for a in range(self.dim)]
        hi = [max(v[a] for v in verts) for a in range(self.dim)]
        shift = tuple((L - 1 - (h - l)) // 2 - l for L, l, h in zip(self.sides, lo, hi))
        return s.translate(shift)


# -- group sampling ------------------------------------------------------------

def haar_sample(N: int, rng: np.random.Generator, size: Optional[int | tuple] = None) -> np.ndarray:
    """Haar-distributed SO(N) matrices, shape ``size + (N, N)``."""
    if N < 2:
        raise ValueError("N must be at least 2")
    shape = () if size is None else ((size,) if isinstance(size, int) else tuple(size))
    z = rng.standard_normal(shape + (N, N))
    q, r = np.linalg.qr(z)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d[d == 0] = 1.0
    q = q * d[..., None, :]
    neg = np.linalg.det(q) < 0
    q[neg, :, 0] *= -1.0
    return q


def reorthogonalize(U: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(U)
    return u @ vh


def plane_rotations(N: int, angles: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Rotations by ``angles`` in uniformly chosen coordinate planes."""
    n = angles.shape[0]
    pairs = np.array(list(itertools.combinations(range(N), 2)))
    pick = pairs[rng.integers(len(pairs), size=n)]
    R = np.broadcast_to(np.eye(N), (n, N, N)).copy()
    c, s = np.cos(angles), np.sin(angles)
    idx = np.arange(n)
    a, b = pick[:, 0], pick[:, 1]
    R[idx, a, a] = c
    R[idx, b, b] = c
    R[idx, a, b] = -s
    R[idx, b, a] = s
    return R


# -- configurations ------------------------------------------------------------

@dataclass
class GaugeConfig:
    """Edge matrices for ``chains`` independent copies of the box."""

    box: LatticeBox
    N: int
    U: np.ndarray

    @classmethod
    def identity(cls, box: LatticeBox, N: int, chains: int = 1) -> "GaugeConfig":
        shape = (chains, box.dim) + box.sides + (N, N)
        return cls(box, N, np.broadcast_to(np.eye(N), shape).copy())

    @classmethod
    def random(cls, box: LatticeBox, N: int, rng: np.random.Generator, chains: int = 1) -> "GaugeConfig":
        cfg = cls.identity(box, N, chains)
        for mu in range(box.dim):
            m = _edge_mask(box, mu)
            cfg.U[:, mu][:, m] = haar_sample(N, rng, (chains, int(m.sum())))
        return cfg

    @property
    def chains(self) -> int:
        return self.U.shape[0]

    def max_defect(self) -> tuple[float, float]:
        """Largest deviation from orthogonality and from det = 1."""
        U = self.U.reshape(-1, self.N, self.N)
        orth = np.abs(np.swapaxes(U, -1, -2) @ U - np.eye(self.N)).max()
        det = np.abs(np.linalg.det(U) - 1.0).max()
        return float(orth), float(det)

    def edge(self, x: Sequence[int], step: int) -> np.ndarray:
        """Matrices of the directed edge leaving ``x`` by ``step``, shape (chains, N, N)."""
        mu = abs(step) - 1
        if step > 0:
            return self.U[(slice(None), mu) + tuple(x)]
        y = list(x)
        y[mu] -= 1
        return np.swapaxes(self.U[(slice(None), mu) + tuple(y)], -1, -2)

    def wilson(self, l: Loop) -> np.ndarray:
        """Tr of the ordered edge product along ``l`` for every chain."""
        if l.is_null:
            return np.full(self.chains, float(self.N))
        M = None
        for v, st in l.edge_keys:
            E = self.edge(v, st)
            M = E if M is None else M @ E
        return np.trace(M, axis1=-2, axis2=-1)

    def phi(self, s: LoopSequence) -> np.ndarray:
        """prod_r W_{l_r} / N per chain."""
        out = np.ones(self.chains)
        for l in s.loops:
            out = out * self.wilson(l) / self.N
        return out

    def mean_plaquette(self) -> np.ndarray:
        tot = np.zeros(self.chains)
        n = 0
        for x, mu, nu in self.box.plaquettes():
            P = (self.edge(x, mu) @ self.edge(_shift(x, mu, 1), nu)
                 @ np.swapaxes(self.edge(_shift(x, nu, 1), mu), -1, -2)
                 @ np.swapaxes(self.edge(x, nu), -1, -2))
            tot += np.trace(P, axis1=-2, axis2=-1)
            n += 1
        return tot / (n * self.N)


def _shift(x, axis, by):
    y = list(x)
    y[axis - 1] += by
    return tuple(y)


def _coords(box: LatticeBox) -> list[np.ndarray]:
    return np.meshgrid(*[np.arange(L) for L in box.sides], indexing="ij")


def _edge_mask(box: LatticeBox, mu: int) -> np.ndarray:
    return _coords(box)[mu] <= box.sides[mu] - 2


def _update_masks(box: LatticeBox):
    """Per direction: edge mask, parity classes, and per-plane plaquette masks."""
    X = _coords(box)
    out = []
    for mu in range(box.dim):
        edge = X[mu] <= box.sides[mu] - 2
        par = sum(X[a] for a in range(box.dim) if a != mu) % 2
        planes = []
        for nu in range(box.dim):
            if nu == mu:
                continue
            fwd = edge & (X[nu] <= box.sides[nu] - 2)
            bwd = edge & (X[nu] >= 1)
            planes.append((nu, fwd, bwd))
        out.append((edge, [edge & (par == 0), edge & (par == 1)], planes))
    return out


def _T(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A, -1, -2)


def staples(U: np.ndarray, mu: int, planes) -> np.ndarray:
    """Sum of staples ``A`` so that the local action of edge ``(x, mu)`` is Tr(U A)."""
    A = np.zeros_like(U[:, mu])
    Umu = U[:, mu]
    for nu, fwd, bwd in planes:
        Unu = U[:, nu]
        # U[:, k] has shape (chains, *sides, N, N), so lattice axis a sits at a + 1
        ax_mu, ax_nu = mu + 1, nu + 1
        nu_xmu = np.roll(Unu, -1, axis=ax_mu)
        mu_xnu = np.roll(Umu, -1, axis=ax_nu)
        f = nu_xmu @ _T(mu_xnu) @ _T(Unu)
        nu_xmu_mnu = np.roll(nu_xmu, 1, axis=ax_nu)
        mu_mnu = np.roll(Umu, 1, axis=ax_nu)
        nu_mnu = np.roll(Unu, 1, axis=ax_nu)
        b = _T(nu_xmu_mnu) @ _T(mu_mnu) @ nu_mnu
        A += np.where(fwd[None, ..., None, None], f, 0.0)
        A += np.where(bwd[None, ..., None, None], b, 0.0)
    return A


class Metropolis:
    """Vectorized Metropolis updates for the Wilson action exp(N beta sum Tr Q_p)."""

    def __init__(self, config: GaugeConfig, beta: float, step: float, rng: np.random.Generator):
        if not 0 < step <= math.pi:
            raise ValueError("step size must lie in (0, pi]")
        self.cfg = config
        self.beta = float(beta)
        self.step = float(step)
        self.rng = rng
        self._masks = _update_masks(config.box)

    def sweep(self) -> float:
        """One proposal per edge; returns the acceptance rate."""
        cfg, N, rng = self.cfg, self.cfg.N, self.rng
        U = cfg.U
        accepted = proposed = 0
        for mu, (_, classes, planes) in enumerate(self._masks):
            for cls in classes:
                if not cls.any():
                    continue
                A = staples(U, mu, planes)[:, cls]
                old = U[:, mu][:, cls]
                shape = old.shape[:-2]
                flat = old.reshape(-1, N, N)
                angles = rng.uniform(-self.step, self.step, size=flat.shape[0])
                new = (plane_rotations(N, angles, rng) @ flat).reshape(old.shape)
                delta = np.einsum("...ij,...ji->...", new - old, A)
                if self.beta == 0.0:
                    acc = np.ones(shape, dtype=bool)
                else:
                    acc = rng.random(shape) < np.exp(np.minimum(0.0, N * self.beta * delta))
                old[acc] = new[acc]
                sub = U[:, mu]
                sub[:, cls] = old
                accepted += int(acc.sum())
                proposed += acc.size
        return accepted / proposed if proposed else 1.0


def metropolis_sweep(config: GaugeConfig, beta: float, step: float, rng: np.random.Generator) -> float:
    return Metropolis(config, beta, step, rng).sweep()


# -- estimates -------------------------------------------------------------------

@dataclass
class MCEstimate:
    mean: float
    stderr: float
    n_eff: float
    tau: float
    n_samples: int = 0
    stderr_blocking: float = 0.0

    @classmethod
    def from_series(cls, x: np.ndarray, n_blocks: int = 16) -> "MCEstimate":
        """Estimate from samples of shape ``(chains, T)`` (or ``(T,)``)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        C, T = x.shape
        mean = float(x.mean())
        var = float(x.var())
        if T < 4 or var == 0.0:
            se = math.sqrt(var / x.size) if x.size else 0.0
            return cls(mean, se, float(x.size), 0.5, x.size, se)
        tau = integrated_autocorr(x)
        se_tau = math.sqrt(var * 2 * tau / x.size)
        nb = min(n_blocks, T)
        bl = T // nb
        blocks = x[:, : nb * bl].reshape(C, nb, bl).mean(axis=2).ravel()
        se_blk = float(blocks.std(ddof=1) / math.sqrt(blocks.size)) if blocks.size > 1 else se_tau
        return cls(mean, max(se_tau, se_blk), x.size / (2 * tau), tau, x.size, se_blk)

    def to_json(self) -> dict:
        return asdict(self)


def integrated_autocorr(x: np.ndarray, c: float = 6.0) -> float:
    """Sokal-windowed integrated autocorrelation time, averaged over chains."""
    x = np.atleast_2d(x)
    C, T = x.shape
    y = x - x.mean(axis=1, keepdims=True)
    n = 1 << (2 * T - 1).bit_length()
    f = np.fft.rfft(y, n=n, axis=1)
    acf = np.fft.irfft(f * np.conj(f), n=n, axis=1)[:, :T].mean(axis=0)
    if acf[0] <= 0:
        return 0.5
    rho = acf / acf[0]
    tau = 0.5
    for w in range(1, T):
        tau += rho[w]
        if w >= c * tau:
            break
    return max(tau, 0.5)


# -- simulation driver -------------------------------------------------------------

@dataclass
class RunSettings:
    N: int
    beta: float
    box: LatticeBox
    sweeps: int = 2000
    warmup: int = 200
    chains: int = 16
    seed: int = 0
    step: float = 0.5
    measure_every: Optional[int] = None
    reortho_every: int = 50


@dataclass
class RunResult:
    settings: RunSettings
    series: dict[str, np.ndarray]
    acceptance: float
    step: float
    measure_every: int
    max_defect: tuple[float, float]

    def manifest(self) -> dict:
        st = self.settings
        return {
            "d": st.box.dim, "box": list(st.box.sides), "N": st.N, "beta": st.beta,
            "seed": st.seed, "sweeps": st.sweeps, "warmup": st.warmup, "chains": st.chains,
            "step": self.step, "measure_every": self.measure_every,
            "acceptance": self.acceptance, "max_defect": list(self.max_defect),
        }


def simulate(settings: RunSettings, observables: dict[str, LoopSequence]) -> RunResult:
    """Run the chains and record ``phi`` of every observable after each measurement."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(settings.seed)))
    cfg = GaugeConfig.random(settings.box, settings.N, rng, settings.chains)
    mc = Metropolis(cfg, settings.beta, settings.step, rng)
    trace = []
    for t in range(settings.warmup):
        rate = mc.sweep()
        if t % 10 == 9:
            mc.step = float(np.clip(mc.step * math.exp(rate - 0.5), 1e-3, math.pi))
        if t % settings.reortho_every == settings.reortho_every - 1:
            cfg.U = reorthogonalize(cfg.U)
        trace.append(cfg.mean_plaquette() if t >= settings.warmup // 2 else None)
    every = settings.measure_every
    if every is None:
        tr = np.array([v for v in trace if v is not None]).T
        every = max(1, int(math.ceil(integrated_autocorr(tr)))) if tr.size and tr.shape[1] >= 8 else 1
    series = {name: [] for name in observables}
    rates = []
    for t in range(settings.sweeps):
        rates.append(mc.sweep())
        if t % settings.reortho_every == settings.reortho_every - 1:
            cfg.U = reorthogonalize(cfg.U)
        if t % every == every - 1:
            for name, s in observables.items():
                series[name].append(cfg.phi(s))
    arrays = {k: np.array(v).T for k, v in series.items()}
    return RunResult(settings, arrays, float(np.mean(rates)), mc.step, every, cfg.max_defect())


def estimate_phi(s: LoopSequence, settings: RunSettings, *, margin: int = 1) -> MCEstimate:
    """Estimate of phi_N(s) = <prod_r W_{l_r}> / N^#s."""
    if s.is_null:
        return MCEstimate(1.0, 0.0, math.inf, 0.5, 0, 0.0)
    settings.box.check_sequence(s, margin)
    run = simulate(settings, {"s": s})
    return MCEstimate.from_series(run.series["s"])


# -- finite-N master equation ------------------------------------------------------

@dataclass
class ResidualReport:
    residual: MCEstimate
    lhs: MCEstimate
    n_terms: dict[str, int]
    run: Optional[RunResult] = None

    @property
    def z(self) -> float:
        return abs(self.residual.mean) / self.residual.stderr if self.residual.stderr else 0.0

    def to_json(self) -> dict:
        out = {"residual": self.residual.to_json(), "lhs": self.lhs.to_json(),
               "n_terms": self.n_terms, "z": self.z}
        if self.run is not None:
            out["run"] = self.run.manifest()
        return out


def residual_terms(s: LoopSequence, N: int, beta: float, dim: int) -> list[tuple[float, LoopSequence]]:
    """``(coefficient, s')`` so that the residual is ``sum coef * phi(s')``."""
    terms: list[tuple[float, LoopSequence]] = [((N - 1) * s.length, s)]
    scale = {TWIST: 1.0, SPLIT: float(N), MERGE: 1.0 / N, DEFORM: N * beta}
    for step in iter_operations(s, dim):
        # negative operations enter with +, positive ones with -
        terms.append((step.sign * scale[step.family], step.result))
    return terms


def master_equation_residual(s: LoopSequence, settings: RunSettings) -> ResidualReport:
    """Left minus right side of the finite-N loop equation, from one sample stream."""
    N, beta, box = settings.N, settings.beta, settings.box
    if s.is_null:
        zero = MCEstimate(0.0, 0.0, math.inf, 0.5)
        return ResidualReport(zero, zero, {})
    box.check_sequence(s, margin=1)
    terms = residual_terms(s, N, beta, box.dim)
    obs: dict[str, LoopSequence] = {}
    for _, t in terms:
        obs.setdefault(to_dsl(t), t)
    for t in obs.values():
        box.check_sequence(t, margin=0)
    run = simulate(settings, obs)
    res = sum(c * run.series[to_dsl(t)] for c, t in terms)
    lhs = run.series[to_dsl(s)]
    counts = {f: 0 for f in (TWIST, MERGE, SPLIT, DEFORM)}
    for step in iter_operations(s, box.dim):
        counts[step.family] += 1
    return ResidualReport(MCEstimate.from_series(res), MCEstimate.from_series(lhs), counts, run)


# -- oracles -------------------------------------------------------------------

def so2_plaquette_oracle(beta: float) -> float:
    """E[cos t] under density exp(4 beta cos t): the SO(2) plaquette value."""
    num = integrate.quad(lambda t: math.cos(t) * math.exp(4 * beta * (math.cos(t) - 1)), 0, math.pi)[0]
    den = integrate.quad(lambda t: math.exp(4 * beta * (math.cos(t) - 1)), 0, math.pi)[0]
    return num / den


def so2_bessel_ratio(beta: float) -> float:
    return float(special.i1(4 * beta) / special.i0(4 * beta))


def son_class_average(N: int, f, points: int = 48) -> float:
    """Haar average over SO(N) of a class function ``f(traces)`` by Weyl integration.

    ``f`` receives the array of traces on the quadrature grid.
    """
    n = N // 2
    x, w = np.polynomial.legendre.leggauss(points)
    th = (x + 1) * math.pi / 2
    w = w * math.pi / 2
    grids = np.meshgrid(*([th] * n), indexing="ij")
    wts = np.prod(np.meshgrid(*([w] * n), indexing="ij"), axis=0)
    cos = [np.cos(g) for g in grids]
    dens = np.ones_like(wts)
    for i in range(n):
        for j in range(i + 1, n):
            dens = dens * (cos[i] - cos[j]) ** 2
    tr = 2 * sum(cos)
    if N % 2:
        tr = tr + 1
        for c in cos:
            dens = dens * (1 - c)
    z = wts * dens
    return float((z * f(tr)).sum() / z.sum())


def son_plaquette_oracle(N: int, beta: float, points: int = 48) -> float:
    """<Tr Q>/N under density exp(N beta Tr Q) on SO(N).

    In d = 2 with free boundary the plaquette variables are independent, so
    this is exactly phi_N of a single plaquette anywhere in the box.
    """
    if N == 2:
        return so2_plaquette_oracle(beta)
    shift = N * beta * N
    num = son_class_average(N, lambda t: t * np.exp(N * beta * t - shift), points)
    den = son_class_average(N, lambda t: np.exp(N * beta * t - shift), points)
    return num / den / N


# -- 1/N comparison ----------------------------------------------------------------

@dataclass
class ComparisonRow:
    N: int
    phi: MCEstimate
    series: float
    tail: Optional[float]
    diff: float
    budget: float
    within: bool


@dataclass
class ComparisonReport:
    loop: str
    beta: str
    rigorous: bool
    k_max: int
    rows: list[ComparisonRow] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "loop": self.loop, "beta": self.beta, "rigorous": self.rigorous, "k_max": self.k_max,
            "rows": [
                {"N": r.N, "phi": r.phi.to_json(), "series": r.series, "tail": r.tail,
                 "diff": r.diff, "budget": r.budget, "within": r.within}
                for r in self.rows
            ],
        }

    def decreasing(self, sigmas: float = 3.0) -> bool:
        """Each |phi_N - series| is no larger than the previous one up to noise."""
        rows = sorted(self.rows, key=lambda r: r.N)
        return all(
            b.diff <= a.diff + sigmas * math.hypot(a.phi.stderr, b.phi.stderr)
            for a, b in zip(rows, rows[1:])
        )


def expansion_comparison(
    s: LoopSequence,
    beta: Fraction,
    Ns: Iterable[int],
    engine,
    settings: RunSettings,
    k_max: int = 0,
    i_max: int = 3,
) -> ComparisonReport:
    """Compare phi_N(s) with sum_{k <= k_max} N^-k f_k(s) for several N."""
    from .coefficients import f_partial, frac_str

    parts = [f_partial(engine, s, k, beta, i_max) for k in range(k_max + 1)]
    rigorous = all(p.rigorous for p in parts)
    rep = ComparisonReport(to_dsl(s), frac_str(Fraction(beta)), rigorous, k_max)
    for N in Ns:
        series = sum(float(p.partial_sum) / N ** p.k for p in parts)
        tail = sum(float(p.tail_bound) / N ** p.k for p in parts) if rigorous else None
        if s.is_null:
            est = MCEstimate(1.0, 0.0, math.inf, 0.5)
        else:
            st = RunSettings(**{**asdict_shallow(settings), "N": N, "beta": float(beta)})
            est = estimate_phi(s, st)
        diff = abs(est.mean - series)
        budget = 3 * (est.stderr + (tail or 0.0) + 1.0 / N ** (k_max + 1))
        rep.rows.append(ComparisonRow(N, est, series, tail, diff, budget, diff <= budget))
    return rep


def asdict_shallow(obj) -> dict:
    return {f: getattr(obj, f) for f in obj.__dataclass_fields__}


# -- output ------------------------------------------------------------------------

def write_samples_csv(run: RunResult, fh: IO[str]) -> None:
    """Raw per-measurement values, one row per (chain, time, observable)."""
    w = csv.writer(fh)
    w.writerow(["observable", "chain", "t", "value"])
    for name, arr in run.series.items():
        for c in range(arr.shape[0]):
            for t in range(arr.shape[1]):
                w.writerow([name, c, t, repr(float(arr[c, t]))])


def run_json(run: RunResult, estimates: dict[str, MCEstimate]) -> str:
    doc = dict(run.manifest())
    doc["estimates"] = {k: {"mean": v.mean, "stderr": v.stderr, "n_eff": v.n_eff}
                        for k, v in estimates.items()}
    return json.dumps(doc, sort_keys=True)


__all__ = [
    "BoxError", "LatticeBox", "GaugeConfig", "haar_sample", "reorthogonalize", "Metropolis",
    "metropolis_sweep", "MCEstimate", "integrated_autocorr", "RunSettings", "RunResult",
    "simulate", "estimate_phi", "ResidualReport", "residual_terms", "master_equation_residual",
    "so2_plaquette_oracle", "so2_bessel_ratio", "son_class_average", "son_plaquette_oracle",
    "ComparisonReport", "ComparisonRow", "expansion_comparison", "write_samples_csv", "run_json",
]
