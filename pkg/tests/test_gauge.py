import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import P, seq
from loopstrings.gauge import (
    BoxError,
    GaugeConfig,
    LatticeBox,
    MCEstimate,
    Metropolis,
    RunSettings,
    estimate_phi,
    haar_sample,
    integrated_autocorr,
    master_equation_residual,
    reorthogonalize,
    residual_terms,
    simulate,
    so2_bessel_ratio,
    so2_plaquette_oracle,
    son_class_average,
    son_plaquette_oracle,
)
from loopstrings.loops import NULL_SEQUENCE


def gen(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


# -- Haar sampling -------------------------------------------------------------------

@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_haar_samples_are_special_orthogonal(N):
    Q = haar_sample(N, gen(N), 500)
    assert Q.shape == (500, N, N)
    assert np.abs(np.swapaxes(Q, -1, -2) @ Q - np.eye(N)).max() < 1e-12
    assert np.abs(np.linalg.det(Q) - 1).max() < 1e-12


@pytest.mark.parametrize("N", [2, 3, 4])
def test_haar_moments(N):
    n = 100_000
    Q = haar_sample(N, gen(10 + N), n)
    # every entry has mean 0 and variance 1/N
    m = Q.mean(axis=0)
    assert np.all(np.abs(m) <= 4 * math.sqrt(1 / N / n))
    tr = np.trace(Q, axis1=-2, axis2=-1)
    assert abs(tr.mean()) <= 4 * tr.std() / math.sqrt(n)
    # E[(Tr Q)^2] = 1 for N >= 3; for SO(2) it is E[4 cos^2] = 2
    want = 2.0 if N == 2 else 1.0
    sq = tr ** 2
    assert abs(sq.mean() - want) <= 4 * sq.std() / math.sqrt(n)


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_weyl_integration_moments(N):
    assert son_class_average(N, lambda t: np.ones_like(t)) == pytest.approx(1.0)
    assert son_class_average(N, lambda t: t) == pytest.approx(0.0, abs=1e-10)
    assert son_class_average(N, lambda t: t ** 2) == pytest.approx(1.0, abs=1e-10)


def test_reorthogonalize_projects_back():
    Q = haar_sample(4, gen(1), 10)
    R = reorthogonalize(Q + 1e-6 * gen(2).standard_normal(Q.shape))
    assert np.abs(np.swapaxes(R, -1, -2) @ R - np.eye(4)).max() < 1e-12
    assert np.abs(R - Q).max() < 1e-5


# -- boxes ---------------------------------------------------------------------------

def test_box_counts():
    for dim, side in ((2, 2), (2, 8), (3, 3), (4, 2)):
        b = LatticeBox.cube(dim, side)
        assert b.n_edges() == len(b.edges()) == dim * (side - 1) * side ** (dim - 1)
        assert b.n_plaquettes() == len(b.plaquettes()) == math.comb(dim, 2) * (side - 1) ** 2 * side ** (dim - 2)
    with pytest.raises(BoxError):
        LatticeBox(2, (1, 4))


def test_margins_and_centering():
    b = LatticeBox.cube(2, 8)
    p = seq(P)
    b.check_sequence(p, margin=0)
    with pytest.raises(BoxError):
        b.check_sequence(p, margin=1)
    c = b.center(p)
    b.check_sequence(c, margin=3)
    with pytest.raises(BoxError):
        b.check_sequence(seq(P, 3), margin=0)
    with pytest.raises(BoxError):
        estimate_phi(p, RunSettings(2, 0.1, LatticeBox.cube(2, 2)), margin=1)


# -- configurations and updates --------------------------------------------------------

def test_identity_config_wilson_loops():
    b = LatticeBox.cube(2, 4)
    cfg = GaugeConfig.identity(b, 3, chains=2)
    p = b.center(seq(P))
    assert np.allclose(cfg.wilson(p[0]), 3.0)
    assert np.allclose(cfg.phi(p), 1.0)
    assert np.allclose(cfg.phi(NULL_SEQUENCE), 1.0)
    assert np.allclose(cfg.mean_plaquette(), 1.0)


def test_wilson_loop_of_inverse_matches():
    b = LatticeBox.cube(2, 4)
    cfg = GaugeConfig.random(b, 4, gen(3), chains=3)
    p = b.center(seq(P))
    # SO(N) traces are real and invariant under inversion
    assert np.allclose(cfg.wilson(p[0]), cfg.wilson(p[0].inverse()))
    assert np.all(np.abs(cfg.phi(p)) <= 1 + 1e-12)


def test_zero_coupling_accepts_everything():
    cfg = GaugeConfig.random(LatticeBox.cube(2, 3), 3, gen(4), chains=2)
    mc = Metropolis(cfg, 0.0, 0.5, gen(5))
    assert mc.sweep() == 1.0
    with pytest.raises(ValueError):
        Metropolis(cfg, 0.1, 0.0, gen(5))


def test_orthogonality_is_maintained():
    st_ = RunSettings(4, 0.3, LatticeBox.cube(2, 4), sweeps=400, warmup=100, chains=4, seed=7)
    run = simulate(st_, {"p": LatticeBox.cube(2, 4).center(seq(P))})
    orth, det = run.max_defect
    assert orth < 1e-8 and det < 1e-8
    assert 0 < run.acceptance <= 1


def test_simulation_is_reproducible():
    box = LatticeBox.cube(2, 4)
    st_ = RunSettings(3, 0.2, box, sweeps=40, warmup=20, chains=2, seed=11)
    a = simulate(st_, {"p": box.center(seq(P))})
    b = simulate(st_, {"p": box.center(seq(P))})
    assert np.array_equal(a.series["p"], b.series["p"])


# -- estimates -----------------------------------------------------------------------

def test_null_sequence_phi_is_one():
    e = estimate_phi(NULL_SEQUENCE, RunSettings(3, 0.1, LatticeBox.cube(2, 4)))
    assert e.mean == 1.0 and e.stderr == 0.0


def test_estimates_of_iid_noise():
    x = gen(6).standard_normal((8, 4000))
    e = MCEstimate.from_series(x)
    assert abs(e.mean) < 4 * e.stderr
    assert e.stderr == pytest.approx(1 / math.sqrt(x.size), rel=0.25)
    assert integrated_autocorr(x) < 1.0


def test_autocorrelated_series_has_larger_tau():
    rng = gen(7)
    x = np.zeros((4, 4000))
    for t in range(1, 4000):
        x[:, t] = 0.9 * x[:, t - 1] + rng.standard_normal(4)
    # AR(1) with rho = 0.9 has tau = (1 + rho) / (2 (1 - rho)) = 9.5
    assert 6 < integrated_autocorr(x) < 14


# -- oracles -------------------------------------------------------------------------

@settings(max_examples=20)
@given(st.floats(0.0, 1.5))
def test_so2_quadrature_matches_bessel(beta):
    assert so2_plaquette_oracle(beta) == pytest.approx(so2_bessel_ratio(beta), abs=1e-10)


def test_son_oracle_small_coupling():
    # to first order <Tr Q>/N = N beta E[(Tr Q)^2] / N = beta for N >= 3
    for N in (3, 4, 6):
        assert son_plaquette_oracle(N, 1e-4) == pytest.approx(1e-4, rel=1e-3)
    assert son_plaquette_oracle(2, 0.2) == so2_plaquette_oracle(0.2)


def test_son_sampler_matches_oracle():
    box = LatticeBox.cube(2, 3)
    st_ = RunSettings(3, 0.2, box, sweeps=1500, warmup=200, chains=16, seed=3)
    e = estimate_phi(box.center(seq(P)), st_, margin=0)
    assert abs(e.mean - son_plaquette_oracle(3, 0.2)) <= 4 * e.stderr


# -- master equation -----------------------------------------------------------------

def test_residual_terms_of_plaquette():
    terms = residual_terms(seq(P), 4, 0.1, 2)
    assert terms[0] == (3 * 4, seq(P))
    assert len(terms) == 1 + 16
    # residual is lhs minus rhs: negative deformations that vanish enter with -N beta
    assert sum(c for c, t in terms[1:] if t.is_null) == pytest.approx(-4 * 4 * 0.1)
    twice = seq(f"{P} {P}")
    assert sum(c for c, t in terms if t == twice) == pytest.approx(4 * 4 * 0.1)
    # first order: 12 phi(p) - 1.6 + 1.6 phi(pp) with phi(pp) = E[Tr Q^2] / N = 1/4
    phi_p = son_plaquette_oracle(4, 0.1)
    assert abs(12 * phi_p - 1.6 + 0.4) < 0.05


def test_residual_of_null_sequence():
    r = master_equation_residual(NULL_SEQUENCE, RunSettings(3, 0.1, LatticeBox.cube(2, 4)))
    assert r.residual.mean == 0.0 and r.z == 0.0


def test_residual_needs_room_for_deformations():
    with pytest.raises(BoxError):
        master_equation_residual(seq(P), RunSettings(3, 0.1, LatticeBox.cube(2, 4)))
