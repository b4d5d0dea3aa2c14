import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rbolab.evolution import EvolutionConfig, cfl_suggest
from rbolab.functionals import WaveParams, h_half_norm, random_zero_mean_field
from rbolab.ground_state import petviashvili_solve
from rbolab.soliton import SolitonSpec, bo_soliton, rbo_residual
from rbolab.spectral import Grid, RealField, derivative, mean
from rbolab.stability import (
    BOUNDED_FACTOR,
    GammaStudyRow,
    StabilityReport,
    fit_speed,
    gamma_convergence_study,
    orbital_distance,
    perturb,
    run_stability_experiment,
    translate,
    uniqueness_probe,
)

G = Grid(1024, 32.0)


@pytest.fixture(scope="module")
def psi():
    return petviashvili_solve(WaveParams(1.0, 0.05), G).psi


def roll(u, m):
    return RealField(u.grid, np.roll(u.values, m))


# -- orbital distance -----------------------------------------------------------

def test_exact_grid_translate(psi):
    m = int(round(5.0 / G.dx))
    d, z = orbital_distance(roll(psi, m), psi)
    assert d <= 1e-10
    assert z == pytest.approx(5.0, abs=1e-9)


def test_sub_grid_translate(psi):
    u = translate(psi, -0.37 * G.dx - 2.0)
    d, z = orbital_distance(u, psi)
    assert z == pytest.approx(2.0 + 0.37 * G.dx, abs=1e-6 * G.dx)
    assert d <= 1e-9


def test_distance_bounded_by_unshifted(psi):
    u = psi + 0.1 * random_zero_mean_field(G, np.random.default_rng(0))
    d, _ = orbital_distance(u, psi)
    assert d <= h_half_norm(u - psi)


def test_small_perturbation(psi):
    eta = random_zero_mean_field(G, np.random.default_rng(1))
    eta = eta / h_half_norm(eta)
    d, _ = orbital_distance(psi + 1e-3 * eta, psi)
    assert d <= 1e-3


@given(m=st.integers(-G.n, G.n), seed=st.integers(0, 2 ** 10))
@settings(max_examples=15, deadline=None)
def test_simultaneous_translation_invariance(psi, m, seed):
    u = roll(psi, 37) + 0.2 * random_zero_mean_field(G, np.random.default_rng(seed))
    d0, _ = orbital_distance(u, psi)
    d1, _ = orbital_distance(roll(u, m), roll(psi, m))
    assert d1 == pytest.approx(d0, abs=1e-10)


def test_minimizer_beats_shift_scan(psi):
    u = translate(psi, 3.3) + 0.3 * random_zero_mean_field(G, np.random.default_rng(5))
    d, z = orbital_distance(u, psi)
    scan = np.linspace(-G.half_length, G.half_length, 64, endpoint=False)
    scan = np.concatenate([scan, z + np.linspace(-2 * G.dx, 2 * G.dx, 64)])
    for s in scan:
        assert d <= h_half_norm(translate(u, s) - psi) + 1e-12


def test_tie_break_prefers_smaller_shift():
    g = Grid(512, 32.0)
    bump = RealField(g, np.exp(-4 * g.x ** 2))
    a, b = int(2.0 / g.dx), int(5.0 / g.dx)
    u = roll(bump, a) + roll(bump, -b)
    _, z = orbital_distance(u, bump)
    assert z == pytest.approx(2.0, abs=G.dx)


def test_grid_mismatch(psi):
    with pytest.raises(ValueError):
        orbital_distance(psi, bo_soliton(SolitonSpec(1.0), Grid(512, 32.0)))


# -- perturbations ------------------------------------------------------------

def test_perturb_zero_amp_is_identity(psi):
    assert np.array_equal(perturb(psi, 0.0, 3).values, psi.values)


@pytest.mark.parametrize("mode", ["even-noise", ("single-mode", 7)])
def test_perturb_distance_and_properties(psi, mode):
    u = perturb(psi, 0.02, 11, mode)
    eta = u - psi
    assert h_half_norm(eta) == pytest.approx(0.02 * h_half_norm(psi), rel=1e-12)
    assert abs(mean(eta)) <= 1e-14
    v = eta.values
    assert np.max(np.abs(v - v[G.reflect_index])) <= 1e-14 * np.max(np.abs(v))
    c = np.fft.fft(v)
    assert np.max(np.abs(c[np.abs(G.k) > G.n // 6])) <= 1e-12 * np.max(np.abs(c))


def test_perturb_is_deterministic(psi):
    assert np.array_equal(perturb(psi, 0.01, 4).values, perturb(psi, 0.01, 4).values)
    assert not np.array_equal(perturb(psi, 0.01, 4).values, perturb(psi, 0.01, 5).values)


def test_perturb_validation(psi):
    with pytest.raises(ValueError):
        perturb(psi, -0.1, 0)
    with pytest.raises(ValueError):
        perturb(psi, 0.1, 0, "odd-noise")
    with pytest.raises(ValueError):
        perturb(psi, 0.1, 0, ("single-mode", G.n))


# -- experiments ----------------------------------------------------------------

def test_unperturbed_run_tracks_residual_drift(gs_001):
    r, _ = rbo_residual(gs_001.psi, gs_001.params)
    rate = h_half_norm(derivative(r))
    dt = cfl_suggest(gs_001.psi) / 16
    rep = run_stability_experiment(gs_001, 0.0, 0, 5.0,
                                   EvolutionConfig(dt=dt, t_end=5.0, save_stride=int(0.5 / dt)))
    assert np.all(rep.orbital_distances <= 5 * rep.times * rate + 1e-12)


def test_soliton_baseline_is_bounded(desk_grid):
    gs = petviashvili_solve(WaveParams(1.0, 0.0), desk_grid)
    u0 = perturb(gs.psi, 1e-2, 0)
    dt = cfl_suggest(u0)
    rep = run_stability_experiment(gs, 1e-2, 0, 50.0,
                                   EvolutionConfig(dt=dt, t_end=50.0, save_stride=int(1.0 / dt)))
    assert rep.verdict == "bounded"
    assert rep.threshold == BOUNDED_FACTOR * rep.orbital_distances[0]
    assert np.all(rep.orbital_distances >= 0) and np.all(np.diff(rep.times) > 0)


def test_report_verdict_consistency():
    p = WaveParams(1.0, 0.0)
    t = np.array([0.0, 1.0])
    ok = StabilityReport(p, 0.1, 0, t, np.array([1.0, 5.0]), np.zeros(2), np.zeros(2), np.zeros(2), 10.0)
    bad = StabilityReport(p, 0.1, 0, t, np.array([1.0, 15.0]), np.zeros(2), np.zeros(2), np.zeros(2), 10.0)
    assert ok.bounded and not bad.bounded and bad.verdict == "escaped"


def test_fit_speed_unwraps():
    t = np.linspace(0, 10, 21)
    z = (t * 7.0 + 31.0) % 64.0 - 32.0
    assert fit_speed(t, z, 64.0) == pytest.approx(7.0, rel=1e-12)


def test_gamma_study_rows():
    rows = gamma_convergence_study(1.0, [0.1, 0.05, 0.02], G)
    assert [r.gamma for r in rows] == [0.1, 0.05, 0.02]
    assert all(isinstance(r, GammaStudyRow) for r in rows)
    assert all(np.isfinite([r.m_value, r.dist_h12_to_q, r.residual_rel]).all() for r in rows)
    m = [r.m_value for r in rows]
    d = [r.dist_h12_to_q for r in rows]
    assert m[0] > m[1] > m[2]
    assert d[0] > d[1] > d[2]


def test_uniqueness_probe_conventions():
    assert uniqueness_probe(1.0, 0.05, ["soliton"], G) == 0.0
    assert uniqueness_probe(1.0, 0.05, ["gaussian", "gaussian"], G) == 0.0
    with pytest.raises(ValueError):
        uniqueness_probe(1.0, 0.0, ["soliton"], G)


def test_uniqueness_probe_multistart():
    tol = 1e-10
    assert uniqueness_probe(1.0, 0.05, ["gaussian", "sech2", "soliton"], G) <= 100 * tol
