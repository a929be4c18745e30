import math
from fractions import Fraction

import numpy as np
import pytest

import oracles as O
from fxyz import thermo
from fxyz.bethe import match_spectrum, residue_estimates
from fxyz.chain import ChainParams
from fxyz.elliptic import EllipticParams
from fxyz.errors import ConfigurationError, ParameterError

H, ONE = Fraction(1, 2), Fraction(1)

# mpmath series values, frozen (t = 2; eta = 1/6 unless noted)
FROZEN = {
    0.1: dict(p=-1.0983643967458108, H=-4.423722119161896, gs_half=1.798013523914001, gs_one_eighth=3.508286462973221),
    0.25: dict(p=-0.5440215857933678, H=-2.9539188987130567, gs_half=2.124262190329822, gs_one_eighth=4.013203815843666),
}

# regression fixtures for the solver at t = 2, eta = 1/6, x = 0.1
GROUND_N8_IMAG = [-0.15292583704087656, -0.041145530320344015, 0.041145530320344036, 0.15292583704087653]
DELTA = {8: 0.0005849912809639015, 16: 8.98785120972994e-06, 32: 6.592016710271764e-09}


@pytest.mark.parametrize("x", sorted(FROZEN))
def test_series_frozen(params, params8, x):
    ref = FROZEN[x]
    assert abs(thermo.particle_momentum(x, params) - ref["p"]) < 1e-13
    assert abs(thermo.particle_energy(x, 1.0, params) - ref["H"]) < 1e-13
    assert abs(thermo.gs_series(x, H, params).value - ref["gs_half"]) < 1e-13
    assert abs(thermo.gs_series(x, ONE, params8).value - ref["gs_one_eighth"]) < 1e-13


@pytest.mark.parametrize("x", [-0.47, -0.2, 0.03, 0.31, 0.5])
def test_series_against_mpmath(params, x):
    t, eta = params.t, params.eta
    assert abs(thermo.particle_momentum(x, params) - O.momentum_series(x, t, eta)) < 1e-13
    assert abs(thermo.log_tau(x, params) - O.log_tau_series(x, t, eta)) < 1e-13
    assert abs(thermo.particle_energy(x, 2.5, params) - O.energy_series(x, t, eta, 2.5)) < 1e-12
    assert abs(thermo.gs_series(x, H, params).value - O.ground_series(x, 0.5, t, eta)) < 1e-13


def test_energy_is_derivative_of_momentum(params):
    for x in (-0.3, 0.0, 0.11, 0.42):
        h = 1e-3
        f = [O.momentum_series(x + k * h, params.t, params.eta) for k in (-2, -1, 1, 2)]
        dp = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        assert abs(thermo.particle_energy(x, 1.3, params) + 1.3 * dp) < 1e-8


def test_values_at_zero(params, params8):
    assert thermo.particle_momentum(0.0, params) == -math.pi / 2
    assert thermo.gs_series(0.0, H, params).value == pytest.approx(math.pi / 2, abs=1e-15)
    assert thermo.gs_series(0.0, ONE, params8).value == pytest.approx(math.pi, abs=1e-15)


def test_dispersion_independent_of_spin(params):
    # p and H take no spin argument at all; log tau shares the same series
    assert thermo.particle_momentum(0.2, params) + thermo.log_tau(0.2, params) == pytest.approx(-math.pi)


def test_validity_gate(params, params8):
    thermo.validity_gate(H, params)
    thermo.validity_gate(ONE, params8)
    with pytest.raises(ParameterError):
        thermo.validity_gate(ONE, params)
    with pytest.raises(ParameterError):
        thermo.gs_series(0.1, ONE, params)


def test_ground_config(params):
    cp = ChainParams(H, 8, params)
    c = thermo.ground_state_config(cp)
    assert c.count(1, 1) == 4 and c.root_count == cp.M
    centers = sorted(e.center for e in c.entries)
    assert np.allclose(centers, -np.array(centers[::-1]))
    assert all(-0.25 < x < 0.25 for x in centers)
    with pytest.raises(ParameterError):
        thermo.ground_state_config(ChainParams(H, 3, params))


def test_ground_state_regression(params):
    s = thermo.ground_state(ChainParams(H, 8, params)).canonical()
    assert s.nu == 0 and s.residual_norm < 1e-11
    assert np.abs(s.roots.real).max() < 1e-12
    assert np.abs(s.roots.imag - GROUND_N8_IMAG).max() < 1e-10


@pytest.mark.parametrize("N, lp", [(2, H), (2, ONE), (4, H), (4, ONE)])
def test_spin_one_ground_state_matches_spectrum(params8, N, lp):
    cp = ChainParams(ONE, N, params8)
    s = thermo.ground_state(cp)
    assert match_spectrum(s, 0.1 + 0.02j, lp, cp).success
    assert residue_estimates(s).max() < 1e-10


def test_string_members(params8):
    e = thermo.StringEntry(3, -1, 0.1)
    x = thermo.string_members(e, params8)
    assert np.allclose(x.real, 0.1)
    assert np.allclose(np.diff(np.sort(x.imag)), 2 * params8.eta * params8.t)
    assert np.allclose(x.imag.mean(), params8.t / 2)


def test_finite_size_fixtures(params):
    cps = [ChainParams(H, n, params) for n in DELTA]
    rep = thermo.finite_size_check(cps, 0.1)
    assert rep.converged and rep.strictly_decreasing
    for e in rep.entries:
        assert e.delta == pytest.approx(DELTA[e.N], rel=1e-6, abs=1e-12)


def test_finite_size_threads_deterministic(params):
    cps = [ChainParams(H, n, params) for n in (4, 8, 12)]
    a = thermo.finite_size_check(cps, 0.2, threads=1)
    b = thermo.finite_size_check(cps, 0.2, threads=3)
    assert a.deltas == b.deltas


def test_finite_size_spin_one(params8):
    rep = thermo.finite_size_check([ChainParams(ONE, n, params8) for n in (2, 4, 8)], 0.1)
    assert rep.strictly_decreasing


def test_finite_size_reports_failures(params):
    rep = thermo.finite_size_check([ChainParams(H, 3, params)], 0.1)
    assert not rep.converged and rep.entries[0].error


def test_continued_log_starts_at_shift_branch(params):
    s = thermo.ground_state(ChainParams(H, 8, params))
    lg, step = thermo.continued_log(s, 0.0, steps=4)
    assert abs(lg - 1j * 8 * math.pi * 0.5) < 1e-10
    assert step < 1e-12


def test_excited_config_kinds(params):
    cp = ChainParams(H, 8, params)
    with pytest.raises(ConfigurationError):
        thermo.excited_config("I", -0.1, 0.2, thermo.HALF_SUM, cp)
    c = thermo.excited_config("II", -0.1, 0.2, thermo.HALF_SUM, cp)
    assert c.root_count == cp.M
    assert c.count(1, -1) == 1
    with pytest.raises(ParameterError):
        thermo.excited_config("III", -0.1, 0.2, thermo.HALF_SUM, cp)


def test_excited_state_has_two_holes(params):
    s = thermo.excited_state("II", -0.12, 0.17, thermo.HALF_SUM, ChainParams(H, 8, params))
    assert s.residual_norm < 1e-11
    holes = thermo.hole_positions(s)
    assert len(holes) == 2
    assert abs(holes[0] + 0.12) < 0.02


@pytest.mark.slow
@pytest.mark.parametrize("N, bound", [(8, 2e-2), (16, 1e-3)])
def test_excited_state_shift(params, N, bound):
    rep = thermo.excited_state_check("II", -0.12, 0.17, thermo.HALF_SUM, ChainParams(H, N, params), 0.05)
    assert rep.admissible
    assert abs(rep.discrepancy) < bound
