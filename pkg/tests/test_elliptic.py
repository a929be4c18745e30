import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from fxyz.elliptic import (
    G_CHARS,
    EllipticParams,
    lattice_distance,
    log_theta11,
    theta,
    theta11,
    theta_deriv,
    truncation_index,
    weight_W,
    weight_WL,
)
from fxyz.errors import ParameterError, SingularParameterError

# mpmath values at z = 0.3 + 0.1i, tau = i/2, frozen
FROZEN = {
    (1, 1): -1.1199806915804116 - 0.31390188902875743j,
    (1, 0): 0.7512450066715514 - 0.3682841515339741j,
    (0, 0): 0.8395833722640247 - 0.2615693361267815j,
    (0, 1): 1.1489400551998812 + 0.268657941242641j,
}


@pytest.mark.parametrize("char", list(FROZEN))
def test_theta_frozen_values(char):
    assert abs(theta(char, 0.3 + 0.1j, 0.5j) - FROZEN[char]) < 1e-14


@pytest.mark.parametrize("char", G_CHARS)
@pytest.mark.parametrize("tau", [0.5j, 1j, 0.2 + 0.3j])
def test_theta_matches_mpmath(char, tau):
    for z in [0.0, 0.11 - 0.2j, -0.43 + 0.05j, 1.7 + 0.4j]:
        ref = O.theta_mp(char, z, tau)
        assert abs(theta(char, z, tau) - ref) < 1e-13 * max(1.0, abs(ref))


def test_theta_vectorized_matches_scalar():
    z = np.array([0.1, 0.2 + 0.1j, -0.3j])
    vec = theta((1, 0), z, 0.5j)
    assert vec.shape == (3,)
    for zi, vi in zip(z, vec):
        assert abs(theta((1, 0), zi, 0.5j) - vi) < 1e-15


zs = st.complex_numbers(max_magnitude=0.6, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(z=zs)
def test_quasi_periodicity(z):
    tau = 0.5j
    for a, b in G_CHARS:
        f = theta((a, b), z, tau)
        assert abs(theta((a, b), z + 1, tau) - cmath.exp(1j * math.pi * a) * f) < 1e-12 * max(1, abs(f))
        factor = cmath.exp(-1j * math.pi * tau - 2j * math.pi * (z + b / 2))
        g = theta((a, b), z + tau, tau)
        assert abs(g - factor * f) < 1e-11 * max(1, abs(g))


@settings(max_examples=40, deadline=None)
@given(z=zs)
def test_parity(z):
    tau = 0.5j
    assert abs(theta11(-z, tau) + theta11(z, tau)) < 1e-13
    for char in G_CHARS[1:]:
        assert abs(theta(char, -z, tau) - theta(char, z, tau)) < 1e-13


def test_derivative_against_finite_difference():
    z, tau, h = 0.17 + 0.05j, 0.5j, 1e-5
    for char in G_CHARS:
        fd = (theta(char, z + h, tau) - theta(char, z - h, tau)) / (2 * h)
        assert abs(theta_deriv(char, z, tau) - fd) < 1e-8


def test_log_theta11_exponentiates_back():
    tau = 0.5j
    z = np.array([0.2 + 0.1j, -0.7 + 0.3j, 1.4 - 0.9j, 0.49 + 1.2j])
    ref = theta11(z, tau)
    assert (np.abs(np.exp(log_theta11(z, tau)) - ref) / np.abs(ref)).max() < 1e-12


def test_lattice_distance_zero_on_lattice():
    tau = 0.5j
    pts = [0, 1, tau, 2 - 3 * tau]
    assert max(lattice_distance(complex(p), tau) for p in pts) < 1e-14
    assert abs(lattice_distance(0.25, tau) - 0.25) < 1e-15


def test_truncation_grows_with_tolerance():
    assert truncation_index(0, 0.5j, 0.1, 1e-8) <= truncation_index(0, 0.5j, 0.1, 1e-16)


def test_params_parse():
    p = EllipticParams.from_string(2, "1/6")
    assert p.eta == pytest.approx(1 / 6)
    assert p.tau == 0.5j


@pytest.mark.parametrize("bad", ["2/4", "1/3", "2/6", "7/6", "x", "1/6/2", "0/2"])
def test_params_reject(bad):
    with pytest.raises(ParameterError):
        EllipticParams.from_string(2, bad)


def test_params_reject_t():
    with pytest.raises(ParameterError):
        EllipticParams(-1.0, 1, 6)


def test_weights_against_oracle(params):
    u = 0.21 + 0.07j
    ref = O.baxter_weights(u, params.t, params.eta)
    for a in range(4):
        assert abs(weight_W(a, u, params) - ref[a]) < 1e-14


def test_weights_at_zero(params):
    for a in range(4):
        assert abs(weight_W(a, 0.0, params) - 0.5) < 1e-14


def test_half_eta_is_singular():
    p = EllipticParams(2.0, 1, 2)
    with pytest.raises(SingularParameterError):
        weight_W(0, 0.1, p)
    with pytest.raises(SingularParameterError):
        weight_WL(0, 0.1, p)
