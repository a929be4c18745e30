from fractions import Fraction

import numpy as np
import pytest

import oracles as O
from fxyz.elliptic import EllipticParams
from fxyz.errors import PoleError, SizeError
from fxyz.fusion import (
    baxter_matrix,
    check_recurrence_r,
    fuse,
    fused_matrix,
    permutation_residual,
    qdet,
    qdet_closed,
    qdet_report,
    unitarity_residual,
    ybe_residual,
)
from fxyz.tensor import swap

H, ONE, TH = Fraction(1, 2), Fraction(1), Fraction(3, 2)
U = 0.21 + 0.07j


def test_baxter_matches_oracle(params):
    assert O.rel(baxter_matrix(U, params), O.baxter(U, params.t, params.eta)) < 1e-14


@pytest.mark.parametrize("m", [2, 3])
def test_fused_half_matches_oracle(params, m):
    assert O.rel(fused_matrix(U, 1, m, params), O.fused_half_oracle(U, m, params.t, params.eta)) < 1e-13


def test_fused_aux_matches_oracle(params):
    assert O.rel(fused_matrix(U, 2, 1, params), O.fused_aux_oracle(U, 2, params.t, params.eta)) < 1e-13


@pytest.mark.parametrize("spins", [(H, H, H), (ONE, H, H), (H, ONE, ONE), (ONE, ONE, H)])
def test_yang_baxter(params, spins):
    assert ybe_residual(spins, (0.31 + 0.1j, -0.12 + 0.02j, 0.05 - 0.13j), params) < 1e-12


@pytest.mark.parametrize("l, lp", [(H, H), (H, ONE), (ONE, ONE), (ONE, TH)])
def test_unitarity(params, l, lp):
    assert unitarity_residual(l, lp, 0.3 + 0.05j, -0.1 + 0.11j, params) < 1e-12


@pytest.mark.parametrize("l", [H, ONE])
def test_permutation_at_zero(params, l):
    assert permutation_residual(l, params) < 1e-12


def test_permutation_three_halves_needs_validity_range():
    # 2(2l+1) eta < 1 for l = 3/2 requires eta < 1/8
    assert permutation_residual(TH, EllipticParams(2.0, 1, 10)) < 1e-12


def test_fused_r_at_zero_removable_pole(params):
    r = fuse(0.0, ONE, ONE, params).matrix
    assert np.abs(r - swap(3, 3).data).max() < 1e-12


@pytest.mark.parametrize("lp", [H, ONE, TH])
def test_qdet_trace_form(params, lp):
    rep = qdet_report(0.27 + 0.09j, lp, params)
    assert rep.disagreement < 1e-12
    assert rep.off_scalar < 1e-12
    assert abs(qdet(0.27 + 0.09j, lp, params) - qdet_closed(0.27 + 0.09j, lp, params)) < 1e-15


@pytest.mark.parametrize("l, lp", [(H, H), (H, ONE), (ONE, H), (ONE, ONE)])
def test_recurrence_blocks(params, l, lp):
    rep = check_recurrence_r(0.19 + 0.04j, l, lp, params)
    assert rep.max_residual() < 1e-11


def test_pole_detected(params):
    with pytest.raises(PoleError):
        baxter_matrix(-2 * params.eta, params)
    with pytest.raises(PoleError):
        qdet_closed(-2 * params.eta, ONE, params)


def test_fusion_guard(params):
    with pytest.raises(SizeError):
        fused_matrix(0.1, 7, 1, params)
