from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from fxyz.errors import DimensionError, NumericError, ParameterError, SizeError
from fxyz.tensor import (
    CTensor,
    SpinSpace,
    antisymmetrizer2,
    apply_on_factors,
    basis_state,
    eigenvalues,
    identity,
    kron,
    operator_on_factors,
    partial_trace,
    permute_factors,
    principal_log,
    swap,
    symmetrizer,
    two_l,
)

rng = np.random.default_rng(7)


def rand(n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def test_two_l():
    assert two_l(Fraction(3, 2)) == 3
    assert two_l(1) == 2
    for bad in (0, Fraction(1, 3), -1):
        with pytest.raises(ParameterError):
            two_l(bad)


def test_ctensor_shape_check():
    with pytest.raises(DimensionError):
        CTensor((2, 2), np.eye(3))


def test_swap_flips_product_states():
    a, b = rng.normal(size=2), rng.normal(size=3)
    out = swap(2, 3).data @ np.kron(a, b)
    assert np.allclose(out, np.kron(b, a))


def test_kron_and_operator_on_factors():
    a, b = rand(2), rand(3)
    op = operator_on_factors(a, [0], [2, 3])
    assert np.allclose(op, np.kron(a, np.eye(3)))
    full = operator_on_factors(np.kron(b, a), [1, 0], [2, 3])
    assert np.allclose(full, np.kron(a, b))
    assert kron(CTensor((2,), a), CTensor((3,), b)).dims == (2, 3)


def test_apply_on_factors_matches_dense():
    dims = (2, 3, 2)
    op = CTensor((2, 2), rand(4))
    state = CTensor(dims, rand(12))
    dense = operator_on_factors(op, [2, 0], dims) @ state.data
    assert np.allclose(apply_on_factors(op, [2, 0], state).data, dense)


def test_permute_factors_round_trip():
    op = CTensor((2, 3), rand(6))
    back = permute_factors(permute_factors(op, [1, 0]), [1, 0])
    assert np.allclose(back.data, op.data)
    s = swap(2, 3).data
    assert np.allclose(permute_factors(op, [1, 0]).data, s @ op.data @ s.T)


def test_partial_trace():
    a, b = rand(2), rand(3)
    pt = partial_trace(kron(CTensor((2,), a), CTensor((3,), b)), [0])
    assert np.allclose(pt.data, np.trace(a) * b)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_symmetrizer_is_projector(m):
    s = symmetrizer(m).data
    assert np.allclose(s @ s, s)
    assert np.allclose(s, s.conj().T)
    assert round(np.trace(s).real) == m + 1


def test_symmetrizer_guard():
    with pytest.raises(SizeError):
        symmetrizer(9)


def test_antisymmetrizer_rank_one():
    a = antisymmetrizer2().data
    assert np.allclose(a @ a, a)
    assert round(np.trace(a).real) == 1


@pytest.mark.parametrize("twice", [1, 2, 3])
def test_spin_space_embedding(twice):
    sp = SpinSpace(Fraction(twice, 2))
    e = sp.embed
    assert np.allclose(e.conj().T @ e, np.eye(twice + 1))
    assert np.allclose(e @ e.conj().T, symmetrizer(twice).data)


def test_basis_and_identity():
    v = basis_state([1, 0], [2, 2])
    assert np.allclose(identity([2, 2]).data @ v.data, v.data)
    assert v.data[2] == 1


@pytest.mark.parametrize("n", [1, 2, 5, 16, 40])
def test_qr_eigenvalues_match_lapack(n):
    m = rand(n)
    ours = np.sort_complex(eigenvalues(m, method="qr"))
    ref = np.sort_complex(np.linalg.eigvals(m))
    assert np.abs(ours - ref).max() < 1e-9 * max(1, np.abs(ref).max())


def test_qr_eigenvalues_rotation():
    c, s = np.cos(0.3), np.sin(0.3)
    vals = eigenvalues(np.array([[c, -s], [s, c]]))
    assert np.allclose(np.sort(vals.imag), [-s, s])


def test_eigenvalue_guards():
    with pytest.raises(DimensionError):
        eigenvalues(np.zeros((2, 3)))
    with pytest.raises(NumericError):
        eigenvalues(np.array([[np.nan]]))


def test_principal_log_round_trip():
    m = rand(5) * 0.3
    res = principal_log(expm(m))
    assert np.allclose(expm(res.log.data), expm(m), atol=1e-10)
    assert not res.boundary_hit


def test_principal_log_minus_one_maps_to_plus_pi():
    res = principal_log(-np.eye(2))
    assert np.allclose(res.log.data, 1j * np.pi * np.eye(2))
    assert res.boundary_hit


def test_principal_log_rejects_defective():
    with pytest.raises(NumericError):
        principal_log(np.array([[1.0, 1.0], [0.0, 1.0]]))
