"""Baxter's R-matrix, fused R-matrices R^{l,l'}(u) and their identities.

All R-matrices are normalized by unitarity, R12(u) R21(-u) = Id, and are
therefore meromorphic in u.  Fused matrices are built as ordered products of
lower-spin ones at arguments shifted by multiples of 2*eta, projected with
the symmetrizer and compressed to the orthonormal basis of ``SpinSpace``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elliptic import EllipticParams, lattice_distance, theta11, weight_W
from .errors import ConsistencyError, PoleError, SizeError
from .tensor import (
    CTensor,
    SpinSpace,
    antisymmetrizer2,
    apply_on_factors,
    identity,
    operator_on_factors,
    partial_trace,
    permute_factors,
    swap,
    symmetrizer,
    two_l,
)

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

FUSION_GUARD = 6  # max 2l for either slot
POLE_TOL = 1e-10
INVARIANCE_TOL = 1e-10
CIRCLE_TRIGGER = 1e-3
CIRCLE_RADIUS = 0.02
CIRCLE_POINTS = 24


@dataclass(frozen=True)
class RMatrix:
    """R^{l,l'}(u) as an operator on V^l (x) V^{l'}."""

    l: Fraction
    lp: Fraction
    u: complex
    op: CTensor
    params: EllipticParams

    @property
    def matrix(self) -> np.ndarray:
        return self.op.data


def _check_pole(arg: complex, p: EllipticParams, what: str) -> None:
    # normalized Baxter R has poles where theta_11(u + 2 eta) = 0
    if lattice_distance(arg + 2 * p.eta, p.tau) < POLE_TOL:
        raise PoleError(f"{what}: argument {arg} is within {POLE_TOL:g} of a pole")


def baxter_matrix(u: complex, p: EllipticParams) -> np.ndarray:
    _check_pole(u, p, "baxter_r")
    w = [weight_W(a, u, p) for a in range(4)]
    return sum(w[a] * np.kron(PAULI[a], PAULI[a]) for a in range(4))


def baxter_r(u: complex, p: EllipticParams) -> RMatrix:
    """Baxter's R(u) = sum_a W_a(u) sigma^a (x) sigma^a on C^2 (x) C^2."""
    half = Fraction(1, 2)
    return RMatrix(half, half, complex(u), CTensor((2, 2), baxter_matrix(u, p)), p)


def _ordered_product(factors, n_slots: int, last_dim: int) -> np.ndarray:
    """F_{n-1} ... F_1 F_0 where F_k acts on slot k and the trailing factor."""
    dims = (2,) * n_slots + (last_dim,)
    x = identity(dims)
    for k, f in enumerate(factors):
        x = apply_on_factors(f, [k, n_slots], x)
    return x.data


def _check_invariance(x: np.ndarray, sym_full: np.ndarray, what: str) -> None:
    # the product must map the complement of the symmetric subspace into itself,
    # otherwise compression would not be multiplicative
    leak = sym_full @ x @ (np.eye(len(x)) - sym_full)
    scale = max(1.0, float(np.abs(x).max()))
    if np.abs(leak).max() > INVARIANCE_TOL * scale:
        raise ConsistencyError(
            f"{what}: fusion product does not preserve the symmetric quotient "
            f"(leak {np.abs(leak).max():.3e})"
        )


def _guard(twice: int, what: str) -> None:
    if twice > FUSION_GUARD:
        raise SizeError(f"{what}: 2l = {twice} exceeds the fusion guard {FUSION_GUARD}")


def half_fused_matrix(u: complex, two_lp: int, p: EllipticParams, check: bool = True) -> np.ndarray:
    """Matrix of R^{1/2,l'}(u) on C^2 (x) V^{l'} with 2l' = ``two_lp``."""
    _guard(two_lp, "fuse_half")
    eta = p.eta
    if two_lp == 1:
        return baxter_matrix(u, p)
    m = two_lp
    args = [u + (2 * j - m - 1) * eta for j in range(1, m + 1)]
    for a in args:
        _check_pole(a, p, "fuse_half")
    # slots: 0 = auxiliary C^2, 1..m = the fused copies; R_{0,m}(...) ... R_{0,1}(...)
    dims = (2,) * (m + 1)
    x = identity(dims)
    for j in range(1, m + 1):
        x = apply_on_factors(CTensor((2, 2), baxter_matrix(args[j - 1], p)), [0, j], x)
    sp = SpinSpace(Fraction(m, 2))
    e = np.kron(np.eye(2), sp.embed)
    if check:
        sym = np.kron(np.eye(2), symmetrizer(m).data)
        _check_invariance(x.data, sym, "fuse_half")
    return e.conj().T @ x.data @ e


def fuse_half(u: complex, lp, p: EllipticParams, check: bool = True) -> RMatrix:
    """R^{1/2,l'}(u): symmetrized product of 2l' Baxter matrices, compressed to V^{l'}."""
    m = two_l(lp)
    op = CTensor((2, m + 1), fused_matrix(complex(u), 1, m, p, check))
    return RMatrix(Fraction(1, 2), Fraction(m, 2), complex(u), op, p)


def _internal_pole_distance(u: complex, n: int, m: int, p: EllipticParams) -> float:
    eta = p.eta
    shifts = [(2 * k + 1 - n) + (2 * j - m - 1) for k in range(n) for j in range(1, m + 1)]
    return float(min(lattice_distance(u + (s + 2) * eta, p.tau) for s in shifts))


def fused_matrix(u: complex, two_l_aux: int, two_lp: int, p: EllipticParams, check: bool = True) -> np.ndarray:
    """Matrix of R^{l,l'}(u) on V^l (x) V^{l'}.

    Where a Baxter factor of the product sits on its pole the product itself
    may still be regular; there the value is taken as the mean over a small
    circle, and the circle's negative Laurent coefficients decide whether the
    singularity is genuine.
    """
    u = complex(u)
    if _internal_pole_distance(u, two_l_aux, two_lp, p) > CIRCLE_TRIGGER:
        return _fused_direct(u, two_l_aux, two_lp, p, check)
    roots = np.exp(2j * np.pi * (np.arange(CIRCLE_POINTS) + 0.5) / CIRCLE_POINTS)
    vals = np.stack(
        [_fused_direct(u + CIRCLE_RADIUS * w, two_l_aux, two_lp, p, check) for w in roots]
    )
    scale = float(np.abs(vals).max())
    for order in (1, 2, 3):
        coeff = CIRCLE_RADIUS ** order * np.tensordot(roots ** order, vals, axes=1) / CIRCLE_POINTS
        if np.abs(coeff).max() > 1e-8 * max(1.0, scale * CIRCLE_RADIUS ** order):
            raise PoleError(f"fuse: R^({two_l_aux}/2,{two_lp}/2) has a pole at u={u}")
    return vals.mean(axis=0)


def _fused_direct(u: complex, two_l_aux: int, two_lp: int, p: EllipticParams, check: bool) -> np.ndarray:
    _guard(two_l_aux, "fuse")
    _guard(two_lp, "fuse")
    if two_l_aux == 1:
        return half_fused_matrix(u, two_lp, p, check)
    n = two_l_aux
    d = two_lp + 1
    eta = p.eta
    factors = [
        CTensor((2, d), half_fused_matrix(u + (2 * (k + 1) - n - 1) * eta, two_lp, p, check))
        for k in range(n)
    ]
    x = _ordered_product(factors, n, d)
    sp = SpinSpace(Fraction(n, 2))
    e = np.kron(sp.embed, np.eye(d))
    if check:
        sym = np.kron(symmetrizer(n).data, np.eye(d))
        _check_invariance(x, sym, "fuse")
    return e.conj().T @ x @ e


def fuse(u: complex, l, lp, p: EllipticParams, check: bool = True) -> RMatrix:
    """R^{l,l'}(u) on V^l (x) V^{l'}; R^{l,l}(0) is the flip of the two factors."""
    a, b = two_l(l), two_l(lp)
    op = CTensor((a + 1, b + 1), fused_matrix(complex(u), a, b, p, check))
    return RMatrix(Fraction(a, 2), Fraction(b, 2), complex(u), op, p)


# --- identities --------------------------------------------------------------


def ybe_residual(spins, us, p: EllipticParams) -> float:
    """Relative residual of R12(u1-u2) R13(u1-u3) R23(u2-u3) = R23 R13 R12."""
    l1, l2, l3 = spins
    u1, u2, u3 = us
    dims = [two_l(l1) + 1, two_l(l2) + 1, two_l(l3) + 1]
    r12 = operator_on_factors(fuse(u1 - u2, l1, l2, p).op, [0, 1], dims)
    r13 = operator_on_factors(fuse(u1 - u3, l1, l3, p).op, [0, 2], dims)
    r23 = operator_on_factors(fuse(u2 - u3, l2, l3, p).op, [1, 2], dims)
    lhs = r12 @ r13 @ r23
    rhs = r23 @ r13 @ r12
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))


def unitarity_residual(l, lp, u: complex, v: complex, p: EllipticParams) -> float:
    """|| R12^{l,l'}(u-v) R21^{l',l}(v-u) - Id ||."""
    r12 = fuse(u - v, l, lp, p).op
    r21 = permute_factors(fuse(v - u, lp, l, p).op, [1, 0])
    prod = r12.data @ r21.data
    return float(np.linalg.norm(prod - np.eye(len(prod))))


def permutation_residual(l, p: EllipticParams) -> float:
    """|| R^{l,l}(0) - flip ||."""
    d = two_l(l) + 1
    return float(np.linalg.norm(fuse(0.0, l, l, p).matrix - swap(d, d).data))


@dataclass
class QdetReport:
    closed_form: complex
    trace_form: complex
    off_scalar: float

    @property
    def disagreement(self) -> float:
        return abs(self.closed_form - self.trace_form)


def qdet_closed(u: complex, lp, p: EllipticParams) -> complex:
    m = two_l(lp)
    eta, tau, tol = p.eta, p.tau, p.tail_tol
    if lattice_distance(u + m * eta, tau) < POLE_TOL:
        raise PoleError(f"qdet: theta_11(u + 2l' eta) vanishes at u={u}")
    return complex(theta11(u - m * eta, tau, tol) / theta11(u + m * eta, tau, tol))


def qdet_report(u: complex, lp, p: EllipticParams) -> QdetReport:
    """Both evaluations of the quantum determinant of R^{1/2,l'}."""
    m = two_l(lp)
    d = m + 1
    eta = p.eta
    # slot 0 = V_0 at u - eta, slot 1 = V_1 at u + eta; R_1(u + eta) R_0(u - eta)
    factors = [
        CTensor((2, d), fused_matrix(u - eta, 1, m, p)),
        CTensor((2, d), fused_matrix(u + eta, 1, m, p)),
    ]
    x = _ordered_product(factors, 2, d)
    proj = np.kron(antisymmetrizer2().data, np.eye(d))
    red = partial_trace(CTensor((2, 2, d), proj @ x), [0, 1]).data
    scalar = np.trace(red) / d
    off = float(np.linalg.norm(red - scalar * np.eye(d)))
    return QdetReport(qdet_closed(u, lp, p), complex(scalar), off)


def qdet(u: complex, lp, p: EllipticParams) -> complex:
    """Quantum determinant theta_11(u - 2l' eta)/theta_11(u + 2l' eta).

    The trace formula is evaluated as well; disagreement above 1e-7 raises.
    """
    rep = qdet_report(u, lp, p)
    if rep.disagreement > 1e-7 or rep.off_scalar > 1e-7:
        raise ConsistencyError(
            f"qdet trace formula {rep.trace_form} disagrees with closed form {rep.closed_form}"
        )
    return rep.closed_form


@dataclass
class RecurrenceReport:
    """Block residuals of R^{l,l'}(u+eta) R^{1/2,l'}(u-2l eta) on Sym(2l) (x) V_0 (x) V^{l'}."""

    l: Fraction
    lp: Fraction
    u: complex
    upper_left: float
    upper_right: float
    lower_right: float

    def max_residual(self) -> float:
        return max(self.upper_left, self.upper_right, self.lower_right)


def check_recurrence_r(u: complex, l, lp, p: EllipticParams) -> RecurrenceReport:
    n_l, m = two_l(l), two_l(lp)
    _guard(n_l + 1, "check_recurrence_r")
    eta = p.eta
    d = m + 1
    n = n_l + 1  # aux slots: 0 = V_0, k = V_k for k = 1..2l
    dims = [2] * n + [d]
    e_l = SpinSpace(Fraction(n_l, 2)).embed
    r_l = fused_matrix(u + eta, n_l, m, p)
    lifted = np.kron(e_l, np.eye(d)) @ r_l @ np.kron(e_l, np.eye(d)).conj().T
    a = operator_on_factors(lifted, list(range(1, n)) + [n], dims)
    b = operator_on_factors(fused_matrix(u - n_l * eta, 1, m, p), [0, n], dims)
    big = a @ b

    e_full = np.kron(SpinSpace(Fraction(n, 2)).embed, np.eye(d))
    upper_left = float(np.linalg.norm(e_full.conj().T @ big @ e_full - fused_matrix(u, n, m, p)))

    # second Young component: Sym_{1..2l}( x_{2..2l} (x) antisym(V_0, V_1) )
    anti = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    if n_l > 1:
        low = SpinSpace(Fraction(n_l - 1, 2)).embed
        cols = np.stack([np.kron(anti, low[:, k]) for k in range(n_l)], axis=1)
    else:
        cols = anti.reshape(-1, 1)
    sym_rest = operator_on_factors(symmetrizer(n_l).data, list(range(1, n)), [2] * n)
    phi = np.kron(sym_rest @ cols, np.eye(d))
    upper_right = float(np.linalg.norm(e_full.conj().T @ big @ phi))

    gram = phi.conj().T @ phi
    coeff = np.linalg.solve(gram, phi.conj().T @ big @ phi)
    qd = qdet(u - (n_l - 1) * eta, lp, p)
    if n_l > 1:
        target = qd * fused_matrix(u + 2 * eta, n_l - 1, m, p)
    else:
        target = qd * np.eye(d)
    lower_right = float(np.linalg.norm(coeff - target))
    return RecurrenceReport(Fraction(n_l, 2), Fraction(m, 2), complex(u), upper_left, upper_right, lower_right)
