"""Periodic higher-spin XYZ chain: transfer matrices, momentum, Hamiltonian.

T^{l',l}(u) = tr_a R_{a,N}(u) ... R_{a,1}(u) with R = R^{l',l} acting on the
auxiliary space V^{l'} and one site V^l.  T^{l,l}(0) is a one-site cyclic
shift; with the row-major site order used here it sends
|q_1, ..., q_N> to |q_N, q_1, ..., q_{N-1}> (see ``SHIFT_ORIENTATION``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elliptic import EllipticParams, lattice_distance, theta11
from .errors import ParameterError, PoleError, SizeError
from .fusion import POLE_TOL, fused_matrix
from .tensor import LogResult, eigenvalues, principal_log, two_l

DIM_GUARD = 4096

# The content of site j moves to site j+1 (indices mod N) under T(0).
SHIFT_ORIENTATION = "site j -> site j+1"


@dataclass(frozen=True)
class ChainParams:
    """Local spin l, number of sites N, elliptic data and the Hamiltonian constant."""

    l: Fraction
    N: int
    p: EllipticParams
    coupling: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "l", Fraction(two_l(self.l), 2))
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if not math.isfinite(self.coupling):
            raise ParameterError("coupling must be finite")

    @property
    def two_l(self) -> int:
        return int(2 * self.l)

    @property
    def local_dim(self) -> int:
        return self.two_l + 1

    @property
    def dim(self) -> int:
        return self.local_dim ** self.N

    @property
    def M(self) -> int:
        """Number of Bethe roots, N l."""
        m = self.N * self.l
        if m.denominator != 1:
            raise ParameterError(f"N l = {m} is not an integer")
        return int(m)

    def guard(self, limit: int = DIM_GUARD) -> None:
        if self.dim > limit:
            raise SizeError(
                f"(2l+1)^N = {self.dim} exceeds the dimension guard {limit} "
                f"(l={self.l}, N={self.N})"
            )


def apply_transfer(u: complex, lp, cp: ChainParams, vecs: np.ndarray) -> np.ndarray:
    """T^{l',l}(u) applied to the columns of ``vecs`` (shape (D, c)).

    Works on (aux-out, aux-in, site_1, ..., site_N, column) arrays so only one
    auxiliary pair is ever carried along.
    """
    n_aux = two_l(lp)
    da, dq, N = n_aux + 1, cp.local_dim, cp.N
    r = fused_matrix(u, n_aux, cp.two_l, cp.p).reshape(da, dq, da, dq)
    vecs = np.asarray(vecs, dtype=complex)
    c = vecs.shape[1]
    z = np.einsum("ab,sc->absc", np.eye(da), vecs).reshape([da, da] + [dq] * N + [c])
    for j in range(N):
        # contract R[a', q', a, q] with (aux-out a, site q)
        z = np.tensordot(r, z, axes=([2, 3], [0, 2 + j]))
        # axes now: a', q', aux-in, sites except j, column -> put q' back at site j
        z = np.moveaxis(z, 1, 2 + j)
    return np.einsum("aa...->...", z).reshape(dq ** N, c)


def transfer(u: complex, lp, cp: ChainParams) -> np.ndarray:
    """Dense T^{l',l}(u); T^{0,l} is the identity.

    The monodromy over sites 1..k is grown one site at a time, keeping its
    auxiliary index pair open; the last site is contracted directly into the trace.
    """
    cp.guard()
    D = cp.dim
    if Fraction(lp) == 0:
        return np.eye(D, dtype=complex)
    n_aux = two_l(lp)
    da, dq, N = n_aux + 1, cp.local_dim, cp.N
    r = fused_matrix(u, n_aux, cp.two_l, cp.p).reshape(da, dq, da, dq)
    mono = r.transpose(0, 2, 1, 3)  # (a', a, Q', Q)
    for k in range(1, N):
        dk = dq ** k
        if k == N - 1:
            # sum_{a', b} R[a', q', b, q] mono[b, a', Q', Q]
            out = np.tensordot(r, mono, axes=([0, 2], [1, 0]))  # (q', q, Q', Q)
            return out.transpose(2, 0, 3, 1).reshape(D, D)
        nxt = np.tensordot(r, mono, axes=([2], [0]))  # (a', q', q, a, Q', Q)
        mono = nxt.transpose(0, 3, 4, 1, 5, 2).reshape(da, da, dk * dq, dk * dq)
    return np.einsum("aaij->ij", mono).copy()


def shift_operator(cp: ChainParams) -> np.ndarray:
    """Permutation |q_1..q_N> -> |q_N, q_1, ..., q_{N-1}>."""
    d, N = cp.local_dim, cp.N
    D = d ** N
    m = np.zeros((D, D))
    # basis state with multi-index q goes to the state whose site k+1 holds q_k
    src = np.arange(D)
    q = np.array(np.unravel_index(src, [d] * N))
    dst = np.ravel_multi_index(np.roll(q, 1, axis=0), [d] * N)
    m[dst, src] = 1.0
    return m


def momentum(cp: ChainParams) -> tuple[np.ndarray, LogResult]:
    """p = -i log T^{l,l}(0), principal branch; eigenvalue -1 is sent to +pi."""
    res = principal_log(transfer(0.0, cp.l, cp))
    return -1j * res.log.data, res


def hamiltonian(cp: ChainParams, step: float = 1e-5) -> np.ndarray:
    """H = coupling * T'(0) T(0)^{-1}, derivative by central differences with one Richardson step."""
    cp.guard()
    lp = cp.l

    def d1(h):
        return (transfer(h, lp, cp) - transfer(-h, lp, cp)) / (2 * h)

    deriv = (4 * d1(step / 2) - d1(step)) / 3
    t0 = transfer(0.0, lp, cp)
    return cp.coupling * np.linalg.solve(t0.T, deriv.T).T


def spectrum(u: complex, lp, cp: ChainParams, method: str = "qr") -> np.ndarray:
    return eigenvalues(transfer(u, lp, cp), method=method)


def commutator_residual(u: complex, lp, v: complex, lpp, cp: ChainParams) -> float:
    """||[T^{l'}(u), T^{l''}(v)]|| / (||T^{l'}(u)|| ||T^{l''}(v)||)."""
    a = transfer(u, lp, cp)
    b = transfer(v, lpp, cp)
    return float(np.linalg.norm(a @ b - b @ a) / (np.linalg.norm(a) * np.linalg.norm(b)))


def recurrence_ratio(u: complex, lp, cp: ChainParams, power: int | None = None) -> complex:
    """[theta_11(u + (1 - 2l' - 2l) eta) / theta_11(u + (1 - 2l' + 2l) eta)]^power, power = N by default."""
    p = cp.p
    m, n = two_l(lp), cp.two_l
    den_arg = u + (1 - m + n) * p.eta
    if lattice_distance(den_arg, p.tau) < POLE_TOL:
        raise PoleError(f"recurrence ratio has a pole at u={u}")
    ratio = theta11(u + (1 - m - n) * p.eta, p.tau, p.tail_tol) / theta11(den_arg, p.tau, p.tail_tol)
    return complex(ratio ** (cp.N if power is None else power))


@dataclass
class TransferRecurrenceReport:
    u: complex
    lp: Fraction
    residual: float  # with the N-th power of the theta ratio
    relative: float
    residual_unpowered: float  # literal ratio without the power, for reference


def check_recurrence_t(u: complex, lp, cp: ChainParams) -> TransferRecurrenceReport:
    """T^{l'+1/2}(u) - T^{l'}(u+eta) T^{1/2}(u-2l'eta) + ratio T^{l'-1/2}(u+2eta)."""
    eta = cp.p.eta
    m = two_l(lp)
    lhs = transfer(u, Fraction(m + 1, 2), cp)
    prod = transfer(u + eta, Fraction(m, 2), cp) @ transfer(u - m * eta, Fraction(1, 2), cp)
    low = transfer(u + 2 * eta, Fraction(m - 1, 2), cp)
    res = lhs - prod + recurrence_ratio(u, lp, cp) * low
    lit = lhs - prod + recurrence_ratio(u, lp, cp, power=1) * low
    norm = float(np.linalg.norm(res))
    return TransferRecurrenceReport(
        complex(u), Fraction(m, 2), norm, norm / float(np.linalg.norm(lhs)), float(np.linalg.norm(lit))
    )
