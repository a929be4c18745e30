"""Theta-function realization of the spin-l space and the L-operator.

V^l is identified with the space of even theta functions of order 4l with
basis f_-(y)^{2l-k} f_+(y)^k, k = 0..2l, where
f_-(y), f_+(y) = theta_00(2y; 2 tau) -/+ theta_10(2y; 2 tau).
The L-operator is obtained from R^{1/2,l} and the Sklyanin generators S^a
are extracted from it by Pauli orthogonality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elliptic import EllipticParams, theta, theta11, weight_WL
from .errors import ConsistencyError, NumericError, ParameterError
from .fusion import PAULI, fused_matrix
from .tensor import SpinSpace, two_l

GRID_SEED = 20240917
GRID_COND_MAX = 1e8
EXTRACT_POINTS = (0.17, 0.31)


def _f_pair(y, p: EllipticParams):
    y = np.asarray(y, dtype=complex)
    t2 = 2 * p.tau
    a = theta((0, 0), 2 * y, t2, p.tail_tol)
    b = theta((1, 0), 2 * y, t2, p.tail_tol)
    return a - b, a + b


@dataclass(frozen=True, eq=False)
class ThetaBasis:
    """Basis f_-^{2l-k} f_+^k of the even order-4l theta functions, with a sample grid."""

    two_l: int
    params: EllipticParams
    grid: np.ndarray
    evaluation: np.ndarray  # evaluation[i, k] = basis_k(grid[i])
    condition: float

    @property
    def l(self) -> Fraction:
        return Fraction(self.two_l, 2)

    @property
    def dim(self) -> int:
        return self.two_l + 1

    def evaluate(self, y) -> np.ndarray:
        """Values of all basis functions at the points y; shape (len(y), 2l+1)."""
        fm, fp = _f_pair(np.atleast_1d(y), self.params)
        k = np.arange(self.dim)
        return fm[:, None] ** (self.two_l - k) * fp[:, None] ** k

    def coordinates(self, values: np.ndarray) -> np.ndarray:
        """Coordinates of a function in the span from its values on the grid."""
        return np.linalg.solve(self.evaluation, values)

    @classmethod
    def build(cls, l, p: EllipticParams, seed: int = GRID_SEED, attempts: int = 16) -> "ThetaBasis":
        n = two_l(l)
        for attempt in range(attempts):
            rng = np.random.default_rng(seed + attempt)
            grid = rng.uniform(0.05, 0.45, n + 1) + 1j * rng.uniform(0.05, 0.45, n + 1) / p.t
            fm, fp = _f_pair(grid, p)
            k = np.arange(n + 1)
            ev = fm[:, None] ** (n - k) * fp[:, None] ** k
            cond = float(np.linalg.cond(ev))
            if cond < GRID_COND_MAX:
                return cls(n, p, grid, ev, cond)
        raise NumericError(f"no well-conditioned sample grid found for l={Fraction(n, 2)}")


def iso_sym_to_theta(l, p: EllipticParams, basis: ThetaBasis | None = None) -> np.ndarray:
    """Matrix taking SpinSpace coordinates to ThetaBasis coordinates.

    The symmetric tensor sum c_{i1..i2l} f_{i1} (x) ... (x) f_{i2l} is sent to the
    function sum c_{i1..i2l} f_{i1}(y) ... f_{i2l}(y), with f_0 = f_- and f_1 = f_+.
    """
    n = two_l(l)
    if n > 6:
        raise ParameterError("iso_sym_to_theta supports l <= 3")
    basis = basis or ThetaBasis.build(l, p)
    fm, fp = _f_pair(basis.grid, p)
    embed = SpinSpace(Fraction(n, 2)).embed  # (2^n, n+1)
    # value of each elementary tensor e_{i1..in} at the grid points
    bits = ((np.arange(2 ** n)[:, None] >> np.arange(n - 1, -1, -1)) & 1).sum(axis=1)
    elem = fm[:, None] ** (n - bits[None, :]) * fp[:, None] ** bits[None, :]
    values = elem @ embed  # (grid, n+1)
    return basis.coordinates(values)


def l_operator(u: complex, l, p: EllipticParams, iso: np.ndarray | None = None) -> np.ndarray:
    """L(u) on C^2 (x) V^l in ThetaBasis coordinates, from R^{1/2,l}(u - eta)."""
    n = two_l(l)
    eta, tau, tol = p.eta, p.tau, p.tail_tol
    iso = iso_sym_to_theta(l, p) if iso is None else iso
    r = fused_matrix(u - eta, 1, n, p)
    scale = theta11(u + n * eta, tau, tol) / theta11(2 * eta, tau, tol)
    left = np.kron(np.eye(2), iso)
    right = np.kron(np.eye(2), np.linalg.inv(iso))
    return scale * (left @ r @ right)


def r_from_l(u: complex, l, p: EllipticParams, lop: np.ndarray, iso: np.ndarray) -> np.ndarray:
    """Inverse of ``l_operator``: R^{1/2,l}(u) rebuilt from L(u + eta)."""
    eta, tau, tol = p.eta, p.tau, p.tail_tol
    n = two_l(l)
    scale = theta11(2 * eta, tau, tol) / theta11(u + (n + 1) * eta, tau, tol)
    left = np.kron(np.eye(2), np.linalg.inv(iso))
    right = np.kron(np.eye(2), iso)
    return scale * (left @ lop @ right)


def _aux_component(lop: np.ndarray, a: int, d: int) -> np.ndarray:
    """tr_aux((sigma^a (x) Id) L)."""
    blocks = lop.reshape(2, d, 2, d)
    return np.einsum("ij,jaib->ab", PAULI[a], blocks)


@dataclass(frozen=True, eq=False)
class SklyaninGenerators:
    """S^0..S^3 on V^l in ThetaBasis coordinates."""

    l: Fraction
    S: tuple
    sample_points: tuple
    spread: float  # max entrywise disagreement between the sample extractions

    def l_matrix(self, u: complex, p: EllipticParams) -> np.ndarray:
        """sum_a W^L_a(u) sigma^a (x) S^a."""
        return sum(weight_WL(a, u, p) * np.kron(PAULI[a], self.S[a]) for a in range(4))


def _extract_at(u: complex, l, p: EllipticParams, iso: np.ndarray):
    d = two_l(l) + 1
    lop = l_operator(u, l, p, iso)
    out = []
    for a in range(4):
        w = weight_WL(a, u, p)
        if abs(w) < 1e-12:
            return None
        out.append(_aux_component(lop, a, d) / (2 * w))
    return out


def extract_generators(l, p: EllipticParams, points=EXTRACT_POINTS) -> SklyaninGenerators:
    """Extract S^a at two spectral points and check that they agree."""
    iso = iso_sym_to_theta(l, p)
    found = []
    used = []
    for u0 in points:
        for shift in range(8):
            u = u0 + 0.037 * shift
            s = _extract_at(u, l, p, iso)
            if s is not None:
                found.append(s)
                used.append(u)
                break
        else:
            raise NumericError(f"W^L vanishes near u={u0}")
    spread = max(float(np.abs(found[0][a] - found[1][a]).max()) for a in range(4))
    if spread > 1e-7:
        raise ConsistencyError(f"Sklyanin generators depend on u (spread {spread:.3e})")
    S = tuple((found[0][a] + found[1][a]) / 2 for a in range(4))
    return SklyaninGenerators(Fraction(two_l(l), 2), S, tuple(used), spread)


def functional_equation_residual(basis: ThetaBasis, ys) -> float:
    """Max relative violation of f(y+1) = f(-y) = f(y), f(y+tau) = e^{-4 l pi i (2y+tau)} f(y)."""
    ys = np.atleast_1d(np.asarray(ys, dtype=complex))
    tau = basis.params.tau
    f = basis.evaluate(ys)
    factor = np.exp(-2j * np.pi * basis.two_l * (2 * ys + tau))[:, None]
    pairs = [
        (basis.evaluate(ys + 1), f),
        (basis.evaluate(-ys), f),
        (basis.evaluate(ys + tau), factor * f),
    ]
    worst = 0.0
    for lhs, rhs in pairs:
        scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
        worst = max(worst, float((np.abs(lhs - rhs) / scale).max()))
    return worst
