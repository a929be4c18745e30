"""Jacobi theta functions with characteristics and the Boltzmann weights.

Convention used throughout the package::

    theta_ab(z; tau) = sum_n exp(i pi (n + a/2)^2 tau + 2 pi i (n + a/2)(z + b/2))

so that ``theta_ab(z + 1) = exp(i pi a) theta_ab(z)`` and
``theta_ab(z + tau) = exp(-i pi tau - 2 pi i (z + b/2)) theta_ab(z)``.
theta_11 is odd, the other three are even.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

import numpy as np

from .errors import ParameterError, PrecisionError, SingularParameterError

N_MAX_CAP = 64
SINGULAR_TOL = 1e-13

ArrayLike = Union[complex, float, np.ndarray]


class ThetaChar(NamedTuple):
    """Characteristic (a b) of a theta function, a, b in {0, 1}."""

    a: int
    b: int


# g_0 = (11), g_1 = (10), g_2 = (00), g_3 = (01); index a pairs with sigma^a.
G_CHARS = (ThetaChar(1, 1), ThetaChar(1, 0), ThetaChar(0, 0), ThetaChar(0, 1))


@dataclass(frozen=True)
class EllipticParams:
    """Modulus tau = i/t, anisotropy eta = eta_num/eta_den and series tolerance."""

    t: float
    eta_num: int
    eta_den: int
    tail_tol: float = 1e-16

    def __post_init__(self):
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ParameterError(f"t must be positive, got {self.t}")
        r1, r = int(self.eta_num), int(self.eta_den)
        if r1 != self.eta_num or r != self.eta_den:
            raise ParameterError("eta numerator/denominator must be integers")
        if math.gcd(r1, r) != 1:
            raise ParameterError(f"eta = {r1}/{r} is not in lowest terms")
        if r % 2 != 0 or r1 % 2 != 1:
            raise ParameterError(f"eta = {r1}/{r} needs an odd numerator and even denominator")
        if not 0 < r1 < r:
            raise ParameterError(f"eta = {r1}/{r} must lie in (0, 1)")
        if not self.tail_tol > 0:
            raise ParameterError("tail_tol must be positive")

    @classmethod
    def from_string(cls, t: float, eta: str, tail_tol: float = 1e-16) -> "EllipticParams":
        """Build from a rational string such as ``"1/6"`` (no float parsing)."""
        try:
            num, den = (int(s) for s in eta.strip().split("/"))
        except ValueError as exc:
            raise ParameterError(f"eta must look like 'p/q', got {eta!r}") from exc
        return cls(float(t), num, den, tail_tol)

    @property
    def tau(self) -> complex:
        return 1j / self.t

    @property
    def eta(self) -> float:
        return self.eta_num / self.eta_den

    @property
    def eta_fraction(self) -> Fraction:
        return Fraction(self.eta_num, self.eta_den)


def _check_tau(tau: complex) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise ParameterError(f"Im tau must be positive, got tau = {tau}")
    return tau


def truncation_index(a: int, tau: complex, y_max: float, tol: float, deriv: bool = False) -> int:
    """Smallest window |n| <= N whose discarded terms are bounded by ``tol``.

    The bound is geometric: past the peak of the Gaussian the ratio of
    consecutive term bounds is at most ``rho < 1``.
    """
    if not tol > 0:
        raise ParameterError("tolerance must be positive")
    s = _check_tau(tau).imag
    y = abs(y_max)
    for n_max in range(N_MAX_CAP + 1):
        k = n_max + 1 - a / 2.0  # smallest |n + a/2| outside the window
        if k <= 0:
            continue
        log_rho = -math.pi * s * (2 * k + 1) + 2 * math.pi * y
        if deriv:
            log_rho += math.log((k + 1) / k)
        if log_rho >= 0:
            continue
        log_term = -math.pi * s * k * k + 2 * math.pi * k * y
        if deriv:
            log_term += math.log(2 * math.pi * k)
        bound = 2.0 * math.exp(log_term) / (1.0 - math.exp(log_rho))
        if bound < tol:
            return n_max
    raise PrecisionError(
        f"theta tail below {tol:g} needs more than {N_MAX_CAP} terms (Im tau={s}, |Im z|={y})"
    )


def _series(char, z, tau, tol, deriv):
    a, b = (int(c) for c in char)
    if a not in (0, 1) or b not in (0, 1):
        raise ParameterError(f"characteristic must be bits, got {char}")
    tau = _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    y_max = float(np.max(np.abs(z.imag))) if z.size else 0.0
    n_max = truncation_index(a, tau, y_max, tol, deriv)
    k = np.arange(-n_max, n_max + 1) + a / 2.0
    phase = 1j * np.pi * k * k * tau + 2j * np.pi * k * (z[..., None] + b / 2.0)
    terms = np.exp(phase)
    if deriv:
        terms = terms * (2j * np.pi * k)
    out = terms.sum(axis=-1)
    return out if out.ndim else complex(out)


def theta(char, z: ArrayLike, tau: complex, tol: float = 1e-16):
    """theta_ab(z; tau), tail of the discarded series below ``tol``."""
    return _series(char, z, tau, tol, deriv=False)


def theta_deriv(char, z: ArrayLike, tau: complex, tol: float = 1e-16):
    """d/dz theta_ab(z; tau) by term-wise differentiation."""
    return _series(char, z, tau, tol, deriv=True)


def theta11(z: ArrayLike, tau: complex, tol: float = 1e-16):
    return _series((1, 1), z, tau, tol, deriv=False)


def lattice_distance(z: ArrayLike, tau: complex) -> np.ndarray:
    """Distance from z to the nearest point of Z + tau Z (zeros of theta_11)."""
    tau = _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    n0 = np.round(z.imag / tau.imag)
    best = np.full(z.shape, np.inf)
    for dn in (-1, 0, 1):
        w = z - (n0 + dn) * tau
        best = np.minimum(best, np.abs(w - np.round(w.real)))
    return best


def log_theta11(z: ArrayLike, tau: complex, tol: float = 1e-16):
    """A logarithm of theta_11 that is continuous inside each period cell.

    Uses the triple product on the strip |Im z| < Im tau after reducing
    Re z into [0, 1) and Im z by whole multiples of tau (toward zero).
    exp(log_theta11(z)) == theta11(z) everywhere off the zeros.
    """
    tau = _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    s = tau.imag
    m = np.trunc(z.imag / s)
    z1 = z - m * tau
    k = np.floor(z1.real)
    z0 = z1 - k
    q2 = np.exp(2j * np.pi * tau)
    e = np.exp(2j * np.pi * z0)
    worst = float(np.max(np.abs(z0.imag))) if z0.size else 0.0
    # |q^{2n} e^{+-2 pi i z0}| <= exp(-2 pi (n s - |Im z0|))
    n_terms = 1
    while math.exp(-2 * math.pi * (n_terms * s - worst)) / max(
        1e-300, 1 - math.exp(-2 * math.pi * (s - worst))
    ) > tol:
        n_terms += 1
        if n_terms > 4096:
            raise PrecisionError("product expansion of theta_11 does not converge")
    n = np.arange(1, n_terms + 1)
    qn = q2 ** n
    prod = (
        np.log1p(-qn[None, :] * e.reshape(-1, 1)) + np.log1p(-qn[None, :] / e.reshape(-1, 1))
    ).sum(axis=1).reshape(z.shape)
    const = math.log(2.0) + 1j * np.pi * tau / 4 + 1j * np.pi + np.sum(np.log1p(-qn))
    out = (
        const
        + np.log(np.sin(np.pi * z0))
        + prod
        + 1j * np.pi * k
        - 1j * np.pi * m * m * tau
        - 2j * np.pi * m * (z1 + 0.5)
    )
    return out if out.ndim else complex(out)


def _weight_char(a: int) -> ThetaChar:
    if a not in (0, 1, 2, 3):
        raise ParameterError(f"weight index must be 0..3, got {a}")
    return G_CHARS[a]


def weight_W(a: int, u: complex, p: EllipticParams) -> complex:
    """Normalized Baxter weight W_a(u); W_a(0) = 1/2 for every a."""
    g = _weight_char(a)
    tau, eta, tol = p.tau, p.eta, p.tail_tol
    den_char = theta(g, eta, tau, tol)
    if abs(den_char) < SINGULAR_TOL:
        raise SingularParameterError(f"theta_{g.a}{g.b}(eta) vanishes for eta={p.eta_fraction}")
    den_u = theta11(u + 2 * eta, tau, tol)
    if abs(den_u) < SINGULAR_TOL:
        raise SingularParameterError(f"theta_11(u + 2 eta) vanishes at u={u}")
    t2 = theta11(2 * eta, tau, tol)
    if abs(t2) < SINGULAR_TOL:
        raise SingularParameterError(f"theta_11(2 eta) vanishes for eta={p.eta_fraction}")
    return theta(g, u + eta, tau, tol) * t2 / (2 * den_char * den_u)


def weight_WL(a: int, u: complex, p: EllipticParams) -> complex:
    """Weight of the L-operator, theta_ga(u) / (2 theta_11(2 eta) theta_ga(eta))."""
    g = _weight_char(a)
    tau, eta, tol = p.tau, p.eta, p.tail_tol
    den = 2 * theta11(2 * eta, tau, tol) * theta(g, eta, tau, tol)
    if abs(den) < SINGULAR_TOL:
        raise SingularParameterError(
            f"denominator theta_11(2 eta) theta_{g.a}{g.b}(eta) vanishes for eta={p.eta_fraction}"
        )
    return theta(g, u, tau, tol) / den
