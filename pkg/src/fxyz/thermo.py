"""String configurations, Bethe seeds and the thermodynamic-limit series.

Rapidities are x = i t u; an A-string with parity +/- and center x has
members x + 2 i eta t alpha (+ i t/2 for parity -), alpha = -(A-1)/2..(A-1)/2.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bethe import BetheState, eigenvalue_fused, from_rapidity, is_admissible, solve
from .chain import ChainParams
from .elliptic import EllipticParams, log_theta11
from .errors import ConfigurationError, ConvergenceError, FxyzError, ParameterError, PrecisionError

HALF_SUM = "half-sum"
HALF_SUM_SHIFTED = "half-sum-shifted"
MAX_SERIES_TERMS = 100000


def validity_gate(l, p: EllipticParams) -> None:
    """Require 2(2l+1) eta < 1."""
    if not 2 * (2 * Fraction(l) + 1) * p.eta_fraction < 1:
        raise ParameterError(f"2(2l+1) eta = {2 * (2 * Fraction(l) + 1) * p.eta_fraction} is not below 1")


@dataclass(frozen=True)
class StringEntry:
    length: int
    parity: int  # +1 or -1
    center: float


@dataclass
class StringConfig:
    entries: list
    holes: list = field(default_factory=list)
    variant: str = HALF_SUM
    nu: int = 0
    n_aux: int = 0  # trailing entries that are not part of the 2l-string sea
    slots: list | None = None  # ladder positions of the sea strings

    @property
    def root_count(self) -> int:
        return sum(e.length for e in self.entries)

    def count(self, length: int, parity: int = 1) -> int:
        return sum(1 for e in self.entries if e.length == length and e.parity == parity)


def _even_slots(k: int) -> np.ndarray:
    """k centers equally spaced in (-1/4, 1/4), symmetric about 0."""
    return (np.arange(1, k + 1) - (k + 1) / 2) / (2 * k)


def ground_state_config(cp: ChainParams) -> StringConfig:
    """N/2 strings of length 2l, parity +, symmetric seed centers."""
    if cp.N % 2:
        raise ParameterError("the ground-state configuration needs even N")
    validity_gate(cp.l, cp.p)
    n = cp.two_l
    return StringConfig([StringEntry(n, 1, float(c)) for c in _even_slots(cp.N // 2)])


def excited_config(kind: str, x1: float, x2: float, variant: str, cp: ChainParams) -> StringConfig:
    """Two-hole configurations of kind "I" or "II".

    I: N/2-2 strings of length 2l, one (2l-1)- and one (2l+1)-string.
    II: N/2-1 strings of length 2l, one (2l-1)-string and one 1-string of parity -.
    For l = 1/2 the (2l-1)-string of kind II is empty and simply omitted.
    """
    if cp.N % 2:
        raise ParameterError("excited configurations need even N")
    validity_gate(cp.l, cp.p)
    if variant not in (HALF_SUM, HALF_SUM_SHIFTED):
        raise ParameterError(f"unknown variant {variant!r}")
    n = cp.two_l
    k = cp.N // 2
    x_minus = (x1 + x2) / 2
    x_other = x_minus if variant == HALF_SUM else (x1 + x2 + 1) / 2
    if kind == "I":
        if n - 1 < 1:
            raise ConfigurationError("excited state I needs a (2l-1)-string, which is empty for l = 1/2")
        slots, n_main = k, k - 2
        extra = [StringEntry(n - 1, 1, x_minus), StringEntry(n + 1, 1, x_other)]
    elif kind == "II":
        slots, n_main = k + 1, k - 1
        extra = [StringEntry(n - 1, 1, x_minus)] if n > 1 else []
        extra.append(StringEntry(1, -1, x_other))
    else:
        raise ParameterError(f"kind must be 'I' or 'II', got {kind!r}")
    if n_main < 0:
        raise ParameterError(f"N = {cp.N} is too small for excited state {kind}")
    grid = list(_even_slots(slots))
    pos = list(range(1, slots + 1))
    for h in (x1, x2):
        i = int(np.argmin([abs(g - h) for g in grid]))
        grid.pop(i)
        pos.pop(i)
    entries = [StringEntry(n, 1, float(c)) for c in grid] + extra
    return StringConfig(entries, [float(x1), float(x2)], variant, n_aux=len(extra), slots=pos)


def string_members(entry: StringEntry, p: EllipticParams) -> np.ndarray:
    alpha = np.arange(entry.length) - (entry.length - 1) / 2
    x = entry.center + 2j * p.eta * p.t * alpha
    if entry.parity < 0:
        x = x + 0.5j * p.t
    return x


def config_to_roots(c: StringConfig, p: EllipticParams) -> np.ndarray:
    """Exact string positions converted to w = x/(i t)."""
    if not c.entries:
        return np.zeros(0, dtype=complex)
    x = np.concatenate([string_members(e, p) for e in c.entries])
    return from_rapidity(x, p.t)


# --- counting equations for real string centers ---------------------------------


def _counting_phase(centers: np.ndarray, length: int, cp: ChainParams, fixed=None, nu: int = 0) -> np.ndarray:
    p = cp.p
    eta, tau, tol = p.eta, p.tau, p.tail_tol
    n = cp.two_l
    alpha = np.arange(length) - (length - 1) / 2
    w = -1j * centers[:, None] / p.t + 2 * eta * alpha[None, :]  # (K, A)
    own = cp.N * (log_theta11(w + n * eta, tau, tol) - log_theta11(w - n * eta, tau, tol)).sum(axis=1)
    d = w[:, :, None, None] - w[None, None, :, :]  # (K, A, K, A)
    k = np.arange(len(centers))
    d[k, :, k, :] = 0.5  # placeholder for the excluded same-string block
    pair = log_theta11(d + 2 * eta, tau, tol) - log_theta11(d - 2 * eta, tau, tol)
    pair = np.asarray(pair).sum(axis=(1, 3))
    np.fill_diagonal(pair, 0.0)
    total = own - pair.sum(axis=1) + 4j * np.pi * nu * eta * length
    if fixed is not None and len(fixed):
        e = w[:, :, None] - np.asarray(fixed)[None, None, :]
        total = total - (log_theta11(e + 2 * eta, tau, tol) - log_theta11(e - 2 * eta, tau, tol)).sum(axis=(1, 2))
    return total.imag


def solve_centers(cp: ChainParams, seed_centers: np.ndarray, length: int, tol: float = 1e-12,
                  max_iter: int = 60, fixed=None, nu: int = 0, slots=None) -> np.ndarray:
    """Real centers of K equal strings from the imaginary part of the summed Bethe equations.

    Quantum numbers J_j are consecutive (or taken at the integer positions
    ``slots`` of a longer ladder) around the mean phase of the seed, in the
    direction in which the phase increases along x.  Roots in ``fixed`` enter
    only through their scattering phase.
    """
    c = np.asarray(seed_centers, dtype=float).copy()
    k = len(c)
    if k == 0:
        return c
    h = 1e-6

    def phase(x):
        return _counting_phase(x, length, cp, fixed, nu)

    ph = phase(c)
    slope = np.sign(np.mean(phase(c + h) - phase(c - h)))
    pos = np.arange(1, k + 1) if slots is None else np.asarray(slots, dtype=float)
    ladder = pos - (k + 1) / 2 if slots is None else pos - pos.mean()
    quantum = ph.mean() / (2 * np.pi) + slope * ladder
    for _ in range(max_iter):
        f = phase(c) - 2 * np.pi * quantum
        if np.abs(f).max() < tol:
            return c
        jac = np.empty((k, k))
        for i in range(k):
            e = np.zeros(k)
            e[i] = h
            jac[:, i] = (phase(c + e) - phase(c - e)) / (2 * h)
        step = np.linalg.solve(jac, f)
        big = np.abs(step).max()
        if big > 0.05:
            step *= 0.05 / big
        c = c - step
    f = phase(c) - 2 * np.pi * quantum
    if np.abs(f).max() > 1e-8:
        raise ConvergenceError(f"string centers did not converge (residual {np.abs(f).max():.3e})")
    return c


def ground_state(cp: ChainParams, tol: float = 1e-12, max_iter: int = 200) -> BetheState:
    """Solved ground state: centers from the counting equations, then full Newton.

    Members of longer strings start with a small deterministic deviation so
    that no two roots differ by exactly 2 eta.
    """
    c = ground_state_config(cp)
    length = cp.two_l
    centers = solve_centers(cp, np.array([e.center for e in c.entries]), length)
    s = BetheState(0, _sea_roots(centers, length, cp.p), cp)
    return solve(s, tol=tol, max_iter=max_iter)


def _sea_roots(centers: np.ndarray, length: int, p: EllipticParams) -> np.ndarray:
    alpha = np.arange(length) - (length - 1) / 2
    dev = 1e-3 * (1 + 0.5j) * alpha
    return (-1j * centers[:, None] / p.t + 2 * p.eta * alpha[None, :] + dev[None, :]).ravel()


def excited_state(kind: str, x1: float, x2: float, variant: str, cp: ChainParams, nu: int = 0,
                  tol: float = 1e-12, max_iter: int = 300) -> BetheState:
    """Solve a two-hole configuration; the sea is seeded from its counting equations."""
    c = excited_config(kind, x1, x2, variant, cp)
    sea = c.entries[: len(c.entries) - c.n_aux]
    aux = StringConfig(c.entries[len(sea):])
    fixed = config_to_roots(aux, cp.p)
    length = cp.two_l
    centers = solve_centers(cp, np.array([e.center for e in sea]), length, fixed=fixed, nu=nu, slots=c.slots)
    w = np.concatenate([_sea_roots(centers, length, cp.p), fixed])
    return solve(BetheState(nu, w, cp), tol=tol, max_iter=max_iter)


def counting_function(x, s: BetheState) -> np.ndarray:
    """(1/2 pi) Im of the summed Bethe phase of a test 2l-string centered at real x."""
    cp = s.cp
    p = cp.p
    eta, tau, tol = p.eta, p.tau, p.tail_tol
    n = cp.two_l
    x = np.atleast_1d(np.asarray(x, dtype=float))
    alpha = np.arange(n) - (n - 1) / 2
    w = -1j * x[:, None] / p.t + 2 * eta * alpha[None, :]
    v = cp.N * (log_theta11(w + n * eta, tau, tol) - log_theta11(w - n * eta, tau, tol)).sum(axis=1)
    e = w[:, :, None] - s.roots[None, None, :]
    v = v - (log_theta11(e + 2 * eta, tau, tol) - log_theta11(e - 2 * eta, tau, tol)).sum(axis=(1, 2))
    v = v + 4j * np.pi * s.nu * eta * n
    return v.imag / (2 * np.pi)


def hole_positions(s: BetheState, grid: int = 20001) -> np.ndarray:
    """Real x where the counting function takes a sea value but no sea string sits."""
    p = s.cp.p
    x_roots = (1j * p.t * s.roots)
    sea = x_roots[np.abs(x_roots.imag) < 1e-6].real if s.cp.two_l == 1 else None
    if sea is None or len(sea) == 0:
        raise ParameterError("hole search is implemented for l = 1/2 seas")
    # sea strings sit where the counting function is offset + integer
    offset = float(np.angle(np.mean(np.exp(2j * np.pi * counting_function(sea, s)))) / (2 * np.pi))
    xs = np.linspace(-0.5, 0.5, grid)
    z = counting_function(xs, s) - offset
    k = np.floor(z)
    found = []
    for i in np.nonzero(np.diff(k) != 0)[0]:
        target = max(k[i], k[i + 1])
        a, b = xs[i], xs[i + 1]
        fa = counting_function(a, s)[0] - offset - target
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = counting_function(m, s)[0] - offset - target
            if fa * fm <= 0:
                b = m
            else:
                a, fa = m, fm
        found.append(0.5 * (a + b))
    found = np.array(found)
    return np.array([x for x in found if np.min(np.abs(x - sea)) > 1e-5])


# --- thermodynamic series -------------------------------------------------------


def _lsh(a):
    """log sinh(a) for a > 0 without overflow."""
    a = np.asarray(a, dtype=float)
    return a + np.log1p(-np.exp(-2 * a)) - math.log(2.0)


def _inv_cosh(a):
    a = np.asarray(a, dtype=float)
    e = np.exp(-a)
    return 2 * e / (1 + e * e)


def _geometric_terms(rho: float, lead: float, tol: float, harmonic: bool) -> int:
    """Number of terms after which sum_{n>n0} lead rho^n (/n) is below tol."""
    if not 0 < rho < 1:
        raise ParameterError(f"series does not decay (ratio {rho})")
    n = 1
    while True:
        tail = lead * rho ** (n + 1) / (1 - rho)
        if harmonic:
            tail /= n + 1
        if tail < tol:
            return n
        n += 1
        if n > MAX_SERIES_TERMS:
            raise PrecisionError("series needs too many terms for the requested tolerance")


@dataclass(frozen=True)
class SeriesValue:
    value: float
    terms: int


def gs_series(x: float, l, p: EllipticParams, tol: float | None = None) -> SeriesValue:
    """Per-site ground-state value pi l + 2 pi l x (1-4l eta) + 2 sum_n (...) sin 2 pi n x."""
    validity_gate(l, p)
    lf = float(Fraction(l))
    eta, t = p.eta, p.t
    tol = p.tail_tol if tol is None else tol
    d1 = 4 * math.pi * eta * t
    rho = math.exp(-d1)
    lead = 2.0 / (1 - math.exp(-2 * d1)) ** 2
    n_terms = _geometric_terms(rho, lead, tol, harmonic=True)
    n = np.arange(1, n_terms + 1)
    log_c = (_lsh(4 * math.pi * n * lf * eta * t) + _lsh(math.pi * n * t * (1 - 4 * lf * eta))
             - _lsh(math.pi * n * t) - _lsh(4 * math.pi * n * eta * t))
    coeff = np.exp(log_c) / n
    val = math.pi * lf + 2 * math.pi * lf * x * (1 - 4 * lf * eta) + 2 * float(np.sum(coeff * np.sin(2 * math.pi * n * x)))
    return SeriesValue(val, n_terms)


def gs_log_eigenvalue(x: float, cp: ChainParams) -> float:
    """Large-N value of (1/i) log t^{l,l}(u) on the ground state, at rapidity x."""
    return cp.N * gs_series(x, cp.l, cp.p).value


def _sine_cosh_series(x: float, p: EllipticParams, kind: str, tol: float | None = None) -> SeriesValue:
    eta, t = p.eta, p.t
    tol = p.tail_tol if tol is None else tol
    a = 2 * math.pi * eta * t
    rho = math.exp(-a)
    n_terms = _geometric_terms(rho, 2.0, tol, harmonic=(kind == "sin"))
    n = np.arange(1, n_terms + 1)
    w = _inv_cosh(a * n)
    if kind == "sin":
        total = float(np.sum(np.sin(2 * math.pi * n * x) * w / n))
    else:
        total = float(np.sum(np.cos(2 * math.pi * n * x) * w))
    return SeriesValue(total, n_terms)


def log_tau(x: float, p: EllipticParams) -> float:
    """log tau(x) = -pi/2 - pi x - sum_n sin(2 pi n x)/(n ch(2 pi n eta t))."""
    return -math.pi / 2 - math.pi * x - _sine_cosh_series(x, p, "sin").value


def excitation_shift(x: float, x1: float, x2: float, p: EllipticParams) -> float:
    """log tau(x - x1) + log tau(x - x2)."""
    return log_tau(x - x1, p) + log_tau(x - x2, p)


def particle_momentum(x: float, p: EllipticParams) -> float:
    """p(x) = -pi/2 + pi x + sum_n sin(2 pi n x)/(n ch(2 pi n eta t))."""
    return -math.pi / 2 + math.pi * x + _sine_cosh_series(x, p, "sin").value


def particle_energy(x: float, coupling: float, p: EllipticParams) -> float:
    """H(x) = coupling (-pi - 2 pi sum_n cos(2 pi n x)/ch(2 pi n eta t))."""
    return coupling * (-math.pi - 2 * math.pi * _sine_cosh_series(x, p, "cos").value)


# --- finite-size convergence ----------------------------------------------------


@dataclass
class FiniteSizeEntry:
    N: int
    delta: float | None
    per_site: complex | None
    expected: float
    residual: float | None
    max_phase_step: float | None
    error: str | None = None


@dataclass
class FiniteSizeReport:
    x: float
    entries: list

    @property
    def deltas(self) -> list:
        return [e.delta for e in self.entries]

    @property
    def converged(self) -> bool:
        return all(e.delta is not None for e in self.entries)

    @property
    def non_increasing(self) -> bool:
        d = self.deltas
        return self.converged and all(b <= a for a, b in zip(d, d[1:]))

    @property
    def strictly_decreasing(self) -> bool:
        d = self.deltas
        return self.converged and all(b < a for a, b in zip(d, d[1:]))


def continued_log(s: BetheState, u: complex, steps: int = 64) -> tuple[complex, float]:
    """log t^{l,l} along the straight path from 0 to u, starting from the branch nearest i N pi l.

    Returns the log and the largest phase change between consecutive path points.
    """
    cp = s.cp
    target = cp.N * math.pi * float(cp.l)
    v0 = eigenvalue_fused(0.0, cp.l, s)
    lg = complex(np.log(v0))
    lg += 2j * math.pi * round((target - lg.imag) / (2 * math.pi))
    worst = 0.0
    for k in range(1, steps + 1):
        v = eigenvalue_fused(u * k / steps, cp.l, s)
        new = complex(np.log(v))
        new += 2j * math.pi * round((lg.imag - new.imag) / (2 * math.pi))
        worst = max(worst, abs(new.imag - lg.imag))
        lg = new
    return lg, worst


def _finite_size_one(cp: ChainParams, x: float) -> FiniteSizeEntry:
    expected = gs_series(x, cp.l, cp.p).value
    try:
        s = ground_state(cp)
        lg, worst = continued_log(s, from_rapidity(x, cp.p.t))
    except FxyzError as exc:
        return FiniteSizeEntry(cp.N, None, None, expected, None, None, repr(exc))
    per_site = lg / (1j * cp.N)
    return FiniteSizeEntry(cp.N, abs(per_site - expected), per_site, expected, s.residual_norm, worst)


def finite_size_check(cps: Sequence[ChainParams], x: float, threads: int = 1) -> FiniteSizeReport:
    """Per-site discrepancy between the solved ground state and the large-N series, along a ladder of N."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(lambda c: _finite_size_one(c, x), cps))
    else:
        entries = [_finite_size_one(c, x) for c in cps]
    return FiniteSizeReport(float(x), entries)


@dataclass
class ExcitedStateReport:
    kind: str
    variant: str
    nu: int
    N: int
    x: float
    holes: list
    measured: float
    predicted: float
    discrepancy: float  # wrapped into (-pi, pi]
    admissible: bool
    residual: float


def excited_state_check(kind: str, x1: float, x2: float, variant: str, cp: ChainParams, x: float,
                        nu: int = 0) -> ExcitedStateReport:
    """Compare (1/i)(log t_excited - log t_ground) with log tau(x - x1) + log tau(x - x2).

    The hole rapidities are read off the solved state, so they may differ
    from the requested x1, x2.  This is a long-running check for l = 1/2.
    """
    gs = ground_state(cp)
    s = excited_state(kind, x1, x2, variant, cp, nu=nu)
    holes = hole_positions(s)
    if len(holes) != 2:
        raise ConvergenceError(f"expected two holes, found {len(holes)}")
    u = from_rapidity(x, cp.p.t)
    lg_e, _ = continued_log(s, u)
    lg_g, _ = continued_log(gs, u)
    measured = float(((lg_e - lg_g) / 1j).real)
    predicted = excitation_shift(x, float(holes[0]), float(holes[1]), cp.p)
    gap = (measured - predicted + math.pi) % (2 * math.pi) - math.pi
    return ExcitedStateReport(kind, variant, nu, cp.N, float(x), [float(h) for h in holes], measured,
                              predicted, float(gap), is_admissible(s), s.residual_norm)
