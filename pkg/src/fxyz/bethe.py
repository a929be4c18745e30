"""Bethe equations, Newton solver and closed-form transfer-matrix eigenvalues.

A state is an integer nu together with roots w_1..w_M, M = N l.  The
eigenvalue of T^{1/2,l}(u) is

    t(u) = Q(u - 2 eta)/Q(u) + h(u) Q(u + 2 eta)/Q(u),
    Q(u) = exp(-pi i nu u) prod_j theta_11(u - w_j + eta),
    h(u) = [theta_11(u + (1-2l) eta) / theta_11(u + (2l+1) eta)]^N,

and the Bethe equations are the condition that the apparent poles of t at
the zeros of Q cancel.  Everything is evaluated through a continuous
logarithm of theta_11 so that large N neither overflows nor underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .chain import ChainParams, spectrum
from .elliptic import lattice_distance, log_theta11, theta11, theta_deriv
from .errors import (
    CollisionError,
    ConsistencyError,
    ConvergenceError,
    ParameterError,
    SingularConfigurationError,
    SizeError,
)

ZERO_TOL = 1e-12
COLLISION_TOL = 1e-10
CONTINUATION_RADIUS = 1e-3
CONTINUATION_POINTS = 16


@dataclass
class BetheState:
    """nu, roots w_j, winding integers and solver metadata."""

    nu: int
    roots: np.ndarray
    cp: ChainParams
    branch: np.ndarray | None = None
    residual_norm: float = math.inf
    solved: bool = False
    iterations: int = 0
    trace: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.roots = np.atleast_1d(np.asarray(self.roots, dtype=complex))
        if int(self.nu) != self.nu:
            raise ParameterError(f"nu must be an integer, got {self.nu}")
        self.nu = int(self.nu)
        if len(self.roots) != self.cp.M:
            raise ParameterError(f"expected M = N l = {self.cp.M} roots, got {len(self.roots)}")
        if self.branch is None:
            self.branch = nearest_winding(self)
        self.branch = np.asarray(self.branch, dtype=int)

    @property
    def M(self) -> int:
        return len(self.roots)

    def canonical(self) -> "BetheState":
        """Real parts reduced to [-1/2, 1/2), roots sorted by (real, imag)."""
        w = self.roots - np.floor(self.roots.real + 0.5)
        order = np.lexsort((np.round(w.imag, 12), np.round(w.real, 12)))
        out = replace(self, roots=w[order], branch=None)
        out.residual_norm = self.residual_norm
        out.solved = self.solved
        return out


def to_rapidity(w, t: float):
    """x = i t w."""
    return 1j * t * np.asarray(w)


def from_rapidity(x, t: float):
    """w = x / (i t)."""
    return np.asarray(x) / (1j * t)


def min_separation(roots, tau: complex) -> float:
    """Smallest distance between two roots modulo Z + tau Z."""
    roots = np.asarray(roots, dtype=complex)
    if len(roots) < 2:
        return math.inf
    d = roots[:, None] - roots[None, :]
    iu = np.triu_indices(len(roots), 1)
    return float(np.min(lattice_distance(d[iu], tau)))


def _check_arguments(s: BetheState):
    p = s.cp.p
    eta, tau = p.eta, p.tau
    n = s.cp.two_l
    w = s.roots
    for sign in (1, -1):
        bad = np.nonzero(lattice_distance(w + sign * n * eta, tau) < ZERO_TOL)[0]
        if bad.size:
            raise SingularConfigurationError(f"root w_{bad[0] + 1} sits on a zero of theta_11(w -/+ 2l eta)")
    d = w[:, None] - w[None, :]
    for sign in (1, -1):
        near = lattice_distance(d + sign * 2 * eta, tau) < ZERO_TOL
        np.fill_diagonal(near, False)
        if near.any():
            j, k = np.argwhere(near)[0]
            raise SingularConfigurationError(
                f"roots w_{j + 1} and w_{k + 1} differ by a zero of theta_11(. -/+ 2 eta)"
            )


def _raw_residual(s: BetheState) -> np.ndarray:
    p = s.cp.p
    eta, tau, tol = p.eta, p.tau, p.tail_tol
    N, n = s.cp.N, s.cp.two_l
    w = s.roots
    lhs = N * (log_theta11(w + n * eta, tau, tol) - log_theta11(w - n * eta, tau, tol))
    d = w[:, None] - w[None, :]
    a = log_theta11(d + 2 * eta, tau, tol) - log_theta11(d - 2 * eta, tau, tol)
    a = np.asarray(a).reshape(d.shape)
    np.fill_diagonal(a, 0.0)
    return lhs + 4j * np.pi * s.nu * eta - a.sum(axis=1)


def nearest_winding(s: BetheState) -> np.ndarray:
    _check_arguments(s)
    raw = _raw_residual(s)
    return np.round(raw.imag / (2 * np.pi)).astype(int)


def bethe_residual(s: BetheState) -> np.ndarray:
    """Logarithmic Bethe residuals F_j, including the recorded windings."""
    _check_arguments(s)
    return _raw_residual(s) - 2j * np.pi * s.branch


def _psi(z, p):
    # d/dz log theta_11
    return theta_deriv((1, 1), z, p.tau, p.tail_tol) / theta11(z, p.tau, p.tail_tol)


def bethe_jacobian(s: BetheState) -> np.ndarray:
    p = s.cp.p
    eta = p.eta
    N, n = s.cp.N, s.cp.two_l
    w = s.roots
    d = w[:, None] - w[None, :]
    g = np.asarray(_psi(d + 2 * eta, p) - _psi(d - 2 * eta, p)).reshape(d.shape)
    np.fill_diagonal(g, 0.0)
    jac = g.copy()  # d F_j / d w_k = +g_jk for k != j
    diag = N * (_psi(w + n * eta, p) - _psi(w - n * eta, p)) - g.sum(axis=1)
    jac[np.diag_indices_from(jac)] = diag
    return jac


def solve(
    initial: BetheState,
    tol: float = 1e-12,
    max_iter: int = 50,
    step_limit: float | None = None,
    halvings: int = 8,
) -> BetheState:
    """Damped Newton iteration on the logarithmic Bethe equations.

    Windings follow the nearest branch at every iterate, so the iteration
    solves the product form of the equations.  Steps are capped at
    ``step_limit`` (default 0.1/(t M)) and halved up to ``halvings`` times
    while the residual does not decrease.
    """
    cp = initial.cp
    tau = cp.p.tau
    if initial.M == 0:
        return replace(initial, residual_norm=0.0, solved=True, branch=np.zeros(0, dtype=int))
    if min_separation(initial.roots, tau) < COLLISION_TOL:
        raise CollisionError("initial roots coincide modulo the period lattice; try the other variant")
    lim = step_limit if step_limit is not None else 0.1 / (cp.p.t * initial.M)
    s = replace(initial, branch=None)
    trace = []
    for it in range(max_iter + 1):
        f = bethe_residual(s)
        r = float(np.abs(f).max())
        trace.append(r)
        if not np.isfinite(r):
            raise ConvergenceError("Bethe residual is not finite", trace)
        if r < tol:
            out = replace(s, residual_norm=r, solved=True, iterations=it, trace=trace)
            return out
        if it == max_iter:
            break
        jac = bethe_jacobian(s)
        if it == 0 and np.linalg.cond(jac) > 1e10:
            raise ConvergenceError("Bethe Jacobian is singular at the initial point", trace)
        try:
            dw = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Bethe Jacobian", trace) from exc
        big = float(np.abs(dw).max())
        if big > lim:
            dw = dw * (lim / big)
        lam = 1.0
        for _ in range(halvings + 1):
            try:
                cand = replace(s, roots=s.roots - lam * dw, branch=None)
                rc = float(np.abs(bethe_residual(cand)).max())
            except SingularConfigurationError:
                rc = math.inf
            if rc < r:
                break
            lam /= 2
        if not math.isfinite(rc):
            raise ConvergenceError("every damped step lands on a singular configuration", trace)
        if min_separation(cand.roots, tau) < COLLISION_TOL:
            raise CollisionError(
                "roots collided during the Newton iteration; try the other excited-state variant", trace
            )
        s = cand
    raise ConvergenceError(f"no convergence in {max_iter} Newton steps (residual {trace[-1]:.3e})", trace)


# --- eigenvalues ---------------------------------------------------------------


def log_q(v, s: BetheState):
    """log Q(v) = -pi i nu v + sum_j log theta_11(v - w_j + eta)."""
    p = s.cp.p
    v = np.asarray(v, dtype=complex)
    args = v[..., None] - s.roots + p.eta
    return -1j * np.pi * s.nu * v + np.asarray(log_theta11(args, p.tau, p.tail_tol)).sum(axis=-1)


def log_h(v, cp: ChainParams):
    p = cp.p
    eta, tau, tol = p.eta, p.tau, p.tail_tol
    n = cp.two_l
    with np.errstate(divide="ignore"):  # h vanishes at u = (2l-1) eta
        return cp.N * (log_theta11(v + (1 - n) * eta, tau, tol) - log_theta11(v + (n + 1) * eta, tau, tol))


def _q_zero_distance(u: complex, s: BetheState, lp) -> float:
    eta = s.cp.p.eta
    m = int(2 * Fraction(lp))
    shifts = [(m + 1 - 2 * j) for j in range(m + 1)] + [(m - 1 - 2 * j) for j in range(m + 1)]
    worst = math.inf
    for k in shifts:
        d = lattice_distance(u + k * eta - s.roots + eta, s.cp.p.tau)
        worst = min(worst, float(np.min(d)) if d.size else math.inf)
    return worst


def _fused_direct(u: complex, lp, s: BetheState) -> complex:
    eta = s.cp.p.eta
    m = int(2 * Fraction(lp))
    if m == 0:
        return 1.0 + 0j
    top = log_q(u + (m + 1) * eta, s) + log_q(u - (m + 1) * eta, s)
    total = 0j
    log_a = 0j
    for j in range(m + 1):
        if j > 0:
            log_a = log_a + log_h(u + (m + 1 - 2 * j) * eta, s.cp)
        den = log_q(u + (m + 1 - 2 * j) * eta, s) + log_q(u + (m - 1 - 2 * j) * eta, s)
        total += np.exp(log_a + top - den)
    return complex(total)


def eigenvalue_fused(u: complex, lp, s: BetheState) -> complex:
    """Eigenvalue of T^{l',l}(u) on the Bethe state.

    Near a zero of one of the Q factors the value is taken as the mean over a
    small circle; a non-cancelling pole there raises.
    """
    u = complex(u)
    if _q_zero_distance(u, s, lp) > 1e-6:
        return _fused_direct(u, lp, s)
    w = np.exp(2j * np.pi * (np.arange(CONTINUATION_POINTS) + 0.5) / CONTINUATION_POINTS)
    vals = np.array([_fused_direct(u + CONTINUATION_RADIUS * z, lp, s) for z in w])
    residue = CONTINUATION_RADIUS * np.mean(vals * w)
    if abs(residue) > 1e-6 * max(1.0, float(np.abs(vals).max())):
        raise ConsistencyError(f"eigenvalue has an uncancelled pole near u={u} (residue {abs(residue):.3e})")
    return complex(vals.mean())


def eigenvalue_half(u: complex, s: BetheState) -> complex:
    """t^{1/2,l}(u) = Q(u-2eta)/Q(u) + h(u) Q(u+2eta)/Q(u)."""
    u = complex(u)
    if _q_zero_distance(u, s, Fraction(1, 2)) <= 1e-6:
        return eigenvalue_fused(u, Fraction(1, 2), s)
    eta = s.cp.p.eta
    lq = log_q(u, s)
    return complex(np.exp(log_q(u - 2 * eta, s) - lq) + np.exp(log_h(u, s.cp) + log_q(u + 2 * eta, s) - lq))


def pole_positions(s: BetheState) -> np.ndarray:
    """Zeros of Q(u): u = w_j - eta."""
    return s.roots - s.cp.p.eta


def residue_estimates(s: BetheState, radius: float = 1e-3, points: int = 16) -> np.ndarray:
    """|(1/2 pi i) contour integral of t(u) du| around each zero w_j - eta of Q.

    Vanishes (up to rounding) exactly when the apparent pole there cancels.
    """
    w = np.exp(2j * np.pi * (np.arange(points) + 0.5) / points)
    out = []
    for u0 in pole_positions(s):
        vals = np.array([_fused_direct(u0 + radius * z, Fraction(1, 2), s) for z in w])
        out.append(abs(radius * np.mean(vals * w)))
    return np.array(out)


def difference_estimates(s: BetheState, eps=(1e-3, 1e-4)) -> np.ndarray:
    """|t(w_j - eta + e) - t(w_j - eta - e)| * e per root (rows) and step (columns).

    For a cancelled pole this decays like e^2; a genuine pole leaves it near
    twice the residue.
    """
    out = np.empty((s.M, len(eps)))
    for j, u0 in enumerate(pole_positions(s)):
        for k, e in enumerate(eps):
            a = _fused_direct(u0 + e, Fraction(1, 2), s)
            b = _fused_direct(u0 - e, Fraction(1, 2), s)
            out[j, k] = abs(a - b) * e
    return out


def sum_rule_defect(s: BetheState) -> float:
    """Distance of 2 sum(w) - nu tau from the lattice Z + r tau Z (r = eta denominator)."""
    p = s.cp.p
    z = 2 * complex(np.sum(s.roots)) - s.nu * p.tau
    r = p.eta_den
    im = z.imag / (r * p.tau.imag)
    re = z.real
    return float(math.hypot(re - round(re), (im - round(im)) * r * p.tau.imag))


def is_admissible(s: BetheState, tol: float = 1e-6) -> bool:
    return sum_rule_defect(s) < tol


@dataclass
class MatchReport:
    u: complex
    lp: Fraction
    formula_value: complex
    nearest_exact: complex
    distance: float
    index: int
    success: bool


def match_spectrum(s: BetheState, u: complex, lp, cp: ChainParams | None = None, exact=None) -> MatchReport:
    """Compare the closed-form eigenvalue with the exact spectrum of T^{l',l}(u)."""
    cp = cp or s.cp
    cp.guard()
    if exact is None:
        exact = spectrum(u, lp, cp)
    val = eigenvalue_fused(u, lp, s)
    dist = np.abs(np.asarray(exact) - val)
    i = int(np.argmin(dist))
    ok = bool(dist[i] < 1e-6 * max(1.0, abs(val)))
    return MatchReport(complex(u), Fraction(lp), val, complex(exact[i]), float(dist[i]), i, ok)


# --- seed library ----------------------------------------------------------------


def trivial_states(cp: ChainParams) -> list[BetheState]:
    """The four explicit N = 2, l = 1/2 solutions (nu, w) = (0,0), (0,1/2), (1,tau/2), (1,(1+tau)/2)."""
    if cp.N != 2 or cp.two_l != 1:
        return []
    tau = cp.p.tau
    seeds = [(0, 0.0), (0, 0.5), (1, tau / 2), (1, (1 + tau) / 2)]
    return [BetheState(nu, [w], cp) for nu, w in seeds]


def scan_seeds(cp: ChainParams, count: int, seed: int = 0) -> list[BetheState]:
    """Deterministic pseudo-random initial states covering nu in 0..r-1."""
    rng = np.random.default_rng(seed)
    r = cp.p.eta_den
    out = []
    im = cp.p.tau.imag
    for _ in range(count):
        nu = int(rng.integers(0, r))
        w = rng.uniform(-0.5, 0.5, cp.M) + 1j * rng.uniform(-0.5, 0.5, cp.M) * im
        out.append(BetheState(nu, w, cp))
    return out


@dataclass
class LibraryEntry:
    state: BetheState
    admissible: bool
    sum_rule_defect: float
    origin: str


def build_library(cp: ChainParams, count: int = 120, seed: int = 0, tol: float = 1e-12) -> list[LibraryEntry]:
    """Solve every seed, drop failures and duplicates, classify by the sum rule.

    Two converged states are duplicates when their eigenvalues agree at a
    generic reference point.
    """
    if cp.dim > 4096:
        raise SizeError("seed library is meant for exact-diagonalization sizes")
    seeds = [("explicit", s) for s in trivial_states(cp)]
    seeds += [("scan", s) for s in scan_seeds(cp, count, seed)]
    u_ref = 0.1234 + 0.0321j
    entries: list[LibraryEntry] = []
    values: list[complex] = []
    for origin, s0 in seeds:
        try:
            s = solve(s0, tol=tol, max_iter=60, step_limit=0.5)
            if min_separation(s.roots, cp.p.tau) < 1e-6:
                continue
            val = eigenvalue_half(u_ref, s)
        except (ConvergenceError, SingularConfigurationError, ConsistencyError, FloatingPointError):
            continue
        if not np.isfinite(val):
            continue
        if any(abs(val - v) < 1e-8 * max(1.0, abs(v)) for v in values):
            continue
        values.append(val)
        s = s.canonical()
        d = sum_rule_defect(s)
        entries.append(LibraryEntry(s, d < 1e-6, d, origin))
    return entries


def log_derivative_at_zero(s: BetheState, step: float = 1e-4) -> complex:
    """d/du log t^{l,l}(u) at u = 0 by central differences with one Richardson step."""
    lp = s.cp.l

    def d1(h):
        return (eigenvalue_fused(h, lp, s) - eigenvalue_fused(-h, lp, s)) / (2 * h)

    deriv = (4 * d1(step / 2) - d1(step)) / 3
    return complex(deriv / eigenvalue_fused(0.0, lp, s))
