"""Independent reference implementations used by the tests.

Everything here is written directly from the defining formulas with mpmath or
explicit loops, sharing no code with the package beyond plain numbers.
"""

from __future__ import annotations

import itertools

import mpmath as mp
import numpy as np

mp.mp.dps = 30

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# characteristic (a, b) -> mpmath jtheta index and sign, theta_ab(z) = sign * jtheta(k, pi z, q)
_JT = {(1, 1): (1, -1), (1, 0): (2, 1), (0, 0): (3, 1), (0, 1): (4, 1)}
G_CHARS = ((1, 1), (1, 0), (0, 0), (0, 1))


def theta_mp(char, z, tau) -> complex:
    k, sign = _JT[tuple(char)]
    q = mp.exp(1j * mp.pi * mp.mpc(tau))
    return complex(sign * mp.jtheta(k, mp.pi * mp.mpc(z), q))


def theta_sum(char, z, tau, n_max: int = 60) -> complex:
    """Plain partial sum of the defining series, |n| <= n_max."""
    a, b = char
    n = mp.mpf(1) * np.arange(-n_max, n_max + 1)
    z, tau = mp.mpc(z), mp.mpc(tau)
    tot = mp.mpc(0)
    for k in n:
        m = k + mp.mpf(a) / 2
        tot += mp.exp(1j * mp.pi * m * m * tau + 2j * mp.pi * m * (z + mp.mpf(b) / 2))
    return complex(tot)


def baxter_weights(u, t, eta):
    tau = 1j / t
    t2 = theta_mp((1, 1), 2 * eta, tau)
    den = theta_mp((1, 1), u + 2 * eta, tau)
    return [theta_mp(g, u + eta, tau) * t2 / (2 * theta_mp(g, eta, tau) * den) for g in G_CHARS]


def baxter(u, t, eta) -> np.ndarray:
    w = baxter_weights(u, t, eta)
    return sum(w[a] * np.kron(PAULI[a], PAULI[a]) for a in range(4))


def on_pair(op: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """4x4 two-qubit operator acting on qubits i, j of n, built entry by entry."""
    D = 2 ** n
    out = np.zeros((D, D), dtype=complex)
    for col in range(D):
        bits = [(col >> (n - 1 - k)) & 1 for k in range(n)]
        src = 2 * bits[i] + bits[j]
        for dst in range(4):
            amp = op[dst, src]
            if amp == 0:
                continue
            nb = list(bits)
            nb[i], nb[j] = dst >> 1, dst & 1
            row = sum(b << (n - 1 - k) for k, b in enumerate(nb))
            out[row, col] += amp
    return out


def sym_embed(m: int) -> np.ndarray:
    """Orthonormal symmetric states of m qubits, ordered by the number of ones."""
    e = np.zeros((2 ** m, m + 1))
    for idx in range(2 ** m):
        k = bin(idx).count("1")
        e[idx, k] = 1.0
    return e / np.sqrt(e.sum(axis=0))


def fused_half_oracle(u, m: int, t, eta) -> np.ndarray:
    """R^{1/2, m/2}(u) = E^T R_{0m}(u + (m-1) eta) ... R_{01}(u - (m-1) eta) E, qubit 0 auxiliary."""
    n = m + 1
    x = np.eye(2 ** n, dtype=complex)
    for j in range(1, m + 1):
        x = on_pair(baxter(u + (2 * j - m - 1) * eta, t, eta), 0, j, n) @ x
    e = np.kron(np.eye(2), sym_embed(m))
    return e.T @ x @ e


def fused_aux_oracle(u, n_aux: int, t, eta) -> np.ndarray:
    """R^{n/2, 1/2}(u) on V^{n/2} (x) C^2: qubits 0..n-1 auxiliary, qubit n the site."""
    n = n_aux + 1
    x = np.eye(2 ** n, dtype=complex)
    for k in range(1, n_aux + 1):
        x = on_pair(baxter(u + (2 * k - n_aux - 1) * eta, t, eta), k - 1, n_aux, n) @ x
    e = np.kron(sym_embed(n_aux), np.eye(2))
    return e.T @ x @ e


def transfer_loops(r: np.ndarray, da: int, dq: int, N: int) -> np.ndarray:
    """tr_a R_{aN} ... R_{a1} from the explicit sum over sites, with R indexed (a' q', a q)."""
    r4 = r.reshape(da, dq, da, dq)
    D = dq ** N
    out = np.zeros((D, D), dtype=complex)
    states = list(itertools.product(range(dq), repeat=N))
    for i, qo in enumerate(states):
        for j, qi in enumerate(states):
            m = np.eye(da, dtype=complex)
            for s in range(N):
                m = r4[:, qo[s], :, qi[s]] @ m
            out[i, j] = np.trace(m)
    return out


N_TERMS = 400  # terms decay geometrically; plain partial sums avoid extrapolation


def _sum(term) -> mp.mpf:
    return mp.fsum(term(mp.mpf(n)) for n in range(1, N_TERMS + 1))


def _sine_series(x, t, eta):
    x, t, eta = mp.mpf(x), mp.mpf(t), mp.mpf(eta)
    return x, _sum(lambda n: mp.sin(2 * mp.pi * n * x) / (n * mp.cosh(2 * mp.pi * n * eta * t)))


def momentum_series(x, t, eta) -> float:
    x, s = _sine_series(x, t, eta)
    return float(-mp.pi / 2 + mp.pi * x + s)


def log_tau_series(x, t, eta) -> float:
    x, s = _sine_series(x, t, eta)
    return float(-mp.pi / 2 - mp.pi * x - s)


def energy_series(x, t, eta, coupling=1.0) -> float:
    x, t, eta = mp.mpf(x), mp.mpf(t), mp.mpf(eta)
    s = _sum(lambda n: mp.cos(2 * mp.pi * n * x) / mp.cosh(2 * mp.pi * n * eta * t))
    return float(coupling * (-mp.pi - 2 * mp.pi * s))


def ground_series(x, l, t, eta) -> float:
    l, x, t, eta = mp.mpf(l), mp.mpf(x), mp.mpf(t), mp.mpf(eta)

    def term(n):
        return (mp.sinh(4 * mp.pi * n * l * eta * t) * mp.sinh(mp.pi * n * t * (1 - 4 * l * eta))
                / (n * mp.sinh(mp.pi * n * t) * mp.sinh(4 * mp.pi * n * eta * t)) * mp.sin(2 * mp.pi * n * x))

    return float(mp.pi * l + 2 * mp.pi * l * x * (1 - 4 * l * eta) + 2 * _sum(term))


def rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))

