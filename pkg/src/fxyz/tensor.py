"""Dense complex multilinear algebra on products of small local spaces.

Operators are stored as square matrices over the row-major product of their
factor spaces; ``dims`` records the factor dimensions so that single factors
can be addressed without ever reordering data implicitly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError, NumericError, ParameterError, SizeError

SYMMETRIZER_GUARD = 8
EIGEN_GUARD = 4096
DEFECTIVE_COND = 1e10


def two_l(l) -> int:
    """Return 2l as an int, validating that l is a positive half-integer."""
    twice = Fraction(l).limit_denominator(64) * 2
    if twice.denominator != 1 or twice < 1 or abs(float(twice) - 2 * float(l)) > 1e-12:
        raise ParameterError(f"spin must be a positive half-integer, got {l}")
    return int(twice)


def spin_label(two: int) -> str:
    return f"{two // 2}" if two % 2 == 0 else f"{two}/2"


@dataclass(frozen=True, eq=False)
class CTensor:
    """Dense complex operator or vector over a product of factor spaces."""

    dims: tuple
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        data = np.asarray(self.data, dtype=complex)
        size = math.prod(dims)
        if data.ndim == 1:
            ok = data.shape == (size,)
        else:
            ok = data.shape == (size, size)
        if not ok:
            raise DimensionError(f"data shape {data.shape} does not match factor dims {dims}")
        object.__setattr__(self, "data", data)

    @property
    def is_operator(self) -> bool:
        return self.data.ndim == 2

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    @property
    def matrix(self) -> np.ndarray:
        return self.data

    def __matmul__(self, other: "CTensor") -> "CTensor":
        if self.dims != other.dims:
            raise DimensionError(f"factor dims differ: {self.dims} vs {other.dims}")
        return CTensor(self.dims, self.data @ other.data)

    def dagger(self) -> "CTensor":
        return CTensor(self.dims, self.data.conj().T)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))


def as_matrix(m) -> np.ndarray:
    return m.data if isinstance(m, CTensor) else np.asarray(m, dtype=complex)


def identity(dims: Sequence[int]) -> CTensor:
    return CTensor(tuple(dims), np.eye(math.prod(dims), dtype=complex))


def basis_state(indices: Sequence[int], dims: Sequence[int]) -> CTensor:
    v = np.zeros(math.prod(dims), dtype=complex)
    v[np.ravel_multi_index(tuple(indices), tuple(dims))] = 1.0
    return CTensor(tuple(dims), v)


def kron(*ops: CTensor) -> CTensor:
    dims: tuple = ()
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        dims += op.dims
        out = np.kron(out, op.data)
    return CTensor(dims, out)


def swap(d1: int, d2: int) -> CTensor:
    """Permutation v (x) w -> w (x) v from C^d1 (x) C^d2 to C^d2 (x) C^d1 (square when d1 == d2)."""
    m = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    for i in range(d1):
        for j in range(d2):
            m[j * d1 + i, i * d2 + j] = 1.0
    return CTensor((d1, d2), m)


def operator_on_factors(op, targets: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Full matrix acting as ``op`` on ``targets`` (in the given order) and as identity elsewhere."""
    dims = list(dims)
    targets = list(targets)
    mat = as_matrix(op)
    td = [dims[i] for i in targets]
    if len(set(targets)) != len(targets) or any(not 0 <= i < len(dims) for i in targets):
        raise DimensionError(f"bad target factors {targets} for {len(dims)} factors")
    if mat.shape != (math.prod(td), math.prod(td)):
        raise DimensionError(f"operator of shape {mat.shape} cannot act on factors of dims {td}")
    n, k = len(dims), len(targets)
    rest = [i for i in range(n) if i not in targets]
    # out[targets', rest', targets, rest] = op[targets', targets] * delta(rest', rest)
    opt = mat.reshape(td + td)
    dr = [dims[i] for i in rest]
    eye = np.eye(math.prod(dr), dtype=complex).reshape(dr + dr)
    full = np.multiply.outer(opt, eye)  # axes: t', t, r', r
    axes_out = targets + rest
    order = list(range(k)) + list(range(2 * k, 2 * k + len(rest)))
    order_in = list(range(k, 2 * k)) + list(range(2 * k + len(rest), 2 * n))
    full = full.transpose(order + order_in)  # (t', r', t, r)
    inv = np.argsort(axes_out)
    full = full.transpose(list(inv) + [n + i for i in inv])
    D = math.prod(dims)
    return full.reshape(D, D)


def apply_on_factors(op: CTensor, targets: Sequence[int], state: CTensor) -> CTensor:
    """Apply ``op`` to the listed factors of ``state`` (vector, or operator from the left)."""
    dims = list(state.dims)
    targets = list(targets)
    td = [dims[i] for i in targets]
    opmat = as_matrix(op)
    if opmat.shape != (math.prod(td), math.prod(td)):
        raise DimensionError(f"operator shape {opmat.shape} does not fit factor dims {td}")
    k = len(targets)
    opt = opmat.reshape(td + td)
    data = state.data
    extra = [] if data.ndim == 1 else [data.shape[1]]
    arr = data.reshape(dims + extra)
    out = np.tensordot(opt, arr, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets) if k else out
    return CTensor(state.dims, out.reshape(data.shape))


def permute_factors(op: CTensor, perm: Sequence[int]) -> CTensor:
    """Relabel factors: factor i of ``op`` becomes factor perm[i] of the result."""
    n = len(op.dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise DimensionError(f"{perm} is not a permutation of {n} factors")
    new_dims = [0] * n
    for i, p in enumerate(perm):
        new_dims[p] = op.dims[i]
    arr = op.data.reshape(list(op.dims) * 2)
    inv = np.argsort(perm)
    arr = arr.transpose(list(inv) + [n + i for i in inv])
    D = op.size
    return CTensor(tuple(new_dims), arr.reshape(D, D))


def partial_trace(op: CTensor, traced: Sequence[int]) -> CTensor:
    """Trace out the listed factors of an operator."""
    dims = list(op.dims)
    traced = sorted(set(traced))
    keep = [i for i in range(len(dims)) if i not in traced]
    n = len(dims)
    arr = op.data.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise SizeError("too many factors for partial trace")
    rows = [letters[i] for i in range(n)]
    cols = [letters[n + i] for i in range(n)]
    for i in traced:
        cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    res = np.einsum("".join(rows) + "".join(cols) + "->" + out, arr)
    kd = [dims[i] for i in keep]
    D = math.prod(kd) if kd else 1
    return CTensor(tuple(kd) if kd else (1,), res.reshape(D, D))


@lru_cache(maxsize=16)
def _symmetrizer_matrix(m: int) -> np.ndarray:
    D = 2 ** m
    bits = np.array(list(itertools.product((0, 1), repeat=m)), dtype=np.int64)
    weights = 2 ** np.arange(m - 1, -1, -1)
    out = np.zeros((D, D))
    cols = np.arange(D)
    for perm in itertools.permutations(range(m)):
        rows = bits[:, list(perm)] @ weights
        out[rows, cols] += 1.0
    out /= math.factorial(m)
    out.setflags(write=False)
    return out


def symmetrizer(m: int, guard: int = SYMMETRIZER_GUARD) -> CTensor:
    """(1/m!) sum over permutations of the m tensor factors of (C^2)^m."""
    if m < 1:
        raise ParameterError("symmetrizer needs m >= 1")
    if m > guard:
        raise SizeError(f"symmetrizer on {m} factors exceeds the guard {guard}")
    return CTensor((2,) * m, _symmetrizer_matrix(m).astype(complex))


def antisymmetrizer2() -> CTensor:
    """(Id - SWAP)/2 on C^2 (x) C^2."""
    return CTensor((2, 2), (np.eye(4) - swap(2, 2).data) / 2)


@lru_cache(maxsize=16)
def _embed_matrix(m: int) -> np.ndarray:
    D = 2 ** m
    counts = np.array([bin(i).count("1") for i in range(D)])
    out = np.zeros((D, m + 1))
    for k in range(m + 1):
        sel = counts == k
        out[sel, k] = 1.0 / math.sqrt(math.comb(m, k))
    out.setflags(write=False)
    return out


class SpinSpace:
    """V^l = Sym((C^2)^{2l}) with an orthonormal basis ordered by the count k of second basis vectors."""

    def __init__(self, l):
        self.two_l = two_l(l)
        if self.two_l > SYMMETRIZER_GUARD:
            raise SizeError(f"spin {spin_label(self.two_l)} exceeds the guard")
        self.l = Fraction(self.two_l, 2)
        self.dim = self.two_l + 1
        self.embed = _embed_matrix(self.two_l).astype(complex)
        self.compress = self.embed.conj().T

    def __repr__(self):
        return f"SpinSpace(l={spin_label(self.two_l)})"


def _hessenberg(a: np.ndarray) -> np.ndarray:
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        h[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h


def _wilkinson(a, b, c, d):
    tr, det = a + d, a * d - b * c
    disc = np.sqrt(tr * tr / 4 - det)
    l1, l2 = tr / 2 + disc, tr / 2 - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def _hessenberg_qr_eigvals(h: np.ndarray, max_iter: int) -> np.ndarray:
    n = h.shape[0]
    eps = np.finfo(float).eps
    scale = max(np.abs(h).max(), np.finfo(float).tiny)
    eig = np.empty(n, dtype=complex)
    hi = n - 1
    total = 0
    since_deflation = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub <= eps * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])) or sub <= eps * eps * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        total += 1
        since_deflation += 1
        if total > max_iter:
            raise NumericError(
                f"QR iteration did not converge after {max_iter} sweeps "
                f"(active window [{lo}, {hi}], |h[hi,hi-1]| = {abs(h[hi, hi - 1]):.3e})"
            )
        if since_deflation % 11 == 10:
            sigma = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1 + 0.5j)
        else:
            sigma = _wilkinson(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        w = h[lo : hi + 1, lo : hi + 1]
        m = w.shape[0]
        w[np.arange(m), np.arange(m)] -= sigma
        rots = []
        for k in range(m - 1):
            a, b = w[k, k], w[k + 1, k]
            r = math.hypot(abs(a), abs(b))
            if r == 0.0:
                c, s = 1.0, 0.0
            else:
                c, s = a / r, b / r
            rk, rk1 = w[k, k:].copy(), w[k + 1, k:].copy()
            w[k, k:] = np.conj(c) * rk + np.conj(s) * rk1
            w[k + 1, k:] = -s * rk + c * rk1
            rots.append((c, s))
        for k, (c, s) in enumerate(rots):
            top = min(k + 2, m - 1) + 1
            ck, ck1 = w[:top, k].copy(), w[:top, k + 1].copy()
            w[:top, k] = c * ck + s * ck1
            w[:top, k + 1] = -np.conj(s) * ck + np.conj(c) * ck1
        w[np.arange(m), np.arange(m)] += sigma
    return eig


def eigenvalues(m, guard: int = EIGEN_GUARD, method: str = "qr") -> np.ndarray:
    """Eigenvalues of a general complex square matrix.

    ``method="qr"`` runs the in-package Householder-Hessenberg reduction and
    Wilkinson-shifted complex QR iteration; ``method="lapack"`` calls
    numpy.linalg.eigvals and exists as an independent cross-check.
    """
    a = as_matrix(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"eigenvalues need a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > guard:
        raise SizeError(f"matrix dimension {n} exceeds the guard {guard}")
    if n == 0:
        return np.empty(0, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix has non-finite entries")
    if method == "lapack":
        return np.linalg.eigvals(a)
    if method != "qr":
        raise ParameterError(f"unknown eigenvalue method {method!r}")
    h = _hessenberg(a)
    return _hessenberg_qr_eigvals(h, max_iter=100 * n)


@dataclass
class LogResult:
    """Principal logarithm together with branch metadata."""

    log: CTensor
    eigenvalues: np.ndarray
    phases: np.ndarray
    boundary_hit: bool
    condition: float


def principal_log(m, branch_tol: float = 1e-9) -> LogResult:
    """Principal matrix logarithm of a diagonalizable matrix, phases in (-pi, pi].

    Eigenvalues within ``branch_tol`` (in phase) of the negative real axis get
    phase +pi and set ``boundary_hit``.
    """
    dims = m.dims if isinstance(m, CTensor) else (as_matrix(m).shape[0],)
    a = as_matrix(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("principal_log needs a square matrix")
    vals, vecs = np.linalg.eig(a)
    cond = float(np.linalg.cond(vecs))
    if not np.isfinite(cond) or cond > DEFECTIVE_COND:
        raise NumericError(f"matrix looks defective (eigenvector condition {cond:.3e})")
    if np.any(np.abs(vals) == 0):
        raise NumericError("matrix is singular; logarithm undefined")
    phases = np.angle(vals)
    near = np.abs(np.abs(phases) - np.pi) < branch_tol
    phases = np.where(near, np.pi, phases)
    logs = np.log(np.abs(vals)) + 1j * phases
    out = vecs @ np.diag(logs) @ np.linalg.inv(vecs)
    return LogResult(CTensor(dims, out), vals, phases, bool(near.any()), cond)
