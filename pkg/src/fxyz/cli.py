"""Command-line interface.

Subcommands ``verify``, ``spectrum``, ``bethe``, ``thermo``, ``dispersion`` and
``finite-size``.  Every flag may also be given through an environment
variable ``FXYZ_<FLAG>`` (upper case, dashes as underscores); an explicit flag
wins over the environment.  Exit codes: 0 success, 1 failed check or no
convergence, 2 invalid parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bethe import BetheState, match_spectrum, solve, trivial_states
from .chain import (
    ChainParams,
    check_recurrence_t,
    commutator_residual,
    hamiltonian,
    momentum,
    shift_operator,
    spectrum,
    transfer,
)
from .elliptic import EllipticParams
from .errors import ConvergenceError, DimensionError, FxyzError, ParameterError
from .fusion import (
    FUSION_GUARD,
    check_recurrence_r,
    permutation_residual,
    qdet_report,
    unitarity_residual,
    ybe_residual,
)
from .sklyanin import ThetaBasis, extract_generators, functional_equation_residual, l_operator
from .tensor import two_l
from .thermo import (
    finite_size_check,
    ground_state,
    gs_series,
    log_tau,
    particle_energy,
    particle_momentum,
    validity_gate,
)

EXIT_OK, EXIT_FAIL, EXIT_PARAM = 0, 1, 2
SIG_DIGITS = 12
ENV_PREFIX = "FXYZ_"
# exact diagonalization for matching Bethe states is skipped above this dimension
MATCH_DIM_GUARD = 128
DIFF_STEP = 1e-5

TABLE_COMMANDS = ("thermo", "dispersion", "finite-size")


# --- parsing helpers ------------------------------------------------------------


def parse_spin(text: str) -> Fraction:
    try:
        val = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"spin must be a half-integer such as 1/2 or 1, got {text!r}") from exc
    if (2 * val).denominator != 1 or val < Fraction(1, 2):
        raise ParameterError(f"spin must be a positive half-integer, got {text!r}")
    if 2 * val > FUSION_GUARD:
        raise ParameterError(f"2l = {2 * val} exceeds the fusion guard {FUSION_GUARD}")
    return val


def parse_complex(text: str) -> complex:
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ParameterError(f"spectral parameter must look like 're,im', got {text!r}")


def parse_grid(text: str) -> np.ndarray:
    """``a:b:n`` -> n equally spaced points from a to b, both ends included."""
    parts = str(text).split(":")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) != 3:
            raise ValueError
    except (ValueError, IndexError) as exc:
        raise ParameterError(f"grid must look like 'a:b:n', got {text!r}") from exc
    if n < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise ParameterError(f"bad grid {text!r}")
    return np.linspace(a, b, n)


def parse_ladder(text: str) -> list:
    try:
        ns = [int(s) for s in str(text).split(",") if s.strip()]
    except ValueError as exc:
        raise ParameterError(f"ladder must look like '8,16,32', got {text!r}") from exc
    if not ns or any(n < 1 for n in ns):
        raise ParameterError(f"ladder entries must be positive, got {text!r}")
    return ns


def positive_float(text) -> float:
    try:
        val = float(text)
    except ValueError as exc:
        raise ParameterError(f"expected a number, got {text!r}") from exc
    if not (val > 0 and math.isfinite(val)):
        raise ParameterError(f"expected a positive number, got {text!r}")
    return val


def finite_float(text) -> float:
    try:
        val = float(text)
    except ValueError as exc:
        raise ParameterError(f"expected a number, got {text!r}") from exc
    if not math.isfinite(val):
        raise ParameterError(f"expected a finite number, got {text!r}")
    return val


def to_int(text) -> int:
    try:
        return int(str(text))
    except ValueError as exc:
        raise ParameterError(f"expected an integer, got {text!r}") from exc


def positive_int(text) -> int:
    val = to_int(text)
    if val < 1:
        raise ParameterError(f"expected a positive integer, got {text!r}")
    return val


# flag name -> (converter, built-in default)
OPTIONS: dict[str, tuple[Callable, object]] = {
    "l": (parse_spin, "1/2"),
    "lprime": (parse_spin, None),  # 1 for verify, l otherwise
    "n_sites": (positive_int, "2"),
    "t": (positive_float, "2"),
    "eta": (str, "1/6"),
    "coupling": (finite_float, "1"),
    "u": (None, None),  # repeatable, handled separately
    "x_grid": (parse_grid, "-0.5:0.5:101"),
    "x": (finite_float, "0.1"),
    "n_ladder": (parse_ladder, "8,16,32"),
    "tol": (positive_float, None),
    "seed": (to_int, "0"),
    "threads": (positive_int, "1"),
    "out": (str, None),
    "format": (str, None),
    "state": (str, "ground"),
    "nu": (to_int, "0"),
    "max_iter": (positive_int, "200"),
    "method": (str, "qr"),
}


@dataclass
class RunConfig:
    """Resolved model parameters and command options."""

    command: str
    l: Fraction
    lprime: Fraction
    n_sites: int
    t: float
    eta: str
    coupling: float
    u: list
    x_grid: np.ndarray
    x: float
    n_ladder: list
    tol: float | None
    seed: int
    threads: int
    out: str | None
    format: str
    state: str
    nu: int
    max_iter: int
    method: str
    params: EllipticParams = field(init=False, repr=False)

    def __post_init__(self):
        self.params = EllipticParams.from_string(self.t, self.eta)
        if self.format not in ("json", "csv"):
            raise ParameterError(f"format must be json or csv, got {self.format!r}")
        if self.state not in ("ground", "trivial", "seed"):
            raise ParameterError(f"state must be ground, trivial or seed, got {self.state!r}")
        if self.method not in ("qr", "lapack"):
            raise ParameterError(f"method must be qr or lapack, got {self.method!r}")

    def chain(self, n: int | None = None) -> ChainParams:
        return ChainParams(self.l, self.n_sites if n is None else n, self.params, self.coupling)

    def echo(self) -> dict:
        return {
            "l": str(self.l),
            "lprime": str(self.lprime),
            "n_sites": self.n_sites,
            "t": self.t,
            "eta": str(self.params.eta_fraction),
            "coupling": self.coupling,
            "seed": self.seed,
        }


def resolve_config(ns: argparse.Namespace, env=None) -> RunConfig:
    env = os.environ if env is None else env
    values = {}
    for name, (conv, default) in OPTIONS.items():
        if name == "u":
            continue
        raw = getattr(ns, name, None)
        if raw is None:
            raw = env.get(ENV_PREFIX + name.upper(), default)
        values[name] = raw if raw is None or conv is None else conv(raw)
    raw_u = ns.u
    if not raw_u:
        env_u = env.get(ENV_PREFIX + "U")
        raw_u = env_u.split(";") if env_u else []
    values["u"] = [parse_complex(s) for s in raw_u]
    if values["lprime"] is None:
        values["lprime"] = Fraction(1) if ns.command == "verify" else values["l"]
    if values["format"] is None:
        values["format"] = "csv" if ns.command in TABLE_COMMANDS else "json"
    return RunConfig(command=ns.command, **values)


# --- output ----------------------------------------------------------------------


def fmt_real(x) -> float | None:
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{SIG_DIGITS}g}")


def jsonable(obj):
    """Round numbers to 12 significant digits; complex values become [re, im]."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [fmt_real(obj.real), fmt_real(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return fmt_real(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dump_json(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


def _cell(v) -> list:
    if v is None:
        return [""]
    if isinstance(v, (complex, np.complexfloating)):
        return [_cell(v.real)[0], _cell(v.imag)[0]]
    if isinstance(v, (bool, np.bool_)):
        return ["true" if v else "false"]
    if isinstance(v, (float, np.floating)):
        return [f"{float(v):.{SIG_DIGITS}g}"]
    return [str(v)]


def dump_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    """One column per real field; complex fields split into name_re, name_im."""
    header = []
    for c in columns:
        sample = next((r[c] for r in rows if r.get(c) is not None), None)
        if isinstance(sample, (complex, np.complexfloating)):
            header += [c + "_re", c + "_im"]
        else:
            header.append(c)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        line = []
        for c in columns:
            cells = _cell(r.get(c))
            if len(cells) == 1 and header.count(c + "_re"):
                cells = cells * 2
            line += cells
        w.writerow(line)
    return buf.getvalue()


@dataclass
class Outcome:
    code: int
    report: dict
    columns: list
    rows: list


def emit(outcome: Outcome, cfg: RunConfig, stream=None) -> None:
    if cfg.format == "json":
        text = dump_json(outcome.report)
    else:
        text = dump_csv(outcome.columns, outcome.rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


def _map(fn, items, threads: int) -> list:
    """Ordered map, threaded when asked to."""
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# --- verify -----------------------------------------------------------------------


@dataclass
class Check:
    name: str
    residual: float | None
    threshold: float
    skipped: str | None = None

    @property
    def passed(self) -> bool | None:
        if self.skipped is not None:
            return None
        return self.residual is not None and self.residual < self.threshold

    def as_dict(self) -> dict:
        out = {"name": self.name, "residual": self.residual, "threshold": self.threshold, "passed": self.passed}
        if self.skipped is not None:
            out["skipped"] = self.skipped
        return out


def _spectral_points(rng: np.random.Generator, t: float, k: int) -> list:
    return [complex(rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.45) / t) for _ in range(k)]


def _fusion_checks(cfg: RunConfig, rng) -> list:
    p, l, lp = cfg.params, cfg.l, cfg.lprime
    half = Fraction(1, 2)
    u1, u2, u3 = _spectral_points(rng, p.t, 3)
    return [
        Check(f"fusion.yang_baxter[{lp},{l},{half}]", ybe_residual((lp, l, half), (u1, u2, u3), p), 1e-9),
        Check(f"fusion.unitarity[{l},{lp}]", unitarity_residual(l, lp, u1, u2, p), 1e-9),
        Check(f"fusion.permutation[{l}]", permutation_residual(l, p), 1e-10),
        Check(f"fusion.permutation[{lp}]", permutation_residual(lp, p), 1e-10),
        Check(f"fusion.qdet[{lp}]", qdet_report(u3, lp, p).disagreement, 1e-9),
        Check(f"fusion.recurrence[{l},{lp}]", check_recurrence_r(u1, l, lp, p).max_residual(), 1e-8),
    ]


def _sklyanin_checks(cfg: RunConfig, rng) -> list:
    p, l = cfg.params, cfg.l
    if two_l(l) > 6:
        return [Check("sklyanin", None, 0.0, skipped="theta-function realization limited to l <= 3")]
    gens = extract_generators(l, p)
    u = complex(rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.45) / p.t)
    direct = l_operator(u, l, p)
    rebuilt = gens.l_matrix(u, p)
    recon = float(np.abs(direct - rebuilt).max() / np.abs(direct).max())
    basis = ThetaBasis.build(l, p)
    ys = np.array(_spectral_points(rng, p.t, 5))
    rank = int(np.linalg.matrix_rank(basis.evaluation))
    return [
        Check(f"sklyanin.extraction_spread[{l}]", gens.spread, 1e-9),
        Check(f"sklyanin.reconstruction[{l}]", recon, 1e-9),
        Check(f"sklyanin.functional_equations[{l}]", functional_equation_residual(basis, ys), 1e-9),
        Check(f"sklyanin.rank_deficit[{l}]", float(basis.dim - rank), 0.5),
    ]


def _chain_checks(cfg: RunConfig, rng) -> list:
    cp = cfg.chain()
    cp.guard()
    l, lp = cfg.l, cfg.lprime
    u, v = _spectral_points(rng, cp.p.t, 2)
    t0 = transfer(0.0, l, cp)
    shift = float(np.abs(t0 - shift_operator(cp)).max())
    rec = check_recurrence_t(u, lp, cp)
    h = hamiltonian(cp)
    tu = transfer(u, lp, cp)
    h_comm = float(np.linalg.norm(h @ tu - tu @ h) / (np.linalg.norm(h) * np.linalg.norm(tu)))
    mom, _ = momentum(cp)
    k = np.linalg.eigvals(mom).real * cp.N / (2 * math.pi)
    quant = float(np.abs(k - np.round(k)).max())
    return [
        Check(f"chain.shift[N={cp.N}]", shift, 1e-10),
        Check(f"chain.commutativity[{lp},{l}]", commutator_residual(u, lp, v, l, cp), 1e-9),
        Check(f"chain.recurrence[{lp}]", rec.relative, 1e-8),
        Check("chain.hamiltonian_commutes", h_comm, 1e-8),
        Check("chain.momentum_quantized", quant, 1e-9),
    ]


def _thermo_checks(cfg: RunConfig, rng) -> list:
    p, l = cfg.params, cfg.l
    try:
        validity_gate(l, p)
    except ParameterError as exc:
        return [Check("thermo", None, 0.0, skipped=str(exc))]
    xs = rng.uniform(-0.5, 0.5, 5)
    sum_res = max(abs(particle_momentum(x, p) + log_tau(x, p) + math.pi) for x in xs)
    energy_res = max(abs(particle_energy(x, cfg.coupling, p) + cfg.coupling * _dp_dx(x, p)) for x in xs)
    return [
        Check("thermo.momentum_plus_log_tau", sum_res, 1e-6),
        Check("thermo.energy_is_minus_dp_dx", energy_res, 1e-6),
        Check("thermo.momentum_at_zero", abs(particle_momentum(0.0, p) + math.pi / 2), 1e-12),
        Check(f"thermo.ground_state_at_zero[{l}]", abs(gs_series(0.0, l, p).value - math.pi * l), 1e-12),
    ]


def _dp_dx(x: float, p: EllipticParams, h: float = DIFF_STEP) -> float:
    def d1(s):
        return (particle_momentum(x + s, p) - particle_momentum(x - s, p)) / (2 * s)

    return (4 * d1(h / 2) - d1(h)) / 3


def cmd_verify(cfg: RunConfig) -> Outcome:
    """Run the residual suite for the configured (l, l', N)."""
    rng = np.random.default_rng(cfg.seed)
    checks = []
    for group in (_fusion_checks, _sklyanin_checks, _chain_checks, _thermo_checks):
        checks += group(cfg, rng)
    ok = all(c.passed is not False for c in checks)
    rows = [c.as_dict() for c in checks]
    report = {"command": "verify", "config": cfg.echo(), "checks": rows, "passed": ok}
    cols = ["name", "residual", "threshold", "passed", "skipped"]
    return Outcome(EXIT_OK if ok else EXIT_FAIL, report, cols, rows)


# --- spectrum ---------------------------------------------------------------------


def _sorted_eigs(vals: np.ndarray) -> np.ndarray:
    vals = np.asarray(vals, dtype=complex)
    order = np.lexsort((np.round(vals.imag, 10), np.round(vals.real, 10)))
    return vals[order]


def cmd_spectrum(cfg: RunConfig) -> Outcome:
    """Eigenvalues of T^{l',l}(u) for each requested u (default u = 0)."""
    cp = cfg.chain()
    cp.guard()
    us = cfg.u or [0j]
    lp = cfg.lprime

    def one(u):
        return _sorted_eigs(spectrum(u, lp, cp, method=cfg.method))

    spectra = _map(one, us, cfg.threads)
    entries = [{"u": u, "eigenvalues": e, "trace": complex(e.sum())} for u, e in zip(us, spectra)]
    report = {"command": "spectrum", "config": cfg.echo(), "lprime": str(lp)}
    if len(entries) == 1:
        report.update(entries[0])
    else:
        report["spectra"] = entries
    rows = [{"u": u, "index": i, "eigenvalue": ev} for u, e in zip(us, spectra) for i, ev in enumerate(e)]
    return Outcome(EXIT_OK, report, ["u", "index", "eigenvalue"], rows)


# --- bethe ------------------------------------------------------------------------


def _initial_state(cfg: RunConfig, cp: ChainParams) -> BetheState:
    if cfg.state == "trivial":
        states = [s for s in trivial_states(cp) if s.nu == cfg.nu]
        if not states:
            raise ParameterError("explicit solutions exist only for l = 1/2, N = 2 with nu in {0, 1}")
        return states[0]
    rng = np.random.default_rng(cfg.seed)
    w = rng.uniform(-0.5, 0.5, cp.M) + 1j * rng.uniform(-0.5, 0.5, cp.M) * cp.p.tau.imag
    return BetheState(cfg.nu, w, cp)


def cmd_bethe(cfg: RunConfig) -> Outcome:
    """Solve the Bethe equations and, at exact-diagonalization sizes, match the spectrum."""
    cp = cfg.chain()
    tol = cfg.tol if cfg.tol is not None else 1e-12
    head = {"command": "bethe", "config": cfg.echo(), "state": cfg.state}
    try:
        if cfg.state == "ground":
            s = ground_state(cp, tol=tol, max_iter=cfg.max_iter)
        else:
            s = solve(_initial_state(cfg, cp), tol=tol, max_iter=cfg.max_iter, step_limit=0.5)
    except ConvergenceError as exc:
        report = dict(head, error=str(exc), trace=list(exc.trace))
        rows = [{"iteration": i, "residual": r} for i, r in enumerate(exc.trace)]
        return Outcome(EXIT_FAIL, report, ["iteration", "residual"], rows)
    s = s.canonical()
    match = None
    if cp.dim <= MATCH_DIM_GUARD:
        u = cfg.u[0] if cfg.u else complex(0.13, 0.07)
        m = match_spectrum(s, u, cfg.lprime, cp)
        match = {
            "u": m.u,
            "lprime": str(m.lp),
            "formula_value": m.formula_value,
            "nearest_exact": m.nearest_exact,
            "distance": m.distance,
            "success": m.success,
        }
    report = dict(head, nu=s.nu, roots=s.roots, residual=s.residual_norm, iterations=s.iterations, match=match)
    code = EXIT_FAIL if match is not None and not match["success"] else EXIT_OK
    rows = [{"index": i, "root": w} for i, w in enumerate(s.roots)]
    return Outcome(code, report, ["index", "root"], rows)


# --- thermo / dispersion / finite-size -----------------------------------------------


def cmd_thermo(cfg: RunConfig) -> Outcome:
    """Table of the large-N ground-state value per site, log tau, p and H over the x grid."""
    p, l = cfg.params, cfg.l
    validity_gate(l, p)

    def row(x):
        x = float(x)
        return {
            "x": x,
            "gs_per_site": gs_series(x, l, p).value,
            "log_tau": log_tau(x, p),
            "p": particle_momentum(x, p),
            "H": particle_energy(x, cfg.coupling, p),
        }

    rows = _map(row, cfg.x_grid, cfg.threads)
    cols = ["x", "gs_per_site", "log_tau", "p", "H"]
    return Outcome(EXIT_OK, {"command": "thermo", "config": cfg.echo(), "rows": rows}, cols, rows)


def cmd_dispersion(cfg: RunConfig) -> Outcome:
    """p(x), H(x) with the residuals of p + log tau = -pi and H = -coupling dp/dx."""
    p = cfg.params
    validity_gate(cfg.l, p)
    tol = cfg.tol if cfg.tol is not None else 1e-6

    def row(x):
        x = float(x)
        mom, lt = particle_momentum(x, p), log_tau(x, p)
        en, dp = particle_energy(x, cfg.coupling, p), _dp_dx(x, p)
        return {
            "x": x,
            "p": mom,
            "H": en,
            "log_tau": lt,
            "dp_dx": dp,
            "sum_residual": abs(mom + lt + math.pi),
            "energy_residual": abs(en + cfg.coupling * dp),
        }

    rows = _map(row, cfg.x_grid, cfg.threads)
    ok = all(r["sum_residual"] < tol and r["energy_residual"] < tol for r in rows)
    report = {"command": "dispersion", "config": cfg.echo(), "tolerance": tol, "rows": rows, "passed": ok}
    cols = ["x", "p", "H", "log_tau", "dp_dx", "sum_residual", "energy_residual"]
    return Outcome(EXIT_OK if ok else EXIT_FAIL, report, cols, rows)


def cmd_finite_size(cfg: RunConfig) -> Outcome:
    """Per-site discrepancy Delta(N) between solved ground states and the large-N series."""
    validity_gate(cfg.l, cfg.params)
    cps = [cfg.chain(n) for n in cfg.n_ladder]
    for cp in cps:
        _ = cp.M
    rep = finite_size_check(cps, cfg.x, threads=cfg.threads)
    rows = [
        {
            "N": e.N,
            "delta": e.delta,
            "per_site": e.per_site,
            "expected": e.expected,
            "bethe_residual": e.residual,
            "max_phase_step": e.max_phase_step,
            "error": e.error,
        }
        for e in rep.entries
    ]
    report = {
        "command": "finite-size",
        "config": cfg.echo(),
        "x": rep.x,
        "rows": rows,
        "converged": rep.converged,
        "strictly_decreasing": rep.strictly_decreasing,
    }
    cols = ["N", "delta", "per_site", "expected", "bethe_residual", "max_phase_step", "error"]
    return Outcome(EXIT_OK if rep.converged else EXIT_FAIL, report, cols, rows)


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "bethe": cmd_bethe,
    "thermo": cmd_thermo,
    "dispersion": cmd_dispersion,
    "finite-size": cmd_finite_size,
}


# --- entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--l", help="local spin l (default 1/2)")
    g.add_argument("--lprime", help="auxiliary spin l' (default 1 for verify, l otherwise)")
    g.add_argument("--n-sites", dest="n_sites", help="number of sites N (default 2)")
    g.add_argument("--t", help="modulus parameter t, tau = i/t (default 2)")
    g.add_argument("--eta", help="anisotropy as 'r1/r', odd over even (default 1/6)")
    g.add_argument("--coupling", help="Hamiltonian constant (default 1)")
    o = common.add_argument_group("options")
    o.add_argument("--u", action="append", help="spectral parameter 're,im'; repeatable")
    o.add_argument("--x-grid", dest="x_grid", help="rapidity grid 'a:b:n', ends included (default -0.5:0.5:101)")
    o.add_argument("--x", help="rapidity for finite-size (default 0.1)")
    o.add_argument("--n-ladder", dest="n_ladder", help="sizes for finite-size (default 8,16,32)")
    o.add_argument("--tol", help="solver or check tolerance")
    o.add_argument("--seed", help="random seed (default 0)")
    o.add_argument("--threads", help="worker threads for sweeps (default 1)")
    o.add_argument("--state", help="bethe: ground, trivial or seed (default ground)")
    o.add_argument("--nu", help="bethe: integer nu for trivial or seed states (default 0)")
    o.add_argument("--max-iter", dest="max_iter", help="bethe: Newton iteration cap (default 200)")
    o.add_argument("--method", help="spectrum: eigenvalue backend qr or lapack (default qr)")
    o.add_argument("--out", help="output file (default stdout)")
    o.add_argument("--format", help="json or csv")

    parser = argparse.ArgumentParser(prog="fxyz", description="Higher-spin elliptic chain toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or "").splitlines()[0])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(ns)
        outcome = COMMANDS[cfg.command](cfg)
    except (ParameterError, DimensionError) as exc:
        print(f"fxyz: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except FxyzError as exc:
        print(f"fxyz: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    emit(outcome, cfg)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
