"""Monte Carlo estimates of the law of T_0, of exit probabilities and of stable maxima.

The Lévy process xi is simulated with exact Gaussian increments and exact
compound Poisson jumps.  The exponential functional int e^(alpha xi) is
accumulated by the trapezoid rule (exactly between jumps when there is no
Gaussian part), and the same pass accumulates the rule with every pair of
steps merged, which gives a Richardson estimate of the discretisation bias.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..levy_model import ExponentHandle, LevyModel
from . import process
from .backend import backend

ST_TAIL, ST_CAP, ST_KILLED, ST_HORIZON, ST_UNIT, ST_CROSSED, ST_END = range(7)


@dataclass(frozen=True)
class MCConfig:
    paths: int = 10_000
    dt: float = 1e-4
    horizon: float = 1e4
    seed: int = 20240607
    small_jump_cutoff: float = 1e-3
    eps_tail: float = 1e-10
    h_max: float = 0.02
    chunk: int = 8192

    def __post_init__(self):
        if int(self.paths) < 1000:
            raise DomainError("paths must be >= 1000 for a reported confidence interval")
        if not 0 < self.dt <= 1e-2:
            raise DomainError("dt must lie in (0, 1e-2]")
        if not self.h_max >= self.dt:
            raise DomainError("h_max must be >= dt")
        if not self.horizon > 0:
            raise DomainError("horizon must be > 0")
        if not self.small_jump_cutoff > 0:
            raise DomainError("small_jump_cutoff must be > 0")
        if not 0 < self.eps_tail < 1:
            raise DomainError("eps_tail must lie in (0, 1)")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_err: float
    paths_used: int
    truncation_bias_bound: float

    def tolerance(self, n_sigma=4.0):
        return n_sigma * self.std_err + self.truncation_bias_bound


def thread_count():
    raw = os.environ.get("SSABSORB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _estimate(samples, bias):
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    return MCEstimate(float(np.mean(samples)), float(np.std(samples, ddof=1) / math.sqrt(n)), n, float(bias))


def _run(kernel, cfg: MCConfig, stream, *args, paths=None):
    n = int(cfg.paths if paths is None else paths)
    parts = []
    for start in range(0, n, cfg.chunk):
        count = min(cfg.chunk, n - start)
        gens = process.path_generators(cfg.seed, start, count, stream)
        parts.append(kernel(gens, *args, threads=thread_count()))
    return [np.concatenate(col) for col in zip(*parts)]


def _check_h0(h: ExponentHandle):
    if h.model.kill_q == 0 and not h.mean_xi1 < 0:
        raise DomainError("absorption never occurs: kill_q = 0 and E[xi_1] >= 0")


def _process_args(model: LevyModel, cfg: MCConfig):
    spec = process.compile_process(model, cfg.small_jump_cutoff)
    h = ExponentHandle(model)
    level = process.tail_level(spec, h.mean_xi1, cfg.eps_tail)
    args = (spec.alpha, spec.drift, spec.var, spec.lam, spec.kill_q, spec.mode, spec.table, spec.tail,
            cfg.dt, cfg.h_max, cfg.horizon, level)
    return spec, h, level, args


@dataclass(frozen=True)
class SigmaSample:
    """Per-path values of the exponential functional and how each path ended."""

    fine: np.ndarray
    coarse: np.ndarray
    xi_end: np.ndarray
    status: np.ndarray
    steps: np.ndarray


def sample_sigma(model: LevyModel, cfg: MCConfig, cap=math.inf, t_stop=math.inf, stream=0,
                 require_h0=True):
    """Sigma = int_0^(zeta) e^(alpha xi_s) ds for every path.

    zeta is the kill time when kill_q > 0, else infinity.  Paths stop once
    the integral reaches ``cap``, at xi-time ``t_stop``, or once xi falls
    below the level where the remaining integral is below eps_tail.
    """
    spec, h, level, args = _process_args(model, cfg)
    if require_h0:
        _check_h0(h)
    out = _run(backend().sigma_paths, cfg, stream, *args, float(cap), float(t_stop))
    return SigmaSample(*out)


def simulate_sigma(model: LevyModel, cfg: MCConfig, path=0):
    """One draw of Sigma (path number ``path`` of the seeded family)."""
    spec, h, level, args = _process_args(model, cfg)
    _check_h0(h)
    gens = process.path_generators(cfg.seed, int(path), 1, 0)
    fine, *_ = backend().sigma_paths(gens, *args, math.inf, math.inf, threads=1)
    return float(fine[0])


def _uncertain(sample: SigmaSample, threshold, window):
    """Paths whose indicator Sigma >= threshold could flip with the neglected tail."""
    low = sample.fine < threshold
    tail = (sample.status == ST_TAIL) & low & (sample.fine >= threshold - window)
    horizon = (sample.status == ST_HORIZON) & low
    return int(np.count_nonzero(tail | horizon))


def estimate_survival(model: LevyModel, cfg: MCConfig, t_grid, x=1.0):
    """Q_x(T_0 >= t) = P(x^alpha Sigma >= t) on a grid of t."""
    t_grid = [float(t) for t in t_grid]
    if any(t < 0 for t in t_grid):
        raise DomainError("t must be >= 0")
    scale = float(x) ** model.alpha
    positive = [t / scale for t in t_grid if t > 0]
    cap = 1.5 * max(positive) + 1.0 if positive else 1.0
    sample = sample_sigma(model, cfg, cap=cap)
    n = sample.fine.size
    window = 1e3 * cfg.eps_tail
    out = []
    for t in t_grid:
        if t == 0:
            out.append(MCEstimate(1.0, 0.0, n, 0.0))
            continue
        thr = t / scale
        fine = sample.fine >= thr
        coarse = sample.coarse >= thr
        rich = abs(float(np.mean(fine)) - float(np.mean(coarse)))
        est = _estimate(fine, rich + _uncertain(sample, thr, window) / n)
        out.append(est)
    return out


def _sup_bound(h: ExponentHandle):
    """Exponent r with P(sup xi >= y) <= e^(-r y)."""
    if h.model.kill_q > 0:
        return h.inverse_phi(h.model.kill_q)
    if h.mean_xi1 < 0:
        return h.cramer_root()
    return 0.0


def estimate_exit(model: LevyModel, cfg: MCConfig, spec):
    """Q_x[X reaches a (1 + chi s)^(1/alpha) before T_0 and before zeta], lambda < 0."""
    if not spec.lam < 0:
        raise DomainError("estimate_exit simulates the lambda < 0 case only (finite zeta)")
    if abs(spec.alpha - model.alpha) > 1e-15 * model.alpha:
        raise DomainError("ExitSpec alpha differs from the model's alpha")
    _, h, level, args = _process_args(model, cfg)
    _check_h0(h)
    x0a = spec.start_x ** model.alpha
    log_ax = math.log(spec.level_a / spec.start_x)
    tail = (x0a, log_ax, spec.chi, spec.zeta)
    crossed, _, status, _ = _run(backend().crossing_paths, cfg, 0, *args, *tail)
    coarse_cfg = MCConfig(**{**cfg.__dict__, "dt": 2.0 * cfg.dt, "h_max": max(cfg.h_max, 2.0 * cfg.dt)})
    args2 = args[:8] + (coarse_cfg.dt, coarse_cfg.h_max) + args[10:]
    crossed2, _, _, _ = _run(backend().crossing_paths, coarse_cfg, 0, *args2, *tail)
    n = crossed.size
    rich = abs(float(np.mean(crossed)) - float(np.mean(crossed2)))
    r = _sup_bound(h)
    back = math.exp(-r * (log_ax - level)) if r > 0 and math.isfinite(level) else 1.0
    unsure = np.count_nonzero(status == ST_TAIL) * back + np.count_nonzero(status == ST_HORIZON)
    return _estimate(crossed.astype(float), rich + unsure / n)


def estimate_hitting_laplace(model: LevyModel, cfg: MCConfig, x, a, time_cap=40.0):
    """E_x[exp(-T_a)] for a model that is never absorbed."""
    h = ExponentHandle(model)
    if model.kill_q != 0 or h.mean_xi1 < 0:
        raise DomainError("hitting transforms are simulated for kill_q = 0 and E[xi_1] >= 0")
    if not 0 < x <= a:
        raise DomainError("needs 0 < x <= a")
    spec = process.compile_process(model, cfg.small_jump_cutoff)
    base = (spec.alpha, spec.drift, spec.var, spec.lam, spec.kill_q, spec.mode, spec.table, spec.tail)
    rest = (cfg.horizon, -math.inf, x ** model.alpha, math.log(a / x), 0.0, float(time_cap))
    vals = []
    for dt in (cfg.dt, 2.0 * cfg.dt):
        crossed, t_cross, status, _ = _run(backend().crossing_paths, cfg, 0, *base, dt,
                                           max(cfg.h_max, dt), *rest)
        vals.append((np.where(crossed == 1, np.exp(-np.nan_to_num(t_cross, nan=np.inf)), 0.0), status))
    (v1, status), (v2, _) = vals
    n = v1.size
    bias = abs(float(v1.mean()) - float(v2.mean())) + math.exp(-time_cap)
    bias += np.count_nonzero(status == ST_HORIZON) / n
    return _estimate(v1, bias)


def simulate_stable_max(alpha, cfg: MCConfig, x_grid):
    """P(sup_{s<=1} Z_s <= x) for the spectrally positive stable process.

    The grid maximum misses the true one by O(dt^(1/alpha)); the bias is
    estimated from the maximum over every other grid point, assuming that
    rate.
    """
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise DomainError("stable index must lie in (1, 2)")
    n_steps = max(2, int(round(1.0 / cfg.dt)))
    n_steps += n_steps % 2
    fine, coarse = _run(backend().stable_max_paths, cfg, 0, alpha, n_steps)
    factor = 1.0 / (2.0 ** (1.0 / alpha) - 1.0)
    out = []
    for x in x_grid:
        x = float(x)
        ind = (fine <= x).astype(float)
        rich = abs(float(ind.mean()) - float(np.mean(coarse <= x))) * factor
        out.append(_estimate(ind, rich))
    return out


def affine_recomposition(model: LevyModel, cfg: MCConfig):
    """Two samples that share the law of Sigma if Sigma solves the affine equation.

    ``direct`` holds Sigma itself; ``recomposed`` holds
    int_0^1 e^(alpha xi_s) ds + e^(alpha xi_1) Sigma', with Sigma' independent.
    """
    if model.kill_q != 0:
        raise DomainError("the affine recomposition is implemented for kill_q = 0")
    direct = sample_sigma(model, cfg, stream=0)
    head = sample_sigma(model, cfg, t_stop=1.0, stream=1)
    rest = sample_sigma(model, cfg, stream=2)
    unit = head.status == ST_UNIT
    recomposed = head.fine + np.where(unit, np.exp(model.alpha * head.xi_end) * rest.fine, 0.0)
    return direct.fine, recomposed
