"""Kernel-ready description of the Lévy process behind a model, and path streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..levy_model import ExpMixture, LevyModel, NoJumps, TabulatedDensity

JUMPS_NONE = 0
JUMPS_EXP = 1
JUMPS_TABLE = 2


@dataclass(frozen=True)
class PathSpec:
    """xi_t = drift t + sqrt(var) W_t - (compound Poisson jumps of rate lam).

    ``table`` rows are (cum_prob, rate) for exponential mixtures and
    (cum_prob, lo, width, f_lo, f_hi) for tabulated densities, where a cell
    covers jump magnitudes [lo, lo + width] with a linear density.  ``tail``
    holds (p_tail, tail_rate, start) for the exponential tail of a table.
    """

    alpha: float
    drift: float
    var: float
    lam: float
    kill_q: float
    mode: int
    table: np.ndarray
    tail: np.ndarray
    small_jump_var: float = 0.0


def _table_cells(measure: TabulatedDensity, cutoff):
    """Cells of the tabulated density restricted to magnitudes >= cutoff."""
    r = np.asarray(measure.r)
    f = np.asarray(measure.density)
    cells = []
    for i in range(len(r) - 1):
        a, b = r[i], r[i + 1]  # a < b < 0
        fa, fb = f[i], f[i + 1]
        if -a <= cutoff:
            continue
        if -b < cutoff:
            # split at r = -cutoff
            fb = fa + (fb - fa) * ((-cutoff) - a) / (b - a)
            b = -cutoff
        # magnitude cell: lo = -b, width = b - a, density at lo is fb, at lo + width is fa
        w = b - a
        mass = 0.5 * w * (fa + fb)
        if mass > 0:
            cells.append((mass, -b, w, fb, fa))
    return cells


def compile_process(model: LevyModel, small_jump_cutoff=1e-3) -> PathSpec:
    meas = model.measure
    var = float(model.sigma)
    if isinstance(meas, NoJumps):
        return PathSpec(model.alpha, model.drift, var, 0.0, model.kill_q, JUMPS_NONE,
                        np.zeros((1, 2)), np.zeros(3))
    if isinstance(meas, ExpMixture):
        lam = meas.total_mass()
        cum = np.cumsum(np.asarray(meas.intensities, dtype=float)) / lam
        cum[-1] = 1.0
        table = np.column_stack([cum, np.asarray(meas.rates, dtype=float)])
        return PathSpec(model.alpha, model.drift, var, lam, model.kill_q, JUMPS_EXP,
                        np.ascontiguousarray(table), np.zeros(3))
    if isinstance(meas, TabulatedDensity):
        c = float(small_jump_cutoff)
        if not c > 0:
            raise DomainError("small_jump_cutoff must be > 0")
        # jumps smaller than c are replaced by their compensated Gaussian
        # approximation: mean zero, variance int_{-c}^0 r^2 nu(dr)
        small_var = meas.integrate(lambda x: x * x if x > -c else 0.0)
        small_mean = meas.integrate(lambda x: x if x > -c else 0.0)
        drift = model.bbar - meas.small_jump_mean() + small_mean
        cells = _table_cells(meas, c)
        r0, f0, tau = meas.r[0], meas.density[0], meas.tail_rate
        tail_start = max(-r0, c)
        tail_mass = f0 * math.exp(-tau * (tail_start + r0)) / tau if f0 > 0 else 0.0
        lam = tail_mass + sum(cl[0] for cl in cells)
        if lam == 0.0:
            return PathSpec(model.alpha, drift, var + small_var, 0.0, model.kill_q, JUMPS_NONE,
                            np.zeros((1, 2)), np.zeros(3), small_var)
        cum = np.cumsum([tail_mass] + [cl[0] for cl in cells]) / lam
        rows = [(cum[i + 1], lo, w, flo, fhi) for i, (_, lo, w, flo, fhi) in enumerate(cells)]
        if rows:
            rows[-1] = (1.0,) + rows[-1][1:]
        table = np.asarray(rows, dtype=float).reshape(-1, 5) if rows else np.zeros((1, 5))
        return PathSpec(model.alpha, drift, var + small_var, lam, model.kill_q, JUMPS_TABLE,
                        np.ascontiguousarray(table), np.array([cum[0], tau, tail_start]), small_var)
    raise TypeError(f"unsupported jump measure {type(meas).__name__}")


def path_key(seed):
    """Philox key derived from a 64-bit seed."""
    return np.random.SeedSequence(int(seed) & (2 ** 64 - 1)).generate_state(2, np.uint64)


def path_generators(seed, start, count, stream=0):
    """Generators for paths start .. start+count-1.

    Path i uses the Philox counter block (i, stream) << 128 under a key
    derived from the seed, so a path's draws do not depend on how many
    paths are simulated or on how they are split into chunks.
    """
    key = path_key(seed)
    return [
        np.random.Generator(np.random.Philox(counter=((i << 32) | stream) << 128, key=key))
        for i in range(start, start + count)
    ]


def tail_level(spec: PathSpec, mean_xi1, eps_tail):
    """Level L with e^(alpha L) / (alpha |E xi_1|) = eps_tail."""
    if not mean_xi1 < 0:
        return -math.inf
    return math.log(eps_tail * spec.alpha * abs(mean_xi1)) / spec.alpha
