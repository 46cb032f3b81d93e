"""Monte Carlo tick streams by time-rescaling inversion.

If ``u`` is a unit exponential draw then the solution ``t`` of
``Lambda(t) = u`` is distributed as a waiting time between ticks.  Because
``Lambda`` grows by ``Lambda_cycle`` every period, ``q = floor(u /
Lambda_cycle)`` full cycles are skipped at once and only the remainder is
solved for within a single cycle, by safeguarded Newton iteration on the
cached panel table.

Randomness comes from numpy's counter-based Philox generator keyed by
``(seed, stream)``, so independent streams can be produced in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProfileError, DegenerateSampleError, ParameterError
from .model import ClockParams
from .ticks import DEGENERATE_CYCLE_HAZARD, HazardModel

__all__ = [
    "GENERATOR_ID",
    "TickSample",
    "EmpiricalMetrics",
    "tick_rng",
    "invert_cumulative_hazard",
    "sample_ticks",
    "empirical_metrics",
    "write_sample_csv",
]

GENERATOR_ID = "numpy.random.Philox(SeedSequence(seed, spawn_key=(stream,)))"
_BOOTSTRAP_KEY = 0x5EED
_MAX_ITER = 200


def tick_rng(seed, stream=0):
    """Philox generator for the given ``(seed, stream)`` pair."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ParameterError(f"seed must be a non-negative integer, got {seed!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class TickSample:
    """Waiting times between consecutive ticks.

    The clockwork resets after every tick (zero reset latency), so the
    entries are i.i.d.
    """

    seed: int
    tick_times: np.ndarray = field(repr=False)
    count: int
    params: ClockParams | None = None
    metadata: dict = field(default_factory=dict, repr=False)


@dataclass(frozen=True)
class EmpiricalMetrics:
    """Sample estimates with bootstrap standard errors."""

    t_bar_hat: float
    t_bar_se: float
    N_hat: float
    N_se: float
    R_hat: float
    R_se: float


def invert_cumulative_hazard(model: HazardModel, u):
    """Solve ``Lambda(t) = u`` for each entry of ``u`` (times in seconds).

    The result is accurate to ``1e-12 * pi / g`` in absolute time.
    """
    lam_cyc = model.cycle_hazard
    if not lam_cyc >= DEGENERATE_CYCLE_HAZARD:
        raise DegenerateProfileError(
            f"cycle hazard {lam_cyc:.3e} is too small to sample ticks", cycle_hazard=lam_cyc
        )
    u = np.asarray(u, dtype=float)
    q = np.floor(u / lam_cyc)
    v = u - q * lam_cyc
    # rounding can push v a hair outside [0, lam_cyc)
    wrap = v >= lam_cyc
    q[wrap] += 1
    v[wrap] -= lam_cyc
    v = np.maximum(v, 0.0)

    edges, lam_edges = model.within_cycle_table
    j = np.clip(np.searchsorted(lam_edges, v, side="right") - 1, 0, len(edges) - 2)
    lo = edges[j].copy()
    hi = edges[j + 1].copy()
    base = lam_edges[j]
    step = lam_edges[j + 1] - base
    frac = np.divide(v - base, step, out=np.full_like(v, 0.5), where=step > 0)
    x = lo + np.clip(frac, 0.0, 1.0) * (hi - lo)
    left = edges[j]
    tol = 1e-12 * math.pi

    active = np.ones(v.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        F = base[idx] + model._partial(left[idx], xa) - v[idx]
        rate = model._rate(xa)
        below = F < 0
        lo[idx] = np.where(below, xa, lo[idx])
        hi[idx] = np.where(below, hi[idx], xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = xa - F / rate
        ok = (rate > 0) & (newton >= lo[idx]) & (newton <= hi[idx])
        nxt = np.where(ok, newton, 0.5 * (lo[idx] + hi[idx]))
        # an exact root must not be replaced by a bisection midpoint
        nxt = np.where(F == 0, xa, nxt)
        x[idx] = nxt
        done = (np.abs(nxt - xa) <= tol) | (hi[idx] - lo[idx] <= tol) | (F == 0)
        active[idx[done]] = False
    return (q * math.pi + x) / model.g


def sample_ticks(params: ClockParams, count, seed, stream=0, variant="clockwork", model=None):
    """Draw ``count`` i.i.d. waiting times between ticks.

    Parameters
    ----------
    params : ClockParams
    count : int
        Number of ticks, at least 1.
    seed : int
        Non-negative integer seed.
    stream : int, optional
        Substream index; different streams are independent.
    variant : {"clockwork", "baseline"}
    model : HazardModel, optional
        Reuse an already built hazard model for ``params``.
    """
    if isinstance(count, bool) or not isinstance(count, (int, np.integer)) or count < 1:
        raise ParameterError(f"count must be a positive integer, got {count!r}")
    if model is None:
        model = HazardModel.from_params(params, variant)
    u = tick_rng(seed, stream).standard_exponential(int(count))
    times = invert_cumulative_hazard(model, u)
    times.setflags(write=False)
    meta = {
        **params.as_dict(),
        "variant": variant,
        "seed": int(seed),
        "stream": int(stream),
        "count": int(count),
        "generator": GENERATOR_ID,
        "numpy_version": np.__version__,
        "reset_latency": 0.0,
    }
    return TickSample(seed=int(seed), tick_times=times, count=int(count), params=params, metadata=meta)


def empirical_metrics(sample: TickSample, n_boot=1000, chunk=50) -> EmpiricalMetrics:
    """Mean, accuracy and resolution estimates with bootstrap errors.

    The bootstrap resamples are drawn from a generator derived from the
    sample seed, so the standard errors are reproducible too.
    """
    t = np.asarray(sample.tick_times, dtype=float)
    n = t.size
    if n < 2:
        raise ParameterError("empirical metrics need at least two ticks")
    mean = math.fsum(t) / n
    var = math.fsum((t - mean) ** 2) / (n - 1)
    if not var > 0:
        raise DegenerateSampleError("sample variance is zero; accuracy is undefined")

    rng = tick_rng(sample.seed, _BOOTSTRAP_KEY)
    means = np.empty(n_boot)
    accs = np.empty(n_boot)
    for s in range(0, n_boot, chunk):
        b = min(chunk, n_boot - s)
        res = t[rng.integers(0, n, size=(b, n))]
        m = res.mean(axis=1)
        v = res.var(axis=1, ddof=1)
        means[s : s + b] = m
        with np.errstate(divide="ignore", invalid="ignore"):
            accs[s : s + b] = np.where(v > 0, m * m / np.where(v > 0, v, 1.0), np.nan)
    return EmpiricalMetrics(
        t_bar_hat=mean,
        t_bar_se=float(np.std(means, ddof=1)),
        N_hat=mean * mean / var,
        # resamples that repeat a single value have no finite accuracy
        N_se=float(np.std(accs[np.isfinite(accs)], ddof=1)) if np.isfinite(accs).sum() > 1 else math.nan,
        R_hat=1.0 / mean,
        R_se=float(np.std(1.0 / means, ddof=1)),
    )


def write_sample_csv(sample: TickSample, fh):
    """Single-column CSV of waiting times behind a ``# key=value`` header."""
    for key, value in sample.metadata.items():
        fh.write(f"# {key}={value}\n")
    fh.write("tick_time\n")
    for x in sample.tick_times:
        fh.write(f"{x:.16e}\n")
