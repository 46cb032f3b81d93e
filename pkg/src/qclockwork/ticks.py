"""Tick statistics of a clock with a periodic top-level profile.

A tick is the decay of the top ladder level, an inhomogeneous Poisson event
with hazard ``c P_top(t)``.  Working in the phase ``x = g t``, the hazard
per unit phase is ``k P(x)`` with ``k = c / g`` and the profile has period
``pi``.  Writing a tick time as ``(q pi + theta) / g`` splits it into an
integer cycle count ``q``, geometric with ratio ``r = exp(-Lambda_cycle)``,
and an independent within-cycle phase ``theta`` with density proportional to
``k P(theta) exp(-Lambda(theta))`` on ``[0, pi)``.  Moments then follow
from three finite integrals over one cycle plus closed-form geometric sums.

The within-cycle integrals use an adaptively refined table of Gauss-Legendre
panels that is built once per :class:`HazardModel`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import betaln

from .errors import ConsistencyError, DegenerateProfileError, PrecisionWarning
from .model import ClockParams, TopLevelProfile, baseline_profile, general_profile

__all__ = [
    "HazardModel",
    "TickMoments",
    "hazard",
    "cumulative_hazard",
    "survival",
    "tick_density",
    "moments",
    "clock_metrics",
    "baseline_metrics",
    "DEGENERATE_CYCLE_HAZARD",
]

#: cycle hazards below this are treated as a clock that never ticks
DEGENERATE_CYCLE_HAZARD = 1e-14

_NODES_HI, _WEIGHTS_HI = leggauss(20)
_NODES_LO, _WEIGHTS_LO = leggauss(10)

# Refinement controls for the panel table.
_RTOL = 1e-10
_FLOOR = 1e-15  # absolute floor, relative to the whole-cycle integral
_MAX_STEP = 1.0  # largest hazard increment allowed across one panel...
_STEP_ZONE = 60.0  # ...while the survival exp(-Lambda) is still above e^-60
_MAX_PANELS = 200_000
_WIENER_SWITCH = 1e-6  # below this fraction of the cycle hazard use the table


def _map_nodes(a, b, nodes):
    """Map reference nodes on [-1, 1] onto each interval [a_i, b_i]."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half


def _wiener_coefficients(m):
    """Coefficients of int_0^x sin^(2m)(s) ds.

    Returns ``(c0, coef)`` with
    ``int_0^x sin^(2m) = c0 x + sum_p coef[p-1] sin(2 p x)``.
    """
    # binom(2m, m) / 4^m = B(m + 1/2, 1/2) / pi
    c0 = math.exp(betaln(m + 0.5, 0.5)) / math.pi
    p = np.arange(1, m + 1)
    # binom(2m, m-p) / binom(2m, m-p+1) = (m-p+1) / (m+p)
    log_ratio = np.cumsum(np.log(m - p + 1.0) - np.log(m + p + 0.0))
    coef = np.where(p % 2 == 1, -1.0, 1.0) / p * c0 * np.exp(log_ratio)
    return c0, coef


class HazardModel:
    """Hazard ``c P_top(t)`` with its cumulative hazard over one cycle.

    Parameters
    ----------
    profile : TopLevelProfile
        Top-level probability whose hazard is modelled.

    Attributes
    ----------
    c : float
        Decay rate of the top level (1/s).
    cycle_hazard : float
        ``Lambda_cycle``, the hazard accumulated over one period ``pi/g``,
        evaluated exactly through Beta functions.
    within_cycle_table : tuple of ndarray
        Panel edges (phase) and cumulative hazard at each edge.
    """

    def __init__(self, profile: TopLevelProfile):
        self.profile = profile
        self.params = profile.params
        self.c = float(profile.params.c)
        self.g = float(profile.params.g)
        self.k = self.c / self.g
        self.cycle_hazard = self.k * profile.cycle_integral()
        if self.cycle_hazard < 0 or not math.isfinite(self.cycle_hazard):
            raise ConsistencyError(f"invalid cycle hazard {self.cycle_hazard}")
        self._wiener = None
        if profile.is_single_sine_power:
            w, _, sp = profile.terms[0]
            self._wiener = (w, sp // 2)
        if self.cycle_hazard > 0:
            self._build_table()
        else:
            self._edges = np.array([0.0, math.pi])
            self._lam_edges = np.zeros(2)
        self.within_cycle_table = (self._edges, self._lam_edges)

    @classmethod
    def from_params(cls, params: ClockParams, variant="clockwork"):
        return cls(_profile_for(params, variant))

    # hazard per unit phase
    def _rate(self, x):
        return self.k * np.asarray(self.profile._eval_phase(x))

    def _partial(self, a, x):
        """k * int_a^x P, for arrays a <= x of equal shape."""
        nodes, half = _map_nodes(a, x, _NODES_HI)
        return (self._rate(nodes) @ _WEIGHTS_HI) * half[..., 0]

    def _build_table(self):
        d = self.params.d
        n0 = max(8, int(math.ceil(2 * math.sqrt(d))))
        edges = np.unique(np.concatenate([np.linspace(0, math.pi, n0 + 1), [math.pi / 2]]))
        total = self.cycle_hazard
        while True:
            a, b = edges[:-1], edges[1:]
            xh, half = _map_nodes(a, b, _NODES_HI)
            xl, _ = _map_nodes(a, b, _NODES_LO)
            half = half[:, 0]
            rate_hi = self._rate(xh)
            I_hi = (rate_hi @ _WEIGHTS_HI) * half
            I_lo = (self._rate(xl) @ _WEIGHTS_LO) * half
            lam_left = np.concatenate([[0.0], np.cumsum(I_hi)[:-1]])
            tol = np.maximum(_RTOL * np.abs(I_hi), _FLOOR * total)
            split = np.abs(I_hi - I_lo) > tol
            split |= (I_hi > _MAX_STEP) & (lam_left < _STEP_ZONE)
            # the survival-weighted density must be resolved as well
            live = ~split & (lam_left < 745.0)
            if live.any():
                lam_h = lam_left[live, None] + self._partial(
                    np.broadcast_to(a[live, None], xh[live].shape), xh[live]
                )
                lam_l = lam_left[live, None] + self._partial(
                    np.broadcast_to(a[live, None], xl[live].shape), xl[live]
                )
                J_hi = (rate_hi[live] * np.exp(-lam_h)) @ _WEIGHTS_HI * half[live]
                J_lo = (self._rate(xl[live]) * np.exp(-lam_l)) @ _WEIGHTS_LO * half[live]
                bad = np.abs(J_hi - J_lo) > np.maximum(_RTOL * np.abs(J_hi), _FLOOR)
                split[np.flatnonzero(live)[bad]] = True
            if not split.any():
                break
            if len(edges) > _MAX_PANELS:
                warnings.warn(
                    "cumulative-hazard table hit the panel limit; accuracy may be reduced",
                    PrecisionWarning,
                    stacklevel=3,
                )
                break
            mids = 0.5 * (a[split] + b[split])
            edges = np.sort(np.concatenate([edges, mids]))

        lam_edges = np.concatenate([[0.0], np.cumsum(I_hi)])
        numeric = lam_edges[-1]
        if abs(numeric - total) > 1e-8 * total:
            raise ConsistencyError(
                f"cycle hazard quadrature {numeric!r} disagrees with the exact value {total!r}"
            )
        self._edges = edges
        self._lam_edges = lam_edges * (total / numeric)
        self._panel_rate = rate_hi
        self._panel_nodes = xh
        self._panel_half = half

    # cumulative hazard within one cycle
    def _lam_table(self, x):
        x = np.asarray(x, dtype=float)
        j = np.clip(np.searchsorted(self._edges, x, side="right") - 1, 0, len(self._edges) - 2)
        a = self._edges[j]
        return self._lam_edges[j] + self._partial(a, x)

    def _lam_wiener(self, x):
        w, m = self._wiener
        c0, coef = _wiener_coefficients(m)
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty_like(flat)
        chunk = max(1, 2_000_000 // max(m, 1))
        p2 = 2.0 * np.arange(1, m + 1)
        for s in range(0, flat.size, chunk):
            xs = flat[s : s + chunk]
            out[s : s + chunk] = c0 * xs + np.sin(np.outer(xs, p2)) @ coef
        return (self.k * w * out).reshape(x.shape)

    def cumulative_phase(self, x, method="auto"):
        """Cumulative hazard at phase(s) ``x = g t >= 0``."""
        x = np.asarray(x, dtype=float)
        q = np.floor(x / math.pi)
        theta = x - q * math.pi
        if method == "auto" and self._wiener is not None and self.cycle_hazard > 0:
            within = self._lam_wiener(theta)
            # the sine series cancels near theta = 0, where the table keeps
            # its relative accuracy
            small = within < _WIENER_SWITCH * self.cycle_hazard
            if np.any(small):
                within = np.where(small, self._lam_table(np.where(small, theta, 0.0)), within)
            return q * self.cycle_hazard + within
        if method == "auto":
            method = "wiener" if self._wiener is not None else "table"
        if method == "wiener":
            if self._wiener is None:
                raise ValueError("the Wiener form needs a single sine-power profile")
            within = self._lam_wiener(theta)
        elif method == "table":
            within = self._lam_table(theta) if self.cycle_hazard > 0 else np.zeros_like(theta)
        else:
            raise ValueError(f"unknown method {method!r}")
        return q * self.cycle_hazard + within

    def phase_moments(self):
        """Return ``(K0, mean, var)`` of the within-cycle phase density.

        ``K0`` is the probability of ticking within one cycle, numerically
        ``1 - exp(-Lambda_cycle)``.
        """
        xh, half = self._panel_nodes, self._panel_half
        a = self._edges[:-1]
        lam = self._lam_edges[:-1, None] + self._partial(np.broadcast_to(a[:, None], xh.shape), xh)
        rho = self._panel_rate * np.exp(-lam) * half[:, None]
        w = rho * _WEIGHTS_HI
        K0 = math.fsum(w.ravel())
        mean = math.fsum((w * xh).ravel()) / K0
        var = math.fsum((w * (xh - mean) ** 2).ravel()) / K0
        return K0, mean, var


def _profile_for(params, variant="clockwork"):
    if variant == "clockwork":
        return general_profile(params)
    if variant == "baseline":
        return baseline_profile(params)
    raise ValueError(f"variant must be 'clockwork' or 'baseline', got {variant!r}")


def _as_output(x):
    x = np.asarray(x)
    return x if x.ndim else float(x)


def hazard(model: HazardModel, t):
    """Instantaneous tick rate ``c P_top(t)`` (1/s)."""
    return _as_output(model.c * np.asarray(model.profile.evaluate(t)))


def cumulative_hazard(model: HazardModel, t, method="auto"):
    """``Lambda(t) = int_0^t c P_top``.

    Single sine-power profiles use the closed-form antiderivative::

        int_0^x sin^(2m) = 4^-m [binom(2m, m) x
                                 + sum_p (-1)^p / p binom(2m, m-p) sin(2 p x)]

    Other profiles use cycle periodicity plus the adaptive panel table.
    ``method`` may force ``"wiener"`` or ``"table"``.
    """
    x = model.g * np.asarray(t, dtype=float)
    return _as_output(model.cumulative_phase(x, method=method))


def survival(model: HazardModel, t):
    """Probability that no tick occurred by time ``t``."""
    return _as_output(np.exp(-np.asarray(cumulative_hazard(model, t))))


def tick_density(model: HazardModel, t):
    """Waiting-time density ``c P_top(t) exp(-Lambda(t))``."""
    lam = np.asarray(cumulative_hazard(model, t))
    return _as_output(np.asarray(hazard(model, t)) * np.exp(-lam))


@dataclass(frozen=True)
class TickMoments:
    """First two moments of the waiting time and the derived clock metrics.

    Attributes
    ----------
    t_bar, t2_bar : float
        Mean and second raw moment of the waiting time.
    delta_t : float
        Standard deviation.
    N : float
        Accuracy ``(t_bar / delta_t)^2``.
    R : float
        Resolution ``1 / t_bar``.
    epsilon : float
        Dissipation rate ``(d - 1) E_C R``.
    """

    t_bar: float
    t2_bar: float
    delta_t: float
    N: float
    R: float
    epsilon: float

    @property
    def variance(self):
        return self.delta_t**2


def _metrics(params, t_bar, var):
    R = 1.0 / t_bar
    return TickMoments(
        t_bar=t_bar,
        t2_bar=var + t_bar * t_bar,
        delta_t=math.sqrt(var),
        N=t_bar * t_bar / var,
        R=R,
        epsilon=(params.d - 1) * params.E_C * R,
    )


def moments(model: HazardModel) -> TickMoments:
    """Exact waiting-time moments by cycle decomposition.

    With ``r = exp(-Lambda_cycle)`` the cycle count is geometric, so

    * ``t_bar = (pi r / (1 - r) + E[theta]) / g``
    * ``Var t = (pi^2 r / (1 - r)^2 + Var[theta]) / g^2``

    where ``theta`` is the within-cycle phase.  The geometric sums are
    closed forms and the phase variance is integrated about its mean, so
    nothing cancels catastrophically when ``r`` approaches 1.

    Raises
    ------
    DegenerateProfileError
        If ``Lambda_cycle < DEGENERATE_CYCLE_HAZARD``; the clock then
        effectively never ticks and its resolution is reported as 0.
    ConsistencyError
        If the quadrature disagrees with the exact tick probability per
        cycle.
    """
    lam = model.cycle_hazard
    if lam < DEGENERATE_CYCLE_HAZARD:
        if lam > 0:
            warnings.warn(
                f"cycle hazard {lam:.3e} leaves r within 1e-14 of 1",
                PrecisionWarning,
                stacklevel=2,
            )
        raise DegenerateProfileError(
            f"cycle hazard {lam:.3e} is below {DEGENERATE_CYCLE_HAZARD:g}: the clock "
            "essentially never ticks",
            cycle_hazard=lam,
        )
    r = math.exp(-lam)
    one_minus_r = -math.expm1(-lam)
    K0, mean, var_theta = model.phase_moments()
    if abs(K0 - one_minus_r) > 1e-8 * one_minus_r:
        raise ConsistencyError(
            f"tick probability per cycle {K0!r} disagrees with 1 - r = {one_minus_r!r}"
        )
    expected_q = r / one_minus_r
    var_q = r / one_minus_r**2
    g = model.g
    t_bar = (math.pi * expected_q + mean) / g
    var = (math.pi**2 * var_q + var_theta) / g**2
    return _metrics(model.params, t_bar, var)


def clock_metrics(params: ClockParams, variant="clockwork") -> TickMoments:
    """Tick moments and metrics for a clockwork or for the baseline clock."""
    return moments(HazardModel(_profile_for(params, variant)))


def baseline_metrics(params: ClockParams) -> TickMoments:
    """Closed-form metrics of the baseline clock.

    The ladder sits in equilibrium with the hot bath, so ticks are
    exponential with rate ``c exp(-beta_H (d-1) E_L) / Z_L(beta_H)``.
    """
    rate = params.c * baseline_profile(params).constant
    t_bar = 1.0 / rate if rate > 0 else math.inf
    if not math.isfinite(t_bar * t_bar):
        raise DegenerateProfileError(
            f"baseline tick rate {rate:.3e} is too small to represent its moments",
            cycle_hazard=rate * math.pi / params.g,
        )
    return TickMoments(
        t_bar=t_bar,
        t2_bar=2.0 * t_bar * t_bar,
        delta_t=t_bar,
        N=1.0,
        R=rate,
        epsilon=(params.d - 1) * params.E_C * rate,
    )
