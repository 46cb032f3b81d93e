"""Closed-form top-level probability profiles of thermal clockworks.

Conventions: hbar = k_B = 1, energies in units of the cold gap ``E_C``,
times in seconds, ``g`` and ``c`` in 1/s.  ``beta_C = inf`` (cold bath at
zero temperature), ``beta_H = 0`` (infinitely hot bath) and ``M = inf``
(infinitely many machines per transition) are exact values, not large-number
stand-ins.

Every profile is a finite sum of even trigonometric powers in ``x = g t``::

    P_top(t) = constant + sum_n  w_n cos^(2n)(x) sin^(2(d-1-n))(x)

which :class:`TopLevelProfile` stores explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real

import numpy as np
from scipy.special import betaln

from .errors import (
    ConsistencyError,
    DegenerateGradientError,
    ParameterError,
    WrongVariantError,
)

__all__ = [
    "ClockParams",
    "PartitionSet",
    "TopLevelProfile",
    "EnergyAccount",
    "qubit_partition",
    "ladder_partition",
    "f_coefficient",
    "wigner_amp_sq",
    "two_qubit_profile",
    "horizontal_profile",
    "general_profile",
    "baseline_profile",
    "p_top_two_qubit",
    "p_top_horizontal_finite_T",
    "p_top_general",
    "effective_coupling",
    "energy_account",
]

PROFILE_KINDS = (
    "two_qubit",
    "horizontal_finite_T",
    "general_finite_T",
    "general_zero_TC",
    "baseline_constant",
)


def _parse_extended(value, name):
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        try:
            return float(value)
        except ValueError:
            raise ParameterError(f"{name}: cannot parse {value!r}") from None
    return value


@dataclass(frozen=True)
class ClockParams:
    """Full parameterization of one clock instance.

    Parameters
    ----------
    d : int
        Ladder dimension, at least 2.
    M : int or math.inf
        Machines per ladder transition.
    g : float
        Machine coupling strength (1/s).
    c : float
        Decay rate of the top ladder level into the field (1/s).
    beta_C, beta_H : float
        Inverse temperatures of the cold and hot baths.  ``beta_C`` may be
        ``math.inf``; ``beta_H`` may be 0.  ``beta_C > beta_H`` is required.
    E_C, E_H : float
        Cold and hot qubit gaps with ``E_H > E_C > 0``.  The ladder spacing is
        ``E_L = E_H - E_C``.
    """

    d: int
    M: int | float = math.inf
    g: float = 1.0
    c: float = 25.0
    beta_C: float = math.inf
    beta_H: float = 0.0
    E_C: float = 1.0
    E_H: float = 2.0

    def __post_init__(self):
        d = self.d
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
            if isinstance(d, (float, np.floating)) and float(d).is_integer():
                d = int(d)
            else:
                raise ParameterError(f"d must be an integer >= 2, got {self.d!r}")
        if d < 2:
            raise ParameterError(f"d must be an integer >= 2, got {d}")
        object.__setattr__(self, "d", int(d))

        M = _parse_extended(self.M, "M")
        if isinstance(M, bool):
            raise ParameterError(f"M must be a positive integer or inf, got {M!r}")
        if isinstance(M, (float, np.floating)):
            if M == math.inf:
                M = math.inf
            elif float(M).is_integer():
                M = int(M)
            else:
                raise ParameterError(f"M must be a positive integer or inf, got {M!r}")
        if M != math.inf and (not isinstance(M, (int, np.integer)) or M < 1):
            raise ParameterError(f"M must be a positive integer or inf, got {M!r}")
        object.__setattr__(self, "M", M if M == math.inf else int(M))

        beta_C = _parse_extended(self.beta_C, "beta_C")
        beta_H = _parse_extended(self.beta_H, "beta_H")
        object.__setattr__(self, "beta_C", beta_C)
        object.__setattr__(self, "beta_H", beta_H)
        for name in ("g", "c", "E_C", "E_H", "beta_C", "beta_H"):
            v = getattr(self, name)
            if not isinstance(v, Real) or isinstance(v, bool) or math.isnan(float(v)):
                raise ParameterError(f"{name} must be a real number, got {v!r}")
        for name in ("g", "c", "E_C"):
            v = getattr(self, name)
            if not (0 < v < math.inf):
                raise ParameterError(f"{name} must be positive and finite, got {v!r}")
        if not self.E_H > self.E_C:
            raise ParameterError(f"E_H must exceed E_C (got E_H={self.E_H}, E_C={self.E_C})")
        if not math.isfinite(self.E_H):
            raise ParameterError("E_H must be finite")
        if beta_H < 0 or beta_C < 0:
            raise ParameterError("inverse temperatures must be >= 0")
        if not beta_C > beta_H:
            raise ParameterError(
                f"the cold bath must be strictly colder: beta_C={beta_C} <= beta_H={beta_H}"
            )

    @property
    def E_L(self):
        return self.E_H - self.E_C

    @property
    def zero_TC(self):
        return self.beta_C == math.inf

    @property
    def period(self):
        return math.pi / self.g

    def replace(self, **changes) -> "ClockParams":
        fields = {k: getattr(self, k) for k in ("d", "M", "g", "c", "beta_C", "beta_H", "E_C", "E_H")}
        fields.update(changes)
        return ClockParams(**fields)

    def as_dict(self):
        return {k: getattr(self, k) for k in ("d", "M", "g", "c", "beta_C", "beta_H", "E_C", "E_H")}


def _boltzmann(E, beta):
    """exp(-beta * E) with exp(-inf) = 0 and 0 * inf never formed."""
    if beta == math.inf:
        return 0.0
    return math.exp(-float(beta) * float(E))


def qubit_partition(E, beta):
    """Partition function ``1 + exp(-beta E)`` of a qubit with gap ``E``.

    >>> qubit_partition(1.0, 0.0)
    2.0
    >>> qubit_partition(1.0, math.inf)
    1.0
    """
    beta = _parse_extended(beta, "beta")
    if isinstance(beta, bool) or not isinstance(beta, Real) or math.isnan(float(beta)):
        raise ParameterError(f"beta must be a real number, got {beta!r}")
    if beta < 0:
        raise ParameterError(f"beta must be >= 0 (or inf), got {beta!r}")
    if not E > 0:
        raise ParameterError(f"E must be positive, got {E!r}")
    return 1.0 + _boltzmann(E, beta)


@dataclass(frozen=True)
class PartitionSet:
    """Partition functions of cold qubit, hot qubit and ladder (at ``beta_C``)."""

    Z_C: float
    Z_H: float
    Z_L: float
    ladder_pop: np.ndarray = field(repr=False)


def _ladder_populations(d, spacing, beta):
    """Thermal occupations of an evenly spaced d-level ladder."""
    if beta == math.inf:
        pop = np.zeros(d)
        pop[0] = 1.0
        return pop, 1.0
    logw = -float(beta) * float(spacing) * np.arange(d)
    w = np.exp(logw)
    Z = math.fsum(w)
    return w / Z, Z


def ladder_partition(params: ClockParams) -> PartitionSet:
    pop, Z_L = _ladder_populations(params.d, params.E_L, params.beta_C)
    pop.setflags(write=False)
    return PartitionSet(
        Z_C=qubit_partition(params.E_C, params.beta_C),
        Z_H=qubit_partition(params.E_H, params.beta_H),
        Z_L=Z_L,
        ladder_pop=pop,
    )


def _log_binom(n, k):
    # the Beta form keeps full relative precision when one argument is small
    return -np.log1p(n) - betaln(n - k + 1, k + 1)


def _log_bracket(log_S, M):
    """log of 1 - (1 - S)^M for S in [0, 1]; M may be inf."""
    if M == math.inf:
        return 0.0 if log_S > -math.inf else -math.inf
    if log_S == -math.inf:
        return -math.inf
    S = math.exp(log_S)
    if S == 0.0 or M * S < 1e-300:
        # first order: 1 - (1 - S)^M ~ M S
        return math.log(M) + log_S
    if S >= 1.0:
        return 0.0
    val = -math.expm1(M * math.log1p(-S))
    return math.log(val) if val > 0 else math.log(M) + log_S


def _machine_terms(params):
    """Return (log u, rho, log S) for the column-excitation probability S.

    ``u = max(Z_H - 1, Z_C - 1)``, ``rho = min/max`` and
    ``S = (x^d - y^d)/(x - y)`` with ``x = (Z_H-1)/(Z_H Z_C)``,
    ``y = (Z_C-1)/(Z_H Z_C)``.
    """
    d = params.d
    a = _boltzmann(params.E_H, params.beta_H)  # Z_H - 1
    b = _boltzmann(params.E_C, params.beta_C)  # Z_C - 1
    if a == b:
        raise DegenerateGradientError(
            "Z_H == Z_C: no population inversion to drive the ladder "
            f"(beta_H*E_H = beta_C*E_C = {float(params.beta_H) * float(params.E_H)})"
        )
    u, v = max(a, b), min(a, b)
    rho = v / u
    log_zz = math.log((1.0 + a) * (1.0 + b))
    log_S = (d - 1) * math.log(u) + math.log1p(-rho**d) - math.log1p(-rho) - (d - 1) * log_zz
    if log_S > 1e-12:
        raise ConsistencyError(f"column excitation probability exceeds 1 (log S = {log_S})")
    return math.log(u), rho, min(log_S, 0.0)


def _log_f(params):
    d = params.d
    log_u, rho, log_S = _machine_terms(params)
    log_B = _log_bracket(log_S, params.M)
    return (1 - d) * log_u + math.log1p(-rho) - math.log1p(-rho**d) + log_B


def f_coefficient(params: ClockParams) -> float:
    """Coefficient multiplying every machine-driven term of the general profile.

    For ``M = inf`` the closed-form limit
    ``(Z_H - Z_C) / ((Z_H - 1)^d - (Z_C - 1)^d)`` is returned.

    Raises
    ------
    DegenerateGradientError
        If ``Z_H == Z_C``.
    """
    return math.exp(_log_f(params))


def wigner_amp_sq(d, n, gt):
    """Squared rotation amplitude ``binom(d-1, n) cos^(2n)(gt) sin^(2(d-1-n))(gt)``.

    This is ``|d^j_{j, n-j}(2 gt)|^2`` for spin ``j = (d-1)/2``, evaluated in
    the log domain so that ``d`` in the thousands neither overflows the
    binomial nor underflows prematurely.
    """
    if not (0 <= n <= d - 1):
        raise ParameterError(f"n must lie in [0, {d - 1}], got {n}")
    gt = np.asarray(gt, dtype=float)
    out = np.exp(_log_trig_power(gt, 2 * n, 2 * (d - 1 - n)) + _log_binom(d - 1, n))
    return out if out.ndim else float(out)


def _log_trig_power(x, cos_power, sin_power):
    with np.errstate(divide="ignore"):
        out = np.zeros_like(x, dtype=float)
        if cos_power:
            out = out + cos_power * np.log(np.abs(np.cos(x)))
        if sin_power:
            out = out + sin_power * np.log(np.abs(np.sin(x)))
    return out


@dataclass(frozen=True)
class TopLevelProfile:
    """Evaluable top-level probability ``P_top(t)``.

    ``terms`` holds ``(weight, cos_power, sin_power)`` triples in the variable
    ``g t``; ``constant`` is the static part.  Only nonzero weights are kept.
    """

    params: ClockParams
    kind: str
    constant: float
    terms: tuple

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ParameterError(f"unknown profile kind {self.kind!r}")

    @property
    def period(self):
        return math.pi / self.params.g

    @property
    def amplitude(self):
        """Weight of the pure ``sin^(2(d-1))`` term."""
        for w, cp, _ in self.terms:
            if cp == 0:
                return w
        return 0.0

    @property
    def coeffs(self):
        return self.constant, self.terms

    @property
    def is_constant(self):
        return not self.terms

    @property
    def is_single_sine_power(self):
        return self.constant == 0.0 and len(self.terms) == 1 and self.terms[0][1] == 0

    def evaluate(self, t):
        """P_top at time(s) ``t``; returns a float for scalar input."""
        x = self.params.g * np.asarray(t, dtype=float)
        return self._eval_phase(x)

    __call__ = evaluate

    def _eval_phase(self, x):
        x = np.asarray(x, dtype=float)
        # Neumaier-compensated accumulation over terms
        total = np.full(x.shape, float(self.constant))
        comp = np.zeros(x.shape)
        for w, cp, sp in self.terms:
            term = np.exp(math.log(w) + _log_trig_power(x, cp, sp))
            s = total + term
            big = np.abs(total) >= np.abs(term)
            comp += np.where(big, (total - s) + term, (term - s) + total)
            total = s
        out = total + comp
        return out if out.ndim else float(out)

    def cycle_integral(self):
        """Exact ``integral_0^pi P_top(x/g) dx`` via Beta functions."""
        total = [math.pi * self.constant]
        for w, cp, sp in self.terms:
            a, b = (cp + 1) / 2, (sp + 1) / 2
            total.append(w * math.exp(betaln(a, b)))
        return math.fsum(total)


def _terms(items):
    return tuple((float(w), int(cp), int(sp)) for w, cp, sp in items if w > 0)


def _require_two_level(params, name):
    if params.d != 2:
        raise WrongVariantError(f"{name} requires d = 2, got d = {params.d}")


def two_qubit_profile(params: ClockParams) -> TopLevelProfile:
    """Single two-qubit machine on a qubit ladder (d = 2, M = 1)."""
    _require_two_level(params, "two_qubit_profile")
    if params.M != 1:
        raise WrongVariantError(f"two_qubit_profile requires M = 1, got M = {params.M}")
    a = _boltzmann(params.E_H, params.beta_H)
    b = _boltzmann(params.E_C, params.beta_C)
    l = _boltzmann(params.E_L, params.beta_C)
    Z_C, Z_H, Z_L = 1 + b, 1 + a, 1 + l
    denom = Z_C * Z_H * Z_L
    cos_w = b * l / denom
    return TopLevelProfile(
        params,
        "two_qubit",
        constant=l / Z_L - cos_w,
        terms=_terms([(a / denom, 0, 2), (cos_w, 2, 0)]),
    )


def horizontal_profile(params: ClockParams) -> TopLevelProfile:
    """M two-qubit machines on a qubit ladder at arbitrary temperatures."""
    _require_two_level(params, "horizontal_profile")
    M = params.M
    if M == math.inf:
        raise WrongVariantError("horizontal_profile requires finite M")
    a = _boltzmann(params.E_H, params.beta_H)
    b = _boltzmann(params.E_C, params.beta_C)
    l = _boltzmann(params.E_L, params.beta_C)
    Z_C, Z_H, Z_L = 1 + b, 1 + a, 1 + l
    zz = Z_H * Z_C
    # probability that one machine is in |0_C 0_H> or |1_C 1_H> (no swap possible)
    idle = (1 + a * b) / zz
    geom = math.fsum(idle ** (k - 1) for k in range(1, M + 1))
    upper = l / Z_L
    static = upper * (idle**M + geom * a / zz)
    return TopLevelProfile(
        params,
        "horizontal_finite_T",
        constant=static,
        terms=_terms([(geom * a / (zz * Z_L), 0, 2), (geom * upper * b / zz, 2, 0)]),
    )


def _zero_tc_amplitude(params):
    """1 - [1 - ((Z_H-1)/Z_H)^(d-1)]^M."""
    a = _boltzmann(params.E_H, params.beta_H)
    log_x = math.log(a) - math.log1p(a)
    return math.exp(_log_bracket((params.d - 1) * log_x, params.M))


def general_profile(params: ClockParams) -> TopLevelProfile:
    """Horizontally and vertically extended clockwork at arbitrary temperatures.

    At ``beta_C = inf`` this is the single term
    ``{1 - [1 - ((Z_H-1)/Z_H)^(d-1)]^M} sin^(2(d-1))(g t)``.
    """
    d = params.d
    if params.zero_TC:
        return TopLevelProfile(
            params,
            "general_zero_TC",
            constant=0.0,
            terms=_terms([(_zero_tc_amplitude(params), 0, 2 * (d - 1))]),
        )
    log_f = _log_f(params)
    a = _boltzmann(params.E_H, params.beta_H)
    b = _boltzmann(params.E_C, params.beta_C)
    pop = ladder_partition(params).ladder_pop
    log_a, log_b = math.log(a), math.log(b) if b > 0 else -math.inf
    terms = []
    for n in range(d):
        if pop[n] == 0.0:
            continue
        lw = math.log(pop[n]) + (d - 1 - n) * log_a + log_f + float(_log_binom(d - 1, n))
        if n:
            lw += n * log_b
        terms.append((math.exp(lw), 2 * n, 2 * (d - 1 - n)))
    top = pop[d - 1]
    if top > 0:
        log_cf = (d - 1) * log_b + log_f
        constant = top * -math.expm1(log_cf) if log_cf < 0 else top * (1 - math.exp(log_cf))
    else:
        constant = 0.0
    return TopLevelProfile(params, "general_finite_T", constant=constant, terms=_terms(terms))


def baseline_profile(params: ClockParams) -> TopLevelProfile:
    """No clockwork: the ladder thermalized with the hot bath.

    The top-level population ``exp(-beta_H (d-1) E_L) / Z_L(beta_H)`` is
    constant in time.
    """
    pop, _ = _ladder_populations(params.d, params.E_L, params.beta_H)
    return TopLevelProfile(params, "baseline_constant", constant=float(pop[-1]), terms=())


def _evaluate(profile, t):
    return profile.evaluate(t)


def p_top_two_qubit(params: ClockParams, t):
    return _evaluate(two_qubit_profile(params), t)


def p_top_horizontal_finite_T(params: ClockParams, t):
    return _evaluate(horizontal_profile(params), t)


def p_top_general(params: ClockParams, t):
    return _evaluate(general_profile(params), t)


def effective_coupling(params: ClockParams) -> float:
    """Decay rate times the weight of the ``sin^(2(d-1))`` term.

    At ``T_C = 0`` this is ``c {1 - [1 - ((Z_H-1)/Z_H)^(d-1)]^M}``.  For
    ``T_C > 0`` the same definition (``c`` times the n = 0 weight of the
    finite-temperature profile) is used.
    """
    return params.c * general_profile(params).amplitude


@dataclass(frozen=True)
class EnergyAccount:
    """Heat and work per tick for a ladder excitation from bottom to top."""

    Q_in: float
    W: float
    Q_out: float
    eta_th: float


def energy_account(params: ClockParams) -> EnergyAccount:
    steps = params.d - 1
    E_L = params.E_H - params.E_C
    return EnergyAccount(
        Q_in=steps * params.E_H,
        W=steps * E_L,
        Q_out=steps * params.E_C,
        eta_th=E_L / (E_L + params.E_C),
    )
