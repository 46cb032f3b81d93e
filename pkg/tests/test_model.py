import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qclockwork.errors import DegenerateGradientError, ParameterError, WrongVariantError
from qclockwork.model import (
    ClockParams,
    baseline_profile,
    effective_coupling,
    energy_account,
    f_coefficient,
    general_profile,
    horizontal_profile,
    ladder_partition,
    p_top_general,
    p_top_horizontal_finite_T,
    p_top_two_qubit,
    qubit_partition,
    two_qubit_profile,
    wigner_amp_sq,
)
from oracles import rotation_amp_sq

# Frozen values; see tests/derive_frozen.py for how each was produced.
TWO_QUBIT_BC1_BH025_GT1 = 0.37993418074200874
HORIZONTAL_M2_BC2_BH015_GT07 = 0.32722360853752674
GENERAL_D3_M1_BC3_BH01_GT11 = 0.11276532438652723
F_ZC11_ZH19_D3_M2 = Fraction(782620000, 1908029761)


def finite_t_params(draw_d=st.integers(2, 12), draw_M=st.integers(1, 12)):
    @st.composite
    def build(draw):
        E_C = draw(st.floats(0.2, 3.0))
        E_H = E_C + draw(st.floats(0.1, 4.0))
        bcec = draw(st.floats(0.05, 8.0))
        bheh = draw(st.floats(0.0, 0.95)) * bcec
        return ClockParams(
            d=draw(draw_d),
            M=draw(draw_M),
            g=draw(st.floats(0.1, 10.0)),
            c=draw(st.floats(0.1, 1e4)),
            beta_C=bcec / E_C,
            beta_H=bheh / E_H,
            E_C=E_C,
            E_H=E_H,
        )

    return build()


# ClockParams


def test_params_defaults_are_zero_temperature():
    p = ClockParams(d=3)
    assert p.M == math.inf and p.beta_C == math.inf and p.beta_H == 0.0
    assert p.E_L == pytest.approx(1.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"d": 1},
        {"d": 2.5},
        {"d": 3, "M": 0},
        {"d": 3, "M": 1.5},
        {"d": 3, "g": 0.0},
        {"d": 3, "c": -1.0},
        {"d": 3, "E_C": 2.0, "E_H": 2.0},
        {"d": 3, "beta_C": 1.0, "beta_H": 1.0},
        {"d": 3, "beta_C": 0.5, "beta_H": 1.0},
        {"d": 3, "beta_H": -0.1},
        {"d": 3, "c": float("nan")},
    ],
)
def test_params_rejects_invalid(kwargs):
    with pytest.raises(ParameterError):
        ClockParams(**kwargs)


def test_params_accept_symbolic_infinity():
    p = ClockParams(d=3, M="inf", beta_C="inf")
    assert p.M == math.inf and p.beta_C == math.inf


# partition functions


def test_qubit_partition_limits():
    assert qubit_partition(1.0, 0.0) == 2.0
    assert qubit_partition(1.0, math.inf) == 1.0
    assert qubit_partition(2.0, 0.5) == pytest.approx(1.36787944117144232, rel=1e-15)


def test_qubit_partition_rejects_negative_beta():
    with pytest.raises(ParameterError):
        qubit_partition(1.0, -1.0)


def test_ladder_partition_cases():
    ps = ladder_partition(ClockParams(d=3))
    assert ps.Z_L == 1.0 and list(ps.ladder_pop) == [1.0, 0.0, 0.0]
    # beta_C * E_L = 0 is impossible with beta_C > beta_H >= 0, so approach it
    ps = ladder_partition(ClockParams(d=2, beta_C=1e-300, beta_H=0.0))
    assert ps.Z_L == pytest.approx(2.0) and np.allclose(ps.ladder_pop, [0.5, 0.5])
    ps = ladder_partition(ClockParams(d=2, beta_C=1.0, E_C=1.0, E_H=2.0))
    np.testing.assert_allclose(
        ps.ladder_pop, [0.731058578630004879, 0.268941421369995121], rtol=1e-15
    )


@given(finite_t_params())
def test_partition_invariants(p):
    ps = ladder_partition(p)
    assert 1.0 < ps.Z_C <= 2.0 and 1.0 < ps.Z_H <= 2.0
    assert abs(ps.ladder_pop.sum() - 1.0) <= 1e-12
    n = np.arange(p.d)
    np.testing.assert_allclose(ps.ladder_pop, np.exp(-n * p.beta_C * p.E_L) / ps.Z_L, rtol=1e-12)


# closed-form profiles


def test_two_qubit_peak_is_one_half(zero_t):
    p = ClockParams(d=2, M=1, **zero_t)
    assert p_top_two_qubit(p, math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    assert p_top_two_qubit(p, 0.0) == 0.0


def test_two_qubit_frozen_value():
    p = ClockParams(d=2, M=1, beta_C=1.0, beta_H=0.25)
    assert p_top_two_qubit(p, 1.0) == pytest.approx(TWO_QUBIT_BC1_BH025_GT1, abs=1e-12)


def test_two_qubit_zero_tc_reduction():
    p = ClockParams(d=2, M=1, beta_H=0.3)
    Z_H = qubit_partition(p.E_H, p.beta_H)
    t = np.linspace(0, 4, 41)
    np.testing.assert_allclose(p_top_two_qubit(p, t), (1 - 1 / Z_H) * np.sin(t) ** 2, atol=1e-15)


@pytest.mark.parametrize("d, M", [(3, 1), (2, 2)])
def test_two_qubit_wrong_variant(d, M):
    with pytest.raises(WrongVariantError):
        p_top_two_qubit(ClockParams(d=d, M=M), 0.1)


def test_horizontal_zero_tc_peak():
    p = ClockParams(d=2, M=3)
    assert p_top_horizontal_finite_T(p, math.pi / 2) == pytest.approx(0.875, abs=1e-15)


def test_horizontal_frozen_value():
    p = ClockParams(d=2, M=2, beta_C=2.0, beta_H=0.15)
    assert p_top_horizontal_finite_T(p, 0.7) == pytest.approx(HORIZONTAL_M2_BC2_BH015_GT07, abs=1e-12)


def test_horizontal_wrong_variant():
    with pytest.raises(WrongVariantError):
        p_top_horizontal_finite_T(ClockParams(d=3, M=2), 0.1)
    with pytest.raises(WrongVariantError):
        horizontal_profile(ClockParams(d=2))


def test_horizontal_matches_two_qubit_at_start():
    p = ClockParams(d=2, M=1, beta_C=1.3, beta_H=0.2)
    assert p_top_horizontal_finite_T(p, 0.0) == pytest.approx(p_top_two_qubit(p, 0.0), abs=1e-15)


def test_general_frozen_value():
    p = ClockParams(d=3, M=1, beta_C=3.0, beta_H=0.1)
    assert p_top_general(p, 1.1) == pytest.approx(GENERAL_D3_M1_BC3_BH01_GT11, abs=1e-12)


def test_general_zero_tc_is_pure_sine_power():
    p = ClockParams(d=6, M=4, beta_H=0.7)
    prof = general_profile(p)
    assert prof.kind == "general_zero_TC" and prof.is_single_sine_power
    Z_H = qubit_partition(p.E_H, p.beta_H)
    amp = 1 - (1 - ((Z_H - 1) / Z_H) ** 5) ** 4
    t = np.linspace(0, 3, 31)
    np.testing.assert_allclose(p_top_general(p, t), amp * np.sin(t) ** 10, rtol=5e-14, atol=1e-300)


def test_general_peak_is_one_at_infinite_M(zero_t):
    for d in (2, 5, 40, 1000):
        assert p_top_general(ClockParams(d=d, **zero_t), math.pi / 2) == 1.0


@given(finite_t_params())
def test_general_starts_at_thermal_top_population(p):
    assert p_top_general(p, 0.0) == pytest.approx(ladder_partition(p).ladder_pop[-1], abs=1e-14)


@given(finite_t_params(), st.floats(0.0, 50.0))
def test_general_profile_bounded_and_periodic(p, t):
    v = p_top_general(p, t)
    assert -1e-14 <= v <= 1 + 1e-14
    assert abs(p_top_general(p, t + math.pi / p.g) - v) <= 1e-13


@given(finite_t_params(draw_d=st.just(2), draw_M=st.just(1)), st.floats(0, 2 * math.pi))
def test_general_equals_two_qubit(p, gt):
    t = gt / p.g
    assert abs(p_top_general(p, t) - p_top_two_qubit(p, t)) <= 1e-12


@given(finite_t_params(draw_d=st.just(2)), st.floats(0, 2 * math.pi))
def test_general_equals_horizontal(p, gt):
    t = gt / p.g
    assert abs(p_top_general(p, t) - p_top_horizontal_finite_T(p, t)) <= 1e-12


def test_profile_coefficients_reassemble_evaluation():
    p = ClockParams(d=4, M=3, beta_C=1.5, beta_H=0.2)
    prof = general_profile(p)
    x = np.linspace(0, 3, 13)
    direct = prof.constant + sum(w * np.cos(x) ** cp * np.sin(x) ** sp for w, cp, sp in prof.terms)
    np.testing.assert_allclose(prof.evaluate(x), direct, atol=1e-15)
    assert prof.period == pytest.approx(math.pi)
    assert prof.amplitude == prof.terms[0][0]


def test_baseline_profile_is_constant():
    p = ClockParams(d=3, beta_C=5.0, beta_H=0.5, E_C=1.0, E_H=3.0)
    prof = baseline_profile(p)
    assert prof.is_constant and prof.kind == "baseline_constant"
    expected = math.exp(-0.5 * 2 * 2.0) / sum(math.exp(-0.5 * n * 2.0) for n in range(3))
    assert prof.evaluate(0.37) == pytest.approx(expected, rel=1e-15)


# f coefficient


def test_f_coefficient_matches_exact_rationals():
    # Z_C = 1.1 and Z_H = 1.9 exactly in the Boltzmann factors
    p = ClockParams(d=3, M=2, beta_C=math.log(10.0), beta_H=-math.log(0.9) / 2.0)
    assert f_coefficient(p) == pytest.approx(float(F_ZC11_ZH19_D3_M2), rel=1e-13)


def test_f_coefficient_infinite_M_limit():
    p = ClockParams(d=5, beta_C=2.0, beta_H=0.3)
    a, b = math.exp(-0.3 * 2.0), math.exp(-2.0)
    Z_H, Z_C = 1 + a, 1 + b
    expected = (Z_H - Z_C) / ((Z_H - 1) ** 5 - (Z_C - 1) ** 5)
    assert f_coefficient(p) == pytest.approx(expected, rel=1e-13)


def test_f_coefficient_zero_tc():
    p = ClockParams(d=4, M=3, beta_H=0.4)
    a = math.exp(-0.4 * 2.0)
    Z_H = 1 + a
    expected = (1 - (1 - (a / Z_H) ** 3) ** 3) / a**3
    assert f_coefficient(p) == pytest.approx(expected, rel=1e-13)


def test_f_coefficient_degenerate_gradient():
    # beta_C E_C = beta_H E_H makes Z_C == Z_H
    p = ClockParams(d=3, beta_C=2.0, beta_H=1.0, E_C=1.0, E_H=2.0)
    with pytest.raises(DegenerateGradientError):
        f_coefficient(p)


def test_f_coefficient_large_M_approaches_limit():
    base = ClockParams(d=3, beta_C=2.0, beta_H=0.1)
    assert f_coefficient(base.replace(M=10_000)) == pytest.approx(f_coefficient(base), rel=1e-12)


# Wigner amplitudes


def test_wigner_examples():
    assert wigner_amp_sq(2, 0, math.pi / 2) == 1.0
    assert wigner_amp_sq(5, 2, 0.6) == pytest.approx(6 * math.cos(0.6) ** 4 * math.sin(0.6) ** 4, rel=1e-14)


@pytest.mark.parametrize("d, n, gt", [(5, 2, 0.6), (4, 0, 1.2), (6, 5, 0.3), (3, 1, 2.0)])
def test_wigner_matches_rotation_matrix(d, n, gt):
    assert wigner_amp_sq(d, n, gt) == pytest.approx(rotation_amp_sq(d, n, gt), abs=1e-13)


def test_wigner_out_of_range():
    with pytest.raises(ParameterError):
        wigner_amp_sq(3, 3, 0.1)


@given(st.integers(2, 200), st.floats(0.0, 2 * math.pi))
def test_wigner_normalization(d, gt):
    total = math.fsum(wigner_amp_sq(d, n, gt) for n in range(d))
    assert abs(total - 1.0) <= 1e-12


# effective coupling


def test_effective_coupling_examples():
    assert effective_coupling(ClockParams(d=7, c=10.0)) == 10.0
    assert effective_coupling(ClockParams(d=2, M=1, c=10.0)) == pytest.approx(5.0, rel=1e-15)
    assert effective_coupling(ClockParams(d=2, M=3, c=10.0)) == pytest.approx(8.75, rel=1e-15)


@given(st.integers(2, 30), st.floats(0.0, 3.0))
def test_effective_coupling_monotone(d, beta_H):
    values = [effective_coupling(ClockParams(d=d, M=M, beta_H=beta_H)) for M in range(1, 65)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    # higher ladders shrink the amplitude at fixed M
    if d < 30:
        assert effective_coupling(ClockParams(d=d + 1, M=3, beta_H=beta_H)) <= values[2]


def test_effective_coupling_finite_t_uses_leading_weight():
    p = ClockParams(d=4, M=2, beta_C=2.0, beta_H=0.3)
    assert effective_coupling(p) == pytest.approx(p.c * general_profile(p).amplitude, rel=1e-15)


def test_stable_against_large_d_and_M():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        v = p_top_general(ClockParams(d=5000, M=10**6, beta_C=4.0, beta_H=0.5), np.linspace(0, 3, 7))
    assert np.all(np.isfinite(v))


# energy accounting


def test_energy_account_examples():
    e = energy_account(ClockParams(d=2, E_C=1.0, E_H=3.0))
    assert (e.Q_in, e.W, e.Q_out) == (3.0, 2.0, 1.0) and e.eta_th == pytest.approx(2 / 3)
    e = energy_account(ClockParams(d=5, E_C=1.0, E_H=2.0))
    assert (e.Q_in, e.W, e.Q_out, e.eta_th) == (8.0, 4.0, 4.0, 0.5)


def test_energy_account_exact_with_rationals():
    p = ClockParams(d=7, E_C=Fraction(1, 3), E_H=Fraction(22, 7))
    e = energy_account(p)
    assert e.Q_in == e.W + e.Q_out
    assert isinstance(e.Q_in, Fraction)


def test_efficiency_approaches_one():
    etas = [energy_account(ClockParams(d=3, E_C=1.0, E_H=1.0 + L)).eta_th for L in (1, 10, 1e3, 1e6)]
    assert all(0 < a < b < 1 for a, b in zip(etas, etas[1:]))
    assert etas[-1] > 1 - 1e-5
