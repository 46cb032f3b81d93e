"""
Top-level profiles of a thermal clockwork
=========================================

A ladder of ``d`` levels is pushed upward by two-qubit machines that sit
between a hot and a cold bath.  The population of the top level, ``P_top``,
is what the clock's tick rate follows.  This script shows how it sharpens as
the ladder grows and checks one profile against exact evolution.
"""

import math

import numpy as np

from qclockwork import ClockParams, p_top_general, p_top_two_qubit
from qclockwork.oracle import build_oracle, evolve_p_top

# One machine per transition, cold bath at zero temperature, hot bath
# infinitely hot.  The smallest clock (d=2) only reaches 1/2.
small = ClockParams(d=2, M=1)
print("two-qubit peak:", p_top_two_qubit(small, math.pi / 2))

# With infinitely many machines every transition is saturated and the
# profile becomes sin^(2(d-1))(g t): a taller ladder means a narrower peak.
x = np.linspace(0, math.pi, 2001)
for d in (2, 5, 20, 100):
    p = ClockParams(d=d)
    profile = p_top_general(p, x)
    above_half = x[profile >= 0.5]
    print(f"d={d:4d}  peak={profile.max():.3f}  width at half height={np.ptp(above_half):.3f}")

# Finite temperatures lower the peak and add a floor.
warm = ClockParams(d=5, M=3, beta_C=2.0, beta_H=0.2)
profile = p_top_general(warm, x)
print(f"warm clock: floor={profile.min():.4f}  peak={profile.max():.4f}")

# The closed form agrees with a dense Hamiltonian evolved exactly.
times = np.linspace(0, 2 * math.pi, 50)
exact = evolve_p_top(build_oracle(ClockParams(d=3, M=2, beta_C=3.0, beta_H=0.1)), times).p_top
closed = p_top_general(ClockParams(d=3, M=2, beta_C=3.0, beta_H=0.1), times)
print("max |closed form - exact evolution| =", float(np.max(np.abs(exact - closed))))
