"""
Accuracy and resolution versus ladder size
==========================================

A tick is the decay of the top level at rate ``c P_top(t)``.  The accuracy
``N = (t_bar / delta_t)^2`` counts how many ticks pass before the clock is
off by one; the resolution ``R = 1 / t_bar`` is its tick frequency.  A
sharper profile improves accuracy, but a taller ladder also spends longer
between peaks, so both trade off against each other.
"""

from qclockwork import ClockParams, baseline_metrics, clock_metrics, effective_coupling

# Without a clockwork the ladder just thermalizes: ticks are exponential
# and the accuracy is exactly one.
print("baseline N:", baseline_metrics(ClockParams(d=10, c=1e3, beta_H=0.1)).N)

# With infinitely many machines, accuracy first grows with d, then falls once
# the peaks become too narrow for the top level to decay during them.
print("\n     d          N            R")
for d in (2, 10, 100, 1000, 10_000, 100_000):
    m = clock_metrics(ClockParams(d=d, c=1e3))
    print(f"{d:6d}  {m.N:11.4g}  {m.R:11.4g}")

# Fewer machines weaken the effective coupling, so the clock gets worse.
print("\n  M   C_M        N at d=5")
for M in (1, 2, 5, 10, float("inf")):
    p = ClockParams(d=5, M=M, c=1e3)
    print(f"{M!s:>4}  {effective_coupling(p):9.4g}  {clock_metrics(p).N:9.4g}")

# Scaling time leaves the accuracy alone and multiplies the resolution.
a = clock_metrics(ClockParams(d=30, c=100.0, g=1.0))
b = clock_metrics(ClockParams(d=30, c=300.0, g=3.0))
print(f"\nN: {a.N:.12g} vs {b.N:.12g};  R ratio: {b.R / a.R:.12g}")

# Every tick moves d - 1 quanta E_C into the cold bath.
m = clock_metrics(ClockParams(d=30, c=100.0))
print("dissipation rate epsilon =", m.epsilon)
