"""Brute-force quantum evolution of small clockworks.

The full Hilbert space is the ladder tensored with ``M`` machine columns,
each column holding ``d - 1`` cold/hot qubit pairs (one per ladder
transition).  Basis ordering, slowest index first:

* ladder level ``0 .. d-1``
* machine column ``k = 1 .. M``
* transition ``j = 1 .. d-1`` within a column
* pair state ``2 * cold + hot``, i.e. ``00, 01, 10, 11``

The dimension is ``d * 4**(M*(d-1))``.  Column ``k`` drives the ladder from
``n-1`` to ``n`` while its ``n``-th pair swaps ``|0_C 1_H>`` into
``|1_C 0_H>``; it acts only while every later column is outside the set of
"staircase" states ``|n_M>`` (first ``n`` pairs swapped, the rest not).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, OracleSizeError
from .model import ClockParams, ladder_partition

__all__ = [
    "OracleSystem",
    "EvolutionResult",
    "MAX_ORACLE_DIM",
    "oracle_dim",
    "build_oracle",
    "column_hamiltonians",
    "evolve_p_top",
    "dump_oracle",
]

MAX_ORACLE_DIM = 4096


def oracle_dim(d, M):
    return d * 4 ** (M * (d - 1))


@dataclass(frozen=True)
class OracleSystem:
    """Dense representation of the clockwork Hilbert space.

    Attributes
    ----------
    dim : int
    basis : tuple
        ``(ladder_level, columns)`` per basis state, where ``columns`` is a
        tuple of ``M`` tuples of ``(cold, hot)`` occupations.
    H_int : ndarray, complex, shape (dim, dim)
    H0_diag : ndarray, shape (dim,)
    init_weights : ndarray, shape (dim,)
    """

    params: ClockParams
    dim: int
    basis: tuple
    H_int: np.ndarray
    H0_diag: np.ndarray
    init_weights: np.ndarray

    @property
    def top_mask(self):
        block = self.dim // self.params.d
        mask = np.zeros(self.dim, dtype=bool)
        mask[(self.params.d - 1) * block :] = True
        return mask


@dataclass(frozen=True)
class EvolutionResult:
    times: np.ndarray
    p_top: np.ndarray


def _staircase(n, pairs):
    """Column index of |n_M>: first n pairs in |1_C 0_H>, the rest in |0_C 1_H>."""
    idx = 0
    for j in range(pairs):
        idx = idx * 4 + (2 if j < n else 1)
    return idx


def _pair_weights(params):
    parts = ladder_partition(params)
    p_cold = 1.0 - 1.0 / parts.Z_C
    p_hot = 1.0 - 1.0 / parts.Z_H
    return np.array(
        [
            (1 - p_cold) * (1 - p_hot),
            (1 - p_cold) * p_hot,
            p_cold * (1 - p_hot),
            p_cold * p_hot,
        ]
    )


def _column_hamiltonians(params):
    """Per-column interaction terms ``H_k``, k = 1..M, as dense matrices."""
    d, M, g = params.d, params.M, params.g
    pairs = d - 1
    ncol = 4**pairs
    dim = oracle_dim(d, M)
    stairs = [_staircase(n, pairs) for n in range(d)]
    later = [c for c in range(ncol) if c not in set(stairs)]

    def flat(level, cols):
        idx = level
        for col in cols:
            idx = idx * ncol + col
        return idx

    terms = []
    for k in range(M):
        H = np.zeros((dim, dim), dtype=complex)
        for level in range(d - 1):
            n = level + 1
            amp = g * math.sqrt(n * (d - n))
            # earlier columns free, later columns off the staircase
            for before in itertools.product(range(ncol), repeat=k):
                for after in itertools.product(later, repeat=M - k - 1):
                    lo = flat(level, before + (stairs[level],) + after)
                    hi = flat(level + 1, before + (stairs[level + 1],) + after)
                    # J = i g sum sqrt(n(d-n)) (|up><down| - |down><up|)
                    H[hi, lo] += 1j * amp
                    H[lo, hi] -= 1j * amp
        terms.append(H)
    return terms


def column_hamiltonians(params: ClockParams):
    """The individual terms whose sum is ``H_int`` (one per machine column)."""
    dim = oracle_dim(params.d, params.M) if params.M != math.inf else math.inf
    if dim > MAX_ORACLE_DIM:
        raise OracleSizeError(dim, MAX_ORACLE_DIM)
    return _column_hamiltonians(params)


def build_oracle(params: ClockParams) -> OracleSystem:
    """Assemble the interaction Hamiltonian and thermal initial weights.

    Raises
    ------
    OracleSizeError
        If ``d * 4**(M*(d-1))`` exceeds :data:`MAX_ORACLE_DIM`.
    """
    d, M = params.d, params.M
    dim = oracle_dim(d, M) if M != math.inf else math.inf
    if dim > MAX_ORACLE_DIM:
        raise OracleSizeError(dim, MAX_ORACLE_DIM)
    pairs = d - 1
    block = 4 ** (pairs * M)
    H = sum(_column_hamiltonians(params))
    E_L = params.E_H - params.E_C
    pair_energy = np.array([0.0, params.E_H, params.E_C, params.E_C + params.E_H])
    col_energy = np.zeros(1)
    col_w = np.ones(1)
    pw = _pair_weights(params)
    for _ in range(pairs):
        col_energy = np.add.outer(col_energy, pair_energy).ravel()
        col_w = np.kron(col_w, pw)
    machines_energy = np.zeros(1)
    machines_w = np.ones(1)
    for _ in range(M):
        machines_energy = np.add.outer(machines_energy, col_energy).ravel()
        machines_w = np.kron(machines_w, col_w)
    H0 = np.add.outer(E_L * np.arange(d), machines_energy).ravel()
    weights = np.kron(ladder_partition(params).ladder_pop, machines_w)

    pair_labels = [(c, h) for c in (0, 1) for h in (0, 1)]
    col_labels = list(itertools.product(pair_labels, repeat=pairs))
    basis = tuple(
        (level, cols)
        for level in range(d)
        for cols in itertools.product(col_labels, repeat=M)
    )
    assert len(basis) == dim == d * block
    return OracleSystem(params, dim, basis, H, H0, weights)


def evolve_p_top(system: OracleSystem, times) -> EvolutionResult:
    """Top-level population under ``exp(-i H_int t)``.

    ``H0`` commutes with ``H_int`` and the initial state is diagonal in the
    ``H0`` eigenbasis, so the free part only contributes phases that cancel
    in populations.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    try:
        evals, V = np.linalg.eigh(system.H_int)
    except np.linalg.LinAlgError as exc:
        raise ConsistencyError(f"eigendecomposition failed: {exc}") from exc
    support = system.init_weights > 0
    w = system.init_weights[support]
    V_top = V[system.top_mask]
    V_src = V[support].conj().T
    out = np.empty(times.size)
    for i, t in enumerate(times):
        U = (V_top * np.exp(-1j * evals * t)) @ V_src
        out[i] = np.einsum("sb,b->", np.abs(U) ** 2, w)
    return EvolutionResult(times=times, p_top=out)


def _label(state):
    level, cols = state
    body = "|".join("".join(f"{c}{h}" for c, h in col) for col in cols)
    return f"L{level}:{body}"


def dump_oracle(system: OracleSystem, fh):
    """Write basis labels and nonzero ``H_int`` entries as text.

    Lines starting with ``#`` list basis labels; each remaining line is
    ``row col real imag``.
    """
    fh.write(f"# dim={system.dim}\n")
    for i, state in enumerate(system.basis):
        fh.write(f"# basis {i} {_label(state)}\n")
    rows, cols = np.nonzero(system.H_int)
    for r, c in zip(rows, cols):
        z = system.H_int[r, c]
        fh.write(f"{r} {c} {z.real:.17e} {z.imag:.17e}\n")
