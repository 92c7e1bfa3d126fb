"""Exact and empirical Gramians of periodic systems.

The exact route solves the discrete Lyapunov equations of the lifted
system (a desk-scale oracle); the empirical route assembles tall
snapshot factors from impulse-response simulations, exploiting
periodicity so that only ``T`` simulations per input (or adjoint input)
channel are needed regardless of the snapshot horizon.  The outer
product of a factor reproduces the truncated Gramian sum exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, ReachabilityError
from .lifting import lift
from .system import PeriodicSystem, adjoint_of, monodromy, require_stable, simulate

#: Relative Frobenius tolerance on the Lyapunov residual of the exact solver.
LYAPUNOV_RESIDUAL_TOL = 1e-12


def solve_lyapunov_smith(a: np.ndarray, rhs: np.ndarray,
                         tol: float = 1e-14, max_iter: int = 100) -> np.ndarray:
    """Solve ``X = A X A^T + Q`` by the squared-Smith (doubling) iteration.

    Accumulates ``X_k = sum_{i<2^k} A^i Q (A^i)^T`` while squaring ``A``
    each step, so convergence is quadratic for spectral radius below 1.
    Stops when the Frobenius norm of the update drops below ``tol``
    relative to the accumulated solution.

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within ``max_iter`` doublings.
    """
    x = np.asarray(rhs, dtype=float).copy()
    ak = np.asarray(a, dtype=float).copy()
    for _ in range(max_iter):
        update = ak @ x @ ak.T
        x += update
        if np.linalg.norm(update) <= tol * np.linalg.norm(x):
            return (x + x.T) / 2.0
        ak = ak @ ak
    raise ConvergenceError(
        f"Smith iteration did not converge within {max_iter} doublings")


@dataclass(frozen=True)
class GramianPair:
    """Controllability and observability Gramians at one base time."""

    W_c: np.ndarray = field(repr=False)
    W_o: np.ndarray = field(repr=False)
    base_time: int
    provenance: str

    def __post_init__(self):
        for w in (self.W_c, self.W_o):
            scale = np.linalg.norm(w)
            if scale and np.linalg.norm(w - w.T) > 1e-12 * scale:
                raise ValueError("Gramian is not symmetric")


def exact_gramians(sys: PeriodicSystem, j: int) -> GramianPair:
    """Gramians at time ``j`` from the lifted Lyapunov equations.

    Solves ``A W_c A^T - W_c + B B^T = 0`` and ``A^T W_o A - W_o + C^T C = 0``
    for the lifted matrices at ``j`` and verifies the residuals.  Desk-scale
    only: the lifted matrices are formed explicitly.
    """
    require_stable(sys)
    lifted = lift(sys, j)
    qc = lifted.B @ lifted.B.T
    qo = lifted.C.T @ lifted.C
    wc = solve_lyapunov_smith(lifted.A, qc)
    wo = solve_lyapunov_smith(lifted.A.T, qo)
    for w, a, q, name in ((wc, lifted.A, qc, "controllability"),
                          (wo, lifted.A.T, qo, "observability")):
        residual = np.linalg.norm(a @ w @ a.T - w + q)
        if residual > LYAPUNOV_RESIDUAL_TOL * max(np.linalg.norm(w), 1e-300):
            raise ConvergenceError(
                f"{name} Lyapunov residual {residual:.3e} exceeds tolerance")
    return GramianPair(W_c=wc, W_o=wo, base_time=j, provenance="exact")


@dataclass(frozen=True)
class SnapshotFactor:
    """Tall matrix of impulse-response snapshots.

    ``matrix @ matrix.T`` equals the truncated Gramian sum of the stated
    kind over ``m`` steps anchored at ``base_time``.  ``channels[c]`` and
    ``offsets[c]`` record which impulse channel and which time offset
    (relative to the base time) produced column ``c``, so downstream
    consumers can reuse snapshots index-exactly.
    """

    matrix: np.ndarray = field(repr=False)
    base_time: int
    m: int
    kind: str
    channels: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    n_simulations: int
    projection_rank: int | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def gramian(self) -> np.ndarray:
        """Empirical Gramian reconstructed from the factor."""
        return self.matrix @ self.matrix.T


def empirical_gramians(x_factor: SnapshotFactor, y_factor: SnapshotFactor) -> GramianPair:
    """Pair up the outer products of a controllability and an observability factor."""
    if x_factor.base_time != y_factor.base_time:
        raise ValueError("factors have different base times")
    return GramianPair(
        W_c=x_factor.gramian(), W_o=y_factor.gramian(),
        base_time=x_factor.base_time,
        provenance=f"empirical(m_c={x_factor.m}, m_o={y_factor.m})")


def controllability_factor(sys: PeriodicSystem, j: int, m_c: int) -> SnapshotFactor:
    """Snapshot factor of the empirical controllability Gramian at time ``j``.

    Column ``order``: input channels outermost; within a channel the
    impulse times run from ``j - m_c`` up to ``j - 1``.  By periodicity
    only ``min(T, m_c) * p`` forward impulse simulations are run, and the
    states at whole-period multiples supply every column.
    """
    if m_c < 1:
        raise ValueError("snapshot horizon m_c must be >= 1")
    require_stable(sys)
    T, n, p = sys.T, sys.n, sys.p
    cols = np.empty((n, m_c * p))
    channels = np.empty(m_c * p, dtype=int)
    offsets = np.empty(m_c * p, dtype=int)
    n_sims = 0
    for d in range(p):
        for b in range(T):
            t_max = (m_c + b) // T
            if t_max < 1:
                continue
            steps = t_max * T
            inputs = np.zeros((steps, p))
            inputs[b, d] = 1.0
            traj = simulate(sys, j, np.zeros(n), inputs)
            n_sims += 1
            for t in range(1, t_max + 1):
                val = m_c + b - t * T
                cols[:, d * m_c + val] = traj.states[t * T]
                channels[d * m_c + val] = d
                offsets[d * m_c + val] = val - m_c
    cols.flags.writeable = False
    return SnapshotFactor(matrix=cols, base_time=j, m=m_c,
                          kind="controllability", channels=channels,
                          offsets=offsets, n_simulations=n_sims)


def observability_factor(sys: PeriodicSystem, j: int, m_o: int,
                         projection=None) -> SnapshotFactor:
    """Snapshot factor of the empirical observability Gramian at time ``j``.

    Runs impulse-response simulations of the adjoint system (projected,
    when an output projection is supplied, so only its rank many channels
    are needed).  Column order: channels outermost; within a channel the
    snapshot times run from ``j + m_o - 1`` down to ``j``.
    """
    if m_o < 1:
        raise ValueError("snapshot horizon m_o must be >= 1")
    require_stable(sys)
    T, n = sys.T, sys.n
    adj = adjoint_of(sys, j, m_o, projection)
    c_out = adj.n_inputs
    cols = np.empty((n, m_o * c_out))
    channels = np.empty(m_o * c_out, dtype=int)
    offsets = np.empty(m_o * c_out, dtype=int)
    n_sims = 0
    for d in range(c_out):
        for o in range(min(T, m_o)):
            inputs = np.zeros((m_o, c_out))
            inputs[o, d] = 1.0
            states = adj.simulate(np.zeros(n), inputs)
            n_sims += 1
            for t in range((m_o - 1 - o) // T + 1):
                val = o + t * T
                cols[:, d * m_o + val] = states[m_o - t * T]
                channels[d * m_o + val] = d
                offsets[d * m_o + val] = m_o - 1 - val
    cols.flags.writeable = False
    return SnapshotFactor(matrix=cols, base_time=j, m=m_o,
                          kind="observability", channels=channels,
                          offsets=offsets, n_simulations=n_sims,
                          projection_rank=None if projection is None else projection.rank)


def lemma1_bound(sys: PeriodicSystem, j: int, l: int) -> float:
    """Relative truncation-error bound for empirical Gramians of horizon ``l*T``.

    Returns the squared spectral norm of the ``l``-th power of the
    monodromy matrix at ``j``; the spectral norm is induced, so it bounds
    the relative 2-norm error of both truncated Gramian sums.
    """
    if l < 0:
        raise ValueError("power l must be >= 0")
    ml = np.linalg.matrix_power(monodromy(sys, j), l)
    return float(np.linalg.norm(ml, 2) ** 2)


def output_energy(sys: PeriodicSystem, j: int, x) -> float:
    """Total output energy of the zero-input response from state ``x`` at ``j``.

    Equals the Gramian quadratic form ``<x, W_o(j) x>``.
    """
    x = np.asarray(x, dtype=float)
    wo = exact_gramians(sys, j).W_o
    return float(x @ wo @ x)


def min_input_energy(sys: PeriodicSystem, j: int, x) -> float:
    """Least input energy that steers the state from rest to ``x`` at time ``j``.

    Equals ``<x, W_c(j)^{-1} x>``.  Raises :class:`ReachabilityError` when
    the controllability Gramian is numerically singular.
    """
    x = np.asarray(x, dtype=float)
    wc = exact_gramians(sys, j).W_c
    eigvals = np.linalg.eigvalsh(wc)
    lo, hi = eigvals[0], eigvals[-1]
    if hi <= 0 or lo <= hi * sys.n * np.finfo(float).eps:
        cond = np.inf if lo <= 0 else hi / lo
        raise ReachabilityError(
            f"controllability Gramian is numerically singular "
            f"(condition number {cond:.3e}); state not reachable")
    sol = scipy.linalg.cho_solve(scipy.linalg.cho_factor(wc), x)
    return float(x @ sol)
