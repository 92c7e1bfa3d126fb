"""Lifting a T-periodic system to a constant (LTI) system per period.

Anchored at a base time ``j``, the lifted system advances the state one
full period at a time while stacking the period's inputs and outputs,
so standard LTI machinery (Lyapunov equations, transfer functions)
applies.  Large-scale workflows never form the lifted matrices; the
impulse-response blocks are therefore always generated by periodic
simulation, and the explicit matrices exist for desk-scale oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .system import PeriodicSystem, simulate, transition


@dataclass(frozen=True)
class LiftedSystem:
    """Constant matrices of the lifted system at base time ``j``.

    ``A`` is the monodromy matrix (state dim ``n``), ``B`` maps a stacked
    period of inputs (``T*p``), ``C`` emits a stacked period of outputs
    (``T*q``), and ``D`` is the strictly block-lower-triangular intra-period
    feedthrough.
    """

    j: int
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    T: int
    p: int
    q: int

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def markov(self, t: int) -> np.ndarray:
        """Impulse-response matrix at lifted time ``t``: D for t=0, else C A^(t-1) B."""
        if t < 0:
            raise ValueError("lifted time must be nonnegative")
        if t == 0:
            return self.D.copy()
        return self.C @ np.linalg.matrix_power(self.A, t - 1) @ self.B

    def simulate(self, x0, inputs) -> tuple[np.ndarray, np.ndarray]:
        """Advance the lifted recursion; returns (states, outputs) as rows."""
        inputs = np.asarray(inputs, dtype=float)
        s = inputs.shape[0]
        states = np.empty((s + 1, self.n))
        outputs = np.empty((s, self.T * self.q))
        x = np.asarray(x0, dtype=float)
        for t in range(s):
            states[t] = x
            outputs[t] = self.C @ x + self.D @ inputs[t]
            x = self.A @ x + self.B @ inputs[t]
        states[s] = x
        return states, outputs

    def transfer(self, z) -> np.ndarray:
        """Transfer matrix ``C (zI - A)^-1 B + D``.

        ``z`` may be a scalar or a 1-D array; the array form returns a
        stack of matrices and is the fast path for frequency sweeps.
        """
        z = np.asarray(z, dtype=complex)
        eye = np.eye(self.n)
        if z.ndim == 0:
            return self.C @ np.linalg.solve(z * eye - self.A, self.B) + self.D
        resolvent = np.linalg.solve(z[:, None, None] * eye - self.A,
                                    np.broadcast_to(self.B, (z.size, *self.B.shape)))
        return self.C @ resolvent + self.D


def feedthrough_blocks(sys: PeriodicSystem, j: int) -> np.ndarray:
    """Intra-period feedthrough blocks of the lifted system at time ``j``.

    Returns a ``(T, T, q, p)`` array whose ``(i, k)`` entry (0-based) is
    ``C(j+i) F(j+i, j+k+1) B(j+k)`` for ``i > k`` and zero otherwise: the
    response at step ``i`` of the period to an impulse at step ``k``.
    """
    T, q, p = sys.T, sys.q, sys.p
    blocks = np.zeros((T, T, q, p))
    for k in range(T - 1):
        x = sys.B_at(j + k)
        for i in range(k + 1, T):
            blocks[i, k] = sys.C_at(j + i) @ x
            if i < T - 1:
                x = sys.A_at(j + i) @ x
    return blocks


def lift(sys: PeriodicSystem, j: int) -> LiftedSystem:
    """Build the lifted system of ``sys`` at base time ``j``."""
    T, n, p, q = sys.T, sys.n, sys.p, sys.q
    A = transition(sys, j + T, j)
    B = np.hstack([transition(sys, j + T, j + k + 1) @ sys.B_at(j + k)
                   for k in range(T)])
    C = np.vstack([sys.C_at(j + i) @ transition(sys, j + i, j)
                   for i in range(T)])
    D = np.zeros((T * q, T * p))
    ft = feedthrough_blocks(sys, j)
    for i in range(T):
        for k in range(i):
            D[i * q:(i + 1) * q, k * p:(k + 1) * p] = ft[i, k]
    for m in (A, B, C, D):
        m.flags.writeable = False
    return LiftedSystem(j=j, A=A, B=B, C=C, D=D, T=T, p=p, q=q)


@dataclass(frozen=True)
class ImpulseResponseBlocks:
    """Per-step impulse-response matrices of the periodic system.

    ``blocks[t, i]`` is the ``q x (T*p)`` response at time ``j + t*T + i``
    to the unit impulses applied during the period ``[j, j+T-1]``: its
    column ``b*p + c`` is the output for an impulse at time ``j+b`` on
    input channel ``c``.  Stacking ``blocks[t, 0], ..., blocks[t, T-1]``
    reproduces the lifted impulse-response matrix at lifted time ``t``.
    """

    j: int
    horizon: int
    blocks: np.ndarray = field(repr=False)

    @property
    def T(self) -> int:
        return self.blocks.shape[1]

    @property
    def q(self) -> int:
        return self.blocks.shape[2]

    def stacked(self, t: int) -> np.ndarray:
        """Lifted impulse-response matrix at lifted time ``t``."""
        return self.blocks[t].reshape(-1, self.blocks.shape[3])

    def offset_snapshots(self, i: int) -> np.ndarray:
        """All responses at period offset ``i`` side by side, ``t = 0..horizon``."""
        return np.hstack(list(self.blocks[:, i]))

    def rows(self):
        """Yield ``(t, i, output_index, input_index, value)`` tuples (CSV layout)."""
        s1, T, q, tp = self.blocks.shape
        for t in range(s1):
            for i in range(T):
                for r in range(q):
                    for c in range(tp):
                        yield t, i, r, c, self.blocks[t, i, r, c]


def lifted_impulse_response(sys: PeriodicSystem, j: int, horizon: int) -> ImpulseResponseBlocks:
    """Impulse-response blocks for lifted times ``0..horizon``, by simulation.

    Runs one periodic impulse simulation per lifted input channel
    (``T*p`` in total) and reads the outputs; the lifted matrices are
    never formed.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    T, n, p, q = sys.T, sys.n, sys.p, sys.q
    steps = (horizon + 1) * T - 1
    blocks = np.zeros((horizon + 1, T, q, T * p))
    for b in range(T):
        if b >= steps:
            continue  # impulse past every recorded output: response is zero
        for c in range(p):
            inputs = np.zeros((steps, p))
            inputs[b, c] = 1.0
            traj = simulate(sys, j, np.zeros(n), inputs)
            col = traj.outputs[:steps + 1].reshape(horizon + 1, T, q)
            blocks[:, :, :, b * p + c] = col
    blocks.flags.writeable = False
    return ImpulseResponseBlocks(j=j, horizon=horizon, blocks=blocks)
