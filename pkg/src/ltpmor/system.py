"""Discrete-time linear time-periodic systems and their simulation.

A system is a triple of T-periodic real matrices (A(k), B(k), C(k))
driving the recursion

    x(k+1) = A(k) x(k) + B(k) u(k),      y(k) = C(k) x(k).

All public operations accept absolute integer times and reduce them
modulo the period internally, so there is no distinguished "first"
phase.  State-transition products, forward simulation and the
time-reversed transposed (adjoint) system used for observability
snapshots live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StabilityError

#: Systems with monodromy spectral radius above ``1 - STABILITY_MARGIN`` are
#: rejected by operations that sum an infinite series.
STABILITY_MARGIN = 1e-8


def _freeze(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class PeriodicSystem:
    """A T-periodic discrete-time linear system.

    Parameters
    ----------
    A : array_like, shape (T, n, n)
        State matrices, one per phase of the period.
    B : array_like, shape (T, n, p)
        Input matrices.
    C : array_like, shape (T, q, n)
        Output matrices.

    Matrices are indexed cyclically: ``A(k)`` for an absolute time ``k``
    is ``A[k % T]``.  Instances are immutable and safe to share across
    threads; the monodromy spectral radius is computed once on first use.
    """

    def __init__(self, A, B, C):
        A, B, C = _freeze(A), _freeze(B), _freeze(C)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise ValueError(f"A must be (T, n, n), got {A.shape}")
        T, n = A.shape[0], A.shape[1]
        if B.ndim != 3 or B.shape[0] != T or B.shape[1] != n:
            raise ValueError(f"B must be ({T}, {n}, p), got {B.shape}")
        if C.ndim != 3 or C.shape[0] != T or C.shape[2] != n:
            raise ValueError(f"C must be ({T}, q, {n}), got {C.shape}")
        if T < 1:
            raise ValueError("period must be a positive integer")
        self.A = A
        self.B = B
        self.C = C
        self.T = T
        self.n = n
        self.p = B.shape[2]
        self.q = C.shape[1]
        self._rho = None

    def A_at(self, k: int) -> np.ndarray:
        return self.A[k % self.T]

    def B_at(self, k: int) -> np.ndarray:
        return self.B[k % self.T]

    def C_at(self, k: int) -> np.ndarray:
        return self.C[k % self.T]

    @property
    def dims(self) -> tuple[int, int, int]:
        """State, input and output dimensions ``(n, p, q)``."""
        return self.n, self.p, self.q

    def spectral_radius(self) -> float:
        """Spectral radius of the monodromy matrix (cached; phase independent)."""
        if self._rho is None:
            self._rho = monodromy_spectral_radius(self, 0)
        return self._rho

    def __repr__(self):
        return (f"PeriodicSystem(T={self.T}, n={self.n}, "
                f"p={self.p}, q={self.q})")


@dataclass(frozen=True)
class Trajectory:
    """States and outputs of a simulation started at time ``j0``.

    ``states[k]`` is the state at time ``j0 + k`` (so ``states`` has one
    more row than there are input steps) and ``outputs[k] = C(j0+k) states[k]``.
    """

    j0: int
    states: np.ndarray
    outputs: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.j0 + np.arange(self.states.shape[0])


def transition(sys: PeriodicSystem, j_end: int, j_start: int) -> np.ndarray:
    """State-transition matrix of the zero-input dynamics.

    Returns the product ``A(j_end-1) @ ... @ A(j_start)`` that maps the
    state at ``j_start`` to the state at ``j_end``; the empty product
    (``j_end == j_start``) is the identity.

    Raises
    ------
    ValueError
        If ``j_end < j_start``.
    """
    if j_end < j_start:
        raise ValueError(f"j_end={j_end} must be >= j_start={j_start}")
    f = np.eye(sys.n)
    for k in range(j_start, j_end):
        f = sys.A_at(k) @ f
    return f


def monodromy(sys: PeriodicSystem, j: int) -> np.ndarray:
    """One-period transition matrix anchored at time ``j``."""
    return transition(sys, j + sys.T, j)


def monodromy_spectral_radius(sys: PeriodicSystem, j: int) -> float:
    """Spectral radius of the one-period transition matrix at time ``j``.

    The nonzero part of the spectrum, and hence the radius, is the same
    for every anchor time; a value below 1 means asymptotic stability.
    """
    return float(np.max(np.abs(np.linalg.eigvals(monodromy(sys, j)))))


def require_stable(sys: PeriodicSystem) -> None:
    """Gate for operations that sum infinite series over the dynamics."""
    rho = sys.spectral_radius()
    if rho >= 1.0 - STABILITY_MARGIN:
        raise StabilityError(
            f"monodromy spectral radius {rho:.6g} is not safely below 1; "
            "Gramian series do not converge")


def simulate(sys: PeriodicSystem, j0: int, x0, inputs) -> Trajectory:
    """Run the state recursion from ``x(j0) = x0`` under the given inputs.

    Parameters
    ----------
    sys : PeriodicSystem
    j0 : int
        Absolute start time.
    x0 : array_like, shape (n,)
        Initial state.
    inputs : array_like, shape (m, p)
        Input vectors ``u(j0), ..., u(j0+m-1)``.

    Returns
    -------
    Trajectory
        With ``m+1`` states ``x(j0), ..., x(j0+m)`` and the matching outputs.
    """
    x0 = np.asarray(x0, dtype=float)
    inputs = np.asarray(inputs, dtype=float)
    if inputs.size == 0:
        inputs = inputs.reshape(0, sys.p)
    if x0.shape != (sys.n,):
        raise ValueError(f"x0 must have shape ({sys.n},), got {x0.shape}")
    if inputs.ndim != 2 or inputs.shape[1] != sys.p:
        raise ValueError(f"inputs must be (m, {sys.p}), got {inputs.shape}")
    m = inputs.shape[0]
    states = np.empty((m + 1, sys.n))
    outputs = np.empty((m + 1, sys.q))
    x = x0
    for k in range(m):
        states[k] = x
        outputs[k] = sys.C_at(j0 + k) @ x
        x = sys.A_at(j0 + k) @ x + sys.B_at(j0 + k) @ inputs[k]
    states[m] = x
    outputs[m] = sys.C_at(j0 + m) @ x
    states.flags.writeable = False
    outputs.flags.writeable = False
    return Trajectory(j0=j0, states=states, outputs=outputs)


@dataclass(frozen=True)
class AdjointSystem:
    """Time-reversed transposed system on the finite horizon ``[j, j+m)``.

    Its matrices are ``Ahat(k) = A(2j+m-k-1)^T`` and
    ``Chat(k) = C(2j+m-k-1)^T`` (optionally post-multiplied by an output
    projection basis at the same reflected time), stored with index
    ``k - j``.  Impulse responses of this system generate observability
    snapshots of the original one.
    """

    j: int
    m: int
    Ahat: np.ndarray = field(repr=False)
    Chat: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.Ahat.shape[1]

    @property
    def n_inputs(self) -> int:
        return self.Chat.shape[2]

    def simulate(self, z0, inputs) -> np.ndarray:
        """Advance ``z(k+1) = Ahat(k) z(k) + Chat(k) v(k)`` from ``z(j) = z0``.

        ``inputs`` holds ``v(j), ..., v(j+m-1)``; returns the ``m+1``
        states ``z(j), ..., z(j+m)`` as rows.
        """
        z0 = np.asarray(z0, dtype=float)
        inputs = np.asarray(inputs, dtype=float)
        if inputs.shape != (self.m, self.n_inputs):
            raise ValueError(
                f"inputs must have shape ({self.m}, {self.n_inputs}), "
                f"got {inputs.shape}")
        states = np.empty((self.m + 1, self.n))
        z = z0
        for k in range(self.m):
            states[k] = z
            z = self.Ahat[k] @ z + self.Chat[k] @ inputs[k]
        states[self.m] = z
        return states


def adjoint_of(sys: PeriodicSystem, j: int, m: int, projection=None) -> AdjointSystem:
    """Build the adjoint system of horizon ``m`` anchored at time ``j``.

    With an output projection, the input matrices become
    ``C(2j+m-k-1)^T Theta(2j+m-k-1)`` so that only as many impulse
    channels as the projection rank are needed.

    Raises
    ------
    ValueError
        If ``m < 1`` or the projection's period does not match the system's.
    """
    if m < 1:
        raise ValueError("adjoint horizon m must be >= 1")
    if projection is not None and projection.period != sys.T:
        raise ValueError(
            f"projection period {projection.period} does not match "
            f"system period {sys.T}")
    Ahat = np.empty((m, sys.n, sys.n))
    c_in = sys.q if projection is None else projection.rank
    Chat = np.empty((m, sys.n, c_in))
    for k in range(j, j + m):
        t = 2 * j + m - k - 1
        Ahat[k - j] = sys.A_at(t).T
        ct = sys.C_at(t).T
        if projection is not None:
            ct = ct @ projection.basis_at(t)
        Chat[k - j] = ct
    Ahat.flags.writeable = False
    Chat.flags.writeable = False
    return AdjointSystem(j=j, m=m, Ahat=Ahat, Chat=Chat)
