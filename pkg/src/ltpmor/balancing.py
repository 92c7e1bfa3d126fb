"""Balancing transformations and reduced-order periodic models.

The snapshot route computes balancing modes from one SVD of the cross
product of the observability and controllability factors, never forming
an ``n x n`` Gramian; it balances the empirical Gramians exactly.  The
classical square-root route on the lifted system's exact Gramians is
kept as a desk-scale oracle.  A reduced model advances one period per
step in the balanced coordinates and un-lifts its output equation back
to per-step periodic outputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import StabilityError
from .gramians import SnapshotFactor, solve_lyapunov_smith
from .lifting import LiftedSystem, feedthrough_blocks
from .system import STABILITY_MARGIN, PeriodicSystem

#: Singular values below ``rank_tol * sigma_1`` are treated as zero.
DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True)
class BalancedBasis:
    """Bi-orthogonal balancing modes and Hankel singular values.

    ``Psi.T @ Phi`` is the identity on the retained subspace; the columns
    are ordered by descending Hankel singular value, so the basis for a
    smaller order is a prefix of this one.
    """

    Phi: np.ndarray = field(repr=False)
    Psi: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    rank: int
    rank_tol: float
    base_time: int


def _truncated_svd(m: np.ndarray, rank_tol: float, what: str):
    u, sv, vt = np.linalg.svd(m, full_matrices=False)
    if sv.size == 0 or sv[0] <= 0.0:
        raise ValueError(f"{what} is numerically zero; no balancing basis exists")
    a = int(np.sum(sv > rank_tol * sv[0]))
    return u[:, :a], sv[:a], vt[:a].T


def balance(x_factor: SnapshotFactor, y_factor: SnapshotFactor,
            rank_tol: float = DEFAULT_RANK_TOL) -> BalancedBasis:
    """Balancing modes from snapshot factors (method of snapshots).

    One SVD of ``Y^T X`` yields the Hankel singular values; the direct
    and adjoint modes are recombinations of the snapshot columns.  Only
    singular values above ``rank_tol`` relative to the largest are kept.
    """
    if x_factor.base_time != y_factor.base_time:
        raise ValueError("factors have different base times")
    if x_factor.n != y_factor.n:
        raise ValueError("factors have different state dimensions")
    u, sv, v = _truncated_svd(y_factor.matrix.T @ x_factor.matrix, rank_tol,
                              "cross product of snapshot factors")
    scale = 1.0 / np.sqrt(sv)
    phi = x_factor.matrix @ (v * scale)
    psi = y_factor.matrix @ (u * scale)
    return BalancedBasis(Phi=phi, Psi=psi, sigma=sv, rank=sv.size,
                         rank_tol=rank_tol, base_time=x_factor.base_time)


def _psd_sqrt_factor(w: np.ndarray) -> np.ndarray:
    """Factor L with ``W = L L^T`` for a PSD matrix (Cholesky, eigh fallback)."""
    try:
        return np.linalg.cholesky(w)
    except np.linalg.LinAlgError:
        lam, vec = np.linalg.eigh(w)
        lam = np.clip(lam, 0.0, None)
        return vec * np.sqrt(lam)


def exact_balancing_basis(lifted: LiftedSystem,
                          rank_tol: float = DEFAULT_RANK_TOL) -> BalancedBasis:
    """Classical square-root balancing of the lifted system's exact Gramians."""
    rho = float(np.max(np.abs(np.linalg.eigvals(lifted.A))))
    if rho >= 1.0 - STABILITY_MARGIN:
        raise StabilityError(
            f"lifted spectral radius {rho:.6g} is not safely below 1")
    wc = solve_lyapunov_smith(lifted.A, lifted.B @ lifted.B.T)
    wo = solve_lyapunov_smith(lifted.A.T, lifted.C.T @ lifted.C)
    lc = _psd_sqrt_factor(wc)
    lo = _psd_sqrt_factor(wo)
    u, sv, v = _truncated_svd(lo.T @ lc, rank_tol, "Gramian square-root product")
    scale = 1.0 / np.sqrt(sv)
    phi = lc @ (v * scale)
    psi = lo @ (u * scale)
    return BalancedBasis(Phi=phi, Psi=psi, sigma=sv, rank=sv.size,
                         rank_tol=rank_tol, base_time=lifted.j)


@dataclass(frozen=True)
class ReducedModel:
    """Order-``r`` reduced model in the lifted state, periodic output form.

    One step of ``(A, B)`` advances a full period on the stacked period
    inputs; outputs are emitted per original time step through the
    ``C_out`` readout rows plus the intra-period feedthrough blocks
    ``D_blocks`` (which the reduction leaves untouched).
    """

    order: int
    base_time: int
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    C_out: np.ndarray = field(repr=False)
    D_blocks: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    T: int
    p: int
    q: int

    def as_lifted(self) -> LiftedSystem:
        """The reduced model packaged as a lifted LTI system."""
        T, q, p = self.T, self.q, self.p
        c = self.C_out.reshape(T * q, self.order)
        d = np.zeros((T * q, T * p))
        for i in range(T):
            for k in range(i):
                d[i * q:(i + 1) * q, k * p:(k + 1) * p] = self.D_blocks[i, k]
        return LiftedSystem(j=self.base_time, A=self.A, B=self.B, C=c, D=d,
                            T=T, p=p, q=q)


def _check_order(basis: BalancedBasis, r: int):
    if not 1 <= r <= basis.rank:
        raise ValueError(f"order r={r} out of range [1, {basis.rank}]")
    if r < basis.rank and basis.sigma[r - 1] - basis.sigma[r] < 1e-10 * basis.sigma[0]:
        warnings.warn(f"Hankel values {r} and {r + 1} are nearly equal; "
                      "the truncated subspace is not unique")


def reduce_model(sys: PeriodicSystem, basis: BalancedBasis, r: int) -> ReducedModel:
    """Order-``r`` truncation of ``sys`` in the balancing basis.

    All reduced matrices are obtained by propagating basis columns (or
    impulses) through one period of the original dynamics and projecting,
    so the lifted matrices are never formed.
    """
    _check_order(basis, r)
    T, p, q = sys.T, sys.p, sys.q
    j = basis.base_time
    phi1 = basis.Phi[:, :r]
    psi1 = basis.Psi[:, :r]

    c_out = np.empty((T, q, r))
    x = phi1
    c_out[0] = sys.C_at(j) @ x
    for i in range(1, T):
        x = sys.A_at(j + i - 1) @ x
        c_out[i] = sys.C_at(j + i) @ x
    a_r = psi1.T @ (sys.A_at(j + T - 1) @ x)

    b_r = np.empty((r, T * p))
    for b in range(T):
        x = sys.B_at(j + b)
        for s in range(b + 1, T):
            x = sys.A_at(j + s) @ x
        b_r[:, b * p:(b + 1) * p] = psi1.T @ x

    return ReducedModel(order=r, base_time=j, A=a_r, B=b_r, C_out=c_out,
                        D_blocks=feedthrough_blocks(sys, j),
                        sigma=basis.sigma.copy(), T=T, p=p, q=q)


def reduce_from_lifted(lifted: LiftedSystem, basis: BalancedBasis, r: int) -> ReducedModel:
    """Order-``r`` truncation built from explicit lifted matrices (oracle path)."""
    _check_order(basis, r)
    T, p, q = lifted.T, lifted.p, lifted.q
    phi1 = basis.Phi[:, :r]
    psi1 = basis.Psi[:, :r]
    c_out = (lifted.C @ phi1).reshape(T, q, r)
    d_blocks = np.zeros((T, T, q, p))
    for i in range(T):
        for k in range(i):
            d_blocks[i, k] = lifted.D[i * q:(i + 1) * q, k * p:(k + 1) * p]
    return ReducedModel(order=r, base_time=lifted.j,
                        A=psi1.T @ lifted.A @ phi1, B=psi1.T @ lifted.B,
                        C_out=c_out, D_blocks=d_blocks,
                        sigma=basis.sigma.copy(), T=T, p=p, q=q)


def exact_balanced_truncation(lifted: LiftedSystem, r: int,
                              rank_tol: float = DEFAULT_RANK_TOL):
    """Classical balanced truncation of a lifted system (desk-scale oracle).

    Returns the full balancing basis (whose ``sigma`` are the exact
    Hankel singular values) together with the order-``r`` reduced model.
    """
    basis = exact_balancing_basis(lifted, rank_tol)
    return basis, reduce_from_lifted(lifted, basis, r)


def simulate_reduced(model: ReducedModel, inputs, steps: int) -> np.ndarray:
    """Per-step outputs of the reduced model under the given inputs.

    ``inputs`` must cover at least ``steps`` rows; the reduced state is
    advanced once per period while outputs are emitted at every original
    time step.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != model.p:
        raise ValueError(f"inputs must be (m, {model.p}), got {inputs.shape}")
    if inputs.shape[0] < steps:
        raise ValueError(f"need at least {steps} input rows, got {inputs.shape[0]}")
    T = model.T
    n_periods = -(-steps // T)
    padded = np.zeros((n_periods * T, model.p))
    m_use = min(inputs.shape[0], n_periods * T)
    padded[:m_use] = inputs[:m_use]
    outputs = np.empty((steps, model.q))
    z = np.zeros(model.order)
    for t in range(n_periods):
        chunk = padded[t * T:(t + 1) * T]
        for i in range(T):
            idx = t * T + i
            if idx >= steps:
                break
            y = model.C_out[i] @ z
            for k in range(i):
                y = y + model.D_blocks[i, k] @ chunk[k]
            outputs[idx] = y
        z = model.A @ z + model.B @ chunk.reshape(-1)
    return outputs
