"""POD projections of the output (or, by duality, input) space.

High-dimensional output spaces make the observability snapshot campaign
intractable, so the output is first compressed by an orthogonal
projection chosen to preserve the impulse-response energy: per period
step a rank ``r`` projector onto the leading left-singular subspace of
that step's impulse-response snapshots, or a single shared projector
pooled over the period.  The same machinery applied to the
time-reversed transposed system compresses the input space instead.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .lifting import ImpulseResponseBlocks, lifted_impulse_response
from .system import PeriodicSystem

#: Below this spectral gap at the truncation cut the retained subspace is
#: not unique and a warning is recorded.
GAP_WARN = 1e-10


@dataclass(frozen=True)
class PodProjection:
    """T-periodic orthonormal bases spanning a POD subspace.

    ``bases`` holds one ``dim x rank`` matrix per period step for the
    ``"periodic"`` variant and a single shared matrix for ``"single"``.
    ``eigenvalues`` are the correlation-matrix spectra the bases were cut
    from (zero-padded to ``dim``), ``energy_fractions`` the captured
    fraction of snapshot energy per period step.
    """

    variant: str
    side: str
    base_time: int
    period: int
    rank: int
    bases: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    energy_fractions: np.ndarray = field(repr=False)
    gaps: np.ndarray = field(repr=False)
    notes: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.bases.shape[1]

    def basis_at(self, k: int) -> np.ndarray:
        """Basis matrix at absolute time ``k`` (cyclic)."""
        if self.variant == "single":
            return self.bases[0]
        return self.bases[(k - self.base_time) % self.period]

    def projector_at(self, k: int) -> np.ndarray:
        theta = self.basis_at(k)
        return theta @ theta.T

    @classmethod
    def identity(cls, dim: int, period: int, base_time: int = 0,
                 side: str = "output") -> "PodProjection":
        """Full-rank projection with identity bases (projects onto everything)."""
        return cls(variant="periodic", side=side, base_time=base_time,
                   period=period, rank=dim,
                   bases=np.broadcast_to(np.eye(dim), (period, dim, dim)).copy(),
                   eigenvalues=np.zeros((period, dim)),
                   energy_fractions=np.ones(period),
                   gaps=np.zeros(period))


def _fix_signs(u: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry positive (deterministic output)."""
    u = u.copy()
    for c in range(u.shape[1]):
        i = int(np.argmax(np.abs(u[:, c])))
        if u[i, c] < 0:
            u[:, c] = -u[:, c]
    return u


def _pod_basis(snapshots: np.ndarray, rank: int):
    """Leading left-singular basis of a snapshot matrix, completed if needed.

    Returns ``(basis, eigenvalues, gap, note)`` where the eigenvalues are
    squared singular values zero-padded to the snapshot row dimension.
    When the requested rank exceeds the snapshot column count the basis is
    completed to an orthonormal set (the extra directions carry no
    snapshot energy), which keeps a full-rank request an exact identity
    projector.
    """
    dim = snapshots.shape[0]
    full = rank > min(snapshots.shape)
    u, sv, _ = np.linalg.svd(snapshots, full_matrices=full)
    eigenvalues = np.zeros(dim)
    eigenvalues[:sv.size] = sv ** 2
    note = None
    tol = max(snapshots.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
    numerical_rank = int(np.sum(sv > tol))
    if rank > numerical_rank:
        note = (f"requested rank {rank} exceeds snapshot rank {numerical_rank}; "
                "trailing directions are an orthonormal completion")
    basis = _fix_signs(u[:, :rank])
    gap = eigenvalues[rank - 1] - (eigenvalues[rank] if rank < dim else 0.0)
    return basis, eigenvalues, gap, note


def pod_output_projection(blocks: ImpulseResponseBlocks, rank: int,
                          variant: str = "periodic") -> PodProjection:
    """Rank-``rank`` output projection from impulse-response snapshots.

    ``"periodic"`` solves one POD problem per period step (the snapshots
    at that step across all recorded periods); ``"single"`` pools every
    step into one POD problem and shares the basis.  Either way the
    bases are computed by the method of snapshots: an SVD of the snapshot
    matrix, never an eigendecomposition of the correlation matrix.
    """
    T, q = blocks.T, blocks.q
    if not 1 <= rank <= q:
        raise ValueError(f"rank must be in [1, {q}], got {rank}")
    if variant not in ("periodic", "single"):
        raise ValueError(f"unknown variant {variant!r}")
    notes = []
    if variant == "periodic":
        bases = np.empty((T, q, rank))
        eigenvalues = np.empty((T, q))
        gaps = np.empty(T)
        for i in range(T):
            bases[i], eigenvalues[i], gaps[i], note = _pod_basis(
                blocks.offset_snapshots(i), rank)
            if note:
                notes.append(f"step {i}: {note}")
    else:
        pooled = np.hstack([blocks.offset_snapshots(i) for i in range(T)])
        basis, eigs, gap, note = _pod_basis(pooled, rank)
        bases = basis[None]
        eigenvalues = eigs[None]
        gaps = np.array([gap])
        if note:
            notes.append(note)
    for g in gaps:
        if g < GAP_WARN:
            warnings.warn("spectral gap at the projection cut is below "
                          f"{GAP_WARN:g}; the subspace is not unique")
            notes.append(f"gap {g:.3e} below {GAP_WARN:g}: projection not unique")
            break
    energy = np.empty(T)
    for i in range(T):
        s = blocks.offset_snapshots(i)
        total = np.sum(s * s)
        theta = bases[0] if variant == "single" else bases[i]
        energy[i] = np.sum((theta.T @ s) ** 2) / total if total > 0 else 1.0
    bases.flags.writeable = False
    return PodProjection(variant=variant, side="output",
                         base_time=blocks.j, period=T, rank=rank,
                         bases=bases, eigenvalues=eigenvalues,
                         energy_fractions=energy, gaps=gaps,
                         notes=tuple(notes))


@dataclass(frozen=True)
class ProjectionObjective:
    """Frobenius impulse-response error of a projection, totalled and per step."""

    total: float
    per_offset: np.ndarray
    lifted_total: float


def projection_objective(blocks: ImpulseResponseBlocks,
                         proj: PodProjection) -> ProjectionObjective:
    """Residual energy ``sum_t ||G - P G||_F^2`` of a projection.

    ``per_offset[i]`` sums over recorded periods at period step ``i``;
    ``total`` is their sum.  ``lifted_total`` evaluates the same objective
    on the stacked (lifted) impulse-response matrices against the
    block-diagonal projector, which must agree with ``total``.
    """
    T = blocks.T
    if proj.dim != blocks.q:
        raise ValueError("projection dimension does not match output dimension")
    per_offset = np.empty(T)
    for i in range(T):
        s = blocks.offset_snapshots(i)
        theta = proj.basis_at(blocks.j + i)
        resid = s - theta @ (theta.T @ s)
        per_offset[i] = np.sum(resid * resid)
    ptilde = scipy.linalg.block_diag(
        *[proj.projector_at(blocks.j + i) for i in range(T)])
    lifted_total = 0.0
    for t in range(blocks.horizon + 1):
        g = blocks.stacked(t)
        resid = g - ptilde @ g
        lifted_total += float(np.sum(resid * resid))
    return ProjectionObjective(total=float(np.sum(per_offset)),
                               per_offset=per_offset,
                               lifted_total=lifted_total)


def reversed_transposed_system(sys: PeriodicSystem, j: int) -> PeriodicSystem:
    """Time-reversed transposed system, reflected about the base time ``j``.

    Its matrices are ``A(2j-1-k)^T`` with the input and output roles of
    ``B`` and ``C`` swapped; its impulse responses are transposes of the
    original system's, which turns input-side questions into output-side
    ones.
    """
    T = sys.T
    ref = 2 * j - 1
    A = np.stack([sys.A_at(ref - k).T for k in range(T)])
    B = np.stack([sys.C_at(ref - k).T for k in range(T)])
    C = np.stack([sys.B_at(ref - k).T for k in range(T)])
    return PeriodicSystem(A, B, C)


def dual_input_projection(sys: PeriodicSystem, j: int, rank: int,
                          horizon: int, variant: str = "periodic") -> PodProjection:
    """Rank-``rank`` input projection via the output machinery on the dual.

    Runs the POD output projection on the time-reversed transposed
    system and maps the resulting bases back onto input phases, yielding
    ``T``-periodic matrices that compress ``B(k)`` from ``p`` to ``rank``
    columns.
    """
    dual = reversed_transposed_system(sys, j)
    blocks = lifted_impulse_response(dual, j, horizon)
    dproj = pod_output_projection(blocks, rank, variant)
    T = sys.T
    if dproj.variant == "single":
        bases = dproj.bases
        eigenvalues = dproj.eigenvalues
        gaps = dproj.gaps
        energy = dproj.energy_fractions
    else:
        # dual output step i' answers for primal input phase (T-1-i') mod T
        perm = [(T - 1 - b) % T for b in range(T)]
        bases = dproj.bases[perm]
        eigenvalues = dproj.eigenvalues[perm]
        gaps = dproj.gaps[perm]
        energy = dproj.energy_fractions[perm]
    return PodProjection(variant=dproj.variant, side="input",
                         base_time=j, period=T, rank=rank,
                         bases=bases, eigenvalues=eigenvalues,
                         energy_fractions=energy, gaps=gaps,
                         notes=dproj.notes)


def apply_input_projection(sys: PeriodicSystem, proj: PodProjection) -> PeriodicSystem:
    """System with inputs compressed through the projection bases.

    Replaces ``B(k)`` by ``B(k) Theta(k)``, shrinking the input dimension
    to the projection rank; the snapshot campaign on the result needs
    only that many simulations per period step.
    """
    if proj.side != "input":
        raise ValueError("projection does not act on the input space")
    if proj.period != sys.T:
        raise ValueError("projection period does not match system period")
    if proj.dim != sys.p:
        raise ValueError("projection dimension does not match input dimension")
    B = np.stack([sys.B[k] @ proj.basis_at(k) for k in range(sys.T)])
    return PeriodicSystem(sys.A, B, sys.C)
