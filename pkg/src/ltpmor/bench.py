"""Benchmark harness: seeded test systems, H-infinity error curves, sweeps.

Reproduces the validation experiment family: a random diagonal-A
periodic system is reduced by the exact oracle, by plain snapshot
balancing, and by balanced POD with several output-projection ranks and
both projection variants; relative H-infinity error curves are compared
against the Hankel lower bound.  Results go to CSV (one ``r,quantity,mode``
table per kind), a JSON report and, optionally, rendered figures.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .balancing import (balance, exact_balancing_basis, reduce_from_lifted,
                        reduce_model)
from .gramians import controllability_factor, observability_factor
from .lifting import LiftedSystem, lift, lifted_impulse_response
from .projection import pod_output_projection
from .serialization import save_doc, write_csv
from .system import PeriodicSystem

ALL_MODES = ("exact", "snapshot-no-projection", "bpod-periodic", "bpod-single")


def random_system(seed, n: int = 30, p: int = 1, q: int = 30, T: int = 5,
                  a_bounds=(0.16, 0.96), bc_bounds=(0.0, 1.0)) -> PeriodicSystem:
    """Seeded random periodic system with diagonal state matrices.

    ``A(k)`` is diagonal with i.i.d. uniform entries in ``a_bounds``
    (strictly inside the unit interval, which guarantees stability);
    ``B(k)`` and ``C(k)`` have i.i.d. uniform entries in ``bc_bounds``.
    Draws come from ``numpy.random.default_rng(seed)`` (PCG64) in the
    fixed order A, B, C, so a seed pins the system bit-for-bit.
    """
    a_lo, a_hi = a_bounds
    if not (0.0 < a_lo <= a_hi < 1.0):
        raise ValueError(f"a_bounds must satisfy 0 < lo <= hi < 1, got {a_bounds}")
    lo, hi = bc_bounds
    if lo > hi:
        raise ValueError(f"bc_bounds must satisfy lo <= hi, got {bc_bounds}")
    for name, v in (("n", n), ("p", p), ("q", q), ("T", T)):
        if v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v}")
    rng = np.random.default_rng(seed)
    diag = rng.uniform(a_lo, a_hi, (T, n))
    A = np.zeros((T, n, n))
    for k in range(T):
        np.fill_diagonal(A[k], diag[k])
    B = rng.uniform(lo, hi, (T, n, p))
    C = rng.uniform(lo, hi, (T, q, n))
    return PeriodicSystem(A, B, C)


def _peak_gain(evaluator, z):
    h = np.asarray(evaluator(z))
    return np.linalg.svd(h, compute_uv=False)[..., 0]


def hinf_norm(evaluator, grid: int = 1024, refine: bool = True) -> float:
    """Peak gain of a stable discrete transfer matrix over the unit circle.

    ``evaluator`` maps a 1-D array of complex frequencies ``z`` to a stack
    of transfer matrices.  The largest singular value is maximized over a
    uniform ``grid``-point sweep of the circle, then sharpened by a
    golden-section search around the grid maximizer.  Being a sampled
    maximum, the result is a lower estimate of the true H-infinity norm.
    """
    if grid < 64:
        raise ValueError(f"grid must be at least 64 points, got {grid}")
    theta = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    z = np.exp(1j * theta)
    try:
        gains = _peak_gain(evaluator, z)
    except np.linalg.LinAlgError:
        gains = np.full(grid, -np.inf)
        for k in range(grid):
            try:
                gains[k] = _peak_gain(evaluator, z[k:k + 1])[0]
            except np.linalg.LinAlgError:
                warnings.warn(f"near-singular resolvent at grid point {k}; skipped")
    k = int(np.argmax(gains))
    best = float(gains[k])
    if not refine:
        return best
    step = 2.0 * np.pi / grid

    def g(th):
        try:
            return float(_peak_gain(evaluator, np.exp(1j * np.array([th])))[0])
        except np.linalg.LinAlgError:
            return -np.inf

    best = max(best, _golden_max(g, theta[k] - step, theta[k] + step))
    return best


def _golden_max(g, a: float, b: float, iters: int = 50) -> float:
    """Golden-section maximization of a scalar function on [a, b]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    return max(gc, gd)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to run (and rerun, identically) one experiment."""

    seed: int = 0
    n: int = 30
    p: int = 1
    q: int = 30
    T: int = 5
    base_time: int = 1
    m_c: int = 10
    m_o: int = 10
    output_ranks: tuple[int, ...] = (1, 2, 6, 10)
    variants: tuple[str, ...] = ("periodic", "single")
    modes: tuple[str, ...] = ALL_MODES
    max_order: int = 25
    hinf_grid: int = 1024
    a_bounds: tuple[float, float] = (0.16, 0.96)
    bc_bounds: tuple[float, float] = (0.0, 1.0)
    out_dir: str | None = None
    figures: bool = True

    def validate(self) -> list[str]:
        """Raise on inconsistent settings; return non-fatal warnings."""
        for name in ("n", "p", "q", "T", "m_c", "m_o", "max_order"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.hinf_grid < 64:
            raise ValueError("hinf_grid must be at least 64")
        unknown = set(self.modes) - set(ALL_MODES)
        if unknown:
            raise ValueError(f"unknown modes {sorted(unknown)}; choose from {ALL_MODES}")
        if not self.modes:
            raise ValueError("at least one mode is required")
        unknown = set(self.variants) - {"periodic", "single"}
        if unknown:
            raise ValueError(f"unknown variants {sorted(unknown)}")
        bpod = {"bpod-periodic", "bpod-single"} & set(self.modes)
        for mode in sorted(bpod):
            if mode.removeprefix("bpod-") not in self.variants:
                raise ValueError(f"mode {mode} requested but its variant is "
                                 "not in the configured variants")
        if bpod:
            if not self.output_ranks:
                raise ValueError("balanced POD modes need at least one output rank")
            bad = [r for r in self.output_ranks if not 1 <= r <= self.q]
            if bad:
                raise ValueError(f"output ranks {bad} outside [1, {self.q}]")
            if self.m_c < self.T:
                raise ValueError("m_c must cover at least one period for the "
                                 "projection snapshot reuse")
        warn = []
        if self.m_c % self.T or self.m_o % self.T:
            warn.append("m_c/m_o are not multiples of the period; the "
                        "truncation-error bound assumes whole periods")
        return warn

    def to_doc(self) -> dict:
        return {
            "seed": self.seed, "n": self.n, "p": self.p, "q": self.q,
            "T": self.T, "base_time": self.base_time,
            "m_c": self.m_c, "m_o": self.m_o,
            "output_ranks": list(self.output_ranks),
            "variants": list(self.variants),
            "modes": list(self.modes),
            "max_order": self.max_order,
            "hinf_grid": self.hinf_grid,
            "a_bounds": list(self.a_bounds),
            "bc_bounds": list(self.bc_bounds),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config fields {sorted(unknown)}")
        kwargs = dict(doc)
        for name in ("output_ranks", "variants", "modes", "a_bounds", "bc_bounds"):
            if name in kwargs:
                kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)

    def override(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


@dataclass
class ExperimentReport:
    """Hankel spectra, error curves and bookkeeping of one experiment run."""

    config: ExperimentConfig
    orders: list[int]
    hinf_full: float
    hankel: dict[str, list[float]]
    curves: dict[str, list[float]]
    lower_bound: list[float]
    full_order: dict[str, tuple[int, float]]
    simulation_counts: dict
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "config": self.config.to_doc(),
            "orders": self.orders,
            "hinf_full": self.hinf_full,
            "hankel": self.hankel,
            "curves": self.curves,
            "lower_bound": self.lower_bound,
            "full_order": {k: list(v) for k, v in self.full_order.items()},
            "simulation_counts": self.simulation_counts,
            "timings": self.timings,
            "warnings": self.warnings,
        }


def _error_evaluator(full: LiftedSystem, reduced: LiftedSystem):
    def ev(z):
        return full.transfer(z) - reduced.transfer(z)
    return ev


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every configured reduction mode and assemble the report.

    Steps: generate the seeded system, build the snapshot factors (and,
    for balanced POD, the output projections from the reused primal
    snapshots), balance, truncate over a shared order grid, and measure
    relative H-infinity errors against the Hankel lower bound.  Files are
    written when the config names an output directory.
    """
    warn_list = config.validate()
    t_start = time.perf_counter()
    timings = {}
    j = config.base_time

    def step(label, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except Exception as exc:
            raise type(exc)(f"[{label}] {exc}").with_traceback(exc.__traceback__)
        timings[label] = timings.get(label, 0.0) + time.perf_counter() - t0
        return out

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sys_ = step("generate", random_system, config.seed, config.n, config.p,
                    config.q, config.T, config.a_bounds, config.bc_bounds)
        lifted = step("lift", lift, sys_, j)
        exact_basis = step("exact-balancing", exact_balancing_basis, lifted)
        hinf_full = step("hinf-full", hinf_norm, lifted.transfer, config.hinf_grid)

        snapshot_modes = [m for m in config.modes if m != "exact"]
        x_factor = None
        if snapshot_modes:
            x_factor = step("primal-snapshots", controllability_factor,
                            sys_, j, config.m_c)
        blocks = None
        bpod_modes = [m for m in config.modes if m.startswith("bpod")]
        if bpod_modes:
            blocks = step("impulse-blocks", lifted_impulse_response,
                          sys_, j, config.m_c // config.T - 1)

        # label -> (basis, model builder)
        pipelines = {}
        adjoint_counts = {}
        for mode in config.modes:
            if mode == "exact":
                pipelines["exact"] = (
                    exact_basis,
                    lambda r: reduce_from_lifted(lifted, exact_basis, r))
            elif mode == "snapshot-no-projection":
                y = step(mode, observability_factor, sys_, j, config.m_o)
                basis = step(mode, balance, x_factor, y)
                adjoint_counts[mode] = y.n_simulations
                pipelines[mode] = (
                    basis,
                    lambda r, b=basis: reduce_model(sys_, b, r))
            else:
                variant = mode.removeprefix("bpod-")
                for r_op in config.output_ranks:
                    label = f"{mode}-rop{r_op}"
                    proj = step(label, pod_output_projection, blocks, r_op, variant)
                    y = step(label, observability_factor, sys_, j, config.m_o, proj)
                    basis = step(label, balance, x_factor, y)
                    adjoint_counts[label] = y.n_simulations
                    pipelines[label] = (
                        basis,
                        lambda r, b=basis: reduce_model(sys_, b, r))

        grid_max = min([config.max_order] + [b.rank for b, _ in pipelines.values()])
        if grid_max < config.max_order:
            warn_list.append(
                f"order grid clamped to {grid_max} (smallest numerical rank "
                "across modes)")
        orders = list(range(1, grid_max + 1))

        hankel = {}
        curves = {}
        full_order = {}
        for label, (basis, build) in pipelines.items():
            hankel[label] = [float(v) for v in basis.sigma]
            errs = []
            for r in orders:
                model = step(label, build, r)
                err = step(label, hinf_norm,
                           _error_evaluator(lifted, model.as_lifted()),
                           config.hinf_grid)
                errs.append(err / hinf_full)
            curves[label] = errs
            model = step(label, build, basis.rank)
            err = step(label, hinf_norm,
                       _error_evaluator(lifted, model.as_lifted()),
                       config.hinf_grid)
            full_order[label] = (basis.rank, err / hinf_full)

        sigma_exact = exact_basis.sigma
        lower_bound = [float(sigma_exact[r]) / hinf_full if r < sigma_exact.size
                       else 0.0 for r in orders]

    warn_list.extend(sorted({str(w.message) for w in caught}))
    counts = {"primal": x_factor.n_simulations if x_factor is not None else 0,
              "adjoint": adjoint_counts}
    timings["total"] = time.perf_counter() - t_start
    report = ExperimentReport(config=config, orders=orders, hinf_full=hinf_full,
                              hankel=hankel, curves=curves,
                              lower_bound=lower_bound, full_order=full_order,
                              simulation_counts=counts, timings=timings,
                              warnings=warn_list)
    if config.out_dir is not None:
        write_report_files(report, config.out_dir, figures=config.figures)
    return report


def write_report_files(report: ExperimentReport, out_dir, figures: bool = True):
    """Write the report CSVs, the JSON document and (optionally) figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def hankel_rows():
        for label in report.hankel:
            for i, v in enumerate(report.hankel[label]):
                yield i + 1, v, label

    def curve_rows():
        for label in report.curves:
            for r, v in zip(report.orders, report.curves[label]):
                yield r, v, label
        for r, v in zip(report.orders, report.lower_bound):
            yield r, v, "lower-bound"

    write_csv(out / "hankel.csv", ["r", "quantity", "mode"], hankel_rows())
    write_csv(out / "error_curves.csv", ["r", "quantity", "mode"], curve_rows())
    save_doc(report.to_doc(), out / "report.json")
    written = [out / "hankel.csv", out / "error_curves.csv", out / "report.json"]
    if figures:
        from . import plots
        written.extend(plots.render_figures(report, out))
    return written


@dataclass(frozen=True)
class SweepResult:
    """Hankel spectra of the snapshot pipeline at every base time of a period."""

    base_times: tuple[int, ...]
    spectra: tuple
    best: dict[int, int]

    def to_doc(self) -> dict:
        return {
            "base_times": list(self.base_times),
            "spectra": {str(j): [float(v) for v in s]
                        for j, s in zip(self.base_times, self.spectra)},
            "best_base_time_per_order": {str(r): j for r, j in self.best.items()},
        }


def base_time_sweep(sys: PeriodicSystem, m_c: int, m_o: int, orders) -> SweepResult:
    """Snapshot balancing at every base time; tabulates the Hankel spectra.

    For each requested order ``r`` the base time minimizing the first
    neglected Hankel value (the error lower bound at that order) is
    reported.
    """
    spectra = []
    base_times = tuple(range(sys.T))
    for j in base_times:
        x = controllability_factor(sys, j, m_c)
        y = observability_factor(sys, j, m_o)
        spectra.append(balance(x, y).sigma)
    best = {}
    for r in orders:
        if r < 0:
            raise ValueError("orders must be nonnegative")
        neglected = [s[r] if r < s.size else 0.0 for s in spectra]
        best[int(r)] = int(np.argmin(neglected))
    return SweepResult(base_times=base_times, spectra=tuple(spectra), best=best)


def write_sweep_files(result: SweepResult, out_dir):
    """Write the sweep table (CSV) and summary (JSON)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def rows():
        for j, sigma in zip(result.base_times, result.spectra):
            for i, v in enumerate(sigma):
                yield i + 1, v, f"j={j}"

    write_csv(out / "sweep.csv", ["r", "quantity", "mode"], rows())
    save_doc(result.to_doc(), out / "sweep.json")
    return [out / "sweep.csv", out / "sweep.json"]
