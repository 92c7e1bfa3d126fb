"""File formats: JSON-shaped structured documents and CSV tables.

Systems, factors, projections, bases and reduced models all serialize
to JSON documents whose matrices are row-major nested arrays of decimal
floats (full round-trip precision); bulk numeric data additionally goes
to CSV.  All writers are deterministic: identical objects produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .system import PeriodicSystem


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows) -> None:
    """Write rows of numbers/strings as CSV with full float precision."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_matrix_csv(path, matrix) -> None:
    """Dense matrix as headerless CSV rows."""
    matrix = np.atleast_2d(np.asarray(matrix))
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def save_doc(doc: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_doc(path) -> dict:
    with Path(path).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def system_to_doc(sys: PeriodicSystem) -> dict:
    """Structured document with the system's dimensions and matrices."""
    return {
        "T": sys.T, "n": sys.n, "p": sys.p, "q": sys.q,
        "A": [m.tolist() for m in sys.A],
        "B": [m.tolist() for m in sys.B],
        "C": [m.tolist() for m in sys.C],
    }


def system_from_doc(doc: dict) -> PeriodicSystem:
    try:
        sys = PeriodicSystem(doc["A"], doc["B"], doc["C"])
    except KeyError as exc:
        raise ValueError(f"system document is missing field {exc}") from exc
    for name in ("T", "n", "p", "q"):
        if name in doc and doc[name] != getattr(sys, name):
            raise ValueError(
                f"system document field {name}={doc[name]} contradicts "
                f"matrix shapes ({name}={getattr(sys, name)})")
    return sys


def save_system(sys: PeriodicSystem, path) -> None:
    save_doc(system_to_doc(sys), path)


def load_system(path) -> PeriodicSystem:
    return system_from_doc(load_doc(path))


def blocks_to_csv(blocks, path) -> None:
    """Impulse-response blocks as (t, i, output_index, input_index, value) rows."""
    write_csv(path, ["t", "i", "output_index", "input_index", "value"],
              blocks.rows())


def factor_to_doc(factor) -> dict:
    return {
        "kind": factor.kind,
        "base_time": factor.base_time,
        "m": factor.m,
        "n": factor.n,
        "columns": factor.matrix.shape[1],
        "channels": factor.channels.tolist(),
        "offsets": factor.offsets.tolist(),
        "n_simulations": factor.n_simulations,
        "projection_rank": factor.projection_rank,
    }


def save_factor(factor, base_path) -> None:
    """Factor matrix as dense CSV plus a JSON metadata side-car."""
    base = Path(base_path)
    write_matrix_csv(base.with_suffix(".csv"), factor.matrix)
    save_doc(factor_to_doc(factor), base.with_suffix(".json"))


def save_gramians(pair, base_path) -> None:
    base = Path(base_path)
    write_matrix_csv(base.parent / (base.name + "_wc.csv"), pair.W_c)
    write_matrix_csv(base.parent / (base.name + "_wo.csv"), pair.W_o)
    save_doc({"base_time": pair.base_time, "provenance": pair.provenance,
              "n": pair.W_c.shape[0]}, base.with_suffix(".json"))


def projection_to_doc(proj) -> dict:
    return {
        "variant": proj.variant,
        "side": proj.side,
        "base_time": proj.base_time,
        "period": proj.period,
        "rank": proj.rank,
        "dim": proj.dim,
        "energy_fractions": proj.energy_fractions.tolist(),
        "gaps": proj.gaps.tolist(),
        "notes": list(proj.notes),
    }


def save_projection(proj, base_path) -> None:
    """Per-step bases and spectra as CSV plus a JSON metadata side-car."""
    base = Path(base_path)

    def basis_rows():
        for s in range(proj.bases.shape[0]):
            for r in range(proj.bases.shape[1]):
                for c in range(proj.bases.shape[2]):
                    yield s, r, c, proj.bases[s, r, c]

    def spectra_rows():
        for s in range(proj.eigenvalues.shape[0]):
            for i in range(proj.eigenvalues.shape[1]):
                yield s, i, proj.eigenvalues[s, i]

    write_csv(base.parent / (base.name + "_bases.csv"),
              ["step", "row", "col", "value"], basis_rows())
    write_csv(base.parent / (base.name + "_spectra.csv"),
              ["step", "index", "eigenvalue"], spectra_rows())
    save_doc(projection_to_doc(proj), base.with_suffix(".json"))


def sigma_to_csv(sigma, path) -> None:
    """Hankel singular values as (index, value) rows, 1-based index."""
    write_csv(path, ["index", "value"],
              ((i + 1, v) for i, v in enumerate(np.asarray(sigma))))


def basis_to_doc(basis) -> dict:
    return {
        "rank": basis.rank,
        "rank_tol": basis.rank_tol,
        "base_time": basis.base_time,
        "sigma": basis.sigma.tolist(),
        "Phi": basis.Phi.tolist(),
        "Psi": basis.Psi.tolist(),
    }


def reduced_model_to_doc(model) -> dict:
    return {
        "order": model.order,
        "base_time": model.base_time,
        "T": model.T, "p": model.p, "q": model.q,
        "A": model.A.tolist(),
        "B": model.B.tolist(),
        "C_out": model.C_out.tolist(),
        "D_blocks": model.D_blocks.tolist(),
        "sigma": model.sigma.tolist(),
    }
