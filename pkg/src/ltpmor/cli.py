"""Command-line interface.

Subcommands: ``generate`` a seeded test system, ``reduce`` a system file
through the snapshot pipeline, run the full ``experiment``, and ``sweep``
base times.  Exit codes: 0 on success, 2 for configuration errors, 3 for
numerical failures.  The default output directory comes from the
``LTPMOR_OUT`` environment variable when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench, serialization
from .balancing import balance, reduce_model
from .errors import NumericalError
from .gramians import controllability_factor, observability_factor
from .lifting import lifted_impulse_response
from .projection import pod_output_projection


def _default_out() -> str:
    return os.environ.get("LTPMOR_OUT", "ltpmor_out")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltpmor",
        description="Snapshot-based balanced truncation for linear time-periodic systems")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a seeded random periodic system")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, default=30)
    gen.add_argument("--p", type=int, default=1)
    gen.add_argument("--q", type=int, default=30)
    gen.add_argument("--T", type=int, default=5)
    gen.add_argument("--a-bounds", type=float, nargs=2, default=(0.16, 0.96),
                     metavar=("LO", "HI"))
    gen.add_argument("--bc-bounds", type=float, nargs=2, default=(0.0, 1.0),
                     metavar=("LO", "HI"))
    gen.add_argument("--out", default=None, help="output directory")
    gen.set_defaults(func=cmd_generate)

    red = sub.add_parser("reduce", help="reduce a system file by snapshot balancing")
    red.add_argument("--system", required=True, help="system JSON file")
    red.add_argument("--base-time", type=int, default=1)
    red.add_argument("--mc", type=int, default=10, help="controllability snapshot horizon")
    red.add_argument("--mo", type=int, default=10, help="observability snapshot horizon")
    red.add_argument("--order", type=int, required=True, help="reduced order")
    red.add_argument("--rop", type=int, default=None,
                     help="output projection rank (omit for no projection)")
    red.add_argument("--variant", choices=("periodic", "single"), default="periodic")
    red.add_argument("--out", default=None, help="output directory")
    red.set_defaults(func=cmd_reduce)

    exp = sub.add_parser("experiment", help="run the benchmark experiment")
    exp.add_argument("--config", default=None, help="config JSON file")
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--n", type=int, default=None)
    exp.add_argument("--p", type=int, default=None)
    exp.add_argument("--q", type=int, default=None)
    exp.add_argument("--T", type=int, default=None)
    exp.add_argument("--base-time", type=int, default=None)
    exp.add_argument("--mc", type=int, default=None)
    exp.add_argument("--mo", type=int, default=None)
    exp.add_argument("--rop", type=_int_list, default=None,
                     help="comma-separated output projection ranks")
    exp.add_argument("--variants", type=_str_list, default=None)
    exp.add_argument("--modes", type=_str_list, default=None)
    exp.add_argument("--max-order", type=int, default=None)
    exp.add_argument("--grid", type=int, default=None, help="H-infinity grid size")
    exp.add_argument("--out", default=None, help="output directory")
    exp.add_argument("--no-figures", action="store_true")
    exp.set_defaults(func=cmd_experiment)

    swp = sub.add_parser("sweep", help="Hankel spectra at every base time")
    swp.add_argument("--system", default=None, help="system JSON file")
    swp.add_argument("--seed", type=int, default=0)
    swp.add_argument("--n", type=int, default=30)
    swp.add_argument("--p", type=int, default=1)
    swp.add_argument("--q", type=int, default=30)
    swp.add_argument("--T", type=int, default=5)
    swp.add_argument("--mc", type=int, default=10)
    swp.add_argument("--mo", type=int, default=10)
    swp.add_argument("--orders", type=_int_list, default=[1, 2, 5])
    swp.add_argument("--out", default=None, help="output directory")
    swp.set_defaults(func=cmd_sweep)
    return parser


def cmd_generate(args) -> int:
    sys_ = bench.random_system(args.seed, args.n, args.p, args.q, args.T,
                               tuple(args.a_bounds), tuple(args.bc_bounds))
    out = Path(args.out or _default_out())
    out.mkdir(parents=True, exist_ok=True)
    path = out / "system.json"
    serialization.save_system(sys_, path)
    print(f"wrote {path}")
    return 0


def cmd_reduce(args) -> int:
    sys_ = serialization.load_system(args.system)
    j = args.base_time
    out = Path(args.out or _default_out())
    out.mkdir(parents=True, exist_ok=True)
    x = controllability_factor(sys_, j, args.mc)
    proj = None
    if args.rop is not None:
        blocks = lifted_impulse_response(sys_, j, args.mc // sys_.T - 1)
        proj = pod_output_projection(blocks, args.rop, args.variant)
        serialization.save_projection(proj, out / "projection")
    y = observability_factor(sys_, j, args.mo, proj)
    basis = balance(x, y)
    model = reduce_model(sys_, basis, args.order)
    serialization.sigma_to_csv(basis.sigma, out / "sigma.csv")
    serialization.save_doc(serialization.basis_to_doc(basis), out / "basis.json")
    serialization.save_doc(serialization.reduced_model_to_doc(model),
                           out / "reduced_model.json")
    print(f"order {args.order} of numerical rank {basis.rank}; "
          f"leading Hankel value {basis.sigma[0]:.6g}; wrote {out}")
    return 0


def cmd_experiment(args) -> int:
    if args.config is not None:
        try:
            config = bench.ExperimentConfig.from_doc(serialization.load_doc(args.config))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read config {args.config}: {exc}") from exc
    else:
        config = bench.ExperimentConfig()
    config = config.override(
        seed=args.seed, n=args.n, p=args.p, q=args.q, T=args.T,
        base_time=args.base_time, m_c=args.mc, m_o=args.mo,
        output_ranks=tuple(args.rop) if args.rop is not None else None,
        variants=tuple(args.variants) if args.variants is not None else None,
        modes=tuple(args.modes) if args.modes is not None else None,
        max_order=args.max_order, hinf_grid=args.grid,
        out_dir=args.out or _default_out(),
        figures=False if args.no_figures else None)
    report = bench.run_experiment(config)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"experiment done in {report.timings['total']:.1f} s; "
          f"{len(report.curves)} error curves over orders 1..{report.orders[-1]}; "
          f"wrote {config.out_dir}")
    return 0


def cmd_sweep(args) -> int:
    if args.system is not None:
        sys_ = serialization.load_system(args.system)
    else:
        sys_ = bench.random_system(args.seed, args.n, args.p, args.q, args.T)
    result = bench.base_time_sweep(sys_, args.mc, args.mo, args.orders)
    out = Path(args.out or _default_out())
    bench.write_sweep_files(result, out)
    summary = ", ".join(f"r={r}: j={j}" for r, j in result.best.items())
    print(f"best base time per order: {summary}; wrote {out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
