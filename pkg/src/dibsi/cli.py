"""Command line front end for reproducible experiments.

Every subcommand writes its outputs plus a run manifest capturing the
resolved flags, the master seed and the library version, so any output
file can be regenerated from its manifest alone.  Exit codes: 0 on
success, 1 on validation errors, 2 on numerical failures.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

import dibsi
from dibsi._seeds import derive_seed
from dibsi.basis import DomainInformedBasis, coherence_factor, riesz_bounds
from dibsi.bench import monte_carlo
from dibsi.domains import load_domain, realize_domain, save_domain
from dibsi.image import load_atlas, load_image, save_image, upsample_separable
from dibsi.interpolation import (
    SampleSequence,
    SingularSystemError,
    SolverResidualError,
    interpolate_bsi,
    interpolate_dibsi,
)

_COHERENCE_PATH = 3


class _CliError(Exception):
    """Invalid invocation or input; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fmt(value):
    return f"{value:.17g}"


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(
                _fmt(v) if isinstance(v, float) else str(v) for v in row
            ) + "\n")
    return path


def _parse_ints(text):
    """Integer list syntax: '1,3,5' or '1..7'."""
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def _parse_floats(text):
    """Float list syntax: '0.5,1.0', '0.1:0.1:1' or '1..50'."""
    if ":" in text:
        start, step, stop = (float(tok) for tok in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    if ".." in text:
        a, b = text.split("..")
        return [float(v) for v in range(int(a), int(b) + 1)]
    return [float(tok) for tok in text.split(",") if tok]


def _default_threads():
    return int(os.environ.get("DIBSI_THREADS", "1"))


def _load_samples(path):
    with open(path) as fh:
        first = fh.readline()
    skip = 0 if first and first.lstrip()[:1] in "0123456789+-." else 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    if data.shape[1] != 2:
        raise _CliError(f"samples CSV must have two columns, got {data.shape[1]}")
    ks = data[:, 0]
    if np.any(np.abs(ks - np.round(ks)) > 1e-9):
        raise _CliError("first samples column must hold integer indices")
    ks = np.round(ks).astype(int)
    if np.any(np.diff(ks) != 1):
        raise _CliError("sample indices must be consecutive")
    return ks[0], data[:, 1]


# -- subcommand handlers --------------------------------------------------


def _cmd_realize_domain(args):
    dom = realize_domain(args.subdomains, args.kernels, args.lo, args.hi,
                         seed=args.seed, step=args.step)
    csv_path = save_domain(dom, args.output)
    return [args.output, csv_path]


def _cmd_export_basis(args):
    dom = load_domain(args.domain)
    basis = DomainInformedBasis(dom, args.order, step=args.step,
                                gamma=args.gamma, k_min=args.k_min,
                                k_max=args.k_max)
    lo = (basis.k_min - basis.half_support) * basis.step
    hi = (basis.k_max + basis.half_support) * basis.step
    npts = int(np.floor((hi - lo) / args.grid_step + 1e-9)) + 1
    xs = lo + args.grid_step * np.arange(npts)
    panel = basis.panel(xs)
    rows = []
    for p in range(len(xs)):
        for c in range(basis.order + 1):
            k = int(panel.indices[p, c])
            if basis.k_min <= k <= basis.k_max and panel.inside[p, c]:
                rows.append((float(xs[p]), k, float(panel.values[p, c])))
    _write_csv(args.output, "x,k,value", rows)
    return [args.output]


def _cmd_coherence(args):
    orders = args.orders
    gammas = args.gamma
    rows = []
    values = np.zeros((len(orders), len(gammas), args.domains))
    for i in range(args.domains):
        dom = realize_domain(args.subdomains, args.kernels, args.lo, args.hi,
                             seed=derive_seed(args.seed, _COHERENCE_PATH, i))
        for io, order in enumerate(orders):
            for ig, gamma in enumerate(gammas):
                basis = DomainInformedBasis(dom, order, step=args.step,
                                            gamma=gamma)
                values[io, ig, i] = coherence_factor(basis)
    for io, order in enumerate(orders):
        for ig, gamma in enumerate(gammas):
            rows.append((order, float(gamma), float(values[io, ig].mean())))
    _write_csv(args.output, "order,gamma,ensemble_coherence", rows)
    return [args.output]


def _cmd_interpolate(args):
    k0, values = _load_samples(args.samples)
    dom = load_domain(args.domain)
    samples = SampleSequence(values, args.step, k_offset=k0)
    dibsi_interp = interpolate_dibsi(samples, dom, args.order, gamma=args.gamma)
    bsi_interp = interpolate_bsi(samples, args.order)
    lo = k0 * args.step
    hi = (k0 + len(values) - 1) * args.step
    npts = int(np.floor((hi - lo) / args.grid_step + 1e-9)) + 1
    xs = lo + args.grid_step * np.arange(npts)
    rows = list(zip(map(float, xs), map(float, dibsi_interp.evaluate(xs)),
                    map(float, bsi_interp.evaluate(xs))))
    _write_csv(args.output, "x,dibsi,bsi", rows)
    return [args.output]


def _cmd_simulate(args):
    table = monte_carlo(
        args.domains, args.signals, args.orders, args.steps,
        gamma=args.gamma, master_seed=args.seed, threads=args.threads,
        domain_J=args.subdomains, domain_K=args.kernels,
        lo=args.lo, hi=args.hi, alpha=args.alpha,
    )
    rows = [(m, n, float(t), e) for m, n, t, e in table.rows()]
    _write_csv(args.output, "method,order,T,ensemble_error", rows)
    return [args.output]


def _cmd_upsample2d(args):
    image = load_image(args.image, pixel_size=args.pixel_size)
    atlas = load_atlas(args.atlas)
    outputs = []
    for method in ("dibsi", "bsi"):
        result = upsample_separable(image, atlas, args.factor,
                                    order=args.order, gamma=args.gamma,
                                    pass_order=args.pass_order, method=method)
        path = f"{args.output}_{method}.csv"
        save_image(result, path)
        outputs.append(path)
    return outputs


def _cmd_riesz_check(args):
    rows = []
    worst = np.inf
    for i in range(args.domains):
        dom = realize_domain(args.subdomains, args.kernels, args.lo, args.hi,
                             seed=derive_seed(args.seed, _COHERENCE_PATH, i))
        for order in args.orders:
            basis = DomainInformedBasis(dom, order, step=args.step,
                                        gamma=args.gamma)
            lower, upper = riesz_bounds(basis, quad_step=args.quad_step)
            worst = min(worst, lower)
            rows.append((i, order, lower, upper))
    _write_csv(args.output, "domain_index,order,lower_bound,upper_bound", rows)
    if worst <= 0:
        raise SolverResidualError(
            f"nonpositive frame bound estimate {worst:.3e}"
        )
    return [args.output]


# -- parser wiring ---------------------------------------------------------


def build_parser():
    parser = _Parser(prog="dibsi", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_domain_flags(p, lo=1.0, hi=30.0):
        p.add_argument("--subdomains", type=int, default=2,
                       help="number of subdomains J")
        p.add_argument("--kernels", type=int, default=9,
                       help="number of generating kernels K")
        p.add_argument("--lo", type=float, default=lo)
        p.add_argument("--hi", type=float, default=hi)

    p = sub.add_parser("realize-domain", help="synthesize a random domain")
    add_domain_flags(p)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="manifest JSON path")
    p.set_defaults(func=_cmd_realize_domain)

    p = sub.add_parser("export-basis", help="dump basis kernels to CSV")
    p.add_argument("--domain", required=True, help="domain manifest path")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--gamma", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--grid-step", type=float, default=1e-2)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_export_basis)

    p = sub.add_parser("coherence", help="ensemble domain-basis coherence")
    p.add_argument("--orders", type=_parse_ints, default=list(range(1, 8)))
    p.add_argument("--gamma", type=_parse_floats,
                   default=[1.0, 5.0, 10.0, 20.0, 50.0])
    p.add_argument("--domains", type=int, default=50)
    add_domain_flags(p)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_coherence)

    p = sub.add_parser("interpolate", help="interpolate a sample CSV")
    p.add_argument("--samples", required=True, help="CSV of (k, value)")
    p.add_argument("--domain", required=True, help="domain manifest path")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=10.0)
    p.add_argument("--grid-step", type=float, default=1e-2)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("simulate", help="Monte Carlo error study")
    p.add_argument("--domains", type=int, default=20)
    p.add_argument("--signals", type=int, default=20)
    p.add_argument("--orders", type=_parse_ints, default=list(range(1, 7)))
    p.add_argument("--steps", type=_parse_floats,
                   default=[round(0.1 * i, 12) for i in range(1, 11)])
    p.add_argument("--gamma", type=float, default=10.0)
    p.add_argument("--alpha", type=float, default=0.25)
    add_domain_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("upsample2d", help="separable 2-D upsampling")
    p.add_argument("--image", required=True)
    p.add_argument("--atlas", required=True, help="atlas manifest path")
    p.add_argument("--factor", type=int, default=10)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--gamma", type=float, default=10.0)
    p.add_argument("--pass-order", choices=("rows", "cols"), default="rows")
    p.add_argument("--pixel-size", type=float, default=1.0,
                   help="pixel size for CSV images lacking a header")
    p.add_argument("--output", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_upsample2d)

    p = sub.add_parser("riesz-check", help="numerical frame bound check")
    p.add_argument("--domains", type=int, default=100)
    p.add_argument("--orders", type=_parse_ints, default=[1, 2, 3, 4])
    add_domain_flags(p)
    p.add_argument("--gamma", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--quad-step", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_riesz_check)

    return parser


def _write_manifest(args, outputs, wall_time):
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "subcommand": args.subcommand,
        "flags": flags,
        "master_seed": flags.get("seed"),
        "version": dibsi.__version__,
        "wall_time_s": wall_time,
        "outputs": outputs,
    }
    path = f"{args.output}.manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliError as exc:
        print(exc, file=sys.stderr)
        return 1
    start = time.monotonic()
    try:
        outputs = args.func(args)
    except (_CliError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"dibsi {args.subcommand}: {exc}", file=sys.stderr)
        return 1
    except (SingularSystemError, SolverResidualError,
            np.linalg.LinAlgError) as exc:
        print(f"dibsi {args.subcommand}: numerical failure: {exc}",
              file=sys.stderr)
        return 2
    _write_manifest(args, outputs, time.monotonic() - start)
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
