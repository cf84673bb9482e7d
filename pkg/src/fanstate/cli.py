"""Command-line entry point: ``fanstate {generate,prob-sweep,qfunc,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 engine/oracle
deviation above tolerance.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import sweeps
from .coherent import fan_state
from .phasespace import default_bounds, q_grid
from .protocol import TauOrder
from .report import generate, to_csv, to_json
from .verify import CHECKS, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DEVIATION = 0, 1, 2, 3
DEVIATION_LIMIT = 1e-6


def parse_complex(text):
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}") from None
    z = complex(vals[0], vals[1] if len(vals) == 2 else 0.0)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise argparse.ArgumentTypeError("alpha must be finite")
    return z


def parse_floats(count):
    def parse(text):
        try:
            vals = tuple(float(p) for p in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers") from None
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {len(vals)}")
        return vals

    return parse


def parse_res(text):
    try:
        vals = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected nx[,ny]") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected nx[,ny]")
    return vals


def emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def table_output(header, rows, fmt):
    if fmt == "json":
        return to_json({"columns": header, "rows": [list(map(float, r)) for r in rows]})
    return to_csv(header, rows)


def cmd_generate(args, parser):
    if args.atoms < 2:
        parser.error("--atoms must be >= 2")
    report, deviation = generate(args.alpha, args.atoms, args.basis, verify=args.verify)
    if args.format == "csv":
        rows = [
            (t["coeff"]["re"], t["coeff"]["im"], t["amp"]["re"], t["amp"]["im"]) for t in report["final_state"]
        ]
        text = to_csv(["coeff_re", "coeff_im", "amp_re", "amp_im"], rows)
    else:
        text = to_json(report)
    emit(text, args.out)
    if deviation is not None and deviation > DEVIATION_LIMIT:
        print(f"engine/oracle deviation {deviation:.3e} exceeds {DEVIATION_LIMIT:g}", file=sys.stderr)
        return EXIT_DEVIATION
    return EXIT_OK


def cmd_prob_sweep(args, parser):
    try:
        if args.kind == "fig3":
            taus = sweeps.linspace(0.0, args.tau_max, args.tau_steps)
            header, rows = sweeps.fig3_table(taus)
        else:
            if args.r_min < 0:
                parser.error("--r-min must be >= 0")
            rs = sweeps.linspace(args.r_min, args.r_max, args.r_steps)
            if args.kind == "fig4":
                orders = tuple(TauOrder) if args.tau_order == "both" else (TauOrder(args.tau_order),)
                header, rows = sweeps.fig4_table(rs, orders)
            else:
                if args.atoms < 2:
                    parser.error("--atoms must be >= 2")
                header, rows = sweeps.fig5_table(rs, args.atoms)
    except ValueError as exc:
        parser.error(str(exc))
    emit(table_output(header, rows, args.format), args.out)
    return EXIT_OK


def cmd_qfunc(args, parser):
    if args.k < 1:
        parser.error("--k must be >= 1")
    bounds = args.bounds or default_bounds(args.alpha)
    nx, ny = args.res
    try:
        grid = q_grid(fan_state(args.alpha, args.k), bounds, nx, ny)
    except ValueError as exc:
        parser.error(str(exc))
    print("note: column Q is (1/pi)|<zeta|psi>|^2; the plotted distribution is pi*Q", file=sys.stderr)
    emit(table_output(["x", "y", "Q"], grid.rows(), args.format), args.out)
    return EXIT_OK


def cmd_verify(args, parser):
    if args.cases < 0:
        parser.error("--cases must be >= 0")
    if args.cases == 0:
        print("warning: --cases 0, no checks were run", file=sys.stderr)
        return EXIT_OK
    failure = run_suite(args.seed, args.cases, args.tol_scale)
    if failure is not None:
        print(f"FAIL {failure}")
        return EXIT_VERIFY
    print(f"ok: {args.cases} cases x {len(CHECKS)} checks, seed {args.seed}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="fanstate", description="Fan-state generation by atoms crossing a cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json"), default="csv"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", default="-", help="output path, '-' for stdout")

    g = sub.add_parser("generate", help="run the fan schedule and report the final field state")
    g.add_argument("--alpha", type=parse_complex, required=True, help="initial coherent amplitude re[,im]")
    g.add_argument("--atoms", type=int, default=2)
    g.add_argument("--basis", choices=("minus", "plus"), default="minus")
    g.add_argument("--verify", action="store_true", help="cross-check against the Fock-space oracle")
    common(g, default="json")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("prob-sweep", help="probability curves (figure captions 3, 4, 5)")
    s.add_argument("kind", choices=sweeps.FIGURES)
    s.add_argument("--r-min", type=float, default=0.0)
    s.add_argument("--r-max", type=float, default=3.0)
    s.add_argument("--r-steps", type=int, default=121)
    s.add_argument("--tau-max", type=float, default=2 * math.pi)
    s.add_argument("--tau-steps", type=int, default=201)
    s.add_argument("--tau-order", choices=("both",) + tuple(o.value for o in TauOrder), default="both")
    s.add_argument("--atoms", type=int, default=5, help="largest atom number for fig5")
    common(s)
    s.set_defaults(func=cmd_prob_sweep)

    q = sub.add_parser("qfunc", help="Husimi Q-function grid of a fan-state")
    q.add_argument("--alpha", type=parse_complex, required=True)
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--bounds", type=parse_floats(4), default=None, help="x0,x1,y0,y1")
    q.add_argument("--res", type=parse_res, default=(201, 201), help="nx,ny")
    common(q)
    q.set_defaults(func=cmd_qfunc)

    v = sub.add_parser("verify", help="randomized property suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cases", type=int, default=20)
    v.add_argument("--tol-scale", type=float, default=1.0, help="multiplies every tolerance")
    v.set_defaults(func=cmd_verify)
    return parser


# flags whose values may start with '-' (negative numbers, "-5,5,-5,5")
VALUE_FLAGS = ("--alpha", "--bounds", "--r-min", "--r-max", "--tau-max")


def _glue_values(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_glue_values(sys.argv[1:] if argv is None else list(argv)))
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
