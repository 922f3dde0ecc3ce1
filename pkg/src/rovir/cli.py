"""Command-line front end.

Subcommands: ``phantom``, ``solve``, ``compress``, ``metrics``, ``oracle``.
Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import json
import sys
from pathlib import Path

from . import io
from .arraydata import (
    DEFAULT_REG,
    apply_weights,
    build_gram,
    energy_curves,
    regularize,
    root_sum_of_squares,
)
from .errors import NumericalError, ValidationError
from .oracle import OracleConfig, ascent_restarts
from .phantom import PhantomSpec, make_phantom
from .solvers import METHODS, sir, solve

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
ORACLE_MAX_NC = 8


def _grams(args):
    """Signal and regularized interference Gram matrices from either image
    inputs or the ``--gram-a/--gram-b`` test flags."""
    if args.gram_a or args.gram_b:
        if not (args.gram_a and args.gram_b):
            raise ValidationError("--gram-a and --gram-b must be given together")
        A = io.read_gram(args.gram_a)
        B = io.read_gram(args.gram_b)
        if A.shape != B.shape:
            raise ValidationError(f"A is {A.shape} but B is {B.shape}")
    else:
        missing = [f for f in ("image", "signal_mask", "interference_mask")
                   if not getattr(args, f, None)]
        if not hasattr(args, "image"):
            raise ValidationError("--gram-a and --gram-b are required")
        if missing:
            raise ValidationError("missing inputs: " + ", ".join("--" + m.replace("_", "-") for m in missing))
        img = io.read_image(args.image)
        A = build_gram(img, _mask(args.signal_mask, img))
        B = build_gram(img, _mask(args.interference_mask, img))
    return A, regularize(B, args.reg)


def _mask(path, img):
    m = io.read_mask(path)
    if m.shape != img.shape:
        raise ValidationError(f"mask {path} is {m.shape}, image grid is {img.shape}")
    return m


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def cmd_phantom(args):
    spec = PhantomSpec(nc=args.nc, ny=args.ny, nx=args.nx, seed=args.seed,
                       coil_decay=args.coil_decay, noise_sigma=args.noise_sigma)
    img, sig, itf = make_phantom(spec)
    out = Path(args.out_dir)
    io.write_image(out / "image.json", img.values)
    io.write_mask(out / "signal_mask.json", sig)
    io.write_mask(out / "interference_mask.json", itf)
    print(f"wrote phantom nc={spec.nc} {spec.ny}x{spec.nx} to {out}")
    return EXIT_OK


def cmd_solve(args):
    A, B = _grams(args)
    W = solve(A, B, args.nv, args.method)
    sirs = [sir(W.prefix(k), A, B) for k in range(1, W.nv + 1)]
    io.write_weights(args.out, W, sirs)
    print(f"{args.method}: nv={W.nv} nc={W.nc} sir={sirs[-1]!r}")
    return EXIT_OK


def cmd_compress(args):
    img = io.read_image(args.image)
    W = io.read_weights(args.weights)
    coils = apply_weights(img, W)
    out = Path(args.out_dir)
    io.write_image(out / "virtual.json", coils.images)
    io.write_image(out / "rss.json", root_sum_of_squares(coils.images)[None])
    print(f"wrote {coils.nv} virtual coils to {out}")
    return EXIT_OK


def cmd_metrics(args):
    A, B = _grams(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise ValidationError(f"--methods must be drawn from {','.join(METHODS)}")
    nv_max = A.shape[0] if args.nv_max is None else args.nv_max
    if not 1 <= nv_max <= A.shape[0]:
        raise ValidationError(f"--nv-max must lie in 1..{A.shape[0]}")
    _write_text(args.out, energy_curves(A, B, methods, nv_max).to_csv())
    return EXIT_OK


def cmd_oracle(args):
    A, B = _grams(args)
    nc = A.shape[0]
    if nc > ORACLE_MAX_NC:
        raise ValidationError(f"oracle is limited to nc <= {ORACLE_MAX_NC}, got {nc}")
    if not 1 <= args.nv <= nc:
        raise ValidationError(f"--nv must lie in 1..{nc}")
    cfg = OracleConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)
    res = ascent_restarts(A, B, args.nv, cfg)
    greedy = sir(solve(A, B, args.nv, "greedy"), A, B)
    original = sir(solve(A, B, args.nv, "original"), A, B)
    report = {
        "nc": nc,
        "nv": args.nv,
        "restarts": cfg.restarts,
        "max_iters": cfg.max_iters,
        "seed": cfg.seed,
        "oracle_sir": res.sir,
        "greedy_sir": greedy,
        "original_sir": original,
        "oracle_gain_over_greedy": (res.sir - greedy) / greedy,
        "greedy_gain_over_original": (greedy - original) / original,
        "best_restart": res.best_restart,
        "converged": res.converged,
        "oracle_weights": [[[float(z.real), float(z.imag)] for z in col]
                           for col in res.weights.vectors.T],
    }
    _write_text(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def _add_gram_inputs(p, images=True):
    if images:
        p.add_argument("--image", help="image manifest (.json)")
        p.add_argument("--signal-mask", help="signal ROI mask manifest")
        p.add_argument("--interference-mask", help="interference ROI mask manifest")
        hidden = argparse.SUPPRESS
    else:
        hidden = None
    p.add_argument("--gram-a", help=hidden or "signal Gram matrix (JSON)")
    p.add_argument("--gram-b", help=hidden or "interference Gram matrix (JSON)")
    p.add_argument("--reg", type=float, default=DEFAULT_REG,
                   help="relative diagonal loading applied to B (default: %(default)g)")


def build_parser():
    parser = argparse.ArgumentParser(prog="rovir", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a synthetic multichannel dataset")
    p.add_argument("--nc", type=int, default=8)
    p.add_argument("--ny", type=int, default=64)
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coil-decay", type=float, default=PhantomSpec.coil_decay)
    p.add_argument("--noise-sigma", type=float, default=PhantomSpec.noise_sigma)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("solve", help="compute virtual-coil weights")
    _add_gram_inputs(p)
    p.add_argument("--method", choices=METHODS, default="greedy")
    p.add_argument("--nv", type=int, required=True)
    p.add_argument("--out", required=True, help="weights JSON to write")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compress", help="apply weights to an image")
    p.add_argument("--image", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("metrics", help="retained-energy and SIR curves as CSV")
    _add_gram_inputs(p)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--nv-max", type=int, default=None)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("oracle", help="compare solvers with the random-restart oracle")
    _add_gram_inputs(p, images=False)
    p.add_argument("--nv", type=int, required=True)
    p.add_argument("--restarts", type=int, default=OracleConfig.restarts)
    p.add_argument("--max-iters", type=int, default=OracleConfig.max_iters)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="report JSON path, '-' for stdout")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"rovir {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"rovir {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"rovir {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
