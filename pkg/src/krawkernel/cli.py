"""
Command-line front end.

    krawkernel eval kernel --N 4 --p 1/2,1/4,1/4 --n 1 --x 4,0,0 --y 4,0,0
    krawkernel gof counts.txt --p 1/2,1/4,1/4
    krawkernel chain --N 100 --p 1/2,1/4,1/4 --x0 100,0,0 --c -3,0,3
    krawkernel dup --p 1/2,1/4,1/4 --p-dup 4/5 --x 2,1,0 --y 1,1,1
    krawkernel match --p 1/2,1/4,1/4 --q 1/4 --x 3,2,1 --y 2,2,2 --replicates 100000
    krawkernel verify --suite duplication --boundary

Exit codes: 0 success, 2 invalid arguments, 3 malformed data.
Rationals may be written as "a/b" or as decimals; decimals are read by
their literal expansion, so 0.1 means exactly 1/10.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import __version__, chain, duplication, gof, kernel, krawtchouk, mvk, verify
from .exactnum import config, simplex, to_fraction

SEED_ENV = "KRAWKERNEL_SEED"

EXIT_OK, EXIT_INVALID, EXIT_DATA = 0, 2, 3


class DataError(Exception):
    pass


# argument parsing helpers

def rational(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def rationals(text: str) -> tuple:
    return tuple(rational(t) for t in text.split(","))


def counts(text: str) -> tuple:
    try:
        return config(int(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad count vector {text!r}: {exc}") from None


def floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def steps(text: str) -> list:
    """'a:b' (inclusive), 'a:b:s', or a comma list."""
    try:
        if ":" in text:
            parts = [int(t) for t in text.split(":")]
            start, stop = parts[0], parts[1]
            stride = parts[2] if len(parts) > 2 else 1
            return list(range(start, stop + 1, stride))
        return [int(t) for t in text.split(",")]
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"bad step range {text!r}") from None


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _show(value: Fraction) -> str:
    return f"{value}\t{float(value)!r}"


def _write(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _match_dims(x, p, name="x"):
    if len(x) != len(p):
        raise ValueError(f"{name} has {len(x)} cells but p has {len(p)}")


# subcommands

def cmd_eval(args) -> int:
    fam = args.family
    if fam == "krawtchouk":
        value = krawtchouk.krawtchouk(args.n, args.x[0], args.N, args.p[0])
    elif fam == "charlier":
        value = krawtchouk.charlier(args.n, args.x[0], args.lam)
    elif fam == "kernel":
        p = simplex(args.p)
        _match_dims(args.x, p)
        _match_dims(args.y, p, "y")
        if args.N is not None and (sum(args.x) != args.N or sum(args.y) != args.N):
            raise ValueError(f"x and y must both sum to N = {args.N}")
        forms = {
            "explicit": kernel.kernel_eval,
            "centered": kernel.kernel_eval_centered,
            "hypergeom": kernel.kernel_eval_hypergeom,
            "recursion": kernel.kernel_recursion,
        }
        value = forms[args.form](args.n, args.x, args.y, p)
    elif fam == "poisson-limit":
        value = kernel.poisson_limit_kernel(args.n, args.x, args.y, args.mu)
    elif fam == "mvk":
        p = simplex(args.p)
        basis = mvk.build_helmert_basis(p)
        value = mvk.mvk_eval(args.index, args.x, basis)
    else:  # pragma: no cover - argparse restricts the choices
        raise ValueError(f"unknown family {fam}")
    print(_show(value))
    return EXIT_OK


def cmd_poisson_series(args) -> int:
    partial, resid = kernel.poisson_limit_series(args.rho, args.x, args.y, args.mu, args.n_max)
    closed = kernel.poisson_limit_poisson_kernel(args.rho, args.x, args.y, args.mu)
    print(json.dumps({"partial_sum": partial, "residual_estimate": resid, "closed_form": closed,
                      "n_max": args.n_max}))
    return EXIT_OK


def cmd_gof(args) -> int:
    try:
        with open(args.data) as fh:
            N, d, rows = gof.read_counts(fh)
    except OSError as exc:
        raise DataError(f"cannot read {args.data}: {exc.strerror}") from None
    except gof.SampleError as exc:
        raise DataError(f"{args.data}: {exc}") from None
    if args.estimate_p:
        report = gof.estimated_p_report(rows)
    else:
        if args.p is None:
            raise ValueError("--p is required unless --estimate-p is given")
        p = simplex(args.p)
        if len(p) != d:
            raise ValueError(f"p has {len(p)} cells but the data header says d = {d}")
        report = gof.gof_report(rows, p)
    # no randomness here; the version goes to stderr so the JSON stays byte-stable
    print(f"# krawkernel {__version__} mode={report.mode}", file=sys.stderr)
    _write(report.to_json() + "\n", args.output)
    return EXIT_OK


def _chain_spec(args) -> chain.UrnChainSpec:
    p = simplex(args.p)
    pd = args.p_dup if args.p_dup is not None else 1 - args.q if args.q is not None else Fraction(1)
    return chain.UrnChainSpec(args.N, p, args.z, pd)


def cmd_chain(args) -> int:
    spec = _chain_spec(args)
    x0 = args.x0 or (spec.N,) + (0,) * (spec.d - 1)
    if len(x0) != spec.d or sum(x0) != spec.N:
        raise ValueError(f"x0 must have {spec.d} cells summing to N = {spec.N}")
    exact_tv = None if args.tv == "auto" else args.tv == "on"
    seed = args.seed if args.seed is not None else default_seed()
    if args.c is not None:
        curve = chain.cutoff_curve(x0, spec, args.c, exact_tv=exact_tv, cap=args.cap)
    else:
        curve = chain.mixing_curve(x0, spec, args.steps, exact_tv=exact_tv, simulate=args.simulate,
                                   seed=seed, cap=args.cap)
    print(f"# krawkernel {__version__} seed={seed} replicates={args.simulate}", file=sys.stderr)
    _write(curve.to_csv(), args.output)
    return EXIT_OK


def cmd_dup(args) -> int:
    p = simplex(args.p)
    _match_dims(args.x, p)
    _match_dims(args.y, p, "y")
    if sum(args.x) != sum(args.y):
        raise ValueError("x and y must have the same total")
    phi = duplication.mixing_measure(args.x, args.y, p, args.p_dup)
    phi2 = duplication.mixing_measure_explicit(args.x, args.y, p, args.p_dup)
    N = sum(args.x)
    out = {
        "N": N,
        "p_dup": str(args.p_dup),
        "K": [str(v) for v in duplication.triple_sum_table(args.x, args.y, p, args.p_dup)],
        "phi": [str(v) for v in phi.masses],
        "phi_float": [float(v) for v in phi.masses],
        "routes_agree": phi.masses == phi2.masses,
        "mean": str(phi.mean()),
        "identity_holds": all(a == b for a, b in
                              (duplication.duplication_identity(n, args.x, args.y, p, args.p_dup)
                               for n in range(N + 1))),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK if out["routes_agree"] and out["identity_holds"] else 1


def cmd_match(args) -> int:
    p = simplex(args.p)
    _match_dims(args.x, p)
    _match_dims(args.y, p, "y")
    seed = args.seed if args.seed is not None else default_seed()
    emp = duplication.matching_simulate(args.x, args.y, p, args.q, args.replicates, seed=seed, chunks=args.chunks)
    exact = duplication.mixing_measure(args.x, args.y, p, 1 - args.q).masses
    tv = 0.5 * sum(abs(float(e) - float(m)) for e, m in zip(emp, exact))
    print(json.dumps({
        "seed": seed,
        "replicates": args.replicates,
        "version": __version__,
        "empirical": [float(v) for v in emp],
        "exact": [float(v) for v in exact],
        "tv": tv,
    }, indent=2))
    return EXIT_OK


def cmd_verify(args) -> int:
    opts = {"max_N": args.max_N, "max_d": args.max_d, "boundary": args.boundary}
    if args.suite == "lancaster":
        opts = {"N": args.N, "p": args.p, "rho": args.rho, "z": args.z, "p_dup": args.p_dup}
    names = None if args.suite == "all" else [args.suite]
    if args.suite == "all" and args.boundary:
        opts["boundary"] = True
    checks = verify.run_suites(names, **{k: v for k, v in opts.items() if v is not None})
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} identities hold (krawkernel {__version__})")
    return 1 if failed else EXIT_OK


# parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="krawkernel", description="Kernel polynomials on the multinomial.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate a polynomial exactly")
    ev.add_argument("family", choices=["kernel", "krawtchouk", "charlier", "poisson-limit", "mvk"])
    ev.add_argument("--N", type=int)
    ev.add_argument("--p", type=rationals, help="cell probabilities (krawtchouk: the single p)")
    ev.add_argument("--n", type=int, default=0, help="degree")
    ev.add_argument("--index", type=counts, help="multi-index for mvk")
    ev.add_argument("--x", type=counts, required=True)
    ev.add_argument("--y", type=counts)
    ev.add_argument("--lam", type=rational)
    ev.add_argument("--mu", type=rationals)
    ev.add_argument("--form", choices=["explicit", "centered", "hypergeom", "recursion"], default="explicit")
    ev.set_defaults(func=cmd_eval)

    ps = sub.add_parser("poisson-series", help="truncated Poisson-limit Poisson kernel vs its closed form")
    ps.add_argument("--mu", type=rationals, required=True)
    ps.add_argument("--x", type=counts, required=True)
    ps.add_argument("--y", type=counts, required=True)
    ps.add_argument("--rho", type=rational, default=Fraction(1, 2))
    ps.add_argument("--n-max", type=int, default=30)
    ps.set_defaults(func=cmd_poisson_series)

    g = sub.add_parser("gof", help="chi-squared component decomposition of a counts file")
    g.add_argument("data")
    g.add_argument("--p", type=rationals)
    g.add_argument("--estimate-p", action="store_true")
    g.add_argument("--output", "-o")
    g.set_defaults(func=cmd_gof)

    ch = sub.add_parser("chain", help="mixing curve of the urn chain as CSV")
    ch.add_argument("--N", type=int, required=True)
    ch.add_argument("--p", type=rationals, required=True)
    ch.add_argument("--z", type=int, default=1)
    hold = ch.add_mutually_exclusive_group()
    hold.add_argument("--p-dup", type=rational)
    hold.add_argument("--q", type=rational, help="1 - p_dup")
    ch.add_argument("--x0", type=counts, help="start (default all balls in colour 1)")
    ch.add_argument("--steps", type=steps, default=list(range(0, 51)))
    ch.add_argument("--c", type=floats, help="rows at l(c) for each c instead of --steps")
    ch.add_argument("--tv", choices=["auto", "on", "off"], default="auto")
    ch.add_argument("--simulate", type=int, default=0, metavar="REPLICATES")
    ch.add_argument("--seed", type=int)
    ch.add_argument("--cap", type=int, default=chain.DEFAULT_STATE_CAP)
    ch.add_argument("--output", "-o")
    ch.set_defaults(func=cmd_chain)

    du = sub.add_parser("dup", help="duplication triple sums and mixing measure")
    du.add_argument("--p", type=rationals, required=True)
    du.add_argument("--p-dup", type=rational, required=True)
    du.add_argument("--x", type=counts, required=True)
    du.add_argument("--y", type=counts, required=True)
    du.set_defaults(func=cmd_dup)

    ma = sub.add_parser("match", help="simulate thinned matches and compare with the mixing measure")
    ma.add_argument("--p", type=rationals, required=True)
    ma.add_argument("--q", type=rational, required=True)
    ma.add_argument("--x", type=counts, required=True)
    ma.add_argument("--y", type=counts, required=True)
    ma.add_argument("--replicates", type=int, default=100_000)
    ma.add_argument("--chunks", type=int, default=4)
    ma.add_argument("--seed", type=int)
    ma.set_defaults(func=cmd_match)

    ve = sub.add_parser("verify", help="run the exact identity suites")
    ve.add_argument("--suite", choices=["all"] + sorted(verify.SUITES), default="all")
    ve.add_argument("--max-N", type=int)
    ve.add_argument("--max-d", type=int)
    ve.add_argument("--boundary", action="store_true", help="add the admissibility boundary scans")
    ve.add_argument("--rho", type=rationals, help="lancaster: rho_1..rho_N")
    ve.add_argument("--N", type=int, help="lancaster: N")
    ve.add_argument("--p", type=rationals, help="lancaster: cell probabilities")
    ve.add_argument("--z", type=int, help="lancaster: z for rho_n = Q_n(z; N, p_dup)")
    ve.add_argument("--p-dup", type=rational)
    ve.set_defaults(func=cmd_verify)
    return ap


def _attach_negatives(argv: list) -> list:
    # argparse takes "-1/3" or "-3,0,3" for an option flag; glue such values to their option
    out: list = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and re.match(r"^-[\d.]", tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negatives(argv))
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
