"""Command-line front end.

Every subcommand produces audit rows (key, quantity, value, tolerance,
passed, anchor) written as JSON lines or a delimited table, sorted by key.
Exit status: 0 all rows pass, 1 some row fails, 2 usage or input error,
3 numerical abort.
"""

import argparse
import json
import sys

import numpy as np

from . import auxfield as X
from . import gallery as G
from . import interpolation as I
from . import jets as J
from . import measures as M
from .geometry import build_avoiding_path, circle_mean, make_grid
from .ode import NumericalAbort
from .records import AuditRow, all_passed, read_points, read_typed_points, render

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3
CONSTRUCTIONS = ("fixed-simple", "fixed-typed", "zeros", "interp")
CHECKS = ("identities", "schwarzian", "bank-laine", "liouville", "balance", "subharmonic")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def complex_arg(text):
    s = text.strip().replace(" ", "")
    try:
        if "," in s:
            re_, im_ = s.split(",")
            return complex(float(re_), float(im_))
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _common(p):
    g = p.add_argument_group("grid and output")
    g.add_argument("--config", help="JSON file with default values for any flag (flags win)")
    g.add_argument("--radial-count", type=int, default=64)
    g.add_argument("--angular-count", type=int, default=256)
    g.add_argument("--r-max", type=float, default=0.9)
    g.add_argument("--spacing", choices=("uniform", "boundary-refined"), default="boundary-refined")
    g.add_argument("--tol", type=positive, default=1e-10, help="ODE tolerance")
    g.add_argument("--fd-step", type=positive, default=1e-3)
    g.add_argument("--audit-tol", type=positive, default=None,
                   help="override the default tolerance of the primary audit")
    g.add_argument("--output", "-o", help="write the report here instead of stdout")
    g.add_argument("--format", choices=("jsonl", "table"), default="jsonl")


def _selector(p):
    s = p.add_argument_group("subject")
    s.add_argument("--entry", help=f"gallery entry: {', '.join(G.NAMES)}")
    s.add_argument("--p", type=float, default=None, help="parameter of thm1_i / thm1_ii")
    s.add_argument("--construct", choices=CONSTRUCTIONS)
    s.add_argument("--zeros", help="file of 're im' lines (fixed-simple)")
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--spec", help="file of 're im type' lines (fixed-typed)")
    s.add_argument("--lambda", dest="lam", help="file of 're im' zeros (zeros)")
    s.add_argument("--nodes", help="file of 're im' nodes (interp)")
    s.add_argument("--targets", help="file of 're im' targets (interp)")


def build_parser():
    parser = argparse.ArgumentParser(prog="discode", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gallery", help="verify the claims of a gallery entry")
    p.add_argument("--entry", required=True)
    p.add_argument("--p", type=float, default=None)
    _common(p)

    p = sub.add_parser("identities", help="auxiliary-field identities and related checks")
    _selector(p)
    p.add_argument("--check", action="append", choices=CHECKS,
                   help="restrict to these checks (repeatable; default all)")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--radius", type=float, default=0.5, help="sample points lie in |z| <= radius")
    p.add_argument("--no-richardson", action="store_true")
    _common(p)

    p = sub.add_parser("measures", help="growth norms, Carleson constants, balances")
    _selector(p)
    m = p.add_mutually_exclusive_group(required=True)
    for flag in ("growth", "coefficient-carleson", "littlewood-paley", "t0", "balance",
                 "uchiyama", "sublevel", "min-modulus"):
        m.add_argument(f"--{flag}", action="store_true")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--f", dest="func", help="monomial:K[:C], constant:C or pole (1/(1-z))")
    p.add_argument("--r", type=float, action="append", help="radius (repeatable)")
    p.add_argument("--epsilon", type=float, default=0.5, help="Uchiyama exponent")
    p.add_argument("--delta", type=float, default=0.01, help="sublevel threshold")
    p.add_argument("--expect", choices=("growing", "stabilized"))
    _common(p)

    p = sub.add_parser("construct", help="build a constructive equation and audit it")
    p.add_argument("kind", choices=CONSTRUCTIONS)
    p.add_argument("--zeros")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--spec")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--nodes")
    p.add_argument("--targets")
    p.add_argument("--trace", help="write z, A, f1 at sample points as a table")
    _common(p)

    p = sub.add_parser("paths", help="build and audit a zero-avoiding path")
    p.add_argument("--start", type=complex_arg, default=0j)
    p.add_argument("--target", type=complex_arg, required=True)
    p.add_argument("--exclusions", help="file of 're im' or 're im delta' lines")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trace", help="write the path record here")
    _common(p)
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        unknown = sorted(set(cfg) - known - {"command"})
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    if not 0 < args.r_max < 1:
        raise UsageError("--r-max must lie in (0,1)")
    return args


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _grid(args):
    return make_grid(args.radial_count, args.angular_count, args.r_max, args.spacing)


def _need(args, name, flag):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"{flag} is required here")
    return v


def _construction(kind, args, grid):
    if kind == "fixed-simple":
        zs = read_points(_need(args, "zeros", "--zeros"))
        return I.fixed_point_simple(zs, 0.3 if args.eps is None else args.eps, grid)
    if kind == "fixed-typed":
        zs, types = read_typed_points(_need(args, "spec", "--spec"))
        return I.fixed_point_typed(I.FixedPointSpec(zs, types), grid)
    if kind == "zeros":
        return I.prescribed_zero_equation(read_points(_need(args, "lam", "--lambda")), grid)
    nodes = read_points(_need(args, "nodes", "--nodes"))
    targets = read_points(_need(args, "targets", "--targets"))
    return I.interpolating_solution_equation(I.InterpolationProblem(nodes, targets), grid)


def _entry(args):
    params = {} if args.p is None else {"p": args.p}
    try:
        return G.get_entry(args.entry, **params)
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    except TypeError:
        raise UsageError(f"entry {args.entry} takes no parameter p") from None


def _subject(args, grid):
    """(label, basis or None, A, construction or None)."""
    if args.entry and args.construct:
        raise UsageError("choose either --entry or --construct")
    if args.entry:
        e = _entry(args)
        return e.name, e.basis(), e.A, e
    if args.construct:
        c = _construction(args.construct, args, grid)
        return args.construct, c.basis, c.A, c
    raise UsageError("--entry or --construct is required")


def _func(spec):
    kind, _, rest = spec.partition(":")
    z = J.identity
    try:
        if kind == "monomial":
            k, _, c = rest.partition(":")
            return M.monomial(int(k), complex(c) if c else 1.0)
        if kind == "constant":
            return J.constant(complex(rest))
        if kind == "pole":
            return 1 / (1 - z)
    except ValueError:
        pass
    raise UsageError(f"cannot parse function {spec!r}; use monomial:K[:C], constant:C or pole")


def _tol(args, default):
    return default if args.audit_tol is None else args.audit_tol


def _expected_verdict(args, subject):
    if args.expect:
        return args.expect
    if isinstance(subject, G.GalleryEntry):
        kinds = {c.kind for c in subject.claims if c.key == "coefficient-growth"}
        if "divergent" in kinds:
            return "growing"
        if "stable" in kinds:
            return "stabilized"
        return None
    return "stabilized" if subject is not None else None


def _profile_rows(tag, quantity, radii, profile, verdict, expected, anchor):
    rows = [AuditRow.info(f"{tag}/r={r}", quantity, v, anchor) for r, v in zip(radii, profile)]
    ratio = profile[-1] / profile[0] if profile[0] else float("inf")
    if expected is None:
        rows.append(AuditRow.info(f"{tag}/verdict={verdict}", "profile ratio last/first", ratio, anchor))
    else:
        rows.append(AuditRow(f"{tag}/verdict={verdict}", f"profile ratio last/first (expect {expected})",
                             float(ratio), float("nan"), verdict == expected, anchor))
    return rows


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_gallery(args):
    entry = _entry(args)
    rows = G.verify_entry(entry, _grid(args), _tol(args, 1e-9))
    return [AuditRow.from_dict(r) for r in rows]


def cmd_identities(args):
    grid = _grid(args)
    label, basis, A, _ = _subject(args, grid)
    checks = args.check or CHECKS
    z = X.interior_points(args.points, args.radius)
    rows = []
    if "identities" in checks:
        res = X.identity_residuals(basis, z, args.fd_step, not args.no_richardson, A)
        tol = _tol(args, 1e-5)
        rows.append(AuditRow.upper(f"{label}/r1", "max|Δu - 4e^{-2u}| (5-point stencil)",
                                   np.max(res.r1), tol, "Δu = 4e^{-2u}"))
        rows.append(AuditRow.upper(f"{label}/r2", "max|Δu + |∇u|^2 - e^{-u}Δe^u|",
                                   np.max(res.r2), tol, "Δu + |∇u|^2 = e^{-u}Δe^u"))
        rows.append(AuditRow.upper(f"{label}/r3", "max|A + ∂²u + (∂u)²|", np.max(res.r3), 1e-9,
                                   "A = -∂²u - (∂u)²"))
    if "liouville" in checks:
        v = X.liouville_residual(basis, z, args.fd_step, not args.no_richardson)
        rows.append(AuditRow.upper(f"{label}/liouville", "max|Δ(-u) + 4e^{2(-u)}|", np.max(v),
                                   _tol(args, 1e-5), "-u solves the Liouville equation"))
    if "schwarzian" in checks:
        s = X.schwarzian(X.BasisQuotient(basis), z)
        rows.append(AuditRow.upper(f"{label}/schwarzian", "max|S(f1/f2) - 2A|",
                                   np.max(np.abs(s - 2 * A(z))), 1e-8, "S(f1/f2) = 2A"))
    if "bank-laine" in checks:
        E = basis.f1 * basis.f2
        zz = z[np.abs(E(z)) >= 1e-3]
        if len(zz):
            v = np.max(np.abs(X.bank_laine(E, basis.wronskian, zz) - A(zz)))
            rows.append(AuditRow.upper(f"{label}/bank-laine", "max|BL(f1 f2) - A| off |E| < 1e-3", v,
                                       1e-8, "Bank-Laine identity"))
    if "balance" in checks:
        for r in (0.3, 0.5, 0.7):
            rows.append(AuditRow.upper(f"{label}/balance/r={r}", "|mean u - u(0) - 2 T0(r)|",
                                       M.circle_mean_u_balance(basis, r), _tol(args, 1e-5),
                                       "circle mean of u equals u(0) + 2 T0"))
    if "subharmonic" in checks:
        u = M.u_field(basis)
        means = [circle_mean(u, r) for r in np.arange(1, 10) / 10]
        drop = max(0.0, max(a - b for a, b in zip(means, means[1:])))
        rows.append(AuditRow.upper(f"{label}/subharmonic", "max decrease of circle means of u",
                                   drop, 1e-6, "u is subharmonic"))
    return rows


def cmd_measures(args):
    grid = _grid(args)
    radii = tuple(args.r) if args.r else G.PROFILE_RADII
    if args.littlewood_paley:
        f = _func(args.func or "monomial:1")
        rm = radii[0] if args.r else 1.0
        b = M.littlewood_paley_balance(f, rm)
        return [
            AuditRow.info("lp/lhs", "circle mean of |f|^2", b.lhs, "Littlewood-Paley"),
            AuditRow.info("lp/rhs", "|f(0)|^2 + (2/π)∫|f'|^2 log(1/|z|)", b.rhs, "Littlewood-Paley"),
            AuditRow.upper("lp/residual", "|lhs - rhs|", b.residual, _tol(args, 1e-6), "Littlewood-Paley"),
        ]
    if args.growth and args.func:
        f, label, subject = _func(args.func), args.func, None
    else:
        label, basis, A, subject = _subject(args, grid)
    if args.growth:
        target = f if args.func else A
        rep = M.growth_norm(target, args.alpha, grid, radii)
        exp = _expected_verdict(args, subject) if args.alpha == 2 and not args.func else args.expect
        rows = [AuditRow.info(f"{label}/growth/grid-sup", f"grid sup |f|(1-|z|^2)^{args.alpha}",
                              rep.sup, "lower bound + stabilization heuristic")]
        return rows + _profile_rows(f"{label}/growth", f"circle sup |f|(1-r^2)^{args.alpha}",
                                    radii, rep.profile, rep.verdict, exp, "growth-space membership")
    if args.coefficient_carleson:
        rep = M.carleson_constant(M.coefficient_density(A), radii=radii)
        return _profile_rows(f"{label}/carleson", f"Carleson constant of {rep.descriptor}", radii,
                             rep.profile, rep.verdict, _expected_verdict(args, subject),
                             "|A|^2(1-|z|^2)^3 dm is a Carleson measure")
    if args.uchiyama:
        rep, sup = M.uchiyama_constant(basis, args.epsilon, radii=radii)
        rows = [AuditRow.info(f"{label}/uchiyama/sup-f", "grid sup max(|f1|,|f2|)", sup, "bounded basis")]
        return rows + _profile_rows(f"{label}/uchiyama", "Carleson constant", radii, rep.profile,
                                    rep.verdict, args.expect, "Uchiyama-type measure is Carleson")
    if args.t0 or args.balance:
        rs = tuple(args.r) if args.r else (0.3, 0.5, 0.7)
        rows = []
        for r in rs:
            if args.t0:
                rows.append(AuditRow.info(f"{label}/T0/r={r}", "Ahlfors-Shimizu T0(r, f1/f2)",
                                          M.ahlfors_shimizu_T0(basis, r), "characteristic"))
            else:
                rows.append(AuditRow.upper(f"{label}/balance/r={r}", "|mean u - u(0) - 2 T0(r)|",
                                           M.circle_mean_u_balance(basis, r), _tol(args, 1e-5),
                                           "circle mean of u equals u(0) + 2 T0"))
        return rows
    if args.sublevel:
        prof = M.sublevel_mass(basis, args.delta, radii=radii)
        return [AuditRow.info(f"{label}/sublevel/r={r}", f"∫_(S<{args.delta}) dm/(1-|z|^2)", v,
                              "sublevel mass") for r, v in zip(radii, prof)]
    rep = M.min_modulus_outside(basis, grid)
    return [
        AuditRow.info(f"{label}/min-modulus/inf", "grid inf |f1|+|f2|", rep.inf, "minimum modulus"),
        AuditRow(f"{label}/min-modulus/floor", "c with |f1|+|f2| >= c(1-|z|^2)", rep.floor_constant,
                 0.0, rep.floor_holds, "Cauchy-Schwarz floor"),
    ]


def cmd_construct(args):
    grid = _grid(args)
    c = _construction(args.kind, args, grid)
    if args.trace:
        z = X.interior_points(200, args.r_max)
        A, f = c.A(z), c.f1(z)
        with open(args.trace, "w") as fh:
            fh.write("z_re,z_im,A_re,A_im,f1_re,f1_im\n")
            for row in zip(z.real, z.imag, A.real, A.imag, f.real, f.imag):
                fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")
    return c.audits


def cmd_paths(args):
    excl = []
    if args.exclusions:
        with open(args.exclusions) as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.split("#", 1)[0].split()
                if not parts:
                    continue
                if len(parts) not in (2, 3):
                    raise UsageError(f"{args.exclusions}:{lineno}: expected 're im [delta]'")
                d = float(parts[2]) if len(parts) == 3 else args.delta
                excl.append((complex(float(parts[0]), float(parts[1])), d))
    path = build_avoiding_path(args.start, args.target, excl)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(path.to_record() + "\n")
    bad = path.audit()
    return [
        AuditRow.upper("path/violations", "sampled points inside exclusion discs", len(bad), 0,
                       "path avoids the exclusion discs"),
        AuditRow.upper("path/length", f"Euclidean length (bound {path.length_bound:.6g})", path.length,
                       path.length_bound, "uniformly bounded path length"),
    ]


COMMANDS = {
    "gallery": cmd_gallery,
    "identities": cmd_identities,
    "measures": cmd_measures,
    "construct": cmd_construct,
    "paths": cmd_paths,
}


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:  # argparse already printed the message
        return EXIT_USAGE if e.code else EXIT_PASS
    except UsageError as e:
        print(f"discode: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = COMMANDS[args.command](args)
    except NumericalAbort as e:
        print(f"discode: numerical abort: {e}", file=sys.stderr)
        return EXIT_ABORT
    except (UsageError, ValueError, OSError) as e:
        print(f"discode: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = render(rows, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if all_passed(rows) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
