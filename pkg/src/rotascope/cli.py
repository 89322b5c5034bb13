"""Command line front end.

One subcommand per instrument, JSON or CSV to stdout, gnuplot emission where
a plot is natural.  Exit code 0 on success, 1 when a computed certificate or
verification check fails, 2 on usage errors (argparse's own convention).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .circle_map import FamilyPoint, LiftDescriptor, distortion_constants
from .cont_frac import continued_fraction
from .denjoy import hat_ell_bound_check, return_partition
from .derivative_probe import quotient_sequence, rational_boundary_probe
from .errors import QCapExceeded, RotascopeError
from .measure_conj import conjugacy_from_orbit, derivative_via_conjugacy
from .rotation import rotation_birkhoff, rotation_farey
from .staircase import inverse_rho, measure_Jd, plateau_endpoints, sweep
from .verify import CHECK_IDS, run_suite


def _parse_number(text: str):
    """Float, or exact Fraction when the text looks like p/q."""
    if "/" in text:
        return Fraction(text)
    return float(text)


def _coeff_list(text: str | None):
    if not text:
        return ()
    return tuple(float(p) for p in text.split(","))


def _build_lift(args: argparse.Namespace, parser: argparse.ArgumentParser) -> LiftDescriptor:
    precision = args.precision
    if args.coeffs and args.family != "custom":
        args.family = "custom"
    if args.family == "identity":
        return LiftDescriptor.identity(precision)
    if args.family == "arnold":
        if args.K is None:
            parser.error("--family arnold requires --K")
        return LiftDescriptor.arnold(args.K, precision)
    sin = _coeff_list(args.sin) or _coeff_list(args.coeffs)
    cos = _coeff_list(args.cos)
    if not sin and not cos:
        parser.error("--family custom requires --sin/--coeffs and/or --cos")
    return LiftDescriptor(sin, cos, precision, "custom")


def _locked_str(locked):
    return None if locked is None else f"{locked.numerator}/{locked.denominator}"


def _emit(args, as_json, as_csv):
    if args.format == "json":
        print(json.dumps(as_json(), indent=2))
    else:
        sys.stdout.write(as_csv())


def _csv_rows(header: str, rows) -> str:
    out = [header]
    for row in rows:
        out.append(",".join("" if v is None else
                            (repr(v) if isinstance(v, float) else str(v))
                            for v in row))
    return "\n".join(out) + "\n"


def _write_plot(name: str, columns: str, rows, gp_lines) -> None:
    dat = f"{name}.dat"
    with open(dat, "w") as fh:
        fh.write(f"# {columns}\n")
        for row in rows:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
    with open(f"{name}.gp", "w") as fh:
        fh.write("\n".join(gp_lines) + "\n")


def _add_family_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--family", choices=("identity", "arnold", "custom"),
                     default="arnold")
    sub.add_argument("--K", type=float, default=None,
                     help="Arnold coupling, |K| < 1")
    sub.add_argument("--sin", default=None,
                     help="comma separated sine coefficients for --family custom")
    sub.add_argument("--cos", default=None,
                     help="comma separated cosine coefficients for --family custom")
    sub.add_argument("--coeffs", default=None,
                     help="shorthand for --family custom --sin COEFFS")


def _rho_estimate(fp: FamilyPoint, method: str, tol: float, q_cap, x0: float, n: int):
    if method == "birkhoff":
        return rotation_birkhoff(fp, x0=x0, n=n)
    try:
        return rotation_farey(fp, tol, q_cap)
    except QCapExceeded as exc:
        # the cap stopped refinement early; the enclosure is still valid
        return exc.estimate


def _cmd_cf(args, parser) -> int:
    cf = continued_fraction(_parse_number(args.alpha), args.terms)
    def as_json():
        return {"quotients": list(cf.quotients),
                "convergents": [f"{c.numerator}/{c.denominator}"
                                for c in cf.convergents],
                "exact": cf.exact}
    def as_csv():
        rows = [(k, a, c.numerator, c.denominator)
                for k, (a, c) in enumerate(zip(cf.quotients, cf.convergents))]
        return _csv_rows("k,a,p,q", rows)
    _emit(args, as_json, as_csv)
    return 0


def _cmd_rho(args, parser) -> int:
    lift = _build_lift(args, parser)
    est = _rho_estimate(FamilyPoint(lift, args.t), args.method,
                        args.tol, args.q_cap, args.x0, args.n)
    def as_json():
        return {"value": est.value, "radius": est.radius,
                "locked": _locked_str(est.locked)}
    def as_csv():
        lk = est.locked
        return _csv_rows("value,radius,locked_p,locked_q",
                         [(est.value, est.radius,
                           None if lk is None else lk.numerator,
                           None if lk is None else lk.denominator)])
    _emit(args, as_json, as_csv)
    return 0


def _cmd_plateau(args, parser) -> int:
    lift = _build_lift(args, parser)
    pl = plateau_endpoints(lift, Fraction(args.p, args.q), args.tol)
    def as_json():
        return {"p": pl.pq.numerator, "q": pl.pq.denominator,
                "t_left": pl.t_left, "t_right": pl.t_right, "tol": pl.tol}
    def as_csv():
        return _csv_rows("p,q,t_left,t_right,tol",
                         [(pl.pq.numerator, pl.pq.denominator,
                           pl.t_left, pl.t_right, pl.tol)])
    _emit(args, as_json, as_csv)
    return 0


def _cmd_inverse(args, parser) -> int:
    lift = _build_lift(args, parser)
    alpha = _parse_number(args.alpha)
    t = inverse_rho(lift, alpha, args.tol, args.q_cap)
    def as_json():
        return {"t": t, "alpha": float(alpha), "tol": args.tol}
    def as_csv():
        return _csv_rows("t,alpha,tol", [(t, float(alpha), args.tol)])
    _emit(args, as_json, as_csv)
    return 0


def _cmd_jd(args, parser) -> int:
    lift = _build_lift(args, parser)
    m = measure_Jd(lift, Fraction(args.p, args.q), args.d, args.tol, args.q_cap)
    def as_json():
        return {"p": m.pq.numerator, "q": m.pq.denominator, "d": m.d,
                "measure": m.measure, "bound": m.bound,
                "holds": m.measure <= m.bound + max(4.0 * args.tol, 1e-10)}
    def as_csv():
        return _csv_rows("p,q,d,measure,bound",
                         [(m.pq.numerator, m.pq.denominator, m.d,
                           m.measure, m.bound)])
    _emit(args, as_json, as_csv)
    return 0


def _cmd_sweep(args, parser) -> int:
    lift = _build_lift(args, parser)
    sw = sweep(lift, args.t_lo, args.t_hi, args.samples, args.tol, args.q_cap)
    def as_json():
        return {"samples": [{"t": t, "rho": e.value, "radius": e.radius,
                             "locked": _locked_str(e.locked)}
                            for t, e in zip(sw.ts, sw.estimates)],
                "monotonicity_violations": sw.monotonicity_violations()}
    _emit(args, as_json, sw.to_csv)
    if args.plot:
        rows = [(t, e.value, e.radius) for t, e in zip(sw.ts, sw.estimates)]
        _write_plot(args.plot, "t rho radius", rows, [
            f"set title 'rotation number staircase ({lift.family})'",
            "set xlabel 't'",
            "set ylabel 'rho(t)'",
            f"plot '{args.plot}.dat' using 1:2 with lines title 'rho(t)', \\",
            f"     '{args.plot}.dat' using 1:2:3 with yerrorbars title 'enclosure'",
        ])
    return 0


def _cmd_denjoy(args, parser) -> int:
    lift = _build_lift(args, parser)
    fp = FamilyPoint(lift, args.t)
    part = return_partition(fp, args.x, args.index,
                            q_cap=args.q_cap)
    hat = None
    hat_err = ""
    if not args.no_hat:
        try:
            hat = hat_ell_bound_check(fp, x=args.x, n_index=args.index,
                                      q_cap=args.q_cap)
        except RotascopeError as exc:
            hat_err = f"{type(exc).__name__}: {exc}"
    def hat_json():
        if hat is None:
            return {"error": hat_err} if hat_err else None
        return {"quotient": hat.quotient, "uncertainty": hat.uncertainty,
                "bound": hat.bound, "ell": hat.ells[0],
                "chain_sum": hat.chain_sum, "holds": hat.holds}
    consts = distortion_constants(lift)
    def as_json():
        return {"pq": f"{part.pq.numerator}/{part.pq.denominator}",
                "x": part.x, "side": part.side,
                "intervals": {"L": [part.L.lo, part.L.hi],
                              "K": [part.K.lo, part.K.hi]},
                "constants": {"M": consts.M, "N": consts.N},
                "margins": part.margins,
                "checks": {k: v > 0.0 for k, v in part.margins.items()},
                "hat": hat_json()}
    def as_csv():
        rows = [("margin_" + k, v) for k, v in part.margins.items()]
        if hat is not None:
            rows += [("hat_quotient", hat.quotient), ("hat_bound", hat.bound),
                     ("hat_ell", hat.ells[0]), ("hat_chain_sum", hat.chain_sum)]
        return _csv_rows("key,value", rows)
    _emit(args, as_json, as_csv)
    return 0 if (hat is None or hat.holds) else 1


def _cmd_conjugacy(args, parser) -> int:
    lift = _build_lift(args, parser)
    fp = FamilyPoint(lift, args.t)
    conj = conjugacy_from_orbit(fp, x0=args.x0, n=args.n, q_cap=args.q_cap)
    deriv = derivative_via_conjugacy(conj)
    res = conj.residual()
    ladder = []
    m = args.n // 2
    for _ in range(max(args.ladder, 0)):
        if m < 8:
            break
        c = conjugacy_from_orbit(fp, x0=args.x0, n=m, alpha=conj.alpha)
        ladder.append({"n": m, "residual": c.residual(),
                       "derivative": derivative_via_conjugacy(c)})
        m //= 2
    def as_json():
        out = {"alpha": conj.alpha, "n": conj.n, "residual": res,
               "derivative": deriv}
        if ladder:
            out["ladder"] = ladder
        return out
    def as_csv():
        return _csv_rows("alpha,n,residual,derivative",
                         [(conj.alpha, conj.n, res, deriv)])
    _emit(args, as_json, as_csv)
    if args.plot:
        rows = list(zip(conj.theta, conj.y_lift))
        _write_plot(args.plot, "theta h(theta)", rows, [
            "set title 'conjugacy to rigid rotation'",
            "set xlabel 'theta'",
            "set ylabel 'h(theta)'",
            f"plot '{args.plot}.dat' using 1:2 with lines title 'h', x title 'identity'",
        ])
    return 0


def _cmd_probe_convergents(args, parser) -> int:
    lift = _build_lift(args, parser)
    recs = quotient_sequence(lift, args.t, args.n_conv,
                             plateau_tol=args.plateau_tol,
                             q_cap=args.q_cap,
                             with_refined=not args.no_refined)
    def as_json():
        return {"records": [
            {"k": r.k, "p": r.pq.numerator, "q": r.pq.denominator,
             "t_prime": None if math.isnan(r.t_edge) else r.t_edge,
             "quotient": None if r.skipped else r.quotient,
             "uncertainty": None if r.skipped else r.uncertainty,
             "bound_coarse": r.bound_coarse,
             "bound_refined": r.bound_refined,
             "note": r.note} for r in recs]}
    def as_csv():
        rows = [(r.k, r.pq.numerator, r.pq.denominator,
                 None if math.isnan(r.t_edge) else r.t_edge,
                 None if r.skipped else r.quotient,
                 None if r.skipped else r.uncertainty,
                 r.bound_coarse, r.bound_refined) for r in recs]
        return _csv_rows("k,p,q,t_prime,quotient,uncertainty,bound_coarse,bound_refined",
                         rows)
    _emit(args, as_json, as_csv)
    if args.plot:
        rows = [(r.k, r.quotient, r.bound_coarse,
                 math.nan if r.bound_refined is None else r.bound_refined)
                for r in recs if not r.skipped]
        _write_plot(args.plot, "k quotient bound_coarse bound_refined", rows, [
            "set title 'difference quotients toward convergent plateaus'",
            "set xlabel 'convergent index k'",
            "set logscale y",
            f"plot '{args.plot}.dat' using 1:2 with linespoints title 'quotient', \\",
            f"     '{args.plot}.dat' using 1:3 with lines title 'exp(-M)', \\",
            f"     '{args.plot}.dat' using 1:4 with points title 'refined floor'",
        ])
    return 0


def _cmd_probe_boundary(args, parser) -> int:
    lift = _build_lift(args, parser)
    deltas = tuple(float(d) for d in args.deltas.split(","))
    probe = rational_boundary_probe(lift, Fraction(args.p, args.q), args.side,
                                    deltas, plateau_tol=args.plateau_tol,
                                    q_cap=args.q_cap)
    def as_json():
        return {"p": probe.pq.numerator, "q": probe.pq.denominator,
                "side": probe.side, "t_edge": probe.t_edge,
                "offsets": list(probe.offsets),
                "quotients": list(probe.quotients),
                "loglog_slope": probe.loglog_slope}
    def as_csv():
        return _csv_rows("delta,quotient", list(zip(probe.offsets, probe.quotients)))
    _emit(args, as_json, as_csv)
    if args.plot:
        rows = list(zip(probe.offsets, probe.quotients))
        _write_plot(args.plot, "delta quotient", rows, [
            "set title 'slope blow-up at a plateau edge'",
            "set xlabel 'offset delta'",
            "set ylabel 'difference quotient'",
            "set logscale xy",
            f"plot '{args.plot}.dat' using 1:2 with linespoints title 'quotient(delta)'",
        ])
    return 0


def _cmd_verify(args, parser) -> int:
    if args.suite == "all":
        ids = None
    else:
        ids = [s.strip() for s in args.suite.split(",") if s.strip()]
        unknown = set(ids) - set(CHECK_IDS)
        if unknown:
            parser.error(f"unknown check ids: {sorted(unknown)}; "
                         f"known: {', '.join(CHECK_IDS)}")
    report = run_suite(seed=args.seed, ids=ids)
    def as_csv():
        rows = [(c.id, c.ref, c.status, c.observed, c.bound, c.tol, c.seconds)
                for c in report.checks]
        return _csv_rows("id,ref,status,observed,bound,tol,seconds", rows)
    _emit(args, lambda: json.loads(report.to_json()), as_csv)
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotascope",
        description="Numerical instruments for rotation numbers of "
                    "circle-diffeomorphism families f_t = R_t o f.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--precision", type=int, default=15,
                        help="working decimal precision of the lift (>=15; "
                             "above 15 switches inner evaluations to mpmath)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized sampling (verify suite)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", parents=[common],
                       help="continued fraction expansion of a number")
    p.add_argument("--alpha", required=True, help="float or p/q")
    p.add_argument("--terms", type=int, default=64)
    p.set_defaults(fn=_cmd_cf)

    p = sub.add_parser("rho", parents=[common],
                       help="rotation number enclosure at one parameter")
    _add_family_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--method", choices=("farey", "birkhoff"), default="farey")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--q-cap", type=int, default=None)
    p.add_argument("--x0", type=float, default=0.0, help="birkhoff orbit start")
    p.add_argument("--n", type=int, default=10**5, help="birkhoff orbit length")
    p.set_defaults(fn=_cmd_rho)

    p = sub.add_parser("plateau", parents=[common],
                       help="endpoints of the locking plateau of p/q")
    _add_family_flags(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(fn=_cmd_plateau)

    p = sub.add_parser("inverse", parents=[common],
                       help="parameter whose rotation number is alpha")
    _add_family_flags(p)
    p.add_argument("--alpha", required=True, help="float or p/q")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--q-cap", type=int, default=None)
    p.set_defaults(fn=_cmd_inverse)

    p = sub.add_parser("jd", parents=[common],
                       help="measure of the parameter window around p/q")
    _add_family_flags(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--q-cap", type=int, default=None)
    p.set_defaults(fn=_cmd_jd)

    p = sub.add_parser("sweep", parents=[common],
                       help="staircase sweep over a parameter range")
    _add_family_flags(p)
    p.add_argument("--t-lo", type=float, default=-0.5)
    p.add_argument("--t-hi", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--q-cap", type=int, default=None)
    p.add_argument("--plot", default=None, metavar="NAME",
                   help="write NAME.dat and NAME.gp")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("denjoy", parents=[common],
                       help="first-return partition margins and hat bound")
    _add_family_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--index", type=int, default=4,
                   help="convergent index of the partition")
    p.add_argument("--q-cap", type=int, default=None)
    p.add_argument("--no-hat", action="store_true",
                   help="skip the hat-interval certificate")
    p.set_defaults(fn=_cmd_denjoy)

    p = sub.add_parser("conjugacy", parents=[common],
                       help="conjugacy to the rigid rotation from one orbit")
    _add_family_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--q-cap", type=int, default=None)
    p.add_argument("--ladder", type=int, default=0,
                   help="also report this many halved-n reruns")
    p.add_argument("--plot", default=None, metavar="NAME")
    p.set_defaults(fn=_cmd_conjugacy)

    p = sub.add_parser("probe", parents=[common],
                       help="difference-quotient probes")
    probe_sub = p.add_subparsers(dest="probe_command", required=True)

    pc = probe_sub.add_parser("convergents", parents=[common],
                              help="slopes toward convergent plateaus")
    _add_family_flags(pc)
    pc.add_argument("--t", type=float, required=True)
    pc.add_argument("--n-conv", type=int, default=7)
    pc.add_argument("--plateau-tol", type=float, default=1e-10)
    pc.add_argument("--q-cap", type=int, default=None)
    pc.add_argument("--no-refined", action="store_true")
    pc.add_argument("--plot", default=None, metavar="NAME")
    pc.set_defaults(fn=_cmd_probe_convergents)

    pb = probe_sub.add_parser("boundary", parents=[common],
                              help="slope ladder outside a plateau edge")
    _add_family_flags(pb)
    pb.add_argument("--p", type=int, required=True)
    pb.add_argument("--q", type=int, required=True)
    pb.add_argument("--side", choices=("left", "right"), default="right")
    pb.add_argument("--deltas", default="1e-2,1e-3,1e-4,1e-5,1e-6,1e-7")
    pb.add_argument("--plateau-tol", type=float, default=1e-9)
    pb.add_argument("--q-cap", type=int, default=None)
    pb.add_argument("--plot", default=None, metavar="NAME")
    pb.set_defaults(fn=_cmd_probe_boundary)

    p = sub.add_parser("verify", parents=[common],
                       help="run the acceptance check suite")
    p.add_argument("--suite", default="all",
                   help="'all' or comma separated check ids")
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, parser)
    except RotascopeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
