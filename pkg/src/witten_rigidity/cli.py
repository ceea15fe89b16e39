"""``theta-rigidity`` command-line interface.

Exit status: 0 success/pass, 1 a check failed, 2 input error, 3 pole or
numerical error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import mpmath

from . import __version__
from .errors import CaseError, DomainError, InstanceError, PoleError, PrecisionError, QuadratureError
from .genus import witten_genus
from .instance import load_instance
from .lefschetz import lefschetz_component, lefschetz_total
from .precision import PrecisionConfig, Tau, parse_complex, working_precision
from .rigidity import (RELATIONS, S_MAP, T_MAP, AnomalyCondition, anomaly_check, default_grid,
                       periodicity_check, pole_scan, rigidity_scan, st_relation_check)
from .theta import jacobi_identity_residual, theta_v_deriv

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_T_SAMPLE = ("0.11+0.07i", "0.23+0.19i", "0.31+0.05i", "0.07+0.29i", "0.17+0.13i")

log = logging.getLogger("witten_rigidity")


def fmt(z, digits: int = 20) -> str:
    z = mpmath.mpmathify(z)
    if isinstance(z, mpmath.mpc):
        re, im = z.real, z.imag
        sign = "-" if im < 0 else "+"
        return f"{mpmath.nstr(re, digits)} {sign} {mpmath.nstr(abs(im), digits)}i"
    return mpmath.nstr(z, digits)


class Output:
    """Collects text for stdout and an optional payload for ``--out``."""

    def __init__(self, args):
        self.args = args
        self.lines: list[str] = []

    def say(self, line: str = ""):
        self.lines.append(line)

    def flush(self, payload=None, csv_rows=None, csv_header=None):
        fmt_kind = self.args.format
        if fmt_kind == "json" and payload is not None:
            text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
        elif fmt_kind == "csv" and csv_rows is not None:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(csv_header)
            writer.writerows(csv_rows)
            text = buf.getvalue()
        else:
            text = "\n".join(self.lines) + "\n"
        sys.stdout.write(text)
        if self.args.out:
            if csv_rows is not None and fmt_kind != "json":
                buf = io.StringIO()
                writer = csv.writer(buf, lineterminator="\n")
                writer.writerow(csv_header)
                writer.writerows(csv_rows)
                out_text = buf.getvalue()
            elif payload is not None:
                out_text = json.dumps(payload, indent=2) + "\n"
            else:
                out_text = text
            with open(self.args.out, "w", encoding="utf-8") as fh:
                fh.write(out_text)


def _config(args, inst=None) -> PrecisionConfig:
    if args.precision is not None:
        return PrecisionConfig(digits=args.precision)
    return inst.cfg if inst is not None else PrecisionConfig()


def _tau(args, inst):
    return Tau(args.tau) if args.tau else inst.tau


def _t(args, inst):
    return parse_complex(args.t) if args.t else inst.t


def _digits(cfg) -> int:
    return min(cfg.digits, 30)


# commands -------------------------------------------------------------------------

def cmd_theta(args) -> int:
    cfg = _config(args)
    out = Output(args)
    with working_precision(cfg):
        tau = Tau(args.tau or "i")
        v = parse_complex(args.v or "0")
        value = theta_v_deriv(args.kind, v, tau, args.order, cfg)
        resid = jacobi_identity_residual(tau, cfg)
        d = _digits(cfg)
        label = args.kind if args.order == 0 else f"d^{args.order}/dv^{args.order} {args.kind}"
        out.say(f"{label}(v={fmt(v, 10)}, tau={fmt(tau.value, 10)}) = {fmt(value, d)}")
        out.say(f"jacobi identity residual: {mpmath.nstr(resid, 5)}")
        out.flush({"kind": args.kind, "order": args.order, "v": fmt(v, d), "tau": fmt(tau.value, d),
                   "value": fmt(value, d), "jacobi_residual": mpmath.nstr(resid, 5)})
    return EXIT_OK


def cmd_lefschetz(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args, inst)
    out = Output(args)
    tau, t = _tau(args, inst), _t(args, inst)
    data = inst.data
    with working_precision(cfg):
        d = _digits(cfg)
        per = [(c.name, lefschetz_component(data.case, c, data.E, t, tau, cfg, args.convention))
               for c in data.components]
        total = mpmath.fsum(v for _, v in per)
        out.say(f"instance {data.name}: case {data.case.dimension_class}, lambda={data.case.lam}, k={data.case.k}")
        out.say(f"t = {fmt(t, 12)}, tau = {fmt(tau.value, 12)}, prefactor convention: {args.convention}")
        for name, v in per:
            out.say(f"  component {name}: {fmt(v, d)}")
        out.say(f"total: {fmt(total, d)}")
        notes = _lefschetz_notes(data, args.convention)
        for note in notes:
            out.say(f"note: {note}")
        out.flush({"instance": data.name, "convention": args.convention,
                   "components": {n: fmt(v, d) for n, v in per}, "total": fmt(total, d), "notes": notes})
    return EXIT_OK


def _lefschetz_notes(data, convention) -> list:
    notes = []
    if convention == "printed" and data.case.lam in (2, 3):
        signs = sorted({(-1) ** (c.r_bar + 1) for c in data.components})
        if signs != [1]:
            notes.append("printed normalisation differs from the index-form value by (-1)^(r+1) "
                         "on components with an even number r of normal lines")
    if data.case.is_odd:
        notes.append(f"odd factor ch(Q_j(E)) uses the connection of Q_j(E) itself, j = {data.case.odd_index}")
    return notes


def cmd_genus(args) -> int:
    inst = load_instance(args.instance)
    if inst.manifold is None:
        raise InstanceError("genus needs a 'manifold' section in the instance")
    cfg = _config(args, inst)
    out = Output(args)
    q_order = args.q_order if args.q_order is not None else inst.q_order
    series = witten_genus(inst.data.case, inst.manifold, q_order, cfg)
    with working_precision(cfg):
        d = _digits(cfg)
        out.say(f"genus of {inst.name} ({inst.data.case.dimension_class}, lambda={inst.data.case.lam}):")
        out.say(series.render(d))
        coeffs = {f"{e}/8": fmt(c, d) for e, c in sorted(series.coeffs.items())}
        notes = [f"integral over the whole manifold, dimension {inst.manifold.dim}"]
        out.flush({"instance": inst.name, "truncation_eighths": series.truncation, "coefficients": coeffs,
                   "notes": notes})
    return EXIT_OK


def _report_lines(out: Output, report, digits=8):
    status = "PASS" if report.passed else "FAIL"
    out.say(f"{report.name}: {status} residual={mpmath.nstr(report.residual, digits)} "
            f"tolerance={mpmath.nstr(report.tolerance, 3)}")


def cmd_check_periodicity(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args, inst)
    out = Output(args)
    shifts = ["2", "2tau"] if args.shift == "both" else [args.shift]
    reports = [periodicity_check(inst.data, _tau(args, inst), _t(args, inst), s, cfg) for s in shifts]
    for r in reports:
        _report_lines(out, r)
        if "requires_anomaly_condition" in r.detail:
            out.say(f"  anomaly condition holds: {r.detail['requires_anomaly_condition']}")
    out.flush({"reports": [r.to_dict() for r in reports]})
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_check_st(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args, inst)
    out = Output(args)
    lam = inst.data.case.lam
    if args.relation == "all":
        relations = list(RELATIONS)
    elif args.relation:
        relations = [args.relation]
    else:
        relations = [f"S:{lam}->{S_MAP[lam]}", f"T:{lam}->{T_MAP[lam]}"]
    sample = args.t_sample.split(",") if args.t_sample else list(DEFAULT_T_SAMPLE)
    reports = [st_relation_check(inst.data, rel, sample, _tau(args, inst), cfg) for rel in relations]
    for r in reports:
        _report_lines(out, r)
        det = r.detail
        out.say(f"  observed constant: {fmt(det['observed_constant'], 15)}")
        printed = det["printed_constant"]
        out.say(f"  printed constant:  {printed if isinstance(printed, str) else fmt(printed, 15)}")
        out.say(f"  derived constant:  {fmt(det['derived_constant'], 15)}")
    out.flush({"reports": [r.to_dict() for r in reports]})
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_check_anomaly(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args, inst)
    out = Output(args)
    case = inst.data.case
    cond = AnomalyCondition(args.alpha or case.alpha, args.beta or case.beta)
    report = anomaly_check(inst.data, cond, cfg)
    _report_lines(out, report)
    for name, parts in report.detail.items():
        if name == "condition":
            continue
        out.say(f"  {name}: " + ", ".join(f"{k}={mpmath.nstr(mpmath.mpf(v), 5)}" for k, v in parts.items()))
    out.flush(report.to_dict())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_scan_rigidity(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args, inst)
    out = Output(args)
    grid = default_grid(args.grid)
    report = rigidity_scan(inst.data, _tau(args, inst), grid, cfg)
    with working_precision(cfg):
        d = _digits(cfg)
        rows = [[mpmath.nstr(t.real, 10), mpmath.nstr(t.imag, 10), mpmath.nstr(v.real, d),
                 mpmath.nstr(v.imag, d), mpmath.nstr(dev, 5)] for t, v, dev in report.rows()]
        tol = cfg.tolerance(20)
        passed = report.max_deviation < tol
        out.say(f"rigidity scan of {inst.name}: {len(report.values)} points, {len(report.excluded)} excluded")
        out.say(f"mean value: {fmt(report.mean_value, d)}")
        out.say(f"max deviation: {mpmath.nstr(report.max_deviation, 5)} ({'rigid' if passed else 'not rigid'} "
                f"at tolerance {mpmath.nstr(tol, 3)})")
        out.flush({"instance": inst.name, "mean": fmt(report.mean_value, d),
                   "max_deviation": mpmath.nstr(report.max_deviation, 5), "rigid": passed,
                   "rows": rows, "excluded": [fmt(t, 10) for t in report.excluded]},
                  rows, ["t_re", "t_im", "value_re", "value_im", "deviation"])
    return EXIT_OK if passed else EXIT_FAIL


def cmd_scan_poles(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args, inst)
    out = Output(args)
    report = pole_scan(inst.data, _tau(args, inst), cfg=cfg, grid=args.pole_grid)
    out.say(f"pole scan of {inst.name}: {len(report.predicted)} predicted points, "
            f"{len(report.detected)} blow-ups detected, {len(report.unmatched)} unmatched")
    for p, mag in report.detected:
        out.say(f"  blow-up near {fmt(p, 12)} (|L| = {mpmath.nstr(mag, 3)} beside it)")
    out.flush({"instance": inst.name,
               "predicted": [fmt(p, 12) for p in report.predicted],
               "detected": [{"t": fmt(p, 12), "magnitude": mpmath.nstr(m, 5)} for p, m in report.detected],
               "unmatched": [fmt(p, 12) for p in report.unmatched],
               "passed": report.passed})
    return EXIT_OK if report.passed else EXIT_FAIL


# parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, metavar="DIGITS",
                        help="decimal digits (default: instance value, else 60)")
    common.add_argument("--q-order", type=int, default=None, metavar="EIGHTHS",
                        help="q-series truncation in eighths (default 40)")
    common.add_argument("--grid", type=int, default=5, help="rigidity grid size n (n x n points)")
    common.add_argument("--out", default=None, help="also write the result to this path")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--tau", default=None, help="modular parameter, e.g. 0.3+0.8i")
    common.add_argument("--t", default=None, help="group parameter, e.g. 0.21+0.13i")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="theta-rigidity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta", parents=[common], help="evaluate a theta function")
    p.add_argument("--kind", default="theta1", choices=("theta", "theta1", "theta2", "theta3"))
    p.add_argument("--v", default="0")
    p.add_argument("--order", type=int, default=0, help="derivative order in v")
    p.set_defaults(func=cmd_theta)

    def with_instance(name, func, help_text):
        q = sub.add_parser(name, parents=[common], help=help_text)
        q.add_argument("instance", help="instance JSON file")
        q.set_defaults(func=func)
        return q

    q = with_instance("lefschetz", cmd_lefschetz, "evaluate the Lefschetz number")
    q.add_argument("--convention", choices=("derived", "printed"), default="derived")
    with_instance("genus", cmd_genus, "q-series of the generalized Witten genus")
    q = with_instance("check-periodicity", cmd_check_periodicity, "quasi-periodicity residuals")
    q.add_argument("--shift", choices=("2", "2tau", "both"), default="both")
    q = with_instance("check-st", cmd_check_st, "S/T modular relations")
    q.add_argument("--relation", default=None, help=f"one of {', '.join(RELATIONS)} or 'all'")
    q.add_argument("--t-sample", default=None, help="comma-separated t values")
    q = with_instance("check-anomaly", cmd_check_anomaly, "anomaly-cancellation identities")
    q.add_argument("--alpha", type=int, choices=(1, 3), default=None)
    q.add_argument("--beta", type=int, choices=(1, 3), default=None)
    with_instance("scan-rigidity", cmd_scan_rigidity, "t-independence over a grid")
    q = with_instance("scan-poles", cmd_scan_poles, "compare predicted and detected poles")
    q.add_argument("--pole-grid", type=int, default=31)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InstanceError, CaseError, DomainError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PoleError, PrecisionError, QuadratureError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
