"""Command-line front end.

    magline classify --field rot-z --ic=2,0,0,0,0,1
    magline trace --field trans-z --strength 2 --ic=0,0,0,0.8660254037844386,0,0.5 --format csv
    magline compare --field rot-z --ic=1,0,0,0,0,1 --t-end 10
    magline export-plot --in run.json --out run.gp

Exit status: 0 ok, 1 usage error, 2 mathematically impossible request,
3 numerical failure (including a compare deviation above --tol).
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

from .classify import (CaseTag, InitialInvariants, classify, classify_invariants, cubic_profile,
                       ic_from_invariants, invariants_from_ic)
from .closedform import ClosedFormTrajectory
from .errors import (InconsistentICError, IntegrationError, MaglineError, NonExistentTrajectory,
                     QuadratureAccuracyError, QuadratureDomainError)
from .fields import KillingField, State6
from .geometry import frenet_magnetic
from .integrate import IntegratorConfig, SampleTable, drift_report, integrate_trajectory

log = logging.getLogger("magline")

EXIT_OK, EXIT_USAGE, EXIT_IMPOSSIBLE, EXIT_NUMERIC = 0, 1, 2, 3
CSV_HEADER = ("t", "x", "y", "z", "vx", "vy", "vz", "speed_drift", "p0_drift", "q0_drift")
FIELD_LABELS = ("rot-x", "rot-y", "rot-z", "trans-x", "trans-y", "trans-z")
IC_NORMALIZE_TOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for impossible requests here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x):
    return format(float(x), ".17g")


def parse_ic(text):
    """Six comma-separated reals -> unit-speed State6.

    The velocity is rescaled to unit length if it is within 1e-6 of it,
    otherwise the ic is rejected.
    """
    try:
        vals = [float(v) for v in text.replace(" ", "").split(",")]
    except ValueError:
        raise UsageError(f"--ic must be six comma-separated reals, got {text!r}") from None
    if len(vals) != 6 or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"--ic must be six finite comma-separated reals, got {text!r}")
    ic = State6.from_sequence(vals)
    if abs(ic.speed - 1.0) > IC_NORMALIZE_TOL:
        raise UsageError(f"initial velocity has norm {ic.speed!r}; expected 1 within 1e-6")
    return ic.normalized()


def parse_invariants(text):
    try:
        vals = [float(v) for v in text.replace(" ", "").split(",")]
    except ValueError:
        vals = []
    if len(vals) not in (2, 3) or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"--invariants must be p0,q0[,rho0], got {text!r}")
    p0, q0 = vals[:2]
    rho0 = vals[2] if len(vals) == 3 else 1.0
    if not rho0 > 0:
        raise UsageError(f"rho0 must be positive, got {rho0!r}")
    return InitialInvariants(p0=p0, q0=q0, rho0=rho0)


def _config_from_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read --from file {path!r}: {exc}") from None
    cfg = data.get("config")
    if not isinstance(cfg, dict):
        raise UsageError(f"{path!r} has no 'config' object")
    return cfg, data.get("case")


def _run_config(args):
    """Resolve (field, ic, invariants, expected case, config dict) from the arguments."""
    loaded, expected = ({}, None)
    if getattr(args, "from_file", None):
        loaded, expected = _config_from_file(args.from_file)
    label = args.field or loaded.get("field", "rot-z")
    if label not in FIELD_LABELS:
        raise UsageError(f"unknown field {label!r}")
    strength = args.strength if args.strength is not None else loaded.get("strength", 1.0)
    if label.startswith("rot") and args.strength is not None:
        raise UsageError("--strength applies only to translation fields")
    if label.startswith("trans") and strength == 0:
        raise UsageError("--strength must be non-zero")
    field = KillingField.from_label(label, strength if label.startswith("trans") else 1.0)

    inv = None
    ic = None
    inv_text = getattr(args, "invariants", None)
    if args.ic and inv_text:
        raise UsageError("give either --ic or --invariants, not both")
    if inv_text:
        if not field.is_rotation or field.axis != "z":
            raise UsageError("--invariants is defined for the rot-z field only")
        inv = parse_invariants(inv_text)
    elif args.ic:
        ic = parse_ic(args.ic)
    elif "ic" in loaded:
        ic = parse_ic(",".join(repr(float(v)) for v in loaded["ic"]))
    elif "invariants_input" in loaded:
        v = loaded["invariants_input"]
        inv = InitialInvariants(p0=v["p0"], q0=v["q0"], rho0=v.get("rho0", 1.0))
    else:
        raise UsageError("an initial condition is required (--ic, --invariants or --from)")

    run = {"field": field.label, "strength": field.strength if not field.is_rotation else None}
    if ic is not None:
        run["ic"] = list(ic.as_array())
    else:
        run["invariants_input"] = {"p0": inv.p0, "q0": inv.q0, "rho0": inv.rho0}
    for name in ("t_end", "dt", "rel_tol", "abs_tol", "tol"):
        if hasattr(args, name):
            val = getattr(args, name)
            if val is None:
                val = loaded.get(name)
            if val is not None:
                run[name] = val
    return field, ic, inv, expected, run


def _integrator_config(run):
    try:
        return IntegratorConfig(rel_tol=run.get("rel_tol", 1e-10), abs_tol=run.get("abs_tol", 1e-10),
                                t_end=run.get("t_end", 10.0), sample_dt=run.get("dt", 0.01))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _resolve_case(field, ic, inv):
    """CaseTag plus, for invariant input, a matching ic when one exists."""
    if ic is not None:
        return classify(ic, field), ic
    tag = classify_invariants(inv)
    if not tag.solvable:
        return tag, None
    try:
        return tag, ic_from_invariants(inv.p0, inv.q0, inv.rho0)
    except InconsistentICError as exc:
        raise UsageError(str(exc)) from None


def _invariants_dict(field, ic, inv):
    if not field.is_rotation:
        return {"strength": field.strength}
    if inv is None:
        inv = invariants_from_ic(ic.permuted(field.axis))
    out = {"p0": inv.p0, "q0": inv.q0, "rho0": inv.rho0}
    prof = cubic_profile(inv)
    out["delta"] = prof.delta
    out["coefficients"] = list(prof.coeffs)
    out["roots"] = list(prof.real_roots)
    if prof.root_interval is not None:
        lo, hi = prof.root_interval
        out["rho_interval"] = [math.sqrt(lo), math.sqrt(hi)]
    else:
        out["rho_interval"] = None
    return out


def _rows(table):
    cols = [table.t, *table.pos.T, *table.vel.T, table.speed_drift, table.p0_drift, table.q0_drift]
    return np.column_stack(cols)


def _table_json(table, extra=None):
    out = []
    for i, row in enumerate(_rows(table)):
        rec = dict(zip(CSV_HEADER, (float(v) for v in row)))
        if extra:
            for key, col in extra.items():
                val = float(col[i])
                rec[key] = val if math.isfinite(val) else None   # JSON has no NaN
        out.append(rec)
    return out


def _write(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _summary(table):
    sd, pd, qd = drift_report(table)
    return {"max_speed_drift": sd, "max_p0_drift": pd, "max_q0_drift": qd, "n_samples": len(table)}


def _emit(args, run, tag, invariants, table, extra=None, summary=None):
    if args.format == "csv":
        rows = _rows(table)
        header = list(CSV_HEADER)
        if extra:
            header += list(extra)
            rows = np.column_stack([rows, *extra.values()])
        _write(args, _csv_text(header, rows))
    else:
        doc = {"config": run, "case": tag.to_dict(), "invariants": invariants,
               "samples": _table_json(table, extra), "summary": summary or _summary(table)}
        _write(args, json.dumps(doc, indent=1) + "\n")


def _closed_form_table(field, ic, cfg):
    traj = ClosedFormTrajectory(field, ic)
    t = cfg.sample_times()
    pos, vel = traj.state(t)
    return SampleTable.from_states(field, t, pos, vel, ic)


def cmd_classify(args):
    field, ic, inv, _, run = _run_config(args)
    tag, _ = _resolve_case(field, ic, inv)
    invariants = _invariants_dict(field, ic, inv)
    doc = {"config": run, "case": tag.to_dict(), "invariants": invariants, "samples": [],
           "summary": {"case": str(tag), "solvable": tag.solvable}}
    if args.format == "csv":
        keys = ["case", "p0", "q0", "delta", "rho_min", "rho_max"]
        iv = invariants.get("rho_interval") or [float("nan")] * 2
        vals = [invariants.get("p0", float("nan")), invariants.get("q0", float("nan")),
                invariants.get("delta", float("nan")), iv[0], iv[1]]
        _write(args, ",".join(keys) + "\n" + ",".join([str(tag)] + [fmt(v) for v in vals]) + "\n")
    else:
        _write(args, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_trace(args):
    field, ic, inv, _, run = _run_config(args)
    cfg = _integrator_config(run)
    tag, ic = _resolve_case(field, ic, inv)
    if ic is None:
        raise NonExistentTrajectory(tag.reason)
    table = integrate_trajectory(field, ic, cfg)
    _emit(args, run, tag, _invariants_dict(field, ic, inv), table)
    return EXIT_OK


def cmd_closed_form(args):
    field, ic, inv, _, run = _run_config(args)
    cfg = _integrator_config(run)
    tag, ic = _resolve_case(field, ic, inv)
    if not tag.solvable:
        raise NonExistentTrajectory(tag.reason or "initial point on the rotation axis")
    table = _closed_form_table(field, ic, cfg)
    _emit(args, run, tag, _invariants_dict(field, ic, inv), table)
    return EXIT_OK


def cmd_compare(args):
    field, ic, inv, expected, run = _run_config(args)
    cfg = _integrator_config(run)
    tol = run.get("tol", 1e-5)
    tag, ic = _resolve_case(field, ic, inv)
    if expected is not None and CaseTag.from_dict(expected) != tag:
        print(f"magline: case tag changed: file has {expected}, recomputed {tag.to_dict()}",
              file=sys.stderr)
        return EXIT_NUMERIC
    if not tag.solvable:
        raise NonExistentTrajectory(tag.reason or "initial point on the rotation axis")
    num = integrate_trajectory(field, ic, cfg)
    exact = _closed_form_table(field, ic, cfg)
    dev = np.linalg.norm(num.pos - exact.pos, axis=1)
    summary = _summary(num)
    summary["max_deviation"] = float(dev.max())
    summary["tol"] = tol
    extra = {"x_cf": exact.pos[:, 0], "y_cf": exact.pos[:, 1], "z_cf": exact.pos[:, 2],
             "vx_cf": exact.vel[:, 0], "vy_cf": exact.vel[:, 1], "vz_cf": exact.vel[:, 2],
             "deviation": dev}
    _emit(args, run, tag, _invariants_dict(field, ic, inv), num, extra, summary)
    line = (f"case={tag} max_deviation={summary['max_deviation']:.3e} "
            f"max_speed_drift={summary['max_speed_drift']:.3e} "
            f"max_p0_drift={summary['max_p0_drift']:.3e} max_q0_drift={summary['max_q0_drift']:.3e}")
    print(line, file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK if summary["max_deviation"] <= tol else EXIT_NUMERIC


def cmd_frenet(args):
    field, ic, inv, _, run = _run_config(args)
    cfg = _integrator_config(run)
    tag, ic = _resolve_case(field, ic, inv)
    if ic is None:
        raise NonExistentTrajectory(tag.reason)
    table = integrate_trajectory(field, ic, cfg)
    kappa, tau = frenet_magnetic(field, table.pos, table.vel)
    summary = _summary(table)
    summary.update(kappa_min=float(kappa.min()), kappa_max=float(kappa.max()),
                   tau_min=float(np.nanmin(tau)) if np.any(np.isfinite(tau)) else None,
                   tau_max=float(np.nanmax(tau)) if np.any(np.isfinite(tau)) else None)
    _emit(args, run, tag, _invariants_dict(field, ic, inv), table,
          {"kappa": kappa, "tau": tau}, summary)
    return EXIT_OK


def _load_trajectory(path):
    """(t, pos, field label) from a CSV or JSON file written by this tool."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        s = doc["samples"]
        if not s:
            raise UsageError(f"{path!r} holds no samples")
        t = np.array([r["t"] for r in s])
        pos = np.array([[r["x"], r["y"], r["z"]] for r in s])
        return t, pos, doc.get("config", {}).get("field")
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or not {"t", "x", "y", "z"} <= set(rows[0]):
        raise UsageError(f"{path!r} is not a trajectory file")
    t = np.array([float(r["t"]) for r in rows])
    pos = np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
    return t, pos, None


def plot_script(t, pos, axis="z", title="magnetic curve"):
    """gnuplot script with inline data: 3-D curve and rho(t) side by side."""
    k = "xyz".index(axis)
    others = [i for i in range(3) if i != k]
    rho = np.hypot(pos[:, others[0]], pos[:, others[1]])
    lines = ["# magline plot script; run with: gnuplot -p <file>",
             "$traj << EOD", "# t x y z rho"]
    lines += [" ".join(fmt(v) for v in (ti, *p, r)) for ti, p, r in zip(t, pos, rho)]
    lines += ["EOD",
              "set multiplot layout 1,2 title '%s'" % title,
              "set title 'trajectory'",
              "set xlabel 'x'", "set ylabel 'y'", "set zlabel 'z'",
              "set view equal xyz",
              "splot $traj using 2:3:4 with lines notitle",
              "set title 'distance to the %s-axis'" % axis,
              "set xlabel 't'", "set ylabel 'rho'",
              "plot $traj using 1:5 with lines notitle",
              "unset multiplot", ""]
    return "\n".join(lines)


def cmd_export_plot(args):
    try:
        t, pos, label = _load_trajectory(args.input)
    except OSError as exc:
        print(f"magline: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    axis = args.axis or (label[-1] if label and label.startswith("rot") else "z")
    _write(args, plot_script(t, pos, axis, title=os.path.basename(args.input)))
    return EXIT_OK


def _add_common(p, *, invariants=False, sampling=True, tol=False):
    p.add_argument("--field", choices=FIELD_LABELS, default=None,
                   help="Killing field (default rot-z)")
    p.add_argument("--strength", type=float, default=None, help="translation strength s")
    p.add_argument("--ic", default=None, help="x0,y0,z0,u0,v0,w0 (write --ic=... for a leading minus)")
    if invariants:
        p.add_argument("--invariants", default=None,
                       help="p0,q0[,rho0] instead of --ic (rot-z only)")
    p.add_argument("--from", dest="from_file", default=None,
                   help="reuse the config of a JSON file written by this tool")
    if sampling:
        p.add_argument("--t-end", dest="t_end", type=float, default=None)
        p.add_argument("--dt", type=float, default=None, help="sample spacing")
        p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
        p.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    if tol:
        p.add_argument("--tol", type=float, default=None,
                       help="max position deviation for success (default 1e-5)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser():
    parser = _Parser(prog="magline", description="Magnetic curves of Killing fields in R^3.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    p = sub.add_parser("classify", help="case tag, invariants, cubic data")
    _add_common(p, invariants=True, sampling=False)
    p.set_defaults(func=cmd_classify)
    p = sub.add_parser("trace", help="integrate the Lorentz ODE")
    _add_common(p)
    p.set_defaults(func=cmd_trace)
    p = sub.add_parser("closed-form", help="sample the closed-form solution")
    _add_common(p, invariants=True)
    p.set_defaults(func=cmd_closed_form)
    p = sub.add_parser("compare", help="closed form against the integrator")
    _add_common(p, invariants=True, tol=True)
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("frenet", help="curvature and torsion along a trace")
    _add_common(p)
    p.set_defaults(func=cmd_frenet)
    p = sub.add_parser("export-plot", help="gnuplot script from a trajectory file")
    p.add_argument("--in", dest="input", required=True, help="CSV or JSON trajectory file")
    p.add_argument("--axis", choices=("x", "y", "z"), default=None,
                   help="axis for rho(t) (default: field axis or z)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_plot)
    return parser


def _setup_logging():
    level = os.environ.get("MAGLINE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(name)s: %(levelname)s: %(message)s")


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"magline: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonExistentTrajectory as exc:
        print(f"magline: no trajectory: {exc.reason}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    except InconsistentICError as exc:
        print(f"magline: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, QuadratureAccuracyError, QuadratureDomainError,
            ArithmeticError) as exc:
        print(f"magline: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except MaglineError as exc:
        print(f"magline: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        # Reader went away (e.g. piped into head); silence the flush at exit.
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
