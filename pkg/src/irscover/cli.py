"""Command-line front end: scenario JSON in, CSV tables out.

Usage::

    irscover <subcommand> --scenario PATH --out PATH [--seed N] [--trials N]
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .association import SubareaSpans, angular_deviation, brute_force_association, uniform_association
from .errors import IrsCoverError, ScenarioError
from .evaluation import (avg_received_power, db, dibf_worst_power, gain_vs_j_sweep, mc_link_power,
                         min_required_aps, plan_static_irs, serving_ap, snr_sweep, theorem1_gain,
                         worst_case_power)
from .pattern import AngularSpan, synth_anchored, worst_case_gain
from .scenario import Scenario, field_line, load_scenario, validate_scenario

SUBCOMMANDS = ("synth", "associate", "evaluate", "sweep-j", "sweep-rician", "validate",
               "theorems", "check")


class ChecksFailed(IrsCoverError):
    code = "checks-failed"
    exit_status = 9


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_table(path, columns, rows, meta: dict) -> None:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def _ap_count(sc: Scenario, N: int) -> int:
    if sc.experiment.J is not None:
        return sc.experiment.J
    return min_required_aps(N, sc.channel.dbar, sc.deployment().initial_deviation())


def _plan(sc: Scenario, N: int | None = None, J: int | None = None):
    N = sc.channel.N if N is None else N
    J = _ap_count(sc, N) if J is None else J
    return plan_static_irs(sc.deployment(), J, N, sc.channel.dbar, sc.synth_config())


def cmd_synth(sc, args):
    plan = _plan(sc)
    dbar = sc.channel.dbar
    rows = [{"element": n, "theta_rad": float(t)} for n, t in enumerate(plan.pattern.thetas)]
    meta = {"J": plan.geometry.J, "span_lo": fmt(plan.span.lo), "span_hi": fmt(plan.span.hi),
            "worst_case_gain": fmt(worst_case_gain(plan.pattern, plan.span, dbar)),
            "converged": fmt(plan.pattern.converged)}
    return ["element", "theta_rad"], rows, meta


def cmd_associate(sc, args):
    plan = _plan(sc)
    om = plan.spans.omega
    rows = []
    for k, j in enumerate(plan.association.assigned):
        rows.append({"subarea": k, "phi_lo": plan.spans.phi_min[k], "phi_hi": plan.spans.phi_max[k],
                     "ap": int(j), "omega": om[j],
                     "offset_lo": plan.spans.phi_min[k] - om[j], "offset_hi": plan.spans.phi_max[k] - om[j]})
    dmin, dmax, ds = angular_deviation(plan.association, plan.spans)
    meta = {"J": plan.geometry.J, "delta_min": fmt(dmin), "delta_max": fmt(dmax), "delta_s": fmt(ds),
            "initial_delta_s": fmt(sc.deployment().initial_deviation())}
    return ["subarea", "phi_lo", "phi_hi", "ap", "omega", "offset_lo", "offset_hi"], rows, meta


def cmd_evaluate(sc, args):
    plan = _plan(sc)
    cfg = sc.system_config(plan.geometry)
    res = worst_case_power(cfg, plan.pattern, plan.association, plan.bands)
    dibf = dibf_worst_power(cfg)
    rows = []
    for k, p in enumerate(res.subarea_minima):
        rows.append({"subarea": k, "ap": int(plan.association.assigned[k]), "worst_power_w": p,
                     "worst_snr_db": db(p / cfg.noise_power)})
    meta = {"J": plan.geometry.J, "worst_case_power_w": fmt(res.worst_case_power),
            "worst_location": ",".join(fmt(x) for x in res.worst_location),
            "dibf_worst_power_w": fmt(dibf), "loss_db": fmt(db(dibf / res.worst_case_power))}
    return ["subarea", "ap", "worst_power_w", "worst_snr_db"], rows, meta


def cmd_sweep_j(sc, args):
    rows = gain_vs_j_sweep(sc.deployment(), sc.experiment.j_values, sc.experiment.n_values,
                           sc.channel.dbar, sc.synth_config())
    return ["N", "J", "J_s", "delta_s", "worst_case_gain_db", "reference_db"], rows, {}


def cmd_sweep_rician(sc, args):
    rows = []
    for N in sc.experiment.n_values:
        plan = _plan(sc, N=N)
        single = _plan(sc, N=N, J=1)
        cfg = sc.system_config(plan.geometry, N)
        cfg1 = sc.system_config(single.geometry, N)
        main = snr_sweep(cfg, sc.experiment.rician_db, lambda c: plan.pattern, plan.association, plan.bands)
        base = snr_sweep(cfg1, sc.experiment.rician_db, lambda c: single.pattern,
                         single.association, single.bands)
        for r, b in zip(main, base):
            rows.append({"N": N, "J": plan.geometry.J, **r, "static_j1_snr_db": b["static_snr_db"]})
    cols = ["N", "J", "rician_db", "static_snr_db", "dibf_snr_db", "loss_db", "static_j1_snr_db"]
    return cols, rows, {}


def cmd_validate(sc, args):
    plan = _plan(sc)
    cfg = sc.system_config(plan.geometry)
    area = plan.geometry.area
    points = [tuple(area.center)] + [tuple(c) for c in area.corners()]
    rows = []
    for i, u in enumerate(points):
        j = serving_ap(plan.association, u, cfg, plan.bands)
        closed = avg_received_power(u, j, plan.pattern, cfg)
        est = mc_link_power(cfg, plan.pattern, j, u, args.trials, args.seed + i)
        z = est.zscore(closed)
        rows.append({"x": u[0], "y": u[1], "z": u[2], "ap": j, "closed_form_w": closed,
                     "mc_mean_w": est.mean, "std_error_w": est.std_error, "z_score": z,
                     "pass": abs(z) < 3})
    cols = ["x", "y", "z", "ap", "closed_form_w", "mc_mean_w", "std_error_w", "z_score", "pass"]
    return cols, rows, {"trials": args.trials}


def cmd_theorems(sc, args):
    dbar = sc.channel.dbar
    dep = sc.deployment()
    dsI = dep.initial_deviation()
    rows = []

    def add(check, expected, actual, tol, ok):
        rows.append({"check": check, "expected": float(expected), "actual": float(actual),
                     "tol": float(tol), "pass": bool(ok)})

    for N in sorted(set(sc.experiment.n_values) | {sc.channel.N}):
        span = AngularSpan(0.0, 1.0 / (N * dbar))
        got = worst_case_gain(synth_anchored(span, N, dbar), span, dbar)
        exp = theorem1_gain(N)
        add(f"beamwidth_gain N={N}", exp, got, 1e-9, abs(got - exp) <= 1e-9 * exp)
        add(f"beamwidth_gain_bound N={N}", 4 * N * N / math.pi ** 2, exp, 0.0, exp >= 4 * N * N / math.pi ** 2)
    for J in sc.experiment.j_values:
        geometry, bands = dep.build(J)
        spans = SubareaSpans.from_bands(bands, geometry.omegas())
        ds = angular_deviation(uniform_association(J, J), spans)[2]
        add(f"uniform_deviation J={J}", dsI / J, ds, 1e-12, abs(ds - dsI / J) <= 1e-12)
        if J <= 4:
            best = angular_deviation(brute_force_association(spans), spans)[2]
            add(f"oracle_deviation J={J}", dsI / J, best, 1e-12, best >= dsI / J - 1e-12)
    for N in sc.experiment.n_values:
        J = min_required_aps(N, dbar, dsI)
        plan = plan_static_irs(dep, J, N, dbar, sc.synth_config())
        cfg = sc.system_config(plan.geometry, N)
        cfg = cfg.replace(channel=cfg.channel.replace(epsilon=math.inf, delta=math.inf))
        ratio = worst_case_power(cfg, plan.pattern, plan.association, plan.bands).worst_case_power / dibf_worst_power(cfg)
        add(f"los_power_ratio N={N} J={J}", 4 / math.pi ** 2, ratio, 0.0, ratio >= 4 / math.pi ** 2)
    return ["check", "expected", "actual", "tol", "pass"], rows, {}


def cmd_check(sc_path, args):
    diags = validate_scenario(sc_path)
    text = Path(sc_path).read_text(encoding="utf-8")
    rows = [{"field": d.field, "line": field_line(text, d.field) or "", "constraint": d.constraint,
             "actual": json.dumps(d.actual)} for d in diags]
    return ["field", "line", "constraint", "actual"], rows, {}


COMMANDS = {
    "synth": cmd_synth,
    "associate": cmd_associate,
    "evaluate": cmd_evaluate,
    "sweep-j": cmd_sweep_j,
    "sweep-rician": cmd_sweep_rician,
    "validate": cmd_validate,
    "theorems": cmd_theorems,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irscover", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--seed", type=int, default=None, help="overrides solver.seed")
    p.add_argument("--trials", type=int, default=None, help="overrides experiment.trials")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "check":
            cols, rows, meta = cmd_check(args.scenario, args)
            digest = "-"
            seed = "-" if args.seed is None else args.seed
        else:
            sc = load_scenario(args.scenario)
            if args.seed is not None:
                sc.solver.seed = args.seed
            if args.trials is not None:
                sc.experiment.trials = args.trials
            args.seed, args.trials = sc.solver.seed, sc.experiment.trials
            cols, rows, meta = COMMANDS[args.subcommand](sc, args)
            digest, seed = sc.digest(), sc.solver.seed
        header = {"tool": f"irscover {__version__}", "command": args.subcommand,
                  "scenario_sha256": digest, "seed": seed, **meta}
        write_table(args.out, cols, rows, header)
        if args.subcommand == "theorems" and not all(r["pass"] for r in rows):
            raise ChecksFailed("one or more analytic checks failed")
        if args.subcommand == "validate" and not all(r["pass"] for r in rows):
            raise ChecksFailed("Monte Carlo disagrees with the closed form")
        if args.subcommand == "check" and rows:
            raise ScenarioError(f"{len(rows)} scenario diagnostics", field=rows[0]["field"],
                                line=rows[0]["line"] or None)
    except IrsCoverError as exc:
        err = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, ScenarioError):
            err.update(field=exc.field, line=exc.line)
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_status
    return 0


def main():
    sys.exit(run())
