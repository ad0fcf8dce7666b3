"""Command-line entry point: ``gpscurve <command> scenario.json [options]``.

Exit status is 0 when every check passes, 1 on a violation and 2 on usage or
parse errors.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction
from typing import List, Optional

from . import bounds, curves, oracle
from .fileio import (
    ScenarioFile,
    ScenarioParseError,
    emit_breakpoints_csv,
    emit_curve_csv,
    emit_events_csv,
    emit_trajectory_csv,
    parse_grid,
    parse_rational,
    parse_scenario,
    render,
)
from .plf import INF, breakpoints
from .report import BoundReport, merge
from .simulator import gps_compliance, simulate

COMMANDS = ("leftover", "universal", "simulate", "bounds", "verify", "sample")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpscurve", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("scenario", help="scenario JSON file")
    parser.add_argument("--flow", help="flow of interest (default: options.flow, else every flow)")
    parser.add_argument("--grid", help="t0:t1:step or a comma-separated list of times")
    parser.add_argument("--tolerance", help="accepted negative slack (rational)")
    parser.add_argument("--seed", type=int, default=0, help="seed for verify's random subsets")
    parser.add_argument("--out", help="directory for CSV output (default: stdout)")
    return parser


class Run:
    def __init__(self, sf: ScenarioFile, args):
        self.sf = sf
        self.args = args
        self.flow = args.flow if args.flow is not None else sf.options.flow
        if self.flow is not None and self.flow not in sf.flow_ids():
            raise UsageError(f"unknown flow id {self.flow!r}")
        self.grid = parse_grid(args.grid) if args.grid is not None else sf.options.grid
        self.tolerance = parse_rational(args.tolerance, "--tolerance") if args.tolerance is not None else sf.options.tolerance
        self.out = args.out
        self.reports: List[BoundReport] = []

    # -- output ------------------------------------------------------------

    def write(self, name: str, text: str):
        if self.out is None:
            if name:
                sys.stdout.write(f"# {name}\n")
            sys.stdout.write(text)
            return
        os.makedirs(self.out, exist_ok=True)
        with open(os.path.join(self.out, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    def report(self, rep: BoundReport):
        self.reports.append(rep)
        print(rep.line(), file=sys.stdout if self.out is not None else sys.stderr)

    def targets(self) -> List[str]:
        return [self.flow] if self.flow is not None else self.sf.flow_ids()

    def status(self) -> int:
        return 0 if all(r.passed for r in self.reports) else 1

    def scenario(self):
        try:
            return self.sf.scenario()
        except ScenarioParseError as exc:
            raise UsageError(str(exc)) from None

    # -- commands ----------------------------------------------------------

    def curve_table(self, f) -> str:
        return emit_curve_csv(f, self.grid) if self.grid is not None else emit_breakpoints_csv(f)

    def cmd_leftover(self) -> int:
        for i in self.targets():
            S = curves.leftover(self.sf.flows, i, self.sf.curve)
            self.write(f"leftover_{i}.csv", self.curve_table(S))
        return 0

    def cmd_universal(self) -> int:
        self.write("universal.csv", self.curve_table(curves.universal(self.sf.flows, self.sf.curve)))
        return 0

    def cmd_simulate(self) -> int:
        traj = simulate(self.scenario())
        self.write("trajectory.csv", emit_trajectory_csv(traj, self.grid))
        self.write("events.csv", emit_events_csv(traj))
        self.report(gps_compliance(traj, tolerance=self.tolerance))
        return self.status()

    def cmd_sample(self) -> int:
        grid = self.grid
        if grid is None:
            top = self.sf.horizon or max(breakpoints(self.sf.curve.plf, *(
                fl.envelope.plf for fl in self.sf.flows if not fl.envelope.unbounded))) + 1
            grid = tuple(top * k / 10 for k in range(11))
        ids = self.sf.flow_ids()
        S = {i: curves.leftover(self.sf.flows, i, self.sf.curve) for i in ids}
        U = curves.universal(self.sf.flows, self.sf.curve)
        env = {fl.id: fl.envelope for fl in self.sf.flows}
        header = ["t", "C"] + [f"E_{i}" for i in ids] + [f"S_{i}" for i in ids] + ["universal"]
        lines = [",".join(header)]
        for t in grid:
            row = [render(t), render(self.sf.curve(t))]
            row += [render(env[i](t)) for i in ids]
            row += [render(S[i].eval(t)) for i in ids]
            row.append(render(U.eval(t)))
            lines.append(",".join(row))
        self.write("sample.csv", "\n".join(lines) + "\n")
        return 0

    def _bound_reports(self, traj):
        sc = traj.scenario
        total = sum(sc.weights.values())
        for i in self.targets():
            S = curves.leftover(sc.flows, i, self.sf.curve)
            self.report(bounds.check_strict_service(traj, i, S, self.tolerance))
            x = {i: sc.weights[i] / total}
            for rep in bounds.check_all_bounds(traj, x, self.tolerance):
                self.report(_renamed(rep, f"{rep.name}[{i}]"))
        x = {j: w / total for j, w in sc.weights.items()}
        for rep in bounds.check_all_bounds(traj, x, self.tolerance):
            self.report(_renamed(rep, f"{rep.name}[all]"))

    def cmd_bounds(self) -> int:
        self._bound_reports(simulate(self.scenario()))
        return self.status()

    def cmd_verify(self) -> int:
        sf = self.sf
        flows, curve = sf.flows, sf.curve
        ids = sf.flow_ids()
        times = _probe_times(sf, self.grid)
        # closed forms against subset enumeration
        for i in ids:
            S = curves.leftover(flows, i, curve)
            worst = min((-abs(S.eval(t) - oracle.leftover_bruteforce(flows, curve, i, t)) for t in times),
                        default=Fraction(0))
            self.report(BoundReport(f"leftover-oracle[{i}]", worst, len(times), None, self.tolerance))
        U = curves.universal(flows, curve)
        worst = Fraction(0)
        for t in times:
            a, b = U.eval(t), oracle.universal_bruteforce(flows, curve, t)
            if (a == INF) != (b == INF) or (a != INF and a != b):
                worst = min(worst, Fraction(-1) if INF in (a, b) else -abs(a - b))
        self.report(BoundReport("universal-oracle", worst, len(times), None, self.tolerance))
        if not sf.simulable:
            return self.status()
        traj = simulate(self.scenario())
        self.report(gps_compliance(traj, tolerance=self.tolerance))
        over = max(traj.internal_events, default=0) - len(ids)
        self.report(BoundReport("event-count", Fraction(min(0, -over)), len(traj.internal_events)))
        self._bound_reports(traj)
        rng = random.Random(self.args.seed)
        found = {"theorem2": [], "corollary1": [], "corollary2": []}
        for k in range(20):
            members = [j for j in ids if rng.random() < 0.5]
            x = bounds.random_feasible_shares(traj.scenario.weights, members, rng, exact_edge=k % 4 == 0)
            for rep in bounds.check_all_bounds(traj, x, self.tolerance):
                found[rep.name].append(rep)
        for name, reps in found.items():
            self.report(merge(f"{name}[20 random subsets]", reps, self.tolerance))
        if _is_greedy_lazy(sf):
            closed = curves.greedy_lazy(flows, curve)
            worst = Fraction(0)
            for t in traj.event_times() + [traj.horizon]:
                for j in ids:
                    worst = min(worst, -abs(traj.departures[j].eval(t) - closed[j].eval(t)))
            self.report(BoundReport("greedy-lazy-tightness", worst, len(traj.events) * len(ids), None, self.tolerance))
        euler = oracle.simulate_euler(traj.scenario, traj.horizon / 256)
        gap = oracle.sup_gap(traj, euler)
        K = oracle.max_backlog_speed(traj)
        bound = float(K * traj.horizon / 256)
        # float oracle: allow rounding noise
        self.report(BoundReport("euler-gap", Fraction(bound - gap), 1, None, max(self.tolerance, Fraction(1, 10**9)),
                                f"gap {gap:.6g} <= K dt {bound:.6g}"))
        return self.status()


def _renamed(rep: BoundReport, name: str) -> BoundReport:
    return BoundReport(name, rep.worst_slack, rep.checked, rep.witness, rep.tolerance, rep.detail)


def _is_greedy_lazy(sf: ScenarioFile) -> bool:
    if sf.process is None or not sf.process.same_function(sf.curve.plf):
        return False
    return all(
        not fl.envelope.unbounded and fl.arrivals is not None and fl.arrivals.same_function(fl.envelope.plf)
        for fl in sf.flows
    )


def _probe_times(sf: ScenarioFile, grid) -> List[Fraction]:
    pts = set(t for t in (grid or ()) if t > 0)
    fs = [sf.curve.plf] + [fl.envelope.plf for fl in sf.flows if not fl.envelope.unbounded]
    bps = breakpoints(*fs)
    top = sf.horizon or bps[-1] + 1
    bps = sorted(set(bps) | {top})
    for u, v in zip(bps, bps[1:]):
        pts.update((u, (u + v) / 2, v))
    pts.update((top + 1, 2 * top))
    return sorted(t for t in pts if t > 0)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sf = parse_scenario(args.scenario)
        run = Run(sf, args)
        return getattr(run, f"cmd_{args.command}")()
    except (ScenarioParseError, UsageError, curves.CurveError, OSError) as exc:
        print(f"gpscurve: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
