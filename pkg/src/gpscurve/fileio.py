"""JSON scenario files and CSV emission.

Rationals are written as ``"p/q"`` strings (integers without the slash) so a
dump followed by a parse reproduces the scenario exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from .curves import CurveError, Envelope, FlowSpec, ServiceCurve
from .plf import INF, PLF, PiecewiseLinear, envelope_violation, service_violation
from .simulator import Scenario, Trajectory


class ScenarioParseError(ValueError):
    """Invalid scenario file; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Options:
    flow: Optional[str] = None
    grid: Optional[tuple] = None
    tolerance: Fraction = Fraction(0)


@dataclass(frozen=True)
class ScenarioFile:
    flows: tuple
    curve: ServiceCurve
    process: Optional[PLF] = None
    horizon: Optional[Fraction] = None
    options: Options = field(default_factory=Options)
    raw_process: Optional[dict] = None

    @property
    def simulable(self) -> bool:
        return (
            self.process is not None
            and self.horizon is not None
            and all(fl.arrivals is not None for fl in self.flows)
        )

    def scenario(self) -> Scenario:
        if not self.simulable:
            raise ScenarioParseError("$", "simulation needs arrivals for every flow, a service process and a horizon")
        return Scenario(self.flows, self.process, self.horizon)

    def flow_ids(self) -> List[str]:
        return [fl.id for fl in self.flows]


# ---------------------------------------------------------------------------
# parsing


def parse_rational(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str, float)):
        raise ScenarioParseError(path, f"expected a rational, got {value!r}")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ScenarioParseError(path, f"not a rational: {value!r}") from None


def _get(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise ScenarioParseError(path, "expected an object")
    if key not in obj:
        raise ScenarioParseError(f"{path}.{key}", "missing field")
    return obj[key]


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioParseError(path, "expected a list")
    return value


def _segments(raw, path: str, cls=PLF) -> PiecewiseLinear:
    segs = []
    for k, seg in enumerate(_list(raw, path)):
        p = f"{path}[{k}]"
        segs.append(tuple(parse_rational(_get(seg, key, p), f"{p}.{key}") for key in ("start", "jump", "slope")))
    try:
        return cls.from_segments(segs)
    except ValueError as exc:
        raise ScenarioParseError(path, str(exc)) from None


def _envelope(raw, path: str) -> Envelope:
    kind = _get(raw, "kind", path)
    try:
        if kind == "unbounded":
            return Envelope.infinite()
        if kind == "token-buckets":
            pieces = _list(_get(raw, "pieces", path), f"{path}.pieces")
            if not pieces:
                raise ScenarioParseError(f"{path}.pieces", "need at least one token bucket")
            lines = []
            for k, pc in enumerate(pieces):
                p = f"{path}.pieces[{k}]"
                sigma = parse_rational(_get(pc, "sigma", p), f"{p}.sigma")
                rho = parse_rational(_get(pc, "rho", p), f"{p}.rho")
                if sigma < 0 or rho < 0:
                    raise ScenarioParseError(p, "sigma and rho must be nonnegative")
                lines.append((sigma, rho))
            return Envelope.token_buckets(lines)
        if kind == "pl-concave":
            return Envelope(_segments(_get(raw, "segments", path), f"{path}.segments"))
    except CurveError as exc:
        raise ScenarioParseError(path, str(exc)) from None
    raise ScenarioParseError(f"{path}.kind", f"unknown envelope kind {kind!r}")


def _curve(raw, path: str) -> ServiceCurve:
    kind = _get(raw, "kind", path)
    try:
        if kind == "latency-rates":
            pieces = _list(_get(raw, "pieces", path), f"{path}.pieces")
            out = []
            for k, pc in enumerate(pieces):
                p = f"{path}.pieces[{k}]"
                out.append((parse_rational(_get(pc, "R", p), f"{p}.R"), parse_rational(_get(pc, "L", p), f"{p}.L")))
            return ServiceCurve.latency_rates(out)
        if kind == "pl-convex":
            return ServiceCurve(_segments(_get(raw, "segments", path), f"{path}.segments"))
    except CurveError as exc:
        raise ScenarioParseError(path, str(exc)) from None
    raise ScenarioParseError(f"{path}.kind", f"unknown service curve kind {kind!r}")


def _grid(raw, path: str) -> tuple:
    if isinstance(raw, str):
        return parse_grid(raw, path)
    return tuple(parse_rational(v, f"{path}[{k}]") for k, v in enumerate(_list(raw, path)))


def parse_grid(text: str, path: str = "--grid") -> tuple:
    """``t0:t1:step`` (inclusive) or a comma-separated list of times."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ScenarioParseError(path, "range grid must be t0:t1:step")
        t0, t1, step = (parse_rational(p, path) for p in parts)
        if step <= 0:
            raise ScenarioParseError(path, "grid step must be positive")
        out = []
        t = t0
        while t <= t1:
            out.append(t)
            t += step
        pts = tuple(out)
    else:
        pts = tuple(parse_rational(p, path) for p in text.split(","))
    if any(t < 0 for t in pts) or list(pts) != sorted(pts):
        raise ScenarioParseError(path, "grid times must be nonnegative and ascending")
    return pts


def load_scenario(data: dict, check_compliance: bool = True) -> ScenarioFile:
    """Validate an already decoded scenario document."""
    if not isinstance(data, dict):
        raise ScenarioParseError("$", "expected an object")
    flows = []
    seen = set()
    for k, raw in enumerate(_list(_get(data, "flows", "$"), "$.flows")):
        p = f"$.flows[{k}]"
        fid = _get(raw, "id", p)
        if not isinstance(fid, str):
            raise ScenarioParseError(f"{p}.id", "flow id must be a string")
        if fid in seen:
            raise ScenarioParseError(f"{p}.id", f"duplicate flow id {fid!r}")
        seen.add(fid)
        weight = parse_rational(_get(raw, "weight", p), f"{p}.weight")
        if weight <= 0:
            raise ScenarioParseError(f"{p}.weight", "weight must be positive")
        env = _envelope(_get(raw, "envelope", p), f"{p}.envelope")
        arrivals = None
        if "arrivals" in raw:
            ap = f"{p}.arrivals"
            akind = _get(raw["arrivals"], "kind", ap)
            if akind == "greedy":
                if env.unbounded:
                    raise ScenarioParseError(ap, "greedy arrivals need a bounded envelope")
                arrivals = env.plf
            elif akind == "pl":
                arrivals = _segments(_get(raw["arrivals"], "segments", ap), f"{ap}.segments")
                if check_compliance and not env.unbounded:
                    wit = envelope_violation(arrivals, env.plf)
                    if wit is not None:
                        s, t = wit
                        raise ScenarioParseError(ap, f"arrivals exceed the envelope on (s, t) = ({s}, {t})")
            else:
                raise ScenarioParseError(f"{ap}.kind", f"unknown arrivals kind {akind!r}")
        flows.append(FlowSpec(fid, weight, env, arrivals))
    service = _get(data, "service", "$")
    curve = _curve(_get(service, "curve", "$.service"), "$.service.curve")
    process = None
    raw_process = service.get("process") if isinstance(service, dict) else None
    if raw_process is not None:
        pp = "$.service.process"
        pkind = _get(raw_process, "kind", pp)
        if pkind == "lazy":
            process = curve.plf
        elif pkind == "pl":
            process = _segments(_get(raw_process, "segments", pp), f"{pp}.segments")
            if check_compliance:
                wit = service_violation(process, curve.plf)
                if wit is not None:
                    s, t = wit
                    raise ScenarioParseError(pp, f"service falls below the curve on (s, t) = ({s}, {t})")
        else:
            raise ScenarioParseError(f"{pp}.kind", f"unknown process kind {pkind!r}")
    horizon = None
    if "horizon" in data:
        horizon = parse_rational(data["horizon"], "$.horizon")
        if horizon <= 0:
            raise ScenarioParseError("$.horizon", "horizon must be positive")
    opts = data.get("options", {}) or {}
    flow = opts.get("flow")
    if flow is not None and flow not in seen:
        raise ScenarioParseError("$.options.flow", f"unknown flow id {flow!r}")
    options = Options(
        flow=flow,
        grid=_grid(opts["grid"], "$.options.grid") if "grid" in opts else None,
        tolerance=parse_rational(opts.get("tolerance", 0), "$.options.tolerance"),
    )
    return ScenarioFile(tuple(flows), curve, process, horizon, options, raw_process)


def parse_scenario(path, check_compliance: bool = True) -> ScenarioFile:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError("$", f"invalid JSON: {exc}") from None
    return load_scenario(data, check_compliance)


# ---------------------------------------------------------------------------
# dumping


def fmt_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _dump_segments(f: PiecewiseLinear) -> list:
    return [{"start": fmt_rational(s), "jump": fmt_rational(j), "slope": fmt_rational(r)} for s, j, r in f.segments]


def _dump_envelope(env: Envelope) -> dict:
    if env.unbounded:
        return {"kind": "unbounded"}
    return {"kind": "pl-concave", "segments": _dump_segments(env.plf)}


def dump_scenario(sf: ScenarioFile) -> dict:
    """Lossless document for ``sf``; curves are written as segment lists."""
    flows = []
    for fl in sf.flows:
        entry = {"id": fl.id, "weight": fmt_rational(fl.weight), "envelope": _dump_envelope(fl.envelope)}
        if fl.arrivals is not None:
            entry["arrivals"] = {"kind": "pl", "segments": _dump_segments(fl.arrivals)}
        flows.append(entry)
    service = {"curve": {"kind": "pl-convex", "segments": _dump_segments(sf.curve.plf)}}
    if sf.process is not None:
        service["process"] = {"kind": "pl", "segments": _dump_segments(sf.process)}
    out = {"flows": flows, "service": service}
    if sf.horizon is not None:
        out["horizon"] = fmt_rational(sf.horizon)
    opts = {}
    if sf.options.flow is not None:
        opts["flow"] = sf.options.flow
    if sf.options.grid is not None:
        opts["grid"] = [fmt_rational(t) for t in sf.options.grid]
    if sf.options.tolerance:
        opts["tolerance"] = fmt_rational(sf.options.tolerance)
    if opts:
        out["options"] = opts
    return out


def dumps_scenario(sf: ScenarioFile) -> str:
    return json.dumps(dump_scenario(sf), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# CSV


def render(value) -> str:
    """Decimal text with 12 significant digits; ``inf`` for infinity."""
    if value == INF:
        return "inf"
    q = Fraction(value)
    if q == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = 12
        d = Decimal(q.numerator) / Decimal(q.denominator)
    text = format(d.normalize(), "f") if abs(d.adjusted()) < 15 else format(d.normalize(), "E")
    return text


def _table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def emit_curve_csv(f: PiecewiseLinear, grid: Sequence) -> str:
    """``t,value`` rows with the left-continuous value at each grid time."""
    return _table(["t", "value"], ([render(t), render(f.eval(t))] for t in grid))


def emit_breakpoints_csv(f: PiecewiseLinear) -> str:
    """Breakpoint table ``t,value,slope`` (value at ``t``, slope after ``t``)."""
    rows = [[render(s), render(f.eval_right(s)), render(r)] for s, _, r in f.segments
            if f.inf_from is None or s < f.inf_from]
    if f.inf_from is not None:
        rows.append([render(f.inf_from), "inf", "inf"])
    return _table(["t", "value", "slope"], rows)


def trajectory_grid(traj: Trajectory) -> List[Fraction]:
    return traj.check_times()


def emit_trajectory_csv(traj: Trajectory, grid: Optional[Sequence] = None) -> str:
    """``t,D_<id>...,B_<id>...`` rows; the default grid is every breakpoint."""
    ids = list(traj.departures)
    grid = trajectory_grid(traj) if grid is None else grid
    header = ["t"] + [f"D_{j}" for j in ids] + [f"B_{j}" for j in ids]
    rows = (
        [render(t)] + [render(traj.departures[j].eval(t)) for j in ids]
        + [render(traj.backlogs[j].eval(t)) for j in ids]
        for t in grid
    )
    return _table(header, rows)


def emit_events_csv(traj: Trajectory) -> str:
    """``t,members`` where members are the non-backlogged flows, space separated."""
    return _table(["t", "members"], ([render(t), " ".join(sorted(map(str, m)))] for t, m in traj.events))
