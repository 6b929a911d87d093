"""Scenario files: JSON in, validated dataclasses out.

dB-valued fields carry a ``_db``/``_dbm`` suffix and are converted to linear
units only when building the library objects.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .channel import ChannelParams
from .errors import ScenarioError
from .evaluation import SystemConfig, dbm_to_watts
from .geometry import Position, TargetArea, UniformDeployment
from .pattern import METHODS, SynthConfig


@dataclass
class GeometrySection:
    irs: list = field(default_factory=lambda: [0.0, 0.0, 10.0])
    irs_axis: list = field(default_factory=lambda: [1.0, 0.0, 0.0])
    ap_center: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    ap_radius: float = 10.0
    phi_r1: float = 0.0
    area_center: list = field(default_factory=lambda: [150.0, 0.0, 0.0])
    area_length: float = 100.0
    area_width: float = 40.0
    grid_step: float = 0.5


@dataclass
class ChannelSection:
    epsilon_db: float = 10.0
    delta_db: float = 10.0
    alpha1: float = 2.0
    alpha2: float = 2.0
    c0_db: float = -40.0
    dbar: float = 0.5
    N: int = 128
    M: int = 4


@dataclass
class SystemSection:
    p_max_dbm: float = 23.0
    noise_dbm: float = -90.0


@dataclass
class SolverSection:
    method: str = "two_step"
    grid_points: int | None = None
    max_iters: int = 100
    tol: float = 1e-7
    phase_bits: int | None = None
    seed: int = 0


@dataclass
class ExperimentSection:
    J: int | None = None  # None: the minimum AP count for the channel's N
    j_values: list = field(default_factory=lambda: list(range(1, 9)))
    n_values: list = field(default_factory=lambda: [128, 256, 512])
    rician_db: list = field(default_factory=lambda: [0.0, 10.0, 20.0, 30.0])
    trials: int = 100_000


SECTIONS = {
    "geometry": GeometrySection,
    "channel": ChannelSection,
    "system": SystemSection,
    "solver": SolverSection,
    "experiment": ExperimentSection,
}


@dataclass
class Scenario:
    geometry: GeometrySection = field(default_factory=GeometrySection)
    channel: ChannelSection = field(default_factory=ChannelSection)
    system: SystemSection = field(default_factory=SystemSection)
    solver: SolverSection = field(default_factory=SolverSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    # library objects

    def channel_params(self, N: int | None = None) -> ChannelParams:
        c = self.channel
        return ChannelParams(epsilon=_from_db(c.epsilon_db), delta=_from_db(c.delta_db),
                             alpha1=c.alpha1, alpha2=c.alpha2, c0=_from_db(c.c0_db),
                             dbar=c.dbar, N=c.N if N is None else N, M=c.M)

    def deployment(self) -> UniformDeployment:
        g = self.geometry
        return UniformDeployment(
            irs=Position(*map(float, g.irs)),
            area=TargetArea(Position(*map(float, g.area_center)), g.area_length, g.area_width),
            ap_radius=g.ap_radius, ap_center=Position(*map(float, g.ap_center)),
            phi_r1=g.phi_r1, grid_step=g.grid_step, irs_axis=tuple(map(float, g.irs_axis)))

    def system_config(self, geometry, N: int | None = None) -> SystemConfig:
        return SystemConfig(dbm_to_watts(self.system.p_max_dbm), dbm_to_watts(self.system.noise_dbm),
                            self.channel_params(N), geometry)

    def synth_config(self) -> SynthConfig:
        s = self.solver
        return SynthConfig(method=s.method, grid_points=s.grid_points, max_iters=s.max_iters,
                           tol=s.tol, phase_bits=s.phase_bits, seed=s.seed)


@dataclass(frozen=True)
class Diagnostic:
    field: str
    constraint: str
    actual: object

    def __str__(self):
        return f"{self.field}: expected {self.constraint}, got {self.actual!r}"


def _from_db(x: float) -> float:
    return math.inf if math.isinf(x) and x > 0 else 10.0 ** (x / 10.0)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _vec3(x) -> bool:
    return isinstance(x, list) and len(x) == 3 and all(_is_num(v) and math.isfinite(v) for v in x)


def _check(diags, name, ok, constraint, value):
    if not ok:
        diags.append(Diagnostic(name, constraint, value))


def _from_dict(data) -> tuple[Scenario, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object", field="<root>")
    for key in data:
        if key not in SECTIONS:
            diags.append(Diagnostic(key, "a known section " + "/".join(SECTIONS), "unknown section"))
    parts = {}
    for name, cls in SECTIONS.items():
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            diags.append(Diagnostic(name, "an object", raw))
            raw = {}
        known = {f.name for f in fields(cls)}
        for key in raw:
            if key not in known:
                diags.append(Diagnostic(f"{name}.{key}", "a known field", "unknown field"))
        parts[name] = cls(**{k: v for k, v in raw.items() if k in known})
    return Scenario(**parts), diags


def check_scenario(sc: Scenario) -> list[Diagnostic]:
    """Range and type checks; empty list means the scenario is usable."""
    d: list[Diagnostic] = []
    g, c, s, v, e = sc.geometry, sc.channel, sc.system, sc.solver, sc.experiment
    for name in ("irs", "irs_axis", "ap_center", "area_center"):
        _check(d, f"geometry.{name}", _vec3(getattr(g, name)), "a list of 3 finite numbers", getattr(g, name))
    if _vec3(g.irs_axis):
        _check(d, "geometry.irs_axis", any(x != 0 for x in g.irs_axis), "a nonzero vector", g.irs_axis)
    for name in ("ap_radius", "area_length", "area_width", "grid_step"):
        val = getattr(g, name)
        _check(d, f"geometry.{name}", _is_num(val) and val > 0, "> 0", val)
    _check(d, "geometry.phi_r1", _is_num(g.phi_r1) and -1 <= g.phi_r1 <= 1, "in [-1, 1]", g.phi_r1)
    if all(_is_num(x) and x > 0 for x in (g.area_length, g.area_width, g.grid_step)):
        limit = min(g.area_length, g.area_width) / 4
        _check(d, "geometry.grid_step", g.grid_step <= limit, f"<= {limit}", g.grid_step)
    if _vec3(g.irs):
        _check(d, "geometry.irs", g.irs[2] >= 0, "z >= 0", g.irs)

    for name in ("epsilon_db", "delta_db"):
        val = getattr(c, name)
        _check(d, f"channel.{name}", _is_num(val) and not math.isnan(val) and val != -math.inf,
               "a number (dB) or Infinity", val)
    for name in ("alpha1", "alpha2"):
        val = getattr(c, name)
        _check(d, f"channel.{name}", _is_num(val) and math.isfinite(val) and val >= 0, ">= 0", val)
    _check(d, "channel.c0_db", _is_num(c.c0_db) and math.isfinite(c.c0_db) and c.c0_db <= 0,
           "c0 in (0, 1], i.e. c0_db <= 0", c.c0_db)
    _check(d, "channel.dbar", _is_num(c.dbar) and c.dbar > 0, "> 0", c.dbar)
    _check(d, "channel.N", _is_int(c.N) and c.N >= 1, "N >= 1", c.N)
    _check(d, "channel.M", _is_int(c.M) and c.M >= 1, "M >= 1", c.M)

    _check(d, "system.p_max_dbm", _is_num(s.p_max_dbm) and math.isfinite(s.p_max_dbm), "a finite number", s.p_max_dbm)
    _check(d, "system.noise_dbm", _is_num(s.noise_dbm) and math.isfinite(s.noise_dbm), "a finite number", s.noise_dbm)

    _check(d, "solver.method", v.method in METHODS, "one of " + "/".join(METHODS), v.method)
    _check(d, "solver.grid_points", v.grid_points is None or (_is_int(v.grid_points) and v.grid_points >= 2),
           "null or an integer >= 2", v.grid_points)
    _check(d, "solver.max_iters", _is_int(v.max_iters) and v.max_iters >= 1, "an integer >= 1", v.max_iters)
    _check(d, "solver.tol", _is_num(v.tol) and v.tol > 0, "> 0", v.tol)
    _check(d, "solver.phase_bits", v.phase_bits is None or (_is_int(v.phase_bits) and 1 <= v.phase_bits <= 8),
           "null or an integer in [1, 8]", v.phase_bits)
    _check(d, "solver.seed", _is_int(v.seed) and 0 <= v.seed < 2 ** 64, "an unsigned 64-bit integer", v.seed)

    _check(d, "experiment.J", e.J is None or (_is_int(e.J) and e.J >= 1), "null or an integer >= 1", e.J)
    for name in ("j_values", "n_values"):
        val = getattr(e, name)
        _check(d, f"experiment.{name}", isinstance(val, list) and len(val) > 0 and all(_is_int(x) and x >= 1 for x in val),
               "a nonempty list of integers >= 1", val)
    _check(d, "experiment.rician_db", isinstance(e.rician_db, list) and len(e.rician_db) > 0
           and all(_is_num(x) and not math.isnan(x) and x != -math.inf for x in e.rician_db),
           "a nonempty list of numbers (dB)", e.rician_db)
    _check(d, "experiment.trials", _is_int(e.trials) and e.trials >= 100, "an integer >= 100", e.trials)
    return d


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}", field="<file>") from exc


def _parse_json(text: str):
    if not text.strip():
        raise ScenarioError("scenario file is empty", field="<root>", line=1)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg}", field="<root>", line=exc.lineno) from exc


def field_line(text: str, name: str) -> int | None:
    """1-based line of the key for dotted field ``name`` in the JSON text, if present.

    A textual search: each key is looked up after the position of its parent key.
    """
    pos = 0
    for part in name.split("."):
        i = text.find(json.dumps(part), pos)
        if i < 0:
            return None
        pos = i
    return text.count("\n", 0, pos) + 1


def validate_scenario(path) -> list[Diagnostic]:
    sc, diags = _from_dict(_parse_json(_read_text(path)))
    return diags + check_scenario(sc)


def parse_scenario_dict(data, text: str | None = None) -> Scenario:
    sc, diags = _from_dict(data)
    diags += check_scenario(sc)
    if diags:
        first = diags[0]
        line = field_line(text, first.field) if text is not None else None
        raise ScenarioError("; ".join(map(str, diags)), field=first.field, line=line)
    return sc


def load_scenario(path) -> Scenario:
    text = _read_text(path)
    return parse_scenario_dict(_parse_json(text), text)


def dump_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(json.dumps(sc.to_dict(), indent=2) + "\n", encoding="utf-8")
