"""Scenario geometry and the effective spatial frequencies it induces.

Every gain formula downstream consumes a single angular scalar per link: the
direction cosine of the link along the IRS array axis (``sin(zenith) *
cos(azimuth)`` in spherical terms). ``phi`` denotes the cosine from the IRS
towards a user location, ``omega`` the cosine from the IRS towards an AP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateGeometryError, InfeasiblePlacementError

DEFAULT_AXIS = (1.0, 0.0, 0.0)


class Position(NamedTuple):
    x: float
    y: float
    z: float


def _vec(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def _unit_axis(axis) -> np.ndarray:
    a = _vec(axis)
    n = np.linalg.norm(a)
    if a.shape != (3,) or not np.isfinite(n) or n == 0.0:
        raise DegenerateGeometryError(f"array axis must be a nonzero 3-vector, got {axis!r}")
    return a / n


@dataclass(frozen=True)
class TargetArea:
    """Axis-aligned rectangle on the ground plane."""

    center: Position
    length_x: float
    width_y: float

    def __post_init__(self):
        if self.length_x < 0 or self.width_y < 0:
            raise DegenerateGeometryError("area dimensions must be non-negative")

    def corners(self) -> np.ndarray:
        cx, cy, cz = self.center
        hx, hy = self.length_x / 2, self.width_y / 2
        return np.array([[cx + sx * hx, cy + sy * hy, cz]
                         for sx in (-1, 1) for sy in (-1, 1)])

    def grid(self, step: float) -> np.ndarray:
        """Uniform grid over the rectangle, edges and corners included. Shape (P, 3)."""
        if step <= 0:
            raise DegenerateGeometryError("grid_step must be positive")
        cx, cy, cz = self.center
        nx = max(int(math.ceil(self.length_x / step - 1e-9)), 0) + 1
        ny = max(int(math.ceil(self.width_y / step - 1e-9)), 0) + 1
        xs = cx + np.linspace(-self.length_x / 2, self.length_x / 2, nx)
        ys = cy + np.linspace(-self.width_y / 2, self.width_y / 2, ny)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, float(cz))])


@dataclass(frozen=True)
class ScenarioGeometry:
    irs: Position
    aps: tuple
    area: TargetArea
    grid_step: float = 0.5
    irs_axis: tuple = DEFAULT_AXIS

    def __post_init__(self):
        if len(self.aps) < 1:
            raise DegenerateGeometryError("at least one AP is required")
        irs = _vec(self.irs)
        for j, ap in enumerate(self.aps):
            if np.linalg.norm(_vec(ap) - irs) == 0.0:
                raise DegenerateGeometryError(f"AP {j} coincides with the IRS")
        _unit_axis(self.irs_axis)
        limit = min(self.area.length_x, self.area.width_y) / 4
        if self.grid_step <= 0 or (limit > 0 and self.grid_step > limit):
            raise DegenerateGeometryError(
                f"grid_step {self.grid_step} outside (0, {limit}]")
        d = np.linalg.norm(self.area.corners() - irs, axis=1)
        if np.any(d == 0.0):
            raise DegenerateGeometryError("IRS lies on the target area")

    @property
    def J(self) -> int:
        return len(self.aps)

    @property
    def axis(self) -> np.ndarray:
        return _unit_axis(self.irs_axis)

    def area_grid(self, step: float | None = None) -> np.ndarray:
        return self.area.grid(self.grid_step if step is None else step)

    def omegas(self) -> np.ndarray:
        """Direction cosine from the IRS towards every AP."""
        return direction_cosine(self.irs, np.asarray(self.aps, dtype=float), self.axis)

    def phis(self, points) -> np.ndarray:
        return direction_cosine(self.irs, points, self.axis)

    def with_aps(self, aps) -> "ScenarioGeometry":
        return ScenarioGeometry(self.irs, tuple(Position(*map(float, a)) for a in aps),
                                self.area, self.grid_step, tuple(self.irs_axis))


@dataclass(frozen=True)
class SubareaBand:
    """A subarea defined as the set of area points whose phi lies in [phi_lo, phi_hi]."""

    phi_lo: float
    phi_hi: float
    index: int = 0

    @property
    def width(self) -> float:
        return self.phi_hi - self.phi_lo

    def contains(self, phi):
        phi = np.asarray(phi)
        return (phi >= self.phi_lo) & (phi <= self.phi_hi)


def direction_cosine(frm, to, axis=DEFAULT_AXIS):
    """Cosine between ``to - frm`` and the array axis.

    ``to`` may be a single point or an array of points with shape (..., 3);
    the result then has shape (...).
    """
    d = _vec(to) - _vec(frm)
    norm = np.linalg.norm(d, axis=-1)
    if np.any(norm == 0.0):
        raise DegenerateGeometryError("zero-length displacement")
    c = (d @ _unit_axis(axis)) / norm
    c = np.clip(c, -1.0, 1.0)
    return float(c) if np.ndim(c) == 0 else c


def spatial_freq_bounds(area: TargetArea, irs, axis=DEFAULT_AXIS, grid_step=0.5):
    """(min, max) of the IRS-to-user direction cosine over the area grid and corners."""
    pts = np.vstack([area.grid(grid_step), area.corners()])
    phi = direction_cosine(irs, pts, axis)
    return float(np.min(phi)), float(np.max(phi))


def place_aps_uniform(J: int, phi_r1: float, delta_sI: float, radius: float,
                      irs, axis=DEFAULT_AXIS, center=(0.0, 0.0, 0.0)) -> list[Position]:
    """Place J APs on a horizontal circle so their cosines form an arithmetic progression.

    AP j (0-based) gets ``omega_j = phi_r1 + j * delta_sI / J``. For each target
    the circle angle is found by bracketing over [0, 2*pi) and refining with
    Brent's method; the first bracket in angle order wins, so the placement is
    deterministic.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    if radius <= 0:
        raise InfeasiblePlacementError("radius must be positive")
    irs_v, c_v, ax = _vec(irs), _vec(center), _unit_axis(axis)

    def cosine_at(a):
        p = c_v + radius * np.array([math.cos(a), math.sin(a), 0.0])
        d = p - irs_v
        n = np.linalg.norm(d)
        if n == 0.0:
            raise DegenerateGeometryError("AP circle passes through the IRS")
        return float(d @ ax / n)

    samples = np.linspace(0.0, 2 * math.pi, 1441)
    values = np.array([cosine_at(a) for a in samples])
    out = []
    for j in range(J):
        target = phi_r1 + j * delta_sI / J
        if not -1.0 <= target <= 1.0:
            raise InfeasiblePlacementError(f"direction cosine {target} outside [-1, 1]")
        f = values - target
        exact = np.flatnonzero(f == 0.0)
        cross = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)
        if exact.size and (not cross.size or exact[0] <= cross[0]):
            a = samples[exact[0]]
        elif cross.size:
            i = cross[0]
            a = brentq(lambda t: cosine_at(t) - target, samples[i], samples[i + 1],
                       xtol=1e-15, rtol=8.9e-16, maxiter=200)
        else:
            raise InfeasiblePlacementError(
                f"direction cosine {target:.6g} not reachable on circle of radius {radius}")
        out.append(Position(*(float(v) for v in c_v + radius * np.array([math.cos(a), math.sin(a), 0.0]))))
    return out


def partition_area_uniform(area: TargetArea, irs, axis=DEFAULT_AXIS, K: int = 1,
                           grid_step=0.5) -> list[SubareaBand]:
    """Split the phi-range of the area into K contiguous bands of equal width."""
    if K < 1:
        raise ValueError("K must be >= 1")
    lo, hi = spatial_freq_bounds(area, irs, axis, grid_step)
    width = (hi - lo) / K
    edges = [lo + k * width for k in range(K)] + [hi]
    return [SubareaBand(edges[k], edges[k + 1], k) for k in range(K)]


def assign_to_bands(phi, bands: Sequence[SubareaBand]) -> np.ndarray:
    """Band index for each phi; shared boundaries go to the lower-index band.

    Points outside every band get -1.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    out = np.full(phi.shape, -1, dtype=int)
    # reverse so the lowest index overwrites last
    for band in sorted(bands, key=lambda b: b.index, reverse=True):
        out[band.contains(phi)] = band.index
    return out


@dataclass(frozen=True)
class UniformDeployment:
    """Fixed IRS and area; APs on a horizontal circle at evenly spaced cosines.

    ``build(J)`` yields the J-AP geometry and the matching J-band partition.
    """

    irs: Position = Position(0.0, 0.0, 10.0)
    area: TargetArea = TargetArea(Position(150.0, 0.0, 0.0), 100.0, 40.0)
    ap_radius: float = 10.0
    ap_center: Position = Position(0.0, 0.0, 0.0)
    phi_r1: float = 0.0
    grid_step: float = 0.5
    irs_axis: tuple = DEFAULT_AXIS

    def bounds(self):
        return spatial_freq_bounds(self.area, self.irs, self.irs_axis, self.grid_step)

    def initial_deviation(self) -> float:
        lo, hi = self.bounds()
        return hi - lo

    def build(self, J: int):
        aps = place_aps_uniform(J, self.phi_r1, self.initial_deviation(), self.ap_radius,
                                self.irs, self.irs_axis, self.ap_center)
        geometry = ScenarioGeometry(self.irs, tuple(aps), self.area, self.grid_step, tuple(self.irs_axis))
        bands = partition_area_uniform(self.area, self.irs, self.irs_axis, J, self.grid_step)
        return geometry, bands


def reference_geometry(J: int = 1, grid_step: float = 0.5) -> ScenarioGeometry:
    """The reference deployment: IRS at (0,0,10), 100 m x 40 m area centred at (150,0,0)."""
    return UniformDeployment(grid_step=grid_step).build(J)[0]
