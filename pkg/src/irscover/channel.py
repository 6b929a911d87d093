"""Rician AP-IRS and IRS-user channels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError
from .geometry import ScenarioGeometry, direction_cosine


@dataclass(frozen=True)
class ChannelParams:
    """Large-scale and fading parameters.

    ``epsilon`` (IRS-user) and ``delta`` (AP-IRS) are linear Rician factors;
    ``math.inf`` gives a pure line-of-sight link. ``c0`` is the linear power
    gain at 1 m and ``dbar`` the element spacing in wavelengths.
    """

    epsilon: float = 10.0
    delta: float = 10.0
    alpha1: float = 2.0
    alpha2: float = 2.0
    c0: float = 1e-4
    dbar: float = 0.5
    N: int = 128
    M: int = 4

    def __post_init__(self):
        if not (self.epsilon >= 0 and self.delta >= 0):
            raise ValueError("Rician factors must be >= 0")
        if not 0 < self.c0 <= 1:
            raise ValueError("c0 must lie in (0, 1]")
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be >= 1")
        if self.dbar <= 0:
            raise ValueError("dbar must be > 0")

    @property
    def gamma1(self) -> float:
        return los_fraction(self.epsilon) * los_fraction(self.delta)

    @property
    def gamma2(self) -> float:
        return 1.0 - self.gamma1

    def replace(self, **kw) -> "ChannelParams":
        d = dict(self.__dict__)
        d.update(kw)
        return ChannelParams(**d)


@dataclass
class ChannelRealization:
    G: np.ndarray  # (..., N, M)
    h: np.ndarray  # (..., N)


def los_fraction(k: float) -> float:
    """k / (k + 1), with the k -> inf limit handled."""
    return 1.0 if math.isinf(k) else k / (k + 1.0)


def path_loss(distance, exponent: float, c0: float):
    """Power gain ``c0 * d**-exponent``."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise DegenerateGeometryError("distance must be positive")
    out = c0 * d ** (-exponent)
    return float(out) if out.ndim == 0 else out


def los_steering(count: int, direction_cosine: float, dbar: float) -> np.ndarray:
    n = np.arange(count)
    return np.exp(-2j * np.pi * n * dbar * direction_cosine)


def cn01(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def channel_stream(seed: int, ap_index: int, block: int) -> np.random.Generator:
    """Independent generator keyed by (seed, ap_index, block)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(ap_index), int(block)))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class LinkGeometry:
    """Everything sample_channel needs about one AP-IRS-user triple."""

    rho1_sq: float
    rho2_sq: float
    omega: float      # IRS -> AP cosine (arrival side of the IRS steering vector)
    phi: float        # IRS -> user cosine
    ap_cosine: float  # AP -> IRS cosine (AP-side steering vector)

    @classmethod
    def build(cls, params: ChannelParams, geometry: ScenarioGeometry, ap_index: int, user_pos):
        irs = np.asarray(geometry.irs, float)
        ap = np.asarray(geometry.aps[ap_index], float)
        user = np.asarray(user_pos, float)
        axis = geometry.axis
        return cls(
            rho1_sq=path_loss(np.linalg.norm(ap - irs), params.alpha1, params.c0),
            rho2_sq=path_loss(np.linalg.norm(user - irs), params.alpha2, params.c0),
            omega=direction_cosine(irs, ap, axis),
            phi=direction_cosine(irs, user, axis),
            ap_cosine=direction_cosine(ap, irs, axis),
        )


def los_components(params: ChannelParams, link: LinkGeometry):
    """Deterministic parts (G_bar, h_bar) of the two hops."""
    a_irs = los_steering(params.N, link.omega, params.dbar)
    a_ap = los_steering(params.M, link.ap_cosine, params.dbar)
    G_bar = np.outer(a_irs, a_ap.conj())
    h_bar = los_steering(params.N, link.phi, params.dbar)
    return G_bar, h_bar


def sample_link(params: ChannelParams, link: LinkGeometry, rng: np.random.Generator,
                size: int | None = None) -> ChannelRealization:
    N, M = params.N, params.M
    lead = () if size is None else (size,)
    G_bar, h_bar = los_components(params, link)
    ke, kd = los_fraction(params.epsilon), los_fraction(params.delta)
    # draw order is part of the determinism contract: G first, then h
    G_nlos = cn01(rng, lead + (N, M))
    h_nlos = cn01(rng, lead + (N,))
    G = math.sqrt(link.rho1_sq) * (math.sqrt(kd) * G_bar + math.sqrt(1 - kd) * G_nlos)
    h = math.sqrt(link.rho2_sq) * (math.sqrt(ke) * h_bar + math.sqrt(1 - ke) * h_nlos)
    return ChannelRealization(G, h)


def sample_channel(params: ChannelParams, geometry: ScenarioGeometry, ap_index: int,
                   user_pos, rng: np.random.Generator, size: int | None = None) -> ChannelRealization:
    """Draw G (AP ``ap_index`` -> IRS) and h (IRS -> ``user_pos``).

    With ``size`` set, a batch of independent realizations is returned with a
    leading axis of that length.
    """
    link = LinkGeometry.build(params, geometry, ap_index, user_pos)
    return sample_link(params, link, rng, size)
