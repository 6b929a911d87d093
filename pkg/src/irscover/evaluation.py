"""Received-power evaluation, DIBF reference, scaling laws and Monte Carlo checks.

Average received power of a user at ``u`` served by AP ``j`` with MRT is

    P_max * rho1_j^2 * rho2(u)^2 * (gamma1 * M * |chi|^2 + gamma2 * M * N)

where ``|chi|^2`` is the passive gain at offset ``phi(u) - omega_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .association import (Association, SubareaSpans, angular_deviation,
                          successive_refinement)
from .channel import (ChannelParams, LinkGeometry, channel_stream, cn01, los_components,
                      path_loss, sample_link)
from .errors import ContractViolation, DegenerateChannelError, DegeneratePartitionError
from .geometry import (Position, ScenarioGeometry, UniformDeployment, assign_to_bands,
                       direction_cosine)
from .pattern import (AngularSpan, IrsPattern, SynthConfig, design_pattern, gain,
                      worst_case_gain)

MC_BLOCK = 8192


@dataclass(frozen=True)
class SystemConfig:
    p_max: float
    noise_power: float
    channel: ChannelParams
    geometry: ScenarioGeometry

    def __post_init__(self):
        if self.p_max <= 0 or self.noise_power <= 0:
            raise ValueError("p_max and noise_power must be positive")

    def replace(self, **kw) -> "SystemConfig":
        d = dict(p_max=self.p_max, noise_power=self.noise_power,
                 channel=self.channel, geometry=self.geometry)
        d.update(kw)
        return SystemConfig(**d)


@dataclass
class EvaluationResult:
    worst_case_power: float
    worst_location: Position
    worst_subarea: int
    subarea_minima: list = field(default_factory=list)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int

    def zscore(self, expected: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if math.isclose(self.mean, expected, rel_tol=1e-12) else math.inf
        return (self.mean - expected) / self.std_error


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db(x) -> float:
    return 10.0 * math.log10(x)


def _ap_loss(config: SystemConfig, ap_index: int) -> float:
    g, ch = config.geometry, config.channel
    d = np.linalg.norm(np.asarray(g.aps[ap_index], float) - np.asarray(g.irs, float))
    return path_loss(d, ch.alpha1, ch.c0)


def avg_received_power(user_pos, ap_index: int, pattern, config: SystemConfig):
    """Closed-form average received power; vectorised over ``user_pos`` of shape (..., 3)."""
    g, ch = config.geometry, config.channel
    pts = np.asarray(user_pos, dtype=float)
    irs = np.asarray(g.irs, float)
    rho2_sq = path_loss(np.linalg.norm(pts - irs, axis=-1), ch.alpha2, ch.c0)
    offset = direction_cosine(irs, pts, g.axis) - g.omegas()[ap_index]
    chi_sq = gain(pattern, offset, ch.dbar)
    out = config.p_max * _ap_loss(config, ap_index) * rho2_sq * ch.M * (
        ch.gamma1 * chi_sq + ch.gamma2 * ch.N)
    return float(out) if np.ndim(out) == 0 else out


def mrt_beamformer(effective_channel, p_max: float) -> np.ndarray:
    """w = sqrt(p_max) * v^H / ||v|| for the row channel v (last axis)."""
    v = np.asarray(effective_channel, dtype=complex)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise DegenerateChannelError("effective channel is zero")
    return math.sqrt(p_max) * v.conj() / norm


def _points_by_subarea(config: SystemConfig, bands, grid_step=None):
    pts = config.geometry.area_grid(grid_step)
    phi = config.geometry.phis(pts)
    ordered = sorted(bands, key=lambda b: b.index)
    # a finer grid can land marginally outside the outermost band edges
    phi_c = np.clip(phi, ordered[0].phi_lo, ordered[-1].phi_hi)
    return pts, assign_to_bands(phi_c, ordered)


def worst_case_power(config: SystemConfig, pattern, assoc: Association, bands,
                     grid_step: float | None = None) -> EvaluationResult:
    """Grid minimum of the average received power, each subarea served by its assigned AP."""
    if assoc.K != len(bands):
        raise ContractViolation(f"association has {assoc.K} rows but {len(bands)} subareas given")
    assigned = assoc.assigned
    pts, member = _points_by_subarea(config, bands, grid_step)
    minima, locs = [], []
    for k in range(assoc.K):
        sel = pts[member == k]
        if sel.shape[0] == 0:
            raise DegeneratePartitionError(f"subarea {k} contains no grid points")
        p = np.atleast_1d(avg_received_power(sel, int(assigned[k]), pattern, config))
        i = int(np.argmin(p))
        minima.append(float(p[i]))
        locs.append(Position(*map(float, sel[i])))
    k = int(np.argmin(minima))
    return EvaluationResult(minima[k], locs[k], k, minima)


def worst_concentrated_loss(config: SystemConfig) -> float:
    """min_j rho1_j^2 times the minimum of rho2^2 over the area."""
    g, ch = config.geometry, config.channel
    rho1 = min(_ap_loss(config, j) for j in range(g.J))
    pts = np.vstack([g.area_grid(), g.area.corners()])
    far = np.max(np.linalg.norm(pts - np.asarray(g.irs, float), axis=1))
    return rho1 * path_loss(far, ch.alpha2, ch.c0)


def dibf_worst_power(config: SystemConfig) -> float:
    """Worst-case power when the IRS is re-aligned to every user location."""
    ch = config.channel
    return config.p_max * (ch.gamma1 * ch.M * ch.N ** 2 + ch.gamma2 * ch.M * ch.N) * worst_concentrated_loss(config)


def min_required_aps(N: int, dbar: float, delta_sI: float) -> int:
    if delta_sI < 0:
        raise ValueError("delta_sI must be >= 0")
    return max(1, math.ceil(N * dbar * delta_sI))


def theorem1_gain(N: int) -> float:
    """1/sin^2(pi/(2N)), the worst gain over a one-beamwidth span under anchored steering."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 1.0 / math.sin(math.pi / (2 * N)) ** 2


def _estimate(samples: np.ndarray, trials: int, seed: int) -> MonteCarloEstimate:
    mean = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloEstimate(mean, se, trials, seed)


def _blocks(trials: int):
    for b, start in enumerate(range(0, trials, MC_BLOCK)):
        yield b, min(MC_BLOCK, trials - start)


def mc_link_power(config: SystemConfig, pattern, ap_index: int, user_pos,
                  trials: int = 100_000, seed: int = 0) -> MonteCarloEstimate:
    """Sample mean of the MRT received power over Rician channel draws."""
    if trials < 100:
        raise ValueError("trials must be >= 100")
    ch = config.channel
    link = LinkGeometry.build(ch, config.geometry, ap_index, user_pos)
    coeffs = pattern.coefficients if isinstance(pattern, IrsPattern) else np.exp(1j * np.asarray(pattern))
    out = np.empty(trials)
    pos = 0
    for b, size in _blocks(trials):
        real = sample_link(ch, link, channel_stream(seed, ap_index, b), size)
        v = np.einsum("tn,n,tnm->tm", real.h.conj(), coeffs, real.G)
        w = mrt_beamformer(v, config.p_max)
        y = np.einsum("tm,tm->t", v, w)
        out[pos:pos + size] = y.real ** 2 + y.imag ** 2
        pos += size
    return _estimate(out, trials, seed)


def serving_ap(assoc: Association, user_pos, config: SystemConfig, bands=None) -> int:
    if assoc.K == 1:
        return int(assoc.assigned[0])
    if bands is None:
        raise ContractViolation("bands are needed to locate the user's subarea")
    phi = config.geometry.phis(np.asarray(user_pos, float)[None, :])
    ordered = sorted(bands, key=lambda b: b.index)
    k = int(assign_to_bands(np.clip(phi, ordered[0].phi_lo, ordered[-1].phi_hi), ordered)[0])
    return int(assoc.assigned[k])


def mc_received_power(config: SystemConfig, pattern, assoc: Association, user_pos,
                      trials: int = 100_000, seed: int = 0, bands=None) -> MonteCarloEstimate:
    """Monte Carlo received power at ``user_pos`` from the AP its subarea is assigned to."""
    return mc_link_power(config, pattern, serving_ap(assoc, user_pos, config, bands),
                         user_pos, trials, seed)


def mc_moment_identities(N: int, M: int, pattern=None, trials: int = 100_000, seed: int = 0,
                         dbar: float = 0.5, phi: float = 0.3, omega: float = -0.2,
                         ap_cosine: float = 0.1):
    """Monte Carlo estimates of the three cross-term energies, each expected to equal M*N.

    Returns a dict keyed by ``"nlos_user"``, ``"nlos_ap"`` and ``"nlos_both"``
    for E|h~^H Theta G_bar|^2, E|h_bar^H Theta G~|^2 and E|h~^H Theta G~|^2.
    """
    coeffs = np.ones(N, complex) if pattern is None else np.exp(1j * np.asarray(
        pattern.thetas if isinstance(pattern, IrsPattern) else pattern, float))
    params = ChannelParams(N=N, M=M, dbar=dbar)
    link = LinkGeometry(1.0, 1.0, omega, phi, ap_cosine)
    G_bar, h_bar = los_components(params, link)
    parts = {"nlos_user": [], "nlos_ap": [], "nlos_both": []}
    for b, size in _blocks(trials):
        rng = channel_stream(seed, 0, b)
        G_t = cn01(rng, (size, N, M))
        h_t = cn01(rng, (size, N))
        a = np.einsum("tn,n,nm->tm", h_t.conj(), coeffs, G_bar)
        c = np.einsum("n,n,tnm->tm", h_bar.conj(), coeffs, G_t)
        e = np.einsum("tn,n,tnm->tm", h_t.conj(), coeffs, G_t)
        for key, v in (("nlos_user", a), ("nlos_ap", c), ("nlos_both", e)):
            parts[key].append(np.sum(v.real ** 2 + v.imag ** 2, axis=1))
    return {k: _estimate(np.concatenate(v), trials, seed) for k, v in parts.items()}


@dataclass
class StaticPlan:
    """Outcome of the two-step design for one AP count."""

    geometry: ScenarioGeometry
    bands: list
    spans: SubareaSpans
    association: Association
    span: AngularSpan
    pattern: IrsPattern

    @property
    def K(self) -> int:
        return len(self.bands)


def plan_static_irs(deployment: UniformDeployment, J: int, N: int, dbar: float,
                    synth: SynthConfig | None = None) -> StaticPlan:
    """Uniform AP placement and partition, refined association, then the phase pattern."""
    geometry, bands = deployment.build(J)
    spans = SubareaSpans.from_bands(bands, geometry.omegas())
    assoc = successive_refinement(spans)
    dmin, dmax, _ = angular_deviation(assoc, spans)
    span = AngularSpan(dmin, dmax)
    pattern = design_pattern(span, N, dbar, synth)
    return StaticPlan(geometry, bands, spans, assoc, span, pattern)


def snr_sweep(config: SystemConfig, rician_values_db, pattern_builder, assoc: Association,
              bands) -> list[dict]:
    """Worst-case SNR of the static design and of DIBF versus the Rician factor.

    Both Rician factors are set to each value (dB; ``inf`` for pure LoS).
    ``pattern_builder(config)`` returns the pattern for the given config.
    """
    values = list(rician_values_db)
    if not values:
        raise ValueError("empty Rician sweep")
    rows = []
    for r_db in values:
        k = math.inf if math.isinf(r_db) else 10.0 ** (r_db / 10.0)
        cfg = config.replace(channel=config.channel.replace(epsilon=k, delta=k))
        static = worst_case_power(cfg, pattern_builder(cfg), assoc, bands).worst_case_power
        dibf = dibf_worst_power(cfg)
        static_snr = db(static / cfg.noise_power)
        dibf_snr = db(dibf / cfg.noise_power)
        rows.append({"rician_db": float(r_db), "static_snr_db": static_snr,
                     "dibf_snr_db": dibf_snr, "loss_db": dibf_snr - static_snr})
    return rows


def gain_vs_j_sweep(deployment: UniformDeployment, j_values, n_values, dbar: float = 0.5,
                    synth: SynthConfig | None = None) -> list[dict]:
    """Worst-case passive gain of the two-step design for every (N, J)."""
    rows = []
    delta_sI = deployment.initial_deviation()
    for N in n_values:
        js = min_required_aps(N, dbar, delta_sI)
        for J in j_values:
            plan = plan_static_irs(deployment, J, N, dbar, synth)
            g = worst_case_gain(plan.pattern, plan.span, dbar)
            rows.append({"N": int(N), "J": int(J), "J_s": js, "delta_s": plan.span.width,
                         "worst_case_gain_db": db(g),
                         "reference_db": db(4 * N * N / math.pi ** 2)})
    return rows
