"""Static IRS phase patterns and their passive beamforming gain.

The gain of a pattern at angular offset ``delta`` (user cosine minus AP
cosine) is the squared array factor

    |sum_n exp(i * (theta_n + 2*pi*n*dbar*delta))|^2,   n = 0..N-1,

and the design problem is to maximise its minimum over an interval of
offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

from .errors import SearchSpaceTooLargeError

TWO_PI = 2.0 * math.pi
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
METHODS = ("linear", "anchored", "flat", "oracle", "two_step")


@dataclass
class IrsPattern:
    thetas: np.ndarray
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        self.thetas = wrap_phase(self.thetas)

    @property
    def N(self) -> int:
        return self.thetas.size

    @property
    def coefficients(self) -> np.ndarray:
        return np.exp(1j * self.thetas)


@dataclass(frozen=True)
class AngularSpan:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"span lo {self.lo} > hi {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def grid(self, points: int) -> np.ndarray:
        if self.width == 0.0:
            return np.array([self.lo])
        g = np.linspace(self.lo, self.hi, max(int(points), 2))
        g[-1] = self.hi
        return g


@dataclass
class SynthConfig:
    """Solver knobs. ``grid_points=None`` picks :func:`default_grid_points`.

    ``phase_bits`` restricts synth_flat (and fixes the oracle resolution) to
    ``2**phase_bits`` uniformly spaced phases.
    """

    method: str = "two_step"
    grid_points: int | None = None
    max_iters: int = 100
    tol: float = 1e-7
    phase_bits: int | None = None
    coarse_steps: int = 32
    restarts: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown synthesis method {self.method!r}")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def wrap_phase(theta) -> np.ndarray:
    """Reduce to [0, 2*pi); np.mod alone maps tiny negatives onto 2*pi."""
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.where(t >= TWO_PI, 0.0, t)


def _thetas(pattern) -> np.ndarray:
    return pattern.thetas if isinstance(pattern, IrsPattern) else np.asarray(pattern, float)


def beamwidth(N: int, dbar: float) -> float:
    """Null-to-null half width of the main lobe, 1/(N*dbar)."""
    return 1.0 / (N * dbar)


def default_grid_points(width: float, N: int, dbar: float) -> int:
    return max(256, int(math.ceil(64 * width * N * dbar)))


def _resolve_points(span: AngularSpan, N: int, dbar: float, grid_points) -> int:
    return default_grid_points(span.width, N, dbar) if grid_points is None else int(grid_points)


def _basis(N: int, dbar: float, deltas: np.ndarray) -> np.ndarray:
    n = np.arange(N)[:, None]
    return np.exp(2j * np.pi * dbar * n * deltas[None, :])


def gain(pattern, delta, dbar: float):
    """Passive beamforming gain at one or more offsets; in [0, N**2]."""
    th = _thetas(pattern)
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    s = np.exp(1j * th) @ _basis(th.size, dbar, d)
    g = s.real ** 2 + s.imag ** 2
    return float(g[0]) if np.ndim(delta) == 0 else g


def worst_case_gain(pattern, span: AngularSpan, dbar: float, grid_points: int | None = None) -> float:
    """Minimum gain on a uniform grid over ``span`` (endpoints included).

    This is a grid lower-envelope estimate of the true minimum.
    """
    th = _thetas(pattern)
    pts = _resolve_points(span, th.size, dbar, grid_points)
    return float(np.min(gain(th, span.grid(pts), dbar)))


def linear_phases(N: int, dbar: float, steer: float) -> np.ndarray:
    return np.mod(-TWO_PI * np.arange(N) * dbar * steer, TWO_PI)


def synth_linear(span: AngularSpan, N: int, dbar: float) -> IrsPattern:
    """Linear phase profile focusing the main lobe on the span midpoint."""
    return IrsPattern(linear_phases(N, dbar, span.mid))


def synth_anchored(span: AngularSpan, N: int, dbar: float) -> IrsPattern:
    """Linear phase profile steered half a beamwidth above ``span.lo``.

    Any span no wider than a beamwidth then sits inside the main lobe between
    its two half-beamwidth points, so the worst case is at least
    ``1/sin(pi/(2N))**2``, attained at ``span.lo``.
    """
    return IrsPattern(linear_phases(N, dbar, span.lo + 0.5 * beamwidth(N, dbar)))


def chirp_phases(span: AngularSpan, N: int, dbar: float) -> np.ndarray:
    """Quadratic phase whose local steering sweeps linearly from span.lo to span.hi."""
    n = np.arange(N)
    c = (N - 1) / 2
    return np.mod(-TWO_PI * n * dbar * span.mid - math.pi * dbar * (n - c) ** 2 * span.width / N, TWO_PI)


def _softmin_ascent(thetas: np.ndarray, basis: np.ndarray, scale: float,
                    betas=(5, 10, 20, 40, 80, 160, 320), maxiter: int = 500) -> np.ndarray:
    """Maximise a log-sum-exp soft minimum of the gridded gain with L-BFGS.

    The temperature is lowered in stages so the smooth surrogate approaches
    the hard minimum.
    """
    for beta in betas:
        def neg_softmin(t):
            e = np.exp(1j * t)
            s = e @ basis
            g = (s.real ** 2 + s.imag ** 2) / scale
            w = softmax(-beta * g)
            dg = -2.0 * np.imag(e[:, None] * basis * np.conj(s)[None, :]) / scale
            return logsumexp(-beta * g) / beta, -(dg @ w)
        thetas = minimize(neg_softmin, thetas, jac=True, method="L-BFGS-B",
                          options={"maxiter": maxiter}).x
    return thetas


def _golden_max(f, a: float, b: float, xtol: float = 1e-9, maxiter: int = 60):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) < xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _descend(thetas: np.ndarray, basis: np.ndarray, config: SynthConfig, levels=None):
    """Cyclic coordinate ascent on min_g |sum_n e^{i theta_n} basis[n, g]|^2.

    Returns (thetas, objective, sweeps, converged). ``levels`` switches the
    per-element update to an exact scan over a discrete phase alphabet.
    """
    N = thetas.size
    thetas = thetas.copy()
    s = np.exp(1j * thetas) @ basis
    best = float(np.min(np.abs(s) ** 2))
    if levels is None:
        coarse = np.arange(config.coarse_steps) * (TWO_PI / config.coarse_steps)
        cand = np.exp(1j * coarse)
        half = TWO_PI / config.coarse_steps
    else:
        cand = np.exp(1j * levels)
    for sweep in range(1, config.max_iters + 1):
        start = best
        for n in range(N):
            row = basis[n]
            rest = s - np.exp(1j * thetas[n]) * row
            vals = np.min(np.abs(rest[None, :] + cand[:, None] * row[None, :]) ** 2, axis=1)
            k = int(np.argmax(vals))
            if levels is None:
                phi0 = coarse[k]
                phi, val = _golden_max(
                    lambda p: float(np.min(np.abs(rest + np.exp(1j * p) * row) ** 2)),
                    phi0 - half, phi0 + half)
                if vals[k] > val:
                    phi, val = phi0, float(vals[k])
            else:
                phi, val = levels[k], float(vals[k])
            if val > best:
                thetas[n] = phi
                s = rest + np.exp(1j * phi) * row
                best = float(np.min(np.abs(s) ** 2))
        if best - start <= config.tol * max(start, 1e-300):
            return np.mod(thetas, TWO_PI), best, sweep, True
    return np.mod(thetas, TWO_PI), best, config.max_iters, False


def synth_flat(span: AngularSpan, N: int, dbar: float, config: SynthConfig | None = None) -> IrsPattern:
    """Flattened beam covering ``span`` by derivative-free coordinate ascent.

    Starting points are the midpoint-steered linear profile and a quadratic
    (chirp) profile spreading the beam over the span. Each start is first
    pushed uphill on a smoothed soft-min surrogate, then polished by cyclic
    coordinate ascent on the exact gridded minimum (coarse phase scan plus a
    golden-section refinement per element); the best result wins. The linear
    profile is also polished directly, so the result never falls below it.

    With ``config.phase_bits`` set, phases are restricted to the quantized
    alphabet, the per-element update scans it exactly, and seeded random
    restarts replace the smooth stage.
    """
    config = config or SynthConfig(method="flat")
    pts = _resolve_points(span, N, dbar, config.grid_points)
    basis = _basis(N, dbar, span.grid(pts))
    linear = linear_phases(N, dbar, span.mid)
    chirp = chirp_phases(span, N, dbar)
    if config.phase_bits is None:
        scale = min(float(N * N), N / (dbar * span.width)) if span.width > 0 else float(N * N)
        starts = [linear, _softmin_ascent(linear, basis, scale), _softmin_ascent(chirp, basis, scale)]
        levels = None
    else:
        L = 2 ** config.phase_bits
        step = TWO_PI / L
        levels = np.arange(L) * step
        rng = np.random.default_rng(config.seed)
        starts = [np.mod(np.round(th / step), L) * step for th in (linear, chirp)]
        starts += [rng.integers(0, L, N) * step for _ in range(config.restarts)]
    best = None
    for th0 in starts:
        th, val, sweeps, conv = _descend(th0, basis, config, levels)
        if best is None or val > best[1]:
            best = (th, val, sweeps, conv)
    th, _, sweeps, conv = best
    return IrsPattern(th, converged=conv, iterations=sweeps)


def brute_force_synth(span: AngularSpan, N: int, phase_bits: int, dbar: float = 0.5,
                      grid_points: int | None = None, max_space: int = 2 ** 24) -> IrsPattern:
    """Exhaustive search over quantized patterns for the gridded min-max gain.

    The first phase is pinned to 0 (the gain ignores a common phase), which
    also makes the returned pattern the lexicographically smallest optimum.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    L = 2 ** phase_bits
    if L ** N > max_space:
        raise SearchSpaceTooLargeError(f"{L}^{N} patterns exceeds limit {max_space}")
    step = TWO_PI / L
    if N == 1:
        return IrsPattern(np.zeros(1))
    pts = _resolve_points(span, N, dbar, grid_points)
    basis = _basis(N, dbar, span.grid(pts))
    unit = np.exp(1j * step * np.arange(L))
    base = basis[0]
    best_val, best_idx = -1.0, None
    # enumerate elements 1..N-1 in lexicographic order, in chunks
    rest = N - 1
    total = L ** rest
    chunk = max(1, min(total, 2 ** 20 // basis.shape[1]))
    powers = L ** np.arange(rest - 1, -1, -1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = (idx[:, None] // powers[None, :]) % L
        s = base[None, :] + unit[digits] @ basis[1:]
        vals = np.min(s.real ** 2 + s.imag ** 2, axis=1)
        k = int(np.argmax(vals >= vals.max() * (1 - 1e-12)))
        if vals[k] > best_val * (1 + 1e-12):
            best_val, best_idx = float(vals[k]), digits[k]
    return IrsPattern(np.concatenate([[0.0], best_idx * step]))


def design_pattern(span: AngularSpan, N: int, dbar: float, config: SynthConfig | None = None) -> IrsPattern:
    """Pattern for ``span`` according to ``config.method``.

    ``two_step`` uses the anchored linear profile when the span fits inside one
    beamwidth and the flattened beam otherwise.
    """
    config = config or SynthConfig()
    m = config.method
    if m == "two_step":
        m = "anchored" if span.width <= beamwidth(N, dbar) * (1 + 1e-12) else "flat"
    if m == "linear":
        return synth_linear(span, N, dbar)
    if m == "anchored":
        return synth_anchored(span, N, dbar)
    if m == "flat":
        return synth_flat(span, N, dbar, config)
    return brute_force_synth(span, N, config.phase_bits or 3, dbar, config.grid_points)
