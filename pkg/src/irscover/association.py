"""AP-to-subarea association that minimises the angular deviation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, SearchSpaceTooLargeError


@dataclass(frozen=True)
class SubareaSpans:
    """Per-subarea phi extremes and per-AP omega."""

    phi_min: np.ndarray  # (K,)
    phi_max: np.ndarray  # (K,)
    omega: np.ndarray    # (J,)

    def __post_init__(self):
        object.__setattr__(self, "phi_min", np.asarray(self.phi_min, float).ravel())
        object.__setattr__(self, "phi_max", np.asarray(self.phi_max, float).ravel())
        object.__setattr__(self, "omega", np.asarray(self.omega, float).ravel())
        if self.phi_min.shape != self.phi_max.shape:
            raise ValueError("phi_min and phi_max must have the same length")
        if np.any(self.phi_min > self.phi_max):
            raise ValueError("phi_min exceeds phi_max")

    @property
    def K(self) -> int:
        return self.phi_min.size

    @property
    def J(self) -> int:
        return self.omega.size

    @classmethod
    def from_bands(cls, bands, omega) -> "SubareaSpans":
        """Spans of subareas defined as phi-bands.

        The area is connected and phi is continuous on it, so the extremes over
        a band's region are the band edges themselves.
        """
        bands = sorted(bands, key=lambda b: b.index)
        return cls([b.phi_lo for b in bands], [b.phi_hi for b in bands], omega)


@dataclass(frozen=True)
class Association:
    """K x J binary matrix, one AP per subarea."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=int)
        if m.ndim != 2 or np.any((m != 0) & (m != 1)):
            raise ContractViolation("association must be a binary K x J matrix")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_assignment(cls, assigned, J: int) -> "Association":
        assigned = np.asarray(assigned, dtype=int)
        m = np.zeros((assigned.size, J), dtype=int)
        m[np.arange(assigned.size), assigned] = 1
        return cls(m)

    @property
    def K(self) -> int:
        return self.matrix.shape[0]

    @property
    def J(self) -> int:
        return self.matrix.shape[1]

    @property
    def assigned(self) -> np.ndarray:
        """AP index of each subarea."""
        if np.any(self.matrix.sum(axis=1) != 1):
            raise ContractViolation("every subarea must be assigned to exactly one AP")
        return np.argmax(self.matrix, axis=1)


def _deviation(assigned, spans: SubareaSpans):
    om = spans.omega[assigned]
    lo = spans.phi_min - om
    hi = spans.phi_max - om
    dmin, dmax = float(lo.min()), float(hi.max())
    return dmin, dmax, dmax - dmin


def angular_deviation(assoc: Association, spans: SubareaSpans):
    """(delta_min, delta_max, delta_s) of the offsets phi - omega under ``assoc``."""
    if assoc.K != spans.K or assoc.J != spans.J:
        raise ContractViolation("association shape does not match spans")
    return _deviation(assoc.assigned, spans)


def _tie_eps(spans: SubareaSpans) -> float:
    # deviations closer than this are treated as ties (float noise in the offsets)
    return 1e-12 * max(1.0, float(np.max(np.abs(np.concatenate([spans.phi_max, spans.phi_min, spans.omega])))))


def refinement_trace(spans: SubareaSpans):
    """Run the successive refinement and return (assignment, deviation history)."""
    K, J = spans.K, spans.J
    assigned = np.full(K, int(np.argmin(spans.omega)), dtype=int)
    current = _deviation(assigned, spans)[2]
    history = [current]
    eps = _tie_eps(spans)
    while True:
        om = spans.omega[assigned]
        # bottlenecks: the subarea setting delta_max, then the one setting delta_min
        k_hi = int(np.argmax(spans.phi_max - om))
        k_lo = int(np.argmin(spans.phi_min - om))
        best = None
        for k, side in ((k_hi, 1.0), (k_lo, -1.0)):
            for j in range(J):
                if j == assigned[k]:
                    continue
                trial = assigned.copy()
                trial[k] = j
                ds = _deviation(trial, spans)[2]
                # among equal deviations, move the subarea furthest from the extreme it set
                edge = spans.phi_max[k] - spans.omega[j] if side > 0 else spans.omega[j] - spans.phi_min[k]
                if best is None or ds < best[0] - eps or (
                        ds <= best[0] + eps and (edge, j) < best[1]):
                    best = (ds, (edge, j), k, j)
        if best is None or not best[0] < current - eps:
            return assigned, history
        current = best[0]
        assigned[best[2]] = best[3]
        history.append(current)


def successive_refinement(spans: SubareaSpans, K: int | None = None, J: int | None = None) -> Association:
    """Greedy bottleneck reassignment starting from the lowest-omega AP.

    Each round tries moving the subarea that attains delta_max, and the one
    that attains delta_min, to every other AP, and applies the move giving
    the smallest deviation. Ties go to the move that carries the subarea
    furthest away from the extreme it was setting, then to the lowest AP
    index. Stops when no such move strictly decreases the deviation.
    """
    if (K is not None and K != spans.K) or (J is not None and J != spans.J):
        raise ContractViolation("K/J do not match spans")
    assigned, _ = refinement_trace(spans)
    return Association.from_assignment(assigned, spans.J)


def uniform_association(K: int, J: int, omega=None) -> Association:
    """Subarea k (in increasing-phi order) goes to the AP with the k-th smallest omega.

    Without ``omega`` the APs are taken as already sorted, giving the identity.
    """
    if K != J:
        raise ContractViolation(f"uniform association needs K == J, got K={K}, J={J}")
    order = np.arange(J) if omega is None else np.argsort(np.asarray(omega, float), kind="stable")
    return Association.from_assignment(order, J)


def brute_force_association(spans: SubareaSpans, K: int | None = None, J: int | None = None,
                            max_space: int = 10 ** 7) -> Association:
    """Exhaustive minimum of the angular deviation.

    Returns the lexicographically first assignment within a 1e-12 relative
    tie band of the optimum.
    """
    K = spans.K if K is None else K
    J = spans.J if J is None else J
    if K != spans.K or J != spans.J:
        raise ContractViolation("K/J do not match spans")
    total = J ** K
    if total > max_space:
        raise SearchSpaceTooLargeError(f"{J}^{K} associations exceeds limit {max_space}")
    powers = J ** np.arange(K - 1, -1, -1)
    best_ds, best = np.inf, None
    eps = _tie_eps(spans)
    chunk = 1 << 18
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = (idx[:, None] // powers[None, :]) % J
        om = spans.omega[digits]
        ds = (spans.phi_max[None, :] - om).max(axis=1) - (spans.phi_min[None, :] - om).min(axis=1)
        k = int(np.argmax(ds <= ds.min() + eps))
        if ds[k] < best_ds - eps:
            best_ds, best = float(ds[k]), digits[k]
    return Association.from_assignment(best, J)
