"""Truncated single-mode Fock-space vectors and operators.

States are dense complex amplitude arrays over photon numbers 0..n_max,
with an explicit ``tail_bound`` tracking how much probability mass the
truncation may have discarded.  Every operation returns a new vector;
nothing here mutates shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConvergenceError",
    "FockVector",
    "TruncationError",
    "TruncationPolicy",
    "apply_annihilation",
    "apply_creation",
    "apply_diag",
    "inner_product",
    "norm",
    "normalized",
    "pad_to",
    "tail_mass_nbs",
]


class TruncationError(RuntimeError):
    """Raised when no truncation within the policy cap meets the target."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative series fails to reach its tolerance."""


@dataclass(frozen=True)
class TruncationPolicy:
    """How large a basis to use and when to stop growing it.

    tail_eps is the acceptable probability mass above n_max; n_hard_cap
    is the absolute ceiling on basis size.
    """

    tail_eps: float = 1e-12
    n_hard_cap: int = 4096

    def __post_init__(self):
        if not 0.0 < self.tail_eps < 1.0:
            raise ValueError(f"tail_eps must be in (0, 1), got {self.tail_eps}")
        if self.n_hard_cap < 1:
            raise ValueError(f"n_hard_cap must be >= 1, got {self.n_hard_cap}")


@dataclass(frozen=True, eq=False)
class FockVector:
    """Amplitudes c_n for n = 0..n_max plus a truncation-mass bound."""

    amplitudes: np.ndarray
    n_max: int
    tail_bound: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or len(amps) != self.n_max + 1:
            raise ValueError(
                f"amplitudes length {amps.shape} does not match n_max={self.n_max}"
            )
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")

    @classmethod
    def from_amplitudes(cls, amplitudes, tail_bound: float = 0.0) -> "FockVector":
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(amps, len(amps) - 1, tail_bound)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def norm(v: FockVector) -> float:
    return float(np.linalg.norm(v.amplitudes))


def inner_product(a: FockVector, b: FockVector) -> complex:
    """Sum of conj(a_n) * b_n.  Both vectors must share one n_max."""
    if a.n_max != b.n_max:
        raise ValueError(f"dimension mismatch: n_max {a.n_max} vs {b.n_max}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _top_loss(v: FockVector) -> float:
    # uniform upper-bound rule for mass pushed past (or hidden above) n_max
    return float((v.n_max + 1) * abs(v.amplitudes[v.n_max]) ** 2)


def apply_annihilation(v: FockVector) -> FockVector:
    """Lowering operator: (a v)_n = sqrt(n+1) v_{n+1}."""
    n = np.arange(1, v.n_max + 1)
    out = np.zeros(v.n_max + 1, dtype=complex)
    out[:-1] = np.sqrt(n) * v.amplitudes[1:]
    return FockVector(out, v.n_max, v.tail_bound + _top_loss(v))


def apply_creation(v: FockVector) -> FockVector:
    """Raising operator: (a† v)_n = sqrt(n) v_{n-1}.

    The amplitude shifted past n_max is dropped; its squared magnitude
    (already scaled by n_max+1) is added to tail_bound.
    """
    n = np.arange(1, v.n_max + 1)
    out = np.zeros(v.n_max + 1, dtype=complex)
    out[1:] = np.sqrt(n) * v.amplitudes[:-1]
    return FockVector(out, v.n_max, v.tail_bound + _top_loss(v))


def apply_diag(v: FockVector, f) -> FockVector:
    """Diagonal operator: (f(N) v)_n = f(n) v_n.

    f may be undefined (raise or return non-finite) off the support of v;
    it must be finite wherever v has nonzero amplitude.
    """
    vals = np.empty(v.n_max + 1)
    for i in range(v.n_max + 1):
        try:
            vals[i] = f(i)
        except (ValueError, ZeroDivisionError, FloatingPointError):
            vals[i] = np.nan
    on_support = np.abs(v.amplitudes) > 0
    bad = ~np.isfinite(vals) & on_support
    if bad.any():
        n_bad = int(np.argmax(bad))
        raise ValueError(f"diagonal function non-finite at n={n_bad} on support")
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return FockVector(vals * v.amplitudes, v.n_max, v.tail_bound)


def pad_to(v: FockVector, n_max: int) -> FockVector:
    """Zero-extend a vector to a larger basis; no-op if already there."""
    if n_max < v.n_max:
        raise ValueError(f"cannot pad n_max {v.n_max} down to {n_max}")
    if n_max == v.n_max:
        return v
    out = np.zeros(n_max + 1, dtype=complex)
    out[: v.n_max + 1] = v.amplitudes
    return FockVector(out, n_max, v.tail_bound)


def normalized(v: FockVector) -> FockVector:
    nrm = norm(v)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return FockVector(v.amplitudes / nrm, v.n_max, v.tail_bound / nrm**2)


def tail_mass_nbs(eta: float, m: int, n_max: int) -> float:
    """Probability mass of the negative binomial distribution above n_max.

    Computed by a log-domain start, the stable term ratio
    P(n+1)/P(n) = (n+1)/(n+1-m) * (1-eta), and a geometric closure bound
    once the ratio settles below 1.  The returned value is an upper bound
    tight to roundoff.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if eta == 1.0:
        return 0.0 if n_max >= m else 1.0
    if n_max < m:
        return 1.0
    n0 = n_max + 1
    logp = (
        math.lgamma(n0 + 1)
        - math.lgamma(m + 1)
        - math.lgamma(n0 - m + 1)
        + (m + 1) * math.log(eta)
        + (n0 - m) * math.log1p(-eta)
    )
    p = math.exp(logp)
    acc = 0.0
    n = n0
    r = 1.0
    # tightening is capped: distributions whose mean sits far above any
    # usable n_max would otherwise iterate for ~mean terms
    for _ in range(50_000):
        acc += p
        r = (n + 1.0) / (n + 1.0 - m) * (1.0 - eta)
        if r < 1.0:
            closure = p * r / (1.0 - r)
            if closure < 1e-16 * acc or closure < 5e-324:
                return acc + closure
        p *= r
        n += 1
    if r < 1.0:
        return min(1.0, acc + p * r / (1.0 - r))
    return 1.0
