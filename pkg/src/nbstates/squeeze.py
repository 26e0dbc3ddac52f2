"""Quadrature variances and squeezing-region scans.

Quadratures are X = (a + a†)/2 and Y = (a - a†)/(2i); the vacuum value
of both variances is 1/4 and anything below that counts as squeezing.
For the negative binomial family all field moments are real, so the
variances reduce to

    var_x = 1/4 + (<N> + <a^2> - 2<a>^2) / 2
    var_y = 1/4 + (<N> - <a^2>) / 2

The scan sweeps eta for each m with one shared basis per eta block and
cumprod-built amplitude matrices, so a thousand-point grid per m costs
milliseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockVector, TruncationPolicy
from .states import choose_n_max

__all__ = [
    "SCAN_POLICY",
    "SqueezeScan",
    "VarianceSample",
    "field_moments",
    "nbs_field_moments_series",
    "quadrature_variances",
    "refine_region_edge",
    "squeezing_scan",
    "variances_at",
    "x_squeezing_onset",
    "y_squeezing_cutoff",
]

# Small eta pushes the photon distribution far out (mean (m+1)/eta), so
# scans get a higher basis cap than single-state work.
SCAN_POLICY = TruncationPolicy(tail_eps=1e-12, n_hard_cap=16384)

_HEISENBERG_SLACK = 1e-12


@dataclass(frozen=True)
class VarianceSample:
    """One scanned point; construction enforces the uncertainty bound."""

    eta: float
    m: int
    mean_a: float
    mean_a2: float
    var_x: float
    var_y: float

    def __post_init__(self):
        if not (self.var_x > 0.0 and self.var_y > 0.0):
            raise ValueError(
                f"variances must be positive, got ({self.var_x}, {self.var_y})"
            )
        if self.var_x * self.var_y < 1.0 / 16.0 - _HEISENBERG_SLACK:
            raise ValueError(
                f"uncertainty product {self.var_x * self.var_y} below 1/16"
            )


def field_moments(state: FockVector) -> tuple[complex, complex]:
    """Raw sums <a> = sum sqrt(n+1) c_n* c_{n+1} and the matching <a^2>.

    Returned as complex; every state family in this package yields real
    values, and quadrature_variances enforces that.
    """
    c = state.amplitudes
    n = np.arange(len(c), dtype=float)
    mean_a = np.sum(np.sqrt(n[1:]) * np.conj(c[:-1]) * c[1:])
    mean_a2 = np.sum(
        np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) * np.conj(c[:-2]) * c[2:]
    )
    nrm2 = float(np.sum(np.abs(c) ** 2))
    return complex(mean_a / nrm2), complex(mean_a2 / nrm2)


def quadrature_variances(state: FockVector) -> tuple[float, float]:
    """(var_x, var_y) from the number and field moments of the state."""
    a1, a2 = field_moments(state)
    if abs(a1.imag) > 1e-10 or abs(a2.imag) > 1e-10:
        raise ValueError(
            f"field moments have imaginary parts ({a1.imag}, {a2.imag}); "
            "quadrature variances here assume real moments"
        )
    c = state.amplitudes
    n = np.arange(len(c), dtype=float)
    p = np.abs(c) ** 2
    mean_n = float(np.sum(n * p) / np.sum(p))
    var_x = 0.25 + (mean_n + a2.real - 2.0 * a1.real**2) / 2.0
    var_y = 0.25 + (mean_n - a2.real) / 2.0
    return var_x, var_y


def nbs_field_moments_series(eta: float, m: int) -> tuple[float, float]:
    """<a> and <a^2> for nbs(eta, m) by direct binomial-sum evaluation.

    Independent of the amplitude-array route: exact integer binomials,
    term-by-term, with a geometric stopping rule.  Intended as an oracle
    for m <= a few tens and eta >= 0.01.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if m < 0 or int(m) != m:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    if eta == 1.0:
        return 0.0, 0.0
    q = 1.0 - eta
    pref = eta ** (m + 1)

    def term_a(n):
        return math.sqrt(
            (n + 1.0) * math.comb(n, m) * math.comb(n + 1, m)
        ) * q ** (n - m)

    def term_a2(n):
        return math.sqrt(
            (n + 1.0) * (n + 2.0) * math.comb(n, m) * math.comb(n + 2, m)
        ) * q ** (n - m)

    def summed(term):
        acc = 0.0
        n = m
        while True:
            t = term(n)
            acc += t
            # past the distribution peak the ratio settles near q < 1
            if n > m + 8 and n * eta > m + 1 and t < 1e-18 * acc:
                return acc
            n += 1
            if n - m > 10_000_000:
                raise RuntimeError("series failed to terminate")

    return pref * math.sqrt(q) * summed(term_a), pref * q * summed(term_a2)


def _variance_block(m: int, etas: np.ndarray, policy: TruncationPolicy):
    """Vectorized variances for one m over a block of eta values."""
    n_max = choose_n_max(float(etas.min()), m, policy)
    b = len(etas)
    c = np.zeros((b, n_max + 1))
    c[:, m] = etas ** ((m + 1) / 2)
    if n_max > m:
        n = np.arange(m, n_max, dtype=float)
        base = np.sqrt((n + 1.0) / (n + 1.0 - m))
        ratios = base[None, :] * np.sqrt(1.0 - etas)[:, None]
        c[:, m + 1 :] = c[:, m, None] * np.cumprod(ratios, axis=1)
    nn = np.arange(n_max + 1, dtype=float)
    p = c * c
    nrm2 = p.sum(axis=1)
    mean_n = (nn * p).sum(axis=1) / nrm2
    mean_a = (np.sqrt(nn[1:]) * c[:, :-1] * c[:, 1:]).sum(axis=1) / nrm2
    w2 = np.sqrt((nn[:-2] + 1.0) * (nn[:-2] + 2.0))
    mean_a2 = (w2 * c[:, :-2] * c[:, 2:]).sum(axis=1) / nrm2
    var_x = 0.25 + (mean_n + mean_a2 - 2.0 * mean_a**2) / 2.0
    var_y = 0.25 + (mean_n - mean_a2) / 2.0
    return mean_a, mean_a2, var_x, var_y


@dataclass(frozen=True, eq=False)
class SqueezeScan:
    """Variance tables over (m, eta); rows follow m_values, columns eta."""

    m_values: tuple
    eta_values: np.ndarray
    mean_a: np.ndarray
    mean_a2: np.ndarray
    var_x: np.ndarray
    var_y: np.ndarray

    def samples(self):
        for i, m in enumerate(self.m_values):
            for j, eta in enumerate(self.eta_values):
                yield VarianceSample(
                    float(eta),
                    int(m),
                    float(self.mean_a[i, j]),
                    float(self.mean_a2[i, j]),
                    float(self.var_x[i, j]),
                    float(self.var_y[i, j]),
                )

    def min_var_x(self) -> np.ndarray:
        return self.var_x.min(axis=1)

    def min_var_y(self) -> np.ndarray:
        return self.var_y.min(axis=1)

    def row(self, m: int) -> int:
        return self.m_values.index(m)


def squeezing_scan(
    m_values, eta_values, policy: TruncationPolicy | None = None
) -> SqueezeScan:
    """Variance scan over every (m, eta) pair.

    eta blocks share one basis sized for the smallest eta in the block,
    so pass eta_values sorted ascending for best performance (any order
    is accepted).
    """
    policy = policy or SCAN_POLICY
    etas = np.asarray(eta_values, dtype=float)
    if etas.ndim != 1 or len(etas) == 0:
        raise ValueError("eta_values must be a nonempty 1-d sequence")
    if np.any(etas <= 0.0) or np.any(etas > 1.0):
        raise ValueError("eta values must lie in (0, 1]")
    m_values = tuple(int(m) for m in m_values)
    if any(m < 0 for m in m_values):
        raise ValueError("m values must be nonnegative")
    order = np.argsort(etas, kind="stable")
    shape = (len(m_values), len(etas))
    out = {k: np.empty(shape) for k in ("mean_a", "mean_a2", "var_x", "var_y")}
    block = 64
    for i, m in enumerate(m_values):
        for lo in range(0, len(etas), block):
            idx = order[lo : lo + block]
            a1, a2, vx, vy = _variance_block(m, etas[idx], policy)
            out["mean_a"][i, idx] = a1
            out["mean_a2"][i, idx] = a2
            out["var_x"][i, idx] = vx
            out["var_y"][i, idx] = vy
    return SqueezeScan(m_values, etas, **out)


def variances_at(
    eta: float, m: int, policy: TruncationPolicy | None = None
) -> VarianceSample:
    """Single-point sample through the same path as the scan."""
    policy = policy or SCAN_POLICY
    a1, a2, vx, vy = _variance_block(m, np.array([eta]), policy)
    return VarianceSample(
        eta, m, float(a1[0]), float(a2[0]), float(vx[0]), float(vy[0])
    )


def default_eta_grid(lo: float = 0.01, hi: float = 0.999, step: float = 1e-3):
    vals = np.arange(lo, hi + step / 2, step)
    # coarse steps can overshoot hi by nearly step/2; never exceed it
    return vals[vals <= hi + 1e-12 * max(1.0, abs(hi))]


def x_squeezing_onset(scan: SqueezeScan) -> int | None:
    """Smallest scanned m whose x-variance dips below 1/4, else None."""
    mins = scan.min_var_x()
    for m, v in zip(scan.m_values, mins):
        if v < 0.25:
            return m
    return None


def y_squeezing_cutoff(scan: SqueezeScan) -> int | None:
    """Smallest scanned m with no y-variance below 1/4 anywhere, else None."""
    mins = scan.min_var_y()
    for m, v in zip(scan.m_values, mins):
        if v >= 0.25:
            return m
    return None


def refine_region_edge(
    m: int,
    kind: str,
    eta_lo: float,
    eta_hi: float,
    xtol: float = 1e-6,
    policy: TruncationPolicy | None = None,
) -> float:
    """Bisect the eta where var_<kind> crosses 1/4 inside [eta_lo, eta_hi]."""
    if kind not in ("x", "y"):
        raise ValueError(f"kind must be 'x' or 'y', got {kind!r}")
    policy = policy or SCAN_POLICY

    def f(eta):
        s = variances_at(eta, m, policy)
        return (s.var_x if kind == "x" else s.var_y) - 0.25

    lo, hi = eta_lo, eta_hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"no variance crossing bracketed in [{eta_lo}, {eta_hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
