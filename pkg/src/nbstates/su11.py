"""SU(1,1) ladder algebra realized on photon-number amplitudes.

For a fixed integer m >= 0 the operators

    K+ = sqrt(N - m) a†,   K- = a sqrt(N - m),   K0 = N - (m - 1)/2

close the su(1,1) algebra on the subspace spanned by |n> with n >= m,
with Bargmann index k = (m + 1)/2.  The negative binomial state is the
orbit of |m> under exp(xi (K+ - K-)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._expm import apply_series, expm_apply_skew
from .fock import (
    FockVector,
    TruncationError,
    TruncationPolicy,
    apply_annihilation,
    apply_creation,
    apply_diag,
    tail_mass_nbs,
)
from .states import NBSParams, choose_n_max, nbs, sharpened

__all__ = [
    "SU11Generators",
    "disentangle_check",
    "k_minus",
    "k_plus",
    "k_zero",
    "ladder_residual",
    "nonlinear_eigen_residual",
    "su11_displace",
]


def _check_subspace(v: FockVector, m: int) -> None:
    if m < 0 or int(m) != m:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    if m > 0 and np.any(v.amplitudes[:m] != 0):
        n_bad = int(np.argmax(np.abs(v.amplitudes[:m]) > 0))
        raise ValueError(
            f"vector has amplitude at n={n_bad} below the m={m} subspace"
        )


def k_plus(v: FockVector, m: int) -> FockVector:
    """K+ v = sqrt(N - m) a† v; requires support on n >= m."""
    _check_subspace(v, m)
    w = apply_creation(v)
    return apply_diag(w, lambda n: math.sqrt(n - m))


def k_minus(v: FockVector, m: int) -> FockVector:
    """K- v = a sqrt(N - m) v; requires support on n >= m."""
    _check_subspace(v, m)
    w = apply_diag(v, lambda n: math.sqrt(n - m) if n >= m else 0.0)
    return apply_annihilation(w)


def k_zero(v: FockVector, m: int) -> FockVector:
    """K0 v = (N - (m - 1)/2) v."""
    if m < 0 or int(m) != m:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    return apply_diag(v, lambda n: n - (m - 1) / 2)


@dataclass(frozen=True)
class SU11Generators:
    """The algebra bound to one subspace label m (Bargmann k = (m+1)/2)."""

    m: int

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise ValueError(f"m must be a nonnegative integer, got {self.m}")

    @property
    def bargmann_k(self) -> float:
        return (self.m + 1) / 2

    def plus(self, v: FockVector) -> FockVector:
        return k_plus(v, self.m)

    def minus(self, v: FockVector) -> FockVector:
        return k_minus(v, self.m)

    def zero(self, v: FockVector) -> FockVector:
        return k_zero(v, self.m)


def _raising_band(m: int, n_max: int) -> np.ndarray:
    # band[n] multiplies |n> -> |n+1>: sqrt((n+1)(n+1-m)), zero below the subspace
    n = np.arange(n_max, dtype=float)
    return np.sqrt((n + 1.0) * np.maximum(n + 1.0 - m, 0.0))


def ladder_residual(
    eta: float, m: int, policy: TruncationPolicy | None = None
) -> float:
    """Norm of (N - sqrt(1-eta) K+ - m) applied to the state nbs(eta, m)."""
    policy = policy or TruncationPolicy()
    v = nbs(NBSParams(eta, m), sharpened(policy))
    lhs = apply_diag(v, lambda n: float(n))
    kp = k_plus(v, m)
    r = lhs.amplitudes - math.sqrt(1.0 - eta) * kp.amplitudes - m * v.amplitudes
    return float(np.linalg.norm(r))


def su11_displace(
    xi: float, m: int, policy: TruncationPolicy | None = None
) -> FockVector:
    """exp(xi (K+ - K-)) |m>, computed by the banded exponential.

    Equals nbs(1 - tanh(xi)^2, m) analytically; the basis is sized for
    that target state.  Boundary amplitude buildup beyond the policy's
    tail budget raises TruncationError.
    """
    policy = policy or TruncationPolicy()
    if m < 0 or int(m) != m:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    if not math.isfinite(xi):
        raise ValueError(f"xi must be finite, got {xi}")
    eta_target = 1.0 - math.tanh(xi) ** 2
    n_max = choose_n_max(eta_target, m, policy)
    v0 = np.zeros(n_max + 1, dtype=complex)
    v0[m] = 1.0
    up = xi * _raising_band(m, n_max)
    out = expm_apply_skew(up, v0)
    boundary = float(np.sum(np.abs(out[-2:]) ** 2))
    if boundary > 1e4 * policy.tail_eps:
        raise TruncationError(
            f"truncation too small for xi={xi}: boundary mass {boundary:.3e}"
        )
    tail = tail_mass_nbs(eta_target, m, n_max)
    return FockVector(out, n_max, tail + boundary)


def disentangle_check(
    alpha: float, m: int, policy: TruncationPolicy | None = None
) -> float:
    """Residual between exp(alpha(K+ - K-))|m> and its disentangled form.

    The right-hand side is exp(g K+) (1-g^2)^{K0} exp(-g K-) |m> with
    g = tanh(alpha); both sides are built on one sharpened basis and the
    Euclidean difference of amplitude arrays is returned.
    """
    policy = policy or TruncationPolicy()
    tight = sharpened(policy)
    lhs = su11_displace(alpha, m, tight)
    n_max = lhs.n_max
    g = math.tanh(alpha)

    band = _raising_band(m, n_max)

    def raise_op(w):
        out = np.zeros_like(w)
        out[1:] = g * band * w[:-1]
        return out

    def lower_op(w):
        out = np.zeros_like(w)
        out[:-1] = -g * band * w[1:]
        return out

    v = np.zeros(n_max + 1, dtype=complex)
    v[m] = 1.0
    v = apply_series(lower_op, v)
    k0 = np.arange(n_max + 1) - (m - 1) / 2
    v *= (1.0 - g * g) ** k0
    v = apply_series(raise_op, v)
    return float(np.linalg.norm(lhs.amplitudes - v))


def nonlinear_eigen_residual(
    eta: float, m: int, policy: TruncationPolicy | None = None
) -> float:
    """Norm of (f(N) a - sqrt(1-eta)) on nbs(eta, m), f(n) = sqrt(n+1-m)/(n+1).

    The nonlinear lowering operator f(N) a has the negative binomial state
    as an eigenvector with eigenvalue sqrt(1-eta); this returns the
    numerical residual of that statement.
    """
    policy = policy or TruncationPolicy()
    v = nbs(NBSParams(eta, m), sharpened(policy))
    w = apply_annihilation(v)
    w = apply_diag(
        w, lambda n: math.sqrt(n + 1 - m) / (n + 1) if n + 1 >= m else 0.0
    )
    r = w.amplitudes - math.sqrt(1.0 - eta) * v.amplitudes
    return float(np.linalg.norm(r))
