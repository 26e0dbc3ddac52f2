"""Q function, Wigner function, and s-parametrized quasiprobabilities.

All distributions here are built from displaced-number overlaps
q_k(beta) = |<k| D(-beta) |psi>|^2:

    F(beta; s) = (2/pi) sum_k (-1)^k (1+s)^k / (1-s)^(k+1) q_k

with s = -1 the Q function and s = 0 the Wigner function.  The q_k are
computed by applying the displacement exp(-beta a† + beta* a) to the
state with the banded-exponential engine, which is uniformly stable in
beta and basis size (three-term recurrences for the overlaps are not:
they amplify roundoff catastrophically whenever |beta|^2 is small
compared to the photon cutoff).

Grids walk each row of points by composing small displacement steps,
so a 201x201 Wigner grid costs a few hundred banded exponentials
instead of forty thousand.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._expm import expm_apply_skew, expm_apply_skew_batch, taylor_terms
from .fock import ConvergenceError, FockVector, TruncationError
from .states import NBSParams

__all__ = [
    "GridSpec",
    "PhaseSpaceGrid",
    "PhaseSpacePoint",
    "displaced_number_state",
    "displacement_matrix_element",
    "grid_evaluate",
    "q_function",
    "q_function_closed",
    "s_distribution",
    "wigner",
]

_TWO_OVER_PI = 2.0 / math.pi
_SERIES_TOL = 1e-10


@dataclass(frozen=True)
class PhaseSpacePoint:
    """One phase-space coordinate beta = x + iy."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")

    @property
    def beta(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, beta: complex) -> "PhaseSpacePoint":
        return cls(beta.real, beta.imag)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular evaluation window with uniform spacing."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int = 201
    ny: int = 201

    def __post_init__(self):
        for v in (self.x_min, self.x_max, self.y_min, self.y_max):
            if not math.isfinite(v):
                raise ValueError("grid bounds must be finite")
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("grid bounds must satisfy max >= min")
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"need nx, ny >= 2, got ({self.nx}, {self.ny})")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @classmethod
    def square(cls, half_width: float, nx: int = 201, ny: int = 201) -> "GridSpec":
        r = float(half_width)
        return cls(-r, r, -r, r, nx, ny)


@dataclass(frozen=True, eq=False)
class PhaseSpaceGrid:
    """values[j, i] is the distribution at (xs()[i], ys()[j])."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    values: np.ndarray
    riemann_sum: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.ny, self.nx):
            raise ValueError(
                f"values shape {vals.shape} does not match (ny, nx)="
                f"({self.ny}, {self.nx})"
            )

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def spec(self) -> GridSpec:
        return GridSpec(
            self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny
        )


def displacement_matrix_element(n: int, k: int, beta: complex) -> complex:
    """<n| exp(beta a† - beta* a) |k> by the terminating descending sum.

    The finite sum runs over j = 0..min(n,k) with argument -1/|beta|^2;
    the prefactor is kept in the log domain.  beta = 0 returns the exact
    Kronecker delta.  Intended for moderate min(n, k); the distribution
    engines never call this.
    """
    if n < 0 or k < 0 or int(n) != n or int(k) != k:
        raise ValueError(f"n and k must be nonnegative integers, got ({n}, {k})")
    beta = complex(beta)
    if beta == 0:
        return 1.0 + 0.0j if n == k else 0.0 + 0.0j
    x = abs(beta) ** 2
    total = 0.0
    term = 1.0
    for j in range(min(n, k) + 1):
        total += term
        term *= -(n - j) * (k - j) / ((j + 1) * x)
    log_mag = (
        -0.5 * x
        + 0.5 * (n + k) * math.log(x)
        - 0.5 * (math.lgamma(n + 1) + math.lgamma(k + 1))
    )
    theta = cmath.phase(beta)
    phase = (-1.0) ** k * cmath.exp(1j * (n - k) * theta)
    return math.exp(log_mag) * total * phase


def _workspace_size(n_top: int, x: float) -> int:
    # room for the displaced state: shift by |beta|^2 plus a dispersion margin
    return int(math.ceil(n_top + x + 8.0 * math.sqrt(x + n_top + 1.0) + 40.0))


def _displace(amps, delta: complex, tol: float = 1e-13) -> np.ndarray:
    """exp(delta a† - delta* a) applied to a workspace amplitude array."""
    w = len(amps) - 1
    if delta == 0:
        return np.asarray(amps, dtype=complex).copy()
    up = delta * np.sqrt(np.arange(1.0, w + 1.0))
    return expm_apply_skew(up, amps, tol=tol)


def _displaced_probabilities(state: FockVector, beta: complex) -> np.ndarray:
    """q_k = |<k| D(-beta) |state>|^2 on an adaptive workspace."""
    w = _workspace_size(state.n_max, abs(beta) ** 2)
    psi = np.zeros(w + 1, dtype=complex)
    psi[: state.n_max + 1] = state.amplitudes
    phi = _displace(psi, -beta)
    return np.abs(phi) ** 2


def _series_value(q: np.ndarray, s: float, k_max: int) -> float:
    """Alternating weighted sum over q_k with the rigorous tail stop.

    Remaining mass past k is at most 1 - cum(q_k) since sum_k q_k is the
    squared norm; the weight envelope multiplies it by u^(k+1)/(1-s).
    """
    u = (1.0 + s) / (1.0 - s)
    cap = min(k_max, len(q) - 1)
    cum = 0.0
    total = 0.0
    weight = 1.0 / (1.0 - s)
    sign = 1.0
    for k in range(cap + 1):
        total += sign * weight * q[k]
        cum += q[k]
        bound = _TWO_OVER_PI * weight * u * max(0.0, 1.0 - cum)
        if bound < _SERIES_TOL:
            return _TWO_OVER_PI * total
        weight *= u
        sign = -sign
    raise ConvergenceError(
        f"series tail bound {bound:.3e} still above {_SERIES_TOL} "
        f"after {cap + 1} terms"
    )


def wigner(state: FockVector, p: PhaseSpacePoint, k_max: int = 512) -> float:
    """(2/pi) sum_k (-1)^k q_k(beta), stopped once the tail bound < 1e-10."""
    beta = p.beta
    if beta == 0:
        # exact limit: the displaced-number overlaps collapse to |c_k|^2
        q = state.probabilities()
    else:
        q = _displaced_probabilities(state, beta)
    return _series_value(q, 0.0, k_max)


def s_distribution(
    state: FockVector, p: PhaseSpacePoint, s: float, k_max: int = 512
) -> float:
    """Quasiprobability at ordering parameter s in [-1, 0]."""
    if not -1.0 <= s <= 0.0:
        raise ValueError(f"s must lie in [-1, 0], got {s}")
    beta = p.beta
    if beta == 0:
        q = state.probabilities()
    else:
        q = _displaced_probabilities(state, beta)
    return _series_value(q, s, k_max)


def q_function(state: FockVector, p: PhaseSpacePoint) -> float:
    """(1/pi) |<beta|state>|^2 via the coherent-state coefficient sum."""
    beta = p.beta
    c = state.amplitudes
    n = state.n_max
    # conj coherent coefficients e^{-x/2} conj(beta)^n / sqrt(n!), prefolded
    # so every partial product is a true coefficient and cannot overflow
    coef = np.empty(n + 1, dtype=complex)
    coef[0] = math.exp(-0.5 * abs(beta) ** 2)
    if n >= 1:
        steps = np.conj(beta) / np.sqrt(np.arange(1.0, n + 1.0))
        coef[1:] = coef[0] * np.cumprod(steps)
    ov = np.sum(coef * c)
    return float(abs(ov) ** 2 / math.pi)


def q_function_closed(params: NBSParams, p: PhaseSpacePoint) -> float:
    """Closed-form Q of the negative binomial state.

    (1/pi) eta^(m+1) e^{-x} x^m / m! * |sum_j (conj(beta) sqrt(1-eta))^j
    / sqrt(j!)|^2 with x = |beta|^2.
    """
    eta, m = params.eta, params.m
    beta = p.beta
    x = abs(beta) ** 2
    if x == 0.0:
        return eta / math.pi if m == 0 else 0.0
    w = np.conj(beta) * math.sqrt(1.0 - eta)
    total = 0.0j
    term = 1.0 + 0.0j
    scale = 1.0
    j = 0
    while True:
        total += term
        scale = max(scale, abs(total))
        j += 1
        term *= w / math.sqrt(j)
        if j > abs(w) ** 2 + 8 and abs(term) < 1e-20 * scale:
            break
        if j > 100000:
            raise ConvergenceError("closed-form overlap sum did not terminate")
    log_pref = (
        (m + 1) * math.log(eta)
        - x
        + (m * math.log(x) if m > 0 else 0.0)
        - math.lgamma(m + 1)
    )
    return float(math.exp(log_pref) * abs(total) ** 2 / math.pi)


def displaced_number_state(beta: complex, k: int, n_max: int) -> FockVector:
    """D(beta)|k> truncated to n_max, with the lost mass in tail_bound."""
    if k < 0 or int(k) != k:
        raise ValueError(f"k must be a nonnegative integer, got {k}")
    if k > n_max:
        raise ValueError(f"need k <= n_max, got k={k}, n_max={n_max}")
    beta = complex(beta)
    x = abs(beta) ** 2
    w = max(n_max, _workspace_size(k, x))
    v = np.zeros(w + 1, dtype=complex)
    v[k] = 1.0
    phi = _displace(v, beta)
    amps = phi[: n_max + 1]
    leak = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if leak > 1e-8:
        raise TruncationError(
            f"displaced number state loses norm {leak:.3e} past n_max={n_max}"
        )
    return FockVector(amps, n_max, leak)


def _grid_q(state: FockVector, spec: GridSpec) -> np.ndarray:
    xs, ys = spec.xs(), spec.ys()
    c = state.amplitudes
    n = state.n_max
    inv_sq = 1.0 / np.sqrt(np.arange(1.0, n + 1.0)) if n >= 1 else None
    out = np.empty((spec.ny, spec.nx))
    for i, xv in enumerate(xs):
        beta = xv + 1j * ys
        coef = np.empty((spec.ny, n + 1), dtype=complex)
        coef[:, 0] = np.exp(-0.5 * np.abs(beta) ** 2)
        if n >= 1:
            steps = np.conj(beta)[:, None] * inv_sq[None, :]
            coef[:, 1:] = coef[:, 0, None] * np.cumprod(steps, axis=1)
        ov = coef @ c
        out[:, i] = np.abs(ov) ** 2 / math.pi
    return out


def _grid_walk(state: FockVector, spec: GridSpec, s: float) -> np.ndarray:
    """W or S values over the grid by column displacement plus x-steps.

    Each y-row keeps a live displaced copy of the state; stepping in x
    composes one more small displacement.  The composition phase drops
    out of |phi_k|^2, so walking and direct displacement agree.
    """
    xs, ys = spec.xs(), spec.ys()
    r2 = max(abs(spec.x_min), abs(spec.x_max)) ** 2 + max(
        abs(spec.y_min), abs(spec.y_max)
    ) ** 2
    w_size = _workspace_size(state.n_max, r2)
    sq = np.sqrt(np.arange(1.0, w_size + 1.0))
    band_max = sq[-1] + sq[-2]

    u = (1.0 + s) / (1.0 - s)
    k = np.arange(w_size + 1, dtype=float)
    weights = (-1.0) ** k * u**k / (1.0 - s)

    V = np.zeros((w_size + 1, spec.ny), dtype=complex)
    V[: state.n_max + 1, :] = state.amplitudes[:, None]

    delta0 = -(xs[0] + 1j * ys)
    theta0 = float(np.max(np.abs(delta0))) * band_max
    if theta0 > 0:
        s0 = max(1, int(math.ceil(theta0 / 6.0)))
        j0 = taylor_terms(theta0 / s0, 1e-13 / s0)
        V = expm_apply_skew_batch(sq[:, None] * delta0[None, :], V, s0, j0)

    out = np.empty((spec.ny, spec.nx))
    out[:, 0] = _TWO_OVER_PI * (weights @ (np.abs(V) ** 2))

    if spec.nx > 1:
        dx = xs[1] - xs[0]
        if dx > 0:
            theta_step = dx * band_max
            s_step = max(1, int(math.ceil(theta_step / 6.0)))
            j_step = taylor_terms(theta_step / s_step, 1e-14 / s_step)
            up_step = (-dx) * sq[:, None]
        for i in range(1, spec.nx):
            if dx > 0:
                V = expm_apply_skew_batch(up_step, V, s_step, j_step)
            out[:, i] = _TWO_OVER_PI * (weights @ (np.abs(V) ** 2))
    return out


def grid_evaluate(
    state: FockVector, spec: GridSpec, kind: str, s: float | None = None
) -> PhaseSpaceGrid:
    """Evaluate Q, W, or S(s) over the grid; includes the window integral.

    kind is one of "Q", "W", "S"; kind "S" requires s in [-1, 0].
    riemann_sum is the plain Riemann integral over the window (zero for
    degenerate windows).
    """
    if kind == "Q":
        values = _grid_q(state, spec)
    elif kind == "W":
        values = _grid_walk(state, spec, 0.0)
    elif kind == "S":
        if s is None:
            raise ValueError("kind 'S' requires the ordering parameter s")
        if not -1.0 <= s <= 0.0:
            raise ValueError(f"s must lie in [-1, 0], got {s}")
        values = _grid_walk(state, spec, float(s))
    else:
        raise ValueError(f"unknown grid kind {kind!r}; expected Q, W, or S")
    dx = (spec.x_max - spec.x_min) / (spec.nx - 1)
    dy = (spec.y_max - spec.y_min) / (spec.ny - 1)
    riemann = float(values.sum() * dx * dy)
    return PhaseSpaceGrid(
        spec.x_min,
        spec.x_max,
        spec.y_min,
        spec.y_max,
        spec.nx,
        spec.ny,
        values,
        riemann,
    )
