import math

import numpy as np
import pytest
from scipy.linalg import expm

from nbstates.fock import (
    FockVector,
    TruncationPolicy,
    inner_product,
    norm,
    pad_to,
)
from nbstates.states import NBSParams, nbs, number_state
from nbstates.su11 import (
    SU11Generators,
    disentangle_check,
    k_minus,
    k_plus,
    k_zero,
    ladder_residual,
    nonlinear_eigen_residual,
    su11_displace,
)
from nbstates._expm import apply_series, expm_apply_skew, taylor_terms


def overlap_sq(a, b):
    big = max(a.n_max, b.n_max)
    return abs(inner_product(pad_to(a, big), pad_to(b, big))) ** 2


def interior_vector(m, n_max, seed):
    rng = np.random.default_rng(seed)
    amps = np.zeros(n_max + 1, dtype=complex)
    k = n_max - 3 - m + 1
    amps[m : n_max - 2] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    amps /= np.linalg.norm(amps)
    return FockVector(amps, n_max)


class TestAlgebraAction:
    def test_plus_on_lowest(self):
        # sqrt((m+1) * 1) |m+1> from |m>
        for m in [0, 1, 2, 5]:
            v = k_plus(number_state(m, 12), m)
            expect = np.zeros(13)
            expect[m + 1] = math.sqrt(m + 1)
            np.testing.assert_allclose(v.amplitudes, expect, atol=1e-15)

    def test_minus_annihilates_lowest(self):
        for m in [0, 1, 3, 6]:
            v = k_minus(number_state(m, 12), m)
            assert norm(v) == 0.0

    def test_minus_plus_gives_twice_bargmann(self):
        # K- K+ |m> = 2k |m> with k = (m+1)/2
        for m in [0, 1, 2, 4]:
            v = number_state(m, 12)
            w = k_minus(k_plus(v, m), m)
            np.testing.assert_allclose(
                w.amplitudes, (m + 1) * v.amplitudes, atol=1e-13
            )

    def test_zero_eigenvalues(self):
        m = 3
        for n in [3, 5, 9]:
            v = number_state(n, 12)
            w = k_zero(v, m)
            np.testing.assert_allclose(
                w.amplitudes, (n - (m - 1) / 2) * v.amplitudes, atol=1e-15
            )

    def test_repeated_raising_closed_form(self):
        # K+^n |m> = sqrt(n! (m+n)! / m!) |m+n>
        m, n = 2, 4
        v = number_state(m, 16)
        for _ in range(n):
            v = k_plus(v, m)
        expect = math.sqrt(
            math.factorial(n) * math.factorial(m + n) / math.factorial(m)
        )
        assert abs(v.amplitudes[m + n] - expect) < 1e-12 * expect
        off = np.delete(v.amplitudes, m + n)
        assert np.max(np.abs(off)) == 0.0

    def test_subspace_guard(self):
        v = number_state(1, 8)
        with pytest.raises(ValueError):
            k_plus(v, 3)
        with pytest.raises(ValueError):
            k_minus(v, 2)

    def test_generators_wrapper(self):
        g = SU11Generators(2)
        assert g.bargmann_k == 1.5
        v = number_state(2, 10)
        np.testing.assert_array_equal(
            g.plus(v).amplitudes, k_plus(v, 2).amplitudes
        )
        np.testing.assert_array_equal(
            g.zero(v).amplitudes, k_zero(v, 2).amplitudes
        )
        assert norm(g.minus(v)) == 0.0
        with pytest.raises(ValueError):
            SU11Generators(-1)


class TestCommutators:
    @pytest.mark.parametrize("m", [0, 1, 3, 6])
    @pytest.mark.parametrize("seed", [7, 19])
    def test_zero_plus(self, m, seed):
        v = interior_vector(m, 48, seed)
        lhs = (
            k_zero(k_plus(v, m), m).amplitudes
            - k_plus(k_zero(v, m), m).amplitudes
        )
        rhs = k_plus(v, m).amplitudes
        assert np.linalg.norm(lhs - rhs) < 1e-12 * max(np.linalg.norm(rhs), 1.0)

    @pytest.mark.parametrize("m", [0, 1, 3, 6])
    @pytest.mark.parametrize("seed", [7, 19])
    def test_zero_minus(self, m, seed):
        v = interior_vector(m, 48, seed)
        lhs = (
            k_zero(k_minus(v, m), m).amplitudes
            - k_minus(k_zero(v, m), m).amplitudes
        )
        rhs = -k_minus(v, m).amplitudes
        assert np.linalg.norm(lhs - rhs) < 1e-12 * max(np.linalg.norm(rhs), 1.0)

    @pytest.mark.parametrize("m", [0, 1, 3, 6])
    @pytest.mark.parametrize("seed", [7, 19])
    def test_minus_plus(self, m, seed):
        v = interior_vector(m, 48, seed)
        lhs = (
            k_minus(k_plus(v, m), m).amplitudes
            - k_plus(k_minus(v, m), m).amplitudes
        )
        rhs = 2.0 * k_zero(v, m).amplitudes
        assert np.linalg.norm(lhs - rhs) < 1e-12 * np.linalg.norm(rhs)


class TestLadderResidual:
    @pytest.mark.parametrize("eta", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("m", [0, 1, 3, 6])
    def test_eigen_relation(self, eta, m):
        assert ladder_residual(eta, m) < 1e-10

    @pytest.mark.parametrize("eta", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("m", [0, 2, 4, 6])
    def test_nonlinear_lowering(self, eta, m):
        assert nonlinear_eigen_residual(eta, m) < 1e-8


class TestDisplace:
    def test_zero_argument_is_number_state(self):
        v = su11_displace(0.0, 3)
        assert abs(abs(v.amplitudes[3]) - 1.0) < 1e-14
        assert norm(v) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize(
        "xi,m", [(0.8, 0), (0.8, 1), (0.8, 3), (1.5, 2)]
    )
    def test_matches_nbs(self, xi, m):
        eta = 1.0 - math.tanh(xi) ** 2
        v = su11_displace(xi, m)
        target = nbs(NBSParams(eta, m))
        assert overlap_sq(v, target) > 1.0 - 1e-10

    @pytest.mark.parametrize("m,eta", [(0, 0.2), (3, 0.5), (6, 0.8)])
    def test_matches_nbs_from_eta(self, m, eta):
        xi = math.atanh(math.sqrt(1.0 - eta))
        v = su11_displace(xi, m)
        target = nbs(NBSParams(eta, m))
        assert overlap_sq(v, target) > 1.0 - 1e-10

    def test_norm_preserved_at_large_argument(self):
        v = su11_displace(3.0, 0)
        assert abs(norm(v) - 1.0) < 1e-12

    def test_lowest_component_prefactor(self):
        # <m|result> = sech(xi)^(m+1)
        xi, m = 0.9, 4
        v = su11_displace(xi, m)
        expect = (1.0 / math.cosh(xi)) ** (m + 1)
        assert abs(v.amplitudes[m].real - expect) < 1e-12
        assert np.max(np.abs(v.amplitudes[:m])) == 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            su11_displace(math.inf, 0)
        with pytest.raises(ValueError):
            su11_displace(1.0, -2)


class TestDisentangle:
    def test_small_argument(self):
        assert disentangle_check(0.5, 0) < 1e-10

    def test_moderate_argument(self):
        assert disentangle_check(1.0, 3) < 1e-8

    @pytest.mark.parametrize("alpha,m", [(0.3, 1), (0.7, 2)])
    def test_grid(self, alpha, m):
        assert disentangle_check(alpha, m) < 1e-9


class TestExpmCore:
    def test_taylor_terms_bound(self):
        j = taylor_terms(6.0, 1e-14)
        assert 6.0 ** (j + 1) / math.factorial(j + 1) < 1e-14
        assert 6.0**j / math.factorial(j) >= 1e-14

    def test_against_dense_expm(self):
        rng = np.random.default_rng(11)
        n = 40
        up = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        v /= np.linalg.norm(v)
        g = np.zeros((n + 1, n + 1), dtype=complex)
        for i in range(n):
            g[i + 1, i] = up[i]
            g[i, i + 1] = -np.conj(up[i])
        expect = expm(g) @ v
        got = expm_apply_skew(up, v)
        assert np.linalg.norm(got - expect) < 1e-12

    def test_series_matches_dense(self):
        rng = np.random.default_rng(5)
        n = 30
        a = np.diag(rng.standard_normal(n), k=-1) * 0.4
        v = rng.standard_normal(n + 1)
        got = apply_series(lambda w: a @ w, v.astype(complex))
        expect = expm(a) @ v
        assert np.linalg.norm(got - expect) < 1e-12
