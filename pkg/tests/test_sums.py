import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from zgl.arith import RationalPhase, character_group, sieve_von_mangoldt
from zgl.bump import adaptive_simpson, canonical_bump, plateau_bump
from zgl.errors import CapacityError, ConvergenceError, CoverageError, DomainError
from zgl.parallel import naive_sum
from zgl.special import chi_factor
from zgl.sums import (
    char_sum_smooth,
    char_sum_via_twists,
    gonek_envelope,
    gonek_integral,
    gonek_main_term,
    plain_smooth,
    prime_sum_smooth,
    twisted_cheby,
    zero_sum_sharp,
    zero_sum_sharp_unchecked,
    zero_sum_smooth,
    zero_sum_smooth_unchecked,
)

THIRD = RationalPhase(1, 3)
HALF = RationalPhase(1, 2)
B = canonical_bump(1, 2)


def e(u):
    return cmath.exp(2j * math.pi * u)


@pytest.fixture(scope="module")
def lam():
    return sieve_von_mangoldt(10**5)


class TestZeroSumSharp:
    def test_empty_below_first_zero(self, zeros_1e4):
        s = zero_sum_sharp_unchecked(THIRD, 10, zeros_1e4)
        assert s.value == 0 and s.term_count == 0

    def test_T_floor(self, zeros_1e4):
        with pytest.raises(DomainError):
            zero_sum_sharp(THIRD, 99.0, zeros_1e4)

    def test_coverage(self, zeros_1e4):
        with pytest.raises(CoverageError):
            zero_sum_sharp(THIRD, 2e4, zeros_1e4)

    def test_xi_one_unit_modulus(self, zeros_1e4):
        g = zeros_1e4.upto(1000)
        mods = np.abs(chi_factor(0.5 - 1j * g))
        np.testing.assert_allclose(mods, 1.0, atol=1e-12)
        s = zero_sum_sharp(1.0, 1000, zeros_1e4)
        assert s.term_count == len(g)
        assert abs(s.value) <= s.term_count

    def test_first_terms_against_mpmath(self, zeros_1e4):
        s = zero_sum_sharp(THIRD, 100, zeros_1e4)
        ref = mp.mpc(0)
        for n in range(1, 30):
            rho = mp.zetazero(n)
            chi = mp.pi ** (0.5 - rho) * mp.gamma(rho / 2) / mp.gamma((1 - rho) / 2)
            ref += mp.power(mp.mpf(1) / 3, -rho) * chi
        assert s.term_count == 29
        assert abs(s.value - complex(ref)) < 1e-7

    def test_asymptotic_path_close(self, zeros_1e4):
        a = zero_sum_sharp(THIRD, 5000, zeros_1e4).value
        b = zero_sum_sharp(THIRD, 5000, zeros_1e4, chi="asymptotic").value
        # O(1/gamma) bias per term, summed over the zeros
        assert abs(a - b) < sum(2.0 / zeros_1e4.upto(5000))

    def test_workers(self, zeros_1e4):
        a = zero_sum_sharp(THIRD, 1e4, zeros_1e4, workers=1)
        b = zero_sum_sharp(THIRD, 1e4, zeros_1e4, workers=4)
        assert a == b

    def test_order_invariance(self, zeros_1e4):
        g = zeros_1e4.upto(1e4)
        s = zero_sum_sharp(THIRD, 1e4, zeros_1e4)
        terms = 3**0.5 * np.exp(1j * g * math.log(3)) * chi_factor(0.5 - 1j * g)
        shuffled = np.random.default_rng(3).permutation(terms)
        naive = naive_sum(shuffled)
        assert abs(naive - s.value) <= 1e-8 * max(1.0, abs(s.value))
        assert 0 <= s.compensation_residue <= 1e-9 * s.term_count


class TestTwistedCheby:
    def test_single_term(self, lam):
        s = twisted_cheby(THIRD, 2, lam)
        assert s.term_count == 1
        assert abs(s.value - math.log(2) * e(1 / 3)) < 1e-15

    def test_half_is_signed(self, lam):
        s = twisted_cheby(HALF, 1000, lam)
        ref = math.fsum((-1) ** n * lam[n] for n in range(2, 1001))
        assert abs(s.value - ref) < 1e-12

    def test_naive_oracle(self, lam):
        s = twisted_cheby(THIRD, 1000, lam)
        ref = naive_sum(lam[n] * e(-n / 3) for n in range(2, 1001))
        assert abs(s.value - ref) <= 1e-9

    def test_conjugation_exact(self, lam):
        for m, q in [(1, 3), (2, 5), (3, 7), (1, 4)]:
            a = twisted_cheby(RationalPhase(m, q), 10**5, lam).value
            b = twisted_cheby(RationalPhase(q - m, q), 10**5, lam).value
            assert a == b.conjugate()

    def test_capacity(self, lam):
        with pytest.raises(CapacityError):
            twisted_cheby(THIRD, 10**5 + 1, lam)

    def test_real_xi_rejected(self, lam):
        with pytest.raises(DomainError):
            twisted_cheby(1 / 3, 100, lam)


class TestZeroSumSmooth:
    def test_window(self, zeros_1e4):
        s = zero_sum_smooth(THIRD, 600, "per_cor_3_2", B, zeros_1e4)
        lo, hi = 2 * math.pi / 3 * 600, 4 * math.pi / 3 * 600
        assert lo == pytest.approx(1256.637, abs=1e-3) and hi == pytest.approx(2513.274, abs=1e-3)
        g = zeros_1e4.ordinates
        assert s.term_count == int(np.count_nonzero((g >= lo) & (g <= hi)))

    def test_eq11_window(self, zeros_1e4):
        s = zero_sum_smooth(THIRD, 600, "per_eq_1_1", B, zeros_1e4)
        g = zeros_1e4.ordinates
        lo, hi = 2 * math.pi * 600, 4 * math.pi * 600
        assert s.term_count == int(np.count_nonzero((g >= lo) & (g <= hi)))

    def test_naive_oracle(self, zeros_1e4):
        s = zero_sum_smooth(THIRD, 600, "per_cor_3_2", B, zeros_1e4)
        f = 2 * math.pi / 3 * 600
        g = zeros_1e4.window(f, 2 * f)
        terms = 3**0.5 * np.exp(1j * g * math.log(3)) * chi_factor(0.5 - 1j * g) * B(g / f)
        assert abs(naive_sum(terms) - s.value) <= 1e-9

    def test_empty_window(self, zeros_1e4):
        s = zero_sum_smooth_unchecked(THIRD, 1.0, "per_cor_3_2", B, zeros_1e4)
        assert s.term_count == 0 and s.value == 0

    def test_preconditions(self, zeros_1e4):
        with pytest.raises(DomainError):
            zero_sum_smooth(THIRD, 300, "per_cor_3_2", B, zeros_1e4)
        with pytest.raises(DomainError):
            zero_sum_smooth(THIRD, 600, "bogus", B, zeros_1e4)

    def test_coverage_message(self, zeros_1e4):
        with pytest.raises(CoverageError, match="need gamma <= 25132.7"):
            zero_sum_smooth(THIRD, 6000, "per_cor_3_2", B, zeros_1e4)

    def test_coverage_low_end(self, zeros_full):
        from zgl.zeros import ZeroTable
        part = ZeroTable(zeros_full.window(2000, 3000), 3000, min_height=2000)
        with pytest.raises(CoverageError):
            zero_sum_smooth(THIRD, 600, "per_cor_3_2", B, part)

    def test_plateau_brackets_sharp(self, zeros_1e4):
        # plateau on [eps, 1 + d] flat on [2 eps, 1], dilated so that 1 maps to T
        T, xi = 5000.0, THIRD
        f = 2 * math.pi * xi.value
        X = T / f
        eps, d = 0.01, 0.02
        P = plateau_bump(eps, 1 + d, 2 * eps, 1.0)
        smooth = zero_sum_smooth(xi, X, "per_cor_3_2", P, zeros_1e4).value
        sharp = zero_sum_sharp(xi, T, zeros_1e4).value
        g = zeros_1e4.ordinates
        in_ramps = np.count_nonzero((g < 2 * eps * T) | ((g > T) & (g < (1 + d) * T)))
        # outside the ramps and the region below the plateau the weights agree; each term has modulus 3^{1/2}
        assert abs(smooth - sharp) <= 3**0.5 * in_ramps


class TestPrimeSums:
    def test_sign_expansion(self, lam):
        s = prime_sum_smooth(HALF, 100, B, lam)
        ref = math.fsum((-1) ** n * lam[n] * float(B(n / 100)) for n in range(100, 201))
        assert abs(s.value - ref) < 1e-13

    def test_riemann_stieltjes(self, lam):
        # -int B'(u) F(Xu) du with F the twisted partial sums
        X = 1000.0
        sup = lam.support
        sup = sup[sup <= 2 * X]
        partial = np.cumsum(lam.values[sup] * THIRD.twist(sup))

        def F(x):
            k = np.searchsorted(sup, np.floor(x), side="right")
            return np.where(k > 0, partial[np.maximum(k - 1, 0)], 0)

        # integrate piecewise between jumps so quadrature sees smooth integrands
        nodes = np.unique(np.concatenate([[1.0, 2.0], sup[(sup >= X) & (sup <= 2 * X)] / X]))
        xs, ws = np.polynomial.legendre.leggauss(20)
        total = 0j
        for a, b in zip(nodes[:-1], nodes[1:]):
            u = 0.5 * (a + b) + 0.5 * (b - a) * xs
            total += np.sum(0.5 * (b - a) * ws * B.deriv(u) * F(X * 0.5 * (a + b)))
        s = prime_sum_smooth(THIRD, X, B, lam)
        assert abs(-total - s.value) <= 1e-6 * abs(s.value)

    def test_plain_partial_summation(self, lam):
        X = 1000.0
        sup = lam.support
        n = sup[(sup >= X) & (sup <= 2 * X)]
        psi = np.cumsum(lam.values)
        # sum Lambda(n) B(n/X) = sum psi(n) (B(n/X) - B((n+1)/X)) over the support
        k = np.arange(int(X), int(2 * X) + 1)
        ref = math.fsum(psi[k] * (B(k / X) - B((k + 1) / X)))
        s = plain_smooth(X, B, lam)
        assert s.term_count == n.size
        assert abs(s.value - ref) <= 1e-8 * abs(ref)

    def test_plain_bound(self, lam):
        X = 1000.0
        s = plain_smooth(X, B, lam)
        assert abs(s.value - B.integral * X) <= 4 * math.sqrt(X) * math.log(X) ** 2

    def test_linearity(self, lam):
        a = plain_smooth(1000, B, lam).value
        b = plain_smooth(1000, B.scale(2.0), lam).value
        assert b == pytest.approx(2 * a, rel=1e-15)

    def test_plateau_smaller_support(self, lam):
        wide = plain_smooth(1000, plateau_bump(1, 2, 1.2, 1.8), lam)
        narrow = plain_smooth(1000, plateau_bump(1.2, 1.8, 1.3, 1.7), lam)
        assert narrow.term_count < wide.term_count
        assert narrow.value.real / wide.value.real == pytest.approx(
            plateau_bump(1.2, 1.8, 1.3, 1.7).integral / 0.8, rel=0.1)

    def test_capacity(self, lam):
        with pytest.raises(CapacityError):
            plain_smooth(6e4, B, lam)


class TestCharSums:
    def test_principal_mod_3(self, lam):
        chi0 = character_group(3).principal
        X = 1000.0
        a = char_sum_smooth(chi0, X, B, lam).value
        b = plain_smooth(X, B, lam).value
        threes = math.fsum(lam[3**k] * float(B(3**k / X)) for k in range(1, 8))
        assert abs(a - (b - threes)) < 1e-9

    def test_quadratic_cancels(self, lam):
        chi = character_group(3)[1]
        assert abs(char_sum_smooth(chi, 1000, B, lam).value) < 0.1 * B.integral * 1000

    @pytest.mark.parametrize("q", [3, 5, 7, 8])
    def test_decomposition(self, lam, q):
        for chi in character_group(q).primitive():
            direct = char_sum_smooth(chi, 500, B, lam).value
            assert abs(direct - char_sum_via_twists(chi, 500, B, lam)) <= 1e-8

    def test_workers(self, lam):
        chi = character_group(5).primitive()[0]
        assert char_sum_smooth(chi, 4e4, B, lam, workers=1) == char_sum_smooth(chi, 4e4, B, lam, workers=3)


class TestGonek:
    def test_against_mpmath(self):
        def chi(s):
            return mp.pi ** (s - 0.5) * mp.gamma((1 - s) / 2) / mp.gamma(s / 2)

        r, c, T = 2, 1, 100
        ref = mp.quad(lambda t: r ** (-(c + 1j * t)) * chi(1 - (c + 1j * t)), mp.linspace(1, T, 100))
        ref /= 2 * mp.pi
        assert abs(gonek_integral(r, c, T).value - complex(ref)) < 1e-9

    def test_first_case_main_term(self):
        g = gonek_integral(2, 1, 100)
        assert gonek_main_term(2, 100) == 1
        assert abs(g.value - 1) <= gonek_envelope(2, 1, 100)
        assert g.error_estimate <= 1e-6

    def test_second_case_small(self):
        assert gonek_main_term(50, 100) == 0
        assert abs(gonek_integral(50, 1, 100).value) < 0.1 * abs(gonek_integral(2, 1, 100).value)

    def test_self_convergence(self):
        from zgl.sums import _gonek_panels
        g = gonek_integral(3, 0.5, 200)
        assert abs(_gonek_panels(3, 0.5, 200, 2 * g.panels) - g.value) <= 1e-6

    def test_domain(self):
        for args in [(0, 1, 100), (1, 3, 100), (1, 0.001, 100), (1, 1, 5)]:
            with pytest.raises(DomainError):
                gonek_integral(*args)

    def test_nonconvergence(self):
        with pytest.raises(ConvergenceError):
            gonek_integral(2, 1, 100, tol=1e-30, max_doublings=1)
