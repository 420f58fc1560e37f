import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zgl.arith import (
    RationalPhase,
    character_group,
    character_sum_conj,
    divisors,
    euler_phi,
    factorize,
    gauss_identity_residual,
    gauss_identity_rhs,
    gauss_sum,
    is_primitive,
    mobius,
    sieve_von_mangoldt,
)
from zgl.errors import CapacityError, DomainError, PrimitivityError


def brute_characters(q):
    """Every homomorphism (Z/qZ)* -> C*, by enumerating value vectors on the units."""
    units = [n for n in range(q) if math.gcd(n, q) == 1]
    phi = len(units)
    roots = [cmath.exp(2j * math.pi * k / phi) for k in range(phi)]
    found = []
    for vals in itertools.product(range(phi), repeat=phi):
        table = dict(zip(units, vals))
        if table[1 % q] != 0:
            continue
        if all((table[a] + table[b]) % phi == table[a * b % q] for a in units for b in units):
            found.append([roots[table[n]] if n in table else 0 for n in range(q)])
    return found


def brute_psi(N):
    total = 0.0
    for p in range(2, N + 1):
        if all(p % d for d in range(2, math.isqrt(p) + 1)):
            pk = p
            while pk <= N:
                total += math.log(p)
                pk *= p
    return total


class TestRationalPhase:
    def test_valid(self):
        xi = RationalPhase(1, 3)
        assert xi.value == pytest.approx(1 / 3)
        assert RationalPhase.parse("2/5") == RationalPhase(2, 5)

    @pytest.mark.parametrize("m,q", [(0, 3), (3, 3), (2, 4), (5, 3)])
    def test_invalid(self, m, q):
        with pytest.raises(DomainError):
            RationalPhase(m, q)

    def test_twist_is_exact_residue(self):
        xi = RationalPhase(2, 7)
        n = np.arange(0, 10**6, 9973)
        ref = np.exp(-2j * np.pi * ((n * 2) % 7) / 7)
        np.testing.assert_allclose(xi.twist(n), ref, atol=1e-15)


class TestVonMangoldt:
    def test_prime_power(self):
        lam = sieve_von_mangoldt(100)
        assert lam[8] == pytest.approx(0.6931472, abs=1e-7)
        assert lam[12] == 0
        assert lam[1] == 0

    def test_psi_100(self):
        lam = sieve_von_mangoldt(100)
        assert lam.psi(100) == pytest.approx(brute_psi(100), abs=1e-12)
        assert lam.psi(100) == pytest.approx(94.0453, abs=1e-4)

    def test_support_is_prime_powers(self):
        N = 5000
        lam = sieve_von_mangoldt(N)
        for n in range(2, N + 1):
            f = factorize(n)
            if len(f) == 1:
                (p,) = f
                assert lam[n] == math.log(p)
            else:
                assert lam[n] == 0

    def test_rh_range(self):
        lam = sieve_von_mangoldt(10**5)
        for N in (100, 1000, 10**4, 10**5):
            assert abs(lam.psi(N) - N) <= 4 * math.sqrt(N) * math.log(N) ** 2

    def test_limits(self):
        with pytest.raises(CapacityError):
            sieve_von_mangoldt(10**8 + 1)
        with pytest.raises(DomainError):
            sieve_von_mangoldt(1)
        with pytest.raises(CapacityError):
            sieve_von_mangoldt(50).psi(51)


class TestMultiplicative:
    @pytest.mark.parametrize(
        "q,mu,phi", [(1, 1, 1), (4, 0, 2), (6, 1, 2), (30, -1, 8), (97, -1, 96), (360, 0, 96)]
    )
    def test_values(self, q, mu, phi):
        assert mobius(q) == mu
        assert euler_phi(q) == phi

    @given(st.integers(min_value=1, max_value=3000))
    def test_phi_brute(self, q):
        assert euler_phi(q) == sum(1 for n in range(1, q + 1) if math.gcd(n, q) == 1)

    @given(st.integers(min_value=1, max_value=10**12))
    @settings(max_examples=25, deadline=None)
    def test_factorize_roundtrip(self, n):
        assert math.prod(p**e for p, e in factorize(n).items()) == n

    def test_mobius_sum_over_divisors(self):
        for n in range(2, 300):
            assert sum(mobius(d) for d in divisors(n)) == 0


class TestCharacterGroup:
    def test_mod_3(self):
        t = character_group(3)
        assert len(t) == 2
        assert t[0].is_principal
        assert t[1](2) == pytest.approx(-1)

    def test_mod_1(self):
        t = character_group(1)
        assert len(t) == 1
        assert t[0](0) == 1 and t[0](17) == 1

    @pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 12])
    def test_against_brute_force(self, q):
        ours = sorted(tuple(np.round(c.values(), 12)) for c in character_group(q))
        ref = sorted(tuple(np.round(np.array(v, dtype=complex), 12)) for v in brute_characters(q))
        assert len(ours) == len(ref)
        for a, b in zip(ours, ref):
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_mod_8_real(self):
        t = character_group(8)
        assert len(t) == 4
        for c in t:
            assert np.all(np.abs(c.values().imag) < 1e-15)

    def test_count_and_distinct(self):
        for q in range(1, 201):
            t = character_group(q)
            assert len(t) == euler_phi(q)
            keys = {tuple(c.exponents) for c in t}
            assert len(keys) == len(t)

    def test_multiplicativity_exact(self):
        rng = np.random.default_rng(11)
        for q in range(2, 101):
            for c in character_group(q):
                a = rng.integers(0, 10**6, 1000)
                b = rng.integers(0, 10**6, 1000)
                ka, kb, kab = (c.exponents[x % q] for x in (a, b, a * b))
                both = (ka >= 0) & (kb >= 0)
                assert np.all(kab[~both] == -1)
                assert np.all((ka[both] + kb[both]) % c.denominator == kab[both])

    def test_orthogonality(self):
        worst = 0.0
        for q in range(2, 201):
            for c in character_group(q):
                if not c.is_principal:
                    worst = max(worst, abs(character_sum_conj(c)))
        assert worst <= 1e-10

    def test_ceiling(self):
        with pytest.raises(CapacityError):
            character_group(10**4 + 1)


class TestPrimitivity:
    def test_principal_not_primitive(self):
        for q in (2, 3, 10, 64):
            assert not character_group(q).principal.is_primitive

    def test_quadratic_mod_3(self):
        assert is_primitive(character_group(3)[1])

    def test_mod_6_induced_from_3(self):
        six = character_group(6)
        assert len(six) == 2
        induced = [c for c in six if not c.is_principal][0]
        assert induced(5) == pytest.approx(-1)
        assert not is_primitive(induced)

    def test_against_literal_definition(self):
        # literal test over every proper divisor
        def literal(c):
            q = c.modulus
            for d in divisors(q)[:-1]:
                ks = [c.exponents[n] for n in range(1, q, d) if math.gcd(n, q) == 1]
                if all(k == 0 for k in ks):
                    return False
            return True

        for q in range(2, 80):
            for c in character_group(q):
                assert c.is_primitive == literal(c)

    def test_count_of_primitive(self):
        # number of primitive characters mod q is the Dirichlet convolution mu * phi
        for q in range(1, 120):
            expected = sum(mobius(d) * euler_phi(q // d) for d in divisors(q))
            assert len(character_group(q).primitive()) == expected


class TestGaussSums:
    def test_mod_3(self):
        tau = gauss_sum(character_group(3)[1])
        direct = sum(
            v * cmath.exp(2j * math.pi * n / 3) for n, v in enumerate([0, 1, -1])
        )
        assert abs(tau - direct) < 1e-15
        assert abs(tau - 1.7320508j) < 1e-7

    def test_modulus_sqrt_q(self):
        for q in range(3, 51):
            for c in character_group(q).primitive():
                assert abs(abs(gauss_sum(c)) - math.sqrt(q)) < 1e-12

    def test_principal_prime(self):
        for q in (3, 5, 7, 11, 13, 47):
            assert abs(gauss_sum(character_group(q).principal) + 1) < 1e-12

    def test_identity_mod_3(self):
        assert gauss_identity_residual(character_group(3)[1], 2) <= 1e-12

    def test_identity_exhaustive(self):
        worst = 0.0
        for q in range(3, 51):
            for c in character_group(q).primitive():
                tau = gauss_sum(c)
                for n in range(q):
                    worst = max(worst, gauss_identity_residual(c, n, tau))
        assert worst <= 1e-10

    def test_identity_periodic(self):
        c = character_group(7)[3]
        for n in range(7):
            assert abs(gauss_identity_residual(c, n) - gauss_identity_residual(c, n + 7)) < 1e-14

    def test_identity_at_zero(self):
        for q in (5, 12, 49):
            for c in character_group(q).primitive():
                assert gauss_identity_residual(c, 0) <= 1e-12

    def test_extra_parity_factor_flips_odd_characters(self):
        # chi(-1) * rhs equals chi(-1) chi(n): right for even chi, off by sign for odd chi
        for c in character_group(5).primitive():
            for n in range(1, 5):
                with_parity = c.parity * gauss_identity_rhs(c, n)
                assert abs(with_parity - c.parity * c(n)) < 1e-12

    def test_rejects_imprimitive(self):
        with pytest.raises(PrimitivityError):
            gauss_identity_residual(character_group(6)[1], 1)
