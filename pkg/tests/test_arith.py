import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classmax import arith


def brute_distinct_primes(n: int) -> int:
    count = 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            count += 1
            while n % p == 0:
                n //= p
        p += 1
    return count + (1 if n > 1 else 0)


def brute_kronecker(a: int, n: int) -> int:
    """Definition-level Kronecker symbol: multiplicative over factors of n."""

    def legendre(a: int, p: int) -> int:
        a %= p
        if a == 0:
            return 0
        r = pow(a, (p - 1) // 2, p)
        return 1 if r == 1 else -1

    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        result *= 1 if a % 8 in (1, 7) else -1
    p = 3
    while p * p <= n:
        while n % p == 0:
            n //= p
            result *= legendre(a, p)
        p += 2
    if n > 1:
        result *= legendre(a, n)
    return result


class TestFactorize:
    def test_one_is_empty(self):
        assert arith.factorize(1).factors == ()

    def test_known_4199(self):
        assert arith.factorize(4199).factors == ((13, 1), (17, 1), (19, 1))

    def test_known_892371480(self):
        assert arith.factorize(892371480).factors == (
            (2, 3), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1),
        )

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            arith.factorize(0)

    def test_large_semiprime(self):
        n = 1000003 * 1000033
        assert arith.factorize(n).factors == ((1000003, 1), (1000033, 1))

    @given(st.integers(min_value=1, max_value=10**6))
    @settings(max_examples=300)
    def test_reconstruction_and_omega(self, n):
        fac = arith.factorize(n)
        assert math.prod(p**e for p, e in fac.factors) == n
        assert all(arith.is_prime(p) for p, _ in fac.factors)
        assert arith.omega(n) == brute_distinct_primes(n)

    def test_divisors(self):
        assert arith.factorize(12).divisors() == [1, 2, 3, 4, 6, 12]
        assert arith.factorize(1).divisors() == [1]


class TestOmegaValuation:
    def test_omega_examples(self):
        assert arith.omega(1) == 0
        assert arith.omega(4199) == 3
        assert arith.omega(9240) == 5

    def test_valuation_examples(self):
        assert arith.valuation(8, 2) == 3
        assert arith.valuation(136, 2) == 3
        assert arith.valuation(63, 3) == 2
        assert arith.valuation(7, 5) == 0

    def test_squarefree_examples(self):
        assert arith.is_squarefree(1)
        assert arith.is_squarefree(15)
        assert not arith.is_squarefree(18)


class TestKronecker:
    def test_examples(self):
        assert arith.kronecker(1, 7) == 1
        assert arith.kronecker(-3, 2) == -1
        assert arith.kronecker(-4, 3) == -1

    @given(st.integers(-300, 300), st.integers(-300, 300))
    @settings(max_examples=400)
    def test_matches_definition(self, a, n):
        assert arith.kronecker(a, n) == brute_kronecker(a, n)

    @given(st.integers(-200, 200), st.integers(-200, 200), st.integers(-60, 60))
    @settings(max_examples=300)
    def test_multiplicative_in_top(self, a, b, n):
        assert arith.kronecker(a * b, n) == arith.kronecker(a, n) * arith.kronecker(b, n)

    @given(st.integers(-200, 200), st.integers(-60, 60), st.integers(-60, 60))
    @settings(max_examples=300)
    def test_multiplicative_in_bottom(self, a, m, n):
        assert arith.kronecker(a, m * n) == arith.kronecker(a, m) * arith.kronecker(a, n)

    @given(st.integers(-500, 500), st.integers(1, 500))
    @settings(max_examples=300)
    def test_zero_iff_common_factor(self, a, n):
        assert (arith.kronecker(a, n) == 0) == (math.gcd(a, n) > 1)

    def test_matches_gmpy2(self):
        gmpy2 = pytest.importorskip("gmpy2")
        for a in range(-80, 81):
            for n in range(-80, 81):
                assert arith.kronecker(a, n) == gmpy2.kronecker(a, n)


class TestIsqrtExact:
    def test_examples(self):
        assert arith.isqrt_exact(0) == (0, True)
        assert arith.isqrt_exact(625) == (25, True)
        assert arith.isqrt_exact(626) == (25, False)

    @given(st.integers(min_value=0, max_value=10**12))
    @settings(max_examples=300)
    def test_bounds(self, n):
        root, exact = arith.isqrt_exact(n)
        assert root * root <= n < (root + 1) * (root + 1)
        assert exact == (root * root == n)


class TestIsPrime:
    def test_small(self):
        primes = set(arith.primes_upto(1000))
        for n in range(1001):
            assert arith.is_prime(n) == (n in primes)

    def test_64bit_boundary_cases(self):
        assert arith.is_prime(2**61 - 1)
        assert not arith.is_prime(2**62 - 1)
        assert arith.is_prime(9223372036854775783)  # largest prime < 2^63
