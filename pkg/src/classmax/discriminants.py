"""Fundamental discriminants of quadratic fields and conductors of cyclic fields."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from . import arith

IMAGINARY = "imaginary"
REAL = "real"


@dataclass(frozen=True)
class QuadDiscriminant:
    """A fundamental quadratic discriminant with its ramification count."""

    value: int
    abs: int
    signature: str
    n_ramified: int

    @classmethod
    def from_value(cls, value: int) -> "QuadDiscriminant":
        if not is_fundamental(value):
            raise ValueError(f"{value} is not a fundamental discriminant")
        return cls(
            value=value,
            abs=abs(value),
            signature=IMAGINARY if value < 0 else REAL,
            n_ramified=arith.omega(abs(value)),
        )


def is_fundamental(value: int) -> bool:
    """True iff value is the discriminant of a quadratic field.

    Either value = 1 mod 4 and squarefree, or value = 4m with m = 2, 3 mod 4
    and m squarefree.  Both signs supported; 0 and 1 are rejected.
    """
    if value in (0, 1):
        return False
    if value % 4 == 1:
        return arith.is_squarefree(abs(value))
    if value % 4 == 0:
        m = value // 4
        return m % 4 in (2, 3) and arith.is_squarefree(abs(m))
    return False


def iter_fundamental(signature: str, lo: int, hi: int) -> Iterator[QuadDiscriminant]:
    """Fundamental discriminants of one signature with lo <= |D| <= hi, ascending.

    Candidates are filtered one by one, mirroring how the scans walk D.
    """
    if signature not in (IMAGINARY, REAL):
        raise ValueError(f"unknown signature {signature!r}")
    if not 1 <= lo <= hi:
        raise ValueError("need 1 <= lo <= hi")
    sign = -1 if signature == IMAGINARY else 1
    for d in range(lo, hi + 1):
        value = sign * d
        if value == 1:
            continue
        if is_fundamental(value):
            yield QuadDiscriminant(
                value=value,
                abs=d,
                signature=signature,
                n_ramified=arith.omega(d),
            )


@dataclass(frozen=True)
class CyclicConductor:
    """Conductor of a degree-p cyclic field: f = p^(2*delta) * q_1...q_n."""

    p: int
    f: int
    delta: int
    tame_primes: tuple[int, ...]
    n_ramified: int

    @classmethod
    def from_value(cls, p: int, f: int) -> "CyclicConductor":
        if not is_cyclic_conductor(p, f):
            raise ValueError(f"{f} is not a degree-{p} cyclic conductor")
        ep = arith.valuation(f, p)
        tame = tuple(q for q, _ in arith.factorize(f // p**ep).factors)
        delta = 1 if ep else 0
        return cls(p=p, f=f, delta=delta, tame_primes=tame, n_ramified=delta + len(tame))


def is_cyclic_conductor(p: int, f: int) -> bool:
    """True iff f is the conductor of some degree-p cyclic field (p odd prime).

    Requires f = p^(2*delta) * q_1...q_n with delta in {0, 1}, the q_i distinct
    primes congruent to 1 mod p, and at least one ramified prime.
    """
    if p < 3 or not arith.is_prime(p):
        raise ValueError("p must be an odd prime")
    if f < 1:
        raise ValueError("f must be >= 1")
    if f == 1:
        return False
    ep = arith.valuation(f, p)
    if ep not in (0, 2):
        return False
    ff = f // p**ep
    if ff == 1:
        return True
    fac = arith.factorize(ff)
    if any(e != 1 for _, e in fac.factors):
        return False
    return all(q % p == 1 for q, _ in fac.factors)


def smallest_conductor_with_n_primes(p: int, n: int) -> int:
    """Product of the n smallest primes = 1 mod p (the n smallest odd primes for p = 2)."""
    if n < 1:
        raise ValueError("need n >= 1")
    if p < 2 or not arith.is_prime(p):
        raise ValueError("p must be prime")
    found = 0
    prod = 1
    q = 2
    while found < n:
        q += 1
        if q % p == 1 and arith.is_prime(q):
            prod *= q
            found += 1
    return prod
