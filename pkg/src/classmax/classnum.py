"""Class numbers of quadratic fields, computed from reduced binary forms.

Imaginary fields use the classical count of reduced positive-definite forms
(-a < b <= a <= c, b >= 0 when a = c or b = a), cross-checkable against a
Dirichlet character-sum oracle and an O(|D|) nested-loop reference.  Real
fields use the restricted (narrow) class number, counted as cycles of reduced
indefinite forms under the rho reduction step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from . import arith
from .discriminants import is_fundamental

try:
    from gmpy2 import kronecker as _fast_kronecker
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _fast_kronecker = arith.kronecker

_CACHE_LIMIT = 1 << 20
_imag_cache: dict[int, int] = {}
_real_cache: dict[int, int] = {}


def set_cache_limit(limit: int) -> None:
    """Bound the in-memory class-number caches (never changes results)."""
    global _CACHE_LIMIT
    _CACHE_LIMIT = max(0, limit)
    if len(_imag_cache) > _CACHE_LIMIT:
        _imag_cache.clear()
    if len(_real_cache) > _CACHE_LIMIT:
        _real_cache.clear()


def _cache_put(cache: dict[int, int], key: int, value: int) -> None:
    if len(cache) >= _CACHE_LIMIT:
        cache.clear()
    cache[key] = value


@dataclass(frozen=True)
class QuadraticForm:
    """Primitive integral binary quadratic form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1


@dataclass(frozen=True)
class FormCycle:
    """Reduced indefinite forms closed under rho; always of even length."""

    forms: tuple[QuadraticForm, ...]

    def __len__(self) -> int:
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)

    def __getitem__(self, i):
        return self.forms[i]


# ---------------------------------------------------------------------------
# imaginary quadratic fields
# ---------------------------------------------------------------------------


def class_number_imaginary(d: int) -> int:
    """H(d) for a fundamental discriminant d < 0, by reduced-form counting.

    Iterates b over the parity class of d up to sqrt(|d|/3) and, for each b,
    the divisors a of (b^2 - d)/4 with b <= a <= sqrt((b^2-d)/4); the pair
    (a, c = m/a) contributes two forms for 0 < b < a < c and one on the
    boundary cases b = 0, b = a, a = c.
    """
    if d >= 0:
        raise ValueError("imaginary class number needs d < 0")
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    cached = _imag_cache.get(d)
    if cached is not None:
        return cached
    n = -d
    count = 0
    for b in range(n & 1, math.isqrt(n // 3) + 1, 2):
        m = (b * b + n) >> 2
        for a in arith.factorize(m).divisors():
            if a * a > m:
                break
            if a < max(b, 1):
                continue
            c = m // a
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            count += 1 if (b == 0 or b == a or a == c) else 2
    _cache_put(_imag_cache, d, count)
    return count


def class_number_imaginary_bruteforce(d: int) -> int:
    """O(|d|) nested-loop reference count, for |d| small; a second oracle."""
    if d >= 0 or not is_fundamental(d):
        raise ValueError("need a fundamental discriminant d < 0")
    n = -d
    count = 0
    for a in range(1, math.isqrt(n // 3) + 1):
        for b in range(-a + 1, a + 1):
            t = b * b + n
            if t % (4 * a):
                continue
            c = t // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            count += 1
    return count


def class_number_imaginary_oracle(d: int, bound: int = 10**6) -> int:
    """Dirichlet class number formula as an independent oracle.

    H = (w / (2|d|)) * |sum_{a=1}^{|d|-1} kronecker(d, a) * a|, with w = 6 for
    d = -3, w = 4 for d = -4, and w = 2 otherwise.
    """
    if d >= 0 or not is_fundamental(d):
        raise ValueError("need a fundamental discriminant d < 0")
    n = -d
    if n > bound:
        raise ValueError(f"|d| = {n} exceeds the oracle bound {bound}")
    w = 6 if n == 3 else 4 if n == 4 else 2
    s = 0
    kron = _fast_kronecker
    for a in range(1, n):
        s += kron(d, a) * a
    num = w * abs(s)
    den = 2 * n
    if num % den:
        raise ArithmeticError(f"oracle normalization broke at d = {d}")
    return num // den


# ---------------------------------------------------------------------------
# real quadratic fields (restricted sense)
# ---------------------------------------------------------------------------


def reduced_indefinite_forms(d: int) -> frozenset[QuadraticForm]:
    """All primitive reduced indefinite forms of fundamental discriminant d > 0.

    Reduction condition: |sqrt(d) - 2|a|| < b < sqrt(d), checked with exact
    integer inequalities.
    """
    if d <= 0:
        raise ValueError("indefinite forms need d > 0")
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    forms: set[QuadraticForm] = set()
    for b in range(2 - (d & 1), math.isqrt(d) + 1, 2):
        m = (d - b * b) >> 2
        if m <= 0:
            continue
        for g in arith.factorize(m).divisors():
            # window (sqrt(d)-b)/2 < g < (sqrt(d)+b)/2, exactly
            t1 = 2 * g + b
            if t1 * t1 <= d:
                continue
            t2 = 2 * g - b
            if t2 >= 0 and t2 * t2 >= d:
                continue
            c = m // g
            if math.gcd(math.gcd(g, b), c) != 1:
                continue
            forms.add(QuadraticForm(g, b, -c))
            forms.add(QuadraticForm(-g, b, c))
    return frozenset(forms)


def rho_step(form: QuadraticForm, d: int) -> QuadraticForm:
    """The reduction neighbor (c, b', c') with b' = -b mod 2c, b' in the window.

    Deterministic; input must be a reduced indefinite form of discriminant d.
    """
    if form.disc != d:
        raise ValueError("form discriminant mismatch")
    s = math.isqrt(d)
    a, b, c = form.a, form.b, form.c
    ac = abs(c)
    lo = s - 2 * ac + 1  # window (sqrt(d) - 2|c|, sqrt(d))
    bp = lo + (-b - lo) % (2 * ac)
    cp = (bp * bp - d) // (4 * c)
    nxt = QuadraticForm(c, bp, cp)
    if nxt.disc != d:
        raise ArithmeticError("rho step left the discriminant class")
    return nxt


def form_cycles(d: int) -> list[FormCycle]:
    """Partition of the reduced indefinite forms into rho-cycles."""
    forms = reduced_indefinite_forms(d)
    seen: set[QuadraticForm] = set()
    cycles: list[FormCycle] = []
    for start in sorted(forms, key=lambda f: (f.a, f.b, f.c)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        current = rho_step(start, d)
        while current != start:
            if current not in forms:
                raise ArithmeticError(f"rho escaped the reduced set at d = {d}")
            cycle.append(current)
            seen.add(current)
            current = rho_step(current, d)
        cycles.append(FormCycle(tuple(cycle)))
    return cycles


def narrow_class_number_real(d: int) -> int:
    """H+ for fundamental d > 0: the number of rho-cycles of reduced forms."""
    cached = _real_cache.get(d)
    if cached is not None:
        return cached
    count = len(form_cycles(d))
    _cache_put(_real_cache, d, count)
    return count
