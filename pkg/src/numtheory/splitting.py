"""
Splitting of odd primes in Q(zeta_2n) and the square-divisibility checks.

Since p does not divide 2n, Z[zeta_2n]/(p) is GF(p)[x]/(x**n + 1), so the
residue degrees of the primes above p are the degrees of the irreducible
factors of x**n + 1 over GF(p).
"""

from dataclasses import dataclass
from typing import List, Tuple

from sympy import isprime, n_order
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_degree, gf_gcd, gf_pow_mod, gf_quo, gf_rem, gf_sub

from ..errors import InvalidPrime, MalformedInput
from ..utils.math_utils import DEFAULT_TRIAL_LIMIT, factorize_with_budget, is_two_power


@dataclass(frozen=True)
class SplittingReport:
    """
    Attributes:
        p: Odd prime
        two_n: 2n
        order_f: Multiplicative order of p mod 2n (the residue degree)
        factor_degrees: Degrees of the irreducible factors of x**n + 1 mod p
        consistent: Degrees all equal order_f and number n / order_f
    """
    p: int
    two_n: int
    order_f: int
    factor_degrees: Tuple[int, ...]
    consistent: bool

    @property
    def prime_count(self) -> int:
        return len(self.factor_degrees)


def _require_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not isprime(p):
        raise InvalidPrime(f"{p} is not an odd prime")


def _require_degree(two_n: int) -> None:
    if not is_two_power(two_n) or two_n < 2:
        raise MalformedInput(f"Degree must be a power of 2, got {two_n}")


def multiplicative_order(p: int, two_n: int) -> int:
    """Smallest f >= 1 with p**f = 1 mod 2n."""
    _require_degree(two_n)
    if two_n == 2:
        return 1
    return int(n_order(p, two_n))


def factor_degrees_mod_p(n: int, p: int) -> Tuple[int, ...]:
    """
    Distinct-degree factorization of x**n + 1 over GF(p).

    At step i, gcd(f, x**(p**i) - x) collects the irreducible factors of
    degree i still present in f. x**n + 1 is squarefree mod odd p, so
    each such gcd of degree D holds exactly D / i factors.

    Args:
        n: Power of 2
        p: Odd prime

    Returns:
        Sorted factor degrees, summing to n
    """
    if p % 2 == 0:
        raise InvalidPrime(f"{p} is not odd")
    f = [ZZ(1)] + [ZZ(0)] * (n - 1) + [ZZ(1)]
    x = [ZZ(1), ZZ(0)]
    h = x
    degrees: List[int] = []

    i = 1
    while 2 * i <= gf_degree(f):
        h = gf_pow_mod(h, p, f, p, ZZ)
        g = gf_gcd(f, gf_sub(h, x, p, ZZ), p, ZZ)
        d = gf_degree(g)
        if d > 0:
            degrees.extend([i] * (d // i))
            f = gf_quo(f, g, p, ZZ)
            h = gf_rem(h, f, p, ZZ)
        i += 1

    if gf_degree(f) > 0:
        degrees.append(gf_degree(f))

    return tuple(sorted(degrees))


def splitting_report(p: int, two_n: int) -> SplittingReport:
    _require_odd_prime(p)
    _require_degree(two_n)
    n = two_n // 2
    order_f = multiplicative_order(p, two_n)
    degrees = factor_degrees_mod_p(n, p)
    consistent = all(d == order_f for d in degrees) and len(degrees) * order_f == n
    return SplittingReport(p=p, two_n=two_n, order_f=order_f,
                           factor_degrees=degrees, consistent=consistent)


def squarefree_norm_possible(p: int, two_n: int) -> bool:
    """A prime above p has squarefree norm p**f iff f = 1, i.e. p = 1 mod 2n."""
    return p % two_n == 1


def theorem_mechanism_check(
    h: int, two_n: int, trial_limit: int = DEFAULT_TRIAL_LIMIT
) -> List[int]:
    """
    Odd primes p | h with p != 1 mod 2n that divide h only once.

    Every relative class number of an imaginary cyclic field of degree
    2n should give an empty list.

    Raises:
        FactorizationIncomplete: h has a composite cofactor beyond the budget
    """
    if h < 1:
        raise ValueError(f"Expected a positive integer, got {h}")
    factors = factorize_with_budget(h, trial_limit)
    return [
        p for p, e in factors.items()
        if p != 2 and not squarefree_norm_possible(p, two_n) and e == 1
    ]


def norm_square_violations(value: int, two_n: int, trial_limit: int = DEFAULT_TRIAL_LIMIT) -> List[int]:
    """Same test applied to the norm of an element of Z[zeta_2n]."""
    return theorem_mechanism_check(abs(value), two_n, trial_limit) if value else []
