from typing import Dict, List, Tuple

from sympy import factorint, isprime

from ..errors import FactorizationIncomplete

DEFAULT_TRIAL_LIMIT = 10**7


def is_two_power(k: int) -> bool:
    """True for 1, 2, 4, 8, ..."""
    return k >= 1 and k & (k - 1) == 0


def two_adic_valuation(h: int) -> int:
    """
    Exponent of 2 in a positive integer.

    Args:
        h: Positive integer

    Returns:
        Largest a with 2**a dividing h
    """
    if h <= 0:
        raise ValueError(f"Expected a positive integer, got {h}")
    return (h & -h).bit_length() - 1


def odd_part(h: int) -> int:
    return h >> two_adic_valuation(h)


def factorize_with_budget(h: int, trial_limit: int = DEFAULT_TRIAL_LIMIT) -> Dict[int, int]:
    """
    Factor a positive integer, searching for factors up to a budget.

    Small factors are found by sympy's bounded search; every factor left
    over must then pass a deterministic primality test.

    Args:
        h: Positive integer to factor
        trial_limit: Largest factor searched for explicitly

    Returns:
        Mapping prime -> exponent

    Raises:
        FactorizationIncomplete: a composite cofactor survived the budget
    """
    if h < 1:
        raise ValueError(f"Expected a positive integer, got {h}")
    if h == 1:
        return {}

    factors = factorint(h, limit=trial_limit)
    for factor in factors:
        if not isprime(factor):
            raise FactorizationIncomplete(
                f"Cofactor {factor} of {h} is composite and has no factor below {trial_limit}"
            )
    return dict(sorted(factors.items()))


def is_squarefree(h: int, trial_limit: int = DEFAULT_TRIAL_LIMIT) -> bool:
    return all(e == 1 for e in factorize_with_budget(h, trial_limit).values())


def fermat_prime_degrees(limit: int = 1 << 16) -> List[Tuple[int, int]]:
    """
    Pairs (m, l) with l = 2**m + 1 prime and 2**m <= limit.

    Only these degrees 2n = 2**m admit the field Q(zeta_l) of conductor l.
    """
    pairs = []
    m = 1
    while (1 << m) <= limit:
        ell = (1 << m) + 1
        if isprime(ell):
            pairs.append((m, ell))
        m += 1
    return pairs
