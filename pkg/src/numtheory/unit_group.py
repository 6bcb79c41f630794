from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod
from typing import Dict, List, Tuple

from sympy import factorint, totient
from sympy.ntheory import is_primitive_root
from sympy.ntheory.modular import crt

from ..errors import NonUnit


@dataclass(frozen=True)
class UnitGroupStructure:
    """
    Cyclic decomposition of (Z/fZ)*.

    Attributes:
        modulus: The modulus f
        generators: (residue mod f, multiplicative order) pairs
        dlog_table: unit residue -> exponent vector on the generators
    """
    modulus: int
    generators: Tuple[Tuple[int, int], ...]
    dlog_table: Dict[int, Tuple[int, ...]] = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return prod(order for _, order in self.generators)

    @property
    def exponent(self) -> int:
        """Least common multiple of the generator orders."""
        result = 1
        for _, order in self.generators:
            result = result * order // gcd(result, order)
        return result

    @property
    def units(self) -> List[int]:
        return sorted(self.dlog_table)

    def element(self, exponents: Tuple[int, ...]) -> int:
        """Residue represented by an exponent vector."""
        f = self.modulus
        value = 1 % f
        for (g, _), e in zip(self.generators, exponents):
            value = value * pow(g, e, f) % f
        return value


def smallest_primitive_root(q: int) -> int:
    """Smallest primitive root modulo an odd prime power q."""
    g = 2
    while gcd(g, q) != 1 or not is_primitive_root(g, q):
        g += 1
    return g


def local_generators(p: int, k: int) -> List[Tuple[int, int]]:
    """Generators (residue mod p**k, order) of (Z/p**k Z)*."""
    q = p**k
    if p == 2:
        if k == 1:
            return []
        if k == 2:
            return [(3, 2)]
        return [(q - 1, 2), (5, q // 4)]
    return [(smallest_primitive_root(q), int(totient(q)))]


def decompose_unit_group(f: int) -> UnitGroupStructure:
    """
    Decompose (Z/fZ)* by CRT over the prime powers dividing f.

    Each local generator is lifted to the residue that is congruent to it
    modulo its own prime power and to 1 modulo every other one. Odd prime
    powers use their smallest primitive root; 2**k >= 8 splits as
    <-1> x <5>.

    Args:
        f: Modulus, f >= 1

    Returns:
        UnitGroupStructure with an eagerly built discrete-log table
    """
    if f < 1:
        raise ValueError(f"Modulus must be positive, got {f}")

    factorization = sorted(factorint(f).items())
    prime_powers = [p**k for p, k in factorization]
    generators: List[Tuple[int, int]] = []

    for p, k in factorization:
        q = p**k
        others = [m for m in prime_powers if m != q]
        for g, order in local_generators(p, k):
            if others:
                lifted, _ = crt([q] + others, [g] + [1] * len(others))
                lifted = int(lifted)
            else:
                lifted = g % f
            generators.append((lifted, order))

    dlog_table: Dict[int, Tuple[int, ...]] = {}
    for exponents in product(*(range(order) for _, order in generators)):
        value = 1 % f
        for (g, _), e in zip(generators, exponents):
            value = value * pow(g, e, f) % f
        dlog_table[value] = exponents

    return UnitGroupStructure(modulus=f, generators=tuple(generators), dlog_table=dlog_table)


def discrete_log(group: UnitGroupStructure, a: int) -> Tuple[int, ...]:
    """
    Exponent vector of a unit on the group's generators.

    Raises:
        NonUnit: gcd(a, f) > 1
    """
    f = group.modulus
    if gcd(a, f) != 1:
        raise NonUnit(f"{a} is not a unit modulo {f}")
    return group.dlog_table[a % f]
