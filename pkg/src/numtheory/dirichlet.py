from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple

from sympy import factorint, primefactors, totient
from sympy.ntheory.modular import crt

from ..errors import MalformedInput
from ..utils.math_utils import is_two_power
from .unit_group import UnitGroupStructure, decompose_unit_group, local_generators


@dataclass(frozen=True)
class DirichletCharacter:
    """
    A Dirichlet character stored as root-of-unity exponents.

    values[a] is None when gcd(a, f) > 1, otherwise e(a) with
    chi(a) = zeta_order ** e(a).

    Attributes:
        modulus: The modulus f
        order: Exact order of the character
        values: Exponent table of length f
        generators: Unit group generators the character was built on
        generator_images: Exponents at those generators
        conductor: Smallest modulus the character is induced from
        parity: chi(-1), either +1 or -1
    """
    modulus: int
    order: int
    values: Tuple[Optional[int], ...]
    generators: Tuple[int, ...]
    generator_images: Tuple[int, ...]
    conductor: int
    parity: int

    @property
    def is_odd(self) -> bool:
        return self.parity == -1

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def sort_key(self) -> Tuple[int, ...]:
        return tuple(-1 if e is None else e for e in self.values)

    def evaluate(self, a: int) -> Optional[int]:
        return evaluate(self, a)

    def power(self, k: int) -> "DirichletCharacter":
        """chi**k for k coprime to the order (the Galois action on values)."""
        if gcd(k, self.order) != 1:
            raise ValueError(f"Exponent {k} is not coprime to the order {self.order}")
        n = self.order
        values = tuple(None if e is None else e * k % n for e in self.values)
        images = tuple(c * k % n for c in self.generator_images)
        return DirichletCharacter(
            modulus=self.modulus,
            order=n,
            values=values,
            generators=self.generators,
            generator_images=images,
            conductor=self.conductor,
            parity=self.parity,
        )


@dataclass(frozen=True)
class FieldOrbit:
    """
    Galois orbit {chi**k : k odd} of a primitive odd character of order 2n.

    One orbit identifies one imaginary cyclic field of degree 2n.
    """
    conductor: int
    degree: int
    members: Tuple[DirichletCharacter, ...]
    representative: DirichletCharacter

    @property
    def label(self) -> str:
        images = "-".join(str(c) for c in self.representative.generator_images)
        return f"{self.conductor}.{self.degree}.{images}"

    @property
    def conrey_label(self) -> str:
        return f"{self.conductor}.{conrey_index(self.representative)}"


def evaluate(chi: DirichletCharacter, a: int) -> Optional[int]:
    """Exponent e(a mod f), or None when a is not a unit."""
    return chi.values[a % chi.modulus]


def _factors_through(values: Tuple[Optional[int], ...], modulus: int, d: int) -> bool:
    """True when the character is trivial on every unit congruent to 1 mod d."""
    return all(values[a] in (None, 0) for a in range(1, modulus, d))


def conductor_of(chi: DirichletCharacter) -> int:
    return _conductor(chi.values, chi.modulus)


def _conductor(values: Tuple[Optional[int], ...], modulus: int) -> int:
    # Moduli the character factors through are closed under gcd, so
    # stripping one prime at a time lands on the conductor.
    d = modulus
    for p in primefactors(modulus):
        while d % p == 0 and _factors_through(values, modulus, d // p):
            d //= p
    return d


def character_from_images(
    group: UnitGroupStructure, order: int, images: Tuple[int, ...]
) -> DirichletCharacter:
    """
    Build the character sending generator i to zeta_order ** images[i].

    Args:
        group: Decomposition of (Z/fZ)*
        order: Root-of-unity order the exponents refer to
        images: One exponent per generator

    Returns:
        DirichletCharacter with its conductor and parity filled in
    """
    f = group.modulus
    if len(images) != len(group.generators):
        raise MalformedInput(f"Expected {len(group.generators)} generator images, got {len(images)}")
    for (g, g_order), c in zip(group.generators, images):
        if c * g_order % order:
            raise MalformedInput(f"Image {c} at generator {g} is not a {g_order}-th root of unity")

    values: List[Optional[int]] = [None] * f
    for unit, exponents in group.dlog_table.items():
        values[unit] = sum(c * e for c, e in zip(images, exponents)) % order

    table = tuple(values)
    parity = -1 if order % 2 == 0 and table[f - 1] == order // 2 else 1
    return DirichletCharacter(
        modulus=f,
        order=order,
        values=table,
        generators=tuple(g for g, _ in group.generators),
        generator_images=tuple(c % order for c in images),
        conductor=_conductor(table, f),
        parity=parity,
    )


def characters_of_exact_order(
    f: int,
    two_n: int,
    require_odd: bool = True,
    require_primitive: bool = True,
    group: Optional[UnitGroupStructure] = None,
) -> List[DirichletCharacter]:
    """
    All characters mod f of exact order 2n, filtered by parity and primitivity.

    Enumerates exponent vectors on the unit group generators. A vector
    has exact 2-power order 2n iff one of its entries is odd; parity is
    read off the discrete log of -1 before any value table is built.

    Args:
        f: Modulus
        two_n: Order 2n = 2**m >= 4
        require_odd: Keep only chi(-1) = -1
        require_primitive: Keep only conductor f
        group: Precomputed decomposition of (Z/fZ)*, if available

    Returns:
        Characters sorted by value table
    """
    if not is_two_power(two_n) or two_n < 4:
        raise MalformedInput(f"Degree must be a power of 2 that is at least 4, got {two_n}")
    if f < 3:
        return []
    if require_primitive and f % 4 == 2:
        return []

    group = group or decompose_unit_group(f)
    choices = [range(0, two_n, two_n // gcd(two_n, order)) for _, order in group.generators]
    minus_one = group.dlog_table[f - 1]

    characters = []
    for images in product(*choices):
        if not any(c % 2 for c in images):
            continue
        odd = sum(c * e for c, e in zip(images, minus_one)) % two_n == two_n // 2
        if require_odd and not odd:
            continue
        chi = character_from_images(group, two_n, images)
        if require_primitive and not chi.is_primitive:
            continue
        characters.append(chi)

    return sorted(characters, key=lambda chi: chi.sort_key)


def galois_orbits(chars: Iterable[DirichletCharacter]) -> List[FieldOrbit]:
    """
    Partition characters into orbits under chi -> chi**k, k odd.

    Args:
        chars: Primitive odd characters of one exact order 2n and one conductor

    Returns:
        Orbits ordered by their representatives

    Raises:
        MalformedInput: inputs are mixed, or an orbit is incomplete
    """
    pool: Dict[Tuple[int, ...], DirichletCharacter] = {}
    for chi in chars:
        pool[chi.sort_key] = chi
    if not pool:
        return []

    sample = next(iter(pool.values()))
    two_n, conductor = sample.order, sample.conductor
    for chi in pool.values():
        if chi.order != two_n or chi.conductor != conductor or not chi.is_odd or not chi.is_primitive:
            raise MalformedInput("Galois orbits need primitive odd characters of one order and conductor")

    n = two_n // 2
    orbits = []
    seen = set()
    for key in sorted(pool):
        if key in seen:
            continue
        chi = pool[key]
        members = sorted({m.sort_key: m for m in (chi.power(k) for k in range(1, two_n, 2))}.values(),
                         key=lambda m: m.sort_key)
        if len(members) != n or any(m.sort_key not in pool for m in members):
            raise MalformedInput(
                f"Orbit of a character mod {chi.modulus} has {len(members)} members, expected {n}"
            )
        seen.update(m.sort_key for m in members)
        orbits.append(FieldOrbit(
            conductor=conductor,
            degree=two_n,
            members=tuple(members),
            representative=members[0],
        ))
    return orbits


def conrey_index(chi: DirichletCharacter) -> int:
    """
    Conrey-style index of a character.

    Odd prime powers use the smallest primitive root; 2**k >= 8 uses the
    (-1, 5) basis. Agrees with the usual Conrey labels whenever that root
    is also primitive mod p**2, which holds below 40487.
    """
    f = chi.modulus
    n = chi.order
    residues, moduli = [], []
    images = iter(chi.generator_images)

    for p, k in sorted(factorint(f).items()):
        q = p**k
        gens = local_generators(p, k)
        local = [next(images) for _ in gens]
        if p == 2:
            if k == 1:
                c = 1
            elif k == 2:
                c = 3 if local[0] * 2 // n else 1
            else:
                sign = local[0] * 2 // n
                a = local[1] * (q // 4) // n
                c = (-1) ** sign * pow(5, a, q) % q
        else:
            g, _ = gens[0]
            a = local[0] * int(totient(q)) // n
            c = pow(g, a, q)
        residues.append(c)
        moduli.append(q)

    if not moduli:
        return 1
    index, _ = crt(moduli, residues)
    return int(index)
