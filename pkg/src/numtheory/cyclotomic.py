"""
Exact arithmetic in Z[zeta_2n] = Z[x]/(x**n + 1) for 2n a power of 2.

Elements are dense coefficient vectors in the power basis
1, zeta, ..., zeta**(n-1). Reduction uses x**n = -1.
"""

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Tuple, Union

from ..errors import DegreeMismatch, InternalInconsistency, InvalidAutomorphism, NotDivisible
from ..utils.math_utils import is_two_power


@dataclass(frozen=True)
class CycInt:
    """
    An element sum(coeffs[i] * zeta_2n**i) of Z[zeta_2n].

    Attributes:
        half_degree: n, so that zeta_2n has degree n over Q
        coeffs: Exactly n integer coefficients
    """
    half_degree: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if not is_two_power(self.half_degree):
            raise ValueError(f"half_degree must be a power of 2, got {self.half_degree}")
        if len(self.coeffs) != self.half_degree:
            raise ValueError(
                f"Expected {self.half_degree} coefficients, got {len(self.coeffs)}"
            )

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "CycInt":
        coeffs = tuple(int(c) for c in coeffs)
        return cls(len(coeffs), coeffs)

    @classmethod
    def constant(cls, n: int, c: int) -> "CycInt":
        return cls(n, (int(c),) + (0,) * (n - 1))

    @classmethod
    def zero(cls, n: int) -> "CycInt":
        return cls.constant(n, 0)

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def content(self) -> int:
        """gcd of the coefficients (0 for the zero element)."""
        result = 0
        for c in self.coeffs:
            result = gcd(result, c)
        return result

    def _check(self, other: "CycInt") -> None:
        if not isinstance(other, CycInt):
            raise TypeError(f"Expected CycInt, got {type(other).__name__}")
        if other.half_degree != self.half_degree:
            raise DegreeMismatch(
                f"Cannot combine elements of Z[zeta_{2 * self.half_degree}] "
                f"and Z[zeta_{2 * other.half_degree}]"
            )

    def __add__(self, other: "CycInt") -> "CycInt":
        return add(self, other)

    def __sub__(self, other: "CycInt") -> "CycInt":
        return sub(self, other)

    def __mul__(self, other: Union["CycInt", int]) -> "CycInt":
        if isinstance(other, int):
            return CycInt(self.half_degree, tuple(c * other for c in self.coeffs))
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "CycInt":
        return CycInt(self.half_degree, tuple(-c for c in self.coeffs))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{i}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def add(a: CycInt, b: CycInt) -> CycInt:
    a._check(b)
    return CycInt(a.half_degree, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))


def sub(a: CycInt, b: CycInt) -> CycInt:
    a._check(b)
    return CycInt(a.half_degree, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))


def mul(a: CycInt, b: CycInt) -> CycInt:
    """Schoolbook product, then fold x**(i+n) onto -x**i."""
    a._check(b)
    n = a.half_degree
    full = [0] * (2 * n - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            full[i + j] += x * y
    folded = full[:n]
    for i in range(n, 2 * n - 1):
        folded[i - n] -= full[i]
    return CycInt(n, tuple(folded))


def root_of_unity(n: int, e: int) -> CycInt:
    """zeta_2n ** e as a signed monomial."""
    e %= 2 * n
    coeffs = [0] * n
    coeffs[e % n] = -1 if e >= n else 1
    return CycInt(n, tuple(coeffs))


def conjugate(a: CycInt, k: int) -> CycInt:
    """
    Apply sigma_k: zeta -> zeta**k.

    Raises:
        InvalidAutomorphism: k is even, so sigma_k is not an automorphism
    """
    if k % 2 == 0:
        raise InvalidAutomorphism(f"sigma_{k} is not an automorphism of Q(zeta_{2 * a.half_degree})")
    n = a.half_degree
    two_n = 2 * n
    coeffs = [0] * n
    for i, c in enumerate(a.coeffs):
        if c == 0:
            continue
        e = i * k % two_n
        if e >= n:
            coeffs[e - n] -= c
        else:
            coeffs[e] += c
    return CycInt(n, tuple(coeffs))


def norm(a: CycInt) -> int:
    """
    Absolute norm: product of sigma_k(a) over odd k in (0, 2n).

    Raises:
        InternalInconsistency: the product is not a rational integer
    """
    n = a.half_degree
    product = a
    for k in range(3, 2 * n, 2):
        product = mul(product, conjugate(a, k))
    if any(product.coeffs[1:]):
        raise InternalInconsistency(f"Norm of {a} has irrational part {product.coeffs[1:]}")
    return product.coeffs[0]


def exact_div_by_integer(a: CycInt, d: int) -> CycInt:
    """
    Divide every coefficient by d.

    Raises:
        NotDivisible: some coefficient is not a multiple of d
    """
    if d < 1:
        raise ValueError(f"Divisor must be positive, got {d}")
    for i, c in enumerate(a.coeffs):
        if c % d:
            raise NotDivisible(f"Coefficient {c} at index {i} is not divisible by {d}", index=i)
    return CycInt(a.half_degree, tuple(c // d for c in a.coeffs))


@dataclass(frozen=True)
class CycRational:
    """
    numerator / denominator in Q(zeta_2n), kept in lowest terms.

    Use CycRational.of() to build a normalized value.
    """
    numerator: CycInt
    denominator: int

    @classmethod
    def of(cls, numerator: CycInt, denominator: int = 1) -> "CycRational":
        if denominator == 0:
            raise ZeroDivisionError("CycRational with zero denominator")
        if denominator < 0:
            numerator, denominator = -numerator, -denominator
        g = gcd(numerator.content, denominator)
        if g > 1:
            numerator = exact_div_by_integer(numerator, g)
            denominator //= g
        return cls(numerator, denominator)

    @property
    def half_degree(self) -> int:
        return self.numerator.half_degree

    @property
    def is_integral(self) -> bool:
        return self.denominator == 1

    def __mul__(self, other: Union["CycRational", int]) -> "CycRational":
        if isinstance(other, int):
            return CycRational.of(self.numerator * other, self.denominator)
        return CycRational.of(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def to_cyc_int(self) -> CycInt:
        """
        Raises:
            NotDivisible: the value is not in Z[zeta_2n]
        """
        if self.denominator != 1:
            return exact_div_by_integer(self.numerator, self.denominator)
        return self.numerator

    def __str__(self) -> str:
        if self.denominator == 1:
            return str(self.numerator)
        return f"({self.numerator})/{self.denominator}"
