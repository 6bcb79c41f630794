"""
Relative class numbers of imaginary cyclic fields of degree 2n = 2**m >= 4.

For a generator chi of the field's character group,

    w * L(0, chi) lies in Z[zeta_2n]  and  h^- = Q * w / 2**n * N(L(0, chi)),

with L(0, chi) = -(1/f) * sum_{a=1}^{f} chi(a) * a = -B_{1,chi}. The
conjugates of L(0, chi) are the L(0, chi**k) for odd k, so the product
over the odd characters of the field is the norm from Q(zeta_2n).
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..errors import NonIntegralResult, NotDivisible, OracleMismatch, ZeroLValue
from ..utils.math_utils import (
    DEFAULT_TRIAL_LIMIT,
    fermat_prime_degrees,
    is_squarefree,
    odd_part,
    two_adic_valuation,
)
from .cyclotomic import CycInt, CycRational, norm
from .dirichlet import DirichletCharacter, FieldOrbit
from .splitting import theorem_mechanism_check

DEFAULT_ORACLE_GUARD = 0.1


@dataclass(frozen=True)
class HMinusRecord:
    """
    Exact relative class number of one field plus everything used to get it.

    Attributes:
        orbit: The field's odd characters
        w: Number of roots of unity in the field
        q: Hasse unit index (always 1 for these fields)
        scaled_l_value: w * L(0, chi) for the representative chi
        norm_value: Norm of scaled_l_value from Q(zeta_2n) to Q
        h_minus: The relative class number
        eq4_checked: None unless the field is Q(zeta_l) with l = 2n + 1;
            then True once 2**(2n-1) * l**(n-1) * h^- = N(2l * L(0, chi))
        oracle_float: Floating-point h^- from the L-value product
        norm_identity_ok: 2**(2n-1) * (w/2)**(n-1) * h^- = N(w * L(0, chi))
        oracle_ok: Oracle within the rounding guard of h_minus
        mechanism_violations: Odd primes p != 1 mod 2n dividing h^- exactly once
    """
    orbit: FieldOrbit = field(repr=False)
    w: int
    q: int
    scaled_l_value: CycInt
    norm_value: int
    h_minus: int
    eq4_checked: Optional[bool]
    oracle_float: float
    norm_identity_ok: bool = True
    oracle_ok: bool = True
    mechanism_violations: Tuple[int, ...] = ()

    @property
    def conductor(self) -> int:
        return self.orbit.conductor

    @property
    def degree(self) -> int:
        return self.orbit.degree

    @property
    def label(self) -> str:
        return self.orbit.label

    @property
    def eq2_ok(self) -> bool:
        n = self.degree // 2
        return self.q * self.w * self.norm_value == self.h_minus * self.w**n * 2**n

    @property
    def mechanism_ok(self) -> bool:
        return not self.mechanism_violations

    @property
    def two_adic_exponent(self) -> int:
        return two_adic_valuation(self.h_minus)

    @property
    def odd_part(self) -> int:
        return odd_part(self.h_minus)

    @property
    def odd_part_squarefree(self) -> bool:
        return is_squarefree(self.odd_part)


def character_sum(chi: DirichletCharacter) -> CycInt:
    """S = sum_{a=1}^{f} chi(a) * a as an element of Z[zeta_2n]."""
    n = chi.order // 2
    coeffs = [0] * n
    for a, e in enumerate(chi.values):
        if e is None or a == 0:
            continue
        if e >= n:
            coeffs[e - n] -= a
        else:
            coeffs[e] += a
    return CycInt(n, tuple(coeffs))


def l_at_zero(chi: DirichletCharacter) -> CycRational:
    """L(0, chi) = -S / f in lowest terms."""
    return CycRational.of(-character_sum(chi), chi.modulus)


def w_and_Q(orbit: FieldOrbit) -> Tuple[int, int]:
    """
    Roots of unity and unit index of the field.

    The field is Q(zeta_l) exactly when l = 2n + 1 is prime and the
    conductor is l: it sits inside Q(zeta_l) and has the same degree.
    """
    ell = orbit.degree + 1
    fermat_primes = {prime for _, prime in fermat_prime_degrees(orbit.degree)}
    if orbit.conductor == ell and ell in fermat_primes:
        return 2 * ell, 1
    return 2, 1


def scaled_l_at_zero(chi: DirichletCharacter, w: int) -> CycInt:
    """
    w * L(0, chi) as an element of Z[zeta_2n], integrality checked.

    Raises:
        NotDivisible: w * S has a coefficient not divisible by f
    """
    try:
        return (l_at_zero(chi) * w).to_cyc_int()
    except NotDivisible as exc:
        raise NotDivisible(
            f"w*L(0,chi) is not integral for a character mod {chi.modulus} (w={w}): {exc}",
            index=exc.index,
        ) from exc


def analytic_oracle(orbit: FieldOrbit, w: Optional[int] = None, q: Optional[int] = None) -> float:
    """
    h^- = Q * w * 2**-n * prod |L(0, chi)| over the orbit, in floating point.

    Character values are complex exponentials; sums use math.fsum per
    component so rounding error stays far below the 0.1 guard.
    """
    if w is None or q is None:
        w, q = w_and_Q(orbit)
    two_n = orbit.degree
    n = two_n // 2
    f = orbit.conductor

    log_product = 0.0
    for chi in orbit.members:
        units = np.array([a for a, e in enumerate(chi.values) if e is not None and a > 0], dtype=float)
        exps = np.array([e for a, e in enumerate(chi.values) if e is not None and a > 0], dtype=float)
        values = np.exp(2j * np.pi * exps / two_n) * units
        s = complex(math.fsum(values.real), math.fsum(values.imag))
        log_product += math.log(abs(s) / f)

    return float(q * w * 2.0**-n * math.exp(log_product))


def h_minus(
    orbit: FieldOrbit,
    representative: Optional[DirichletCharacter] = None,
    oracle_guard: float = DEFAULT_ORACLE_GUARD,
    trial_limit: int = DEFAULT_TRIAL_LIMIT,
) -> HMinusRecord:
    """
    Exact relative class number of the field an orbit identifies.

    Args:
        orbit: Galois orbit of the field's odd characters
        representative: Orbit member to compute from (default: canonical one)
        oracle_guard: Largest tolerated |oracle - h^-|
        trial_limit: Factor search budget for the mechanism check

    Returns:
        HMinusRecord with all checks run

    Raises:
        ZeroLValue: N(w * L(0, chi)) = 0
        NonIntegralResult: Q * w * N(A) is not a multiple of (2w)**n, or an
            identity between the norm and h^- fails
        OracleMismatch: oracle further than oracle_guard from h^-
    """
    chi = representative or orbit.representative
    two_n = orbit.degree
    n = two_n // 2
    w, q = w_and_Q(orbit)

    scaled = scaled_l_at_zero(chi, w)
    norm_value = norm(scaled)
    if norm_value == 0:
        raise ZeroLValue(f"L(0, chi) vanishes for field {orbit.label}")

    numerator = q * w * norm_value
    denominator = w**n * 2**n
    if numerator % denominator or numerator <= 0:
        raise NonIntegralResult(
            f"Q*w*N(wL(0,chi)) = {numerator} is not a positive multiple of {denominator} "
            f"for field {orbit.label}"
        )
    h = numerator // denominator

    ell = w // 2
    identity_ok = 2 ** (2 * n - 1) * ell ** (n - 1) * h == norm_value
    eq4_checked: Optional[bool] = None
    if w != 2:
        if ell % two_n != 1 or not identity_ok:
            raise NonIntegralResult(
                f"2^(2n-1) * {ell}^(n-1) * h^- != N(2*{ell}*L(0,chi)) for field {orbit.label}"
            )
        eq4_checked = True

    oracle = analytic_oracle(orbit, w, q)
    oracle_ok = abs(oracle - h) < oracle_guard
    if not oracle_ok:
        raise OracleMismatch(
            f"Oracle {oracle:.6f} disagrees with exact h^- = {h} for field {orbit.label}"
        )

    return HMinusRecord(
        orbit=orbit,
        w=w,
        q=q,
        scaled_l_value=scaled,
        norm_value=norm_value,
        h_minus=h,
        eq4_checked=eq4_checked,
        oracle_float=oracle,
        norm_identity_ok=identity_ok,
        oracle_ok=oracle_ok,
        mechanism_violations=tuple(theorem_mechanism_check(h, two_n, trial_limit)),
    )
