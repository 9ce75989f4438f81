"""Orbit iteration and the dynamical predicates over it.

Covers exact orbit records with a bit cap, periodicity tests backed by
canonical heights, S-integer-ratio and power-dependence witnesses with
closed-loop exact verification, primitive-divisor search, the S_k place
sets generated by the orbit of 0, and the constructive S-part witness
with its two proof inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .constants import A3
from .fields import FieldSpec, NFElement
from .ideals import (
    IdealFactorization,
    PrimeIdealRec,
    SSet,
    factor_element_ideal,
    factor_rational_prime,
    ord_ideal,
)
from .intfactor import (
    DEFAULT_RHO_BUDGET,
    multiplicative_dependence,
    strip_primes,
)
from .heights import (
    approximate_by_unit,
    element_bit_size,
    canonical_height,
    height_S_of_inverse,
    height_outside_S_of_inverse,
    height_value,
    support_lambda,
)
from .polynomials import Polynomial, splitting_degree

DEFAULT_BIT_CAP = 10**6
CYCLE_STEP_CAP = 64


@dataclass
class OrbitRecord:
    alpha: NFElement
    iterates: list[NFElement]
    truncated: bool
    _factorizations: dict[int, IdealFactorization] = dc_field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.iterates) - 1

    def heights(self) -> list[float]:
        return [height_value(x) for x in self.iterates]

    def factorization(self, k: int, budget: int = DEFAULT_RHO_BUDGET, cache=None):
        """Ideal factorization of the k-th iterate, computed on demand."""
        if k not in self._factorizations:
            self._factorizations[k] = factor_element_ideal(
                self.iterates[k], budget, cache
            )
        return self._factorizations[k]


def iterate_orbit(
    f: Polynomial, alpha, m: int, bit_cap: int = DEFAULT_BIT_CAP
) -> OrbitRecord:
    """Exact iterates alpha, f(alpha), ..., up to m or the bit cap."""
    if m < 0:
        raise ValueError("m must be >= 0")
    field = f.field
    if not isinstance(alpha, NFElement):
        alpha = field.element(alpha)
    its = [alpha]
    truncated = False
    for _ in range(m):
        nxt = f(its[-1])
        if element_bit_size(nxt) > bit_cap:
            truncated = True
            break
        its.append(nxt)
    return OrbitRecord(alpha, its, truncated)


# ---------------------------------------------------------------------------
# periodicity
# ---------------------------------------------------------------------------


def _cycle_scan(f: Polynomial, start: NFElement, step_cap: int, bit_cap: int):
    """(repeat_found, zero_reappears, values) for the forward orbit."""
    seen = {start: 0}
    vals = [start]
    x = start
    for k in range(1, step_cap + 1):
        x = f(x)
        if element_bit_size(x) > bit_cap:
            return None, False, vals
        if x in seen:
            cycle_start = seen[x]
            cycle = vals[cycle_start:]
            return True, any(v.is_zero() for v in cycle), vals
        seen[x] = k
        vals.append(x)
    return False, False, vals


def is_zero_periodic(
    f: Polynomial, step_cap: int = CYCLE_STEP_CAP, bit_cap: int = DEFAULT_BIT_CAP
) -> bool | None:
    """Whether 0 is a periodic point of f; None when undecided at the caps.

    A detected cycle answers exactly.  Without one, a positive canonical
    height of 0 (beyond twice its certified error) rules periodicity out.
    """
    if f.degree < 2:
        raise ValueError("periodicity predicates need deg f >= 2")
    zero = f.field.zero()
    found, through_zero, _ = _cycle_scan(f, zero, step_cap, bit_cap)
    if found:
        return bool(through_zero)
    ch = canonical_height(f, zero, tol=1e-6, bit_cap=bit_cap)
    if ch.value > 2 * ch.error_bound:
        return False
    return None


def is_preperiodic(
    f: Polynomial, alpha, step_cap: int = CYCLE_STEP_CAP, bit_cap: int = DEFAULT_BIT_CAP
) -> bool | None:
    """Whether alpha has a finite forward orbit; None when undecided."""
    if f.degree < 2:
        raise ValueError("periodicity predicates need deg f >= 2")
    field = f.field
    if not isinstance(alpha, NFElement):
        alpha = field.element(alpha)
    found, _, _ = _cycle_scan(f, alpha, step_cap, bit_cap)
    if found:
        return True
    ch = canonical_height(f, alpha, tol=1e-6, bit_cap=bit_cap)
    if ch.value > 2 * ch.error_bound:
        return False
    return None


# ---------------------------------------------------------------------------
# S-integrality and S-units without oversize factorizations
# ---------------------------------------------------------------------------


def is_s_integer(x: NFElement, S: SSet) -> bool:
    """|x|_v <= 1 at every place outside S, decided from exact orders.

    Denominator primes with no ideal in S refute membership outright, so
    no factorization of large cofactors is ever needed.
    """
    if x.is_zero():
        return True
    _, m = x.integral_parts()
    s_primes = S.rational_primes()
    rest, _ = strip_primes(m, s_primes)
    if rest > 1:
        return False
    for p in s_primes:
        for P in factor_rational_prime(x.field, p):
            if not S.contains_ideal(P) and ord_ideal(x, P) < 0:
                return False
    return True


def is_s_unit(x: NFElement, S: SSet) -> bool:
    """|x|_v = 1 at every place outside S."""
    if x.is_zero():
        return False
    return is_s_integer(x, S) and is_s_integer(x.inverse(), S)


# ---------------------------------------------------------------------------
# dependence witnesses
# ---------------------------------------------------------------------------


@dataclass
class DependenceWitness:
    kind: str  # "s_integer_ratio" | "power_relation"
    alpha: NFElement
    m: int
    n: int
    v: NFElement | None = None
    r: int | None = None
    s: int | None = None
    u: NFElement | None = None
    verified: bool = False

    def sort_key(self):
        return (self.m, self.n, self.kind)

    def row(self) -> dict:
        return {
            "type": "witness",
            "kind": self.kind,
            "alpha": self.alpha.as_string(),
            "m": self.m,
            "n": self.n,
            "v": None if self.v is None else self.v.as_string(),
            "r": self.r,
            "s": self.s,
            "u": None if self.u is None else self.u.as_string(),
            "verified": self.verified,
        }


def check_s_integer_ratio(
    f: Polynomial, alpha, m: int, n: int, S: SSet
) -> DependenceWitness | None:
    """Witness for f^(n)(alpha) = v * f^(m)(alpha) with v an S-integer."""
    if not (m > n >= 0):
        raise ValueError("need m > n >= 0")
    field = f.field
    if not isinstance(alpha, NFElement):
        alpha = field.element(alpha)
    xm = f.iterate_value(alpha, m)
    if xm.is_zero():
        raise ZeroDivisionError("f^(m)(alpha) = 0: the ratio is undefined")
    xn = f.iterate_value(alpha, n)
    v = xn / xm
    if not is_s_integer(v, S):
        return None
    verified = (v * xm) == xn
    return DependenceWitness(
        "s_integer_ratio", alpha, m, n, v=v, verified=verified
    )


def _ord_vector_outside_S(
    x: NFElement, S: SSet, budget: int, cache
) -> dict[tuple, int]:
    fac = factor_element_ideal(x, budget, cache)
    return {P.key(): e for P, e in fac.restrict_outside(S).items()}


def check_power_dependence(
    f: Polynomial, alpha, m: int, n: int, S: SSet,
    budget: int = DEFAULT_RHO_BUDGET, cache=None,
) -> DependenceWitness | None:
    """Witness (r, s, u) for (f^(m)(alpha))^r = u (f^(n)(alpha))^s, u an S-unit.

    The order vectors of the two iterates away from S must be proportional
    over Q.  Over Q itself this is decided exactly through the common
    perfect-power structure of the S-stripped values, with no factor
    budget; the quadratic route factors both values.
    """
    if not (m > n >= 1):
        raise ValueError("need m > n >= 1")
    field = f.field
    if not isinstance(alpha, NFElement):
        alpha = field.element(alpha)
    xm = f.iterate_value(alpha, m)
    xn = f.iterate_value(alpha, n)
    if xm.is_zero() or xn.is_zero():
        raise ZeroDivisionError("power dependence needs both iterates nonzero")

    rs = None
    if field.degree == 1 and xm.is_integral() and xn.is_integral():
        s_primes = S.rational_primes()
        X, _ = strip_primes(int(xm.a), s_primes)
        Y, _ = strip_primes(int(xn.a), s_primes)
        if X == 1:
            rs = (1, 0)
        elif Y == 1:
            rs = (0, 1)
        else:
            rs = multiplicative_dependence(X, Y)
    else:
        va = _ord_vector_outside_S(xm, S, budget, cache)
        vb = _ord_vector_outside_S(xn, S, budget, cache)
        if not va:
            rs = (1, 0)
        elif not vb:
            rs = (0, 1)
        elif set(va) == set(vb):
            ratios = {Fraction(va[k], vb[k]) for k in va}
            if len(ratios) == 1:
                ratio = ratios.pop()  # = s/r
                rs = (ratio.denominator, ratio.numerator)
    if rs is None:
        return None
    r, s = rs
    u = (xm**r) / (xn**s)
    if not is_s_unit(u, S):
        return None
    verified = (xm**r) == (u * xn**s)
    return DependenceWitness(
        "power_relation", alpha, m, n, r=r, s=s, u=u, verified=verified
    )


# ---------------------------------------------------------------------------
# primitive divisors
# ---------------------------------------------------------------------------


@dataclass
class ZsigmondyResult:
    m: int
    window_k: int
    primitive_prime: PrimeIdealRec | None
    excluded_indices: list[int]


def find_primitive_divisor(
    f: Polynomial, alpha, m: int, k: int,
    budget: int = DEFAULT_RHO_BUDGET, cache=None,
) -> ZsigmondyResult:
    """Smallest-norm prime of f^(m)(alpha) absent from the k earlier iterates.

    Raises IncompleteFactorization when any of the needed values exceeds
    the factor budget; the caller decides whether that is a skip.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    field = f.field
    if not isinstance(alpha, NFElement):
        alpha = field.element(alpha)
    orbit = iterate_orbit(f, alpha, m)
    if orbit.truncated or orbit.length < m:
        raise ValueError(f"orbit truncated below m = {m} by the bit cap")
    xm = orbit.iterates[m]
    if xm.is_zero() or (xm.is_integral() and abs(xm.norm()) == 1):
        raise ValueError("f^(m)(alpha) is a unit or zero: no divisor to find")
    lo = max(0, m - k)
    window = list(range(lo, m))
    fac_m = orbit.factorization(m, budget, cache)
    window_primes: set[tuple] = set()
    zero_in_window = False
    for j in window:
        xj = orbit.iterates[j]
        if xj.is_zero():
            zero_in_window = True
            continue
        window_primes.update(
            P.key() for P in orbit.factorization(j, budget, cache).positive_part()
        )
    primitive = None
    if not zero_in_window:
        for P in sorted(fac_m.positive_part(), key=lambda P: (P.norm, P.p, P.kind)):
            if P.key() not in window_primes:
                primitive = P
                break
    return ZsigmondyResult(m, k, primitive, window)


def build_Sk(f: Polynomial, k: int, budget: int = DEFAULT_RHO_BUDGET, cache=None) -> SSet:
    """S_k: archimedean places plus every prime dividing f^(j)(0), j <= k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    zp = is_zero_periodic(f)
    if zp:
        raise ValueError("0 is periodic: S_k is not defined")
    field = f.field
    ideals = []
    x = field.zero()
    for _ in range(k):
        x = f(x)
        if x.is_zero():
            raise ValueError("orbit of 0 hits 0: S_k is not defined")
        ideals.extend(factor_element_ideal(x, budget, cache).positive_part())
    return SSet(field, ideals)


def support_lambda_of_ratio(
    xm: NFElement, xn: NFElement, budget: int = DEFAULT_RHO_BUDGET, cache=None
) -> int:
    """Largest prime-ideal norm in the positive support of xm / xn."""
    return support_lambda(xm / xn, budget, cache).lam


# ---------------------------------------------------------------------------
# the divisibility-transfer check behind the ratio witnesses
# ---------------------------------------------------------------------------


def divisibility_transfer_holds(
    f: Polynomial, witness: DependenceWitness, S: SSet,
    budget: int = DEFAULT_RHO_BUDGET, cache=None,
) -> bool:
    """Whether the S-free part of [f^(m)(alpha)] divides f^(m-n)(0), exactly."""
    if witness.kind != "s_integer_ratio":
        raise ValueError("transfer check applies to ratio witnesses")
    field = f.field
    alpha = witness.alpha
    k = witness.m - witness.n
    fk0 = f.iterate_value(field.zero(), k)
    if fk0.is_zero():
        return True
    xm = f.iterate_value(alpha, witness.m)
    if field.degree == 1 and xm.is_integral() and fk0.is_integral():
        X, _ = strip_primes(int(xm.a), S.rational_primes())
        return int(fk0.a) % X == 0
    fac = factor_element_ideal(xm, budget, cache)
    for P, e in fac.restrict_outside(S).items():
        if e > 0 and ord_ideal(fk0, P) < e:
            return False
    return True


# ---------------------------------------------------------------------------
# generators of ideal powers and the S-part proof witness
# ---------------------------------------------------------------------------


class GeneratorSearchError(ArithmeticError):
    pass


def principal_generator(P: PrimeIdealRec, power: int) -> NFElement:
    """Deterministic generator of P**power (which must be principal).

    Enumerates short lattice elements of the right norm and order; raises
    GeneratorSearchError rather than guessing when the search box is
    exhausted.
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    field = P.field
    if field.degree == 1:
        return field.element(P.p**power)
    if P.kind == "inert":
        return field.element(P.p**power)
    if P.kind == "ramified" and power % 2 == 0:
        return field.element(P.p ** (power // 2))
    target = P.norm**power
    D = field.D
    reg = field.regulator if field.unit_rank else 0.0
    bound = int(2 * math.sqrt(target * math.exp(reg) / abs(D))) + 2
    candidates = []
    for b in range(0, bound + 1):
        for a in _norm_equation_solutions(field, b, target):
            for x in ((a, b), (-a, -b)) if (a, b) != (0, 0) else ((a, b),):
                el = field.element(x[0], x[1])
                if el.is_zero():
                    continue
                if abs(el.norm()) == target and ord_ideal(el, P) >= power:
                    candidates.append(el)
        if candidates:
            break  # the smallest-b layer already contains a generator
    if not candidates:
        raise GeneratorSearchError(
            f"no generator of {P!r}^{power} within the search bound {bound}"
        )
    candidates.sort(key=lambda e: (abs(e.a), e.a < 0, abs(e.b), e.b < 0))
    return candidates[0]


def _norm_equation_solutions(field: FieldSpec, b: int, target: int):
    """All integers a with |Nm(a + b*w)| = target, for fixed b."""
    out = set()
    D = field.D
    for t in (target, -target):
        if field._omega_half:
            # (2a + b)^2 - D b^2 = 4 t
            disc = D * b * b + 4 * t
            if disc < 0:
                continue
            r = math.isqrt(disc)
            if r * r != disc:
                continue
            for sgn in (r, -r):
                num = sgn - b
                if num % 2 == 0:
                    out.add(num // 2)
        else:
            # a^2 = D b^2 + t
            val = D * b * b + t
            if val < 0:
                continue
            r = math.isqrt(val)
            if r * r == val:
                out.add(r)
                out.add(-r)
    return sorted(out)


@dataclass
class SPartWitness:
    b: NFElement
    s_ideals: list[PrimeIdealRec]
    exponents: list[int]
    quotients: list[int]
    remainders: list[int]
    generators: list[NFElement]
    c: NFElement
    eps: NFElement
    slack_lower: float
    slack_upper: float

    def row(self) -> dict:
        return {
            "type": "spart_witness",
            "b": self.b.as_string(),
            "exponents": list(self.exponents),
            "quotients": list(self.quotients),
            "remainders": list(self.remainders),
            "generators": [g.as_string() for g in self.generators],
            "c": self.c.as_string(),
            "eps": self.eps.as_string(),
            "slack_lower": self.slack_lower,
            "slack_upper": self.slack_upper,
        }


def spart_witness_from_value(
    field: FieldSpec, b: NFElement, deg_f: int, S: SSet,
    budget: int = DEFAULT_RHO_BUDGET, cache=None,
) -> SPartWitness:
    """Constructive witness for the S-part height gap of the value b.

    Decomposes the orders of b at the finite places of S as
    b_i = deg_f * h * q_i + r_i, divides out generators of the q_i-th
    ideal-power blocks, balances the cofactor by a unit, and records the
    two height inequalities of the construction with their slack.  Both
    slacks are required to be nonnegative.
    """
    if b.is_zero():
        raise ZeroDivisionError("witness needs a nonzero value")
    if not b.is_integral():
        raise ValueError("witness needs an integral value")
    if deg_f < 2:
        raise ValueError("witness needs deg f >= 2")
    h = field.class_number
    d = field.degree
    ideals = list(S.ideals)
    exps = [ord_ideal(b, P) for P in ideals]
    block = deg_f * h
    qs = [e // block for e in exps]
    rs = [e % block for e in exps]
    gens = [principal_generator(P, h) for P in ideals]
    denom = field.one()
    qdenom = field.one()
    for g, q in zip(gens, qs):
        denom = denom * g ** (deg_f * q)
        qdenom = qdenom * g**q
    c = b / denom
    if not c.is_integral():
        raise ArithmeticError("cofactor c escaped the ring: generator orders wrong")
    for P, r in zip(ideals, rs):
        if ord_ideal(c, P) != r:
            raise ArithmeticError("cofactor ideal does not match the remainders")
    eps = approximate_by_unit(c, deg_f)

    if field.unit_rank >= 1:
        a3_term = 0.5 * A3(field) * d * d * field.regulator
    else:
        a3_term = 0.0
    q_norm = S.Q
    log_q = math.log(q_norm) if q_norm > 1 else 0.0

    h_s_binv = height_S_of_inverse(b, S)
    lhs_lower = height_value(eps / qdenom)
    rhs_lower = h_s_binv / deg_f - h * log_q - a3_term
    slack_lower = lhs_lower - rhs_lower

    h_out_binv = height_outside_S_of_inverse(b, S, budget, cache)
    lhs_upper = height_value(eps**deg_f * c)
    rhs_upper = h_out_binv + deg_f * h / d * log_q + deg_f * a3_term
    slack_upper = rhs_upper - lhs_upper

    if slack_lower < -1e-9 or slack_upper < -1e-9:
        raise ArithmeticError(
            f"witness inequality violated: slacks {slack_lower}, {slack_upper}"
        )
    return SPartWitness(
        b, ideals, exps, qs, rs, gens, c, eps, slack_lower, slack_upper
    )


def spart_witness(
    f: Polynomial, alpha, S: SSet,
    budget: int = DEFAULT_RHO_BUDGET, cache=None,
) -> SPartWitness:
    """The witness built at b = f(alpha); f must split over the base field."""
    field = f.field
    if not isinstance(alpha, NFElement):
        alpha = field.element(alpha)
    if not alpha.is_integral():
        raise ValueError("alpha must be integral")
    if splitting_degree(f) != 1:
        raise ValueError("witness construction needs f split over the base field")
    b = f(alpha)
    if b.is_zero():
        raise ZeroDivisionError("f(alpha) = 0")
    return spart_witness_from_value(field, b, f.degree, S, budget, cache)
