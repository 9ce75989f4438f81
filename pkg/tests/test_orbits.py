import math
import random
from fractions import Fraction

import pytest
import sympy

from orbitforge.constants import A3
from orbitforge.fields import make_field
from orbitforge.heights import (
    height_S_of_inverse,
    height_outside_S_of_inverse,
    height_value,
)
from orbitforge.ideals import SSet, factor_rational_prime, ord_ideal
from orbitforge.orbits import (
    GeneratorSearchError,
    build_Sk,
    check_power_dependence,
    check_s_integer_ratio,
    divisibility_transfer_holds,
    find_primitive_divisor,
    is_preperiodic,
    is_s_integer,
    is_s_unit,
    is_zero_periodic,
    iterate_orbit,
    principal_generator,
    spart_witness,
    spart_witness_from_value,
)
from orbitforge.polynomials import Polynomial

Q = make_field("rational")
F2 = make_field("quadratic", 2)
Fm5 = make_field("quadratic", -5)

F_SQ1 = Polynomial(Q, [1, 0, 1])     # x^2 + 1
F_SQ = Polynomial(Q, [0, 0, 1])      # x^2
F_SQM1 = Polynomial(Q, [-1, 0, 1])   # x^2 - 1
F_CUBE = Polynomial(Q, [3, -1, 0, 1])  # x^3 - x + 3
F_SPLIT = Polynomial(Q, [-6, 11, -6, 1])  # (x-1)(x-2)(x-3)


def S_of(field, *primes):
    return SSet(field, [P for p in primes for P in factor_rational_prime(field, p)])


def test_iterate_orbit_examples():
    orb = iterate_orbit(F_SQ1, 1, 4)
    assert [x.a for x in orb.iterates] == [1, 2, 5, 26, 677]
    orb_id = iterate_orbit(Polynomial(Q, [0, 1]), 7, 3)
    assert [x.a for x in orb_id.iterates] == [7, 7, 7, 7]
    orb_cycle = iterate_orbit(F_SQM1, 0, 4)
    assert [x.a for x in orb_cycle.iterates] == [0, -1, 0, -1, 0]
    assert not orb.truncated


def test_iterate_orbit_bit_cap():
    orb = iterate_orbit(F_SQ1, 2, 50, bit_cap=100)
    assert orb.truncated and orb.length < 50


def test_is_zero_periodic():
    assert is_zero_periodic(F_SQM1) is True
    assert is_zero_periodic(F_SQ1) is False
    assert is_zero_periodic(Polynomial(Q, [0, 0, 1])) is True  # fixed point 0
    assert is_zero_periodic(F_CUBE) is False
    with pytest.raises(ValueError):
        is_zero_periodic(Polynomial(Q, [0, 1]))


def test_is_preperiodic():
    assert is_preperiodic(F_SQM1, 1) is True
    assert is_preperiodic(F_SQ1, 1) is False
    assert is_preperiodic(F_SQ, 0) is True
    assert is_preperiodic(F_SQ, 1) is True
    assert is_preperiodic(F_SQ, 2) is False


def test_s_integer_and_s_unit_predicates():
    S25 = S_of(Q, 2, 5)
    assert is_s_integer(Q.element(Fraction(3, 20)), S25)
    assert not is_s_integer(Q.element(Fraction(1, 3)), S25)
    assert is_s_unit(Q.element(Fraction(4, 5)), S25)
    assert not is_s_unit(Q.element(3), S25)
    assert is_s_unit(Q.element(-1), S25)
    # mixed split selection: only one ideal above 7 in S
    p7a, p7b = factor_rational_prime(F2, 7)
    S_half = SSet(F2, [p7a])
    x = F2.element(3, 1)  # lies in the b-side ideal
    assert not is_s_unit(x, S_half)
    assert is_s_unit(x, SSet(F2, [p7b]))
    assert is_s_unit(F2.element(1, 1), SSet(F2, []))  # unit


def test_ratio_witness_examples():
    S2 = S_of(Q, 2)
    w = check_s_integer_ratio(F_SQ, 2, 2, 1, S2)
    assert w is not None and w.v == Fraction(1, 4) and w.verified
    assert check_s_integer_ratio(F_SQ, 2, 2, 1, SSet(Q, [])) is None
    # zero numerator: v = 0 is an S-integer
    w0 = check_s_integer_ratio(F_SQM1, 1, 2, 1, SSet(Q, []))
    assert w0 is not None and w0.v == 0 and w0.verified
    with pytest.raises(ValueError):
        check_s_integer_ratio(F_SQ, 2, 1, 1, S2)


def test_ratio_witness_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        check_s_integer_ratio(F_SQM1, 1, 3, 1, SSet(Q, []))  # f^(3)(1) = 0


def test_power_witness_examples():
    S_inf = SSet(Q, [])
    w = check_power_dependence(F_SQ, 2, 2, 1, S_inf)
    assert w is not None and (w.r, w.s) == (1, 2) and w.u == 1 and w.verified
    assert check_power_dependence(F_SQ1, 1, 2, 1, S_inf) is None
    # both values S-units: (1, 0) convention with u the later iterate
    S25 = S_of(Q, 2, 5)
    w2 = check_power_dependence(F_SQ1, 1, 2, 1, S25)
    assert w2 is not None and (w2.r, w2.s) == (1, 0) and w2.u == 5
    # only the m-side is an S-unit
    w3 = check_power_dependence(F_SQ1, 1, 2, 1, S_of(Q, 5))
    assert w3 is not None and (w3.r, w3.s) == (1, 0)
    # only the n-side is an S-unit: (0, 1), u = 1/f^(n)(alpha)
    w4 = check_power_dependence(F_SQ1, 1, 2, 1, S_of(Q, 2))
    assert w4 is not None and (w4.r, w4.s) == (0, 1) and w4.u == Fraction(1, 2)
    with pytest.raises(ZeroDivisionError):
        check_power_dependence(F_SQM1, 1, 3, 1, S_inf)


def _oracle_power_scan(xm, xn, s_primes):
    # independent: try all (r, s) in a box, testing S-unit-ness by stripping
    def stripped(fr):
        num, den = abs(fr.numerator), fr.denominator
        for p in s_primes:
            while num % p == 0:
                num //= p
            while den % p == 0:
                den //= p
        return num, den

    for r in range(0, 7):
        for s in range(-6, 7):
            if (r, s) == (0, 0) or (r == 0 and s != 1):
                continue
            u = Fraction(xm) ** r / Fraction(xn) ** s
            if stripped(u) == (1, 1):
                return True
    return False


def test_power_witness_against_bruteforce_oracle():
    suites = [
        (F_SQ, [2, 3, 5, 6]),
        (F_SQ1, [1, 2, 3]),
        (F_CUBE, [1, 2, -2]),
        (Polynomial(Q, [0, 0, 2]), [1, 2, 3]),  # 2x^2
    ]
    s_sets = [(), (2,), (2, 3), (2, 3, 5)]
    for f, alphas in suites:
        for primes in s_sets:
            S = S_of(Q, *primes) if primes else SSet(Q, [])
            for a in alphas:
                for m in range(2, 5):
                    for n in range(1, m):
                        xm = f.iterate_value(Q.element(a), m)
                        xn = f.iterate_value(Q.element(a), n)
                        if xm.is_zero() or xn.is_zero():
                            continue
                        w = check_power_dependence(f, a, m, n, S)
                        oracle = _oracle_power_scan(int(xm.a), int(xn.a), primes)
                        if w is not None:
                            # library witness must re-substitute exactly
                            assert (xm ** w.r) == (w.u * xn ** w.s)
                            assert is_s_unit(w.u, S)
                        if oracle:
                            assert w is not None, (f, a, m, n, primes)


def test_power_witness_quadratic_route():
    # (3+sqrt2)^k values: supports are proportional
    S_inf = SSet(F2, [])
    x = F2.element(3, 1)
    f = Polynomial(F2, [F2.element(0), F2.element(0), F2.element(1)])  # x^2
    w = check_power_dependence(f, x, 2, 1, S_inf)
    assert w is not None and (w.r, w.s) == (1, 2)
    assert (f.iterate_value(x, 2) ** w.r) == w.u * f.iterate_value(x, 1) ** w.s
    assert is_s_unit(w.u, S_inf)


def test_find_primitive_divisor_examples():
    res = find_primitive_divisor(F_SQ1, 1, 3, 3)
    assert res.primitive_prime is not None and res.primitive_prime.norm == 13
    res2 = find_primitive_divisor(F_SQ1, 1, 2, 2)
    assert res2.primitive_prime.norm == 5
    res3 = find_primitive_divisor(F_SQ, 2, 3, 2)
    assert res3.primitive_prime is None
    with pytest.raises(ValueError):
        find_primitive_divisor(F_SQ, 1, 3, 2)  # iterates are units


def test_find_primitive_divisor_matches_sympy_oracle():
    for m in range(2, 7):
        res = find_primitive_divisor(F_SQ1, 1, m, m)
        vals = [int(F_SQ1.iterate_value(Q.element(1), j).a) for j in range(0, m + 1)]
        target = set(sympy.factorint(vals[m]))
        earlier = set()
        for v in vals[:-1]:
            if abs(v) > 1:
                earlier |= set(sympy.factorint(v))
        fresh = sorted(target - earlier)
        if fresh:
            assert res.primitive_prime is not None
            assert res.primitive_prime.norm == fresh[0]
        else:
            assert res.primitive_prime is None


def test_build_Sk_examples():
    sk2 = build_Sk(F_SQ1, 2)
    assert sk2.rational_primes() == [2]
    sk3 = build_Sk(F_SQ1, 3)
    assert sk3.rational_primes() == [2, 5]
    sk1 = build_Sk(F_SQ1, 1)
    assert sk1.rational_primes() == []  # f(0) = 1 is a unit
    sk_cube = build_Sk(F_CUBE, 1)
    assert sk_cube.rational_primes() == [3]
    with pytest.raises(ValueError):
        build_Sk(F_SQM1, 2)  # 0 periodic


def test_divisibility_transfer_on_witnesses():
    S235 = S_of(Q, 2, 3, 5)
    for a in range(-10, 11):
        for m in range(1, 5):
            for n in range(0, m):
                try:
                    w = check_s_integer_ratio(F_CUBE, a, m, n, S235)
                except ZeroDivisionError:
                    continue
                if w is not None:
                    assert divisibility_transfer_holds(F_CUBE, w, S235)


def test_principal_generator_examples():
    p7a, p7b = factor_rational_prime(F2, 7)
    g = principal_generator(p7a, 1)
    assert abs(g.norm()) == 7 and ord_ideal(g, p7a) == 1
    ram = factor_rational_prime(F2, 2)[0]
    g2 = principal_generator(ram, 1)
    assert abs(g2.norm()) == 2
    # class number 2: squares of the split ideals above 3 are principal
    p3a, p3b = factor_rational_prime(Fm5, 3)
    g3 = principal_generator(p3a, 2)
    assert abs(g3.norm()) == 9 and ord_ideal(g3, p3a) == 2 and ord_ideal(g3, p3b) == 0
    # but the ideal itself is not principal
    with pytest.raises(GeneratorSearchError):
        principal_generator(p3a, 1)
    # determinism
    assert principal_generator(p3a, 2) == g3


def test_spart_witness_worked_instance():
    S23 = S_of(Q, 2, 3)
    wit = spart_witness(F_SPLIT, 11, S23)
    assert wit.b == 720
    assert wit.exponents == [4, 2]
    assert wit.quotients == [1, 0] and wit.remainders == [1, 2]
    assert wit.c == 90 and wit.eps == 1
    assert wit.slack_lower == pytest.approx(0.828, abs=1e-3)
    assert wit.slack_upper == pytest.approx(2.485, abs=1e-3)


def test_spart_witness_t0_reduction():
    S_inf = SSet(Q, [])
    wit = spart_witness(F_SPLIT, 11, S_inf)
    assert wit.c == wit.b and wit.quotients == [] and wit.generators == []
    assert wit.slack_upper == pytest.approx(
        height_outside_S_of_inverse(wit.b, S_inf) - height_value(wit.b), abs=1e-9
    )


def test_spart_witness_preconditions():
    S23 = S_of(Q, 2, 3)
    with pytest.raises(ValueError):
        spart_witness(F_CUBE, 1, S23)  # does not split over Q
    with pytest.raises(ZeroDivisionError):
        spart_witness(F_SPLIT, 2, S23)  # f(2) = 0
    with pytest.raises(ValueError):
        spart_witness(F_SPLIT, Q.element(Fraction(1, 2)), S23)


def test_spart_witness_quadratic_instance():
    p7 = factor_rational_prime(F2, 7)
    S7 = SSet(F2, p7)
    b = F2.element(3, 1) ** 2
    wit = spart_witness_from_value(F2, b, 3, S7)
    assert sorted(wit.exponents) == [0, 2]
    assert wit.slack_lower >= 0 and wit.slack_upper >= 0
    # recombination of the S-decomposition against the full norm
    norms = 1
    for P, e in zip(wit.s_ideals, wit.exponents):
        norms *= P.norm**e
    assert abs(int(b.norm())) % norms == 0


def test_spart_witness_random_instances_all_fields():
    rng = random.Random(77)
    prime_pool = [2, 3, 5, 7, 11, 13]
    for field in (Q, F2, Fm5):
        f = Polynomial(field, [-6, 11, -6, 1])
        block = 3 * field.class_number
        for _ in range(100):
            if field.degree == 1:
                alpha = field.element(rng.randrange(-40, 41))
            else:
                alpha = field.element(rng.randrange(-15, 16), rng.randrange(-15, 16))
            b = f(alpha)
            if b.is_zero():
                continue
            chosen = rng.sample(prime_pool, rng.randrange(0, 4))
            ideals = []
            for p in chosen:
                ideals.extend(factor_rational_prime(field, p))
            S = SSet(field, ideals)
            wit = spart_witness(f, alpha, S)
            assert all(0 <= r < block for r in wit.remainders)
            assert wit.slack_lower >= -1e-9 and wit.slack_upper >= -1e-9
            for P, e, q, r in zip(wit.s_ideals, wit.exponents, wit.quotients, wit.remainders):
                assert e == block * q + r
                assert ord_ideal(wit.c, P) == r
