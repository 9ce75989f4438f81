"""Big-integer primality and factorization with explicit step budgets.

Factorization never truncates silently: when the Pollard-rho budget runs
out with a composite cofactor left, IncompleteFactorization is raised and
carries the partial factorization plus the cofactor.
"""

from __future__ import annotations

import math

_TRIAL_BOUND = 10_000
_small_primes: list[int] | None = None

DEFAULT_RHO_BUDGET = 600_000


class IncompleteFactorization(ArithmeticError):
    """Factor budget exhausted; .partial and .cofactor describe what is known."""

    def __init__(self, n: int, partial: dict[int, int], cofactor: int):
        super().__init__(
            f"factor budget exhausted on {n}: composite cofactor {cofactor} remains"
        )
        self.n = n
        self.partial = dict(partial)
        self.cofactor = cofactor


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit by a byte sieve."""
    if limit < 2:
        return []
    sieve = bytearray(b"\x01") * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = b"\x00" * len(sieve[i * i :: i])
    return [i for i, fl in enumerate(sieve) if fl]


def small_primes() -> list[int]:
    global _small_primes
    if _small_primes is None:
        _small_primes = sieve_primes(_TRIAL_BOUND)
    return _small_primes


# Deterministic Miller-Rabin witness set for n < 3.317e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Miller-Rabin primality; deterministic below 3.3e24, fixed bases above."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def iroot(n: int, k: int) -> tuple[int, bool]:
    """Integer k-th root: largest r with r**k <= n, and whether r**k == n."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0, k >= 1")
    if n < 2 or k == 1:
        return n, True
    r = 1 << -(-n.bit_length() // k)  # upper estimate
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    return r, r**k == n


def perfect_power_base(n: int) -> tuple[int, int]:
    """Write n >= 1 as base**e with base not itself a perfect power; e maximal."""
    if n < 1:
        raise ValueError("perfect_power_base needs n >= 1")
    if n == 1:
        return 1, 1
    base, exp = n, 1
    changed = True
    while changed:
        changed = False
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
            if p > base.bit_length():
                break
            r, exact = iroot(base, p)
            if exact:
                base, exp = r, exp * p
                changed = True
                break
    return base, exp


def _brent_rho(n: int, budget: int) -> tuple[int | None, int]:
    """Brent-variant Pollard rho with deterministic parameters.

    Returns (factor, steps_used); factor is None when the budget ran out.
    """
    if n % 2 == 0:
        return 2, 0
    used = 0
    for c in range(1, 64):  # deterministic restart sequence
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1 and used < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k, budget - used)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                    used += 1
                g = math.gcd(q, n)
                k += m
                if used >= budget:
                    break
            r *= 2
        if g == n:
            # backtrack one step at a time
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                used += 1
                g = math.gcd(abs(x - ys), n)
                if used >= budget:
                    break
        if 1 < g < n:
            return g, used
        if used >= budget:
            return None, used
    return None, used


def factorize(n: int, budget: int = DEFAULT_RHO_BUDGET) -> dict[int, int]:
    """Full prime factorization of |n| >= 1 as {prime: exponent}.

    Trial division by small primes, then Miller-Rabin plus budgeted
    Pollard rho on what remains.  Raises IncompleteFactorization when the
    budget is exhausted with a composite piece left.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    orig = n
    out: dict[int, int] = {}
    if n == 1:
        return out
    for p in small_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return out

    remaining = budget
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        base, exp = perfect_power_base(m)
        if exp > 1:
            if is_prime(base):
                out[base] = out.get(base, 0) + exp
                continue
            stack.extend([base] * exp)
            continue
        f, used = _brent_rho(m, max(remaining, 0))
        remaining -= used
        if f is None:
            cof = m
            for q in stack:
                cof *= q
            raise IncompleteFactorization(orig, out, cof)
        stack.append(f)
        stack.append(m // f)
    return out


def strip_primes(n: int, primes) -> tuple[int, dict[int, int]]:
    """Remove all factors of the given primes from |n|; returns (rest, removed)."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot strip 0")
    removed: dict[int, int] = {}
    for p in primes:
        if p < 2:
            continue
        while n % p == 0:
            removed[p] = removed.get(p, 0) + 1
            n //= p
    return n, removed


def multiplicative_dependence(x: int, y: int) -> tuple[int, int] | None:
    """Minimal (r, s), r > 0, gcd(r,s) = 1, with |x|**r == |y|**s; None if none.

    Both inputs must have |.| >= 2: the trivial cases belong to the caller.
    """
    x, y = abs(x), abs(y)
    if x < 2 or y < 2:
        raise ValueError("multiplicative_dependence needs |x|, |y| >= 2")
    bx, ex = perfect_power_base(x)
    by, ey = perfect_power_base(y)
    if bx != by:
        return None
    g = math.gcd(ex, ey)
    return ey // g, ex // g
