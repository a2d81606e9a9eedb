"""Exact prime tables and certified analytic number theory helpers.

Primes come from a segmented sieve of Eratosthenes into numpy arrays; counts
are exact integers (searchsorted), never estimates. Transcendental quantities
(log of a primorial, Chebyshev theta, the offset logarithmic integral) are
returned as interval enclosures from `enclosure`.
"""

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import iv
import mpmath

from . import enclosure as enc
from .errors import CapacityError, DomainError

HARD_SIEVE_CAP = 1 << 32
_WINDOW = 1 << 22

_sieve_cap = HARD_SIEVE_CAP
_env_cap = os.environ.get("GVFORGE_SIEVE_LIMIT")
if _env_cap is not None:
    try:
        _sieve_cap = min(HARD_SIEVE_CAP, int(_env_cap))
    except ValueError:
        pass


def set_sieve_cap(limit: int) -> None:
    """Lower (or restore) the admissible sieve limit; hard cap is 2^32."""
    global _sieve_cap
    if limit < 2:
        raise DomainError("sieve cap must be >= 2")
    _sieve_cap = min(int(limit), HARD_SIEVE_CAP)


def sieve_cap() -> int:
    return _sieve_cap


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit, ascending, as an int64 array."""
    limit = int(limit)
    if limit < 2:
        raise DomainError("sieve limit must be >= 2, got %r" % limit)
    if limit > _sieve_cap:
        raise CapacityError(
            "sieve limit %d exceeds cap %d" % (limit, _sieve_cap))
    root = math.isqrt(limit)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p::p] = False
    base_primes = np.flatnonzero(base)

    chunks = []
    for lo in range(0, limit + 1, _WINDOW):
        hi = min(lo + _WINDOW, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            seg[:2] = False
        for p in base_primes:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start >= hi:
                continue
            seg[start - lo::p] = False
        chunks.append(np.flatnonzero(seg).astype(np.int64) + lo)
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)


class PrimeTable:
    """Immutable sieve snapshot with exact counting up to `limit`."""

    def __init__(self, limit: int):
        self.limit = int(limit)
        self.primes = sieve_primes(self.limit)
        res = self.primes % 4
        self.primes_1mod4 = self.primes[res == 1]
        self.primes_3mod4 = self.primes[res == 3]

    def __len__(self):
        return len(self.primes)

    def count(self, x: int) -> int:
        """pi(x), exact. Requires x <= limit."""
        self._check(x)
        return int(np.searchsorted(self.primes, x, side="right"))

    def count_ap(self, x: int, modulus: int, residue: int) -> int:
        """Primes p <= x with p = residue (mod modulus); modulus in {1, 4}."""
        self._check(x)
        if modulus not in (1, 4):
            raise DomainError("modulus must be 1 or 4, got %r" % modulus)
        if not 0 <= residue < modulus:
            raise DomainError("residue %r out of range mod %d" % (residue, modulus))
        if modulus == 1:
            return self.count(x)
        if residue == 1:
            arr = self.primes_1mod4
        elif residue == 3:
            arr = self.primes_3mod4
        elif residue == 2:
            return 1 if x >= 2 else 0
        else:
            return 0
        return int(np.searchsorted(arr, x, side="right"))

    def count_3mod4_in(self, lo: int, hi: int) -> int:
        """Primes p = 3 (mod 4) with lo <= p <= hi, exact."""
        self._check(hi)
        arr = self.primes_3mod4
        a = int(np.searchsorted(arr, lo, side="left"))
        b = int(np.searchsorted(arr, hi, side="right"))
        return max(b - a, 0)

    def nth(self, i: int) -> int:
        """p_i with p_1 = 2."""
        if i < 1:
            raise DomainError("prime index must be >= 1")
        if i > len(self.primes):
            raise CapacityError("table holds %d primes, need index %d"
                                % (len(self.primes), i))
        return int(self.primes[i - 1])

    def _check(self, x):
        if x > self.limit:
            raise CapacityError("query %d exceeds table limit %d" % (x, self.limit))


_table: PrimeTable = None


def table_for(limit: int) -> PrimeTable:
    """Shared growing table covering at least `limit`."""
    global _table
    limit = max(int(limit), 1 << 10)
    if limit > _sieve_cap:
        raise CapacityError("limit %d exceeds sieve cap %d" % (limit, _sieve_cap))
    if _table is None or _table.limit < limit:
        _table = PrimeTable(max(limit, limit + limit // 4))
    return _table


def nth_prime(i: int) -> int:
    """The i-th prime, 1-indexed (nth_prime(1) = 2)."""
    if i < 1:
        raise DomainError("prime index must be >= 1")
    if i < 6:
        return [2, 3, 5, 7, 11][i - 1]
    # Rosser-type upper bound p_i < i (ln i + ln ln i) for i >= 6
    bound = int(i * (math.log(i) + math.log(math.log(i)))) + 16
    return table_for(bound).nth(i)


def prime_count_ap(x: int, modulus: int, residue: int) -> int:
    """Exact count of primes p <= x in the residue class; modulus in {1, 4}."""
    if x < 0:
        raise DomainError("x must be >= 0")
    if x < 2:
        if modulus not in (1, 4):
            raise DomainError("modulus must be 1 or 4, got %r" % modulus)
        if not 0 <= residue < modulus:
            raise DomainError("residue %r out of range mod %d" % (residue, modulus))
        return 0
    return table_for(int(x)).count_ap(int(x), modulus, residue)


_CHUNK_BITS = 4000


def chebyshev_theta(x: int) -> enc.HighReal:
    """theta(x) = sum of log p over primes p <= x, as an enclosure.

    Products of primes are taken exactly in integers, then logged in chunks
    so every rounding step is an outward interval operation.
    """
    if x < 2:
        return iv.mpf(0)
    primes = table_for(int(x)).primes
    primes = primes[primes <= x]
    total = iv.mpf(0)
    prod = 1
    for p in primes:
        prod *= int(p)
        if prod.bit_length() >= _CHUNK_BITS:
            total += iv.log(iv.mpf(prod))
            prod = 1
    if prod > 1:
        total += iv.log(iv.mpf(prod))
    return total


PRIMORIAL_CAP = 10 ** 5


def primorial_D(ell: int):
    """(D, log D) with D = 4 * p_1 * ... * p_ell, D exact, log D enclosed."""
    if ell < 1:
        raise DomainError("ell must be >= 1")
    if ell > PRIMORIAL_CAP:
        raise CapacityError("ell %d exceeds primorial cap %d" % (ell, PRIMORIAL_CAP))
    p_ell = nth_prime(ell)
    primes = table_for(p_ell).primes
    D = 4
    for p in primes[:ell]:
        D *= int(p)
    return D, iv.log(iv.mpf(D))


def log_integral(x) -> enc.HighReal:
    """Li(x) = integral from 2 to x of dt/log t, as an enclosure; x >= 2.

    Series route: with u = log x, the antiderivative is
    log u + sum_{k>=1} u^k / (k * k!) up to a constant that cancels in the
    difference against the same expression at u = log 2. All terms are
    positive; once k >= 2u the term ratio stays below 1/2, so the dropped
    tail is below twice the first dropped term and is added as an interval.
    """
    if isinstance(x, (int, Fraction)) and x == 2:
        return iv.mpf(0)
    xe = enc.enc(x)
    if mpmath.mpf(xe.a) < 2:
        raise DomainError("log_integral requires x >= 2")
    u_x = iv.log(xe)
    u_2 = iv.log(iv.mpf(2))
    return (iv.log(u_x) + _li_series(u_x)) - (iv.log(u_2) + _li_series(u_2))


def _li_series(u) -> enc.HighReal:
    s = iv.mpf(0)
    term = iv.mpf(1)  # holds u^k / k!
    u_hi = float(mpmath.mpf(u.b))
    k = 0
    while True:
        k += 1
        if k > 600:
            raise CapacityError("series failed to converge (k > 600)")
        term = term * u / k
        contrib = term / k
        s += contrib
        if k >= 2 * u_hi + 8:
            nxt = term * u / ((k + 1) * (k + 1))
            tail_hi = 2 * mpmath.mpf(nxt.b)
            if tail_hi < mpmath.mpf(s.b) * mpmath.mpf(2) ** (-enc.PREC_BITS + 4):
                return s + iv.mpf([0, tail_hi])


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n), fully extended (n may be 0, negative, even)."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        e = 0
        while n % 2 == 0:
            n //= 2
            e += 1
        if e % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # now n is odd and positive; plain Jacobi loop with reciprocity
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a: int, p: int):
    """Smallest square root of a mod prime p, or None if a is a non-residue."""
    a %= p
    if p == 2:
        return a
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t, 0
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    assert r * r % p == a, "root verification failed"
    return min(r, p - r)


FACTOR_CAP = 10 ** 14


def factorize(n: int) -> dict:
    """Trial-division factorization of |n| (n != 0), capped at |n| <= 1e14."""
    n = abs(int(n))
    if n == 0:
        raise DomainError("cannot factor 0")
    if n > FACTOR_CAP:
        raise CapacityError("|n| = %d exceeds factorization cap %d" % (n, FACTOR_CAP))
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def int_nth_root(n: int, k: int) -> int:
    """floor(n^(1/k)) exactly, n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise DomainError("int_nth_root needs n >= 0, k >= 1")
    if n == 0:
        return 0
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = int(round(n ** (1.0 / k)))
    x = max(x, 1)
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x
