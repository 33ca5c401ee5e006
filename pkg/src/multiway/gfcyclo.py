"""Finite fields GF(p^m), cyclotomic cosets and the quadratic-residue pairing.

Elements are plain ints in ``range(s)``: the element
``c_0 + c_1 x + ... + c_{m-1} x^{m-1}`` (coefficients in GF(p)) is the
integer ``c_0 + c_1 p + ... + c_{m-1} p^{m-1}``.  For a prime field this is
just the residue itself.  Separately, every element has a *code* used in
file formats: 0 for zero and ``k + 1`` for ``g**k`` where ``g`` is the
field's fixed primitive element.

The modulus is the smallest monic irreducible polynomial of degree ``m``
(ordering polynomials by the integer made from their low coefficients) and
``g`` is the smallest element of multiplicative order ``s - 1``.  Both
choices are deterministic, so every construction built on top of a field
is reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (BadResidueClass, CapExceeded, DoesNotDivide,
                     InvariantViolated, NotPrime, BadParameters)

MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(s: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``s == p**m``, or None if ``s`` is not a prime power."""
    if s < 2:
        return None
    for p in prime_factors(s)[:1]:
        m = 0
        while s % p == 0:
            s //= p
            m += 1
        return (p, m) if s == 1 else None
    return None


# -- polynomials over GF(p), coefficient lists low -> high ------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = list(a)
    inv_lead = pow(f[-1], p - 2, p)
    df = len(f) - 1
    while len(_trim(a)) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
    return a


def _pmulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, f, p)


def _ppowmod(a, e, f, p):
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return _trim(result)


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _trim(_pmod(a, b, p))
    return a


def _is_irreducible(f, p):
    m = len(f) - 1
    x = [0, 1]
    if _psub(_ppowmod(x, p ** m, f, p), x, p):
        return False
    for q in prime_factors(m):
        g = _pgcd(f, _psub(_ppowmod(x, p ** (m // q), f, p), x, p), p)
        if len(g) > 1:
            return False
    return True


def _to_poly(x, p, m):
    out = []
    for _ in range(m):
        out.append(x % p)
        x //= p
    return out


def _from_poly(a, p):
    v = 0
    for c in reversed(a):
        v = v * p + c
    return v


class FiniteField:
    """The field of order ``s = p**m`` with exp/log tables.

    Build instances with :func:`build_field`.  Instances are treated as
    immutable.
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...], g: int):
        self.p = p
        self.m = m
        self.s = p ** m
        self.modulus = modulus
        self.g = g
        s = self.s
        f = list(modulus)
        exp = [0] * (2 * (s - 1))
        log = [-1] * s
        cur = [1]
        gp = _to_poly(g, p, m)
        for k in range(s - 1):
            v = _from_poly(cur + [0] * (m - len(cur)), p)
            if log[v] != -1:
                raise InvariantViolated(f"{g} is not primitive in GF({s})")
            exp[k] = exp[k + s - 1] = v
            log[v] = k
            cur = _trim(_pmulmod(cur, gp, f, p)) or [0]
        self._exp = exp
        self._log = log
        self._digits = np.array([_to_poly(x, p, m) for x in range(s)], dtype=np.int64)
        self._weights = p ** np.arange(m, dtype=np.int64)

    def __repr__(self):
        return f"FiniteField(p={self.p}, m={self.m})"

    def __eq__(self, other):
        return (isinstance(other, FiniteField) and self.p == other.p
                and self.m == other.m and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    @property
    def elements(self) -> range:
        return range(self.s)

    @property
    def nonzero(self) -> list[int]:
        return list(range(1, self.s))

    # arithmetic
    def add(self, x: int, y: int) -> int:
        if self.m == 1:
            return (x + y) % self.p
        d = (self._digits[x] + self._digits[y]) % self.p
        return int(d @ self._weights)

    def neg(self, x: int) -> int:
        if self.m == 1:
            return (-x) % self.p
        return int(((-self._digits[x]) % self.p) @ self._weights)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self._exp[self._log[x] + self._log[y]]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self._exp[(self.s - 1 - self._log[x]) % (self.s - 1)]

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            return 1 if e == 0 else 0
        return self._exp[(self._log[x] * e) % (self.s - 1)]

    def log(self, x: int) -> int:
        """Discrete logarithm to base ``g``."""
        if x == 0:
            raise ValueError("log of zero")
        return self._log[x]

    def exp(self, k: int) -> int:
        return self._exp[k % (self.s - 1)]

    def frobenius(self, x: int) -> int:
        return self.pow(x, self.p)

    def order(self, x: int) -> int:
        k = self._log[x]
        from math import gcd
        return (self.s - 1) // gcd(k, self.s - 1)

    # file-format codes
    def encode(self, x: int) -> int:
        return 0 if x == 0 else self._log[x] + 1

    def decode(self, code: int) -> int:
        if not 0 <= code < self.s:
            raise ValueError(f"code {code} out of range for GF({self.s})")
        return 0 if code == 0 else self._exp[code - 1]

    @cached_property
    def add_table(self) -> np.ndarray:
        d = self._digits
        t = (d[:, None, :] + d[None, :, :]) % self.p
        return (t @ self._weights).astype(np.int64)

    @cached_property
    def traces(self) -> np.ndarray:
        return np.array([trace(self, x) for x in self.elements], dtype=np.int64)


def build_field(p: int, m: int = 1) -> FiniteField:
    """Construct GF(p^m) with its canonical modulus and primitive element."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise BadParameters("exponent m must be >= 1")
    if p ** m > MAX_ORDER:
        raise CapExceeded(f"field order {p}^{m} exceeds cap {MAX_ORDER}")
    s = p ** m
    modulus = None
    for low in range(p ** m):
        f = _to_poly(low, p, m) + [1]
        if m == 1 or _is_irreducible(f, p):
            modulus = tuple(f)
            break
    if modulus is None:  # pragma: no cover - irreducibles exist for every degree
        raise InvariantViolated("no irreducible polynomial found")
    factors = prime_factors(s - 1)
    f = list(modulus)
    for cand in range(1, s):
        a = _to_poly(cand, p, m)
        if s == 2 or all(_ppowmod(a, (s - 1) // q, f, p) != [1] for q in factors):
            return FiniteField(p, m, modulus, cand)
    raise InvariantViolated("no primitive element found")  # pragma: no cover


def field_of_order(s: int) -> FiniteField:
    pm = prime_power(s)
    if pm is None:
        raise BadParameters(f"s = {s} is not a prime power")
    return build_field(*pm)


def trace(field: FiniteField, x: int) -> int:
    """Absolute trace to the prime subfield.

    Uses ``x + x^p + ... + x^(p^(m-1))``; since ``x^(p^m) = x`` this is the
    same as summing the exponents ``p^1 .. p^m``.
    """
    total = 0
    y = x
    for _ in range(field.m):
        total = field.add(total, y)
        y = field.frobenius(y)
    if total >= field.p:
        raise InvariantViolated(f"trace({x}) = {total} left the prime subfield")
    return total


@dataclass(frozen=True)
class Cyclotomy:
    """The ``h`` cosets of the index-``h`` subgroup of the multiplicative group.

    ``cosets[i]`` is ``g**i * cosets[0]``, so ``C_i C_j = C_{i+j mod h}``.
    """

    field: FiniteField
    h: int
    t: int
    cosets: tuple[tuple[int, ...], ...]

    def coset_of(self, x: int) -> int:
        return self.field.log(x) % self.h

    def closed(self, i: int) -> tuple[int, ...]:
        """The coset ``C_i`` together with zero."""
        return (0,) + self.cosets[i % self.h]


def build_cyclotomy(field: FiniteField, h: int) -> Cyclotomy:
    s = field.s
    if h < 1 or (s - 1) % h:
        raise DoesNotDivide(f"h = {h} does not divide s - 1 = {s - 1}")
    t = (s - 1) // h
    cosets = tuple(
        tuple(sorted(field.exp(i + h * k) for k in range(t))) for i in range(h))
    return Cyclotomy(field, h, t, cosets)


@dataclass(frozen=True)
class ResiduePairing:
    """A set ``W`` of nonzero squares with a map ``f`` into the non-squares.

    For every ``xi`` in ``W``: ``(xi - 1)(f(xi) - 1)`` is a nonzero square,
    and for distinct ``xi, xi'``: ``(xi - xi')(f(xi) - f(xi'))`` is one too.
    """

    field: FiniteField
    W: tuple[int, ...]
    f: dict

    def check(self) -> list[str]:
        F = self.field
        cy = build_cyclotomy(F, 2)
        sq = set(cy.cosets[0])
        nsq = set(cy.cosets[1])
        problems = []
        if 4 * len(self.W) != F.s - 3:
            problems.append(f"|W| = {len(self.W)} != (s-3)/4")
        for xi in self.W:
            if xi not in sq:
                problems.append(f"{xi} not a square")
            if self.f[xi] not in nsq:
                problems.append(f"f({xi}) not a non-square")
            if F.mul(F.sub(xi, 1), F.sub(self.f[xi], 1)) not in sq:
                problems.append(f"(xi-1)(f(xi)-1) not a square at xi={xi}")
        for a in self.W:
            for b in self.W:
                if a < b and F.mul(F.sub(a, b), F.sub(self.f[a], self.f[b])) not in sq:
                    problems.append(f"pair ({a},{b}) fails")
        return problems


def build_residue_pairing(field: FiniteField) -> ResiduePairing:
    """``W = {x square : 1 - x^2 square}`` with ``f(x) = -1/x``."""
    if field.s % 4 != 3:
        raise BadResidueClass(f"s = {field.s} is not congruent to 3 mod 4")
    F = field
    sq = set(build_cyclotomy(F, 2).cosets[0])
    W = tuple(x for x in sorted(sq) if F.sub(1, F.mul(x, x)) in sq)
    f = {x: F.neg(F.inv(x)) for x in W}
    pairing = ResiduePairing(F, W, f)
    problems = pairing.check()
    if problems:
        raise InvariantViolated("; ".join(problems))
    return pairing
