import itertools

import pytest
from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_irreducible_p, gf_mul, gf_rem

from multiway.errors import BadResidueClass, CapExceeded, DoesNotDivide, NotPrime
from multiway.gfcyclo import (MAX_ORDER, build_cyclotomy, build_field, build_residue_pairing,
                              field_of_order, is_prime, prime_power, trace)

SMALL = [(p, m) for p in (2, 3, 5, 7) for m in (1, 2, 3) if p ** m <= 64] + [(11, 1), (13, 1), (61, 1)]


def poly(F, x):
    """Element as a sympy dense coefficient list (highest degree first)."""
    digits = []
    for _ in range(F.m):
        digits.append(x % F.p)
        x //= F.p
    while len(digits) > 1 and digits[-1] == 0:
        digits.pop()
    return [ZZ(c) for c in reversed(digits)]


def unpoly(F, a):
    return sum(int(c) * F.p ** k for k, c in enumerate(reversed(a)))


def test_prime_field_elements():
    F = build_field(5)
    assert F.s == 5 and F.g in (2, 3)
    assert F.g == 2
    assert [F.mul(x, y) for x, y in [(2, 3), (4, 4)]] == [1, 1]


def test_gf9_modulus_irreducible():
    F = build_field(3, 2)
    assert F.s == 9
    mod = [ZZ(c) for c in reversed(F.modulus)]
    assert gf_irreducible_p(mod, 3, ZZ)


def test_not_prime_and_cap():
    with pytest.raises(NotPrime):
        build_field(4, 1)
    with pytest.raises(CapExceeded):
        build_field(2, 17)
    assert MAX_ORDER >= 1 << 16


@pytest.mark.parametrize("p,m", SMALL)
def test_arithmetic_matches_polynomial_oracle(p, m):
    F = build_field(p, m)
    mod = [ZZ(c) for c in reversed(F.modulus)]
    for x, y in itertools.product(F.elements, repeat=2):
        a, b = poly(F, x), poly(F, y)
        assert F.add(x, y) == unpoly(F, gf_add(a, b, p, ZZ))
        assert F.mul(x, y) == unpoly(F, gf_rem(gf_mul(a, b, p, ZZ), mod, p, ZZ))


@pytest.mark.parametrize("p,m", SMALL)
def test_field_axioms_and_generator(p, m):
    F = build_field(p, m)
    els = list(F.elements)
    assert sorted(F.exp(k) for k in range(F.s - 1)) == els[1:]
    for x in F.nonzero:
        assert F.mul(x, F.inv(x)) == 1
    for x, y, z in itertools.islice(itertools.product(els, repeat=3), 4000):
        assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
        assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))


@pytest.mark.parametrize("p,m", SMALL)
def test_frobenius_and_trace_additive(p, m):
    F = build_field(p, m)
    images = {F.frobenius(x) for x in F.elements}
    assert len(images) == F.s
    for x, y in itertools.product(F.elements, repeat=2):
        assert F.frobenius(F.mul(x, y)) == F.mul(F.frobenius(x), F.frobenius(y))
        assert trace(F, F.add(x, y)) == (trace(F, x) + trace(F, y)) % p


def test_trace_examples():
    assert trace(build_field(5), 3) == 3
    F = build_field(3, 2)
    assert trace(F, 0) == 0
    for x in F.elements:
        # the sum over i = 1..m equals the standard sum over i = 0..m-1
        brute = 0
        for i in range(1, F.m + 1):
            brute = F.add(brute, F.pow(x, F.p ** i))
        assert trace(F, x) == brute < F.p


def test_encoding_round_trip():
    F = build_field(3, 2)
    codes = [F.encode(x) for x in F.elements]
    assert sorted(codes) == list(range(9)) and F.encode(0) == 0
    assert F.decode(1) == 1 and F.decode(2) == F.g
    assert all(F.decode(F.encode(x)) == x for x in F.elements)


def test_prime_power_helper():
    assert prime_power(27) == (3, 3) and prime_power(12) is None
    assert all(is_prime(n) == isprime(n) for n in range(200))


def test_cyclotomy_examples():
    C5 = build_cyclotomy(build_field(5), 2)
    assert set(C5.cosets[0]) == {1, 4} and set(C5.cosets[1]) == {2, 3}
    C7 = build_cyclotomy(build_field(7), 2)
    assert set(C7.cosets[0]) == {1, 2, 4} and set(C7.cosets[1]) == {3, 5, 6}
    with pytest.raises(DoesNotDivide):
        build_cyclotomy(build_field(7), 4)


@pytest.mark.parametrize("s,h", [(5, 2), (7, 3), (9, 4), (13, 3), (16, 5), (25, 6), (27, 13)])
def test_cyclotomy_invariants(s, h):
    F = field_of_order(s)
    cy = build_cyclotomy(F, h)
    assert all(len(c) == cy.t for c in cy.cosets)
    assert sorted(itertools.chain(*cy.cosets)) == F.nonzero
    assert set(cy.cosets[0]) == {F.pow(x, h) for x in F.nonzero}
    for i, c in enumerate(cy.cosets):
        assert set(c) == {F.mul(F.exp(i), y) for y in cy.cosets[0]}
    for x, y in itertools.product(F.nonzero, repeat=2):
        assert cy.coset_of(F.mul(x, y)) == (cy.coset_of(x) + cy.coset_of(y)) % h


def test_residue_pairing_examples():
    P7 = build_residue_pairing(build_field(7))
    assert tuple(P7.W) == (2,) and P7.f[2] == 3
    assert len(build_residue_pairing(build_field(11)).W) == 2
    with pytest.raises(BadResidueClass):
        build_residue_pairing(build_field(5))


@pytest.mark.parametrize("s", [s for s in range(7, 65) if s % 4 == 3 and prime_power(s)])
def test_residue_pairing_size(s):
    F = field_of_order(s)
    pair = build_residue_pairing(F)
    assert len(pair.W) == (s - 3) // 4
    assert pair.check() == []
    sq = set(build_cyclotomy(F, 2).cosets[0])
    for xi in pair.W:
        assert F.mul(F.sub(xi, 1), F.sub(pair.f[xi], 1)) in sq
    for a, b in itertools.combinations(pair.W, 2):
        assert F.mul(F.sub(a, b), F.sub(pair.f[a], pair.f[b])) in sq
