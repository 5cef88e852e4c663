import random
from fractions import Fraction as F

import pytest

from halfspace6v.errors import CapExceeded, DegeneratePoint
from halfspace6v.triangular import (
    TriangularSpec,
    verify_z_properties,
    z_altform,
    z_enumerate,
    z_kuperberg,
    z_pfaffian,
    z_shuffle,
    z_subset_kuperberg,
)
from halfspace6v.weights import ModelParams, h_func

P = ModelParams(q=F(1, 3), a=F(2), c=F(5))


def sample_alphabet(rng, m, params):
    xs = []
    while len(xs) < m:
        v = F(rng.randint(-40, 40), rng.randint(1, 30))
        if v in (0, 1, -1) or v in xs or v in (params.a, params.c):
            continue
        if any(v * o == 1 or params.q * v * o == 1 for o in xs):
            continue
        if h_func(v, params) == 1:
            continue
        xs.append(v)
    return tuple(xs)


def test_small_closed_forms():
    assert z_enumerate(TriangularSpec((), P)) == 1
    x1, x2 = F(1, 2), F(2, 7)
    h1, h2 = h_func(x1, P), h_func(x2, P)
    assert z_enumerate(TriangularSpec((x1,), P)) == 1 - h1
    z2 = (1 - h1) * (1 - h2) - (h1 * h2 / (P.a * P.c)) * (1 - P.q) * x1 * x2 / (
        1 - P.q * x1 * x2
    )
    assert z_enumerate(TriangularSpec((x1, x2), P)) == z2


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_five_way_agreement(m):
    rng = random.Random(100 + m)
    for _ in range(2):
        xs = sample_alphabet(rng, m, P)
        spec = TriangularSpec(xs, P)
        ref = z_enumerate(spec)
        assert z_pfaffian(spec) == ref
        assert z_subset_kuperberg(spec) == ref
        assert z_shuffle(spec) == ref
        assert z_altform(spec) == ref
        assert z_altform(spec, route="subset") == ref


def test_altform_u_zero_is_one():
    rng = random.Random(9)
    xs = sample_alphabet(rng, 3, P)
    spec = TriangularSpec(xs, P, u=F(0))
    assert z_altform(spec) == 1
    assert z_altform(spec, route="subset") == 1


def test_altform_internal_routes_cross_check():
    rng = random.Random(12)
    xs = sample_alphabet(rng, 4, P)
    spec = TriangularSpec(xs, P, u=F(2, 3))
    assert z_altform(spec) == z_altform(spec, route="subset")


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_kuperberg_specialization(m):
    pk = ModelParams(q=F(1, 4), a=F(1), c=F(-1))
    xs = tuple(F(k + 2, 2 * k + 5) for k in range(m))
    spec = TriangularSpec(xs, pk)
    zp = z_pfaffian(spec)
    if m % 2 == 0:
        assert zp == z_kuperberg(xs, pk.q)
        assert zp == z_enumerate(spec)
    else:
        assert zp == 0
        assert z_enumerate(spec) == 0


def test_c_infinite_factorization():
    pci = ModelParams(q=F(1, 4), a=F(3), c_infinite=True)
    xs = (F(1, 2), F(2, 5), F(3, 7))
    expect = F(1)
    for x in xs:
        expect *= x * (1 - pci.a * x) / (x - pci.a)
    assert z_subset_kuperberg(TriangularSpec(xs, pci)) == expect
    assert z_enumerate(TriangularSpec(xs, pci)) == expect


def test_degenerate_point_raises():
    xs = (F(1, 2), F(1, 2))
    with pytest.raises(DegeneratePoint):
        z_pfaffian(TriangularSpec(xs, P))


def test_enumeration_cap():
    xs = tuple(F(1, k + 2) for k in range(8))
    with pytest.raises(CapExceeded):
        z_enumerate(TriangularSpec(xs, P))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_z_property_suite(m):
    rng = random.Random(40 + m)
    xs = sample_alphabet(rng, m, P)
    report = verify_z_properties(TriangularSpec(xs, P), rng=rng)
    assert all(ok for ok, _ in report.values()), report
    assert set(report) == {
        "symmetry",
        "x_to_zero",
        "x_to_one",
        "x_to_reciprocal",
        "freeze_at_q_reciprocal",
        "degree_bound",
    }


def test_recursion_examples_direct():
    rng = random.Random(77)
    x1, x2 = sample_alphabet(rng, 2, P)
    # x2 = 1 drops the variable; x2 = 1/x1 drops both
    assert z_enumerate(TriangularSpec((x1, F(1)), P)) == z_enumerate(TriangularSpec((x1,), P))
    assert z_enumerate(TriangularSpec((x1, 1 / x1), P)) == 1
