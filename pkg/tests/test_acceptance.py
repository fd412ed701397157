"""Acceptance gate: one test per criterion, summarised by the conftest hook."""
import random
import time
from fractions import Fraction

import pytest

from nontidy.cohomology import (
    Cochain,
    betti_mod2,
    coboundary,
    loop_parity,
    path_lift_parity,
    random_coboundary,
    random_loop,
    sw_height,
    verify_height_shift,
)
from nontidy.crystal import (
    AffineGroup,
    AffineMap,
    GammaElement,
    act,
    average_orbit,
    coindex_one_witness,
    compose,
    element_order,
    find_odd_involution,
    fixed_points,
    parity,
    replay_certificate,
    torsion_free_certificate,
)
from nontidy.pipeline import PipelineConfig, run_pipeline
from nontidy.simplicial import boundary_matrices, build_quotient_model, holonomy_cocycle

from oracles import mod2_abelianization_rank

F = Fraction
QUARTER, EIGHTH = F(1, 4), F(1, 8)


@pytest.fixture(scope="module")
def built():
    """Every model used by the gate, keyed by (dim, resolution), with build times."""
    out, times = {}, {}
    for n, r in [(1, QUARTER), (2, QUARTER), (3, QUARTER), (1, EIGHTH), (2, EIGHTH)]:
        t = time.perf_counter()
        out[n, r] = build_quotient_model(n, r)
        times[n, r] = time.perf_counter() - t
    return out, times


@pytest.mark.criterion("height equals dimension")
def test_height_equals_dimension(built):
    models, times = built
    budget = {1: 10.0, 2: 10.0, 3: 600.0}
    for n in (1, 2, 3):
        t = time.perf_counter()
        rep = sw_height(models[n, QUARTER])
        elapsed = times[n, QUARTER] + time.perf_counter() - t
        assert rep.height == n
        assert elapsed < budget[n], f"n={n} took {elapsed:.1f}s"


@pytest.mark.criterion("coindex one")
def test_coindex_one():
    t = time.perf_counter()
    assert all(find_odd_involution(n) is None for n in range(1, 9))
    assert time.perf_counter() - t < 1.0
    for n in range(1, 9):
        alpha = coindex_one_witness(n)
        assert parity(alpha) == 1
        assert parity(compose(alpha, alpha)) == 0
        assert not compose(alpha, alpha).is_identity()
        rep = run_pipeline(PipelineConfig(n, mode="group-only"))
        assert rep.group["odd_involution"] is None
        assert rep.group["witness_parity"] == 1
        assert "coind = 1" in rep.conclusion


@pytest.mark.criterion("torsion-free certificate")
def test_torsion_free_certificate():
    for n in range(1, 9):
        cert = torsion_free_certificate(n)
        assert cert.verdict == "torsion-free"
        assert len(cert.entries) == 2 ** (n - 1)
        assert replay_certificate(cert)
    reflection = AffineMap((-1,), (1,))
    control = torsion_free_certificate(AffineGroup([(reflection, 1), (AffineMap((1,), (2,)), 0)]))
    assert control.verdict == "has torsion"
    m = control.counterexample
    assert element_order(m) == 2 and not m.is_identity()
    assert replay_certificate(control)


@pytest.mark.criterion("height shift under the projective bundle step")
def test_height_shift(built):
    models, _ = built
    assert sw_height(models[1, QUARTER]).height == 1
    assert sw_height(models[2, QUARTER]).height == 2
    assert sw_height(models[3, QUARTER]).height == 3
    assert verify_height_shift(models[1, QUARTER], models[2, QUARTER])
    assert verify_height_shift(models[2, QUARTER], models[3, QUARTER])


@pytest.mark.criterion("property suites")
def test_property_suites(built):
    models, _ = built
    rng = random.Random(20261018)

    # group axioms and action compatibility
    for _ in range(10_000):
        n = rng.randint(1, 5)
        g, h, k = (GammaElement(tuple(rng.randint(-10, 10) for _ in range(n))) for _ in range(3))
        assert compose(compose(g, h), k) == compose(g, compose(h, k))
        assert compose(g, g.inverse()).is_identity()
        x = tuple(F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n))
        assert act(compose(g, h), x) == act(g, act(h, x))

    for (n, _), m in models.items():
        K = m.complex
        d = boundary_matrices(K)
        for k in range(2, n + 1):
            assert (d[k] @ d[k - 1]).is_zero()
        w = Cochain(1, holonomy_cocycle(m))
        assert coboundary(w, K).is_zero()
        b = betti_mod2(K)
        assert b == b[::-1]
        assert K.euler() == 0

    # averaging gives a fixed point of every finite-order affine control
    for _ in range(100):
        n = rng.randint(1, 4)
        signs = tuple(rng.choice((1, -1)) for _ in range(n))
        v = tuple(F(0) if s == 1 else F(rng.randint(-9, 9), rng.randint(1, 5)) for s in signs)
        m = AffineMap(signs, v)
        x = tuple(F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n))
        y = average_orbit(m, x, element_order(m))
        assert m(y) == y and fixed_points(m).contains(y)

    for m in models.values():
        for _ in range(100):
            base = rng.randrange(m.complex.count(0))
            loop = random_loop(m, base, rng.randint(0, 12), rng)
            assert loop_parity(m, base, loop) == path_lift_parity(m, base, loop)

    for n in (1, 2):
        coarse, fine = models[n, QUARTER], models[n, EIGHTH]
        assert betti_mod2(coarse.complex) == betti_mod2(fine.complex)
        assert sw_height(coarse).height == sw_height(fine).height

    for n in (1, 2, 3):
        m = models[n, QUARTER]
        base = sw_height(m)
        w = Cochain(1, holonomy_cocycle(m))
        for _ in range(50):
            other = sw_height(m, w + random_coboundary(m.complex, 1, rng))
            assert (other.height, other.pairing) == (base.height, base.pairing)


@pytest.mark.criterion("mod-2 Betti golden values")
def test_betti_golden(built):
    models, _ = built
    assert mod2_abelianization_rank(3) == 3
    assert betti_mod2(models[1, QUARTER].complex) == [1, 1]
    assert betti_mod2(models[2, QUARTER].complex) == [1, 2, 1]
    assert betti_mod2(models[3, QUARTER].complex) == [1, 3, 3, 1]
