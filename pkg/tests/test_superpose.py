"""Superposition evaluation and the three Delta_p routes."""

import math

import numpy as np
import pytest

from plap import (
    Params,
    PoleSet,
    QuadraticTerm,
    SignClass,
    ZeroTerm,
    delta_p_closed_form,
    delta_p_direct,
    delta_p_fd,
    evaluate,
    riemann_pole_set,
    sign_region,
)
from plap.errors import (
    PoleSingularityError,
    UnsupportedConfigurationError,
)
from plap.superpose import delta_p_scale


def rel(a, b, scale=0.0):
    return abs(a - b) / max(abs(a), abs(b), scale, 1e-300)


def test_pole_set_merges_duplicates():
    ps = PoleSet([1.0, 2.0, 0.5], [[0, 0], [1, 0], [0, 0]], Params(3, 2))
    assert len(ps) == 2
    assert sorted(ps.weights) == [1.5, 2.0]


def test_pole_set_drops_zero_weights():
    ps = PoleSet([0.0, 1.0], [[0, 0], [1, 1]], Params(3, 2))
    assert len(ps) == 1


def test_pole_set_rejects_all_zero():
    with pytest.raises(ValueError):
        PoleSet([0.0], [[0, 0]], Params(3, 2))


def test_pole_set_rejects_negative_weight():
    with pytest.raises(ValueError):
        PoleSet([-1.0], [[0, 0]], Params(3, 2))


def test_eval_single_pole_newtonian():
    ps = PoleSet([1.0], [[0, 0, 0]], Params(2, 3, 1.0))
    res = evaluate(ps, None, [2.0, 0.0, 0.0])
    assert res.value == pytest.approx(0.5)
    np.testing.assert_allclose(res.gradient, [-0.25, 0, 0], atol=1e-15)


def test_eval_symmetric_pair_cancels():
    ps = PoleSet([1.0, 1.0], [[1, 0], [-1, 0]], Params(3, 2, 1.0))
    res = evaluate(ps, None, [0.0, 0.0])
    assert abs(res.gradient[0]) < 1e-15


def test_eval_gradient_fd_oracle():
    rng = np.random.default_rng(11)
    pa = Params(3, 2, 1.0)
    ps = PoleSet(rng.uniform(0.5, 2, 5), rng.uniform(-1, 1, (5, 2)), pa)
    h = 1e-6
    checked = 0
    while checked < 10:
        x = rng.uniform(-2, 2, 2)
        if np.min(np.linalg.norm(x - ps.locations, axis=1)) < 0.5:
            continue
        res = evaluate(ps, None, x)
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (evaluate(ps, None, x + e).value - evaluate(ps, None, x - e).value) / (
                2 * h
            )
            assert rel(res.gradient[j], fd, np.abs(res.gradient).max()) <= 1e-6
        checked += 1


def test_eval_at_pole_infinite_for_small_p():
    ps = PoleSet([1.0], [[0, 0, 0]], Params(2, 3, 1.0))
    res = evaluate(ps, None, [0.0, 0.0, 0.0])
    assert res.value == math.inf
    assert not res.derivatives_available


def test_eval_at_pole_error_for_large_p():
    ps = PoleSet([1.0], [[0, 0]], Params(3, 2, 1.0))
    with pytest.raises(PoleSingularityError):
        evaluate(ps, None, [0.0, 0.0])


def test_angles_in_range():
    rng = np.random.default_rng(12)
    ps = PoleSet(rng.uniform(0.5, 2, 4), rng.uniform(-1, 1, (4, 3)), Params(2.5, 3))
    x = np.array([1.7, 1.2, -1.4])
    res = evaluate(ps, None, x)
    assert np.all(res.angles >= 0) and np.all(res.angles <= np.pi)
    np.testing.assert_allclose(
        res.distances, np.linalg.norm(x - ps.locations, axis=1), rtol=1e-15
    )


def test_single_pole_p_harmonic_direct():
    for p, n in [(2.5, 3), (3.0, 2), (4.0, 5), (3.0, 3)]:
        ps = PoleSet([1.3], [np.zeros(n)], Params(p, n, 1.0))
        x = np.full(n, 0.8)
        assert abs(delta_p_direct(ps, None, x)) <= 1e-10


def test_p2_direct_is_trace():
    ps = PoleSet([1.0, 2.0], [[1, 0], [0, 1]], Params(2, 2, 1.0))
    x = np.array([0.3, -0.4])
    res = evaluate(ps, None, x)
    assert delta_p_direct(ps, None, x) == pytest.approx(np.trace(res.hessian))


def test_closed_form_single_pole_exact_zero():
    ps = PoleSet([2.0], [[0.5, 0.5]], Params(3.5, 2, 1.0))
    assert delta_p_closed_form(ps, [1.7, -0.3]) == 0.0


def test_closed_form_p2_exact_zero():
    ps = PoleSet([1.0, 1.0], [[1, 0], [-1, 0]], Params(2, 2, 1.0))
    assert delta_p_closed_form(ps, [0.3, 0.8]) == 0.0


def test_closed_form_rejects_concave_term():
    ps = PoleSet([1.0], [[0, 0]], Params(3, 2))
    with pytest.raises(UnsupportedConfigurationError):
        delta_p_closed_form(ps, [1.0, 1.0], k=QuadraticTerm(-np.eye(2)))
    assert delta_p_closed_form(ps, [1.0, 1.0], k=ZeroTerm()) == 0.0


def test_two_pole_closed_vs_direct_and_sign():
    ps = PoleSet([1.0, 1.0], [[1, 0], [-1, 0]], Params(3, 2, 1.0))
    x = np.array([0.0, 1.0])
    c = delta_p_closed_form(ps, x)
    d = delta_p_direct(ps, None, x)
    assert rel(c, d) <= 1e-10
    assert c <= 0


def test_three_route_agreement_randomized():
    rng = np.random.default_rng(13)
    for _ in range(60):
        p = float(rng.choice([2.0, 2.5, 3.0, 4.0]))
        n = int(rng.choice([2, 3, 5]))
        count = int(rng.integers(1, 9))
        ps = PoleSet(
            rng.uniform(0.2, 2, count), rng.uniform(-1, 1, (count, n)), Params(p, n)
        )
        while True:
            x = rng.uniform(-2, 2, n)
            if np.min(np.linalg.norm(x - ps.locations, axis=1)) >= 0.3:
                break
        d = delta_p_direct(ps, None, x)
        c = delta_p_closed_form(ps, x)
        f = delta_p_fd(ps, None, x)
        scale = delta_p_scale(ps, None, x)
        assert rel(d, c, scale) <= 1e-10
        assert rel(f, c, scale) <= 1e-4


def test_fd_single_pole_near_zero():
    ps = PoleSet([1.0], [[0, 0]], Params(4, 2, 1.0))
    assert abs(delta_p_fd(ps, None, [1.0, 0.0])) < 1e-5


def test_fd_quadratic_only_against_direct():
    # no poles is not representable; use a far tiny pole so the quadratic
    # dominates, and compare the two smooth routes
    pa = Params(3, 2, 1.0)
    ps = PoleSet([1e-9], [[50.0, 50.0]], pa)
    k = QuadraticTerm(np.array([[-2.0, 0.3], [0.3, -1.0]]), b=[0.4, -0.1])
    x = np.array([0.2, -0.7])
    d = delta_p_direct(ps, k, x)
    f = delta_p_fd(ps, k, x)
    assert rel(f, d) <= 1e-6


def test_fd_rejects_points_near_poles():
    ps = PoleSet([1.0], [[0, 0]], Params(3, 2))
    with pytest.raises(PoleSingularityError):
        delta_p_fd(ps, None, [5e-4, 0.0], step=1e-4)


def test_weight_scaling_power_law():
    rng = np.random.default_rng(14)
    ps = PoleSet(rng.uniform(0.5, 1, 4), rng.uniform(-1, 1, (4, 2)), Params(3, 2))
    x = np.array([1.6, 1.4])
    base = delta_p_closed_form(ps, x)
    for s in [0.5, 2.0, 7.5]:
        scaled = PoleSet(s * ps.weights, ps.locations, ps.params)
        assert rel(delta_p_closed_form(scaled, x), s ** (3 - 1) * base) <= 1e-11


@pytest.mark.parametrize(
    "p,n,expected",
    [
        (3.0, 2, SignClass.NON_POSITIVE),
        (2.0, 5, SignClass.IDENTICALLY_ZERO),
        (3.0, 1, SignClass.IDENTICALLY_ZERO),
        (1.5, 3, SignClass.NON_NEGATIVE),
        (1.0, 4, SignClass.EXCLUDED),
        (0.5, 4, SignClass.NON_POSITIVE),
        (0.2, 2, SignClass.NON_POSITIVE),
        (1.0, 1, SignClass.EXCLUDED),
    ],
)
def test_sign_region(p, n, expected):
    assert sign_region(p, n) is expected


def test_sign_region_matches_factor_sign():
    for p in np.round(np.arange(0.2, 4.0 + 0.025, 0.05), 12):
        for n in range(1, 7):
            cls = sign_region(float(p), n)
            if p == 1:
                assert cls is SignClass.EXCLUDED
                continue
            if p == 2 or n == 1 or p + n == 2:
                assert cls is SignClass.IDENTICALLY_ZERO
                continue
            factor = -(p - 2) * (p + n - 2) / (p - 1)
            if factor == 0:
                assert cls is SignClass.IDENTICALLY_ZERO
            elif factor < 0:
                assert cls is SignClass.NON_POSITIVE
            else:
                assert cls is SignClass.NON_NEGATIVE


def test_riemann_single_cell():
    ps = riemann_pole_set([[0.5, 0.5]], [1.0], 0.125, Params(3, 2))
    assert len(ps) == 1
    assert ps.weights[0] == pytest.approx(0.125)
    np.testing.assert_allclose(ps.locations[0], [0.5, 0.5])


def test_riemann_zero_density_rejected():
    with pytest.raises(UnsupportedConfigurationError):
        riemann_pole_set([[0.0, 0.0]], [0.0], 1.0, Params(3, 2))


def test_riemann_negative_density_rejected():
    with pytest.raises(ValueError):
        riemann_pole_set([[0.0, 0.0]], [-1.0], 1.0, Params(3, 2))


def test_riemann_far_field_matches_centroid_pole():
    # 2x2x2 cube of cells with uniform density, evaluated far away
    pa = Params(2.5, 3, 1.0)
    centers = np.array(
        [[i, j, k] for i in (-0.25, 0.25) for j in (-0.25, 0.25) for k in (-0.25, 0.25)]
    )
    vol = 0.5**3
    ps = riemann_pole_set(centers, np.ones(8), vol, pa)
    lump = PoleSet([8 * vol], [[0.0, 0.0, 0.0]], pa)
    x = np.array([20.0, 1.0, -3.0])
    a = evaluate(ps, None, x).value
    b = evaluate(lump, None, x).value
    assert rel(a, b) <= 0.01
