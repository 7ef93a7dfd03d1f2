import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zndots import dot_geometry as dg
from zndots.points import PointSet, full_space
from zndots.ring_core import factorize, is_unit

import oracles


@pytest.mark.parametrize("x, y, n, expected", [((1, 2), (2, 2), 5, 1), ((0, 0), (4, 3), 5, 0), ((3, 3), (3, 0), 9, 0)])
def test_dot_examples(x, y, n, expected):
    assert dg.dot(x, y, n) == expected


def test_mu_examples():
    assert dg.mu_histogram(full_space(3, 1)).as_dict() == {0: 5, 1: 2, 2: 2}
    two = PointSet(5, [[1, 0], [0, 1]])
    assert dg.mu_histogram(two).as_dict() == {0: 2, 1: 2}
    assert dg.product_set(two) == {0, 1}
    assert dg.mu_histogram(PointSet(7, [[2, 3]])).as_dict() == {(4 + 9) % 7: 1}


def test_product_set_examples():
    assert dg.product_set(full_space(3, 1)) == {0, 1, 2}
    assert dg.product_set(PointSet(9, [[0, 0, 0]])) == {0}
    assert dg.covers_ring(full_space(3, 1))
    assert not dg.covers_ring(PointSet(3, [[0]]))


@settings(max_examples=60, deadline=None)
@given(oracles.point_sets())
def test_mu_matches_brute_force(E):
    hist = dg.mu_histogram(E)
    assert hist.counts.tolist() == oracles.mu(E)
    assert hist.total == len(E) ** 2
    assert dg.product_set(E) == oracles.pair_values(E, "dot")


@settings(max_examples=60, deadline=None)
@given(oracles.point_sets(max_size=30), st.data())
def test_dot_star_histogram_matches_brute_force(E, data):
    k = data.draw(st.integers(1, E.d))
    bases = [data.draw(st.lists(st.integers(0, E.n - 1), min_size=E.d, max_size=E.d)) for _ in range(k)]
    hist = dg.dot_star_histogram(E, bases)
    assert hist.counts == oracles.star_hist(E, bases, "dot")
    assert hist.total == len(E)
    assert dg.dot_star_set(E, bases) == hist.support()


def test_dot_star_set_examples():
    E = full_space(5, 2)
    assert dg.dot_star_set(E, [[0, 0]]) == {(0,)}
    assert dg.dot_star_set(E, [[1, 0]]) == {(t,) for t in range(5)}


def test_dot_star_average_examples():
    avg = dg.dot_star_average(full_space(5, 2), 1, sample_bases=25)
    assert avg.exact and avg.estimate == pytest.approx(121 / 25, abs=1e-15)
    assert dg.dot_star_average(PointSet(5, [[0, 0]]), 1, 1).estimate == 1
    with pytest.raises(ValueError):
        dg.dot_star_average(full_space(5, 2), 3, 10)


def test_dot_star_average_exact_matches_oracle():
    E = oracles.seeded_set(7, 2, 15, seed=8)
    P = oracles.pts(E)
    expected = np.mean([len(oracles.star_hist(E, [y1, y2], "dot")) for y1 in P for y2 in P])
    assert dg.dot_star_average(E, 2, sample_bases=10**6).estimate == pytest.approx(expected, rel=1e-12)


def test_sampled_dot_star_average_is_seeded():
    E = oracles.seeded_set(9, 3, 100, seed=2)
    a = dg.dot_star_average(E, 2, 500, seed=11)
    b = dg.dot_star_average(E, 2, 500, seed=11)
    assert a == b and not a.exact and a.stderr > 0


def test_k2_statistic_examples():
    assert dg.dot_k2_statistic(PointSet(5, [[0, 0]]), 1) == 1
    assert dg.dot_k2_statistic(PointSet(5, [[0, 0]]), 2) == 1
    E = full_space(3, 1)
    assert dg.dot_k2_statistic(E, 1) == oracles.second_moment(E, 1, "dot")
    E = oracles.seeded_set(9, 2, 50, seed=12)
    assert dg.dot_k2_statistic(E, 1) == oracles.second_moment(E, 1, "dot")


@settings(max_examples=40, deadline=None)
@given(oracles.point_sets(max_d=2, max_size=20), st.integers(1, 2))
def test_k2_statistic_matches_definition(E, k):
    assert dg.dot_k2_statistic(E, k) == oracles.second_moment(E, k, "dot")


def test_threshold_examples():
    reports = {r.name: r for r in dg.coverage_thresholds(9, 5)}
    ring = reports["ring_cover"]
    assert ring.bound == pytest.approx(3 * 9**5 / 3**1.5, rel=1e-12)
    assert ring.bound == pytest.approx(34091.956045378, rel=1e-12)
    assert not ring.vacuous

    ring15 = {r.name: r for r in dg.coverage_thresholds(15, 3)}["ring_cover"]
    assert ring15.bound == pytest.approx(4 * 3375 / 3**0.5, rel=1e-12)
    assert ring15.vacuous

    pp = {r.name: r for r in dg.coverage_thresholds(9, 5, ell=2)}
    assert pp["ring_cover_prime_power"].bound == pytest.approx(3 * 3 ** (2 * (3 * 5 / 4 + 1 / 2)), rel=1e-12)
    assert pp["units_cover_prime_power"].bound == pytest.approx(2 * 9 ** (15 / 4 + 1 / 4), rel=1e-12)
    assert not pp["units_cover_prime_power"].explicit

    with pytest.raises(ValueError):
        dg.coverage_thresholds(15, 3, ell=1)
    with pytest.raises(ValueError):
        dg.coverage_thresholds(27, 3, ell=2)


def test_threshold_flags():
    r = {x.name: x for x in dg.coverage_thresholds(9, 5, set_size=35000)}
    assert r["ring_cover"].applies and r["units_cover"].applies
    assert not r["ring_cover_weak"].applies and r["ring_cover_weak"].vacuous


@pytest.mark.parametrize("n, d", [(9, 2), (15, 1), (15, 2), (21, 3), (9, 3), (25, 2)])
def test_divisible_construction(n, d):
    E = dg.divisible_construction(n, d)
    m = factorize(n)
    assert len(E) == (n // m.gamma) ** d
    assert np.all(E.points % m.gamma == 0)
    pset = dg.product_set(E)
    assert pset == oracles.pair_values(E, "dot")
    assert not any(is_unit(s, n) for s in pset)
    assert all(s % m.gamma == 0 for s in pset)


def test_divisible_construction_product_sets():
    assert dg.product_set(dg.divisible_construction(9, 2)) == {0}
    assert dg.product_set(dg.divisible_construction(15, 1)) == {0, 3, 6, 9, 12}
    assert dg.product_set(dg.divisible_construction(15, 2)) == {0, 3, 6, 9, 12}


def test_mu_deviation_examples():
    for n, d in [(3, 1), (5, 2), (9, 2), (7, 3)]:
        assert dg.mu_deviation(full_space(n, d)).holds
    single = dg.mu_deviation(PointSet(9, [[1, 2, 3]]))
    assert single.max_dev == pytest.approx(1 - 1 / 9)
    assert single.holds
    for seed in range(50):
        assert dg.mu_deviation(oracles.seeded_set(9, 3, 200, seed)).holds


@settings(max_examples=60, deadline=None)
@given(oracles.point_sets(moduli=(3, 5, 9, 15, 21, 25), max_size=80))
def test_explicit_constant_bounds_hold(E):
    assert dg.mu_deviation(E).holds
    assert dg.dot_k1_bound_check(E).holds


def test_tau_free_k1_bound_can_fail():
    # The divisor-count factor is needed: the full line over Z_45 breaks the smaller bound.
    chk = dg.dot_k1_bound_check(full_space(45, 1))
    assert chk.holds and not chk.holds_tau_free

