import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import geo
from qnrobust.analytics import (
    ComponentDecomposition,
    DegreeHistogram,
    compare_histograms,
    components,
    critical_probability,
    degree_histogram,
    degree_moments,
    power_law_fit,
)
from qnrobust.errors import DataError, NumericalError
from qnrobust.netgen import (
    ScaleFreeParams,
    WaxmanParams,
    generate_scale_free,
    generate_waxman,
    reparam_waxman_nodes,
)
from qnrobust.perturb import Mode, random_edge_breakdown, random_node_breakdown


def test_histogram_examples(k4, star):
    assert degree_histogram(geo([(i, 0) for i in range(5)], [])).counts == {0: 5}
    assert degree_histogram(k4).counts == {3: 4}
    assert degree_histogram(star).counts == {1: 4, 4: 1}


def test_histogram_validation():
    with pytest.raises(DataError):
        DegreeHistogram({1: 2}, 3)
    with pytest.raises(DataError):
        DegreeHistogram({-1: 1}, 1)
    pooled = DegreeHistogram.pooled([DegreeHistogram({1: 2}, 2), DegreeHistogram({1: 1, 2: 3}, 4)])
    assert pooled.counts == {1: 3, 2: 3} and pooled.n_nodes == 6


def test_moments(k4, star):
    assert degree_moments(degree_histogram(k4)) == (3.0, 9.0)
    assert degree_moments(degree_histogram(star)) == pytest.approx((8 / 5, 4.0), rel=1e-15)
    with pytest.raises(DataError):
        degree_moments(DegreeHistogram({}, 0))


def test_critical_probability_examples(star):
    assert critical_probability(DegreeHistogram({3: 10}, 10)) == pytest.approx(0.5, rel=1e-15)
    assert critical_probability(degree_histogram(star)) == pytest.approx(1 / 3, rel=1e-15)


def test_critical_probability_reports_degenerate_ratio():
    with pytest.raises(NumericalError):
        critical_probability(DegreeHistogram({1: 4}, 4))
    with pytest.raises(NumericalError):
        critical_probability(DegreeHistogram({0: 4}, 4))
    # ratio in (1, 2): negative threshold is returned, not clamped
    assert critical_probability(DegreeHistogram({1: 2, 2: 2}, 4)) < 0


def test_critical_probability_near_one_for_scale_free():
    h = DegreeHistogram.pooled(degree_histogram(generate_scale_free(ScaleFreeParams(3981, 40.0, 3), seed=s)) for s in range(3))
    assert 0.85 < critical_probability(h) < 1


def test_components_examples(k4, two_triangles_and_isolated):
    assert components(k4).giant_fraction == 1.0
    assert components(geo([(i, 0) for i in range(6)], [])).giant_fraction == pytest.approx(1 / 6)
    c = components(two_triangles_and_isolated)
    assert c.component_sizes == (3, 3, 1)
    assert c.giant_fraction == pytest.approx(3 / 7)
    assert c.mean_small_size == 2.0
    assert c.n_nodes == 7 and c.giant_size == 3
    assert components(geo(np.zeros((0, 2)), [])) == ComponentDecomposition((), 0.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 40), m=st.integers(0, 80), seed=st.integers(0, 2**31))
def test_component_invariants(n, m, seed):
    rng = np.random.default_rng(seed)
    pairs = {tuple(sorted(rng.choice(n, 2, replace=False))) for _ in range(m)} if n > 1 else set()
    g = geo(rng.uniform(-10, 10, (n, 2)), sorted(pairs), R=10)
    c = components(g)
    assert sum(c.component_sizes) == n
    assert list(c.component_sizes) == sorted(c.component_sizes, reverse=True)
    assert c.giant_fraction == c.component_sizes[0] / n


def _power_hist(exponent, ks, scale=1e9):
    counts = {int(k): int(round(scale * k ** (-exponent))) for k in ks}
    return DegreeHistogram(counts, sum(counts.values()))


def test_power_law_fit_recovers_exponent():
    assert power_law_fit(_power_hist(3.0, range(3, 301)), k_min=3) == pytest.approx(3.0, abs=0.05)
    assert power_law_fit(_power_hist(2.2, range(1, 501)), k_min=1) == pytest.approx(2.2, abs=0.05)


def test_power_law_fit_flat_tail():
    flat = DegreeHistogram({k: 100 for k in range(3, 31)}, 2800)
    assert power_law_fit(flat, k_min=3) == pytest.approx(0.0, abs=0.05)


def test_power_law_fit_needs_support():
    with pytest.raises(DataError):
        power_law_fit(DegreeHistogram({3: 5, 4: 3, 5: 1, 6: 1}, 10), k_min=3)
    with pytest.raises(DataError):
        power_law_fit(DegreeHistogram({3: 5, 4: 3, 5: 1, 6: 1, 7: 1}, 11), k_min=0)


def test_compare_histograms_identical_and_different():
    a = DegreeHistogram({k: 50 + k for k in range(10)}, sum(50 + k for k in range(10)))
    stat, dof, pv = compare_histograms(a, a)
    assert stat == pytest.approx(0.0, abs=1e-12) and pv == pytest.approx(1.0)
    b = DegreeHistogram({k: 100 - 9 * k for k in range(10)}, sum(100 - 9 * k for k in range(10)))
    assert compare_histograms(a, b)[2] < 1e-6


def test_nested_removal_giant_fraction_non_increasing():
    g0 = generate_waxman(WaxmanParams(300, 100.0, 0.05), seed=2)
    order = np.random.default_rng(9).permutation(g0.n_nodes)
    sizes = []
    for k in range(0, 300, 10):
        keep = np.ones(g0.n_nodes, dtype=bool)
        keep[order[:k]] = False
        g = g0.keep_nodes(keep, {"kind": "nested"})
        sizes.append(components(g).giant_size)
    # giant size can only shrink when removals are nested
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))


@pytest.mark.slow
@pytest.mark.parametrize("breakdown", [random_node_breakdown, random_edge_breakdown])
def test_scale_free_mean_degree_falls_linearly(breakdown):
    graphs = [generate_scale_free(ScaleFreeParams(3981, 40.0, 3), seed=s) for s in range(10)]
    for p in (0.2, 0.5, 0.8):
        ks = [degree_moments(degree_histogram(breakdown(g, p, Mode.BERNOULLI, seed=100 + i)))[0] for i, g in enumerate(graphs)]
        se = np.std(ks, ddof=1) / math.sqrt(len(ks))
        assert abs(np.mean(ks) - 6 * (1 - p)) < 3 * se


@pytest.mark.slow
def test_waxman_node_breakdown_matches_reparameterized_histogram():
    base = WaxmanParams(400, 300.0, 0.1)
    p = 0.4
    broken = DegreeHistogram.pooled(
        degree_histogram(random_node_breakdown(generate_waxman(base, seed=s), p, Mode.EXACT_COUNT, seed=50 + s))
        for s in range(10)
    )
    small = reparam_waxman_nodes(base, p)
    intact = DegreeHistogram.pooled(degree_histogram(generate_waxman(small, seed=1000 + s)) for s in range(10))
    assert compare_histograms(broken, intact)[2] > 0.01
