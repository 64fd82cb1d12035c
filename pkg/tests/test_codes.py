
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhcodes.codes import (
    DegenerateError,
    ProjectiveSystem,
    WeightTable,
    ab_minimality,
    cutting_falsify,
    generalized_weight,
    generator_matrix,
    hyperplane_counts,
    hyperplane_counts_streaming,
    is_cutting,
    max_line_intersection,
    multiset_system,
    multiset_weights,
    summarize,
    three_weight_values,
    weight_distribution,
    weight_sample,
)
from qhcodes.fields import FiniteField
from qhcodes.projective import GuardError, iterate_k_subspaces, point_at, points_array, rank, theta


def brute_counts(F, points, mult):
    """Scalar incidence counts for every hyperplane, in PG index order (oracle)."""
    r = len(points[0]) - 1
    out = []
    for i in range(theta(r, F.order)):
        h = point_at(F, r, i)
        c = 0
        for x, m in zip(points, mult):
            acc = 0
            for a, b in zip(h, x):
                acc = F.add(acc, F.mul(int(a), int(b)))
            c += m * (acc == 0)
        out.append(c)
    return np.array(out)


def random_system(data, orders=(2, 3, 4), rs=(2, 3)):
    F = FiniteField(data.draw(st.sampled_from(orders)))
    r = data.draw(st.sampled_from(rs))
    allp = points_array(F, r)
    idx = data.draw(st.lists(st.integers(0, len(allp) - 1), min_size=1, max_size=20, unique=True))
    mult = data.draw(st.lists(st.integers(1, 4), min_size=len(idx), max_size=len(idx)))
    return F, r, allp[sorted(idx)], np.array(mult)


def brute_minimal(F, points):
    """Minimality from the definition: no codeword support strictly inside another."""
    r = points.shape[1] - 1
    supports = set()
    for i in range(theta(r, F.order)):
        h = point_at(F, r, i)
        supports.add(frozenset(j for j, x in enumerate(points) if _dot(F, h, x) != 0))
    return not any(a < b for a in supports for b in supports)


def _dot(F, h, x):
    acc = 0
    for a, b in zip(h, x):
        acc = F.add(acc, F.mul(int(a), int(b)))
    return acc


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_hyperplane_counts_match_brute_force(data):
    F, r, pts, mult = random_system(data)
    system = ProjectiveSystem(F, pts, mult)
    expect = brute_counts(F, pts, mult)
    assert np.array_equal(hyperplane_counts(system), expect)
    assert np.array_equal(hyperplane_counts_streaming(system), expect)


def test_simplex_code_is_one_weight():
    F = FiniteField(4)
    for r in (2, 3):
        system = ProjectiveSystem(F, points_array(F, r))
        table = weight_distribution(system)
        assert table.weights == {4**r: theta(r, 4)}
        assert ab_minimality(table) == "sufficient"
        assert is_cutting(system).cutting


def test_random_hyperplanes_at_v3(sys3):
    counts = hyperplane_counts(sys3)
    rng = np.random.default_rng(11)
    for i in rng.integers(0, len(counts), size=100):
        assert sys3.incidence_count(point_at(sys3.field, 3, int(i))) == counts[i]


@pytest.mark.property
def test_v3_weight_table(table3, sys3):
    assert table3.total == theta(3, 64)
    assert table3.length == len(sys3) == 32961
    assert sum(table3.weights.values()) == len(hyperplane_counts(sys3))


def test_min_weight_hyperplanes_span(sys3):
    """Sections by minimum-weight hyperplanes span the hyperplane."""
    F = sys3.field
    counts = hyperplane_counts(sys3)
    best = np.flatnonzero(counts == counts.max())
    for i in best[:100]:
        H = point_at(F, 3, int(i))
        on = sys3.points[_vdot(F, H, sys3.points) == 0]
        assert rank(F, on) == 3


def _vdot(F, H, X):
    acc = np.zeros(len(X), dtype=np.uint16)
    for i, h in enumerate(H):
        acc = F.vadd(acc, F.vscale(int(h), X[:, i]))
    return acc


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_cutting_matches_minimality_definition(data):
    F, r, pts, _ = random_system(data, orders=(2, 3), rs=(2,))
    system = ProjectiveSystem(F, pts)
    if rank(F, pts) < r + 1:
        with pytest.raises(DegenerateError):
            generator_matrix(system)
        return
    res = is_cutting(system)
    assert res.cutting == brute_minimal(F, pts)
    if not res.cutting:
        on = pts[_vdot(F, res.witness, pts) == 0]
        assert rank(F, on) - 1 == res.witness_span_dim < r - 1


def test_single_point_not_cutting():
    F = FiniteField(4)
    system = ProjectiveSystem(F, [[1, 0, 0]])
    res = is_cutting(system)
    assert res.cutting is False and res.verdict == "not cutting"
    assert cutting_falsify(system).cutting is False


def test_generator_matrix_frame():
    F = FiniteField(3)
    frame = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
    system = ProjectiveSystem.from_points(F, frame, [1, 2, 1, 1])
    G = generator_matrix(system)
    assert G.shape == (3, 5)
    assert G[:, 1].tolist() == G[:, 2].tolist() == [0, 1, 0]
    with pytest.raises(DegenerateError):
        generator_matrix(ProjectiveSystem.from_points(F, [[1, 0, 0], [0, 1, 0]]))
    with pytest.raises(ValueError):
        ProjectiveSystem.from_points(F, [[1, 0, 0], [2, 0, 0]])


def test_ab_condition_cases():
    assert ab_minimality(WeightTable({7: 10}, 9, 4)) == "sufficient"
    assert ab_minimality(WeightTable({1: 3, 64: 1}, 70, 64)) == "inconclusive"
    with pytest.raises(ValueError):
        ab_minimality(WeightTable({1: 3}, 5, 4, mode="sampled", seed=0, n_samples=3))


def test_v3_ab_condition(table3):
    assert ab_minimality(table3) == "sufficient"


@pytest.mark.parametrize("order, r, n", [(2, 3, 9), (3, 3, 14), (4, 2, 11)])
def test_generalized_weights_brute_force(order, r, n):
    F = FiniteField(order)
    allp = points_array(F, r)
    rng = np.random.default_rng(order * 10 + r)
    pts = allp[np.sort(rng.choice(len(allp), size=n, replace=False))]
    mult = rng.integers(1, 3, size=n)
    system = ProjectiveSystem(F, pts, mult)
    N = system.length

    def best(k):
        out = 0
        for S in iterate_k_subspaces(F, r, k):
            out = max(out, int(mult[S.contains_mask(F, pts)].sum()))
        return out

    assert generalized_weight(system, 1) == N - best(r - 1)
    assert generalized_weight(system, r - 1) == N - best(1)
    assert generalized_weight(system, r) == N - mult.max()
    assert max_line_intersection(system)[0] == best(1)


def test_generalized_weight_guard():
    F = FiniteField(2)
    system = ProjectiveSystem(F, points_array(F, 4))
    with pytest.raises(GuardError):
        generalized_weight(system, 2)
    with pytest.raises(ValueError):
        generalized_weight(system, 0)


def test_line_maximum_pair_spans_max_line():
    F = FiniteField(3)
    pts = points_array(F, 2)[:7]
    system = ProjectiveSystem(F, pts)
    m, (i, j) = max_line_intersection(system)
    line = np.array([pts[i], pts[j]])
    on = [rank(F, np.vstack([line, p[None]])) == 2 for p in pts]
    assert sum(on) == m


@pytest.mark.parametrize("j", three_weight_values(3, 8) + [5])
def test_multiset_weights_realized(tower3, j):
    system = multiset_system(tower3, 3, j)
    table = weight_distribution(system)
    formula = multiset_weights(3, j, 8)
    assert table.length == formula["length"]
    assert table.weight_set - {0} == set(formula["weights"])
    assert formula["distinct"] == (3 if j != 5 else 4)


def test_three_weight_values_collapse():
    for r in (3, 4, 5):
        for q in (8, 32):
            for j in three_weight_values(r, q):
                assert multiset_weights(r, j, q)["distinct"] == 3


def test_multiplicity_two_duplicates_column(tower3):
    G = generator_matrix(multiset_system(tower3, 3, 2))
    assert np.array_equal(G[:, -1], G[:, -2])
    assert G[:, -1].tolist() == [0, 0, 0, 1]


def test_weight_sample_determinism(sys3, tower3, table3):
    a = weight_sample(sys3, 50, seed=4, tower=tower3)
    b = weight_sample(sys3, 50, seed=4, tower=tower3)
    assert a == b and a.mode == "sampled"
    assert a.weight_set <= table3.weight_set
    with pytest.raises(ValueError):
        weight_sample(sys3, 10, seed=None)


def test_summary_on_small_code():
    F = FiniteField(2)
    system = ProjectiveSystem(F, points_array(F, 3))
    s = summarize(system)
    assert (s.length, s.dimension, s.min_distance, s.minimal) == (15, 4, 8, "proven-yes")
