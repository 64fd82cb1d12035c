from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhcodes.fields import FiniteField
from qhcodes.projective import (
    GuardError,
    Subspace,
    decode_keys,
    encode_keys,
    gaussian_binomial,
    hyperplanes_through_array,
    incident,
    iterate_k_subspaces,
    line_key,
    normalize,
    null_space,
    point_at,
    point_index,
    point_indices,
    points_array,
    project_from,
    random_subspace,
    rank,
    span_dim,
    theta,
    vnormalize,
)


def brute_points(F, r):
    """Normalized representatives of all nonzero vectors (oracle)."""
    seen = set()
    for v in product(range(F.order), repeat=r + 1):
        if any(v):
            seen.add(normalize(F, v))
    return sorted(seen)


def brute_rank(F, rows):
    """Rank as log_Q of the size of the row span (oracle)."""
    rows = [list(map(int, r)) for r in rows]
    span = {tuple([0] * len(rows[0]))} if rows else set()
    for row in rows:
        new = set(span)
        for v in span:
            for c in range(1, F.order):
                new.add(tuple(F.add(a, F.mul(c, b)) for a, b in zip(v, row)))
        span = new
    n = len(span)
    k = 0
    while F.order**k < n:
        k += 1
    return k


def test_theta_and_gaussian_binomial():
    assert theta(-1, 4) == 0 and theta(0, 4) == 1
    assert theta(3, 64) == 266305
    assert gaussian_binomial(4, 2, 4) == 357
    assert gaussian_binomial(4, 3, 4) == theta(3, 4)


@pytest.mark.parametrize("order, r", [(2, 3), (3, 2), (4, 2), (4, 3)])
def test_points_array_matches_brute_force(order, r):
    F = FiniteField(order)
    X = points_array(F, r)
    assert [tuple(map(int, x)) for x in X] == brute_points(F, r)
    assert np.array_equal(point_indices(F, X), np.arange(len(X)))
    assert np.all(np.diff(encode_keys(F, X)) > 0)


@given(st.sampled_from([(2, 4), (3, 3), (4, 3), (64, 2)]), st.data())
@settings(max_examples=80, deadline=None)
def test_point_index_roundtrip(params, data):
    order, r = params
    F = FiniteField(order)
    i = data.draw(st.integers(0, theta(r, order) - 1))
    P = point_at(F, r, i)
    assert point_index(F, r, P) == i
    assert normalize(F, P) == P


@pytest.mark.parametrize("order, r, k", [(2, 3, 1), (3, 3, 1), (4, 3, 2), (3, 2, 1), (2, 4, 2)])
def test_subspace_enumeration_counts(order, r, k):
    F = FiniteField(order)
    subs = list(iterate_k_subspaces(F, r, k))
    assert len(subs) == gaussian_binomial(r + 1, k + 1, order)
    assert len({S.key() for S in subs}) == len(subs)
    assert all(S.dim == k for S in subs)


def test_subspace_enumeration_guard():
    with pytest.raises(GuardError):
        list(iterate_k_subspaces(FiniteField(64), 4, 2, cap=1000))


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_rank_matches_span_size(data):
    order = data.draw(st.sampled_from([2, 3, 4]))
    F = FiniteField(order)
    n = data.draw(st.integers(2, 4))
    m = data.draw(st.integers(0, 5))
    rows = [[data.draw(st.integers(0, order - 1)) for _ in range(n)] for _ in range(m)]
    expect = brute_rank(F, rows) if rows else 0
    assert rank(F, np.array(rows, dtype=np.uint16).reshape(m, n)) == expect


def test_rank_vectorized_path():
    F = FiniteField(64)
    rng = np.random.default_rng(0)
    B = rng.integers(0, 64, size=(3, 5))
    C = rng.integers(0, 64, size=(200, 3))
    # 200 combinations of 3 generic rows have rank 3
    X = np.zeros((200, 5), dtype=np.uint16)
    for i in range(3):
        for j in range(5):
            X[:, j] ^= F.vscale(int(B[i, j]), C[:, i].astype(np.uint16))
    assert rank(F, X) == rank(F, B.astype(np.uint16)) == 3
    assert rank(F, X, limit=2) == 2
    assert span_dim(F, np.zeros((0, 5))) == -1


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_subspace_key_roundtrip_and_membership(data):
    F = FiniteField(data.draw(st.sampled_from([3, 4, 16])))
    r, k = 3, data.draw(st.integers(0, 2))
    S = random_subspace(F, r, k, np.random.default_rng(data.draw(st.integers(0, 10**6))))
    assert Subspace.from_key(S.key(), F.order) == S
    pts = S.points(F)
    assert len(pts) == theta(k, F.order)
    assert S.contains_mask(F, pts).all()
    assert S.contains_mask(F, points_array(F, r)).sum() == len(pts)
    for h in S.equations(F):
        assert all(incident(F, p, h) for p in pts)


def test_hyperplanes_through_point():
    F = FiniteField(4)
    for P in [(1, 0, 0, 0), (0, 1, 2, 3), (1, 1, 1, 1)]:
        H = hyperplanes_through_array(F, P, 3)
        assert len(H) == theta(2, 4)
        assert all(incident(F, P, h) for h in H)


def test_null_space_dimensions():
    F = FiniteField(9)
    basis = null_space(F, [[1, 2, 0, 1]], 4)
    assert len(basis) == 3
    assert all(F.add(F.add(F.mul(1, b[0]), F.mul(2, b[1])), b[3]) == 0 for b in basis)


def test_keys_roundtrip_and_normalization():
    F = FiniteField(64)
    rng = np.random.default_rng(5)
    X = rng.integers(1, 64, size=(100, 4)).astype(np.uint16)
    N = vnormalize(F, X)
    assert np.all(N[:, 0] == 1)
    assert np.array_equal(decode_keys(F, encode_keys(F, N), 4), N)
    with pytest.raises(ValueError):
        vnormalize(F, np.zeros((1, 3), dtype=np.uint16))


def test_project_from_groups_lines():
    F = FiniteField(4)
    X = points_array(F, 3)
    P = (0, 1, 2, 3)
    keys = project_from(F, P, X)
    assert (keys == -1).sum() == 1
    live = X[keys >= 0]
    groups = {}
    for x, k in zip(live, keys[keys >= 0]):
        groups.setdefault(int(k), []).append(tuple(map(int, x)))
    # every line through P carries Q other points
    assert len(groups) == theta(2, 4)
    for members in groups.values():
        assert len(members) == 4
        assert len({line_key(F, P, m) for m in members}) == 1
    with pytest.raises(ValueError):
        line_key(F, P, P)
