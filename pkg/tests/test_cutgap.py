from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhcodes.cutgap import (
    GapEntry,
    GapReport,
    Witness,
    dual_to_subspace,
    elliptic_quadric_gaps,
    fermat_external_lines,
    gap_exhaustive,
    gap_profile,
    gap_sampled,
    hermitian_gap_table,
    hermitian_readings,
    modified_gap,
    plane_counting_bound,
    section,
)
from qhcodes.fields import FiniteField
from qhcodes.projective import points_array, rank, theta
from qhcodes.varieties import Hermitian, enumerate_variety, pointset_from_array


def brute_gaps(F, r, pts, k):
    """Section span dimensions of every k-subspace, with subspaces built as
    spans of (k+1)-tuples of points and deduplicated by point content."""
    allp = points_array(F, r)
    seen = set()
    dims = []
    for tup in combinations(range(len(allp)), k + 1):
        B = allp[list(tup)]
        if rank(F, B) != k + 1:
            continue
        members = frozenset(i for i in range(len(allp)) if rank(F, np.vstack([B, allp[i][None]])) == k + 1)
        if members in seen:
            continue
        seen.add(members)
        on = [p for p in pts if any(np.array_equal(p, allp[i]) for i in members)]
        dims.append(rank(F, np.array(on).reshape(-1, r + 1)) - 1)
    return dims


def tau(dims, k, s=-1):
    ok = [d for d in dims if d >= s]
    return None if not ok else k - min(ok)


def random_pointset(data):
    F = FiniteField(2)
    allp = points_array(F, 3)
    idx = data.draw(st.lists(st.integers(0, len(allp) - 1), min_size=1, max_size=15, unique=True))
    return F, pointset_from_array(F, allp[sorted(idx)])


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_gaps_match_brute_force(data):
    F, omega = random_pointset(data)
    for k in (1, 2):
        dims = brute_gaps(F, 3, omega.points, k)
        assert len(dims) == sum(n for n, _ in gap_profile(omega, k).values())
        for s in range(-1, k):
            assert modified_gap(omega, k, s).value == tau(dims, k, s)


@pytest.mark.property
@given(st.data())
@settings(max_examples=40, deadline=None)
def test_gap_monotonicity(data):
    """tau_k = 0 implies tau_l = 0 for l > k; tau_{k,s} is non-increasing in s."""
    F, omega = random_pointset(data)
    rep = GapReport("random", [gap_exhaustive(omega, k) for k in (0, 1, 2)])
    assert rep.monotone()
    vals = [rep.get(k).value for k in (0, 1, 2)]
    for k in range(3):
        if vals[k] == 0:
            assert all(v == 0 for v in vals[k:])
    for k in (1, 2):
        mods = [modified_gap(omega, k, s).value for s in range(-1, k)]
        assert mods[0] == gap_exhaustive(omega, k).value
        defined = [v for v in mods if v is not None]
        assert defined == sorted(defined, reverse=True)


def test_monotone_flags_violation():
    bad = GapReport("x", [GapEntry(1, -1, 0, True, "exhaustive"), GapEntry(2, -1, 1, True, "exhaustive")])
    assert not bad.monotone()


def test_full_space_has_zero_gaps():
    F = FiniteField(3)
    omega = pointset_from_array(F, points_array(F, 3))
    for k in (0, 1, 2, 3):
        assert gap_exhaustive(omega, k).value == 0


def test_undefined_gap():
    F = FiniteField(2)
    omega = pointset_from_array(F, [[1, 0, 0, 0]])
    g = modified_gap(omega, 2, 1)
    assert g.undefined and g.to_dict()["value"] == "undefined"
    with pytest.raises(ValueError):
        modified_gap(omega, 2, 2)


@pytest.mark.property
def test_witnesses_reverify():
    F = FiniteField(4)
    omega = enumerate_variety(Hermitian(F, 3))
    for k in (1, 2):
        for _, w in gap_profile(omega, k).values():
            assert w.verify(F, omega.points)
            assert w.verify(F, variety=omega.variety)
    forged = Witness(w.key, w.size + 1, w.span_dim)
    assert not forged.verify(F, omega.points)


def test_section_of_dual_hyperplane():
    F = FiniteField(3)
    S = dual_to_subspace(F, (1, 2, 0, 1))
    pts = points_array(F, 3)
    assert section(F, S, pts) == (theta(2, 3), 2)


@pytest.mark.parametrize("r, q, taus", [(2, 2, [1, 1]), (2, 3, [1, 1]), (3, 2, [0, 1, 1]), (4, 2, [0, 1, 1, 1])])
def test_hermitian_gaps(r, q, taus):
    rep = hermitian_gap_table(r, q)
    assert [row["tau"] for row in rep.info["rows"]] == taus
    assert rep.info["proof_matches"]
    assert [hermitian_readings(r, t)[1] for t in range(1, r + 1)] == taus


def test_hermitian_readings_disagree():
    for r in range(2, 8):
        assert any(hermitian_readings(r, t)[0] != hermitian_readings(r, t)[1] for t in range(1, r + 1))
    for r, q in [(2, 2), (3, 2)]:
        rep = hermitian_gap_table(r, q)
        assert rep.info["discrepancy"] and not rep.info["stated_matches"]
    with pytest.raises(ValueError):
        hermitian_gap_table(5, 2)


@pytest.mark.parametrize("q", [3, 4])
def test_elliptic_quadric_gaps(q):
    rep = elliptic_quadric_gaps(q)
    assert [rep.get(2, s).value for s in (-1, 0, 1)] == [3, 2, 0]
    for g in rep.entries:
        assert g.witness.span_dim == 2 - g.value


def test_gap_sampled_determinism_and_bound():
    F = FiniteField(4)
    omega = enumerate_variety(Hermitian(F, 3))
    a = gap_sampled(omega, 1, 30, seed=3)
    b = gap_sampled(omega, 1, 30, seed=3)
    assert a == b and not a.exact
    assert a.value <= gap_exhaustive(omega, 1).value
    assert a.witness.verify(F, omega.points)
    with pytest.raises(ValueError):
        gap_sampled(omega, 1, 5, seed=None)


def test_fermat_lines_e3(tower3):
    fl = fermat_external_lines(3, tower3)
    assert fl.spectrum == {0: 1080, 1: 1953, 2: 72, 3: 1056}
    # incidence double counts: 81 points on 65 lines each, 81*80/2 pairs
    assert sum(fl.spectrum.values()) == theta(2, 64)
    assert sum(c * n for c, n in fl.spectrum.items()) == 81 * 65
    assert sum(c * (c - 1) // 2 * n for c, n in fl.spectrum.items()) == 81 * 80 // 2
    F = tower3.field
    curve = pointset_from_array(F, points_array(F, 2)[_fermat_mask(F, 3)])
    assert section(F, dual_to_subspace(F, fl.external_witness), curve.points)[0] == 0
    assert section(F, dual_to_subspace(F, fl.tangent_witness), curve.points)[0] == 1


def _fermat_mask(F, n):
    P = points_array(F, 2)
    pn = F.pow_table(n)
    return (pn[P[:, 0]] ^ pn[P[:, 1]] ^ pn[P[:, 2]]) == 0


def test_plane_counting_bound():
    lhs, rhs = plane_counting_bound(8)
    assert lhs == 65 * 32320 and rhs == 2**21 and lhs > rhs
