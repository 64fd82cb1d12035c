"""Projective systems and the linear codes they define.

A projective system is a finite (multi)set of points spanning PG(r, Q).  The
weight of the codeword attached to a hyperplane H is ``N - |Omega & H|``
counted with multiplicity, so weight distributions are computed one
hyperplane scalar-class at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fields import ELEM, FieldTower, FiniteField
from .projective import (
    GuardError,
    dot,
    encode_keys,
    hyperplanes_through_array,
    normalize,
    point_at,
    point_index,
    point_indices,
    points_array,
    project_from,
    rank,
    _scalar_rank,
    theta,
    vnormalize,
)
from .varieties import PointSet, VEps, enumerate_variety

# Budget for exhaustive hyperplane work, measured in (hyperplane, point) pairs.
WORK_CAP = 2 * 10**9
_BLOCK_CELLS = 1 << 22


class DegenerateError(ValueError):
    """The points do not span the ambient space."""


# ---------------------------------------------------------------------------
# data types

@dataclass(eq=False)
class ProjectiveSystem:
    """Points of PG(r, Q) with positive multiplicities."""

    field: FiniteField
    points: np.ndarray
    multiplicities: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=ELEM)
        if self.multiplicities is not None:
            m = np.asarray(self.multiplicities, dtype=np.int64)
            if m.shape != (len(self.points),) or np.any(m < 1):
                raise ValueError("multiplicities must be positive, one per point")
            self.multiplicities = None if np.all(m == 1) else m

    @classmethod
    def from_pointset(cls, ps: PointSet) -> "ProjectiveSystem":
        return cls(ps.field, ps.points, label=ps.label)

    @classmethod
    def from_points(cls, F: FiniteField, points, multiplicities=None, label="") -> "ProjectiveSystem":
        X = vnormalize(F, np.atleast_2d(np.asarray(points, dtype=ELEM)))
        if len(np.unique(encode_keys(F, X))) != len(X):
            raise ValueError("points must be pairwise distinct")
        return cls(F, X, multiplicities, label)

    @property
    def r(self) -> int:
        return self.points.shape[1] - 1

    @property
    def Q(self) -> int:
        return self.field.order

    @property
    def weights(self) -> np.ndarray:
        if self.multiplicities is None:
            return np.ones(len(self.points), dtype=np.int64)
        return self.multiplicities

    @property
    def length(self) -> int:
        return int(self.weights.sum())

    def __len__(self) -> int:
        return len(self.points)

    def span_dim(self) -> int:
        return rank(self.field, self.points) - 1

    def incidence_count(self, H: Sequence[int]) -> int:
        """Points of the system on the hyperplane H, with multiplicity."""
        on = dot(self.field, H, self.points) == 0
        return int(self.weights[on].sum())


@dataclass
class WeightTable:
    """Hyperplane weights: weight -> number of hyperplane scalar-classes."""

    weights: dict[int, int]
    length: int
    alphabet: int
    mode: str = "exhaustive"
    seed: int | None = None
    n_samples: int | None = None
    witnesses: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.weights = {int(w): int(c) for w, c in sorted(self.weights.items())}

    @property
    def exhaustive(self) -> bool:
        return self.mode == "exhaustive"

    @property
    def total(self) -> int:
        return sum(self.weights.values())

    @property
    def weight_set(self) -> set[int]:
        return set(self.weights)

    @property
    def min_weight(self) -> int:
        return min(w for w in self.weights if w > 0)

    @property
    def max_weight(self) -> int:
        return max(self.weights)

    def rows(self) -> list[tuple[int, int, str]]:
        return [(w, c, self.mode) for w, c in self.weights.items()]

    def to_dict(self) -> dict:
        out = {
            "length": self.length,
            "mode": self.mode,
            "weights": [{"w": w, "count": c} for w, c in self.weights.items()],
        }
        if self.mode == "sampled":
            out["seed"] = self.seed
            out["n_samples"] = self.n_samples
        return out


@dataclass
class CuttingResult:
    """Outcome of a cutting-set test.

    ``cutting`` is True/False when decided and None when a sampled search
    found no counterexample (sampling never certifies the property).
    """

    cutting: bool | None
    mode: str
    witness: tuple[int, ...] | None = None
    witness_span_dim: int | None = None
    checked: int = 0
    seed: int | None = None

    @property
    def verdict(self) -> str:
        if self.cutting is None:
            return "unknown"
        return "cutting" if self.cutting else "not cutting"


@dataclass
class CodeSummary:
    length: int
    dimension: int
    min_distance: int
    weight_set: list[int]
    minimal: str
    generalized: dict[int, int] = field(default_factory=dict)
    witness: tuple[int, ...] | None = None


# ---------------------------------------------------------------------------
# hyperplane counting

def _outer_dot(F: FiniteField, H: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Matrix of ``h . x`` for rows h of H and x of X."""
    out = np.zeros((len(H), len(X)), dtype=ELEM)
    table = F.mul_table
    for i in range(H.shape[1]):
        if table is not None:
            term = table[H[:, i][:, None], X[:, i][None, :]]
        else:
            a, b = np.broadcast_arrays(H[:, i][:, None], X[:, i][None, :])
            term = F.vmul(a, b)
        out = F.vadd(out, term)
    return out


def hyperplane_work(system: ProjectiveSystem) -> int:
    return theta(system.r - 1, system.Q) * len(system)


def _check_work(system: ProjectiveSystem, cap: int | None, hint: str) -> None:
    work = hyperplane_work(system)
    if cap is not None and work > cap:
        raise GuardError(
            f"exhaustive pass needs {work} hyperplane-point checks (cap {cap}); {hint}"
        )


def _hyperplane_blocks(system: ProjectiveSystem):
    """Yield (hyperplane indices, value matrix rows) block by block.

    A hyperplane is written as ``a X_0 + h . X' = 0`` with h a normalized point
    of PG(r-1) or h = 0.  For each block of h, yields the index table
    ``idx[b, v]`` of the hyperplane ``(-v, h_b)`` together with the matrix of
    values ``h_b . x'`` over affine points and the infinity-incidence mask.
    """
    F, r, Q = system.field, system.r, system.Q
    X = system.points
    inf = X[:, 0] == 0
    A = X[~inf][:, 1:]
    I = X[inf][:, 1:]
    duals = points_array(F, r - 1, cap=None)
    offset = theta(r - 1, Q)
    nonzero = np.arange(1, Q)
    inv_nz = F.inv_table[nonzero]
    a_of_v = F.neg_table[np.arange(Q)]
    block = max(1, _BLOCK_CELLS // max(1, len(A)))
    for start in range(0, len(duals), block):
        Hb = duals[start : start + block]
        own = np.arange(start, start + len(Hb), dtype=np.int64)
        # scaled[b, a-1] = h_b / a, keyed as (1, h_b / a)
        scaled = F.vmul(inv_nz[None, :, None], Hb[:, None, :])
        keys = encode_keys(F, scaled.reshape(-1, r)).reshape(len(Hb), Q - 1) + offset
        idx = np.empty((len(Hb), Q), dtype=np.int64)
        for v in range(Q):
            a = int(a_of_v[v])
            idx[:, v] = own if a == 0 else keys[:, a - 1]
        VA = _outer_dot(F, Hb, A)
        VI = _outer_dot(F, Hb, I) == 0
        yield idx, VA, VI, inf


def hyperplane_counts(system: ProjectiveSystem, cap: int | None = WORK_CAP) -> np.ndarray:
    """Weighted incidence count of every hyperplane, indexed like PG(r) points."""
    _check_work(system, cap, "use weight_sample instead")
    Q = system.Q
    w = system.weights
    counts = np.full(theta(system.r, Q), -1, dtype=np.int64)
    wI = None
    for idx, VA, VI, inf in _hyperplane_blocks(system):
        if wI is None:
            wA, wI = w[~inf], w[inf]
        B = len(idx)
        flat = (VA.astype(np.int64) + (np.arange(B, dtype=np.int64) * Q)[:, None]).ravel()
        weights = None if system.multiplicities is None else np.tile(wA, B)
        hist = np.bincount(flat, weights=weights, minlength=B * Q).reshape(B, Q).astype(np.int64)
        at_inf = VI.astype(np.int64) @ wI if len(wI) else np.zeros(B, dtype=np.int64)
        counts[idx] = hist + at_inf[:, None]
    # X_0 = 0 holds every point at infinity and no affine point
    counts[theta(system.r - 1, Q)] = int(w[system.points[:, 0] == 0].sum())
    assert np.all(counts >= 0), "hyperplane index map is not a bijection"
    return counts


def hyperplane_counts_streaming(system: ProjectiveSystem) -> np.ndarray:
    """Same as :func:`hyperplane_counts`, by pushing each point into every
    hyperplane through it.  Slow; kept as an independent cross-check."""
    F = system.field
    counts = np.zeros(theta(system.r, system.Q), dtype=np.int64)
    for P, w in zip(system.points, system.weights):
        H = hyperplanes_through_array(F, P.tolist(), system.r)
        counts[point_indices(F, H)] += int(w)
    return counts


def _table_from_counts(system: ProjectiveSystem, counts: np.ndarray) -> WeightTable:
    N = system.length
    ws = N - counts
    values, freq = np.unique(ws, return_counts=True)
    witnesses = {}
    for w in values:
        i = int(np.flatnonzero(ws == w)[0])
        witnesses[int(w)] = point_at(system.field, system.r, i)
    return WeightTable(dict(zip(values.tolist(), freq.tolist())), N, system.Q, witnesses=witnesses)


def weight_distribution(system: ProjectiveSystem, cap: int | None = WORK_CAP) -> WeightTable:
    """Exhaustive weight distribution over all hyperplane classes."""
    return _table_from_counts(system, hyperplane_counts(system, cap))


# ---------------------------------------------------------------------------
# sampling

def structured_hyperplanes(r: int, tower: FieldTower | None, F: FiniteField) -> list[tuple[int, ...]]:
    """Representatives of the hyperplane families used in the weight analysis.

    Covers X_0 = 0, hyperplanes through or avoiding P_inf = (0,..,0,1), and
    the families ``a X_0 + X_1 + c X_2`` with c an n-th root of unity or not.
    """
    zero = [0] * (r + 1)
    reps = []

    def add(*assign):
        v = list(zero)
        for i, c in assign:
            v[i] = c
        if any(v):
            reps.append(normalize(F, v))

    add((0, 1))
    add((r, 1))
    add((0, 1), (r, 1))
    add((1, 1), (r, 1))
    add((1, 1))
    add((0, 1), (1, 1))
    add(*[(i, 1) for i in range(r + 1)])
    if r >= 3:
        add((2, 1))
        roots = tower.nth_roots_of_unity(tower.n) if tower is not None else [1]
        others = [x for x in range(1, F.order) if x not in set(roots)]
        cs = list(roots) + others[:2]
        for c in cs:
            for a in (0, 1):
                add((0, a), (1, 1), (2, c))
                add((0, a), (1, 1), (2, c), (r, 1))
    seen, out = set(), []
    for h in reps:
        if h not in seen:
            seen.add(h)
            out.append(h)
    return out


def sample_hyperplanes(F: FiniteField, r: int, n: int, seed: int) -> list[tuple[int, ...]]:
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, theta(r, F.order), size=n)
    return [point_at(F, r, int(i)) for i in idx]


def weight_sample(
    system: ProjectiveSystem,
    n_samples: int,
    seed: int,
    tower: FieldTower | None = None,
    structured: bool = True,
) -> WeightTable:
    """Weights of ``n_samples`` seeded random hyperplanes plus structured ones.

    Counts record how many probes produced each weight (structured probes
    included), not hyperplane-class multiplicities.
    """
    if seed is None:
        raise ValueError("sampling needs an explicit seed")
    F, r, N = system.field, system.r, system.length
    probes = structured_hyperplanes(r, tower, F) if structured else []
    probes += sample_hyperplanes(F, r, n_samples, seed)
    tally: dict[int, int] = {}
    witnesses: dict[int, tuple[int, ...]] = {}
    for H in probes:
        w = N - system.incidence_count(H)
        tally[w] = tally.get(w, 0) + 1
        witnesses.setdefault(w, tuple(H))
    return WeightTable(tally, N, system.Q, "sampled", seed, n_samples, witnesses)


# ---------------------------------------------------------------------------
# minimality

def _span_rank_at_least(F: FiniteField, rows_a: np.ndarray, rows_i: np.ndarray, need: int) -> tuple[bool, int]:
    probe = np.concatenate([rows_a[: need + 2], rows_i[: need + 2]])
    if _scalar_rank(F, probe.tolist(), need) >= need:
        return True, need
    rk = rank(F, np.concatenate([rows_a, rows_i]), limit=need)
    return rk >= need, rk


def is_cutting(
    system: ProjectiveSystem,
    cap: int | None = WORK_CAP,
    n_samples: int = 0,
    seed: int | None = None,
    tower: FieldTower | None = None,
) -> CuttingResult:
    """Does every hyperplane meet the system in a spanning set?

    Exhaustive when the hyperplane-point work fits ``cap``; otherwise a
    falsification search over structured hyperplanes (X_0 = 0 first) and
    ``n_samples`` seeded random ones, which can answer False or unknown.
    """
    try:
        _check_work(system, cap, "")
    except GuardError:
        return cutting_falsify(system, n_samples, seed, tower)
    F, r = system.field, system.r
    X = system.points
    inf = X[:, 0] == 0
    A_full, I_full = X[~inf], X[inf]
    # X_0 = 0 first: it carries only the points at infinity
    ok, rk = _span_rank_at_least(F, I_full[:0], I_full, r)
    pi_inf = point_at(F, r, theta(r - 1, F.order))
    if not ok:
        return CuttingResult(False, "exhaustive", pi_inf, rk - 1, 1)
    checked = 1
    for idx, VA, VI, _ in _hyperplane_blocks(system):
        for b in range(len(idx)):
            order = np.argsort(VA[b], kind="stable")
            vals = VA[b][order]
            bounds = np.searchsorted(vals, np.arange(F.order + 1))
            Ib = I_full[VI[b]]
            for v in range(F.order):
                Ab = A_full[order[bounds[v] : bounds[v + 1]]]
                ok, rk = _span_rank_at_least(F, Ab, Ib, r)
                checked += 1
                if not ok:
                    H = point_at(F, r, int(idx[b, v]))
                    return CuttingResult(False, "exhaustive", H, rk - 1, checked)
    return CuttingResult(True, "exhaustive", checked=checked)


def cutting_falsify(
    system: ProjectiveSystem,
    n_samples: int = 0,
    seed: int | None = None,
    tower: FieldTower | None = None,
) -> CuttingResult:
    """Search structured and sampled hyperplanes for a non-spanning section."""
    if n_samples and seed is None:
        raise ValueError("sampling needs an explicit seed")
    F, r = system.field, system.r
    probes = structured_hyperplanes(r, tower, F)
    if n_samples:
        probes += sample_hyperplanes(F, r, n_samples, seed)
    for i, H in enumerate(probes, 1):
        on = system.points[dot(F, H, system.points) == 0]
        rk = rank(F, on, limit=r)
        if rk < r:
            return CuttingResult(False, "sampled", tuple(H), rk - 1, i, seed)
    return CuttingResult(None, "sampled", checked=len(probes), seed=seed)


def ab_minimality(table: WeightTable) -> str:
    """Sufficient condition w_min / w_max > (Q-1) / Q for minimality."""
    if not table.exhaustive:
        raise ValueError("the weight condition needs an exhaustive table")
    wmin, wmax = table.min_weight, table.max_weight
    return "sufficient" if wmin * table.alphabet > wmax * (table.alphabet - 1) else "inconclusive"


# ---------------------------------------------------------------------------
# generalized weights

def line_intersections(system: ProjectiveSystem, anchors: Iterable[int] | None = None):
    """Yield, for each anchor point i, the weighted sizes of the lines through
    it that contain later points (index > i).  Every line with at least two
    points is reported exactly once, at its first point."""
    F = system.field
    X, w = system.points, system.weights
    anchors = range(len(X)) if anchors is None else anchors
    for i in anchors:
        rest = X[i + 1 :]
        if len(rest) == 0:
            yield i, np.zeros(0, dtype=np.int64)
            continue
        keys = project_from(F, X[i], rest)
        _, inv = np.unique(keys, return_inverse=True)
        sizes = np.bincount(inv.ravel(), weights=w[i + 1 :]).astype(np.int64) + int(w[i])
        yield i, sizes


def max_line_intersection(system: ProjectiveSystem) -> tuple[int, tuple[int, int] | None]:
    """Largest weighted intersection of a line with the system, with a pair
    of point indices spanning a maximizing line (None for a single point)."""
    best = int(system.weights.max())
    pair = None
    F = system.field
    for i, sizes in line_intersections(system):
        if len(sizes) and sizes.max() > best:
            best = int(sizes.max())
            keys = project_from(F, system.points[i], system.points[i + 1 :])
            uniq, inv = np.unique(keys, return_inverse=True)
            j = int(np.flatnonzero(inv.ravel() == int(np.argmax(sizes)))[0]) + i + 1
            pair = (i, j)
    return best, pair


def generalized_weight(system: ProjectiveSystem, k: int, cap: int | None = WORK_CAP) -> int:
    """d_k = N - max |Omega & Pi| over subspaces Pi of codimension k.

    Supported: k = 1 (hyperplanes), k = r - 1 (lines) and k = r (points).
    """
    r, N = system.r, system.length
    if not 1 <= k <= r:
        raise ValueError(f"k must lie in 1..{r}")
    if k == r:
        return N - int(system.weights.max())
    if k == 1:
        return N - int(hyperplane_counts(system, cap).max())
    if k == r - 1:
        return N - max_line_intersection(system)[0]
    raise GuardError(f"d_{k} needs codimension-{k} subspaces; only k in (1, r-1, r) is supported")


# ---------------------------------------------------------------------------
# multiset construction and generator matrices

def multiset_weights(r: int, j: int, q: int) -> dict:
    """Closed-form weights of the affine points of V^r_eps plus P_inf with
    multiplicity j."""
    if r < 3 or j < 1:
        raise ValueError("need r >= 3 and j >= 1")
    sgn = (-1) ** (r - 1)
    base = q ** (2 * r - 1)
    w2 = base - q ** (2 * r - 3)
    w3 = w2 + sgn * q ** (r - 2) + j
    w4 = w3 - sgn * q ** (r - 1)
    listed = [base, w2, w3, w4]
    return {"length": base + j, "weights": listed, "distinct": len(set(listed))}


def three_weight_values(r: int, q: int) -> list[int]:
    """The multiplicities j for which the formula weights collapse to three."""
    if r % 2:
        return [q ** (r - 1) - q ** (r - 2), q ** (2 * r - 3) - q ** (r - 2), q ** (2 * r - 3) + q ** (r - 1) - q ** (r - 2)]
    return [q ** (r - 2), q ** (2 * r - 3) + q ** (r - 2), q ** (2 * r - 3) - q ** (r - 1) + q ** (r - 2)]


def multiset_system(tower: FieldTower, r: int, j: int, cap=None) -> ProjectiveSystem:
    """Affine points of V^r_eps together with P_inf of multiplicity j."""
    ps = enumerate_variety(VEps.of(tower, r)) if cap is None else enumerate_variety(VEps.of(tower, r), cap)
    A = ps.affine()
    p_inf = np.zeros((1, r + 1), dtype=ELEM)
    p_inf[0, r] = 1
    pts = np.concatenate([A, p_inf])
    mult = np.ones(len(pts), dtype=np.int64)
    mult[-1] = j
    return ProjectiveSystem(tower.field, pts, mult, label=f"V^{r} affine + {j} P_inf")


def generator_matrix(system: ProjectiveSystem) -> np.ndarray:
    """(r+1) x N generator matrix; columns repeat per multiplicity."""
    dim = system.span_dim()
    if dim < system.r:
        raise DegenerateError(f"points span a {dim}-dimensional subspace of PG({system.r})")
    return np.repeat(system.points, system.weights, axis=0).T.copy()


def summarize(system: ProjectiveSystem, cap: int | None = WORK_CAP) -> CodeSummary:
    table = weight_distribution(system, cap)
    cut = is_cutting(system, cap)
    ab = ab_minimality(table)
    if cut.cutting:
        minimal = "proven-yes"
    elif cut.cutting is False:
        minimal = "proven-no"
    else:
        minimal = "ab-yes" if ab == "sufficient" else "unknown"
    gen = {1: table.min_weight, system.r: generalized_weight(system, system.r)}
    return CodeSummary(
        system.length, system.r + 1, table.min_weight, sorted(table.weight_set), minimal, gen, cut.witness
    )
