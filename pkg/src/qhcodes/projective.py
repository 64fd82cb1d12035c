"""Points, hyperplanes and subspaces of PG(r, Q) over a :class:`FiniteField`.

Points are coordinate vectors normalized so that the leftmost nonzero entry
is 1.  Point arrays have shape ``(N, r + 1)`` and are kept in lexicographic
order; the same order indexes points (``point_index`` / ``point_at``) and,
through duality, hyperplanes.  Subspaces are canonicalized by reduced row
echelon form.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .fields import ELEM, FiniteField

DEFAULT_CAP = 10**8


class GuardError(RuntimeError):
    """A requested enumeration exceeds the configured desk-scale cap."""


def theta(r: int, q: int) -> int:
    """Number of points of PG(r, q); theta(-1) = 0."""
    if r < -1:
        raise ValueError("r must be >= -1")
    return (q ** (r + 1) - 1) // (q - 1)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of an n-dimensional vector space."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _check_cap(count: int, cap: int | None, what: str) -> None:
    if cap is not None and count > cap:
        raise GuardError(
            f"{what}: {count} items exceed the cap of {cap}; use a sampled mode "
            f"or raise the cap explicitly"
        )


# ---------------------------------------------------------------------------
# vectors and arrays

def normalize(F: FiniteField, v: Sequence[int]) -> tuple[int, ...]:
    for x in v:
        if x:
            inv = F.inv(x)
            return tuple(F.mul(inv, int(y)) for y in v)
    raise ValueError("the zero vector is not a projective point")


def vnormalize(F: FiniteField, X: np.ndarray) -> np.ndarray:
    """Normalize every row of ``X``; zero rows are rejected."""
    X = np.asarray(X, dtype=ELEM)
    if X.size == 0:
        return X.reshape(-1, X.shape[-1] if X.ndim == 2 else 0)
    nz = X != 0
    if not nz.any(axis=1).all():
        raise ValueError("zero row cannot be normalized")
    lead = nz.argmax(axis=1)
    inv = F.inv_table[X[np.arange(len(X)), lead]]
    out = np.empty_like(X)
    for j in range(X.shape[1]):
        out[:, j] = F.vmul(inv, X[:, j])
    return out


def dot(F: FiniteField, h: Sequence[int], X: np.ndarray) -> np.ndarray:
    """Values ``h . x`` for every row x of X."""
    acc = np.zeros(len(X), dtype=ELEM)
    for i, c in enumerate(h):
        c = int(c)
        if c:
            acc = F.vadd(acc, F.vscale(c, X[:, i]))
    return acc


def incident(F: FiniteField, P: Sequence[int], H: Sequence[int]) -> bool:
    acc = 0
    for x, h in zip(P, H):
        acc = F.add(acc, F.mul(int(x), int(h)))
    return acc == 0


def encode_keys(F: FiniteField, X: np.ndarray) -> np.ndarray:
    """Big-endian base-Q integer of each row; preserves lexicographic order."""
    X = np.asarray(X)
    n = X.shape[1]
    if F.order**n >= 2**63:
        raise GuardError(f"keys for {n} coordinates over GF({F.order}) overflow int64")
    keys = np.zeros(len(X), dtype=np.int64)
    for j in range(n):
        keys = keys * F.order + X[:, j].astype(np.int64)
    return keys


def decode_keys(F: FiniteField, keys: np.ndarray, n: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    out = np.empty((len(keys), n), dtype=ELEM)
    for j in range(n - 1, -1, -1):
        out[:, j] = keys % F.order
        keys = keys // F.order
    return out


# ---------------------------------------------------------------------------
# point enumeration and indexing

def point_index(F: FiniteField, r: int, P: Sequence[int]) -> int:
    """Position of the normalized point P in lexicographic order."""
    Q = F.order
    p = next(i for i, x in enumerate(P) if x)
    if P[p] != 1:
        raise ValueError("point is not normalized")
    tail = 0
    for x in P[p + 1 :]:
        tail = tail * Q + int(x)
    return theta(r - p - 1, Q) + tail


def point_at(F: FiniteField, r: int, idx: int) -> tuple[int, ...]:
    Q = F.order
    if not 0 <= idx < theta(r, Q):
        raise IndexError(idx)
    for p in range(r, -1, -1):
        size = Q ** (r - p)
        if idx < size:
            digits = []
            for _ in range(r - p):
                digits.append(idx % Q)
                idx //= Q
            return (0,) * p + (1,) + tuple(reversed(digits))
        idx -= size
    raise AssertionError("unreachable")


def point_indices(F: FiniteField, X: np.ndarray) -> np.ndarray:
    """Vectorized :func:`point_index` for normalized rows."""
    X = np.asarray(X)
    Q = F.order
    n = X.shape[1]
    r = n - 1
    lead = (X != 0).argmax(axis=1)
    offsets = np.array([theta(r - p - 1, Q) for p in range(n)], dtype=np.int64)
    tail = np.zeros(len(X), dtype=np.int64)
    for j in range(n):
        use = j > lead
        tail = np.where(use, tail * Q + X[:, j].astype(np.int64), tail)
    return offsets[lead] + tail


def points_array(F: FiniteField, r: int, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """All theta(r, Q) normalized points of PG(r, Q) in lexicographic order."""
    Q = F.order
    _check_cap(theta(r, Q), cap, f"points of PG({r},{Q})")
    blocks = []
    for p in range(r, -1, -1):
        m = r - p
        count = Q**m
        block = np.zeros((count, r + 1), dtype=ELEM)
        block[:, p] = 1
        t = np.arange(count, dtype=np.int64)
        for j in range(r, p, -1):
            block[:, j] = t % Q
            t //= Q
        blocks.append(block)
    return np.concatenate(blocks)


def iterate_points(F: FiniteField, r: int, cap: int | None = DEFAULT_CAP) -> Iterator[tuple[int, ...]]:
    for row in points_array(F, r, cap):
        yield tuple(int(x) for x in row)


# ---------------------------------------------------------------------------
# linear algebra

def rref(F: FiniteField, rows: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form with zero rows dropped."""
    M = [[int(x) for x in row] for row in rows]
    if not M:
        return ()
    n = len(M[0])
    out: list[list[int]] = []
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    out = M[:r]
    return tuple(tuple(row) for row in out)


def _scalar_rank(F: FiniteField, rows, limit: int) -> int:
    basis: list[tuple[int, list[int]]] = []
    for row in rows:
        v = [int(x) for x in row]
        for p, b in basis:
            f = v[p]
            if f:
                v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, b)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            continue
        inv = F.inv(v[lead])
        basis.append((lead, [F.mul(inv, x) for x in v]))
        if len(basis) >= limit:
            break
    return len(basis)


def rank(F: FiniteField, X, limit: int | None = None) -> int:
    """Rank of the rows of X, stopping early once ``limit`` is reached."""
    X = np.asarray(X, dtype=ELEM)
    if X.ndim != 2 or len(X) == 0:
        return 0
    n = X.shape[1]
    limit = n if limit is None else min(limit, n)
    if len(X) <= 16:
        return _scalar_rank(F, X.tolist(), limit)
    # cheap probe on a prefix before eliminating the whole array
    if _scalar_rank(F, X[:8].tolist(), limit) >= limit:
        return limit
    X = X[X.any(axis=1)]
    rk = 0
    while len(X) and rk < limit:
        row = [int(x) for x in X[0]]
        p = next(i for i, x in enumerate(row) if x)
        inv = F.inv(row[p])
        row = [F.mul(inv, x) for x in row]
        factors = X[:, p].copy()
        for j, c in enumerate(row):
            if c:
                X[:, j] = F.vsub(X[:, j], F.vscale(c, factors))
        X = X[X.any(axis=1)]
        rk += 1
    return rk


def span_dim(F: FiniteField, points) -> int:
    """Projective dimension of the span; -1 for no points."""
    pts = np.asarray(points)
    if pts.size == 0:
        return -1
    return rank(F, pts) - 1


def null_space(F: FiniteField, rows: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Basis of {y : row . y = 0 for every row}."""
    R = rref(F, rows)
    pivots = [next(i for i, x in enumerate(row) if x) for row in R]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        y = [0] * n
        y[f] = 1
        for row, p in zip(R, pivots):
            y[p] = F.neg(row[f])
        basis.append(tuple(y))
    return basis


# ---------------------------------------------------------------------------
# subspaces

@dataclass(frozen=True)
class Subspace:
    """Projective subspace given by its canonical (RREF) basis."""

    basis: tuple[tuple[int, ...], ...]
    order: int

    @classmethod
    def span(cls, F: FiniteField, rows) -> "Subspace":
        return cls(rref(F, rows), F.order)

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def ambient(self) -> int:
        return len(self.basis[0]) - 1 if self.basis else -1

    def key(self) -> str:
        """Hex-encoded echelon matrix, one row per ``:``-separated group."""
        width = max(1, ((self.order - 1).bit_length() + 3) // 4)
        return ":".join("".join(f"{x:0{width}x}" for x in row) for row in self.basis)

    @classmethod
    def from_key(cls, key: str, order: int) -> "Subspace":
        width = max(1, ((order - 1).bit_length() + 3) // 4)
        rows = tuple(
            tuple(int(g[i : i + width], 16) for i in range(0, len(g), width)) for g in key.split(":")
        )
        return cls(rows, order)

    def equations(self, F: FiniteField) -> list[tuple[int, ...]]:
        return null_space(F, self.basis, self.ambient + 1)

    def contains_mask(self, F: FiniteField, X: np.ndarray) -> np.ndarray:
        mask = np.ones(len(X), dtype=bool)
        for h in self.equations(F):
            mask &= dot(F, h, X) == 0
        return mask

    def points(self, F: FiniteField) -> np.ndarray:
        """All normalized points of the subspace, lexicographically sorted."""
        B = np.array(self.basis, dtype=ELEM)
        coeffs = points_array(F, self.dim)
        X = np.zeros((len(coeffs), B.shape[1]), dtype=ELEM)
        for i in range(len(B)):
            for j in range(B.shape[1]):
                c = int(B[i, j])
                if c:
                    X[:, j] = F.vadd(X[:, j], F.vscale(c, coeffs[:, i]))
        # RREF basis with normalized coefficients gives normalized points
        order = np.argsort(encode_keys(F, X), kind="stable")
        return X[order]


def line_key(F: FiniteField, P1: Sequence[int], P2: Sequence[int]) -> Subspace:
    S = Subspace.span(F, [P1, P2])
    if S.dim != 1:
        raise ValueError("line_key needs two distinct points")
    return S


def iterate_k_subspaces(
    F: FiniteField, r: int, k: int, cap: int | None = DEFAULT_CAP
) -> Iterator[Subspace]:
    """Every k-dimensional subspace of PG(r, Q) exactly once.

    Enumerates RREF matrices: pivot column sets in lexicographic order, then
    the free entries in lexicographic order.
    """
    n, d, Q = r + 1, k + 1, F.order
    if not 0 <= d <= n:
        raise ValueError(f"need -1 <= k <= r, got k={k}, r={r}")
    _check_cap(gaussian_binomial(n, d, Q), cap, f"{k}-subspaces of PG({r},{Q})")
    for pivots in combinations(range(n), d):
        free = [
            (i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots
        ]
        for values in product(range(Q), repeat=len(free)):
            rows = [[0] * n for _ in range(d)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            yield Subspace(tuple(tuple(row) for row in rows), Q)


def random_subspace(F: FiniteField, r: int, k: int, rng: np.random.Generator) -> Subspace:
    """Uniformly random k-subspace (via a uniformly random full-rank spanning set)."""
    while True:
        M = rng.integers(0, F.order, size=(k + 1, r + 1))
        S = Subspace.span(F, M.tolist())
        if S.dim == k:
            return S


def hyperplanes_through(F: FiniteField, P: Sequence[int], r: int) -> Iterator[tuple[int, ...]]:
    """Normalized duals H with H . P = 0, in lexicographic order."""
    for row in hyperplanes_through_array(F, P, r):
        yield tuple(int(x) for x in row)


def hyperplanes_through_array(F: FiniteField, P: Sequence[int], r: int) -> np.ndarray:
    return Subspace.span(F, null_space(F, [P], r + 1)).points(F)


def project_from(F: FiniteField, P: Sequence[int], X: np.ndarray) -> np.ndarray:
    """Keys of the lines joining P to each row of X (rows equal to P get -1).

    Two rows get the same key exactly when they lie on the same line through P.
    """
    P = [int(x) for x in P]
    p = next(i for i, x in enumerate(P) if x)
    if P[p] != 1:
        P = list(normalize(F, P))
    X = np.asarray(X, dtype=ELEM)
    factors = X[:, p]
    Y = X.copy()
    for j, c in enumerate(P):
        if c:
            Y[:, j] = F.vsub(X[:, j], F.vscale(c, factors))
    live = Y.any(axis=1)
    keys = np.full(len(X), -1, dtype=np.int64)
    if live.any():
        keys[live] = encode_keys(F, vnormalize(F, Y[live]))
    return keys
