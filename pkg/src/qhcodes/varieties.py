"""Rational points of the hypersurfaces V^r_eps and their relatives.

Every variety exposes a vectorized membership predicate (``contains``) on
arrays of projective points.  The trace-type varieties (V^r_eps, the BT
quasi-Hermitian variety and the Hermitian variety in its affine model
``x_r^q + x_r = g(x_1..x_{r-1})``) also have a parametrized enumerator: each
affine tuple ``(x_1..x_{r-1})`` fixes the relative trace of ``x_r`` and
leaves exactly q choices for it.
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import isqrt
from pathlib import Path
from typing import ClassVar

import numpy as np

from .fields import ELEM, FieldTower, FiniteField
from .projective import (
    GuardError,
    encode_keys,
    points_array,
    theta,
    vnormalize,
)

# Max number of points an enumerator will materialize by default.
POINT_CAP = 5 * 10**7


def _field_sum(F: FiniteField, arrays):
    return reduce(F.vadd, arrays, np.zeros_like(arrays[0]) if arrays else 0)


@dataclass(frozen=True, eq=False)
class Variety:
    """Base class: a point set of PG(r, F) cut out by a predicate."""

    field: FiniteField
    r: int
    tower: FieldTower | None = None

    tag: ClassVar[int] = 0
    name: ClassVar[str] = "variety"
    trace_type: ClassVar[bool] = False

    def _contains_normalized(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=ELEM))
        if X.shape[1] != self.r + 1:
            raise ValueError(f"expected {self.r + 1} coordinates, got {X.shape[1]}")
        return self._contains_normalized(vnormalize(self.field, X))

    def membership(self, P) -> bool:
        return bool(self.contains([P])[0])

    def label(self) -> str:
        return f"{self.name}(r={self.r})"


def _hermitian_norm_sum(F: FiniteField, q: int, X: np.ndarray, cols) -> np.ndarray:
    norm = F.pow_table(q + 1)
    return _field_sum(F, [norm[X[:, i]] for i in cols])


@dataclass(frozen=True, eq=False)
class VEps(Variety):
    """x_r^q + x_r = Gamma(x_1) + ... + Gamma(x_{r-1}); at infinity the
    Fermat cone X_0 = 0, X_1^n + ... + X_{r-1}^n = 0."""

    tag: ClassVar[int] = 1
    name: ClassVar[str] = "veps"
    trace_type: ClassVar[bool] = True

    @classmethod
    def of(cls, tower: FieldTower, r: int) -> "VEps":
        return cls(tower.field, r, tower)

    def affine_g_table(self) -> np.ndarray:
        return self.tower.gamma_table

    def _infinity(self, X):
        pn = self.field.pow_table(self.tower.n)
        return _field_sum(self.field, [pn[X[:, i]] for i in range(1, self.r)]) == 0

    def _contains_normalized(self, X):
        T = self.tower
        g = self.affine_g_table()
        affine = T.trace_table[X[:, self.r]] == _field_sum(
            self.field, [g[X[:, i]] for i in range(1, self.r)]
        )
        return np.where(X[:, 0] == 1, affine, self._infinity(X))


@dataclass(frozen=True, eq=False)
class BTQuasiHermitian(VEps):
    """Affine part of V^r_eps, Hermitian cone X_1^{q+1}+...+X_{r-1}^{q+1}=0 at infinity."""

    tag: ClassVar[int] = 2
    name: ClassVar[str] = "bt"

    def _infinity(self, X):
        return _hermitian_norm_sum(self.field, self.tower.q, X, range(1, self.r)) == 0


@dataclass(frozen=True, eq=False)
class Hermitian(Variety):
    """Non-degenerate Hermitian variety X_0^q X_r + X_0 X_r^q = sum_{i=1}^{r-1} X_i^{q+1}."""

    tag: ClassVar[int] = 3
    name: ClassVar[str] = "hermitian"
    trace_type: ClassVar[bool] = True

    @property
    def q(self) -> int:
        q = isqrt(self.field.order)
        if q * q != self.field.order:
            raise ValueError(f"Hermitian varieties need a square order, got {self.field.order}")
        return q

    def affine_g_table(self) -> np.ndarray:
        return self.field.pow_table(self.q + 1)

    def _contains_normalized(self, X):
        F, q, r = self.field, self.q, self.r
        powq = F.pow_table(q)
        lhs = F.vadd(F.vmul(powq[X[:, 0]], X[:, r]), F.vmul(X[:, 0], powq[X[:, r]]))
        return lhs == _hermitian_norm_sum(F, q, X, range(1, r))


@dataclass(frozen=True, eq=False)
class Fermat(Variety):
    """X_0^n + X_1^n + ... + X_r^n = 0."""

    n: int = 3

    tag: ClassVar[int] = 4
    name: ClassVar[str] = "fermat"

    @classmethod
    def of(cls, tower: FieldTower, r: int) -> "Fermat":
        return cls(tower.field, r, tower, n=tower.n)

    def _contains_normalized(self, X):
        pn = self.field.pow_table(self.n)
        return _field_sum(self.field, [pn[X[:, i]] for i in range(self.r + 1)]) == 0

    def label(self) -> str:
        return f"fermat(r={self.r}, n={self.n})"


@dataclass(frozen=True, eq=False)
class HermitianConeInfinity(Variety):
    """X_0 = 0 and X_1^{q+1} + ... + X_{r-1}^{q+1} = 0."""

    tag: ClassVar[int] = 5
    name: ClassVar[str] = "hcone"

    def _contains_normalized(self, X):
        q = isqrt(self.field.order)
        return (X[:, 0] == 0) & (_hermitian_norm_sum(self.field, q, X, range(1, self.r)) == 0)


@dataclass(frozen=True, eq=False)
class EllipticQuadric3(Variety):
    """X_0 X_1 + X_2^2 + X_2 X_3 + c X_3^2 = 0 in PG(3, q), t^2 + t + c irreducible."""

    r: int = 3

    tag: ClassVar[int] = 6
    name: ClassVar[str] = "quadric"

    @cached_property
    def c(self) -> int:
        F = self.field
        for c in range(F.order):
            if all(F.add(F.add(F.mul(t, t), t), c) != 0 for t in range(F.order)):
                return c
        raise AssertionError("no irreducible t^2+t+c")

    def _contains_normalized(self, X):
        F = self.field
        x0, x1, x2, x3 = (X[:, i] for i in range(4))
        val = F.vadd(F.vmul(x0, x1), F.vmul(x2, x2))
        val = F.vadd(val, F.vmul(x2, x3))
        val = F.vadd(val, F.vscale(self.c, F.vmul(x3, x3)))
        return val == 0


VARIETY_TAGS = {cls.name: cls for cls in (VEps, BTQuasiHermitian, Hermitian, Fermat, HermitianConeInfinity, EllipticQuadric3)}


def make_variety(name: str, tower: FieldTower, r: int) -> Variety:
    """Tower-based variety by CLI name: veps, bt, hermitian, fermat, hcone."""
    if name == "veps":
        return VEps.of(tower, r)
    if name == "bt":
        return BTQuasiHermitian(tower.field, r, tower)
    if name == "hermitian":
        return Hermitian(tower.field, r, tower)
    if name == "fermat":
        return Fermat.of(tower, r)
    if name == "hcone":
        return HermitianConeInfinity(tower.field, r, tower)
    raise ValueError(f"unknown variety {name!r}")


# ---------------------------------------------------------------------------
# point sets

@dataclass(eq=False)
class PointSet:
    """Deduplicated, lexicographically sorted points of a variety."""

    variety: Variety | None
    points: np.ndarray
    label: str = ""
    field_: FiniteField | None = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=ELEM)
        if not self.label and self.variety is not None:
            self.label = self.variety.label()

    @property
    def field(self) -> FiniteField:
        return self.field_ if self.field_ is not None else self.variety.field

    @property
    def r(self) -> int:
        return self.points.shape[1] - 1

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_infinity(self) -> int:
        return int(np.count_nonzero(self.points[:, 0] == 0))

    @property
    def n_affine(self) -> int:
        return len(self) - self.n_infinity

    @property
    def counts(self) -> tuple[int, int]:
        return self.n_affine, self.n_infinity

    @cached_property
    def keys(self) -> np.ndarray:
        keys = encode_keys(self.field, self.points)
        if len(keys) > 1 and not np.all(keys[1:] > keys[:-1]):
            raise ValueError("point set must be sorted and free of duplicates")
        return keys

    def contains_mask(self, X) -> np.ndarray:
        """Membership of normalized rows X by key lookup (no predicate)."""
        k = encode_keys(self.field, np.asarray(X))
        pos = np.searchsorted(self.keys, k)
        pos = np.minimum(pos, len(self.keys) - 1)
        return self.keys[pos] == k

    def infinity(self) -> np.ndarray:
        return self.points[self.points[:, 0] == 0]

    def affine(self) -> np.ndarray:
        return self.points[self.points[:, 0] != 0]


def pointset_from_array(F: FiniteField, X, label: str = "") -> PointSet:
    """Normalize, deduplicate and sort an arbitrary array of points."""
    X = vnormalize(F, np.asarray(X, dtype=ELEM))
    keys, idx = np.unique(encode_keys(F, X), return_index=True)
    return PointSet(None, X[idx], label=label, field_=F)


def _filter_space(variety: Variety, r: int, prefix_zero: bool, cap: int | None) -> np.ndarray:
    F = variety.field
    pts = points_array(F, r, cap=cap)
    if prefix_zero:
        pts = np.concatenate([np.zeros((len(pts), 1), dtype=ELEM), pts], axis=1)
    chunk = 1 << 20
    keep = [pts[i : i + chunk][variety.contains(pts[i : i + chunk])] for i in range(0, len(pts), chunk)]
    return np.concatenate(keep) if keep else np.zeros((0, pts.shape[1]), dtype=ELEM)


def infinity_section(variety: Variety, cap: int | None = POINT_CAP) -> PointSet:
    """Points of the variety on the hyperplane X_0 = 0."""
    pts = _filter_space(variety, variety.r - 1, prefix_zero=True, cap=cap)
    return PointSet(variety, pts, label=f"{variety.label()} at infinity")


def _trace_fibers(F: FiniteField, q: int) -> np.ndarray:
    """Row c lists, ascending, the q elements x with x^q + x = c (c in GF(q))."""
    x = F.elements()
    tr = F.vadd(x, F.vpow(x, q))
    order = np.lexsort((x, tr))
    table = np.zeros((F.order, q), dtype=ELEM)
    counts = np.bincount(tr, minlength=F.order)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    for c in np.nonzero(counts)[0]:
        assert counts[c] == q
        table[c] = x[order[starts[c] : starts[c] + q]]
    return table, counts > 0


def affine_points_trace_type(variety: Variety, cap: int | None = POINT_CAP) -> np.ndarray:
    """Affine points (1, x_1, .., x_r), lexicographic, by trace-fiber parametrization."""
    F, r = variety.field, variety.r
    q = isqrt(F.order)
    Q = F.order
    m = r - 1
    count = Q**m * q
    if cap is not None and count > cap:
        raise GuardError(f"{variety.label()}: {count} affine points predicted, above the cap of {cap}")
    fibers, in_image = _trace_fibers(F, q)
    gtab = variety.affine_g_table()
    t = np.arange(Q**m, dtype=np.int64)
    cols = []
    for _ in range(m):
        cols.append((t % Q).astype(ELEM))
        t //= Q
    cols.reverse()
    g = _field_sum(F, [gtab[c] for c in cols]) if m else np.zeros(1, dtype=ELEM)
    if not in_image[g].all():
        raise AssertionError("affine right-hand side left GF(q)")
    out = np.empty((count, r + 1), dtype=ELEM)
    out[:, 0] = 1
    for i, c in enumerate(cols):
        out[:, i + 1] = np.repeat(c, q)
    out[:, r] = fibers[g].reshape(-1)
    return out


def enumerate_variety(variety: Variety, cap: int | None = POINT_CAP) -> PointSet:
    """All rational points, sorted; infinity points first."""
    if variety.trace_type:
        inf = _filter_space(variety, variety.r - 1, prefix_zero=True, cap=cap)
        aff = affine_points_trace_type(variety, cap=cap)
        pts = np.concatenate([inf, aff])
    else:
        pts = _filter_space(variety, variety.r, prefix_zero=False, cap=cap)
    return PointSet(variety, pts)


def enumerate_v_eps(tower: FieldTower, r: int, cap: int | None = POINT_CAP) -> PointSet:
    return enumerate_variety(VEps.of(tower, r), cap=cap)


def fermat_count(F: FiniteField, r: int, n: int, cap: int | None = POINT_CAP) -> int:
    """Rational points of X_0^n + ... + X_r^n = 0 in PG(r, F), by filtering."""
    return len(_filter_space(Fermat(F, r, n=n), r, prefix_zero=False, cap=cap))


def hk_bound(nu: int, r: int, q: int) -> int:
    """Point bound for a degree-nu hypersurface of PG(r, q) without linear components."""
    if nu < 1 or r < 2:
        raise ValueError("need nu >= 1 and r >= 2")
    return (nu - 1) * q ** (r - 1) + nu * q ** (r - 2) + theta(r - 3, q)


def hermitian_size(r: int, q: int) -> int:
    """|H(r, q^2)|."""
    s = (-1) ** r
    return (q ** (r + 1) + s) * (q**r - s) // (q * q - 1)


def hermitian_counts(r: int, q: int) -> tuple[int, int, int]:
    """(|H(r,q^2)|, generic hyperplane section, tangent hyperplane section)."""
    if r < 2:
        raise ValueError("r must be >= 2")
    generic = hermitian_size(r - 1, q)
    return hermitian_size(r, q), generic, generic + (-1) ** (r - 1) * q ** (r - 1)


def elliptic_quadric_minus_point(F: FiniteField) -> tuple[PointSet, tuple[int, ...]]:
    """Q^-(3, q) with the point (1,0,0,0) removed; returns (set, removed point)."""
    quad = EllipticQuadric3(F)
    full = enumerate_variety(quad)
    P = (1, 0, 0, 0)
    keep = ~np.all(full.points == np.array(P, dtype=ELEM), axis=1)
    return PointSet(quad, full.points[keep], label=f"Q-(3,{F.order}) minus {P}"), P


# ---------------------------------------------------------------------------
# point-set cache: "QHVP" | version | e | r | tag | count (u64 LE) | u16 LE words

CACHE_MAGIC = b"QHVP"
CACHE_VERSION = 1
CACHE_ENV = "QHCODES_CACHE_DIR"
_HEADER = struct.Struct("<4sBBBBQ")


class CacheFormatError(ValueError):
    pass


def write_pointset(path, ps: PointSet, e: int) -> None:
    tag = ps.variety.tag if ps.variety is not None else 0
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, e, ps.r, tag, len(ps)))
        fh.write(np.ascontiguousarray(ps.points, dtype="<u2").tobytes())
    os.replace(tmp, path)


def read_pointset_raw(path) -> tuple[dict, np.ndarray]:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise CacheFormatError(f"{path}: truncated header")
        magic, version, e, r, tag, count = _HEADER.unpack(head)
        if magic != CACHE_MAGIC:
            raise CacheFormatError(f"{path}: bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise CacheFormatError(f"{path}: format version {version}, expected {CACHE_VERSION}")
        data = np.frombuffer(fh.read(), dtype="<u2")
    if data.size != count * (r + 1):
        raise CacheFormatError(f"{path}: expected {count * (r + 1)} words, found {data.size}")
    header = {"version": version, "e": e, "r": r, "tag": tag, "count": count}
    return header, data.reshape(count, r + 1).astype(ELEM)


def cache_key(variety: Variety) -> str:
    T = variety.tower
    if T is None:
        raise ValueError("only tower-based varieties are cached")
    extra = getattr(variety, "n", "")
    blob = f"{CACHE_VERSION}|{T.e}|{variety.r}|{variety.name}|{extra}|{T.reduction}|{T.delta}|{T.epsilon}"
    digest = hashlib.sha256(blob.encode()).hexdigest()[:16]
    return f"{variety.name}_e{T.e}_r{variety.r}_{digest}.qhvp"


def cache_dir_from_env() -> Path | None:
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


def load_or_enumerate(variety: Variety, cache_dir=None, cap: int | None = POINT_CAP) -> PointSet:
    """Enumerate with a disk cache; stale or unreadable cache files are recomputed."""
    cache_dir = Path(cache_dir) if cache_dir is not None else cache_dir_from_env()
    if cache_dir is None or variety.tower is None:
        return enumerate_variety(variety, cap=cap)
    path = cache_dir / cache_key(variety)
    if path.exists():
        try:
            header, pts = read_pointset_raw(path)
        except CacheFormatError:
            pass
        else:
            if header["tag"] == variety.tag and header["r"] == variety.r and header["e"] == variety.tower.e:
                return PointSet(variety, pts)
    ps = enumerate_variety(variety, cap=cap)
    write_pointset(path, ps, variety.tower.e)
    return ps
