"""Table-driven finite fields and the GF(2) < GF(q) < GF(q^2) tower.

Elements are plain integers in ``[0, order)``.  For a field of order
``p**m`` the integer's base-``p`` digits are the coefficients of the
polynomial-basis representation, so in characteristic 2 addition is XOR.

Scalar methods work on Python ints; the ``v*`` methods take numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

# Primitive polynomials over GF(2), bit patterns including the leading term.
# Degree 2e for the supported tower sizes plus a few small fields.
_CHAR2_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    8: 0b100011101,
    10: 0b10000001001,
    14: 0b100010001000011,
}

# Beyond this order the full multiplication table is not materialized.
_MUL_TABLE_MAX = 1024

# Storage dtype for field elements (orders up to 2^14).
ELEM = np.uint16


class FieldError(ValueError):
    """Raised for invalid field parameters or out-of-domain arguments."""


def _factor_prime_power(order: int) -> tuple[int, int]:
    if order < 2:
        raise FieldError(f"field order must be >= 2, got {order}")
    p = 2
    while p * p <= order and order % p:
        p += 1
    if order % p:
        p = order
    m, rest = 0, order
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise FieldError(f"{order} is not a prime power")
    return p, m


def _digits(x: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(x % p)
        x //= p
    return out


def _undigits(ds, p: int) -> int:
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


class FiniteField:
    """GF(p^m) with log/exp tables.

    Parameters
    ----------
    order : int
        A prime power, at most ``2**14``.
    modulus : int, optional
        Encoded primitive polynomial (base-``p`` digits, leading term
        included).  Defaults to a pinned polynomial in characteristic 2 and to
        the smallest primitive polynomial otherwise.
    """

    def __init__(self, order: int, modulus: int | None = None):
        self.p, self.m = _factor_prime_power(order)
        self.order = order
        if order > 1 << 14:
            raise FieldError(f"order {order} exceeds supported size 2^14")
        if modulus is None:
            modulus = self._default_modulus()
        self.modulus = modulus
        exp = self._build_exp(modulus)
        if exp is None:
            raise FieldError(f"polynomial {modulus:#x} is not primitive for GF({order})")
        n = order - 1
        log = [0] * order
        for i, v in enumerate(exp[:n]):
            log[v] = i
        self._exp = exp + exp  # doubled so log sums need no reduction
        self._log = log
        self.exp_table = np.array(self._exp, dtype=ELEM)
        self.log_table = np.array(log, dtype=np.int64)
        if self.p == 2:
            self._add = None
        else:
            self._add = self._build_add_table()
        self._neg = [self._negate(x) for x in range(order)]
        self.neg_table = np.array(self._neg, dtype=ELEM)
        self.inv_table = np.zeros(order, dtype=ELEM)
        self.inv_table[1:] = self.exp_table[(n - self.log_table[1:]) % n]

    # -- construction -------------------------------------------------------
    def _default_modulus(self) -> int:
        if self.p == 2 and self.m in _CHAR2_POLYS:
            return _CHAR2_POLYS[self.m]
        if self.m == 1:
            return self.p + self._primitive_root_prime()  # encodes x - g
        lead = self.p**self.m
        for tail in range(1, lead):
            poly = lead + tail
            if self._build_exp(poly) is not None:
                return poly
        raise FieldError(f"no primitive polynomial found for GF({self.order})")

    def _primitive_root_prime(self) -> int:
        p = self.p
        if p == 2:
            return 1
        for g in range(2, p):
            x, seen = 1, set()
            for _ in range(p - 1):
                x = x * g % p
                seen.add(x)
            if len(seen) == p - 1:
                return (p - g) % p  # stored as constant term c of x + c
        raise FieldError(f"no primitive root mod {p}")

    def _build_exp(self, modulus: int) -> list[int] | None:
        """Successive powers of x modulo ``modulus``; None if x is not primitive."""
        p, m, order = self.p, self.m, self.order
        mod = _digits(modulus, p, m + 1)
        if mod[m] != 1:
            return None
        exp = []
        cur = [1] + [0] * (m - 1)
        for _ in range(order - 1):
            val = _undigits(cur, p)
            exp.append(val)
            # multiply by x and reduce by the monic modulus
            top = cur[m - 1] if m > 0 else 0
            cur = [0] + cur[:-1]
            if top:
                cur = [(c - top * mod[i]) % p for i, c in enumerate(cur)]
        if len(set(exp)) != order - 1 or 0 in exp:
            return None
        return exp

    def _build_add_table(self) -> np.ndarray:
        p, m, order = self.p, self.m, self.order
        digs = np.array([_digits(x, p, m) for x in range(order)], dtype=np.int64)
        s = (digs[:, None, :] + digs[None, :, :]) % p
        weights = p ** np.arange(m, dtype=np.int64)
        return (s * weights).sum(axis=2).astype(ELEM)

    def _negate(self, x: int) -> int:
        if self.p == 2:
            return x
        return _undigits([(-d) % self.p for d in _digits(x, self.p, self.m)], self.p)

    # -- scalar arithmetic --------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self._add is None:
            return a ^ b
        return int(self._add[a, b])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        """Square-and-multiply exponentiation."""
        if k < 0:
            a, k = self.inv(a), -k
        result, base = 1, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    # -- vectorized arithmetic ----------------------------------------------
    @cached_property
    def mul_table(self) -> np.ndarray | None:
        if self.order > _MUL_TABLE_MAX:
            return None
        x = np.arange(self.order)
        return self.vmul_loglog(x[:, None], x[None, :]).astype(ELEM)

    def vmul_loglog(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp_table[self.log_table[a] + self.log_table[b]]
        return np.where((a == 0) | (b == 0), ELEM(0), out)

    def vadd(self, a, b):
        if self._add is None:
            return np.bitwise_xor(a, b)
        return self._add[a, b]

    def vsub(self, a, b):
        return self.vadd(a, self.neg_table[b])

    def vmul(self, a, b):
        table = self.mul_table
        if table is not None:
            return table[a, b]
        return self.vmul_loglog(a, b)

    def mul_row(self, c: int) -> np.ndarray:
        """Array ``r`` with ``r[x] == c*x`` for every field element ``x``."""
        table = self.mul_table
        if table is not None:
            return table[c]
        return self.vmul_loglog(np.full(self.order, c), np.arange(self.order)).astype(ELEM)

    def vscale(self, c: int, a):
        """Multiply the array ``a`` by the scalar ``c``."""
        if c == 0:
            return np.zeros_like(a)
        if c == 1:
            return a
        return self.mul_row(c)[a]

    def vpow(self, a, k: int):
        return self.pow_table(k)[a]

    def pow_table(self, k: int) -> np.ndarray:
        """``t[x] == x**k`` for all x (with ``0**0 == 1``)."""
        x = np.arange(self.order)
        n = self.order - 1
        out = self.exp_table[(self.log_table[x] * (k % n)) % n]
        out[0] = 1 if k == 0 else 0
        return out

    def vinv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self.inv_table[a]

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=ELEM)

    def __repr__(self) -> str:
        return f"FiniteField({self.order})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteField)
            and other.order == self.order
            and other.modulus == self.modulus
        )

    def __hash__(self) -> int:
        return hash((self.order, self.modulus))


# ---------------------------------------------------------------------------
# The tower GF(2) < GF(q) < GF(q^2), q = 2^e, e odd.

DEFAULT_MAX_E = 7


@dataclass(frozen=True, eq=False)
class FieldTower:
    """GF(q^2) with q = 2^e (e odd) together with delta, epsilon and sigma.

    ``delta`` lies in GF(q) with absolute trace 1 and ``epsilon`` is a root of
    ``t^2 + t + delta``, so that ``{1, epsilon}`` is a GF(q)-basis of GF(q^2).
    """

    e: int
    field: FiniteField
    delta: int
    epsilon: int
    subfield: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return 1 << self.e

    @property
    def Q(self) -> int:
        return self.field.order

    @property
    def reduction(self) -> int:
        return self.field.modulus

    @property
    def s(self) -> int:
        return 1 << ((self.e - 1) // 2)

    @property
    def n(self) -> int:
        """Fermat degree s + 1."""
        return self.s + 1

    @property
    def sigma_exp(self) -> int:
        return 1 << ((self.e + 1) // 2)

    @property
    def log_table(self) -> np.ndarray:
        return self.field.log_table

    @property
    def exp_table(self) -> np.ndarray:
        return self.field.exp_table

    # -- arithmetic shortcuts ----------------------------------------------
    def add(self, a, b):
        return a ^ b

    def mul(self, a, b):
        return self.field.mul(a, b)

    def inv(self, a):
        return self.field.inv(a)

    def pow(self, a, k):
        return self.field.pow(a, k)

    def in_subfield(self, x: int) -> bool:
        return self.field.pow(x, self.q) == x

    # -- tower maps --------------------------------------------------------
    def trace_q2_q(self, x: int) -> int:
        """Relative trace x + x^q onto GF(q)."""
        return x ^ self.field.pow(x, self.q)

    def absolute_trace_q(self, x: int) -> int:
        """Tr_{q/2}(x) = x + x^2 + ... + x^(2^(e-1)), for x in GF(q)."""
        t, y = 0, x
        for _ in range(self.e):
            t ^= y
            y = self.field.mul(y, y)
        return t

    def sigma(self, x: int) -> int:
        if not self.in_subfield(x):
            raise FieldError(f"sigma is only defined on GF({self.q}); got {x}")
        return self.field.pow(x, self.sigma_exp)

    def decompose(self, x: int) -> tuple[int, int]:
        """Coordinates (x0, x1) in GF(q) with x = x0 + epsilon*x1."""
        x1 = self.trace_q2_q(x)
        x0 = x ^ self.field.mul(self.epsilon, x1)
        return x0, x1

    def recompose(self, x0: int, x1: int) -> int:
        return x0 ^ self.field.mul(self.epsilon, x1)

    def gamma(self, x: int, mode: str = "simplified") -> int:
        f = self.field
        sig2 = self.sigma_exp + 2
        if mode == "simplified":
            x0, x1 = self.decompose(x)
            return f.pow(x0, sig2) ^ f.mul(x0, x1) ^ f.pow(x1, self.sigma_exp)
        if mode != "raw":
            raise ValueError(f"unknown gamma mode {mode!r}")
        xq = f.pow(x, self.q)
        tr = xq ^ x
        bracket = x ^ f.mul(tr, self.epsilon)
        if not self.in_subfield(bracket):
            raise AssertionError("Gamma bracket escaped GF(q)")
        return (
            f.pow(bracket, sig2)
            ^ f.pow(tr, self.sigma_exp)
            ^ f.mul(f.mul(xq, xq) ^ f.mul(x, x), self.epsilon)
            ^ f.pow(x, self.q + 1)
            ^ f.mul(x, x)
        )

    @cached_property
    def gamma_table(self) -> np.ndarray:
        """Gamma(x) for all x, simplified form, vectorized."""
        f = self.field
        x = f.elements()
        x1 = x ^ f.vpow(x, self.q)
        x0 = x ^ f.vmul(np.full_like(x1, self.epsilon), x1)
        return f.vpow(x0, self.sigma_exp + 2) ^ f.vmul(x0, x1) ^ f.vpow(x1, self.sigma_exp)

    @cached_property
    def trace_table(self) -> np.ndarray:
        x = self.field.elements()
        return x ^ self.field.vpow(x, self.q)

    def nth_roots_of_unity(self, m: int) -> list[int]:
        return nth_roots_of_unity(self.field, m)

    def describe(self) -> dict:
        width = (2 * self.e + 3) // 4
        return {
            "e": self.e,
            "q": self.q,
            "Q": self.Q,
            "s": self.s,
            "n": self.n,
            "sigma_exp": self.sigma_exp,
            "reduction": hex(self.reduction),
            "delta": f"{self.delta:#0{width + 2}x}",
            "epsilon": f"{self.epsilon:#0{width + 2}x}",
        }


def nth_roots_of_unity(F: FiniteField, m: int) -> list[int]:
    """All x in F with x^m = 1; there are gcd(m, |F|-1) of them."""
    if m < 1:
        raise FieldError("m must be >= 1")
    x = F.elements()[1:]
    roots = x[F.vpow(x, m) == 1]
    assert len(roots) == gcd(m, F.order - 1)
    return [int(v) for v in roots]


def build_field(e: int, *, delta: int | None = None, allow_large: bool = False) -> FieldTower:
    """Build the tower for q = 2^e.

    ``delta`` defaults to the smallest element of GF(q) other than 1 with
    absolute trace 1; epsilon is the smaller root of t^2 + t + delta.
    """
    if e < 1 or e % 2 == 0:
        raise FieldError(f"e must be odd, got {e}")
    if e == 1:
        raise FieldError("degenerate: e=1 makes sigma+2 collapse (Fermat hypersurface is a hyperplane)")
    if e > DEFAULT_MAX_E and not allow_large:
        raise FieldError(f"e={e} exceeds the desk-scale guard (e <= {DEFAULT_MAX_E}); pass allow_large")
    F = FiniteField(1 << (2 * e))
    q = 1 << e
    x = F.elements()
    subfield = np.sort(x[F.vpow(x, q) == x])
    assert len(subfield) == q

    probe = FieldTower(e=e, field=F, delta=0, epsilon=0, subfield=subfield)
    candidates = [int(d) for d in subfield if d != 1 and probe.absolute_trace_q(int(d)) == 1]
    if delta is None:
        delta = candidates[0]
    elif delta not in candidates:
        raise FieldError(f"delta={delta} is not in GF(q)\\{{1}} with absolute trace 1")
    roots = [int(t) for t in x if F.mul(int(t), int(t)) ^ int(t) ^ delta == 0]
    assert len(roots) == 2
    tower = FieldTower(e=e, field=F, delta=delta, epsilon=min(roots), subfield=subfield)
    assert not tower.in_subfield(tower.epsilon)
    assert tower.trace_q2_q(tower.epsilon) == 1
    return tower
