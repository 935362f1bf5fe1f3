"""Tricomplex ring arithmetic.

A tricomplex number is stored as eight real coefficients over the basis

    (1, i1, i2, j1, i3, j2, j3, i4)

with j1 = i1 i2, j2 = i1 i3, j3 = i2 i3 and i4 = i1 i2 i3.  In this order the
index of a basis unit is the bitmask of the generators (i1 -> bit 0,
i2 -> bit 1, i3 -> bit 2) whose product it is, so the product of two units is
the unit at ``a ^ b`` with sign ``(-1) ** popcount(a & b)``.

The idempotent representation splits a tricomplex number into four complex
numbers (in ``C(i1)``) along the idempotents e1 e3, ē1 e3, e1 ē3, ē1 ē3 where
``e_k = (1 + j_k) / 2``.  Products and powers act componentwise there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple

import numpy as np

BASIS = ("1", "i1", "i2", "j1", "i3", "j2", "j3", "i4")


class Unit(str, Enum):
    """The eight basis units of the tricomplex space."""

    ONE = "1"
    I1 = "i1"
    I2 = "i2"
    J1 = "j1"
    I3 = "i3"
    J2 = "j2"
    J3 = "j3"
    I4 = "i4"

    @property
    def index(self) -> int:
        return BASIS.index(self.value)

    @classmethod
    def parse(cls, token: str) -> "Unit":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown unit {token!r}; expected one of {', '.join(BASIS)}"
            ) from None


def _unit_sign(a: int, b: int) -> int:
    return -1 if bin(a & b).count("1") % 2 else 1


# SIGN[a, b] * e_{a ^ b} == e_a * e_b
SIGN = np.array([[_unit_sign(a, b) for b in range(8)] for a in range(8)], dtype=np.int64)
_SIGN_ROWS = tuple(tuple(int(s) for s in row) for row in SIGN)


@dataclass(frozen=True)
class Tricomplex:
    """Immutable tricomplex number; ``coeffs`` follows :data:`BASIS` order."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(x) for x in self.coeffs)
        if len(coeffs) != 8:
            raise ValueError(f"a tricomplex number has 8 coefficients, got {len(coeffs)}")
        if not all(math.isfinite(x) for x in coeffs):
            raise ValueError(f"non-finite tricomplex coefficient in {coeffs}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_real(cls, x: float) -> "Tricomplex":
        return cls((x, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))

    @classmethod
    def from_complex(cls, z: complex) -> "Tricomplex":
        """Embed ``z`` in the copy of the complex plane spanned by {1, i1}."""
        z = complex(z)
        return cls((z.real, z.imag, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))

    @classmethod
    def from_terms(cls, **terms: float) -> "Tricomplex":
        """Build from keyword terms, e.g. ``Tricomplex.from_terms(one=0.2, i1=0.3)``."""
        coeffs = [0.0] * 8
        for name, value in terms.items():
            key = "1" if name in ("one", "re") else name
            coeffs[Unit.parse(key).index] += value
        return cls(tuple(coeffs))

    def __getitem__(self, unit: Unit | str | int) -> float:
        if isinstance(unit, int):
            return self.coeffs[unit]
        return self.coeffs[Unit.parse(unit).index]

    def __iter__(self):
        return iter(self.coeffs)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coeffs, dtype=dtype or float)

    def __repr__(self):
        terms = " ".join(f"{x:+.6g}{'' if u == '1' else u}" for x, u in zip(self.coeffs, BASIS))
        return f"Tricomplex({terms})"

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Tricomplex(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return _checked(tuple(x * other for x in self.coeffs))
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = ONE
        base = self
        while n:
            if n & 1:
                result = mul(result, base)
            n >>= 1
            if n:
                base = mul(base, base)
        return result

    def norm(self) -> float:
        return norm3(self)

    def decompose(self) -> "IdempotentQuad":
        return decompose(self)


def _coerce(x) -> Tricomplex | None:
    if isinstance(x, Tricomplex):
        return x
    if isinstance(x, (int, float)):
        return Tricomplex.from_real(x)
    if isinstance(x, complex):
        return Tricomplex.from_complex(x)
    return None


def _checked(coeffs: Iterable[float]) -> Tricomplex:
    coeffs = tuple(coeffs)
    if not all(math.isfinite(x) for x in coeffs):
        raise OverflowError("tricomplex arithmetic overflowed")
    return Tricomplex(coeffs)


class IdempotentQuad(NamedTuple):
    """Complex components along e1e3, ē1e3, e1ē3, ē1ē3 (in that order)."""

    g11: complex
    g21: complex
    g12: complex
    g22: complex


ZERO = Tricomplex.from_real(0.0)
ONE = Tricomplex.from_real(1.0)


def unit(u: Unit | str) -> Tricomplex:
    coeffs = [0.0] * 8
    coeffs[Unit.parse(u).index] = 1.0
    return Tricomplex(tuple(coeffs))


def add(a: Tricomplex, b: Tricomplex) -> Tricomplex:
    return _checked(x + y for x, y in zip(a.coeffs, b.coeffs))


def mul(a: Tricomplex, b: Tricomplex) -> Tricomplex:
    out = [0.0] * 8
    x, y = a.coeffs, b.coeffs
    for i in range(8):
        xi = x[i]
        if xi == 0.0:
            continue
        row = _SIGN_ROWS[i]
        for j in range(8):
            out[i ^ j] += row[j] * xi * y[j]
    return _checked(out)


def decompose(eta: Tricomplex) -> IdempotentQuad:
    """Idempotent components of ``eta``.

    Built as two nested splits: eta = eta1 + eta2 i3 splits along e3/ē3 into
    the bicomplex numbers eta1 -/+ eta2 i2, and each bicomplex w1 + w2 i2
    splits along e1/ē1 into w1 -/+ w2 i1.
    """
    g = decompose_array(np.asarray(eta.coeffs, dtype=float))
    return IdempotentQuad(*(complex(z) for z in g))


def reconstruct(q: IdempotentQuad | Iterable[complex]) -> Tricomplex:
    x = reconstruct_array(np.asarray(tuple(q), dtype=complex))
    return _checked(x.tolist())


def decompose_array(x: np.ndarray) -> np.ndarray:
    """Vectorised :func:`decompose`: ``(..., 8)`` reals -> ``(..., 4)`` complex."""
    x = np.asarray(x, dtype=float)
    # eta11, eta12, eta21, eta22 as (re, im) pairs in C(i1)
    a_re, a_im = x[..., 0], x[..., 1]
    b_re, b_im = x[..., 2], x[..., 3]
    c_re, c_im = x[..., 4], x[..., 5]
    d_re, d_im = x[..., 6], x[..., 7]
    # e3 part: (eta11 + eta22) + (eta12 - eta21) i2 ; ē3 part: (eta11 - eta22) + (eta12 + eta21) i2
    s_re, s_im = a_re + d_re, a_im + d_im
    t_re, t_im = b_re - c_re, b_im - c_im
    u_re, u_im = a_re - d_re, a_im - d_im
    v_re, v_im = b_re + c_re, b_im + c_im
    out = np.empty(x.shape[:-1] + (4,), dtype=complex)
    # w1 -/+ w2 i1, with w2 i1 = -w2.im + w2.re i1
    out[..., 0] = (s_re + t_im) + 1j * (s_im - t_re)
    out[..., 1] = (s_re - t_im) + 1j * (s_im + t_re)
    out[..., 2] = (u_re + v_im) + 1j * (u_im - v_re)
    out[..., 3] = (u_re - v_im) + 1j * (u_im + v_re)
    return out


def reconstruct_array(g: np.ndarray) -> np.ndarray:
    """Inverse of :func:`decompose_array`: ``(..., 4)`` complex -> ``(..., 8)`` reals."""
    g = np.asarray(g, dtype=complex)
    g11, g21, g12, g22 = g[..., 0], g[..., 1], g[..., 2], g[..., 3]
    s = (g11 + g21) / 2
    t = (g21 - g11) * -0.5j
    u = (g12 + g22) / 2
    v = (g22 - g12) * -0.5j
    eta11 = (s + u) / 2
    eta22 = (s - u) / 2
    eta12 = (t + v) / 2
    eta21 = (v - t) / 2
    out = np.empty(g.shape[:-1] + (8,), dtype=float)
    for k, z in enumerate((eta11, eta12, eta21, eta22)):
        out[..., 2 * k] = z.real
        out[..., 2 * k + 1] = z.imag
    return out


def norm3(eta: Tricomplex) -> float:
    """Euclidean norm of the coefficient vector."""
    return math.sqrt(math.fsum(x * x for x in eta.coeffs))


def norm3_idempotent(eta: Tricomplex) -> float:
    """The same norm evaluated as sqrt(sum |eta_gamma|^2 / 4)."""
    return math.sqrt(math.fsum(abs(z) ** 2 for z in decompose(eta)) / 4)


def mul_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coefficientwise product of broadcastable ``(..., 8)`` arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=float)
    for i in range(8):
        for j in range(8):
            out[..., i ^ j] += SIGN[i, j] * x[..., i] * y[..., j]
    return out


E1 = Tricomplex((0.5, 0, 0, 0.5, 0, 0, 0, 0))
E1_BAR = Tricomplex((0.5, 0, 0, -0.5, 0, 0, 0, 0))
E3 = Tricomplex((0.5, 0, 0, 0, 0, 0, 0.5, 0))
E3_BAR = Tricomplex((0.5, 0, 0, 0, 0, 0, -0.5, 0))
IDEMPOTENTS = (E1 * E3, E1_BAR * E3, E1 * E3_BAR, E1_BAR * E3_BAR)
