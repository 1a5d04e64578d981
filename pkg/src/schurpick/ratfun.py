"""Complex polynomials and rational functions.

Coefficients are stored in ascending degree order.  Nothing is ever reduced
to lowest terms: two rational functions are "equal" when they agree as
functions, which the tests check pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import DegenerateDenominator, PoleAtPoint, ZeroOutsideDisk

__all__ = [
    "Polynomial",
    "RationalFunction",
    "Jet",
    "rat_eval",
    "rat_taylor",
    "blaschke",
    "taylor_many",
    "cancel_root",
    "cancel_common_roots",
    "lft_apply",
    "POLE_RTOL",
]

#: ``|den(z)|`` below this fraction of ``sum_k |d_k| |z|^k`` counts as a pole.
POLE_RTOL = 1e-14

Number = Union[int, float, complex]


def _as_coeffs(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
    nz = np.flatnonzero(c)
    c = c[: nz[-1] + 1].copy() if nz.size else c[:0].copy()
    c.flags.writeable = False
    return c


def _horner(c: np.ndarray, z):
    z = np.asarray(z, dtype=complex)
    acc = np.zeros(z.shape, dtype=complex)
    for a in c[::-1]:
        acc = acc * z + a
    return acc


def _shift(c: np.ndarray, z0, m: int) -> np.ndarray:
    """First ``m + 1`` coefficients of ``p(z0 + h)`` in powers of ``h``.

    Repeated synthetic division by ``(z - z0)``; ``z0`` may be an array, in
    which case the result has shape ``(m + 1,) + z0.shape``.
    """
    z0 = np.asarray(z0, dtype=np.clongdouble)
    out = np.zeros((m + 1,) + z0.shape, dtype=complex)
    q = [np.broadcast_to(np.clongdouble(a), z0.shape) for a in c]
    for j in range(m + 1):
        if not q:
            break
        acc = np.zeros(z0.shape, dtype=np.clongdouble)
        quotient = [None] * (len(q) - 1)
        for k in range(len(q) - 1, 0, -1):
            acc = acc * z0 + q[k]
            quotient[k - 1] = acc
        out[j] = acc * z0 + q[0]
        q = quotient
    return out


def _series_divide(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated power-series quotient ``a / b`` (leading axis = order)."""
    w = np.zeros_like(a)
    for j in range(a.shape[0]):
        acc = a[j].copy()
        for i in range(1, j + 1):
            acc -= b[i] * w[j - i]
        w[j] = acc / b[0]
    return w


class Polynomial:
    """Immutable complex polynomial with ascending coefficients.

    The empty coefficient sequence is the zero polynomial, whose degree is
    ``-inf``.

    >>> p = Polynomial([1, 0, 1])
    >>> complex(p(2j))
    (-3+0j)
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        if not isinstance(coeffs, (np.ndarray, list, tuple)):
            coeffs = list(coeffs)
        object.__setattr__(self, "coeffs", _as_coeffs(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def from_roots(cls, roots: Sequence[Number], lead: Number = 1.0) -> "Polynomial":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if len(self.coeffs) else -math.inf

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, z):
        out = _horner(self.coeffs, z)
        return out[()] if out.ndim == 0 else out

    def magnitude(self, z):
        """``sum_k |c_k| |z|^k``: the natural size of the terms summed at ``z``."""
        return _horner(np.abs(self.coeffs).astype(complex), np.abs(z)).real

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()!r})"

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if np.isscalar(other):
            return Polynomial([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n, dtype=complex)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(other.coeffs)] += other.coeffs
        return Polynomial(c)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def deriv(self) -> "Polynomial":
        k = np.arange(1, len(self.coeffs))
        return Polynomial(self.coeffs[1:] * k)

    def conj(self) -> "Polynomial":
        """Polynomial with conjugated coefficients, ``z -> conj(p(conj(z)))``."""
        return Polynomial(self.coeffs.conj())

    def taylor_shift(self, z0: Number, order: int | None = None) -> np.ndarray:
        """Coefficients of ``p`` in powers of ``(z - z0)``."""
        if self.is_zero():
            return np.zeros((order or 0) + 1, dtype=complex)
        m = len(self.coeffs) - 1 if order is None else order
        return _shift(self.coeffs, complex(z0), m)

    def divide_linear(self, root: Number) -> tuple["Polynomial", complex]:
        """Synthetic division by ``(z - root)``: returns quotient and remainder."""
        c = self.coeffs
        if len(c) == 0:
            return Polynomial(), 0j
        q = np.zeros(len(c) - 1, dtype=complex)
        acc = 0j
        for k in range(len(c) - 1, 0, -1):
            acc = acc * root + c[k]
            q[k - 1] = acc
        return Polynomial(q), complex(acc * root + c[0])

    def trimmed(self, rtol: float) -> "Polynomial":
        """Drop leading coefficients below ``rtol * max|c_k|``."""
        if self.is_zero():
            return self
        big = np.abs(self.coeffs).max()
        keep = np.flatnonzero(np.abs(self.coeffs) > rtol * big)
        return Polynomial(self.coeffs[: keep[-1] + 1])

    def roots(self) -> np.ndarray:
        if len(self.coeffs) < 2:
            return np.zeros(0, dtype=complex)
        return np.roots(self.coeffs[::-1])


class RationalFunction:
    """``num / den`` with complex polynomial numerator and denominator.

    Parameters
    ----------
    num, den : Polynomial or sequence of complex
        Ascending coefficients.  ``den`` must not be the zero polynomial.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,)):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def constant(cls, value: Number) -> "RationalFunction":
        return cls([value], [1.0])

    @classmethod
    def identity(cls) -> "RationalFunction":
        return cls([0.0, 1.0], [1.0])

    def __repr__(self):
        return f"RationalFunction(num={self.num.coeffs.tolist()!r}, den={self.den.coeffs.tolist()!r})"

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=complex)
        d = _horner(self.den.coeffs, z_arr)
        bad = np.abs(d) <= POLE_RTOL * self.den.magnitude(z_arr)
        if np.any(bad):
            where = z_arr[bad] if z_arr.ndim else z_arr
            raise PoleAtPoint(f"denominator vanishes at z = {np.ravel(where)[0]!r}")
        out = _horner(self.num.coeffs, z_arr) / d
        return out[()] if out.ndim == 0 else out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def conj(self) -> "RationalFunction":
        """``z -> conj(f(conj(z)))``; equals ``conj(f(z))`` on the real axis."""
        return RationalFunction(self.num.conj(), self.den.conj())

    def taylor(self, z0: Number, order: int) -> "Jet":
        return rat_taylor(self, z0, order)

    def deriv(self) -> "RationalFunction":
        p, q = self.num, self.den
        return RationalFunction(p.deriv() * q - p * q.deriv(), q * q)

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if np.isscalar(other):
            return RationalFunction.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if np.array_equal(self.den.coeffs, other.den.coeffs):
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients ``w_j = w^(j)(center) / j!`` for ``j = 0..m``."""

    center: complex
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("a jet needs at least one coefficient")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, j):
        return self.coeffs[j]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coeffs, dtype=dtype or complex)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def rat_eval(f: RationalFunction, z: Number) -> complex:
    """Value ``num(z) / den(z)``; raises :class:`PoleAtPoint` at a pole."""
    return complex(f(z))


def taylor_many(f: RationalFunction, z0, order: int) -> np.ndarray:
    """Taylor coefficients of ``f`` at every point of the array ``z0``.

    No pole check; returns shape ``(order + 1,) + z0.shape``.
    """
    a = _shift(f.num.coeffs, z0, order) if not f.num.is_zero() else np.zeros((order + 1,) + np.shape(z0), complex)
    b = _shift(f.den.coeffs, z0, order)
    return _series_divide(a, b)


def rat_taylor(f: RationalFunction, z0: Number, order: int) -> Jet:
    """Taylor coefficients ``w_0..w_order`` of ``f`` at ``z0``.

    >>> rat_taylor(RationalFunction([1], [2, -1]), 1, 2).coeffs
    ((1+0j), (1+0j), (1+0j))
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    z0 = complex(z0)
    if abs(f.den(z0)) <= POLE_RTOL * f.den.magnitude(z0):
        raise PoleAtPoint(f"denominator vanishes at z0 = {z0!r}")
    return Jet(z0, tuple(taylor_many(f, z0, order)))


def blaschke(zeros: Sequence[Number], phase: Number = 1.0) -> RationalFunction:
    """Finite Blaschke product ``phase * prod (z - a) / (1 - conj(a) z)``."""
    zeros = [complex(a) for a in zeros]
    for a in zeros:
        if not abs(a) < 1:
            raise ZeroOutsideDisk(f"Blaschke zero {a!r} is not in the open unit disk")
    phase = complex(phase)
    if abs(abs(phase) - 1) > 1e-12:
        raise ValueError(f"phase {phase!r} is not unimodular")
    num = np.array([phase])
    den = np.array([1.0 + 0j])
    for a in zeros:
        num = np.convolve(num, [-a, 1.0])
        den = np.convolve(den, [1.0, -a.conjugate()])
    return RationalFunction(num, den)


def _vanishes(p: Polynomial, t: complex, rtol: float) -> bool:
    return abs(p(t)) <= rtol * max(p.magnitude(t), 1e-300)


def cancel_root(f: RationalFunction, t: Number, rtol: float = 1e-9) -> RationalFunction:
    """Divide ``(z - t)`` out of numerator and denominator while both vanish at ``t``.

    Only removes a common factor at a *known* point; no general GCD.
    """
    t = complex(t)
    num, den = f.num, f.den
    while den.degree >= 1 and _vanishes(den, t, rtol) and (num.is_zero() or _vanishes(num, t, rtol)):
        den, _ = den.divide_linear(t)
        if not num.is_zero():
            num, _ = num.divide_linear(t)
    if den is f.den:
        return f
    return RationalFunction(num, den)


def cancel_common_roots(num: Polynomial, den: Polynomial, rtol: float = 1e-6, keep=None):
    """Divide out roots shared by ``num`` and ``den`` (matched within ``rtol``).

    ``keep`` optionally restricts cancellation to roots ``r`` with
    ``keep(r)`` true.  Returns the reduced ``(num, den)``.
    """
    changed = True
    while changed and den.degree >= 1 and num.degree >= 1:
        changed = False
        rn = num.roots()
        for r in den.roots():
            if keep is not None and not keep(r):
                continue
            k = np.argmin(np.abs(rn - r))
            if abs(rn[k] - r) <= rtol * (1 + abs(r)):
                root = (rn[k] + r) / 2
                num, _ = num.divide_linear(root)
                den, _ = den.divide_linear(root)
                changed = True
                break
    return num, den


def lft_apply(S, E: RationalFunction) -> RationalFunction:
    """Linear fractional map ``w = s0 + s2 E s1 / (1 - E s)``.

    ``S`` is anything carrying rational entries ``s0, s1, s2, s`` (for
    example :class:`schurpick.parametrize.CoefficientMatrix`).  When ``S``
    also lists its interpolation ``points``, removable singularities of the
    assembled quotient at those points are divided out.
    """
    a, b = E.num, E.den
    if a.is_zero():
        return S.s0
    s0, s1, s2, s = S.s0, S.s1, S.s2, S.s
    shared = all(np.array_equal(x.den.coeffs, s0.den.coeffs) for x in (s1, s2, s))
    det_num = getattr(S, "det_num", None)
    if shared and det_num is not None:
        # s0 s - s1 s2 = det_num / D, so the factor D drops out exactly
        D = s0.den
        core = b * D - a * s.num
        num = b * s0.num - a * det_num
        den = core
    elif shared:
        D = s0.den
        core = b * D - a * s.num
        num = s0.num * core + a * s1.num * s2.num
        den = D * core
    else:
        core = b * s.den - a * s.num
        num = s0.num * s1.den * s2.den * core + s0.den * a * s1.num * s2.num * s.den
        den = s0.den * s1.den * s2.den * core
    if core.is_zero() or np.abs(core.coeffs).max() <= 1e-13 * max(
        np.abs((b * (s0.den if shared else s.den)).coeffs).max(), np.abs((a * s.num).coeffs).max() if not s.num.is_zero() else 0.0
    ):
        raise DegenerateDenominator("1 - E s vanishes identically")
    w = RationalFunction(num, den)
    for t in getattr(S, "points", ()):
        w = cancel_root(w, t)
    return w
