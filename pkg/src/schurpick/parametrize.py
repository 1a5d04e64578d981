"""Coefficient matrix, unique solution of the singular case, and solution assembly.

For a nonsingular Pick matrix every solution is ``w = s0 + s2 E s1 / (1 - E s)``
with ``E`` running over the Schur class.  The four entries share the
denominator ``det(Ptilde - z P T)``, which is nonzero in the open disk.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._linalg import circle_points, clean_coeffs, det_extended, interpolate_on_circle, refined_solve
from .exceptions import (
    DegenerateDenominator,
    InterpolationError,
    NotSchurClass,
    RangeViolation,
    ReconstructionMismatch,
    ResolventSingular,
    SingularPick,
    UniqueSolutionWarning,
)
from .jsonio import rational_from_json, rational_to_json
from .pickdata import PickSystem
from .ratfun import Polynomial, RationalFunction, _series_divide, blaschke, cancel_common_roots, cancel_root, lft_apply, taylor_many

__all__ = [
    "CoefficientMatrix",
    "SchurParameter",
    "coefficient_matrix_at",
    "coefficient_matrix_rational",
    "singular_solution",
    "solve",
    "check_schur",
    "ResolventSolution",
    "entry_jets",
    "pole_moduli",
]

RESOLVENT_RTOL = 1e-13
VALIDATION_RTOL = 1e-9
RANGE_RTOL = 1e-9
SCHUR_TOL = 1e-8
POLE_MARGIN = 1e-9
COEFF_TRIM = 1e-14
SAMPLE_RADII = (1.0, 0.5, 0.25)
#: Zero/pole pairs of a solution closer than this, and this close to the circle, are polished.
PAIR_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """``S = [[s0, s2], [s1, s]]`` as rational functions over the common ``den``.

    ``points`` lists the interpolation nodes, so that :func:`lft_apply` can
    divide out removable singularities there.  ``det_num`` is the numerator
    of ``det S`` over ``den``; with it the map to solutions never forms the
    common factor ``den`` that would otherwise have to cancel numerically.
    """

    s0: RationalFunction
    s1: RationalFunction
    s2: RationalFunction
    s: RationalFunction
    den: Polynomial
    points: tuple = ()
    det_num: Optional[Polynomial] = None

    def __call__(self, z):
        """Evaluate to an array of shape ``z.shape + (2, 2)``."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = self.s0(z)
        out[..., 0, 1] = self.s2(z)
        out[..., 1, 0] = self.s1(z)
        out[..., 1, 1] = self.s(z)
        return out

    @property
    def degree(self) -> int:
        return int(max(0, self.den.degree))

    def to_json(self) -> dict:
        return {
            "s0": rational_to_json(self.s0),
            "s1": rational_to_json(self.s1),
            "s2": rational_to_json(self.s2),
            "s": rational_to_json(self.s),
            "den": self.den.coeffs,
        }


def _require_nonsingular(sys: PickSystem):
    if sys.singular:
        raise SingularPick(f"P has rank {sys.rank} < {sys.N}; use singular_solution")


def _resolvent_parts(sys: PickSystem):
    """Extended-precision ``P T``, ``Ptilde``, ``M^*``, ``v`` and the corner row."""
    ld = np.clongdouble
    P = sys.P.astype(ld) if sys.P_ext is None else sys.P_ext
    T = sys.T.astype(ld) if sys.T_ext is None else sys.T_ext
    E, M = sys.E.astype(ld), sys.M.astype(ld)
    Mh = M.conj().T
    v = refined_solve(sys.T.conj().T, E.conj().T, A_ext=T.conj().T, extended=True)
    # M P^{-1} Ptilde = M + (M P^{-1} M^*) M = alpha^2 M, with no solve against P
    corner = sys.alpha**2 * M[0]
    return P @ T, P + Mh @ M, Mh, v, corner, T


def _series_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    for j in range(a.shape[0]):
        for i in range(j + 1):
            out[j] += a[i] * b[j - i]
    return out


def entry_jets(sys: PickSystem, zs, order: int, check: bool = False) -> np.ndarray:
    """Taylor coefficients of all four entries of ``S`` at each point of ``zs``.

    Uses the resolvent expansion ``R(z0 + h) = sum_k h^k R (P T R)^k`` with
    refined solves against the extended-precision ``P``, so no polynomial
    form of ``S`` is involved and accuracy does not degrade near the poles
    that sit just outside the nodes.

    Returns
    -------
    ndarray, shape ``(order + 1, K, 2, 2)``

    Raises
    ------
    ResolventSingular
        With ``check``, when ``Ptilde - z P T`` is numerically singular.
    """
    _require_nonsingular(sys)
    PT, Pt, Mh, v, corner, T = _resolvent_parts(sys)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex)).ravel()
    A_ext = Pt[None] - zs.astype(np.clongdouble)[:, None, None] * PT[None]
    A = A_ext.astype(complex)
    if check:
        sv = np.linalg.svd(A, compute_uv=False)
        bad = sv[:, -1] <= RESOLVENT_RTOL * sv[:, 0]
        if np.any(bad):
            raise ResolventSingular(f"Ptilde - z P T is singular at z = {zs[bad][0]!r}")
    rhs = np.concatenate([Mh, v], axis=1)
    X = [refined_solve(A, np.broadcast_to(rhs, (len(zs),) + rhs.shape), A_ext=A_ext, extended=True)]
    for _ in range(order):
        X.append(refined_solve(A, PT[None] @ X[-1], A_ext=A_ext, extended=True))
    X = np.array(X)  # (order + 1, K, N, 2)
    E, MT = sys.E[0].astype(np.clongdouble), Mh[:, 0].conj() @ T
    g = X[..., 0] @ MT
    h = X[..., 1] @ E
    q = X[..., 1] @ corner
    lag = lambda a: np.concatenate([np.zeros_like(a[:1]), a[:-1]])
    one = np.zeros_like(g)
    one[0] = 1
    out = np.empty((order + 1, len(zs), 2, 2), dtype=complex)
    out[..., 0, 0] = X[..., 0] @ E
    out[..., 1, 0] = (one - zs * g - lag(g)) / sys.alpha
    out[..., 0, 1] = (one - zs * h - lag(h)) / sys.beta
    out[..., 1, 1] = (zs * q + lag(q)) / (sys.alpha * sys.beta)
    return out


def _entries(sys: PickSystem, zs: np.ndarray, check: bool = True) -> np.ndarray:
    """``S(z)`` for a 1-D array of points, shape ``(K, 2, 2)``."""
    return entry_jets(sys, zs, 0, check=check)[0]


class ResolventSolution:
    """The solution for one parameter, evaluated through linear solves.

    Mathematically the same function as :func:`solve` returns, but its
    values and Taylor jets come from :func:`entry_jets` instead of a
    polynomial quotient, which keeps them accurate at and around the nodes.
    """

    def __init__(self, sys: PickSystem, param):
        _require_nonsingular(sys)
        self.sys = sys
        self.param = param
        self.function = param.function if isinstance(param, SchurParameter) else param

    def taylor_many(self, z0, order: int) -> np.ndarray:
        """Taylor coefficients at every point of ``z0``, shape ``(order + 1,) + z0.shape``."""
        z0 = np.asarray(z0, dtype=complex)
        S = entry_jets(self.sys, z0.ravel(), order)
        e = taylor_many(self.function, z0.ravel(), order)
        s0, s2, s1, s = S[..., 0, 0], S[..., 0, 1], S[..., 1, 0], S[..., 1, 1]
        one = np.zeros_like(e)
        one[0] = 1
        w = s0 + _series_divide(_series_mul(_series_mul(s2, e), s1), one - _series_mul(e, s))
        return w.reshape((order + 1,) + z0.shape)

    def __call__(self, z):
        return self.taylor_many(z, 0)[0]


def pole_moduli(sys: PickSystem) -> np.ndarray:
    """Sorted moduli of the zeros of ``det(Ptilde - z P T)``.

    These are the candidate poles of ``S``; all lie outside the closed disk
    for a nonsingular admissible problem.
    """
    _require_nonsingular(sys)
    return np.sort(np.abs(np.linalg.eigvals(np.linalg.solve(sys.P @ sys.T, sys.Ptilde))))


def coefficient_matrix_at(sys: PickSystem, z: complex) -> np.ndarray:
    """The 2x2 matrix ``[[s0, s2], [s1, s]]`` at one point, by linear solves.

    Raises
    ------
    SingularPick
        ``P`` is singular.
    ResolventSingular
        ``Ptilde - z P T`` is numerically singular at ``z``.
    """
    return _entries(sys, np.array([z]))[0]


def _reconstruct(sys: PickSystem, radius: float) -> CoefficientMatrix:
    K = max(2 * (sys.N + 1), 16)
    zs = circle_points(K, radius, 0.5)
    S = _entries(sys, zs)
    PT, Pt = _resolvent_parts(sys)[:2]
    det = det_extended(Pt[None] - zs.astype(np.clongdouble)[:, None, None] * PT[None]).astype(complex)
    # Samples sit at half-step angles; undo the rotation after the transform.
    rot = np.exp(-1j * np.pi * np.arange(K) / K)
    keep = sys.N + 1

    def fit(vals):
        return _clean((interpolate_on_circle(vals, radius) * rot)[:keep])

    den = fit(det)
    s0, s1, s2, s = (RationalFunction(fit(S[:, a, b] * det), den) for a, b in ((0, 0), (1, 0), (0, 1), (1, 1)))
    det_num = fit(np.linalg.det(S) * det)
    return CoefficientMatrix(s0, s1, s2, s, den, sys.points, det_num)


def _clean(c: np.ndarray) -> Polynomial:
    return Polynomial(clean_coeffs(c, COEFF_TRIM))


def _validate(S: CoefficientMatrix, sys: PickSystem, zs: np.ndarray) -> float:
    try:
        ref = _entries(sys, zs)
        got = S(zs)
    except (ResolventSingular, InterpolationError) as exc:
        raise ReconstructionMismatch(f"validation failed: {exc}") from exc
    return float((np.abs(got - ref) / np.maximum(1.0, np.abs(ref))).max())


def coefficient_matrix_rational(sys: PickSystem, validation_points: Optional[Sequence[complex]] = None) -> CoefficientMatrix:
    """Reconstruct the four entries as rational functions over ``det(Ptilde - z P T)``.

    Entries times the determinant are polynomials of degree at most ``N``.
    They are sampled at ``max(2N + 2, 16)`` points on the unit circle, where
    the monomial basis is best conditioned for later work at the nodes, and
    the circles of radius 1/2 and 1/4 serve as fallbacks.  The result is
    checked against direct solves at 32 fresh points.

    Raises
    ------
    ReconstructionMismatch
        Every radius fails validation to ``1e-9``.
    """
    _require_nonsingular(sys)
    zs = circle_points(32, 0.7, 0.25) if validation_points is None else np.asarray(validation_points, dtype=complex)
    err = np.nan
    for radius in SAMPLE_RADII:
        try:
            S = _reconstruct(sys, radius)
        except ResolventSingular:
            continue
        err = _validate(S, sys, zs)
        if err <= VALIDATION_RTOL:
            return S
    raise ReconstructionMismatch(f"rational reconstruction off by {err:.3e}")


def singular_solution(sys: PickSystem) -> RationalFunction:
    """The unique solution ``E (Ptilde - z P T)^{-1} M^*`` of a singular problem.

    The inverse is taken on the range of ``Ptilde``.  The result is a finite
    Blaschke product of degree at most ``rank P``; equality is typical, but
    data such as a zero bound at one node force a constant solution.

    Raises
    ------
    RangeViolation
        ``M^*`` or the restricted solve leaves the range of ``Ptilde``.
    """
    Pt, PT, E, Mh = sys.Ptilde, sys.P @ sys.T, sys.E, sys.M.conj().T
    lam, U = np.linalg.eigh((Pt + Pt.conj().T) / 2)
    scale = max(1.0, float(np.abs(lam).max()))
    Ur = U[:, lam > sys.tol_rank * scale]
    r = Ur.shape[1]
    tol = RANGE_RTOL * scale
    if np.linalg.norm(Mh - Ur @ (Ur.conj().T @ Mh)) > tol:
        raise RangeViolation("M^* is not in the range of Ptilde")

    K = r + 1
    zs = circle_points(K, 0.5)
    Ar = Ur.conj().T @ (Pt[None] - zs[:, None, None] * PT[None]) @ Ur
    y = np.linalg.solve(Ar, np.broadcast_to(Ur.conj().T @ Mh, (K, r, 1)))
    x = Ur[None] @ y
    resid = np.linalg.norm((Pt[None] - zs[:, None, None] * PT[None]) @ x - Mh[None], axis=(1, 2)).max()
    if resid > tol * (1 + np.abs(x).max()):
        raise RangeViolation(f"restricted solve residual {resid:.3e}")
    vals = (E[None] @ x)[:, 0, 0]
    det = np.linalg.det(Ar) if r else np.ones(K)
    num = Polynomial(clean_coeffs(interpolate_on_circle(vals * det, 0.5), 1e-10))
    den = Polynomial(clean_coeffs(interpolate_on_circle(det, 0.5), 1e-10))
    num, den = cancel_common_roots(num, den)
    lead = den.coeffs[np.argmax(np.abs(den.coeffs))]
    w = RationalFunction(Polynomial(num.coeffs / lead), Polynomial(den.coeffs / lead))
    _check_blaschke(w, sys.rank)
    return w


def _check_blaschke(w: RationalFunction, degree: int):
    t = circle_points(256, 1.0, 0.5)
    dev = np.abs(np.abs(w(t)) - 1).max()
    if dev > 1e-7:
        raise RangeViolation(f"unique solution is not unimodular on the circle (deviation {dev:.3e})")
    deg = int(max(0, w.num.degree, w.den.degree))
    if deg > degree:
        raise RangeViolation(f"unique solution has degree {deg} > rank P = {degree}")


class SchurParameter:
    """A validated Schur-class free parameter.

    Build with :meth:`constant`, :meth:`blaschke_product`, :meth:`rational`
    or :meth:`parse`.

    Attributes
    ----------
    kind : {"constant", "blaschke", "rational"}
    payload : complex, tuple or RationalFunction
    function : RationalFunction
    """

    __slots__ = ("kind", "payload", "function")

    def __init__(self, kind: str, payload, function: RationalFunction):
        self.kind = kind
        self.payload = payload
        self.function = function

    def __repr__(self):
        return f"SchurParameter(kind={self.kind!r}, payload={self.payload!r})"

    @classmethod
    def constant(cls, value: complex) -> "SchurParameter":
        value = complex(value)
        if abs(value) > 1 + 1e-12:
            raise NotSchurClass(f"constant parameter has modulus {abs(value)!r} > 1")
        return cls("constant", value, RationalFunction.constant(value))

    @classmethod
    def blaschke_product(cls, zeros: Sequence[complex], phase: complex = 1.0) -> "SchurParameter":
        zeros = tuple(complex(a) for a in zeros)
        return cls("blaschke", (zeros, complex(phase)), blaschke(zeros, phase))

    @classmethod
    def rational(cls, f: RationalFunction) -> "SchurParameter":
        check_schur(f)
        return cls("rational", f, f)

    @classmethod
    def parse(cls, text: str) -> "SchurParameter":
        """Parse ``const:<re>,<im>``, ``blaschke:<re>,<im>;...@<phase>`` or ``file:<path>``.

        The Blaschke phase is either a real angle in radians or ``<re>,<im>``;
        it defaults to 1.

        >>> SchurParameter.parse("const:0.3,0.4").payload
        (0.3+0.4j)
        """
        kind, sep, body = text.partition(":")
        if not sep:
            raise InterpolationError(f"bad parameter string {text!r}")
        try:
            if kind == "const":
                return cls.constant(_parse_complex(body))
            if kind == "blaschke":
                zs, _, ph = body.partition("@")
                zeros = [_parse_complex(x) for x in zs.split(";") if x.strip()]
                if not ph.strip():
                    phase = 1.0
                elif "," in ph:
                    phase = _parse_complex(ph)
                else:
                    phase = np.exp(1j * float(ph))
                return cls.blaschke_product(zeros, phase)
            if kind == "file":
                with open(body, encoding="utf-8") as fh:
                    obj = json.load(fh)
                return cls.rational(rational_from_json(obj))
        except (ValueError, KeyError, TypeError) as exc:
            if isinstance(exc, InterpolationError):
                raise
            raise InterpolationError(f"bad parameter string {text!r}: {exc}") from exc
        raise InterpolationError(f"unknown parameter kind {kind!r}")


def _parse_complex(s: str) -> complex:
    parts = [p.strip() for p in s.split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]))
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot read a complex number from {s!r}")


def check_schur(f: RationalFunction, circle: int = 256, interior: int = 64) -> None:
    """Raise :class:`NotSchurClass` unless ``f`` is analytic on the closed disk and ``|f| <= 1``."""
    roots = f.den.roots()
    if roots.size and np.abs(roots).min() <= 1 + POLE_MARGIN:
        raise NotSchurClass("denominator has a root in the closed unit disk")
    rng = np.random.default_rng(0)
    inner = np.sqrt(rng.random(interior)) * np.exp(2j * np.pi * rng.random(interior))
    pts = np.concatenate([circle_points(circle), inner])
    sup = float(np.abs(f(pts)).max())
    if sup > 1 + SCHUR_TOL:
        raise NotSchurClass(f"sup |f| = {sup!r} exceeds 1")


def _check_interior(w: RationalFunction):
    pts = np.concatenate([circle_points(64, r, 0.25) for r in (0.0, 0.5, 0.9, 0.99)])
    sup = float(np.abs(w(pts)).max())
    if sup > 1 + SCHUR_TOL:
        raise NotSchurClass(f"solution exceeds 1 in the disk (sup {sup!r})")


def _lft_parts(sys: PickSystem, E: RationalFunction, z: complex):
    """Values and derivatives at ``z`` of ``b s0 - a det S`` and ``b - a s`` for ``E = a / b``."""
    S0, S2, S1, S = (entry_jets(sys, [z], 1)[:, 0, i, j] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
    a = E.num.taylor_shift(z, 1) if not E.num.is_zero() else np.zeros(2, complex)
    b = E.den.taylor_shift(z, 1)
    det = S0[0] * S[0] - S1[0] * S2[0]
    ddet = S0[1] * S[0] + S0[0] * S[1] - S1[1] * S2[0] - S1[0] * S2[1]
    num = (b[0] * S0[0] - a[0] * det, b[1] * S0[0] + b[0] * S0[1] - a[1] * det - a[0] * ddet)
    den = (b[0] - a[0] * S[0], b[1] - a[1] * S[0] - a[0] * S[1])
    return num, den


def _newton(f, r: complex, steps: int = 20) -> complex:
    for _ in range(steps):
        v, dv = f(r)
        if dv == 0:
            break
        step = v / dv
        r = r - step
        if abs(step) <= 4e-16 * abs(r):
            break
    return r


def _close_pairs(sys: PickSystem, E: RationalFunction, num: Polynomial, den: Polynomial):
    """Nearly cancelling zero/pole pairs of the solution, polished against pointwise values.

    Fitted coefficients pin down the tiny gap between such a zero and pole
    only to a few digits, yet that gap sets the pair's contribution to the
    derivatives at a nearby node, so both roots are refined against the
    resolvent form.
    """
    if num.degree < 1 or den.degree < 1:
        return []
    rn_all = num.roots()
    pairs = []
    for rd in den.roots():
        k = int(np.argmin(np.abs(rn_all - rd)))
        rn = rn_all[k]
        if abs(rn - rd) > PAIR_TOL:
            continue
        rd = _newton(lambda z: _lft_parts(sys, E, z)[1], rd)
        rn = _newton(lambda z: _lft_parts(sys, E, z)[0], rn)
        pairs.append((rn, rd))
    return pairs


def _sampled_solution(sys: PickSystem, E: RationalFunction) -> RationalFunction:
    """``s0 + s2 E s1 / (1 - E s)`` rebuilt from accurate samples on the circle.

    Numerator and denominator are ``D (b s0 - a det S)`` and
    ``D (b - a s)`` for ``E = a / b`` and ``D = det(Ptilde - z P T)``; the
    common factor ``D`` of the naive quotient never appears.
    """
    deg = sys.N + int(max(E.num.degree, E.den.degree, 0))
    K = max(4 * (deg + 1), 256)
    zs = circle_points(K, 1.0, 0.5)
    rot = np.exp(-1j * np.pi * np.arange(K) / K)
    Sz = _entries(sys, zs, check=False)
    PT, Pt = _resolvent_parts(sys)[:2]
    D = det_extended(Pt[None] - zs.astype(np.clongdouble)[:, None, None] * PT[None]).astype(complex)
    a, b = E.num(zs), E.den(zs)
    core = b - a * Sz[:, 1, 1]
    if np.abs(core).max() <= 1e-13 * max(np.abs(b).max(), np.abs(a).max()):
        raise DegenerateDenominator("1 - E s vanishes identically")
    num_v = D * (b * Sz[:, 0, 0] - a * np.linalg.det(Sz))
    den_v = D * core

    def fit(vals, keep):
        return _clean((interpolate_on_circle(vals, 1.0) * rot)[:keep])

    num, den = fit(num_v, deg + 1), fit(den_v, deg + 1)
    pairs = _close_pairs(sys, E, num, den)
    if pairs:
        rn, rd = np.array(pairs).T
        keep = deg + 1 - len(pairs)
        num = fit(num_v / np.prod(zs[:, None] - rn, axis=1), keep) * Polynomial.from_roots(rn)
        den = fit(den_v / np.prod(zs[:, None] - rd, axis=1), keep) * Polynomial.from_roots(rd)
    w = RationalFunction(num, den)
    for t in sys.points:
        w = cancel_root(w, t)
    return w


def solve(sys: PickSystem, param: Optional[SchurParameter] = None, S: Optional[CoefficientMatrix] = None) -> RationalFunction:
    """The solution attached to ``param``.

    A singular problem has exactly one solution; ``param`` is then ignored
    with a :class:`UniqueSolutionWarning`.  By default the solution is
    rebuilt from samples on the circle; passing ``S`` instead applies the
    linear fractional map to its rational entries symbolically.
    """
    if sys.singular:
        if param is not None:
            warnings.warn("P is singular, so the solution is unique and the parameter is ignored", UniqueSolutionWarning, stacklevel=2)
        return singular_solution(sys)
    if param is None:
        raise InterpolationError("a Schur parameter is required when P is nonsingular")
    w = _sampled_solution(sys, param.function) if S is None else lft_apply(S, param.function)
    _check_interior(w)
    return w
