"""Schwarz-Pick matrices, boundary limits, the D-functional and interpolation gaps.

The kernel ``K(z, zeta) = (1 - w(z) conj(w(zeta))) / (1 - z conj(zeta))`` is
differentiated in closed form.  Writing ``u`` for ``conj(zeta)`` and ``w#``
for the function with conjugated coefficients, the normalized derivative
with ``l`` derivatives in ``z`` and ``r`` in ``u`` is

    G[l, r] - sum_{a <= l, b <= r} w_{l-a}(z) G[a, b] w#_{r-b}(u)

where ``G[a, b] = sum_s (a+b-s)! / ((a-s)! (b-s)! s!) z^(b-s) u^(a-s) / (1-zu)^(a+b-s+1)``
are the normalized derivatives of ``1 / (1 - zu)``.

Boundary limits at ``t0`` are taken along the radius.  The profile
``eps -> d((1-eps) t0, (1-eps) conj(t0))`` is meromorphic near ``eps = 0``,
so its regular part is read off as the mean over a small circle of ``eps``
values and its singular part from the low negative Laurent coefficients.
This avoids evaluating the (cancellation-prone) kernel at tiny ``eps``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import InterpolationError
from .parametrize import ResolventSolution, solve
from .pickdata import (
    InterpolationNode,
    PickSystem,
    ProblemData,
    _unit,
    hankel_block,
    psi_matrix,
    toeplitz_lower,
)
from .ratfun import RationalFunction, lft_apply, rat_eval, rat_taylor, taylor_many

__all__ = [
    "RadialSchedule",
    "LimitEstimate",
    "interior_sp_matrix",
    "d_lower",
    "boundary_sp_matrix_jet",
    "boundary_limit_d",
    "boundary_limit_matrix",
    "generalized_boundary_sp",
    "dval",
    "gap",
    "classify_equality",
    "MAX_ORDER",
]

MAX_ORDER = 12
MATCH_TOL = 1e-9


def _check_order(n: int) -> int:
    n = int(n)
    if not 0 <= n <= MAX_ORDER:
        raise InterpolationError(f"order {n} outside 0..{MAX_ORDER}")
    return n


def _coef(a: int, b: int, s: int) -> float:
    return math.factorial(a + b - s) / (math.factorial(a - s) * math.factorial(b - s) * math.factorial(s))


def _kernel_g(z, u, nl: int, nr: int, absolute: bool = False) -> np.ndarray:
    """Normalized derivatives of ``1 / (1 - zu)``: shape ``(nl+1, nr+1) + z.shape``.

    With ``absolute`` every term is replaced by its modulus, which sizes the
    rounding error of the sum.
    """
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    q = 1 - z * u
    if absolute:
        z, u, q = np.abs(z), np.abs(u), np.abs(q)
    G = np.zeros((nl + 1, nr + 1) + np.broadcast(z, u).shape, dtype=complex)
    for a in range(nl + 1):
        for b in range(nr + 1):
            acc = 0
            for s in range(min(a, b) + 1):
                acc = acc + _coef(a, b, s) * z ** (b - s) * u ** (a - s) / q ** (a + b - s + 1)
            G[a, b] = acc
    return G


def _lower_toeplitz(w: np.ndarray) -> np.ndarray:
    """``L[l, a] = w[l - a]`` for stacked coefficient arrays ``w`` of shape ``(m+1, ...)``."""
    m = w.shape[0]
    L = np.zeros((m, m) + w.shape[1:], dtype=complex)
    for k in range(m):
        for a in range(m - k):
            L[a + k, a] = w[k]
    return L


def _sp_block(wz: np.ndarray, wu: np.ndarray, z, u, absolute: bool = False) -> np.ndarray:
    """Mixed kernel derivatives from jets ``wz`` (at ``z``) and ``wu`` (of ``w#`` at ``u``).

    With ``absolute`` the result is the sum of the moduli of all terms instead.
    """
    nl, nr = wz.shape[0] - 1, wu.shape[0] - 1
    G = _kernel_g(z, u, nl, nr, absolute)
    if absolute:
        wz, wu = np.abs(wz), np.abs(wu)
    Lz, Lu = _lower_toeplitz(wz), _lower_toeplitz(wu)
    prod = np.einsum("la...,ab...,rb...->lr...", Lz, G, Lu)
    return G + prod if absolute else G - prod


def interior_sp_matrix(w: RationalFunction, z: complex, n: int) -> np.ndarray:
    """Schwarz-Pick matrix of ``w`` at an interior point.

    Entry ``[l, r]`` is the normalized mixed derivative with ``l``
    derivatives in ``z`` and ``r`` in ``conj(zeta)``, at ``zeta = z``.

    >>> interior_sp_matrix(RationalFunction([0, 0, 1]), 0, 1).real
    array([[1., 0.],
           [0., 1.]])
    """
    n = _check_order(n)
    z = complex(z)
    if not abs(z) < 1:
        raise InterpolationError(f"z = {z!r} is not in the open disk")
    wz = np.asarray(rat_taylor(w, z, n))
    return _sp_block(wz, wz.conj(), z, z.conjugate())


def d_lower(w: RationalFunction, z: complex, n: int) -> float:
    """Bottom-right entry of :func:`interior_sp_matrix`, which is real."""
    val = interior_sp_matrix(w, z, n)[n, n]
    if abs(val.imag) > 1e-10 * (1 + abs(val.real)):
        raise ArithmeticError(f"lower entry has imaginary part {val.imag:.3e}")
    return float(val.real)


def boundary_sp_matrix_jet(jet: Sequence[complex], t0: complex, n: int) -> np.ndarray:
    """Hankel ``[c_{r+s+1}]`` times ``psi_matrix(t0, n)`` times the upper Toeplitz matrix of ``conj(c)``.

    >>> boundary_sp_matrix_jet([1, 2, 1, 0], 1, 1).real
    array([[2., 1.],
           [1., 1.]])
    """
    n = _check_order(n)
    c = np.asarray(jet, dtype=complex)
    if len(c) < 2 * n + 2:
        raise InterpolationError(f"need {2 * n + 2} jet values, got {len(c)}")
    if abs(abs(c[0]) - 1) > 1e-9:
        raise InterpolationError("|c_0| must be 1")
    return hankel_block(c, n) @ psi_matrix(t0, n) @ toeplitz_lower(c, n).conj().T


@dataclass(frozen=True)
class RadialSchedule:
    """Radii ``eps`` at which the boundary profile is sampled.

    Attributes
    ----------
    epsilons : tuple of float
        Strictly decreasing values in ``(0, 1)``; default quarter-decades
        from ``1e-1`` to ``1e-8``.
    rtol : float
        Consecutive estimates closer than ``rtol * (1 + |value|)`` converge.
    cap : float
        Three consecutive increasing radial values above ``cap`` mean divergence.
    ring : int
        Samples per circle of ``eps`` values.
    sing_tol : float
        Negative Laurent coefficients above ``sing_tol * (1 + |value|)``
        mean divergence.
    alias_tol : float
        A ring is discarded when Laurent coefficients beyond the order the
        kernel can produce exceed ``alias_tol`` times the largest sample;
        such a ring encloses, or passes close to, a pole of ``w``.
    noise_rtol : float
        Rounding error of a ring, relative to the typical size of the terms
        it sums.  Small rings sum large cancelling terms; coefficients below
        this noise are not a pole, and once the noise exceeds a tenth of the
        convergence tolerance the remaining, smaller rings are skipped.
    atol : float
        A finite estimate counts as converged only if its error bound is
        below ``atol * (1 + |value|)``.
    """

    epsilons: tuple = tuple(10.0 ** (-k / 4) for k in range(4, 33))
    rtol: float = 1e-6
    cap: float = 1e12
    ring: int = 32
    sing_tol: float = 1e-7
    alias_tol: float = 1e-10
    noise_rtol: float = 1e-15
    atol: float = 1e-10

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps or any(not 0 < e < 1 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilons must be strictly decreasing in (0, 1)")
        object.__setattr__(self, "epsilons", eps)

    @classmethod
    def geometric(cls, steps: int, first: float = 1e-1, last: float = 1e-8, **kw) -> "RadialSchedule":
        """``steps`` log-spaced radii from ``first`` down to ``last``."""
        if steps < 2:
            raise ValueError("need at least two radial steps")
        return cls(tuple(np.geomspace(first, last, steps)), **kw)


@dataclass
class LimitEstimate:
    """Outcome of a radial limit.

    ``value`` is ``math.inf`` for a divergence verdict; ``converged`` is
    true for both finite convergence and divergence.  ``error`` bounds the
    error of a finite value: the larger of the rounding noise and the
    Laurent coefficients that should vanish on the chosen ring.
    """

    value: Union[float, complex]
    converged: bool
    trace: list = field(default_factory=list)
    error: float = math.nan

    @property
    def diverged(self) -> bool:
        return self.value == math.inf

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "error": self.error,
            "trace": [[e, v] for e, v in self.trace],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["eps", "re", "im"])
        for e, v in self.trace:
            v = complex(v)
            wr.writerow([repr(float(e)), repr(v.real), repr(v.imag)])
        return buf.getvalue()


def _jets(w, z, n: int) -> np.ndarray:
    """Taylor coefficients of ``w`` at the points ``z``; ``w`` is rational or provides ``taylor_many``."""
    if isinstance(w, RationalFunction):
        return taylor_many(w, z, n)
    return w.taylor_many(z, n)


def _profile(w, t0: complex, n: int, eps: np.ndarray, full: bool = False, magnitude: bool = False):
    z = (1 - eps) * t0
    u = (1 - eps) * t0.conjugate()
    wz = _jets(w, z, n)
    wu = np.conj(_jets(w, np.conj(u), n))
    M = _sp_block(wz, wu, z, u)
    out = M if full else M[n, n]
    if magnitude:
        return out, _sp_block(wz, wu, z, u, absolute=True)[n, n].real
    return out


def _real_if_close(c: complex):
    c = complex(c)
    return c.real if abs(c.imag) <= 1e-8 * (1 + abs(c)) else c


def boundary_limit_d(w, t0: complex, n: int, sched: Optional[RadialSchedule] = None, poles=None) -> LimitEstimate:
    """Radial limit of the lower Schwarz-Pick entry at a boundary point.

    Parameters
    ----------
    w : RationalFunction or evaluator with ``taylor_many``
    t0 : complex
        Point of the unit circle.
    n : int
        Order of the entry.
    sched : RadialSchedule, optional
    poles : array_like, optional
        Poles of ``w``; defaults to the denominator roots of a rational
        ``w``.  Rings reaching past half the distance to the nearest pole are
        skipped: a pole with a tiny residue hides from the Laurent checks
        yet still moves the limit.

    >>> est = boundary_limit_d(RationalFunction([0.5, 0.5]), 1, 0)
    >>> est.converged, round(est.value, 12)
    (True, 0.5)
    """
    n = _check_order(n)
    t0 = _unit(t0, "t0")
    sched = sched or RadialSchedule()
    K = max(sched.ring, 4 * n + 8)
    unit = np.exp(2j * np.pi * np.arange(K) / K)
    # Laurent orders a foreign singularity would populate
    foreign = unit[None, :] ** np.arange(2 * n + 2, K // 2)[:, None]
    if poles is None and isinstance(w, RationalFunction) and w.den.degree > 0:
        poles = w.den.roots()
    reach = 0.5 * float(np.abs(np.asarray(poles) - t0).min()) if poles is not None and len(poles) else math.inf
    trace, radial = [], []
    prev = None
    for rho in sched.epsilons:
        if rho > reach:
            continue
        eps = rho * unit
        try:
            v, mag = _profile(w, t0, n, eps, magnitude=True)
        except ZeroDivisionError:
            continue
        if not np.all(np.isfinite(v)):
            continue
        noise = sched.noise_rtol * float(np.median(mag))
        if noise > 0.1 * sched.rtol * (1 + abs(v.mean())):
            break
        resid = float(np.abs(foreign @ v).max()) / K
        if resid > max(sched.alias_tol * np.abs(v).max(), noise):
            prev = None
            continue
        c0 = complex(v.mean())
        err = max(resid, noise)
        sing = max(abs((v * eps**m).mean()) for m in range(1, 2 * n + 2))
        trace.append((rho, _real_if_close(c0)))
        radial.append(float(v[0].real))
        if len(radial) >= 3 and radial[-3] > sched.cap and radial[-3] < radial[-2] < radial[-1]:
            return LimitEstimate(math.inf, True, trace, 0.0)
        if prev is not None and abs(c0 - prev[0]) <= sched.rtol * (1 + abs(c0)):
            if sing > sched.sing_tol * (1 + abs(c0)):
                return LimitEstimate(math.inf, True, trace, 0.0)
            # both rings are exact up to rounding and aliasing; keep the cleaner one
            best = min(prev, (c0, err), key=lambda ce: ce[1])
            if best[1] <= sched.atol * (1 + abs(best[0])):
                return LimitEstimate(_real_if_close(best[0]), True, trace, best[1])
        prev = (c0, err)
    if prev is not None:
        return LimitEstimate(_real_if_close(prev[0]), False, trace, prev[1])
    value = trace[-1][1] if trace else math.nan
    return LimitEstimate(value, False, trace)


def boundary_limit_matrix(w, t0: complex, n: int, rho: float = 0.05, ring: int = 32) -> np.ndarray:
    """Regular part at ``eps = 0`` of the full radial Schwarz-Pick profile."""
    n = _check_order(n)
    t0 = _unit(t0, "t0")
    eps = rho * np.exp(2j * np.pi * np.arange(max(ring, 2 * n + 3)) / max(ring, 2 * n + 3))
    return _profile(w, t0, n, eps, full=True).mean(axis=-1)


def generalized_boundary_sp(nodes: Union[ProblemData, Sequence[InterpolationNode]]) -> np.ndarray:
    """Block matrix of boundary kernel derivatives built from jets alone.

    Diagonal blocks are :func:`boundary_sp_matrix_jet`; an off-diagonal block
    differentiates the kernel at the pair ``(t_i, t_j)`` directly, which is
    legitimate because ``1 - t_i conj(t_j)`` does not vanish.
    """
    nodes = tuple(nodes.nodes if isinstance(nodes, ProblemData) else nodes)
    sizes = [nd.n + 1 for nd in nodes]
    off = np.cumsum([0] + sizes)
    out = np.zeros((off[-1], off[-1]), dtype=complex)
    for i, a in enumerate(nodes):
        for j, b in enumerate(nodes):
            if i == j:
                blk = boundary_sp_matrix_jet(a.c, a.t, a.n)
            else:
                if abs(a.t - b.t) <= 1e-9:
                    raise InterpolationError(f"nodes {i} and {j} coincide")
                wz = np.asarray(a.c[: a.n + 1], dtype=complex)
                wu = np.conj(np.asarray(b.c[: b.n + 1], dtype=complex))
                blk = _sp_block(wz, wu, a.t, b.t.conjugate())
            out[off[i] : off[i + 1], off[j] : off[j + 1]] = blk
    return out


def dval(omega: RationalFunction, t0: complex, b: complex) -> float:
    """D-functional of ``omega`` at ``t0`` relative to the value ``b``.

    Finite exactly when ``omega(t0) = b`` with ``|b| = 1``; then it equals
    ``t0 omega'(t0) conj(b)``, and it is zero exactly when ``omega`` is the
    constant ``b``.  Otherwise ``inf``.

    >>> dval(RationalFunction([0, 1]), 1, 1)
    1.0
    """
    t0 = _unit(t0, "t0")
    b = complex(b)
    if abs(b) > 1 + 1e-12:
        raise InterpolationError(f"|b| = {abs(b)!r} exceeds 1")
    jet = rat_taylor(omega, t0, 1)
    if abs(jet[0] - b) > MATCH_TOL or abs(abs(b) - 1) > MATCH_TOL:
        return math.inf
    val = t0 * jet[1] * b.conjugate()
    if abs(val.imag) > 1e-8 * (1 + abs(val)):
        raise ArithmeticError(f"D-value has imaginary part {val.imag:.3e}")
    return max(0.0, float(val.real))


def _resolve_param_function(param) -> RationalFunction:
    return param.function if hasattr(param, "function") else param


def _corner_at_node(S, i: int):
    """``(t_i, s(t_i))`` with ``s(t_i)`` rescaled onto the circle; it is unimodular up to rounding."""
    t = S.points[i]
    s_t = rat_eval(S.s, t)
    if abs(abs(s_t) - 1) > MATCH_TOL:
        raise ArithmeticError(f"|s(t_{i})| = {abs(s_t)!r} is not 1")
    return t, s_t / abs(s_t)


def gap_formula(S, param, i: int, n: int) -> float:
    """Closed-form gap at node ``i`` of order ``n`` from the coefficient matrix."""
    t, s_t = _corner_at_node(S, i)
    E = _resolve_param_function(param)
    d_e = dval(E, t, s_t.conjugate())
    d_s = dval(S.s, t, s_t)
    if math.isinf(d_e) or math.isinf(d_s):
        return 0.0
    a = rat_taylor(S.s2, t, n + 1)[n + 1]
    denom = d_e + d_s
    return math.inf if denom <= 0 else abs(a) ** 2 / denom


def gap(sys: PickSystem, S, param, i: int, sched: Optional[RadialSchedule] = None):
    """Gap ``gamma_i - d_{w, n_i}(t_i)`` for the solution with parameter ``param``.

    Returns
    -------
    direct : LimitEstimate
        ``gamma_i`` minus the radial limit for ``w = solve(sys, param)``.
    formula : float
        The closed form from ``S``.
    """
    node = sys.data.nodes[i]
    # the resolvent form stays accurate next to the poles of S that crowd the nodes
    if sys.singular:
        w, poles = solve(sys, param, S=S), None
    else:
        w = ResolventSolution(sys, param)
        poles = lft_apply(S, _resolve_param_function(param)).den.roots()
    est = boundary_limit_d(w, node.t, node.n, sched, poles=poles)
    direct = LimitEstimate(
        -math.inf if est.diverged else node.gamma - est.value,
        est.converged,
        [(e, node.gamma - v) for e, v in est.trace],
        est.error,
    )
    return direct, gap_formula(S, param, i, node.n)


def classify_equality(param, S, i: int) -> bool:
    """Whether the solution for ``param`` meets the bound with equality at node ``i``."""
    t, s_t = _corner_at_node(S, i)
    return math.isinf(dval(_resolve_param_function(param), t, s_t.conjugate()))
