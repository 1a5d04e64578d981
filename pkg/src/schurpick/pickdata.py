"""Interpolation data and the structured matrices built from it.

A node carries a point ``t`` on the unit circle, a jet order ``n``, the jet
``c_0..c_{2n+1}`` and the bound ``gamma``.  Either of ``gamma`` and
``c_{2n+1}`` determines the other, so a node may be given with one missing.

All blocks below are indexed from zero.  For a node of order ``n``:

* ``psi_matrix(t, n)[j, l] = (-1)^l C(l, j) t^(l+j+1)`` for ``j <= l``;
* ``W`` is the lower triangular Toeplitz matrix of ``c_0..c_n``;
* the diagonal block of ``H`` is the Hankel matrix ``[c_{r+s+1}]``;
* ``T`` has ``conj(t)`` on the diagonal and ones on the superdiagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from os import PathLike
from typing import Optional, Sequence

import numpy as np

from ._linalg import refined_solve, TOL_RANK, eig_summary, hermitian_part
from .exceptions import (
    DuplicateNodes,
    InconsistentJet,
    InterpolationError,
    NonHermitianDiagonalBlock,
    NonRealGamma,
    NotUnimodularAtNode,
    PoleAtNode,
    PoleAtPoint,
)
from .ratfun import RationalFunction, rat_taylor

__all__ = [
    "InterpolationNode",
    "ProblemData",
    "PickSystem",
    "psi_matrix",
    "toeplitz_lower",
    "hankel_block",
    "cross_block",
    "t_block",
    "e_row",
    "m_row",
    "build_pick_system",
    "gamma_from_jet",
    "c_top_from_gamma",
    "extract_jet",
]

UNIMODULAR_TOL = 1e-9
DISTINCT_TOL = 1e-9
GAMMA_IMAG_RTOL = 1e-10
CONSISTENCY_RTOL = 1e-9
HERMITIAN_RTOL = 1e-10


def _unit(t, what: str = "t") -> complex:
    t = complex(t)
    if abs(abs(t) - 1) > UNIMODULAR_TOL:
        raise InterpolationError(f"{what} = {t!r} is not on the unit circle")
    return t / abs(t)


def _unit_as(t, dtype) -> complex:
    """``t / |t|`` rounded once in ``dtype``, so extended assemblies see an exactly unimodular node."""
    t = _unit(t)
    if dtype is complex:
        return t
    t = dtype(t)
    return t / np.abs(t)


def psi_matrix(t0: complex, n: int, dtype=complex) -> np.ndarray:
    """Upper triangular ``(n+1) x (n+1)`` matrix of signed binomials times powers of ``t0``.

    >>> psi_matrix(1, 1).real
    array([[ 1., -1.],
           [ 0., -1.]])
    """
    t0 = _unit_as(t0, dtype)
    out = np.zeros((n + 1, n + 1), dtype=dtype)
    for j in range(n + 1):
        for l in range(j, n + 1):
            out[j, l] = (-1) ** l * comb(l, j) * t0 ** (l + j + 1)
    return out


def toeplitz_lower(c: Sequence[complex], n: int, dtype=complex) -> np.ndarray:
    """``W[a, b] = c_{a-b}`` for ``a >= b``."""
    c = np.asarray(c, dtype=dtype)
    W = np.zeros((n + 1, n + 1), dtype=dtype)
    for k in range(n + 1):
        W += np.diag(np.full(n + 1 - k, c[k]), -k)
    return W


def hankel_block(c: Sequence[complex], n: int, dtype=complex) -> np.ndarray:
    """``H[r, s] = c_{r+s+1}``; needs ``c_0..c_{2n+1}``."""
    c = np.asarray(c, dtype=dtype)
    idx = np.add.outer(np.arange(n + 1), np.arange(n + 1)) + 1
    return c[idx]


def cross_block(ti: complex, ni: int, ci, tj: complex, nj: int, cj, dtype=complex) -> np.ndarray:
    """Off-diagonal ``H_ij`` for two distinct nodes, built from ``c_0..c_n`` of each."""
    d = _unit_as(ti, dtype) - _unit_as(tj, dtype)
    ci, cj = np.asarray(ci, dtype=dtype), np.asarray(cj, dtype=dtype)
    H = np.zeros((ni + 1, nj + 1), dtype=dtype)
    for r in range(ni + 1):
        for s in range(nj + 1):
            acc = dtype(0)
            for l in range(r + 1):
                acc += (-1) ** (r - l) * comb(s + r - l, s) * ci[l] / d ** (s + r - l + 1)
            for l in range(s + 1):
                acc -= (-1) ** r * comb(s + r - l, r) * cj[l] / d ** (s + r - l + 1)
            H[r, s] = acc
    return H


def t_block(t: complex, n: int, dtype=complex) -> np.ndarray:
    """``conj(t) I + J`` with ``J`` the upper shift."""
    return np.conj(_unit_as(t, dtype)) * np.eye(n + 1, dtype=dtype) + np.eye(n + 1, k=1, dtype=dtype)


def e_row(n: int) -> np.ndarray:
    e = np.zeros((1, n + 1), dtype=complex)
    e[0, 0] = 1
    return e


def m_row(c: Sequence[complex], n: int) -> np.ndarray:
    return np.conj(np.asarray(c[: n + 1], dtype=complex)).reshape(1, n + 1)


def _gamma_terms(t: complex, n: int, c) -> list[complex]:
    psi = psi_matrix(t, n)
    terms = [c[n + l + 1] * psi[l, j] * np.conj(c[n - j]) for l in range(n) for j in range(n + 1)]
    return terms


def gamma_from_jet(t: complex, n: int, c: Sequence[complex]) -> float:
    """The bound ``gamma`` carried by the full jet ``c_0..c_{2n+1}``.

    Raises
    ------
    NonRealGamma
        If the imaginary part exceeds ``1e-10`` relative to the summed terms.
    """
    t = _unit(t)
    c = np.asarray(c, dtype=complex)
    if len(c) < 2 * n + 2:
        raise InterpolationError(f"need {2 * n + 2} jet values, got {len(c)}")
    terms = _gamma_terms(t, n, c)
    terms.append((-1) ** n * t ** (2 * n + 1) * c[2 * n + 1] * np.conj(c[0]))
    g = complex(sum(terms))
    scale = 1.0 + sum(abs(x) for x in terms)
    if abs(g.imag) > GAMMA_IMAG_RTOL * scale:
        raise NonRealGamma(f"gamma has imaginary part {g.imag:.3e}")
    return g.real


def c_top_from_gamma(t: complex, n: int, c: Sequence[complex], gamma: float) -> complex:
    """The top jet entry ``c_{2n+1}`` that makes ``gamma_from_jet`` return ``gamma``.

    Only ``c_0..c_{2n}`` are read.
    """
    t = _unit(t)
    c = np.asarray(c, dtype=complex)
    if len(c) < 2 * n + 1:
        raise InterpolationError(f"need {2 * n + 1} jet values, got {len(c)}")
    padded = np.concatenate([c[: 2 * n + 1], [0]])
    rest = sum(_gamma_terms(t, n, padded), 0j)
    return complex((-1) ** n * np.conj(t) ** (2 * n + 1) * (float(gamma) - rest) * c[0])


@dataclass(frozen=True)
class InterpolationNode:
    """One boundary node.

    Parameters
    ----------
    t : complex
        Point on the unit circle; renormalized when within ``1e-9`` of it.
    n : int
        Jet order.
    c : sequence of complex
        ``c_0..c_{2n}`` or the full jet ``c_0..c_{2n+1}``.
    gamma : float, optional
        Required when ``c`` has ``2n+1`` entries.

    After construction ``c`` always holds the full jet and ``gamma`` is set.
    """

    t: complex
    n: int
    c: tuple
    gamma: Optional[float] = None

    def __post_init__(self):
        t = _unit(self.t)
        n = int(self.n)
        if n < 0:
            raise InterpolationError("jet order must be nonnegative")
        c = [complex(x) for x in self.c]
        gamma = self.gamma
        if len(c) == 2 * n + 1:
            if gamma is None:
                raise InterpolationError("gamma is required when c has 2n+1 entries")
            c.append(c_top_from_gamma(t, n, c, gamma))
        elif len(c) == 2 * n + 2:
            if gamma is None:
                gamma = gamma_from_jet(t, n, c)
            else:
                top = c_top_from_gamma(t, n, c, gamma)
                if abs(top - c[-1]) > CONSISTENCY_RTOL * (1 + abs(c[-1])):
                    raise InconsistentJet(f"gamma = {gamma} disagrees with c_{2 * n + 1} = {c[-1]!r}")
        else:
            raise InterpolationError(f"node of order {n} needs {2 * n + 1} or {2 * n + 2} jet values, got {len(c)}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "c", tuple(c))
        object.__setattr__(self, "gamma", float(gamma))

    @property
    def size(self) -> int:
        return self.n + 1

    def inflated(self, delta: float) -> "InterpolationNode":
        """Same node with ``gamma`` raised by ``delta`` (and the top jet entry adjusted)."""
        return InterpolationNode(self.t, self.n, self.c[:-1], self.gamma + float(delta))

    def to_json(self) -> dict:
        return {
            "t": [self.t.real, self.t.imag],
            "n": self.n,
            "c": [[x.real, x.imag] for x in self.c],
            "gamma": self.gamma,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InterpolationNode":
        try:
            t = _complex_from_json(obj["t"])
            n = int(obj["n"])
            c = [_complex_from_json(x) for x in obj["c"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InterpolationError(f"malformed node {obj!r}: {exc}") from exc
        gamma = obj.get("gamma")
        return cls(t, n, tuple(c), None if gamma is None else float(gamma))


def _complex_from_json(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    re, im = x
    return complex(float(re), float(im))


@dataclass(frozen=True)
class ProblemData:
    """A list of interpolation nodes; ``N`` is the total block size."""

    nodes: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise InterpolationError("at least one node is required")

    @property
    def N(self) -> int:
        return sum(nd.size for nd in self.nodes)

    @property
    def offsets(self) -> np.ndarray:
        return np.cumsum([0] + [nd.size for nd in self.nodes])

    @property
    def points(self) -> tuple:
        return tuple(nd.t for nd in self.nodes)

    def min_distance(self) -> float:
        ts = np.array(self.points)
        if len(ts) < 2:
            return np.inf
        dist = np.abs(ts[:, None] - ts[None, :])
        return float(dist[~np.eye(len(ts), dtype=bool)].min())

    def to_json(self) -> dict:
        return {"nodes": [nd.to_json() for nd in self.nodes]}

    @classmethod
    def from_json(cls, obj: dict) -> "ProblemData":
        if not isinstance(obj, dict) or not isinstance(obj.get("nodes"), list):
            raise InterpolationError("problem JSON must be an object with a 'nodes' list")
        return cls(tuple(InterpolationNode.from_json(x) for x in obj["nodes"]))

    @classmethod
    def load(cls, path: str | PathLike) -> "ProblemData":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True, eq=False)
class PickSystem:
    """Matrices assembled from one :class:`ProblemData`.

    ``alpha`` and ``beta`` are ``None`` when ``P`` is singular.  ``P_ext``
    and ``T_ext`` are assembled in extended precision; downstream solves use
    them for residuals because jets of the solutions at the nodes are very
    sensitive to rounding in ``P`` and ``T``.
    """

    data: ProblemData
    P: np.ndarray
    T: np.ndarray
    E: np.ndarray
    M: np.ndarray
    Ptilde: np.ndarray
    rank: int
    singular: bool
    alpha: Optional[float] = None
    beta: Optional[float] = None
    tol_rank: float = field(default=TOL_RANK)
    P_ext: Optional[np.ndarray] = field(default=None, repr=False)
    T_ext: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.P.shape[0]

    @property
    def points(self) -> tuple:
        return self.data.points

    def block(self, i: int, j: int) -> np.ndarray:
        o = self.data.offsets
        return self.P[o[i] : o[i + 1], o[j] : o[j + 1]]


def pick_blocks(data: ProblemData, dtype=complex):
    """The raw matrices ``P, T, E, M`` (no validation beyond distinctness).

    ``dtype=np.clongdouble`` assembles them in extended precision.
    """
    if data.min_distance() <= DISTINCT_TOL:
        raise DuplicateNodes(f"nodes closer than {DISTINCT_TOL}")
    nodes, off, N = data.nodes, data.offsets, data.N
    P = np.zeros((N, N), dtype=dtype)
    T = np.zeros((N, N), dtype=dtype)
    E = np.zeros((1, N), dtype=dtype)
    M = np.zeros((1, N), dtype=dtype)
    right = [psi_matrix(nd.t, nd.n, dtype) @ toeplitz_lower(nd.c, nd.n, dtype).conj().T for nd in nodes]
    for i, a in enumerate(nodes):
        si = slice(off[i], off[i + 1])
        T[si, si] = t_block(a.t, a.n, dtype)
        E[:, si] = e_row(a.n)
        M[:, si] = m_row(a.c, a.n)
        for j, b in enumerate(nodes):
            sj = slice(off[j], off[j + 1])
            H = hankel_block(a.c, a.n, dtype) if i == j else cross_block(a.t, a.n, a.c, b.t, b.n, b.c, dtype)
            P[si, sj] = H @ right[j]
    return P, T, E, M


def build_pick_system(data: ProblemData, tol_rank: float = TOL_RANK) -> PickSystem:
    """Assemble ``P, T, E, M, Ptilde`` and, when ``P`` is invertible, ``alpha, beta``.

    Raises
    ------
    DuplicateNodes
        Two nodes closer than ``1e-9``.
    NonHermitianDiagonalBlock
        A diagonal block ``P_ii`` is not Hermitian to ``1e-10`` relative.
    """
    P_ext, T_ext, E, M = pick_blocks(data, np.clongdouble)
    P, T, E, M = (X.astype(complex) for X in (P_ext, T_ext, E, M))
    off = data.offsets
    for i in range(len(data.nodes)):
        B = P[off[i] : off[i + 1], off[i] : off[i + 1]]
        if np.linalg.norm(B - B.conj().T) > HERMITIAN_RTOL * (1 + np.linalg.norm(B)):
            raise NonHermitianDiagonalBlock(f"diagonal block of node {i} is not Hermitian")
    Ptilde = P + M.conj().T @ M
    H, _ = hermitian_part(P)
    _, rank, _, _ = eig_summary(H, tol_rank=tol_rank)
    singular = rank < data.N
    alpha = beta = None
    if not singular:
        Mh = M.conj().T.astype(np.clongdouble)
        v = refined_solve(T.conj().T, E.conj().T, A_ext=T_ext.conj().T, extended=True)
        alpha = float(np.sqrt(1 + (Mh.conj().T @ refined_solve(P, Mh, A_ext=P_ext, extended=True)).real.item()))
        beta = float(np.sqrt(1 + (v.conj().T @ refined_solve(P, v, A_ext=P_ext, extended=True)).real.item()))
    return PickSystem(data, P, T, E, M, Ptilde, rank, singular, alpha, beta, tol_rank, P_ext, T_ext)


def extract_jet(w: RationalFunction, t: complex, n: int) -> InterpolationNode:
    """Node holding the exact boundary jet ``w_0..w_{2n+1}`` of ``w`` at ``t``.

    >>> nd = extract_jet(RationalFunction([0, 0, 1]), 1, 1)
    >>> [x.real for x in nd.c], nd.gamma
    ([1.0, 2.0, 1.0, 0.0], 1.0)
    """
    t = _unit(t)
    try:
        jet = rat_taylor(w, t, 2 * n + 1)
    except PoleAtPoint as exc:
        raise PoleAtNode(f"pole at node t = {t!r}") from exc
    if abs(abs(jet[0]) - 1) > UNIMODULAR_TOL:
        raise NotUnimodularAtNode(f"|w(t)| = {abs(jet[0])!r} at t = {t!r}")
    return InterpolationNode(t, n, jet.coeffs)
