"""Admissibility and solvability verdicts for interpolation data."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ._linalg import TOL_PSD, TOL_RANK, eig_summary, hermitian_part
from .exceptions import InterpolationError, NotHermitian
from .pickdata import (
    DISTINCT_TOL,
    HERMITIAN_RTOL,
    UNIMODULAR_TOL,
    PickSystem,
    ProblemData,
    build_pick_system,
    pick_blocks,
)

__all__ = ["SolvabilityReport", "check_admissible", "psd_rank", "stein_residual", "assess"]


@dataclass
class SolvabilityReport:
    """Verdicts and diagnostics; ``solvable`` is ``admissible and psd``."""

    admissible: bool
    psd: bool = False
    rank: int = 0
    min_eigenvalue: float = float("nan")
    stein_residual: float = float("nan")
    messages: list = field(default_factory=list)

    @property
    def solvable(self) -> bool:
        return self.admissible and self.psd

    def to_dict(self) -> dict:
        out = asdict(self)
        out["solvable"] = self.solvable
        return out


def check_admissible(data: ProblemData) -> SolvabilityReport:
    """Flag non-unimodular ``c_{i,0}``, duplicate nodes and non-Hermitian diagonal blocks.

    Never raises on bad data; every problem becomes a message.  Node indices
    in messages are zero-based.
    """
    msgs = []
    for i, nd in enumerate(data.nodes):
        if abs(abs(nd.c[0]) - 1) > UNIMODULAR_TOL:
            msgs.append(f"node {i}: |c_0| = {abs(nd.c[0]):.6g} is not 1")
    ts = data.points
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            if abs(ts[i] - ts[j]) <= DISTINCT_TOL:
                msgs.append(f"nodes {i} and {j} coincide")
    if not any("coincide" in m for m in msgs):
        P = pick_blocks(data)[0]
        off = data.offsets
        for i in range(len(data.nodes)):
            B = P[off[i] : off[i + 1], off[i] : off[i + 1]]
            if np.linalg.norm(B - B.conj().T) > HERMITIAN_RTOL * (1 + np.linalg.norm(B)):
                msgs.append(f"node {i}: diagonal block is not Hermitian")
    return SolvabilityReport(admissible=not msgs, messages=msgs)


def psd_rank(P: np.ndarray, tol: float = TOL_PSD, tol_rank: float = TOL_RANK, herm_rtol: float = 1e-8):
    """Positive-semidefiniteness, numerical rank and smallest eigenvalue.

    >>> psd_rank(np.array([[1.0, 2.0], [2.0, 1.0]]))[0]
    False

    Raises
    ------
    NotHermitian
        If ``P`` deviates from its Hermitian part by more than
        ``herm_rtol * (1 + ||P||)``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    H, dev = hermitian_part(P)
    if dev > herm_rtol * (1 + np.linalg.norm(P)):
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    psd, rank, lam, _ = eig_summary(H, tol, tol_rank)
    return psd, rank, lam


def stein_residual(sys: PickSystem) -> float:
    """Frobenius norm of ``P - T^* P T - E^* E + M^* M``."""
    P, T, E, M = sys.P, sys.T, sys.E, sys.M
    R = P - T.conj().T @ P @ T - E.conj().T @ E + M.conj().T @ M
    return float(np.linalg.norm(R))


def assess(data: ProblemData, tol_psd: float = TOL_PSD, tol_rank: float = TOL_RANK) -> SolvabilityReport:
    """Full report: admissibility, then (if admissible) eigen-verdicts and Stein residual."""
    rep = check_admissible(data)
    if not rep.admissible:
        return rep
    try:
        sys = build_pick_system(data, tol_rank=tol_rank)
        rep.psd, rep.rank, rep.min_eigenvalue = psd_rank(sys.P, tol_psd, tol_rank)
    except InterpolationError as exc:
        rep.admissible = False
        rep.messages.append(str(exc))
        return rep
    rep.stein_residual = stein_residual(sys)
    scale = max(1.0, float(np.linalg.norm(sys.P, 2)))
    if rep.psd and abs(rep.min_eigenvalue) <= tol_psd * scale:
        rep.messages.append("marginal: smallest eigenvalue is within tolerance of zero")
    if not rep.psd:
        rep.messages.append(f"P is not positive semidefinite (min eigenvalue {rep.min_eigenvalue:.6g})")
    return rep
