"""A scikit-learn style wrapper around the solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._linalg import TOL_PSD, TOL_RANK
from .exceptions import InterpolationError
from .parametrize import SchurParameter, coefficient_matrix_rational, solve
from .pickdata import InterpolationNode, ProblemData, build_pick_system
from .solvability import assess

__all__ = ["BoundaryInterpolator", "as_problem", "check_points"]


def as_problem(X) -> ProblemData:
    """Coerce ``ProblemData``, a sequence of nodes, or problem JSON (dict) to ``ProblemData``."""
    if isinstance(X, ProblemData):
        return X
    if isinstance(X, dict):
        return ProblemData.from_json(X)
    try:
        nodes = tuple(X)
    except TypeError as exc:
        raise InterpolationError(f"cannot read interpolation data from {type(X).__name__}") from exc
    if not all(isinstance(nd, InterpolationNode) for nd in nodes):
        raise InterpolationError("expected a sequence of InterpolationNode")
    return ProblemData(nodes)


def check_points(z) -> np.ndarray:
    """Finite complex evaluation points as an array (``check_array`` rejects complex input)."""
    z = np.asarray(z)
    if z.dtype == object or not (np.issubdtype(z.dtype, np.number)):
        raise ValueError("evaluation points must be numeric")
    z = z.astype(complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("evaluation points must be finite")
    return z


class BoundaryInterpolator(BaseEstimator):
    """Fit a Schur-class interpolant to boundary jet data.

    Parameters
    ----------
    param : str or SchurParameter, default "const:0"
        Free parameter choosing one solution of a nonsingular problem;
        ignored when the solution is unique.
    tol_psd, tol_rank : float
        Eigenvalue tolerances for the solvability verdicts.

    Attributes
    ----------
    report_ : SolvabilityReport
    system_ : PickSystem
    coefficients_ : CoefficientMatrix or None
        ``None`` in the singular case.
    solution_ : RationalFunction

    Examples
    --------
    >>> from schurpick import InterpolationNode
    >>> est = BoundaryInterpolator().fit([InterpolationNode(1, 0, (1,), 1.0)])
    >>> round(float(est.predict([0]).real[0]), 12)
    0.5
    """

    def __init__(self, param="const:0", tol_psd=TOL_PSD, tol_rank=TOL_RANK):
        self.param = param
        self.tol_psd = tol_psd
        self.tol_rank = tol_rank

    def _parameter(self) -> SchurParameter:
        if isinstance(self.param, SchurParameter):
            return self.param
        if isinstance(self.param, str):
            return SchurParameter.parse(self.param)
        raise InterpolationError(f"param must be a parameter string or SchurParameter, got {type(self.param).__name__}")

    def fit(self, X, y=None):
        """Solve the problem ``X``; ``y`` is unused.

        Raises
        ------
        InterpolationError
            The data are inadmissible or the problem has no solution.
        """
        data = as_problem(X)
        param = self._parameter()
        rep = assess(data, self.tol_psd, self.tol_rank)
        if not rep.solvable:
            raise InterpolationError("problem is not solvable: " + "; ".join(rep.messages))
        sys_ = build_pick_system(data, tol_rank=self.tol_rank)
        self.report_ = rep
        self.system_ = sys_
        self.coefficients_ = None if sys_.singular else coefficient_matrix_rational(sys_)
        self.solution_ = solve(sys_, None if sys_.singular else param)
        self.n_nodes_ = len(data.nodes)
        return self

    def predict(self, z) -> np.ndarray:
        """Values of the fitted solution at points of the closed disk."""
        check_is_fitted(self, "solution_")
        z = check_points(z)
        if np.any(np.abs(z) > 1 + 1e-12):
            raise ValueError("evaluation points must lie in the closed unit disk")
        return self.solution_(z)
