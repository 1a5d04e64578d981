"""Small dense linear-algebra helpers shared across modules."""

from __future__ import annotations

import numpy as np

#: Default relative threshold for counting an eigenvalue as nonzero.
TOL_RANK = 1e-9
#: Default relative threshold for the positive-semidefinite verdict.
TOL_PSD = 1e-9


def hermitian_part(A: np.ndarray) -> tuple[np.ndarray, float]:
    """Return ``(A + A^*) / 2`` and the Frobenius size of the discarded part."""
    A = np.asarray(A, dtype=complex)
    H = (A + A.conj().T) / 2
    return H, float(np.linalg.norm(A - H))


def eig_summary(H: np.ndarray, tol_psd: float = TOL_PSD, tol_rank: float = TOL_RANK):
    """Eigen-verdicts for a Hermitian matrix.

    Returns
    -------
    psd : bool
    rank : int
    min_eig : float
    scale : float
        ``max(1, ||H||_2)``, the reference size of both thresholds.
    """
    if H.size == 0:
        return True, 0, 0.0, 1.0
    lam = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.abs(lam).max()))
    psd = bool(lam[0] >= -tol_psd * scale)
    rank = int(np.count_nonzero(lam > tol_rank * scale))
    return psd, rank, float(lam[0]), scale


def circle_points(K: int, radius: float = 1.0, offset: float = 0.0) -> np.ndarray:
    """``K`` equispaced points on the circle ``|z| = radius``."""
    return radius * np.exp(2j * np.pi * (np.arange(K) + offset) / K)


def interpolate_on_circle(values: np.ndarray, radius: float) -> np.ndarray:
    """Ascending coefficients of the degree ``< K`` polynomial through ``K`` circle samples.

    ``values[k]`` is the polynomial at ``radius * exp(2 pi i k / K)``.
    """
    values = np.asarray(values, dtype=complex)
    K = values.shape[0]
    return np.fft.fft(values, axis=0) / K / radius ** np.arange(K).reshape((K,) + (1,) * (values.ndim - 1))


def clean_coeffs(c: np.ndarray, rtol: float) -> np.ndarray:
    """Zero real and imaginary parts below ``rtol * max|c_k|`` (sampling noise)."""
    c = np.array(c, dtype=complex)
    if not c.size:
        return c
    floor = rtol * np.abs(c).max()
    re, im = c.real.copy(), c.imag.copy()
    re[np.abs(re) <= floor] = 0
    im[np.abs(im) <= floor] = 0
    return re + 1j * im


def refined_solve(A: np.ndarray, b: np.ndarray, steps: int = 2, A_ext: np.ndarray | None = None, extended: bool = False) -> np.ndarray:
    """``np.linalg.solve`` followed by iterative refinement.

    Residuals are accumulated in extended precision, so the result is
    accurate to roughly double precision whenever ``cond(A) * eps`` is small,
    instead of to ``cond(A) * eps`` itself.  Batched like ``np.linalg.solve``.

    Parameters
    ----------
    A, b : array_like
        ``b`` may be given in extended precision.
    steps : int
        Refinement sweeps.
    A_ext : ndarray, optional
        Extended-precision ``A`` for callers that can form it more accurately
        than by widening ``A``.
    extended : bool
        Return the solution in extended precision.
    """
    ld = np.clongdouble
    A_ext = np.asarray(A, dtype=ld) if A_ext is None else A_ext
    b_ext = np.asarray(b, dtype=ld)
    A = np.asarray(A, dtype=complex)
    x = np.linalg.solve(A, b_ext.astype(complex)).astype(ld)
    for _ in range(steps):
        r = b_ext - A_ext @ x
        x = x + np.linalg.solve(A, r.astype(complex))
    return x if extended else x.astype(complex)


def det_extended(A: np.ndarray) -> np.ndarray:
    """Determinants of a stack of square matrices, kept in extended precision.

    ``np.linalg.det`` rejects ``clongdouble``; this is plain Gaussian
    elimination with partial pivoting, batched over the leading axes.
    """
    A = np.array(A, dtype=np.clongdouble)
    n = A.shape[-1]
    det = np.ones(A.shape[:-2], dtype=np.clongdouble)
    idx = np.indices(A.shape[:-2])
    for k in range(n):
        piv = k + np.abs(A[..., k:, k]).argmax(axis=-1)
        swap = piv != k
        rows_k = A[..., k, :].copy()
        rows_p = A[(*idx, piv)].copy()
        A[..., k, :] = rows_p
        A[(*idx, piv)] = rows_k
        det = np.where(swap, -det, det)
        d = A[..., k, k]
        det = det * d
        safe = np.where(d == 0, 1, d)
        f = A[..., k + 1 :, k] / safe[..., None]
        A[..., k + 1 :, :] -= f[..., None] * A[..., k, None, :]
    return det
