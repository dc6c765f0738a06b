"""Dense complex linear algebra used throughout the package.

Matrices are plain complex ``numpy.ndarray`` objects. Every public function
rejects non-finite input. Eigenvalues come from LAPACK by default; a cyclic
Jacobi solver is kept alongside as an independent route and for small
matrices where one wants no external dependency on the eigen-backend.
"""

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteError,
    NotHermitianError,
    NotSquareError,
)

__all__ = [
    "as_matrix",
    "hermitian_deviation",
    "hermitian_eigenvalues",
    "jacobi_eigh",
    "spectral_norm",
    "commutator",
    "dominant_singular_pairs",
]

HERMITIAN_TOL = 1e-12


def as_matrix(m, square=True):
    """Return ``m`` as a 2-d complex array, checking shape and finiteness."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise NotSquareError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise NotSquareError(f"matrix is not square: shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix contains NaN or Inf entries")
    return a


def hermitian_deviation(m):
    """Largest entry of ``|m - m^dagger|``."""
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def _check_hermitian(a, tol):
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    dev = hermitian_deviation(a)
    if dev > tol * scale:
        raise NotHermitianError(
            f"hermitian deviation {dev:.3e} exceeds {tol:.1e} x max entry {scale:.3e}"
        )


def jacobi_eigh(m, tol=HERMITIAN_TOL, max_sweeps=100):
    """Cyclic Jacobi eigen-decomposition of a hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square hermitian matrix.
    tol : float
        Relative hermiticity tolerance, checked against the largest entry.
    max_sweeps : int
        Cap on full sweeps over the strict upper triangle.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.

    Notes
    -----
    Sweeping stops once the off-diagonal Frobenius norm falls below
    ``1e-14 * ||m||_F``.
    """
    a = as_matrix(m)
    _check_hermitian(a, tol)
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = 1e-14 * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # phase-fix column q, then a real rotation in the (p, q) plane
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[q, p] = 0.0
                a[p, q] = 0.0
                v[:, idx] = v[:, idx] @ rot
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(m, tol=HERMITIAN_TOL, method="lapack"):
    """All eigenvalues of a hermitian matrix, ascending, with multiplicity.

    ``method`` is ``"lapack"`` (``numpy.linalg.eigvalsh``) or ``"jacobi"``.
    Raises NotSquareError or NotHermitianError on bad input.
    """
    a = as_matrix(m)
    _check_hermitian(a, tol)
    if method == "jacobi":
        return jacobi_eigh(a, tol)[0]
    if method != "lapack":
        raise ValueError(f"unknown eigen method {method!r}")
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))


def spectral_norm(m, method="lapack"):
    """Largest singular value, i.e. sqrt of the top eigenvalue of ``m^dagger m``."""
    a = as_matrix(m, square=False)
    if a.size == 0:
        return 0.0
    gram = a.conj().T @ a
    top = hermitian_eigenvalues(gram, tol=np.inf, method=method)[-1]
    return float(np.sqrt(max(top, 0.0)))


def commutator(a, b):
    """``a @ b - b @ a`` for square matrices of equal size."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot commute shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def dominant_singular_pairs(m, rel_gap=0.0):
    """Singular triples ``(sigma, u, v)`` with ``sigma >= (1 - rel_gap) * sigma_max``.

    Used internally by the distance solver to assemble subgradients and
    supporting cuts of the spectral norm. Not part of the stable API.
    """
    a = as_matrix(m, square=False)
    u, s, vh = np.linalg.svd(a)
    keep = s >= (1.0 - rel_gap) * s[0]
    return [(float(s[i]), u[:, i], vh[i].conj()) for i in np.flatnonzero(keep)]
