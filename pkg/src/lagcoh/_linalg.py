"""Small Hermitian linear-algebra helpers shared by the fitting code."""

import numpy as np
import scipy.linalg as la

from lagcoh.errors import SingularCrossSpectrum

RCOND_MIN = 1e-12


def hermitize(a):
    """Average a matrix with its conjugate transpose."""
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def is_hermitian(a, rtol=1e-10):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(np.abs(a).max(initial=0.0), np.finfo(float).tiny)
    return np.abs(a - a.conj().T).max(initial=0.0) <= rtol * scale


def rcond(a):
    """Reciprocal 2-norm condition number of a Hermitian PSD matrix.

    Returns 0 for matrices with a non-positive eigenvalue.
    """
    w = np.linalg.eigvalsh(hermitize(a))
    if w[-1] <= 0 or w[0] <= 0:
        return 0.0
    return float(w[0] / w[-1])


def hpd_solve(a, b, name="matrix"):
    """Solve ``a @ x = b`` for Hermitian positive definite ``a``.

    Raises SingularCrossSpectrum when the reciprocal condition estimate of
    ``a`` falls below RCOND_MIN. Returns ``(x, rcond)``.
    """
    r = rcond(a)
    if r < RCOND_MIN:
        raise SingularCrossSpectrum(
            f"{name} is singular or ill-conditioned (rcond={r:.3e} < {RCOND_MIN:g})"
        )
    factor = la.cho_factor(hermitize(a), lower=True, check_finite=False)
    return la.cho_solve(factor, b, check_finite=False), r


def logdet_hpd(a):
    """Log-determinant of a Hermitian positive definite matrix via Cholesky.

    Raises numpy.linalg.LinAlgError if ``a`` is not positive definite.
    """
    chol = np.linalg.cholesky(hermitize(a))
    return 2.0 * float(np.sum(np.log(np.diagonal(chol).real)))


def psd_factor(a):
    """Return ``L`` with ``L @ L^H == a`` for a Hermitian PSD ``a``.

    Falls back to a symmetric eigendecomposition when ``a`` is singular.
    """
    a = hermitize(np.atleast_2d(a))
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(a)
        if w[0] < -1e-10 * max(abs(w[-1]), 1.0):
            raise
        return v * np.sqrt(np.clip(w, 0.0, None))
