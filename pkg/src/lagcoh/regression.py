"""Least-squares fits of Y on X in the frequency domain.

Two models are fitted from the same cross-spectra:

* unconstrained: ``Y = A1 X + eps`` with complex ``A1`` (lagged and
  instantaneous coupling),
* constrained:   ``Y = A0 X + delta`` with real ``A0`` (instantaneous
  coupling only).

Both minimise the trace of their residual covariance. Because the real
model is a restriction of the complex one, ``S_delta - S_eps`` is PSD.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from lagcoh._linalg import hermitize, hpd_solve, is_hermitian
from lagcoh.errors import InvalidMatrix
from lagcoh.spectra import CrossSpectra

ORDER_RTOL = 1e-9


@dataclass(frozen=True)
class RegressionFit:
    A1: np.ndarray
    A0: np.ndarray
    S_eps: np.ndarray
    S_delta: np.ndarray
    rcond_sxx: float
    rcond_re_sxx: float


def _ridged(cs: CrossSpectra, ridge: float | None) -> CrossSpectra:
    if not ridge:
        return cs
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    load = ridge * np.trace(cs.sxx).real / cs.p
    return CrossSpectra(cs.sxx + load * np.eye(cs.p), cs.syy, cs.sxy, cs.n_epochs, cs.label)


def residual_cov_complex(cs: CrossSpectra, a1) -> np.ndarray:
    """Residual covariance of ``Y - a1 X`` for any complex ``a1``."""
    a1 = np.atleast_2d(a1)
    return cs.syy + a1 @ cs.sxx @ a1.conj().T - cs.syx @ a1.conj().T - a1 @ cs.sxy


def residual_cov_real(cs: CrossSpectra, a0) -> np.ndarray:
    """Residual covariance of ``Y - a0 X`` for any real ``a0``."""
    a0 = np.atleast_2d(a0)
    return cs.syy + a0 @ cs.sxx @ a0.T - cs.syx @ a0.T - a0 @ cs.sxy


def _unconstrained(cs):
    sol, r = hpd_solve(cs.sxx, cs.sxy, "Sxx")
    # Sxx is Hermitian, so Syx Sxx^-1 == (Sxx^-1 Sxy)^H
    a1 = sol.conj().T
    s_eps = hermitize(cs.syy - a1 @ cs.sxy)
    return a1, s_eps, r


def _constrained(cs):
    sol, r = hpd_solve(cs.sxx.real, cs.sxy.real, "Re Sxx")
    a0 = sol.T
    s_delta = hermitize(residual_cov_real(cs, a0))
    return a0, s_delta, r


def unconstrained_fit(cs: CrossSpectra, ridge: float | None = None):
    """Complex least squares.

    ``A1 = Syx Sxx^-1`` and ``S_eps = Syy - Syx Sxx^-1 Sxy``. With ``ridge``
    set, ``Sxx`` is replaced by ``Sxx + ridge * tr(Sxx) / p * I``.

    Returns
    -------
    A1 : complex array, shape (q, p)
    S_eps : complex array, shape (q, q)
    """
    a1, s_eps, _ = _unconstrained(_ridged(cs, ridge))
    return a1, s_eps


def constrained_fit(cs: CrossSpectra, ridge: float | None = None):
    """Real-coefficient least squares.

    ``A0 = (Re Syx)(Re Sxx)^-1`` and ``S_delta`` is the residual covariance of
    ``Y - A0 X`` evaluated with the full complex spectra.

    Returns
    -------
    A0 : real array, shape (q, p)
    S_delta : complex array, shape (q, q)
    """
    a0, s_delta, _ = _constrained(_ridged(cs, ridge))
    return a0, s_delta


def fit_models(cs: CrossSpectra, ridge: float | None = None) -> RegressionFit:
    """Fit both models and collect conditioning diagnostics."""
    if cs.n_epochs is not None and cs.n_epochs < cs.p + cs.q:
        warnings.warn(
            f"only {cs.n_epochs} epochs for p={cs.p}, q={cs.q}; "
            f"at least p + q = {cs.p + cs.q} are recommended",
            RuntimeWarning,
            stacklevel=2,
        )
    cs = _ridged(cs, ridge)
    a1, s_eps, r1 = _unconstrained(cs)
    a0, s_delta, r0 = _constrained(cs)
    return RegressionFit(a1, a0, s_eps, s_delta, r1, r0)


def psd_order_check(S_eps, S_delta):
    """Check the ordering ``S_eps <= S_delta`` with a nonzero lagged part.

    Returns ``(present, margin)`` where ``margin`` is the smallest eigenvalue
    of ``S_delta - S_eps``. ``present`` is true when that difference is PSD
    (up to ``-ORDER_RTOL * tr(S_delta) / q``) and its largest eigenvalue is
    above the same tolerance.
    """
    S_eps = np.atleast_2d(np.asarray(S_eps, dtype=complex))
    S_delta = np.atleast_2d(np.asarray(S_delta, dtype=complex))
    if S_eps.shape != S_delta.shape:
        raise InvalidMatrix(f"shape mismatch {S_eps.shape} vs {S_delta.shape}")
    if not (is_hermitian(S_eps) and is_hermitian(S_delta)):
        raise InvalidMatrix("residual covariances must be Hermitian")
    q = S_delta.shape[0]
    tol = ORDER_RTOL * abs(np.trace(S_delta).real) / q
    w = np.linalg.eigvalsh(hermitize(S_delta - S_eps))
    present = bool(w[0] >= -tol and w[-1] > tol)
    return present, float(w[0])
