"""Lagged association measures built from the two residual covariances.

``lagA = ln det(S_delta) - ln det(S_eps)``, ``lagC = 1 - exp(-lagA)`` and
``lagB = tr[(S_eps S_delta^-1 - I)^2] / q``. The closed forms for scalar and
univariate-target cases, and the older blocked-determinant definition, are
provided as independent cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from lagcoh._linalg import RCOND_MIN, hermitize, hpd_solve, logdet_hpd
from lagcoh.errors import (
    DegenerateResidual,
    InvalidCoherence,
    OrderingViolation,
    PerfectLaggedFit,
    ShapeMismatch,
)
from lagcoh.regression import fit_models
from lagcoh.spectra import CrossSpectra

CLAMP_TOL = 1e-9
COHERENCE_TOL = 1e-10


@dataclass(frozen=True)
class LaggedResult:
    lagA: float
    lagC: float
    lagB: float
    dims: tuple[int | None, int]
    label: object = None
    degenerate: bool = False


def _eigvals(a):
    return np.linalg.eigvalsh(hermitize(a))


def lagged_measures(S_eps, S_delta, q: int | None = None, p: int | None = None, label=None) -> LaggedResult:
    """Lagged association, lagged coherence and the trace criterion."""
    S_eps = np.atleast_2d(np.asarray(S_eps, dtype=complex))
    S_delta = np.atleast_2d(np.asarray(S_delta, dtype=complex))
    q = S_delta.shape[0] if q is None else q
    if S_eps.shape != (q, q) or S_delta.shape != (q, q):
        raise ShapeMismatch(f"expected {q}x{q} residual covariances")

    w_delta = _eigvals(S_delta)
    if w_delta[-1] <= 0 or w_delta[0] < RCOND_MIN * w_delta[-1]:
        raise DegenerateResidual(
            f"constrained residual covariance is singular (eigenvalues {w_delta[0]:.3e}..{w_delta[-1]:.3e})"
        )
    w_eps = _eigvals(S_eps)
    if w_eps[0] <= RCOND_MIN * w_delta[-1]:
        raise PerfectLaggedFit(
            "unconstrained residual covariance is singular; lagged association is unbounded"
        )

    lag_a = logdet_hpd(S_delta) - logdet_hpd(S_eps)
    degenerate = False
    if lag_a < 0:
        if lag_a < -CLAMP_TOL:
            raise OrderingViolation(
                f"ln det S_delta < ln det S_eps by {-lag_a:.3e}; the fit is inconsistent"
            )
        lag_a = 0.0
        degenerate = True
    lag_c = -math.expm1(-lag_a)

    # S_eps S_delta^-1 is similar to L^-1 S_eps L^-H (S_delta = L L^H), which
    # is Hermitian, so the trace of the square is a Frobenius norm.
    chol = np.linalg.cholesky(hermitize(S_delta))
    half = la.solve_triangular(chol, S_eps, lower=True)
    m = la.solve_triangular(chol, half.conj().T, lower=True).conj().T
    m = hermitize(m) - np.eye(q)
    lag_b = float(np.sum(np.abs(m) ** 2).real) / q

    return LaggedResult(lag_a, lag_c, lag_b, (p, q), label, degenerate)


def lagged_from_spectra(cs: CrossSpectra, ridge: float | None = None) -> LaggedResult:
    """Fit both regressions on ``cs`` and return the lagged measures."""
    fit = fit_models(cs, ridge)
    return lagged_measures(fit.S_eps, fit.S_delta, cs.q, cs.p, cs.label)


def degenerate_result(p: int, q: int, label=None) -> LaggedResult:
    """Zero result used where all coefficients are real (DC, Nyquist)."""
    return LaggedResult(0.0, 0.0, 0.0, (p, q), label, True)


def coherency(sxx: float, syy: float, sxy: complex) -> complex:
    """Complex coherency ``sxy / sqrt(sxx * syy)``."""
    if not (sxx > 0 and syy > 0):
        raise InvalidCoherence("auto-spectra must be positive")
    c = complex(sxy) / math.sqrt(sxx * syy)
    if abs(c) ** 2 > 1 + COHERENCE_TOL:
        raise InvalidCoherence(f"|coherency| = {abs(c):.12g} exceeds 1")
    return c


def bivariate_lagged(sxx: float, syy: float, sxy: complex, label=None) -> LaggedResult:
    """Closed form for one x-channel and one y-channel.

    With coherency ``c``: ``lagA = ln[(1 - Re c^2) / (1 - |c|^2)]`` and
    ``lagC = (Im c)^2 / (1 - (Re c)^2)``. For q = 1, ``lagB = lagC^2``.
    """
    c = coherency(float(np.real(sxx)), float(np.real(syy)), sxy)
    re2, im2 = c.real**2, c.imag**2
    denom = 1.0 - re2 - im2
    if denom <= 0:
        if im2 == 0:
            raise InvalidCoherence("|coherency| == 1 with zero imaginary part")
        raise PerfectLaggedFit("|coherency| == 1; lagged association is unbounded")
    lag_a = math.log((1.0 - re2) / denom)
    lag_c = im2 / (1.0 - re2)
    return LaggedResult(lag_a, lag_c, lag_c**2, (1, 1), label, False)


def _require_univariate_target(cs: CrossSpectra):
    if cs.q != 1:
        raise ShapeMismatch(f"expected a single y-channel, got q={cs.q}")
    syy = float(cs.syy[0, 0].real)
    if not syy > 0:
        raise DegenerateResidual("y auto-spectrum must be positive")
    return syy


def multiple_correlations(cs: CrossSpectra):
    """Squared multiple correlations of a single y on the x-block.

    Returns ``(C_sq, R_sq)``: the complex-valued coefficient
    ``Syx Sxx^-1 Sxy / syy`` and its real-part analogue
    ``(Re Syx)(Re Sxx)^-1 (Re Sxy) / syy``.
    """
    syy = _require_univariate_target(cs)
    sol, _ = hpd_solve(cs.sxx, cs.sxy, "Sxx")
    c_sq = (cs.syx @ sol)[0, 0] / syy
    sol_r, _ = hpd_solve(cs.sxx.real, cs.sxy.real, "Re Sxx")
    r_sq = (cs.syx.real @ sol_r)[0, 0] / syy
    return float(np.real(c_sq)), float(np.real(r_sq))


def univariate_multivariate_lagged(cs: CrossSpectra) -> LaggedResult:
    """Closed form for a single y-channel and p x-channels.

    ``lagA = ln[(1 - R^2) / (1 - C^2)]``, ``lagC = (C^2 - R^2) / (1 - R^2)``.
    """
    c_sq, r_sq = multiple_correlations(cs)
    if 1.0 - c_sq <= COHERENCE_TOL:
        raise PerfectLaggedFit(f"squared multiple coherence {c_sq:.12g} is 1")
    lag_a = math.log((1.0 - r_sq) / (1.0 - c_sq))
    lag_c = (c_sq - r_sq) / (1.0 - r_sq)
    return LaggedResult(lag_a, lag_c, lag_c**2, (cs.p, 1), cs.label, False)


def _logdet_or_raise(a, what):
    try:
        return logdet_hpd(a)
    except np.linalg.LinAlgError:
        raise DegenerateResidual(f"{what} is singular") from None


def legacy_2007_lagC(cs: CrossSpectra) -> float:
    """Older multivariate lagged coherence from blocked determinants.

    ``1 - det(S) det(Re Sxx) det(Re Syy) / (det(Sxx) det(Syy) det(Re S))``
    where ``S`` is the joint ``(p+q)x(p+q)`` cross-spectral matrix. It agrees
    with lagC when y is univariate but not in general.
    """
    joint = np.block([[cs.sxx, cs.sxy], [cs.syx, cs.syy]])
    log_ratio = (
        _logdet_or_raise(joint, "joint cross-spectrum")
        + _logdet_or_raise(cs.sxx.real, "Re Sxx")
        + _logdet_or_raise(cs.syy.real, "Re Syy")
        - _logdet_or_raise(cs.sxx, "Sxx")
        - _logdet_or_raise(cs.syy, "Syy")
        - _logdet_or_raise(joint.real, "real joint cross-spectrum")
    )
    return -math.expm1(log_ratio)
