"""Ground-truth data and population oracles for the lagged measures.

The generative model is the Granger-causal regression

    Y(t) = B X(t) + sum_{k=1..m} D_k X(t - k) + eps(t)

with real ``B`` (instantaneous coupling) and real lag matrices ``D_k``.
In the frequency domain this reads ``Y(w) = (B + C(w)) X(w) + eps(w)`` with
``C(w) = sum_k D_k exp(-2j*pi*w*k/N_T)``.

Random streams
--------------
Every epoch draws from its own ``numpy.random.Generator`` (PCG64) seeded
with ``SeedSequence([seed, epoch])``, so output does not depend on how
epochs are scheduled across workers.

Complex Gaussian convention
---------------------------
Frequency-domain samples are circularly symmetric: ``z = L (a + i b) / sqrt(2)``
with ``a, b`` independent standard normal vectors and ``L L^H = S``, giving
``E[z z^H] = S`` and ``E[z z^T] = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lagcoh._linalg import hermitize, hpd_solve, psd_factor
from lagcoh.errors import ShapeMismatch
from lagcoh.spectra import CrossSpectra, EpochedTimeSeries, SpectralTensor


@dataclass(frozen=True)
class GenerativeModel:
    """Parameters of the lagged regression model.

    ``x_cov`` is the covariance of the white Gaussian X process used by the
    time-domain generator; ``noise_cov`` that of ``eps(t)``.
    """

    B: np.ndarray
    D_lags: tuple = ()
    noise_cov: np.ndarray | None = None
    x_cov: np.ndarray | None = None
    n_samples: int = 64
    sampling_rate: float | None = None

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.B, dtype=float))
        q, p = b.shape
        lags = tuple(np.atleast_2d(np.asarray(d, dtype=float)) for d in self.D_lags)
        for k, d in enumerate(lags, start=1):
            if d.shape != (q, p):
                raise ShapeMismatch(f"D({k}) has shape {d.shape}, expected {(q, p)}")
        noise = np.eye(q) if self.noise_cov is None else np.atleast_2d(np.asarray(self.noise_cov, dtype=float))
        xcov = np.eye(p) if self.x_cov is None else np.atleast_2d(np.asarray(self.x_cov, dtype=float))
        if noise.shape != (q, q):
            raise ShapeMismatch(f"noise_cov has shape {noise.shape}, expected {(q, q)}")
        if xcov.shape != (p, p):
            raise ShapeMismatch(f"x_cov has shape {xcov.shape}, expected {(p, p)}")
        for name, cov in (("noise_cov", noise), ("x_cov", xcov)):
            if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(np.abs(cov).max(), 1.0)):
                raise ShapeMismatch(f"{name} must be symmetric")
            if np.linalg.eigvalsh(cov)[0] < -1e-10 * max(np.abs(cov).max(), 1.0):
                raise ShapeMismatch(f"{name} must be positive semidefinite")
        if int(self.n_samples) < 2:
            raise ShapeMismatch("n_samples must be >= 2")
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "D_lags", lags)
        object.__setattr__(self, "noise_cov", noise)
        object.__setattr__(self, "x_cov", xcov)
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @property
    def p(self) -> int:
        return self.B.shape[1]

    @property
    def q(self) -> int:
        return self.B.shape[0]

    @property
    def order(self) -> int:
        return len(self.D_lags)

    def with_B(self, B) -> GenerativeModel:
        return GenerativeModel(
            B, self.D_lags, self.noise_cov, self.x_cov, self.n_samples, self.sampling_rate
        )


def epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(epoch)]))


def generate_var(model: GenerativeModel, n_epochs: int, seed: int):
    """Simulate epochs of X and Y from the time-domain model.

    X is white Gaussian with covariance ``model.x_cov``. Each epoch draws
    ``m`` extra leading samples of X that are discarded after use, so every
    lag inside the epoch is defined; epochs are independent.

    Returns ``(x_epochs, y_epochs)`` as EpochedTimeSeries.
    """
    if n_epochs < 1:
        raise ValueError("n_epochs must be >= 1")
    p, q, m, n = model.p, model.q, model.order, model.n_samples
    lx = psd_factor(model.x_cov).real
    le = psd_factor(model.noise_cov).real
    xs = np.empty((n_epochs, n, p))
    ys = np.empty((n_epochs, n, q))
    for e in range(n_epochs):
        rng = epoch_rng(seed, e)
        x = rng.standard_normal((n + m, p)) @ lx.T
        eps = rng.standard_normal((n, q)) @ le.T
        y = x[m:] @ model.B.T + eps
        for k, d in enumerate(model.D_lags, start=1):
            y += x[m - k : m - k + n] @ d.T
        xs[e] = x[m:]
        ys[e] = y
    x_labels = [f"x{i}" for i in range(p)]
    y_labels = [f"y{i}" for i in range(q)]
    return (
        EpochedTimeSeries(xs, x_labels, model.sampling_rate),
        EpochedTimeSeries(ys, y_labels, model.sampling_rate),
    )


def complex_gaussian(rng: np.random.Generator, cov, size: int) -> np.ndarray:
    """Draw ``size`` circular complex Gaussian vectors with covariance ``cov``."""
    factor = psd_factor(cov)
    dim = factor.shape[0]
    z = (rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))) / np.sqrt(2.0)
    return z @ factor.T


def generate_spectral(model: GenerativeModel, omega: int, sxx, s_eps, n_epochs: int, seed: int):
    """Sample Fourier coefficients at one frequency directly.

    ``X_e ~ CN(0, sxx)``, ``eps_e ~ CN(0, s_eps)`` and
    ``Y_e = (B + C(omega)) X_e + eps_e``. Returns ``(xs, ys)`` as single
    frequency SpectralTensors.
    """
    sxx = np.atleast_2d(sxx)
    s_eps = np.atleast_2d(s_eps)
    if sxx.shape != (model.p, model.p) or s_eps.shape != (model.q, model.q):
        raise ShapeMismatch("sxx / s_eps do not match the model dimensions")
    a1 = model.B + transfer_C(model, omega)
    x = np.empty((n_epochs, model.p), dtype=complex)
    y = np.empty((n_epochs, model.q), dtype=complex)
    for e in range(n_epochs):
        rng = epoch_rng(seed, e)
        x[e] = complex_gaussian(rng, sxx, 1)[0]
        y[e] = a1 @ x[e] + complex_gaussian(rng, s_eps, 1)[0]
    freq = (int(omega),)
    return (
        SpectralTensor(x[:, None, :], model.n_samples, freq),
        SpectralTensor(y[:, None, :], model.n_samples, freq),
    )


def transfer_C(model: GenerativeModel, omega) -> np.ndarray:
    """Frequency response of the lag terms, ``sum_k D_k exp(-2j*pi*omega*k/N_T)``."""
    c = np.zeros((model.q, model.p), dtype=complex)
    for k, d in enumerate(model.D_lags, start=1):
        c += d * np.exp(-2j * np.pi * omega * k / model.n_samples)
    return c


def population_covariances(model: GenerativeModel, sxx, s_eps, omega):
    """Model-implied ``(Syy, Syx)`` for given X spectrum and noise spectrum."""
    sxx = np.atleast_2d(np.asarray(sxx, dtype=complex))
    s_eps = np.atleast_2d(np.asarray(s_eps, dtype=complex))
    a1 = model.B + transfer_C(model, omega)
    syx = a1 @ sxx
    syy = hermitize(a1 @ sxx @ a1.conj().T + s_eps)
    return syy, syx


def population_spectra(model: GenerativeModel, sxx, s_eps, omega) -> CrossSpectra:
    syy, syx = population_covariances(model, sxx, s_eps, omega)
    return CrossSpectra(sxx, syy, syx.conj().T, None, int(omega))


def population_sdd(model: GenerativeModel, sxx, s_eps, omega):
    """Closed-form constrained residual covariance of the model.

    Returns ``(S_delta, D)`` with
    ``D = Re C - (Im C)(Im Sxx)(Re Sxx)^-1`` and
    ``S_delta = S_eps + C Sxx C^H + D Sxx D^T - C Sxx D^T - D Sxx C^H``.
    No term depends on ``B``.
    """
    sxx = np.atleast_2d(np.asarray(sxx, dtype=complex))
    s_eps = np.atleast_2d(np.asarray(s_eps, dtype=complex))
    c = transfer_C(model, omega)
    # (Im C)(Im Sxx)(Re Sxx)^-1 == ((Re Sxx)^-1 (Im Sxx)^T (Im C)^T)^T
    sol, _ = hpd_solve(sxx.real, (c.imag @ sxx.imag).T, "Re Sxx")
    d = c.real - sol.T
    s_delta = (
        s_eps
        + c @ sxx @ c.conj().T
        + d @ sxx @ d.T
        - c @ sxx @ d.T
        - d @ sxx @ c.conj().T
    )
    return hermitize(s_delta), d


def random_mixing(dim: int, seed: int | None = None, identity: bool = False) -> np.ndarray:
    """Random real nonsingular ``dim x dim`` matrix (rcond >= 1e-6)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if identity:
        return np.eye(dim)
    rng = np.random.default_rng(seed)
    while True:
        m = rng.standard_normal((dim, dim))
        s = np.linalg.svd(m, compute_uv=False)
        if s[-1] >= 1e-6 * s[0]:
            return m


def random_hpd(dim: int, rng: np.random.Generator, imag_scale: float = 1.0) -> np.ndarray:
    """Random well-conditioned Hermitian positive definite matrix."""
    a = rng.standard_normal((dim, dim)) + 1j * imag_scale * rng.standard_normal((dim, dim))
    return a @ a.conj().T + dim * np.eye(dim)


__all__ = [
    "GenerativeModel",
    "complex_gaussian",
    "generate_spectral",
    "generate_var",
    "population_covariances",
    "population_sdd",
    "population_spectra",
    "random_hpd",
    "random_mixing",
    "transfer_C",
]
