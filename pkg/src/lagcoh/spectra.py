"""Fourier coefficients and cross-spectral covariance blocks.

Epoched data are stored as ``(n_epochs, n_samples, n_channels)`` real
arrays. The transform is the plain, unnormalised and untapered DFT kept on
the half spectrum ``0..n_samples // 2`` (cycles per epoch).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from lagcoh.errors import BandMismatch, InvalidData, ShapeMismatch

PHASE_ZERO_THRESHOLD = 1e-300


@dataclass(frozen=True)
class EpochedTimeSeries:
    """Real multichannel recording cut into equal-length epochs.

    Parameters
    ----------
    data : array, shape (n_epochs, n_samples, n_channels)
    channel_labels : list of str, optional
        Defaults to ``ch0, ch1, ...``.
    sampling_rate : float, optional
        Only used to label frequencies in Hz.
    """

    data: np.ndarray
    channel_labels: list[str] = field(default_factory=list)
    sampling_rate: float | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 3:
            raise ShapeMismatch(
                f"epoched data must be 3-D (epoch, sample, channel), got shape {data.shape}"
            )
        n_epochs, n_samples, n_channels = data.shape
        if n_epochs < 1 or n_samples < 2 or n_channels < 1:
            raise ShapeMismatch(
                f"need >= 1 epoch, >= 2 samples and >= 1 channel, got shape {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise InvalidData("epoched data contain non-finite values")
        labels = list(self.channel_labels) or [f"ch{c}" for c in range(n_channels)]
        if len(labels) != n_channels:
            raise ShapeMismatch(
                f"{len(labels)} channel labels given for {n_channels} channels"
            )
        if len(set(labels)) != len(labels):
            raise InvalidData("channel labels must be unique")
        if self.sampling_rate is not None and not self.sampling_rate > 0:
            raise InvalidData("sampling_rate must be positive")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "channel_labels", labels)

    @property
    def n_epochs(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def n_channels(self) -> int:
        return self.data.shape[2]

    def channel_index(self, key) -> int:
        """Resolve a channel given by label or integer position."""
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            if not 0 <= key < self.n_channels:
                raise IndexError(f"channel index {key} out of range")
            return int(key)
        try:
            return self.channel_labels.index(key)
        except ValueError:
            raise KeyError(f"unknown channel {key!r}") from None

    def select(self, channels: Sequence) -> EpochedTimeSeries:
        idx = [self.channel_index(c) for c in channels]
        return EpochedTimeSeries(
            self.data[:, :, idx],
            [self.channel_labels[i] for i in idx],
            self.sampling_rate,
        )


@dataclass(frozen=True)
class SpectralTensor:
    """Per-epoch Fourier coefficients.

    ``coeffs`` has shape ``(n_epochs, n_frequencies, n_channels)`` and
    ``frequency_indices[k]`` is the frequency (cycles per epoch) of slice
    ``coeffs[:, k, :]``.
    """

    coeffs: np.ndarray
    n_samples_origin: int
    frequency_indices: tuple[int, ...]
    zero_modulus_count: int = 0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != 3:
            raise ShapeMismatch(f"coefficients must be 3-D, got shape {coeffs.shape}")
        freqs = tuple(int(w) for w in self.frequency_indices)
        if len(freqs) != coeffs.shape[1]:
            raise ShapeMismatch(
                f"{len(freqs)} frequency indices for {coeffs.shape[1]} frequency slices"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "frequency_indices", freqs)

    @property
    def n_epochs(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_channels(self) -> int:
        return self.coeffs.shape[2]

    def position(self, omega: int) -> int:
        try:
            return self.frequency_indices.index(int(omega))
        except ValueError:
            raise BandMismatch(f"frequency {omega} not available") from None

    def select_channels(self, idx: Sequence[int]) -> SpectralTensor:
        return SpectralTensor(
            self.coeffs[:, :, list(idx)],
            self.n_samples_origin,
            self.frequency_indices,
            self.zero_modulus_count,
        )


@dataclass(frozen=True)
class CrossSpectra:
    """Cross-spectral blocks at one frequency or summed over a band.

    ``syx`` is not stored; it is always ``sxy.conj().T``. ``n_epochs`` is
    None for population (model-implied) spectra.
    """

    sxx: np.ndarray
    syy: np.ndarray
    sxy: np.ndarray
    n_epochs: int | None = None
    label: object = None

    def __post_init__(self):
        sxx = np.atleast_2d(np.asarray(self.sxx, dtype=complex))
        syy = np.atleast_2d(np.asarray(self.syy, dtype=complex))
        sxy = np.atleast_2d(np.asarray(self.sxy, dtype=complex))
        p, q = sxx.shape[0], syy.shape[0]
        if sxx.shape != (p, p) or syy.shape != (q, q) or sxy.shape != (p, q):
            raise ShapeMismatch(
                f"inconsistent block shapes Sxx{sxx.shape}, Syy{syy.shape}, Sxy{sxy.shape}"
            )
        object.__setattr__(self, "sxx", sxx)
        object.__setattr__(self, "syy", syy)
        object.__setattr__(self, "sxy", sxy)

    @property
    def syx(self) -> np.ndarray:
        return self.sxy.conj().T

    @property
    def p(self) -> int:
        return self.sxx.shape[0]

    @property
    def q(self) -> int:
        return self.syy.shape[0]

    def transformed(self, mx, my) -> CrossSpectra:
        """Cross-spectra of ``(mx @ X, my @ Y)`` for real matrices mx, my."""
        mx = np.atleast_2d(mx)
        my = np.atleast_2d(my)
        return CrossSpectra(
            mx @ self.sxx @ mx.T,
            my @ self.syy @ my.T,
            mx @ self.sxy @ my.T,
            self.n_epochs,
            self.label,
        )


def dft_epochs(ts: EpochedTimeSeries, demean: bool = True) -> SpectralTensor:
    """Half-spectrum DFT of every epoch and channel.

    ``X(w) = sum_t x(t) exp(-2j*pi*w*t/N_T)`` for ``w = 0..N_T // 2``. With
    ``demean`` the per-epoch, per-channel mean is removed first.
    """
    data = ts.data
    if not np.all(np.isfinite(data)):
        raise InvalidData("epoched data contain non-finite values")
    if demean:
        data = data - data.mean(axis=1, keepdims=True)
    n_samples = ts.n_samples
    coeffs = np.fft.rfft(data, axis=1)
    # DC and Nyquist are real by construction; drop roundoff residue
    coeffs[:, 0, :] = coeffs[:, 0, :].real
    if n_samples % 2 == 0:
        coeffs[:, -1, :] = coeffs[:, -1, :].real
    return SpectralTensor(coeffs, n_samples, tuple(range(n_samples // 2 + 1)))


def dft_reference(ts: EpochedTimeSeries, demean: bool = True) -> SpectralTensor:
    """Direct O(N_T^2) evaluation of the same transform as dft_epochs."""
    data = ts.data
    if demean:
        data = data - data.mean(axis=1, keepdims=True)
    n = ts.n_samples
    t = np.arange(n)
    w = np.arange(n // 2 + 1)
    kernel = np.exp(-2j * np.pi * np.outer(w, t) / n)
    coeffs = np.einsum("wt,etc->ewc", kernel, data)
    return SpectralTensor(coeffs, n, tuple(w.tolist()))


def cross_spectra(
    xs: SpectralTensor, ys: SpectralTensor, frequencies: Sequence[int] | None = None
) -> list[CrossSpectra]:
    """Epoch-averaged outer products ``Sxx, Syy, Sxy`` at each frequency.

    ``Sxy(w) = (1/N_E) sum_e X_e(w) Y_e(w)^H``.
    """
    if xs.n_epochs != ys.n_epochs:
        raise ShapeMismatch(
            f"x has {xs.n_epochs} epochs but y has {ys.n_epochs}"
        )
    if frequencies is None:
        frequencies = xs.frequency_indices
    n_epochs = xs.n_epochs
    out = []
    for omega in frequencies:
        x = xs.coeffs[:, xs.position(omega), :]
        y = ys.coeffs[:, ys.position(omega), :]
        out.append(
            CrossSpectra(
                x.T @ x.conj() / n_epochs,
                y.T @ y.conj() / n_epochs,
                x.T @ y.conj() / n_epochs,
                n_epochs,
                int(omega),
            )
        )
    return out


def band_aggregate(spectra: Sequence[CrossSpectra], band: Sequence[int], label=None) -> CrossSpectra:
    """Sum the cross-spectral blocks over the frequencies in ``band``."""
    band = [int(w) for w in band]
    if not band:
        raise BandMismatch("a band needs at least one frequency")
    if len(set(band)) != len(band):
        raise BandMismatch(f"band {band} lists a frequency more than once")
    by_label = {cs.label: cs for cs in spectra}
    missing = [w for w in band if w not in by_label]
    if missing:
        raise BandMismatch(f"frequencies {missing} missing from the input spectra")
    picked = [by_label[w] for w in band]
    return CrossSpectra(
        sum(cs.sxx for cs in picked),
        sum(cs.syy for cs in picked),
        sum(cs.sxy for cs in picked),
        picked[0].n_epochs,
        label if label is not None else tuple(band),
    )


def normalize_to_phase(spec: SpectralTensor) -> SpectralTensor:
    """Replace each coefficient by its unit-modulus phase factor.

    Coefficients with modulus at or below PHASE_ZERO_THRESHOLD become 0; how
    many did so is added to ``zero_modulus_count``.
    """
    mod = np.abs(spec.coeffs)
    zero = mod <= PHASE_ZERO_THRESHOLD
    out = np.where(zero, 0.0, spec.coeffs / np.where(zero, 1.0, mod))
    return SpectralTensor(
        out,
        spec.n_samples_origin,
        spec.frequency_indices,
        spec.zero_modulus_count + int(zero.sum()),
    )
