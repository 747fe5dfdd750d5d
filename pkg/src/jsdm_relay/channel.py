"""One-ring channel covariance, eigen-truncation and channel sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .params import OneRingGroup

DEFAULT_RANK_THRESHOLD = 1e-6


class ValidationError(ValueError):
    pass


def _one_ring_entry(lag: int, group: OneRingGroup, epsabs: float) -> complex:
    """Average of exp(-j 2 pi D lag sin t) over the angular support."""
    if lag == 0:
        return 1.0 + 0.0j
    lo, hi = group.wedge
    phase = 2.0 * math.pi * group.antenna_spacing * lag
    # oscillation count grows with the lag; give quad room for panels
    limit = 200 + 4 * abs(lag)
    re, _ = integrate.quad(lambda t: math.cos(phase * math.sin(t)), lo, hi,
                           epsabs=epsabs, epsrel=0.0, limit=limit)
    im, _ = integrate.quad(lambda t: -math.sin(phase * math.sin(t)), lo, hi,
                           epsabs=epsabs, epsrel=0.0, limit=limit)
    return complex(re, im) / (2.0 * group.spread)


def build_covariance(group: OneRingGroup, epsabs: float = 1e-10) -> np.ndarray:
    """Channel covariance matrix of a one-ring group.

    Entry ``(m, p)`` is the average of ``exp(-j 2 pi D (m - p) sin t)`` over
    ``t`` uniform in ``[aoa - spread, aoa + spread]``.  Only the first
    column is integrated; the matrix is Toeplitz and Hermitian.
    """
    M = group.num_antennas
    first_col = np.array([_one_ring_entry(n, group, epsabs / 2) for n in range(M)])
    return linalg.toeplitz(first_col, first_col.conj())


@dataclass(frozen=True)
class CovarianceModel:
    """Covariance ``R`` with its retained eigenpairs, ``R ~= U diag(lam) U^H``."""

    matrix: np.ndarray
    eigvecs: np.ndarray
    eigvals: np.ndarray
    rank_threshold: float
    discarded: np.ndarray

    @property
    def rank(self) -> int:
        return self.eigvals.size

    @property
    def num_antennas(self) -> int:
        return self.matrix.shape[0]

    @property
    def sqrt_factor(self) -> np.ndarray:
        """``U Lambda^{1/2}``, the M x r channel colouring matrix."""
        return self.eigvecs * np.sqrt(self.eigvals)

    def reconstruct(self) -> np.ndarray:
        return (self.eigvecs * self.eigvals) @ self.eigvecs.conj().T


def eigendecompose(R: np.ndarray, rank_threshold: float = DEFAULT_RANK_THRESHOLD,
                   hermitian_tol: float = 1e-10) -> CovarianceModel:
    """Truncated eigendecomposition of a Hermitian covariance.

    Eigenpairs with eigenvalue above ``rank_threshold * lambda_max`` are kept,
    sorted in descending order.

    Raises
    ------
    ValidationError
        If ``R`` is not square or not Hermitian within ``hermitian_tol``.
    """
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValidationError("covariance must be a square matrix")
    asym = np.max(np.abs(R - R.conj().T)) if R.size else 0.0
    if asym > hermitian_tol:
        raise ValidationError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    R = 0.5 * (R + R.conj().T)
    vals, vecs = linalg.eigh(R)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    keep = vals > rank_threshold * vals[0]
    return CovarianceModel(
        matrix=R,
        eigvecs=vecs[:, keep],
        eigvals=vals[keep],
        rank_threshold=rank_threshold,
        discarded=vals[~keep],
    )


def covariance_model(group: OneRingGroup,
                     rank_threshold: float = DEFAULT_RANK_THRESHOLD) -> CovarianceModel:
    return eigendecompose(build_covariance(group), rank_threshold)


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray
    group_id: int
    w: np.ndarray
    h_pico: complex


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """I.i.d. CN(0, 1) samples."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


def sample_channel(model: CovarianceModel, rng: np.random.Generator,
                   group_id: int = 0) -> ChannelRealization:
    """Draw ``h = U Lambda^{1/2} w`` and an independent Rayleigh pico link."""
    w = complex_normal(rng, model.rank)
    h_pico = complex_normal(rng, 1)[0]
    return ChannelRealization(model.sqrt_factor @ w, group_id, w, h_pico)


def sample_channels(model: CovarianceModel, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` channel vectors as the rows of an ``(n, M)`` array."""
    w = complex_normal(rng, (n, model.rank))
    return w @ model.sqrt_factor.T
