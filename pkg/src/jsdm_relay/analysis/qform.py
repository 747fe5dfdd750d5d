"""Tail probability of an indefinite Hermitian form in Gaussian vectors.

For ``w ~ CN(0, I)`` and a spectrum with exactly one positive eigenvalue
``mu_1``, ``Pr(sum_i mu_i |w_i|^2 > c) = exp(-c/mu_1) / prod_{i>=2}(1 - mu_i/mu_1)``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import linalg

DROP_RATIO = 1e-12


class EigenStructureError(ArithmeticError):
    """The spectrum does not have a single positive eigenvalue."""


def clean_spectrum(mu, drop_ratio: float = DROP_RATIO) -> np.ndarray:
    """Sort descending and drop eigenvalues negligible relative to the largest."""
    mu = np.sort(np.asarray(mu, dtype=float).ravel())[::-1]
    if mu.size == 0:
        return mu
    scale = np.max(np.abs(mu))
    if scale == 0:
        return mu[:0]
    return mu[np.abs(mu) >= drop_ratio * scale]


def hermitian_spectrum(A: np.ndarray, drop_ratio: float = DROP_RATIO) -> np.ndarray:
    A = np.asarray(A)
    return clean_spectrum(linalg.eigvalsh(0.5 * (A + A.conj().T)), drop_ratio)


def check_single_positive(mu: np.ndarray) -> None:
    if mu.size == 0 or not mu[0] > 0:
        raise EigenStructureError("no positive eigenvalue")
    if mu.size > 1 and mu[1] > 0:
        raise EigenStructureError(
            f"more than one positive eigenvalue: {mu[0]:.3e}, {mu[1]:.3e}")


def tail_product(mu: np.ndarray) -> float:
    """``prod_{i>=2} (1 - mu_i / mu_1)`` for a cleaned spectrum."""
    return float(np.prod(1.0 - mu[1:] / mu[0]))


def qform_tail(mu, c: float) -> float:
    """``Pr(sum_i mu_i |w_i|^2 > c)`` for i.i.d. ``w_i ~ CN(0, 1)``.

    Parameters
    ----------
    mu : array_like
        Eigenvalues; exactly one may be positive.  Values below ``1e-12``
        times the largest magnitude are ignored.
    c : float
        Non-negative threshold.

    Raises
    ------
    EigenStructureError
        If the spectrum has no or several positive eigenvalues.
    """
    if c < 0:
        raise ValueError("threshold c must be non-negative")
    mu = clean_spectrum(mu)
    check_single_positive(mu)
    return math.exp(-c / mu[0]) / tail_product(mu)
