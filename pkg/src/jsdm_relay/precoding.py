"""First-stage JSDM-PGP beamformers.

Each group's beams live in the null space of the other groups' dominant
eigenvectors (block diagonalization on the long-term statistics).  With
per-group processing the second stage is the identity, so every data stream
rides one column of ``B_g``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .channel import CovarianceModel

DEFAULT_LEAKAGE_TOLERANCE = 1e-6


class InfeasibleStreamsError(ValueError):
    """More streams requested than a group's beam space can carry."""


class LeakageWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PrecoderSet:
    """First-stage beams of all groups.

    Attributes
    ----------
    beams : tuple of ndarray
        ``beams[g]`` is ``M x S_g`` with unit-norm, mutually orthogonal columns.
    pico_group : int or None
        Group whose first column serves the pico BS, ``None`` without pico.
    leakage : ndarray
        ``leakage[g, g2] = ||B_g^H U_g2 Lambda_g2^{1/2}||_F /
        ||Lambda_g2^{1/2}||_F`` (diagonal is unused and set to 0).
    leakage_exceeded : bool
        True when any off-diagonal leakage exceeds the tolerance.
    """

    beams: tuple
    pico_group: int | None
    leakage: np.ndarray
    leakage_tolerance: float
    leakage_exceeded: bool = field(default=False)

    @property
    def stream_counts(self) -> tuple:
        return tuple(b.shape[1] for b in self.beams)

    @property
    def total_streams(self) -> int:
        return sum(self.stream_counts)

    @property
    def all_beams(self) -> np.ndarray:
        return np.concatenate(self.beams, axis=1)

    def pico_beam(self) -> np.ndarray:
        if self.pico_group is None:
            raise ValueError("precoder set carries no pico stream")
        return self.beams[self.pico_group][:, 0]


def _null_space_basis(models, g, M):
    others = [m.eigvecs for i, m in enumerate(models) if i != g]
    if not others:
        return np.eye(M, dtype=complex)
    stacked = np.concatenate(others, axis=1)
    return linalg.null_space(stacked.conj().T)


def leakage_matrix(beams, models) -> np.ndarray:
    G = len(models)
    out = np.zeros((G, G))
    for g in range(G):
        for g2 in range(G):
            if g == g2 or beams[g].shape[1] == 0:
                continue
            F = beams[g].conj().T @ models[g2].sqrt_factor
            out[g, g2] = linalg.norm(F) / np.sqrt(models[g2].eigvals.sum())
    return out


def design_bd_precoders(models, streams_per_group, leakage_tolerance=DEFAULT_LEAKAGE_TOLERANCE,
                        pico_group: int | None = None) -> PrecoderSet:
    """Null-space projected block-diagonalization beams.

    For group ``g`` the basis ``N_g`` of the null space of the other groups'
    retained eigenvectors is formed, and ``B_g`` is taken as the ``S_g``
    dominant left singular vectors of ``N_g N_g^H U_g Lambda_g^{1/2}``.

    Parameters
    ----------
    models : sequence of CovarianceModel
    streams_per_group : sequence of int
        ``S_g``, counting the pico BS in its own group.
    leakage_tolerance : float
        Relative inter-group leakage above which a :class:`LeakageWarning`
        is issued (overlapping one-ring supports rule out exact nulling).
    pico_group : int, optional
        Group that hosts the pico stream; it receives column 0.

    Raises
    ------
    InfeasibleStreamsError
        If a group asks for more streams than its rank or null-space allows.
    """
    models = list(models)
    streams = [int(s) for s in streams_per_group]
    if len(streams) != len(models):
        raise ValueError("one stream count per group is required")
    M = models[0].num_antennas
    if sum(streams) > M:
        raise InfeasibleStreamsError(f"{sum(streams)} streams exceed {M} antennas")
    beams = []
    for g, (model, S_g) in enumerate(zip(models, streams)):
        if S_g > model.rank:
            raise InfeasibleStreamsError(
                f"group {g}: {S_g} streams exceed covariance rank {model.rank}")
        N = _null_space_basis(models, g, M)
        if N.shape[1] < S_g:
            raise InfeasibleStreamsError(
                f"group {g}: null space of dimension {N.shape[1]} cannot carry {S_g} streams")
        if S_g == 0:
            beams.append(np.zeros((M, 0), dtype=complex))
            continue
        projected = N @ (N.conj().T @ model.sqrt_factor)
        U, s, _ = linalg.svd(projected, full_matrices=False)
        if s[S_g - 1] <= 1e-12 * s[0]:
            raise InfeasibleStreamsError(
                f"group {g}: projected channel supports fewer than {S_g} streams")
        B = U[:, :S_g]
        beams.append(B / linalg.norm(B, axis=0))
    leak = leakage_matrix(beams, models)
    exceeded = bool(np.any(leak > leakage_tolerance))
    if exceeded:
        warnings.warn(f"inter-group leakage {leak.max():.3e} above tolerance "
                      f"{leakage_tolerance:.1e}", LeakageWarning, stacklevel=2)
    return PrecoderSet(tuple(beams), pico_group, leak, leakage_tolerance, exceeded)


def eigen_precoders(models, streams_per_group, pico_group=None) -> PrecoderSet:
    """Naive beams: top eigenvectors of each covariance, no nulling."""
    beams = tuple(m.eigvecs[:, :s].copy() for m, s in zip(models, streams_per_group))
    leak = leakage_matrix(beams, models)
    return PrecoderSet(beams, pico_group, leak, np.inf, False)


def streams_for_partition(partition, pico_group: int | None) -> list:
    """``S_g`` = users in the group, plus one for the pico BS in its group."""
    return [k + (1 if g == pico_group else 0) for g, k in enumerate(partition)]


def assign_user_beams(precoders: PrecoderSet, partition) -> dict:
    """Map ``(group, user index)`` to a column of that group's beam matrix.

    The pico BS, keyed ``(pico_group, "pico")``, always takes column 0; users
    take the following columns in index order.
    """
    mapping = {}
    for g, K_g in enumerate(partition):
        offset = 1 if g == precoders.pico_group else 0
        if K_g + offset > precoders.stream_counts[g]:
            raise InfeasibleStreamsError(
                f"group {g}: {K_g + offset} receivers but only "
                f"{precoders.stream_counts[g]} beams")
        if offset:
            mapping[(g, "pico")] = 0
        for k in range(K_g):
            mapping[(g, k)] = k + offset
    return mapping
