"""Effective quadratic-form matrices of the three link types.

Every SINR event ``SINR > x`` is rewritten as ``w^H A(x) w > c`` with
``A(x) = d^-alpha (A' - x A'')`` in the whitened channel coordinates
``w`` of the receiver's group, where ``h = U Lambda^{1/2} w``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..channel import DEFAULT_RANK_THRESHOLD, CovarianceModel, covariance_model
from ..params import OneRingGroup, Scenario
from ..precoding import (DEFAULT_LEAKAGE_TOLERANCE, PrecoderSet, assign_user_beams,
                         design_bd_precoders, streams_for_partition)
from .qform import hermitian_spectrum

CONTEXTS = ("macro-user", "macro-pico", "pico-user")


@dataclass(frozen=True)
class EffectiveMatrices:
    A_prime: np.ndarray
    A_dprime: np.ndarray
    context: str

    def combined(self, x: float, path_gain: float = 1.0) -> np.ndarray:
        return path_gain * (self.A_prime - x * self.A_dprime)

    def spectrum(self, x: float, path_gain: float = 1.0) -> np.ndarray:
        return hermitian_spectrum(self.combined(x, path_gain))


def _gram(F: np.ndarray) -> np.ndarray:
    return F @ F.conj().T


def _check_dims(model: CovarianceModel, precoders: PrecoderSet):
    M = model.num_antennas
    for B in precoders.beams:
        if B.shape[0] != M:
            raise ValueError(f"beam dimension {B.shape[0]} does not match {M} antennas")


def macro_link_matrices(model: CovarianceModel, precoders: PrecoderSet, group: int,
                        column: int, context: str = "macro-user",
                        interference: bool = True) -> EffectiveMatrices:
    """``A'`` from the serving beam, ``A''`` from every other active beam.

    The other beams are the remaining columns of the serving group (the pico
    stream included) and all columns of the other groups.
    """
    _check_dims(model, precoders)
    F = model.sqrt_factor.conj().T @ precoders.all_beams
    serving = sum(precoders.stream_counts[:group]) + column
    a = F[:, serving:serving + 1]
    A1 = _gram(a)
    if interference:
        A2 = _gram(np.delete(F, serving, axis=1))
    else:
        A2 = np.zeros_like(A1)
    return EffectiveMatrices(A1, A2, context)


def pico_hop_matrices(model: CovarianceModel, precoders: PrecoderSet, signal_scale: float,
                      d_mk: float, d_sk: float, alpha: float,
                      interference: bool = True) -> EffectiveMatrices:
    """Second hop, pico BS to its user.

    The variable is ``[h_sk, w_mk]``; ``A'`` has ``signal_scale =
    kappa^2 P_s / (rho N0)`` in its first entry, ``A''`` carries the macro
    interference of all beams of all groups scaled by ``(d_mk / d_sk)^-alpha``.
    """
    _check_dims(model, precoders)
    r = model.rank
    A1 = np.zeros((r + 1, r + 1), dtype=complex)
    A1[0, 0] = signal_scale
    A2 = np.zeros_like(A1)
    if interference:
        F = model.sqrt_factor.conj().T @ precoders.all_beams
        A2[1:, 1:] = (d_mk / d_sk) ** (-alpha) * _gram(F)
    return EffectiveMatrices(A1, A2, "pico-user")


def build_effective_matrices(precoders: PrecoderSet, models, context: str, group: int = 0,
                             column: int = 0, interference: bool = True,
                             signal_scale: float | None = None, d_mk: float | None = None,
                             d_sk: float | None = None, alpha: float = 4.0) -> EffectiveMatrices:
    """Dispatch on the link context.

    ``macro-user`` serves ``column`` of ``group``; ``macro-pico`` serves the
    pico stream; ``pico-user`` needs ``signal_scale``, ``d_mk`` and ``d_sk``.
    """
    if context == "macro-user":
        return macro_link_matrices(models[group], precoders, group, column, context, interference)
    if context == "macro-pico":
        g = precoders.pico_group
        return macro_link_matrices(models[g], precoders, g, 0, context, interference)
    if context == "pico-user":
        if signal_scale is None or d_mk is None or d_sk is None:
            raise ValueError("pico-user context needs signal_scale, d_mk and d_sk")
        return pico_hop_matrices(models[group], precoders, signal_scale, d_mk, d_sk, alpha,
                                 interference)
    raise ValueError(f"unknown context {context!r}")


@lru_cache(maxsize=64)
def cached_covariance(group: OneRingGroup, rank_threshold: float) -> CovarianceModel:
    return covariance_model(group, rank_threshold)


class LinkModel:
    """Covariances, beams and link constants for one user partition.

    Parameters
    ----------
    scenario : Scenario
    partition : sequence of int
        Users per group.
    interference : bool
        ``False`` zeroes intra/inter-group and pico interference (SNR only).
    """

    def __init__(self, scenario: Scenario, partition, interference: bool = True,
                 rank_threshold: float = DEFAULT_RANK_THRESHOLD,
                 leakage_tolerance: float = DEFAULT_LEAKAGE_TOLERANCE):
        partition = tuple(int(k) for k in partition)
        if len(partition) != len(scenario.groups):
            raise ValueError("partition needs one entry per group")
        if any(k < 0 for k in partition):
            raise ValueError("partition entries must be non-negative")
        self.scenario = scenario
        self.partition = partition
        self.interference = interference
        self.has_pico = scenario.layout.has_pico
        self.pico_group = scenario.layout.pico_group if self.has_pico else None
        self.models = tuple(cached_covariance(g, rank_threshold) for g in scenario.groups)
        streams = streams_for_partition(partition, self.pico_group)
        self.precoders = design_bd_precoders(self.models, streams, leakage_tolerance,
                                             pico_group=self.pico_group)
        self.beam_map = assign_user_beams(self.precoders, partition)
        p = scenario.params
        self.num_streams = self.precoders.total_streams
        self.rho = p.rho_for(self.num_streams, self.has_pico)
        self.alpha = p.alpha
        self.noise = p.N0
        # kappa^2 P_s / (rho N0): pico signal level relative to the per-stream noise term
        self.pico_scale = p.pico_gain / (self.rho * p.N0) if self.has_pico else 0.0
        self._F = tuple(m.sqrt_factor.conj().T @ self.precoders.all_beams for m in self.models)
        self._pico_interf = {}

    @property
    def K(self) -> int:
        return sum(self.partition)

    def user_columns(self, group: int) -> list:
        return [self.beam_map[(group, k)] for k in range(self.partition[group])]

    def beam(self, group: int, column: int) -> np.ndarray:
        return self.precoders.beams[group][:, column]

    def beam_gain(self, group: int, column: int) -> float:
        """``b^H R_g b``."""
        b = self.beam(group, column)
        return float(np.real(b.conj() @ self.models[group].matrix @ b))

    def macro_matrices(self, group: int, column: int) -> EffectiveMatrices:
        return macro_link_matrices(self.models[group], self.precoders, group, column,
                                   interference=self.interference)

    def pico_link_matrices(self) -> EffectiveMatrices:
        g = self.pico_group
        return macro_link_matrices(self.models[g], self.precoders, g, 0, "macro-pico",
                                   self.interference)

    def macro_spectrum(self, group: int, column: int, x: float) -> np.ndarray:
        """Eigenvalues of ``A' - x A''`` (no path loss) for a macro-served beam."""
        return self.macro_matrices(group, column).spectrum(x)

    def pico_link_spectrum(self, x: float) -> np.ndarray:
        return self.pico_link_matrices().spectrum(x)

    def pico_interference_eigs(self, group: int) -> np.ndarray:
        """Eigenvalues of ``Lambda^{1/2} U^H (sum_g' B_g' B_g'^H) U Lambda^{1/2}``."""
        if group not in self._pico_interf:
            if self.interference:
                vals = np.linalg.eigvalsh(_gram(self._F[group]))
                vals = np.clip(vals[::-1], 0.0, None)
                vals = vals[vals > 1e-12 * max(vals[0], 1e-300)]
            else:
                vals = np.zeros(0)
            self._pico_interf[group] = vals
        return self._pico_interf[group]
