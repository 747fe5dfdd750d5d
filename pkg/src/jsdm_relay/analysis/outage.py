"""Per-position outage probabilities of macro- and pico-served users."""
from __future__ import annotations

import math

import numpy as np

from ..geometry import dist_user_pico
from .effective import LinkModel
from .qform import tail_product


def _require_threshold(x: float):
    if x < 0 or math.isnan(x):
        raise ValueError("SINR threshold must be non-negative")


class MacroLinkConstants:
    """Threshold-dependent, position-free part of a macro-served beam.

    With ``Xi`` the spectrum of ``A' - x A''``, the success probability at
    distance ``l`` and pico distance ``d_sk`` is

        mu_1 d_sk^a / (mu_1 d_sk^a + x s_p) * exp(-x / (rho mu_1)) / prod

    where ``mu_1 = l^-a Xi_1`` and ``s_p = kappa^2 P_s / (rho N0)``.
    """

    def __init__(self, lm: LinkModel, group: int, column: int, x: float):
        _require_threshold(x)
        self.x = x
        self.rho = lm.rho
        self.alpha = lm.alpha
        self.pico_scale = lm.pico_scale if lm.interference else 0.0
        if x == 0:
            self.xi1, self.prod = 1.0, 1.0
            return
        xi = lm.macro_spectrum(group, column, x)
        if xi.size == 0 or not xi[0] > 0:
            self.xi1, self.prod = 0.0, math.inf
        else:
            self.xi1, self.prod = float(xi[0]), tail_product(xi)

    @property
    def coefficient(self) -> float:
        """``1 / prod(1 - Xi_i / Xi_1)``."""
        return 0.0 if math.isinf(self.prod) else 1.0 / self.prod

    def success(self, l, d_sk):
        if self.x == 0:
            return np.ones(np.broadcast(l, d_sk).shape) if np.ndim(l) or np.ndim(d_sk) else 1.0
        if self.xi1 == 0:
            return 0.0 * np.asarray(l, dtype=float)
        a = self.alpha
        mu1 = self.xi1 * np.asarray(l, dtype=float) ** (-a)
        with np.errstate(divide="ignore", invalid="ignore"):
            expo = np.exp(-self.x / (self.rho * mu1))
            if self.pico_scale:
                dp = np.asarray(d_sk, dtype=float) ** a
                factor = mu1 * dp / (mu1 * dp + self.x * self.pico_scale)
                factor = np.where(np.isnan(factor), 1.0, factor)
            else:
                factor = 1.0
        return factor * expo / self.prod


class PicoLinkConstants:
    """Threshold-dependent constants of a pico-served user.

    The macro-to-pico hop contributes a constant factor, the pico-to-user hop
    depends on the user's distances ``l`` and ``d_sk``.
    """

    def __init__(self, lm: LinkModel, x: float, ideal_backhaul: bool = False):
        _require_threshold(x)
        g = lm.pico_group
        self.x = x
        self.rho = lm.rho
        self.alpha = lm.alpha
        self.pico_scale = lm.pico_scale
        self.interf = lm.pico_interference_eigs(g)
        d_ms = lm.scenario.layout.d_ms
        if x == 0 or ideal_backhaul:
            self.backhaul = 1.0
        else:
            xi = lm.pico_link_spectrum(x)
            if xi.size == 0 or not xi[0] > 0:
                self.backhaul = 0.0
            else:
                mu1 = d_ms ** (-self.alpha) * xi[0]
                self.backhaul = math.exp(-x / (self.rho * mu1)) / tail_product(xi)

    def access_success(self, l, d_sk):
        """``Pr(SINR_sk,g > x)`` of the pico-to-user hop."""
        if self.x == 0:
            return np.ones(np.broadcast(l, d_sk).shape) if np.ndim(l) or np.ndim(d_sk) else 1.0
        a = self.alpha
        l = np.asarray(l, dtype=float)
        dp = np.asarray(d_sk, dtype=float) ** a
        expo = np.exp(-self.x * dp / (self.rho * self.pico_scale))
        if self.interf.size:
            ratio = self.x * (l ** (-a) * dp / self.pico_scale)[..., None] * self.interf
            expo = expo / np.prod(1.0 + ratio, axis=-1)
        return expo

    def success(self, l, d_sk):
        return self.backhaul * self.access_success(l, d_sk)


def user_outage_macro(x: float, l: float, beta: float, lm: LinkModel, group: int,
                      column: int) -> float:
    """Outage of a macro-served user at polar position ``(l, beta)``."""
    c = MacroLinkConstants(lm, group, column, x)
    d_sk = _pico_distance(lm, l, beta)
    return float(1.0 - c.success(l, d_sk))


def user_outage_pico(x: float, l: float, beta: float, lm: LinkModel,
                     ideal_backhaul: bool = False) -> float:
    """Outage of a pico-served user: ``1 - Pr(SINR_ms > x) Pr(SINR_sk,g > x)``."""
    if not lm.has_pico:
        raise ValueError("scenario has no pico BS")
    c = PicoLinkConstants(lm, x, ideal_backhaul)
    d_sk = _pico_distance(lm, l, beta)
    return float(1.0 - c.success(l, d_sk))


def _pico_distance(lm: LinkModel, l, beta):
    if not lm.has_pico:
        return np.inf
    return dist_user_pico(l, beta, lm.scenario.layout, lm.scenario.pico_aoa)
