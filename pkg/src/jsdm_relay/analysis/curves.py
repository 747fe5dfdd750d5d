"""Outage curves over threshold grids and their inversion."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..params import CellLayout, Scenario
from .averaging import (DEFAULT_RTOL, cell_outage_breakdown, cell_outage_random,
                        composition_weights)
from .effective import LinkModel
from .noise_limited import noise_limited_cell_outage

PROVENANCES = ("analytic", "monte-carlo", "noise-limited")


def fingerprint(obj) -> str:
    """Short stable hash of a configuration's ``repr``."""
    return hashlib.sha1(repr(obj).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class OutageCurve:
    thresholds_dB: np.ndarray
    probabilities: np.ndarray
    provenance: str = "analytic"
    config_fingerprint: str = ""
    stderr: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        t = np.asarray(self.thresholds_dB, dtype=float)
        p = np.asarray(self.probabilities, dtype=float)
        if t.shape != p.shape:
            raise ValueError("thresholds and probabilities differ in length")
        object.__setattr__(self, "thresholds_dB", t)
        object.__setattr__(self, "probabilities", p)

    def threshold_at(self, level: float) -> float:
        """Linearly interpolated threshold (dB) where the curve crosses ``level``."""
        p, t = self.probabilities, self.thresholds_dB
        if not p[0] <= level <= p[-1]:
            raise ValueError(f"level {level} outside the curve's range")
        return float(np.interp(level, p, t))


def no_pico(scenario: Scenario) -> Scenario:
    lay = scenario.layout
    return Scenario(scenario.params, CellLayout(lay.R, 0.0, lay.d_ms, lay.pico_group),
                    scenario.groups)


def outage_function(scenario: Scenario, partition=None, K: int | None = None,
                    interference: bool = True, noise_limited: bool = False,
                    rtol: float = DEFAULT_RTOL, weighting: str = "conditional"):
    """Return ``f(threshold_dB) -> outage`` for a fixed or random partition."""
    if (partition is None) == (K is None):
        raise ValueError("give exactly one of partition and K")
    if noise_limited:
        if partition is not None:
            lm = LinkModel(scenario, partition, interference=False)
            return lambda t: noise_limited_cell_outage(10 ** (t / 10), lm, rtol)
        shares = [g.spread / scenario.total_spread for g in scenario.groups]
        mix = [(w, LinkModel(scenario, comp, interference=False))
               for comp, w in composition_weights(K, shares).items()]
        return lambda t: sum(w * noise_limited_cell_outage(10 ** (t / 10), lm, rtol)
                             for w, lm in mix)
    if partition is not None:
        lm = LinkModel(scenario, partition, interference)
        return lambda t: cell_outage_breakdown(10 ** (t / 10), lm, rtol, weighting).outage
    cache = {}
    return lambda t: cell_outage_random(K, 10 ** (t / 10), scenario, interference, rtol,
                                        weighting=weighting, cache=cache)[0]


def analytic_curve(scenario: Scenario, thresholds_dB, partition=None, K: int | None = None,
                   interference: bool = True, noise_limited: bool = False,
                   rtol: float = DEFAULT_RTOL, weighting: str = "conditional") -> OutageCurve:
    f = outage_function(scenario, partition, K, interference, noise_limited, rtol, weighting)
    th = np.asarray(thresholds_dB, dtype=float)
    vals = np.array([f(t) for t in th])
    prov = "noise-limited" if noise_limited else "analytic"
    key = (scenario, partition, K, interference, weighting)
    return OutageCurve(th, np.clip(vals, 0.0, 1.0), prov, fingerprint(key))


def invert_outage(f, level: float, lo: float = -90.0, hi: float = 40.0,
                  xtol: float = 1e-4) -> float:
    """Threshold in dB at which the non-decreasing ``f`` reaches ``level``."""
    g = lambda t: f(t) - level
    if g(lo) > 0 or g(hi) < 0:
        raise ValueError(f"outage level {level} not bracketed in [{lo}, {hi}] dB")
    return optimize.brentq(g, lo, hi, xtol=xtol)


def horizontal_gap(f_a, f_b, level: float, **kw) -> float:
    """``threshold_a - threshold_b`` in dB at a common outage level."""
    return invert_outage(f_a, level, **kw) - invert_outage(f_b, level, **kw)


def relay_gain_dB(scenario: Scenario, partition, level: float = 0.1,
                  rtol: float = DEFAULT_RTOL) -> float:
    """Threshold gain of the relay-assisted cell over the same cell without
    a pico BS, at outage ``level``."""
    with_pico = outage_function(scenario, partition, rtol=rtol)
    without = outage_function(no_pico(scenario), partition, rtol=rtol)
    return horizontal_gap(with_pico, without, level)
