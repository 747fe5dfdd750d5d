"""Experiment orchestration: outage curves, parameter sweeps and the
analysis-versus-simulation check, all emitting plain CSV rows."""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis.curves import no_pico, outage_function
from .config import ExperimentConfig
from .geometry import association_probability
from .simulation import TrialConfig, estimate_outage_curve

CURVE_COLUMNS = ("threshold_dB", "analytic", "noise_limited", "monte_carlo", "mc_stderr",
                 "no_pico_analytic")
SWEEP_VARS = ("dms", "antennas", "strategy")


def num_threads() -> int:
    """Worker cap from ``JSDM_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("JSDM_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(f, items):
    items = list(items)
    n = min(num_threads(), len(items)) or 1
    if n == 1:
        return [f(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(f, items))


def _outage(cfg: ExperimentConfig, scenario, **kw):
    return outage_function(scenario, partition=cfg.partition,
                           K=cfg.K if cfg.partition is None else None,
                           rtol=cfg.rtol, weighting=cfg.weighting, **kw)


def _trial(cfg: ExperimentConfig, mode="sinr", rule=None) -> TrialConfig:
    return TrialConfig(num_drops=cfg.drops, channels_per_drop=cfg.channels_per_drop,
                       seed=cfg.seed, mode=mode, rule=rule or cfg.association)


def monte_carlo(cfg: ExperimentConfig, scenario=None, mode="sinr", rule=None):
    scenario = scenario or cfg.scenario()
    return estimate_outage_curve(_trial(cfg, mode, rule), scenario, cfg.thresholds_dB,
                                 K=cfg.K if cfg.partition is None else None,
                                 partition=cfg.partition)


def run_curve(cfg: ExperimentConfig, with_monte_carlo: bool = True) -> list:
    """One row per threshold with the six curve columns."""
    sc = cfg.scenario()
    th = list(cfg.thresholds_dB)
    analytic = _outage(cfg, sc)
    nl = _outage(cfg, sc, noise_limited=True)
    base = _outage(cfg, no_pico(sc))
    a = _pmap(analytic, th)
    n = _pmap(nl, th)
    b = _pmap(base, th)
    if with_monte_carlo:
        mc = monte_carlo(cfg, sc)
        m, se = mc.probabilities, mc.stderr
    else:
        m = se = [float("nan")] * len(th)
    return [dict(zip(CURVE_COLUMNS, row)) for row in zip(th, a, n, m, se, b)]


def run_sweep(cfg: ExperimentConfig, variable: str) -> list:
    """Rows of a d_ms, antenna-count or association-strategy sweep."""
    if variable == "dms":
        grid = list(cfg.dms_grid_m)
        if not grid:
            raise ValueError("empty sweep grid")

        def point(d):
            sc = cfg.scenario(d_ms=d)
            g = sc.layout.pico_group
            split = association_probability(sc.layout, sc.groups[g], sc.total_spread)
            return {"d_ms_m": d, "p_gs": split.p_gs,
                    "analytic": _outage(cfg, sc)(cfg.sweep_threshold_dB),
                    "threshold_dB": cfg.sweep_threshold_dB}
        return _pmap(point, grid)
    if variable == "antennas":
        grid = [int(m) for m in cfg.antennas_grid]
        if not grid:
            raise ValueError("empty sweep grid")

        def point(M):
            f = _outage(cfg, cfg.scenario(num_antennas=M))
            return [{"M": M, "threshold_dB": t, "analytic": f(t)} for t in cfg.thresholds_dB]
        return [row for rows in _pmap(point, grid) for row in rows]
    if variable == "strategy":
        # identical seeds give both rules the same drops and channels
        sc = cfg.scenario()
        relay = monte_carlo(cfg, sc, rule="relay")
        path = monte_carlo(cfg, sc, rule="pathloss")
        return [{"threshold_dB": t, "relay_rule": r, "relay_rule_stderr": rs,
                 "pathloss_rule": p, "pathloss_rule_stderr": ps}
                for t, r, rs, p, ps in zip(cfg.thresholds_dB, relay.probabilities, relay.stderr,
                                           path.probabilities, path.stderr)]
    raise ValueError(f"sweep variable must be one of {SWEEP_VARS}")


def assoc_summary(cfg: ExperimentConfig) -> dict:
    sc = cfg.scenario()
    g = sc.layout.pico_group
    s = association_probability(sc.layout, sc.groups[g], sc.total_spread)
    return {"p_gm": s.p_gm, "p_gs": s.p_gs, "theta_rad": s.theta, "theta0_rad": s.theta0,
            "upsilon": s.upsilon, "clipped": s.clipped}


@dataclass(frozen=True)
class ValidationReport:
    rows: list
    tolerance: float
    max_gap: float
    worst_threshold_dB: float
    passed: bool

    def text(self) -> str:
        out = [f"{'threshold_dB':>12} {'analytic':>10} {'monte_carlo':>11} {'stderr':>9} "
               f"{'gap':>9} {'z':>7}"]
        for r in self.rows:
            out.append(f"{r['threshold_dB']:12.2f} {r['analytic']:10.5f} {r['monte_carlo']:11.5f} "
                       f"{r['mc_stderr']:9.2e} {r['gap']:9.2e} {r['z']:7.2f}")
        verdict = "PASS" if self.passed else "FAIL"
        out.append(f"max |gap| = {self.max_gap:.4g} at {self.worst_threshold_dB:g} dB "
                   f"(tolerance {self.tolerance:g}): {verdict}")
        return "\n".join(out)


def validate(cfg: ExperimentConfig) -> ValidationReport:
    """Compare the analytic cell outage with the Monte Carlo estimate."""
    sc = cfg.scenario()
    f = _outage(cfg, sc)
    a = _pmap(f, cfg.thresholds_dB)
    mc = monte_carlo(cfg, sc)
    rows = []
    for t, ai, mi, si in zip(cfg.thresholds_dB, a, mc.probabilities, mc.stderr):
        gap = ai - mi
        z = gap / si if si > 0 else (0.0 if abs(gap) < 1e-12 else np.inf * np.sign(gap))
        rows.append({"threshold_dB": t, "analytic": ai, "monte_carlo": mi, "mc_stderr": si,
                     "gap": gap, "z": z})
    worst = max(rows, key=lambda r: abs(r["gap"]))
    max_gap = abs(worst["gap"])
    return ValidationReport(rows, cfg.validate_tolerance, max_gap, worst["threshold_dB"],
                            max_gap <= cfg.validate_tolerance)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def to_csv(rows: list, columns=None) -> str:
    """Comma-separated text with a header row and LF line endings."""
    if not rows:
        return ""
    columns = list(columns or rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def read_csv(text: str) -> list:
    return list(csv.DictReader(io.StringIO(text)))


def with_overrides(cfg: ExperimentConfig, seed=None, drops=None, thresholds=None):
    kw = {}
    if seed is not None:
        kw["seed"] = seed
    if drops is not None:
        kw["drops"] = drops
    if thresholds is not None:
        kw["thresholds_dB"] = thresholds
    return replace(cfg, **kw) if kw else cfg
