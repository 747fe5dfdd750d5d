"""Flat ``key = value`` experiment configuration.

One assignment per line, ``#`` starts a comment.  Groups are numbered from 1
(``theta_1_deg``, ``Delta_1_deg``, ``K_1``, ...).  Angles are written in
degrees and powers in dB/dBm; :meth:`ExperimentConfig.scenario` converts
them to the internal linear SI representation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .params import CellLayout, ConfigError, OneRingGroup, Scenario, SystemParams

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def parse_range(spec: str, what: str = "range") -> tuple:
    """``"a:b:step"`` (inclusive of ``b``) or a comma-separated list."""
    spec = spec.strip()
    try:
        if ":" in spec:
            a, b, step = (float(v) for v in spec.split(":"))
            if step <= 0 or b < a:
                raise ConfigError(f"{what}: need a <= b and step > 0 in {spec!r}")
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            return tuple(float(v) for v in np.round(a + step * np.arange(n), 12))
        vals = tuple(float(v) for v in spec.split(",") if v.strip())
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{what}: cannot parse {spec!r}") from exc
    if not vals:
        raise ConfigError(f"{what}: empty grid")
    return vals


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class GroupSpec:
    theta_deg: float
    Delta_deg: float
    K: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    """Every knob of a run; defaults reproduce the reference setup."""

    P_m_dBm: float = 46.0
    P_s_dBm: float = 28.0
    bandwidth_Hz: float = 1e9
    noise_figure_dB: float = 10.0
    alpha: float = 4.0
    carrier_Hz: float = 28e9
    kappa_in_pico_terms: bool = True
    count_pico_stream: bool = False
    R_m: float = 200.0
    r_m: float = 50.0
    d_ms_m: float = 150.0
    pico_group: int = 1
    M: int = 64
    antenna_spacing: float = 0.5
    groups: tuple = (GroupSpec(-20.0, 20.0, 7), GroupSpec(10.0, 10.0, 3))
    partition_mode: str = "fixed"
    K: int = 10
    association: str = "relay"
    weighting: str = "conditional"
    seed: int = 1
    drops: int = 100_000
    channels_per_drop: int = 1
    thresholds_dB: tuple = parse_range("-10:20:2")
    sweep_threshold_dB: float = -40.0
    dms_grid_m: tuple = parse_range("60:190:10")
    antennas_grid: tuple = (32.0, 64.0, 128.0, 256.0)
    rtol: float = 1e-5
    validate_tolerance: float = 0.03

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{f.name}: must be finite")
        if self.partition_mode not in ("fixed", "random"):
            raise ConfigError("partition_mode: must be 'fixed' or 'random'")
        if self.association not in ("relay", "pathloss"):
            raise ConfigError("association: must be 'relay' or 'pathloss'")
        if self.weighting not in ("conditional", "joint"):
            raise ConfigError("weighting: must be 'conditional' or 'joint'")
        if not self.groups:
            raise ConfigError("num_groups: at least one group is required")
        if not 1 <= self.pico_group <= len(self.groups):
            raise ConfigError(f"pico_group: must lie in 1..{len(self.groups)}")
        if self.M < 1:
            raise ConfigError("M: must be a positive integer")
        if self.drops < 1 or self.channels_per_drop < 1:
            raise ConfigError("drops: counts must be >= 1")
        if self.partition_mode == "fixed" and sum(g.K for g in self.groups) < 1:
            raise ConfigError("K_g: a fixed partition needs at least one user")
        if self.partition_mode == "random" and self.K < 1:
            raise ConfigError("K: must be >= 1")
        if list(self.thresholds_dB) != sorted(self.thresholds_dB):
            raise ConfigError("thresholds_dB: must be sorted")
        # building the scenario validates the physical invariants
        self.scenario()

    @property
    def partition(self) -> tuple | None:
        if self.partition_mode == "random":
            return None
        return tuple(g.K for g in self.groups)

    @property
    def num_users(self) -> int:
        return self.K if self.partition_mode == "random" else sum(self.partition)

    def params(self) -> SystemParams:
        return SystemParams(self.P_m_dBm, self.P_s_dBm, self.bandwidth_Hz, self.noise_figure_dB,
                            self.alpha, self.carrier_Hz, self.kappa_in_pico_terms,
                            self.count_pico_stream)

    def scenario(self, num_antennas: int | None = None, d_ms: float | None = None,
                 r: float | None = None) -> Scenario:
        M = int(num_antennas or self.M)
        try:
            groups = tuple(OneRingGroup.from_degrees(g.theta_deg, g.Delta_deg, M,
                                                     self.antenna_spacing) for g in self.groups)
            layout = CellLayout(self.R_m, self.r_m if r is None else r,
                                self.d_ms_m if d_ms is None else d_ms, self.pico_group - 1)
            return Scenario(self.params(), layout, groups)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


_SCALARS = [f for f in fields(ExperimentConfig) if f.name != "groups"]


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse config text; missing keys keep the values of ``base``."""
    base = base or ExperimentConfig()
    raw = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k or not v:
            raise ConfigError(f"line {n}: empty key or value")
        if k in raw:
            raise ConfigError(f"line {n}: duplicate key {k!r}")
        raw[k] = v

    kw = {}
    for f in _SCALARS:
        if f.name not in raw:
            continue
        v = raw.pop(f.name)
        default = getattr(base, f.name)
        try:
            if isinstance(default, bool):
                if v.lower() not in _BOOL:
                    raise ValueError(v)
                kw[f.name] = _BOOL[v.lower()]
            elif isinstance(default, tuple):
                kw[f.name] = parse_range(v, f.name)
            elif isinstance(default, int):
                kw[f.name] = int(v)
            elif isinstance(default, float):
                kw[f.name] = float(v)
            else:
                kw[f.name] = v
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{f.name}: invalid value {v!r}") from exc

    G = len(base.groups)
    if "num_groups" in raw:
        try:
            G = int(raw.pop("num_groups"))
        except ValueError as exc:
            raise ConfigError("num_groups: must be an integer") from exc
        if G < 1:
            raise ConfigError("num_groups: must be >= 1")
    groups = []
    for g in range(1, G + 1):
        old = base.groups[g - 1] if g <= len(base.groups) else None
        vals = {}
        for key, attr, cast in ((f"theta_{g}_deg", "theta_deg", float),
                                (f"Delta_{g}_deg", "Delta_deg", float), (f"K_{g}", "K", int)):
            if key in raw:
                try:
                    vals[attr] = cast(raw.pop(key))
                except ValueError as exc:
                    raise ConfigError(f"{key}: invalid value") from exc
            elif old is not None:
                vals[attr] = getattr(old, attr)
            elif attr != "K":
                raise ConfigError(f"{key}: missing for group {g}")
        groups.append(GroupSpec(**vals))
    if raw:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(raw))}")
    return replace(base, groups=tuple(groups), **kw)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config {path} is not UTF-8 text") from exc
    return parse_config(text)


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in _SCALARS:
        lines.append(f"{f.name} = {_fmt(getattr(cfg, f.name))}")
    lines.append(f"num_groups = {len(cfg.groups)}")
    for g, spec in enumerate(cfg.groups, 1):
        lines += [f"theta_{g}_deg = {_fmt(spec.theta_deg)}",
                  f"Delta_{g}_deg = {_fmt(spec.Delta_deg)}",
                  f"K_{g} = {spec.K}"]
    return "\n".join(lines) + "\n"
