"""System-level parameter containers and unit conversions.

All quantities are stored in linear SI units (powers in mW, distances in
meters, angles in radians).  Decibel inputs are converted once, in the
constructors below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_PER_HZ = -174.0


class ConfigError(ValueError):
    """Raised when a parameter set violates its invariants."""


def db2lin(value_db):
    return 10.0 ** (value_db / 10.0)


def lin2db(value):
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class SystemParams:
    """Link-budget scalars of the macro/pico cell.

    Parameters
    ----------
    P_m_dBm, P_s_dBm : float
        Transmit power of the macro and the pico BS.
    bandwidth_Hz : float
        System bandwidth, enters the thermal noise floor.
    noise_figure_dB : float
        Receiver noise figure.
    alpha : float
        Path-loss exponent.
    carrier_Hz : float
        Carrier frequency; sets ``kappa2 = (lambda_c / 4 pi)^2``.
    kappa_in_pico_terms : bool
        Apply ``kappa2`` to every pico transmit-power term (interference at
        macro users and the pico-to-user hop).  ``False`` uses the bare
        ``P_s`` in all of them.
    count_pico_stream : bool
        Whether the stream feeding the pico BS counts in ``S`` when the
        macro power is split, ``rho = P_m kappa2 / (S N0)``.
    """

    P_m_dBm: float = 46.0
    P_s_dBm: float = 28.0
    bandwidth_Hz: float = 1e9
    noise_figure_dB: float = 10.0
    alpha: float = 4.0
    carrier_Hz: float = 28e9
    kappa_in_pico_terms: bool = True
    count_pico_stream: bool = False

    def __post_init__(self):
        for name in ("P_m_dBm", "P_s_dBm", "noise_figure_dB"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.bandwidth_Hz <= 0:
            raise ConfigError("bandwidth_Hz must be positive")
        if self.carrier_Hz <= 0:
            raise ConfigError("carrier_Hz must be positive")
        if not self.alpha > 2:
            raise ConfigError("alpha must exceed 2")

    @property
    def P_m(self) -> float:
        return db2lin(self.P_m_dBm)

    @property
    def P_s(self) -> float:
        return db2lin(self.P_s_dBm)

    @property
    def kappa2(self) -> float:
        wavelength = SPEED_OF_LIGHT / self.carrier_Hz
        return (wavelength / (4.0 * math.pi)) ** 2

    @property
    def N0_dBm(self) -> float:
        return (THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(self.bandwidth_Hz)
                + self.noise_figure_dB)

    @property
    def N0(self) -> float:
        return db2lin(self.N0_dBm)

    def rho(self, num_streams: int) -> float:
        """Per-stream transmit SNR ``P_m kappa^2 / (S N0)``."""
        if num_streams < 1:
            raise ConfigError("at least one data stream is required")
        return self.P_m * self.kappa2 / (num_streams * self.N0)

    def rho_for(self, total_streams: int, has_pico: bool) -> float:
        """``rho`` for a precoder set with ``total_streams`` beams."""
        extra = 1 if has_pico and not self.count_pico_stream else 0
        return self.rho(total_streams - extra)

    @property
    def pico_gain(self) -> float:
        """Power scaling of pico transmissions, ``kappa^2 P_s`` or ``P_s``."""
        return self.P_s * (self.kappa2 if self.kappa_in_pico_terms else 1.0)


@dataclass(frozen=True)
class OneRingGroup:
    """User group of the one-ring scattering model.

    Angles in radians.  Use :meth:`from_degrees` at configuration boundaries.
    """

    aoa: float
    spread: float
    num_antennas: int
    antenna_spacing: float = 0.5

    def __post_init__(self):
        if not 0 < self.spread < math.pi / 2:
            raise ConfigError("angular spread must lie in (0, pi/2)")
        if int(self.num_antennas) != self.num_antennas or self.num_antennas < 1:
            raise ConfigError("num_antennas must be a positive integer")
        if not self.antenna_spacing > 0:
            raise ConfigError("antenna_spacing must be positive")

    @classmethod
    def from_degrees(cls, aoa_deg, spread_deg, num_antennas, antenna_spacing=0.5):
        return cls(math.radians(aoa_deg), math.radians(spread_deg),
                   int(num_antennas), antenna_spacing)

    @property
    def wedge(self) -> tuple[float, float]:
        return self.aoa - self.spread, self.aoa + self.spread

    def with_antennas(self, num_antennas: int) -> "OneRingGroup":
        return OneRingGroup(self.aoa, self.spread, num_antennas, self.antenna_spacing)


@dataclass(frozen=True)
class CellLayout:
    """Macro cell of radius ``R`` with a pico BS at distance ``d_ms``.

    The pico sits on the AoA of group ``pico_group``.  ``r == 0`` describes a
    cell without a pico BS.
    """

    R: float = 200.0
    r: float = 50.0
    d_ms: float = 150.0
    pico_group: int = 0

    def __post_init__(self):
        if not self.R > 0:
            raise ConfigError("macro radius R must be positive")
        if self.r < 0:
            raise ConfigError("pico radius r must be non-negative")
        if not 0 < self.d_ms <= self.R:
            raise ConfigError("d_ms must lie in (0, R]")
        if self.r > 0 and not self.r < self.d_ms:
            raise ConfigError("pico radius r must be smaller than d_ms")
        if self.r > 2 * self.d_ms:
            raise ConfigError("r must not exceed 2 d_ms")

    @property
    def has_pico(self) -> bool:
        return self.r > 0


def check_disjoint_wedges(groups) -> None:
    spans = sorted(g.wedge for g in groups)
    for (lo0, hi0), (lo1, hi1) in zip(spans, spans[1:]):
        if lo1 < hi0 - 1e-12:
            raise ConfigError("group wedges overlap")


@dataclass(frozen=True)
class Scenario:
    """Everything needed to evaluate a cell: link budget, layout and groups."""

    params: SystemParams = field(default_factory=SystemParams)
    layout: CellLayout = field(default_factory=CellLayout)
    groups: tuple = ()

    def __post_init__(self):
        if not self.groups:
            raise ConfigError("at least one user group is required")
        object.__setattr__(self, "groups", tuple(self.groups))
        check_disjoint_wedges(self.groups)
        sizes = {g.num_antennas for g in self.groups}
        if len(sizes) != 1:
            raise ConfigError("all groups must share the macro array size")
        if not 0 <= self.layout.pico_group < len(self.groups):
            raise ConfigError("pico_group out of range")

    @property
    def num_antennas(self) -> int:
        return self.groups[0].num_antennas

    @property
    def total_spread(self) -> float:
        return sum(g.spread for g in self.groups)

    @property
    def pico_aoa(self) -> float:
        return self.groups[self.layout.pico_group].aoa


def table1_scenario(num_antennas: int = 64, **layout_overrides) -> Scenario:
    """Reference setup: two groups at -20 and 10 degrees, 28 GHz, R=200 m."""
    groups = (
        OneRingGroup.from_degrees(-20.0, 20.0, num_antennas),
        OneRingGroup.from_degrees(10.0, 10.0, num_antennas),
    )
    layout = CellLayout(**{"R": 200.0, "r": 50.0, "d_ms": 150.0, **layout_overrides})
    return Scenario(SystemParams(), layout, groups)
