"""Outage analysis and simulation of a relay-assisted mmWave macro/pico cell
with per-group two-stage beamforming."""
from .params import CellLayout, ConfigError, OneRingGroup, Scenario, SystemParams, table1_scenario

__version__ = "0.1.0"
