import math

import numpy as np
import pytest

from jsdm_relay.analysis.effective import LinkModel
from jsdm_relay.analysis.outage import PicoLinkConstants, user_outage_macro, user_outage_pico
from jsdm_relay.geometry import dist_user_pico
from jsdm_relay.params import CellLayout, OneRingGroup, Scenario, SystemParams
from jsdm_relay.simulation import sample_user_sinr


def _mc_outage(sinr, x):
    p = float(np.mean(sinr < x))
    return p, math.sqrt(max(p * (1 - p), 1.0 / sinr.size) / sinr.size)


def test_zero_threshold(table1_lm):
    th = table1_lm.scenario.pico_aoa
    assert user_outage_macro(0.0, 100.0, th, table1_lm, 0, 1) == 0.0
    assert user_outage_pico(0.0, 160.0, th, table1_lm) == 0.0
    with pytest.raises(ValueError):
        user_outage_macro(-1.0, 100.0, th, table1_lm, 0, 1)


def test_noise_only_closed_form():
    g = OneRingGroup.from_degrees(5.0, 12.0, 16)
    sc = Scenario(SystemParams(), CellLayout(200.0, 0.0, 150.0), (g,))
    lm = LinkModel(sc, (2,), interference=False)
    for x, l in ((1e-4, 60.0), (1e-3, 30.0), (0.5, 10.0)):
        gain = lm.beam_gain(0, 1)
        ref = 1 - math.exp(-x * l ** 4 / (lm.rho * gain))
        assert user_outage_macro(x, l, 0.3, lm, 0, 1) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("x_dB,l", [(0.0, 100.0), (-30.0, 100.0), (-40.0, 60.0)])
def test_macro_user_vs_monte_carlo(table1, table1_lm, x_dB, l):
    x = 10 ** (x_dB / 10)
    th = table1.pico_aoa
    p = user_outage_macro(x, l, th, table1_lm, 0, table1_lm.beam_map[(0, 0)])
    sinr = sample_user_sinr(table1, (7, 3), l, th, 1_000_000, np.random.default_rng(11),
                            group=0, user=0)
    emp, se = _mc_outage(sinr, x)
    assert abs(p - emp) <= 3 * se


@pytest.mark.parametrize("x_dB,l", [(0.0, 160.0), (-30.0, 160.0), (-40.0, 190.0)])
def test_pico_user_vs_monte_carlo(table1, table1_lm, x_dB, l):
    x = 10 ** (x_dB / 10)
    th = table1.pico_aoa
    p = user_outage_pico(x, l, th, table1_lm)
    sinr = sample_user_sinr(table1, (7, 3), l, th, 1_000_000, np.random.default_rng(12),
                            served_by="pico")
    emp, se = _mc_outage(sinr, x)
    assert abs(p - emp) <= 3 * se


def test_ideal_backhaul_leaves_access_hop(table1, table1_lm):
    x = 10 ** (-35 / 10)
    th = table1.pico_aoa
    c = PicoLinkConstants(table1_lm, x, ideal_backhaul=True)
    d = dist_user_pico(170.0, th + 0.1, table1.layout, th)
    assert user_outage_pico(x, 170.0, th + 0.1, table1_lm, ideal_backhaul=True) == pytest.approx(
        1 - float(c.access_success(170.0, d)))
    # a real backhaul can only hurt
    assert user_outage_pico(x, 170.0, th + 0.1, table1_lm) >= user_outage_pico(
        x, 170.0, th + 0.1, table1_lm, ideal_backhaul=True)


def test_outage_monotone_in_threshold(table1, table1_lm):
    th = table1.pico_aoa
    xs = 10 ** (np.linspace(-60, 20, 30) / 10)
    m = [user_outage_macro(x, 120.0, th - 0.2, table1_lm, 0, 3) for x in xs]
    s = [user_outage_pico(x, 170.0, th, table1_lm) for x in xs]
    for seq in (m, s):
        assert np.all(np.diff(seq) >= -1e-12)
        assert all(0 <= v <= 1 for v in seq)
