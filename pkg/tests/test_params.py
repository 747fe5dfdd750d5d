import math

import pytest

from jsdm_relay.params import (CellLayout, ConfigError, OneRingGroup, Scenario, SystemParams,
                               check_disjoint_wedges, db2lin, lin2db, table1_scenario)


def test_noise_floor_and_kappa():
    p = SystemParams()
    assert p.N0_dBm == pytest.approx(-74.0)
    lam = 299_792_458.0 / 28e9
    assert p.kappa2 == pytest.approx((lam / (4 * math.pi)) ** 2, rel=1e-14)
    assert lin2db(db2lin(13.7)) == pytest.approx(13.7)


def test_rho_and_stream_counting():
    p = SystemParams()
    ref = db2lin(46.0) * p.kappa2 / (10 * db2lin(-74.0))
    assert p.rho(10) == pytest.approx(ref, rel=1e-12)
    assert p.rho_for(11, True) == p.rho(10)
    assert p.rho_for(10, False) == p.rho(10)
    counted = SystemParams(count_pico_stream=True)
    assert counted.rho_for(11, True) == counted.rho(11)
    with pytest.raises(ConfigError):
        p.rho(0)


def test_pico_gain_flag():
    assert SystemParams().pico_gain == pytest.approx(db2lin(28.0) * SystemParams().kappa2)
    assert SystemParams(kappa_in_pico_terms=False).pico_gain == pytest.approx(db2lin(28.0))


@pytest.mark.parametrize("kw", [dict(alpha=2.0), dict(bandwidth_Hz=0.0), dict(carrier_Hz=-1.0),
                                dict(P_m_dBm=float("inf"))])
def test_param_errors(kw):
    with pytest.raises(ConfigError):
        SystemParams(**kw)


def test_group_and_scenario_checks():
    g = OneRingGroup.from_degrees(-20.0, 20.0, 64)
    assert g.wedge == pytest.approx((math.radians(-40), 0.0))
    with pytest.raises(ConfigError):
        check_disjoint_wedges([g, OneRingGroup.from_degrees(-5.0, 10.0, 64)])
    with pytest.raises(ConfigError):
        Scenario(SystemParams(), CellLayout(), (g, OneRingGroup.from_degrees(10.0, 10.0, 32)))
    with pytest.raises(ConfigError):
        Scenario(SystemParams(), CellLayout(pico_group=3), (g,))
    with pytest.raises(ConfigError):
        Scenario(SystemParams(), CellLayout(), ())


def test_table1_values():
    sc = table1_scenario(128)
    assert sc.num_antennas == 128
    assert sc.total_spread == pytest.approx(math.radians(30))
    assert sc.pico_aoa == pytest.approx(math.radians(-20))
    assert (sc.layout.R, sc.layout.r, sc.layout.d_ms) == (200.0, 50.0, 150.0)
    assert not CellLayout(200, 0.0, 150).has_pico
