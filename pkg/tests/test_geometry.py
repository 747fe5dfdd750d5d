import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate

from jsdm_relay.geometry import (DomainError, association_probability, chord_integral,
                                 disk_within_relay_rule, dist_user_pico, drop_users,
                                 is_pico_associated, is_pico_associated_pathloss,
                                 p_gs_closed_form, p_gs_lens_areas, pico_half_angle,
                                 pico_region_area, pico_region_upper, region_is_clipped)
from jsdm_relay.params import CellLayout, ConfigError, OneRingGroup, SystemParams, table1_scenario

TH = table1_scenario(8)
LAY = TH.layout
G1 = TH.groups[0]


@st.composite
def layouts(draw):
    R = draw(st.floats(50, 500))
    d_ms = draw(st.floats(0.1, 1.0)) * R
    r = draw(st.floats(0.01, 0.999)) * min(d_ms, R)
    return CellLayout(R, r, d_ms)


def test_association_examples():
    th = G1.aoa
    assert is_pico_associated(LAY.d_ms, th, LAY, th)
    assert not is_pico_associated(0.0, th, LAY, th)
    assert not is_pico_associated(LAY.d_ms + LAY.r + 1.0, th, LAY, th)


def test_distance_examples():
    assert dist_user_pico(LAY.d_ms, 0.3, LAY, 0.3) == pytest.approx(0.0, abs=1e-12)
    assert dist_user_pico(0.0, 1.1, LAY, 0.3) == pytest.approx(LAY.d_ms)
    d = dist_user_pico(100.0, math.radians(30), CellLayout(200, 50, 150), 0.0)
    assert d == pytest.approx(math.sqrt(100 ** 2 + 150 ** 2 - 2 * 100 * 150 * math.cos(math.pi / 6)),
                              abs=1e-10)
    assert d == pytest.approx(80.7418, abs=1e-4)


@given(st.floats(0, 400), st.floats(-3, 3), layouts())
def test_distance_law_of_cosines(l, beta, lay):
    ref = math.sqrt(max(l * l + lay.d_ms ** 2 - 2 * l * lay.d_ms * math.cos(beta), 0.0))
    assert dist_user_pico(l, beta, lay, 0.0) == pytest.approx(ref, abs=1e-9)


def test_table1_split():
    s = association_probability(LAY, G1, TH.total_spread)
    assert s.p_gs == pytest.approx(0.301, abs=5e-4)
    assert s.p_gm + s.p_gs == 1.0
    assert s.theta0 == pytest.approx(2 * math.asin(1 / 6), abs=1e-15)
    assert s.theta0 == pytest.approx(0.3349, abs=1e-4)
    assert not s.clipped


def test_table1_split_rejection_sampling(rng):
    n = 2_000_000
    lo, hi = G1.wedge
    beta = rng.uniform(lo, hi, n)
    l = LAY.R * np.sqrt(rng.random(n))
    emp = is_pico_associated(l, beta, LAY, G1.aoa).mean()
    p = association_probability(LAY, G1).p_gs
    assert abs(emp - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_no_pico_split():
    s = association_probability(CellLayout(200, 0.0, 150), G1)
    assert (s.p_gs, s.p_gm) == (0.0, 1.0)
    tiny = association_probability(CellLayout(200, 1e-6, 150), G1)
    assert tiny.p_gs < 1e-10


def test_layout_validation():
    with pytest.raises(ConfigError):
        CellLayout(200, 50, 250)
    with pytest.raises(ConfigError):
        CellLayout(200, 160, 150)


@given(layouts())
def test_area_identity(lay):
    g = OneRingGroup(0.0, 1.0, 4)
    assert abs(p_gs_closed_form(lay, g) - p_gs_lens_areas(lay, g)) <= 1e-12


@given(layouts(), st.floats(0.05, 1.5), st.floats(1.0, 4.0))
def test_upsilon_identity(lay, spread, ratio):
    g = OneRingGroup(0.0, spread, 4)
    assume(not region_is_clipped(lay, g))
    total = spread * ratio
    s = association_probability(lay, g, total)
    assert abs(s.upsilon - spread / total * (1 - s.p_gs)) <= 1e-10


@given(layouts())
def test_chord_integral_matches_quadrature(lay):
    th0 = pico_half_angle(lay)
    r, d = lay.r, lay.d_ms
    f = lambda b: 2 * d * math.cos(b) * math.sqrt(max(r * r - (d * math.sin(b)) ** 2, 0.0))
    ref, _ = integrate.quad(f, -th0, th0, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert chord_integral(lay) == pytest.approx(ref, rel=1e-9, abs=1e-9 * r * r)


def test_clipped_area_uses_numeric_region():
    lay = CellLayout(200, 50, 170)  # disk leaves the cell
    s = association_probability(lay, G1)
    assert s.clipped
    assert s.p_gs == pytest.approx(pico_region_area(lay, G1) / (G1.spread * 200 ** 2))
    assert s.p_gs < p_gs_closed_form(lay, G1)


def test_region_upper_examples():
    th0 = pico_half_angle(LAY)
    assert pico_region_upper(0.0, LAY) == pytest.approx(LAY.d_ms + LAY.r)
    assert pico_region_upper(th0, LAY) == pytest.approx(LAY.d_ms, abs=1e-9)
    assert pico_region_upper(-th0, LAY) == pytest.approx(LAY.d_ms, abs=1e-9)
    b = th0 / 2
    l1 = float(pico_region_upper(b, LAY))
    assert LAY.d_ms < l1 < LAY.d_ms + LAY.r
    assert dist_user_pico(l1, b, LAY, 0.0) == pytest.approx(LAY.r, abs=1e-9)
    with pytest.raises(DomainError):
        pico_region_upper(th0 * 1.01, LAY)


@given(layouts())
def test_region_upper_properties(lay):
    th0 = pico_half_angle(lay)
    b = np.linspace(-th0, th0, 201)
    up = pico_region_upper(b, lay)
    assert np.all(up >= lay.d_ms - 1e-9) and np.all(up <= lay.d_ms + lay.r + 1e-9)
    assert np.argmax(up) == 100
    assert np.max(np.abs(np.diff(up))) < lay.r  # no jumps on a fine grid


def test_association_matches_polar_region(rng):
    n = 100_000
    th = G1.aoa
    beta = rng.uniform(*G1.wedge, n)
    l = LAY.R * np.sqrt(rng.random(n))
    assoc = is_pico_associated(l, beta, LAY, th)
    th0 = pico_half_angle(LAY)
    off = beta - th
    inside = np.abs(off) <= th0
    region = np.zeros(n, dtype=bool)
    region[inside] = (l[inside] >= LAY.d_ms) & (l[inside] <= pico_region_upper(beta[inside], LAY, th))
    assert np.array_equal(assoc, region)


def test_disk_inside_path_loss_region():
    assert disk_within_relay_rule(LAY, SystemParams())
    # just behind the pico site the literal path-loss rule selects the pico
    assert is_pico_associated_pathloss(LAY.d_ms + 1.0, 0.0, LAY, 0.0, SystemParams())


def test_drop_group_fractions(rng):
    groups = table1_scenario(8).groups
    n = 1_000_000
    l, beta, gid = drop_users(n, groups, rng, 200.0)
    frac = np.mean(gid == 0)
    assert abs(frac - 2 / 3) <= 3 * math.sqrt(2 / 9 / n)
    assert np.all(l <= 200.0)
    for g, grp in enumerate(groups):
        lo, hi = grp.wedge
        assert np.all((beta[gid == g] >= lo) & (beta[gid == g] <= hi))
    sel = gid == 0
    pico = is_pico_associated(l[sel], beta[sel], LAY, groups[0].aoa).mean()
    p = association_probability(LAY, groups[0]).p_gs
    assert abs(pico - p) <= 3 * math.sqrt(p * (1 - p) / sel.sum())


def test_drop_determinism():
    groups = table1_scenario(8).groups
    a = drop_users(50, groups, np.random.default_rng(3), 200.0)
    b = drop_users(50, groups, np.random.default_rng(3), 200.0)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    l, beta, gid = drop_users(10, groups, np.random.default_rng(3), 200.0, partition=(7, 3))
    assert list(gid) == [0] * 7 + [1] * 3
