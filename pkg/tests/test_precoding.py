import numpy as np
import pytest

from jsdm_relay.channel import covariance_model
from jsdm_relay.params import OneRingGroup
from jsdm_relay.precoding import (InfeasibleStreamsError, LeakageWarning, assign_user_beams,
                                  design_bd_precoders, eigen_precoders, streams_for_partition)


@pytest.fixture(scope="module")
def models():
    return [covariance_model(OneRingGroup.from_degrees(-20.0, 20.0, 64)),
            covariance_model(OneRingGroup.from_degrees(10.0, 10.0, 64))]


@pytest.fixture(scope="module")
def table1_beams(models):
    return design_bd_precoders(models, [8, 3], pico_group=0)


def test_single_group_uses_top_eigenvectors(models):
    P = design_bd_precoders(models[:1], [5])
    B, U = P.beams[0], models[0].eigvecs[:, :5]
    # same subspace: projector distance
    assert np.linalg.norm(B @ B.conj().T - U @ U.conj().T) < 1e-8


def test_table1_leakage(models, table1_beams):
    B2 = table1_beams.beams[1]
    m1 = models[0]
    leak = np.linalg.norm(B2.conj().T @ m1.sqrt_factor)
    assert leak < 1e-6 * np.linalg.norm(np.sqrt(m1.eigvals))
    assert not table1_beams.leakage_exceeded


def test_columns_unit_norm_and_orthonormal(table1_beams):
    for B in table1_beams.beams:
        assert np.allclose(np.linalg.norm(B, axis=0), 1.0, atol=1e-10)
        assert np.linalg.norm(B.conj().T @ B - np.eye(B.shape[1])) <= 1e-8
    assert table1_beams.stream_counts == (8, 3)
    assert table1_beams.total_streams == 11


def test_dominant_eigenvector_beats_every_beam(models, table1_beams, rng):
    for g, m in enumerate(models):
        R = m.matrix
        v1 = m.eigvecs[:, 0]
        top = np.real(v1.conj() @ R @ v1)
        for b in table1_beams.beams[g].T:
            assert top >= np.real(b.conj() @ R @ b) - 1e-12
        for _ in range(100):
            z = rng.standard_normal(64) + 1j * rng.standard_normal(64)
            z /= np.linalg.norm(z)
            assert top >= np.real(z.conj() @ R @ z) - 1e-12


def test_nulling_reduces_leakage(models, table1_beams):
    naive = eigen_precoders(models, [8, 3], pico_group=0)
    assert np.all(table1_beams.leakage <= naive.leakage + 1e-15)
    assert naive.leakage.max() > 1e-3


def test_overlapping_groups_warn():
    ms = [covariance_model(OneRingGroup.from_degrees(0.0, 20.0, 16)),
          covariance_model(OneRingGroup.from_degrees(45.0, 20.0, 16))]
    # few antennas: the other group's subspace fills most of the array
    with pytest.warns(LeakageWarning):
        P = design_bd_precoders(ms, [1, 1], leakage_tolerance=1e-30)
    assert P.leakage_exceeded


def test_infeasible_streams(models):
    with pytest.raises(InfeasibleStreamsError, match="group 1"):
        design_bd_precoders(models, [1, 40])
    with pytest.raises(InfeasibleStreamsError):
        design_bd_precoders(models, [40, 40])


def test_stream_counts_include_pico():
    assert streams_for_partition((7, 3), 0) == [8, 3]
    assert streams_for_partition((7, 3), None) == [7, 3]


def test_user_beam_assignment(models, table1_beams):
    mp = assign_user_beams(table1_beams, (7, 3))
    assert mp[(0, "pico")] == 0
    g0 = [mp[(0, k)] for k in range(7)]
    assert sorted(g0) == list(range(1, 8))
    assert sorted(mp[(1, k)] for k in range(3)) == [0, 1, 2]
    assert assign_user_beams(table1_beams, (7, 3)) == mp
    single = design_bd_precoders(models[:1], [1])
    assert assign_user_beams(single, (1,)) == {(0, 0): 0}
    with pytest.raises(InfeasibleStreamsError):
        assign_user_beams(table1_beams, (8, 3))
