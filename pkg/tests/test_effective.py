import numpy as np
import pytest

from jsdm_relay.analysis.effective import (LinkModel, build_effective_matrices,
                                           macro_link_matrices, pico_hop_matrices)
from jsdm_relay.channel import covariance_model
from jsdm_relay.params import OneRingGroup
from jsdm_relay.precoding import design_bd_precoders


def _psd(A, tol=1e-10):
    lam = np.linalg.eigvalsh(A)
    return lam.min() >= -tol * max(lam.max(), 1.0)


def test_single_user_has_no_interference():
    m = covariance_model(OneRingGroup.from_degrees(0.0, 15.0, 16))
    P = design_bd_precoders([m], [1])
    E = build_effective_matrices(P, [m], "macro-user")
    assert np.allclose(E.A_dprime, 0.0)


def test_interference_free_matrix_is_rank_one(table1):
    lm = LinkModel(table1, (7, 3), interference=False)
    for g in (0, 1):
        for col in lm.user_columns(g):
            mu = lm.macro_spectrum(g, col, 3.0)
            assert mu.size == 1
            assert mu[0] == pytest.approx(lm.beam_gain(g, col), rel=1e-10)


def test_table1_sign_structure(table1_lm):
    lm = table1_lm
    g, col = 0, lm.user_columns(0)[0]
    mu = lm.macro_spectrum(g, col, 1.0)
    assert mu[0] > 0 and np.all(mu[1:] <= 0)
    E = lm.macro_matrices(g, col)
    assert _psd(E.A_prime) and _psd(E.A_dprime)
    lam = np.linalg.eigvalsh(E.A_prime)
    assert lam[-2] <= 1e-10 * lam[-1]
    mu = lm.pico_link_spectrum(1.0)
    assert mu[0] > 0 and np.all(mu[1:] <= 0)


def test_pico_hop_blocks(table1_lm):
    lm = table1_lm
    m = lm.models[0]
    E = pico_hop_matrices(m, lm.precoders, 2.5, 120.0, 30.0, 4.0)
    r = m.rank
    assert E.A_prime.shape == (r + 1, r + 1)
    assert E.A_prime[0, 0] == 2.5 and np.count_nonzero(E.A_prime) == 1
    assert np.allclose(E.A_dprime[0], 0) and np.allclose(E.A_dprime[:, 0], 0)
    F = m.sqrt_factor.conj().T @ lm.precoders.all_beams
    assert np.allclose(E.A_dprime[1:, 1:], (120.0 / 30.0) ** -4 * F @ F.conj().T)
    mu = E.spectrum(0.7)
    assert mu[0] == pytest.approx(2.5) and np.all(mu[1:] <= 0)


def test_macro_interference_includes_pico_stream(table1_lm):
    lm = table1_lm
    col = lm.user_columns(0)[0]
    E = macro_link_matrices(lm.models[0], lm.precoders, 0, col)
    F = lm.models[0].sqrt_factor.conj().T @ lm.precoders.all_beams
    others = np.delete(F, col, axis=1)
    assert np.allclose(E.A_dprime, others @ others.conj().T)
    assert others.shape[1] == lm.precoders.total_streams - 1


def test_dimension_mismatch_and_context_errors(table1_lm):
    small = covariance_model(OneRingGroup.from_degrees(0.0, 10.0, 8))
    with pytest.raises(ValueError):
        macro_link_matrices(small, table1_lm.precoders, 0, 0)
    with pytest.raises(ValueError):
        build_effective_matrices(table1_lm.precoders, table1_lm.models, "pico-user")
    with pytest.raises(ValueError):
        build_effective_matrices(table1_lm.precoders, table1_lm.models, "nope")
