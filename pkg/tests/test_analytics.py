import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import poisson

from pacs.analytics import (
    fisher_combined,
    fisher_from_distribution,
    fisher_mzi_counting,
    lossy_nbar,
    mean_n_added,
    p_add_closed,
    p_add_single,
    qcrb,
    second_moment_added,
    snr_added,
    snr_coherent,
    snr_from_moments,
    snr_ratio,
    snr_report,
    variance_added,
    weighted_metric,
)
from pacs.errors import DivergentSNRError, DomainError
from pacs.fock import apply_creation, coherent_state, mean_photon, second_moment


def test_probability_values():
    assert p_add_closed(1, 0.5, 1.0) == pytest.approx(0.4548979947844750, abs=1e-15)
    assert p_add_closed(1, 0.25, 0.0) == pytest.approx(0.75)
    assert p_add_closed(2, 1.0, 3.0) == 0.0
    assert p_add_closed(0, 0.3, 2.0) == pytest.approx(math.exp(-1.4))


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 10))
def test_single_addition_form(t, nbar):
    assert p_add_single(t, nbar) == pytest.approx(p_add_closed(1, t, nbar), abs=1e-13)


@pytest.mark.parametrize("m", [0, 1, 2, 3, 5])
@pytest.mark.parametrize("x", [0.3, 1.0, 2.5])
def test_moments_match_creation_construction(m, x):
    # T * nbar enters only as |alpha|^2 of the attenuated state
    state = apply_creation(coherent_state(math.sqrt(x), cutoff=60), m)
    assert mean_n_added(m, 0.5, 2 * x) == pytest.approx(mean_photon(state), abs=1e-10)
    assert second_moment_added(m, 0.5, 2 * x) == pytest.approx(second_moment(state), abs=1e-9)


def test_m_zero_is_poisson():
    for t, nbar in [(0.4, 2.0), (1.0, 1.0), (0.1, 7.0)]:
        lam = t * nbar
        assert mean_n_added(0, t, nbar) == pytest.approx(lam, abs=1e-14)
        assert variance_added(0, t, nbar) == pytest.approx(lam, abs=1e-12)


def test_fock_limit_has_no_noise():
    # T = 0 leaves |m>: zero variance, so the SNR diverges
    assert variance_added(2, 0.0, 1.0) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(DivergentSNRError):
        snr_added(2, 0.0, 1.0)


def test_snr_ratio_at_full_transmission():
    assert snr_ratio(1, 1.0, 1.0) == pytest.approx(3 / math.sqrt(5), abs=1e-13)
    assert snr_ratio(3, 1.0, 1.0) > snr_ratio(2, 1.0, 1.0) > snr_ratio(1, 1.0, 1.0) > 1


def test_snr_helpers():
    assert snr_coherent(4.0) == 2.0
    assert snr_from_moments(3.0, 10.0, offset=1.0) == pytest.approx(2.0)
    with pytest.raises(DivergentSNRError):
        snr_from_moments(2.0, 4.0)
    with pytest.raises(DivergentSNRError):
        snr_ratio(1, 0.5, 0.0)
    rep = snr_report(1, 0.5, 1.0)
    assert rep.weighted_metric == pytest.approx(math.sqrt(rep.success_probability) * rep.snr)


def test_weighted_metric_domain():
    assert weighted_metric(0.25, 2.0) == 1.0
    with pytest.raises(DomainError):
        weighted_metric(1.5, 1.0)


def test_lossy_nbar():
    assert lossy_nbar(1.0, 0.3, 0.7) == pytest.approx(0.2401)


@pytest.mark.parametrize("args", [(-1, 0.5, 1.0), (1, 1.2, 1.0), (1, 0.5, -1.0), (1.5, 0.5, 1.0)])
def test_domain_errors(args):
    with pytest.raises(DomainError):
        p_add_closed(*args)


def test_qcrb():
    assert qcrb(2.0) == 0.5
    assert qcrb(2.0, nu=4) == 0.125
    with pytest.raises(DomainError):
        qcrb(0.0)
    with pytest.raises(DomainError):
        qcrb(1.0, nu=0)


def test_fisher_of_poisson_rate():
    # F = lambda'^2 / lambda for a Poisson count with mean lambda(phi)
    def dist(ph):
        return poisson.pmf(np.arange(80), 3.0 + math.sin(ph))

    phi = 0.4
    assert fisher_from_distribution(dist, phi) == pytest.approx(
        math.cos(phi) ** 2 / (3.0 + math.sin(phi)), rel=1e-6)


def test_fisher_rejects_bad_step_and_unnormalized():
    with pytest.raises(DomainError):
        fisher_from_distribution(lambda ph: np.array([1.0]), 0.1, dphi=1e-7)
    with pytest.raises(DomainError):
        fisher_from_distribution(lambda ph: np.array([0.5, 0.4]), 0.1)


@pytest.mark.parametrize("phi", [0.3, 0.9, 1.5, 2.5])
@pytest.mark.parametrize("nbar", [0.5, 1.0, 4.0])
def test_interferometer_counting_reaches_shot_noise(phi, nbar):
    assert fisher_mzi_counting(nbar, phi) == pytest.approx(nbar, rel=1e-6)


def test_fisher_combined():
    assert fisher_combined(0.25, 2.0, 0.75, 1.0) == pytest.approx(1.25)
    with pytest.raises(DomainError):
        fisher_combined(0.5, 1.0, 0.6, 1.0)
    with pytest.raises(DomainError):
        fisher_combined(0.5, -1.0, 0.5, 1.0)
