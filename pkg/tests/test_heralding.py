import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from pacs.analytics import p_add_closed
from pacs.errors import DomainError
from pacs.fock import (
    PureState,
    apply_creation,
    coherent_state,
    fidelity,
    fock_state,
    mean_photon,
)
from pacs.heralding import herald_addition_bs, herald_addition_pdc, herald_subtraction
from pacs.special import MAX_ORDER


def dense_ops(n):
    a = np.diag(np.sqrt(np.arange(1, n + 1)), 1)
    eye = np.eye(n + 1)
    return np.kron(a, eye), np.kron(eye, a)


def test_bs_probability_value():
    r = herald_addition_bs(coherent_state(1.0), 1, 0.5)
    assert r.success_probability == pytest.approx(0.75 * math.exp(-0.5), abs=1e-14)
    assert r.herald_outcome == 0
    assert not r.success_is_limit


def test_bs_against_dense_simulation():
    # an independent route: the full unitary on a large product space
    n = 26
    a1, a2 = dense_ops(n)
    t, m = 0.6, 2
    theta = math.acos(math.sqrt(t))
    alpha = 0.7 + 0.2j
    psi = np.kron(coherent_state(alpha, n).amplitudes, fock_state(m, n).amplitudes)
    out = (expm(theta * (a1.T @ a2 - a1 @ a2.T)) @ psi).reshape(n + 1, n + 1)
    p_ref = float(np.sum(np.abs(out[:, 0]) ** 2))
    r = herald_addition_bs(coherent_state(alpha), m, t)
    assert r.success_probability == pytest.approx(p_ref, abs=1e-12)
    ref_state = PureState(out[:16, 0] / math.sqrt(p_ref))
    amps = r.success_state.amplitudes[:16]
    assert abs(np.vdot(ref_state.amplitudes, amps)) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_pdc_against_dense_simulation():
    n = 24
    a1, a2 = dense_ops(n)
    g, m = 1.4, 1
    r = math.acosh(math.sqrt(g))
    psi = np.kron(coherent_state(0.8, n).amplitudes, fock_state(0, n).amplitudes)
    out = (expm(r * (a1.T @ a2.T - a1 @ a2)) @ psi).reshape(n + 1, n + 1)
    p_ref = float(np.sum(np.abs(out[:12, m]) ** 2))
    res = herald_addition_pdc(coherent_state(0.8), m, g)
    assert res.success_probability == pytest.approx(p_ref, abs=1e-8)


@pytest.mark.parametrize("g", [1.1, 1.5, 2.0, 3.0])
def test_pdc_vacuum_is_thermal(g):
    # heralding on m idler photons from vacuum: (1/G) ((G-1)/G)^m
    for m in (1, 2):
        res = herald_addition_pdc(fock_state(0, 5), m, g)
        assert res.success_probability == pytest.approx((g - 1) ** m / g ** (m + 1), abs=1e-12)
        assert abs(res.success_state.amplitudes[m]) ** 2 == pytest.approx(1.0)


def test_pdc_heralded_state_is_photon_added():
    # low gain: the success state tends to (a+)^m |alpha>
    alpha = coherent_state(0.9)
    res = herald_addition_pdc(alpha, 1, 1.0001)
    ref = apply_creation(alpha, 1)
    n = min(ref.cutoff, res.success_state.cutoff)
    f = abs(np.vdot(ref.amplitudes[: n + 1], res.success_state.amplitudes[: n + 1])) ** 2
    assert f > 1 - 1e-3


@pytest.mark.parametrize("herald", [
    lambda s, m: herald_addition_bs(s, m, 1.0),
    lambda s, m: herald_addition_pdc(s, m, 1.0),
])
def test_ideal_endpoint_returns_limit_state(herald):
    s = coherent_state(1.0)
    r = herald(s, 2)
    assert r.success_probability == 0.0
    assert r.success_is_limit
    assert fidelity(r.success_state, apply_creation(s, 2)) == pytest.approx(1.0)


def test_subtraction_keeps_coherent_state():
    s = coherent_state(2.0)
    r = herald_subtraction(s, 1, 0.8)
    ref = coherent_state(math.sqrt(0.8) * 2.0, r.success_state.cutoff)
    assert fidelity(r.success_state, ref) > 1 - 1e-12
    assert r.success_probability == pytest.approx(0.8 * math.exp(-0.8), abs=1e-12)


def test_subtraction_limits():
    assert herald_subtraction(fock_state(0, 4), 1, 1.0).success_state is None
    r = herald_subtraction(fock_state(3, 4), 1, 1.0)
    assert r.success_is_limit
    assert abs(r.success_state.amplitudes[2]) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [-1, 1.5, MAX_ORDER + 1])
def test_rejects_bad_order(bad):
    with pytest.raises(DomainError):
        herald_addition_bs(coherent_state(1.0), bad, 0.5)


def test_failure_branch_holds_other_counts():
    r = herald_addition_bs(coherent_state(1.0), 2, 0.5)
    assert r.outcome_table()[0][0] == 0
    assert 0 not in r.failure_branch.outcomes
    assert all(k >= 1 for k in r.failure_branch.outcomes)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 4), st.integers(0, 3), st.floats(0, 1))
def test_bs_branches_sum_to_one_and_match_closed_form(nbar, m, t):
    r = herald_addition_bs(coherent_state(math.sqrt(nbar)), m, t)
    total = r.success_probability + r.failure_branch.total_weight
    assert total == pytest.approx(1.0, abs=1e-9)
    assert r.success_probability == pytest.approx(p_add_closed(m, t, nbar), abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 2), st.integers(1, 2), st.floats(1, 3))
def test_pdc_branches_sum_to_one(nbar, m, g):
    r = herald_addition_pdc(coherent_state(math.sqrt(nbar)), m, g)
    total = r.success_probability + r.failure_branch.total_weight
    assert total == pytest.approx(1.0, abs=1e-9)


def test_addition_raises_mean_photon_number():
    s = coherent_state(1.0)
    r = herald_addition_bs(s, 1, 0.9)
    assert mean_photon(r.success_state) > 0.9 + 1
