import math

import numpy as np
import pytest

from pacs.analytics import p_add_closed, snr_added
from pacs.circuit import LossSpec
from pacs.errors import DomainError
from pacs.scheme import (
    SchemeConfig,
    addition_amplitude,
    branch_snr,
    herald,
    joint_distribution,
    scheme_fisher,
)


def test_addition_amplitude_after_phase_and_loss():
    a = addition_amplitude(1.0, theta=0.2, phi=math.pi / 2, loss=LossSpec(0.3, 0.7))
    assert abs(a) ** 2 == pytest.approx(0.2401 * 0.5)


def test_config_validation():
    with pytest.raises(DomainError):
        SchemeConfig(nbar=1.0, model="bs")
    with pytest.raises(DomainError):
        SchemeConfig(nbar=1.0, model="pdc")
    with pytest.raises(DomainError):
        SchemeConfig(nbar=1.0, model="x", t=0.5)
    with pytest.raises(DomainError):
        SchemeConfig(nbar=-1.0, t=0.5)


def test_herald_uses_stage_amplitude():
    cfg = SchemeConfig(nbar=2.0, m=1, t=0.4, phi=1.0, loss=LossSpec(0.1, 0.9))
    nbar = abs(addition_amplitude(2.0, 0.0, 1.0, LossSpec(0.1, 0.9))) ** 2
    assert herald(cfg).success_probability == pytest.approx(p_add_closed(1, 0.4, nbar), abs=1e-12)


def test_joint_distribution_is_normalized():
    res = herald(SchemeConfig(nbar=1.0, m=1, t=0.5))
    p = joint_distribution(res, 30, 30)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert p[0].sum() == pytest.approx(res.success_probability)


def test_branch_snr():
    res = herald(SchemeConfig(nbar=1.0, m=1, t=0.5))
    b = branch_snr(res, 1)
    assert b.success_snr == pytest.approx(snr_added(1, 0.5, 1.0), abs=1e-10)
    assert b.success_probability + b.failure_probability == pytest.approx(1.0)
    assert b.weighted_success == pytest.approx(math.sqrt(b.success_probability) * b.success_snr)


def test_branch_snr_fock_limit_is_missing():
    # T = 0 heralds the Fock state |m>, whose SNR diverges
    b = branch_snr(herald(SchemeConfig(nbar=1.0, m=1, t=0.0)), 1)
    assert b.success_snr is None
    assert b.weighted_success is None


@pytest.mark.parametrize("phi", [0.3, 0.9, 1.5])
def test_fisher_ordering(phi):
    cfg = SchemeConfig(nbar=1.0, m=1, t=0.5)
    r = scheme_fisher(cfg, phi)
    # the joint outcome carries the branch label on top of the branch data
    assert r.fisher_joint >= r.fisher_combined - 1e-9
    # nothing beats counting the unmodified interferometer port
    assert r.fisher_joint <= math.sin(phi / 2) ** 2 + 1e-6
    assert r.qcrb == 1.0


def test_fisher_needs_bs_model():
    with pytest.raises(DomainError):
        scheme_fisher(SchemeConfig(nbar=1.0, model="pdc", gain=1.5), 0.5)
