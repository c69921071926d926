"""The full measurement chain: interferometer, loss, heralded addition stage.

The state reaching the addition stage is a coherent state (coherent light
and vacuum stay a product state through linear optics), so the interferometer
is evaluated analytically and only the top port is carried forward; the
bottom port is discarded unmeasured. That is exact here and would not be for
entangled inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import (
    FisherReport,
    fisher_combined,
    fisher_from_distribution,
    qcrb,
    snr_from_moments,
    weighted_metric,
)
from .circuit import LossSpec, MziSpec, apply_loss, mzi_output_amplitude
from .errors import DivergentSNRError, DomainError
from .fock import coherent_state, cutoff_for, mean_photon, second_moment
from .heralding import HeraldResult, herald_addition_bs, herald_addition_pdc

NO_LOSS = LossSpec()


@dataclass(frozen=True)
class SchemeConfig:
    nbar: float
    m: int = 1
    model: str = "bs"
    t: float | None = None
    gain: float | None = None
    theta: float = 0.0
    phi: float = 0.0
    loss: LossSpec = NO_LOSS
    cutoff: int | None = None

    def __post_init__(self):
        if self.model not in ("bs", "pdc"):
            raise DomainError(f"unknown addition model {self.model!r}")
        if self.model == "bs" and self.t is None:
            raise DomainError("beam-splitter model needs a transmissivity")
        if self.model == "pdc" and self.gain is None:
            raise DomainError("PDC model needs a gain")
        if self.nbar < 0:
            raise DomainError("nbar must be non-negative")

    @property
    def coupling(self) -> float:
        return self.t if self.model == "bs" else self.gain


def addition_amplitude(nbar, theta=0.0, phi=0.0, loss: LossSpec = NO_LOSS) -> complex:
    """Coherent amplitude entering the addition stage, after loss."""
    return apply_loss(mzi_output_amplitude(MziSpec(math.sqrt(nbar), theta, phi)), loss)


def stage_cutoff(nbar, m, loss: LossSpec = NO_LOSS) -> int:
    """A cutoff adequate for every interferometer phase at this brightness."""
    return cutoff_for(nbar * loss.amplitude_factor**2, m)


def herald(cfg: SchemeConfig, phi: float | None = None) -> HeraldResult:
    phi = cfg.phi if phi is None else phi
    alpha = addition_amplitude(cfg.nbar, cfg.theta, phi, cfg.loss)
    cutoff = cfg.cutoff if cfg.cutoff is not None else stage_cutoff(cfg.nbar, cfg.m, cfg.loss)
    state = coherent_state(alpha, cutoff)
    if cfg.model == "bs":
        return herald_addition_bs(state, cfg.m, cfg.t)
    return herald_addition_pdc(state, cfg.m, cfg.gain)


def joint_distribution(result: HeraldResult, n_outcomes: int, n_levels: int) -> np.ndarray:
    """p[k, n]: herald count k and signal photon count n."""
    p = np.zeros((n_outcomes, n_levels))
    for k, w, state in result.outcome_table():
        if w == 0.0:
            continue
        q = np.abs(state.amplitudes) ** 2
        p[k, : q.size] += w * q
    return p


@dataclass(frozen=True)
class BranchSnr:
    success_probability: float
    success_snr: float | None
    failure_probability: float
    failure_snr: float | None

    @property
    def weighted_success(self) -> float | None:
        if self.success_snr is None:
            return None
        return weighted_metric(self.success_probability, self.success_snr)

    @property
    def weighted_failure(self) -> float | None:
        if self.failure_snr is None:
            return None
        return weighted_metric(self.failure_probability, self.failure_snr)


def branch_snr(result: HeraldResult, m: int) -> BranchSnr:
    """Numerical SNR of both herald branches.

    The success SNR subtracts the ``m`` added photons; the failure SNR does
    not, since no photons were added on that branch.
    """
    s_snr = f_snr = None
    if result.success_state is not None:
        st = result.success_state
        try:
            s_snr = snr_from_moments(mean_photon(st), second_moment(st), m)
        except DivergentSNRError:
            pass
    ens = result.failure_branch
    pf = ens.total_weight
    if ens.members:
        try:
            f_snr = snr_from_moments(ens.mean_photon(), ens.second_moment())
        except DivergentSNRError:
            pass
    return BranchSnr(result.success_probability, s_snr, pf, f_snr)


def scheme_fisher(cfg: SchemeConfig, phi: float, dphi: float = 1e-4, nu: int = 1) -> FisherReport:
    """Fisher information about the interferometer phase from herald and
    signal photon counts.

    Reports the success and failure conditional informations, the branch
    weighted sum P_s F_s + P_f F_f, and the information of the joint
    outcome (herald count, photon count), which adds the information carried
    by the branch label itself.
    """
    if cfg.model != "bs":
        raise DomainError("Fisher information is implemented for the beam-splitter model")
    n = (cfg.cutoff if cfg.cutoff is not None else stage_cutoff(cfg.nbar, cfg.m, cfg.loss)) + cfg.m + 1
    herald_k = 0
    cache = {}

    def joint(ph):
        if ph not in cache:
            cache[ph] = joint_distribution(herald(cfg, ph), n, n)
        return cache[ph]

    def success(ph):
        row = joint(ph)[herald_k]
        return row / row.sum()

    def failure(ph):
        rest = np.delete(joint(ph), herald_k, axis=0)
        return rest / rest.sum()

    j0 = joint(phi)
    ps = float(j0[herald_k].sum())
    pf = 1.0 - ps
    f_joint = fisher_from_distribution(joint, phi, dphi)
    fs = fisher_from_distribution(success, phi, dphi) if ps > 0 else 0.0
    ff = fisher_from_distribution(failure, phi, dphi) if pf > 0 else 0.0
    return FisherReport(
        phi=phi,
        fisher_success=fs,
        fisher_failure=ff,
        fisher_combined=fisher_combined(ps, fs, pf, ff),
        fisher_joint=f_joint,
        qcrb=qcrb(cfg.nbar, nu),
        trials=nu,
    )
