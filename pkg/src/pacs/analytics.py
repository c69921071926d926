"""Closed-form statistics of photon-added coherent states, SNR metrics, and
classical Fisher information of the heralded scheme.

Throughout, ``nbar`` is |alpha|^2 of the coherent state entering the addition
stage and ``T`` the addition beam splitter's transmissivity; every Laguerre
polynomial is evaluated at -T * nbar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from .errors import DivergentSNRError, DomainError
from .special import laguerre

PROB_TOL = 1e-9
FISHER_FLOOR = 1e-14


@dataclass(frozen=True)
class SnrReport:
    snr: float
    snr_ratio: float
    success_probability: float
    weighted_metric: float


@dataclass(frozen=True)
class FisherReport:
    phi: float
    fisher_success: float
    fisher_failure: float
    fisher_combined: float
    fisher_joint: float
    qcrb: float
    trials: int = 1


def _check(m, t, nbar):
    if int(m) != m or m < 0:
        raise DomainError(f"m must be a non-negative integer, got {m!r}")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"T must lie in [0, 1], got {t!r}")
    if nbar < 0:
        raise DomainError(f"nbar must be non-negative, got {nbar!r}")
    return int(m)


def p_add_closed(m: int, t: float, nbar: float) -> float:
    """Herald probability (1-T)^m e^{nbar (T-1)} L_m(-T nbar)."""
    m = _check(m, t, nbar)
    return (1.0 - t) ** m * math.exp(nbar * (t - 1.0)) * laguerre(m, -t * nbar)


def p_add_single(t: float, nbar: float) -> float:
    """The m = 1 herald probability written out: (1-T)(1 + T nbar) e^{nbar (T-1)}."""
    _check(1, t, nbar)
    return -(t - 1.0) * (1.0 + t * nbar) * math.exp(nbar * (t - 1.0))


def mean_n_added(m: int, t: float, nbar: float) -> float:
    m = _check(m, t, nbar)
    x = -t * nbar
    if m == 0:
        return t * nbar
    return t * nbar + 2 * m - m * laguerre(m - 1, x) / laguerre(m, x)


def second_moment_added(m: int, t: float, nbar: float) -> float:
    m = _check(m, t, nbar)
    x = -t * nbar
    lm = laguerre(m, x)
    return ((m + 2) * (m + 1) * laguerre(m + 2, x) - 3 * (m + 1) * laguerre(m + 1, x) + lm) / lm


def variance_added(m: int, t: float, nbar: float) -> float:
    mean = mean_n_added(m, t, nbar)
    return second_moment_added(m, t, nbar) - mean * mean


def snr_from_moments(mean: float, second: float, offset: float = 0.0, tol: float = 1e-12) -> float:
    """(mean - offset) / std; raises DivergentSNRError when the variance vanishes."""
    var = second - mean * mean
    if var <= tol * max(1.0, second):
        raise DivergentSNRError(f"photon-number variance {var:.3g} is zero")
    return (mean - offset) / math.sqrt(var)


def snr_added(m: int, t: float, nbar: float) -> float:
    """SNR of the m-photon-added state with the ``m`` injected photons subtracted."""
    m = _check(m, t, nbar)
    return snr_from_moments(mean_n_added(m, t, nbar), second_moment_added(m, t, nbar), m)


def snr_coherent(nbar: float) -> float:
    """Coherent-state SNR, |alpha|."""
    if nbar < 0:
        raise DomainError("nbar must be non-negative")
    return math.sqrt(nbar)


def snr_ratio(m: int, t: float, nbar: float) -> float:
    """snr_added relative to the coherent state entering the addition stage."""
    base = snr_coherent(nbar)
    if base == 0.0:
        raise DivergentSNRError("coherent baseline SNR is zero")
    return snr_added(m, t, nbar) / base


def lossy_nbar(nbar: float, loss: float = 0.0, det_eff: float = 1.0) -> float:
    """Mean photon number after the substitution alpha -> (1-L) D alpha."""
    return ((1.0 - loss) * det_eff) ** 2 * nbar


def weighted_metric(p: float, snr: float) -> float:
    """sqrt(P) * SNR."""
    if not (0.0 <= p <= 1.0 + PROB_TOL):
        raise DomainError(f"probability outside [0, 1]: {p!r}")
    return math.sqrt(min(p, 1.0)) * snr


def snr_report(m: int, t: float, nbar: float) -> SnrReport:
    s = snr_added(m, t, nbar)
    p = p_add_closed(m, t, nbar)
    return SnrReport(s, s / snr_coherent(nbar), p, weighted_metric(p, s))


def qcrb(nbar: float, nu: int = 1) -> float:
    """Shot-noise phase-variance bound 1 / (nu nbar) for classical input light."""
    if nbar <= 0:
        raise DomainError("QCRB needs nbar > 0")
    if int(nu) != nu or nu < 1:
        raise DomainError("number of trials must be a positive integer")
    return 1.0 / (nu * nbar)


def _fisher_terms(p0, dp):
    keep = p0 > FISHER_FLOOR
    return float(np.sum(dp[keep] ** 2 / p0[keep]))


def fisher_from_distribution(dist, phi: float, dphi: float = 1e-4, tol: float = 1e-8) -> float:
    """Classical Fisher information sum_n (d p_n / d phi)^2 / p_n.

    ``dist`` maps a phase to a probability vector (any shape, flattened).
    The derivative is a central difference; outcomes with p_n < 1e-14 are
    dropped.
    """
    if not (1e-5 <= dphi <= 1e-2):
        raise DomainError(f"dphi must lie in [1e-5, 1e-2], got {dphi!r}")
    p_plus = np.ravel(np.asarray(dist(phi + dphi), dtype=float))
    p_minus = np.ravel(np.asarray(dist(phi - dphi), dtype=float))
    p0 = np.ravel(np.asarray(dist(phi), dtype=float))
    for p in (p_plus, p_minus, p0):
        if abs(p.sum() - 1.0) > tol or np.any(p < -tol):
            raise DomainError(f"distribution not normalized (sum {p.sum()!r})")
    return _fisher_terms(p0, (p_plus - p_minus) / (2 * dphi))


def fisher_combined(ps: float, fs: float, pf: float, ff: float) -> float:
    """Branch-weighted Fisher information P_s F_s + P_f F_f."""
    if min(ps, pf, fs, ff) < 0:
        raise DomainError("probabilities and Fisher informations must be non-negative")
    if abs(ps + pf - 1.0) > PROB_TOL:
        raise DomainError(f"branch probabilities sum to {ps + pf!r}")
    return ps * fs + pf * ff


def fisher_mzi_counting(nbar: float, phi: float, dphi: float = 1e-4) -> float:
    """Fisher information of photon counting at both outputs of a plain
    interferometer (no addition). Each port is Poisson."""

    def dist(ph):
        top = nbar * math.cos(ph / 2) ** 2
        bot = nbar - top
        n = max(20, int(nbar + 12 * math.sqrt(nbar + 1) + 20))
        k = np.arange(n + 1)
        return np.outer(poisson.pmf(k, top), poisson.pmf(k, bot))

    return fisher_from_distribution(dist, phi, dphi, tol=1e-10)
