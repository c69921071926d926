"""Heralded photon addition and subtraction by explicit Fock-domain projection.

Each operation builds the joint signal/auxiliary state, applies the coupling
(beam splitter or two-mode squeezer), and conditions on the auxiliary photon
count. The squared norm of the projected vector is the herald probability.
Every other auxiliary count is kept as a weighted member of the failure
ensemble, assuming a photon-number-resolving herald detector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import BeamSplitterSpec, beam_splitter, gain_to_squeezing, two_mode_squeezer
from .errors import DomainError, TruncationError
from .fock import (
    Branch,
    BranchEnsemble,
    PureState,
    TwoModeState,
    apply_creation,
    cutoff_for,
    fock_state,
    mean_photon,
)
from .special import MAX_ORDER

BRANCH_TOL = 1e-9
# below this the projected vector is treated as exactly zero
ZERO_PROB = 1e-280
PDC_EDGE_TOL = 1e-14


@dataclass(frozen=True)
class HeraldResult:
    """Outcome of one heralded operation.

    ``success_state`` is the normalized conditional state. When the success
    probability vanishes at the ideal endpoint (T = 1 or G = 1) it holds the
    limiting state instead and ``success_is_limit`` is set; it is ``None``
    when no limit exists (for example, subtracting from vacuum).
    """

    success_state: PureState | None
    success_probability: float
    failure_branch: BranchEnsemble
    herald_outcome: int
    success_is_limit: bool = False

    def outcome_table(self):
        """(outcome label, probability, state) for every herald count, success first."""
        rows = [(self.herald_outcome, self.success_probability, self.success_state)]
        rows += [(b.outcome, b.weight, b.state) for b in self.failure_branch.members]
        return rows


def _check_order(m):
    if int(m) != m or m < 0:
        raise DomainError(f"photon number must be a non-negative integer, got {m!r}")
    if m > MAX_ORDER:
        raise DomainError(f"photon number {m} exceeds ceiling {MAX_ORDER}")
    return int(m)


def _collect(out: np.ndarray, herald: int, norm2: float) -> tuple[np.ndarray, list[Branch]]:
    failures = []
    for k in range(out.shape[1]):
        if k == herald:
            continue
        vec = out[:, k]
        w = float(np.vdot(vec, vec).real)
        if w > 0.0:
            failures.append(Branch(k, w / norm2, PureState(vec / math.sqrt(w))))
    return out[:, herald], failures


def _finish(vec, failures, herald, norm2, limit) -> HeraldResult:
    p = float(np.vdot(vec, vec).real) / norm2
    if p > ZERO_PROB:
        state, is_limit = PureState(vec / math.sqrt(p * norm2)), False
    else:
        p = 0.0
        state, is_limit = limit(), True
    result = HeraldResult(state, p, BranchEnsemble(failures), herald, is_limit)
    total = p + result.failure_branch.total_weight
    if abs(total - 1.0) > BRANCH_TOL:
        raise TruncationError(f"herald branches sum to {total!r}, not 1")
    return result


def herald_addition_bs(state: PureState, m: int, transmissivity: float) -> HeraldResult:
    """Add ``m`` photons by mixing |m> into the auxiliary port of a beam
    splitter and heralding on vacuum at the auxiliary detector.

    The success state is the normalized (a+)^m applied to the state after
    attenuation by sqrt(T); the joint space is sized so no amplitude is
    truncated.
    """
    m = _check_order(m)
    spec = BeamSplitterSpec(transmissivity)
    n2 = state.cutoff + m
    joint = TwoModeState.product(state, fock_state(m, n2), n2)
    out = beam_splitter(joint, spec).amplitudes
    norm2 = state.norm2
    vec, failures = _collect(out, 0, norm2)
    return _finish(vec, failures, 0, norm2, lambda: apply_creation(state, m))


def _pdc_cutoff(state: PureState, m: int, gain: float) -> int:
    n = cutoff_for(gain * (mean_photon(state) + 1.0), m)
    return max(n, state.cutoff + m)


def herald_addition_pdc(
    state: PureState, m: int, gain: float, cutoff: int | None = None
) -> HeraldResult:
    """Add ``m`` photons by parametric down-conversion with gain G = cosh^2 r,
    heralded on ``m`` photons in the idler.

    Thermal idler statistics have much heavier tails than the Poisson rule
    assumes, so unless ``cutoff`` is forced the joint cutoff is grown until
    the squeezed state's edge mass drops below 1e-14.
    """
    m = _check_order(m)
    r = gain_to_squeezing(gain)
    n2 = _pdc_cutoff(state, m, gain) if cutoff is None else cutoff
    while True:
        joint = TwoModeState.product(state, fock_state(0, n2), n2)
        try:
            squeezed = two_mode_squeezer(joint, r)
        except TruncationError:
            if cutoff is not None:
                raise
            squeezed = None
        if squeezed is not None and (cutoff is not None or squeezed.leakage < PDC_EDGE_TOL):
            break
        n2 = int(math.ceil(n2 * 1.5))
    norm2 = state.norm2
    vec, failures = _collect(squeezed.amplitudes, m, norm2)
    return _finish(vec, failures, m, norm2, lambda: apply_creation(state, m))


def _lowering_limit(state: PureState, m: int) -> PureState | None:
    c = state.amplitudes
    n = np.arange(c.size)
    out = np.zeros_like(c)
    if m < c.size:
        ratio = np.array([math.exp(0.5 * (math.lgamma(j + 1) - math.lgamma(j - m + 1))) for j in n[m:]])
        out[: c.size - m] = c[m:] * ratio
    if not np.any(out):
        return None
    return PureState(out).normalized()


def herald_subtraction(state: PureState, m: int, transmissivity: float) -> HeraldResult:
    """Tap ``m`` photons off with a beam splitter and herald on the tapped count."""
    m = _check_order(m)
    spec = BeamSplitterSpec(transmissivity)
    n2 = state.cutoff
    if m > n2:
        raise DomainError(f"cannot herald {m} photons under cutoff {n2}")
    joint = TwoModeState.product(state, fock_state(0, n2), n2)
    out = beam_splitter(joint, spec).amplitudes
    norm2 = state.norm2
    vec, failures = _collect(out, m, norm2)
    return _finish(vec, failures, m, norm2, lambda: _lowering_limit(state, m))
