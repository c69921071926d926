"""Truncated Fock-space states and photon-number statistics.

Single-mode states are amplitude vectors ``c_0..c_N``; two-mode states are
amplitude matrices ``c[n1, n2]`` with mode 1 the signal and mode 2 the
auxiliary (heralding) mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TruncationError
from .special import log_factorials

NORM_TOL = 1e-10
TAIL_TOL = 1e-10


def cutoff_for(nbar_eff: float, m: int = 0) -> int:
    """Photon-number cutoff adequate for a Poisson-like state.

    ``nbar_eff`` is the mean photon number after loss; ``m`` photons are
    added on top of it.
    """
    s = nbar_eff + m
    return int(math.ceil(s + 6.0 * math.sqrt(s) + 10.0))


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise DomainError("amplitudes must be a non-empty vector")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> PureState:
        n2 = self.norm2
        if n2 == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return PureState(self.amplitudes / math.sqrt(n2))

    def padded(self, cutoff: int) -> PureState:
        """Embed into a larger truncated space."""
        if cutoff < self.cutoff:
            raise TruncationError(f"cannot shrink cutoff {self.cutoff} to {cutoff}")
        out = np.zeros(cutoff + 1, dtype=complex)
        out[: self.amplitudes.size] = self.amplitudes
        return PureState(out)

    def tail_mass(self) -> float:
        p = np.abs(self.amplitudes[-2:]) ** 2
        return float(p.sum())


@dataclass(frozen=True)
class TwoModeState:
    amplitudes: np.ndarray
    # edge mass left by an operation that cannot preserve the truncated norm
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != amps.shape[1]:
            raise DomainError("two-mode amplitudes must be a square matrix")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @classmethod
    def product(cls, a: PureState, b: PureState, cutoff: int | None = None) -> TwoModeState:
        n = max(a.cutoff, b.cutoff) if cutoff is None else cutoff
        return cls(np.outer(a.padded(n).amplitudes, b.padded(n).amplitudes))

    def edge_mass(self, width: int = 2) -> float:
        """Probability in the last ``width`` Fock levels of either mode."""
        p = np.abs(self.amplitudes) ** 2
        inner = p[: -width, : -width].sum() if self.cutoff >= width else 0.0
        return float(p.sum() - inner)

    def project_aux(self, k: int) -> np.ndarray:
        """Unnormalized signal-mode vector <k|_aux |psi>."""
        return np.array(self.amplitudes[:, k])

    def project_signal(self, k: int) -> np.ndarray:
        return np.array(self.amplitudes[k, :])


@dataclass(frozen=True)
class Branch:
    outcome: int
    weight: float
    state: PureState


@dataclass(frozen=True)
class BranchEnsemble:
    """Classical mixture of conditional pure states, one per detector outcome."""

    members: tuple[Branch, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        for b in self.members:
            if b.weight < 0:
                raise DomainError("branch weights must be non-negative")

    @property
    def total_weight(self) -> float:
        return float(math.fsum(b.weight for b in self.members))

    @property
    def outcomes(self) -> list[int]:
        return [b.outcome for b in self.members]

    def number_distribution(self) -> np.ndarray:
        """Pooled photon-number distribution, normalized over the ensemble."""
        if not self.members:
            raise DomainError("empty ensemble")
        n = max(b.state.cutoff for b in self.members)
        p = np.zeros(n + 1)
        for b in self.members:
            q = number_distribution(b.state)
            p[: q.size] += b.weight * q
        return p / self.total_weight

    def mean_photon(self) -> float:
        w = self.total_weight
        return math.fsum(b.weight * mean_photon(b.state) for b in self.members) / w

    def second_moment(self) -> float:
        w = self.total_weight
        return math.fsum(b.weight * second_moment(b.state) for b in self.members) / w


def coherent_state(alpha: complex, cutoff: int | None = None) -> PureState:
    """Truncated coherent state with amplitudes exp(-|a|^2/2) a^n / sqrt(n!).

    The amplitudes are left unrenormalized; the cutoff must be large enough
    that the discarded tail is negligible.
    """
    alpha = complex(alpha)
    nbar = abs(alpha) ** 2
    if cutoff is None:
        cutoff = cutoff_for(nbar)
    if cutoff < 1:
        raise DomainError("cutoff must be at least 1")
    n = np.arange(cutoff + 1)
    if alpha == 0:
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        return PureState(amps)
    log_mag = -nbar / 2 + n * math.log(abs(alpha)) - 0.5 * log_factorials(cutoff)
    amps = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    state = PureState(amps)
    if state.tail_mass() > TAIL_TOL or abs(state.norm2 - 1.0) > NORM_TOL:
        raise TruncationError(
            f"cutoff {cutoff} too small for |alpha|^2 = {nbar:.6g} "
            f"(tail mass {state.tail_mass():.3g})"
        )
    return state


def fock_state(m: int, cutoff: int) -> PureState:
    if m < 0:
        raise DomainError("photon number must be non-negative")
    if m > cutoff:
        raise DomainError(f"Fock state |{m}> does not fit under cutoff {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[m] = 1.0
    return PureState(amps)


def number_distribution(state: PureState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def mean_photon(state: PureState) -> float:
    p = number_distribution(state)
    return float(np.dot(np.arange(p.size), p))


def second_moment(state: PureState) -> float:
    p = number_distribution(state)
    n = np.arange(p.size)
    return float(np.dot(n * n, p))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 for states on the same truncated space."""
    if a.cutoff != b.cutoff:
        raise DomainError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def apply_creation(state: PureState, m: int) -> PureState:
    """Normalized (a^dagger)^m |state>, on a space enlarged by ``m`` levels."""
    c = state.amplitudes
    n = np.arange(c.size)
    lf = log_factorials(c.size + m)
    out = np.zeros(c.size + m, dtype=complex)
    out[m:] = c * np.exp(0.5 * (lf[n + m] - lf[n]))
    return PureState(out).normalized()
