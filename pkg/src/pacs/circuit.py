"""Linear-optical elements, the two-mode squeezer, and the loss substitution.

Beam-splitter convention (real orthogonal): the creation operators of the
signal (1) and auxiliary (2) modes map as

    a1+ -> sqrt(T) a1+ - sqrt(1-T) a2+
    a2+ -> sqrt(1-T) a1+ + sqrt(T) a2+

so a coherent amplitude alpha entering mode 1 leaves as sqrt(T) alpha in
mode 1 and -sqrt(1-T) alpha in mode 2, and a photon entering mode 2 is
reflected into mode 1 with amplitude sqrt(1-T).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import kernels
from .errors import DomainError, TruncationError
from .fock import TwoModeState

NORM_TOL = 1e-10
SQUEEZE_LEAK_TOL = 1e-6


@dataclass(frozen=True)
class BeamSplitterSpec:
    transmissivity: float

    def __post_init__(self):
        t = self.transmissivity
        if not (0.0 <= t <= 1.0) or math.isnan(t):
            raise DomainError(f"transmissivity must lie in [0, 1], got {t!r}")

    @property
    def reflectivity(self) -> float:
        return 1.0 - self.transmissivity


@dataclass(frozen=True)
class MziSpec:
    """Interferometer fed by coherent light ``alpha * exp(i theta)`` and vacuum."""

    alpha: complex
    theta: float = 0.0
    phi: float = 0.0


@dataclass(frozen=True)
class LossSpec:
    loss: float = 0.0
    detector_efficiency: float = 1.0

    def __post_init__(self):
        for name in ("loss", "detector_efficiency"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")

    @property
    def amplitude_factor(self) -> float:
        return (1.0 - self.loss) * self.detector_efficiency


def beam_splitter(state: TwoModeState, spec: BeamSplitterSpec | float) -> TwoModeState:
    """Apply the beam-splitter unitary on the truncated two-mode space.

    Raises TruncationError if any output amplitude falls outside the cutoff.
    """
    if not isinstance(spec, BeamSplitterSpec):
        spec = BeamSplitterSpec(float(spec))
    out = kernels.beam_splitter_apply(state.amplitudes, spec.transmissivity, state.cutoff)
    result = TwoModeState(out)
    leak = state.norm2 - result.norm2
    if abs(leak) > NORM_TOL * max(1.0, state.norm2):
        raise TruncationError(
            f"beam splitter pushed {leak:.3g} of the norm past cutoff {state.cutoff}"
        )
    return result


def mzi_port_amplitudes(spec: MziSpec) -> tuple[complex, complex]:
    """Coherent amplitudes at the (top, bottom) interferometer outputs.

    Fixed convention: top = a (1 + e^{i phi}) / 2 and bottom = a (1 - e^{i phi}) / 2
    with a = alpha e^{i theta}. The control phase is folded into ``phi`` so that
    phi = 0 sends all light to the top (addition) port.
    """
    a = complex(spec.alpha) * cmath.exp(1j * spec.theta)
    e = cmath.exp(1j * spec.phi)
    return a * (1 + e) / 2, a * (1 - e) / 2


def mzi_output_amplitude(spec: MziSpec) -> complex:
    return mzi_port_amplitudes(spec)[0]


def apply_loss(alpha: complex, loss: LossSpec) -> complex:
    """Equal arm loss and detector inefficiency as alpha -> (1-L) D alpha."""
    return loss.amplitude_factor * alpha


def gain_to_squeezing(gain: float) -> float:
    if gain < 1.0:
        raise DomainError(f"parametric gain must be >= 1, got {gain!r}")
    return math.acosh(math.sqrt(gain))


def squeezing_to_gain(r: float) -> float:
    return math.cosh(r) ** 2


def _tms_block(delta: int, size: int, r: float) -> np.ndarray:
    # basis |delta + j, j>, j = 0..size-1; generator r (a1+ a2+ - a1 a2)
    j = np.arange(size - 1)
    g = r * np.sqrt((delta + j + 1.0) * (j + 1.0))
    k = np.zeros((size, size))
    k[j + 1, j] = g
    k[j, j + 1] = -g
    return expm(k)


def two_mode_squeezer(state: TwoModeState, r: float) -> TwoModeState:
    """Apply exp[r (a1+ a2+ - a1 a2)] on the truncated space.

    The generator preserves n1 - n2, so the exponential is taken block by
    block (scipy's scaling-and-squaring Pade). The truncated generator is
    anti-symmetric and the map is exactly norm preserving; truncation error
    shows up instead as probability reaching the edge of the space, which is
    returned as ``leakage`` and must stay below 1e-6.
    """
    if r < 0:
        raise DomainError("squeezing parameter must be non-negative")
    c = np.asarray(state.amplitudes)
    n = state.cutoff
    if r == 0:
        return TwoModeState(c.copy())
    out = np.zeros_like(c)
    for delta in range(-n, n + 1):
        size = n + 1 - abs(delta)
        j = np.arange(size)
        i1, i2 = (delta + j, j) if delta >= 0 else (j, j - delta)
        vec = c[i1, i2]
        if not np.any(vec):
            continue
        u = _tms_block(abs(delta), size, r)
        out[i1, i2] = u @ vec
    result = TwoModeState(out)
    leak = result.edge_mass()
    if leak > SQUEEZE_LEAK_TOL:
        raise TruncationError(f"squeezer leakage {leak:.3g} at cutoff {n}")
    return TwoModeState(out, leakage=leak)
