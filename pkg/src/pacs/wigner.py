"""Wigner functions of truncated Fock states.

Quadrature convention: a coherent state |alpha> is centred at
(x, p) = sqrt(2) (Re alpha, Im alpha), i.e. beta = (x + i p) / sqrt(2) is the
complex amplitude of a phase-space point, and W integrates to one over dx dp.

W is evaluated through the displaced parity

    W(beta) = (1/pi) sum_m (-1)^m |<m| D(-beta) |psi>|^2

where the displaced vector is expanded to a photon cutoff M chosen per grid
from |beta| and the state's extent. The construction is a sum of squared
moduli, so W is real by construction.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from . import kernels
from .errors import AccuracyError, DomainError, TruncationWarning
from .fock import PureState, TwoModeState, cutoff_for
from .parallel import worker_count

NORM_TOL = 1e-10
MASS_TOL = 1e-10
COVERAGE_TOL = 1e-8


@dataclass(frozen=True)
class PhaseSpacePoint:
    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise DomainError(f"phase-space point must be finite, got ({self.x}, {self.p})")

    @property
    def beta(self) -> complex:
        return complex(self.x, self.p) / math.sqrt(2.0)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    x_min: float = -6.0
    x_max: float = 6.0
    p_min: float = -6.0
    p_max: float = 6.0
    n_x: int = 201
    n_p: int = 201

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.p_min < self.p_max):
            raise DomainError("grid bounds must be ordered")
        if self.n_x < 2 or self.n_p < 2:
            raise DomainError("grid needs at least two samples per axis")

    @classmethod
    def parse(cls, text: str) -> PhaseSpaceGrid:
        """Parse ``"xmin:xmax:n,pmin:pmax:n"``."""
        try:
            xs, ps = text.split(",")
            x0, x1, nx = xs.split(":")
            p0, p1, n_p = ps.split(":")
            return cls(float(x0), float(x1), float(p0), float(p1), int(nx), int(n_p))
        except ValueError as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"bad grid spec {text!r}; expected xmin:xmax:n,pmin:pmax:n") from None

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def max_radius(self) -> float:
        return math.hypot(max(abs(self.x_min), abs(self.x_max)), max(abs(self.p_min), abs(self.p_max)))

    def integrate(self, values) -> float:
        """Trapezoid integral of samples ``values[i, j]`` at (xs[i], ps[j])."""
        return float(trapezoid(trapezoid(values, self.ps, axis=1), self.xs))

    def edge_max(self, values) -> float:
        v = np.abs(values)
        return float(max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max()))

    def spec(self) -> str:
        return f"{self.x_min:g}:{self.x_max:g}:{self.n_x},{self.p_min:g}:{self.p_max:g}:{self.n_p}"


@dataclass(frozen=True)
class WignerSamples:
    """W sampled on a grid: ``values[i, j]`` at (grid.xs[i], grid.ps[j])."""

    grid: PhaseSpaceGrid
    values: np.ndarray
    photon_cutoff: int


def phase_space_cutoff(nbar: float, m: int = 0) -> int:
    """Fock cutoff for states whose Wigner function is wanted to ~1e-12.

    W is linear in the density matrix, so coherences lost to truncation
    enter at the square root of the discarded probability. Doubling the
    usual cutoff pushes that below rounding for the brightness used here.
    """
    return 2 * cutoff_for(nbar, m)


def _as_vectors(state) -> np.ndarray:
    if isinstance(state, PureState):
        return state.amplitudes[None, :]
    return np.atleast_2d(np.asarray(state, dtype=complex))


def _extent(vectors: np.ndarray, tol: float = 1e-14) -> int:
    """Smallest n with the mass above n below ``tol`` (relative)."""
    w = (np.abs(vectors) ** 2).sum(axis=0)
    tail = np.cumsum(w[::-1])[::-1] / w.sum()
    above = np.nonzero(tail > tol)[0]
    return int(above[-1]) if above.size else 0


def displaced_cutoff(vectors, radius: float) -> int:
    """Photon cutoff for D(-beta)|psi> with |beta| <= ``radius``.

    The displaced state's number distribution sits below (sqrt(n) + |beta|)^2
    for a state confined to n photons; the margin 10 s + 20 covers its tail.
    """
    vectors = _as_vectors(vectors)
    s = math.sqrt(_extent(vectors)) + radius
    return max(vectors.shape[1] - 1, int(math.ceil(s * s + 10.0 * s + 20.0)))


def _evaluate(vectors, betas, m_max, norm2):
    w, mass = kernels.displaced_parity(vectors, betas, m_max)
    deficit = float(np.max(norm2 - mass)) if np.size(mass) else 0.0
    if deficit > MASS_TOL * max(1.0, norm2):
        warnings.warn(
            f"displaced state lost {deficit:.3g} of its norm at photon cutoff {m_max}",
            TruncationWarning,
            stacklevel=3,
        )
    return w


def _check_normalized(vectors) -> float:
    n2 = float((np.abs(vectors) ** 2).sum())
    if abs(n2 - 1.0) > NORM_TOL:
        raise DomainError(f"state must be normalized (norm^2 = {n2!r})")
    return n2


def wigner_point(state, pt: PhaseSpacePoint, cutoff: int | None = None) -> float:
    """W at one phase-space point. ``state`` is a PureState or a stack of
    vectors v_r describing the mixture sum_r |v_r><v_r|."""
    vectors = _as_vectors(state)
    n2 = _check_normalized(vectors)
    m_max = displaced_cutoff(vectors, abs(pt.beta)) if cutoff is None else cutoff
    return float(_evaluate(vectors, np.array([pt.beta]), m_max, n2)[0])


def wigner_grid(state, grid: PhaseSpaceGrid = PhaseSpaceGrid(), cutoff: int | None = None,
                workers: int | None = None) -> WignerSamples:
    """W on every grid point, one row of constant x per task.

    All rows share a single photon cutoff sized for the grid's outermost
    point, so rows are independent and can run on separate threads.
    """
    vectors = _as_vectors(state)
    n2 = _check_normalized(vectors)
    m_max = displaced_cutoff(vectors, grid.max_radius / math.sqrt(2.0)) if cutoff is None else cutoff
    xs, ps = grid.xs, grid.ps
    workers = worker_count() if workers is None else workers

    def row(x):
        return _evaluate(vectors, (x + 1j * ps) / math.sqrt(2.0), m_max, n2)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(row, xs))
    else:
        rows = [row(x) for x in xs]
    return WignerSamples(grid, np.vstack(rows), m_max)


def wigner_values(state, xs, ps, cutoff: int | None = None) -> np.ndarray:
    """W at the points of the broadcast arrays ``xs`` and ``ps``."""
    vectors = _as_vectors(state)
    n2 = _check_normalized(vectors)
    xs, ps = np.broadcast_arrays(np.asarray(xs, dtype=float), np.asarray(ps, dtype=float))
    betas = ((xs + 1j * ps) / math.sqrt(2.0)).ravel()
    radius = float(np.abs(betas).max()) if betas.size else 0.0
    m_max = displaced_cutoff(vectors, radius) if cutoff is None else cutoff
    workers = worker_count()
    chunks = np.array_split(betas, max(1, min(workers * 4, betas.size // 256)))
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _evaluate(vectors, b, m_max, n2), chunks))
    else:
        parts = [_evaluate(vectors, b, m_max, n2) for b in chunks]
    return np.concatenate(parts).reshape(xs.shape)


def input_wigner_analytic(x1, p1, x2, p2, alpha_mag, theta=0.0):
    """Two-mode Wigner function of coherent light (|alpha| e^{i theta}) in
    mode 1 and vacuum in mode 2."""
    c = math.sqrt(2.0) * alpha_mag
    arg = (
        -((np.asarray(x1) - c * math.cos(theta)) ** 2)
        - (np.asarray(p1) - c * math.sin(theta)) ** 2
        - np.asarray(x2) ** 2
        - np.asarray(p2) ** 2
    )
    return np.exp(arg) / math.pi**2


def vacuum_kernel(x, p):
    """2 e^{-x^2 - p^2}: the phase-space weight of a projection onto vacuum."""
    return 2.0 * np.exp(-np.asarray(x) ** 2 - np.asarray(p) ** 2)


def vacuum_overlap_probability(sampler, grid: PhaseSpaceGrid = PhaseSpaceGrid()) -> float:
    """<0|rho|0> as the phase-space integral of W_rho against the vacuum kernel.

    ``sampler(xs, ps)`` returns W of the projected mode on the mesh
    ``xs[:, None], ps[None, :]``. Raises AccuracyError if W has not decayed
    to 1e-8 at the grid edges or does not integrate to one.
    """
    xs, ps = grid.xs, grid.ps
    w = np.asarray(sampler(xs[:, None], ps[None, :]), dtype=float)
    w = np.broadcast_to(w, (xs.size, ps.size))
    edge = grid.edge_max(w)
    if edge > COVERAGE_TOL:
        raise AccuracyError(f"W is {edge:.3g} at the grid edge; widen the grid")
    total = grid.integrate(w)
    if abs(total - 1.0) > 1e-6:
        raise AccuracyError(f"W integrates to {total!r} on this grid")
    return grid.integrate(w * vacuum_kernel(xs[:, None], ps[None, :]))


def aux_mode_sampler(state: TwoModeState, cutoff: int | None = None):
    """Sampler for the reduced Wigner function of the auxiliary mode.

    Tracing out the signal leaves the mixture of vectors ``amplitudes[n1, :]``,
    one per signal photon number.
    """
    vectors = np.asarray(state.amplitudes)
    keep = np.nonzero((np.abs(vectors) ** 2).sum(axis=1) > 0)[0]
    vectors = vectors[keep] / math.sqrt(state.norm2)

    def sampler(xs, ps):
        return wigner_values(vectors, xs, ps, cutoff)

    return sampler


def min_value(samples: WignerSamples) -> float:
    return float(samples.values.min())


def is_nonclassical(samples: WignerSamples, tol: float = 1e-12) -> bool:
    """True when the sampled W dips below ``-tol``."""
    return min_value(samples) < -tol
