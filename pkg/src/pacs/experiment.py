"""Monte Carlo simulation of the post-selected experiment.

For each sweep value the heralded branches are built once; each trial then
draws two uniforms, one picking the herald outcome by its probability and one
picking the detected photon count from that outcome's number distribution.

Randomness is counter based: sweep point ``j`` gets a Philox key derived
from (seed, j), and trial ``i`` reads the generator's outputs 2i and 2i+1.
Any split of the trials across workers therefore reproduces the serial
stream exactly.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analytics import p_add_closed, snr_ratio, snr_from_moments
from .circuit import LossSpec
from .errors import DivergentSNRError, DomainError
from .fock import mean_photon, second_moment
from .parallel import worker_count
from .scheme import SchemeConfig, addition_amplitude, herald

DEFAULT_TRIALS = 3600
SUCCESS = "success"
FAILURE = "failure"


@dataclass(frozen=True)
class RunConfig:
    nbar: float
    m: int
    sweep: tuple[float, ...]
    model: str = "bs"
    theta: float = 0.0
    phi: float = 0.0
    loss: LossSpec = field(default_factory=LossSpec)
    trials_per_point: int = DEFAULT_TRIALS
    seed: int = 0
    cutoff: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "sweep", tuple(float(v) for v in self.sweep))
        if self.trials_per_point < 1:
            raise DomainError("trials_per_point must be at least 1")
        if not self.sweep:
            raise DomainError("empty sweep")
        for v in self.sweep:
            if self.model == "bs" and not 0.0 <= v <= 1.0:
                raise DomainError(f"transmissivity {v} outside [0, 1]")
            if self.model == "pdc" and v < 1.0:
                raise DomainError(f"gain {v} below 1")

    def scheme(self, value: float) -> SchemeConfig:
        kw = {"t": value} if self.model == "bs" else {"gain": value}
        return SchemeConfig(
            nbar=self.nbar, m=self.m, model=self.model, theta=self.theta,
            phi=self.phi, loss=self.loss, cutoff=self.cutoff, **kw,
        )

    @property
    def stage_nbar(self) -> float:
        """Mean photon number of the coherent light entering the addition stage."""
        return abs(addition_amplitude(self.nbar, self.theta, self.phi, self.loss)) ** 2


@dataclass(frozen=True)
class TrialRecord:
    sweep_value: float
    branch: str
    herald_count: int
    detected_n: int


@dataclass(frozen=True)
class AggregateStats:
    sweep_value: float
    trials: int
    kept: int
    empirical_success_rate: float
    theory_success_probability: float
    empirical_mean: float | None
    empirical_snr: float | None
    empirical_snr_ratio: float | None
    theory_snr_ratio: float | None


def _key(seed: int, index: int) -> np.ndarray:
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(index,))
    return ss.generate_state(2, np.uint64)


def trial_uniforms(seed: int, index: int, start: int, count: int) -> np.ndarray:
    """Uniforms for trials ``start .. start+count-1`` of sweep point ``index``.

    ``start`` must be even: Philox emits four 64-bit words per counter step
    and each trial consumes two.
    """
    if start % 2:
        raise DomainError("trial blocks must start at an even index")
    bits = np.random.Philox(key=_key(seed, index))
    bits.advance(start // 2)
    return np.random.Generator(bits).random((count, 2))


def _outcome_tables(cfg: RunConfig, value: float):
    result = herald(cfg.scheme(value))
    labels, weights, cdfs = [], [], []
    for k, w, state in result.outcome_table():
        if w <= 0.0:
            continue
        p = np.abs(state.amplitudes) ** 2
        labels.append(k)
        weights.append(w)
        cdfs.append(np.cumsum(p) / p.sum())
    return result.herald_outcome, np.array(labels), np.array(weights), cdfs


def simulate_point(cfg: RunConfig, index: int, start: int = 0, count: int | None = None):
    """Herald counts and detected photon numbers for one sweep point, as arrays."""
    count = cfg.trials_per_point - start if count is None else count
    herald_k, labels, weights, cdfs = _outcome_tables(cfg, cfg.sweep[index])
    u = trial_uniforms(cfg.seed, index, start, count)
    wcdf = np.cumsum(weights)
    pick = np.searchsorted(wcdf, u[:, 0] * wcdf[-1], side="right")
    pick = np.minimum(pick, len(weights) - 1)
    detected = np.empty(count, dtype=np.int64)
    for j in np.unique(pick):
        sel = pick == j
        n = np.searchsorted(cdfs[j], u[sel, 1], side="right")
        detected[sel] = np.minimum(n, cdfs[j].size - 1)
    return labels[pick], detected, herald_k


def run_trials(cfg: RunConfig, workers: int | None = None) -> list[TrialRecord]:
    workers = worker_count() if workers is None else workers
    indices = range(len(cfg.sweep))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            points = list(pool.map(lambda i: simulate_point(cfg, i), indices))
    else:
        points = [simulate_point(cfg, i) for i in indices]
    records = []
    for value, (k, n, herald_k) in zip(cfg.sweep, points):
        for kk, nn in zip(k.tolist(), n.tolist()):
            branch = SUCCESS if kk == herald_k else FAILURE
            records.append(TrialRecord(value, branch, kk, nn))
    return records


def _theory(cfg: RunConfig, value: float):
    nbar = cfg.stage_nbar
    if cfg.model == "bs":
        p = p_add_closed(cfg.m, value, nbar)
        try:
            ratio = snr_ratio(cfg.m, value, nbar)
        except DivergentSNRError:
            ratio = None
        return p, ratio
    result = herald(cfg.scheme(value))
    st = result.success_state
    try:
        s = snr_from_moments(mean_photon(st), second_moment(st), cfg.m)
        ratio = s / math.sqrt(nbar)
    except (DivergentSNRError, ZeroDivisionError):
        ratio = None
    return result.success_probability, ratio


def empirical_snr(counts, m: int) -> float | None:
    """(sample mean - m) / sample std over kept counts; None when undefined."""
    counts = np.asarray(counts, dtype=float)
    if counts.size < 2:
        return None
    sd = counts.std(ddof=1)
    if sd == 0.0:
        return None
    return (counts.mean() - m) / sd


def aggregate(records, cfg: RunConfig) -> list[AggregateStats]:
    """Per sweep value: kept count, success rate, empirical SNR and SNR ratio
    against the coherent baseline at the addition stage, with theory attached."""
    baseline = math.sqrt(cfg.stage_nbar)
    kept = {v: [] for v in cfg.sweep}
    totals = {v: 0 for v in cfg.sweep}
    for r in records:
        totals[r.sweep_value] += 1
        if r.branch == SUCCESS:
            kept[r.sweep_value].append(r.detected_n)
    out = []
    for v in cfg.sweep:
        counts = kept[v]
        snr = empirical_snr(counts, cfg.m)
        ratio = snr / baseline if snr is not None and baseline > 0 else None
        p_theory, r_theory = _theory(cfg, v)
        out.append(
            AggregateStats(
                sweep_value=v,
                trials=totals[v],
                kept=len(counts),
                empirical_success_rate=len(counts) / totals[v] if totals[v] else 0.0,
                theory_success_probability=p_theory,
                empirical_mean=float(np.mean(counts)) if counts else None,
                empirical_snr=snr,
                empirical_snr_ratio=ratio,
                theory_snr_ratio=r_theory,
            )
        )
    return out


def ratio_scatter(cfg: RunConfig, replicates: int = 20) -> list[float]:
    """Sample standard deviation of the empirical SNR ratio over independent
    replicate experiments, one value per sweep point."""
    seeds = np.random.SeedSequence(int(cfg.seed)).generate_state(replicates, np.uint64)
    ratios = np.full((replicates, len(cfg.sweep)), np.nan)
    for r, s in enumerate(seeds):
        rep = replace(cfg, seed=int(s))
        for j, st in enumerate(aggregate(run_trials(rep, workers=1), rep)):
            if st.empirical_snr_ratio is not None:
                ratios[r, j] = st.empirical_snr_ratio
    return [float(np.nanstd(ratios[:, j], ddof=1)) for j in range(len(cfg.sweep))]
