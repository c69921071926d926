"""Command-line entry point: ``pacs <command> [flags]``.

Every command writes one table, CSV by default or JSON with
``--format json``. CSV output starts with a ``#`` line holding the resolved
configuration as JSON, then a header and the rows. Floats carry 17
significant digits so values round-trip exactly; missing values are empty
cells (``null`` in JSON).

Exit status: 0 on success, 2 on usage or domain errors, 1 when a
computation fails its accuracy or truncation checks.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .analytics import mean_n_added, second_moment_added, snr_from_moments
from .circuit import LossSpec
from .errors import DivergentSNRError, DomainError, PacsError, TruncationWarning
from .experiment import DEFAULT_TRIALS, RunConfig, aggregate, run_trials
from .fock import coherent_state, fock_state, number_distribution
from .scheme import SchemeConfig, addition_amplitude, branch_snr, herald, scheme_fisher
from .wigner import PhaseSpaceGrid, phase_space_cutoff, wigner_grid


@dataclass
class OutputTable:
    header: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *row):
        if len(row) != len(self.header):
            raise ValueError(f"row has {len(row)} cells, header has {len(self.header)}")
        self.rows.append(list(row))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else v
    return v


def render(table: OutputTable, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "metadata": table.metadata,
            "columns": table.header,
            "rows": [[_json_value(v) for v in row] for row in table.rows],
        }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(table.metadata, sort_keys=True) + "\n")
    buf.write(",".join(table.header) + "\n")
    for row in table.rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _linspace(lo, hi, steps):
    if steps < 1:
        raise DomainError("sweep needs at least one step")
    return [lo] if steps == 1 else [float(v) for v in np.linspace(lo, hi, steps)]


def _sweep(args, default):
    """Coupling values: an explicit --t/--gain, else the --t-min/--t-max/--t-steps range."""
    single = args.t if args.model == "bs" else args.gain
    if single is not None:
        return [single]
    lo, hi, steps = default
    lo = lo if args.t_min is None else args.t_min
    hi = hi if args.t_max is None else args.t_max
    steps = steps if args.t_steps is None else args.t_steps
    return _linspace(lo, hi, steps)


def _loss(args) -> LossSpec:
    return LossSpec(args.loss, args.det_eff)


def _scheme(args, m, value) -> SchemeConfig:
    kw = {"t": value} if args.model == "bs" else {"gain": value}
    return SchemeConfig(
        nbar=args.nbar, m=m, model=args.model, theta=args.theta, phi=args.phi,
        loss=_loss(args), cutoff=args.cutoff_override, **kw,
    )


def _try(fn):
    try:
        return fn()
    except DivergentSNRError:
        return None


def cmd_prob(args) -> OutputTable:
    default = (0.0, 1.0, 21) if args.model == "bs" else (1.0, 5.0, 21)
    table = OutputTable(["model", "sweep_value", "m", "nbar", "probability"])
    for m in args.m:
        for v in _sweep(args, default):
            p = herald(_scheme(args, m, v)).success_probability
            axis = 1.0 - v if args.model == "bs" else v
            table.add(args.model, axis, m, args.nbar, p)
    return table


def cmd_snr_sweep(args) -> OutputTable:
    if args.model != "bs":
        raise DomainError("snr-sweep uses the beam-splitter model")
    table = OutputTable([
        "T", "m", "snr", "snr_ratio", "success_probability",
        "weighted_success_metric", "weighted_failure_metric",
    ])
    nbar = abs(addition_amplitude(args.nbar, args.theta, args.phi, _loss(args))) ** 2
    for m in args.m:
        for t in _sweep(args, (0.0, 1.0, 21)):
            snr = _try(lambda: snr_from_moments(
                mean_n_added(m, t, nbar), second_moment_added(m, t, nbar), m))
            ratio = snr / math.sqrt(nbar) if snr is not None and nbar > 0 else None
            b = branch_snr(herald(_scheme(args, m, t)), m)
            table.add(t, m, snr, ratio, b.success_probability, b.weighted_success, b.weighted_failure)
    # no photons were added on the failure branch, so its SNR carries no offset
    table.metadata["failure_snr_offset"] = 0
    return table


def _point(args) -> float:
    """Single coupling value, defaulting to the ideal endpoint T = 1 or G = 1."""
    if args.model == "bs":
        return 1.0 if args.t is None else args.t
    return 1.0 if args.gain is None else args.gain


def cmd_distribution(args) -> OutputTable:
    table = OutputTable(["m", "n", "p_n"])
    for m in args.m:
        cfg = _scheme(args, m, _point(args))
        state = herald(cfg).success_state
        if state is None:
            continue
        for n, p in enumerate(number_distribution(state)):
            table.add(m, n, float(p))
    return table


def _wigner_state(args):
    alpha = addition_amplitude(args.nbar, args.theta, args.phi, _loss(args))
    m = args.m[0]
    if args.state == "fock":
        return fock_state(m, args.cutoff_override or m + 1)
    cutoff = args.cutoff_override or phase_space_cutoff(abs(alpha) ** 2, m)
    if args.state == "coherent":
        return coherent_state(alpha, cutoff)
    cfg = replace(_scheme(args, m, _point(args)), cutoff=cutoff)
    state = herald(cfg).success_state
    if state is None:
        raise DomainError("no heralded state at these settings")
    return state


def cmd_wigner(args) -> OutputTable:
    grid = PhaseSpaceGrid.parse(args.grid) if args.grid else PhaseSpaceGrid()
    samples = wigner_grid(_wigner_state(args), grid)
    table = OutputTable(["x", "p", "W"])
    for i, x in enumerate(grid.xs):
        for j, p in enumerate(grid.ps):
            table.add(float(x), float(p), float(samples.values[i, j]))
    table.metadata["photon_cutoff"] = samples.photon_cutoff
    table.metadata["grid"] = grid.spec()
    return table


def cmd_simulate(args) -> OutputTable:
    fields = [
        "sweep_value", "trials", "kept", "empirical_success_rate",
        "theory_success_probability", "empirical_mean", "empirical_snr",
        "empirical_snr_ratio", "theory_snr_ratio",
    ]
    table = OutputTable(["m"] + fields)
    default = (0.1, 0.9, 9) if args.model == "bs" else (1.1, 3.0, 9)
    sweep = _sweep(args, default)
    for m in args.m:
        cfg = RunConfig(
            nbar=args.nbar, m=m, sweep=tuple(sweep), model=args.model, theta=args.theta,
            phi=args.phi, loss=_loss(args), trials_per_point=args.trials, seed=args.seed,
            cutoff=args.cutoff_override,
        )
        for st in aggregate(run_trials(cfg), cfg):
            row = asdict(st)
            table.add(m, *(row[f] for f in fields))
    return table


def cmd_fisher(args) -> OutputTable:
    if args.model != "bs":
        raise DomainError("fisher uses the beam-splitter model")
    if args.phi_steps is not None:
        phis = _linspace(args.phi_min, args.phi_max, args.phi_steps)
    else:
        phis = [args.phi]
    table = OutputTable(["phi", "F_success", "F_failure", "F_combined", "F_joint", "qcrb"])
    t = 0.5 if args.t is None else args.t
    m = args.m[0]
    for phi in phis:
        r = scheme_fisher(_scheme(args, m, t), phi, nu=args.trials_nu)
        table.add(phi, r.fisher_success, r.fisher_failure, r.fisher_combined, r.fisher_joint, r.qcrb)
    return table


COMMANDS = {
    "prob": (cmd_prob, "herald success probability over a T or G sweep"),
    "snr-sweep": (cmd_snr_sweep, "SNR ratios and branch-weighted metrics over T"),
    "distribution": (cmd_distribution, "photon-number distribution of the heralded state"),
    "wigner": (cmd_wigner, "Wigner function on a phase-space grid"),
    "simulate": (cmd_simulate, "Monte Carlo of the post-selected experiment"),
    "fisher": (cmd_fisher, "Fisher information and shot-noise bound over phi"),
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with flag values; explicit flags win")
    p.add_argument("--nbar", type=float, default=1.0, help="mean photon number of the input light")
    p.add_argument("--theta", type=float, default=0.0, help="input phase (rad)")
    p.add_argument("--phi", type=float, default=0.0, help="interferometer phase (rad)")
    p.add_argument("--m", type=int, nargs="+", default=[1], help="photons added (one or more)")
    p.add_argument("--model", choices=("bs", "pdc"), default="bs")
    p.add_argument("--t", type=float, help="addition beam-splitter transmissivity")
    p.add_argument("--gain", type=float, help="PDC gain G = cosh^2 r")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--t-steps", type=int)
    p.add_argument("--loss", type=float, default=0.0, help="interferometer loss L")
    p.add_argument("--det-eff", type=float, default=1.0, help="detector efficiency D")
    p.add_argument("--cutoff-override", type=int, help="force the Fock cutoff")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pacs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        _common(p)
        if name == "wigner":
            p.add_argument("--state", choices=("coherent", "added", "fock"), default="added")
            p.add_argument("--grid", help='"xmin:xmax:n,pmin:pmax:n"; write --grid=... when xmin is negative (default -6:6:201,-6:6:201)')
        if name == "simulate":
            p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="trials per sweep value")
            p.add_argument("--seed", type=int, help="RNG seed (required)")
        if name == "fisher":
            p.add_argument("--phi-min", type=float, default=0.3)
            p.add_argument("--phi-max", type=float, default=1.5)
            p.add_argument("--phi-steps", type=int)
            p.add_argument("--trials-nu", type=int, default=1, help="repetitions in the shot-noise bound")
    return parser


def _apply_config(parser, sub, args, argv):
    """Re-parse with file values as defaults so explicit flags still win."""
    try:
        with open(args.config) as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(values, dict):
        parser.error("config file must hold a JSON object")
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            parser.error(f"unknown config key {key!r}")
        if dest == "m" and not isinstance(value, list):
            value = [value]
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _metadata(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format", "config")}
    return {"command": args.command, "version": __version__, "seed": cfg.get("seed"), "config": cfg}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    if args.config:
        args = _apply_config(parser, sub, args, argv)
    if args.command == "simulate" and args.seed is None:
        sub.error("simulate requires --seed")
    if args.command == "simulate" and args.trials < 1:
        sub.error("--trials must be positive")
    fn = COMMANDS[args.command][0]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", TruncationWarning)
            table = fn(args)
    except DomainError as exc:
        print(f"pacs {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (PacsError, TruncationWarning) as exc:
        print(f"pacs {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    table.metadata = {**_metadata(args), **table.metadata}
    text = render(table, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
