"""Command-line front end, configuration files, and dataset output.

Each subcommand drives one protocol and writes a single self-describing
dataset file: a metadata header carrying every physical parameter, the seed,
the tool version and an ISO-8601 timestamp, followed by the records.  CSV
files prefix the header as `# key = value` comment lines; JSON files hold
an object {"metadata": ..., "records": ...}.  Numeric values are written
with 17 significant digits so doubles round-trip losslessly.

Configuration files are flat `key = value` text with `#` comments; flags
given on the command line take precedence over file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import math
import sys

import numpy as np

from . import __version__
from .bdg import ChainParams, build_bdg_spectrum, propagators
from .experiments import (
    DisorderSpec,
    TimeWindow,
    axis_asymmetry,
    disorder_ensemble,
    encoding_site_scan,
    phase_diagram_scan,
    spacetime_map,
    time_average_qfi,
    wavefront_velocity,
)
from .majorana import critical_scaling_fit, plateau_prediction, zero_mode
from .manybody import (
    ManyBodyParams,
    evolve_two_branches,
    interaction_scan,
    qfi_spectral,
    reduced_qubit_from_branches,
)
from .qfi import Channel, qfi_at_time, w_timeseries

SUBCOMMANDS = (
    "phase-diagram", "spacetime", "site-scan", "asymmetry", "scaling",
    "disorder", "interacting", "velocity", "verify",
)


class ConfigError(ValueError):
    """Raised for malformed or unknown configuration input."""


@dataclasses.dataclass
class RunConfig:
    """Resolved invocation: subcommand, parameter map, output destination."""

    subcommand: str
    parameters: dict
    seed: int
    output_path: str
    format: str


def load_config(path: str) -> dict:
    """Parse a flat key=value configuration file.

    Lines are `key = value`; blank lines and `#` comments are ignored.
    Duplicate keys are an error; value strings are kept verbatim and
    converted by the argument parser.
    """
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            if key in out:
                raise ConfigError(f"{path}:{lineno}: duplicate key '{key}'")
            out[key] = value
    return out


def serialize_config(cfg: dict) -> str:
    """Inverse of load_config for the accepted key set."""
    return "".join(f"{k} = {v}\n" for k, v in cfg.items())


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def write_dataset(path: str, fmt: str, metadata: dict, columns, records):
    """Write one run's dataset with its metadata header."""
    metadata = dict(metadata)
    metadata["tool_version"] = __version__
    metadata["timestamp"] = datetime.datetime.now(
        datetime.timezone.utc).isoformat()
    if fmt == "json":
        payload = {
            "metadata": metadata,
            "records": [{c: rec.get(c) for c in columns} for rec in records],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, default=_fmt)
            fh.write("\n")
        return
    with open(path, "w") as fh:
        for key, value in metadata.items():
            fh.write(f"# {key} = {_fmt(value)}\n")
        fh.write(",".join(columns) + "\n")
        for rec in records:
            fh.write(",".join(_fmt(rec.get(c, "")) for c in columns) + "\n")


def _channel(name: str) -> Channel:
    try:
        return Channel(name.lower())
    except ValueError:
        raise ConfigError(f"unknown channel '{name}' (expected y or x)")


def _chain(args, L=None) -> ChainParams:
    return ChainParams(
        L=L if L is not None else args.length,
        J=args.hopping, gamma=args.gamma, h=args.field,
    )


def _window(args) -> TimeWindow:
    return TimeWindow.with_spacing(args.t_min, args.t_max, args.dt)


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kitaevqfi",
        description="Boundary QFI dynamics in the open Kitaev chain",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, window=True):
        p.add_argument("--config", default=None,
                       help="flat key=value configuration file")
        p.add_argument("--length", "-L", type=int, default=100,
                       help="number of chain sites")
        p.add_argument("--hopping", type=float, default=1.0,
                       help="hopping energy J (sets the units)")
        p.add_argument("--gamma", type=float, default=1.0,
                       help="XY anisotropy")
        p.add_argument("--field", type=float, default=0.5,
                       help="uniform transverse field h")
        p.add_argument("--channel", default="y", choices=["y", "x"],
                       help="encoding rotation axis")
        p.add_argument("--theta0", type=float, default=0.0,
                       help="operating angle")
        p.add_argument("--encoding-site", type=int, default=1,
                       help="encoding site k")
        p.add_argument("--readout-site", type=int, default=1,
                       help="readout site j")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", "-o", default=None,
                       help="dataset file path (default: <subcommand>.<fmt>)")
        p.add_argument("--format", default="csv", choices=["csv", "json"])
        if window:
            p.add_argument("--t-min", type=float, default=150.0)
            p.add_argument("--t-max", type=float, default=200.0)
            p.add_argument("--dt", type=float, default=0.25,
                           help="time sample spacing")
        return p

    p = common(sub.add_parser("phase-diagram",
                              help="time-averaged boundary QFI on an (h, gamma) grid"))
    p.add_argument("--h-min", type=float, default=0.0)
    p.add_argument("--h-max", type=float, default=2.0)
    p.add_argument("--h-steps", type=int, default=11)
    p.add_argument("--gamma-min", type=float, default=0.0)
    p.add_argument("--gamma-max", type=float, default=1.0)
    p.add_argument("--gamma-steps", type=int, default=11)

    p = common(sub.add_parser("spacetime",
                              help="QFI map over all readout sites and times"))
    p.add_argument("--t-start", type=float, default=0.0)

    common(sub.add_parser("site-scan",
                          help="mean boundary QFI versus encoding site"))
    sub.choices["site-scan"].add_argument("--k-max", type=int, default=12)

    common(sub.add_parser("asymmetry",
                          help="window-averaged QFI in both encoding channels"))

    p = common(sub.add_parser("scaling",
                              help="critical scaling of the boundary plateau"))
    p.add_argument("--h-values", type=_float_list, default=[0.5, 0.6, 0.7, 0.8, 0.9])

    p = common(sub.add_parser("disorder",
                              help="disorder-averaged boundary QFI"))
    p.add_argument("--disorder-strength", type=float, default=0.2)
    p.add_argument("--realizations", type=int, default=100)

    p = common(sub.add_parser("interacting",
                              help="boundary QFI with an Ising interaction"))
    p.add_argument("--delta-values", type=_float_list,
                   default=[0.0, 0.2, 0.4, 0.6, 0.8])
    p.add_argument("--sizes", type=_int_list, default=[12])
    p.set_defaults(t_min=25.0, t_max=50.0, length=12)

    p = common(sub.add_parser("velocity",
                              help="wavefront velocity from a space-time map"))
    p.add_argument("--threshold", type=float, default=0.02)
    p.add_argument("--t-fit-max", type=float, default=80.0)

    common(sub.add_parser("verify",
                          help="run the numerical invariant gates"), window=False)
    return parser


def _apply_config_file(parser, argv):
    """Two-pass parse: file values override defaults, flags override the file."""
    pre, _ = parser.parse_known_args(argv)
    cfg_path = getattr(pre, "config", None)
    if not cfg_path:
        return parser.parse_args(argv)
    file_cfg = load_config(cfg_path)
    sub = parser._subparsers._group_actions[0].choices[pre.subcommand]
    known = {a.dest for a in sub._actions}
    unknown = set(file_cfg) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    typed = {}
    for action in sub._actions:
        if action.dest in file_cfg:
            value = file_cfg[action.dest]
            typed[action.dest] = action.type(value) if action.type else value
    sub.set_defaults(**typed)
    return parser.parse_args(argv)


def _metadata(args, extra=None):
    md = {
        "subcommand": args.subcommand,
        "seed": args.seed,
    }
    for key in ("length", "hopping", "gamma", "field", "channel", "theta0",
                "encoding_site", "readout_site", "t_min", "t_max", "dt"):
        if hasattr(args, key):
            md[key] = getattr(args, key)
    if extra:
        md.update(extra)
    return md


def _out_path(args):
    if args.output:
        return args.output
    return f"{args.subcommand}.{args.format}"


QFI_COLUMNS = ["L", "J", "gamma", "h", "j", "k", "channel", "theta0",
               "t_min", "t_max", "mean_qfi", "std_qfi"]


def _run_phase_diagram(args):
    window = _window(args)
    hs = np.linspace(args.h_min, args.h_max, args.h_steps)
    gs = np.linspace(args.gamma_min, args.gamma_max, args.gamma_steps)
    records = phase_diagram_scan(
        hs, gs, _chain(args), window,
        j=args.readout_site, k=args.encoding_site,
        channel=_channel(args.channel), theta0=args.theta0,
    )
    write_dataset(_out_path(args), args.format, _metadata(args),
                  QFI_COLUMNS + ["error"], records)
    return 0


def _run_spacetime(args):
    times = np.arange(args.t_start, args.t_max + args.dt / 2, args.dt)
    m = spacetime_map(_chain(args), args.encoding_site, times,
                      channel=_channel(args.channel), theta0=args.theta0)
    records = [
        {"t": float(t), "j": j + 1, "qfi": float(m.values[j, i])}
        for i, t in enumerate(times) for j in range(args.length)
    ]
    write_dataset(_out_path(args), args.format, _metadata(args),
                  ["t", "j", "qfi"], records)
    return 0


def _run_site_scan(args):
    window = _window(args)
    records, slope = encoding_site_scan(
        _chain(args), range(1, args.k_max + 1), window,
        j=args.readout_site, channel=_channel(args.channel),
        theta0=args.theta0,
    )
    write_dataset(_out_path(args), args.format,
                  _metadata(args, {"fit_slope": slope}), QFI_COLUMNS, records)
    return 0


def _run_asymmetry(args):
    window = _window(args)
    mean_y, mean_x = axis_asymmetry(
        _chain(args), window, j=args.readout_site, k=args.encoding_site,
        theta0=args.theta0,
    )
    records = [
        {"channel": "y", "mean_qfi": mean_y},
        {"channel": "x", "mean_qfi": mean_x},
    ]
    write_dataset(_out_path(args), args.format, _metadata(args),
                  ["channel", "mean_qfi"], records)
    return 0


def _run_scaling(args):
    window = _window(args)
    records = []
    points = []
    for h in args.h_values:
        p = dataclasses.replace(_chain(args), h=h)
        spec = build_bdg_spectrum(p)
        mean, std = time_average_qfi(
            p, args.readout_site, args.encoding_site, _channel(args.channel),
            args.theta0, window, spec=spec)
        pred = plateau_prediction(zero_mode(spec), args.readout_site,
                                  args.encoding_site)
        points.append((h, mean))
        records.append({
            "L": p.L, "J": p.J, "gamma": p.gamma, "h": h,
            "j": args.readout_site, "k": args.encoding_site,
            "channel": args.channel, "theta0": args.theta0,
            "t_min": window.t_min, "t_max": window.t_max,
            "mean_qfi": mean, "std_qfi": std, "prediction": pred,
        })
    exponent, amplitude, resid = critical_scaling_fit(points, J=args.hopping)
    write_dataset(
        _out_path(args), args.format,
        _metadata(args, {"fit_exponent": exponent, "fit_amplitude": amplitude,
                         "fit_rms_residual": resid}),
        QFI_COLUMNS + ["prediction"], records)
    return 0


def _run_disorder(args):
    window = _window(args)
    dspec = DisorderSpec(W=args.disorder_strength,
                         n_realizations=args.realizations, seed=args.seed)
    records = []
    for channel in (Channel.Y, Channel.X):
        res = disorder_ensemble(
            _chain(args), dspec, window, channel,
            j=args.readout_site, k=args.encoding_site, theta0=args.theta0)
        records.append({
            "W": args.disorder_strength, "channel": channel.value,
            "n_realizations": dspec.n_realizations,
            "n_used": res.n_used, "n_failed": res.n_failed,
            "mean_qfi": res.mean, "std_qfi": res.std,
        })
    write_dataset(_out_path(args), args.format, _metadata(args),
                  ["W", "channel", "n_realizations", "n_used", "n_failed",
                   "mean_qfi", "std_qfi"], records)
    return 0


def _run_interacting(args):
    window = _window(args)
    base = [
        ManyBodyParams(chain=_chain(args, L=L), delta=d)
        for L in args.sizes for d in args.delta_values
    ]
    records = interaction_scan(
        base, window, j=args.readout_site, k=args.encoding_site,
        channel=_channel(args.channel), theta0=args.theta0)
    write_dataset(_out_path(args), args.format, _metadata(args),
                  ["L", "J", "gamma", "h", "delta", "j", "k", "channel",
                   "theta0", "t_min", "t_max", "mean_qfi", "std_qfi"],
                  records)
    return 0


def _run_velocity(args):
    times = np.arange(0.5, args.t_fit_max, args.dt)
    m = spacetime_map(_chain(args), args.encoding_site, times,
                      channel=_channel(args.channel), theta0=args.theta0)
    v = wavefront_velocity(m, threshold=args.threshold)
    records = [{"threshold": args.threshold, "velocity": v}]
    write_dataset(_out_path(args), args.format, _metadata(args),
                  ["threshold", "velocity"], records)
    return 0


def _run_verify(args):
    """Numerical invariant gates; exits nonzero on any failure."""
    from .verify import run_all_gates

    results = run_all_gates(seed=args.seed)
    ok = True
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {name}: {detail}")
        ok = ok and passed
    print("verify:", "all gates passed" if ok else "FAILURES detected")
    return 0 if ok else 1


_RUNNERS = {
    "phase-diagram": _run_phase_diagram,
    "spacetime": _run_spacetime,
    "site-scan": _run_site_scan,
    "asymmetry": _run_asymmetry,
    "scaling": _run_scaling,
    "disorder": _run_disorder,
    "interacting": _run_interacting,
    "velocity": _run_velocity,
    "verify": _run_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config_file(parser, argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _RUNNERS[args.subcommand](args)
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
