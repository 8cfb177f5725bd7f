"""Command line front end.

Subcommands: simulate (INI-configured run writing diagnostics, metadata
and checkpoints), verify (estimate suites with a JSON report), norms
(norm table for a saved field file) and info.  Exit codes: 0 on
success, 1 when a verify suite fails, 2 for invalid configuration or
usage, 3 when a simulation blows up.
"""

import argparse
import configparser
import csv
import io
import sys
from pathlib import Path

from . import __version__
from .errors import BlowUpError
from .fieldio import load_fields
from .fields import SpectralScalar, SpectralSymTensor, SpectralVector
from .integrator import (
    InitialCondition,
    RunConfig,
    SETTING_NOTE,
    run,
    write_diagnostics_csv,
    write_metadata,
)
from .littlewood_paley import INF, NormRequest, NormResult, evaluate_norm
from .system import SystemParams
from .verifier import ESTIMATE_IDS, run_default_suites, write_reports

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


class ConfigError(ValueError):
    """Invalid configuration file, override, or command usage."""


# ------------------------------------------------------------ simulate

_REQUIRED = object()

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _to_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


_SCHEMA = {
    "grid": {"n": int},
    "params": {
        "nu": float, "alpha": float, "eta": float, "beta": float,
        "kappa": float, "alpha1": float, "beta1": float, "b": float,
        "q_enabled": _to_bool,
    },
    "time": {
        "dt": float, "t_end": float, "diag_every": int,
        "checkpoint_every": int,
    },
    "initial": {
        "kind": str, "amplitude": float, "seed": int, "decay": float,
        "path": str,
    },
    "output": {"dir": str},
}


def _read_config(path, overrides) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    loaded = parser.read([path])
    if not loaded:
        raise ConfigError(f"cannot read config file {path}")
    for item in overrides:
        head, sep, value = item.partition("=")
        section, dot, key = head.partition(".")
        if not sep or not dot or not section or not key:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        if not parser.has_section(section):
            parser.add_section(section)
        parser[section][key.strip()] = value.strip()
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
    return parser


def _get(parser, section, key, default=_REQUIRED):
    if not parser.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    raw = parser.get(section, key)
    convert = _SCHEMA[section][key]
    try:
        return convert(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {section}.{key}: {raw!r}") from None


def build_run_config(parser) -> tuple:
    """RunConfig plus the output directory named in the file (or None)."""
    try:
        params = SystemParams(
            nu=_get(parser, "params", "nu", 1.0),
            alpha=_get(parser, "params", "alpha", 1.0),
            eta=_get(parser, "params", "eta", 0.0),
            beta=_get(parser, "params", "beta", 0.0),
            kappa=_get(parser, "params", "kappa", 1.0),
            alpha1=_get(parser, "params", "alpha1", 1.0),
            beta1=_get(parser, "params", "beta1", 0.0),
            b=_get(parser, "params", "b", 0.0),
            q_enabled=_get(parser, "params", "q_enabled", False),
        )
        initial = InitialCondition(
            kind=_get(parser, "initial", "kind", "taylor_green"),
            amplitude=_get(parser, "initial", "amplitude", 1.0),
            seed=_get(parser, "initial", "seed", 0),
            decay=_get(parser, "initial", "decay", 2.5),
            path=_get(parser, "initial", "path", ""),
        )
        config = RunConfig(
            n=_get(parser, "grid", "n"),
            params=params,
            dt=_get(parser, "time", "dt"),
            t_end=_get(parser, "time", "t_end"),
            diag_every=_get(parser, "time", "diag_every", 1),
            checkpoint_every=_get(parser, "time", "checkpoint_every", 0),
            initial_condition=initial,
        )
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return config, _get(parser, "output", "dir", None)


def cmd_simulate(args) -> int:
    parser = _read_config(args.config, args.set)
    config, configured_dir = build_run_config(parser)
    out = args.out or configured_dir
    if out is None:
        raise ConfigError("no output directory: pass --out or set output.dir")
    out_dir = Path(out)
    if out_dir.exists() and any(out_dir.iterdir()) and not args.force:
        raise ConfigError(
            f"output directory {out_dir} exists and is not empty; "
            "pass --force to write into it"
        )
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        result = run(config, out_dir=str(out_dir))
    except BlowUpError as err:
        write_diagnostics_csv(out_dir / "diagnostics.csv", err.records)
        if err.metadata is not None:
            write_metadata(out_dir / "metadata.json", err.metadata)
        print(f"blow-up at t={err.time:.6g}: {err}", file=sys.stderr)
        print(f"partial outputs in {out_dir}", file=sys.stderr)
        return EXIT_BLOWUP

    write_diagnostics_csv(out_dir / "diagnostics.csv", result.records)
    write_metadata(out_dir / "metadata.json", result.metadata)
    summary = result.metadata["summary"]
    print(
        f"completed {result.metadata['steps_taken']} steps to "
        f"t={config.t_end:g} on n={config.n}"
    )
    print(
        f"final half-energy {summary['final_half_energy']:.6e}, "
        f"max energy residual {summary['max_energy_residual']:.3e}"
    )
    print(f"outputs in {out_dir}")
    return EXIT_OK


# -------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    try:
        resolutions = tuple(int(tok) for tok in args.resolutions.split(","))
    except ValueError:
        raise ConfigError(
            f"--resolutions expects a comma list of integers, got "
            f"{args.resolutions!r}"
        ) from None
    if args.samples < 1:
        raise ConfigError("--samples must be at least 1")
    if args.slack <= 1.0:
        raise ConfigError("--slack must exceed 1")
    reports = run_default_suites(
        resolutions=resolutions,
        n_samples=args.samples,
        slack=args.slack,
        threads=args.threads,
        base_seed=args.seed,
    )
    for key, report in reports.items():
        status = "PASS" if report.passed else "FAIL"
        print(
            f"{status} {key}: max ratio {report.max_ratio:.4g} "
            f"(median {report.median_ratio:.4g}) over "
            f"{report.ensemble_size} samples, {report.sweep_axis} sweep"
        )
        for warning in report.warnings:
            print(f"     warning: {warning}")
    if args.out:
        write_reports(args.out, reports)
        print(f"wrote {args.out}")
    return EXIT_OK if all(r.passed for r in reports.values()) else EXIT_SUITE_FAILED


# --------------------------------------------------------------- norms

_NORM_GRAMMAR = (
    "l2 | linf | lp:P | h:S | hdot:S | b:S:P:Q | bdot:S:P:Q | bmo, "
    "each optionally prefixed by grad:"
)


def _exponent(token: str) -> float:
    if token.strip().lower() == "inf":
        return INF
    return float(token)


def parse_norm_spec(token: str) -> NormRequest:
    """One norm out of the grammar: l2, linf, lp:P, h:S, hdot:S,
    b:S:P:Q, bdot:S:P:Q, bmo, optionally prefixed with grad: to act on
    the gradient components."""
    spec = token.strip()
    of_gradient = False
    if spec.startswith("grad:"):
        of_gradient = True
        spec = spec[len("grad:"):]
    head, *rest = spec.split(":")
    try:
        if head == "l2" and not rest:
            return NormRequest("lp", p=2.0, of_gradient=of_gradient)
        if head == "linf" and not rest:
            return NormRequest("lp", p=INF, of_gradient=of_gradient)
        if head == "lp" and len(rest) == 1:
            return NormRequest("lp", p=_exponent(rest[0]),
                               of_gradient=of_gradient)
        if head in ("h", "hdot") and len(rest) == 1:
            return NormRequest("sobolev", s=float(rest[0]),
                               homogeneous=head == "hdot",
                               of_gradient=of_gradient)
        if head in ("b", "bdot") and len(rest) == 3:
            return NormRequest("besov", s=float(rest[0]),
                               p=_exponent(rest[1]), q=_exponent(rest[2]),
                               homogeneous=head == "bdot",
                               of_gradient=of_gradient)
        if head == "bmo" and not rest:
            return NormRequest("bmo", of_gradient=of_gradient)
    except ValueError:
        raise ConfigError(f"bad number in norm spec {token!r}") from None
    raise ConfigError(f"unknown norm spec {token!r}; grammar: {_NORM_GRAMMAR}")


_KIND_NAMES = {
    SpectralScalar: "scalar",
    SpectralVector: "vector",
    SpectralSymTensor: "tensor",
}


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_norms(args) -> int:
    requests = [(tok.strip(), parse_norm_spec(tok)) for tok in
                args.spec.split(",") if tok.strip()]
    if not requests:
        raise ConfigError("--spec lists no norms")
    fields = load_fields(args.fields)
    results = []
    for index, field in enumerate(fields):
        field_id = f"field{index}:{_KIND_NAMES[type(field)]}"
        for token, request in requests:
            try:
                value, j_lo, j_hi = evaluate_norm(field, request)
            except ValueError as err:
                raise ConfigError(f"{token}: {err}") from None
            results.append(NormResult(
                field_id=field_id,
                norm_kind=request.kind,
                s=request.s,
                p=request.p,
                q=request.q,
                homogeneous=request.homogeneous,
                value=value,
                j_min=j_lo,
                j_max=j_hi,
            ))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    columns = ("field_id", "norm_kind", "s", "p", "q", "homogeneous",
               "value", "j_min", "j_max")
    writer.writerow(columns)
    for row in results:
        writer.writerow([_format_cell(getattr(row, col)) for col in columns])
    text = buffer.getvalue()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- info


def cmd_info(args) -> int:
    print(f"oldroyd2d {__version__}")
    print(f"setting: {SETTING_NOTE}")
    print(f"initial condition kinds: taylor_green, shear, random_solenoidal, file")
    print(f"norm grammar: {_NORM_GRAMMAR}")
    print("estimate suites:")
    for estimate_id in ESTIMATE_IDS:
        print(f"  {estimate_id}")
    return EXIT_OK


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oldroyd2d",
        description="pseudo-spectral viscoelastic flow runs and estimate checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a configured simulation")
    sim.add_argument("config", help="INI configuration file")
    sim.add_argument("--out", help="output directory (overrides output.dir)")
    sim.add_argument("--set", action="append", default=[],
                     metavar="SECTION.KEY=VALUE",
                     help="override a config value; repeatable")
    sim.add_argument("--force", action="store_true",
                     help="write into an existing non-empty directory")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run the estimate suites")
    ver.add_argument("--out", help="write the JSON report here")
    ver.add_argument("--slack", type=float, default=2.0,
                     help="allowed ratio growth along a sweep (default 2)")
    ver.add_argument("--samples", type=int, default=8,
                     help="ensemble size per sweep point (default 8)")
    ver.add_argument("--resolutions", default="32,64,128",
                     help="comma list for the resolution sweeps")
    ver.add_argument("--seed", type=int, default=100,
                     help="base seed for the ensembles (default 100)")
    ver.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: O2D_THREADS or 1)")
    ver.set_defaults(func=cmd_verify)

    nrm = sub.add_parser("norms", help="tabulate norms of saved fields")
    nrm.add_argument("fields", help="saved field container")
    nrm.add_argument("--spec", required=True,
                     help=f"comma list of norms; grammar: {_NORM_GRAMMAR}")
    nrm.add_argument("--out", help="write CSV here instead of stdout")
    nrm.set_defaults(func=cmd_norms)

    inf = sub.add_parser("info", help="print version and capabilities")
    inf.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
