"""Command-line entry point ``cdc``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import (GROUP_SUITES, MARKOV_SUITES, SCENARIO_SCHEMA, SUITE_ALIASES, load_config,
                     validate_config)
from .errors import CdcError, ConfigError
from .norms import BMO_norm, bmo_norm, h1_norms, jn_norm
from .poisson import CarlesonMeasure, carleson_embedding_check, subordinate
from .runner import curve_rows, dumps, execute, write_outputs
from .sampling import bounded_fields, eigen_fields
from .semigroup import TimeGrid, decompose
from .suites import _plain
from .zoo import describe, make_generator


def _json_arg(text: str, what: str):
    """Inline JSON if it looks like JSON, otherwise a path to a JSON file."""
    try:
        if text.lstrip().startswith(("{", "[")):
            return json.loads(text)
        with open(Path(text)) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON: {exc}", what) from exc


def _emit(report: dict, out: str | None) -> None:
    text = dumps(report)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _scenario_overrides(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    if args.suite:
        cfg["suites"] = args.suite
    if args.seed is not None:
        cfg["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        cfg["samples"] = args.samples
    if getattr(args, "grid", None) is not None:
        cfg["grid"] = {"pointsPerDecade": args.grid}
    return validate_config(cfg)


def _finish(cfg: dict, out_dir: str | None, started: float) -> int:
    report = execute(cfg)
    elapsed = time.perf_counter() - started
    if out_dir:
        curves = curve_rows(cfg) if cfg.get("curves") and cfg["backend"] == "markov" else None
        path = write_outputs(report, out_dir, elapsed, curves)
        print(f"{'PASS' if report['passed'] else 'FAIL'} {path}")
    else:
        sys.stdout.write(dumps(report))
    for name in report["failed"]:
        print(f"failed suite: {name}", file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_run(args) -> int:
    started = time.perf_counter()
    cfg = _scenario_overrides(load_config(args.config), args)
    return _finish(cfg, args.out or cfg.get("output"), started)


def cmd_verify(args) -> int:
    started = time.perf_counter()
    cfg = {"backend": "markov", "generator": _json_arg(args.generator, "generator")}
    cfg = _scenario_overrides(cfg, args)
    report = execute(cfg)
    if args.out and Path(args.out).suffix != ".json":
        path = write_outputs(report, args.out, time.perf_counter() - started)
        print(f"{'PASS' if report['passed'] else 'FAIL'} {path}")
    else:
        _emit(report, args.out)
    return 0 if report["passed"] else 1


def _field(args, sd) -> np.ndarray:
    n = sd.n
    if args.field is not None:
        raw = _json_arg(args.field, "field")
        if isinstance(raw, dict):
            f = np.asarray(raw.get("re", [0] * n), float) + 1j * np.asarray(raw.get("im", [0] * n), float)
        else:
            f = np.asarray(raw, dtype=complex)
        if f.shape != (n,):
            raise ConfigError(f"expected {n} values, got shape {f.shape}", "field")
        return f
    if args.delta is not None:
        if not 0 <= args.delta < n:
            raise ConfigError(f"state {args.delta} out of range 0..{n - 1}", "delta")
        return np.eye(n)[args.delta].astype(complex)
    return eigen_fields(sd, 1, np.random.default_rng(args.random), off_kernel=False)[:, 0]


def cmd_norms(args) -> int:
    gen = make_generator(_json_arg(args.generator, "generator"))
    sd = decompose(gen)
    f = _field(args, sd)
    grid = TimeGrid.for_spectrum(sd, args.grid)
    # H1 norms are defined modulo ker(L)
    h1s, h1g = h1_norms(sd, gen, sd.project_off_kernel(f)[:, None])
    out = {"fingerprint": gen.fingerprint(), "grid": grid.to_dict(),
           "bmo": bmo_norm(sd, f, grid).to_dict(), "BMO": BMO_norm(sd, f, grid).to_dict(),
           "jn": {str(p): jn_norm(sd, f, p, grid).to_dict() for p in (1.0, 2.0, 4.0)},
           "h1S": float(h1s[0]), "h1G": float(h1g[0])}
    _emit(_plain(out), args.out)
    return 0


def cmd_carleson(args) -> int:
    gen = make_generator(_json_arg(args.generator, "generator"))
    sd = decompose(gen)
    raw = _json_arg(args.measure, "measure")
    try:
        nu = CarlesonMeasure.from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad Carleson measure: {exc}", "measure") from exc
    rng = np.random.default_rng(args.seed)
    F = rng.normal(size=(gen.n, args.samples))
    G = bounded_fields(gen.n, args.samples, rng)
    rep = carleson_embedding_check(subordinate(sd), gen, nu, args.p, F, G,
                                   require_curvature=not args.no_curvature_check)
    _emit(_plain(rep.to_dict()), args.out)
    return 0


def cmd_group(args) -> int:
    started = time.perf_counter()
    group = _json_arg(args.group, "group")
    if args.psi is not None:
        group["psi"] = _json_arg(args.psi, "psi") if args.psi[:1] in "{[" else args.psi
    cfg = _scenario_overrides({"backend": "group", "group": group}, args)
    return _finish(cfg, args.out, started)


def cmd_zoo(args) -> int:
    for row in describe():
        print(f"{row['type']:<18} {row['description']}")
    return 0


def cmd_schema(args) -> int:
    sys.stdout.write(json.dumps(SCENARIO_SCHEMA, indent=2, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdc", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cdc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, suites):
        aliases = {k for k, v in SUITE_ALIASES.items() if v in suites}
        p.add_argument("--suite", action="append", choices=sorted(set(suites) | aliases | {"all"}),
                       help="suite to run (repeatable; default: all)")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--out")

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("config")
    common(p, set(MARKOV_SUITES) | set(GROUP_SUITES))
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run suites against one generator")
    p.add_argument("--generator", required=True, help="JSON file or inline JSON")
    p.add_argument("--grid", type=int, help="time-grid points per decade")
    common(p, MARKOV_SUITES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("norms", help="bmo/BMO/JN/H1 norms of one field")
    p.add_argument("--generator", required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--field", help="JSON list, or {re: [...], im: [...]}")
    src.add_argument("--random", type=int, default=0, metavar="SEED")
    src.add_argument("--delta", type=int, metavar="STATE")
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--out")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("carleson", help="Carleson norm and embedding ratios of a measure")
    p.add_argument("--generator", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-curvature-check", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_carleson)

    p = sub.add_parser("group", help="group von Neumann algebra suites")
    p.add_argument("--group", required=True)
    p.add_argument("--psi", help="word-length | indicator | cocycle | JSON")
    common(p, GROUP_SUITES)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("zoo", help="list generator families")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_zoo)

    p = sub.add_parser("schema", help="print the scenario JSON schema")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CdcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
