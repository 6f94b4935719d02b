"""Command-line driver.

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 a bound
violation was detected and ``--strict`` was given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import experiments as ex
from .errors import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_VERDICT = 0, 1, 2, 3

CHAIN_KEYS = {
    "input_dim": "positive integer, width of x",
    "rows": "comma list, row count n of each layer",
    "ensemble": "one ensemble for all layers, or a comma list (one per layer)",
    "splitter": "true/false (must be true for bound campaigns)",
    "weight_seed": "64-bit seed for the weight matrices",
    "deltas": "comma list of per-layer RIC values, or 'auto'",
    "nu": "comma list of per-layer sparsity levels for 'auto' deltas",
    "ric_trials": "Monte Carlo trials per layer for 'auto' deltas",
    "sigma": "std of x1 entries",
    "sigma_delta": "std of the perturbation x2 - x1",
    "pairs": "number of input pairs (overridden by --pairs)",
    "seed": "pair seed (overridden by --seed)",
}


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"expected a comma list of integers, got {text!r}") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"expected a comma list of numbers, got {text!r}") from None


def _words(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected true/false, got {text!r}")


def read_keyvalue(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in CHAIN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in out:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value
    return out


def chain_config(values: dict[str, str], **overrides) -> ex.ChainConfig:
    kw = {}
    try:
        if "input_dim" in values:
            kw["input_dim"] = int(values["input_dim"])
        if "rows" in values:
            kw["rows"] = _ints(values["rows"])
        if "ensemble" in values:
            kw["ensembles"] = _words(values["ensemble"])
        if "splitter" in values:
            kw["splitter"] = _bool(values["splitter"])
        if "weight_seed" in values:
            kw["weight_seed"] = int(values["weight_seed"])
        if "deltas" in values and values["deltas"].strip().lower() != "auto":
            kw["deltas"] = _floats(values["deltas"])
        if "nu" in values:
            kw["nus"] = _ints(values["nu"])
        if "ric_trials" in values:
            kw["ric_trials"] = int(values["ric_trials"])
        for key in ("sigma", "sigma_delta"):
            if key in values:
                kw[key] = float(values[key])
        for key in ("pairs", "seed"):
            if key in values:
                kw[key] = int(values[key])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ex.ChainConfig(**kw)


def _check_writable(*paths) -> None:
    for p in paths:
        if p is None:
            continue
        parent = Path(p).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise OSError(f"cannot write to {p}")


def _emit(summary: dict, path) -> None:
    text = json.dumps(summary, indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    print(text)


def cmd_fig1(args) -> int:
    cfg = ex.Fig1Config(
        m=args.m,
        sigma=args.sigma,
        sigma_delta=args.sigma_delta,
        samples=args.samples,
        seed=args.seed,
        shapes=_ints(args.shapes),
        ensemble=args.ensemble,
        splitter=args.splitter,
        fixed_weights=args.fixed_weights,
    )
    cfg.validate()
    _check_writable(args.out_csv, args.out_svg, args.out_summary)
    res = ex.run_fig1(cfg)
    ex.write_fig1(res, args.out_csv, args.out_svg)
    summary = res.summary()
    _emit(summary, args.out_summary)
    if args.strict and any(s["above_reference"] or not s["slope"] < 1 for s in summary.values()):
        return EXIT_VERDICT
    return EXIT_OK


def cmd_ric(args) -> int:
    cfg = ex.RicSweepConfig(
        ensembles=_words(args.ensemble),
        ns=_ints(args.n),
        ms=_ints(args.m),
        nus=_ints(args.nu),
        trials=args.trials,
        seed=args.seed,
        draws=args.draws,
    )
    cfg.validate()
    _check_writable(args.out)
    rows = ex.run_ric_sweep(cfg)
    ex.write_ric(rows, args.out)
    if args.strict and any(r.delta_hat >= 1.0 for r in rows):
        return EXIT_VERDICT
    return EXIT_OK


def cmd_chain(args) -> int:
    values = read_keyvalue(args.config) if args.config else {}
    cfg = chain_config(values, pairs=args.pairs, seed=args.seed)
    cfg.validate()
    _check_writable(args.out, args.out_summary)
    res = ex.run_chain_bounds(cfg)
    ex.write_chain(res, args.out)
    _emit(res.summary(), args.out_summary)
    if args.strict and res.failures:
        return EXIT_VERDICT
    return EXIT_OK


def cmd_kappa(args) -> int:
    cfg = ex.KappaSweepConfig(
        m=args.m,
        n=args.n,
        grid=ex.parse_grid(args.sigma_delta_grid),
        trials=args.trials,
        seed=args.seed,
        sigma=args.sigma,
        ensemble=args.ensemble,
    )
    cfg.validate()
    _check_writable(args.out)
    rows = ex.run_kappa_sweep(cfg)
    ex.write_kappa(rows, args.out)
    if args.strict and any(not 0 < r.min_kappa <= 1 for r in rows):
        return EXIT_VERDICT
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors, not I/O errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="r3net", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fig1", help="one-block input/output perturbation scatter")
    f.add_argument("--m", type=int, default=16)
    f.add_argument("--sigma", type=float, default=1.0)
    f.add_argument("--sigma-delta", type=float, default=0.25)
    f.add_argument("--samples", type=int, default=100_000)
    f.add_argument("--seed", type=int, default=42)
    f.add_argument("--shapes", default="16,8", help="comma list of row counts n")
    f.add_argument("--ensemble", default="gaussian")
    f.add_argument("--out-csv", default="fig1.csv")
    f.add_argument("--out-svg", default="fig1.svg")
    f.add_argument("--out-summary", default=None, help="also write the fit summary as JSON")
    f.add_argument("--splitter", action="store_true", help="use the sign splitter before ReLU")
    f.add_argument("--fixed-weights", action="store_true", help="one weight matrix per shape")
    f.set_defaults(func=cmd_fig1)

    r = sub.add_parser("ric", help="restricted-isometry constant sweep")
    r.add_argument("--ensemble", default="gaussian", help="comma list")
    r.add_argument("--n", default="128", help="comma list")
    r.add_argument("--m", default="512", help="comma list")
    r.add_argument("--nu", default="4", help="comma list")
    r.add_argument("--trials", type=int, default=10_000)
    r.add_argument("--draws", type=int, default=1, help="matrix draws per grid point")
    r.add_argument("--seed", type=int, default=7)
    r.add_argument("--out", default="ric.csv")
    r.set_defaults(func=cmd_ric)

    c = sub.add_parser("chain", help="multi-layer bound campaign")
    c.add_argument("--config", default=None, help="key = value file")
    c.add_argument("--pairs", type=int, default=None)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--out", default="chain.csv")
    c.add_argument("--out-summary", default=None)
    c.set_defaults(func=cmd_chain)

    k = sub.add_parser("kappa-sweep", help="contraction constant versus perturbation strength")
    k.add_argument("--m", type=int, default=16)
    k.add_argument("--n", type=int, default=16)
    k.add_argument("--sigma-delta-grid", default="0.01:0.1:2.0", help="start:step:stop or comma list")
    k.add_argument("--sigma", type=float, default=1.0)
    k.add_argument("--ensemble", default="gaussian")
    k.add_argument("--trials", type=int, default=1000)
    k.add_argument("--seed", type=int, default=3)
    k.add_argument("--out", default="kappa.csv")
    k.set_defaults(func=cmd_kappa)

    for sp in (f, r, c, k):
        sp.add_argument("--strict", action="store_true", help="exit 3 on any bound violation")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, TypeError) as e:
        print(f"r3net: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"r3net: I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
