"""Monte Carlo campaigns: the one-block scatter experiment, RIC sweeps,
chain-bound campaigns and the contraction-versus-noise sweep.

Each ``run_*`` function is a pure function of its config. Randomness comes
from block streams keyed by the master seed, so reruns are bit-identical and
independent of how the work is split. The ``write_*`` helpers emit CSV with
round-trip float formatting.
"""

from __future__ import annotations

import csv
import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _rng
from .analysis import analyze_pair
from .block import relu, sign_split_forward
from .ensembles import EnsembleSpec, Kind, build, draw
from .errors import ConfigError, DegeneratePairError, DimensionError, LayerCollapseError
from .network import NetworkSpec, analyze_chain, build_network
from .rip import estimate_ric
from .svg import scatter_svg

FIG1_HEADER = ("config", "input_dist_sq", "output_dist_sq")
RIC_HEADER = ("ensemble", "n", "m", "nu", "trials", "draw", "delta_hat")
CHAIN_HEADER = ("pair", "input_dist_sq", "output_dist_sq", "product_lower", "product_upper", "verdict")
KAPPA_HEADER = ("sigma_delta", "mean_kappa", "mean_mismatch_fraction")

_FIG1_TAG = 201
_KAPPA_TAG = 202
_CHAIN_TAG = 203


def _positive(name: str, value) -> None:
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}")


def _kind(name) -> Kind:
    try:
        return Kind.parse(name)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _spec(kind: Kind, n: int, m: int, seed: int = 0) -> EnsembleSpec:
    try:
        return EnsembleSpec(kind, n, m, seed)
    except (DimensionError, ValueError) as e:
        raise ConfigError(str(e)) from None


def _weights(kind: Kind, n: int, m: int, rng: np.random.Generator, fixed, size: int) -> np.ndarray:
    if fixed is not None:
        return np.broadcast_to(fixed.entries, (size, n, m))
    return draw(kind, n, m, rng, size=size)


def _write_csv(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _num(x: float) -> str:
    return repr(float(x))


# --------------------------------------------------------------------------
# one-block scatter


@dataclass(frozen=True)
class Fig1Config:
    m: int = 16
    sigma: float = 1.0
    sigma_delta: float = 0.25
    samples: int = 100_000
    seed: int = 42
    shapes: tuple[int, ...] = (16, 8)
    ensemble: str = "gaussian"
    splitter: bool = False
    fixed_weights: bool = False

    def validate(self) -> None:
        _positive("m", self.m)
        _positive("sigma", self.sigma)
        _positive("sigma_delta", self.sigma_delta)
        _positive("samples", self.samples)
        if not self.shapes:
            raise ConfigError("at least one shape is required")
        if len(set(self.shapes)) != len(self.shapes):
            raise ConfigError(f"duplicate shapes: {self.shapes}")
        kind = _kind(self.ensemble)
        for n in self.shapes:
            _spec(kind, n, self.m)
        try:
            _rng.check_seed(self.seed)
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None


@dataclass
class Fig1Result:
    config: Fig1Config
    input_dist_sq: dict[str, np.ndarray] = field(repr=False)
    output_dist_sq: dict[str, np.ndarray] = field(repr=False)
    fits: dict[str, tuple[float, float]]

    def violations(self, tag: str) -> int:
        return int(np.count_nonzero(self.output_dist_sq[tag] > self.input_dist_sq[tag]))

    def summary(self) -> dict:
        return {
            tag: {
                "n": int(tag.split("_")[0][1:]),
                "slope": slope,
                "intercept": intercept,
                "samples": int(len(self.input_dist_sq[tag])),
                "above_reference": self.violations(tag),
            }
            for tag, (slope, intercept) in self.fits.items()
        }


def fig1_tag(n: int, m: int) -> str:
    return f"n{n}_m{m}"


def affine_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares ``y ~ slope * x + intercept``."""
    if len(x) < 2:
        return float("nan"), float("nan")
    a = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    return float(slope), float(intercept)


def run_fig1(cfg: Fig1Config) -> Fig1Result:
    """Input versus output squared distance for perturbed Gaussian inputs.

    Every sample draws ``q1 ~ N(0, sigma^2 I)`` and ``q2 = q1 + N(0,
    sigma_delta^2 I)``; all shapes see the same input pairs. A fresh weight
    matrix is drawn per sample unless ``fixed_weights`` is set (or the
    ensemble is deterministic).
    """
    cfg.validate()
    kind = _kind(cfg.ensemble)
    m = cfg.m
    act = sign_split_forward if cfg.splitter else relu
    fixed = {}
    for n in cfg.shapes:
        if cfg.fixed_weights or kind.deterministic:
            fixed[n] = build(EnsembleSpec(kind, n, m, _rng.derive_seed(cfg.seed, _FIG1_TAG, n)))
        else:
            fixed[n] = None

    din = np.empty(cfg.samples)
    dout = {n: np.empty(cfg.samples) for n in cfg.shapes}
    for start, stop, rng in _rng.blocks(cfg.seed, cfg.samples, _FIG1_TAG):
        k = stop - start
        q1 = cfg.sigma * rng.standard_normal((_rng.BLOCK, m))[:k]
        delta = cfg.sigma_delta * rng.standard_normal((_rng.BLOCK, m))[:k]
        q2 = q1 + delta
        din[start:stop] = np.sum((q1 - q2) ** 2, axis=1)
        block = start // _rng.BLOCK
        for n in cfg.shapes:
            wrng = _rng.stream(cfg.seed, _FIG1_TAG, n, block)
            w = _weights(kind, n, m, wrng, fixed[n], _rng.BLOCK)[:k]
            y1 = act(np.einsum("bnm,bm->bn", w, q1))
            y2 = act(np.einsum("bnm,bm->bn", w, q2))
            dout[n][start:stop] = np.sum((y1 - y2) ** 2, axis=1)

    tags = {n: fig1_tag(n, m) for n in cfg.shapes}
    return Fig1Result(
        config=cfg,
        input_dist_sq={tags[n]: din for n in cfg.shapes},
        output_dist_sq={tags[n]: dout[n] for n in cfg.shapes},
        fits={tags[n]: affine_fit(din, dout[n]) for n in cfg.shapes},
    )


def fig1_rows(res: Fig1Result):
    for tag in res.fits:
        for a, b in zip(res.input_dist_sq[tag], res.output_dist_sq[tag]):
            yield tag, _num(a), _num(b)


def write_fig1(res: Fig1Result, csv_path=None, svg_path=None) -> None:
    if csv_path is not None:
        _write_csv(csv_path, FIG1_HEADER, fig1_rows(res))
    if svg_path is not None:
        act = "splitter + ReLU" if res.config.splitter else "ReLU"
        text = scatter_svg(
            {t: (res.input_dist_sq[t], res.output_dist_sq[t]) for t in res.fits},
            res.fits,
            title=f"One-block perturbation ({act}, m={res.config.m})",
            xlabel="||q1 - q2||^2",
            ylabel="||y1 - y2||^2",
        )
        Path(svg_path).write_text(text, encoding="utf-8")


# --------------------------------------------------------------------------
# RIC sweep


@dataclass(frozen=True)
class RicSweepConfig:
    ensembles: tuple[str, ...] = ("gaussian",)
    ns: tuple[int, ...] = (128,)
    ms: tuple[int, ...] = (512,)
    nus: tuple[int, ...] = (4,)
    trials: int = 10_000
    seed: int = 7
    draws: int = 1

    def grid(self) -> list[tuple[Kind, int, int, int]]:
        return [
            (_kind(e), n, m, nu)
            for e, n, m, nu in itertools.product(self.ensembles, self.ns, self.ms, self.nus)
        ]

    def validate(self) -> None:
        _positive("trials", self.trials)
        _positive("draws", self.draws)
        grid = self.grid()
        if not grid:
            raise ConfigError("the sweep grid is empty")
        for kind, n, m, nu in grid:
            _spec(kind, n, m)
            if not 1 <= nu <= m:
                raise ConfigError(f"nu must satisfy 1 <= nu <= m, got nu={nu}, m={m}")


@dataclass(frozen=True)
class RicRow:
    ensemble: str
    n: int
    m: int
    nu: int
    trials: int
    draw: int
    delta_hat: float


def run_ric_sweep(cfg: RicSweepConfig) -> list[RicRow]:
    """One RIC estimate per grid point and matrix draw.

    Draw ``d`` of ``(kind, n, m)`` uses matrix seed
    ``derive_seed(seed, kind.tag, n, m, d)``; probes use ``seed`` directly.
    """
    cfg.validate()
    rows = []
    for kind, n, m, nu in cfg.grid():
        for d in range(cfg.draws):
            w = build(EnsembleSpec(kind, n, m, _rng.derive_seed(cfg.seed, kind.tag, n, m, d)))
            est = estimate_ric(w, nu, cfg.trials, cfg.seed)
            rows.append(RicRow(kind.value, n, m, nu, cfg.trials, d, est.delta_hat))
    return rows


def write_ric(rows: list[RicRow], path) -> None:
    _write_csv(
        path,
        RIC_HEADER,
        ((r.ensemble, r.n, r.m, r.nu, r.trials, r.draw, _num(r.delta_hat)) for r in rows),
    )


# --------------------------------------------------------------------------
# chain bounds


@dataclass(frozen=True)
class ChainConfig:
    input_dim: int = 16
    rows: tuple[int, ...] = (16, 32, 64, 128)
    ensembles: tuple[str, ...] = ("random_orthonormal",)
    splitter: bool = True
    weight_seed: int = 0
    deltas: tuple[float, ...] | None = None
    nus: tuple[int, ...] | None = None
    ric_trials: int = 10_000
    sigma: float = 1.0
    sigma_delta: float = 1.0
    pairs: int = 1000
    seed: int = 9

    def kinds(self) -> list[Kind]:
        if len(self.ensembles) == 1:
            return [_kind(self.ensembles[0])] * len(self.rows)
        if len(self.ensembles) != len(self.rows):
            raise ConfigError(
                f"ensemble list has {len(self.ensembles)} entries for {len(self.rows)} layers"
            )
        return [_kind(e) for e in self.ensembles]

    def network_spec(self) -> NetworkSpec:
        if not self.rows:
            raise ConfigError("rows must list at least one layer")
        layers = []
        cols = self.input_dim
        for i, (kind, n) in enumerate(zip(self.kinds(), self.rows)):
            layers.append(_spec(kind, n, cols, _rng.derive_seed(self.weight_seed, i + 1)))
            cols = 2 * n if self.splitter else n
        spec = NetworkSpec(tuple(layers), self.splitter, self.input_dim)
        try:
            spec.validate()
        except DimensionError as e:
            raise ConfigError(str(e)) from None
        return spec

    def layer_nus(self) -> list[int]:
        """Sparsity used for per-layer RIC estimates.

        Defaults to the input width for layer 1 and, after that, to the
        previous layer's row count (the structural bound on a splitter
        output's nonzeros).
        """
        if self.nus is not None:
            if len(self.nus) != len(self.rows):
                raise ConfigError(f"nu list has {len(self.nus)} entries for {len(self.rows)} layers")
            return list(self.nus)
        return [self.input_dim, *self.rows[:-1]]

    def validate(self) -> None:
        _positive("input_dim", self.input_dim)
        _positive("pairs", self.pairs)
        _positive("sigma", self.sigma)
        _positive("sigma_delta", self.sigma_delta)
        _positive("ric_trials", self.ric_trials)
        if not self.splitter:
            raise ConfigError("chain bounds require splitter = true")
        spec = self.network_spec()
        if self.deltas is not None:
            if len(self.deltas) != len(self.rows):
                raise ConfigError(f"delta list has {len(self.deltas)} entries for {len(self.rows)} layers")
            if any(not 0.0 <= d < 1.0 for d in self.deltas):
                raise ConfigError(f"deltas must lie in [0, 1), got {self.deltas}")
        for layer, nu in zip(spec.layers, self.layer_nus()):
            if not 1 <= nu <= layer.m:
                raise ConfigError(f"nu={nu} is outside [1, {layer.m}]")


@dataclass(frozen=True)
class ChainRow:
    pair: int
    input_dist_sq: float
    output_dist_sq: float
    product_lower: float | None
    product_upper: float | None
    verdict: str
    kappas: tuple[float, ...] = ()


@dataclass
class ChainResult:
    config: ChainConfig
    deltas: list[float]
    rows: list[ChainRow]

    @property
    def failures(self) -> int:
        return sum(r.verdict == "fail" for r in self.rows)

    @property
    def collapses(self) -> int:
        return sum(r.verdict.startswith("collapse") for r in self.rows)

    def summary(self) -> dict:
        checked = [r for r in self.rows if r.kappas]
        depth = len(self.deltas)
        means = [float(np.mean([r.kappas[l] for r in checked])) if checked else float("nan") for l in range(depth)]
        return {
            "pairs": len(self.rows),
            "checked": len(checked),
            "collapses": self.collapses,
            "failures": self.failures,
            "pass_rate": (len(checked) - self.failures) / len(checked) if checked else float("nan"),
            "deltas": self.deltas,
            "mean_kappa_per_layer": means,
        }


def chain_deltas(cfg: ChainConfig, net) -> list[float]:
    """Supplied deltas, zeros for orthonormal layers, else sampled RIC estimates."""
    if cfg.deltas is not None:
        return list(cfg.deltas)
    out = []
    for i, (b, nu) in enumerate(zip(net.blocks, cfg.layer_nus())):
        if b.weights.orthonormal:
            out.append(0.0)
            continue
        d = estimate_ric(b.weights, nu, cfg.ric_trials, _rng.derive_seed(cfg.seed, i + 1)).delta_hat
        if d >= 1.0:
            raise ConfigError(
                f"layer {i + 1}: estimated RIC {d:.3f} >= 1 at nu={nu}; add rows or lower nu"
            )
        out.append(d)
    return out


def run_chain_bounds(cfg: ChainConfig) -> ChainResult:
    cfg.validate()
    net = build_network(cfg.network_spec())
    deltas = chain_deltas(cfg, net)
    d = cfg.input_dim
    rows = []
    for start, stop, rng in _rng.blocks(cfg.seed, cfg.pairs, _CHAIN_TAG):
        x1s = cfg.sigma * rng.standard_normal((_rng.BLOCK, d))
        x2s = x1s + cfg.sigma_delta * rng.standard_normal((_rng.BLOCK, d))
        for j in range(stop - start):
            x1, x2 = x1s[j], x2s[j]
            din = float(np.sum((x1 - x2) ** 2))
            try:
                rep = analyze_chain(net, x1, x2, deltas)
            except LayerCollapseError as e:
                rows.append(ChainRow(start + j, din, float("nan"), None, None, f"collapse:{e.layer}"))
                continue
            except DegeneratePairError:
                rows.append(ChainRow(start + j, din, 0.0, None, None, "collapse:0"))
                continue
            rows.append(
                ChainRow(
                    start + j,
                    rep.input_dist_sq,
                    rep.output_dist_sq,
                    rep.lower,
                    rep.upper,
                    "pass" if rep.verdict else "fail",
                    tuple(rep.kappas),
                )
            )
    return ChainResult(cfg, deltas, rows)


def write_chain(res: ChainResult, path) -> None:
    def cell(v):
        return "" if v is None else _num(v)

    _write_csv(
        path,
        CHAIN_HEADER,
        (
            (r.pair, _num(r.input_dist_sq), _num(r.output_dist_sq), cell(r.product_lower), cell(r.product_upper), r.verdict)
            for r in res.rows
        ),
    )


# --------------------------------------------------------------------------
# contraction versus perturbation strength


@dataclass(frozen=True)
class KappaSweepConfig:
    m: int = 16
    n: int = 16
    grid: tuple[float, ...] = ()
    trials: int = 1000
    seed: int = 3
    sigma: float = 1.0
    ensemble: str = "gaussian"

    def validate(self) -> None:
        _positive("m", self.m)
        _positive("n", self.n)
        _positive("trials", self.trials)
        _positive("sigma", self.sigma)
        if not self.grid:
            raise ConfigError("the sigma_delta grid is empty")
        for s in self.grid:
            _positive("sigma_delta", s)
        _spec(_kind(self.ensemble), self.n, self.m)


@dataclass(frozen=True)
class KappaRow:
    sigma_delta: float
    mean_kappa: float
    mean_mismatch_fraction: float
    min_kappa: float


def run_kappa_sweep(cfg: KappaSweepConfig) -> list[KappaRow]:
    """Mean contraction constant and sign-mismatch fraction per noise level.

    Trial ``t`` fixes a weight matrix, ``q1`` and a unit-scale direction
    ``e``; every grid point reuses them with ``q2 = q1 + sigma_delta * e``.
    Reusing the draws across the grid (common random numbers) makes the
    per-trial mismatch set grow monotonically with ``sigma_delta``.
    """
    cfg.validate()
    kind = _kind(cfg.ensemble)
    fixed = build(EnsembleSpec(kind, cfg.n, cfg.m)) if kind.deterministic else None
    grid = list(cfg.grid)
    kap = np.zeros((len(grid), cfg.trials))
    mis = np.zeros((len(grid), cfg.trials))
    for start, stop, rng in _rng.blocks(cfg.seed, cfg.trials, _KAPPA_TAG):
        w = _weights(kind, cfg.n, cfg.m, rng, fixed, _rng.BLOCK)
        q1 = cfg.sigma * rng.standard_normal((_rng.BLOCK, cfg.m))
        e = rng.standard_normal((_rng.BLOCK, cfg.m))
        for j in range(stop - start):
            z1 = w[j] @ q1[j]
            for g, s in enumerate(grid):
                z2 = w[j] @ (q1[j] + s * e[j])
                pa = analyze_pair(z1, z2)
                kap[g, start + j] = pa.kappa
                mis[g, start + j] = pa.mismatch_fraction
    return [
        KappaRow(s, float(np.mean(kap[g])), float(np.mean(mis[g])), float(np.min(kap[g])))
        for g, s in enumerate(grid)
    ]


def write_kappa(rows: list[KappaRow], path) -> None:
    _write_csv(
        path,
        KAPPA_HEADER,
        ((_num(r.sigma_delta), _num(r.mean_kappa), _num(r.mean_mismatch_fraction)) for r in rows),
    )


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive) or a comma-separated list of values."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:step:stop, got {text!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"bad grid {text!r}") from None
        if not step > 0 or stop < start:
            raise ConfigError(f"bad grid {text!r}: need step > 0 and stop >= start")
        count = math.floor((stop - start) / step + 1e-9) + 1
        return tuple(round(start + k * step, 12) for k in range(count))
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"bad grid {text!r}") from None
