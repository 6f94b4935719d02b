import csv
import re

import numpy as np
import pytest

from r3net import _rng
from r3net import experiments as ex
from r3net.analysis import verify_block_bounds
from r3net.errors import ConfigError
from r3net.network import build_network
from r3net.svg import MAX_POINTS


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestFig1:
    def test_one_sample(self, tmp_path):
        res = ex.run_fig1(ex.Fig1Config(samples=1))
        ex.write_fig1(res, tmp_path / "f.csv", tmp_path / "f.svg")
        rows = read_csv(tmp_path / "f.csv")
        assert rows[0] == list(ex.FIG1_HEADER)
        assert [r[0] for r in rows[1:]] == ["n16_m16", "n8_m16"]

    def test_csv_round_trips_floats(self, tmp_path):
        res = ex.run_fig1(ex.Fig1Config(samples=700))
        ex.write_fig1(res, tmp_path / "f.csv")
        rows = read_csv(tmp_path / "f.csv")[1:]
        got = np.array([float(r[2]) for r in rows if r[0] == "n8_m16"])
        np.testing.assert_array_equal(got, res.output_dist_sq["n8_m16"])

    def test_longer_run_extends_shorter(self):
        a = ex.run_fig1(ex.Fig1Config(samples=300))
        b = ex.run_fig1(ex.Fig1Config(samples=1000))
        for tag in a.fits:
            np.testing.assert_array_equal(a.input_dist_sq[tag], b.input_dist_sq[tag][:300])
            np.testing.assert_array_equal(a.output_dist_sq[tag], b.output_dist_sq[tag][:300])

    def test_shapes_share_inputs(self):
        res = ex.run_fig1(ex.Fig1Config(samples=500))
        np.testing.assert_array_equal(res.input_dist_sq["n16_m16"], res.input_dist_sq["n8_m16"])

    def test_fixed_weight_mode(self):
        cfg = ex.Fig1Config(samples=2000, fixed_weights=True, shapes=(16,))
        res = ex.run_fig1(cfg)
        assert res.fits["n16_m16"][0] < 1
        assert res.violations("n16_m16") < 2000

    def test_fixed_weights_differs_from_redraw(self):
        a = ex.run_fig1(ex.Fig1Config(samples=200, shapes=(8,)))
        b = ex.run_fig1(ex.Fig1Config(samples=200, shapes=(8,), fixed_weights=True))
        assert not np.array_equal(a.output_dist_sq["n8_m16"], b.output_dist_sq["n8_m16"])

    def test_orthonormal_splitter_stays_below_reference(self):
        cfg = ex.Fig1Config(samples=3000, shapes=(16, 32), ensemble="random_orthonormal", splitter=True)
        res = ex.run_fig1(cfg)
        for tag in res.fits:
            assert np.all(res.output_dist_sq[tag] <= res.input_dist_sq[tag] * (1 + 1e-12))

    def test_svg_structure(self, tmp_path):
        res = ex.run_fig1(ex.Fig1Config(samples=6000))
        ex.write_fig1(res, svg_path=tmp_path / "f.svg")
        text = (tmp_path / "f.svg").read_text()
        assert 'viewBox="0 0 800 600"' in text
        assert text.count('class="reference"') == 1
        for tag in res.fits:
            assert len(re.findall(rf'class="fit" data-tag="{tag}"', text)) == 1
        assert 0 < text.count("<circle") <= MAX_POINTS

    @pytest.mark.parametrize(
        "kw",
        [
            dict(samples=0),
            dict(sigma=0.0),
            dict(sigma_delta=-1.0),
            dict(shapes=()),
            dict(shapes=(8, 8)),
            dict(ensemble="dct", shapes=(8,)),
            dict(ensemble="nope"),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            ex.Fig1Config(**kw).validate()

    def test_affine_fit_exact_line(self):
        x = np.linspace(0, 5, 20)
        slope, intercept = ex.affine_fit(x, 0.3 * x + 0.1)
        assert slope == pytest.approx(0.3, abs=1e-12)
        assert intercept == pytest.approx(0.1, abs=1e-12)


class TestRicSweep:
    def test_orthonormal_rows(self):
        cfg = ex.RicSweepConfig(ensembles=("random_orthonormal", "dct"), ns=(64,), ms=(32, 64), nus=(2, 8), trials=500)
        for row in ex.run_ric_sweep(cfg):
            assert row.delta_hat <= 1e-10

    def test_gaussian_decreases_with_rows(self):
        cfg = ex.RicSweepConfig(ns=(32, 128, 512), ms=(256,), nus=(4,), trials=2000, draws=10)
        rows = ex.run_ric_sweep(cfg)
        means = [np.mean([r.delta_hat for r in rows if r.n == n]) for n in cfg.ns]
        assert means[0] > means[1] > means[2]

    def test_draws_use_distinct_matrices(self):
        rows = ex.run_ric_sweep(ex.RicSweepConfig(ns=(32,), ms=(64,), trials=300, draws=3))
        assert len({r.delta_hat for r in rows}) == 3
        assert [r.draw for r in rows] == [0, 1, 2]

    @pytest.mark.parametrize(
        "kw",
        [dict(ns=()), dict(ensembles=()), dict(nus=(600,)), dict(ensembles=("haar",), ns=(8,), ms=(8,), nus=(9,)),
         dict(ensembles=("dct",), ns=(4,), ms=(8,), nus=(1,)), dict(trials=0)],
    )
    def test_invalid_grid(self, kw):
        with pytest.raises(ConfigError):
            ex.RicSweepConfig(**kw).validate()

    def test_csv(self, tmp_path):
        rows = ex.run_ric_sweep(ex.RicSweepConfig(ns=(16,), ms=(32,), trials=100))
        ex.write_ric(rows, tmp_path / "r.csv")
        got = read_csv(tmp_path / "r.csv")
        assert got[0] == list(ex.RIC_HEADER)
        assert got[1][:6] == ["gaussian", "16", "32", "4", "100", "0"]
        assert float(got[1][6]) == rows[0].delta_hat


class TestChain:
    def test_orthonormal_all_pass(self):
        res = ex.run_chain_bounds(ex.ChainConfig(pairs=1000))
        s = res.summary()
        assert s["pass_rate"] == 1.0 and s["collapses"] == 0
        assert len(s["mean_kappa_per_layer"]) == 4
        assert all(0 < k <= 1 for k in s["mean_kappa_per_layer"])

    def test_single_layer_matches_block_check(self):
        cfg = ex.ChainConfig(rows=(16,), pairs=200, seed=4)
        res = ex.run_chain_bounds(cfg)
        net = build_network(cfg.network_spec())
        it = _rng.blocks(cfg.seed, cfg.pairs, ex._CHAIN_TAG)
        start, stop, rng = next(it)
        x1s = cfg.sigma * rng.standard_normal((_rng.BLOCK, 16))
        x2s = x1s + cfg.sigma_delta * rng.standard_normal((_rng.BLOCK, 16))
        for j in range(stop - start):
            chk = verify_block_bounds(net.blocks[0].weights, x1s[j], x2s[j], 0.0)
            row = res.rows[j]
            assert row.input_dist_sq == chk.input_dist_sq
            assert row.output_dist_sq == chk.output_dist_sq
            assert row.product_lower == chk.bound.lower_A
            assert row.product_upper == chk.bound.upper_B
            assert (row.verdict == "pass") == chk.passed

    def test_gaussian_with_supplied_deltas(self):
        cfg = ex.ChainConfig(rows=(64, 128), ensembles=("gaussian",), deltas=(0.5, 0.25), pairs=50)
        res = ex.run_chain_bounds(cfg)
        for row in res.rows:
            assert row.product_upper == 1.5 * 1.25

    def test_gaussian_auto_deltas(self):
        cfg = ex.ChainConfig(input_dim=8, rows=(256, 512), ensembles=("gaussian",), nus=(8, 8), ric_trials=2000, pairs=50)
        res = ex.run_chain_bounds(cfg)
        assert all(0 < d < 1 for d in res.deltas)

    def test_auto_delta_too_large(self):
        cfg = ex.ChainConfig(input_dim=16, rows=(8,), ensembles=("gaussian",), ric_trials=500, pairs=5)
        with pytest.raises(ConfigError, match="RIC"):
            ex.run_chain_bounds(cfg)

    @pytest.mark.parametrize(
        "kw",
        [dict(rows=()), dict(splitter=False), dict(deltas=(0.1,)), dict(deltas=(1.0, 0, 0, 0)),
         dict(rows=(8, 32), ensembles=("random_orthonormal",)), dict(ensembles=("gaussian", "dct")), dict(pairs=0)],
    )
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            ex.ChainConfig(**kw).validate()

    def test_csv(self, tmp_path):
        res = ex.run_chain_bounds(ex.ChainConfig(pairs=3))
        ex.write_chain(res, tmp_path / "c.csv")
        got = read_csv(tmp_path / "c.csv")
        assert got[0] == list(ex.CHAIN_HEADER)
        assert [r[0] for r in got[1:]] == ["0", "1", "2"]
        assert {r[5] for r in got[1:]} == {"pass"}


@pytest.fixture(scope="module")
def rows():
    grid = (1e-6, 1e-3, 0.01, 0.1, 0.5, 1.0, 2.0)
    return ex.run_kappa_sweep(ex.KappaSweepConfig(grid=grid, trials=1000))


class TestKappaSweep:
    def test_small_noise_passes(self, rows):
        assert rows[0].mean_kappa >= 0.99

    def test_mismatch_nondecreasing(self, rows):
        fr = [r.mean_mismatch_fraction for r in rows]
        assert all(a <= b for a, b in zip(fr, fr[1:])), fr
        assert fr[-1] > fr[0]

    def test_kappa_in_range(self, rows):
        assert all(0 < r.min_kappa <= r.mean_kappa <= 1 for r in rows)

    def test_csv(self, rows, tmp_path):
        ex.write_kappa(rows, tmp_path / "k.csv")
        got = read_csv(tmp_path / "k.csv")
        assert got[0] == list(ex.KAPPA_HEADER)
        assert len(got) == len(rows) + 1

    def test_invalid(self):
        with pytest.raises(ConfigError):
            ex.KappaSweepConfig(grid=()).validate()
        with pytest.raises(ConfigError):
            ex.KappaSweepConfig(grid=(0.0,)).validate()


class TestParseGrid:
    def test_range_inclusive(self):
        assert ex.parse_grid("0.01:0.1:2.0")[-1] == pytest.approx(1.91)
        assert ex.parse_grid("0.5:0.5:2.0") == (0.5, 1.0, 1.5, 2.0)

    def test_list(self):
        assert ex.parse_grid("1e-6, 0.5,2") == (1e-6, 0.5, 2.0)

    def test_empty(self):
        assert ex.parse_grid("  ") == ()

    @pytest.mark.parametrize("text", ["1:2", "2:0.1:1", "0:0:1", "a,b"])
    def test_bad(self, text):
        with pytest.raises(ConfigError):
            ex.parse_grid(text)
