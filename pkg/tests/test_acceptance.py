"""Acceptance gate: one test per release criterion, each printed as a
pass/fail line in the terminal summary."""

import time

import numpy as np
import pytest
from click.testing import CliRunner

import ctfbench as cb
from conftest import oracle_submission
from ctfbench.cli import main
from ctfbench.dynamics import KSParams, LorenzParams, SimConfig, integrate_ks, integrate_lorenz
from ctfbench.metrics import SCORE_IDS, MetricWindows
from test_datagen import EXPECTED_LAYOUT
from test_metrics import hist_l1_oracle

SHORT_TIME_IDS = ("E1", "E3", "E5", "E7", "E9", "E11", "E12")
HISTOGRAM_IDS = ("E2", "E4", "E6", "E8", "E10")


@pytest.mark.criterion("1", "zeros baseline scores exactly 0.00 on a fresh KS pack in < 60 s")
def test_criterion_1_ks_zero_baseline_anchor(ks_pack_timed):
    pack, gen_seconds = ks_pack_timed
    t0 = time.perf_counter()
    card = cb.evaluate(cb.make_submission("zeros", pack), pack)
    score_seconds = time.perf_counter() - t0
    scores = card.runs[0].scores
    for sid in SCORE_IDS:
        assert abs(scores[sid]) < 1e-9, (sid, scores[sid])
    assert abs(card.runs[0].composite) < 1e-9
    assert gen_seconds + score_seconds < 60.0, (gen_seconds, score_seconds)


@pytest.mark.criterion(
    "2", "Lorenz zeros baseline: short-time scores exactly 0, histogram scores in [-100, -50]"
)
def test_criterion_2_lorenz_zero_baseline_anchor(lorenz_pack):
    card = cb.evaluate(cb.make_submission("zeros", lorenz_pack), lorenz_pack)
    scores = card.runs[0].scores
    for sid in SHORT_TIME_IDS:
        assert scores[sid] == 0.0, (sid, scores[sid])
    for sid in HISTOGRAM_IDS:
        assert -100.0 <= scores[sid] <= -50.0, (sid, scores[sid])


@pytest.mark.criterion("3", "oracle submission scores 100.00 on every metric of both packs")
def test_criterion_3_oracle_anchor(lorenz_pack, ks_pack):
    for pack in (lorenz_pack, ks_pack):
        card = cb.evaluate(oracle_submission(pack), pack)
        for sid in SCORE_IDS:
            assert card.runs[0].scores[sid] == 100.0, (pack.dataset_id, sid)
        assert card.runs[0].composite == 100.0


@pytest.mark.criterion("4", "composite of an E1-E10-only oracle submission is 66.67")
def test_criterion_4_composite_minimum_score_rule(lorenz_pack, ks_pack):
    for pack in (lorenz_pack, ks_pack):
        sub = oracle_submission(pack)
        del sub.predictions["X8pred"]
        del sub.predictions["X9pred"]
        card = cb.evaluate(sub, pack)
        assert card.runs[0].composite == pytest.approx(66.67, abs=0.01), pack.dataset_id


@pytest.mark.criterion(
    "5", "histogram metric equals brute-force oracle; spectral metric is shift-invariant"
)
def test_criterion_5_metric_oracles(ks_pack):
    rng = np.random.default_rng(2026)
    for _ in range(1000):
        length = int(rng.integers(1, 80))
        bins = int(rng.integers(2, 60))
        truth = rng.normal(loc=rng.uniform(-3, 3), scale=rng.uniform(0.1, 20.0), size=length)
        pred = rng.normal(loc=rng.uniform(-8, 8), scale=rng.uniform(0.1, 20.0), size=length)
        assert cb.histogram_l1(truth, pred, bins) == hist_l1_oracle(truth, pred, bins)

    data = ks_pack.train["X1train"]
    windows = MetricWindows()
    for _ in range(100):
        start = int(rng.integers(0, data.shape[0] - windows.long_k))
        window = data[start : start + windows.long_k]
        shifted = np.roll(window, int(rng.integers(1, data.shape[1])), axis=1)
        assert cb.score_long_time_spectral(shifted, window, windows) <= 1e-9


@pytest.mark.criterion(
    "6", "integrators converge at order >= 3.5; KS conserves the mean and constants"
)
def test_criterion_6_solver_convergence():
    def lorenz_endpoint(dt):
        steps = round(1.0 / dt) + 1
        cfg = SimConfig(dt=dt, total_steps=steps, initial_condition=np.array([1.0, 1.0, 1.0]))
        return integrate_lorenz(LorenzParams(), cfg)[-1]

    ref = lorenz_endpoint(0.01 / 64)
    e1 = np.linalg.norm(lorenz_endpoint(0.01) - ref)
    e2 = np.linalg.norm(lorenz_endpoint(0.005) - ref)
    assert np.log2(e1 / e2) >= 3.5

    n = 256
    params = KSParams(grid_points=n)
    x = np.arange(n) * (32.0 * np.pi / n)
    u0 = np.cos(x / 16.0) * (1.0 + np.sin(x / 16.0))

    def ks_endpoint(dt):
        steps = round(2.5 / dt) + 1
        return integrate_ks(params, SimConfig(dt=dt, total_steps=steps, initial_condition=u0))[-1]

    ref = ks_endpoint(0.025 / 64)
    e1 = np.linalg.norm(ks_endpoint(0.025) - ref)
    e2 = np.linalg.norm(ks_endpoint(0.0125) - ref)
    assert np.log2(e1 / e2) >= 3.5

    smooth = 0.4 + cb.make_initial_condition("seeded-random-smooth", n, 8)
    m = integrate_ks(params, SimConfig(dt=0.025, total_steps=1000, initial_condition=smooth))
    assert np.abs(m.mean(axis=1) - smooth.mean()).max() <= 1e-8

    const = integrate_ks(
        params, SimConfig(dt=0.025, total_steps=200, initial_condition=np.full(n, 1.7))
    )
    assert np.abs(const - 1.7).max() <= 1e-10


@pytest.mark.criterion("7", "generated packs match the published shape/index table entry-for-entry")
def test_criterion_7_shape_fidelity(lorenz_pack, ks_pack):
    for pack, cols in ((lorenz_pack, 3), (ks_pack, 1024)):
        assert set(pack.train) | set(pack.test) == set(EXPECTED_LAYOUT)
        for name, (rows, start, end) in EXPECTED_LAYOUT.items():
            group = pack.train if name.endswith("train") else pack.test
            assert group[name].shape == (rows, cols), (pack.dataset_id, name)
            assert pack.manifest.matrices[name] == {
                "rows": rows,
                "cols": cols,
                "start": start,
                "end": end,
            }, (pack.dataset_id, name)


def _run_cli_chain(root):
    runner = CliRunner()
    pack_dir = root / "pack"
    subs = root / "subs"
    store = root / "board.json"
    charts = root / "charts"
    steps = [
        ["generate", "--system", "lorenz", "--seed", "5", "--out", str(pack_dir)],
        ["baseline", "--kind", "zeros", "--pack", str(pack_dir), "--out", str(subs)],
        ["score", "--pack", str(pack_dir), "--submission", str(subs / "baseline_zeros" / "run0"),
         "--store", str(store)],
    ]
    for kind in ("radar", "bar", "top3", "table"):
        steps.append(["report", "--kind", kind, "--store", str(store), "--out", str(charts)])
    for args in steps:
        result = runner.invoke(main, args)
        assert result.exit_code == 0, (args, result.output)


@pytest.mark.criterion(
    "8", "generate, baseline, score and report are byte-identical across repeated runs"
)
def test_criterion_8_determinism(tmp_path):
    for side in ("a", "b"):
        (tmp_path / side).mkdir()
        _run_cli_chain(tmp_path / side)
    files_a = sorted(p for p in (tmp_path / "a").rglob("*") if p.is_file())
    assert files_a, "the CLI chain produced no files"
    for path_a in files_a:
        path_b = tmp_path / "b" / path_a.relative_to(tmp_path / "a")
        assert path_b.is_file(), path_b
        assert path_a.read_bytes() == path_b.read_bytes(), path_a


@pytest.mark.criterion(
    "9", "full desk-scale run (both packs, both baselines, all reports) in < 5 minutes"
)
def test_criterion_9_end_to_end(tmp_path):
    runner = CliRunner()
    t0 = time.perf_counter()
    store = tmp_path / "board.json"
    charts = tmp_path / "charts"
    for system, dataset in (("lorenz", "ODE_Lorenz"), ("ks", "PDE_KS")):
        pack_dir = tmp_path / dataset
        result = runner.invoke(
            main, ["generate", "--system", system, "--seed", "1", "--out", str(pack_dir)]
        )
        assert result.exit_code == 0, result.output
        for kind in ("zeros", "average"):
            subs = tmp_path / "subs" / dataset
            result = runner.invoke(
                main,
                ["baseline", "--kind", kind, "--pack", str(pack_dir), "--out", str(subs)],
            )
            assert result.exit_code == 0, result.output
            result = runner.invoke(
                main,
                ["score", "--pack", str(pack_dir),
                 "--submission", str(subs / f"baseline_{kind}" / "run0"),
                 "--store", str(store)],
            )
            assert result.exit_code == 0, result.output
    for kind in ("radar", "bar", "top3", "table"):
        result = runner.invoke(
            main,
            ["report", "--kind", kind, "--store", str(store), "--out", str(charts),
             "--baseline", "baseline_zeros"],
        )
        assert result.exit_code == 0, result.output
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0, elapsed

    from ctfbench.referee import load_leaderboard

    board = load_leaderboard(store)
    assert {e.method_name for e in board.entries("PDE_KS")} == {
        "baseline_zeros",
        "baseline_average",
    }
    zeros_entry = next(
        e for e in board.entries("PDE_KS") if e.method_name == "baseline_zeros"
    )
    assert zeros_entry.composite_mean == 0.0
    svgs = list(charts.glob("*.svg"))
    assert len(svgs) >= 6  # 4 radar + 2 bar + 2 top3 at minimum
    assert (charts / "scores_PDE_KS.csv").is_file()
