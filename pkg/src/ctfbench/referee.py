"""Independent scoring: task registry, submission validation, evaluation,
run aggregation and the persistent leaderboard.

The registry maps each of the twelve scores E1..E12 to its training
input(s), optional burn-in, prediction file and ground-truth file. Scoring
a task touches exactly one test matrix (the task's truth); a submission
missing or failing validation for a prediction receives -100 for every
score depending on it, while the remaining scores are still computed.
"""

from __future__ import annotations

import fnmatch
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import matio, metrics
from .datagen import DATASET_DIMS, MATRIX_LAYOUT, DatasetPack
from .exceptions import CTFBenchError, PackValidationError
from .metrics import MetricKind, MetricWindows, SCORE_IDS

SCORECARD_FORMAT = "ctfbench-scorecard/1"
LEADERBOARD_FORMAT = "ctfbench-leaderboard/1"

# score id -> (train inputs, burn-in, prediction, truth, task family).
# Families: "forecast" scores use the configured short_k window,
# "reconstruction" scores always compare the full window, "long" scores use
# the trailing-window statistics metric of the dataset.
_REGISTRY_TABLE = (
    ("E1", ("X1train",), None, "X1pred", "X1test", "forecast"),
    ("E2", ("X1train",), None, "X1pred", "X1test", "long"),
    ("E3", ("X2train",), None, "X2pred", "X2test", "reconstruction"),
    ("E4", ("X2train",), None, "X3pred", "X3test", "long"),
    ("E5", ("X3train",), None, "X4pred", "X4test", "reconstruction"),
    ("E6", ("X3train",), None, "X5pred", "X5test", "long"),
    ("E7", ("X4train",), None, "X6pred", "X6test", "forecast"),
    ("E8", ("X4train",), None, "X6pred", "X6test", "long"),
    ("E9", ("X5train",), None, "X7pred", "X7test", "forecast"),
    ("E10", ("X5train",), None, "X7pred", "X7test", "long"),
    ("E11", ("X6train", "X7train", "X8train"), "X9train", "X8pred", "X8test", "forecast"),
    ("E12", ("X6train", "X7train", "X8train"), "X10train", "X9pred", "X9test", "forecast"),
)

PREDICTION_NAMES = tuple(dict.fromkeys(row[3] for row in _REGISTRY_TABLE))


@dataclass(frozen=True)
class TaskSpec:
    score_id: str
    train_inputs: tuple[str, ...]
    burn_in: str | None
    prediction_name: str
    truth_name: str
    metric: MetricKind
    windows: MetricWindows
    truth_shape: tuple[int, int]


def task_registry(dataset_id: str, windows: MetricWindows | None = None) -> list[TaskSpec]:
    """The twelve scoring tasks for a dataset.

    Long-time tasks use the spectral metric for PDE_KS and the histogram
    metric for ODE_Lorenz. Reconstruction tasks pin short_k to the full
    truth window regardless of the configured forecast window.
    """
    if dataset_id not in DATASET_DIMS:
        raise ValueError(f"unknown dataset {dataset_id!r}")
    base = windows or MetricWindows()
    cols = DATASET_DIMS[dataset_id]
    long_kind = (
        MetricKind.LONG_TIME_SPECTRAL if dataset_id == "PDE_KS" else MetricKind.LONG_TIME_HISTOGRAM
    )
    tasks = []
    for score_id, train, burn_in, pred, truth, family in _REGISTRY_TABLE:
        rows = MATRIX_LAYOUT[truth][0]
        if family == "long":
            kind, w = long_kind, base
        elif family == "reconstruction":
            kind, w = MetricKind.SHORT_TIME, replace(base, short_k=rows)
        else:
            kind, w = MetricKind.SHORT_TIME, base
        tasks.append(
            TaskSpec(
                score_id=score_id,
                train_inputs=train,
                burn_in=burn_in,
                prediction_name=pred,
                truth_name=truth,
                metric=kind,
                windows=w,
                truth_shape=(rows, cols),
            )
        )
    return tasks


@dataclass
class Submission:
    method_name: str
    run_id: str
    predictions: dict[str, np.ndarray]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.predictions) - set(PREDICTION_NAMES)
        if unknown:
            raise CTFBenchError(f"unknown prediction names: {sorted(unknown)}")


def _parse_meta(text: str) -> dict[str, str]:
    meta = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            continue
        meta[key.strip()] = value.strip()
    return meta


def load_submission(run_dir: str | Path, method_name: str | None = None) -> Submission:
    """Load a run directory of X*pred matrices plus an optional `meta` file.

    Binary `.mat` files are preferred; `.csv` is accepted. The method name
    comes from the argument, the meta file, or the parent directory name,
    in that order.
    """
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise CTFBenchError(f"submission directory not found: {run_dir}")
    meta_path = run_dir / "meta"
    metadata = _parse_meta(meta_path.read_text()) if meta_path.is_file() else {}
    predictions = {}
    for name in PREDICTION_NAMES:
        for suffix in (".mat", ".csv"):
            path = run_dir / f"{name}{suffix}"
            if path.is_file():
                predictions[name] = matio.read_any(path)
                break
    method = method_name or metadata.get("method") or run_dir.parent.name or run_dir.name
    return Submission(
        method_name=method, run_id=run_dir.name, predictions=predictions, metadata=metadata
    )


def write_submission(sub: Submission, root: str | Path) -> Path:
    """Write `root/<method>/<run_id>/X*pred.mat` plus a meta file."""
    run_dir = Path(root) / sub.method_name / sub.run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    for name, x in sorted(sub.predictions.items()):
        matio.write_matrix(run_dir / f"{name}.mat", x)
    meta = {"method": sub.method_name, "run_id": sub.run_id, **sub.metadata}
    lines = "".join(f"{k}={v}\n" for k, v in sorted(meta.items()))
    matio.atomic_write_bytes(run_dir / "meta", lines.encode())
    return run_dir


def validate_submission(
    sub: Submission, pack: DatasetPack, windows: MetricWindows | None = None
) -> list[str]:
    """Report violations per prediction; an empty list means fully scoreable."""
    violations = []
    seen = set()
    for task in task_registry(pack.dataset_id, windows):
        name = task.prediction_name
        if name in seen:
            continue
        seen.add(name)
        pred = sub.predictions.get(name)
        if pred is None:
            violations.append(f"{name}: missing prediction")
        elif pred.shape != task.truth_shape:
            violations.append(
                f"{name}: shape {tuple(pred.shape)} does not match required {task.truth_shape}"
            )
        elif not np.all(np.isfinite(pred)):
            violations.append(f"{name}: contains non-finite values")
    return violations


@dataclass
class ScoreAggregate:
    mean: float
    std: float


@dataclass
class RunScores:
    run_id: str
    scores: dict[str, float | None]
    composite: float


@dataclass
class ScoreCard:
    method_name: str
    dataset_id: str
    runs: list[RunScores]
    aggregate_scores: dict[str, ScoreAggregate]
    aggregate_composite: ScoreAggregate
    windows: dict

    def to_dict(self) -> dict:
        return {
            "format": SCORECARD_FORMAT,
            "method": self.method_name,
            "dataset": self.dataset_id,
            "runs": [
                {"run_id": r.run_id, "scores": r.scores, "composite": r.composite}
                for r in self.runs
            ],
            "aggregate": {
                "scores": {
                    sid: {"mean": a.mean, "std": a.std}
                    for sid, a in self.aggregate_scores.items()
                },
                "composite": {
                    "mean": self.aggregate_composite.mean,
                    "std": self.aggregate_composite.std,
                },
            },
            "windows": self.windows,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreCard":
        if d.get("format") != SCORECARD_FORMAT:
            raise CTFBenchError(f"scorecard version mismatch: {d.get('format')!r}")
        return cls(
            method_name=d["method"],
            dataset_id=d["dataset"],
            runs=[
                RunScores(r["run_id"], dict(r["scores"]), r["composite"]) for r in d["runs"]
            ],
            aggregate_scores={
                sid: ScoreAggregate(v["mean"], v["std"])
                for sid, v in d["aggregate"]["scores"].items()
            },
            aggregate_composite=ScoreAggregate(
                d["aggregate"]["composite"]["mean"], d["aggregate"]["composite"]["std"]
            ),
            windows=dict(d.get("windows", {})),
        )


def _dumps(payload: dict) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()


def write_scorecard(card: ScoreCard, path: str | Path) -> None:
    matio.atomic_write_bytes(path, _dumps(card.to_dict()))


def read_scorecard(path: str | Path) -> ScoreCard:
    return ScoreCard.from_dict(json.loads(Path(path).read_text()))


def _check_truth(pack: DatasetPack, task: TaskSpec) -> np.ndarray:
    truth = pack.test[task.truth_name]
    if truth.shape != task.truth_shape:
        raise PackValidationError(
            f"corrupted pack: {task.truth_name} has shape {truth.shape}, "
            f"expected {task.truth_shape}"
        )
    if not np.all(np.isfinite(truth)):
        raise PackValidationError(f"corrupted pack: non-finite values in {task.truth_name}")
    return truth


def evaluate_task(task: TaskSpec, sub: Submission, pack: DatasetPack) -> float | None:
    """Score one task; None when the prediction is missing or invalid.

    Reads only the single test matrix named by the task.
    """
    truth = _check_truth(pack, task)
    pred = sub.predictions.get(task.prediction_name)
    if pred is None or pred.shape != truth.shape or not np.all(np.isfinite(pred)):
        return None
    if task.metric is MetricKind.SHORT_TIME:
        s = metrics.score_short_time(pred, truth, task.windows.short_k)
    elif task.metric is MetricKind.LONG_TIME_SPECTRAL:
        s = metrics.score_long_time_spectral(pred, truth, task.windows)
    else:
        s = metrics.score_long_time_histogram(pred, truth, task.windows)
    return metrics.to_score(s)


def _aggregate(values: list[float]) -> ScoreAggregate:
    arr = np.asarray(values, dtype=np.float64)
    return ScoreAggregate(
        mean=float(np.clip(arr.mean(), -100.0, 100.0)),
        std=float(min(arr.std(), 100.0)),
    )


def _filled(scores: dict[str, float | None]) -> dict[str, float]:
    return {sid: (-100.0 if scores[sid] is None else scores[sid]) for sid in SCORE_IDS}


def evaluate(
    sub: Submission, pack: DatasetPack, windows: MetricWindows | None = None
) -> ScoreCard:
    """Score a single run against a pack, producing a one-run ScoreCard."""
    base = windows or MetricWindows()
    tasks = task_registry(pack.dataset_id, base)
    scores: dict[str, float | None] = {}
    for task in tasks:
        scores[task.score_id] = evaluate_task(task, sub, pack)
    comp = metrics.composite([scores[sid] for sid in SCORE_IDS])
    run = RunScores(run_id=sub.run_id, scores=scores, composite=comp)
    filled = _filled(scores)
    return ScoreCard(
        method_name=sub.method_name,
        dataset_id=pack.dataset_id,
        runs=[run],
        aggregate_scores={sid: ScoreAggregate(filled[sid], 0.0) for sid in SCORE_IDS},
        aggregate_composite=ScoreAggregate(comp, 0.0),
        windows={
            "short_k": base.short_k,
            "long_k": base.long_k,
            "kmax": base.kmax,
            "bins": base.bins,
        },
    )


def aggregate_runs(cards: list[ScoreCard]) -> ScoreCard:
    """Merge per-run cards of one method into mean/std aggregates.

    Missing per-run scores count as -100. The standard deviation is the
    population std over runs, clipped at 100.
    """
    if not cards:
        raise ValueError("need at least one run to aggregate")
    methods = {c.method_name for c in cards}
    datasets = {c.dataset_id for c in cards}
    if len(methods) > 1:
        raise ValueError(f"cannot aggregate mixed methods: {sorted(methods)}")
    if len(datasets) > 1:
        raise ValueError(f"cannot aggregate mixed datasets: {sorted(datasets)}")
    runs = [r for c in cards for r in c.runs]
    per_score = {
        sid: _aggregate([_filled(r.scores)[sid] for r in runs]) for sid in SCORE_IDS
    }
    return ScoreCard(
        method_name=cards[0].method_name,
        dataset_id=cards[0].dataset_id,
        runs=runs,
        aggregate_scores=per_score,
        aggregate_composite=_aggregate([r.composite for r in runs]),
        windows=dict(cards[0].windows),
    )


@dataclass
class LeaderboardEntry:
    rank: int
    method_name: str
    composite_mean: float
    composite_std: float
    scores: dict[str, ScoreAggregate]
    runs: int


@dataclass
class Leaderboard:
    datasets: dict[str, list[LeaderboardEntry]] = field(default_factory=dict)

    def entries(self, dataset_id: str) -> list[LeaderboardEntry]:
        return list(self.datasets.get(dataset_id, []))

    def as_scorecards(self, dataset_id: str) -> list[ScoreCard]:
        """Aggregate-only ScoreCard views of a dataset's entries."""
        return [
            ScoreCard(
                method_name=e.method_name,
                dataset_id=dataset_id,
                runs=[],
                aggregate_scores=dict(e.scores),
                aggregate_composite=ScoreAggregate(e.composite_mean, e.composite_std),
                windows={},
            )
            for e in self.datasets.get(dataset_id, [])
        ]

    def to_dict(self) -> dict:
        return {
            "format": LEADERBOARD_FORMAT,
            "datasets": {
                ds: [
                    {
                        "rank": e.rank,
                        "method": e.method_name,
                        "composite": {"mean": e.composite_mean, "std": e.composite_std},
                        "scores": {
                            sid: {"mean": a.mean, "std": a.std} for sid, a in e.scores.items()
                        },
                        "runs": e.runs,
                    }
                    for e in entries
                ]
                for ds, entries in self.datasets.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Leaderboard":
        if d.get("format") != LEADERBOARD_FORMAT:
            raise CTFBenchError(f"leaderboard version mismatch: {d.get('format')!r}")
        board = cls()
        for ds, entries in d.get("datasets", {}).items():
            board.datasets[ds] = [
                LeaderboardEntry(
                    rank=e["rank"],
                    method_name=e["method"],
                    composite_mean=e["composite"]["mean"],
                    composite_std=e["composite"]["std"],
                    scores={
                        sid: ScoreAggregate(v["mean"], v["std"])
                        for sid, v in e["scores"].items()
                    },
                    runs=e["runs"],
                )
                for e in entries
            ]
        return board


def load_leaderboard(path: str | Path) -> Leaderboard:
    """Load the leaderboard store; a missing file yields an empty board."""
    path = Path(path)
    if not path.is_file():
        return Leaderboard()
    return Leaderboard.from_dict(json.loads(path.read_text()))


def save_leaderboard(board: Leaderboard, path: str | Path) -> None:
    matio.atomic_write_bytes(path, _dumps(board.to_dict()))


def update_leaderboard(store: str | Path, card: ScoreCard) -> Leaderboard:
    """Upsert a method's aggregated card and persist the re-ranked board.

    Ordering is by composite mean descending, ties broken lexicographically
    by method name; ranks are re-assigned contiguously from 1.
    """
    board = load_leaderboard(store)
    entries = [
        e for e in board.datasets.get(card.dataset_id, []) if e.method_name != card.method_name
    ]
    entries.append(
        LeaderboardEntry(
            rank=0,
            method_name=card.method_name,
            composite_mean=card.aggregate_composite.mean,
            composite_std=card.aggregate_composite.std,
            scores=dict(card.aggregate_scores),
            runs=len(card.runs),
        )
    )
    entries.sort(key=lambda e: (-e.composite_mean, e.method_name))
    for i, e in enumerate(entries):
        e.rank = i + 1
    board.datasets[card.dataset_id] = entries
    save_leaderboard(board, store)
    return board


def find_run_dirs(root: str | Path, runs_glob: str) -> list[Path]:
    """Run directories under `root` matching a relative glob pattern."""
    root = Path(root)
    hits = [
        p
        for p in sorted(root.rglob("*"))
        if p.is_dir() and fnmatch.fnmatch(str(p.relative_to(root)), runs_glob)
    ]
    return hits
