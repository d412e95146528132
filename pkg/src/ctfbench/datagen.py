"""Dataset pack assembly: training/test matrix families plus manifest.

A pack holds ten training matrices (X1train..X10train) and nine test
matrices (X1test..X9test) cut from simulated trajectories:

* one nominal-parameter trajectory of 11000 recorded steps supplies the
  forecasting pair (X1train rows 0-10000, X1test rows 10000-11000), the
  noisy variants (X2train/X3train = X1train + medium/high noise, with
  X2test/X4test the clean signal and X3test/X5test its continuation), and
  the limited-data family (X4train = rows 0-100, X5train noisy, with
  X6test/X7test = rows 100-1100),
* three trajectories at the training parameter values supply
  X6train/X7train/X8train (rows 0-10000 each),
* two trajectories at the interpolation/extrapolation parameter values
  supply the burn-ins X9train/X10train (rows 9900-10000) and the truth
  continuations X8test/X9test (rows 10000-11000).

Matrix shapes and index windows are pinned by `MATRIX_LAYOUT` and are
validated on every build and read. Pack construction is a pure function of
(system, master_seed, overrides); seeds for each stochastic ingredient are
derived from the master seed and recorded in the manifest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import matio
from .dynamics import KSParams, LorenzParams, SimConfig, integrate_ks, integrate_lorenz
from .exceptions import PackValidationError

FORMAT_VERSION = "1"

#: Deterministic default for the manifest timestamp; pack construction must
#: be a pure function of its inputs, so wall-clock time is never consulted.
DEFAULT_TIMESTAMP = "1970-01-01T00:00:00Z"

SYSTEMS = {"lorenz": "ODE_Lorenz", "ks": "PDE_KS"}
DATASET_DIMS = {"ODE_Lorenz": 3, "PDE_KS": 1024}

#: name -> (rows, start index, end index); identical for both systems,
#: which differ only in column count.
MATRIX_LAYOUT: dict[str, tuple[int, int, int]] = {
    "X1train": (10000, 0, 10000),
    "X2train": (10000, 0, 10000),
    "X3train": (10000, 0, 10000),
    "X4train": (100, 0, 100),
    "X5train": (100, 0, 100),
    "X6train": (10000, 0, 10000),
    "X7train": (10000, 0, 10000),
    "X8train": (10000, 0, 10000),
    "X9train": (100, 9900, 10000),
    "X10train": (100, 9900, 10000),
    "X1test": (1000, 10000, 11000),
    "X2test": (10000, 0, 10000),
    "X3test": (1000, 10000, 11000),
    "X4test": (10000, 0, 10000),
    "X5test": (1000, 10000, 11000),
    "X6test": (1000, 100, 1100),
    "X7test": (1000, 100, 1100),
    "X8test": (1000, 10000, 11000),
    "X9test": (1000, 10000, 11000),
}

TRAIN_NAMES = tuple(n for n in MATRIX_LAYOUT if n.endswith("train"))
TEST_NAMES = tuple(n for n in MATRIX_LAYOUT if n.endswith("test"))

#: Test matrices that must be identical, cut from the same trajectory rows.
EQUAL_WINDOWS = (
    ("X2test", "X1train"),
    ("X4test", "X1train"),
    ("X3test", "X1test"),
    ("X5test", "X1test"),
    ("X7test", "X6test"),
)

_SEED_NAMES = (
    "trajectory",
    "noise_medium",
    "noise_high",
    "limited_noise",
    "param_a",
    "param_b",
    "param_c",
    "interpolation",
    "extrapolation",
)


@dataclass(frozen=True)
class NoiseLevel:
    """Additive Gaussian noise with per-column std = sigma_fraction * signal std."""

    label: str
    sigma_fraction: float

    def __post_init__(self):
        if self.label not in ("medium", "high"):
            raise ValueError(f"unknown noise label {self.label!r}")
        if not 0.0 < self.sigma_fraction < 1.0:
            raise ValueError("sigma_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class PackConfig:
    """Resolved generation settings for one pack."""

    system: str
    dt: float
    spinup_steps: int
    nominal_param: float
    train_params: tuple[float, float, float]
    interp_param: float
    extrap_param: float
    noise_medium: float = 0.05
    noise_high: float = 0.25
    created: str = DEFAULT_TIMESTAMP

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"unsupported dataset system {self.system!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.spinup_steps < 0:
            raise ValueError("spinup_steps must be >= 0")
        _check_param_ordering(self.train_params, self.interp_param, self.extrap_param)


def _check_param_ordering(train: tuple[float, ...], interp: float, extrap: float) -> None:
    lo, hi = min(train), max(train)
    if not lo < interp < hi:
        raise PackValidationError(
            f"interpolation parameter {interp} must lie strictly inside ({lo}, {hi})"
        )
    if lo <= extrap <= hi:
        raise PackValidationError(
            f"extrapolation parameter {extrap} must lie strictly outside [{lo}, {hi}]"
        )


_DEFAULTS = {
    "lorenz": PackConfig(
        system="lorenz",
        dt=0.01,
        spinup_steps=1000,
        nominal_param=28.0,
        train_params=(26.0, 28.0, 30.0),
        interp_param=27.0,
        extrap_param=33.0,
    ),
    "ks": PackConfig(
        system="ks",
        dt=0.025,
        spinup_steps=1000,
        nominal_param=1.0,
        train_params=(0.85, 1.0, 1.15),
        interp_param=0.925,
        extrap_param=1.30,
    ),
}

#: Per-system base parameters; the remaining parameter (Lorenz rho / KS
#: viscosity) is the one varied across the parametric trajectories.
_BASE_PARAMS = {
    "lorenz": {"sigma": 10.0, "beta": 8.0 / 3.0},
    "ks": {"domain_length": 32.0 * np.pi, "grid_points": 1024},
}
_VARIED_PARAM = {"lorenz": "rho", "ks": "viscosity"}


@dataclass
class Manifest:
    """Everything needed to regenerate and validate a pack."""

    dataset_id: str
    system: str
    format_version: str
    created: str
    dt: float
    spinup_steps: int
    base_params: dict
    varied_param: str
    nominal_param: float
    train_params: list
    interp_param: float
    extrap_param: float
    noise_levels: dict
    seeds: dict
    matrices: dict

    def validate(self) -> None:
        if self.format_version != FORMAT_VERSION:
            raise PackValidationError(
                f"manifest version mismatch: {self.format_version!r} != {FORMAT_VERSION!r}"
            )
        if self.dataset_id not in DATASET_DIMS:
            raise PackValidationError(f"unknown dataset_id {self.dataset_id!r}")
        _check_param_ordering(tuple(self.train_params), self.interp_param, self.extrap_param)
        for label, frac in self.noise_levels.items():
            NoiseLevel(label, frac)
        cols = DATASET_DIMS[self.dataset_id]
        for name, (rows, start, end) in MATRIX_LAYOUT.items():
            entry = self.matrices.get(name)
            if entry is None:
                raise PackValidationError(f"manifest missing matrix entry {name}")
            expected = {"rows": rows, "cols": cols, "start": start, "end": end}
            if entry != expected:
                raise PackValidationError(
                    f"manifest entry {name} is {entry}, expected {expected}"
                )

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "system": self.system,
            "format_version": self.format_version,
            "created": self.created,
            "dt": self.dt,
            "spinup_steps": self.spinup_steps,
            "base_params": self.base_params,
            "varied_param": self.varied_param,
            "nominal_param": self.nominal_param,
            "train_params": list(self.train_params),
            "interp_param": self.interp_param,
            "extrap_param": self.extrap_param,
            "noise_levels": self.noise_levels,
            "seeds": self.seeds,
            "matrices": self.matrices,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Manifest":
        try:
            return cls(**{k: d[k] for k in cls.__dataclass_fields__})
        except KeyError as exc:
            raise PackValidationError(f"manifest missing field {exc}") from exc


@dataclass
class DatasetPack:
    dataset_id: str
    train: dict[str, np.ndarray]
    test: dict[str, np.ndarray]
    manifest: Manifest


def derive_seeds(master_seed: int) -> dict[str, int]:
    """Derive the named component seeds from the master seed."""
    state = np.random.SeedSequence(master_seed).generate_state(len(_SEED_NAMES), np.uint64)
    seeds = {name: int(s) for name, s in zip(_SEED_NAMES, state)}
    seeds["master"] = int(master_seed)
    return seeds


def add_noise(x: np.ndarray, level: NoiseLevel, seed: int) -> np.ndarray:
    """Add zero-mean Gaussian noise, per-column std = sigma_fraction * std(col)."""
    x = np.asarray(x, dtype=np.float64)
    sigma = level.sigma_fraction * x.std(axis=0)
    rng = np.random.default_rng(seed)
    return x + rng.standard_normal(x.shape) * sigma


def _simulate(cfg: PackConfig, param_value: float, steps: int, seed: int) -> np.ndarray:
    sim = SimConfig(dt=cfg.dt, total_steps=steps, spinup_steps=cfg.spinup_steps, seed=seed)
    if cfg.system == "lorenz":
        return integrate_lorenz(LorenzParams(rho=param_value), sim)
    base = _BASE_PARAMS["ks"]
    params = KSParams(
        domain_length=base["domain_length"],
        grid_points=base["grid_points"],
        viscosity=param_value,
    )
    return integrate_ks(params, sim)


def resolve_config(system: str, overrides: dict | None = None) -> PackConfig:
    """Apply overrides to the per-system default configuration."""
    if system not in _DEFAULTS:
        raise ValueError(f"unsupported dataset system {system!r} (expected 'lorenz' or 'ks')")
    cfg = _DEFAULTS[system]
    if not overrides:
        return cfg
    unknown = set(overrides) - {
        "dt",
        "spinup_steps",
        "nominal_param",
        "train_params",
        "interp_param",
        "extrap_param",
        "noise_medium",
        "noise_high",
        "created",
    }
    if unknown:
        raise ValueError(f"unknown pack overrides: {sorted(unknown)}")
    if "train_params" in overrides:
        overrides = dict(overrides)
        overrides["train_params"] = tuple(float(v) for v in overrides["train_params"])
    return replace(cfg, **overrides)


def build_pack(system: str, master_seed: int, overrides: dict | None = None) -> DatasetPack:
    """Generate a complete dataset pack. Deterministic in all arguments."""
    cfg = resolve_config(system, overrides)
    seeds = derive_seeds(master_seed)
    medium = NoiseLevel("medium", cfg.noise_medium)
    high = NoiseLevel("high", cfg.noise_high)

    nominal = _simulate(cfg, cfg.nominal_param, 11000, seeds["trajectory"])
    x1train = nominal[0:10000]
    x1test = nominal[10000:11000]

    train = {
        "X1train": x1train,
        "X2train": add_noise(x1train, medium, seeds["noise_medium"]),
        "X3train": add_noise(x1train, high, seeds["noise_high"]),
        "X4train": nominal[0:100],
        "X5train": add_noise(nominal[0:100], medium, seeds["limited_noise"]),
    }
    test = {
        "X1test": x1test,
        "X2test": x1train,
        "X3test": x1test,
        "X4test": x1train,
        "X5test": x1test,
        "X6test": nominal[100:1100],
        "X7test": nominal[100:1100],
    }

    for name, seed_name, value in (
        ("X6train", "param_a", cfg.train_params[0]),
        ("X7train", "param_b", cfg.train_params[1]),
        ("X8train", "param_c", cfg.train_params[2]),
    ):
        train[name] = _simulate(cfg, value, 10000, seeds[seed_name])

    interp = _simulate(cfg, cfg.interp_param, 11000, seeds["interpolation"])
    train["X9train"] = interp[9900:10000]
    test["X8test"] = interp[10000:11000]

    extrap = _simulate(cfg, cfg.extrap_param, 11000, seeds["extrapolation"])
    train["X10train"] = extrap[9900:10000]
    test["X9test"] = extrap[10000:11000]

    dataset_id = SYSTEMS[system]
    cols = DATASET_DIMS[dataset_id]
    manifest = Manifest(
        dataset_id=dataset_id,
        system=system,
        format_version=FORMAT_VERSION,
        created=cfg.created,
        dt=cfg.dt,
        spinup_steps=cfg.spinup_steps,
        base_params=dict(_BASE_PARAMS[system]),
        varied_param=_VARIED_PARAM[system],
        nominal_param=cfg.nominal_param,
        train_params=list(cfg.train_params),
        interp_param=cfg.interp_param,
        extrap_param=cfg.extrap_param,
        noise_levels={"medium": cfg.noise_medium, "high": cfg.noise_high},
        seeds=seeds,
        matrices={
            name: {"rows": rows, "cols": cols, "start": start, "end": end}
            for name, (rows, start, end) in MATRIX_LAYOUT.items()
        },
    )
    pack = DatasetPack(dataset_id=dataset_id, train=train, test=test, manifest=manifest)
    validate_pack(pack)
    return pack


def validate_pack(pack: DatasetPack) -> None:
    """Check layout shapes, finiteness and the identical-window invariants."""
    pack.manifest.validate()
    if pack.dataset_id != pack.manifest.dataset_id:
        raise PackValidationError("pack/manifest dataset_id mismatch")
    cols = DATASET_DIMS[pack.dataset_id]
    for name, (rows, _, _) in MATRIX_LAYOUT.items():
        group = pack.train if name.endswith("train") else pack.test
        x = group.get(name)
        if x is None:
            raise PackValidationError(f"pack missing matrix {name}")
        if x.shape != (rows, cols):
            raise PackValidationError(
                f"shape mismatch for {name}: got {x.shape}, expected ({rows}, {cols})"
            )
        if not np.all(np.isfinite(x)):
            raise PackValidationError(f"non-finite values in {name}")
    union = {**pack.train, **pack.test}
    for a, b in EQUAL_WINDOWS:
        if not np.array_equal(union[a], union[b]):
            raise PackValidationError(f"{a} must equal {b} (same trajectory window)")


def write_pack(pack: DatasetPack, directory: str | Path) -> None:
    """Write manifest.json plus one binary matrix file per pack entry."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    validate_pack(pack)
    payload = json.dumps(pack.manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    matio.atomic_write_bytes(directory / "manifest.json", payload.encode())
    for name in MATRIX_LAYOUT:
        group = pack.train if name.endswith("train") else pack.test
        matio.write_matrix(directory / f"{name}.mat", group[name])


def export_pack_csv(pack: DatasetPack, directory: str | Path) -> None:
    """Write every pack matrix as CSV alongside the binary files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in MATRIX_LAYOUT:
        group = pack.train if name.endswith("train") else pack.test
        matio.write_csv(directory / f"{name}.csv", group[name])


def read_pack(directory: str | Path) -> DatasetPack:
    """Read and validate a pack written by `write_pack`."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise PackValidationError(f"missing manifest: {manifest_path}")
    manifest = Manifest.from_dict(json.loads(manifest_path.read_text()))
    manifest.validate()
    train: dict[str, np.ndarray] = {}
    test: dict[str, np.ndarray] = {}
    for name in MATRIX_LAYOUT:
        path = directory / f"{name}.mat"
        if not path.is_file():
            raise PackValidationError(f"missing matrix file: {path}")
        x = matio.read_matrix(path)
        entry = manifest.matrices[name]
        if x.shape != (entry["rows"], entry["cols"]):
            raise PackValidationError(
                f"{name}: file shape {x.shape} does not match manifest "
                f"({entry['rows']}, {entry['cols']})"
            )
        (train if name.endswith("train") else test)[name] = x
    pack = DatasetPack(
        dataset_id=manifest.dataset_id, train=train, test=test, manifest=manifest
    )
    validate_pack(pack)
    return pack
