"""Experiment grid: configuration, seeded parallel execution, logs, summary.

One grid cell is a (dataset-noise kind, angle sigma, circuit mask) triple;
cells are enumerated in (dataset, sigma, mask) order over the configured
axes and indexed by their position in the *full* product, so a filtered run
reproduces exactly the records a full run would produce for the same cells.

Seed discipline (see seeding module): the train/test split and the weight
initialization derive from the base seed alone, so noise-free cells are
bit-identical across repeats; dataset-noise, angle-noise, and shot substreams
derive from (base seed, cell index, repeat), so repeats sample independent
noise realizations and results are independent of worker count.

Outputs per run: ``summary.csv`` (one row per record), one loss-trace CSV
per record, ``config_resolved.ini``, and ``failures.csv`` when cells fail.
Every CSV starts with one ``#`` provenance comment line recording the base
seed and training-row cap; ``wall_ms`` is informational and excluded from
reproducibility guarantees.
"""

from __future__ import annotations

import configparser
import csv
import logging
import multiprocessing
import os
import time
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from . import seeding
from .channels import CircuitNoiseMask, NoiseParams, NoiseProfile, mask_from_index
from .data import (DEFAULT_FEATURES, LabeledSet, fit_preprocessor, load_csv,
                   split, transform)
from .encoding import (DEFAULT_ANGLE_SIGMAS, NOISE_KINDS, DatasetNoiseSpec,
                       inject_dataset_noise)
from .train import TrainConfig, TrainTrace, accuracy, fit

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ("dataset_noise", "angle_sigma", "mask_index", "mask_bits",
                   "seed", "iters", "final_loss", "train_acc", "test_acc",
                   "wall_ms")
SUMMARY_NAME = "summary.csv"
FAILURES_NAME = "failures.csv"
RESOLVED_CONFIG_NAME = "config_resolved.ini"


def bundled_dataset_path() -> str:
    """Path of the sample passenger CSV shipped with the package."""
    return str(resources.files("vqcnoise").joinpath("assets/titanic_sample.csv"))


@dataclass(frozen=True)
class DataConfig:
    csv_path: str = ""            # empty -> bundled sample dataset
    features: tuple[str, ...] = DEFAULT_FEATURES
    test_fraction: float = 0.2
    train_cap: int = 200          # 0 disables the cap

    def resolved_path(self) -> str:
        return self.csv_path or bundled_dataset_path()


@dataclass(frozen=True)
class GridSpec:
    datasets: tuple[str, ...] = NOISE_KINDS
    sigmas: tuple[float, ...] = DEFAULT_ANGLE_SIGMAS
    masks: tuple[int, ...] = tuple(range(16))
    repeats: int = 3

    def __post_init__(self):
        for kind in self.datasets:
            if kind not in NOISE_KINDS:
                raise ValueError(f"unknown dataset-noise kind {kind!r}")
        for m in self.masks:
            if not 0 <= m < 16:
                raise ValueError(f"mask index {m} outside [0, 16)")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """One grid cell plus everything shared across the run."""

    dataset_noise: DatasetNoiseSpec = field(default_factory=DatasetNoiseSpec)
    angle_sigma: float = 0.0
    mask: CircuitNoiseMask = field(default_factory=CircuitNoiseMask)
    noise_params: NoiseParams = field(default_factory=NoiseParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    data: DataConfig = field(default_factory=DataConfig)
    seed: int = 7
    out_dir: str = "runs"


@dataclass(frozen=True)
class Cell:
    index: int                    # position in the full configured product
    dataset_kind: str
    sigma: float
    mask_index: int


@dataclass(frozen=True)
class ExperimentRecord:
    """One executed (cell, repeat): config identity, trace, accuracies."""

    cell_index: int
    repeat: int
    dataset_kind: str
    angle_sigma: float
    mask_index: int
    mask_bits: str
    seed: int                     # derived per-record noise seed
    losses: tuple[float, ...]
    train_acc: float
    test_acc: float
    wall_ms: int

    @property
    def iters(self) -> int:
        return len(self.losses)

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


@dataclass(frozen=True)
class GridFilter:
    datasets: tuple[str, ...] | None = None
    sigmas: tuple[float, ...] | None = None
    masks: tuple[int, ...] | None = None


def build_grid(base: ExperimentConfig, grid: GridSpec = GridSpec(),
               selector: GridFilter | None = None) -> list[Cell]:
    """Enumerate cells in (dataset, sigma, mask) order, optionally filtered."""
    cells = []
    index = 0
    for kind in grid.datasets:
        for sigma in grid.sigmas:
            for mask_index in grid.masks:
                keep = True
                if selector is not None:
                    keep = ((selector.datasets is None or kind in selector.datasets)
                            and (selector.sigmas is None
                                 or any(abs(sigma - s) < 1e-12
                                        for s in selector.sigmas))
                            and (selector.masks is None
                                 or mask_index in selector.masks))
                if keep:
                    cells.append(Cell(index, kind, sigma, mask_index))
                index += 1
    if not cells:
        raise ValueError("grid selection is empty")
    return cells


def cell_config(base: ExperimentConfig, cell: Cell) -> ExperimentConfig:
    return replace(base,
                   dataset_noise=replace(base.dataset_noise, kind=cell.dataset_kind),
                   angle_sigma=cell.sigma,
                   mask=mask_from_index(cell.mask_index,
                                        base.mask.readout_enabled))


def _load_sets(cfg: ExperimentConfig) -> tuple[LabeledSet, LabeledSet]:
    """Load, split, fit on train only, transform, and cap the training rows."""
    records = load_csv(cfg.data.resolved_path())
    split_seed = seeding.derive(cfg.seed, seeding.SPLIT)
    train_recs, test_recs = split(records, cfg.data.test_fraction, split_seed)
    pre = fit_preprocessor(train_recs, cfg.data.features)
    train_set = transform(pre, train_recs)
    test_set = transform(pre, test_recs)
    cap = cfg.data.train_cap
    if cap and len(train_set) > cap:
        rng = np.random.default_rng(seeding.derive(cfg.seed, seeding.SPLIT, 1))
        keep = np.sort(rng.permutation(len(train_set))[:cap])
        train_set = LabeledSet(train_set.features[keep], train_set.labels[keep])
    return train_set, test_set


def _corrupt(features: np.ndarray, spec: DatasetNoiseSpec,
             seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.stack([inject_dataset_noise(row, spec, rng) for row in features])


def run_cell(cfg: ExperimentConfig, cell: Cell, repeat: int) -> ExperimentRecord:
    """Execute one grid cell end to end; deterministic per (config, cell, repeat)."""
    started = time.perf_counter()
    base = cfg.seed
    train_set, test_set = _load_sets(cfg)
    spec = replace(cfg.dataset_noise, kind=cell.dataset_kind)
    train_noisy = LabeledSet(
        _corrupt(train_set.features, spec,
                 seeding.derive(base, seeding.DATASET_NOISE_TRAIN, cell.index, repeat)),
        train_set.labels)
    test_noisy = LabeledSet(
        _corrupt(test_set.features, spec,
                 seeding.derive(base, seeding.DATASET_NOISE_TEST, cell.index, repeat)),
        test_set.labels)
    profile = NoiseProfile(
        mask_from_index(cell.mask_index, cfg.mask.readout_enabled),
        cfg.noise_params, cell.sigma)
    angle_train = seeding.derive(base, seeding.ANGLE_NOISE_TRAIN, cell.index, repeat)
    angle_test = seeding.derive(base, seeding.ANGLE_NOISE_TEST, cell.index, repeat)
    shots_train = seeding.derive(base, seeding.SHOTS, cell.index, repeat, 0)
    shots_test = seeding.derive(base, seeding.SHOTS, cell.index, repeat, 1)
    trace: TrainTrace = fit(train_noisy, cfg.train, profile,
                            init_seed=seeding.derive(base, seeding.INIT),
                            angle_seed=angle_train, shot_seed=shots_train)
    train_acc = accuracy(train_noisy, trace.weights, profile, cfg.train,
                         angle_seed=angle_train, shot_seed=shots_train)
    test_acc = accuracy(test_noisy, trace.weights, profile, cfg.train,
                        angle_seed=angle_test, shot_seed=shots_test)
    wall_ms = int(round((time.perf_counter() - started) * 1000))
    mask = mask_from_index(cell.mask_index)
    return ExperimentRecord(
        cell_index=cell.index, repeat=repeat, dataset_kind=cell.dataset_kind,
        angle_sigma=cell.sigma, mask_index=cell.mask_index, mask_bits=mask.bits,
        seed=seeding.derive(base, seeding.CELL, cell.index, repeat),
        losses=trace.losses, train_acc=train_acc, test_acc=test_acc,
        wall_ms=wall_ms)


def sigma_token(sigma: float) -> str:
    return repr(float(sigma)).rstrip("0").rstrip(".").replace(".", "p") or "0"


def trace_filename(record: ExperimentRecord) -> str:
    return (f"trace_{record.dataset_kind}_sig{sigma_token(record.angle_sigma)}"
            f"_m{record.mask_index:02d}_rep{record.repeat}.csv")


def _provenance(cfg: ExperimentConfig) -> str:
    return (f"# vqcnoise seed={cfg.seed} train_cap={cfg.data.train_cap} "
            f"features={','.join(cfg.data.features)}")


def write_trace(record: ExperimentRecord, cfg: ExperimentConfig,
                directory: str) -> str:
    path = os.path.join(directory, trace_filename(record))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_provenance(cfg) + f" cell={record.cell_index} "
                 f"repeat={record.repeat} record_seed={record.seed}\n")
        writer = csv.writer(fh)
        writer.writerow(("iter", "loss"))
        for k, loss in enumerate(record.losses, start=1):
            writer.writerow((k, repr(loss)))
    return path


def summary_row(record: ExperimentRecord) -> tuple:
    return (record.dataset_kind, repr(float(record.angle_sigma)),
            record.mask_index, record.mask_bits, record.seed, record.iters,
            repr(record.final_loss), repr(record.train_acc),
            repr(record.test_acc), record.wall_ms)


def write_summary(records: list[ExperimentRecord], cfg: ExperimentConfig,
                  directory: str) -> str:
    path = os.path.join(directory, SUMMARY_NAME)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_provenance(cfg) + "\n")
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for record in records:
            writer.writerow(summary_row(record))
    return path


def read_summary(path: str) -> list[dict]:
    """Rows of summary.csv as dicts with typed fields; skips comments."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for row in reader:
        rows.append({
            "dataset_noise": row["dataset_noise"],
            "angle_sigma": float(row["angle_sigma"]),
            "mask_index": int(row["mask_index"]),
            "mask_bits": row["mask_bits"],
            "seed": int(row["seed"]),
            "iters": int(row["iters"]),
            "final_loss": float(row["final_loss"]),
            "train_acc": float(row["train_acc"]),
            "test_acc": float(row["test_acc"]),
            "wall_ms": int(row["wall_ms"]),
        })
    return rows


def read_trace(path: str) -> list[float]:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [float(row["loss"]) for row in reader]


def _run_task(args) -> tuple:
    cfg, cell, repeat = args
    try:
        return ("ok", run_cell(cfg, cell, repeat))
    except Exception as exc:  # cell failures must not sink the grid
        log.exception("cell %d repeat %d failed", cell.index, repeat)
        return ("error", (cell.index, repeat, f"{type(exc).__name__}: {exc}"))


def run_grid(base: ExperimentConfig, cells: list[Cell], *,
             repeats: int = 3, workers: int = 0,
             out_dir: str | None = None):
    """Execute (cells x repeats), write logs, return (records, failures).

    Results are independent of ``workers``: every record's randomness derives
    from (base seed, cell index, repeat), and rows are written in cell order.
    """
    out_dir = out_dir or base.out_dir
    os.makedirs(out_dir, exist_ok=True)
    # fail fast on an unloadable dataset before any cell starts
    load_csv(base.data.resolved_path())
    tasks = [(cell_config(base, cell), cell, repeat)
             for cell in cells for repeat in range(repeats)]
    if workers <= 0:
        workers = os.cpu_count() or 1
    if workers == 1 or len(tasks) == 1:
        outcomes = [_run_task(task) for task in tasks]
    else:
        with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
            outcomes = pool.map(_run_task, tasks)
    records = sorted((payload for status, payload in outcomes if status == "ok"),
                     key=lambda r: (r.cell_index, r.repeat))
    failures = [payload for status, payload in outcomes if status == "error"]
    for record in records:
        write_trace(record, base, out_dir)
    write_summary(records, base, out_dir)
    write_config(base, GridSpec(repeats=repeats),
                 os.path.join(out_dir, RESOLVED_CONFIG_NAME), cells=cells)
    if failures:
        with open(os.path.join(out_dir, FAILURES_NAME), "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("cell_index", "repeat", "error"))
            writer.writerows(sorted(failures))
    return records, failures


def emit_plots(rows: list[dict], traces: dict, out_dir: str) -> list[str]:
    """Per (dataset kind, sigma): a loss panel and a train/test bar chart.

    ``rows`` are summary rows; ``traces`` maps (kind, sigma, mask, repeat)
    to a loss list.  Loss panels overlay the first repeat of every mask in
    the group; bars show per-mask accuracy averaged over repeats.  Groups
    with no rows are skipped with a warning.
    """
    from .svgplot import accuracy_bars_svg, loss_curves_svg

    os.makedirs(out_dir, exist_ok=True)
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["dataset_noise"], row["angle_sigma"]), []).append(row)
    written = []
    for (kind, sigma), members in sorted(groups.items()):
        if not members:
            log.warning("no records for dataset=%s sigma=%s; skipped", kind, sigma)
            continue
        token = sigma_token(sigma)
        desc = f"dataset={kind} sigma={sigma} masks={len(members)}"
        mask_indices = sorted({m["mask_index"] for m in members})
        series = []
        for mask_index in mask_indices:
            first_repeat = min(r for (k, s, m, r) in traces
                               if k == kind and s == sigma and m == mask_index)
            series.append((f"mask {mask_index:02d}",
                           traces[(kind, sigma, mask_index, first_repeat)]))
        loss_path = os.path.join(out_dir, f"loss_{kind}_sig{token}.svg")
        loss_curves_svg(series, f"Loss convergence: {kind} noise, sigma={sigma}",
                        loss_path, desc)
        bars = []
        for mask_index in mask_indices:
            cells = [m for m in members if m["mask_index"] == mask_index]
            bars.append((f"{mask_index:02d}",
                         float(np.mean([c["train_acc"] for c in cells])),
                         float(np.mean([c["test_acc"] for c in cells]))))
        acc_path = os.path.join(out_dir, f"acc_{kind}_sig{token}.svg")
        accuracy_bars_svg(bars, f"Train/test accuracy: {kind} noise, sigma={sigma}",
                          acc_path, desc)
        written.extend((loss_path, acc_path))
    return written


def load_run_outputs(directory: str) -> tuple[list[dict], dict]:
    """Read summary rows and all loss traces back from a run directory."""
    rows = read_summary(os.path.join(directory, SUMMARY_NAME))
    traces = {}
    seen_repeats: dict[tuple, int] = {}
    for row in rows:
        key3 = (row["dataset_noise"], row["angle_sigma"], row["mask_index"])
        repeat = seen_repeats.get(key3, 0)
        seen_repeats[key3] = repeat + 1
        name = (f"trace_{row['dataset_noise']}_sig{sigma_token(row['angle_sigma'])}"
                f"_m{row['mask_index']:02d}_rep{repeat}.csv")
        path = os.path.join(directory, name)
        if os.path.exists(path):
            traces[key3 + (repeat,)] = read_trace(path)
    return rows, traces


REGIMES = ("clean", "dataset_only", "angle_only", "circuit_only",
           "dataset_circuit", "angle_circuit", "dataset_angle",
           "dataset_angle_circuit")


def classify_regime(dataset_kind: str, angle_sigma: float,
                    mask_index: int) -> str:
    has_data = dataset_kind != "clean"
    has_angle = angle_sigma > 0
    has_circuit = mask_index != 0
    if not (has_data or has_angle or has_circuit):
        return "clean"
    parts = []
    if has_data:
        parts.append("dataset")
    if has_angle:
        parts.append("angle")
    if has_circuit:
        parts.append("circuit")
    return "_".join(parts) if len(parts) > 1 else parts[0] + "_only"


def summarize(rows: list[dict]) -> list[dict]:
    """Mean and std of test accuracy per noise-source regime."""
    if not rows:
        raise ValueError("summarize requires at least one record")
    grouped: dict[str, list[float]] = {}
    for row in rows:
        regime = classify_regime(row["dataset_noise"], row["angle_sigma"],
                                 row["mask_index"])
        grouped.setdefault(regime, []).append(row["test_acc"])
    table = []
    for regime in REGIMES:
        if regime not in grouped:
            continue
        accs = np.asarray(grouped[regime])
        table.append({"regime": regime, "cells": len(accs),
                      "mean_test_acc": float(accs.mean()),
                      "std_test_acc": float(accs.std())})
    return table


def write_regimes(table: list[dict], directory: str) -> str:
    path = os.path.join(directory, "regimes.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("regime", "cells", "mean_test_acc", "std_test_acc"))
        for row in table:
            writer.writerow((row["regime"], row["cells"],
                             repr(row["mean_test_acc"]),
                             repr(row["std_test_acc"])))
    return path


def format_summary_table(table: list[dict]) -> str:
    lines = [f"{'regime':24s} {'cells':>5s} {'test acc':>10s} {'std':>8s}"]
    for row in table:
        lines.append(f"{row['regime']:24s} {row['cells']:5d} "
                     f"{row['mean_test_acc'] * 100:9.2f}% "
                     f"{row['std_test_acc'] * 100:7.2f}%")
    return "\n".join(lines)


# -- config file I/O ---------------------------------------------------------

def _format_floats(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def parse_mask_list(text: str) -> tuple[int, ...]:
    """Comma list of indices and inclusive ranges, e.g. '0,3,8-15'."""
    masks: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "-" in token:
            lo, hi = token.split("-", 1)
            masks.extend(range(int(lo), int(hi) + 1))
        else:
            masks.append(int(token))
    return tuple(masks)


def write_config(cfg: ExperimentConfig, grid: GridSpec, path: str,
                 cells: list[Cell] | None = None) -> None:
    """Write the fully-resolved sectioned key=value config."""
    parser = configparser.ConfigParser()
    parser["data"] = {
        "csv": cfg.data.csv_path,
        "features": ",".join(cfg.data.features),
        "test_fraction": repr(cfg.data.test_fraction),
        "train_cap": str(cfg.data.train_cap),
    }
    parser["train"] = {
        "max_iters": str(cfg.train.max_iters),
        "shots": str(cfg.train.shots),
        "optimizer": cfg.train.optimizer,
        "simplex_step": repr(cfg.train.simplex_step),
        "diameter_tol": repr(cfg.train.diameter_tol),
        "fm_reps": str(cfg.train.fm_reps),
        "ansatz_reps": str(cfg.train.ansatz_reps),
    }
    parser["noise"] = {
        "depol_p": repr(cfg.noise_params.depol_p),
        "ad_gamma": repr(cfg.noise_params.ad_gamma),
        "pd_gamma": repr(cfg.noise_params.pd_gamma),
        "pauli_p": repr(cfg.noise_params.pauli_p),
        "readout_enabled": str(cfg.mask.readout_enabled).lower(),
        "readout_flip01": repr(cfg.noise_params.readout_flip01),
        "readout_flip10": repr(cfg.noise_params.readout_flip10),
        "dataset_sigma": repr(cfg.dataset_noise.sigma),
        "dataset_epsilon": repr(cfg.dataset_noise.epsilon),
        "dataset_impulse_ratio": repr(cfg.dataset_noise.impulse_ratio),
        "dataset_dropout_p": repr(cfg.dataset_noise.dropout_p),
        "dataset_step": repr(cfg.dataset_noise.step),
    }
    parser["grid"] = {
        "datasets": ",".join(grid.datasets),
        "sigmas": _format_floats(grid.sigmas),
        "masks": ",".join(str(m) for m in grid.masks),
        "repeats": str(grid.repeats),
    }
    parser["run"] = {"seed": str(cfg.seed)}
    if cells is not None:
        parser["run"]["selected_cells"] = ",".join(str(c.index) for c in cells)
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def load_config(path: str) -> tuple[ExperimentConfig, GridSpec]:
    """Read a sectioned key=value config; missing keys take defaults."""
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise FileNotFoundError(path)
    data_sec = parser["data"] if parser.has_section("data") else {}
    train_sec = parser["train"] if parser.has_section("train") else {}
    noise_sec = parser["noise"] if parser.has_section("noise") else {}
    grid_sec = parser["grid"] if parser.has_section("grid") else {}
    run_sec = parser["run"] if parser.has_section("run") else {}
    defaults = DataConfig()
    data_cfg = DataConfig(
        csv_path=data_sec.get("csv", defaults.csv_path),
        features=tuple(f.strip() for f in
                       data_sec.get("features", ",".join(defaults.features))
                       .split(",") if f.strip()),
        test_fraction=float(data_sec.get("test_fraction",
                                         defaults.test_fraction)),
        train_cap=int(data_sec.get("train_cap", defaults.train_cap)),
    )
    t = TrainConfig()
    train_cfg = TrainConfig(
        max_iters=int(train_sec.get("max_iters", t.max_iters)),
        shots=int(train_sec.get("shots", t.shots)),
        optimizer=train_sec.get("optimizer", t.optimizer),
        simplex_step=float(train_sec.get("simplex_step", t.simplex_step)),
        diameter_tol=float(train_sec.get("diameter_tol", t.diameter_tol)),
        fm_reps=int(train_sec.get("fm_reps", t.fm_reps)),
        ansatz_reps=int(train_sec.get("ansatz_reps", t.ansatz_reps)),
    )
    np_def = NoiseParams()
    noise_params = NoiseParams(
        depol_p=float(noise_sec.get("depol_p", np_def.depol_p)),
        ad_gamma=float(noise_sec.get("ad_gamma", np_def.ad_gamma)),
        pd_gamma=float(noise_sec.get("pd_gamma", np_def.pd_gamma)),
        pauli_p=float(noise_sec.get("pauli_p", np_def.pauli_p)),
        readout_flip01=float(noise_sec.get("readout_flip01",
                                           np_def.readout_flip01)),
        readout_flip10=float(noise_sec.get("readout_flip10",
                                           np_def.readout_flip10)),
    )
    readout_enabled = str(noise_sec.get("readout_enabled", "false")).lower() \
        in ("1", "true", "yes", "on")
    ds = DatasetNoiseSpec()
    dataset_noise = DatasetNoiseSpec(
        kind="clean",
        sigma=float(noise_sec.get("dataset_sigma", ds.sigma)),
        epsilon=float(noise_sec.get("dataset_epsilon", ds.epsilon)),
        impulse_ratio=float(noise_sec.get("dataset_impulse_ratio",
                                          ds.impulse_ratio)),
        dropout_p=float(noise_sec.get("dataset_dropout_p", ds.dropout_p)),
        step=float(noise_sec.get("dataset_step", ds.step)),
    )
    g = GridSpec()
    grid = GridSpec(
        datasets=tuple(k.strip() for k in
                       grid_sec.get("datasets", ",".join(g.datasets))
                       .split(",") if k.strip()),
        sigmas=tuple(float(s) for s in
                     grid_sec.get("sigmas", _format_floats(g.sigmas))
                     .split(",") if s.strip()),
        masks=parse_mask_list(grid_sec.get("masks", "0-15")),
        repeats=int(grid_sec.get("repeats", g.repeats)),
    )
    cfg = ExperimentConfig(
        dataset_noise=dataset_noise,
        mask=CircuitNoiseMask(readout_enabled=readout_enabled),
        noise_params=noise_params, train=train_cfg, data=data_cfg,
        seed=int(run_sec.get("seed", 7)))
    return cfg, grid
