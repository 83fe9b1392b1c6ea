"""CSV output and run manifests."""

from __future__ import annotations

import csv
import datetime as _dt
from pathlib import Path

from . import __version__
from .config_io import format_config
from .model import NetworkConfig
from .simulation import BatchResult, SimReport

ROUND_COLUMNS = ["round", "monitors", "relays", "active_total", "round_energy_J",
                 "total_remaining_J"]
SWEEP_COLUMNS = ["var", "value", "mean_lifetime", "sd", "min", "max", "runs"]


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _write(path: Path, header, rows) -> Path:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _config_columns(config: NetworkConfig) -> dict[str, object]:
    cols = dict(config.flat())
    cols["d0"] = config.d0
    return cols


def write_manifest(out_dir, config: NetworkConfig, seeds, command: str) -> Path:
    """Write ``manifest.cfg``: a loadable config plus seeds, mode, version and timestamp as comments."""
    header = {
        "command": command,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "mode": config.selection_mode,
        "seeds": " ".join(str(s) for s in seeds),
    }
    path = Path(out_dir) / "manifest.cfg"
    try:
        path.write_text(format_config(config, header), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def round_rows(report: SimReport):
    for r in report.rounds:
        yield [r.round_index, r.monitors, r.relays, r.active_total, float(r.round_energy),
               float(r.total_remaining_energy)]


def emit_run(report: SimReport, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = _config_columns(report.config)
    summary_header = ["lifetime", "termination_reason", "seed", "version", *cols]
    summary_row = [report.lifetime, report.termination_reason, report.seed, __version__,
                   *cols.values()]
    return [
        _write(out / "rounds.csv", ROUND_COLUMNS, round_rows(report)),
        _write(out / "summary.csv", summary_header, [summary_row]),
        write_manifest(out, report.config, [report.seed], "run"),
    ]


def emit_batch(batch: BatchResult, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = [[i, r.seed, r.lifetime, r.termination_reason] for i, r in enumerate(batch.runs)]
    means = batch.per_round_means()
    per_round = zip(range(1, len(means["active"]) + 1), means["monitors"], means["relays"],
                    means["active"], means["round_energy"], means["remaining"])
    return [
        _write(out / "batch_runs.csv", ["run", "seed", "lifetime", "termination_reason"], runs),
        _write(out / "batch_summary.csv", ["mean_lifetime", "sd", "min", "max", "runs"],
               [[batch.mean, batch.sd, batch.min, batch.max, len(batch.runs)]]),
        _write(out / "batch_rounds.csv", ROUND_COLUMNS,
               ([i, *map(float, rest)] for i, *rest in per_round)),
        write_manifest(out, batch.config, batch.seeds, "batch"),
    ]


def sweep_rows(var: str, points) -> list[list]:
    return [[var, value, b.mean, b.sd, b.min, b.max, len(b.runs)] for value, b in points]


def emit_sweep(var: str, points, base_config: NetworkConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [s for _, b in points for s in b.seeds]
    return [
        _write(out / "sweep.csv", SWEEP_COLUMNS, sweep_rows(var, points)),
        write_manifest(out, base_config, seeds, f"sweep --var {var}"),
    ]
