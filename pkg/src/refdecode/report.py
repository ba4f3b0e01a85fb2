"""Report emission: delimited tables, structured JSON, and figure rendering.

Tables are the canonical machine-readable outputs; figures are rendered
from the same in-memory results as a convenience for eyeballing sweeps.
Everything written here is byte-stable for a fixed seed and version, which
is why floats are formatted explicitly and PNG metadata is suppressed.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .harness import BenchReport, GridResult  # noqa: E402
from .simulator import TraceStats  # noqa: E402

_STAT_COLUMNS = ("triggers_per_sample", "accepted_per_sample", "steps_per_sample",
                 "outputs_per_sample", "compression_ratio")


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def write_text(path: Union[str, Path], text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# grid sweep
# ---------------------------------------------------------------------------

def grid_table_lines(result: GridResult) -> Iterable[str]:
    yield "n,k," + ",".join(_STAT_COLUMNS)
    for n in result.n_values:
        for k in result.k_values:
            stats = result.cells[(n, k)]
            vals = ",".join(_fmt(getattr(stats, c)) for c in _STAT_COLUMNS)
            yield f"{n},{k},{vals}"


def grid_json_obj(result: GridResult) -> dict:
    return {
        "n_values": list(result.n_values),
        "k_values": list(result.k_values),
        "cells": [
            {"n": n, "k": k, "stats": result.cells[(n, k)].as_dict()}
            for n in result.n_values for k in result.k_values
        ],
        "best": {"n": result.best[0], "k": result.best[1]},
    }


def _save_fig(fig, path: Path) -> None:
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def render_grid_figures(result: GridResult, outdir: Union[str, Path]) -> list[Path]:
    """Render the sweep curves: compression vs k, and the per-step statistics."""
    outdir = Path(outdir)
    ks = list(result.k_values)
    written = []

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for n in result.n_values:
        ax.plot(ks, [result.cells[(n, k)].compression_ratio for k in ks],
                marker="o", markersize=3, label=f"n={n}")
    ax.set_xlabel("copy length k")
    ax.set_ylabel("compression ratio (tokens / step)")
    ax.grid(True, linestyle="--", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    path = outdir / "grid_compression.png"
    _save_fig(fig, path)
    written.append(path)

    panels = (("triggers_per_sample", "# triggers"),
              ("accepted_per_sample", "# accepted tokens"),
              ("steps_per_sample", "# decoding steps"))
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
    for ax, (column, label) in zip(axes, panels):
        for n in result.n_values:
            ax.plot(ks, [getattr(result.cells[(n, k)], column) for k in ks],
                    marker="o", markersize=3, label=f"n={n}")
        ax.set_xlabel("copy length k")
        ax.set_ylabel(label)
        ax.grid(True, linestyle="--", alpha=0.4)
    axes[0].legend()
    fig.tight_layout()
    path = outdir / "grid_stats.png"
    _save_fig(fig, path)
    written.append(path)
    return written


def write_grid_report(result: GridResult, outdir: Union[str, Path],
                      figures: bool = True) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "grid.csv"
    write_text(csv_path, "".join(line + "\n" for line in grid_table_lines(result)))
    json_path = outdir / "grid.json"
    write_text(json_path, canonical_json(grid_json_obj(result)))
    written = [csv_path, json_path]
    if figures:
        written.extend(render_grid_figures(result, outdir))
    return written


# ---------------------------------------------------------------------------
# simulate stats
# ---------------------------------------------------------------------------

def stats_table_lines(stats: TraceStats) -> Iterable[str]:
    yield ",".join(_STAT_COLUMNS)
    yield ",".join(_fmt(getattr(stats, c)) for c in _STAT_COLUMNS)


def write_stats_report(stats: TraceStats, outdir: Union[str, Path]) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "stats.csv"
    write_text(csv_path, "".join(line + "\n" for line in stats_table_lines(stats)))
    json_path = outdir / "stats.json"
    write_text(json_path, canonical_json(stats.as_dict()))
    return [csv_path, json_path]


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------

def bench_steps_lines(report: BenchReport) -> Iterable[str]:
    """Deterministic per-sample columns (no wall-clock values)."""
    yield "sample_id,output_tokens,baseline_steps,accel_steps,sim_steps,step_compression"
    for r in report.rows:
        ratio = r.output_tokens / r.accel_steps if r.accel_steps else 0.0
        yield (f"{r.sample_id},{r.output_tokens},{r.baseline_steps},"
               f"{r.accel_steps},{r.sim_steps},{_fmt(ratio)}")


def bench_timing_lines(report: BenchReport) -> Iterable[str]:
    yield "sample_id,baseline_time_s,accel_time_s,speedup"
    for r in report.rows:
        speedup = r.baseline_time / r.accel_time if r.accel_time else 0.0
        yield f"{r.sample_id},{_fmt(r.baseline_time)},{_fmt(r.accel_time)},{_fmt(speedup)}"


def bench_summary_lines(report: BenchReport) -> Iterable[str]:
    yield "tokens_per_sec_baseline,tokens_per_sec_accel,time_baseline_s,time_accel_s,speedup"
    yield (f"{_fmt(report.tokens_per_sec_baseline)},{_fmt(report.tokens_per_sec_accel)},"
           f"{_fmt(report.baseline_time_total)},{_fmt(report.accel_time_total)},"
           f"{_fmt(report.speedup)}")


def bench_json_obj(report: BenchReport) -> dict:
    return {
        "repetitions": report.repetitions,
        "tokens_per_sec_baseline": report.tokens_per_sec_baseline,
        "tokens_per_sec_accel": report.tokens_per_sec_accel,
        "time_baseline_s": report.baseline_time_total,
        "time_accel_s": report.accel_time_total,
        "speedup": report.speedup,
        "index_build_time_s": report.index_build_time,
        "samples": [
            {"sample_id": r.sample_id, "output_tokens": r.output_tokens,
             "baseline_steps": r.baseline_steps, "accel_steps": r.accel_steps,
             "sim_steps": r.sim_steps, "baseline_time_s": r.baseline_time,
             "accel_time_s": r.accel_time}
            for r in report.rows
        ],
    }


def write_bench_report(report: BenchReport, outdir: Union[str, Path]) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    steps_path = outdir / "bench.csv"
    write_text(steps_path, "".join(line + "\n" for line in bench_steps_lines(report)))
    timing_path = outdir / "bench_timing.csv"
    write_text(timing_path, "".join(line + "\n" for line in bench_timing_lines(report)))
    json_path = outdir / "bench.json"
    write_text(json_path, canonical_json(bench_json_obj(report)))
    return [steps_path, timing_path, json_path]
