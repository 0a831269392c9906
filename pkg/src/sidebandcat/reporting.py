"""Deterministic CSV/JSON writers with reproducibility headers, and
matplotlib figure rendering for the CLI report paths.

Every CSV carries `#`-prefixed header lines and every JSON a "meta"
block with the resolved config hash, seed and package version, so
identical configs produce byte-identical delimited output.  Figures are
rendered to PNG next to the delimited files.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def meta_block(config: dict, seed) -> dict:
    return {
        "config_hash": config_hash(config),
        "seed": seed,
        "version": __version__,
    }


def _fmt(x) -> str:
    if isinstance(x, (str, np.str_)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, columns: dict, config: dict, seed) -> None:
    """columns: ordered mapping name -> 1-D array (equal lengths)."""
    meta = meta_block(config, seed)
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    length = len(arrays[0])
    lines = [
        f"# config_hash={meta['config_hash']}",
        f"# seed={meta['seed']}",
        f"# version={meta['version']}",
        ",".join(names),
    ]
    for i in range(length):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, payload: dict, config: dict, seed) -> None:
    doc = {"meta": meta_block(config, seed)}
    doc.update(payload)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def read_flop_csv(path):
    """Parse a rabi-flop CSV (columns time_ms, pg, shots); `#` lines are
    comments.  Raises ValueError naming the offending line."""
    times, pgs, shots = [], [], []
    header_seen = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                cols = [c.strip() for c in line.split(",")]
                if cols[:3] != ["time_ms", "pg", "shots"]:
                    raise ValueError(
                        f"{path}:{lineno}: expected header 'time_ms,pg,shots', got {line!r}"
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            try:
                times.append(float(parts[0]))
                pgs.append(float(parts[1]))
                shots.append(int(float(parts[2])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not header_seen or not times:
        raise ValueError(f"{path}: no data rows found")
    return np.array(times), np.array(pgs), int(shots[0])


def _save(fig, path, config: dict) -> None:
    fig.savefig(path, dpi=130, metadata={"Software": f"sidebandcat {__version__}",
                                         "Description": f"config {config_hash(config)}"})
    plt.close(fig)


def plot_distribution(path, dist, config, title="Phonon distribution") -> None:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    n = np.arange(len(dist.probs))
    ax.bar(n, dist.probs, color="#4878cf")
    ax.set_xlabel("n")
    ax.set_ylabel("P(n)")
    ax.set_title(f"{title}  (mean {dist.mean:.3f}, std {dist.std:.3f})")
    fig.tight_layout()
    _save(fig, path, config)


def plot_fringe(path, surface, config) -> None:
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
    im = axes[0].pcolormesh(surface.grid2, surface.grid1, surface.pg, shading="nearest")
    axes[0].set_xlabel("phi2")
    axes[0].set_ylabel("phi1")
    axes[0].set_title("P_g(phi1, phi2)")
    fig.colorbar(im, ax=axes[0])
    for ax, fringe, label in (
        (axes[1], surface.sum_axis_fringe, "sum axis"),
        (axes[2], surface.diff_axis_fringe, "diff axis"),
    ):
        if fringe is None:
            ax.set_visible(False)
            continue
        ax.plot(fringe.scan, fringe.values, marker="o", ms=3)
        ax.set_ylim(0, 1)
        ax.set_xlabel("scan phase")
        ax.set_ylabel("P_g")
        ax.set_title(f"{label}: C={fringe.contrast:.3f}, V={fringe.visibility:.3f}")
    fig.tight_layout()
    _save(fig, path, config)


def plot_flop(path, record, config, model_curve=None) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    ax.plot(record.times, record.pg, ".", ms=4, label="record")
    if model_curve is not None:
        ax.plot(record.times, model_curve, "-", lw=1, label="fit")
        ax.legend()
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("P_g")
    ax.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    _save(fig, path, config)


def plot_fit(path, fit, config) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    n = np.arange(len(fit.probs))
    ax.bar(n, fit.probs, yerr=fit.uncertainties, color="#4878cf", capsize=2)
    ax.set_xlabel("n")
    ax.set_ylabel("fitted P(n)")
    fig.tight_layout()
    _save(fig, path, config)


def plot_sweep(path, xs, ys, errs, config, xlabel, ylabel) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.errorbar(xs, ys, yerr=errs, marker="o", ms=4, capsize=2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    _save(fig, path, config)


def plot_series(path, xs, series: dict, config, xlabel, ylabel) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    for label, ys in series.items():
        ax.plot(xs, ys, marker="o", ms=4, label=label)
    ax.legend()
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    _save(fig, path, config)
