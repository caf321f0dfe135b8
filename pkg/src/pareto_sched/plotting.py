from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import ReferenceFront
from .record import RunRecord


def plot_summary(rows: Sequence, out_dir: Path) -> list[Path]:
    """Bar charts of Avg(GD) and Avg(SP) per algorithm, one SVG per (instance, n_sol)."""
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault((row.instance, row.n_sol), []).append(row)
    written = []
    for (instance, n_sol), members in sorted(groups.items()):
        fig, axes = plt.subplots(1, 2, figsize=(10, 3.5))
        labels = [str(r.algorithm) for r in members]
        for ax, metric in zip(axes, ("GD", "SP")):
            ax.bar(labels, [r.avg[metric] for r in members], yerr=[r.std[metric] for r in members], capsize=2)
            ax.set_title(f"Avg({metric})")
            ax.set_xlabel("algorithm")
        fig.suptitle(f"{instance}, N_sol={n_sol}")
        fig.tight_layout()
        path = out_dir / f"summary_{instance}_nsol{n_sol}.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


def plot_archives(records: Sequence[RunRecord], fronts: Mapping[str, ReferenceFront], out_dir: Path) -> list[Path]:
    """Objective-space scatter of every final archive against the reference front."""
    by_instance: dict[str, list[RunRecord]] = {}
    for rec in records:
        by_instance.setdefault(rec.instance, []).append(rec)
    written = []
    for instance, recs in sorted(by_instance.items()):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        algs = sorted({r.algorithm for r in recs}, key=str)
        cmap = plt.get_cmap("tab20")
        for k, alg in enumerate(algs):
            pts = [r.archive.objectives for r in recs if r.algorithm == alg]
            xs = [p[:, 0] for p in pts]
            ys = [p[:, 1] for p in pts]
            if xs:
                ax.scatter(np.concatenate(xs), np.concatenate(ys), s=6, alpha=0.5, color=cmap(k % 20), label=str(alg))
        front = fronts[instance].points
        ax.plot(front[:, 0], front[:, 1], "k.-", lw=0.8, ms=3, label="front")
        ax.set_xlabel("energy F_e")
        ax.set_ylabel("makespan F_m")
        ax.set_yscale("log")
        ax.legend(fontsize=6, ncol=2)
        ax.set_title(instance)
        fig.tight_layout()
        path = out_dir / f"archives_{instance}.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
