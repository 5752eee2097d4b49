"""Matplotlib rendering of curve tables and benchmark reports.

Everything draws through the Agg backend straight to files; nothing here
opens a window.  PNG content depends on the matplotlib version, so these
files are companions to the CSV/JSONL data, not regression artifacts.
"""

from __future__ import annotations

from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_STSP_SERIES = (
    ("tree_doubling", "tree doubling"),
    ("christofides", "tree + matching"),
    ("cycle_cover_generic", "patching, generic"),
    ("cycle_cover_refined", "patching, refined"),
    ("single_stsp", "single criterion"),
)
_ATSP_SERIES = (
    ("atsp_gamma", "patching, directed"),
    ("atsp_trivial", "weight-spread trivial"),
    ("single_atsp", "single criterion"),
)


def _plot_series(ax, rows: Sequence[dict], series: Sequence[tuple[str, str]]) -> None:
    for key, label in series:
        xs = [float(r["gamma"]) for r in rows if r[key] is not None]
        ys = [float(r[key]) for r in rows if r[key] is not None]
        if xs:
            ax.plot(xs, ys, label=label, linewidth=1.4)
    ax.set_xlabel("gamma")
    ax.set_ylabel("guaranteed ratio")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)


def render_ratio_curves(rows: Sequence[dict], out_stsp: str, out_atsp: str) -> list[str]:
    """Two ratio-vs-gamma figures: undirected series and directed series.

    Directed values blow up approaching gamma = 1/sqrt(3), so that panel is
    clipped to a sane vertical range instead of letting one asymptote
    flatten everything else.
    """
    written = []
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _plot_series(ax, rows, _STSP_SERIES)
    ax.set_title("undirected tour guarantees")
    fig.tight_layout()
    fig.savefig(out_stsp, dpi=150)
    plt.close(fig)
    written.append(out_stsp)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _plot_series(ax, rows, _ATSP_SERIES)
    finite = [
        float(r[k]) for r in rows for k, _ in _ATSP_SERIES if r[k] is not None
    ]
    if finite:
        ax.set_ylim(0, min(max(finite), 6.0) * 1.05)
    ax.set_title("directed tour guarantees")
    fig.tight_layout()
    fig.savefig(out_atsp, dpi=150)
    plt.close(fig)
    written.append(out_atsp)
    return written


def render_bench_betas(reports: Sequence, out_png: str) -> Optional[str]:
    """Observed coverage per run against the guarantee it must stay under."""
    groups: dict[str, list] = {}
    for r in reports:
        if r.empirical_beta is not None:
            groups.setdefault(f"{r.variant}/{r.algorithm}", []).append(r)
    if not groups:
        return None
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    offset = 0
    ticks, labels = [], []
    for name in sorted(groups):
        rows = groups[name]
        xs = [offset + i for i in range(len(rows))]
        ax.scatter(xs, [float(r.empirical_beta) for r in rows], s=8, label=None)
        bounds = [float(r.bound) for r in rows if r.bound is not None]
        if bounds:
            ax.hlines(
                max(bounds), offset - 0.5, offset + len(rows) - 0.5,
                colors="black", linestyles="dashed", linewidth=1,
            )
        ticks.append(offset + (len(rows) - 1) / 2)
        labels.append(name)
        offset += len(rows) + 3
    ax.set_xticks(ticks)
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=7)
    ax.set_ylabel("coverage ratio")
    ax.set_title("observed coverage vs guarantee (dashed)")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png
