"""Summary figures rendered next to each benchmark CSV.

Two log-log panels per suite: relative error and wall seconds against the
suite's sweep variable, one series per (integrand, method) pair. Uses the
Agg backend so rendering works headless; files land alongside the CSV as
<stem>_error.png and <stem>_time.png.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be set first

__all__ = ["render_suite_figures"]

# sweep variable plotted on the x axis, per suite
_X_AXIS = {
    "test1": ("n", "total nodes n"),
    "test2": ("n", "total nodes n"),
    "test3": ("d", "dimension d"),
    "test4": ("d", "dimension d"),
    "test5": ("a", "Korobov parameter a"),
    "test6": ("a", "points per axis N"),
    "test7": ("d", "dimension d"),
}


def _series(records, xkey, ykey):
    """Group rows into {(integrand, method): sorted [(x, y), ...]}."""
    groups = {}
    for rec in records:
        if rec.status != "ok":
            continue
        y = getattr(rec, ykey)
        x = getattr(rec, xkey)
        if x is None or y is None or y <= 0:
            continue
        groups.setdefault((rec.integrand, rec.method), []).append((x, y))
    return {k: sorted(v) for k, v in groups.items() if len(v) >= 2}


def _render(records, xkey, xlabel, ykey, ylabel, out_path):
    groups = _series(records, xkey, ykey)
    if not groups:
        return None
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    for (fid, method), pts in sorted(groups.items()):
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.loglog(xs, ys, marker="o", markersize=4, label=f"{fid}/{method}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)


def render_suite_figures(records, csv_path, suite=None):
    """Render the error and timing figures for one suite CSV.

    Returns the list of figure paths actually written; series without
    positive data (all-skipped suites, exact-to-roundoff errors) are
    dropped, and a figure with no series at all is not written.
    """
    csv_path = Path(csv_path)
    xkey, xlabel = _X_AXIS.get(suite, ("n", "total nodes n"))
    written = []
    for ykey, ylabel, tag in (("rel_error", "relative error", "error"),
                              ("seconds", "wall seconds", "time")):
        out = csv_path.with_name(csv_path.stem + f"_{tag}.png")
        path = _render(records, xkey, xlabel, ykey, ylabel, out)
        if path is not None:
            written.append(path)
    return written
