"""Render figure tables to image files with matplotlib (Agg backend).

Optional: the sweep engine never imports this module.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError  # noqa: E402

_Y_COLUMNS = {
    "ar_bundle": ("neg_AR",),
    "ar_crossings": ("neg_AR",),
    "rrbar_negativity": ("neg_RRbar",),
    "mutual_conservation": ("I_AR", "I_ARbar", "I_sum"),
    "conservation_deviation": ("deviation",),
    "rrbar_mutual": ("I_RRbar",),
}
_LOG_Y = {"conservation_deviation"}
_STYLES = ("-", "--", ":")


def render_figure(figure_id, table, path, x_axis="r"):
    """Draw one curve per ``n_max`` (per y column) and save to ``path``."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        if figure_id == "rc_vs_n":
            ax.plot(table.column("n2"), table.column("r_c"), "o-", ms=3)
            ax.set_xlabel("N")
            ax.set_ylabel("crossing squeezing r_c (vs N=1)")
        else:
            ys = _Y_COLUMNS.get(figure_id)
            if ys is None:
                raise ConfigError("figure_id", f"no plot layout for {figure_id!r}")
            recs = table.records()
            for i, n in enumerate(sorted({rec["n_max"] for rec in recs})):
                sub = [rec for rec in recs if rec["n_max"] == n and _plottable(rec[x_axis], x_axis)]
                x = [rec[x_axis] for rec in sub]
                for y, style in zip(ys, _STYLES):
                    label = f"N={n}" if len(ys) == 1 else f"{y} N={n}"
                    ax.plot(x, [rec[y] for rec in sub], style, color=f"C{i % 10}", lw=1.0, label=label)
            if figure_id in _LOG_Y:
                ax.set_yscale("log")
            if x_axis == "omega_over_a":
                ax.set_xscale("log")
            ax.set_xlabel(x_axis)
            ax.set_ylabel(ys[0] if len(ys) == 1 else "mutual information (bits)")
            ax.legend(fontsize=6, ncol=2)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        try:
            fig.savefig(path, dpi=120)
        except OSError as exc:
            raise ConfigError("plot", f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def _plottable(v, x_axis):
    # omega_over_a is infinite at r = 0 and drawn on a log axis
    if v is None or not math.isfinite(v):
        return False
    return v > 0 or x_axis == "r"
