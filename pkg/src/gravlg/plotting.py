"""Figure output: rendered PNGs plus a standalone gnuplot script per CSV."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import IoError
from .model import SIGN_PAIRS


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _pair_title(pair):
    s1, s2 = pair
    return rf"$s_1={s1:+d},\ s_2={s2:+d}$"


def render_scan(grid, masks, path) -> None:
    """Shade q < 0 on the (omega t1/pi, omega t2/pi) plane, one panel per sign pair."""
    plt = _pyplot()
    x = grid.tau1_axis / math.pi
    y = grid.tau2_axis / math.pi
    fig, axes = plt.subplots(1, len(SIGN_PAIRS), figsize=(3.2 * len(SIGN_PAIRS), 3.8),
                             sharey=True, constrained_layout=True)
    for ax, pair in zip(axes, SIGN_PAIRS):
        shade = np.where(masks[pair].mask, 1.0, np.nan).T
        ax.pcolormesh(x, y, shade, cmap="Greys", vmin=0, vmax=1.6, shading="nearest")
        ax.plot([x[0], x[-1]], [x[0], x[-1]], color="0.6", lw=0.6)
        ax.set_xlim(x[0], x[-1])
        ax.set_ylim(y[0], y[-1])
        ax.set_aspect("equal")
        ax.set_title(_pair_title(pair), fontsize=10)
        ax.set_xlabel(r"$\omega t_1/\pi$")
    axes[0].set_ylabel(r"$\omega t_2/\pi$")
    _save(fig, path, plt)


def render_curves(x, curves: dict, path, xlabel: str, ylabel: str, xscale_pi: bool = True) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.0, 3.4), constrained_layout=True)
    xs = np.asarray(x) / (math.pi if xscale_pi else 1.0)
    for label, y in curves.items():
        ax.plot(xs, y, label=label, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(curves) > 1:
        ax.legend(frameon=False, fontsize=8)
    _save(fig, path, plt)


def _save(fig, path, plt):
    try:
        fig.savefig(path, dpi=150)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)


# -- gnuplot scripts -------------------------------------------------------------------------


def scan_script(mask_csv: str, image: str) -> str:
    cols = {pair: 3 + k for k, pair in enumerate(SIGN_PAIRS)}
    lines = [
        "# negative-q regions; run with: gnuplot <this file>",
        "set datafile separator ','",
        "set terminal pngcairo size 1400,380",
        f"set output '{image}'",
        "set multiplot layout 1,4",
        "set size ratio -1",
        "set xlabel 'omega t1 / pi'",
        "set ylabel 'omega t2 / pi'",
        "unset key",
    ]
    for pair, col in cols.items():
        lines.append(f"set title 's1={pair[0]:+d}, s2={pair[1]:+d}'")
        lines.append(
            f"plot '{mask_csv}' skip 1 using ($1/pi):($2/pi):(${col} > 0 ? 1 : 1/0) "
            "with points pt 5 ps 0.2 lc rgb 'gray30'"
        )
    lines.append("unset multiplot")
    return "\n".join(lines) + "\n"


def curve_script(csv_path: str, image: str, columns: list[str], xlabel: str, ylabel: str) -> str:
    lines = [
        "# run with: gnuplot <this file>",
        "set datafile separator ','",
        "set terminal pngcairo size 800,540",
        f"set output '{image}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    plots = [
        f"'{csv_path}' skip 1 using ($1/pi):{k + 2} with lines title '{name}'"
        for k, name in enumerate(columns)
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def write_script(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc

