"""Figure rendering for CLI reports.

Every grid-producing subcommand can drop a PNG next to its CSV artifact.
The Agg backend is forced so rendering works headless; figures carry no
timestamps, keeping repeated runs comparable.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (6.0, 3.8)


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": "gaussbl"})
    plt.close(fig)
    return path


def flow_figure(trace, path, title: str = "entropy flow") -> Path:
    """phi(t), phi_X(t) and the per-map parts on a log time axis."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    t = np.asarray(trace.t_grid, dtype=float)
    positive = t > 0
    ax.semilogx(t[positive], trace.phi[positive], "o-", ms=3, label=r"$\varphi(t)$")
    ax.semilogx(t[positive], trace.phi_x[positive], "--", lw=1, label=r"$\varphi_X(t)$")
    for i in range(trace.phi_y.shape[0]):
        ax.semilogx(t[positive], trace.phi_y[i, positive], ":", lw=1,
                    label=rf"$\varphi_{{Y_{i + 1}}}(t)$")
    ax.axhline(trace.objective_at_alpha, color="k", lw=0.8, alpha=0.6,
               label=r"$F(\alpha^*)$")
    ax.set_xlabel("t")
    ax.set_ylabel("nats")
    ax.set_title(title)
    ax.legend(fontsize=8, ncol=2)
    return _save(fig, path)


def entanglement_figure(result, path, title: str = "correlation growth") -> Path:
    """ln f(t) with the fitted asymptotic slope."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(result.t_grid, result.ln_f, "o", ms=3, label=r"$\ln f(t)$")
    tail = result.t_grid >= result.t_max_used / 10.0
    x = result.t_grid[tail]
    coef = np.polyfit(x, result.ln_f[tail], 1)
    ax.plot(x, np.polyval(coef, x), "r-", lw=1,
            label=rf"fit: $\Lambda = {result.lam:.4g}$")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\ln f(t)$")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _save(fig, path)


def margin_figure(margins, path, title: str = "inequality margins") -> Path:
    """Histogram of Monte-Carlo margins; the zero line marks violation."""
    margins = np.asarray(margins, dtype=float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.hist(margins, bins=min(40, max(10, margins.size // 10)), color="C0", alpha=0.8)
    ax.axvline(0.0, color="r", lw=1)
    ax.set_xlabel("margin (nats)")
    ax.set_ylabel("count")
    ax.set_title(f"{title} (min = {margins.min():.3g})")
    return _save(fig, path)


def trace_figure(xs, ys, path, xlabel: str, ylabel: str, title: str,
                 logx: bool = False) -> Path:
    """Generic single-curve report figure."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    plot = ax.semilogx if logx else ax.plot
    plot(xs, ys, "o-", ms=3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return _save(fig, path)


__all__ = ["flow_figure", "entanglement_figure", "margin_figure", "trace_figure"]
