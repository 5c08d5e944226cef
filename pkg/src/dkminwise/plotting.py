"""Figures written next to verification reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .analysis import block_bound  # noqa: E402
from .suites import SuiteResult  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (5.0, 3.2),
    "figure.dpi": 120,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _lemma1(res: SuiteResult, ax):
    est = res.data["estimate"]
    ax.bar(["truly random"], [est.empirical_probability], yerr=[est.ci_halfwidth], color="C0", capsize=6)
    ax.axhline(est.exact.real_value, color="k", ls="--", label=f"C(k,d)/C(n,d) = {est.exact.fraction}")
    ax.set_ylabel("Pr[Y in bottom k]")
    ax.legend(loc="lower right")


def _tails(res: SuiteResult, ax):
    hist = res.data["histogram"]
    lo, hi = hist.partition.index_range()
    idx = np.arange(max(lo, -6), min(hi, 7) + 1)
    freq = np.array([hist.frequency(i) for i in idx])
    ax.bar(idx, np.where(freq > 0, freq, np.nan), color="C0", label="empirical")
    bounds = [block_bound(int(i), hist.d) for i in idx]
    ax.step(idx, bounds, where="mid", color="C3", label="1/|i|^(d+1)")
    ax.set_yscale("log")
    ax.set_ylim(min(1e-5, 0.5 / hist.trials), 2)
    ax.set_xlabel("block index i")
    ax.set_ylabel("Pr[RANK_t in b_i]")
    ax.legend()


def _moments(res: SuiteResult, ax):
    mc = res.data["moment"]
    z = res.data["z"]
    ax.hist(z, bins=min(60, int(z.max() - z.min()) + 1), color="C0", alpha=0.8)
    ax.axvline(mc.expected, color="k", ls="--", label=f"E_i = {mc.expected:.1f}")
    ax.set_xlabel("Z (elements below block edge)")
    ax.set_ylabel("trials")
    ax.set_title(f"E|Z-E|^{mc.order} = {mc.empirical:.3g}  (bound {mc.bound:.3g})")
    ax.legend()


def _delta(res: SuiteResult, ax):
    scan = res.data["scan"]
    dev = [e.signed_deviation for e in scan.estimates]
    ax.scatter(range(len(dev)), dev, color="C0", zorder=3)
    band = 2 * res.data["rel_se"]
    ax.axhspan(-band, band, color="C0", alpha=0.15, label="+/- 2 SE")
    eps = res.data["epsilon"]
    ax.axhline(eps, color="C3", ls="--", label="+/- epsilon")
    ax.axhline(-eps, color="C3", ls="--")
    ax.set_xlabel("(X, Y) pair")
    ax.set_ylabel("relative deviation")
    ax.legend()


def _independence(res: SuiteResult, ax):
    table = res.data["table"]
    p = int(round(len(table) ** 0.5))
    grid = np.zeros((p, p))
    for (a, b), count in table.items():
        grid[a, b] = count
    im = ax.imshow(grid, cmap="viridis", origin="lower")
    plt.colorbar(im, ax=ax, label="family members")
    ax.set_xlabel("h(1)")
    ax.set_ylabel("h(0)")


_PLOTTERS = {
    "lemma1": _lemma1,
    "tails": _tails,
    "moments": _moments,
    "delta": _delta,
    "independence": _independence,
}


def render_suite(res: SuiteResult, path) -> Path:
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        _PLOTTERS[res.name](res, ax)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
