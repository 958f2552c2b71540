"""Report figures rendered to files next to the delimited outputs."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .core import RunTable


def save_run_figure(rt: RunTable, path, title: str = "") -> None:
    """Used-slots profile of one run (step vs nu)."""
    fig, ax = plt.subplots(figsize=(8, 3.2))
    steps = range(1, rt.length + 1)
    ax.step(steps, rt.nu, where="mid", lw=1.2)
    ax.fill_between(steps, rt.nu, step="mid", alpha=0.25)
    ax.set_xlabel("step")
    ax.set_ylabel("used slots")
    ax.set_ylim(0, rt.n + 1.5)
    ax.grid(alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(points: Sequence[tuple], n: int, path) -> None:
    """Parallelism curve over the mix fraction (h vs mu)."""
    hs = [float(h) for h, _, _ in points]
    mus = [float(mu) for _, mu, _ in points]
    fig, ax = plt.subplots(figsize=(6.4, 4))
    ax.plot(hs, mus, marker="o", ms=3, lw=1.2)
    ax.set_xlabel("pipelined fraction h")
    ax.set_ylabel("mean slot utilization")
    ax.set_title(f"hybrid gossiping, N={n}")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_autotune_figure(rows: Sequence[tuple], cp: int, path) -> None:
    """Tuning trace: probed mu per iteration against the sensed target.

    Log scale on the mu axis, matching how such traces are usually
    published.
    """
    iterations = [it for it, _, _ in rows]
    mus = [float(mu) for _, mu, _ in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4))
    ax.plot(iterations, mus, marker="o", ms=4, lw=1.0, label="mu of adopted mix")
    ax.axhline(cp, color="tab:red", ls="--", lw=1.0, label=f"sensed cp={cp}")
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean slot utilization")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
