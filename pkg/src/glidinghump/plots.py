"""Figure rendering for the report paths; headless and deterministic.

The Agg backend is forced before pyplot loads, and the PNG writer's
software tag is stripped so identical inputs give identical bytes.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

from matplotlib import pyplot as plt

from .glide import BetaSchedule, Certificate, WitnessTrace
from .hypotheses import HypothesisReport


def _finish(fig, path: str) -> None:
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_growth(trace: WitnessTrace, certificate: Certificate, path: str) -> None:
    """Final-point bound against the target line, one marker per step."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ks = [s.k for s in trace.steps]
    bounds = [c.final_bound_value for c in certificate.steps]
    images = [c.image_at_final for c in certificate.steps]
    ax.plot(ks, bounds, marker="o", label="image + drift at final point")
    ax.plot(ks, images, marker=".", linestyle=":", label="image at final point")
    ax.plot(ks, ks, linestyle="--", color="gray", label="target k")
    if bounds and max(bounds) / max(min(bounds), 1e-300) > 50.0:
        ax.set_yscale("log")
    ax.set_xlabel("step k")
    ax.set_ylabel("value")
    ax.set_title("growth certificate")
    ax.legend()
    fig.tight_layout()
    _finish(fig, path)


def plot_schedule(schedule: BetaSchedule, path: str) -> None:
    """The three per-step sequences on a log scale."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ks = list(range(1, schedule.horizon + 1))
    ax.plot(ks, schedule.beta_tilde, marker="o", label="beta_tilde")
    ax.plot(ks, schedule.beta, marker="s", label="beta")
    ax.plot(ks, schedule.gamma, marker="^", label="gamma")
    if ks:
        ax.set_yscale("log")
    ax.set_xlabel("step k")
    ax.set_ylabel("budget")
    ax.set_title("hump budgets")
    ax.legend()
    fig.tight_layout()
    _finish(fig, path)


def plot_lebesgue(orders, values, path: str) -> None:
    """Computed constants next to the (4/pi^2) log n reference curve."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(orders, values, label="L_n")
    xs = [n for n in orders if n >= 1]
    ax.plot(
        xs,
        [(4.0 / math.pi**2) * math.log(n) for n in xs],
        linestyle="--",
        label="(4/pi^2) log n",
    )
    ax.set_xlabel("kernel order n")
    ax.set_ylabel("value")
    ax.set_title("partial-sum operator norms")
    ax.legend()
    fig.tight_layout()
    _finish(fig, path)


def plot_trends(report: HypothesisReport, path: str) -> None:
    """Operator-norm and offset checkpoints from the trend section."""
    trend_sections = [s for s in report.sections if s.curves]
    fig, (ax_op, ax_off) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    for section in trend_sections:
        for curve in section.curves:
            ax_op.plot(curve.checkpoints, curve.op_norms, marker="o", label=f"row {curve.row}")
            ax_off.plot(curve.checkpoints, curve.offsets, marker="o", label=f"row {curve.row}")
    ax_op.set_xlabel("index")
    ax_op.set_ylabel("operator norm")
    ax_op.set_title("blow-up checkpoints")
    ax_off.set_xlabel("index")
    ax_off.set_ylabel("vanishing offset")
    ax_off.set_title("offset decay")
    for ax in (ax_op, ax_off):
        if ax.get_legend_handles_labels()[0]:
            ax.legend()
    fig.tight_layout()
    _finish(fig, path)
