"""The two figure styles: energy descent over layers, top-state probability bars."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import ResultFile, TraceFile, read_result, read_trace


def plot_energy(
    trace_path: str | Path,
    out_image_path: str | Path,
    ground_energy: float | None = None,
) -> TraceFile:
    """Line plot of the per-layer Hamiltonian expectation.

    Draws the ground energy as a horizontal reference when given.  Returns
    the parsed trace so callers can assert on the data rather than pixels.
    """
    trace = read_trace(trace_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(trace.layers, trace.energies, lw=1.2, color="#1f77b4")
    if ground_energy is not None:
        ax.axhline(ground_energy, color="#d62728", lw=1.0, ls="--",
                   label=f"ground energy {ground_energy:.4g}")
        ax.legend(frameon=False)
    ax.set_xlabel("layer $k$")
    ax.set_ylabel(r"$\langle H \rangle_k$")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_image_path, dpi=150)
    plt.close(fig)
    return trace


def plot_top_states(result_path: str | Path, out_image_path: str | Path) -> ResultFile:
    """Bar chart of the most probable basis states, labelled by bitstring.

    The leading bar is the reported ground state whenever the run succeeded;
    it is highlighted in that case.  Returns the parsed result.
    """
    result = read_result(result_path)
    labels = [b for b, _ in result.top_states]
    probs = [p for _, p in result.top_states]
    colors = ["#cccccc"] * len(labels)
    if result.success:
        colors[0] = "#2ca02c"
    fig, ax = plt.subplots(figsize=(7.2, 4.0))
    ax.bar(range(len(labels)), probs, color=colors, edgecolor="black", lw=0.4)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=70, fontsize=7, family="monospace")
    ax.set_xlabel("basis state")
    ax.set_ylabel(r"$|\langle s | \psi \rangle|^2$")
    ax.set_ylim(0, max(probs) * 1.15)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_image_path, dpi=150)
    plt.close(fig)
    return result
