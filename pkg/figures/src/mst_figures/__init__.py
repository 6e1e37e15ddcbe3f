"""Render figures from falqon-mst's fixed trace/result file formats.

This package never recomputes any physics: it parses the exact CSV/JSON
contracts emitted by the experiment CLI (trace.csv with the layer,beta,energy
header; result.json with top_states/final_energy/ground_energy/success/
in_top_k) and draws the two figure styles used to judge a run: the energy
descent curve over layers and the probability bars of the most likely
measurement outcomes.
"""

from .io import ResultFile, TraceFile, read_result, read_trace
from .plots import plot_energy, plot_top_states

__version__ = "0.1.0"

__all__ = [
    "TraceFile",
    "ResultFile",
    "read_trace",
    "read_result",
    "plot_energy",
    "plot_top_states",
]
