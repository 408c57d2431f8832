from __future__ import annotations
from dataclasses import dataclass
from typing import Optional
import io

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from ..model.exceptions import EmptyStatsError

# fixed salt and no date stamp keep the SVG byte-identical between runs
SVG_RC = {
    "svg.hashsalt": "big-ssl",
    "svg.fonttype": "path",
    "path.simplify": False,
}


@dataclass(frozen=True)
class ChartStyle:
    x_column: str
    mean_column: str = "mean_omega"
    std_column: Optional[str] = "std_omega"
    reference_column: Optional[str] = "sup_p"
    prediction_column: Optional[str] = "prediction_m"
    mean_label: str = "empirical mean"
    reference_label: str = "sup of p on boundary"
    prediction_label: str = "finite-m prediction"
    title: str = ""
    x_label: str = ""
    y_label: str = "bandwidth estimate"
    width_px: int = 800
    height_px: int = 500
    dpi: int = 100


def emit_svg(stats: pd.DataFrame, style: ChartStyle) -> str:
    """
    Chart of one summary series: mean polyline, translucent +-1 std band,
    dashed reference line and solid prediction line where present.
    """
    if stats is None or stats.empty:
        raise EmptyStatsError("Cannot render a chart from empty statistics")

    frame = stats.sort_values(style.x_column, kind="mergesort")
    x = frame[style.x_column].to_numpy(dtype=float)
    mean = frame[style.mean_column].to_numpy(dtype=float)

    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(style.width_px / style.dpi, style.height_px / style.dpi),
                               dpi=style.dpi)
        try:
            if x.shape[0] == 1:
                ax.plot(x, mean, marker="o", linestyle="none", color="tab:blue", label=style.mean_label)
            else:
                if style.std_column and style.std_column in frame:
                    std = frame[style.std_column].to_numpy(dtype=float)
                    ax.fill_between(x, mean - std, mean + std, color="tab:blue", alpha=0.25,
                                    linewidth=0, label="+/- 1 std")
                ax.plot(x, mean, marker="o", color="tab:blue", label=style.mean_label)

            if style.reference_column and style.reference_column in frame:
                reference = frame[style.reference_column].to_numpy(dtype=float)
                if np.any(np.isfinite(reference)):
                    ax.plot(x, reference, linestyle="--", color="tab:red", label=style.reference_label)

            if style.prediction_column and style.prediction_column in frame:
                prediction = frame[style.prediction_column].to_numpy(dtype=float)
                if np.any(np.isfinite(prediction)):
                    ax.plot(x, prediction, linestyle="-", color="tab:green", label=style.prediction_label)

            ax.set_xlabel(style.x_label or style.x_column)
            ax.set_ylabel(style.y_label)
            if style.title:
                ax.set_title(style.title)
            ax.grid(True, alpha=0.3)
            ax.legend(loc="best")

            buffer = io.StringIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return buffer.getvalue()
