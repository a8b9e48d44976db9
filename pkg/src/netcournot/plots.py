"""SVG line charts of Linear-minus-strategy welfare differences."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sweep import TrajectoryTable  # noqa: E402

GROUPS = {
    "ascending": ("AscDeg", "AscBet", "AscCL"),
    "descending": ("DescDeg", "DescBet", "DescCL"),
    "random": ("Random",),
}


def plot_differences(table: TrajectoryTable, out_dir: str | Path) -> list[Path]:
    """One ``diff_<group>.svg`` per strategy group present in the table."""
    out_dir = Path(out_dir)
    present = {r.strategy for r in table.rows}
    budgets = table.budgets()
    written = []
    plt.rcParams["svg.hashsalt"] = "netcournot"
    for group, members in GROUPS.items():
        members = [s for s in members if s in present]
        if not members:
            continue
        fig, ax = plt.subplots(figsize=(6, 4))
        for s in members:
            ax.plot(budgets, table.difference(s), marker=".", label=s)
        ax.axhline(0.0, color="grey", linewidth=0.8)
        ax.set_xlabel("budget B")
        ax.set_ylabel("SW_Linear(B) - SW_A(B)")
        ax.set_title(f"Linear vs {group} strategies")
        ax.legend()
        fig.tight_layout()
        path = out_dir / f"diff_{group}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written
