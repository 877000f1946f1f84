"""Deterministic SVG plots of trajectory files."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .trajectory import read_csv  # noqa: E402

KINDS = ("xy", "attitude", "controls")
AGENT_COLORS = ("red", "blue", "green")

_RC = {"svg.hashsalt": "liereduce", "svg.fonttype": "path", "path.simplify": True}


def agent_color(a):
    if a < len(AGENT_COLORS):
        return AGENT_COLORS[a]
    return f"C{a}"


def plot_table(table, kind, out_path, W=None):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        t = table.times
        for a in range(table.n_agents):
            col = agent_color(a)
            lab = f"agent {a + 1}"
            if kind == "xy":
                ax.plot(table.poses[:, a, 0], table.poses[:, a, 1], color=col, label=lab)
                ax.plot(table.poses[:1, a, 0], table.poses[:1, a, 1], "o", color=col, ms=4)
            elif kind == "attitude":
                ax.plot(t, np.unwrap(table.poses[:, a, 2]), color=col, label=lab)
            else:
                u = table.controls(W)
                ax.plot(t, u[:, a, 0], color=col, label=f"{lab} $u^1$")
                ax.plot(t, u[:, a, 1], color=col, ls="--", label=f"{lab} $u^2$")
        if kind == "xy":
            ax.set_xlabel("x [m]")
            ax.set_ylabel("y [m]")
            ax.set_aspect("equal", adjustable="datalim")
        elif kind == "attitude":
            ax.set_xlabel("t [s]")
            ax.set_ylabel(r"$\theta$ [rad]")
        else:
            ax.set_xlabel("t [s]")
            ax.set_ylabel("control")
        ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return out_path


def plot_file(csv_path, kind, out_path, W=None):
    return plot_table(read_csv(csv_path), kind, out_path, W=W)
