"""Figure rendering for the sweep report.

Matplotlib is imported lazily so the data-only paths stay fast.
"""

from __future__ import annotations

from .simulate import SweepRow


def render_sweep_figure(rows: list[SweepRow], path: str) -> None:
    """Render the key-rate curves and the mismatch ratio to an image file.

    Top panel: the multiphoton bound against the single-photon
    references and the equal-efficiency baseline.  Bottom panel: the
    ratio of the bound to the baseline.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    etas = [r.eta for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 7.4), sharex=True)

    ax1.plot(etas, [r.k_main for r in rows], "-", color="C0", label="multiphoton bound")
    ax1.plot(etas, [r.k_tight for r in rows], "--", color="C1", label="single-photon (tight)")
    ax1.plot(etas, [r.k_simple for r in rows], ":", color="C2", label="single-photon (simple)")
    ax1.plot(etas, [r.k_nomismatch for r in rows], "-.", color="C3", label="no mismatch, avg eff.")
    ax1.set_ylabel("secret key rate")
    ax1.legend(loc="best", fontsize=9)
    ax1.grid(alpha=0.3)

    ax2.plot(etas, [r.ratio for r in rows], "-", color="C0")
    ax2.set_xlabel(r"detector efficiency ratio $\eta$")
    ax2.set_ylabel("rate / no-mismatch rate")
    ax2.set_ylim(0.0, 1.05)
    ax2.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
