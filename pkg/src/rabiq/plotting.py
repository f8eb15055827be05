"""Figure rendering for scan and fit datasets (PNG alongside the CSV)."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _group(rows, key):
    groups = defaultdict(list)
    for r in rows:
        groups[key(r)].append(r)
    return dict(sorted(groups.items()))


def plot_x_scan(rows, path: str, title: str = "") -> None:
    """x * Delta_QC against x, one curve per coupling ratio q."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for q, grp in _group(rows, lambda r: r.q).items():
        grp = sorted(grp, key=lambda r: r.x)
        ax.plot([r.x for r in grp], [r.x * r.delta_qc for r in grp],
                marker="o", ms=3, label=f"q = {q:g}")
    ax.set_xscale("log")
    ax.set_xlabel(r"$x = \Omega/\omega$")
    ax.set_ylabel(r"$x\,\Delta_{QC}\ /\ \hbar g_c$")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def plot_q_scan(rows, path: str, title: str = "") -> None:
    """Delta_QC against q across the phase transition."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    rows = sorted(rows, key=lambda r: r.q)
    ax.plot([r.q for r in rows], [r.delta_qc for r in rows], marker="o", ms=3)
    ax.axvline(1.0, color="0.7", lw=0.8, ls="--")
    ax.set_xlabel(r"$q = (g_1+g_2)/g_c$")
    ax.set_ylabel(r"$\Delta_{QC}\ /\ \hbar g_c$")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def plot_coefficients(fit_rows, path: str, coef: str, against: str,
                      title: str = "") -> None:
    """Fitted A or B against q or eta, with closed-form curves dashed."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for beta, grp in _group(fit_rows, lambda r: r["beta"]).items():
        grp = sorted(grp, key=lambda r: r[against])
        xs = [r[against] for r in grp]
        ax.plot(xs, [r[coef] for r in grp], marker="o", ms=3,
                label=rf"fit, $\beta$ = {beta:g}")
        closed = [r.get(coef + "_closed") for r in grp]
        if all(c is not None for c in closed):
            ax.plot(xs, closed, ls="--", color="0.3", lw=1)
    if against == "q":
        ax.axvline(1.0, color="0.7", lw=0.8, ls="--")
        ax.set_xlabel(r"$q$")
    else:
        ax.set_xlabel(r"$\eta = g_1/(g_1+g_2)$")
    ax.set_ylabel(coef)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def plot_experiment(rows, path: str, title: str = "") -> None:
    """Free energies (top) and gap ratio (bottom) against g/gc."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.2, 5.4), sharex=True)
    rows = sorted(rows, key=lambda r: r.q)
    qs = [r.q for r in rows]
    ax1.plot(qs, [r.f_q for r in rows], marker="o", ms=3, label=r"$F_Q$")
    ax1.plot(qs, [r.f_c for r in rows], marker="s", ms=3, label=r"$F_C$")
    ax1.set_ylabel("free energy")
    ax1.legend(fontsize=8)
    ax2.plot(qs, [100.0 * abs(r.ratio) for r in rows], marker="o", ms=3, color="C3")
    ax2.set_xlabel(r"$g/g_c$")
    ax2.set_ylabel(r"$|\Delta_{QC}/F_C|$ [%]")
    if title:
        ax1.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
