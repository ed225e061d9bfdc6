"""Figures for CLI reports (rendered off-screen to files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fmt = str(path).rsplit(".", 1)[-1].lower()
    meta = {"Creator": None, "Producer": None, "CreationDate": None} if fmt == "pdf" else _META
    if fmt == "svg":
        meta = {"Date": None}
    fig.savefig(path, metadata=meta)
    plt.close(fig)


def plot_sphere_sizes(sizes, n: int, p: int, path, degree: int | None = None):
    """Sphere sizes around the standard vertex, log scale, against the tree
    prediction (q+1) q^(r-1) when n = 2."""
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    r = list(range(len(sizes)))
    ax.semilogy(r, sizes, "o-", color="k", label="BFS")
    if n == 2:
        pred = [1] + [(p + 1) * p ** (k - 1) for k in r[1:]]
        ax.semilogy(r, pred, "--", color="0.6", label="tree count")
    ax.set_xlabel("radius")
    ax.set_ylabel("vertices at radius")
    title = f"building of GL_{n} at p = {p}"
    if degree is not None:
        title += f" (degree {degree})"
    ax.set_title(title, fontsize=10)
    ax.set_xticks(r)
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)


def plot_normal_scan(report: dict, path):
    """Normal subgroups by index; flagged quotients in red."""
    entries = report["normal_subgroups"]
    idx = sorted({e["index"] for e in entries})
    ok = [sum(1 for e in entries if e["index"] == i and not e["flagged"]) for i in idx]
    bad = [sum(1 for e in entries if e["index"] == i and e["flagged"]) for i in idx]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.bar([str(i) for i in idx], ok, color="0.35", label="within predicted primes")
    if any(bad):
        ax.bar([str(i) for i in idx], bad, bottom=ok, color="tab:red", label="flagged")
    ax.set_xlabel("index")
    ax.set_ylabel("normal subgroups")
    S = ",".join(map(str, report["S"])) or "-"
    ax.set_title(f"{report['kind']} level, S = {{{S}}}", fontsize=10)
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)
