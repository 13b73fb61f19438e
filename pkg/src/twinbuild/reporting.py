"""Report assembly and artifact writers.

Machine-readable JSON reports are byte-stable for a fixed config and seed
(timings are opt-in, since they never replay identically).  The report
path also writes delimited CSV tables, DOT graphs for posets and trees,
and matplotlib figures rendered straight to files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from twinbuild import __version__
from twinbuild.buildings import CheckResult, Census, Stratification
from twinbuild.coxeter import CoxeterElement


def word_label(w: CoxeterElement) -> str:
    return repr(w)


def word_json(w: CoxeterElement) -> list[int]:
    return [s + 1 for s in w.word]  # 1-based on the wire


@dataclass
class Report:
    """Run report: config echo, per-check status with witnesses, certified
    regions; failures always carry the first violating tuple."""

    config: dict
    checks: list[CheckResult] = field(default_factory=list)
    seed: Optional[int] = None
    timings: Optional[dict[str, float]] = None

    def add(self, result: CheckResult) -> None:
        self.checks.append(result)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "tool": {"name": "twinbuild", "version": __version__},
            "config": self.config,
            "seed": self.seed,
            "checks": sorted(
                (c.as_dict() for c in self.checks), key=lambda d: d["name"]
            ),
            "summary": {
                "passed": sum(1 for c in self.checks if c.passed and not c.skipped),
                "failed": sum(1 for c in self.checks if not c.passed),
                "skipped": sum(1 for c in self.checks if c.skipped),
            },
            "timings_s": self.timings,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path: Path) -> None:
        path.write_text(self.to_json())


# ---------------------------------------------------------------------------
# delimited tables


def census_rows(census: Census) -> list[dict]:
    rows = []
    elements = sorted(
        set(census.cells) | set(census.cocells),
        key=lambda w: (w.length, w.word),
    )
    for w in elements:
        rows.append(
            {
                "element": word_label(w),
                "length": w.length,
                "cell_size": len(census.cells.get(w, ())),
                "cocell_size": len(census.cocells.get(w, ())),
                "dim": census.dim_of(w) if census.dims else "",
            }
        )
    return rows


def write_census_csv(census: Census, path: Path) -> None:
    rows = census_rows(census)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def strata_rows(strat: Stratification) -> list[dict]:
    return [
        {
            "element": word_label(w),
            "length": w.length,
            "stratum_size": len(strat.strata[w]),
        }
        for w in sorted(strat.strata, key=lambda w: (w.length, w.word))
    ]


def write_strata_csv(strat: Stratification, path: Path) -> None:
    rows = strata_rows(strat)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def write_dynkin_csv(trees, path: Path) -> None:
    from twinbuild.dynkin import code_hex

    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "vertices", "edges", "code"])
        for k, t in enumerate(trees):
            edges = " ".join(
                f"{e.u}-{e.v}:{e.label}" if e.label == 3
                else f"{e.u}>{e.v}:{e.label}"
                for e in t.edges
            )
            writer.writerow([k, len(t.vertices), edges, code_hex(t)])


# ---------------------------------------------------------------------------
# DOT


def strata_dot(strat: Stratification) -> str:
    lines = ["digraph strata {", "  rankdir=BT;"]
    for w in sorted(strat.strata, key=lambda w: (w.length, w.word)):
        size = len(strat.strata[w])
        lines.append(
            f'  "{word_label(w)}" [label="{word_label(w)}\\n{size}"];'
        )
    for a, b in strat.edges:
        lines.append(f'  "{word_label(a)}" -> "{word_label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dynkin_dot(trees) -> str:
    lines = ["graph dynkin {"]
    for k, t in enumerate(trees):
        for v in t.vertices:
            lines.append(f'  "t{k}v{v}" [label="{v}", shape=circle];')
        for e in t.edges:
            style = f'label="{e.label}"'
            if e.label != 3:
                style += ", dir=forward"
            lines.append(f'  "t{k}v{e.u}" -- "t{k}v{e.v}" [{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# figures


def _matplotlib():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def census_figure(census: Census, path: Path, title: str = "") -> None:
    """Bar chart of cell and co-cell sizes per Weyl element, grouped by
    length."""
    plt = _matplotlib()
    rows = census_rows(census)
    labels = [r["element"] for r in rows]
    cells = [r["cell_size"] for r in rows]
    cocells = [r["cocell_size"] for r in rows]
    x = range(len(rows))
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(rows)), 3.6))
    ax.bar([i - 0.2 for i in x], cells, width=0.4, label="cell")
    ax.bar([i + 0.2 for i in x], cocells, width=0.4, label="co-cell")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("chambers")
    ax.set_title(title or "Schubert census")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def strata_figure(strat: Stratification, path: Path, title: str = "") -> None:
    """Layered drawing of the reachability order: one row per length,
    arrows for single-panel steps."""
    plt = _matplotlib()
    by_length: dict[int, list] = {}
    for w in sorted(strat.strata, key=lambda w: (w.length, w.word)):
        by_length.setdefault(w.length, []).append(w)
    pos = {}
    for length, elems in by_length.items():
        for i, w in enumerate(elems):
            pos[w] = (i - (len(elems) - 1) / 2.0, length)
    fig, ax = plt.subplots(figsize=(5.0, 1.0 + 1.1 * len(by_length)))
    for a, b in strat.edges:
        xa, ya = pos[a]
        xb, yb = pos[b]
        ax.annotate(
            "", xy=(xb, yb - 0.08), xytext=(xa, ya + 0.08),
            arrowprops=dict(arrowstyle="->", color="0.55", lw=0.9),
        )
    for w, (x, y) in pos.items():
        ax.plot([x], [y], "o", ms=16, color="#4878cf")
        ax.annotate(
            f"{word_label(w)}\n{len(strat.strata[w])}", (x, y),
            ha="center", va="center", fontsize=7, color="white",
        )
    ax.set_ylabel("codistance length")
    ax.set_xticks([])
    ax.set_title(title or "codistance strata")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def dynkin_figure(trees, path: Path, title: str = "") -> None:
    """Summary chart: number of isomorphism classes per label multiset."""
    plt = _matplotlib()
    from collections import Counter

    counts = Counter(
        ",".join(str(lab) for lab in sorted(e.label for e in t.edges))
        for t in trees
    )
    keys = sorted(counts)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(keys)), 3.2))
    ax.bar(range(len(keys)), [counts[k] for k in keys], color="#4878cf")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("classes")
    ax.set_title(title or "Dynkin tree classes by edge labels")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
