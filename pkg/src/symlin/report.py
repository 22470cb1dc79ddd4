"""Rendering of analysis results: text, JSON, and interval bar plots."""

from __future__ import annotations

import json
from pathlib import Path

from .engine import Analysis, Verdict
from .interval import NEG_INF, POS_INF, Interval, format_bound, format_interval, is_finite, parse_bound
from .lang import format_expr
from .symconst import TOP


def bound_to_json(b) -> str:
    return format_bound(b, decimal=False)


def invariant_map(analysis: Analysis) -> dict:
    """Per-point invariants as plain data with exact string bounds."""
    p = analysis.program
    points = {}
    for node in p.points:
        st = analysis.states[node]
        reachable = not st.is_bottom
        intervals = {}
        symbolic = {}
        for v in p.variables:
            if reachable:
                i = st.num[v]
                intervals[v.name] = [bound_to_json(i.lo), bound_to_json(i.hi)]
            c = st.sym[v]
            symbolic[v.name] = None if (c is TOP or not reachable) else format_expr(c)
        points[node] = {"reachable": reachable, "intervals": intervals, "symbolic": symbolic}
    return {"points": points}


def to_json(analysis: Analysis, verdicts: list[Verdict]) -> str:
    data = invariant_map(analysis)
    data["assertions"] = [{"point": v.point, "status": v.status} for v in verdicts]
    return json.dumps(data, indent=2, ensure_ascii=False)


def intervals_from_json(text: str) -> dict[str, dict[str, Interval] | None]:
    """Inverse of :func:`to_json` for the numeric part; None marks unreachable."""
    data = json.loads(text)
    out: dict[str, dict[str, Interval] | None] = {}
    for node, entry in data["points"].items():
        if not entry["reachable"]:
            out[node] = None
            continue
        out[node] = {
            name: Interval(parse_bound(lo), parse_bound(hi)) for name, (lo, hi) in entry["intervals"].items()
        }
    return out


def to_text(analysis: Analysis, verdicts: list[Verdict], show_symbolic: bool = False) -> str:
    p = analysis.program
    lines = []
    for node in p.points:
        st = analysis.states[node]
        if st.is_bottom:
            lines.append(f"{node}: unreachable")
            continue
        for v in p.variables:
            lines.append(f"{node}: {v.name} in {format_interval(st.num[v])}")
        if show_symbolic:
            for v, e in st.sym.items():
                lines.append(f"{node}: {v.name} := {format_expr(e)}")
    for v in verdicts:
        where = f"line {v.line}" if v.line else v.point
        lines.append(f"assert {format_expr(v.test.lhs)} {v.test.cmp} 0 at {where}: {v.status}")
    return "\n".join(lines)


def _clip(b, lo: float, hi: float) -> float:
    if b == NEG_INF:
        return lo
    if b == POS_INF:
        return hi
    return float(b)


def plot_intervals(analysis: Analysis, path: str | Path) -> Path:
    """Draw one horizontal bar per (point, variable); infinite ends are clipped
    to the plot frame and drawn with an arrow."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    p = analysis.program
    rows = []
    finite = []
    for node in p.points:
        st = analysis.states[node]
        for v in p.variables:
            i = None if st.is_bottom else st.num[v]
            rows.append((f"{node}:{v.name}", i))
            if i is not None:
                finite += [float(b) for b in (i.lo, i.hi) if is_finite(b)]
    span_lo, span_hi = (min(finite), max(finite)) if finite else (-1.0, 1.0)
    pad = max(1.0, 0.1 * (span_hi - span_lo))
    frame = (span_lo - pad, span_hi + pad)

    fig, ax = plt.subplots(figsize=(7, 0.3 * len(rows) + 1.2))
    for y, (label, i) in enumerate(rows):
        if i is None:
            ax.text(frame[0], y, " unreachable", va="center", fontsize=8, color="grey")
            continue
        a, b = _clip(i.lo, *frame), _clip(i.hi, *frame)
        ax.plot([a, b], [y, y], lw=4, color="tab:blue", solid_capstyle="butt")
        if i.lo == NEG_INF:
            ax.plot(a, y, marker="<", color="tab:blue")
        if i.hi == POS_INF:
            ax.plot(b, y, marker=">", color="tab:blue")
        if i.is_singleton:
            ax.plot(a, y, marker="|", ms=10, color="tab:blue")
    ax.set_yticks(range(len(rows)), [r[0] for r in rows], fontsize=8)
    ax.invert_yaxis()
    ax.set_xlim(*frame)
    ax.set_xlabel("value")
    ax.grid(axis="x", alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out)
    plt.close(fig)
    return out
