"""Layout metrics and design comparison tables.

The figure of merit is cost = cell_count * area_um2 * latency_clocks,
the exact product with no hidden weighting.  Latency counts clock
phases along the longest input-to-output signal path: each maximal run
of a single clock zone is one phase (re-entering a zone later on the
path counts again), and four phases make one clock.  A straight wire
zoned 0,1,2,3,0 therefore has 5 phases and latency 1.25 clocks.

Comparison manifests are CSV files with columns
name,cell_count,area_um2,latency_clocks,source where source is either
'literal' (the row's numbers stand as given and are never re-simulated)
or 'layout:<path>' (metrics are computed from the referenced qcal file,
path relative to the manifest).  Lines starting with '#' are notes;
they are echoed into the comparison report, and notes of the form
'claim: NAME has P% fewer cells than NAME' are recomputed from the rows
so a published claim and its arithmetic can be checked side by side.
"""

from __future__ import annotations

import io
import csv
import math
import os
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .geometry import Layout, QcaError, bounding_box_area_um2
from .qcal import load_qcal

ADJACENCY_TOLERANCE_NM = 0.5

_CLAIM_RE = re.compile(
    r"^claim:\s*(\S+)\s+has\s+([0-9.]+)%\s+fewer\s+cells\s+than\s+(\S+)\s*$")


class MetricsError(QcaError):
    pass


def round_sig(value: float, digits: int = 4) -> float:
    if value == 0.0:
        return 0.0
    return round(value, -int(math.floor(math.log10(abs(value)))) + digits - 1)


def adjacency_lists(layout: Layout) -> List[List[int]]:
    """Neighbours within pitch*sqrt(2) plus tolerance, centre to centre."""
    limit = layout.geometry.pitch_nm * math.sqrt(2.0) + ADJACENCY_TOLERANCE_NM
    limit2 = limit * limit
    n = len(layout.cells)
    adj: List[List[int]] = [[] for _ in range(n)]
    for i in range(n):
        ci = layout.cells[i]
        for j in range(i + 1, n):
            cj = layout.cells[j]
            d2 = (ci.x_nm - cj.x_nm) ** 2 + (ci.y_nm - cj.y_nm) ** 2
            if d2 <= limit2:
                adj[i].append(j)
                adj[j].append(i)
    return adj


def _assert_connected(layout: Layout, adj: List[List[int]]) -> None:
    n = len(layout.cells)
    if n == 0:
        raise MetricsError("empty layout")
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != n:
        raise MetricsError(
            f"disconnected layout: only {len(seen)} of {n} cells share a component")


def latency_clocks(layout: Layout) -> float:
    """Longest input-to-output path in clock phases, divided by 4."""
    if not layout.input_indices():
        raise MetricsError("layout has no input cell")
    if not layout.output_indices():
        raise MetricsError("layout has no output cell")
    adj = adjacency_lists(layout)
    _assert_connected(layout, adj)
    outputs = set(layout.output_indices())
    zones = [c.clock_zone for c in layout.cells]
    best = 0

    def dfs(i: int, visited: set, runs: int, last_zone: Optional[int]) -> None:
        nonlocal best
        z = zones[i]
        r = runs + (1 if z != last_zone else 0)
        if i in outputs and r > best:
            best = r
        for j in adj[i]:
            if j not in visited:
                visited.add(j)
                dfs(j, visited, r, z)
                visited.remove(j)

    for i0 in layout.input_indices():
        dfs(i0, {i0}, 0, None)
    if best == 0:
        raise MetricsError("no input reaches an output")
    return best / 4.0


def cost(cell_count: int, area_um2: float, latency: float) -> float:
    """cell_count * area_um2 * latency_clocks; inputs must be positive."""
    if cell_count <= 0:
        raise MetricsError(f"cell count must be positive, got {cell_count}")
    if area_um2 <= 0:
        raise MetricsError(f"area must be positive, got {area_um2}")
    if latency <= 0:
        raise MetricsError(f"latency must be positive, got {latency}")
    return cell_count * area_um2 * latency


@dataclass
class DesignMetrics:
    name: str
    cell_count: int
    area_um2: float
    latency_clocks: float
    cost_score: float


def metrics_for(layout: Layout, name: Optional[str] = None) -> DesignMetrics:
    """Cell count (drivers included), bbox area to 4 significant digits,
    path latency, and their cost product."""
    cells = len(layout.cells)
    area = round_sig(bounding_box_area_um2(layout), 4)
    latency = latency_clocks(layout)
    return DesignMetrics(
        name=name if name is not None else layout.name,
        cell_count=cells,
        area_um2=area,
        latency_clocks=latency,
        cost_score=cost(cells, area, latency),
    )


@dataclass
class ManifestRow:
    name: str
    cell_count: Optional[int]
    area_um2: Optional[float]
    latency_clocks: Optional[float]
    source: str


@dataclass
class Manifest:
    rows: List[ManifestRow]
    notes: List[str]
    base_dir: str


def read_manifest(path: str) -> Manifest:
    notes: List[str] = []
    data_lines: List[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            stripped = raw.strip()
            if stripped.startswith("#"):
                notes.append(stripped[1:].strip())
            elif stripped:
                data_lines.append(raw)
    reader = csv.DictReader(io.StringIO("".join(data_lines)))
    expected = ["name", "cell_count", "area_um2", "latency_clocks", "source"]
    if reader.fieldnames != expected:
        raise MetricsError(
            f"manifest {path} must have columns {','.join(expected)}, "
            f"got {','.join(reader.fieldnames or [])}")
    rows: List[ManifestRow] = []
    for record in reader:
        name = record["name"].strip()
        source = record["source"].strip()
        if not name:
            raise MetricsError(f"manifest {path} has a row with no name")
        if source != "literal" and not source.startswith("layout:"):
            raise MetricsError(f"row {name!r}: source must be 'literal' or 'layout:<path>'")

        def num(field: str, cast):
            text = record[field].strip()
            if not text:
                return None
            try:
                return cast(text)
            except ValueError:
                raise MetricsError(f"row {name!r}: bad {field} value {text!r}") from None

        row = ManifestRow(
            name=name,
            cell_count=num("cell_count", int),
            area_um2=num("area_um2", float),
            latency_clocks=num("latency_clocks", float),
            source=source,
        )
        if row.source == "literal" and None in (row.cell_count, row.area_um2,
                                                row.latency_clocks):
            raise MetricsError(f"literal row {name!r} is missing numeric fields")
        rows.append(row)
    return Manifest(rows=rows, notes=notes, base_dir=os.path.dirname(os.path.abspath(path)))


@dataclass
class ComparisonRow:
    name: str
    cell_count: int
    area_um2: float
    latency_clocks: float
    cost_score: float
    rank: int = 0
    lowest_cost: bool = False
    fewest_cells: bool = False


@dataclass
class ComparisonReport:
    rows: List[ComparisonRow]
    footnotes: List[str]


def _resolve_row(row: ManifestRow, base_dir: str) -> ComparisonRow:
    if row.source == "literal":
        return ComparisonRow(
            name=row.name,
            cell_count=row.cell_count,
            area_um2=row.area_um2,
            latency_clocks=row.latency_clocks,
            cost_score=cost(row.cell_count, row.area_um2, row.latency_clocks),
        )
    rel = row.source[len("layout:"):]
    layout = load_qcal(os.path.join(base_dir, rel)).layout
    m = metrics_for(layout, name=row.name)
    return ComparisonRow(
        name=row.name,
        cell_count=m.cell_count,
        area_um2=m.area_um2,
        latency_clocks=m.latency_clocks,
        cost_score=m.cost_score,
    )


def compare(manifest: Manifest) -> ComparisonReport:
    """Rank all rows by ascending cost and flag the cheapest and smallest.

    Manifest notes are carried into the footnotes; 'claim:' notes are
    recomputed from the resolved rows and any disagreement between the
    published percentage and the arithmetic is stated next to it.
    """
    resolved = [_resolve_row(r, manifest.base_dir) for r in manifest.rows]
    order = sorted(range(len(resolved)), key=lambda i: (resolved[i].cost_score, i))
    rows = [resolved[i] for i in order]
    for rank, row in enumerate(rows, start=1):
        row.rank = rank
    if rows:
        min_cost = min(r.cost_score for r in rows)
        min_cells = min(r.cell_count for r in rows)
        for row in rows:
            row.lowest_cost = row.cost_score == min_cost
            row.fewest_cells = row.cell_count == min_cells

    by_name = {r.name: r for r in rows}
    footnotes: List[str] = []
    for note in manifest.notes:
        footnotes.append(note)
        m = _CLAIM_RE.match(note)
        if not m:
            continue
        target, pct_text, baseline = m.group(1), m.group(2), m.group(3)
        if target not in by_name or baseline not in by_name:
            footnotes.append(f"claim check: row {target!r} or {baseline!r} not in table")
            continue
        tc = by_name[target].cell_count
        bc = by_name[baseline].cell_count
        actual = (bc - tc) / bc * 100.0
        claimed = float(pct_text)
        verdict = "matches" if abs(actual - claimed) < 0.05 else "disagrees with"
        footnotes.append(
            f"claim check: {target} vs {baseline} is {tc} vs {bc} cells, "
            f"{actual:.1f}% fewer; the published {claimed:g}% {verdict} this arithmetic")
    return ComparisonReport(rows=rows, footnotes=footnotes)


def comparison_to_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "cell_count", "area_um2", "latency_clocks",
                     "cost", "rank", "lowest_cost", "fewest_cells"])
    for row in report.rows:
        writer.writerow([row.name, row.cell_count, f"{row.area_um2:g}",
                         f"{row.latency_clocks:g}", f"{row.cost_score:g}",
                         row.rank, str(int(row.lowest_cost)), str(int(row.fewest_cells))])
    for note in report.footnotes:
        buf.write(f"# {note}\n")
    return buf.getvalue()
