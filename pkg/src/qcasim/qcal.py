"""Reader and writer for the qcal layout file format.

A qcal file is line oriented:

    qcal 1
    # free-form comment lines are preserved
    name three input xor
    geom cell=18 pitch=20 A=2.304e-28
    cell x=0 y=0 zone=0 kind=input label=A
    cell x=20 y=20 zone=1 kind=output label=XOR
    cell x=40 y=0 zone=0 kind=fixed polarization=-1
    cell x=60 y=0 zone=0 kind=normal orient=rot45

The version line comes first; name is required.  The geom line is
optional and defaults to the standard 18/20 geometry.  Cell lines take
key=value tokens: x, y, zone, kind are required; label, polarization
(+1 or -1 only) and orient (norm or rot45) are optional.  A line whose
first non-blank character is '#' is a comment.  Unknown directives and
unknown keys are rejected with the offending line number; semantic
checks beyond that (overlaps, missing roles) belong to validate().

Serialisation is canonical: version, comments, name, geom, then cells
sorted by (y, x) with a fixed key order, so serialising twice yields
identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .geometry import (
    Cell,
    GeometryConfig,
    Layout,
    ORIENT_NORMAL,
    ORIENT_ROTATED,
    QcaError,
    ROLES,
)

QCAL_VERSION = 1

_ORIENT_TO_TOKEN = {ORIENT_NORMAL: "norm", ORIENT_ROTATED: "rot45"}
_TOKEN_TO_ORIENT = {v: k for k, v in _ORIENT_TO_TOKEN.items()}

_CELL_KEYS = ("x", "y", "zone", "kind", "label", "polarization", "orient")
_GEOM_KEYS = ("cell", "pitch", "A")


class QcalError(QcaError):
    """Parse or serialisation failure; carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class LayoutDocument:
    layout: Layout
    version: int = QCAL_VERSION
    comments: List[str] = field(default_factory=list)


def _split_kv(token: str, lineno: int) -> Tuple[str, str]:
    if "=" not in token:
        raise QcalError(f"expected key=value, got {token!r}", lineno)
    key, value = token.split("=", 1)
    if not key or not value:
        raise QcalError(f"expected key=value, got {token!r}", lineno)
    return key, value


def _parse_float(value: str, key: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise QcalError(f"{key} must be a number, got {value!r}", lineno) from None


def _parse_cell_line(tokens: List[str], lineno: int,
                     labels_seen: Dict[str, int]) -> Cell:
    kv: Dict[str, str] = {}
    for token in tokens:
        key, value = _split_kv(token, lineno)
        if key not in _CELL_KEYS:
            raise QcalError(f"unknown cell key {key!r}", lineno)
        if key in kv:
            raise QcalError(f"duplicate cell key {key!r}", lineno)
        kv[key] = value
    for req in ("x", "y", "zone", "kind"):
        if req not in kv:
            raise QcalError(f"cell line is missing {req}=", lineno)

    x = _parse_float(kv["x"], "x", lineno)
    y = _parse_float(kv["y"], "y", lineno)
    try:
        zone = int(kv["zone"])
    except ValueError:
        raise QcalError(f"zone must be an integer, got {kv['zone']!r}", lineno) from None
    kind = kv["kind"]
    if kind not in ROLES:
        raise QcalError(f"unknown kind {kind!r}", lineno)

    label = kv.get("label")
    if label is not None:
        if label in labels_seen:
            raise QcalError(
                f"duplicate label {label!r} (first used on line {labels_seen[label]})",
                lineno)
        labels_seen[label] = lineno

    polarization: Optional[float] = None
    if "polarization" in kv:
        p = _parse_float(kv["polarization"], "polarization", lineno)
        if p not in (1.0, -1.0):
            raise QcalError(f"polarization must be +1 or -1, got {kv['polarization']!r}",
                            lineno)
        polarization = p

    orient = ORIENT_NORMAL
    if "orient" in kv:
        if kv["orient"] not in _TOKEN_TO_ORIENT:
            raise QcalError(f"unknown orient {kv['orient']!r}", lineno)
        orient = _TOKEN_TO_ORIENT[kv["orient"]]

    try:
        return Cell(x, y, zone, kind, label, polarization, orient)
    except QcaError as exc:
        raise QcalError(str(exc), lineno) from None


def parse_qcal(text: str) -> LayoutDocument:
    version: Optional[int] = None
    name: Optional[str] = None
    geom_kv: Dict[str, float] = {}
    geom_line: Optional[int] = None
    comments: List[str] = []
    cells: List[Cell] = []
    labels_seen: Dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        tokens = line.split()
        head = tokens[0]
        if version is None:
            if head != "qcal" or len(tokens) != 2:
                raise QcalError("file must start with a version line 'qcal 1'", lineno)
            try:
                version = int(tokens[1])
            except ValueError:
                raise QcalError(f"bad version {tokens[1]!r}", lineno) from None
            if version != QCAL_VERSION:
                raise QcalError(f"unsupported qcal version {version}", lineno)
            continue
        if head == "qcal":
            raise QcalError("duplicate version line", lineno)
        if head == "name":
            if name is not None:
                raise QcalError("duplicate name line", lineno)
            name = line[len("name"):].strip()
            if not name:
                raise QcalError("name line needs a value", lineno)
        elif head == "geom":
            if geom_line is not None:
                raise QcalError("duplicate geom line", lineno)
            geom_line = lineno
            for token in tokens[1:]:
                key, value = _split_kv(token, lineno)
                if key not in _GEOM_KEYS:
                    raise QcalError(f"unknown geom key {key!r}", lineno)
                if key in geom_kv:
                    raise QcalError(f"duplicate geom key {key!r}", lineno)
                geom_kv[key] = _parse_float(value, key, lineno)
        elif head == "cell":
            cells.append(_parse_cell_line(tokens[1:], lineno, labels_seen))
        else:
            raise QcalError(f"unknown directive {head!r}", lineno)

    if version is None:
        raise QcalError("empty file: missing version line", 1)
    if name is None:
        raise QcalError("missing name line", 1)

    defaults = GeometryConfig()
    try:
        geometry = GeometryConfig(
            cell_width_nm=geom_kv.get("cell", defaults.cell_width_nm),
            pitch_nm=geom_kv.get("pitch", defaults.pitch_nm),
            coupling_jm=geom_kv.get("A", defaults.coupling_jm),
        )
    except QcaError as exc:
        raise QcalError(str(exc), geom_line) from None

    layout = Layout(cells=cells, geometry=geometry, name=name)
    return LayoutDocument(layout=layout, version=version, comments=comments)


def _fmt_num(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _check_token_safe(value: str, what: str) -> None:
    if not value or any(ch.isspace() for ch in value) or "#" in value or "=" in value:
        raise QcalError(f"{what} {value!r} cannot be serialised as a token")


def serialize_qcal(document: LayoutDocument) -> str:
    """Canonical text form; serialising the parse of this output is a no-op."""
    layout = document.layout
    if "\n" in layout.name or not layout.name.strip():
        raise QcalError(f"layout name {layout.name!r} cannot be serialised")
    lines = [f"qcal {document.version}"]
    for comment in document.comments:
        lines.append(f"# {comment}" if comment else "#")
    lines.append(f"name {layout.name}")
    g = layout.geometry
    lines.append(f"geom cell={_fmt_num(g.cell_width_nm)} pitch={_fmt_num(g.pitch_nm)} "
                 f"A={_fmt_num(g.coupling_jm)}")
    for cell in sorted(layout.cells, key=lambda c: (c.y_nm, c.x_nm)):
        parts = [f"cell x={_fmt_num(cell.x_nm)}", f"y={_fmt_num(cell.y_nm)}",
                 f"zone={cell.clock_zone}", f"kind={cell.role}"]
        if cell.label is not None:
            _check_token_safe(cell.label, "label")
            parts.append(f"label={cell.label}")
        if cell.polarization is not None:
            parts.append(f"polarization={int(cell.polarization):+d}")
        if cell.orientation != ORIENT_NORMAL:
            parts.append(f"orient={_ORIENT_TO_TOKEN[cell.orientation]}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_qcal(path: str) -> LayoutDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_qcal(fh.read())


def save_qcal(document: LayoutDocument, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_qcal(document))
