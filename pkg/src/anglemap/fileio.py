"""CSV, manifest, and SVG output used by the command-line surface.

CSV files are comma-separated with a header line, '.' decimal floats
formatted by shortest round-trip (repr), and an optional final `label`
column; reading back reproduces the numbers bit for bit.
"""

import csv
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .data import DataMatrix
from .errors import CsvFormatError
from .geometry import SphereEmbedding


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_cell(text: str, row: int, col: int, path) -> float:
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(
            f"{path}: row {row}, column {col}: {text!r} is not a number"
        ) from None


def write_data_csv(path, data: DataMatrix) -> None:
    with open(path, "w", newline="") as fh:
        header = [f"f{j}" for j in range(data.d)]
        if data.labels is not None:
            header.append("label")
        fh.write(",".join(header) + "\n")
        for i in range(data.n):
            cells = [_fmt(x) for x in data.values[i]]
            if data.labels is not None:
                cells.append(data.labels[i])
            fh.write(",".join(cells) + "\n")


def read_data_csv(path) -> DataMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file") from None
        has_label = bool(header) and header[-1].strip().lower() == "label"
        width = len(header) - (1 if has_label else 0)
        if width < 1:
            raise CsvFormatError(f"{path}: no feature columns in header")
        rows, labels = [], []
        for r, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise CsvFormatError(
                    f"{path}: row {r}: expected {len(header)} cells, got {len(cells)}"
                )
            rows.append([_parse_cell(c, r, j + 1, path) for j, c in enumerate(cells[:width])])
            if has_label:
                labels.append(cells[-1])
    return DataMatrix(np.array(rows, dtype=np.float64), labels if has_label else None)


def write_embedding_csv(path, e: SphereEmbedding) -> None:
    v = e.unit_vectors()
    with open(path, "w", newline="") as fh:
        fh.write("index,phi,theta,x,y,z\n")
        for i in range(e.n):
            fh.write(
                ",".join(
                    [str(i), _fmt(e.phi[i]), _fmt(e.theta[i])]
                    + [_fmt(c) for c in v[i]]
                )
                + "\n"
            )


def read_embedding_csv(path) -> SphereEmbedding:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:3] != ["index", "phi", "theta"]:
            raise CsvFormatError(f"{path}: expected an embedding CSV header")
        phi, theta = [], []
        for r, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) < 3:
                raise CsvFormatError(f"{path}: row {r}: too few cells")
            phi.append(_parse_cell(cells[1], r, 2, path))
            theta.append(_parse_cell(cells[2], r, 3, path))
    if not phi:
        raise CsvFormatError(f"{path}: no embedded points")
    return SphereEmbedding(np.array(phi), np.array(theta))


def write_loss_trace_csv(path, trace, learning_rates) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("iteration,loss,triples,dropped,learning_rate\n")
        for it, (value, lr) in enumerate(zip(trace, learning_rates)):
            fh.write(
                f"{it},{_fmt(value.value)},{value.triple_count},"
                f"{value.dropped},{_fmt(lr)}\n"
            )


def write_xy_csv(path, xy, labels=None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x,y\n" if labels is None else "x,y,label\n")
        for i, (x, y) in enumerate(np.asarray(xy)):
            row = f"{_fmt(x)},{_fmt(y)}"
            if labels is not None:
                row += f",{labels[i]}"
            fh.write(row + "\n")


@dataclass
class RunManifest:
    """Everything needed to replay a command run byte for byte."""

    command: str
    params: dict
    seed: int | None = None
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    version: str = __version__
    wall_time: float = 0.0
    deterministic: bool = True
    created: str = ""

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_manifest(path) -> RunManifest:
    with open(path) as fh:
        raw = json.load(fh)
    known = {f for f in RunManifest.__dataclass_fields__}
    return RunManifest(**{k: v for k, v in raw.items() if k in known})


def manifest_path(output_path) -> str:
    return str(output_path) + ".manifest.json"


def now_stamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


_PALETTE = (
    "#4477aa", "#ee6677", "#228833", "#ccbb44",
    "#66ccee", "#aa3377", "#bbbbbb", "#000000",
    "#e69f00", "#56b4e9",
)


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def write_scatter_svg(path, xy, labels=None, size: int = 640, margin: int = 40) -> None:
    """Static SVG scatter of 2D points, optionally colored by label."""
    xy = np.asarray(xy, dtype=np.float64)
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    inner = size - 2 * margin
    px = margin + inner * (xy[:, 0] - lo[0]) / span[0]
    py = margin + inner * (hi[1] - xy[:, 1]) / span[1]  # flip y for screen coords

    if labels is None:
        colors = ["#4477aa"] * xy.shape[0]
        legend = []
    else:
        uniq = sorted(set(labels))
        cmap = {lab: _PALETTE[i % len(_PALETTE)] for i, lab in enumerate(uniq)}
        colors = [cmap[lab] for lab in labels]
        legend = [(lab, cmap[lab]) for lab in uniq]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for x, y, c in zip(px, py, colors):
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="{c}" fill-opacity="0.8"/>')
    for i, (lab, c) in enumerate(legend):
        ly = margin + 16 * i
        parts.append(f'<circle cx="{size - margin}" cy="{ly}" r="4" fill="{c}"/>')
        parts.append(
            f'<text x="{size - margin + 8}" y="{ly + 4}" font-size="12" '
            f'font-family="sans-serif">{_xml_escape(lab)}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
