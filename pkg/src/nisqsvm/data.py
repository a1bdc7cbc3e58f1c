"""
Dataset loading: Iris CSV, OCR bitmaps (ASCII PBM) and class-mean training points.

The Iris CSV and a synthetic OCR corpus ship with the package; pass an
explicit path to use other files, e.g. the original OCR digits.
"""

from __future__ import annotations

import csv
import json
import re
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import ocr_synth
from .preprocess import PreprocessError, extract_hr_vr

IRIS_COLUMNS = ("sepal.length", "sepal.width", "petal.length", "petal.width", "species")
IRIS_FEATURES = ("sepal.width", "petal.length")
IRIS_LABELS = {"setosa": 1, "versicolor": -1}
OCR_LABELS = {6: 1, 9: -1}
_OCR_NAME = re.compile(r"^(\d)_(\d+)\.pbm$")


class DataError(ValueError):
    pass


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryImage:
    width: int
    height: int
    pixels: tuple[bool, ...]  # row-major, True = black

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise DataError("image dimensions must be positive")
        if len(self.pixels) != self.width * self.height:
            raise DataError("pixel count does not match width * height")

    @classmethod
    def from_array(cls, arr) -> "BinaryImage":
        a = np.asarray(arr, dtype=bool)
        if a.ndim != 2:
            raise DataError("image array must be 2-D")
        return cls(a.shape[1], a.shape[0], tuple(bool(v) for v in a.ravel()))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.pixels, dtype=bool).reshape(self.height, self.width)


@dataclass(frozen=True)
class LabeledDataset:
    name: str
    points: np.ndarray                # (N, 2) raw features
    labels: np.ndarray                # (N,) of +1 / -1
    feature_names: tuple[str, str]
    ids: tuple[str, ...] = field(default=())

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        lab = np.asarray(self.labels, dtype=int)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) != len(lab):
            raise DataError("points must be (N, 2) with one label each")
        if not set(np.unique(lab)) <= {1, -1}:
            raise DataError("labels must be +1 or -1")
        for cls in (1, -1):
            if not np.any(lab == cls):
                raise DataError(f"class {cls:+d} has no points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)

    def __len__(self):
        return len(self.labels)

    def class_counts(self) -> dict[int, int]:
        return {1: int(np.sum(self.labels == 1)), -1: int(np.sum(self.labels == -1))}

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name,
            "feature_names": list(self.feature_names),
            "ids": list(self.ids),
            "points": self.points.tolist(),
            "labels": self.labels.tolist(),
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "LabeledDataset":
        d = json.loads(text)
        return cls(d["name"], np.array(d["points"]), np.array(d["labels"]),
                   tuple(d["feature_names"]), tuple(d.get("ids", ())))


def _packaged(name: str) -> Path:
    return Path(str(resources.files("nisqsvm") / "datasets" / name))


# ---------------------------------------------------------------------------
# Iris
# ---------------------------------------------------------------------------

def _species(raw: str) -> str:
    s = raw.strip().strip('"').strip().lower()
    return s[5:] if s.startswith("iris-") else s


def load_iris(path=None) -> LabeledDataset:
    """Setosa (+1) and versicolor (-1) as (sepal.width, petal.length) points."""
    path = Path(path) if path is not None else _packaged("iris.csv")
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    header = [h.strip() for h in (reader.fieldnames or [])]
    missing = [c for c in IRIS_COLUMNS if c not in header]
    if missing:
        raise DataError(f"{path.name}: missing columns {missing}")
    points, labels, ids = [], [], []
    for i, row in enumerate(reader):
        row = {k.strip(): v for k, v in row.items()}
        sp = _species(row["species"])
        if sp == "virginica":
            continue
        if sp not in IRIS_LABELS:
            raise DataError(f"{path.name} row {i + 1}: unknown species {row['species']!r}")
        try:
            points.append([float(row[f]) for f in IRIS_FEATURES])
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path.name} row {i + 1}: bad number") from exc
        labels.append(IRIS_LABELS[sp])
        ids.append(f"row{i + 1}")
    if not points:
        raise DataError(f"{path.name}: no setosa or versicolor rows")
    if len(points) != 100:
        warnings.warn(f"Iris file has {len(points)} two-class rows, expected 100", RuntimeWarning)
    return LabeledDataset("iris", np.array(points), np.array(labels), IRIS_FEATURES, tuple(ids))


# ---------------------------------------------------------------------------
# PBM bitmaps and the OCR digits
# ---------------------------------------------------------------------------

def parse_pbm(text: str) -> BinaryImage:
    tokens = []
    for line in text.splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P1":
        raise DataError("not an ASCII PBM (P1) file")
    try:
        w, h = int(tokens[1]), int(tokens[2])
    except (IndexError, ValueError) as exc:
        raise DataError("PBM header lacks width/height") from exc
    bits = "".join(tokens[3:])
    if len(bits) != w * h or set(bits) - {"0", "1"}:
        raise DataError("PBM raster does not match its header")
    return BinaryImage(w, h, tuple(b == "1" for b in bits))


def format_pbm(image: BinaryImage) -> str:
    rows = image.array.astype(int)
    body = "\n".join("".join(str(v) for v in r) for r in rows)
    return f"P1\n{image.width} {image.height}\n{body}\n"


def read_pbm(path) -> BinaryImage:
    try:
        return parse_pbm(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def write_pbm(path, image: BinaryImage) -> None:
    Path(path).write_text(format_pbm(image))


def _ocr_files(directory: Path) -> list[tuple[int, int, Path]]:
    found = []
    for p in directory.iterdir():
        m = _OCR_NAME.match(p.name)
        if m and int(m.group(1)) in OCR_LABELS:
            found.append((int(m.group(1)), int(m.group(2)), p))
    return sorted(found)


def load_ocr_images(directory=None) -> LabeledDataset:
    """(HR, VR) of every ``6_<i>.pbm`` (+1) and ``9_<i>.pbm`` (-1) in ``directory``.

    Images whose ratios are undefined (an empty half) are skipped with a warning.
    """
    directory = Path(directory) if directory is not None else _packaged("ocr")
    if not directory.is_dir():
        raise DataError(f"{directory} is not a directory")
    files = _ocr_files(directory)
    if not files:
        raise DataError(f"no 6_*.pbm or 9_*.pbm images in {directory}")
    points, labels, ids = [], [], []
    for digit, _, path in files:
        try:
            points.append(extract_hr_vr(read_pbm(path)))
        except PreprocessError as exc:
            warnings.warn(f"skipping {path.name}: {exc}", RuntimeWarning)
            continue
        labels.append(OCR_LABELS[digit])
        ids.append(path.name)
    if not points:
        raise DataError(f"no usable images in {directory}")
    return LabeledDataset("ocr", np.array(points), np.array(labels), ("HR", "VR"), tuple(ids))


def load_ocr_training_glyphs(directory=None) -> tuple[BinaryImage, BinaryImage]:
    """Printed "6" and "9" glyphs used as the two OCR training points."""
    directory = Path(directory) if directory is not None else _packaged("ocr_printed")
    return read_pbm(directory / "printed_6.pbm"), read_pbm(directory / "printed_9.pbm")


def ocr_training_points(directory=None) -> tuple[np.ndarray, np.ndarray]:
    six, nine = load_ocr_training_glyphs(directory)
    return extract_hr_vr(six), extract_hr_vr(nine)


def write_synthetic_ocr(directory, count: int = 100, seed: int = 0) -> None:
    """Write the synthetic corpus and the printed glyphs under ``directory``."""
    root = Path(directory)
    (root / "ocr").mkdir(parents=True, exist_ok=True)
    (root / "ocr_printed").mkdir(parents=True, exist_ok=True)
    for digit, i, pix in ocr_synth.synthetic_corpus(count, seed):
        write_pbm(root / "ocr" / f"{digit}_{i:03d}.pbm", BinaryImage.from_array(pix))
    write_pbm(root / "ocr_printed" / "printed_6.pbm",
              BinaryImage.from_array(ocr_synth.render_six(ocr_synth.PRINTED_SIX)))
    write_pbm(root / "ocr_printed" / "printed_9.pbm",
              BinaryImage.from_array(ocr_synth.render_nine(ocr_synth.PRINTED_NINE)))


# ---------------------------------------------------------------------------
# training points
# ---------------------------------------------------------------------------

def training_points_from_class_means(ds: LabeledDataset) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise class means, +1 class first."""
    out = []
    for cls in (1, -1):
        sel = ds.points[ds.labels == cls]
        if len(sel) == 0:
            raise DataError(f"class {cls:+d} is empty")
        out.append(sel.mean(axis=0))
    return out[0], out[1]
