"""
Feature extraction, linear mapping, L2 normalisation and rotation angles.

Points are handled as numpy arrays of shape ``(2,)`` or ``(N, 2)``; every
function here is vectorised over the leading axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

# preprocessed training points that every dataset is mapped onto
CANONICAL_TARGETS = (0.987, 0.159, 0.345, 0.935)

# linear map for the HR/VR features of the OCR digits
OCR_MAP = (1.3, -0.62, 0.95, -0.42)


class PreprocessError(ValueError):
    pass


def _points(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1] != 2:
        raise PreprocessError(f"points must have 2 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreprocessError("points must be finite")
    return arr


# ---------------------------------------------------------------------------
# step i: HR / VR
# ---------------------------------------------------------------------------

def extract_hr_vr(image) -> np.ndarray:
    """(HR, VR) black-pixel ratios of a binary image.

    HR = left / right, VR = upper / lower.  For an odd width (height) the
    middle column (row) belongs to neither half.
    """
    pix = np.asarray(getattr(image, "array", image), dtype=bool)
    if pix.ndim != 2 or pix.size == 0:
        raise PreprocessError("image must be a non-empty 2-D array")
    h, w = pix.shape
    left = pix[:, : w // 2].sum()
    right = pix[:, (w + 1) // 2:].sum()
    upper = pix[: h // 2, :].sum()
    lower = pix[(h + 1) // 2:, :].sum()
    if right == 0:
        raise PreprocessError("right half has no black pixels (HR undefined)")
    if lower == 0:
        raise PreprocessError("lower half has no black pixels (VR undefined)")
    return np.array([left / right, upper / lower])


# ---------------------------------------------------------------------------
# step ii: linear mapping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MappingCoefficients:
    """``v1 = a t1 + b``, ``v2 = c t2 + d``."""

    a: float
    b: float
    c: float
    d: float

    def apply(self, points) -> np.ndarray:
        t = _points(points)
        return np.stack([t[..., 0] * self.a + self.b, t[..., 1] * self.c + self.d], axis=-1)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


OCR_COEFFICIENTS = MappingCoefficients(*OCR_MAP)


def ocr_linear_map(points) -> np.ndarray:
    return OCR_COEFFICIENTS.apply(points)


def _unit_targets(targets) -> tuple[np.ndarray, np.ndarray]:
    n = np.asarray(targets, dtype=float).reshape(2, 2)
    if np.any(n <= 0):
        raise PreprocessError("target training points must lie in the first quadrant")
    return n[0] / np.linalg.norm(n[0]), n[1] / np.linalg.norm(n[1])


def closed_form_ab(c: float, d: float, train1, train2, targets=CANONICAL_TARGETS) -> tuple[float, float]:
    """Closed-form ``a, b`` for a chosen ``c, d``.

    Forces ``v1 / v2`` of each mapped training point to equal ``n1 / n2``
    (resp. ``n3 / n4``); normalisation then lands on the targets provided the
    mapped second coordinates come out positive.
    """
    n1, n2, n3, n4 = (float(x) for x in targets)
    t1 = _points(train1)
    t2 = _points(train2)
    denom = n2 * n4 * (t1[0] - t2[0])
    if abs(denom) < 1e-15:
        raise PreprocessError("training points share their first coordinate; a, b undetermined")
    v12 = c * t1[1] + d
    v22 = c * t2[1] + d
    a = (n1 * n4 * v12 - n2 * n3 * v22) / denom
    b = (t1[0] * n2 * n3 * v22 - t2[0] * n1 * n4 * v12) / denom
    return float(a), float(b)


def _candidate_cd(train1, train2):
    # (1, 0) first, then sign flips and offsets on the scale of the data
    scale = max(abs(train1[1]), abs(train2[1]), 1.0)
    offsets = [0.0, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0]
    for c in (1.0, -1.0):
        for off in offsets:
            yield c, off * scale


def coefficient_residuals(coef: MappingCoefficients, train1, train2, targets=CANONICAL_TARGETS) -> np.ndarray:
    """Residuals of the four normalisation equations against the unit targets."""
    u1, u2 = _unit_targets(targets)
    x = normalize(coef.apply(np.stack([_points(train1), _points(train2)])))
    return np.concatenate([x[0] - u1, x[1] - u2])


def solve_mapping_coefficients(train1, train2, targets=CANONICAL_TARGETS,
                               candidates: Iterable[tuple[float, float]] | None = None,
                               tol: float = 1e-6) -> MappingCoefficients:
    """Find ``a, b, c, d`` mapping two training points onto the target points.

    The targets are first projected onto the unit circle.  For each ``(c, d)``
    candidate the closed-form ``a, b`` are computed; the first candidate whose
    mapped training points both sit in the first quadrant (positive branch)
    and reproduce the targets within ``tol`` is returned.
    """
    t1, t2 = _points(train1), _points(train2)
    if t1[0] == t2[0]:
        raise PreprocessError("degenerate training pair: equal first coordinates")
    u1, u2 = _unit_targets(targets)
    unit_targets = (*u1, *u2)
    tried = []
    for c, d in (candidates if candidates is not None else _candidate_cd(t1, t2)):
        a, b = closed_form_ab(c, d, t1, t2, unit_targets)
        coef = MappingCoefficients(a, b, float(c), float(d))
        v = coef.apply(np.stack([t1, t2]))
        tried.append((c, d))
        if np.any(v <= 0):
            continue
        if np.max(np.abs(coefficient_residuals(coef, t1, t2, targets))) <= tol:
            return coef
    raise PreprocessError(f"no positive solution among (c, d) candidates {tried}")


# ---------------------------------------------------------------------------
# step iii: L2 normalisation
# ---------------------------------------------------------------------------

def normalize(points) -> np.ndarray:
    v = _points(points)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm <= 1e-12):
        raise PreprocessError("cannot normalise a (near-)zero vector")
    return v / norm


# ---------------------------------------------------------------------------
# step iv: rotation angles
# ---------------------------------------------------------------------------

def _arccot(z):
    # range (0, pi)
    return np.pi / 2 - np.arctan(z)


def angle_of(points) -> np.ndarray | float:
    """Quadrant-dispatched rotation angle of unit points.

    1st and 4th quadrant: arctan(x2 / x1); 2nd: arccot(x1 / x2);
    3rd: arctan(x1 / x2).  Axis points: (1, 0) -> 0, (0, 1) -> pi/2,
    (-1, 0) -> pi, (0, -1) -> -pi/2.
    """
    x = _points(points)
    x1, x2 = x[..., 0], x[..., 1]
    if np.any((x1 == 0) & (x2 == 0)):
        raise PreprocessError("angle undefined at the origin")
    with np.errstate(divide="ignore", invalid="ignore"):
        q14 = np.arctan(x2 / x1)
        q2 = _arccot(x1 / x2)
        q3 = np.arctan(x1 / x2)
    theta = np.select(
        [(x1 > 0), (x2 > 0), (x1 < 0) & (x2 < 0), (x2 == 0), (x1 == 0)],
        [q14, q2, q3, np.pi, -np.pi / 2],
    )
    return float(theta) if theta.ndim == 0 else theta


def angle_of_prior_art(points) -> np.ndarray | float:
    """arccot(x1 / x2) with range (0, pi) regardless of quadrant."""
    x = _points(points)
    if np.any(x[..., 1] == 0):
        raise PreprocessError("arccot angle undefined for x2 = 0")
    theta = _arccot(x[..., 0] / x[..., 1])
    return float(theta) if np.ndim(theta) == 0 else theta


ANGLE_MODES = {"quadrant_aware": angle_of, "prior_art": angle_of_prior_art}


def angles(points, mode: str = "quadrant_aware"):
    try:
        fn = ANGLE_MODES[mode]
    except KeyError:
        raise PreprocessError(f"unknown angle mode {mode!r}") from None
    return fn(points)


def unit_from_angle(theta) -> np.ndarray:
    """State ``Ry(2 theta)|0> = (cos theta, sin theta)`` as a point."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
