"""
Hyperplane read-out from circuit outputs and classification of test angles.

The sign convention throughout is that training point 1 carries label +1
and training point 2 carries label -1, so the second coefficient is read out
as a negative number.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .qcore import Counts, StateVector

DEGENERATE_ATOL = 1e-9

# grouped by the third qubit (index 2, the measured solution qubit)
_BASELINE_GROUPS = {
    0: ("0000", "0001", "0100", "0101", "1000", "1001", "1100", "1101"),
    1: ("0010", "0011", "0110", "0111", "1010", "1011", "1110", "1111"),
}


class DegenerateReadout(ArithmeticError):
    pass


@dataclass(frozen=True)
class SvmModel:
    alpha1: float
    alpha2: float
    train_angles: tuple[float, float]
    gamma: float = 8.0
    b: float = 0.0

    def __post_init__(self):
        if self.b != 0:
            raise ValueError("only the non-offset model (b = 0) is supported")
        if self.alpha1 == 0 and self.alpha2 == 0:
            raise ValueError("alpha must not be the zero vector")

    @property
    def alpha(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2])

    def scaled(self, factor: float) -> "SvmModel":
        return SvmModel(self.alpha1 * factor, self.alpha2 * factor, self.train_angles, self.gamma)


def _check_alpha(a1: float, a2: float) -> tuple[float, float]:
    if abs(a1) < DEGENERATE_ATOL and abs(a2) < DEGENERATE_ATOL:
        raise DegenerateReadout("both read-out coefficients vanish")
    if abs(a1) < DEGENERATE_ATOL or abs(a2) < DEGENERATE_ATOL:
        warnings.warn("one read-out coefficient vanishes; the boundary passes through a training point",
                      RuntimeWarning, stacklevel=3)
    return float(a1), float(a2)


def readout_hhl(result) -> tuple[float, float]:
    """``alpha1 = |a(0001)|``, ``alpha2 = -|a(0011)|`` from the optimised HHL output.

    ``result`` is the exact :class:`StateVector` or measured :class:`Counts`;
    for counts the magnitudes are ``sqrt(count / shots)``.
    """
    if isinstance(result, StateVector):
        a1, a3 = abs(result.amplitude("0001")), abs(result.amplitude("0011"))
    elif isinstance(result, Counts):
        a1 = np.sqrt(result.get("0001") / result.shots)
        a3 = np.sqrt(result.get("0011") / result.shots)
    else:
        raise TypeError("expected a StateVector or Counts")
    return _check_alpha(a1, -a3)


def readout_baseline(result) -> tuple[float, float]:
    """Sums of the amplitudes whose third qubit is 0, resp. 1.

    For a state the (real) amplitudes are summed as they are.  For counts the
    square roots of the frequencies are summed and the second group receives
    the same negative sign convention as :func:`readout_hhl`.
    """
    if isinstance(result, StateVector):
        amps = {b: result.amplitude(b).real for b in result.bitstrings()}
        a1 = sum(amps[b] for b in _BASELINE_GROUPS[0])
        a2 = sum(amps[b] for b in _BASELINE_GROUPS[1])
    elif isinstance(result, Counts):
        a1 = sum(np.sqrt(result.get(b) / result.shots) for b in _BASELINE_GROUPS[0])
        a2 = -sum(np.sqrt(result.get(b) / result.shots) for b in _BASELINE_GROUPS[1])
    else:
        raise TypeError("expected a StateVector or Counts")
    return _check_alpha(a1, a2)


def decision_values(model: SvmModel, test_angles) -> np.ndarray:
    th = np.asarray(test_angles, dtype=float)
    t1, t2 = model.train_angles
    return model.alpha1 * np.cos(t1 - th) + model.alpha2 * np.cos(t2 - th) + model.b


def classify_point(model: SvmModel, test_angle):
    """Label +1 / -1 of one or many test angles; a zero score counts as +1."""
    labels = np.where(decision_values(model, test_angle) >= 0, 1, -1)
    return int(labels) if labels.ndim == 0 else labels


def decision_boundary(model: SvmModel) -> tuple[np.ndarray, np.ndarray]:
    """Unit normal ``w`` and unit direction of the line ``w . x = 0``."""
    t = np.asarray(model.train_angles)
    x = np.stack([np.cos(t), np.sin(t)], axis=1)
    w = model.alpha @ x
    norm = np.linalg.norm(w)
    if norm < DEGENERATE_ATOL:
        raise DegenerateReadout("hyperplane normal vanishes")
    w = w / norm
    return w, np.array([-w[1], w[0]])


def confusion(pred, truth) -> dict:
    pred, truth = np.asarray(pred), np.asarray(truth)
    return {
        "tp": int(np.sum((pred == 1) & (truth == 1))),
        "tn": int(np.sum((pred == -1) & (truth == -1))),
        "fp": int(np.sum((pred == 1) & (truth == -1))),
        "fn": int(np.sum((pred == -1) & (truth == 1))),
    }


def report_csv(points, truth, pred) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "true_label", "predicted_label"])
    for p, t, q in zip(np.asarray(points), truth, pred):
        w.writerow([repr(float(p[0])), repr(float(p[1])), int(t), int(q)])
    return buf.getvalue()


def report_summary(model: SvmModel, truth, pred) -> dict:
    pred, truth = np.asarray(pred), np.asarray(truth)
    normal, _ = decision_boundary(model)
    return {
        "accuracy": float(np.mean(pred == truth)),
        "confusion": confusion(pred, truth),
        "alpha": [model.alpha1, model.alpha2],
        "boundary_normal": normal.tolist(),
    }
