"""Probability distributions over bitstrings, KL / JS divergences and accuracy."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .qcore import Counts, StateVector


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class ProbDist:
    support: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (len(self.support),):
            raise MetricsError("support and probabilities differ in length")
        if np.any(p < 0):
            raise MetricsError("negative probability")
        if abs(math.fsum(p) - 1.0) > 1e-9:
            raise MetricsError("probabilities do not sum to 1")
        object.__setattr__(self, "probs", p)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.support, self.probs.tolist()))


def full_support(num_bits: int) -> tuple[str, ...]:
    return tuple("".join(b) for b in itertools.product("01", repeat=num_bits))


def dist_from_counts(counts: Counts) -> ProbDist:
    support = full_support(counts.num_bits)
    raw = np.array([counts.get(b) for b in support], dtype=float)
    # counts are integers, so the float division sums to 1 up to rounding
    return ProbDist(support, raw / counts.shots)


def dist_from_state(state: StateVector) -> ProbDist:
    p = state.probabilities()
    return ProbDist(full_support(state.num_qubits), p / math.fsum(p))


def _pair(p1: ProbDist, p2: ProbDist) -> tuple[np.ndarray, np.ndarray]:
    if p1.support != p2.support:
        raise MetricsError("distributions have different supports")
    return p1.probs, p2.probs


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    if np.any(q[mask] == 0):
        return math.inf
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def kl_divergence(p1: ProbDist, p2: ProbDist) -> float:
    """``sum_i P1(i) log2(P1(i) / P2(i))``; ``inf`` when P2 misses mass of P1."""
    return _kl(*_pair(p1, p2))


def js_divergence(p1: ProbDist, p2: ProbDist) -> float:
    """Jensen-Shannon divergence in bits, so it lies in [0, 1]."""
    p, q = _pair(p1, p2)
    m = (p + q) / 2
    js = 0.5 * _kl(p, m) + 0.5 * _kl(q, m)
    return float(min(max(js, 0.0), 1.0))


def accuracy(predicted, truth) -> float:
    predicted, truth = np.asarray(predicted), np.asarray(truth)
    if predicted.shape != truth.shape:
        raise MetricsError("prediction and truth lengths differ")
    if predicted.size == 0:
        raise MetricsError("empty label list")
    return float(np.mean(predicted == truth))


def divergence_report(label: str, shots: int, noise: dict, ideal: ProbDist, noisy: ProbDist) -> dict:
    return {
        "circuit_label": label,
        "shots": shots,
        "noise_params": noise,
        "js": js_divergence(ideal, noisy),
        "kl_forward": kl_divergence(ideal, noisy),
        "kl_backward": kl_divergence(noisy, ideal),
    }
