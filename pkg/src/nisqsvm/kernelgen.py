"""
Kernel matrices from oracle read-outs and the regularised matrix F.

The quantum path never does tomography: the normalised kernel is rebuilt
from measured probabilities by taking non-negative square roots as
amplitudes.  That is exact for the Ry-only encodings used here as long as the
encoded angles keep every amplitude non-negative, i.e. in ``[0, pi/2]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .qcore import Counts, StateVector

DEFAULT_GAMMA = 8.0
MAX_CONDITION = 1e12


class KernelError(ValueError):
    pass


def check_density_matrix(rho, atol: float = 1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise KernelError("density matrix must be square")
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise KernelError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise KernelError(f"density matrix trace {np.trace(rho).real:.12g} != 1")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise KernelError("density matrix has a negative eigenvalue")
    return rho


def _two_qubit_probs(source) -> np.ndarray:
    if isinstance(source, Counts):
        if source.shots == 0:
            raise KernelError("zero total counts")
        if source.num_bits != 2:
            raise KernelError("expected counts over 2 qubits")
        return np.array([source.get(b) for b in ("00", "01", "10", "11")], dtype=float) / source.shots
    if isinstance(source, StateVector):
        return source.probabilities()
    if isinstance(source, dict):
        total = sum(source.values())
        if total <= 0:
            raise KernelError("zero total counts")
        return np.array([source.get(b, 0) for b in ("00", "01", "10", "11")], dtype=float) / total
    p = np.asarray(source, dtype=float)
    if p.shape != (4,) or p.sum() <= 0:
        raise KernelError("expected 4 outcome probabilities")
    return p / p.sum()


def khat_from_counts(source) -> np.ndarray:
    """Normalised 2x2 kernel from the two-qubit training-oracle read-out.

    ``source`` is a :class:`Counts`, a ``{bitstring: count}`` dict, a
    state vector or four probabilities ordered 00, 01, 10, 11 (first bit =
    index qubit).  Amplitudes are the non-negative square roots
    ``a0..a3``; grouping by the data qubit gives
    ``psi_0 = (a0, a2) / sqrt(p0)`` and ``psi_1 = (a1, a3) / sqrt(p1)`` and
    ``rho = p0 |psi_0><psi_0| + p1 |psi_1><psi_1|``.
    """
    a = np.sqrt(_two_qubit_probs(source))
    rho = np.zeros((2, 2))
    for group in (a[[0, 2]], a[[1, 3]]):
        p = float(group @ group)
        if p == 0:
            continue
        psi = group / np.sqrt(p)
        rho += p * np.outer(psi, psi)
    return check_density_matrix(rho).real


def qubit_vectors_from_counts(counts: Counts, num_data: int | None = None) -> np.ndarray:
    """Per-qubit amplitude vectors ``(sqrt p0, sqrt p1)`` from product-state counts."""
    n = counts.num_bits if num_data is None else num_data
    out = np.empty((n, 2))
    for q in range(n):
        m = counts.marginal([q])
        p1 = m.get("1") / counts.shots
        out[q] = np.sqrt([1 - p1, p1])
    return out


def khat_from_product_states(vectors) -> np.ndarray:
    """Normalised M x M kernel from M two-component unit vectors.

    The vectors are stacked into ``|phi> = sum_i |i> (x) |x_i> / sqrt(M)``
    (a 2M-component vector) and the data qubit is traced out, so
    ``Khat[j, k] = x_j . x_k / M``.
    """
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2 or x.shape[0] == 0:
        raise KernelError("expected an (M, 2) array of vectors")
    if not np.allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-6):
        raise KernelError("input vectors must have unit norm")
    m = x.shape[0]
    phi = x.reshape(-1) / np.sqrt(m)
    rho = np.outer(phi, phi).reshape(m, 2, m, 2)
    return np.einsum("iaja->ij", rho)


def linear_kernel(vectors) -> np.ndarray:
    x = np.asarray(vectors, dtype=float)
    return x @ x.T


def round_half(a) -> np.ndarray:
    """Round to the nearest multiple of 0.5 (halves of 0.25 go up)."""
    return np.floor(np.asarray(a, dtype=float) * 2 + 0.5) / 2


@dataclass(frozen=True)
class FMatrix:
    """``F = K + I / gamma`` with the kernel it came from."""

    kernel: np.ndarray
    gamma: float

    @property
    def exact(self) -> np.ndarray:
        return self.kernel + np.eye(len(self.kernel)) / self.gamma

    @property
    def rounded(self) -> np.ndarray:
        return round_half(self.exact)

    @property
    def rounding_error(self) -> float:
        return float(np.max(np.abs(self.exact - self.rounded)))

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "kernel": self.kernel.tolist(),
            "exact": self.exact.tolist(),
            "rounded": self.rounded.tolist(),
            "eigenvalues_rounded": np.linalg.eigvalsh(self.rounded).tolist(),
        }


def build_f(khat, gamma: float = DEFAULT_GAMMA) -> FMatrix:
    """Recover ``K = M * Khat`` (unit data, so ``tr K = M``) and add ``I / gamma``.

    ``gamma = inf`` is allowed and gives ``F = K``.
    """
    if not gamma > 0:
        raise KernelError(f"gamma must be positive, got {gamma}")
    k = np.asarray(khat, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise KernelError("kernel must be square")
    if not np.allclose(k, k.T, atol=1e-9):
        raise KernelError("kernel must be symmetric")
    tr = np.trace(k)
    if tr <= 0:
        raise KernelError("kernel trace must be positive")
    m = len(k)
    return FMatrix(kernel=k * (m / tr), gamma=float(gamma))


def solve_ls_svm_classical(f, y=(1, -1)) -> np.ndarray:
    """``alpha = F^-1 y`` with the offset fixed to zero."""
    f = f.exact if isinstance(f, FMatrix) else np.asarray(f, dtype=float)
    y = np.asarray(y, dtype=float)
    if f.shape != (len(y), len(y)):
        raise KernelError(f"F shape {f.shape} does not match {len(y)} labels")
    if np.linalg.cond(f) > MAX_CONDITION:
        raise KernelError("F is singular (condition number above 1e12)")
    return np.linalg.solve(f, y)


def kernel_report(khat, f: FMatrix, y=(1, -1)) -> dict:
    return {
        "khat": np.asarray(khat).tolist(),
        "F": f.as_dict(),
        "alpha_exact": solve_ls_svm_classical(f.exact, y).tolist(),
        "alpha_rounded": solve_ls_svm_classical(f.rounded, y).tolist(),
    }


def dumps_report(report: dict) -> str:
    # repr-precision floats keep the round trip exact
    return json.dumps(report, indent=2)
