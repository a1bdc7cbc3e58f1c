"""
Dense statevector simulation for small circuits.

Qubit 0 is the most significant bit of the basis-state index, so for four
qubits the amplitude ``a[5]`` belongs to ``|0101>`` read as ``|q1 q2 q3 q4>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 12
UNITARY_ATOL = 1e-10
NORM_ATOL = 1e-10

_SQ2 = 1 / np.sqrt(2)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class GateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# gate library
# ---------------------------------------------------------------------------

def _ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _h_theta(theta):
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def _controlled(u, control_state=1):
    """Embed ``u`` as a gate whose first qubit is a control."""
    d = u.shape[0]
    out = np.eye(2 * d, dtype=complex)
    lo = control_state * d
    out[lo:lo + d, lo:lo + d] = u
    return out


# tag -> (arity, number of params, builder)
_GATES = {
    "i": (1, 0, lambda: np.eye(2, dtype=complex)),
    "h": (1, 0, lambda: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)),
    "x": (1, 0, lambda: PAULI["X"].copy()),
    "y": (1, 0, lambda: PAULI["Y"].copy()),
    "z": (1, 0, lambda: PAULI["Z"].copy()),
    "s": (1, 0, lambda: np.diag([1, 1j]).astype(complex)),
    "sdg": (1, 0, lambda: np.diag([1, -1j]).astype(complex)),
    "p": (1, 1, lambda t: np.diag([1, np.exp(1j * t)]).astype(complex)),
    "ry": (1, 1, _ry),
    "htheta": (1, 1, _h_theta),
    "cnot": (2, 0, lambda: _controlled(PAULI["X"])),
    "cx0": (2, 0, lambda: _controlled(PAULI["X"], control_state=0)),
    "cz": (2, 0, lambda: _controlled(PAULI["Z"])),
    "cp": (2, 1, lambda t: _controlled(np.diag([1, np.exp(1j * t)]))),
    "swap": (2, 0, lambda: np.eye(4, dtype=complex)[[0, 2, 1, 3]]),
    "cry": (2, 1, lambda t: _controlled(_ry(t))),
    "chtheta": (2, 1, lambda t: _controlled(_h_theta(t))),
    "ccry": (3, 1, lambda t: _controlled(_controlled(_ry(t)))),
}

GATE_TAGS = tuple(sorted(_GATES))


def gate_arity(tag: str) -> int:
    try:
        return _GATES[tag][0]
    except KeyError:
        raise GateError(f"unknown gate tag {tag!r}") from None


def gate_num_params(tag: str) -> int:
    try:
        return _GATES[tag][1]
    except KeyError:
        raise GateError(f"unknown gate tag {tag!r}") from None


def gate_matrix(tag: str, params: Sequence[float] = ()) -> np.ndarray:
    """Exact unitary for a named gate.

    ``htheta`` is ``[[cos 2t, sin 2t], [sin 2t, -cos 2t]]``; ``cx0`` flips its
    target when the control is ``|0>``.  Multi-qubit gates list the control
    qubit(s) first.
    """
    try:
        arity, nparams, build = _GATES[tag]
    except KeyError:
        raise GateError(f"unknown gate tag {tag!r}") from None
    params = tuple(float(p) for p in params)
    if len(params) != nparams:
        raise GateError(f"gate {tag!r} takes {nparams} parameter(s), got {len(params)}")
    if not all(np.isfinite(params)):
        raise GateError(f"gate {tag!r} got non-finite parameters {params}")
    return build(*params)


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    eye = np.eye(u.shape[0])
    return bool(np.allclose(u.conj().T @ u, eye, atol=atol, rtol=0)
                and np.allclose(u @ u.conj().T, eye, atol=atol, rtol=0))


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateApplication:
    """One gate placed on specific qubits.

    ``gate`` is either a tag from :data:`GATE_TAGS` or an explicit unitary
    matrix.  For controlled gates the control qubits come first in
    ``targets``.
    """

    gate: str | np.ndarray
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(set(self.targets)) != len(self.targets):
            raise GateError(f"repeated target qubits {self.targets}")
        if any(t < 0 for t in self.targets):
            raise GateError(f"negative target qubit in {self.targets}")
        if isinstance(self.gate, str):
            arity = gate_arity(self.gate)
        else:
            m = np.asarray(self.gate, dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, "gate", m)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
                raise GateError(f"gate matrix has bad shape {m.shape}")
            arity = m.shape[0].bit_length() - 1
            if not is_unitary(m):
                raise GateError("gate matrix is not unitary")
        if arity != len(self.targets):
            raise GateError(
                f"gate {self.tag!r} acts on {arity} qubit(s) but got targets {self.targets}")

    @property
    def tag(self) -> str:
        return self.gate if isinstance(self.gate, str) else "unitary"

    @property
    def arity(self) -> int:
        return len(self.targets)

    def matrix(self) -> np.ndarray:
        if isinstance(self.gate, str):
            return gate_matrix(self.gate, self.params)
        return np.asarray(self.gate)

    def __eq__(self, other):
        if not isinstance(other, GateApplication):
            return NotImplemented
        return (self.tag == other.tag and self.targets == other.targets
                and np.allclose(self.params, other.params)
                and np.allclose(self.matrix(), other.matrix()))

    def __hash__(self):
        return hash((self.tag, self.targets, self.params))


@dataclass(frozen=True)
class Circuit:
    """An ordered list of gate applications on ``num_qubits`` qubits.

    ``measured`` lists the qubits read out at the end (all qubits if empty).
    """

    num_qubits: int
    gates: tuple[GateApplication, ...] = ()
    label: str = ""
    measured: tuple[int, ...] = ()

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise GateError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured", tuple(self.measured))
        for g in self.gates:
            if max(g.targets) >= self.num_qubits:
                raise GateError(f"gate {g.tag} targets {g.targets} outside {self.num_qubits} qubits")
        for q in self.measured:
            if not 0 <= q < self.num_qubits:
                raise GateError(f"measured qubit {q} out of range")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def then(self, *gates: GateApplication, label: str | None = None) -> "Circuit":
        return Circuit(self.num_qubits, self.gates + tuple(gates),
                       self.label if label is None else label, self.measured)

    def count_ops(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.tag] = out.get(g.tag, 0) + 1
        return out


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise GateError(f"num_qubits must be in [1, {MAX_QUBITS}]")
        if amps.size != 2 ** self.num_qubits:
            raise GateError(f"expected {2 ** self.num_qubits} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > NORM_ATOL:
            raise GateError(f"state is not normalised (|psi|^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        amps = np.zeros(2 ** num_qubits, dtype=complex)
        amps[0] = 1
        return cls(num_qubits, amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1
        return cls(len(bits), amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size != 2 ** n:
            raise GateError(f"amplitude count {amps.size} is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def product(cls, *singles) -> "StateVector":
        amps = np.array([1.0 + 0j])
        for s in singles:
            amps = np.kron(amps, np.asarray(s, dtype=complex))
        return cls.from_amplitudes(amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)])

    def bitstrings(self) -> list[str]:
        return [format(i, f"0{self.num_qubits}b") for i in range(2 ** self.num_qubits)]

    def __len__(self):
        return self.amplitudes.size


def states_equal(a, b, atol: float = 1e-9) -> bool:
    """Compare two states up to a global phase."""
    va = np.asarray(getattr(a, "amplitudes", a), dtype=complex)
    vb = np.asarray(getattr(b, "amplitudes", b), dtype=complex)
    if va.shape != vb.shape:
        return False
    overlap = np.vdot(vb, va)
    if abs(overlap) < 1e-15:
        return bool(np.allclose(va, vb, atol=atol))
    phase = overlap / abs(overlap)
    return bool(np.allclose(va, vb * phase, atol=atol, rtol=0))


# ---------------------------------------------------------------------------
# exact evolution
# ---------------------------------------------------------------------------

def _apply_matrix(tensor: np.ndarray, u: np.ndarray, targets: Sequence[int], offset: int = 0):
    # tensor axes: [batch axes (offset)] + one axis per qubit
    k = len(targets)
    axes = [offset + t for t in targets]
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_gate(state: StateVector, app: GateApplication) -> StateVector:
    n = state.num_qubits
    if max(app.targets) >= n:
        raise GateError(f"target {max(app.targets)} out of range for {n} qubits")
    tensor = state.amplitudes.reshape((2,) * n)
    out = _apply_matrix(tensor, app.matrix(), app.targets)
    return StateVector(n, out.reshape(-1))


def run_exact(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply every gate of ``circuit`` in order, starting from ``initial``
    (all-zeros by default)."""
    if initial is None:
        initial = StateVector.zero(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise GateError(
            f"circuit has {circuit.num_qubits} qubits, initial state {initial.num_qubits}")
    n = circuit.num_qubits
    tensor = initial.amplitudes.reshape((2,) * n)
    for app in circuit.gates:
        tensor = _apply_matrix(tensor, app.matrix(), app.targets)
    return StateVector(n, tensor.reshape(-1))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full ``2^n x 2^n`` unitary of a circuit (columns are images of basis states)."""
    n = circuit.num_qubits
    dim = 2 ** n
    tensor = np.eye(dim, dtype=complex).reshape((dim,) + (2,) * n)
    for app in circuit.gates:
        tensor = _apply_matrix(tensor, app.matrix(), app.targets, offset=1)
    return tensor.reshape(dim, dim).T


def reduced_density_matrix(state: StateVector, keep_qubit: int) -> np.ndarray:
    """2x2 density matrix of one qubit, tracing out all the others."""
    n = state.num_qubits
    if not 0 <= keep_qubit < n:
        raise GateError(f"qubit {keep_qubit} out of range for {n} qubits")
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), keep_qubit, 0).reshape(2, -1)
    rho = psi @ psi.conj().T
    return (rho + rho.conj().T) / 2


# ---------------------------------------------------------------------------
# measurement and noise
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Counts:
    shots: int
    table: dict

    def __post_init__(self):
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        if sum(self.table.values()) != self.shots:
            raise ValueError("counts do not sum to shots")
        if any(v < 0 for v in self.table.values()):
            raise ValueError("negative count")

    @property
    def num_bits(self) -> int:
        return len(next(iter(self.table)))

    def get(self, bits: str) -> int:
        return self.table.get(bits, 0)

    def frequencies(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.table.items()}

    def marginal(self, qubits: Sequence[int]) -> "Counts":
        out: dict[str, int] = {}
        for bits, c in self.table.items():
            key = "".join(bits[q] for q in qubits)
            out[key] = out.get(key, 0) + c
        return Counts(self.shots, out)


@dataclass(frozen=True)
class NoiseModel:
    depolarizing_prob_1q: float = 0.004
    depolarizing_prob_2q: float = 0.03
    readout_flip_prob: float = 0.03
    seed: int = 0

    def __post_init__(self):
        for name in ("depolarizing_prob_1q", "depolarizing_prob_2q", "readout_flip_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @classmethod
    def ideal(cls, seed: int = 0) -> "NoiseModel":
        return cls(0.0, 0.0, 0.0, seed)

    @classmethod
    def uniform(cls, level: float, readout: float = 0.0, seed: int = 0) -> "NoiseModel":
        return cls(level, level, readout, seed)

    @property
    def is_ideal(self) -> bool:
        return not (self.depolarizing_prob_1q or self.depolarizing_prob_2q or self.readout_flip_prob)

    def as_dict(self) -> dict:
        return {
            "depolarizing_prob_1q": self.depolarizing_prob_1q,
            "depolarizing_prob_2q": self.depolarizing_prob_2q,
            "readout_flip_prob": self.readout_flip_prob,
            "seed": self.seed,
        }


DEFAULT_NOISE = NoiseModel()

_CHUNK = 2048


def _draw_outcomes(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # probs: (T, 2^n) rows summing to 1; one outcome per row
    cdf = np.cumsum(probs, axis=-1)
    cdf[:, -1] = np.inf
    u = rng.random(probs.shape[0])[:, None]
    return np.argmax(u < cdf, axis=-1)


def _flip_readout(outcomes: np.ndarray, n: int, p: float, rng) -> np.ndarray:
    if p <= 0:
        return outcomes
    flips = rng.random((outcomes.size, n)) < p
    weights = 1 << np.arange(n - 1, -1, -1)
    return outcomes ^ (flips.astype(np.int64) @ weights)


def _to_counts(outcomes: np.ndarray, n: int, shots: int) -> Counts:
    hist = np.bincount(outcomes, minlength=2 ** n)
    table = {format(i, f"0{n}b"): int(c) for i, c in enumerate(hist) if c}
    return Counts(shots, table)


def _chunks(shots: int):
    start = 0
    idx = 0
    while start < shots:
        size = min(_CHUNK, shots - start)
        yield idx, size
        start += size
        idx += 1


def sample(state: StateVector, shots: int, noise: NoiseModel | None = None,
           seed: int | None = None) -> Counts:
    """Draw ``shots`` measurements of every qubit (Born rule).

    With ``noise`` only its readout flips are applied here; gate noise needs
    :func:`run_noisy`.  The seed comes from ``noise.seed`` unless given.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    if seed is None:
        seed = noise.seed if noise is not None else 0
    n = state.num_qubits
    probs = state.probabilities()
    probs = probs / probs.sum()
    outcomes = []
    for idx, size in _chunks(shots):
        rng = np.random.default_rng([seed, idx])
        o = _draw_outcomes(np.broadcast_to(probs, (size, probs.size)).copy(), rng)
        if noise is not None:
            o = _flip_readout(o, n, noise.readout_flip_prob, rng)
        outcomes.append(o)
    return _to_counts(np.concatenate(outcomes), n, shots)


_PAULI_STACK = np.stack([PAULI[k] for k in "IXYZ"])


def _depolarize(tensor: np.ndarray, targets: Sequence[int], p: float, rng) -> np.ndarray:
    """Apply a random non-identity Pauli string on ``targets`` to a fraction ``p``
    of the trajectories in ``tensor`` (axis 0 indexes trajectories)."""
    T = tensor.shape[0]
    hit = rng.random(T) < p
    if not hit.any():
        return tensor
    k = len(targets)
    # uniform over the 4^k - 1 non-identity strings
    codes = rng.integers(1, 4 ** k, size=T)
    codes[~hit] = 0
    for j, q in enumerate(targets):
        which = (codes // 4 ** (k - 1 - j)) % 4
        mats = _PAULI_STACK[which]  # (T, 2, 2)
        moved = np.moveaxis(tensor, q + 1, -1)
        moved = np.einsum("tab,t...b->t...a", mats, moved)
        tensor = np.moveaxis(moved, -1, q + 1)
    return tensor


def run_noisy(circuit: Circuit, initial: StateVector | None, noise: NoiseModel,
              shots: int) -> Counts:
    """Monte-Carlo trajectory simulation, one trajectory per shot.

    After every one-qubit gate a uniformly random X, Y or Z hits the qubit
    with probability ``depolarizing_prob_1q``; after every multi-qubit gate a
    random non-identity Pauli string hits its qubits with probability
    ``depolarizing_prob_2q``.  Each measured bit is then flipped with
    ``readout_flip_prob``.  Trajectories are processed in chunks, each with its
    own stream seeded by ``(noise.seed, chunk_index)``.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    if initial is None:
        initial = StateVector.zero(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise GateError("initial state size does not match circuit")
    n = circuit.num_qubits
    mats = [(app.matrix(), app.targets) for app in circuit.gates]
    outcomes = []
    for idx, size in _chunks(shots):
        rng = np.random.default_rng([noise.seed, idx])
        tensor = np.broadcast_to(initial.amplitudes.reshape((1,) + (2,) * n),
                                 (size,) + (2,) * n).copy()
        for u, targets in mats:
            tensor = _apply_matrix(tensor, u, targets, offset=1)
            p = noise.depolarizing_prob_1q if len(targets) == 1 else noise.depolarizing_prob_2q
            if p > 0:
                tensor = _depolarize(tensor, targets, p, rng)
        probs = np.abs(tensor.reshape(size, -1)) ** 2
        probs /= probs.sum(axis=1, keepdims=True)
        o = _draw_outcomes(probs, rng)
        outcomes.append(_flip_readout(o, n, noise.readout_flip_prob, rng))
    return _to_counts(np.concatenate(outcomes), n, shots)
