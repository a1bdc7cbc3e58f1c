"""
Circuit construction for the kernel oracles and the two classification
circuits, plus depth accounting and coupling-map validation.

Qubit indices are 0-based; qubit 0 is the most significant bit (``q1`` in
``|q1 q2 q3 q4>`` notation).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .qcore import Circuit, GateApplication, GateError

__all__ = [
    "Circuit", "CouplingMap", "IBMQX2", "IBMQX2_LAYOUT",
    "decompose_controlled_ry", "decompose_cc_ry", "decompose_controlled_htheta",
    "build_oracle_original", "build_oracle_new", "build_hhl_optimized",
    "build_baseline_qsvm", "hhl_rotation_angles", "baseline_rotation_angles",
    "depth", "layers", "oracle_depth_formula", "oracle_qubit_formula",
    "validate_coupling", "circuit_to_json", "circuit_from_json",
    "HHL_EIGENVALUES", "HHL_MATRIX",
]

G = GateApplication

# the classification circuits are compiled for this matrix
HHL_MATRIX = np.array([[1.0, 0.5], [0.5, 1.0]])
HHL_EIGENVALUES = (0.5, 1.5)


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

def decompose_controlled_ry(theta: float, control: int, target: int,
                            control_state: int = 1) -> list[GateApplication]:
    """Controlled-Ry(theta) as CNOT, Ry(-theta/2), CNOT, Ry(theta/2).

    With ``control_state=0`` the sign of the first rotation flips, which
    conditions the rotation on ``|0>`` without extra X gates.
    """
    if control == target:
        raise GateError("control and target must differ")
    first = -theta / 2 if control_state else theta / 2
    return [
        G("cnot", (control, target)),
        G("ry", (target,), (first,)),
        G("cnot", (control, target)),
        G("ry", (target,), (theta / 2,)),
    ]


def decompose_cc_ry(theta: float, controls: Sequence[int], target: int,
                    control_states: Sequence[int] = (1, 1)) -> list[GateApplication]:
    """Doubly-controlled Ry(theta) from 6 CNOTs and 4 Ry rotations.

    Every gate touches the target, so the ten gates form one dependency
    chain.  The rotations see the target flipped by the parities
    ``c1``, ``c2``, ``c1^c2`` and ``0`` in turn; weighting them by
    ``+-theta/4`` leaves exactly ``Ry(theta)`` on the selected control
    pattern and the identity elsewhere.
    """
    c1, c2 = controls
    if len({c1, c2, target}) != 3:
        raise GateError("controls and target must be distinct")
    s1 = -1 if control_states[0] else 1
    s2 = -1 if control_states[1] else 1
    q = theta / 4
    return [
        G("cnot", (c1, target)),
        G("ry", (target,), (s1 * q,)),
        G("cnot", (c1, target)),
        G("cnot", (c2, target)),
        G("ry", (target,), (s2 * q,)),
        G("cnot", (c1, target)),
        G("ry", (target,), (s1 * s2 * q,)),
        G("cnot", (c1, target)),
        G("cnot", (c2, target)),
        G("ry", (target,), (q,)),
    ]


def decompose_controlled_htheta(theta: float, control: int, target: int) -> list[GateApplication]:
    """Controlled-H(theta) for hardware that only offers CNOT.

    Uses ``H(theta) = Ry(2 theta) Z Ry(-2 theta)`` and ``CZ = (I x H) CNOT (I x H)``.
    """
    return [
        G("ry", (target,), (-2 * theta,)),
        G("h", (target,)),
        G("cnot", (control, target)),
        G("h", (target,)),
        G("ry", (target,), (2 * theta,)),
    ]


# ---------------------------------------------------------------------------
# training-data oracles
# ---------------------------------------------------------------------------

def _index_bits(i: int, width: int) -> list[int]:
    return [(i >> (width - 1 - k)) & 1 for k in range(width)]


def build_oracle_original(angles: Sequence[float]) -> Circuit:
    """Index-register oracle: ``(1/sqrt M) sum_i |i-1> (cos t_i |0> + sin t_i |1>)``.

    The index register (``log2 M`` qubits) is put in uniform superposition,
    then the data qubit (last) is rotated by ``Ry(2 t_i)`` conditioned on
    index ``i-1``.  Only ``M = 2`` (controlled-Ry) and ``M = 4`` (CC-Ry) are
    constructed.  The reduced density matrix of the index register is the
    normalised kernel matrix.
    """
    angles = [float(a) for a in angles]
    m = len(angles)
    if m not in (2, 4):
        raise ValueError(f"original oracle is constructed for M = 2 or 4, got {m}")
    width = m.bit_length() - 1
    data = width
    gates = [G("h", (q,)) for q in range(width)]
    for i, theta in enumerate(angles):
        bits = _index_bits(i, width)
        if width == 1:
            gates += decompose_controlled_ry(2 * theta, 0, data, control_state=bits[0])
        else:
            gates += decompose_cc_ry(2 * theta, (0, 1), data, control_states=bits)
    return Circuit(width + 1, gates, label=f"oracle-original-M{m}")


def build_oracle_new(angles: Sequence[float]) -> Circuit:
    """One unentangled qubit per training point, each prepared by Ry(2 t_i)."""
    angles = [float(a) for a in angles]
    if not angles:
        raise ValueError("need at least one angle")
    gates = [G("ry", (i,), (2 * t,)) for i, t in enumerate(angles)]
    return Circuit(len(angles), gates, label=f"oracle-new-M{len(angles)}")


# ---------------------------------------------------------------------------
# classification circuits
# ---------------------------------------------------------------------------

def _eigen_coefficients(y, eigenvalues=HHL_EIGENVALUES):
    y = np.asarray(y, dtype=float)
    if y.shape != (2,) or not np.any(y):
        raise ValueError("label vector must have two entries, not both zero")
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    minus = np.array([1.0, -1.0]) / math.sqrt(2)
    low, high = eigenvalues
    # |-> carries the small eigenvalue of [[1, .5], [.5, 1]]
    return float(minus @ y) / low, float(plus @ y) / high


def hhl_rotation_angles(y=(1, -1), eigenvalues=HHL_EIGENVALUES) -> tuple[float, float]:
    """H(theta) angles for :func:`build_hhl_optimized` solving ``F a = y``.

    Returns ``(theta_r1, theta_r2)``: ``theta_r2`` drives the unconditioned
    H(theta) on the ancilla, ``theta_r1`` the controlled one.  The branch of
    eigenvalue ``l`` ends with ancilla amplitude proportional to
    ``<u_l|y> / l``, scaled so the larger magnitude is 1.
    """
    r_low, r_high = _eigen_coefficients(y, eigenvalues)
    scale = max(abs(r_low), abs(r_high))
    s_low, s_high = r_low / scale, r_high / scale
    theta_r2 = math.asin(s_high) / 2
    theta_r1 = math.asin(s_low) / 2 + theta_r2
    return theta_r1, theta_r2


def build_hhl_optimized(theta_r1: float, theta_r2: float, *,
                        include_cancelled_x: bool = False,
                        decompose: bool = False) -> Circuit:
    """Four-qubit HHL circuit for ``F = [[1, .5], [.5, 1]]``, depth 7.

    Qubits: 0, 1 eigenvalue register; 2 solution register; 3 ancilla.

    Part A (phase estimation): H, CNOT(0,1), CNOT(1,2) build the GHZ state;
    the zero-controlled X turns it into ``(|010> + |111>)/sqrt2`` with the
    register on ``|01>``/``|11>`` (eigenvalues 0.5 and 1.5); the final H on
    qubit 0 leaves ``|1>_0`` paired with ``|->_2`` and ``|0>_0`` with ``|+>_2``.

    Part B (eigenvalue inversion): X clears qubit 1, H(theta_r2) rotates the
    ancilla on every branch and the controlled H(theta_r1) corrects the
    qubit-0 = 1 branch (``H(a) H(b) = Ry(4(a - b))``).

    Part C: H on qubit 0 folds both branches onto ``|00>`` of the register.

    ``include_cancelled_x`` inserts the mutually cancelling X pair on qubit
    2; ``decompose`` replaces the controlled H(theta) with CNOT-based gates.
    """
    gates = [
        G("h", (0,)),
        G("cnot", (0, 1)),
        G("cnot", (1, 2)),
        G("cx0", (0, 1)),
    ]
    if include_cancelled_x:
        gates += [G("x", (2,)), G("x", (2,))]
    gates += [
        G("h", (0,)),
        # part B
        G("x", (1,)),
        G("htheta", (3,), (theta_r2,)),
    ]
    if decompose:
        gates += decompose_controlled_htheta(theta_r1, 0, 3)
    else:
        gates.append(G("chtheta", (0, 3), (theta_r1,)))
    # part C
    gates.append(G("h", (0,)))
    return Circuit(4, gates, label="hhl-optimized", measured=(0, 1, 2, 3))


def baseline_rotation_angles(eigenvalues=HHL_EIGENVALUES, c: float | None = None) -> tuple[float, float]:
    """Ancilla Ry angles ``2 asin(C / l)`` for the two eigenvalues (C = smallest)."""
    low, high = eigenvalues
    if c is None:
        c = min(abs(low), abs(high))
    return 2 * math.asin(c / low), 2 * math.asin(c / high)


def _qpe_forward() -> list[GateApplication]:
    # exp(i pi F) = -iX, so controlled-U = CNOT then S^dag on the control and
    # controlled-U^2 = Z on the control; inverse QFT leaves lambda=0.5 on |10>
    # and lambda=1.5 on |11>
    return [
        G("h", (0,)),
        G("h", (1,)),
        G("cnot", (1, 2)),
        G("sdg", (1,)),
        G("z", (0,)),
        G("h", (0,)),
        G("cp", (0, 1), (-math.pi / 2,)),
        G("h", (1,)),
    ]


def _inverse(gates: Sequence[GateApplication]) -> list[GateApplication]:
    inv = {"h": "h", "cnot": "cnot", "z": "z", "x": "x", "sdg": "s", "s": "sdg"}
    out = []
    for g in reversed(gates):
        if g.tag in inv:
            out.append(G(inv[g.tag], g.targets))
        elif g.tag in ("cp", "ry", "p"):
            out.append(G(g.tag, g.targets, tuple(-p for p in g.params)))
        else:
            raise GateError(f"no inverse rule for {g.tag}")
    return out


def build_baseline_qsvm(angles: Sequence[float] | None = None, y=(1, -1)) -> Circuit:
    """Textbook four-qubit HHL for ``F = [[1, .5], [.5, 1]]``, depth 18.

    ``angles`` are the ancilla Ry angles for the eigenvalue-0.5 and
    eigenvalue-1.5 branches (default :func:`baseline_rotation_angles`);
    ``y`` is the label vector loaded into qubit 2.  Phase estimation uses
    evolution time pi, the rotations use the 4-gate controlled-Ry with X
    conjugation for the zero-controlled branch, and the register is then
    uncomputed.  Qubit 2 is the measured qubit.
    """
    if angles is None:
        angles = baseline_rotation_angles()
    phi_low, phi_high = (float(a) for a in angles)
    y = np.asarray(y, dtype=float)
    if y.shape != (2,):
        raise ValueError("label vector must have two entries")
    norm = np.linalg.norm(y)
    theta_y = math.atan2(y[1], y[0]) if norm else 0.0
    prep = [G("ry", (2,), (2 * theta_y,))]
    qpe = _qpe_forward()
    rotation = (
        decompose_controlled_ry(phi_high, 1, 3)
        + [G("x", (1,))]
        + decompose_controlled_ry(phi_low, 1, 3)
        + [G("x", (1,))]
    )
    gates = prep + qpe + rotation + _inverse(qpe)
    return Circuit(4, gates, label="baseline-qsvm", measured=(2,))


# ---------------------------------------------------------------------------
# depth
# ---------------------------------------------------------------------------

def layers(circuit: Circuit) -> list[list[GateApplication]]:
    """Greedy ASAP layering: each gate lands one layer after the latest
    layer touching any of its qubits."""
    level = [0] * circuit.num_qubits
    out: list[list[GateApplication]] = []
    for g in circuit.gates:
        d = max(level[q] for q in g.targets) + 1
        for q in g.targets:
            level[q] = d
        while len(out) < d:
            out.append([])
        out[d - 1].append(g)
    return out


def depth(circuit: Circuit) -> int:
    level = [0] * circuit.num_qubits
    for g in circuit.gates:
        d = max(level[q] for q in g.targets) + 1
        for q in g.targets:
            level[q] = d
    return max(level, default=0)


def _check_power_of_two(m: int) -> None:
    if m < 2 or m & (m - 1):
        raise ValueError(f"M must be a power of two >= 2, got {m}")


def oracle_depth_formula(m: int) -> int:
    """Depth of the original index-register oracle: 3M^2 - 2M + 1."""
    _check_power_of_two(m)
    return 3 * m * m - 2 * m + 1


def oracle_qubit_formula(m: int) -> tuple[int, int]:
    """(original, new) qubit counts: log2(M) + 1 and M."""
    _check_power_of_two(m)
    return m.bit_length(), m


# ---------------------------------------------------------------------------
# coupling map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingMap:
    """Directed two-qubit connectivity: ``(control, target)`` edges."""

    num_physical_qubits: int
    directed_edges: frozenset
    logical_to_physical: dict = field(default_factory=dict)

    def __post_init__(self):
        edges = frozenset((int(a), int(b)) for a, b in self.directed_edges)
        object.__setattr__(self, "directed_edges", edges)
        for a, b in edges:
            if not (0 <= a < self.num_physical_qubits and 0 <= b < self.num_physical_qubits):
                raise ValueError(f"edge {(a, b)} references a missing qubit")
        phys = list(self.logical_to_physical.values())
        if len(set(phys)) != len(phys):
            raise ValueError("logical-to-physical mapping is not injective")
        if any(not 0 <= p < self.num_physical_qubits for p in phys):
            raise ValueError("mapping references a missing physical qubit")

    def with_layout(self, layout: dict) -> "CouplingMap":
        return CouplingMap(self.num_physical_qubits, self.directed_edges, dict(layout))


# arrows run control -> target
IBMQX2 = CouplingMap(5, frozenset({(1, 0), (2, 0), (2, 1), (2, 3), (2, 4), (4, 3)}))
# q1 -> Q2, q2 -> Q1, q3 -> Q0, q4 -> Q3
IBMQX2_LAYOUT = {0: 2, 1: 1, 2: 0, 3: 3}


def validate_coupling(circuit: Circuit, cmap: CouplingMap) -> list[str]:
    """Describe every two-qubit gate that does not sit on a directed edge."""
    layout = cmap.logical_to_physical
    missing = sorted(set(range(circuit.num_qubits)) - set(layout))
    if missing:
        raise ValueError(f"logical qubits {missing} are not mapped")
    problems = []
    for i, g in enumerate(circuit.gates):
        if g.arity == 1:
            continue
        if g.arity > 2:
            problems.append(f"gate {i} ({g.tag} on {g.targets}): more than two qubits")
            continue
        a, b = (layout[q] for q in g.targets)
        if (a, b) in cmap.directed_edges:
            continue
        if (b, a) in cmap.directed_edges:
            why = f"wrong direction, device only allows Q{b}->Q{a}"
        else:
            why = f"Q{a} and Q{b} are not connected"
        problems.append(f"gate {i} ({g.tag} on q{g.targets[0]}->q{g.targets[1]}): {why}")
    return problems


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def circuit_to_json(circuit: Circuit) -> str:
    gates = []
    for g in circuit.gates:
        if g.tag == "unitary":
            raise ValueError("explicit-matrix gates are not serialisable")
        gates.append({"tag": g.tag, "targets": list(g.targets), "params": list(g.params)})
    doc = {"num_qubits": circuit.num_qubits, "label": circuit.label,
           "measured": list(circuit.measured), "gates": gates}
    return json.dumps(doc, indent=2)


def circuit_from_json(text: str) -> Circuit:
    doc = json.loads(text)
    gates = [G(g["tag"], tuple(g["targets"]), tuple(g.get("params", ()))) for g in doc["gates"]]
    return Circuit(int(doc["num_qubits"]), gates, doc.get("label", ""),
                   tuple(doc.get("measured", ())))
