"""Gate library and the layered per-step evolution operator.

The workhorse is the two-qubit XY(theta) gate

    [[1, 0,          0,          0],
     [0, cos(theta), i sin(theta), 0],
     [0, i sin(theta), cos(theta), 0],
     [0, 0,          0,          1]]

which exchanges |01>/|10> amplitude and leaves |00>, |11> alone, hence
conserves excitation number.  theta = pi/4 gives sqrt(iSWAP), theta = pi/2
gives iSWAP.

One walk step applies one layer of XY gates per tessellation, layers in
cover order (T0 then T1; T00, T01, T10, T11).  The plain walk uses
XY(pi/4) on every pair.  The search step uses XY(pi/4) on pairs incident
to the marked vertex and RZ(-pi/2) x RZ(-pi/2) . XY(pi/2) (iSWAP first,
then the phase corrections on both qubits) everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice, Tessellation, tessellations_for
from .states import StateVector

PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

#: Default walk angle; XY(pi/4) = sqrt(iSWAP).
WALK_ANGLE = math.pi / 4
#: Search angles: marked-incident pairs keep the walk angle, the rest get iSWAP.
MARKED_ANGLE = math.pi / 4
UNMARKED_ANGLE = math.pi / 2
#: Phase correction applied to both qubits of an unmarked search pair.
SEARCH_RZ_ANGLE = -math.pi / 2

# dimensionless generators G with gate(theta) = expm(-i * theta * G)
_XY_GENERATOR = -(np.kron(PAULI["X"], PAULI["X"]) + np.kron(PAULI["Y"], PAULI["Y"])) / 2


def xy_gate(theta: float) -> np.ndarray:
    """4x4 XY(theta) unitary in the |q_a q_b> computational basis."""
    if not math.isfinite(theta):
        raise ValueError("angle must be finite")
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [[1, 0, 0, 0],
         [0, c, 1j * s, 0],
         [0, 1j * s, c, 0],
         [0, 0, 0, 1]],
        dtype=complex,
    )


def pauli_rotation(axis: str, theta: float) -> np.ndarray:
    """R_A(theta) = exp(-i theta sigma_A / 2) for A in {X, Y, Z}."""
    if axis not in PAULI:
        raise ValueError(f"unknown rotation axis {axis!r}")
    if not math.isfinite(theta):
        raise ValueError("angle must be finite")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return c * np.eye(2, dtype=complex) - 1j * s * PAULI[axis]


@dataclass(frozen=True)
class GateSpec:
    """A named gate instance: angle, target qubits, optional duration.

    ``duration`` (seconds) is normally derived from the noise model
    (XY runs for theta/coupling, single-qubit rotations for a fixed time,
    RZ is instantaneous); setting it here overrides that.
    """

    name: str  # "XY" | "RX" | "RY" | "RZ"
    theta: float
    targets: tuple
    duration: float | None = None

    def __post_init__(self):
        if self.name not in ("XY", "RX", "RY", "RZ"):
            raise ValueError(f"unknown gate {self.name!r}")
        want = 2 if self.name == "XY" else 1
        if len(self.targets) != want:
            raise ValueError(f"{self.name} expects {want} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("gate targets must be distinct")
        if not math.isfinite(self.theta):
            raise ValueError("angle must be finite")
        if self.duration is not None and self.duration < 0:
            raise ValueError("duration must be non-negative")

    @property
    def n_targets(self) -> int:
        return len(self.targets)

    def matrix(self) -> np.ndarray:
        if self.name == "XY":
            return xy_gate(self.theta)
        return pauli_rotation(self.name[1], self.theta)

    def generator(self) -> np.ndarray:
        """G such that matrix() == expm(-i * theta * G)."""
        if self.name == "XY":
            return _XY_GENERATOR.copy()
        return PAULI[self.name[1]] / 2


def _slicer(n: int, assignments: dict) -> tuple:
    idx = [slice(None)] * n
    for q, v in assignments.items():
        idx[n - 1 - q] = v  # axis 0 of the reshaped tensor is the highest qubit
    return tuple(idx)


def apply_single_qubit(state: StateVector, gate: np.ndarray, q: int) -> StateVector:
    """Apply a 2x2 matrix to qubit ``q``, updating the amplitudes in place."""
    n = state.n_qubits
    if not 0 <= q < n:
        raise ValueError(f"qubit {q} out of range")
    t = state.amplitudes.reshape([2] * n)
    s0, s1 = _slicer(n, {q: 0}), _slicer(n, {q: 1})
    if gate[0, 1] == 0 and gate[1, 0] == 0:
        t[s0] *= gate[0, 0]
        t[s1] *= gate[1, 1]
        return state
    new0 = gate[0, 0] * t[s0] + gate[0, 1] * t[s1]
    new1 = gate[1, 0] * t[s0] + gate[1, 1] * t[s1]
    t[s0], t[s1] = new0, new1
    return state


def apply_two_qubit(state: StateVector, gate: np.ndarray, qa: int, qb: int) -> StateVector:
    """Apply a 4x4 matrix to qubits (qa, qb), updating the amplitudes in place.

    Row index convention of ``gate``: (bit of qa) * 2 + (bit of qb).
    """
    n = state.n_qubits
    if qa == qb:
        raise ValueError("two-qubit gate needs distinct qubits")
    if not (0 <= qa < n and 0 <= qb < n):
        raise ValueError(f"qubits ({qa}, {qb}) out of range")
    t = state.amplitudes.reshape([2] * n)
    sl = [_slicer(n, {qa: r >> 1, qb: r & 1}) for r in range(4)]
    # excitation-conserving gates (XY and friends) touch only the
    # |01>/|10> block; skip the untouched three quarters of the state
    central = (
        gate[0, 0] == 1 and gate[3, 3] == 1
        and not gate[0, 1:].any() and not gate[3, :3].any()
        and gate[1, 0] == gate[1, 3] == gate[2, 0] == gate[2, 3] == 0
    )
    if central:
        new1 = gate[1, 1] * t[sl[1]] + gate[1, 2] * t[sl[2]]
        new2 = gate[2, 1] * t[sl[1]] + gate[2, 2] * t[sl[2]]
        t[sl[1]], t[sl[2]] = new1, new2
        return state
    old = [t[s].copy() for s in sl]  # copies: rows are overwritten as we go
    for r in range(4):
        acc = gate[r, 0] * old[0]
        for c in range(1, 4):
            if gate[r, c] != 0:
                acc = acc + gate[r, c] * old[c]
        t[sl[r]] = acc
    return state


def apply_gate(state: StateVector, gate: GateSpec) -> StateVector:
    if gate.n_targets == 1:
        return apply_single_qubit(state, gate.matrix(), gate.targets[0])
    return apply_two_qubit(state, gate.matrix(), *gate.targets)


@dataclass
class AngleSchedule:
    """Per-pair angle assignment for the step operator.

    ``overrides`` maps a tessellation pair (either orientation) to an
    angle replacing the default.  ``marked`` carries the search target;
    it must be set for the search variant and unset for the plain walk.
    """

    default: float = WALK_ANGLE
    overrides: dict = field(default_factory=dict)
    marked: int | None = None

    def angle_for(self, pair, fallback: float | None = None) -> float:
        a, b = pair
        if (a, b) in self.overrides:
            return self.overrides[(a, b)]
        if (b, a) in self.overrides:
            return self.overrides[(b, a)]
        return self.default if fallback is None else fallback


@dataclass(frozen=True)
class StepOperator:
    """Ordered gate layers realizing one walk or search time step."""

    layers: tuple  # ((Tessellation, (GateSpec, ...)), ...)
    n_qubits: int
    variant: str = "walk"

    def apply(self, state: StateVector) -> StateVector:
        for _tess, gates in self.layers:
            for g in gates:
                apply_gate(state, g)
        return state

    def two_qubit_gate_count(self) -> int:
        return sum(1 for _t, gates in self.layers for g in gates if g.n_targets == 2)

    def gate_names(self) -> set:
        return {g.name for _t, gates in self.layers for g in gates}


def build_step_operator(lattice: Lattice, schedule: AngleSchedule,
                        variant: str = "walk") -> StepOperator:
    """Assemble the layered step operator for a lattice and angle schedule.

    Pure function of its arguments.  For ``variant="search"`` a pair uses
    the marked angle when either endpoint equals the marked vertex;
    all other pairs get iSWAP followed by RZ(-pi/2) on both qubits.
    """
    if variant not in ("walk", "search"):
        raise ValueError(f"unknown variant {variant!r}")
    marked = schedule.marked
    if variant == "search":
        if marked is None:
            raise ValueError("search variant needs a marked vertex on the schedule")
        if not 0 <= marked < lattice.vertex_count:
            raise ValueError(f"marked vertex {marked} out of range")
    layers = []
    for tess in tessellations_for(lattice):
        gates = []
        for pair in tess.pairs:
            if variant == "walk":
                gates.append(GateSpec("XY", schedule.angle_for(pair), tuple(pair)))
            elif marked in pair:
                gates.append(GateSpec("XY", schedule.angle_for(pair, MARKED_ANGLE), tuple(pair)))
            else:
                gates.append(GateSpec("XY", schedule.angle_for(pair, UNMARKED_ANGLE), tuple(pair)))
                gates.append(GateSpec("RZ", SEARCH_RZ_ANGLE, (pair[0],)))
                gates.append(GateSpec("RZ", SEARCH_RZ_ANGLE, (pair[1],)))
        layers.append((tess, tuple(gates)))
    return StepOperator(tuple(layers), lattice.vertex_count, variant)
