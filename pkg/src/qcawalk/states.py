"""Dense complex state representations and basis-index arithmetic.

The register encodes one lattice vertex per qubit: vertex ``v`` occupied
means qubit ``v`` is |1>.  Basis indices are little-endian, i.e. bit ``k``
of the index is the state of qubit ``k``.  Vertex labels of a torus map to
qubits in row-major order, ``(i, j) -> i + N*j``; this single convention is
used everywhere.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np

#: Outcome label collecting all probability mass outside the one-particle
#: sector (vacuum and multi-excitation bitstrings).  Leakage is a reported
#: outcome, never an error.
LEAKAGE = "leakage"

#: Probabilities below this are clamped to zero before sampling, so that
#: negative rounding residue never reaches the RNG.
PROB_CLAMP = 1e-15

#: Child-seed stream tags.  All randomness flows from one root seed:
#: shot sampling at step t draws from SeedSequence([seed, SHOT_STREAM, t]),
#: trajectory k from SeedSequence([seed, TRAJECTORY_STREAM, k]) (the
#: vectorised trajectory path uses SeedSequence([seed, TRAJECTORY_STREAM])).
SHOT_STREAM = 0
TRAJECTORY_STREAM = 1


class StateVector:
    """Pure state of an ``n_qubits`` register as a dense amplitude array."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (2**n_qubits,):
            raise ValueError(
                f"amplitude array has shape {amplitudes.shape}, "
                f"expected ({2**n_qubits},) for {n_qubits} qubits"
            )
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    @classmethod
    def vacuum(cls, n_qubits: int) -> "StateVector":
        """All-qubits-|0> state."""
        amp = np.zeros(2**n_qubits, dtype=complex)
        amp[0] = 1.0
        return cls(n_qubits, amp)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


class DensityMatrix:
    """Mixed state of an ``n_qubits`` register as a dense 2^n x 2^n matrix."""

    __slots__ = ("n_qubits", "entries")

    def __init__(self, n_qubits: int, entries: np.ndarray):
        entries = np.asarray(entries, dtype=complex)
        dim = 2**n_qubits
        if entries.shape != (dim, dim):
            raise ValueError(
                f"density matrix has shape {entries.shape}, expected {(dim, dim)}"
            )
        self.n_qubits = n_qubits
        self.entries = entries

    @classmethod
    def from_statevector(cls, state: StateVector) -> "DensityMatrix":
        amp = state.amplitudes
        return cls(state.n_qubits, np.outer(amp, amp.conj()))

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, self.entries.copy())

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def hermiticity_defect(self) -> float:
        """Max elementwise |rho - rho^dagger|."""
        return float(np.abs(self.entries - self.entries.conj().T).max())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.entries + self.entries.conj().T) / 2).min())

    def diagonal_probabilities(self) -> np.ndarray:
        return np.real(np.diag(self.entries))

    def validate(self, herm_tol: float = 1e-10, trace_tol: float = 1e-9,
                 psd_tol: float = 1e-9) -> None:
        """Raise if the state violates hermiticity, unit trace or positivity."""
        if self.hermiticity_defect() > herm_tol:
            raise ValueError(f"density matrix not Hermitian: defect {self.hermiticity_defect():.3e}")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {self.trace()!r} differs from 1")
        if self.min_eigenvalue() < -psd_tol:
            raise ValueError(f"density matrix has eigenvalue {self.min_eigenvalue():.3e}")

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits})"


@dataclass
class Distribution:
    """Probability distribution over vertex labels plus the leakage label.

    ``outcomes`` maps labels (vertex ids or :data:`LEAKAGE`) to
    probabilities.  ``shots`` and ``counts`` are present only on empirical
    distributions obtained by sampling.
    """

    outcomes: dict
    shots: int | None = None
    counts: dict | None = None

    def __post_init__(self):
        total = float(sum(self.outcomes.values()))
        if self.outcomes and not np.isclose(total, 1.0, atol=1e-9):
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        for label, p in self.outcomes.items():
            if p < -1e-12 or p > 1 + 1e-12:
                raise ValueError(f"probability {p!r} for outcome {label!r} out of [0, 1]")
        if self.counts is not None:
            if self.shots is None:
                raise ValueError("counts given without shots")
            if sum(self.counts.values()) != self.shots:
                raise ValueError("counts do not sum to shots")

    def get(self, label) -> float:
        return float(self.outcomes.get(label, 0.0))

    @property
    def is_empirical(self) -> bool:
        return self.shots is not None

    def labels(self):
        return canonical_labels(self.outcomes)


def canonical_labels(*outcome_maps) -> list:
    """Deterministic label order: integer labels ascending, then strings."""
    labels = set()
    for m in outcome_maps:
        labels.update(m)
    ints = sorted(x for x in labels if isinstance(x, numbers.Integral))
    strs = sorted(x for x in labels if not isinstance(x, numbers.Integral))
    return list(ints) + strs


@dataclass
class SectorState:
    """One-particle-sector view of a register state.

    ``amplitudes[v]`` is the amplitude of the basis state with the single
    excitation at vertex ``v``; ``leakage_norm`` is whatever squared norm
    of the source state lies outside those basis states.
    """

    N: int
    amplitudes: np.ndarray
    leakage_norm: float

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_distribution(self) -> Distribution:
        probs = self.probabilities()
        outcomes = {v: float(probs[v]) for v in range(self.N)}
        outcomes[LEAKAGE] = max(float(self.leakage_norm), 0.0)
        total = sum(outcomes.values())
        if total > 0 and not np.isclose(total, 1.0, atol=1e-9):
            # renormalise tiny float drift; anything larger is a real error
            if abs(total - 1.0) > 1e-6:
                raise ValueError(f"sector probabilities sum to {total!r}")
            outcomes = {k: v / total for k, v in outcomes.items()}
        return Distribution(outcomes)


def onehot_index(vertex: int, n_qubits: int) -> int:
    """Basis index of the one-hot state occupying ``vertex``.

    Qubit ``k`` is bit ``k`` of the index (little-endian), so the one-hot
    index is simply ``1 << vertex``.
    """
    if not 0 <= vertex < n_qubits:
        raise ValueError(f"vertex {vertex} out of range for {n_qubits} qubits")
    return 1 << vertex


def onehot_vertex(index: int, n_qubits: int) -> int:
    """Inverse of :func:`onehot_index`; rejects non-one-hot indices."""
    if index <= 0 or index >= 2**n_qubits or index & (index - 1):
        raise ValueError(f"index {index} is not a one-hot basis index")
    return index.bit_length() - 1


def sector_project(state: StateVector, vertex_count: int) -> SectorState:
    """Project a register state onto the one-particle sector.

    Leakage (norm outside the sector) is reported, never raised.
    """
    if vertex_count > state.n_qubits:
        raise ValueError("vertex count exceeds register size")
    idx = np.left_shift(1, np.arange(vertex_count))
    amps = state.amplitudes[idx].copy()
    total = float(np.vdot(state.amplitudes, state.amplitudes).real)
    leakage = total - float(np.vdot(amps, amps).real)
    return SectorState(vertex_count, amps, max(leakage, 0.0))


def _as_outcome_probs(dist) -> dict:
    if isinstance(dist, Distribution):
        return dist.outcomes
    if isinstance(dist, dict):
        return dist
    arr = np.asarray(dist, dtype=float)
    return {i: float(p) for i, p in enumerate(arr)}


def sample_counts(dist, shots: int, seed) -> Distribution:
    """Multinomial sample of an exact distribution.

    Deterministic under a fixed ``seed`` (an int or a
    ``numpy.random.SeedSequence``).  Probabilities below
    :data:`PROB_CLAMP` are clamped to zero before drawing.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    outcomes = _as_outcome_probs(dist)
    labels = canonical_labels(outcomes)
    probs = np.array([outcomes[l] for l in labels], dtype=float)
    probs[probs < PROB_CLAMP] = 0.0
    total = probs.sum()
    if total <= 0:
        raise ValueError("distribution has no positive probability mass")
    probs /= total
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    counts = {l: int(c) for l, c in zip(labels, draws)}
    freqs = {l: c / shots for l, c in counts.items()}
    return Distribution(freqs, shots=shots, counts=counts)
