"""Truncated composite Hilbert spaces and the elementary operators on them.

A basis state is ``|qd_state, n1 n2>``: one electronic configuration of the
quantum-dot subsystem together with a Fock state of each of the two cavities,
truncated at ``n_max`` photons per cavity.  Basis ordering is lexicographic in
(qd_state, n1, n2) with the qd states in the model's canonical order, so every
matrix built on a given space is reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

#: Excitation carried by each electronic configuration (a biexciton counts 2).
QD_EXCITATION_WEIGHT = {"G": 0, "B": 2, "B1": 2, "B2": 2, "Q": 4}


@dataclass(frozen=True)
class Transition:
    """One biexciton two-photon transition: ``upper <-> lower + 2 photons``.

    ``cavity`` is the mode that absorbs/emits the photon pair and ``coupling``
    names the strength parameter ("g2p", "g1" or "g2").
    """

    upper: str
    lower: str
    cavity: int
    coupling: str


@dataclass(frozen=True)
class SystemModel:
    """Topology of one emitter/cavity system.

    ``qd_states`` fixes the canonical ordering of the electronic
    configurations; ``transitions`` lists the two-photon couplings;
    ``noon_order`` is the photon number N of the target NOON state.
    """

    name: str
    qd_states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    noon_order: int
    n_cavities: int = 2

    def qd_index(self, state: str) -> int:
        try:
            return self.qd_states.index(state)
        except ValueError:
            raise ValueError(
                f"QD state {state!r} not in model {self.name!r} "
                f"(states: {self.qd_states})"
            ) from None


#: Single QD in cavity 1, two-photon coupling g_2P, target N = 2.
N2_MODEL = SystemModel(
    name="n2",
    qd_states=("G", "B"),
    transitions=(Transition("B", "G", 1, "g2p"),),
    noon_order=2,
)

#: Two QDs, one per cavity; QD j emits its photon pair into cavity j.
N4_MODEL = SystemModel(
    name="n4",
    qd_states=("G", "B1", "B2", "Q"),
    transitions=(
        Transition("B1", "G", 1, "g1"),
        Transition("Q", "B2", 1, "g1"),
        Transition("B2", "G", 2, "g2"),
        Transition("Q", "B1", 2, "g2"),
    ),
    noon_order=4,
)

#: Same two QDs but both emit into cavity 1 only (structurally not a
#: candidate NOON generator; kept for the flow-graph test).
N4_VARIANT_MODEL = SystemModel(
    name="n4-variant",
    qd_states=("G", "B1", "B2", "Q"),
    transitions=(
        Transition("B1", "G", 1, "g1"),
        Transition("Q", "B2", 1, "g1"),
        Transition("B2", "G", 1, "g2"),
        Transition("Q", "B1", 1, "g2"),
    ),
    noon_order=4,
)

MODELS = {m.name: m for m in (N2_MODEL, N4_MODEL, N4_VARIANT_MODEL)}


@dataclass(frozen=True, order=True)
class BasisLabel:
    """One basis state ``|qd_state, n1 n2>`` (ordering key: index, n1, n2)."""

    qd_order: int  # position of qd_state in the model's canonical order
    n1: int
    n2: int
    qd_state: str

    def photon_counts(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    def total_excitation(self) -> int:
        return QD_EXCITATION_WEIGHT[self.qd_state] + self.n1 + self.n2

    def __str__(self) -> str:  # e.g. "|B,20>"
        return f"|{self.qd_state},{self.n1}{self.n2}>"


class HilbertSpace:
    """Ordered basis of a truncated composite space.

    Instances are immutable after construction and safe to share between
    threads/processes.
    """

    def __init__(self, model: SystemModel, n_max: int):
        if n_max < model.noon_order:
            raise ValueError(
                f"n_max={n_max} too small for model {model.name!r}: the "
                f"{model.noon_order}-photon subspace requires n_max >= "
                f"{model.noon_order}"
            )
        self.model = model
        self.n_max = int(n_max)
        labels = [
            BasisLabel(qi, n1, n2, q)
            for qi, q in enumerate(model.qd_states)
            for n1 in range(n_max + 1)
            for n2 in range(n_max + 1)
        ]
        labels.sort()  # lexicographic in (qd_order, n1, n2); already is
        self.labels: tuple[BasisLabel, ...] = tuple(labels)
        self.index: dict[BasisLabel, int] = {lab: i for i, lab in enumerate(labels)}
        self.total_excitations = np.array(
            [lab.total_excitation() for lab in labels], dtype=np.int64
        )

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index_of(self, qd_state: str, n1: int, n2: int) -> int:
        qi = self.model.qd_index(qd_state)
        lab = BasisLabel(qi, n1, n2, qd_state)
        try:
            return self.index[lab]
        except KeyError:
            raise ValueError(f"{lab} outside truncation n_max={self.n_max}") from None

    def basis_vector(self, qd_state: str, n1: int, n2: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index_of(qd_state, n1, n2)] = 1.0
        return v

    def vacuum_index(self) -> int:
        return self.index_of("G", 0, 0)

    def sector_indices(self, n_tot: int) -> np.ndarray:
        """Indices of all basis states with total excitation ``n_tot``."""
        return np.where(self.total_excitations == n_tot)[0]

    def sector_labels(self, n_tot: int) -> list[BasisLabel]:
        return [self.labels[i] for i in self.sector_indices(n_tot)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HilbertSpace)
            and other.model is self.model
            and other.n_max == self.n_max
        )

    def __hash__(self) -> int:
        return hash((id(self.model), self.n_max))

    def __repr__(self) -> str:
        return f"HilbertSpace({self.model.name}, n_max={self.n_max}, dim={self.dim})"


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix tagged with the space it acts on."""

    space: HilbertSpace
    mat: np.ndarray

    def __post_init__(self):
        d = self.space.dim
        if self.mat.shape != (d, d):
            raise ValueError(f"matrix shape {self.mat.shape} != ({d}, {d})")

    def dag(self) -> "Operator":
        return Operator(self.space, self.mat.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def expectation(self, rho: np.ndarray) -> complex:
        return complex(np.trace(self.mat @ rho))

    def _check(self, other: "Operator"):
        if other.space != self.space:
            raise ValueError("operators act on different spaces")

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.mat @ other.mat)

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.mat + other.mat)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.mat - other.mat)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.mat * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.mat)


def build_space(model: SystemModel, n_max: int) -> HilbertSpace:
    """Construct the truncated composite space for ``model``.

    ``n_max`` must be at least the target NOON photon number so that the
    N-photon subspace exists.
    """
    return HilbertSpace(model, n_max)


def annihilator(space: HilbertSpace, cavity_index: int) -> Operator:
    """Photon annihilation operator of cavity 1 or 2, <n-1|a|n> = sqrt(n)."""
    if cavity_index not in (1, 2):
        raise ValueError(f"cavity_index must be 1 or 2, got {cavity_index}")
    a = np.zeros((space.dim, space.dim), dtype=complex)
    for i, lab in enumerate(space.labels):
        n = lab.n1 if cavity_index == 1 else lab.n2
        if n == 0:
            continue
        if cavity_index == 1:
            tgt = space.index_of(lab.qd_state, lab.n1 - 1, lab.n2)
        else:
            tgt = space.index_of(lab.qd_state, lab.n1, lab.n2 - 1)
        a[tgt, i] = math.sqrt(n)
    return Operator(space, a)


def projector(space: HilbertSpace, qd_from: str, qd_to: str) -> Operator:
    """``|qd_to><qd_from|`` on the electronic factor, identity on photons."""
    space.model.qd_index(qd_from)
    space.model.qd_index(qd_to)
    p = np.zeros((space.dim, space.dim), dtype=complex)
    for i, lab in enumerate(space.labels):
        if lab.qd_state == qd_from:
            p[space.index_of(qd_to, lab.n1, lab.n2), i] = 1.0
    return Operator(space, p)


def total_excitation_operator(space: HilbertSpace) -> Operator:
    """Diagonal operator counting excitons (weighted) plus photons."""
    return Operator(space, np.diag(space.total_excitations.astype(complex)))


def number_operator(space: HilbertSpace, cavity_index: int) -> Operator:
    a = annihilator(space, cavity_index)
    return Operator(space, a.mat.conj().T @ a.mat)


def embed_sector_vector(
    space: HilbertSpace, sector_indices: Iterable[int], amplitudes: np.ndarray
) -> np.ndarray:
    """Lift a vector given on a sector back to the full space."""
    v = np.zeros(space.dim, dtype=complex)
    for idx, amp in zip(sector_indices, amplitudes):
        v[idx] = amp
    return v
