import json
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from model.gates.gates import (GellMannGenerator, RotationGate, cnot_apply_amplitudes,
                               random_generator, rotation_matrix)
from utils.errors import ConfigError, RangeError, ShapeError, ValidationError
from utils.linalg import DTYPE, basis_projector, check_entry_count, is_hermitian, trace

logger = logging.getLogger(__name__)

NORM_ATOL = 1e-10
IMAG_ATOL = 1e-10


class Entangler(Enum):
    LINEAR = "linear"
    ALL_TO_ALL = "all_to_all"
    NONE = "none"


class Ordering(Enum):
    ROTATIONS_FIRST = "rotations_first"
    ENTANGLER_FIRST = "entangler_first"


DEFAULT_LAYOUT: Dict[str, Tuple[Entangler, Ordering]] = {
    "A": (Entangler.LINEAR, Ordering.ROTATIONS_FIRST),
    "B": (Entangler.LINEAR, Ordering.ENTANGLER_FIRST),
    "C": (Entangler.ALL_TO_ALL, Ordering.ROTATIONS_FIRST),
    "D": (Entangler.ALL_TO_ALL, Ordering.ENTANGLER_FIRST),
}


@dataclass(frozen=True)
class AnsatzTemplate:
    entangler: Entangler
    ordering: Ordering
    label: str = ""

    def entangler_pairs(self, n: int) -> Tuple[Tuple[int, int], ...]:
        """(control, target) pairs in application order."""
        if self.entangler is Entangler.LINEAR:
            return tuple((m, m + 1) for m in range(n - 1))
        if self.entangler is Entangler.ALL_TO_ALL:
            return tuple(combinations(range(n), 2))
        return ()

    def to_dict(self) -> dict:
        """Serialize label, entangler and ordering"""
        return {"label": self.label, "entangler": self.entangler.value, "ordering": self.ordering.value}

    @classmethod
    def from_dict(cls, data: dict) -> "AnsatzTemplate":
        return cls(Entangler(data["entangler"]), Ordering(data["ordering"]), data.get("label", ""))


def parse_layout(raw: Mapping[str, Sequence[str]]) -> Dict[str, Tuple[Entangler, Ordering]]:
    """Layout mapping from config form, e.g. {"A": ["linear", "rotations_first"], ...}."""
    layout = {}
    try:
        for label, (entangler, ordering) in raw.items():
            layout[label] = (Entangler(entangler), Ordering(ordering))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad ansatz layout entry: {e}")
    if len(set(layout.values())) != len(layout):
        raise ConfigError("ansatz labels must map to distinct (entangler, ordering) pairs")
    return layout


def template_for(label: str, layout: Optional[Mapping[str, Tuple[Entangler, Ordering]]] = None) -> AnsatzTemplate:
    layout = DEFAULT_LAYOUT if layout is None else layout
    if label not in layout:
        raise ConfigError(f"unknown ansatz {label!r}; expected one of {sorted(layout)}")
    entangler, ordering = layout[label]
    return AnsatzTemplate(entangler, ordering, label)


@dataclass(frozen=True)
class Layer:
    """One rotation per qudit; the entangler comes from the template"""
    gates: Tuple[RotationGate, ...]


@dataclass(frozen=True)
class Circuit:
    """Sites are 0-based; site 0 is the leftmost tensor factor (most significant digit)"""
    n: int
    qudit_dim: int
    template: AnsatzTemplate
    layers: Tuple[Layer, ...]
    seed: Optional[int] = None

    def __post_init__(self):
        for layer in self.layers:
            if len(layer.gates) != self.n:
                raise ShapeError(f"layer holds {len(layer.gates)} gates for {self.n} qudits")
            if any(g.qudit_dim != self.qudit_dim for g in layer.gates):
                raise ShapeError("all gates must share the register's qudit dimension")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def parameter_count(self) -> int:
        return self.n * self.depth

    @property
    def register_dim(self) -> int:
        return self.qudit_dim ** self.n

    def gate(self, site: int, layer: int) -> RotationGate:
        return self.layers[layer].gates[site]

    def with_angle(self, site: int, layer: int, angle: float) -> "Circuit":
        """Copy with one angle replaced"""
        gates = list(self.layers[layer].gates)
        gates[site] = gates[site].with_angle(angle)
        layers = list(self.layers)
        layers[layer] = Layer(tuple(gates))
        return replace(self, layers=tuple(layers))

    def to_dict(self) -> dict:
        """Serialize template, sizes and every (generator, theta)"""
        return {
            "template": self.template.to_dict(),
            "n": self.n,
            "qudit_dim": self.qudit_dim,
            "L": self.depth,
            "seed": self.seed,
            "layers": [
                [dict(g.generator.to_dict(), theta=g.angle) for g in layer.gates]
                for layer in self.layers
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        layers = tuple(
            Layer(tuple(RotationGate(GellMannGenerator.from_dict(g), float(g["theta"])) for g in row))
            for row in data["layers"]
        )
        return cls(int(data["n"]), int(data["qudit_dim"]), AnsatzTemplate.from_dict(data["template"]),
                   layers, data.get("seed"))


@dataclass(frozen=True, eq=False)
class PureState:
    n: int
    qudit_dim: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.amplitudes.shape != (self.qudit_dim ** self.n,):
            raise ShapeError(f"amplitude vector {self.amplitudes.shape} for {self.n} qudits of dim {self.qudit_dim}")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValidationError(f"state norm {norm!r} differs from 1")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class Observable(object):
    """Hermitian observable on the full register.

    Structured kinds (zero projector, identity) never build the d x d matrix.
    """

    def __init__(self, dim, kind, trace, trace_sq, matrix=None, index=0):
        self.dim = dim
        self.kind = kind
        self.trace = trace
        self.trace_sq = trace_sq
        self._matrix = matrix
        self._index = index

    @classmethod
    def zero_projector(cls, n: int, d: int) -> "Observable":
        return cls(d ** n, "projector", 1, 1)

    @classmethod
    def identity(cls, n: int, d: int) -> "Observable":
        dim = d ** n
        return cls(dim, "identity", dim, dim)

    @classmethod
    def dense(cls, matrix) -> "Observable":
        m = np.asarray(matrix, dtype=DTYPE)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"observable must be square, got {m.shape}")
        tr = float(np.real(trace(m)))
        tr_sq = float(np.real(trace(m @ m)))
        return cls(m.shape[0], "dense", tr, tr_sq, matrix=m)

    @property
    def is_scalar(self) -> bool:
        return self.kind == "identity"

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        if self.kind == "projector":
            return basis_projector(self._index, self.dim)
        check_entry_count(self.dim * self.dim, "identity observable")
        return np.eye(self.dim, dtype=DTYPE)

    def is_hermitian(self) -> bool:
        return self.kind != "dense" or is_hermitian(self._matrix)

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """O acting on the last axis of ``vectors``."""
        if vectors.shape[-1] != self.dim:
            raise ShapeError(f"vector length {vectors.shape[-1]} vs observable dimension {self.dim}")
        if self.kind == "identity":
            return vectors.copy()
        if self.kind == "projector":
            out = np.zeros_like(vectors)
            out[..., self._index] = vectors[..., self._index]
            return out
        return vectors @ self._matrix.T


def initial_state(n: int, d: int) -> PureState:
    """|0...0> on n qudits of dimension d"""
    check_entry_count(d ** n, "register")
    amps = np.zeros(d ** n, dtype=DTYPE)
    amps[0] = 1.0
    return PureState(n, d, amps)


def build_random_circuit(template: AnsatzTemplate, n: int, d: int, L: int,
                         rng: np.random.Generator, seed: Optional[int] = None) -> Circuit:
    if n < 1 or L < 1 or d < 2:
        raise RangeError(f"need n >= 1, L >= 1, d' >= 2; got n={n}, L={L}, d'={d}")
    check_entry_count(d ** n, "register")
    logger.debug("building %s circuit n=%d d=%d L=%d", template.label or template.entangler.value, n, d, L)
    layers = []
    for _ in range(L):
        gates = []
        for _ in range(n):
            gen = random_generator(rng, d)
            gates.append(RotationGate(gen, float(rng.uniform(0.0, 2.0 * np.pi))))
        layers.append(Layer(tuple(gates)))
    return Circuit(n, d, template, tuple(layers), seed)


def apply_site_matrix(amplitudes: np.ndarray, n: int, d: int, site: int, matrix: np.ndarray) -> np.ndarray:
    """Apply a d' x d' matrix to one site by a strided update; leading batch axes allowed."""
    post = d ** (n - 1 - site)
    view = amplitudes.reshape(-1, d, post)
    return (matrix @ view).reshape(amplitudes.shape)


def apply_entangler(amplitudes, pairs, n, d):
    """Apply the CNOT pairs in order"""
    for control, target in pairs:
        amplitudes = cnot_apply_amplitudes(amplitudes, n, d, control, target)
    return amplitudes


def apply_rotations(amplitudes, matrices, n, d):
    """Apply one d x d matrix per site"""
    for site, matrix in enumerate(matrices):
        amplitudes = apply_site_matrix(amplitudes, n, d, site, matrix)
    return amplitudes


def layer_amplitudes(amplitudes: np.ndarray, layer: Layer, template: AnsatzTemplate, n: int, d: int) -> np.ndarray:
    matrices = [rotation_matrix(g) for g in layer.gates]
    pairs = template.entangler_pairs(n)
    if template.ordering is Ordering.ENTANGLER_FIRST:
        return apply_rotations(apply_entangler(amplitudes, pairs, n, d), matrices, n, d)
    return apply_entangler(apply_rotations(amplitudes, matrices, n, d), pairs, n, d)


def apply_layer(state: PureState, layer: Layer, template: AnsatzTemplate) -> PureState:
    """Apply one layer in the template ordering"""
    if len(layer.gates) != state.n or any(g.qudit_dim != state.qudit_dim for g in layer.gates):
        raise ShapeError(f"layer does not fit a register of {state.n} qudits of dim {state.qudit_dim}")
    amps = layer_amplitudes(state.amplitudes, layer, template, state.n, state.qudit_dim)
    return replace(state, amplitudes=amps)


def evolve_amplitudes(circuit: Circuit, amplitudes: np.ndarray, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    stop = circuit.depth if stop is None else stop
    for layer in circuit.layers[start:stop]:
        amplitudes = layer_amplitudes(amplitudes, layer, circuit.template, circuit.n, circuit.qudit_dim)
    return amplitudes


def evolve(circuit: Circuit, state: PureState) -> PureState:
    """Apply every layer of the circuit to state"""
    if state.n != circuit.n or state.qudit_dim != circuit.qudit_dim:
        raise ShapeError(f"circuit ({circuit.n}, {circuit.qudit_dim}) vs state ({state.n}, {state.qudit_dim})")
    return replace(state, amplitudes=evolve_amplitudes(circuit, state.amplitudes))


def expectation(observable: Observable, amplitudes: np.ndarray) -> float:
    value = np.vdot(amplitudes, observable.apply(amplitudes))
    if abs(value.imag) > IMAG_ATOL:
        raise ValidationError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def cost(circuit: Circuit, observable: Observable) -> float:
    """Tr[O U|0><0|U^dag] from the all-zero input"""
    if observable.dim != circuit.register_dim:
        raise ShapeError(f"observable dimension {observable.dim} vs register {circuit.register_dim}")
    if not observable.is_hermitian():
        raise ValidationError("observable is not Hermitian")
    out = evolve(circuit, initial_state(circuit.n, circuit.qudit_dim))
    return expectation(observable, out.amplitudes)
