from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from model.circuit.circuit import (AnsatzTemplate, Circuit, Observable, Ordering, apply_entangler, apply_rotations,
                                   apply_site_matrix, build_random_circuit, cost, evolve_amplitudes,
                                   initial_state)
from model.gates.gates import gell_mann_matrix, rotation_matrix
from utils.errors import RangeError, ShapeError, ValidationError

DEFAULT_FD_STEP = 1e-5


@dataclass(frozen=True)
class ParamIndex:
    """1-based (qudit, layer) address of a rotation angle."""
    qudit: int
    layer: int

    def check(self, circuit: Circuit) -> None:
        if not (1 <= self.qudit <= circuit.n and 1 <= self.layer <= circuit.depth):
            raise RangeError(f"parameter ({self.qudit}, {self.layer}) outside n={circuit.n}, L={circuit.depth}")

    @property
    def site(self) -> int:
        return self.qudit - 1

    @property
    def layer_offset(self) -> int:
        return self.layer - 1


def first_parameter_index() -> ParamIndex:
    """First qudit of the first layer"""
    return ParamIndex(1, 1)


def middle_parameter_index(L: int) -> ParamIndex:
    """First qudit of layer ceil(L/2)"""
    if L < 1:
        raise RangeError(f"circuit depth must be >= 1, got {L}")
    return ParamIndex(1, (L + 1) // 2)


def _check_observable(circuit: Circuit, observable: Observable) -> None:
    if observable.dim != circuit.register_dim:
        raise ShapeError(f"observable dimension {observable.dim} vs register {circuit.register_dim}")
    if not observable.is_hermitian():
        raise ValidationError("observable is not Hermitian")


def partial_derivative(circuit: Circuit, observable: Observable, k: ParamIndex) -> float:
    """Exact dC/dtheta_k by tangent-state propagation.

    dR/dtheta = -(i/2) S R, so the state is evolved through the rotation at k,
    the tangent -(i/2)(I (x) S)|psi> is formed, both vectors run through the
    rest of the circuit together and dC = 2 Re <psi_out| O |tangent_out>.
    """
    k.check(circuit)
    _check_observable(circuit, observable)
    if observable.is_scalar:
        return 0.0

    n, d = circuit.n, circuit.qudit_dim
    template = circuit.template
    p = k.layer_offset
    psi = evolve_amplitudes(circuit, initial_state(n, d).amplitudes, stop=p)

    layer = circuit.layers[p]
    pairs = template.entangler_pairs(n)
    entangler_first = template.ordering is Ordering.ENTANGLER_FIRST
    if entangler_first:
        psi = apply_entangler(psi, pairs, n, d)
    psi = apply_rotations(psi, [rotation_matrix(g) for g in layer.gates], n, d)

    generator = gell_mann_matrix(layer.gates[k.site].generator)
    tangent = apply_site_matrix(psi, n, d, k.site, -0.5j * generator)
    pair = np.stack([psi, tangent])
    if not entangler_first:
        pair = apply_entangler(pair, pairs, n, d)
    pair = evolve_amplitudes(circuit, pair, start=p + 1)

    psi_out, tangent_out = pair
    return float(2.0 * np.real(np.vdot(psi_out, observable.apply(tangent_out))))


def finite_difference(circuit: Circuit, observable: Observable, k: ParamIndex, step: float = DEFAULT_FD_STEP) -> float:
    """Central difference (C(theta + h) - C(theta - h)) / 2h on one angle."""
    if step <= 0:
        raise RangeError(f"finite-difference step must be positive, got {step}")
    k.check(circuit)
    theta = circuit.gate(k.site, k.layer_offset).angle
    plus = cost(circuit.with_angle(k.site, k.layer_offset, theta + step), observable)
    minus = cost(circuit.with_angle(k.site, k.layer_offset, theta - step), observable)
    return (plus - minus) / (2.0 * step)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for one ensemble member, independent of thread scheduling."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def gradient_samples(template: AnsatzTemplate, n: int, d: int, L: int, samples: int, seed: int,
                     k: ParamIndex, observable: Optional[Observable] = None, threads: int = 1) -> np.ndarray:
    """dC at ``k`` over ``samples`` independent random circuits, in sample order."""
    if samples < 1:
        raise RangeError(f"need at least one sample, got {samples}")
    if observable is None:
        observable = Observable.zero_projector(n, d)

    def one(index):
        circuit = build_random_circuit(template, n, d, L, sample_rng(seed, index), seed=seed)
        return partial_derivative(circuit, observable, k)

    if threads is None or threads <= 1:
        values = [one(i) for i in range(samples)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, range(samples)))
    return np.asarray(values, dtype=float)
