import json

import numpy as np
import pytest

from model.circuit.circuit import (AnsatzTemplate, Circuit, Entangler, Layer, Observable, Ordering, PureState,
                                   apply_layer, apply_site_matrix, build_random_circuit, cost, evolve,
                                   initial_state, layer_amplitudes, parse_layout, template_for)
from model.gates.gates import Axis, GellMannGenerator, QuditCnot, RotationGate, rotation_matrix
from utils.errors import ConfigError, RangeError, ShapeError, ValidationError
from utils.linalg import kron_all, matrices_equal


def random_state(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 3), (4, 3), (2, 9)])
def test_strided_site_update_matches_kron(n, d):
    rng = np.random.default_rng(5)
    amps = random_state(d ** n, rng)
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    for site in range(n):
        factors = [np.eye(d)] * n
        factors[site] = m
        full = kron_all(factors)
        assert matrices_equal(apply_site_matrix(amps, n, d, site, m), full @ amps, atol=1e-9)


def test_entangler_pairs():
    assert template_for("A").entangler_pairs(3) == ((0, 1), (1, 2))
    assert template_for("C").entangler_pairs(3) == ((0, 1), (0, 2), (1, 2))
    assert template_for("D").entangler_pairs(1) == ()


def test_default_layout_and_unknown_label():
    assert template_for("B").ordering is Ordering.ENTANGLER_FIRST
    assert template_for("C").entangler is Entangler.ALL_TO_ALL
    with pytest.raises(ConfigError):
        template_for("E")


def test_custom_layout_swaps_templates():
    layout = parse_layout({"A": ["all_to_all", "entangler_first"], "B": ["linear", "rotations_first"]})
    assert template_for("A", layout).entangler is Entangler.ALL_TO_ALL
    with pytest.raises(ConfigError):
        parse_layout({"A": ["ring", "rotations_first"]})
    with pytest.raises(ConfigError):
        parse_layout({"A": ["linear", "rotations_first"], "B": ["linear", "rotations_first"]})


@pytest.mark.parametrize("label", ["A", "B"])
def test_two_qudit_layer_against_dense_unitary(label):
    d = 3
    rng = np.random.default_rng(8)
    template = template_for(label)
    circuit = build_random_circuit(template, 2, d, 1, rng)
    layer = circuit.layers[0]
    rotations = kron_all([rotation_matrix(g) for g in layer.gates])
    cnot = QuditCnot(d).matrix()
    if template.ordering is Ordering.ROTATIONS_FIRST:
        unitary = cnot @ rotations
    else:
        unitary = rotations @ cnot
    amps = random_state(d * d, rng)
    assert matrices_equal(layer_amplitudes(amps, layer, template, 2, d), unitary @ amps, atol=1e-12)


@pytest.mark.parametrize("label", ["A", "B", "C", "D"])
def test_evolve_preserves_norm(label):
    rng = np.random.default_rng(1)
    circuit = build_random_circuit(template_for(label), 3, 3, 12, rng)
    out = evolve(circuit, initial_state(3, 3))
    assert abs(out.norm() - 1.0) < 1e-10


def test_same_seed_builds_same_circuit():
    a = build_random_circuit(template_for("D"), 3, 4, 5, np.random.default_rng(99), seed=99)
    b = build_random_circuit(template_for("D"), 3, 4, 5, np.random.default_rng(99), seed=99)
    assert a == b
    assert a.parameter_count == 15
    assert a.register_dim == 64


def test_build_rejects_bad_sizes():
    rng = np.random.default_rng(0)
    with pytest.raises(RangeError):
        build_random_circuit(template_for("A"), 0, 2, 3, rng)
    with pytest.raises(RangeError):
        build_random_circuit(template_for("A"), 2, 2, 0, rng)


def test_circuit_json_round_trip():
    circuit = build_random_circuit(template_for("C"), 2, 3, 4, np.random.default_rng(4), seed=4)
    restored = Circuit.from_dict(json.loads(circuit.to_json()))
    assert restored == circuit


def test_single_qubit_cost_is_cos_squared():
    theta = 0.7
    gate = RotationGate(GellMannGenerator(Axis.X, 1, 2, 2), theta)
    circuit = Circuit(1, 2, template_for("A"), (Layer((gate,)),))
    assert cost(circuit, Observable.zero_projector(1, 2)) == pytest.approx(np.cos(theta / 2) ** 2, abs=1e-12)


def test_cost_of_identity_and_projector_bounds():
    circuit = build_random_circuit(template_for("D"), 3, 2, 6, np.random.default_rng(2))
    assert cost(circuit, Observable.identity(3, 2)) == pytest.approx(1.0, abs=1e-12)
    value = cost(circuit, Observable.zero_projector(3, 2))
    assert 0.0 <= value <= 1.0


def test_dense_observable_checks():
    circuit = build_random_circuit(template_for("A"), 2, 2, 2, np.random.default_rng(2))
    with pytest.raises(ValidationError):
        cost(circuit, Observable.dense(np.triu(np.ones((4, 4)))))
    with pytest.raises(ShapeError):
        cost(circuit, Observable.zero_projector(3, 2))


def test_dense_projector_agrees_with_structured():
    circuit = build_random_circuit(template_for("B"), 2, 3, 3, np.random.default_rng(6))
    structured = Observable.zero_projector(2, 3)
    dense = Observable.dense(structured.matrix)
    assert cost(circuit, dense) == pytest.approx(cost(circuit, structured), abs=1e-12)


def test_pure_state_validation():
    with pytest.raises(ValidationError):
        PureState(1, 2, np.array([1.0, 1.0], dtype=complex))
    with pytest.raises(ShapeError):
        PureState(2, 2, np.array([1.0, 0.0], dtype=complex))


def test_apply_layer_rejects_mismatched_register():
    circuit = build_random_circuit(template_for("A"), 2, 2, 1, np.random.default_rng(0))
    with pytest.raises(ShapeError):
        apply_layer(initial_state(3, 2), circuit.layers[0], circuit.template)


def test_negated_reversed_circuit_undoes_rotations():
    template = AnsatzTemplate(Entangler.NONE, Ordering.ROTATIONS_FIRST, "rotations")
    circuit = build_random_circuit(template, 3, 3, 8, np.random.default_rng(13))
    inverse_layers = tuple(Layer(tuple(g.with_angle(-g.angle) for g in layer.gates))
                           for layer in reversed(circuit.layers))
    inverse = Circuit(3, 3, template, inverse_layers)
    start = PureState(3, 3, random_state(27, np.random.default_rng(14)))
    back = evolve(inverse, evolve(circuit, start))
    assert matrices_equal(back.amplitudes, start.amplitudes, atol=1e-9)
