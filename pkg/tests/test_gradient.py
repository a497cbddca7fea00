import numpy as np
import pytest

from model.circuit.circuit import Circuit, Layer, Observable, build_random_circuit, template_for
from model.gates.gates import Axis, GellMannGenerator, RotationGate
from model.gradient.gradient import (ParamIndex, finite_difference, first_parameter_index, gradient_samples,
                                     middle_parameter_index, partial_derivative)
from source.verification import random_hermitian
from utils.errors import RangeError


def test_single_qubit_derivative_closed_form():
    theta = 1.1
    gate = RotationGate(GellMannGenerator(Axis.X, 1, 2, 2), theta)
    circuit = Circuit(1, 2, template_for("A"), (Layer((gate,)),))
    # C = cos^2(theta/2)
    expected = -np.sin(theta) / 2
    assert partial_derivative(circuit, Observable.zero_projector(1, 2), ParamIndex(1, 1)) == pytest.approx(
        expected, abs=1e-12)


@pytest.mark.parametrize("label", ["A", "B", "C", "D"])
@pytest.mark.parametrize("n,d,L", [(1, 3, 4), (2, 2, 6), (2, 4, 3), (3, 3, 5)])
def test_analytic_matches_central_difference(label, n, d, L):
    rng = np.random.default_rng(n * 100 + d * 10 + L)
    circuit = build_random_circuit(template_for(label), n, d, L, rng)
    observable = Observable.zero_projector(n, d)
    for q in range(1, n + 1):
        for p in (1, (L + 1) // 2, L):
            k = ParamIndex(q, p)
            analytic = partial_derivative(circuit, observable, k)
            assert abs(analytic - finite_difference(circuit, observable, k)) <= 1e-6
            assert abs(analytic) <= 1.0


def test_dense_observable_gradient_matches_difference():
    rng = np.random.default_rng(21)
    circuit = build_random_circuit(template_for("D"), 2, 3, 4, rng)
    g = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    observable = Observable.dense((g + g.conj().T) / 2)
    k = ParamIndex(2, 3)
    assert partial_derivative(circuit, observable, k) == pytest.approx(
        finite_difference(circuit, observable, k), abs=1e-6)


def test_identity_observable_gradient_is_exactly_zero():
    circuit = build_random_circuit(template_for("C"), 3, 2, 5, np.random.default_rng(3))
    assert partial_derivative(circuit, Observable.identity(3, 2), ParamIndex(2, 2)) == 0.0


def test_parameter_index_range():
    circuit = build_random_circuit(template_for("A"), 2, 2, 3, np.random.default_rng(0))
    observable = Observable.zero_projector(2, 2)
    for k in (ParamIndex(0, 1), ParamIndex(3, 1), ParamIndex(1, 4)):
        with pytest.raises(RangeError):
            partial_derivative(circuit, observable, k)
    with pytest.raises(RangeError):
        finite_difference(circuit, observable, ParamIndex(1, 1), step=0.0)


def test_parameter_index_helpers():
    assert first_parameter_index() == ParamIndex(1, 1)
    assert middle_parameter_index(30) == ParamIndex(1, 15)
    assert middle_parameter_index(7) == ParamIndex(1, 4)
    assert middle_parameter_index(1) == ParamIndex(1, 1)
    with pytest.raises(RangeError):
        middle_parameter_index(0)


def test_derivative_is_linear_in_the_observable():
    rng = np.random.default_rng(33)
    circuit = build_random_circuit(template_for("C"), 2, 3, 5, rng)
    o1, o2 = (random_hermitian(9, rng) for _ in range(2))
    alpha, beta = rng.uniform(-2.0, 2.0, size=2)
    k = ParamIndex(2, 3)
    combined = partial_derivative(circuit, Observable.dense(alpha * o1 + beta * o2), k)
    separate = (alpha * partial_derivative(circuit, Observable.dense(o1), k)
                + beta * partial_derivative(circuit, Observable.dense(o2), k))
    assert abs(combined - separate) <= 1e-9


def test_gradient_samples_do_not_depend_on_thread_count():
    template = template_for("D")
    serial = gradient_samples(template, 2, 3, 6, 24, 42, ParamIndex(1, 1), threads=1)
    pooled = gradient_samples(template, 2, 3, 6, 24, 42, ParamIndex(1, 1), threads=4)
    assert np.array_equal(serial, pooled)
    assert not np.array_equal(serial, gradient_samples(template, 2, 3, 6, 24, 43, ParamIndex(1, 1)))


def test_gradient_samples_rejects_empty_ensemble():
    with pytest.raises(RangeError):
        gradient_samples(template_for("A"), 2, 2, 2, 0, 1, ParamIndex(1, 1))
