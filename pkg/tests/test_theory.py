from fractions import Fraction

import numpy as np
import pytest

from model.circuit.circuit import Observable
from source.theory import (amplification_curve, boundary_layer_variance, boundary_layer_variance_exact,
                           chebyshev_bound, corollary1_variance, corollary1_variance_exact, theorem1_variance,
                           theorem1_variance_exact)
from utils.errors import DomainError, ShapeError


@pytest.mark.parametrize("n,d,expected", [
    (3, 2, Fraction(1, 162)),
    (4, 2, Fraction(1, 578)),
    (3, 3, Fraction(1, 2352)),
])
def test_corollary_values(n, d, expected):
    assert corollary1_variance(n, d, exact=True) == expected
    assert corollary1_variance(n, d) == pytest.approx(float(expected), rel=1e-15)


def test_theorem_equals_corollary_exactly_for_projector():
    for n in range(1, 7):
        for d in range(2, 9):
            prediction = theorem1_variance(Observable.zero_projector(n, d), n, d)
            assert prediction.exact == corollary1_variance_exact(n, d)
            assert theorem1_variance_exact(Observable.zero_projector(n, d), n, d) == Fraction(
                1, d * (d ** n + 1) ** 2)


def test_corollary_decreases_in_both_directions():
    for n in range(1, 6):
        for d in range(2, 8):
            assert corollary1_variance(n + 1, d) < corollary1_variance(n, d)
            assert corollary1_variance(n, d + 1) < corollary1_variance(n, d)


def test_identity_observable_has_zero_variance():
    assert theorem1_variance(Observable.identity(3, 2), 3, 2).variance == 0.0
    assert boundary_layer_variance(Observable.identity(2, 3), 2, 3) == 0.0


def test_theorem_is_non_negative_for_random_hermitian():
    rng = np.random.default_rng(17)
    for n, d in [(2, 2), (2, 3), (3, 3), (4, 3), (2, 9)]:
        dim = d ** n
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        prediction = theorem1_variance(Observable.dense((g + g.conj().T) / 2), n, d)
        assert prediction.variance >= 0.0
        assert prediction.register_dim == dim


def test_domain_and_shape_errors():
    with pytest.raises(DomainError):
        corollary1_variance(3, 1)
    with pytest.raises(DomainError):
        theorem1_variance(Observable.zero_projector(1, 1), 1, 1)
    with pytest.raises(ShapeError):
        theorem1_variance(Observable.zero_projector(2, 2), 3, 2)


def test_amplification_curve():
    curve = amplification_curve(3, [4, 2, 3])
    assert [d for d, _ in curve] == [2, 3, 4]
    assert curve[-1][1] == pytest.approx(1 / 16900, rel=1e-12)
    assert all(a[1] > b[1] for a, b in zip(curve, curve[1:]))
    with pytest.raises(DomainError):
        amplification_curve(3, [])


def test_chebyshev_bound():
    assert chebyshev_bound(1 / 162, 0.1) == pytest.approx(100 / 162)
    assert chebyshev_bound(1e-3, 0.1) < chebyshev_bound(2e-3, 0.1)
    assert chebyshev_bound(1e-3, 0.2) < chebyshev_bound(1e-3, 0.1)
    assert chebyshev_bound(1.0, 0.01) == 1.0
    with pytest.raises(DomainError):
        chebyshev_bound(1e-3, 0.0)


@pytest.mark.parametrize("n,d", [(1, 2), (3, 2), (3, 3), (4, 5)])
def test_boundary_layer_projector_value(n, d):
    D = d ** n
    expected = Fraction(2, 3 * d * D * (D + 1))
    assert boundary_layer_variance_exact(Observable.zero_projector(n, d), n, d) == expected
    assert boundary_layer_variance(Observable.zero_projector(n, d), n, d) == pytest.approx(float(expected))


def test_boundary_layer_is_below_theorem_for_qubits():
    for n in range(3, 6):
        ratio = boundary_layer_variance(Observable.zero_projector(n, 2), n, 2) / corollary1_variance(n, 2)
        assert 0.65 < ratio < 0.76
