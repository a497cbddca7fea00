"""Closed-form gradient-variance predictions for random qudit circuits.

Exact rational arithmetic is used while the register dimension fits a signed
64-bit integer; above that the same expressions are evaluated in floating point.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

from model.circuit.circuit import Observable
from utils.errors import DomainError, ShapeError

EXACT_LIMIT = 2 ** 63 - 1

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class VariancePrediction:
    variance: float
    n: int
    qudit_dim: int
    register_dim: int
    observable_trace: float
    observable_trace_sq: float
    exact: Optional[Fraction] = None


def _register_dim(n: int, d: int) -> int:
    if d < 2:
        raise DomainError(f"qudit dimension must be >= 2, got {d}")
    if n < 1:
        raise DomainError(f"register of {n} qudits has dimension 1; the variance is undefined")
    return d ** n


def _use_exact(dim: int) -> bool:
    return dim <= EXACT_LIMIT


def _number(x: Number, exact: bool):
    if exact:
        return Fraction(x)
    return float(x)


def theorem1_from_traces(trace: Number, trace_sq: Number, n: int, d: int, exact: bool = True):
    """d'^(n-1)/(d+1) * (Tr[O^2]/(d^2-1) - Tr[O]^2/(d(d^2-1)))."""
    dim = _register_dim(n, d)
    exact = exact and _use_exact(dim)
    D = _number(dim, exact)
    tr, tr_sq = _number(trace, exact), _number(trace_sq, exact)
    prefactor = _number(d ** (n - 1), exact) / (D + 1)
    return prefactor * (tr_sq / (D * D - 1) - tr * tr / (D * (D * D - 1)))


def theorem1_variance(observable: Observable, n: int, d: int) -> VariancePrediction:
    dim = _register_dim(n, d)
    if observable.dim != dim:
        raise ShapeError(f"observable dimension {observable.dim} vs d'^n = {dim}")
    value = theorem1_from_traces(observable.trace, observable.trace_sq, n, d)
    exact = value if isinstance(value, Fraction) else None
    # rounding in dense traces can push a zero variance a hair negative
    variance = max(0.0, float(value))
    return VariancePrediction(variance, n, d, dim, float(observable.trace), float(observable.trace_sq), exact)


def corollary1_variance(n: int, d: int, exact: bool = False):
    """1 / (d' (d'^n + 1)^2), the global zero-projector specialisation."""
    dim = _register_dim(n, d)
    if exact and _use_exact(dim):
        return Fraction(1, d * (dim + 1) ** 2)
    return 1.0 / (d * float(dim + 1) ** 2)


def chebyshev_bound(variance: float, delta: float) -> float:
    """Upper bound on Pr(|dC - <dC>| >= delta)."""
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if variance < 0:
        raise DomainError(f"variance must be non-negative, got {variance}")
    return min(1.0, variance / delta ** 2)


def amplification_curve(n: int, dims: Iterable[int]) -> List[Tuple[int, float]]:
    dims = list(dims)
    if not dims:
        raise DomainError("dimension range is empty")
    return [(d, corollary1_variance(n, d)) for d in sorted(dims)]


def generator_spread_at_zero(d: int) -> Fraction:
    """Mean of <0|S^2|0> - <0|S|0>^2 over the random generator draw.

    Only X/Y generators whose pair contains the first level contribute, each with 1.
    """
    if d < 2:
        raise DomainError(f"qudit dimension must be >= 2, got {d}")
    return Fraction(2, 3) * Fraction(2, d)


def boundary_layer_from_traces(trace: Number, trace_sq: Number, n: int, d: int, exact: bool = True):
    """Variance when the differentiated gate acts directly on |0...0> and only
    the remainder of the circuit is a 2-design:
    E[spread] * (Tr[O^2] - Tr[O]^2/d) / (2 (d^2 - 1)).
    """
    dim = _register_dim(n, d)
    exact = exact and _use_exact(dim)
    D = _number(dim, exact)
    tr, tr_sq = _number(trace, exact), _number(trace_sq, exact)
    spread = _number(generator_spread_at_zero(d), exact)
    return spread * (tr_sq - tr * tr / D) / (2 * (D * D - 1))


def boundary_layer_variance(observable: Observable, n: int, d: int) -> float:
    dim = _register_dim(n, d)
    if observable.dim != dim:
        raise ShapeError(f"observable dimension {observable.dim} vs d'^n = {dim}")
    return max(0.0, float(boundary_layer_from_traces(observable.trace, observable.trace_sq, n, d)))


def theorem1_variance_exact(observable: Observable, n: int, d: int) -> Fraction:
    prediction = theorem1_variance(observable, n, d)
    if prediction.exact is None:
        raise DomainError(f"d'^n = {prediction.register_dim} is beyond exact range")
    return prediction.exact


def corollary1_variance_exact(n: int, d: int) -> Fraction:
    value = corollary1_variance(n, d, exact=True)
    if not isinstance(value, Fraction):
        raise DomainError(f"d'^n = {d ** n} is beyond exact range")
    return value


def boundary_layer_variance_exact(observable: Observable, n: int, d: int) -> Fraction:
    value = boundary_layer_from_traces(observable.trace, observable.trace_sq, n, d)
    if not isinstance(value, Fraction):
        raise DomainError(f"d'^n = {d ** n} is beyond exact range")
    return value
