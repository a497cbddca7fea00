import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from model.gradient.gradient import first_parameter_index, gradient_samples
from utils.errors import ShapeError, SingularCoefficientError
from utils.linalg import DTYPE, as_matrix, trace

logger = logging.getLogger(__name__)

CHUNK = 20000
BOOTSTRAP_RESAMPLES = 200


@dataclass(frozen=True)
class HaarMoment:
    estimate: complex
    standard_error: float
    closed_form: complex
    samples: int

    @property
    def deviation(self) -> float:
        return abs(self.estimate - self.closed_form)

    def within(self, bands: float = 3.0, atol: float = 1e-9) -> bool:
        return self.deviation <= bands * self.standard_error + atol * max(1.0, abs(self.closed_form))


def _ginibre(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Ginibre -> QR -> column phases fixed so diag(R) is real positive"""
    if d < 1:
        raise ShapeError(f"dimension must be >= 1, got {d}")
    q, r = linalg.qr(_ginibre(rng, (d, d)))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def sample_haar_unitaries(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar unitaries stacked along axis 0."""
    if d < 1:
        raise ShapeError(f"dimension must be >= 1, got {d}")
    q, r = np.linalg.qr(_ginibre(rng, (count, d, d)))
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def _square(m, d, name):
    m = as_matrix(m)
    if m.shape != (d, d):
        raise ShapeError(f"{name} has shape {m.shape}, expected ({d}, {d})")
    return m


def _conjugate(w, a):
    # W A W^dag for a stack of W
    return w @ a @ np.conj(np.swapaxes(w, -1, -2))


def _moment(values, closed_form, samples) -> HaarMoment:
    values = np.asarray(values, dtype=DTYPE)
    mean = complex(np.mean(values))
    if samples > 1:
        spread = np.sum(np.abs(values - mean) ** 2) / (samples - 1)
        se = float(np.sqrt(spread / samples))
    else:
        se = 0.0
    return HaarMoment(mean, se, complex(closed_form), samples)


def _collect(d, samples, rng, integrand):
    chunks = []
    remaining = samples
    while remaining > 0:
        count = min(CHUNK, remaining)
        chunks.append(integrand(sample_haar_unitaries(d, count, rng)))
        remaining -= count
    return np.concatenate(chunks)


def lemma1_closed_form(a, b, d: int) -> complex:
    """Tr[A]Tr[B]/d"""
    return trace(a) * trace(b) / d


def lemma2_closed_form(a, b, c, dd, d: int) -> complex:
    """Haar second moment of Tr[WAW^dag B] Tr[WCW^dag D]."""
    if d < 2:
        raise SingularCoefficientError("second-moment coefficients need d >= 2")
    ta, tb, tc, td = trace(a), trace(b), trace(c), trace(dd)
    tac, tbd = trace(a @ c), trace(b @ dd)
    return ((ta * tb * tc * td + tac * tbd) / (d * d - 1)
            - (tac * tb * td + ta * tc * tbd) / (d * (d * d - 1)))


def lemma3_closed_form(a, b, c, dd, d: int) -> complex:
    """Haar average of the single trace Tr[WAW^dag B WCW^dag D]."""
    if d < 2:
        raise SingularCoefficientError("second-moment coefficients need d >= 2")
    ta, tb, tc, td = trace(a), trace(b), trace(c), trace(dd)
    tac, tbd = trace(a @ c), trace(b @ dd)
    return ((ta * tc * tbd + tac * tb * td) / (d * d - 1)
            - (tac * tbd + ta * tb * tc * td) / (d * (d * d - 1)))


def mc_lemma1(a, b, d: int, samples: int, rng: np.random.Generator) -> HaarMoment:
    a, b = _square(a, d, "A"), _square(b, d, "B")

    def integrand(w):
        return np.einsum("sij,ji->s", _conjugate(w, a), b)

    return _moment(_collect(d, samples, rng, integrand), lemma1_closed_form(a, b, d), samples)


def mc_lemma2(a, b, c, dd, d: int, samples: int, rng: np.random.Generator) -> HaarMoment:
    a, b, c, dd = (_square(m, d, name) for m, name in zip((a, b, c, dd), "ABCD"))
    closed = lemma2_closed_form(a, b, c, dd, d)

    def integrand(w):
        first = np.einsum("sij,ji->s", _conjugate(w, a), b)
        second = np.einsum("sij,ji->s", _conjugate(w, c), dd)
        return first * second

    return _moment(_collect(d, samples, rng, integrand), closed, samples)


def mc_lemma3(a, b, c, dd, d: int, samples: int, rng: np.random.Generator) -> HaarMoment:
    a, b, c, dd = (_square(m, d, name) for m, name in zip((a, b, c, dd), "ABCD"))
    closed = lemma3_closed_form(a, b, c, dd, d)

    def integrand(w):
        left = _conjugate(w, a) @ b
        right = _conjugate(w, c) @ dd
        return np.einsum("sij,sji->s", left, right)

    return _moment(_collect(d, samples, rng, integrand), closed, samples)


def mc_mean_gradient(template, n: int, d: int, L: int, samples: int, seed: int,
                     observable=None, threads: int = 1) -> HaarMoment:
    """Ensemble mean of the (1,1) derivative; the closed form is 0."""
    values = gradient_samples(template, n, d, L, samples, seed, first_parameter_index(),
                              observable=observable, threads=threads)
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    logger.debug("mean gradient %s n=%d d=%d L=%d: %.3e +- %.3e", template.label, n, d, L, mean, se)
    return HaarMoment(mean, se, 0.0, samples)


def variance_statistic(mean_mode: str):
    if mean_mode == "zero":
        return lambda x, axis=-1: np.mean(x * x, axis=axis)
    return lambda x, axis=-1: np.var(x, ddof=1, axis=axis)


def bootstrap_variance_se(values, seed: int, mean_mode: str = "empirical",
                          resamples: int = BOOTSTRAP_RESAMPLES) -> float:
    """Nonparametric bootstrap standard error of the variance estimate."""
    values = np.asarray(values, dtype=float)
    if np.all(values == values[0]):
        return 0.0
    result = stats.bootstrap((values,), variance_statistic(mean_mode), n_resamples=resamples,
                             vectorized=True, method="percentile",
                             random_state=np.random.default_rng(seed))
    return float(result.standard_error)
