import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from model.circuit.circuit import DEFAULT_LAYOUT, Observable, build_random_circuit, template_for
from model.gradient.gradient import ParamIndex, finite_difference, partial_derivative, sample_rng
from source.haar_oracle import HaarMoment, mc_lemma1, mc_lemma2, mc_lemma3, mc_mean_gradient

logger = logging.getLogger(__name__)

GRADCHECK_TOL = 1e-6
GRADIENT_BOUND_SLACK = 1e-9
MAX_N = 3
MAX_D = 4
MAX_L = 10
MEAN_GRADIENT_TEMPLATE = "D"
MEAN_GRADIENT_N = 3
MEAN_GRADIENT_L = 30
MEAN_GRADIENT_SAMPLES = 2000


@dataclass(frozen=True)
class GradcheckResult:
    trials: int
    max_error: float
    worst_trial: int
    max_abs_gradient: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance and self.max_abs_gradient <= 1.0 + GRADIENT_BOUND_SLACK


@dataclass(frozen=True)
class LemmaCheck:
    lemma: str
    d: int
    tuple_index: int
    moment: HaarMoment
    bands: float

    @property
    def passed(self) -> bool:
        return self.moment.within(self.bands)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian matrix with unit spectral norm."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2.0
    return h / np.max(np.abs(np.linalg.eigvalsh(h)))


def run_gradcheck(trials: int, seed: int, step: float = 1e-5, tol: float = GRADCHECK_TOL) -> GradcheckResult:
    """Random circuits over every template, n <= 3, d' <= 4, L <= 10.

    Even trials use the zero projector, odd trials a random unit-norm Hermitian
    observable; both have spectral norm 1 so |dC| <= 1.
    """
    labels = sorted(DEFAULT_LAYOUT)
    max_error, worst, max_grad = 0.0, -1, 0.0
    for trial in range(trials):
        rng = sample_rng(seed, trial)
        template = template_for(labels[trial % len(labels)])
        n = int(rng.integers(1, MAX_N + 1))
        d = int(rng.integers(2, MAX_D + 1))
        L = int(rng.integers(1, MAX_L + 1))
        circuit = build_random_circuit(template, n, d, L, rng, seed=seed)
        k = ParamIndex(int(rng.integers(1, n + 1)), int(rng.integers(1, L + 1)))
        if trial % 2 == 0:
            observable = Observable.zero_projector(n, d)
        else:
            observable = Observable.dense(random_hermitian(d ** n, rng))

        analytic = partial_derivative(circuit, observable, k)
        numeric = finite_difference(circuit, observable, k, step)
        error = abs(analytic - numeric)
        if error > max_error:
            max_error, worst = error, trial
        max_grad = max(max_grad, abs(analytic))
    logger.info("gradcheck: %d trials, max |analytic - fd| = %.3e (trial %d)", trials, max_error, worst)
    return GradcheckResult(trials, max_error, worst, max_grad, tol)


def _random_operator(d, rng):
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)


def run_lemma_suite(dims: Sequence[int] = (2, 3, 4), samples: int = 100000, tuples: int = 10,
                    seed: int = 0, bands: float = 3.0,
                    gradient_samples: int = MEAN_GRADIENT_SAMPLES) -> List[LemmaCheck]:
    """Lemma rows per (d, tuple), then one mean-gradient row per d unless gradient_samples is 0."""
    checks = []
    for d in dims:
        for t in range(tuples):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(d, t)))
            a, b, c, dd = (_random_operator(d, rng) for _ in range(4))
            checks.append(LemmaCheck("lemma1", d, t, mc_lemma1(a, b, d, samples, rng), bands))
            checks.append(LemmaCheck("lemma2", d, t, mc_lemma2(a, b, c, dd, d, samples, rng), bands))
            checks.append(LemmaCheck("lemma3", d, t, mc_lemma3(a, b, c, dd, d, samples, rng), bands))
        logger.debug("lemma suite d=%d done", d)
    if gradient_samples:
        template = template_for(MEAN_GRADIENT_TEMPLATE)
        for d in dims:
            moment = mc_mean_gradient(template, MEAN_GRADIENT_N, d, MEAN_GRADIENT_L, gradient_samples, seed)
            checks.append(LemmaCheck("mean_gradient", d, 0, moment, bands))
    return checks
