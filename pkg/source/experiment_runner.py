import logging
from dataclasses import dataclass, fields
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from model.circuit.circuit import AnsatzTemplate, Observable
from model.gradient.gradient import ParamIndex, first_parameter_index, gradient_samples
from source.config import ExperimentConfig
from source.haar_oracle import bootstrap_variance_se
from source.theory import corollary1_variance, theorem1_variance
from utils.errors import ConfigError, FitError
from utils.linalg import check_entry_count
from utils.throughput import ThroughputCalc

logger = logging.getLogger(__name__)

DEEP_LAYERS = 25
ZERO_MEAN_BANDS = 5.0
MIN_FIT_POINTS = 3


@dataclass(frozen=True)
class VarianceRecord:
    template: str
    n: int
    d_prime: int
    L: int
    samples: int
    seed: int
    grad_mean: float
    grad_mean_se: float
    grad_var: float
    grad_var_se: float
    theory_var: float
    ratio: float

    @property
    def zero_mean_ok(self) -> bool:
        return abs(self.grad_mean) <= ZERO_MEAN_BANDS * self.grad_mean_se


FIELDNAMES = tuple(f.name for f in fields(VarianceRecord))


class FitAxis(Enum):
    LOG_VARIANCE_VS_N = "log_variance_vs_n"
    LOG_VARIANCE_VS_LOG_DIM = "log_variance_vs_log_d_prime"


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    axis: FitAxis
    d_prime: Optional[int] = None
    n: Optional[int] = None
    L: Optional[int] = None

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared,
                "axis": self.axis.value, "d_prime": self.d_prime, "n": self.n, "L": self.L}


def estimate_variance_cell(template: AnsatzTemplate, n: int, d: int, L: int, samples: int, seed: int,
                           observable: Optional[Observable] = None, k: Optional[ParamIndex] = None,
                           mean_mode: str = "empirical", threads: int = 1,
                           bootstrap_resamples: int = 200) -> VarianceRecord:
    """Gradient mean, variance and their standard errors for one (n, d', L) cell"""
    if samples < 2:
        raise ConfigError(f"a variance cell needs at least 2 samples, got {samples}")
    check_entry_count(d ** n, "register")
    observable = Observable.zero_projector(n, d) if observable is None else observable
    k = first_parameter_index() if k is None else k

    values = gradient_samples(template, n, d, L, samples, seed, k, observable=observable, threads=threads)
    mean = float(np.mean(values))
    mean_se = float(np.std(values, ddof=1) / np.sqrt(samples))
    if mean_mode == "zero":
        variance = float(np.mean(values * values))
    else:
        variance = float(np.var(values, ddof=1))
    variance_se = bootstrap_variance_se(values, seed, mean_mode, bootstrap_resamples)

    theory = theorem1_variance(observable, n, d).variance
    ratio = variance / theory if theory > 0 else float("nan")
    return VarianceRecord(template.label, n, d, L, samples, seed, mean, mean_se, variance, variance_se, theory, ratio)


def _fit(x, y, axis, **labels) -> SlopeFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(x)) < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} distinct points, got {len(np.unique(x))}")
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise FitError("variances must be positive and finite for a log fit")
    result = stats.linregress(x, np.log(y))
    return SlopeFit(float(result.slope), float(result.intercept), float(result.rvalue ** 2), axis, **labels)


def exponential_fit(ns: Sequence[int], variances: Sequence[float], d_prime=None, L=None) -> SlopeFit:
    """ln(variance) against n."""
    return _fit(ns, variances, FitAxis.LOG_VARIANCE_VS_N, d_prime=d_prime, L=L)


def loglog_dimension_fit(records: Sequence[VarianceRecord]) -> Tuple[SlopeFit, List[Tuple[int, float]]]:
    """ln(variance) against ln(d') for records sharing n and L, plus the closed-form reference curve."""
    if not records:
        raise FitError("no records to fit")
    cells = {(r.n, r.L) for r in records}
    if len(cells) != 1:
        raise FitError(f"records span several (n, L) cells: {sorted(cells)}")
    (n, L), = cells
    ordered = sorted(records, key=lambda r: r.d_prime)
    dims = [r.d_prime for r in ordered]
    fit = _fit(np.log(dims), [r.grad_var for r in ordered], FitAxis.LOG_VARIANCE_VS_LOG_DIM, n=n, L=L)
    reference = [(d, corollary1_variance(n, d)) for d in sorted(set(dims))]
    return fit, reference


class ExperimentRunner:
    """Runs the grid described by an ExperimentConfig and collects per-cell flags."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.template = config.ansatz()
        self.throughput = ThroughputCalc(buffer_len=8)
        self.log_messages = []

    def run_cell(self, n: int, d: int, L: int) -> VarianceRecord:
        """Estimate one cell and flag a zero-mean violation"""
        cfg = self.config
        record = estimate_variance_cell(
            self.template, n, d, L, cfg.samples, cfg.seed,
            observable=cfg.make_observable(n, d),
            k=cfg.param_index_for(L),
            mean_mode=cfg.mean_mode,
            threads=cfg.workers,
            bootstrap_resamples=cfg.bootstrap_resamples,
        )
        rate = self.throughput.get(cfg.samples)
        logger.info("cell %s n=%d d'=%d L=%d: var=%.4e (theory %.4e, ratio %.3f) [%.0f samples/s]",
                    record.template, n, d, L, record.grad_var, record.theory_var, record.ratio, rate)
        self._check_zero_mean(record)
        return record

    def _flag(self, message: str) -> None:
        logger.warning(message)
        self.log_messages.append(message)

    def _check_zero_mean(self, record: VarianceRecord) -> None:
        if record.zero_mean_ok:
            return
        depth = "deep" if record.L >= DEEP_LAYERS else "shallow"
        self._flag(f"{depth} cell n={record.n} d'={record.d_prime} L={record.L}: "
                   f"|mean| {abs(record.grad_mean):.3e} > {ZERO_MEAN_BANDS:g} SE ({record.grad_mean_se:.3e})")

    def _check_monotone(self, row: Sequence[VarianceRecord]) -> None:
        for prev, cur in zip(row, row[1:]):
            if cur.grad_var >= prev.grad_var:
                self._flag(f"non-monotone n={cur.n} L={cur.L}: var(d'={cur.d_prime}) {cur.grad_var:.4e} "
                           f">= var(d'={prev.d_prime}) {prev.grad_var:.4e}")

    def sweep_dimension(self) -> List[VarianceRecord]:
        """Every (n, L, d') cell, d' ascending within each (n, L) row"""
        cfg = self.config
        dims = sorted(cfg.d_prime_values)
        records = []
        for n in cfg.n_values:
            for L in cfg.L_values:
                row = [self.run_cell(n, d, L) for d in dims]
                self._check_monotone(row)
                records.extend(row)
        return records

    def sweep_qudits(self) -> Tuple[List[VarianceRecord], List[SlopeFit]]:
        """One n column per (d', L) with its exponential fit"""
        cfg = self.config
        ns = sorted(set(cfg.n_values))
        if len(ns) < MIN_FIT_POINTS:
            raise FitError(f"a qudit sweep needs at least {MIN_FIT_POINTS} n values, got {ns}")
        records, fits = [], []
        for d in cfg.d_prime_values:
            for L in cfg.L_values:
                column = [self.run_cell(n, d, L) for n in ns]
                records.extend(column)
                fit = exponential_fit(ns, [r.grad_var for r in column], d_prime=d, L=L)
                logger.info("d'=%d L=%d: slope %.4f, r^2 %.4f", d, L, fit.slope, fit.r_squared)
                fits.append(fit)
        return records, fits

    def deep_zero_mean_ok(self, records: Sequence[VarianceRecord]) -> bool:
        return all(r.zero_mean_ok for r in records if r.L >= DEEP_LAYERS)

    def get_log_messages(self) -> List[str]:
        """Get accumulated flags and clear the buffer."""
        messages = self.log_messages.copy()
        self.log_messages.clear()
        return messages


def sweep_dimension(config: ExperimentConfig) -> List[VarianceRecord]:
    return ExperimentRunner(config).sweep_dimension()


def sweep_qudits(config: ExperimentConfig) -> Tuple[List[VarianceRecord], List[SlopeFit]]:
    return ExperimentRunner(config).sweep_qudits()
