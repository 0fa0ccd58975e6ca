"""Monte-Carlo studies: factor estimation, efficiency, outlier sensitivity,
and the least-squares fit of the large-n prediction equation.

Every study is deterministic given its configuration.  Work is split into
fixed-size repetition chunks; each chunk owns a Philox substream derived
from (study tag, loop indices, chunk index), and partial results are
reduced in chunk order.  Worker-thread count therefore never affects the
output, only the wall time.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from madkit._kernel import mad0_batch
from madkit.distributions import DistributionSpec, RngStream, derive_stream_id
from madkit.errors import ConfigError, InternalCheckError
from madkit.mad import DEFAULT_MODEL, correction_factor, factor_table, mad_corrected
from madkit.quantiles import (
    HD,
    SM,
    THD_SQRT,
    MedianEstimator,
    Sample,
    hf7_quantile,
    median_weights,
)
from madkit.specfun import normal_quantile

__all__ = [
    "SimulationConfig",
    "FactorRow",
    "FactorReport",
    "EfficiencyRow",
    "EfficiencyReport",
    "SensitivityRow",
    "SensitivityReport",
    "FitResult",
    "estimate_factors",
    "efficiency",
    "sensitivity",
    "fit_prediction",
    "fit_embedded",
]

_FLOAT_FMT = "%.10g"

# Study tags folded into stream derivation so different studies never share
# sample streams under one master seed.
_TAG_FACTORS = 1
_TAG_EFFICIENCY = 2
_TAG_SENSITIVITY = 3


@dataclass(frozen=True)
class SimulationConfig:
    """Shared Monte-Carlo configuration.

    ``chunk_size`` is the repetition count per work unit and is part of the
    reproducibility contract: the same config gives bit-identical reports,
    any thread count.
    """

    sample_sizes: tuple[int, ...]
    repetitions: int
    master_seed: int
    estimators: tuple[MedianEstimator, ...] = (SM, HD, THD_SQRT)
    distributions: tuple[DistributionSpec, ...] = ()
    chunk_size: int = 16384

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "distributions", tuple(self.distributions))
        if not self.sample_sizes:
            raise ConfigError("sample_sizes must not be empty")
        if any(n < 2 for n in self.sample_sizes):
            raise ConfigError("every sample size must be >= 2")
        if self.repetitions < 100:
            raise ConfigError(
                f"repetitions must be >= 100 for a meaningful report, got {self.repetitions}"
            )
        if not self.estimators:
            raise ConfigError("estimators must not be empty")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be positive")


class FactorRow(NamedTuple):
    n: int
    estimator: str
    m_n: float
    c_n: float
    std_error: float
    repetitions: int


class EfficiencyRow(NamedTuple):
    n: int
    var_sm: float
    var_hd: float
    var_thd: float
    e_hd: float
    e_thd: float


class SensitivityRow(NamedTuple):
    distribution: str
    n: int
    estimator: str
    aggregator: str
    dispersion: float


def _csv(header: str, rows: Iterable[tuple]) -> str:
    lines = [header]
    for row in rows:
        cells = []
        for value in row:
            if isinstance(value, float):
                cells.append(_FLOAT_FMT % value)
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FactorReport:
    rows: tuple[FactorRow, ...]
    config: SimulationConfig

    def to_csv(self) -> str:
        return _csv("n,estimator,m_n,c_n,std_error,repetitions", self.rows)

    def factors(self, estimator_label: str) -> dict[int, float]:
        return {r.n: r.c_n for r in self.rows if r.estimator == estimator_label}


@dataclass(frozen=True)
class EfficiencyReport:
    rows: tuple[EfficiencyRow, ...]
    config: SimulationConfig

    def to_csv(self) -> str:
        return _csv("n,var_sm,var_hd,var_thd,e_hd,e_thd", self.rows)


@dataclass(frozen=True)
class SensitivityReport:
    rows: tuple[SensitivityRow, ...]
    config: SimulationConfig

    def to_csv(self) -> str:
        return _csv("distribution,n,estimator,aggregator,dispersion", self.rows)


class FitResult(NamedTuple):
    estimator: str
    alpha: float
    beta: float
    residual_max: float
    n_low: float
    n_high: float

    def to_csv(self) -> str:
        return _csv("estimator,alpha,beta,residual_max,n_low,n_high", [self])

    def predict(self, n: int) -> float:
        q75 = normal_quantile(0.75)
        return 1.0 / (q75 * (1.0 + self.alpha / n + self.beta / (n * n)))


def _chunks(repetitions: int, chunk_size: int) -> list[tuple[int, int]]:
    out = []
    done = 0
    index = 0
    while done < repetitions:
        count = min(chunk_size, repetitions - done)
        out.append((index, count))
        done += count
        index += 1
    return out


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _normal_matrix(config: SimulationConfig, stream_parts: tuple[int, ...], count: int, n: int) -> np.ndarray:
    stream = RngStream(config.master_seed, derive_stream_id(*stream_parts))
    return stream.generator().standard_normal((count, n))


def estimate_factors(config: SimulationConfig, threads: int = 1) -> FactorReport:
    """Estimate C_n = 1 / mean(raw MAD) over standard-normal samples.

    The mean is accumulated per chunk and combined with exact summation;
    the reported std_error is the delta-method propagation of the standard
    error of the mean through the inversion.
    """
    rows = []
    for n in config.sample_sizes:
        for est_index, est in enumerate(config.estimators):
            weights = median_weights(n, est)

            def one_chunk(chunk, n=n, est_index=est_index, weights=weights):
                index, count = chunk
                x = _normal_matrix(config, (_TAG_FACTORS, n, est_index, index), count, n)
                m = mad0_batch(x, weights)
                return float(np.sum(m)), float(np.dot(m, m))

            parts = _map_ordered(one_chunk, _chunks(config.repetitions, config.chunk_size), threads)
            reps = config.repetitions
            total = math.fsum(p[0] for p in parts)
            total_sq = math.fsum(p[1] for p in parts)
            m_n = total / reps
            variance = max(0.0, (total_sq - reps * m_n * m_n) / (reps - 1))
            se_m = math.sqrt(variance / reps)
            c_n = 1.0 / m_n
            rows.append(FactorRow(n, est.label, m_n, c_n, se_m / (m_n * m_n), reps))
    report = FactorReport(tuple(rows), config)
    _check_factor_report(report)
    return report


def _check_factor_report(report: FactorReport) -> None:
    for row in report.rows:
        if not (math.isfinite(row.c_n) and row.c_n > 0.0):
            raise InternalCheckError(f"non-finite factor estimate in row {row}")
        if abs(row.c_n * row.m_n - 1.0) > 1e-12:
            raise InternalCheckError(f"c_n * m_n != 1 in row {row}")


_TRIO = (SM, HD, THD_SQRT)


def efficiency(config: SimulationConfig, threads: int = 1) -> EfficiencyReport:
    """Relative efficiency of the HD- and THD-based MAD against the SM MAD.

    All three estimators are evaluated on the same samples (common random
    numbers), each corrected by the default factor model; efficiency is the
    ratio of estimate variances with SM in the numerator.
    """
    if SM not in config.estimators:
        raise ConfigError("efficiency requires the sm baseline among the estimators")
    rows = []
    for n in config.sample_sizes:
        weights = [median_weights(n, est) for est in _TRIO]
        factors = [correction_factor(n, est) for est in _TRIO]

        def one_chunk(chunk, n=n, weights=weights, factors=factors):
            index, count = chunk
            x = _normal_matrix(config, (_TAG_EFFICIENCY, n, index), count, n)
            stats = []
            for w, f in zip(weights, factors):
                m = mad0_batch(x, w) * f
                stats.append((float(np.sum(m)), float(np.dot(m, m))))
            return stats

        parts = _map_ordered(one_chunk, _chunks(config.repetitions, config.chunk_size), threads)
        reps = config.repetitions
        variances = []
        for j in range(len(_TRIO)):
            total = math.fsum(p[j][0] for p in parts)
            total_sq = math.fsum(p[j][1] for p in parts)
            mean = total / reps
            variances.append(max(0.0, (total_sq - reps * mean * mean) / (reps - 1)))
        var_sm, var_hd, var_thd = variances
        rows.append(
            EfficiencyRow(n, var_sm, var_hd, var_thd, var_sm / var_hd, var_sm / var_thd)
        )
    report = EfficiencyReport(tuple(rows), config)
    for row in report.rows:
        if not all(math.isfinite(v) and v > 0.0 for v in row[1:]):
            raise InternalCheckError(f"degenerate efficiency row {row}")
    return report


_AGGREGATORS = ("sd", "iqr", "mad_sm")


def _aggregate(kind: str, estimates: np.ndarray) -> float:
    if kind == "sd":
        return float(np.std(estimates, ddof=1))
    if kind == "iqr":
        s = Sample(estimates)
        return hf7_quantile(s, 0.75) - hf7_quantile(s, 0.25)
    return mad_corrected(estimates, SM, DEFAULT_MODEL).corrected


def sensitivity(config: SimulationConfig, threads: int = 1) -> SensitivityReport:
    """Dispersion of corrected-MAD estimates across repeated draws.

    For each (distribution, n) the corrected MAD is computed per estimator
    on shared samples; the spread of those estimates is summarized three
    ways (classic SD, type-7 interquartile range, and the corrected
    sample-median MAD).  Light- vs heavy-tailed inputs make the robustness
    differences between the estimators visible.
    """
    if not config.distributions:
        raise ConfigError("sensitivity requires at least one distribution")
    rows = []
    for dist_index, dist in enumerate(config.distributions):
        for n in config.sample_sizes:
            weights = [median_weights(n, est) for est in config.estimators]
            factors = [correction_factor(n, est) for est in config.estimators]

            def one_chunk(chunk, dist=dist, dist_index=dist_index, n=n,
                          weights=weights, factors=factors):
                index, count = chunk
                stream = RngStream(
                    config.master_seed,
                    derive_stream_id(_TAG_SENSITIVITY, dist_index, n, index),
                )
                x = dist.draw(stream.generator(), (count, n))
                return [mad0_batch(x, w) * f for w, f in zip(weights, factors)]

            parts = _map_ordered(one_chunk, _chunks(config.repetitions, config.chunk_size), threads)
            for est_index, est in enumerate(config.estimators):
                estimates = np.concatenate([p[est_index] for p in parts])
                for agg in _AGGREGATORS:
                    value = _aggregate(agg, estimates)
                    if not (math.isfinite(value) and value >= 0.0):
                        raise InternalCheckError(
                            f"bad dispersion for {dist} n={n} {est.label} {agg}: {value}"
                        )
                    rows.append(SensitivityRow(str(dist), n, est.label, agg, value))
    return SensitivityReport(tuple(rows), config)


def fit_prediction(
    factors: Mapping[int, float],
    n_range: tuple[float, float] = (100, 500),
    estimator: str = "",
) -> FitResult:
    """Least-squares fit of C_n = 1 / (qnorm(0.75) * (1 + alpha/n + beta/n^2)).

    Each table value is transformed to A_n = 1/(C_n * qnorm(0.75)) - 1,
    which is linear in (1/n, 1/n^2); ordinary least squares without
    intercept yields (alpha, beta).  ``residual_max`` is the largest
    absolute deviation between fitted and tabulated C_n over the fitted
    points.  Uses sizes with n_low < n <= n_high.
    """
    low, high = n_range
    if low >= high:
        raise ConfigError(f"empty fit range {n_range}")
    ns = np.array(sorted(n for n in factors if low < n <= high), dtype=np.float64)
    if ns.size < 3:
        raise ConfigError(
            f"need at least 3 tabulated sizes in ({low}, {high}], found {ns.size}"
        )
    c = np.array([factors[int(n)] for n in ns])
    q75 = normal_quantile(0.75)
    a_n = 1.0 / (c * q75) - 1.0
    design = np.column_stack([1.0 / ns, 1.0 / (ns * ns)])
    coef, *_ = np.linalg.lstsq(design, a_n, rcond=None)
    alpha, beta = float(coef[0]), float(coef[1])
    predicted = 1.0 / (q75 * (1.0 + design @ coef))
    residual_max = float(np.max(np.abs(predicted - c)))
    return FitResult(estimator, alpha, beta, residual_max, float(low), float(high))


def fit_embedded(estimator_label: str, n_range: tuple[float, float] = (100, 500)) -> FitResult:
    """Fit the prediction equation on a built-in factor table."""
    return fit_prediction(factor_table(estimator_label), n_range, estimator_label)
