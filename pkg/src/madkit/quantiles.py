"""Median and quantile estimators built on weighted order statistics.

Three estimators are provided:

* ``SM`` -- the classic sample median, equivalently the Hyndman-Fan type 7
  quantile at p = 0.5 (middle order statistic, or the mean of the two
  middle ones for even n).
* ``HD`` -- the Harrell-Davis estimator: a weighted sum of *all* order
  statistics, with weights taken from consecutive differences of the
  Beta((n+1)p, (n+1)(1-p)) CDF.  Efficient, but a single wild observation
  can drag it anywhere (breakdown point 0).
* ``THD`` -- the trimmed Harrell-Davis estimator: the HD weights restricted
  to the highest-density interval of the weight-generating Beta
  distribution and renormalized.  ``THD_SQRT`` uses interval width
  1/sqrt(n), a practical efficiency/robustness compromise.

All estimators consume a :class:`Sample`, which sorts and validates its
data once at construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from madkit.errors import DomainError, SampleError
from madkit.specfun import BetaParams, beta_pdf, reg_inc_beta

__all__ = [
    "Sample",
    "MedianEstimator",
    "QuantileWeights",
    "SM",
    "HD",
    "THD_SQRT",
    "thd",
    "parse_estimator",
    "hf7_quantile",
    "hd_weights",
    "hd_quantile",
    "beta_hdi",
    "thd_weights",
    "thd_quantile",
    "median",
    "median_weights",
]

_HDI_EPS = 1e-9
_HDI_TOL = 1e-9


class Sample:
    """An immutable sorted sample of finite reals.

    Input order is irrelevant to every estimator, so values are sorted
    ascending once here.  Non-finite entries are rejected.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[float]):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if arr.size and not np.isfinite(arr).all():
            raise DomainError("sample values must be finite (no NaN or infinity)")
        arr = np.sort(arr)
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        """Sorted values as a read-only float64 array."""
        return self._values

    @property
    def n(self) -> int:
        return self._values.size

    def __len__(self) -> int:
        return self._values.size

    def __repr__(self) -> str:
        return f"Sample(n={self.n})"


SampleLike = Union[Sample, Iterable[float]]


def as_sample(x: SampleLike) -> Sample:
    return x if isinstance(x, Sample) else Sample(x)


@dataclass(frozen=True)
class MedianEstimator:
    """Identifies a median estimator: 'sm', 'hd', or 'thd'.

    For 'thd', ``width`` is the highest-density-interval width; ``None``
    means the 1/sqrt(n) rule resolved at call time (the THD-SQRT variant).
    """

    kind: str
    width: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("sm", "hd", "thd"):
            raise DomainError(f"unknown estimator kind {self.kind!r}")
        if self.width is not None:
            if self.kind != "thd":
                raise DomainError("width applies to the thd estimator only")
            if not (0.0 < self.width <= 1.0):
                raise DomainError(f"thd width must lie in (0, 1], got {self.width}")

    def resolve_width(self, n: int) -> float:
        if self.width is not None:
            return self.width
        return 1.0 / math.sqrt(n)

    @property
    def label(self) -> str:
        if self.kind != "thd":
            return self.kind
        if self.width is None:
            return "thd-sqrt"
        return f"thd({self.width:g})"

    def __str__(self) -> str:
        return self.label


SM = MedianEstimator("sm")
HD = MedianEstimator("hd")
THD_SQRT = MedianEstimator("thd")


def thd(width: float) -> MedianEstimator:
    """A trimmed Harrell-Davis estimator with a fixed interval width."""
    return MedianEstimator("thd", float(width))


def parse_estimator(text: str) -> MedianEstimator:
    """Parse 'sm' / 'hd' / 'thd-sqrt' / 'thd(0.25)' into an estimator."""
    s = text.strip().lower()
    if s == "sm":
        return SM
    if s == "hd":
        return HD
    if s in ("thd", "thd-sqrt", "thd_sqrt"):
        return THD_SQRT
    if s.startswith("thd(") and s.endswith(")"):
        try:
            return thd(float(s[4:-1]))
        except ValueError as exc:
            raise DomainError(f"bad thd width in {text!r}") from exc
    raise DomainError(f"unknown estimator {text!r} (expected sm, hd, thd-sqrt, or thd(w))")


@dataclass(frozen=True)
class QuantileWeights:
    """Per-order-statistic weights with their generating Beta parameters.

    ``hdi`` is (left, right, width) for trimmed weights, ``None`` otherwise.
    Weights are nonnegative and sum to 1.
    """

    weights: np.ndarray
    params: BetaParams
    hdi: Optional[tuple[float, float, float]] = None


def _require_nonempty(x: Sample) -> None:
    if x.n == 0:
        raise SampleError("estimate requires a nonempty sample")


def _check_open_prob(p: float) -> None:
    if not (0.0 < p < 1.0):
        raise DomainError(f"quantile order p must lie strictly in (0, 1), got {p}")


def hf7_quantile(x: SampleLike, p: float) -> float:
    """Hyndman-Fan type 7 sample quantile (linear order-statistic interpolation).

    At p = 0.5 this is exactly the classic sample median.
    """
    x = as_sample(x)
    _require_nonempty(x)
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"quantile order p must lie in [0, 1], got {p}")
    v = x.values
    n = x.n
    if p == 0.5:
        # Exact median forms, so SM agrees bitwise with weighted-sum medians
        # that collapse onto the same order statistics.
        mid = n // 2
        return float(v[mid]) if n % 2 else float(0.5 * (v[mid - 1] + v[mid]))
    h = (n - 1) * p
    i = int(math.floor(h))
    if i >= n - 1:
        return float(v[n - 1])
    g = h - i
    return float(v[i] + g * (v[i + 1] - v[i]))


def _hd_params(n: int, p: float) -> BetaParams:
    return BetaParams((n + 1) * p, (n + 1) * (1.0 - p))


def _symmetrize(w: np.ndarray) -> np.ndarray:
    # The exact weights at p = 0.5 are symmetric; averaging with the reversal
    # removes solver round-off so structural identities (e.g. the n = 2
    # collapse) hold bitwise.
    return 0.5 * (w + w[::-1])


def hd_weights(n: int, p: float) -> QuantileWeights:
    """Harrell-Davis weights: consecutive Beta CDF differences on the i/n grid."""
    if n < 1:
        raise SampleError(f"need n >= 1, got {n}")
    _check_open_prob(p)
    params = _hd_params(n, p)
    cdf = np.empty(n + 1)
    for i in range(n + 1):
        cdf[i] = reg_inc_beta(i / n, params)
    w = np.diff(cdf)
    if p == 0.5:
        w = _symmetrize(w)
    w.flags.writeable = False
    return QuantileWeights(w, params)


def hd_quantile(x: SampleLike, p: float) -> float:
    """Harrell-Davis quantile estimate: weighted sum of all order statistics."""
    x = as_sample(x)
    _require_nonempty(x)
    w = hd_weights(x.n, p)
    return float(np.dot(w.weights, x.values))


def beta_hdi(params: BetaParams, width: float) -> Optional[tuple[float, float]]:
    """Highest density interval of given width for Beta(alpha, beta).

    Returns ``None`` in the degenerate case (both shapes below 1, density
    bathtub-shaped, no unique interval); callers fall back to untrimmed
    weights.  Border cases pin the interval to the support edge; otherwise
    the left endpoint solves pdf(l) = pdf(l + width) by bisection to 1e-9.
    """
    if not (0.0 < width <= 1.0):
        raise DomainError(f"width must lie in (0, 1], got {width}")
    a, b = params.alpha, params.beta
    if a < 1.0 + _HDI_EPS and b < 1.0 + _HDI_EPS:
        return None
    if a < 1.0 + _HDI_EPS and b > 1.0:
        return (0.0, width)
    if a > 1.0 and b < 1.0 + _HDI_EPS:
        return (1.0 - width, 1.0)
    if width > 1.0 - _HDI_EPS:
        return (0.0, 1.0)
    mode = (a - 1.0) / (a + b - 2.0)
    if a == b:
        # Symmetric density: the interval is centered, exactly.
        left = 0.5 * (1.0 - width)
        return (left, left + width)
    lo = max(0.0, mode - width)
    hi = min(mode, 1.0 - width)
    if hi <= lo:
        return (lo, lo + width)

    def f(left: float) -> float:
        return beta_pdf(left, params) - beta_pdf(left + width, params)

    flo = f(lo)
    # f is increasing across [lo, hi]: the density at the left endpoint starts
    # below the right endpoint's and ends above it as the window slides left.
    while hi - lo > _HDI_TOL:
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0.0) == (flo < 0.0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    left = 0.5 * (lo + hi)
    return (left, left + width)


def thd_weights(n: int, p: float, width: float) -> QuantileWeights:
    """Trimmed Harrell-Davis weights.

    The Beta CDF is clamped to the highest-density interval [L, R] and
    renormalized; only order statistics with index in (floor(L*n),
    ceil(R*n)] receive mass.  Degenerate HDI falls back to the untrimmed
    weights.
    """
    if n < 1:
        raise SampleError(f"need n >= 1, got {n}")
    _check_open_prob(p)
    params = _hd_params(n, p)
    hdi = beta_hdi(params, width)
    if hdi is None:
        return hd_weights(n, p)
    left, right = hdi
    cdf_left = reg_inc_beta(left, params)
    cdf_right = reg_inc_beta(right, params)
    denom = cdf_right - cdf_left
    ileft = math.floor(left * n)
    iright = math.ceil(right * n)
    w = np.zeros(n)
    prev = 0.0
    for i in range(ileft + 1, iright + 1):
        v = min(max(i / n, left), right)
        c = (reg_inc_beta(v, params) - cdf_left) / denom
        w[i - 1] = c - prev
        prev = c
    if p == 0.5:
        w = _symmetrize(w)
    w.flags.writeable = False
    return QuantileWeights(w, params, hdi=(left, right, right - left))


def thd_quantile(x: SampleLike, p: float, width: Optional[float] = None) -> float:
    """Trimmed Harrell-Davis quantile estimate; width defaults to 1/sqrt(n)."""
    x = as_sample(x)
    _require_nonempty(x)
    if width is None:
        width = 1.0 / math.sqrt(x.n)
    w = thd_weights(x.n, p, width)
    return float(np.dot(w.weights, x.values))


def median(x: SampleLike, kind: MedianEstimator = SM) -> float:
    """Median estimate using the chosen estimator."""
    x = as_sample(x)
    _require_nonempty(x)
    if kind.kind == "sm":
        return hf7_quantile(x, 0.5)
    if kind.kind == "hd":
        return hd_quantile(x, 0.5)
    return thd_quantile(x, 0.5, kind.resolve_width(x.n))


def median_weights(n: int, kind: MedianEstimator = SM) -> np.ndarray:
    """Weight vector w such that median(x, kind) == dot(w, sorted(x)).

    Every estimator's median is a fixed weighted sum of order statistics;
    this is what the batch simulation kernel consumes.
    """
    if n < 1:
        raise SampleError(f"need n >= 1, got {n}")
    if kind.kind == "sm":
        w = np.zeros(n)
        mid = n // 2
        if n % 2:
            w[mid] = 1.0
        else:
            w[mid - 1] = w[mid] = 0.5
        w.flags.writeable = False
        return w
    if kind.kind == "hd":
        return hd_weights(n, 0.5).weights
    return thd_weights(n, 0.5, kind.resolve_width(n)).weights
