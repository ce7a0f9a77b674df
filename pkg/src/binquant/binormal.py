"""Exact analytics for the equal-variance two-normal score model.

Scores form a two-class mixture: negative-class scores are drawn from
N(mu, sigma^2), positive-class scores from N(nu, sigma^2) with mu < nu,
and the positive class carries prior weight p.  Everything downstream
(threshold selection, prevalence estimation) reduces to closed forms
collected here:

* the mixture distribution function and its numerical inverse,
* the positive-class posterior, which is logistic in the score,
* the class-density likelihood ratio, increasing in the score,
* the true/false positive rates of cut-point classifiers.

All functions are pure and the carrier types are immutable.
``std_normal_cdf``, ``std_normal_quantile``, ``mixture_cdf`` and
``mixture_quantile`` accept a float or an ndarray and return a result of
matching shape; everything else is scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "BinormalModel",
    "ThresholdClassifier",
    "Rates",
    "std_normal_cdf",
    "std_normal_quantile",
    "mixture_cdf",
    "mixture_quantile",
    "posterior",
    "likelihood_ratio",
    "classifier_rates",
]

_SQRT2 = math.sqrt(2.0)

# exp() overflows past ~709.8; clamping at +-700 keeps results finite and
# strictly inside (0, 1) / (0, inf) at the extremes.
_EXP_CLAMP = 700.0

# Phi(-40) underflows double precision, so [-40, 40] brackets the standard
# normal quantile for every representable u in (0, 1).
_STD_NORMAL_BRACKET = 40.0

_MAX_BISECT_STEPS = 200


@dataclass(frozen=True)
class BinormalModel:
    """Two-class score population with equal-variance normal components.

    Parameters
    ----------
    mu : float
        Mean of the negative-class score distribution.
    nu : float
        Mean of the positive-class score distribution; must exceed ``mu``
        so that larger scores favour the positive class.
    sigma : float
        Common standard deviation of both components, strictly positive.
    p : float
        Prior probability of the positive class, strictly inside (0, 1).
    """

    mu: float
    nu: float
    sigma: float
    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.nu)):
            raise ValueError("component means must be finite")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if not self.mu < self.nu:
            raise ValueError(
                f"negative-class mean must lie below positive-class mean, "
                f"got mu={self.mu!r}, nu={self.nu!r}"
            )
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"positive prior must lie in (0, 1), got {self.p!r}")


@dataclass(frozen=True)
class ThresholdClassifier:
    """Cut-point rule on the score axis: predict positive iff score > threshold."""

    threshold: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.threshold):
            raise ValueError(f"threshold must be finite, got {self.threshold!r}")

    def predicts_positive(self, score: float) -> bool:
        return score > self.threshold


@dataclass(frozen=True)
class Rates:
    """True and false positive rates of a classifier.

    ``tpr`` is the probability of a positive prediction given a positive
    instance, ``fpr`` the same given a negative instance.
    """

    tpr: float
    fpr: float

    def __post_init__(self) -> None:
        for name, value in (("tpr", self.tpr), ("fpr", self.fpr)):
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")

    @property
    def fnr(self) -> float:
        """False negative rate, 1 - tpr."""
        return 1.0 - self.tpr


def std_normal_cdf(x):
    """Standard normal distribution function Phi.

    Evaluated through the complementary error function,
    Phi(x) = erfc(-x / sqrt(2)) / 2, which is accurate to a few ulp over
    the whole real line.  Accepts a float or an ndarray.
    """
    arr = np.asarray(x, dtype=float)
    out = 0.5 * special.erfc(-arr / _SQRT2)
    return out if np.ndim(x) else float(out)


def _bisect_cdf(cdf, target: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Invert a nondecreasing distribution function by interval halving.

    Requires cdf(lo) <= target <= cdf(hi) elementwise.  Deterministic and
    derivative-free; runs until the brackets are at float resolution.
    """
    for _ in range(_MAX_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        below = cdf(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if float(np.max(hi - lo)) <= 1e-14:
            break
    return 0.5 * (lo + hi)


def std_normal_quantile(u):
    """Inverse of ``std_normal_cdf`` on (0, 1).

    Bracketed bisection on the distribution function; the result x
    satisfies |Phi(x) - u| <= 1e-10 (in practice far tighter).  Accepts a
    float or an ndarray.
    """
    arr = np.asarray(u, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0)):
        raise ValueError("probability level must lie strictly inside (0, 1)")
    lo = np.full(arr.shape, -_STD_NORMAL_BRACKET)
    hi = np.full(arr.shape, _STD_NORMAL_BRACKET)
    out = _bisect_cdf(std_normal_cdf, arr, lo, hi)
    return out if np.ndim(u) else float(out)


def mixture_cdf(model: BinormalModel, x):
    """Distribution function of the score mixture, P[X <= x].

    Weighted combination of the two component distribution functions,
    p * Phi((x - nu) / sigma) + (1 - p) * Phi((x - mu) / sigma).
    Accepts a float or an ndarray.
    """
    arr = np.asarray(x, dtype=float)
    pos = std_normal_cdf((arr - model.nu) / model.sigma)
    neg = std_normal_cdf((arr - model.mu) / model.sigma)
    out = model.p * pos + (1.0 - model.p) * neg
    return out if np.ndim(x) else float(out)


def mixture_quantile(model: BinormalModel, u):
    """Inverse of ``mixture_cdf`` on (0, 1).

    Starts from the bracket [min(mu, nu) - 10 sigma, max(mu, nu) + 10 sigma],
    which already covers all probability levels further than 1e-20 from the
    endpoints, widens it geometrically in the rare case the requested level
    falls outside, then bisects.  The result x satisfies
    |mixture_cdf(x) - u| <= 1e-10.  Accepts a float or an ndarray.
    """
    arr = np.asarray(u, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0)):
        raise ValueError("probability level must lie strictly inside (0, 1)")

    lo = np.full(arr.shape, min(model.mu, model.nu) - 10.0 * model.sigma)
    hi = np.full(arr.shape, max(model.mu, model.nu) + 10.0 * model.sigma)

    step = 10.0 * model.sigma
    for _ in range(_MAX_BISECT_STEPS):
        short = mixture_cdf(model, lo) > arr
        if not np.any(short):
            break
        lo = np.where(short, lo - step, lo)
        step *= 2.0
    step = 10.0 * model.sigma
    for _ in range(_MAX_BISECT_STEPS):
        short = mixture_cdf(model, hi) < arr
        if not np.any(short):
            break
        hi = np.where(short, hi + step, hi)
        step *= 2.0

    out = _bisect_cdf(lambda x: mixture_cdf(model, x), arr, lo, hi)
    return out if np.ndim(u) else float(out)


def _posterior_coefficients(model: BinormalModel) -> tuple[float, float]:
    """Slope and intercept of the posterior log-odds-against, in the score."""
    slope = (model.mu - model.nu) / model.sigma**2
    intercept = (model.nu**2 - model.mu**2) / (2.0 * model.sigma**2) + math.log(
        (1.0 - model.p) / model.p
    )
    return slope, intercept


def posterior(model: BinormalModel, x: float) -> float:
    """Positive-class posterior probability at score x.

    Logistic in the score: 1 / (1 + exp(slope * x + intercept)) with
    slope = (mu - nu) / sigma^2 and
    intercept = (nu^2 - mu^2) / (2 sigma^2) + log((1 - p) / p).
    Strictly increasing, with limits 0 and 1 at -inf and +inf.
    """
    slope, intercept = _posterior_coefficients(model)
    z = slope * x + intercept
    z = min(max(z, -_EXP_CLAMP), _EXP_CLAMP)
    return 1.0 / (1.0 + math.exp(z))


def _score_at_posterior(model: BinormalModel, q: float) -> float:
    """Inverse of ``posterior``: the score at which the posterior equals q in (0, 1)."""
    slope, intercept = _posterior_coefficients(model)
    return (math.log((1.0 - q) / q) - intercept) / slope


def likelihood_ratio(model: BinormalModel, x: float) -> float:
    """Positive-to-negative class density ratio at score x.

    exp((x (nu - mu) - (nu^2 - mu^2) / 2) / sigma^2); strictly increasing
    and equal to 1 at the component-mean midpoint (nu + mu) / 2.
    """
    z = (x * (model.nu - model.mu) - (model.nu**2 - model.mu**2) / 2.0) / model.sigma**2
    z = min(max(z, -_EXP_CLAMP), _EXP_CLAMP)
    return math.exp(z)


def classifier_rates(model: BinormalModel, classifier: ThresholdClassifier) -> Rates:
    """Exact error-rate pair of a cut-point classifier under the model.

    tpr = 1 - Phi((t - nu) / sigma) and fpr = 1 - Phi((t - mu) / sigma);
    both decrease in the threshold and tpr > fpr at every finite threshold
    because nu > mu.
    """
    t = classifier.threshold
    tpr = 1.0 - float(std_normal_cdf((t - model.nu) / model.sigma))
    fpr = 1.0 - float(std_normal_cdf((t - model.mu) / model.sigma))
    return Rates(tpr=tpr, fpr=fpr)
