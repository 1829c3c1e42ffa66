"""Student-t distribution and independent two-sample t-tests.

The t CDF is computed in-repo through the regularized incomplete beta
function (continued-fraction evaluation), so the statistics path has no
dependency beyond the standard library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import CtxwinError
from .metrics import MetricsReport

_MAX_ITER = 300
_EPS = 1e-15
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz continued fraction for the incomplete beta function
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise CtxwinError(f"incomplete beta failed to converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise CtxwinError(f"beta parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise CtxwinError(f"x must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, df: float) -> float:
    """P(T <= t) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise CtxwinError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0 if t < 0 else 1.0
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return tail if t < 0 else 1.0 - tail


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p_value: float
    alpha: float
    significant: bool
    degenerate: bool = False


def _mean_var(sample: Sequence[float]) -> tuple[float, float]:
    n = len(sample)
    mean = sum(sample) / n
    var = sum((v - mean) ** 2 for v in sample) / (n - 1)
    return mean, var


def two_sample_ttest(
    a: Sequence[float],
    b: Sequence[float],
    variant: str = "pooled",
    alpha: float = 0.05,
) -> TTestResult:
    """Independent two-sample t-test, two-tailed.

    ``pooled`` assumes equal variances (df = na+nb-2); ``welch`` uses the
    Welch-Satterthwaite degrees of freedom.  Two samples with zero variance
    and equal means have an undefined statistic and are reported as a
    degenerate p = 1.0 result.
    """
    if variant not in ("pooled", "welch"):
        raise CtxwinError(f"unknown t-test variant {variant!r}")
    if len(a) < 2 or len(b) < 2:
        raise CtxwinError("each sample needs at least two observations")
    if any(not math.isfinite(v) for v in (*a, *b)):
        raise CtxwinError("samples must be finite")

    na, nb = len(a), len(b)
    mean_a, var_a = _mean_var(a)
    mean_b, var_b = _mean_var(b)

    if variant == "pooled":
        df = float(na + nb - 2)
        pooled_var = ((na - 1) * var_a + (nb - 1) * var_b) / df
        se = math.sqrt(pooled_var * (1.0 / na + 1.0 / nb))
    else:
        va, vb = var_a / na, var_b / nb
        se = math.sqrt(va + vb)
        if va + vb == 0.0:
            df = float(na + nb - 2)
        else:
            df = (va + vb) ** 2 / (va**2 / (na - 1) + vb**2 / (nb - 1))

    diff = mean_a - mean_b
    if se == 0.0:
        if diff == 0.0:
            return TTestResult(
                t=math.nan, df=df, p_value=1.0, alpha=alpha, significant=False, degenerate=True
            )
        t = math.inf if diff > 0 else -math.inf
        return TTestResult(t=t, df=df, p_value=0.0, alpha=alpha, significant=0.0 < alpha)

    t = diff / se
    p = 2.0 * (1.0 - student_t_cdf(abs(t), df))
    p = min(max(p, 0.0), 1.0)
    return TTestResult(t=t, df=df, p_value=p, alpha=alpha, significant=p < alpha)


@dataclass(frozen=True)
class ModelComparison:
    metric: str
    mean_a: float
    mean_b: float
    higher: str  # "a", "b", or "tie"
    ttest: TTestResult


COMPARE_METRICS = ("accuracy", "f1")


def _metric_value(report: MetricsReport, metric: str) -> float:
    if metric == "accuracy":
        return report.accuracy
    if metric == "f1":
        return report.f1_weighted
    raise CtxwinError(f"unknown comparison metric {metric!r}")


def compare_models(
    runs_a: Sequence[MetricsReport],
    runs_b: Sequence[MetricsReport],
    metric: str = "accuracy",
    alpha: float = 0.05,
    variant: str = "pooled",
) -> ModelComparison:
    """Compare two groups of evaluation runs on one metric."""
    if metric not in COMPARE_METRICS:
        raise CtxwinError(f"metric must be one of {COMPARE_METRICS}, got {metric!r}")
    a = [_metric_value(r, metric) for r in runs_a]
    b = [_metric_value(r, metric) for r in runs_b]
    result = two_sample_ttest(a, b, variant=variant, alpha=alpha)
    mean_a = sum(a) / len(a)
    mean_b = sum(b) / len(b)
    higher = "tie" if mean_a == mean_b else ("a" if mean_a > mean_b else "b")
    return ModelComparison(
        metric=metric, mean_a=mean_a, mean_b=mean_b, higher=higher, ttest=result
    )
