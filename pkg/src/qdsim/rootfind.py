"""Crossing detection on sampled trajectories.

Scans a sampled scalar series for the first sign change against a
threshold and tightens the bracket by bisection on a caller-supplied
continuous evaluator. Used to locate the onset of instability windows
(where the local contraction rate g(t).n(t) changes sign) and threshold
crossings of derived observables.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, NoCrossingError


def find_crossing(
    evaluate: Callable[[float], float],
    t_lo: float,
    t_hi: float,
    *,
    xtol: float = 1.0,
    max_iter: int = 200,
) -> float:
    """First root of `evaluate` in [t_lo, t_hi] by bisection.

    Requires a sign change over the bracket; an endpoint sitting exactly
    on zero is returned as-is. xtol is an absolute time resolution.
    """
    if not (np.isfinite(t_lo) and np.isfinite(t_hi)) or t_hi <= t_lo:
        raise DomainError("need a finite bracket with t_lo < t_hi")
    if xtol <= 0.0:
        raise DomainError("xtol must be positive")
    f_lo = float(evaluate(t_lo))
    f_hi = float(evaluate(t_hi))
    if f_lo == 0.0:
        return t_lo
    if f_hi == 0.0:
        return t_hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoCrossingError(
            f"no sign change over [{t_lo:g}, {t_hi:g}] (f={f_lo:.3e} .. {f_hi:.3e})"
        )
    lo, hi = t_lo, t_hi
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = float(evaluate(mid))
        if f_mid == 0.0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def instability_onset(
    times: Sequence[float],
    values: Sequence[float],
    evaluate: Optional[Callable[[float], float]] = None,
    *,
    xtol: float = 1.0,
) -> float:
    """Time of the first sign change in a sampled series.

    The sampled grid provides the bracket; when a continuous evaluator is
    given the bracket is refined by bisection, otherwise the crossing is
    linearly interpolated between the bracketing samples.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != v.shape or t.size < 2:
        raise DomainError("times and values must be equal-length 1-d arrays (>= 2)")
    sign = np.sign(v)
    idx = None
    for k in range(1, t.size):
        if sign[k] == 0.0 or (sign[k - 1] != 0.0 and sign[k] != sign[k - 1]):
            idx = k
            break
    if idx is None:
        raise NoCrossingError("series does not change sign")
    if sign[idx] == 0.0 and evaluate is None:
        return float(t[idx])
    if evaluate is not None:
        return find_crossing(evaluate, float(t[idx - 1]), float(t[idx]), xtol=xtol)
    # secant through the bracketing samples
    t0, t1 = t[idx - 1], t[idx]
    v0, v1 = v[idx - 1], v[idx]
    return float(t0 - v0 * (t1 - t0) / (v1 - v0))
