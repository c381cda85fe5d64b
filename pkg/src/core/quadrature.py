"""
Numerical quadrature helpers shared by the observables

Two kinds of rules are provided: fixed Gauss-Legendre panels over
caller-supplied breakpoints, used where an integrand is sampled on a
vectorized grid, and adaptive Gauss-Kronrod integration through
scipy.integrate.quad_vec for line integrals with error control.
"""

import logging
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad_vec

from src.core.errors import QuadratureError, QuadratureWarning

logger = logging.getLogger(__name__)

WARN_TOLERANCE = 1e-4
FAIL_TOLERANCE = 1e-2


@dataclass(frozen=True)
class QuadratureResult:
    """Class representing the outcome of a quadrature"""

    value: Any
    error: float
    neval: int = 0
    intervals: int = 0

    @property
    def relative_error(self) -> float:
        scale = float(np.max(np.abs(self.value))) if np.size(self.value) else 0.0
        if scale == 0.0:
            return float(self.error)
        return float(self.error) / scale

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(value=self.value + other.value, error=self.error + other.error,
                                neval=self.neval + other.neval,
                                intervals=self.intervals + other.intervals)


@lru_cache(maxsize=32)
def _leggauss(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def clean_breaks(breaks: Iterable[float], lo: float, hi: float) -> np.ndarray:
    """Sort breakpoints, clip them to [lo, hi] and drop near-duplicates"""
    pts = np.asarray(list(breaks), dtype=float)
    pts = pts[np.isfinite(pts)]
    pts = np.clip(pts, lo, hi)
    pts = np.unique(np.concatenate([pts, [lo, hi]]))
    span = hi - lo
    if span <= 0:
        return np.array([lo, hi])
    keep = np.concatenate([[True], np.diff(pts) > 1e-12 * span])
    pts = pts[keep]
    pts[-1] = hi
    return pts


def gauss_legendre_panels(breaks: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule

    Args:
        breaks: increasing panel boundaries
        order: number of nodes per panel

    Returns:
        Tuple of (nodes, weights), both flat arrays
    """
    breaks = np.asarray(breaks, dtype=float)
    if breaks.size < 2:
        return np.empty(0), np.empty(0)
    x, w = _leggauss(order)
    left, right = breaks[:-1], breaks[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate_panels(f: Callable[[np.ndarray], np.ndarray], breaks: Sequence[float],
                     order: int, label: str = "integral") -> QuadratureResult:
    """Integrate a vectorized integrand on Gauss-Legendre panels

    The error estimate is the difference to the rule with half the nodes.
    The integrand receives a 1-D node array and may return an array whose
    last axis runs over the nodes.
    """
    nodes, weights = gauss_legendre_panels(breaks, order)
    coarse_nodes, coarse_weights = gauss_legendre_panels(breaks, max(order // 2, 2))
    value = np.asarray(f(nodes)) @ weights
    coarse = np.asarray(f(coarse_nodes)) @ coarse_weights
    error = float(np.max(np.abs(value - coarse))) if np.size(value) else 0.0
    result = QuadratureResult(value=value[()] if np.ndim(value) == 0 else value,
                              error=error, neval=nodes.size + coarse_nodes.size,
                              intervals=max(len(breaks) - 1, 0))
    logger.debug("%s: %d panels, error %.3g", label, result.intervals, error)
    return result


def check_result(result: QuadratureResult, label: str, converged: bool = True,
                 warn_tolerance: float = WARN_TOLERANCE,
                 fail_tolerance: float = FAIL_TOLERANCE,
                 atol: float = 1e-10) -> QuadratureResult:
    """Raise or warn when a quadrature result is not trustworthy

    Errors are judged relative to the result, or to atol for results that
    are essentially zero.

    Raises:
        QuadratureError: if the relative error exceeds fail_tolerance
    """
    scale = float(np.max(np.abs(result.value))) if np.size(result.value) else 0.0
    rel = float(result.error) / max(scale, atol)
    if not np.isfinite(rel) or rel > fail_tolerance:
        raise QuadratureError(f"{label} did not converge", estimate=result.value,
                              error=result.error, neval=result.neval,
                              intervals=result.intervals)
    if not converged:
        # the rule stopped early (interval limit or roundoff) but may still be accurate
        logger.debug("%s: stopped before the requested tolerance, relative error %.2e",
                     label, rel)
    if rel > warn_tolerance:
        message = f"{label}: relative error {rel:.2e}"
        logger.warning(message)
        warnings.warn(message, QuadratureWarning, stacklevel=3)
    return result


def _split_complex(f: Callable[[float], Any]) -> Tuple[Callable[[float], np.ndarray], Callable]:
    """Wrap a complex integrand as a real one of twice the length"""
    def real_f(x):
        v = np.atleast_1d(np.asarray(f(x), dtype=complex))
        return np.concatenate([v.real, v.imag])

    def join(v):
        v = np.asarray(v)
        n = v.size // 2
        return v[:n] + 1j * v[n:]

    return real_f, join


def integrate_vector(f: Callable[[float], Any], a: float, b: float,
                     points: Optional[Sequence[float]] = None,
                     epsabs: float = 1e-14, epsrel: float = 1e-9,
                     limit: int = 4000, label: str = "integral",
                     check: bool = True) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integration of a (complex) vector-valued function

    Args:
        f: integrand of one real variable returning a scalar or 1-D array
        a, b: limits, either may be infinite
        points: interior breakpoints for finite limits
        check: apply check_result before returning

    Returns:
        QuadratureResult with a complex value of the integrand's shape
    """
    first = np.asarray(f(0.5 * (a + b)) if np.isfinite(a) and np.isfinite(b) else f(0.0))
    real_f, join = _split_complex(f)
    kwargs = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, norm="max",
                  full_output=True, quadrature="gk21")
    if points is not None and np.isfinite(a) and np.isfinite(b):
        interior = [p for p in points if a < p < b]
        if interior:
            kwargs["points"] = sorted(interior)
    value, error, info = quad_vec(real_f, a, b, **kwargs)
    joined = join(value).reshape(first.shape)
    result = QuadratureResult(value=joined[()] if joined.ndim == 0 else joined,
                              error=float(error), neval=int(info.neval),
                              intervals=len(info.intervals))
    if check:
        check_result(result, label, converged=bool(info.success))
    return result


def integrate_line(f: Callable[[float], Any], lo: float, hi: float,
                   points: Optional[Sequence[float]] = None,
                   epsabs: float = 1e-14, epsrel: float = 1e-9,
                   label: str = "integral") -> QuadratureResult:
    """Integrate over the whole real line

    The window [lo, hi] holds all breakpoints; the two tails are integrated
    separately on semi-infinite intervals.
    """
    parts = [
        integrate_vector(f, -np.inf, lo, epsabs=epsabs, epsrel=epsrel,
                         label=f"{label} (left tail)", check=False),
        integrate_vector(f, lo, hi, points=points, epsabs=epsabs, epsrel=epsrel,
                         label=label, check=False),
        integrate_vector(f, hi, np.inf, epsabs=epsabs, epsrel=epsrel,
                         label=f"{label} (right tail)", check=False),
    ]
    total = QuadratureResult(value=sum(p.value for p in parts),
                             error=sum(p.error for p in parts),
                             neval=sum(p.neval for p in parts),
                             intervals=sum(p.intervals for p in parts))
    return check_result(total, label)
