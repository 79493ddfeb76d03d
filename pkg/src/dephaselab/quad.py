"""Certified 1-D quadrature for endpoint-singular and oscillatory integrands.

Two difficulties drive the design: the dephasing integrands behave like
omega**p with p possibly close to -1 at the lower endpoint, and they carry a
(1 - cos(omega*t)) factor that oscillates thousands of times across the
integration range for large t.  Endpoint singularities are removed by the
algebraic substitution omega = a + u**m (m chosen from the declared
exponent); oscillatory ranges are split at period boundaries and the panel
contributions accumulated with compensated summation.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NonIntegrable, NotConverging

__all__ = [
    "IntegrandSpec",
    "QuadResult",
    "integrate",
    "limit_at_infinity",
]

# Gauss(7)/Kronrod(15) nodes and weights on [-1, 1].
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
# Gauss weights sit on the odd Kronrod nodes.
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])

_ABS_FLOOR = 1e-300
_DEFAULT_MAX_EVALS = 2_000_000


@dataclass
class IntegrandSpec:
    """An integrand on (a, b) with optional structure hints.

    endpoint_exponent declares f(omega) ~ omega**p near the lower endpoint
    (p > -1 required); oscillation_frequency declares a (1 - cos(omega*t))
    style factor with the given t.
    """

    evaluator: Callable[[float], float]
    a: float
    b: float
    endpoint_exponent: Optional[float] = None
    oscillation_frequency: Optional[float] = None

    def __post_init__(self):
        if not self.a <= self.b:
            raise ValueError(f"need a <= b, got ({self.a}, {self.b})")


@dataclass
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


def _gk15(f, a, b):
    """One Gauss-Kronrod panel: (kronrod value, error estimate, nevals)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fv = np.array([f(mid + half * x) for x in _XK])
    k15 = half * float(_WK @ fv)
    g7 = half * float(_WG @ fv[1::2])
    return k15, abs(k15 - g7), 15


def _substituted(f, a, width, p):
    """Map (a, a+width) to u in (0, 1) via omega = a + width*u**m.

    m is chosen so the transformed integrand vanishes like u**2 or faster at
    u = 0, making the panel polynomial-friendly for the declared exponent p.
    """
    m = max(1, math.ceil(3.0 / (p + 1.0)))
    if m == 1:
        return None

    def g(u):
        return f(a + width * u**m) * width * m * u ** (m - 1)

    return g


def integrate(spec: IntegrandSpec, tol: float = 1e-8,
              max_evals: int = _DEFAULT_MAX_EVALS) -> QuadResult:
    """Adaptive Gauss-Kronrod integration of ``spec`` to relative tolerance.

    Returns a QuadResult; converged=False (never an exception) when the
    error estimate could not be brought under tol * max(1, |value|) within
    the evaluation budget.  Raises NonIntegrable if the declared endpoint
    exponent is <= -1.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = spec.endpoint_exponent
    if p is not None and p <= -1.0:
        raise NonIntegrable(f"endpoint exponent {p} <= -1")
    a, b = spec.a, spec.b
    if a == b:
        return QuadResult(0.0, 0.0, 0, True)

    # Split at oscillation periods so each segment sees O(1) oscillations.
    t = spec.oscillation_frequency
    edges = [a]
    if t is not None and t > 0 and (b - a) * t > 4.0 * math.pi:
        period = 2.0 * math.pi / t
        edges.extend(np.arange(a + period, b - 0.5 * period, period))
    edges.append(b)

    # Each heap entry: (-error, counter, value, error, lo, hi, func).
    # The first segment may carry a substituted evaluator; its (lo, hi) then
    # live in the substitution variable.
    segments = []
    nev = 0
    counter = 0
    f = spec.evaluator
    for lo, hi in zip(edges[:-1], edges[1:]):
        func = f
        if lo == a and p is not None:
            g = _substituted(f, a, hi - a, p)
            if g is not None:
                func, lo, hi = g, 0.0, 1.0
        val, err, n = _gk15(func, lo, hi)
        nev += n
        segments.append((-err, counter, val, err, lo, hi, func))
        counter += 1
    heapq.heapify(segments)

    def totals():
        vals = [s[2] for s in segments]
        errs = [s[3] for s in segments]
        return math.fsum(vals), math.fsum(errs)

    value, error = totals()
    while nev < max_evals:
        target = max(tol * abs(value), _ABS_FLOOR)
        if error <= target:
            break
        _, _, val, err, lo, hi, func = heapq.heappop(segments)
        mid = 0.5 * (lo + hi)
        v1, e1, n1 = _gk15(func, lo, mid)
        v2, e2, n2 = _gk15(func, mid, hi)
        nev += n1 + n2
        heapq.heappush(segments, (-e1, counter, v1, e1, lo, mid, func))
        counter += 1
        heapq.heappush(segments, (-e2, counter, v2, e2, mid, hi, func))
        counter += 1
        value, error = totals()

    converged = error <= max(tol * max(1.0, abs(value)), _ABS_FLOOR)
    return QuadResult(value, error, nev, converged)


def limit_at_infinity(f: Callable[[float], float],
                      t_grid: Sequence[float]) -> tuple[float, float]:
    """Extrapolate f(t) to t -> infinity over the tail of an ascending grid.

    Fits polynomials in 1/t (degree 1 and 2) to the tail points; the
    degree-2 intercept is the estimate and the spread between fits plus the
    residual scatter gives the uncertainty.  Raises NotConverging when the
    tail differences grow instead of settling.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 4:
        raise ValueError("need an ascending grid of at least 4 points")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly ascending")
    if t[-1] / t[0] < 100.0:
        raise ValueError("t_grid must span at least two decades")

    y = np.array([f(ti) for ti in t], dtype=float)

    # Tail: final decade, but at least 4 points.
    tail = t >= t[-1] / 10.0
    if tail.sum() < 4:
        tail = np.zeros_like(tail)
        tail[-4:] = True
    xt = 1.0 / t[tail]
    yt = y[tail]

    d = np.abs(np.diff(yt))
    if d.size >= 3 and np.all(np.diff(d) > 0) and d[-1] > 10.0 * d[0]:
        raise NotConverging("tail differences are growing")

    c1 = np.polynomial.polynomial.polyfit(xt, yt, 1)
    deg2 = 2 if xt.size >= 6 else 1
    c2 = np.polynomial.polynomial.polyfit(xt, yt, deg2)
    est = float(c2[0])
    resid = yt - np.polynomial.polynomial.polyval(xt, c2)
    uncertainty = abs(float(c2[0]) - float(c1[0])) + float(np.std(resid)) \
        + abs(est - float(yt[-1])) * 1e-2
    return est, uncertainty
