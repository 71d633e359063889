"""Iteration engines for the proximal point family.

All engines consume a resolvent (any callable ``y -> x``) and return a
:class:`ResidualTrace` holding the iterates, the squared fixed-point
residuals ``||x_i - y_{i-1}||^2``, and, when the initial distance ``R``
to a zero is known, the matching theoretical bound per iteration.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import as_vector

__all__ = [
    "StepCoeffs",
    "ResidualTrace",
    "Momentum",
    "ppm",
    "general_ppm",
    "accelerated_ppm",
    "guler",
    "restarted",
    "optimal_restart_interval",
    "forward_method",
    "ppm_rate_bound",
    "accelerated_rate_bound",
]

_VARIANTS = ("plain", "proposed", "guler1", "guler2")


@dataclass
class StepCoeffs:
    """Lower-triangular step coefficients ``h[i, k]`` for the general
    proximal point method, rows ``i = 1..N-1`` with entries ``k = 1..i``."""

    horizon: int
    table: np.ndarray

    def __post_init__(self):
        n = int(self.horizon)
        if n < 2:
            raise ValueError("horizon must be at least 2")
        t = np.asarray(self.table, dtype=float)
        if t.shape != (n - 1, n - 1):
            raise ValueError(f"table must have shape ({n - 1}, {n - 1}), got {t.shape}")
        if not np.all(np.isfinite(t)):
            raise ValueError("step coefficients must be finite")
        if np.any(np.triu(t, k=1) != 0.0):
            raise ValueError("entries above the diagonal must be zero")
        self.horizon = n
        self.table = t

    def row(self, i):
        """Coefficients ``h[i, 1..i]`` applied when forming ``y_i`` from ``y_{i-1}``."""
        if not 1 <= i <= self.horizon - 1:
            raise ValueError(f"row index {i} outside 1..{self.horizon - 1}")
        return self.table[i - 1, :i]

    @classmethod
    def ppm(cls, horizon):
        """Identity choice ``h[i, i] = 1`` that reduces the general method to PPM."""
        table = np.zeros((horizon - 1, horizon - 1))
        np.fill_diagonal(table, 1.0)
        return cls(horizon, table)


@dataclass
class ResidualTrace:
    """Per-iteration record of a fixed-point iteration.

    ``residuals[i-1]`` is ``||x_i - y_{i-1}||^2`` (plain PPM has
    ``y_i = x_i``). ``xs`` stacks ``x_0..x_n`` and ``ys`` the points fed
    to the resolvent, so ``ys[i-1]`` produced ``xs[i]``. ``restarts``
    lists the global iteration indices after which the engine
    re-initialized.
    """

    iterations: np.ndarray
    residuals: np.ndarray
    bounds: np.ndarray | None
    xs: np.ndarray
    ys: np.ndarray
    restarts: list = field(default_factory=list)

    def __len__(self):
        return len(self.iterations)

    @property
    def final_x(self):
        return self.xs[-1]


class Momentum:
    """Extrapolation state shared by the accelerated engines.

    Variants: ``plain`` (no extrapolation), ``proposed`` (inertia plus the
    correction term that guarantees the 1/i^2 residual rate), ``guler1``
    and ``guler2`` (t-sequence inertia, the second with an extra overshoot
    term). ``reset`` restores the state used at a fresh start.
    """

    def __init__(self, variant):
        if variant not in _VARIANTS:
            raise ValueError(f"unknown variant {variant!r}, expected one of {_VARIANTS}")
        self.variant = variant
        self.reset()

    def reset(self):
        self.i = 0
        self.t = 1.0

    def update(self, x_new, x_old, y_old, y_older):
        """Next extrapolated point from ``x_{i+1}, x_i, y_i, y_{i-1}``."""
        i = self.i
        if self.variant == "plain":
            y = x_new
        elif self.variant == "proposed":
            beta = i / (i + 2)
            y = x_new + beta * (x_new - x_old) - beta * (x_old - y_older)
        else:
            t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * self.t * self.t))
            y = x_new + ((self.t - 1.0) / t_next) * (x_new - x_old)
            if self.variant == "guler2":
                y = y + (self.t / t_next) * (x_new - y_old)
            self.t = t_next
        self.i = i + 1
        return y


def _run(resolvent, x0, iters, variant, interval=None, adaptive=False, bound=None):
    """Shared engine: resolvent applications plus a momentum rule, with
    optional fixed-interval and adaptive restarting."""
    if iters < 1:
        raise ValueError("iteration count must be at least 1")
    if interval is not None and interval < 1:
        raise ValueError("restart interval must be at least 1")
    x0 = as_vector(x0)
    mom = Momentum(variant)
    x = y = y_prev = x0
    xs, ys, residuals, restarts = [x0], [], [], []
    since_restart = 0
    prev_res = None
    for g in range(1, iters + 1):
        x_new = as_vector(resolvent(y))
        diff = x_new - y
        res = float(diff @ diff)
        ys.append(y)
        xs.append(x_new)
        residuals.append(res)
        since_restart += 1
        do_restart = g < iters and (
            (interval is not None and since_restart >= interval)
            or (adaptive and prev_res is not None and res > prev_res))
        if do_restart:
            mom.reset()
            x = y = y_prev = x_new
            restarts.append(g)
            since_restart = 0
            prev_res = None
        else:
            y_new = mom.update(x_new, x, y, y_prev)
            x, y_prev, y = x_new, y, y_new
            prev_res = res
    idx = np.arange(1, iters + 1)
    bounds = None if bound is None else np.array([bound(i) for i in idx])
    return ResidualTrace(idx, np.array(residuals), bounds,
                         np.array(xs), np.array(ys), restarts)


def ppm_rate_bound(R, i):
    """Worst-case PPM residual bound ``(1 - 1/i)^(i-1) R^2 / i``."""
    return (1.0 - 1.0 / i) ** (i - 1) * R * R / i


def accelerated_rate_bound(R, i):
    """Accelerated residual bound ``R^2 / i^2``."""
    return R * R / (i * i)


def ppm(resolvent, x0, iters, R=None):
    """Proximal point method ``x_{i+1} = J(x_i)``.

    Parameters
    ----------
    resolvent : callable
        Resolvent ``J`` of ``lam*M``.
    x0 : array_like
        Starting point.
    iters : int
        Number of resolvent applications.
    R : float, optional
        Known bound on ``||x0 - x*||``; fills the bound column with the
        exact worst-case rate when given.

    Returns
    -------
    ResidualTrace
    """
    bound = None if R is None else (lambda i: ppm_rate_bound(R, i))
    return _run(resolvent, x0, iters, "plain", bound=bound)


def general_ppm(resolvent, coeffs, y0, iters):
    """General proximal point method with arbitrary step coefficients.

    Updates ``x_{i+1} = J(y_i)`` and ``y_{i+1} = y_i + sum_k
    h[i+1, k+1] (x_{k+1} - y_k)``, keeping the whole update history
    (O(iters * dim) memory).
    """
    if iters < 1:
        raise ValueError("iteration count must be at least 1")
    if iters > coeffs.horizon:
        raise ValueError(f"iters = {iters} exceeds the coefficient horizon {coeffs.horizon}")
    y = as_vector(y0)
    xs, ys, residuals = [y], [], []
    updates = []
    for i in range(iters):
        x_new = as_vector(resolvent(y))
        diff = x_new - y
        ys.append(y)
        xs.append(x_new)
        residuals.append(float(diff @ diff))
        updates.append(diff)
        if i == iters - 1:
            break
        row = coeffs.row(i + 1)
        y = y + row @ np.asarray(updates)
    idx = np.arange(1, iters + 1)
    return ResidualTrace(idx, np.array(residuals), None, np.array(xs), np.array(ys))


def accelerated_ppm(resolvent, x0, iters, R=None):
    """Accelerated proximal point method with the correction term.

    Starting from ``x0 = y0 = y_{-1}``, iterates ``x_{i+1} = J(y_i)``,
    ``y_{i+1} = x_{i+1} + i/(i+2) (x_{i+1} - x_i) - i/(i+2) (x_i -
    y_{i-1})``; the residual obeys ``||x_i - y_{i-1}||^2 <= R^2 / i^2``.
    """
    bound = None if R is None else (lambda i: accelerated_rate_bound(R, i))
    return _run(resolvent, x0, iters, "proposed", bound=bound)


def guler(variant, resolvent, x0, iters):
    """Inertia-only accelerated proximal point methods (two classical variants).

    ``variant`` is ``"first"`` or ``"second"``. Both use the t-sequence
    ``t_{i+1} = (1 + sqrt(1 + 4 t_i^2)) / 2`` with ``t_0 = 1``; neither
    carries a residual guarantee for general monotone operators, and the
    first variant can diverge on rotation-like operators.
    """
    names = {"first": "guler1", "second": "guler2"}
    if variant not in names:
        raise ValueError(f"variant must be 'first' or 'second', got {variant!r}")
    return _run(resolvent, x0, iters, names[variant])


def restarted(resolvent, x0, interval, iters, adaptive=False, R=None):
    """Accelerated method restarted every ``interval`` iterations.

    Each restart re-initializes ``x = y = y_prev`` at the last iterate, so
    ``interval = 1`` reduces to the proximal point method and
    ``interval >= iters`` reproduces the un-restarted accelerated run.
    With ``adaptive=True`` a restart is also triggered whenever the
    residual increases between consecutive iterations of an inner run.
    ``interval=None`` is allowed when ``adaptive`` is set.
    """
    if interval is None and not adaptive:
        raise ValueError("a restart interval is required unless adaptive=True")
    bound = None
    if R is not None and interval is not None and interval >= iters and not adaptive:
        bound = lambda i: accelerated_rate_bound(R, i)
    return _run(resolvent, x0, iters, "proposed", interval=interval,
                adaptive=adaptive, bound=bound)


def optimal_restart_interval(lam, mu, mode="operator"):
    """Restart interval minimizing the overall linear rate.

    ``round(e / (lam * mu))`` for the operator residual, half that for
    function-value (saddle gap) restarting, both clamped to >= 1.
    """
    if not lam * mu > 0:
        raise ValueError("lam * mu must be positive")
    if mode == "operator":
        k = math.e / (lam * mu)
    elif mode == "function":
        k = math.e / (2.0 * lam * mu)
    else:
        raise ValueError(f"mode must be 'operator' or 'function', got {mode!r}")
    return max(1, round(k))


def forward_method(operator, beta, y0, iters):
    """Forward iteration ``y_{i+1} = (I - beta*M) y_i`` for a
    beta-cocoercive single-valued ``M``.

    Cocoercivity is the caller's responsibility; for the Yosida map of
    index ``lam`` with ``beta = lam`` this reproduces the proximal point
    method, since ``J = I - lam * M_lam``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")

    def step(y):
        return y - beta * np.asarray(operator(y))

    return _run(step, y0, iters, "plain")
