"""Dense monotone-operator abstractions: resolvents, preconditioned and
saddle resolvents, Yosida regularization, and monotonicity checks.

Everything here acts on finite-dimensional real coordinate vectors
(1-D float ndarrays). Operators are plain square matrices; an operator
``M`` is monotone exactly when its symmetric part is positive
semidefinite, and mu-strongly monotone when that part dominates
``mu * I``.
"""

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

__all__ = [
    "SingularSystemError",
    "InnerSolverError",
    "DenseLinearOperator",
    "Preconditioner",
    "QuadraticSaddle",
    "MonotonicityReport",
    "as_vector",
    "check_monotone",
    "linear_resolvent",
    "resolvent_linear",
    "preconditioned_resolvent_map",
    "preconditioned_resolvent",
    "saddle_resolvent_map",
    "saddle_resolvent",
    "yosida",
    "yosida_apply",
]

# Pivots below this are treated as a singular resolvent system.
PIVOT_TOL = 1e-14


class SingularSystemError(RuntimeError):
    """A resolvent linear system is numerically singular.

    For ``lam > 0`` this cannot happen with a monotone operator, so it
    usually signals a non-monotone input.
    """


class InnerSolverError(RuntimeError):
    """An inner iterative solver hit its iteration cap before reaching
    its tolerance. Carries the best mapping norm achieved."""

    def __init__(self, message, achieved, tol):
        super().__init__(f"{message} (achieved {achieved:.3e}, wanted {tol:.3e})")
        self.achieved = achieved
        self.tol = tol


def as_vector(x):
    """Coerce ``x`` to a finite 1-D float array."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def _check_positive(lam, name="lambda"):
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError(f"{name} must be a positive real, got {lam!r}")
    return float(lam)


def _square_matrix(entries, name="operator"):
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _entries(op):
    """Matrix of ``op``, accepting either an ndarray or an operator object."""
    return op.entries if hasattr(op, "entries") else _square_matrix(op)


class DenseLinearOperator:
    """Square real matrix used as a single-valued operator ``x -> M x``."""

    def __init__(self, entries):
        self.entries = _square_matrix(entries)

    @property
    def dim(self):
        return self.entries.shape[0]

    def __call__(self, x):
        return self.entries @ as_vector(x)

    def symmetric_part(self):
        return 0.5 * (self.entries + self.entries.T)

    def __repr__(self):
        return f"DenseLinearOperator(dim={self.dim})"


class Preconditioner:
    """Symmetric positive-definite matrix defining a weighted inner product."""

    SYMMETRY_TOL = 1e-12

    def __init__(self, entries):
        p = _square_matrix(entries, name="preconditioner")
        if np.max(np.abs(p - p.T)) > self.SYMMETRY_TOL:
            raise ValueError("preconditioner must be symmetric")
        if np.linalg.eigvalsh(0.5 * (p + p.T))[0] <= 0:
            raise ValueError("preconditioner must be positive definite")
        self.entries = p

    @property
    def dim(self):
        return self.entries.shape[0]

    def quad(self, x):
        """Weighted squared norm ``<P x, x>``."""
        x = as_vector(x)
        return float(x @ (self.entries @ x))


class MonotonicityReport:
    """Outcome of a monotonicity check: verdict plus the eigenvalue evidence."""

    __slots__ = ("is_monotone", "min_eigenvalue", "mu")

    def __init__(self, is_monotone, min_eigenvalue, mu):
        self.is_monotone = bool(is_monotone)
        self.min_eigenvalue = float(min_eigenvalue)
        self.mu = float(mu)

    def __bool__(self):
        return self.is_monotone

    def __repr__(self):
        return (f"MonotonicityReport(is_monotone={self.is_monotone}, "
                f"min_eigenvalue={self.min_eigenvalue!r}, mu={self.mu!r})")


def check_monotone(op, mu=0.0):
    """Check (strong) monotonicity of a dense linear operator.

    ``M`` is mu-strongly monotone iff the smallest eigenvalue of its
    symmetric part is at least ``mu``; the check allows a 1e-10 slack.

    Parameters
    ----------
    op : DenseLinearOperator or square ndarray
    mu : float
        Strong-monotonicity modulus to test against (0 tests plain
        monotonicity).

    Returns
    -------
    MonotonicityReport
        Truthy iff the test passes; carries the minimum eigenvalue.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    m = _entries(op)
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])
    return MonotonicityReport(lam_min >= mu - 1e-10, lam_min, mu)


def _factor(system):
    with warnings.catch_warnings():
        # Singularity is handled by the explicit pivot check below.
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(system, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < PIVOT_TOL:
        raise SingularSystemError(
            "resolvent system is singular to working precision; "
            "the operator is likely not monotone")
    return lu, piv


def linear_resolvent(op, lam):
    """Resolvent ``J = (I + lam*M)^{-1}`` of a dense linear operator.

    The system matrix is factored once (dense LU with partial
    pivoting) and reused by every application, so the returned callable
    is cheap inside iteration loops.

    Parameters
    ----------
    op : DenseLinearOperator or square ndarray
    lam : float
        Positive step constant.

    Returns
    -------
    callable
        ``y -> x`` solving ``(I + lam*M) x = y``.

    Raises
    ------
    SingularSystemError
        If the factorization meets a pivot below ``PIVOT_TOL``.
    """
    lam = _check_positive(lam)
    m = _entries(op)
    factors = _factor(np.eye(m.shape[0]) + lam * m)

    def apply(y):
        return lu_solve(factors, as_vector(y), check_finite=False)

    return apply


def resolvent_linear(op, lam, y):
    """One-shot resolvent evaluation ``(I + lam*M)^{-1} y``."""
    return linear_resolvent(op, lam)(y)


def preconditioned_resolvent_map(op, precond, lam):
    """Preconditioned resolvent ``y -> (P + lam*M)^{-1} P y``, factored once."""
    lam = _check_positive(lam)
    if not isinstance(precond, Preconditioner):
        precond = Preconditioner(precond)
    m = _entries(op)
    if m.shape != precond.entries.shape:
        raise ValueError("operator and preconditioner dimensions differ")
    factors = _factor(precond.entries + lam * m)
    p = precond.entries

    def apply(y):
        return lu_solve(factors, p @ as_vector(y), check_finite=False)

    return apply


def preconditioned_resolvent(op, precond, lam, y):
    """One-shot preconditioned resolvent, solving ``(P + lam*M) x = P y``."""
    return preconditioned_resolvent_map(op, precond, lam)(y)


class QuadraticSaddle:
    """Convex-concave quadratic ``phi(u, v) = u'Quu u/2 + a'u + v'K u
    - v'Qvv v/2 - b'v``.

    ``Quu`` and ``Qvv`` must be symmetric positive semidefinite so that
    ``phi`` is convex in ``u`` and concave in ``v``.
    """

    PSD_TOL = 1e-10

    def __init__(self, q_uu, k, q_vv, a=None, b=None):
        self.q_uu = _square_matrix(q_uu, name="Quu")
        self.q_vv = _square_matrix(q_vv, name="Qvv")
        self.k = np.asarray(k, dtype=float)
        if self.k.ndim != 2:
            raise ValueError("coupling matrix K must be 2-D")
        d1, d2 = self.q_uu.shape[0], self.q_vv.shape[0]
        if self.k.shape != (d2, d1):
            raise ValueError(f"K must have shape ({d2}, {d1}), got {self.k.shape}")
        for name, q in (("Quu", self.q_uu), ("Qvv", self.q_vv)):
            if np.max(np.abs(q - q.T)) > Preconditioner.SYMMETRY_TOL:
                raise ValueError(f"{name} must be symmetric")
            if np.linalg.eigvalsh(q)[0] < -self.PSD_TOL:
                raise ValueError(f"{name} must be positive semidefinite")
        self.a = np.zeros(d1) if a is None else as_vector(a)
        self.b = np.zeros(d2) if b is None else as_vector(b)
        if self.a.size != d1 or self.b.size != d2:
            raise ValueError("linear term dimensions disagree with the blocks")

    @property
    def dims(self):
        return self.q_uu.shape[0], self.q_vv.shape[0]

    def value(self, u, v):
        u, v = as_vector(u), as_vector(v)
        return float(0.5 * u @ (self.q_uu @ u) + self.a @ u + v @ (self.k @ u)
                     - 0.5 * v @ (self.q_vv @ v) - self.b @ v)

    def gap(self, u, v, u_star, v_star):
        """Saddle gap ``phi(u, v*) - phi(u*, v)``; nonnegative at a saddle."""
        return self.value(u, v_star) - self.value(u_star, v)

    def stacked_operator(self):
        """Saddle subdifferential as ``(linear part, constant shift)``.

        The operator is ``(u, v) -> [[Quu, K'], [-K, Qvv]] (u, v) + (a, b)``,
        which is monotone because its symmetric part is ``diag(Quu, Qvv)``.
        """
        top = np.hstack([self.q_uu, self.k.T])
        bottom = np.hstack([-self.k, self.q_vv])
        return DenseLinearOperator(np.vstack([top, bottom])), np.concatenate([self.a, self.b])

    def saddle_point(self):
        """Unique stationary point; requires the stacked system to be nonsingular."""
        linear, shift = self.stacked_operator()
        sol = lu_solve(_factor(linear.entries), -shift, check_finite=False)
        d1 = self.q_uu.shape[0]
        return sol[:d1], sol[d1:]


def saddle_resolvent_map(phi, lam):
    """Resolvent of the saddle subdifferential, acting on stacked ``(u, v)``.

    Solves ``(I + lam*T) x = y - lam*(a, b)`` with ``T`` the linear part of
    the saddle operator; the factorization is reused across calls.
    """
    lam = _check_positive(lam)
    linear, shift = phi.stacked_operator()
    factors = _factor(np.eye(linear.dim) + lam * linear.entries)
    offset = lam * shift

    def apply(y):
        return lu_solve(factors, as_vector(y) - offset, check_finite=False)

    return apply


def saddle_resolvent(phi, lam, u_hat, v_hat):
    """Resolve the lam-regularized saddle problem at ``(u_hat, v_hat)``.

    Returns the unique saddle of ``phi(u, v) + ||u - u_hat||^2/(2 lam)
    - ||v - v_hat||^2/(2 lam)``, i.e. the resolvent of the saddle
    subdifferential evaluated at the stacked point.
    """
    d1, _ = phi.dims
    x = saddle_resolvent_map(phi, lam)(np.concatenate([as_vector(u_hat), as_vector(v_hat)]))
    return x[:d1], x[d1:]


def yosida(resolvent, lam):
    """Yosida regularization ``(I - J)/lam`` of the operator behind ``resolvent``.

    ``resolvent`` must be the resolvent of ``lam*M``; the returned map is then
    lam-cocoercive and satisfies ``J(y) = y - lam * M_lam(y)`` exactly.
    """
    lam = _check_positive(lam)

    def apply(y):
        y = as_vector(y)
        return (y - resolvent(y)) / lam

    return apply


def yosida_apply(resolvent, lam, y):
    """One-shot Yosida evaluation ``(y - J(y)) / lam``."""
    return yosida(resolvent, lam)(y)
