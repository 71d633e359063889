"""Worst-case certificate machinery for the accelerated step coefficients.

Builds the step-coefficient table that the accelerated method re-derives
in closed form, the Gram-space constraint matrices of the relaxed
worst-case program, and the analytic dual certificate whose slack matrix
collapses to an exact rank-1 outer product (hence is PSD, giving the
``1/N^2`` residual bound without any SDP solver).
"""

from dataclasses import dataclass

import numpy as np

from .methods import StepCoeffs, accelerated_ppm, general_ppm

__all__ = [
    "CertificateReport",
    "ConstraintMatrices",
    "build_h",
    "build_constraint_matrices",
    "constraint_a",
    "constraint_b",
    "constraint_c",
    "dual_multipliers",
    "certificate_slack",
    "verify_certificate",
    "equivalence_check",
]

RANK1_TOL = 1e-12
EIG_TOL = 1e-10


def build_h(n):
    """Step coefficients ``h[i, k] = -2k/(i(i+1))`` off-diagonal and
    ``2i/(i+1)`` on the diagonal, for rows ``i = 1..n-1``.

    Every row sums to one, and the general method driven by this table
    coincides with the accelerated method.
    """
    if n < 2:
        raise ValueError("horizon must be at least 2")
    table = np.zeros((n - 1, n - 1))
    for i in range(1, n):
        for k in range(1, i):
            table[i - 1, k - 1] = -2.0 * k / (i * (i + 1))
        table[i - 1, i - 1] = 2.0 * i / (i + 1)
    return StepCoeffs(n, table)


def _sym_outer(u, v):
    """Symmetrized outer product ``(u v' + v u') / 2``."""
    return 0.5 * (np.outer(u, v) + np.outer(v, u))


def _h_combination(coeffs, e, l):
    """``sum_k h[l+1, k+1] u_{k+1}`` over ``k = 0..l`` in basis ``e``."""
    row = coeffs.row(l + 1)
    return row @ e[:l + 1]


def constraint_a(coeffs, n, i, j):
    """Monotonicity constraint matrix for the iterate pair ``(i, j)``, ``i < j``."""
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= {n}, got ({i}, {j})")
    e = np.eye(n + 1)
    d = e[i - 1] - e[j - 1]
    span = np.zeros(n + 1)
    for l in range(i - 1, j - 1):
        span += _h_combination(coeffs, e, l)
    return _sym_outer(d, d) - _sym_outer(d, span)


def constraint_b(coeffs, n, i):
    """Monotonicity constraint matrix pairing iterate ``i`` with the solution."""
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= {n}, got {i}")
    e = np.eye(n + 1)
    ui = e[i - 1]
    span = np.zeros(n + 1)
    for l in range(i - 1):
        span += _h_combination(coeffs, e, l)
    return np.outer(ui, ui) - _sym_outer(ui, e[n]) + _sym_outer(ui, span)


def constraint_c(n):
    """Initial-distance constraint matrix (1 in the last diagonal entry)."""
    c = np.zeros((n + 1, n + 1))
    c[n, n] = 1.0
    return c


@dataclass
class ConstraintMatrices:
    """Constraint matrices of the Gram-space worst-case program.

    ``A[(i, j)]`` and ``B[i]`` are the monotonicity constraints; ``C`` is
    the initial-distance constraint. The relaxed program keeps only the
    consecutive ``A[(i-1, i)]`` plus ``B[n]``, but the full family is
    available for exploration.
    """

    horizon: int
    A: dict
    B: dict
    C: np.ndarray


def build_constraint_matrices(coeffs, n, relaxed_only=False):
    """Construct the constraint matrices of the worst-case program.

    Parameters
    ----------
    coeffs : StepCoeffs
        Step coefficients with ``coeffs.horizon >= n``.
    n : int
        Number of iterations covered by the program.
    relaxed_only : bool
        Build just the consecutive pairs ``A[(i-1, i)]`` and ``B[n]``
        used by the analytic certificate.
    """
    if n < 2:
        raise ValueError("horizon must be at least 2")
    if coeffs.horizon < n:
        raise ValueError("step coefficients cover fewer iterations than requested")
    if relaxed_only:
        a = {(i - 1, i): constraint_a(coeffs, n, i - 1, i) for i in range(2, n + 1)}
        b = {n: constraint_b(coeffs, n, n)}
    else:
        a = {(i, j): constraint_a(coeffs, n, i, j)
             for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        b = {i: constraint_b(coeffs, n, i) for i in range(1, n + 1)}
    return ConstraintMatrices(n, a, b, constraint_c(n))


def dual_multipliers(n):
    """Closed-form dual multipliers ``(a_2..a_N, b_N, c)``; all nonnegative."""
    if n < 2:
        raise ValueError("horizon must be at least 2")
    a = {i: 2.0 * (i - 1) * i / (n * n) for i in range(2, n + 1)}
    return a, 2.0 / n, 1.0 / (n * n)


def certificate_slack(n):
    """Dual slack matrix ``sum a_i A_{i-1,i} + b_N B_N + c C - u_N u_N'``.

    Feasibility of the analytic multipliers is equivalent to this matrix
    being PSD; it factors exactly as a rank-1 outer product.
    """
    coeffs = build_h(n)
    a, b_n, c = dual_multipliers(n)
    s = np.zeros((n + 1, n + 1))
    for i in range(2, n + 1):
        s += a[i] * constraint_a(coeffs, n, i - 1, i)
    s += b_n * constraint_b(coeffs, n, n)
    s += c * constraint_c(n)
    s[n - 1, n - 1] -= 1.0
    return s


@dataclass
class CertificateReport:
    """Verification summary for one horizon.

    ``max_rank1_deviation`` is the entrywise gap between the slack matrix
    and its predicted rank-1 factor; ``dual_value`` is the certified
    residual bound ``1/N^2``.
    """

    horizon: int
    max_rank1_deviation: float
    min_eigenvalue: float
    dual_value: float

    @property
    def passed(self):
        return (self.max_rank1_deviation <= RANK1_TOL
                and self.min_eigenvalue >= -EIG_TOL)


def verify_certificate(n):
    """Check the analytic dual certificate at horizon ``n``.

    The slack matrix must match ``r r'`` with ``r = u_N - u_{N+1}/N``
    entrywise within 1e-12 and have minimum eigenvalue above -1e-10;
    the certified dual value is ``1/N^2``.
    """
    s = certificate_slack(n)
    r = np.zeros(n + 1)
    r[n - 1] = 1.0
    r[n] = -1.0 / n
    deviation = float(np.max(np.abs(s - np.outer(r, r))))
    min_eig = float(np.linalg.eigvalsh(s)[0])
    return CertificateReport(n, deviation, min_eig, 1.0 / (n * n))


def equivalence_check(resolvent, n, x0):
    """Largest coordinate gap between the general method under ``build_h``
    and the accelerated method, over all iterates of an ``n``-step run."""
    trace_g = general_ppm(resolvent, build_h(n), x0, n)
    trace_a = accelerated_ppm(resolvent, x0, n)
    dev_x = np.max(np.abs(trace_g.xs - trace_a.xs))
    dev_y = np.max(np.abs(trace_g.ys - trace_a.ys))
    return float(max(dev_x, dev_y))
