"""Accelerated splitting methods derived from the proximal point family:
the saddle-point solver, the proximal method of multipliers, PDHG,
Douglas-Rachford, and ADMM, plus the proximal building blocks they need.

Each engine supports the plain iteration, the accelerated update with
the correction term, the two inertia-only variants where meaningful, and
fixed-interval or adaptive restarting. Traces carry squared fixed-point
residuals (preconditioned for PDHG), constraint infeasibility for ADMM,
and saddle gaps when a saddle point is supplied.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_solve

from .methods import Momentum, accelerated_rate_bound, ppm_rate_bound
from .operators import InnerSolverError, _factor, as_vector

__all__ = [
    "InnerSolverConfig",
    "ProxDescriptor",
    "AffineConstraint",
    "SplittingTrace",
    "soft_threshold",
    "difference_matrix",
    "operator_norm",
    "fista_strongly_convex",
    "accelerated_saddle_ppm",
    "accelerated_prox_multipliers",
    "pdhg",
    "pdhg_preconditioner",
    "drs",
    "admm",
]


def soft_threshold(z, tau):
    """Elementwise shrinkage ``max(|z| - tau, 0) * sign(z)``."""
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    z = np.asarray(z, dtype=float)
    return np.maximum(np.abs(z) - tau, 0.0) * np.sign(z)


def difference_matrix(d1):
    """Bidiagonal first-difference matrix of shape ``(d1 - 1, d1)``."""
    if d1 < 2:
        raise ValueError("need d1 >= 2")
    d = np.zeros((d1 - 1, d1))
    idx = np.arange(d1 - 1)
    d[idx, idx] = 1.0
    d[idx, idx + 1] = -1.0
    return d


def operator_norm(k, tol=1e-10, max_iters=1000):
    """Largest singular value of ``k`` by power iteration on ``k'k``.

    Deterministic start vector; stops at relative change ``tol`` or after
    ``max_iters`` sweeps, returning the current estimate either way.
    """
    k = np.asarray(k, dtype=float)
    if k.size == 0 or not np.any(k):
        return 0.0
    # Dense deterministic start; sin(1..n) is never structured enough to
    # be orthogonal to the leading singular subspace in practice.
    v = np.sin(np.arange(1, k.shape[1] + 1, dtype=float))
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max_iters):
        w = k.T @ (k @ v)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            v = np.cos(np.arange(1, k.shape[1] + 1, dtype=float))
            v /= np.linalg.norm(v)
            continue
        new_estimate = np.sqrt(norm_w)
        v = w / norm_w
        if abs(new_estimate - estimate) <= tol * new_estimate:
            return float(new_estimate)
        estimate = new_estimate
    return float(estimate)


@dataclass
class InnerSolverConfig:
    """Tolerance on the prox-gradient mapping norm and iteration cap for
    subproblems without a closed form."""

    tol: float = 1e-10
    max_iters: int = 5000


class ProxDescriptor:
    """Description of a proximable convex function.

    Kinds: ``l1`` (``weight * ||x||_1``), ``quadratic``
    (``||H x - b||^2 / 2``), ``linear`` (``a'x``), and ``zero``. Exposes
    ``value`` and ``prox``; quadratic prox factorizations are cached per
    step size.
    """

    def __init__(self, kind, dim, weight=None, h=None, b=None, a=None):
        if kind not in ("l1", "quadratic", "linear", "zero"):
            raise ValueError(f"unknown prox kind {kind!r}")
        self.kind = kind
        self.dim = int(dim)
        if kind == "l1":
            if weight is None or weight < 0:
                raise ValueError("l1 weight must be nonnegative")
            self.weight = float(weight)
        elif kind == "quadratic":
            self.h = np.asarray(h, dtype=float)
            if self.h.ndim != 2 or self.h.shape[1] != self.dim:
                raise ValueError("quadratic matrix shape disagrees with dim")
            self.b = as_vector(b) if b is not None else np.zeros(self.h.shape[0])
            if self.b.size != self.h.shape[0]:
                raise ValueError("quadratic offset shape disagrees with matrix")
        elif kind == "linear":
            self.a = as_vector(a)
            if self.a.size != self.dim:
                raise ValueError("linear term shape disagrees with dim")
        self._prox_factors = {}

    @classmethod
    def l1(cls, dim, weight=1.0):
        return cls("l1", dim, weight=weight)

    @classmethod
    def quadratic(cls, h, b=None):
        h = np.asarray(h, dtype=float)
        return cls("quadratic", h.shape[1], h=h, b=b)

    @classmethod
    def linear(cls, a):
        a = as_vector(a)
        return cls("linear", a.size, a=a)

    @classmethod
    def zero(cls, dim):
        return cls("zero", dim)

    def value(self, x):
        x = as_vector(x)
        if self.kind == "l1":
            return self.weight * float(np.sum(np.abs(x)))
        if self.kind == "quadratic":
            r = self.h @ x - self.b
            return 0.5 * float(r @ r)
        if self.kind == "linear":
            return float(self.a @ x)
        return 0.0

    def prox(self, w, t):
        """``argmin_x f(x) + ||x - w||^2 / (2 t)``."""
        if t <= 0:
            raise ValueError("prox step must be positive")
        w = as_vector(w)
        if self.kind == "zero":
            return w
        if self.kind == "linear":
            return w - t * self.a
        if self.kind == "l1":
            return soft_threshold(w, t * self.weight)
        factors = self._prox_factors.get(t)
        if factors is None:
            factors = _factor(np.eye(self.dim) + t * (self.h.T @ self.h))
            self._prox_factors[t] = factors
        return lu_solve(factors, w + t * (self.h.T @ self.b), check_finite=False)


@dataclass
class AffineConstraint:
    """Coupling constraint ``A x + B z = c``."""

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        self.c = as_vector(self.c)
        if self.A.shape[0] != self.B.shape[0] or self.A.shape[0] != self.c.size:
            raise ValueError("constraint row dimensions disagree")

    def residual(self, x, z):
        return self.A @ x + self.B @ z - self.c


@dataclass
class SplittingTrace:
    """Per-iteration record of a splitting run.

    ``residuals`` holds the squared fixed-point residual of the
    underlying proximal point iteration (preconditioned for PDHG,
    ``rho^2 * infeasibility`` for ADMM). ``infeasibility`` is
    ``||A x_{i+1} + B z_i - c||^2`` on ADMM runs and ``gaps`` the saddle
    gaps when a saddle point was supplied. ``iterates`` maps names to
    stacked per-iteration arrays.
    """

    iterations: np.ndarray
    residuals: np.ndarray
    bounds: np.ndarray | None = None
    infeasibility: np.ndarray | None = None
    gaps: np.ndarray | None = None
    restarts: list = field(default_factory=list)
    iterates: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.iterations)


def fista_strongly_convex(quadratic_part, l1_weight, x_init, tol=1e-10, max_iters=5000):
    """Constant-momentum proximal gradient for
    ``x'Qx/2 + q'x + l1_weight * ||x||_1`` with ``Q >= m I``.

    Parameters
    ----------
    quadratic_part : tuple ``(Q, q, m, L)``
        Smooth quadratic, its strong convexity ``m > 0`` and gradient
        Lipschitz constant ``L >= m``.
    l1_weight : float
        Nonnegative l1 weight.
    x_init : array_like
        Warm start.
    tol : float
        Stop once the prox-gradient mapping norm drops to ``tol``.
    max_iters : int
        Iteration cap.

    Returns
    -------
    ndarray

    Raises
    ------
    InnerSolverError
        If the cap is hit first; carries the best mapping norm reached.
    """
    q_mat, q_vec, m, big_l = quadratic_part
    q_mat = np.asarray(q_mat, dtype=float)
    q_vec = as_vector(q_vec)
    if not (m > 0 and big_l >= m):
        raise ValueError("need strong convexity 0 < m <= L")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    theta = (np.sqrt(big_l) - np.sqrt(m)) / (np.sqrt(big_l) + np.sqrt(m))
    step = 1.0 / big_l
    x = as_vector(x_init).copy()
    y = x.copy()
    best = np.inf
    for _ in range(max_iters):
        grad_x = q_mat @ x + q_vec
        mapping = big_l * (x - soft_threshold(x - step * grad_x, step * l1_weight))
        norm = np.linalg.norm(mapping)
        best = min(best, norm)
        if norm <= tol:
            return x
        x_next = soft_threshold(y - step * (q_mat @ y + q_vec), step * l1_weight)
        y = x_next + theta * (x_next - x)
        x = x_next
    grad_x = q_mat @ x + q_vec
    norm = np.linalg.norm(big_l * (x - soft_threshold(x - step * grad_x, step * l1_weight)))
    if norm <= tol:
        return x
    raise InnerSolverError("inner solver cap hit", min(best, norm), tol)


def _variant_bound(variant, restart_interval, adaptive, R):
    if R is None or restart_interval is not None or adaptive:
        return None
    if variant == "proposed":
        return lambda i: accelerated_rate_bound(R, i)
    if variant == "plain":
        return lambda i: ppm_rate_bound(R, i)
    return None


def _accelerated_loop(step, x0, iters, variant, restart_interval, adaptive,
                      residual_sq, extra=None):
    """Generic accelerated fixed-point loop shared by the splitting engines.

    ``step`` maps an extrapolated point to the next iterate,
    ``residual_sq`` scores the displacement (Euclidean or weighted), and
    ``extra`` may record one additional per-iteration quantity.
    """
    if iters < 1:
        raise ValueError("iteration count must be at least 1")
    if restart_interval is not None and restart_interval < 1:
        raise ValueError("restart interval must be at least 1")
    mom = Momentum(variant)
    x = y = y_prev = as_vector(x0)
    xs, ys, residuals, extras, restarts = [x], [], [], [], []
    since_restart = 0
    prev_res = None
    for g in range(1, iters + 1):
        x_new = step(y)
        res = residual_sq(x_new, y)
        xs.append(x_new)
        ys.append(y)
        residuals.append(res)
        if extra is not None:
            extras.append(extra(x_new))
        since_restart += 1
        do_restart = g < iters and (
            (restart_interval is not None and since_restart >= restart_interval)
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
    return (np.array(xs), np.array(ys), np.array(residuals),
            np.array(extras) if extra is not None else None, restarts)


def _finish_trace(iters, xs, ys, residuals, restarts, bound_fn, gaps=None,
                  infeasibility=None, iterates=None):
    idx = np.arange(1, iters + 1)
    bounds = None if bound_fn is None else np.array([bound_fn(i) for i in idx])
    extra = dict(iterates or {})
    extra.setdefault("x", xs)
    extra.setdefault("y", ys)
    return SplittingTrace(idx, residuals, bounds, infeasibility, gaps,
                          restarts, extra)


def _euclidean_sq(x_new, y):
    diff = x_new - y
    return float(diff @ diff)


def accelerated_saddle_ppm(phi, lam, u0, v0, iters, variant="proposed",
                           restart_interval=None, adaptive_restart=False,
                           saddle=None, R=None):
    """Proximal point method on a convex-concave saddle function, with the
    accelerated update applied to the stacked iterates.

    Parameters
    ----------
    phi : QuadraticSaddle
    lam : float
        Positive regularization constant.
    u0, v0 : array_like
        Starting primal and dual points.
    iters : int
    variant : str
        ``"plain"``, ``"proposed"``, ``"guler1"`` or ``"guler2"``.
    restart_interval : int, optional
        Restart the accelerated update every so many iterations.
    adaptive_restart : bool
        Also restart whenever the residual increases.
    saddle : tuple, optional
        Known saddle point ``(u*, v*)``; fills the gap column
        ``phi(u_i, v*) - phi(u*, v_i)``.
    R : float, optional
        Known initial distance to a saddle; fills the bound column.
    """
    from .operators import saddle_resolvent_map

    resolvent = saddle_resolvent_map(phi, lam)
    d1, _ = phi.dims
    x0 = np.concatenate([as_vector(u0), as_vector(v0)])
    extra = None
    if saddle is not None:
        u_star, v_star = as_vector(saddle[0]), as_vector(saddle[1])
        extra = lambda x: phi.gap(x[:d1], x[d1:], u_star, v_star)
    xs, ys, residuals, gaps, restarts = _accelerated_loop(
        resolvent, x0, iters, variant, restart_interval, adaptive_restart,
        _euclidean_sq, extra)
    bound_fn = _variant_bound(variant, restart_interval, adaptive_restart, R)
    return _finish_trace(iters, xs, ys, residuals, restarts, bound_fn, gaps=gaps,
                         iterates={"u": xs[:, :d1], "v": xs[:, d1:]})


def accelerated_prox_multipliers(f, a_mat, b, lam, u0, v0, iters,
                                 inner=None, variant="proposed",
                                 restart_interval=None, adaptive_restart=False,
                                 R=None):
    """Accelerated proximal method of multipliers for
    ``min f(u) s.t. A u = b``.

    The primal update minimizes the Lagrangian at the extrapolated dual
    point plus the augmented term ``lam ||A u - b||^2 / 2`` and the
    proximal term ``||u - u_hat||^2 / (2 lam)``; it is a single linear
    solve for quadratic/linear/zero ``f`` and an inner strongly convex
    FISTA run for l1 ``f``. The stacked iterate is
    ``x_{i+1} = (u_{i+1}, v_hat_i + lam (A u_{i+1} - b))``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    inner = inner or InnerSolverConfig()
    a_mat = np.asarray(a_mat, dtype=float)
    b = as_vector(b)
    d1 = a_mat.shape[1]
    if f.dim != d1 or b.size != a_mat.shape[0]:
        raise ValueError("dimensions of f, A, b disagree")
    ata = a_mat.T @ a_mat
    lam_atb = lam * (a_mat.T @ b)

    if f.kind == "l1":
        smooth_q = lam * ata + np.eye(d1) / lam
        big_l = lam * operator_norm(a_mat) ** 2 + 1.0 / lam
        state = {"warm": as_vector(u0).copy()}

        def solve_u(u_hat, v_hat):
            q_vec = a_mat.T @ v_hat - lam_atb - u_hat / lam
            # Tolerance relative to the subproblem scale: the mapping-norm
            # floor in double precision grows with ||q||, so an absolute
            # tolerance is unattainable once iterates are large.
            tol = inner.tol * max(1.0, float(np.linalg.norm(q_vec)))
            u = fista_strongly_convex((smooth_q, q_vec, 1.0 / lam, big_l),
                                      f.weight, state["warm"],
                                      tol=tol, max_iters=inner.max_iters)
            state["warm"] = u
            return u
    elif f.kind in ("quadratic", "linear", "zero"):
        system = lam * ata + np.eye(d1) / lam
        base = lam_atb.copy()
        if f.kind == "quadratic":
            system = system + f.h.T @ f.h
            base += f.h.T @ f.b
        elif f.kind == "linear":
            base -= f.a
        factors = _factor(system)

        def solve_u(u_hat, v_hat):
            return lu_solve(factors, base - a_mat.T @ v_hat + u_hat / lam,
                            check_finite=False)
    else:
        raise ValueError(f"unsupported f kind {f.kind!r}")

    def step(y):
        u_hat, v_hat = y[:d1], y[d1:]
        u = solve_u(u_hat, v_hat)
        v = v_hat + lam * (a_mat @ u - b)
        return np.concatenate([u, v])

    x0 = np.concatenate([as_vector(u0), as_vector(v0)])
    xs, ys, residuals, _, restarts = _accelerated_loop(
        step, x0, iters, variant, restart_interval, adaptive_restart,
        _euclidean_sq)
    bound_fn = _variant_bound(variant, restart_interval, adaptive_restart, R)
    return _finish_trace(iters, xs, ys, residuals, restarts, bound_fn,
                         iterates={"u": xs[:, :d1], "v": xs[:, d1:]})


def pdhg_preconditioner(k, tau, sigma):
    """PDHG preconditioner ``[[I/tau, -K'], [-K, I/sigma]]`` as a
    Preconditioner (positive definite when ``tau sigma ||K||^2 < 1``)."""
    from .operators import Preconditioner

    k = np.asarray(k, dtype=float)
    d2, d1 = k.shape
    top = np.hstack([np.eye(d1) / tau, -k.T])
    bottom = np.hstack([-k, np.eye(d2) / sigma])
    return Preconditioner(np.vstack([top, bottom]))


def pdhg(f, g, k, tau, sigma, u0, v0, iters, variant="proposed",
         restart_interval=None, adaptive_restart=False, R=None):
    """Primal-dual hybrid gradient method with the accelerated update.

    Requires ``tau * sigma * ||K||^2 < 1`` (operator norm by power
    iteration), which makes the underlying preconditioner positive
    definite; residuals are measured in the preconditioned norm
    ``<P d, d> = ||du||^2/tau - 2 <K du, dv> + ||dv||^2/sigma``.
    ``R``, when given, is the preconditioned initial distance.
    """
    k = np.asarray(k, dtype=float)
    if tau <= 0 or sigma <= 0:
        raise ValueError("tau and sigma must be positive")
    norm_k = operator_norm(k)
    if tau * sigma * norm_k ** 2 >= 1.0:
        raise ValueError(
            f"need tau*sigma*||K||^2 < 1, got {tau * sigma * norm_k ** 2:.6g}")
    d2, d1 = k.shape
    if f.dim != d1 or g.dim != d2:
        raise ValueError("prox dimensions disagree with K")

    def step(y):
        u_hat, v_hat = y[:d1], y[d1:]
        u = f.prox(u_hat - tau * (k.T @ v_hat), tau)
        v = g.prox(v_hat + sigma * (k @ (2.0 * u - u_hat)), sigma)
        return np.concatenate([u, v])

    def residual_sq(x_new, y):
        du, dv = x_new[:d1] - y[:d1], x_new[d1:] - y[d1:]
        return float(du @ du / tau - 2.0 * (dv @ (k @ du)) + dv @ dv / sigma)

    x0 = np.concatenate([as_vector(u0), as_vector(v0)])
    xs, ys, residuals, _, restarts = _accelerated_loop(
        step, x0, iters, variant, restart_interval, adaptive_restart, residual_sq)
    bound_fn = _variant_bound(variant, restart_interval, adaptive_restart, R)
    return _finish_trace(iters, xs, ys, residuals, restarts, bound_fn,
                         iterates={"u": xs[:, :d1], "v": xs[:, d1:]})


def drs(resolvent1, resolvent2, rho, nu0, iters, variant="proposed",
        restart_interval=None, adaptive_restart=False, R=None):
    """Douglas-Rachford splitting with the accelerated update.

    ``resolvent1`` and ``resolvent2`` must be the resolvents of
    ``rho * M1`` and ``rho * M2``; one step applies
    ``G = J1(2 J2 - I) + (I - J2)``, itself the resolvent of a maximally
    monotone operator, so every proximal point rate applies verbatim.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")

    def step(eta):
        j2 = as_vector(resolvent2(eta))
        return as_vector(resolvent1(2.0 * j2 - eta)) + eta - j2

    xs, ys, residuals, _, restarts = _accelerated_loop(
        step, nu0, iters, variant, restart_interval, adaptive_restart,
        _euclidean_sq)
    bound_fn = _variant_bound(variant, restart_interval, adaptive_restart, R)
    return _finish_trace(iters, xs, ys, residuals, restarts, bound_fn,
                         iterates={"nu": xs, "eta": ys})


def _admm_x_solver(f, constraint, rho, inner):
    a = constraint.A
    ata = a.T @ a
    if f.kind in ("quadratic", "linear", "zero"):
        system = rho * ata
        base = np.zeros(a.shape[1])
        if f.kind == "quadratic":
            system = system + f.h.T @ f.h
            base = f.h.T @ f.b
        elif f.kind == "linear":
            base = -f.a
        factors = _factor(system)

        def solve(nu_hat, z):
            rhs = base + a.T @ (rho * (constraint.c - constraint.B @ z) - nu_hat)
            return lu_solve(factors, rhs, check_finite=False)

        return solve
    if f.kind == "l1":
        m = rho * float(np.linalg.eigvalsh(ata)[0])
        if m <= 0:
            raise ValueError("l1 x-subproblem needs A'A positive definite")
        big_l = rho * operator_norm(a) ** 2
        smooth_q = rho * ata
        state = {"warm": np.zeros(a.shape[1])}

        def solve(nu_hat, z):
            q_vec = a.T @ (nu_hat - rho * (constraint.c - constraint.B @ z))
            tol = inner.tol * max(1.0, float(np.linalg.norm(q_vec)))
            x = fista_strongly_convex((smooth_q, q_vec, m, big_l), f.weight,
                                      state["warm"], tol=tol,
                                      max_iters=inner.max_iters)
            state["warm"] = x
            return x

        return solve
    raise ValueError(f"unsupported f kind {f.kind!r}")


def _admm_z_solver(g, constraint, rho, inner):
    b = constraint.B
    if g.kind == "l1":
        sign = None
        if b.shape[0] == b.shape[1]:
            if np.array_equal(b, -np.eye(b.shape[0])):
                sign = -1.0
            elif np.array_equal(b, np.eye(b.shape[0])):
                sign = 1.0
        if sign is None:
            raise ValueError("l1 z-subproblem requires B = I or B = -I")

        def solve(eta_hat, x):
            anchor = constraint.c - constraint.A @ x - eta_hat / rho
            return soft_threshold(sign * anchor, g.weight / rho)

        return solve
    if g.kind in ("quadratic", "linear", "zero"):
        system = rho * (b.T @ b)
        base = np.zeros(b.shape[1])
        if g.kind == "quadratic":
            system = system + g.h.T @ g.h
            base = g.h.T @ g.b
        elif g.kind == "linear":
            base = -g.a
        factors = _factor(system)

        def solve(eta_hat, x):
            rhs = base + b.T @ (rho * (constraint.c - constraint.A @ x) - eta_hat)
            return lu_solve(factors, rhs, check_finite=False)

        return solve
    raise ValueError(f"unsupported g kind {g.kind!r}")


def admm(f, g, constraint, rho, x0, z0, nu0, iters, accelerate=True,
         restart_interval=None, adaptive_restart=False, R=None, inner=None):
    """Alternating direction method of multipliers, optionally accelerated.

    Runs the hat-variable recursion equivalent to (accelerated)
    Douglas-Rachford splitting on the dual inclusion: the x-update
    minimizes the augmented Lagrangian at ``nu_hat``, the extrapolation
    builds ``eta_hat`` from the last two dual iterates with the
    ``rho A (x_{i+1} - x_i)`` corrections (plain ADMM keeps
    ``eta_hat = nu_hat`` throughout), then the z-update and the dual
    ascent step. Record ``i`` holds the infeasibility
    ``||A x_{i+1} + B z_i - c||^2``, whose ``rho^2`` multiple is the
    fixed-point residual of the underlying splitting iteration.

    Returns a trace whose ``iterates`` hold ``x`` (rows ``x_0 ..
    x_{iters+1}``), ``z``, ``nu_hat`` and ``eta_hat``.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if iters < 1:
        raise ValueError("iteration count must be at least 1")
    if restart_interval is not None and restart_interval < 1:
        raise ValueError("restart interval must be at least 1")
    inner = inner or InnerSolverConfig()
    solve_x = _admm_x_solver(f, constraint, rho, inner)
    solve_z = _admm_z_solver(g, constraint, rho, inner)
    a_mat = constraint.A

    x = as_vector(x0)
    z = as_vector(z0)
    nu_hat = as_vector(nu0)
    x_prev = None
    nu_hat_prev = None
    eta_hat_prev = None
    eta_hat_prev2 = None
    local = 0
    since_restart = 0
    prev_infeas = None
    xs, zs, nu_hats, eta_hats = [x], [z], [nu_hat], []
    infeas, restarts = [], []
    for g_iter in range(iters + 1):
        x_new = solve_x(nu_hat, z)
        xs.append(x_new)
        if g_iter >= 1:
            viol = constraint.residual(x_new, z)
            infeas.append(float(viol @ viol))
            since_restart += 1
            do_restart = g_iter < iters and (
                (restart_interval is not None and since_restart >= restart_interval)
                or (adaptive_restart and prev_infeas is not None
                    and infeas[-1] > prev_infeas))
            if do_restart:
                local = 0
                since_restart = 0
                prev_infeas = None
                restarts.append(g_iter)
            else:
                prev_infeas = infeas[-1]
        if g_iter == iters:
            break
        if accelerate and local >= 2:
            w = (local - 1) / (local + 1)
            eta_hat = (nu_hat
                       + w * (nu_hat - nu_hat_prev + rho * (a_mat @ (x_new - x)))
                       - w * (nu_hat_prev - eta_hat_prev2 + rho * (a_mat @ (x - x_prev))))
        else:
            eta_hat = nu_hat
        z_new = solve_z(eta_hat, x_new)
        nu_hat_new = eta_hat + rho * constraint.residual(x_new, z_new)
        eta_hats.append(eta_hat)
        zs.append(z_new)
        nu_hats.append(nu_hat_new)
        eta_hat_prev2, eta_hat_prev = eta_hat_prev, eta_hat
        nu_hat_prev, nu_hat = nu_hat, nu_hat_new
        x_prev, x = x, x_new
        z = z_new
        local += 1
    idx = np.arange(1, iters + 1)
    infeas = np.array(infeas)
    residuals = rho * rho * infeas
    bound_fn = None
    if R is not None and restart_interval is None and not adaptive_restart:
        # Bounds the residual column rho^2 * ||A x_{i+1} + B z_i - c||^2.
        rate = accelerated_rate_bound if accelerate else ppm_rate_bound
        bound_fn = lambda i: rate(R, i)
    bounds = None if bound_fn is None else np.array([bound_fn(i) for i in idx])
    return SplittingTrace(idx, residuals, bounds, infeas, None, restarts,
                          {"x": np.array(xs), "z": np.array(zs),
                           "nu_hat": np.array(nu_hats),
                           "eta_hat": np.array(eta_hats)})
