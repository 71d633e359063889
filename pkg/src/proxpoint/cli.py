"""Experiment runner: reproduces the benchmark figure data and the
certificate report as CSV.

Configuration is flags-only. Exit codes: 0 on success, 1 on a
configuration error, 2 on a numerical failure (singular resolvent
system or inner-solver cap). Output is byte-identical across reruns of
the same configuration.
"""

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import methods as mt
from . import splitting as sp
from .operators import InnerSolverError, SingularSystemError, linear_resolvent
from .pep_cert import verify_certificate
from .problems import (PRESETS, basis_pursuit_instance, bilinear_game_instance,
                       rotation_worst_case, toy_saddle, tv_instance)

__all__ = ["RunConfig", "ConfigError", "run_experiment", "main"]

ORACLE_ITERS = 10_000
METHOD_NAMES = ("ppm", "accel", "guler1", "guler2", "restarted")
DEFAULT_METHODS = {
    "fig1": ("ppm", "guler1", "accel"),
    "fig2": ("ppm", "accel", "restarted"),
    "fig3": ("ppm", "guler1", "accel", "restarted"),
    "fig4": ("ppm", "guler1", "accel", "restarted"),
    "fig5": ("ppm", "accel", "restarted"),
}
_VARIANT_OF = {"ppm": "plain", "accel": "proposed",
               "guler1": "guler1", "guler2": "guler2"}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class RunConfig:
    """Validated CLI configuration for one experiment run."""

    experiment: str
    methods: list
    iters: int | None = None
    lam: float | None = None
    mu: float | None = None
    rho: float | None = None
    tau: float | None = None
    sigma: float | None = None
    gamma: float | None = None
    seed: int | None = None
    restart: int | None = None
    adaptive_restart: bool = False
    nmax: int = 60
    out: str = "experiment.csv"
    preset: dict = field(default_factory=dict)

    def __post_init__(self):
        base = self.experiment.split("-")[0]
        if self.experiment != "cert":
            if self.experiment not in PRESETS:
                raise ConfigError(f"unknown experiment {self.experiment!r}")
            self.preset = dict(PRESETS[self.experiment])
            allowed = DEFAULT_METHODS[base]
            if not self.methods:
                self.methods = list(allowed)
            for m in self.methods:
                if m not in METHOD_NAMES:
                    raise ConfigError(f"unknown method {m!r}")
                if base == "fig5" and m.startswith("guler"):
                    raise ConfigError(
                        "guler variants are not defined for the ADMM experiment")
            if self.iters is None:
                self.iters = self.preset["iters"]
        else:
            if self.methods:
                raise ConfigError("the certificate report takes no --method")
            if self.nmax < 2:
                raise ConfigError("--nmax must be at least 2")
        if self.iters is not None and self.iters < 1:
            raise ConfigError("--iters must be positive")
        for name in ("lam", "mu", "rho", "tau", "sigma", "gamma"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"--{name} must be positive")
        if self.restart is not None and self.restart < 1:
            raise ConfigError("--restart must be at least 1")

    def restart_intervals(self):
        """Intervals to run for the ``restarted`` method."""
        if self.restart is not None:
            return (self.restart,)
        if self.adaptive_restart:
            return (None,)
        return tuple(self.preset.get("restarts", ()))


def _fmt(value):
    return "" if value is None else format(float(value), ".17g")


def _param(config, name, default):
    value = getattr(config, name)
    return default if value is None else value


def _restart_label(interval):
    return "adaptive-restart" if interval is None else f"restart@{interval}"


def _expand_methods(config):
    """Resolve method names into (label, variant, interval) tasks."""
    tasks = []
    for name in config.methods:
        if name == "restarted":
            intervals = config.restart_intervals()
            if not intervals:
                raise ConfigError(
                    "the restarted method needs --restart or --adaptive-restart")
            for k in intervals:
                tasks.append((_restart_label(k), "proposed", k))
        else:
            tasks.append((name, _VARIANT_OF[name], None))
    return tasks


def _trace_rows(experiment, label, trace, infeas=None, gaps=None):
    rows = []
    for j, i in enumerate(trace.iterations):
        rows.append((
            experiment, label, str(int(i)),
            _fmt(trace.residuals[j]),
            _fmt(None if trace.bounds is None else trace.bounds[j]),
            _fmt(None if infeas is None else infeas[j]),
            _fmt(None if gaps is None else gaps[j]),
        ))
    return rows


def _run_operator_experiment(config):
    """fig1: worst-case rotation; methods act through a shared resolvent."""
    n = config.preset["n"]
    lam = _param(config, "lam", config.preset["lam"])
    op = rotation_worst_case(n, lam)
    resolvent = linear_resolvent(op, lam)
    x0 = np.array([1.0, 0.0])
    radius = 1.0
    meta = [f"# problem=rotation n={n} lam={_fmt(lam)} iters={config.iters}"
            f" x0=[1,0] R={_fmt(radius)} R_source=exact"]

    def run(task):
        label, variant, interval = task
        if interval is not None or label == "adaptive-restart":
            trace = mt.restarted(resolvent, x0, interval, config.iters,
                                 adaptive=interval is None, R=radius)
        elif variant == "plain":
            trace = mt.ppm(resolvent, x0, config.iters, R=radius)
        elif variant == "proposed":
            trace = mt.accelerated_ppm(resolvent, x0, config.iters, R=radius)
        else:
            trace = mt.guler("first" if variant == "guler1" else "second",
                             resolvent, x0, config.iters)
        return label, _trace_rows(config.experiment, label, trace), trace.restarts

    return meta, run


def _run_saddle_experiment(config):
    """fig2: strongly monotone toy problem via its saddle function, so the
    gap column is available alongside the residual."""
    n = config.preset["n"]
    lam = _param(config, "lam", config.preset["lam"])
    mu = _param(config, "mu", config.preset["mu"])
    phi = toy_saddle(n, lam, mu)
    u0, v0 = np.array([1.0]), np.array([0.0])
    saddle = (np.zeros(1), np.zeros(1))
    meta = [f"# problem=strongly_monotone_toy n={n} lam={_fmt(lam)} mu={_fmt(mu)}"
            f" iters={config.iters} x0=[1,0] R=1 R_source=exact"]

    def run(task):
        label, variant, interval = task
        adaptive = label == "adaptive-restart"
        trace = sp.accelerated_saddle_ppm(
            phi, lam, u0, v0, config.iters, variant=variant,
            restart_interval=interval, adaptive_restart=adaptive,
            saddle=saddle, R=1.0)
        return (label, _trace_rows(config.experiment, label, trace, gaps=trace.gaps),
                trace.restarts)

    return meta, run


def _run_prox_mult_experiment(config):
    """fig3: basis pursuit by the proximal method of multipliers."""
    p = config.preset
    seed = _param(config, "seed", p["seed"])
    lam = _param(config, "lam", p["lam"])
    inst = basis_pursuit_instance(p["d1"], p["d2"], seed)
    f = sp.ProxDescriptor.l1(p["d1"], 1.0)
    u0, v0 = np.zeros(p["d1"]), np.zeros(p["d2"])

    def engine(variant, interval, adaptive, iters, radius=None):
        return sp.accelerated_prox_multipliers(
            f, inst["A"], inst["b"], lam, u0, v0, iters, variant=variant,
            restart_interval=interval, adaptive_restart=adaptive, R=radius)

    oracle = engine("plain", None, False, ORACLE_ITERS)
    radius = float(np.linalg.norm(np.concatenate([u0, v0]) - oracle.iterates["x"][-1]))
    meta = [f"# problem=basis_pursuit d1={p['d1']} d2={p['d2']} seed={seed}"
            f" lam={_fmt(lam)} iters={config.iters} x0=0",
            f"# R={_fmt(radius)} R_source=estimate"
            f" (fixed point of a {ORACLE_ITERS}-iteration plain oracle run)"]

    def run(task):
        label, variant, interval = task
        trace = engine(variant, interval, label == "adaptive-restart",
                       config.iters, radius)
        return label, _trace_rows(config.experiment, label, trace), trace.restarts

    return meta, run


def _run_pdhg_experiment(config):
    """fig4: bilinear game by (accelerated) PDHG; preconditioned residuals."""
    p = config.preset
    seed = _param(config, "seed", p["seed"])
    inst = bilinear_game_instance(p["d1"], p["d2"], seed)
    k = inst["K"]
    norm_k = sp.operator_norm(k)
    tau = _param(config, "tau", p["step_fraction"] / norm_k)
    sigma = _param(config, "sigma", p["step_fraction"] / norm_k)
    f = sp.ProxDescriptor.linear(inst["a"])
    g = sp.ProxDescriptor.linear(inst["b"])
    u0 = np.full(p["d1"], 10.0)
    v0 = np.full(p["d2"], 10.0)

    def engine(variant, interval, adaptive, iters, radius=None):
        return sp.pdhg(f, g, k, tau, sigma, u0, v0, iters, variant=variant,
                       restart_interval=interval, adaptive_restart=adaptive,
                       R=radius)

    oracle = engine("plain", None, False, ORACLE_ITERS)
    x0 = np.concatenate([u0, v0])
    precond = sp.pdhg_preconditioner(k, tau, sigma)
    radius = float(np.sqrt(precond.quad(x0 - oracle.iterates["x"][-1])))
    meta = [f"# problem=bilinear_game d1={p['d1']} d2={p['d2']} seed={seed}"
            f" tau={_fmt(tau)} sigma={_fmt(sigma)} norm_K={_fmt(norm_k)}"
            f" iters={config.iters} x0=all-tens residual=preconditioned",
            f"# R={_fmt(radius)} R_source=estimate"
            f" (fixed point of a {ORACLE_ITERS}-iteration plain oracle run)"]

    def run(task):
        label, variant, interval = task
        trace = engine(variant, interval, label == "adaptive-restart",
                       config.iters, radius)
        return label, _trace_rows(config.experiment, label, trace), trace.restarts

    return meta, run


def _run_admm_experiment(config):
    """fig5: total-variation least squares by (accelerated) ADMM."""
    p = config.preset
    seed = _param(config, "seed", p["seed"])
    gamma = _param(config, "gamma", p["gamma"])
    rho = _param(config, "rho", p["rho"])
    inst = tv_instance(p["d1"], p["p"], seed, p["noise_scale"])
    d2 = p["d1"] - 1
    f = sp.ProxDescriptor.quadratic(inst["H"], inst["b"])
    g = sp.ProxDescriptor.l1(d2, gamma)
    cons = sp.AffineConstraint(inst["D"], -np.eye(d2), np.zeros(d2))
    x0, z0, nu0 = np.zeros(p["d1"]), np.zeros(d2), np.zeros(d2)

    def engine(accelerate, interval, adaptive, iters, radius=None):
        return sp.admm(f, g, cons, rho, x0, z0, nu0, iters,
                       accelerate=accelerate, restart_interval=interval,
                       adaptive_restart=adaptive, R=radius)

    oracle = engine(False, None, False, ORACLE_ITERS)
    nu_star = oracle.iterates["nu_hat"][-1] + rho * (cons.A @ oracle.iterates["x"][-1] - cons.c)
    eta0 = nu0 + rho * (cons.A @ x0 - cons.c)
    radius = float(np.linalg.norm(eta0 - nu_star))
    meta = [f"# problem=tv_least_squares d1={p['d1']} p={p['p']} seed={seed}"
            f" gamma={_fmt(gamma)} rho={_fmt(rho)}"
            f" noise_scale={_fmt(p['noise_scale'])} iters={config.iters} x0=0",
            f"# R={_fmt(radius)} R_source=estimate"
            f" (dual fixed point of a {ORACLE_ITERS}-iteration plain oracle run)"]

    def run(task):
        label, variant, interval = task
        trace = engine(variant == "proposed", interval,
                       label == "adaptive-restart", config.iters, radius)
        return (label,
                _trace_rows(config.experiment, label, trace, infeas=trace.infeasibility),
                trace.restarts)

    return meta, run


_RUNNERS = {
    "fig1": _run_operator_experiment,
    "fig2": _run_saddle_experiment,
    "fig3": _run_prox_mult_experiment,
    "fig4": _run_pdhg_experiment,
    "fig5": _run_admm_experiment,
}


def _run_cert(config):
    lines = [f"# certificate report nmax={config.nmax}",
             "N,deviation,min_eig,dual_value"]
    for n in range(2, config.nmax + 1):
        rep = verify_certificate(n)
        if not rep.passed:
            raise ArithmeticError(f"certificate failed at N={n}: {rep}")
        lines.append(f"{n},{_fmt(rep.max_rank1_deviation)},"
                     f"{_fmt(rep.min_eigenvalue)},{_fmt(rep.dual_value)}")
    return lines


def run_experiment(config):
    """Run one experiment and write its CSV to ``config.out``.

    Figure experiments dispatch independent method runs on a thread
    pool and write the buffered rows in the configured method order.
    """
    if config.experiment == "cert":
        lines = _run_cert(config)
    else:
        tasks = _expand_methods(config)
        meta, run = _RUNNERS[config.experiment.split("-")[0]](config)
        labels = [t[0] for t in tasks]
        with ThreadPoolExecutor(max_workers=min(4, len(tasks))) as pool:
            results = list(pool.map(run, tasks))
        lines = [f"# experiment={config.experiment} methods={'|'.join(labels)}"]
        lines += meta
        for label, _, restarts in results:
            if restarts:
                lines.append(f"# restarts[{label}]={','.join(map(str, restarts))}")
        lines.append("experiment,method,iteration,residual,bound,infeasibility,gap")
        for _, rows, _ in results:
            lines += [",".join(row) for row in rows]
    with open(config.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="proxpoint",
        description="Reproduce the benchmark figure data and the certificate "
                    "report as CSV.")
    parser.add_argument("--experiment", required=True,
                        choices=sorted(PRESETS) + ["cert"])
    parser.add_argument("--method", action="append", default=[],
                        help="method to run (repeatable): ppm, accel, guler1, "
                             "guler2, restarted")
    parser.add_argument("--iters", type=int)
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--mu", type=float)
    parser.add_argument("--rho", type=float)
    parser.add_argument("--tau", type=float)
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--restart", type=int,
                        help="restart interval for the restarted method")
    parser.add_argument("--adaptive-restart", action="store_true",
                        help="restart whenever the residual increases")
    parser.add_argument("--nmax", type=int, default=60,
                        help="largest horizon for the certificate report")
    parser.add_argument("--out", default="experiment.csv")
    return parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def parse_config(argv):
    """Parse flags into a validated :class:`RunConfig` (raises ConfigError)."""
    parser = _build_parser()
    parser.__class__ = _Parser
    ns = parser.parse_args(argv)
    return RunConfig(experiment=ns.experiment, methods=ns.method,
                     iters=ns.iters, lam=ns.lam, mu=ns.mu, rho=ns.rho,
                     tau=ns.tau, sigma=ns.sigma, gamma=ns.gamma, seed=ns.seed,
                     restart=ns.restart, adaptive_restart=ns.adaptive_restart,
                     nmax=ns.nmax, out=ns.out)


def main(argv=None):
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        run_experiment(config)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SingularSystemError, InnerSolverError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
