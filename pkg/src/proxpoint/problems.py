"""Benchmark instance generators with a pinned, portable random source.

Instances regenerate bit-identically from ``(parameters, seed)``: the
generator is a splitmix-style 64-bit PRNG with Box-Muller normals, so the
same data can be reproduced outside Python. Instances round-trip through
a plain-text entry format for cross-implementation comparison.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import DenseLinearOperator, QuadraticSaddle

__all__ = [
    "SplitMix64",
    "ProblemInstance",
    "rotation_worst_case",
    "rotation_instance",
    "strongly_monotone_toy",
    "toy_saddle",
    "strongly_monotone_instance",
    "basis_pursuit_instance",
    "bilinear_game_instance",
    "tv_instance",
    "save_instance",
    "load_instance",
    "PRESETS",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TO_UNIT = 2.0 ** -53


class SplitMix64:
    """splitmix64 stream with Box-Muller standard normals.

    The k-th raw word is ``mix(seed + k * golden)`` over wrapping uint64
    arithmetic, so batches of any size are reproducible and cheap to
    vectorize.
    """

    def __init__(self, seed):
        self._state = np.uint64(int(seed) % (1 << 64))

    def integers(self, n):
        """Next ``n`` raw 64-bit words."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = self._state + steps * _GOLDEN
        # Scalar state advance in Python ints: numpy warns on scalar wraparound.
        self._state = np.uint64((int(self._state) + n * int(_GOLDEN)) % (1 << 64))
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))

    def uniforms(self, n):
        """``n`` doubles in ``[0, 1)`` with 53 random bits each."""
        return (self.integers(n) >> np.uint64(11)).astype(np.float64) * _TO_UNIT

    def normals(self, n):
        """``n`` standard normals via Box-Muller on consecutive word pairs."""
        pairs = (n + 1) // 2
        bits = self.integers(2 * pairs)
        u1 = ((bits[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _TO_UNIT
        u2 = (bits[1::2] >> np.uint64(11)).astype(np.float64) * _TO_UNIT
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:n]

    def normal_matrix(self, rows, cols):
        return self.normals(rows * cols).reshape(rows, cols)

    def integers_below(self, bound, n):
        """``n`` integers uniform on ``0..bound-1`` (by scaling, adequate here)."""
        return np.minimum((self.uniforms(n) * bound).astype(int), bound - 1)


@dataclass
class ProblemInstance:
    """Tagged benchmark data: generated arrays plus everything needed to
    regenerate them (kind, parameters, seed) and the optimum when known."""

    kind: str
    seed: int | None
    params: dict
    data: dict
    optimum: np.ndarray | None = field(default=None)

    def __getitem__(self, name):
        return self.data[name]


def rotation_worst_case(n, lam=1.0):
    """Scaled rotation ``(1/(lam sqrt(n-1))) [[0, 1], [-1, 0]]``.

    The worst-case operator on which the proximal point method attains
    its residual bound exactly; skew-symmetric, hence monotone with zero
    modulus, with unique zero at the origin. The canonical start is
    ``[1, 0]``.
    """
    if n < 2:
        raise ValueError("horizon must be at least 2")
    if lam <= 0:
        raise ValueError("lam must be positive")
    s = 1.0 / (lam * np.sqrt(n - 1.0))
    return DenseLinearOperator([[0.0, s], [-s, 0.0]])


def strongly_monotone_toy(n, lam=1.0, mu=0.02):
    """Rotation worst case shifted by ``mu * I``; mu-strongly monotone
    with zero at the origin, combining the two known extremal behaviors."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    m = rotation_worst_case(n, lam).entries + mu * np.eye(2)
    return DenseLinearOperator(m)


def toy_saddle(n, lam=1.0, mu=0.02):
    """Saddle function whose subdifferential is :func:`strongly_monotone_toy`:
    ``phi(u, v) = mu u^2/2 + s u v - mu v^2/2`` with ``s = 1/(lam sqrt(n-1))``."""
    s = 1.0 / (lam * np.sqrt(n - 1.0))
    return QuadraticSaddle([[mu]], [[s]], [[mu]])


def rotation_instance(n, lam=1.0):
    op = rotation_worst_case(n, lam)
    return ProblemInstance("rotation", None, {"n": n, "lam": lam},
                           {"M": op.entries}, optimum=np.zeros(2))


def strongly_monotone_instance(n, lam=1.0, mu=0.02):
    op = strongly_monotone_toy(n, lam, mu)
    return ProblemInstance("strongly_monotone_toy", None,
                           {"n": n, "lam": lam, "mu": mu},
                           {"M": op.entries}, optimum=np.zeros(2))


def basis_pursuit_instance(d1, d2, seed):
    """Random feasible basis pursuit data ``(A, b, u_true)``.

    ``A`` is standard normal ``d2 x d1``; ``u_true`` keeps only the
    entries at or above the 90th percentile of ``|value|`` (about one in
    ten); ``b = A u_true`` so the constraint is feasible by construction.
    """
    if not d2 < d1:
        raise ValueError("need d2 < d1")
    rng = SplitMix64(seed)
    a = rng.normal_matrix(d2, d1)
    raw = rng.normals(d1)
    threshold = np.quantile(np.abs(raw), 0.9)
    u_true = np.where(np.abs(raw) >= threshold, raw, 0.0)
    return ProblemInstance("basis_pursuit", seed, {"d1": d1, "d2": d2},
                           {"A": a, "b": a @ u_true, "u_true": u_true})


def bilinear_game_instance(d1, d2, seed):
    """Random bilinear game data: standard normal ``K`` (d2 x d1), ``a``, ``b``."""
    if d1 < 1 or d2 < 1:
        raise ValueError("dimensions must be positive")
    rng = SplitMix64(seed)
    k = rng.normal_matrix(d2, d1)
    a = rng.normals(d1)
    b = rng.normals(d2)
    return ProblemInstance("bilinear_game", seed, {"d1": d1, "d2": d2},
                           {"K": k, "a": a, "b": b})


def tv_instance(d1, p, seed, noise_scale=0.1):
    """Total-variation least-squares data ``(H, b, x_true, D)``.

    ``x_true`` is piecewise constant with five pieces (four distinct
    random breakpoints), so ``D x_true`` has at most four nonzeros;
    ``H`` is standard normal ``p x d1`` and ``b = H x_true +
    noise_scale * noise``.
    """
    if d1 < 2 or p < 1:
        raise ValueError("need d1 >= 2 and p >= 1")
    from .splitting import difference_matrix

    rng = SplitMix64(seed)
    pieces = 5
    breaks = []
    while len(breaks) < min(pieces - 1, d1 - 1):
        candidate = int(rng.integers_below(d1 - 1, 1)[0]) + 1
        if candidate not in breaks:
            breaks.append(candidate)
    edges = [0] + sorted(breaks) + [d1]
    # Piece levels at scale 5 so the data term dominates the regularizer
    # at the experiment's gamma and rho.
    levels = 5.0 * rng.normals(len(edges) - 1)
    x_true = np.concatenate([np.full(hi - lo, level)
                             for lo, hi, level in zip(edges[:-1], edges[1:], levels)])
    h = rng.normal_matrix(p, d1)
    noise = rng.normals(p)
    b = h @ x_true + noise_scale * noise
    return ProblemInstance("tv_least_squares", seed,
                           {"d1": d1, "p": p, "noise_scale": noise_scale},
                           {"H": h, "b": b, "x_true": x_true,
                            "D": difference_matrix(d1)})


def save_instance(instance, path):
    """Write an instance as plain text: one header line (kind, parameters,
    seed) followed by ``name,row,col,value`` entry rows."""
    lines = []
    header = [instance.kind, f"seed={instance.seed}"]
    header += [f"{k}={v!r}" for k, v in sorted(instance.params.items())]
    lines.append(",".join(header))
    for name in sorted(instance.data):
        arr = np.atleast_2d(np.asarray(instance.data[name], dtype=float))
        for (i, j), value in np.ndenumerate(arr):
            lines.append(f"{name},{i},{j},{float(value)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_scalar(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def load_instance(path):
    """Inverse of :func:`save_instance` (vectors come back 1-D)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        kind = header[0]
        seed = None
        params = {}
        for item in header[1:]:
            key, _, value = item.partition("=")
            if key == "seed":
                seed = None if value == "None" else int(value)
            else:
                params[key] = _parse_scalar(value)
        cells = {}
        for line in fh:
            name, i, j, value = line.strip().split(",")
            cells.setdefault(name, {})[(int(i), int(j))] = float(value)
    data = {}
    for name, entries in cells.items():
        rows = 1 + max(i for i, _ in entries)
        cols = 1 + max(j for _, j in entries)
        arr = np.zeros((rows, cols))
        for (i, j), value in entries.items():
            arr[i, j] = value
        data[name] = arr[0] if rows == 1 else arr
    return ProblemInstance(kind, seed, params, data)


# Named experiment setups: full-scale figure presets plus desk-scale
# variants small enough for CI.
PRESETS = {
    "fig1": {"problem": "rotation", "n": 100, "lam": 1.0, "iters": 100},
    "fig2": {"problem": "strongly_monotone_toy", "n": 100, "lam": 1.0,
             "mu": 0.02, "iters": 200, "restarts": (17, 34, 68, 136)},
    "fig3": {"problem": "basis_pursuit", "d1": 100, "d2": 20, "lam": 0.01,
             "iters": 100, "seed": 1, "restarts": (30,)},
    "fig4": {"problem": "bilinear_game", "d1": 1000, "d2": 500, "iters": 100,
             "seed": 1, "step_fraction": 0.99, "restarts": (10,)},
    "fig5": {"problem": "tv_least_squares", "d1": 100, "p": 5, "gamma": 3.0,
             "rho": 0.05, "iters": 500, "seed": 1, "noise_scale": 0.1,
             "restarts": (20,)},
    "fig3-desk": {"problem": "basis_pursuit", "d1": 40, "d2": 10, "lam": 0.01,
                  "iters": 60, "seed": 1, "restarts": (30,)},
    "fig4-desk": {"problem": "bilinear_game", "d1": 50, "d2": 25, "iters": 100,
                  "seed": 1, "step_fraction": 0.99, "restarts": (10,)},
    "fig5-desk": {"problem": "tv_least_squares", "d1": 40, "p": 5, "gamma": 3.0,
                  "rho": 0.05, "iters": 100, "seed": 1, "noise_scale": 0.1,
                  "restarts": (20,)},
}
