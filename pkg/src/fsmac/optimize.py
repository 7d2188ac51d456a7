"""Rate maximization over team policies.

Every objective is a signed combination of the four conditional output
entropies H(Y|S), H(Y|A,S), H(Y|B,S), H(Y|A,B,S). Positive weights only ever
sit on the first three (concave in the policy) and the last one is linear, so
each objective is concave in a single simplex block. Block ascent uses
exponentiated-gradient (mirror) steps with a backtracking step size that only
accepts non-decreasing moves.
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .channel import FsMacChannel, ModuloAdditiveSpec, strategy_space_size
from .errors import NotConverged, OracleBudgetExceeded, ValidationError
from .information import (
    CooperativePolicy,
    RateTriple,
    TeamPolicy,
    _xlog2x_sum,
    cooperative_channel,
    output_entropies,
    strategy_channel,
)
from .strategies import strategy_table

ORACLE_BUDGET = 10**8
_FLOOR = 1e-300
_SNAP = 1e-12

# weight rows over (H(Y|S), H(Y|A,S), H(Y|B,S), H(Y|A,B,S))
_SUM = np.array([1.0, 0.0, 0.0, -1.0])
_RATE_A = np.array([0.0, 0.0, 1.0, -1.0])
_RATE_B = np.array([0.0, 1.0, 0.0, -1.0])


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 16
    max_outer_iters: int = 500
    inner_step_tolerance: float = 1e-9
    objective_tolerance: float = 1e-8
    rng_seed: int = 0
    grid_resolution: int = 8
    threads: int = 1
    max_inner_steps: int = 200

    def __post_init__(self):
        for name in ("restarts", "max_outer_iters", "grid_resolution", "threads", "max_inner_steps"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(f"{name} must be at least 1")
        for name in ("inner_step_tolerance", "objective_tolerance"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")


@dataclass
class OptimizationResult:
    value: float
    policy: Union[TeamPolicy, CooperativePolicy]
    converged: bool
    restart_values: list[float]
    history: list[float] = field(default_factory=list)
    rates: Union[RateTriple, tuple[float, float], None] = None


def weighted_objective(lambda_a: float) -> np.ndarray:
    """Entropy weights of the pentagon support function in direction (lambda_a, 1 - lambda_a)."""
    _check_lambda(lambda_a)
    if lambda_a >= 0.5:
        return (1 - lambda_a) * _SUM + (2 * lambda_a - 1) * _RATE_A
    return lambda_a * _SUM + (1 - 2 * lambda_a) * _RATE_B


def cooperative_objective(lambda_a: float) -> np.ndarray:
    """Support function of the quadrilateral with corners (r_sum, 0) and (r_sum - r_b, r_b)."""
    _check_lambda(lambda_a)
    if lambda_a >= 0.5:
        return lambda_a * _SUM
    return lambda_a * _SUM + (1 - 2 * lambda_a) * _RATE_B


def _check_lambda(lambda_a: float) -> None:
    if not 0.0 <= lambda_a <= 1.0:
        raise ValidationError(f"lambda must lie in [0, 1], got {lambda_a!r}")


# --------------------------------------------------------------------------
# block mirror ascent


class _Evaluator:
    def __init__(self, kernel: np.ndarray, state_dist: np.ndarray, weights: np.ndarray):
        self.kernel = kernel
        self.state_dist = state_dist
        self.weights = weights
        self.kernel_entropy = -_xlog2x_sum(kernel, axis=3)

    def __call__(self, pi: np.ndarray) -> tuple[float, np.ndarray]:
        e = output_entropies(self.kernel, self.state_dist, pi, self.kernel_entropy)
        return float(self.weights @ e.h), np.tensordot(self.weights, e.grad, axes=1)


def _normalise(x: np.ndarray) -> np.ndarray:
    x = np.maximum(x, _FLOOR)
    return x / x.sum()


def _ascend_block(x: np.ndarray, fg: Callable, cfg: OptimizerConfig,
                  history: list[float]) -> tuple[np.ndarray, float]:
    """Exponentiated-gradient ascent of a concave ``fg`` on one simplex."""
    v, g = fg(x)
    eta = 1.0
    for _ in range(cfg.max_inner_steps):
        # duality gap of the linearization bounds the block suboptimality
        if g.max() - x @ g < cfg.inner_step_tolerance:
            break
        shift = g[x > 1e-200].max()
        accepted = False
        while eta > 1e-12:
            y = _normalise(x * np.exp(np.minimum(eta * (g - shift), 700.0)))
            vy, gy = fg(y)
            if vy >= v:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        gain = vy - v
        x, v, g = y, vy, gy
        history.append(v)
        eta *= 2.0
        if gain < cfg.inner_step_tolerance * 1e-3:
            break
    return x, v


def _snap(x: np.ndarray) -> np.ndarray:
    y = np.where(x < _SNAP, 0.0, x)
    return y / y.sum()


def _product_run(ev: _Evaluator, a: np.ndarray, b: np.ndarray, cfg: OptimizerConfig):
    history: list[float] = []
    v = ev(np.outer(a, b))[0]
    history.append(v)
    converged = False
    for _ in range(cfg.max_outer_iters):
        before = v

        def fa(x, b=b):
            val, grad = ev(np.outer(x, b))
            return val, grad @ b

        a, v = _ascend_block(a, fa, cfg, history)

        def fb(x, a=a):
            val, grad = ev(np.outer(a, x))
            return val, a @ grad

        b, v = _ascend_block(b, fb, cfg, history)
        if v - before < cfg.objective_tolerance:
            converged = True
            break
    sa, sb = _snap(a), _snap(b)
    vs = ev(np.outer(sa, sb))[0]
    if vs >= v - 1e-12:
        a, b, v = sa, sb, vs
    return v, (a / a.sum(), b / b.sum()), converged, history


def _joint_run(ev: _Evaluator, pi: np.ndarray, cfg: OptimizerConfig):
    shape = pi.shape
    history: list[float] = [ev(pi)[0]]

    def f(x):
        val, grad = ev(x.reshape(shape))
        return val, grad.ravel()

    x = pi.ravel()
    v = history[0]
    converged = False
    for _ in range(cfg.max_outer_iters):
        before = v
        x, v = _ascend_block(x, f, cfg, history)
        if v - before < cfg.objective_tolerance:
            converged = True
            break
    xs = _snap(x)
    vs = f(xs)[0]
    if vs >= v - 1e-12:
        x, v = xs, vs
    return v, (x / x.sum()).reshape(shape), converged, history


def _starts(sizes: tuple[int, ...], cfg: OptimizerConfig, restart: int) -> list[np.ndarray]:
    """Uniform for restart 0, else Dirichlet(1) draws from generator ``seed + restart``."""
    if restart == 0:
        return [np.full(n, 1.0 / n) for n in sizes]
    rng = np.random.default_rng(cfg.rng_seed + restart)
    return [_normalise(rng.dirichlet(np.ones(n))) for n in sizes]


def _best(runs: list, cfg: OptimizerConfig):
    values = [r[0] for r in runs]
    best = int(np.argmax(values))   # first maximum wins ties
    if not runs[best][2]:
        warnings.warn(f"ascent hit the {cfg.max_outer_iters}-iteration cap", NotConverged,
                      stacklevel=3)
    return best, values


def _map(fn, items, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def ascend_product_policy(kernel: np.ndarray, state_dist: np.ndarray, weights: np.ndarray,
                          config: OptimizerConfig | None = None) -> OptimizationResult:
    """Maximize ``weights . h`` over product policies pi_a x pi_b for a kernel ``[a, b, s, y]``."""
    cfg = config or OptimizerConfig()
    ev = _Evaluator(np.asarray(kernel, dtype=np.float64), np.asarray(state_dist, dtype=np.float64),
                    np.asarray(weights, dtype=np.float64))
    n_a, n_b = kernel.shape[:2]

    def run(r):
        return _product_run(ev, *_starts((n_a, n_b), cfg, r), cfg)

    runs = _map(run, range(cfg.restarts), cfg.threads)
    best, values = _best(runs, cfg)
    v, (a, b), conv, hist = runs[best]
    policy = TeamPolicy(a, b)
    rates = output_entropies(ev.kernel, ev.state_dist, policy.joint).rates
    return OptimizationResult(v, policy, conv, values, hist, rates)


def ascend_joint_policy(kernel: np.ndarray, state_dist: np.ndarray, weights: np.ndarray,
                        config: OptimizerConfig | None = None) -> OptimizationResult:
    """Maximize ``weights . h`` over unrestricted joint policies pi[a, b]."""
    cfg = config or OptimizerConfig()
    ev = _Evaluator(np.asarray(kernel, dtype=np.float64), np.asarray(state_dist, dtype=np.float64),
                    np.asarray(weights, dtype=np.float64))
    shape = kernel.shape[:2]
    n = shape[0] * shape[1]

    runs = _map(lambda r: _joint_run(ev, _starts((n,), cfg, r)[0].reshape(shape), cfg),
                range(cfg.restarts), cfg.threads)
    best, values = _best(runs, cfg)
    v, pi, conv, hist = runs[best]
    rates = output_entropies(ev.kernel, ev.state_dist, pi).rates
    return OptimizationResult(v, CooperativePolicy(pi), conv, values, hist, (rates.r_b, rates.r_sum))


# --------------------------------------------------------------------------
# public entry points


def maximize_sum_rate(channel: FsMacChannel, config: OptimizerConfig | None = None) -> OptimizationResult:
    """max over product team policies of I(T^a, T^b; Y | S)."""
    return ascend_product_policy(strategy_channel(channel), channel.state_dist, _SUM, config)


def maximize_weighted_rate(channel: FsMacChannel, lambda_a: float,
                           config: OptimizerConfig | None = None) -> OptimizationResult:
    """max over product policies of the pentagon support function in direction (lambda_a, 1 - lambda_a)."""
    return ascend_product_policy(strategy_channel(channel), channel.state_dist,
                                 weighted_objective(lambda_a), config)


def maximize_cooperative_kernel(kernel: np.ndarray, state_dist: np.ndarray, lambda_a: float,
                                config: OptimizerConfig | None = None) -> OptimizationResult:
    return ascend_joint_policy(kernel, state_dist, cooperative_objective(lambda_a), config)


def maximize_cooperative(channel: FsMacChannel, lambda_a: float,
                         config: OptimizerConfig | None = None) -> OptimizationResult:
    """Ascent over joint policies on (x^a, t^b); encoder a is uninformed."""
    strategy_space_size(channel.alphabets.nXa * channel.alphabets.nXb ** channel.alphabets.nSb, 1,
                        channel.enumeration_limit)
    return maximize_cooperative_kernel(cooperative_channel(channel), channel.state_dist,
                                       lambda_a, config)


# --------------------------------------------------------------------------
# grid oracle


def simplex_grid(n: int, g: int) -> np.ndarray:
    """All probability vectors of length ``n`` with entries in {0, 1/g, ..., 1}."""
    if n == 1:
        return np.ones((1, 1))
    rows = []
    for bars in itertools.combinations(range(g + n - 1), n - 1):
        edges = (-1,) + bars + (g + n - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(n)])
    return np.array(rows, dtype=np.float64) / g


def _batched_entropies(kernel: np.ndarray, state_dist: np.ndarray, pis: np.ndarray,
                       kernel_entropy: np.ndarray) -> np.ndarray:
    """(N, 4) conditional output entropies for a batch of joint policies ``pis[n, a, b]``."""
    n_a, n_b, n_s, n_y = kernel.shape
    k = kernel.reshape(n_a, n_b, n_s * n_y)
    ps = np.repeat(state_dist, n_y)
    m0 = pis.reshape(len(pis), -1) @ k.reshape(n_a * n_b, -1)
    ma = np.einsum("nab,abk->nak", pis, k)
    mb = np.einsum("nab,abk->nbk", pis, k)
    mu_a = pis.sum(axis=2)
    mu_b = pis.sum(axis=1)

    def cond(m, mu):
        # sum_g mu_g * H(p(.|g, s)) expressed through m = mu * p
        with np.errstate(divide="ignore", invalid="ignore"):
            p = m / np.where(mu > 0, mu, 1.0)[..., None]
            t = np.where(m > 0, m * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return -(t * ps).sum(axis=(-1, -2))

    with np.errstate(divide="ignore", invalid="ignore"):
        h0 = -(np.where(m0 > 0, m0 * np.log2(np.where(m0 > 0, m0, 1.0)), 0.0) * ps).sum(axis=1)
    hab = np.einsum("nab,ab->n", pis, kernel_entropy @ state_dist)
    return np.stack([h0, cond(ma, mu_a), cond(mb, mu_b), hab], axis=1)


def exhaustive_oracle_kernel(kernel: np.ndarray, state_dist: np.ndarray, weights: np.ndarray,
                             grid_resolution: int, joint: bool = False,
                             chunk: int = 8192) -> float:
    """Best objective over all grid policies (product pairs, or joint if ``joint``)."""
    kernel = np.asarray(kernel, dtype=np.float64)
    n_a, n_b = kernel.shape[:2]
    g = int(grid_resolution)
    if g < 1:
        raise ValidationError("grid resolution must be at least 1")
    if joint:
        count = math.comb(g + n_a * n_b - 1, n_a * n_b - 1)
    else:
        count = math.comb(g + n_a - 1, n_a - 1) * math.comb(g + n_b - 1, n_b - 1)
    if count > ORACLE_BUDGET:
        raise OracleBudgetExceeded(f"{count} grid evaluations exceed the budget of {ORACLE_BUDGET}")
    ke = -_xlog2x_sum(kernel, axis=3)
    w = np.asarray(weights, dtype=np.float64)
    best = -np.inf
    if joint:
        grid = simplex_grid(n_a * n_b, g).reshape(-1, n_a, n_b)
        for i in range(0, len(grid), chunk):
            best = max(best, float((_batched_entropies(kernel, state_dist, grid[i:i + chunk], ke) @ w).max()))
        return best
    grid_a, grid_b = simplex_grid(n_a, g), simplex_grid(n_b, g)
    step = max(1, chunk // len(grid_b))
    for i in range(0, len(grid_a), step):
        pis = np.einsum("ia,jb->ijab", grid_a[i:i + step], grid_b).reshape(-1, n_a, n_b)
        best = max(best, float((_batched_entropies(kernel, state_dist, pis, ke) @ w).max()))
    return best


def exhaustive_oracle(channel: FsMacChannel, objective: str = "sum", grid_resolution: int = 8,
                      lambda_a: float = 0.5) -> float:
    """Grid maximum of ``objective`` in {"sum", "weighted", "cooperative"}."""
    if objective == "sum":
        return exhaustive_oracle_kernel(strategy_channel(channel), channel.state_dist, _SUM,
                                        grid_resolution)
    if objective == "weighted":
        return exhaustive_oracle_kernel(strategy_channel(channel), channel.state_dist,
                                        weighted_objective(lambda_a), grid_resolution)
    if objective == "cooperative":
        return exhaustive_oracle_kernel(cooperative_channel(channel), channel.state_dist,
                                        cooperative_objective(lambda_a), grid_resolution, joint=True)
    raise ValidationError(f"unknown objective {objective!r}")


# --------------------------------------------------------------------------
# modulo-additive helpers


def _shifted_noise_entropy(spec: ModuloAdditiveSpec, ta: np.ndarray, tb: np.ndarray) -> float:
    q = spec.q
    h = 0.0
    for s in range(len(spec.state_dist)):
        dist = np.zeros(q)
        for sa in range(spec.csi_a.shape[1]):
            for sb in range(spec.csi_b.shape[1]):
                w = spec.csi_a[s, sa] * spec.csi_b[s, sb]
                dist += w * np.roll(spec.noise_given_state[s], ta[sa] + tb[sb])
        h -= spec.state_dist[s] * float(_xlog2x_sum(dist))
    return h


def h_min_bruteforce(spec: ModuloAdditiveSpec, limit: int | None = None) -> tuple[float, tuple[int, int]]:
    """min over strategy pairs of H(Z + t^a(S^a) + t^b(S^b) | S) with its lowest-index argmin."""
    kw = {} if limit is None else {"limit": limit}
    tab_a = strategy_table(spec.q, spec.csi_a.shape[1], **kw)
    tab_b = strategy_table(spec.q, spec.csi_b.shape[1], **kw)
    best, arg = np.inf, (0, 0)
    for ia, ta in enumerate(tab_a):
        for ib, tb in enumerate(tab_b):
            h = _shifted_noise_entropy(spec, ta, tb)
            if h < best - 1e-12:
                best, arg = h, (ia, ib)
    return max(best, 0.0), arg


def uniform_coset_policy(spec: ModuloAdditiveSpec, pair: tuple[int, int]) -> TeamPolicy:
    """Mass 1/q on each shift t^a* + tau and on each t^b* - tau."""
    q = spec.q
    n_a, n_b = spec.csi_a.shape[1], spec.csi_b.shape[1]
    tab_a, tab_b = strategy_table(q, n_a), strategy_table(q, n_b)
    pow_a, pow_b = q ** np.arange(n_a), q ** np.arange(n_b)
    pi_a, pi_b = np.zeros(len(tab_a)), np.zeros(len(tab_b))
    for tau in range(q):
        pi_a[int(((tab_a[pair[0]] + tau) % q) @ pow_a)] += 1.0 / q
        pi_b[int(((tab_b[pair[1]] - tau) % q) @ pow_b)] += 1.0 / q
    return TeamPolicy(pi_a, pi_b)
