"""Rate regions per scenario, 2-D hulls, and the closed-form example verifiers."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .channel import (
    BinaryMultiplierSpec,
    ChannelModel,
    FsMacChannel,
    ModuloAdditiveSpec,
    NoisyReceiverModel,
    build_binary_multiplier,
    build_modulo_additive,
    conditional_state_entropy,
    deterministic_csi,
    equivalent_channel,
    trivial_csi,
)
from .errors import (
    EnumerationLimitExceeded,
    NonFinitePoint,
    ScenarioMismatch,
    ValidationError,
    VerificationFailed,
)
from .information import (
    ConditionedInputPolicy,
    RateTriple,
    TeamPolicy,
    _xlog2x_sum,
    conditional_entropy,
    conditioned_input_joint,
    conditioned_input_rate_triple,
    cooperative_channel,
    entropy,
    rate_triple,
)
from .optimize import (
    OptimizerConfig,
    h_min_bruteforce,
    maximize_cooperative_kernel,
    maximize_sum_rate,
    maximize_weighted_rate,
    uniform_coset_policy,
)

SCENARIOS = (
    "causal_noisy_csit_full_csir",
    "noisy_csir",
    "deterministic_csit_of_csir",
    "delayed",
    "cooperative",
    "cooperative_noisy_csir",
)
DEFAULT_LAMBDAS = 33


@dataclass(frozen=True)
class ScenarioDescriptor:
    kind: str = "causal_noisy_csit_full_csir"
    delay_a: int = 0
    delay_b: int = 0
    f_a: Optional[tuple[int, ...]] = None
    f_b: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.kind!r}; expected one of {SCENARIOS}")
        if self.delay_a < 0 or self.delay_b < 0:
            raise ValidationError("delays must be nonnegative")
        if self.kind == "deterministic_csit_of_csir" and (self.f_a is None or self.f_b is None):
            raise ValidationError("deterministic_csit_of_csir needs both lookup tables f_a and f_b")
        if self.kind == "delayed" and (self.delay_a < 1 or self.delay_b < 1):
            raise ValidationError("delayed scenario needs delays of at least 1 on both encoders")

    @property
    def cooperative(self) -> bool:
        return self.kind.startswith("cooperative")


@dataclass
class Pentagon:
    lambda_a: float
    rates: RateTriple
    corners: np.ndarray
    source: str


@dataclass
class RateRegion:
    hull_points: np.ndarray
    pentagons: list[Pentagon] = field(default_factory=list)
    outer_sum_rate: Optional[float] = None

    def contains(self, points, tol: float = 1e-9) -> np.ndarray:
        return hull_contains(self.hull_points, points, tol)


# --------------------------------------------------------------------------
# hulls


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points) -> np.ndarray:
    """Counterclockwise hull by monotone chain, starting at the lowest-x point."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValidationError("convex hull of an empty point set")
    if not np.all(np.isfinite(pts)):
        raise NonFinitePoint("hull input contains NaN or infinite coordinates")
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) <= 2:
        return np.array(uniq)
    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def hull_contains(hull: np.ndarray, points, tol: float = 1e-9) -> np.ndarray:
    """True where a point is within ``tol`` of the (convex) hull."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    h = np.asarray(hull, dtype=np.float64)
    if len(h) == 1:
        return np.hypot(*(pts - h[0]).T) <= tol
    if len(h) == 2:
        d = h[1] - h[0]
        t = np.clip(((pts - h[0]) @ d) / (d @ d), 0.0, 1.0)
        return np.hypot(*(pts - h[0] - t[:, None] * d).T) <= tol
    e = np.roll(h, -1, axis=0) - h
    norm = np.hypot(e[:, 0], e[:, 1])
    rel = pts[:, None, :] - h[None, :, :]
    signed = (e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]) / norm[None, :]
    return np.all(signed >= -tol, axis=1)


# --------------------------------------------------------------------------
# scenario reduction


def _as_fsmac(model: ChannelModel) -> ChannelModel:
    if isinstance(model, ModuloAdditiveSpec):
        return build_modulo_additive(model)
    if isinstance(model, BinaryMultiplierSpec):
        return build_binary_multiplier(model)
    return model


def reduce_scenario(model: ChannelModel, scenario: ScenarioDescriptor) -> FsMacChannel:
    """The complete-CSIR channel whose strategy (or cooperative) region is the scenario's region."""
    m = _as_fsmac(model)
    kind = scenario.kind
    noisy = isinstance(m, NoisyReceiverModel)
    if kind in ("causal_noisy_csit_full_csir", "cooperative"):
        if noisy:
            raise ScenarioMismatch(f"{kind} needs a complete-CSIR model; use the noisy-CSIR variant")
        ch = m
    elif kind in ("noisy_csir", "cooperative_noisy_csir"):
        if not noisy:
            raise ScenarioMismatch(f"{kind} needs a noisy-receiver model")
        ch = equivalent_channel(m)
    elif kind == "deterministic_csit_of_csir":
        if not noisy:
            raise ScenarioMismatch(f"{kind} needs a noisy-receiver model")
        eq = equivalent_channel(m)
        if len(scenario.f_a) != eq.alphabets.nS or len(scenario.f_b) != eq.alphabets.nS:
            raise ScenarioMismatch(f"lookup tables must cover all {eq.alphabets.nS} receiver CSI symbols")
        ch = eq.with_csi(csi_a=deterministic_csi(scenario.f_a), csi_b=deterministic_csi(scenario.f_b))
    else:  # delayed: the encoders' current CSI is unavailable
        ch = equivalent_channel(m) if noisy else m
        n_s = ch.alphabets.nS
        ch = ch.with_csi(csi_a=trivial_csi(n_s), csi_b=trivial_csi(n_s))
    if scenario.cooperative:
        if scenario.delay_a < 1:
            raise ScenarioMismatch("cooperative scenarios need the common-message encoder delayed (delay_a >= 1)")
        ch = ch.with_csi(csi_a=trivial_csi(ch.alphabets.nS))
    return ch


def scenario_sum_rate(model: ChannelModel, scenario: ScenarioDescriptor,
                      config: OptimizerConfig | None = None) -> float:
    ch = reduce_scenario(model, scenario)
    if scenario.cooperative:
        return maximize_cooperative_kernel(cooperative_channel(ch), ch.state_dist, 1.0, config).value
    return maximize_sum_rate(ch, config).value


# --------------------------------------------------------------------------
# regions


def lambda_grid(count: int = DEFAULT_LAMBDAS) -> np.ndarray:
    if count < 1:
        raise ValidationError("need at least one lambda sample")
    return np.linspace(0.0, 1.0, count) if count > 1 else np.array([0.5])


def cooperative_corners(r_b: float, r_sum: float) -> np.ndarray:
    r_b = min(r_b, r_sum)
    return np.array([[0.0, 0.0], [r_sum, 0.0], [r_sum - r_b, r_b], [0.0, r_b]])


def _pentagon(ch: FsMacChannel, coop_kernel, lam: float, config, source: str) -> Pentagon:
    if coop_kernel is not None:
        res = maximize_cooperative_kernel(coop_kernel, ch.state_dist, lam, config)
        r_b, r_sum = res.rates
        return Pentagon(lam, RateTriple(r_sum, r_b, r_sum), cooperative_corners(r_b, r_sum), source)
    res = maximize_weighted_rate(ch, lam, config)
    return Pentagon(lam, res.rates, res.rates.corners(), source)


def inner_bound_region(model: ChannelModel, scenario: ScenarioDescriptor | None = None,
                       lambdas: Sequence[float] | int = DEFAULT_LAMBDAS,
                       config: OptimizerConfig | None = None) -> RateRegion:
    scenario = scenario or ScenarioDescriptor()
    cfg = config or OptimizerConfig()
    lams = lambda_grid(lambdas) if isinstance(lambdas, int) else np.asarray(lambdas, dtype=np.float64)
    ch = reduce_scenario(model, scenario)
    kernel = cooperative_channel(ch) if scenario.cooperative else None
    source = "cooperative" if scenario.cooperative else "pentagon"

    def run(lam):
        return _pentagon(ch, kernel, float(lam), cfg, source)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            pentagons = list(pool.map(run, lams))
    else:
        pentagons = [run(lam) for lam in lams]
    pts = np.vstack([np.zeros((1, 2))] + [p.corners for p in pentagons])
    hull = convex_hull_2d(np.maximum(pts, 0.0))
    outer = scenario_sum_rate(model, scenario, cfg)
    outer = max([outer] + [p.rates.r_sum for p in pentagons])
    return RateRegion(hull, pentagons, outer)


def outer_sum_rate(model: ChannelModel, scenario: ScenarioDescriptor | None = None,
                   config: OptimizerConfig | None = None) -> float:
    """Value of the sum-rate line R_a + R_b bounding every achievable pair."""
    return scenario_sum_rate(model, scenario or ScenarioDescriptor(), config)


# --------------------------------------------------------------------------
# verification reports


@dataclass
class Check:
    name: str
    passed: bool
    values: dict[str, Any]


@dataclass
class VerificationReport:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, **values) -> None:
        self.checks.append(Check(name, bool(passed), values))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            vals = ", ".join(f"{k}={_fmt(v)}" for k, v in c.values.items())
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: {vals}")
        return "\n".join(lines)

    def raise_if_failed(self) -> "VerificationReport":
        if not self.passed:
            raise VerificationFailed(self)
        return self


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, np.ndarray):
        return np.array2string(v, precision=6)
    return str(v)


def verify_modulo_example(spec: ModuloAdditiveSpec, config: OptimizerConfig | None = None,
                          tol: float = 1e-6) -> VerificationReport:
    rep = VerificationReport(f"modulo-additive q={spec.q}")
    ch = build_modulo_additive(spec)
    h_min, pair = h_min_bruteforce(spec)
    capacity = math.log2(spec.q) - h_min
    policy = uniform_coset_policy(spec, pair)
    triple = rate_triple(ch, policy)
    for name, v in zip(("r_a", "r_b", "r_sum"), triple.as_tuple()):
        rep.add(f"coset policy {name} = log q - H_min", abs(v - capacity) <= tol,
                value=v, target=capacity, h_min=h_min)
    opt = maximize_sum_rate(ch, config)
    rep.add("optimizer sum-rate = log q - H_min", abs(opt.value - capacity) <= tol,
            value=opt.value, target=capacity)

    joint_sz = spec.state_dist[:, None] * spec.noise_given_state
    h_z = entropy(joint_sz.sum(axis=0))
    h_z_given_s = float(spec.state_dist @ [entropy(r) for r in spec.noise_given_state])
    rep.add("H_min <= H(Z|S)", h_min <= h_z_given_s + 1e-12, h_min=h_min, h_z_given_s=h_z_given_s)
    mi = h_z - h_z_given_s
    gain = capacity - (math.log2(spec.q) - h_z)
    rep.add("gain over no side information >= I(S;Z)", gain >= mi - 1e-9, gain=gain, mutual_information=mi)
    return rep


def multiplier_policies() -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Input laws stated as maximizers of H(Y|S^r), H(Y|X^a,S^r) and H(Y|X^b,S^r) on the
    multiplier channel; each row is a CSI symbol, each column an input symbol."""
    half = np.full((2, 2), 0.5)
    one = np.array([[0.0, 1.0], [0.0, 1.0]])
    return {"sum": (half, half), "given_a": (one, half), "given_b": (half, one)}


def verify_binary_multiplier(spec: BinaryMultiplierSpec, config: OptimizerConfig | None = None,
                             cross_check: bool = True, tol: float = 1e-6) -> VerificationReport:
    """Checks each stated maximizer, then each region bound at a policy attaining it.

    With both inputs uniform the product X^a X^b is 1 only a quarter of the time,
    so H(Y|S^r) < 1 under the stated sum-rate maximizer; fixing X^a = 1 with X^b
    uniform does reach H(Y|S^r) = 1 and is used as the sum-rate witness.
    """
    rep = VerificationReport(f"binary multiplier p_s={spec.p_s:g} p_r={spec.p_r:g}")
    model = build_binary_multiplier(spec)
    h_s = conditional_state_entropy(model)
    target = 1.0 - h_s
    ident = np.arange(2)
    pols = {k: ConditionedInputPolicy(a, b, ident, ident) for k, (a, b) in multiplier_policies().items()}

    def h_output(key: str, given: list[str]) -> float:
        return conditional_entropy(conditioned_input_joint(model, pols[key]), "output",
                                   given + ["receiverCsi"])

    for key, label, given in (("sum", "H(Y|S^r)", []), ("given_a", "H(Y|X^a,S^r)", ["inputA"]),
                              ("given_b", "H(Y|X^b,S^r)", ["inputB"])):
        h = h_output(key, given)
        rep.add(f"{label} = 1 under its stated maximizer", abs(h - 1.0) <= 1e-9, value=h)
        h_all = h_output(key, ["inputA", "inputB"])
        rep.add(f"H(Y|X^a,X^b,S^r) = H(S|S^r) under the {label} maximizer", abs(h_all - h_s) <= 1e-9,
                value=h_all, target=h_s)

    h_witness = h_output("given_a", [])
    rep.add("H(Y|S^r) = 1 with X^a = 1 and X^b uniform", abs(h_witness - 1.0) <= 1e-9, value=h_witness)
    for key, bound in (("given_a", "r_sum"), ("given_b", "r_a"), ("given_a", "r_b")):
        r = getattr(conditioned_input_rate_triple(model, pols[key]), bound)
        rep.add(f"{bound} bound = 1 - H(S|S^r)", abs(r - target) <= tol, value=r, target=target)

    if cross_check:
        scen = ScenarioDescriptor("deterministic_csit_of_csir", f_a=(0, 1), f_b=(0, 1))
        ch = reduce_scenario(model, scen)
        best = {"r_sum": maximize_sum_rate(ch, config).rates.r_sum,
                "r_a": maximize_weighted_rate(ch, 1.0, config).rates.r_a,
                "r_b": maximize_weighted_rate(ch, 0.0, config).rates.r_b}
        for name, v in best.items():
            rep.add(f"optimizer max {name} = 1 - H(S|S^r)", abs(v - target) <= tol, value=v, target=target)
    return rep


# --------------------------------------------------------------------------
# auxiliary-variable form versus strategy form (cooperative, no receiver CSI)


def binary_decomposition(matrix, tol: float = 1e-15) -> list[tuple[float, np.ndarray]]:
    """Write a row-stochastic matrix as a convex combination of 0/1 row-stochastic matrices.

    Each round picks every row's largest remaining entry; the smallest of those
    is the weight, and it is removed from every chosen entry. At least one entry
    vanishes per round, so there are at most rows * cols terms.
    """
    rest = np.array(matrix, dtype=np.float64)
    rows, cols = rest.shape
    terms: list[tuple[float, np.ndarray]] = []
    total = 1.0
    for _ in range(rows * cols):
        if total <= tol:
            break
        pick = rest.argmax(axis=1)
        vals = rest[np.arange(rows), pick]
        w = float(vals.min())
        if w <= tol:
            break
        basis = np.zeros((rows, cols))
        basis[np.arange(rows), pick] = 1.0
        terms.append((w, basis))
        rest[np.arange(rows), pick] -= w
        low = int(vals.argmin())
        rest[low, pick[low]] = 0.0
        total -= w
    return terms


def _neg_xlog2x(m: np.ndarray) -> np.ndarray:
    return -m * np.log2(np.maximum(m, 1e-300))


class _AuxiliaryForm:
    """All deterministic maps m(s, x^a, u) -> x^b and the rate pairs they induce.

    A map is the tuple of its restrictions g_xa(s, u) = m(s, xa, u), one per
    input symbol of encoder a, so the per-input terms are evaluated on the
    restrictions and combined by broadcasting over all tuples.
    """

    def __init__(self, channel: FsMacChannel, n_u: int, map_limit: int = 1 << 20):
        a = channel.alphabets
        n_entries = a.nS * n_u
        self.n_sub = a.nXb ** n_entries
        if self.n_sub ** a.nXa > map_limit:
            raise EnumerationLimitExceeded(f"{self.n_sub ** a.nXa} auxiliary maps exceed {map_limit}")
        idx = np.arange(self.n_sub)[:, None]
        digits = (idx // a.nXb ** np.arange(n_entries)[None, :]) % a.nXb
        self.sub_maps = digits.reshape(-1, a.nS, n_u)           # g[k, s, u]
        q = np.zeros((a.nXa, self.n_sub, n_u, a.nY))
        for xa in range(a.nXa):
            for s in range(a.nS):
                q[xa] += channel.state_dist[s] * channel.channel[xa][self.sub_maps[:, s], s]
        self.kernel = q                                          # P(y | xa, u) per restriction
        self.kernel_entropy = _neg_xlog2x(q).sum(axis=-1)        # (xa, k, u)
        self.n_xa, self.n_u = a.nXa, n_u

    @property
    def n_maps(self) -> int:
        return self.n_sub ** self.n_xa

    @staticmethod
    def _combine(parts: list[np.ndarray]) -> np.ndarray:
        """Sum per-input arrays (n, k) over every tuple of restrictions -> (n, maps).

        Map index = sum_xa k_xa * n_sub**xa, so the last input varies slowest.
        """
        parts = parts[::-1]
        out = parts[0]
        for nxt in parts[1:]:
            out = (out[:, :, None] + nxt[:, None, :]).reshape(out.shape[0], -1)
        return out

    def rate_pairs(self, p_xau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """I(U;Y|X^a) and I(X^a,U;Y) for laws ``p_xau[n, xa, u]`` under every map; each (n, maps)."""
        h_all, h_a, py = [], [], []
        for xa in range(self.n_xa):
            pa = p_xau[:, xa]                                      # (n, u)
            h_all.append(pa @ self.kernel_entropy[xa].T)           # (n, k)
            m = np.einsum("nu,kuy->nky", pa, self.kernel[xa])      # P(xa, y) per restriction
            mass = pa.sum(axis=1)[:, None]
            h_a.append(_neg_xlog2x(m).sum(axis=-1) + mass * np.log2(np.maximum(mass, 1e-300)))
            py.append(m)
        h_all = self._combine(h_all)
        h_y = np.zeros_like(h_all)
        for y in range(py[0].shape[-1]):
            t = self._combine([m[:, :, y] for m in py])
            h_y -= t * np.log2(np.maximum(t, 1e-300))
        return self._combine(h_a) - h_all, h_y - h_all


def _hull_excess(hull: np.ndarray, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Largest outward distance of each point past the hull's edge lines, and the
    index of the edge attaining it."""
    e = np.roll(hull, -1, axis=0) - hull
    normal = np.stack([e[:, 1], -e[:, 0]], axis=1) / np.hypot(e[:, 0], e[:, 1])[:, None]
    dist = pts @ normal.T - np.sum(hull * normal, axis=1)[None, :]
    edge = dist.argmax(axis=1)
    return dist[np.arange(len(pts)), edge], edge


class _CooperativeHull:
    """Strategy-form cooperative hull, refined on demand along violated edge normals."""

    def __init__(self, kernel: np.ndarray, state_dist: np.ndarray, lambdas: int, cfg):
        self.kernel, self.state_dist, self.cfg = kernel, state_dist, cfg
        self.policies: list[np.ndarray] = []
        self.points = [np.zeros((1, 2))]
        for lam in lambda_grid(lambdas):
            self._add(float(lam))
        self._rebuild()

    def _add(self, lam: float) -> None:
        res = maximize_cooperative_kernel(self.kernel, self.state_dist, lam, self.cfg)
        self.policies.append(res.policy.pi_joint)
        self.points.append(cooperative_corners(*res.rates))

    def _rebuild(self) -> None:
        self.hull = convex_hull_2d(np.vstack(self.points))

    def _near_boundary(self, pts: np.ndarray, tol: float) -> np.ndarray:
        """Drop points whose height above the upper envelope is at most ``tol``; the vertical
        gap bounds the normal distance, so those points are inside up to ``tol``."""
        xs = np.unique(self.hull[:, 0])
        ys = np.array([self.hull[self.hull[:, 0] == x, 1].max() for x in xs])
        gap = np.where(pts[:, 0] > xs[-1] + tol, np.inf,
                       pts[:, 1] - np.interp(np.minimum(pts[:, 0], xs[-1]), xs, ys))
        return pts[gap > tol]

    def excess(self, pts: np.ndarray, tol: float, max_refinements: int = 64) -> float:
        """Max distance of ``pts`` outside the hull after refining wherever it exceeds ``tol``."""
        for _ in range(max_refinements):
            pts = self._near_boundary(pts, tol)
            if len(pts) == 0:
                return -np.inf
            over, edge = _hull_excess(self.hull, pts)
            worst = int(over.argmax())
            if over[worst] <= tol:
                return float(over[worst])
            e = np.roll(self.hull, -1, axis=0)[edge[worst]] - self.hull[edge[worst]]
            nx, ny = e[1], -e[0]
            if nx < 0 or ny < 0:
                return float(over[worst])
            before = len(self.hull), self.hull.sum()
            self._add(float(nx / (nx + ny)))
            self._rebuild()
            if (len(self.hull), self.hull.sum()) == before:
                return float(over[worst])
        pts = self._near_boundary(pts, tol)
        return float(_hull_excess(self.hull, pts)[0].max()) if len(pts) else -np.inf


def verify_auxiliary_equivalence(channel: FsMacChannel, samples: int = 10_000,
                                 config: OptimizerConfig | None = None,
                                 lambdas: int = DEFAULT_LAMBDAS, rng_seed: int = 0,
                                 decomposition_trials: int = 100,
                                 contain_tol: float = 1e-6, match_tol: float = 1e-4,
                                 chunk: int = 32) -> VerificationReport:
    """Sampled two-sided comparison of the auxiliary-variable and strategy forms of the
    cooperative region when encoder b sees the state, encoder a sees nothing and the
    receiver has no CSI."""
    a = channel.alphabets
    if max(a.nS, a.nXa, a.nXb) > 2:
        raise ScenarioMismatch("the auxiliary check is limited to binary state and inputs")
    if a.nSa != 1 or a.nSb != a.nS or not np.array_equal(channel.csi_b, np.eye(a.nS)):
        raise ScenarioMismatch("encoder a must be uninformed and encoder b must see the state")
    cfg = config or OptimizerConfig(restarts=1)
    rep = VerificationReport(f"auxiliary form vs strategy form ({samples} samples)")

    # strategy form without receiver CSI: average the kernel over the state
    k = cooperative_channel(channel)
    k0 = np.einsum("s,absy->aby", channel.state_dist, k)[:, :, None, :]
    strat = _CooperativeHull(k0, np.ones(1), lambdas, cfg)

    n_t = k.shape[1]
    aux = _AuxiliaryForm(channel, n_t)
    rng = np.random.Generator(np.random.Philox(rng_seed))
    worst = -np.inf
    for start in range(0, samples, chunk):
        n = min(chunk, samples - start)
        p = rng.dirichlet(np.ones(a.nXa * n_t), size=n).reshape(n, a.nXa, n_t)
        r_b, r_sum = (x.ravel() for x in aux.rate_pairs(p))
        r_b = np.minimum(r_b, r_sum)
        corners = np.concatenate([np.stack([r_sum, np.zeros_like(r_sum)], axis=1),
                                  np.stack([r_sum - r_b, r_b], axis=1)])
        worst = max(worst, strat.excess(corners, contain_tol))
    rep.add("auxiliary pairs inside strategy hull", worst <= contain_tol,
            max_excess=max(worst, 0.0), samples=samples, maps=aux.n_maps,
            strategy_optimizations=len(strat.policies))

    # canonical embedding u = t with m(s, xa, u) = digit s of u, the same map for every xa
    canon_sub = (np.arange(n_t)[None, :] // a.nXb ** np.arange(a.nS)[:, None]) % a.nXb   # (s, u)
    sub = int(np.flatnonzero((aux.sub_maps == canon_sub[None]).all(axis=(1, 2)))[0])
    canon_idx = sum(sub * aux.n_sub ** xa for xa in range(a.nXa))
    canon_pts = [np.zeros((1, 2))]
    for pi in strat.policies:
        rb, rs = (x[0, canon_idx] for x in aux.rate_pairs(pi[None]))
        canon_pts.append(cooperative_corners(rb, rs))
    canon_pts = np.vstack(canon_pts)
    dist = max(float(np.min(np.hypot(*(canon_pts - v).T))) for v in strat.hull)
    rep.add("every strategy hull vertex matched by an auxiliary pair", dist <= match_tol,
            max_distance=dist, vertices=len(strat.hull))

    drng = np.random.Generator(np.random.Philox(rng_seed + 1))
    err, max_terms, ok_terms = 0.0, 0, True
    for _ in range(decomposition_trials):
        rows, cols = int(drng.integers(2, 6)), int(drng.integers(2, 6))
        mat = drng.dirichlet(np.ones(cols), size=rows)
        terms = binary_decomposition(mat)
        recon = sum(w * b for w, b in terms)
        err = max(err, float(np.abs(recon - mat).max()))
        max_terms = max(max_terms, len(terms))
        ok_terms &= len(terms) <= rows * cols and abs(sum(w for w, _ in terms) - 1) < 1e-10
    rep.add("binary stochastic decomposition reconstructs", err <= 1e-10 and ok_terms,
            max_error=err, max_terms=max_terms, trials=decomposition_trials)
    return rep


def auxiliary_example_channel() -> FsMacChannel:
    """Asymmetric binary instance: encoder b sees the state, encoder a sees nothing."""
    w = np.zeros((2, 2, 2, 2))
    flip = {(0, 0, 0): 0.05, (0, 1, 0): 0.2, (1, 0, 0): 0.3, (1, 1, 0): 0.1,
            (0, 0, 1): 0.15, (0, 1, 1): 0.4, (1, 0, 1): 0.1, (1, 1, 1): 0.25}
    for (xa, xb, s), e in flip.items():
        y = (xa + xb * (1 + s)) % 2
        w[xa, xb, s, y] = 1 - e
        w[xa, xb, s, 1 - y] = e
    return FsMacChannel(np.array([0.65, 0.35]), trivial_csi(2), np.eye(2), w)
