"""Joint distributions induced by team policies, and the entropies and
conditional mutual informations that bound the achievable rates.

All quantities are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .channel import FsMacChannel, NoisyReceiverModel, check_stochastic, equivalent_channel
from .errors import (
    AxisOverlap,
    ConsistencyError,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidDistribution,
    ValidationError,
)
from .strategies import strategy_table

POLICY_TOL = 1e-12
CLAMP_TOL = 1e-10
_TINY = 1e-300


# --------------------------------------------------------------------------
# policies


def _policy_vector(p, name: str, size: int | None, tol: float) -> np.ndarray:
    arr = check_stochastic(p, name, tol=tol)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a vector, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise DimensionMismatch(f"{name} has {arr.shape[0]} entries, strategy space has {size}")
    return arr


@dataclass(frozen=True, eq=False)
class TeamPolicy:
    """Independent distributions over the two encoders' strategy spaces."""

    pi_a: np.ndarray
    pi_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pi_a", _policy_vector(self.pi_a, "pi_a", None, POLICY_TOL))
        object.__setattr__(self, "pi_b", _policy_vector(self.pi_b, "pi_b", None, POLICY_TOL))

    @classmethod
    def from_user(cls, pi_a, pi_b, tol: float = 1e-9) -> "TeamPolicy":
        """Accept hand-written vectors (decimal rounding) and renormalise them."""
        a = np.array(_policy_vector(pi_a, "pi_a", None, tol))
        b = np.array(_policy_vector(pi_b, "pi_b", None, tol))
        return cls(a / a.sum(), b / b.sum())

    @classmethod
    def uniform(cls, n_a: int, n_b: int) -> "TeamPolicy":
        return cls(np.full(n_a, 1.0 / n_a), np.full(n_b, 1.0 / n_b))

    @property
    def joint(self) -> np.ndarray:
        return np.outer(self.pi_a, self.pi_b)


@dataclass(frozen=True, eq=False)
class CooperativePolicy:
    """Joint distribution over (uninformed input x^a, informed strategy t^b)."""

    pi_joint: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pi_joint, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionMismatch(f"pi_joint must be a matrix, got shape {arr.shape}")
        flat = check_stochastic(arr.ravel(), "pi_joint", tol=POLICY_TOL)
        object.__setattr__(self, "pi_joint", flat.reshape(arr.shape))

    @classmethod
    def product(cls, pi_xa, pi_tb) -> "CooperativePolicy":
        return cls(np.outer(pi_xa, pi_tb))


@dataclass(frozen=True, eq=False)
class ConditionedInputPolicy:
    """Input distributions conditioned on CSI symbols that are deterministic
    functions of the receiver's CSI: x^a ~ pi_a[f_a[s^r]], x^b ~ pi_b[f_b[s^r]]."""

    pi_a_given_csi: np.ndarray
    pi_b_given_csi: np.ndarray
    f_a: np.ndarray
    f_b: np.ndarray

    def __post_init__(self):
        for name in ("pi_a_given_csi", "pi_b_given_csi"):
            k = check_stochastic(getattr(self, name), name, tol=POLICY_TOL)
            if k.ndim != 2:
                raise DimensionMismatch(f"{name} must be a matrix (csi symbol x input)")
            object.__setattr__(self, name, k)
        for name, rows in (("f_a", self.pi_a_given_csi.shape[0]), ("f_b", self.pi_b_given_csi.shape[0])):
            f = np.array(getattr(self, name), dtype=np.int64)
            if f.ndim != 1 or np.any(f < 0) or np.any(f >= rows):
                raise IndexOutOfRange(f"{name} must map receiver CSI into [0, {rows})")
            f.setflags(write=False)
            object.__setattr__(self, name, f)


# --------------------------------------------------------------------------
# joint distributions and information measures


@dataclass(frozen=True, eq=False)
class JointDistribution:
    probs: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        labels = tuple(self.labels)
        if p.ndim != len(labels) or len(set(labels)) != len(labels):
            raise DimensionMismatch(f"{p.ndim}-axis tensor with labels {labels}")
        if np.any(p < 0):
            raise InvalidDistribution("joint distribution has negative entries")
        if abs(p.sum() - 1.0) > 1e-10:
            raise InvalidDistribution(f"joint distribution sums to {p.sum()!r}")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "labels", labels)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.probs.shape

    def axis(self, a: Union[int, str]) -> int:
        if isinstance(a, str):
            try:
                return self.labels.index(a)
            except ValueError:
                raise DimensionMismatch(f"no axis labelled {a!r} in {self.labels}") from None
        if not 0 <= a < self.probs.ndim:
            raise DimensionMismatch(f"axis {a} out of range")
        return int(a)

    def marginal(self, axes: Sequence[Union[int, str]]) -> np.ndarray:
        """Marginal over ``axes``, returned with axes in the order given."""
        idx = [self.axis(a) for a in axes]
        drop = tuple(i for i in range(self.probs.ndim) if i not in idx)
        m = self.probs.sum(axis=drop)
        kept = sorted(idx)
        return np.transpose(m, [kept.index(i) for i in idx]) if idx else np.asarray(m)


def _xlog2x_sum(p: np.ndarray, axis=None) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return t.sum(axis=axis)


def entropy(p) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.float64).ravel()
    if p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"not a probability vector: {p!r}")
    return float(-_xlog2x_sum(p))


def _joint_entropy(joint: JointDistribution, axes: Sequence[int]) -> float:
    if not axes:
        return 0.0
    return float(-_xlog2x_sum(joint.marginal(axes)))


def clamp_information(value: float, tol: float = CLAMP_TOL) -> float:
    """Map float noise in [-tol, tol] to 0; anything more negative is a bug."""
    if value < -tol:
        raise ConsistencyError(f"mutual information {value!r} is negative beyond tolerance")
    return float(value) if value > tol else 0.0


def _axis_set(joint, axes) -> list[int]:
    if isinstance(axes, (int, str)):
        axes = [axes]
    return [joint.axis(a) for a in axes]


def conditional_entropy(joint: JointDistribution, axes, given=()) -> float:
    """H(axes | given); conditioning outcomes of zero probability contribute nothing."""
    a = _axis_set(joint, axes)
    g = _axis_set(joint, given)
    if set(a) & set(g):
        raise AxisOverlap(f"axes {a} and {g} overlap")
    return _joint_entropy(joint, sorted(set(a) | set(g))) - _joint_entropy(joint, sorted(g))


def conditional_mutual_information(joint: JointDistribution, axes_a, axes_b, axes_c=()) -> float:
    """I(A; B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)."""
    a, b, c = _axis_set(joint, axes_a), _axis_set(joint, axes_b), _axis_set(joint, axes_c)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise AxisOverlap(f"axis sets {a}, {b}, {c} are not disjoint")
    if not a or not b:
        raise AxisOverlap("both information arguments need at least one axis")
    h_ac = _joint_entropy(joint, sorted(a + c))
    h_bc = _joint_entropy(joint, sorted(b + c))
    h_abc = _joint_entropy(joint, sorted(a + b + c))
    h_c = _joint_entropy(joint, sorted(c))
    return clamp_information(h_ac + h_bc - h_abc - h_c)


@dataclass(frozen=True)
class RateTriple:
    """Bounds on R_a, R_b and R_a + R_b for one policy (bits per channel use)."""

    r_a: float
    r_b: float
    r_sum: float

    @classmethod
    def clamped(cls, r_a: float, r_b: float, r_sum: float) -> "RateTriple":
        return cls(clamp_information(r_a), clamp_information(r_b), clamp_information(r_sum))

    def corners(self) -> np.ndarray:
        """The five vertices of the rate pentagon, counterclockwise from the origin."""
        ra = min(self.r_a, self.r_sum)
        rb = min(self.r_b, self.r_sum)
        return np.array([[0.0, 0.0], [ra, 0.0], [ra, max(self.r_sum - ra, 0.0)],
                         [max(self.r_sum - rb, 0.0), rb], [0.0, rb]])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r_a, self.r_b, self.r_sum)


# --------------------------------------------------------------------------
# kernels over strategies


def strategy_channel(channel: FsMacChannel) -> np.ndarray:
    """P(y | t^a, t^b, s) as an array indexed ``[ta, tb, s, y]``: the channel seen
    through the encoders' strategies, averaged over their noisy CSI."""
    a = channel.alphabets
    tab_a = strategy_table(a.nXa, a.nSa, channel.enumeration_limit)
    tab_b = strategy_table(a.nXb, a.nSb, channel.enumeration_limit)
    w = channel.channel
    out = np.zeros((tab_a.shape[0], tab_b.shape[0], a.nS, a.nY))
    for sa in range(a.nSa):
        wa = w[tab_a[:, sa]]                          # (Ta, Xb, S, Y)
        for sb in range(a.nSb):
            weight = channel.csi_a[:, sa] * channel.csi_b[:, sb]   # (S,)
            if not np.any(weight):
                continue
            out += wa[:, tab_b[:, sb]] * weight[None, None, :, None]
    return out


def cooperative_channel(channel: FsMacChannel) -> np.ndarray:
    """P(y | x^a, t^b, s) indexed ``[xa, tb, s, y]``. Encoder a's CSI is ignored:
    the uninformed encoder sends its input symbol directly."""
    a = channel.alphabets
    tab_b = strategy_table(a.nXb, a.nSb, channel.enumeration_limit)
    w = channel.channel
    out = np.zeros((a.nXa, tab_b.shape[0], a.nS, a.nY))
    for sb in range(a.nSb):
        out += w[:, tab_b[:, sb]] * channel.csi_b[:, sb][None, None, :, None]
    return out


def _check_policy_dims(kernel: np.ndarray, n_a: int, n_b: int) -> None:
    if kernel.shape[0] != n_a or kernel.shape[1] != n_b:
        raise DimensionMismatch(
            f"policy over {n_a} x {n_b} strategies, strategy spaces are "
            f"{kernel.shape[0]} x {kernel.shape[1]}")


def joint_distribution(channel: FsMacChannel, policy: TeamPolicy,
                       kernel: np.ndarray | None = None) -> JointDistribution:
    """P(s, t^a, t^b, y) = P_S(s) P(y | t^a, t^b, s) pi_a(t^a) pi_b(t^b)."""
    k = strategy_channel(channel) if kernel is None else kernel
    _check_policy_dims(k, policy.pi_a.shape[0], policy.pi_b.shape[0])
    p = np.einsum("s,a,b,absy->saby", channel.state_dist, policy.pi_a, policy.pi_b, k)
    return JointDistribution(p, ("state", "strategyA", "strategyB", "output"))


def rate_triple(channel: FsMacChannel, policy: TeamPolicy,
                kernel: np.ndarray | None = None) -> RateTriple:
    j = joint_distribution(channel, policy, kernel)
    return RateTriple(
        conditional_mutual_information(j, "strategyA", "output", ["strategyB", "state"]),
        conditional_mutual_information(j, "strategyB", "output", ["strategyA", "state"]),
        conditional_mutual_information(j, ["strategyA", "strategyB"], "output", "state"),
    )


def cooperative_joint(channel: FsMacChannel, policy: CooperativePolicy,
                      kernel: np.ndarray | None = None) -> JointDistribution:
    k = cooperative_channel(channel) if kernel is None else kernel
    _check_policy_dims(k, *policy.pi_joint.shape)
    p = np.einsum("s,ab,absy->saby", channel.state_dist, policy.pi_joint, k)
    return JointDistribution(p, ("state", "inputA", "strategyB", "output"))


def cooperative_rate_pair(channel: FsMacChannel, policy: CooperativePolicy,
                          kernel: np.ndarray | None = None) -> tuple[float, float]:
    """(I(T^b; Y | X^a, S), I(X^a, T^b; Y | S)) for a joint cooperative policy."""
    j = cooperative_joint(channel, policy, kernel)
    r_b = conditional_mutual_information(j, "strategyB", "output", ["inputA", "state"])
    r_sum = conditional_mutual_information(j, ["inputA", "strategyB"], "output", "state")
    return r_b, r_sum


def conditioned_input_joint(model: NoisyReceiverModel,
                            policy: ConditionedInputPolicy) -> JointDistribution:
    """P(s^r, x^a, x^b, y) = P(s^r) P_eq(y | x^a, x^b, s^r) pi_a(x^a | f_a(s^r)) pi_b(x^b | f_b(s^r))."""
    eq = equivalent_channel(model)
    a = eq.alphabets
    if policy.f_a.shape[0] != a.nS or policy.f_b.shape[0] != a.nS:
        raise DimensionMismatch(f"lookup tables must cover all {a.nS} receiver CSI symbols")
    if policy.pi_a_given_csi.shape[1] != a.nXa or policy.pi_b_given_csi.shape[1] != a.nXb:
        raise DimensionMismatch("conditioned input policy does not match the input alphabets")
    pa = policy.pi_a_given_csi[policy.f_a]          # (Sr, Xa)
    pb = policy.pi_b_given_csi[policy.f_b]          # (Sr, Xb)
    p = np.einsum("r,ra,rb,abry->raby", eq.state_dist, pa, pb, eq.channel)
    return JointDistribution(p, ("receiverCsi", "inputA", "inputB", "output"))


def conditioned_input_rate_triple(model: NoisyReceiverModel,
                                  policy: ConditionedInputPolicy) -> RateTriple:
    j = conditioned_input_joint(model, policy)
    return RateTriple(
        conditional_mutual_information(j, "inputA", "output", ["inputB", "receiverCsi"]),
        conditional_mutual_information(j, "inputB", "output", ["inputA", "receiverCsi"]),
        conditional_mutual_information(j, ["inputA", "inputB"], "output", "receiverCsi"),
    )


# --------------------------------------------------------------------------
# fast path used by the optimizers


@dataclass
class OutputEntropies:
    """H(Y|S), H(Y|A,S), H(Y|B,S), H(Y|A,B,S) for a joint policy ``pi[a, b]``,
    with their gradients with respect to ``pi``."""

    h: np.ndarray      # (4,) ordered: none, A, B, AB
    grad: np.ndarray   # (4, nA, nB)

    @property
    def rates(self) -> RateTriple:
        h0, ha, hb, hab = self.h
        return RateTriple.clamped(hb - hab, ha - hab, h0 - hab)


def output_entropies(kernel: np.ndarray, state_dist: np.ndarray, pi: np.ndarray,
                     kernel_entropy: np.ndarray | None = None) -> OutputEntropies:
    """Conditional output entropies for any joint policy over two index sets.

    The gradient of H(Y | G, S) with respect to pi[a, b] is
    sum_s P(s) * sum_y -K[a,b,s,y] log2 P(y | g(a,b), s), which follows from
    writing the conditional entropy as a perspective of the output entropy.
    """
    k = kernel
    ps = state_dist
    if kernel_entropy is None:
        kernel_entropy = -_xlog2x_sum(k, axis=3)          # (A, B, S)
    g_ab = kernel_entropy @ ps                             # (A, B)
    h_ab = float(np.sum(pi * g_ab))

    with np.errstate(divide="ignore", invalid="ignore"):
        m0 = np.einsum("ab,absy->sy", pi, k)
        l0 = np.log2(np.maximum(m0, _TINY))
        h0 = float(-np.sum(ps[:, None] * np.where(m0 > 0, m0 * l0, 0.0)))
        g0 = -np.einsum("absy,sy->ab", k, ps[:, None] * l0)

        mu_a = pi.sum(axis=1)
        ma = np.einsum("ab,absy->asy", pi, k)
        pa = ma / np.where(mu_a > 0, mu_a, 1.0)[:, None, None]
        la = np.log2(np.maximum(pa, _TINY))
        ha = float(-np.sum(ps[None, :, None] * np.where(ma > 0, ma * la, 0.0)))
        ga = -np.einsum("absy,asy->ab", k, ps[None, :, None] * la)
        ga = np.where(mu_a[:, None] > 0, ga, g_ab)

        mu_b = pi.sum(axis=0)
        mb = np.einsum("ab,absy->bsy", pi, k)
        pb = mb / np.where(mu_b > 0, mu_b, 1.0)[:, None, None]
        lb = np.log2(np.maximum(pb, _TINY))
        hb = float(-np.sum(ps[None, :, None] * np.where(mb > 0, mb * lb, 0.0)))
        gb = -np.einsum("absy,bsy->ab", k, ps[None, :, None] * lb)
        gb = np.where(mu_b[None, :] > 0, gb, g_ab)

    return OutputEntropies(np.array([h0, ha, hb, h_ab]), np.stack([g0, ga, gb, g_ab]))


def validate_rate_triple(t: RateTriple, tol: float = 1e-9) -> None:
    if t.r_a > t.r_sum + tol or t.r_b > t.r_sum + tol:
        raise ValidationError(f"rate triple {t} has an individual bound above the sum bound")
