"""Monte Carlo random coding over Shannon strategies with joint-typicality decoding.

Random streams come from numpy's Philox4x64 counter-based generator, keyed by
``SeedSequence(entropy=seed, spawn_key=(role, index))`` with role 0 for
encoder a's codebook, 1 for encoder b's codebook and 2 for trial ``index``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Optional

import numpy as np

from .channel import FsMacChannel
from .errors import BudgetExceeded, DimensionMismatch, ValidationError
from .information import TeamPolicy, joint_distribution
from .strategies import strategy_table

DEFAULT_CODEWORD_BUDGET = 1 << 16
ROLE_BOOK_A, ROLE_BOOK_B, ROLE_TRIAL = 0, 1, 2
CSV_HEADER = "n,rateA,rateB,epsilon,trials,errors,errorRate,wilsonLo,wilsonHi,atypical,ambiguous,wrongUnique"
FAILURE_MODES = ("truth_atypical", "ambiguous", "wrong_unique")

# axes of the reference joint used by the decoder
TA, TB, Y, S = 0, 1, 2, 3
SUBSETS = tuple(c for k in range(1, 5) for c in itertools.combinations((TA, TB, Y, S), k))


def stream(seed: int, role: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(role, index))))


def message_count(n: int, rate: float) -> int:
    """ceil(2^(n R)); may be astronomically large."""
    bits = n * rate
    if bits >= 1023:
        return 1 << math.ceil(bits)
    return math.ceil(2.0 ** bits)


@dataclass(frozen=True)
class SimulationParams:
    n: int
    rate_a: float
    rate_b: float
    epsilon: float = 0.05
    trials: int = 200
    rng_seed: int = 0
    codeword_budget: int = DEFAULT_CODEWORD_BUDGET

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("block length must be at least 1")
        if self.rate_a < 0 or self.rate_b < 0:
            raise ValidationError("rates must be nonnegative")
        if not 0 < self.epsilon < 1:
            raise ValidationError("epsilon must lie in (0, 1)")
        if self.trials < 1:
            raise ValidationError("need at least one trial")

    @property
    def messages(self) -> tuple[int, int]:
        return message_count(self.n, self.rate_a), message_count(self.n, self.rate_b)


@dataclass(frozen=True, eq=False)
class Codebooks:
    book_a: np.ndarray          # (messages_a, n) strategy indices
    book_b: np.ndarray
    policy: TeamPolicy


@dataclass(frozen=True)
class TrialOutcome:
    decoded: Optional[tuple[int, int]]
    truth: tuple[int, int]
    error: bool
    failure_mode: Optional[str]


def generate_codebooks(policy: TeamPolicy, params: SimulationParams) -> Codebooks:
    m_a, m_b = params.messages
    if m_a + m_b > params.codeword_budget:
        raise BudgetExceeded(
            f"{m_a} + {m_b} codewords at n={params.n}, rates ({params.rate_a}, {params.rate_b}) "
            f"exceed the budget of {params.codeword_budget}")
    book_a = stream(params.rng_seed, ROLE_BOOK_A).choice(len(policy.pi_a), size=(m_a, params.n), p=policy.pi_a)
    book_b = stream(params.rng_seed, ROLE_BOOK_B).choice(len(policy.pi_b), size=(m_b, params.n), p=policy.pi_b)
    return Codebooks(book_a, book_b, policy)


def reference_joint(channel: FsMacChannel, policy: TeamPolicy) -> np.ndarray:
    """P(t^a, t^b, y, s) for the generating policy."""
    return np.transpose(joint_distribution(channel, policy).probs, (1, 2, 3, 0))


# --------------------------------------------------------------------------
# typicality


def _log_marginals(ref: np.ndarray) -> dict[tuple[int, ...], tuple[np.ndarray, float]]:
    """Per subset: log2 of the marginal (kept axes stay as size-1 elsewhere) and its entropy."""
    out = {}
    with np.errstate(divide="ignore"):
        for sub in SUBSETS:
            drop = tuple(ax for ax in range(4) if ax not in sub)
            m = ref.sum(axis=drop, keepdims=True)
            h = -float(np.sum(np.where(m > 0, m * np.log2(np.where(m > 0, m, 1.0)), 0.0)))
            out[sub] = (np.log2(m), h)
    return out


def _passes(total: np.ndarray, n: int, h: float, epsilon: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return np.abs(-total / n - h) < epsilon


def typical_pairs(codebooks: Codebooks, y_seq, s_seq, epsilon: float, reference: np.ndarray) -> np.ndarray:
    """Boolean (messages_a, messages_b) matrix of candidates passing every subset test.

    A sequence touching a zero-probability cell has log-probability -inf and so fails.
    """
    ref = np.asarray(reference, dtype=np.float64)
    y_seq, s_seq = np.asarray(y_seq), np.asarray(s_seq)
    book_a, book_b = codebooks.book_a, codebooks.book_b
    n = book_a.shape[1]
    if book_b.shape[1] != n or len(y_seq) != n or len(s_seq) != n:
        raise DimensionMismatch("codewords and observed sequences must share the block length")
    if ref.ndim != 4 or abs(ref.sum() - 1) > 1e-9:
        raise DimensionMismatch("reference joint must be a 4-axis distribution over (t^a, t^b, y, s)")
    logs = _log_marginals(ref)
    m_a, m_b = len(book_a), len(book_b)
    t = np.arange(n)
    ok_a = np.ones(m_a, dtype=bool)
    ok_b = np.ones(m_b, dtype=bool)

    def index(sub, a_idx, b_idx):
        # positions into a keepdims marginal: 0 on dropped axes
        return (a_idx if TA in sub else 0, b_idx if TB in sub else 0,
                y_seq if Y in sub else 0, s_seq if S in sub else 0)

    for sub, (lg, h) in logs.items():
        if TA in sub and TB in sub:
            continue
        if TA in sub:
            total = lg[index(sub, book_a, None)].sum(axis=1)
            ok_a &= _passes(total, n, h, epsilon)
        elif TB in sub:
            total = lg[index(sub, None, book_b)].sum(axis=1)
            ok_b &= _passes(total, n, h, epsilon)
        elif not _passes(lg[index(sub, None, None)].sum(), n, h, epsilon):
            return np.zeros((m_a, m_b), dtype=bool)

    out = np.zeros((m_a, m_b), dtype=bool)
    ia, ib = np.flatnonzero(ok_a), np.flatnonzero(ok_b)
    if len(ia) == 0 or len(ib) == 0:
        return out
    ok = np.ones((len(ia), len(ib)), dtype=bool)
    for sub, (lg, h) in logs.items():
        if not (TA in sub and TB in sub):
            continue
        total = np.zeros(ok.shape)
        for k in t:
            table = lg[:, :, y_seq[k] if Y in sub else 0, s_seq[k] if S in sub else 0]
            total += table[np.ix_(book_a[ia, k], book_b[ib, k])]
        ok &= _passes(total, n, h, epsilon)
    out[np.ix_(ia, ib)] = ok
    return out


def joint_typicality_decode(codebooks: Codebooks, y_seq, s_seq, epsilon: float,
                            reference: np.ndarray) -> Optional[tuple[int, int]]:
    """The unique jointly typical message pair, or None when there is none or several."""
    hits = np.argwhere(typical_pairs(codebooks, y_seq, s_seq, epsilon, reference))
    return (int(hits[0, 0]), int(hits[0, 1])) if len(hits) == 1 else None


# --------------------------------------------------------------------------
# trials


def _sample_rows(rng: np.random.Generator, probs: np.ndarray) -> np.ndarray:
    """One categorical draw per row of ``probs``."""
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(probs.shape[:-1])[..., None]
    return np.minimum((u >= cdf).sum(axis=-1), probs.shape[-1] - 1)


def run_trial(channel: FsMacChannel, codebooks: Codebooks, params: SimulationParams,
              trial_index: int, reference: np.ndarray | None = None) -> TrialOutcome:
    a = channel.alphabets
    ref = reference_joint(channel, codebooks.policy) if reference is None else reference
    rng = stream(params.rng_seed, ROLE_TRIAL, trial_index)
    n = codebooks.book_a.shape[1]
    w_a = int(rng.integers(len(codebooks.book_a)))
    w_b = int(rng.integers(len(codebooks.book_b)))
    s = _sample_rows(rng, np.broadcast_to(channel.state_dist, (n, a.nS)))
    s_a = _sample_rows(rng, channel.csi_a[s])
    s_b = _sample_rows(rng, channel.csi_b[s])
    x_a = strategy_table(a.nXa, a.nSa, channel.enumeration_limit)[codebooks.book_a[w_a], s_a]
    x_b = strategy_table(a.nXb, a.nSb, channel.enumeration_limit)[codebooks.book_b[w_b], s_b]
    y = _sample_rows(rng, channel.channel[x_a, x_b, s])

    typical = typical_pairs(codebooks, y, s, params.epsilon, ref)
    hits = np.argwhere(typical)
    decoded = (int(hits[0, 0]), int(hits[0, 1])) if len(hits) == 1 else None
    truth = (w_a, w_b)
    if decoded == truth:
        return TrialOutcome(decoded, truth, False, None)
    if decoded is not None:
        mode = "wrong_unique"
    elif not typical[w_a, w_b]:
        mode = "truth_atypical"
    else:
        mode = "ambiguous"
    return TrialOutcome(decoded, truth, True, mode)


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = errors / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class SimulationReport:
    params: SimulationParams
    errors: int
    failure_counts: dict

    @property
    def error_rate(self) -> float:
        return self.errors / self.params.trials

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.params.trials)

    def csv_row(self) -> str:
        p = self.params
        lo, hi = self.wilson
        vals = [p.n, f"{p.rate_a:.17g}", f"{p.rate_b:.17g}", f"{p.epsilon:.17g}", p.trials, self.errors,
                f"{self.error_rate:.17g}", f"{lo:.17g}", f"{hi:.17g}",
                *(self.failure_counts[m] for m in FAILURE_MODES)]
        return ",".join(str(v) for v in vals)

    def to_csv(self) -> str:
        return CSV_HEADER + "\n" + self.csv_row() + "\n"


def estimate_error(channel: FsMacChannel, policy: TeamPolicy, params: SimulationParams,
                   threads: int = 1) -> SimulationReport:
    books = generate_codebooks(policy, params)
    ref = reference_joint(channel, policy)

    def one(i):
        return run_trial(channel, books, params, i, ref)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, range(params.trials)))
    else:
        outcomes = [one(i) for i in range(params.trials)]
    counts = {m: sum(o.failure_mode == m for o in outcomes) for m in FAILURE_MODES}
    return SimulationReport(params, sum(o.error for o in outcomes), counts)
