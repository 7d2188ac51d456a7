"""Channel and side-information models for the two-user finite-state MAC.

Index conventions used throughout the package:

* ``state_dist[s]``                 P_S(s)
* ``csi_a[s, sa]``, ``csi_b[s, sb]`` P(s^a | s), P(s^b | s)
* ``channel[xa, xb, s, y]``         P(y | x^a, x^b, s)

All probabilities are float64 and every array held by a model is read-only,
so models can be shared freely between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EnumerationLimitExceeded,
    NegativeProbability,
    NonStochasticRow,
    ParseError,
    SchemaVersionMismatch,
    ValidationError,
)

SCHEMA_VERSION = "1"
DEFAULT_ENUMERATION_LIMIT = 4096
USER_TOL = 1e-9
BUILD_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def check_stochastic(probs, name: str, shape: tuple[int, ...] | None = None,
                     tol: float = USER_TOL) -> np.ndarray:
    """Return a read-only float64 copy of ``probs`` after checking that every
    slice along the last axis is a probability vector."""
    try:
        arr = np.asarray(probs, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: not a numeric array ({exc})") from exc
    if shape is not None and arr.shape != tuple(shape):
        raise DimensionMismatch(f"{name}: expected shape {tuple(shape)}, got {arr.shape}")
    if arr.ndim == 0 or arr.size == 0:
        raise DimensionMismatch(f"{name}: empty array")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: non-finite entries")
    if np.any(arr < 0):
        idx = tuple(int(i) for i in np.argwhere(arr < 0)[0])
        raise NegativeProbability(f"{name}: negative probability {arr[idx]!r} at index {idx}")
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > tol
    if np.any(bad):
        row = tuple(int(i) for i in np.argwhere(np.atleast_1d(bad))[0])
        s = float(np.atleast_1d(sums)[row])
        raise NonStochasticRow(f"{name}: row {row} sums to {s!r}")
    return _frozen(arr)


def strategy_space_size(n_x: int, n_csi: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> int:
    if n_x < 1 or n_csi < 1:
        raise ValidationError(f"alphabet sizes must be >= 1, got n_x={n_x}, n_csi={n_csi}")
    # compare in log space first so huge exponents never materialise
    if n_csi * math.log(n_x) > math.log(limit) + 1e-12:
        raise EnumerationLimitExceeded(
            f"{n_x}^{n_csi} strategies exceed the enumeration limit {limit}")
    count = n_x ** n_csi
    if count > limit:
        raise EnumerationLimitExceeded(
            f"{n_x}^{n_csi} = {count} strategies exceed the enumeration limit {limit}")
    return count


@dataclass(frozen=True)
class Alphabets:
    nS: int
    nSa: int
    nSb: int
    nXa: int
    nXb: int
    nY: int
    nSr: int | None = None

    def __post_init__(self):
        for name in ("nS", "nSa", "nSb", "nXa", "nXb", "nY", "nSr"):
            v = getattr(self, name)
            if v is None and name == "nSr":
                continue
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ValidationError(f"alphabet size {name} must be a positive integer, got {v!r}")

    def check_limit(self, limit: int = DEFAULT_ENUMERATION_LIMIT) -> None:
        strategy_space_size(self.nXa, self.nSa, limit)
        strategy_space_size(self.nXb, self.nSb, limit)

    def to_dict(self) -> dict[str, int]:
        d = {k: int(getattr(self, k)) for k in ("nS", "nSa", "nSb", "nXa", "nXb", "nY")}
        if self.nSr is not None:
            d["nSr"] = int(self.nSr)
        return d


@dataclass(frozen=True, eq=False)
class FsMacChannel:
    """Memoryless FS-MAC with noisy causal CSI at both encoders and the state
    at the receiver. The triple (S, S^a, S^b) has law P_S(s) P(s^a|s) P(s^b|s)."""

    state_dist: np.ndarray
    csi_a: np.ndarray
    csi_b: np.ndarray
    channel: np.ndarray
    enumeration_limit: int = field(default=DEFAULT_ENUMERATION_LIMIT, compare=False)

    def __post_init__(self):
        ps = check_stochastic(self.state_dist, "state_dist")
        if ps.ndim != 1:
            raise DimensionMismatch(f"state_dist must be a vector, got shape {ps.shape}")
        n_s = ps.shape[0]
        ca = check_stochastic(self.csi_a, "csi_a")
        cb = check_stochastic(self.csi_b, "csi_b")
        w = check_stochastic(self.channel, "channel")
        if ca.ndim != 2 or ca.shape[0] != n_s:
            raise DimensionMismatch(f"csi_a must have shape ({n_s}, nSa), got {ca.shape}")
        if cb.ndim != 2 or cb.shape[0] != n_s:
            raise DimensionMismatch(f"csi_b must have shape ({n_s}, nSb), got {cb.shape}")
        if w.ndim != 4 or w.shape[2] != n_s:
            raise DimensionMismatch(f"channel must have shape (nXa, nXb, {n_s}, nY), got {w.shape}")
        object.__setattr__(self, "state_dist", ps)
        object.__setattr__(self, "csi_a", ca)
        object.__setattr__(self, "csi_b", cb)
        object.__setattr__(self, "channel", w)
        self.alphabets.check_limit(self.enumeration_limit)

    @property
    def alphabets(self) -> Alphabets:
        n_xa, n_xb, n_s, n_y = self.channel.shape
        return Alphabets(nS=n_s, nSa=self.csi_a.shape[1], nSb=self.csi_b.shape[1],
                         nXa=n_xa, nXb=n_xb, nY=n_y)

    def with_csi(self, csi_a=None, csi_b=None) -> "FsMacChannel":
        """Copy of this channel with one or both CSI kernels replaced."""
        return FsMacChannel(self.state_dist,
                            self.csi_a if csi_a is None else csi_a,
                            self.csi_b if csi_b is None else csi_b,
                            self.channel, self.enumeration_limit)


@dataclass(frozen=True, eq=False)
class NoisyReceiverModel:
    """Receiver sees S^r; both encoders' CSI is conditionally independent of S given S^r."""

    sr_dist: np.ndarray
    state_given_sr: np.ndarray
    csi_a_given_sr: np.ndarray
    csi_b_given_sr: np.ndarray
    channel: np.ndarray
    enumeration_limit: int = field(default=DEFAULT_ENUMERATION_LIMIT, compare=False)

    def __post_init__(self):
        pr = check_stochastic(self.sr_dist, "sr_dist")
        if pr.ndim != 1:
            raise DimensionMismatch(f"sr_dist must be a vector, got shape {pr.shape}")
        n_sr = pr.shape[0]
        arrays = {}
        for name in ("state_given_sr", "csi_a_given_sr", "csi_b_given_sr"):
            k = check_stochastic(getattr(self, name), name)
            if k.ndim != 2 or k.shape[0] != n_sr:
                raise DimensionMismatch(f"{name} must have shape ({n_sr}, n), got {k.shape}")
            arrays[name] = k
        w = check_stochastic(self.channel, "channel")
        n_s = arrays["state_given_sr"].shape[1]
        if w.ndim != 4 or w.shape[2] != n_s:
            raise DimensionMismatch(f"channel must have shape (nXa, nXb, {n_s}, nY), got {w.shape}")
        object.__setattr__(self, "sr_dist", pr)
        for name, k in arrays.items():
            object.__setattr__(self, name, k)
        object.__setattr__(self, "channel", w)
        self.alphabets.check_limit(self.enumeration_limit)

    @property
    def alphabets(self) -> Alphabets:
        n_xa, n_xb, n_s, n_y = self.channel.shape
        return Alphabets(nS=n_s, nSa=self.csi_a_given_sr.shape[1], nSb=self.csi_b_given_sr.shape[1],
                         nXa=n_xa, nXb=n_xb, nY=n_y, nSr=self.sr_dist.shape[0])

    @property
    def state_dist(self) -> np.ndarray:
        return self.sr_dist @ self.state_given_sr


@dataclass(frozen=True, eq=False)
class ModuloAdditiveSpec:
    """Y = X^a + X^b + Z (mod q), with Z drawn from P(z|s)."""

    q: int
    state_dist: np.ndarray
    csi_a: np.ndarray
    csi_b: np.ndarray
    noise_given_state: np.ndarray

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or isinstance(self.q, bool) or self.q < 2:
            raise ValidationError(f"modulus q must be an integer >= 2, got {self.q!r}")
        ps = check_stochastic(self.state_dist, "state_dist")
        if ps.ndim != 1:
            raise DimensionMismatch("state_dist must be a vector")
        n_s = ps.shape[0]
        ca = check_stochastic(self.csi_a, "csi_a")
        cb = check_stochastic(self.csi_b, "csi_b")
        pz = check_stochastic(self.noise_given_state, "noise_given_state", shape=(n_s, self.q))
        for name, k in (("csi_a", ca), ("csi_b", cb)):
            if k.ndim != 2 or k.shape[0] != n_s:
                raise DimensionMismatch(f"{name} must have shape ({n_s}, n), got {k.shape}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "state_dist", ps)
        object.__setattr__(self, "csi_a", ca)
        object.__setattr__(self, "csi_b", cb)
        object.__setattr__(self, "noise_given_state", pz)


@dataclass(frozen=True)
class BinaryMultiplierSpec:
    """Y = X^a X^b xor S with S ~ Ber(p_s) and receiver CSI S^r = S xor Ber(p_r)."""

    p_s: float
    p_r: float

    def __post_init__(self):
        for name in ("p_s", "p_r"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")


ChannelModel = Union[FsMacChannel, NoisyReceiverModel, ModuloAdditiveSpec, BinaryMultiplierSpec]


# --------------------------------------------------------------------------
# constructors


def trivial_csi(n_s: int) -> np.ndarray:
    """CSI kernel of an encoder that observes nothing (|S_csi| = 1)."""
    return np.ones((n_s, 1))


def deterministic_csi(f, n_out: int | None = None) -> np.ndarray:
    """Indicator kernel of a lookup table ``f[s] -> s_csi``."""
    f = np.asarray(f, dtype=np.int64)
    if f.ndim != 1 or np.any(f < 0):
        raise ValidationError("lookup table must be a vector of nonnegative integers")
    n_out = int(f.max()) + 1 if n_out is None else n_out
    if np.any(f >= n_out):
        raise DimensionMismatch(f"lookup table value exceeds output alphabet size {n_out}")
    k = np.zeros((f.shape[0], n_out))
    k[np.arange(f.shape[0]), f] = 1.0
    return k


def _assert_built(*arrays) -> None:
    for a in arrays:
        a = np.asarray(a)
        assert np.all(a >= 0) and np.allclose(a.sum(axis=-1), 1.0, rtol=0, atol=BUILD_TOL)


def equivalent_channel(model: NoisyReceiverModel) -> FsMacChannel:
    """Fold the receiver's uncertainty about S into the channel:
    P_eq(y | x^a, x^b, s^r) = sum_s P(y | x^a, x^b, s) P(s | s^r)."""
    if not isinstance(model, NoisyReceiverModel):
        raise DimensionMismatch(f"expected a NoisyReceiverModel, got {type(model).__name__}")
    if model.channel.shape[2] != model.state_given_sr.shape[1]:
        raise DimensionMismatch("channel state axis does not match state_given_sr")
    w_eq = np.einsum("abst,rs->abrt", model.channel, model.state_given_sr)
    _assert_built(w_eq)
    return FsMacChannel(model.sr_dist, model.csi_a_given_sr, model.csi_b_given_sr, w_eq,
                        model.enumeration_limit)


def build_modulo_additive(spec: ModuloAdditiveSpec) -> FsMacChannel:
    q = spec.q
    n_s = spec.state_dist.shape[0]
    xa = np.arange(q)[:, None, None, None]
    xb = np.arange(q)[None, :, None, None]
    s = np.arange(n_s)[None, None, :, None]
    y = np.arange(q)[None, None, None, :]
    w = spec.noise_given_state[s, (y - xa - xb) % q]
    _assert_built(w)
    return FsMacChannel(spec.state_dist, spec.csi_a, spec.csi_b, w)


def build_binary_multiplier(spec: BinaryMultiplierSpec) -> NoisyReceiverModel:
    p_s = np.array([1.0 - spec.p_s, spec.p_s])
    # joint[s, sr] = P(s) P(z = s xor sr)
    flip = np.array([[1.0 - spec.p_r, spec.p_r], [spec.p_r, 1.0 - spec.p_r]])
    joint = p_s[:, None] * flip
    p_sr = joint.sum(axis=0)
    state_given_sr = np.empty((2, 2))
    for sr in range(2):
        # an impossible S^r value gets the prior; it carries no weight anywhere
        state_given_sr[sr] = joint[:, sr] / p_sr[sr] if p_sr[sr] > 0 else p_s
    w = np.zeros((2, 2, 2, 2))
    for xa in range(2):
        for xb in range(2):
            for s in range(2):
                w[xa, xb, s, (xa * xb) ^ s] = 1.0
    _assert_built(state_given_sr, w)
    return NoisyReceiverModel(p_sr, state_given_sr, trivial_csi(2), trivial_csi(2), w)


def conditional_state_entropy(model: NoisyReceiverModel) -> float:
    """H(S | S^r) in bits."""
    from .information import entropy

    return float(sum(p * entropy(row) for p, row in zip(model.sr_dist, model.state_given_sr) if p > 0))


# --------------------------------------------------------------------------
# serialization

_FIELDS = {
    "fsmac": {"version", "kind", "alphabets", "state_dist", "csi_a", "csi_b", "channel"},
    "noisy_receiver": {"version", "kind", "alphabets", "sr_dist", "state_given_sr",
                       "csi_a_given_sr", "csi_b_given_sr", "channel"},
    "modulo_additive": {"version", "kind", "alphabets", "q", "state_dist", "csi_a", "csi_b",
                        "noise_given_state"},
    "binary_multiplier": {"version", "kind", "p_s", "p_r"},
}
_ALPHABET_KEYS = {
    "fsmac": {"nS", "nSa", "nSb", "nXa", "nXb", "nY"},
    "noisy_receiver": {"nS", "nSa", "nSb", "nXa", "nXb", "nY", "nSr"},
    "modulo_additive": {"nS", "nSa", "nSb"},
}


def _alphabets_from(raw: dict, kind: str) -> dict[str, int]:
    alph = raw["alphabets"]
    if not isinstance(alph, dict):
        raise ParseError("alphabets must be an object")
    keys = _ALPHABET_KEYS[kind]
    if set(alph) != keys:
        raise ParseError(f"alphabets for kind {kind!r} must have exactly the keys {sorted(keys)}; "
                         f"got {sorted(alph)}")
    for k, v in alph.items():
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ValidationError(f"alphabet size {k} must be a positive integer, got {v!r}")
    return alph


def _array(raw: dict, key: str, shape: tuple[int, ...]) -> np.ndarray:
    try:
        arr = np.asarray(raw[key], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{key}: ragged or non-numeric array") from exc
    if key == "channel" and arr.ndim == 2 and arr.size == int(np.prod(shape)):
        # row-major 2-D layout: one row per (x_a, x_b, s), one column per y
        arr = arr.reshape(shape)
    if arr.shape != shape:
        raise DimensionMismatch(f"{key}: expected shape {shape}, got {arr.shape}")
    return arr


def validate_channel(raw: dict[str, Any],
                     enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> ChannelModel:
    """Validate a parsed channel document and build the model it describes."""
    if not isinstance(raw, dict):
        raise ParseError("channel document must be a JSON object")
    version = raw.get("version")
    if version is None:
        raise ParseError("missing field 'version'")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION!r})")
    kind = raw.get("kind")
    if kind not in _FIELDS:
        raise ParseError(f"unknown kind {kind!r}")
    expected = _FIELDS[kind]
    unknown = set(raw) - expected
    if unknown:
        raise ParseError(f"unknown fields {sorted(unknown)}")
    missing = expected - set(raw)
    if missing:
        raise ParseError(f"missing fields {sorted(missing)}")

    if kind == "binary_multiplier":
        return BinaryMultiplierSpec(raw["p_s"], raw["p_r"])

    a = _alphabets_from(raw, kind)
    if kind == "fsmac":
        alphabets = Alphabets(**a)
        alphabets.check_limit(enumeration_limit)
        return FsMacChannel(
            _array(raw, "state_dist", (a["nS"],)),
            _array(raw, "csi_a", (a["nS"], a["nSa"])),
            _array(raw, "csi_b", (a["nS"], a["nSb"])),
            _array(raw, "channel", (a["nXa"], a["nXb"], a["nS"], a["nY"])),
            enumeration_limit,
        )
    if kind == "noisy_receiver":
        alphabets = Alphabets(**a)
        alphabets.check_limit(enumeration_limit)
        return NoisyReceiverModel(
            _array(raw, "sr_dist", (a["nSr"],)),
            _array(raw, "state_given_sr", (a["nSr"], a["nS"])),
            _array(raw, "csi_a_given_sr", (a["nSr"], a["nSa"])),
            _array(raw, "csi_b_given_sr", (a["nSr"], a["nSb"])),
            _array(raw, "channel", (a["nXa"], a["nXb"], a["nS"], a["nY"])),
            enumeration_limit,
        )
    q = raw["q"]
    if not isinstance(q, int) or isinstance(q, bool):
        raise ValidationError(f"q must be an integer, got {q!r}")
    strategy_space_size(q, a["nSa"], enumeration_limit)
    strategy_space_size(q, a["nSb"], enumeration_limit)
    return ModuloAdditiveSpec(
        q,
        _array(raw, "state_dist", (a["nS"],)),
        _array(raw, "csi_a", (a["nS"], a["nSa"])),
        _array(raw, "csi_b", (a["nS"], a["nSb"])),
        _array(raw, "noise_given_state", (a["nS"], q)),
    )


def model_to_dict(model: ChannelModel) -> dict[str, Any]:
    if isinstance(model, FsMacChannel):
        return {"version": SCHEMA_VERSION, "kind": "fsmac",
                "alphabets": model.alphabets.to_dict(),
                "state_dist": model.state_dist.tolist(), "csi_a": model.csi_a.tolist(),
                "csi_b": model.csi_b.tolist(), "channel": model.channel.tolist()}
    if isinstance(model, NoisyReceiverModel):
        return {"version": SCHEMA_VERSION, "kind": "noisy_receiver",
                "alphabets": model.alphabets.to_dict(),
                "sr_dist": model.sr_dist.tolist(), "state_given_sr": model.state_given_sr.tolist(),
                "csi_a_given_sr": model.csi_a_given_sr.tolist(),
                "csi_b_given_sr": model.csi_b_given_sr.tolist(), "channel": model.channel.tolist()}
    if isinstance(model, ModuloAdditiveSpec):
        return {"version": SCHEMA_VERSION, "kind": "modulo_additive",
                "alphabets": {"nS": model.state_dist.shape[0], "nSa": model.csi_a.shape[1],
                              "nSb": model.csi_b.shape[1]},
                "q": model.q, "state_dist": model.state_dist.tolist(), "csi_a": model.csi_a.tolist(),
                "csi_b": model.csi_b.tolist(), "noise_given_state": model.noise_given_state.tolist()}
    if isinstance(model, BinaryMultiplierSpec):
        return {"version": SCHEMA_VERSION, "kind": "binary_multiplier",
                "p_s": model.p_s, "p_r": model.p_r}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def save_channel(model: ChannelModel, path) -> None:
    # json writes floats with repr(), the shortest string that round-trips exactly
    text = json.dumps(model_to_dict(model), indent=1)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_channel(path, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT) -> ChannelModel:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return validate_channel(raw, enumeration_limit)


def bundled_path(name: str) -> Path:
    """Path of a channel file shipped with the package (e.g. ``"xor_mac"``)."""
    from importlib.resources import files

    return Path(str(files("fsmac") / "data" / f"{name}.json"))
