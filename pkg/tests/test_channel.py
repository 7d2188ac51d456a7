import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsmac.channel import (
    BinaryMultiplierSpec,
    FsMacChannel,
    ModuloAdditiveSpec,
    NoisyReceiverModel,
    build_binary_multiplier,
    build_modulo_additive,
    conditional_state_entropy,
    deterministic_csi,
    equivalent_channel,
    load_channel,
    model_to_dict,
    save_channel,
    trivial_csi,
    validate_channel,
)
from fsmac.errors import (
    DimensionMismatch,
    EnumerationLimitExceeded,
    NegativeProbability,
    NonStochasticRow,
    ParseError,
    SchemaVersionMismatch,
    ValidationError,
)

BSC = [[0.9, 0.1], [0.1, 0.9]]


def fsmac_doc(**over):
    doc = {"version": "1", "kind": "fsmac",
           "alphabets": {"nS": 2, "nSa": 2, "nSb": 2, "nXa": 2, "nXb": 2, "nY": 2},
           "state_dist": [0.5, 0.5], "csi_a": BSC, "csi_b": BSC,
           "channel": [[[row for row in BSC] for _ in range(2)] for _ in range(2)]}
    doc.update(over)
    return doc


def test_bsc_rows_are_valid():
    ch = validate_channel(fsmac_doc())
    assert isinstance(ch, FsMacChannel)
    assert ch.channel.shape == (2, 2, 2, 2)


def test_row_sum_violation_names_the_row():
    with pytest.raises(NonStochasticRow, match=r"\(1,\)"):
        validate_channel(fsmac_doc(csi_a=[[0.9, 0.1], [0.1, 0.89]]))


def test_negative_probability():
    with pytest.raises(NegativeProbability):
        validate_channel(fsmac_doc(state_dist=[1.1, -0.1]))


def test_missing_and_unknown_fields():
    doc = fsmac_doc()
    del doc["channel"]
    with pytest.raises(ParseError, match="missing"):
        validate_channel(doc)
    with pytest.raises(ParseError, match="unknown"):
        validate_channel(fsmac_doc(comment="hi"))
    with pytest.raises(SchemaVersionMismatch):
        validate_channel(fsmac_doc(version="2"))


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        validate_channel(fsmac_doc(state_dist=[0.2, 0.3, 0.5]))


def test_enumeration_limit():
    doc = fsmac_doc(alphabets={"nS": 1, "nSa": 20, "nSb": 1, "nXa": 4, "nXb": 1, "nY": 1})
    with pytest.raises(EnumerationLimitExceeded):
        validate_channel(doc)


def test_user_tolerance_accepts_rounding():
    ch = validate_channel(fsmac_doc(state_dist=[0.5, 0.5 + 5e-10]))
    assert ch.state_dist[1] == 0.5 + 5e-10


def test_two_dimensional_channel_layout():
    flat = np.array(fsmac_doc()["channel"]).reshape(8, 2).tolist()
    ch = validate_channel(fsmac_doc(channel=flat))
    assert np.array_equal(ch.channel, np.array(fsmac_doc()["channel"]))


def test_equivalent_channel_identity_is_noop(rng):
    w = rng.dirichlet(np.ones(3), size=(2, 2, 2))
    model = NoisyReceiverModel([0.3, 0.7], np.eye(2), trivial_csi(2), trivial_csi(2), w)
    assert np.array_equal(equivalent_channel(model).channel, w)


def test_equivalent_channel_uniform_posterior(rng):
    w = rng.dirichlet(np.ones(3), size=(2, 2, 2))
    model = NoisyReceiverModel([0.3, 0.7], np.full((2, 2), 0.5), trivial_csi(2), trivial_csi(2), w)
    eq = equivalent_channel(model).channel
    avg = 0.5 * (w[:, :, 0] + w[:, :, 1])
    for sr in range(2):
        assert np.allclose(eq[:, :, sr], avg, atol=1e-15)


def test_multiplier_posterior_is_bayes():
    model = build_binary_multiplier(BinaryMultiplierSpec(0.5, 0.1))
    # P(S=0|S^r=0) = 0.5*0.9 / (0.5*0.9 + 0.5*0.1)
    assert model.state_given_sr[0, 0] == pytest.approx(0.9, abs=1e-15)
    eq = equivalent_channel(model).channel
    assert eq[1, 1, 0, 1] == pytest.approx(0.9, abs=1e-15)


def test_multiplier_posterior_matches_joint_table():
    p_s, p_r = 0.3, 0.2
    model = build_binary_multiplier(BinaryMultiplierSpec(p_s, p_r))
    table = {}
    for s in range(2):
        for z in range(2):
            table[(s, s ^ z)] = (p_s if s else 1 - p_s) * (p_r if z else 1 - p_r)
    for sr in range(2):
        tot = table[(0, sr)] + table[(1, sr)]
        assert model.sr_dist[sr] == pytest.approx(tot, abs=1e-15)
        for s in range(2):
            assert model.state_given_sr[sr, s] == pytest.approx(table[(s, sr)] / tot, abs=1e-15)


@pytest.mark.parametrize("p_r, expected", [(0.0, np.eye(2)), (0.5, np.full((2, 2), 0.5))])
def test_multiplier_extreme_feedback(p_r, expected):
    model = build_binary_multiplier(BinaryMultiplierSpec(0.5, p_r))
    assert np.allclose(model.state_given_sr, expected, atol=1e-15)


def test_multiplier_degenerate_state_keeps_rows_stochastic():
    model = build_binary_multiplier(BinaryMultiplierSpec(0.0, 0.0))
    assert np.allclose(model.state_given_sr.sum(axis=1), 1.0)
    assert conditional_state_entropy(model) == 0.0


def test_multiplier_rejects_out_of_range():
    with pytest.raises(ValidationError):
        BinaryMultiplierSpec(0.5, 1.5)


def test_modulo_deterministic_noise_is_indicator():
    spec = ModuloAdditiveSpec(2, [0.5, 0.5], np.eye(2), np.eye(2), np.eye(2))
    w = build_modulo_additive(spec).channel
    assert set(np.unique(w)) == {0.0, 1.0}
    for xa in range(2):
        for xb in range(2):
            for s in range(2):
                assert w[xa, xb, s, xa ^ xb ^ s] == 1.0


def test_modulo_flip_probability():
    spec = ModuloAdditiveSpec(2, [0.5, 0.5], trivial_csi(2), trivial_csi(2), [[0.8, 0.2], [0.8, 0.2]])
    w = build_modulo_additive(spec).channel
    for xa in range(2):
        for xb in range(2):
            for s in range(2):
                assert w[xa, xb, s, 1 - (xa ^ xb)] == pytest.approx(0.2)


@settings(max_examples=40, deadline=None)
@given(q=st.integers(2, 4), c=st.integers(0, 3), seed=st.integers(0, 2**32 - 1))
def test_modulo_relabel_invariance(q, c, seed):
    r = np.random.default_rng(seed)
    spec = ModuloAdditiveSpec(q, r.dirichlet(np.ones(2)), trivial_csi(2), trivial_csi(2),
                              r.dirichlet(np.ones(q), size=2))
    w = build_modulo_additive(spec).channel
    idx = np.arange(q)
    shifted = w[(idx + c) % q][:, (idx - c) % q]
    assert np.array_equal(shifted, w)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_sr=st.integers(1, 3), n_s=st.integers(1, 3))
def test_equivalent_channel_preserves_output_marginal(seed, n_sr, n_s):
    r = np.random.default_rng(seed)
    model = NoisyReceiverModel(r.dirichlet(np.ones(n_sr)), r.dirichlet(np.ones(n_s), size=n_sr),
                               trivial_csi(n_sr), trivial_csi(n_sr),
                               r.dirichlet(np.ones(2), size=(2, 2, n_s)))
    eq = equivalent_channel(model)
    lhs = np.einsum("r,abry->aby", model.sr_dist, eq.channel)
    rhs = np.einsum("s,absy->aby", model.state_dist, model.channel)
    assert np.allclose(lhs, rhs, atol=1e-12)
    assert np.allclose(eq.channel.sum(axis=-1), 1.0, atol=1e-12)


@pytest.mark.parametrize("model", [
    ModuloAdditiveSpec(2, [0.5, 0.5], BSC, BSC, np.eye(2)),
    BinaryMultiplierSpec(0.5, 0.1),
    build_binary_multiplier(BinaryMultiplierSpec(0.3, 0.1)),
    FsMacChannel([0.1, 0.9], deterministic_csi([0, 1]), trivial_csi(2),
                 np.random.default_rng(3).dirichlet(np.ones(3), size=(2, 3, 2))),
])
def test_round_trip(model, tmp_path):
    path = tmp_path / "m.json"
    save_channel(model, path)
    back = load_channel(path)
    assert type(back) is type(model)
    a, b = model_to_dict(model), model_to_dict(back)
    assert json.dumps(a) == json.dumps(b)


def test_round_trip_preserves_awkward_floats(tmp_path):
    p = 1.0 / 3.0
    ch = FsMacChannel([p, 1 - p], trivial_csi(2), trivial_csi(2), np.full((1, 1, 2, 2), 0.5))
    save_channel(ch, tmp_path / "c.json")
    assert load_channel(tmp_path / "c.json").state_dist[0] == p


def test_deterministic_csi():
    k = deterministic_csi([1, 0, 1])
    assert np.array_equal(k, [[0, 1], [1, 0], [0, 1]])
    with pytest.raises(DimensionMismatch):
        deterministic_csi([0, 2], n_out=2)
