import numpy as np
import pytest

from bicap import io
from bicap.integrals import bicap_choquet, bipolar_from_bicapacity, choquet
from bicap.oracle import (
    OracleConfig,
    OracleMismatch,
    admissible_orders,
    assert_agree,
    choquet_levelset_oracle,
    exhaustive_permutation_oracle,
    interaction_from_mobius_oracle,
    is_comonotone,
    is_cosigned,
    make_cosigned_comonotone_pair,
    mobius_solve_oracle,
)
from bicap.setfn import (
    CapExceededError,
    additive_capacity,
    generate_random_bicapacity,
    generate_random_bipolar,
    generate_random_capacity,
)
from bicap.transforms import bimobius, interaction, mobius


def test_config_bounds_and_rng():
    with pytest.raises(ValueError):
        OracleConfig(n_max=9)
    cfg = OracleConfig(seed=3)
    assert np.array_equal(cfg.rng(1).random(3), cfg.rng(1).random(3))
    assert not np.array_equal(cfg.rng(1).random(3), cfg.rng(2).random(3))


def test_levelset_oracle_hand_value():
    c = additive_capacity(2, [0.25, 0.75])
    assert choquet_levelset_oracle(c, [2.0, 1.0]) == pytest.approx(1.25)
    with pytest.raises(ValueError):
        choquet_levelset_oracle(c, [-1.0, 1.0])


def test_mobius_solve_oracle_matches_transforms():
    c = generate_random_capacity(4, 0)
    assert np.allclose(mobius_solve_oracle(c).values, mobius(c).values, atol=1e-12)
    v = generate_random_bicapacity(3, 0)
    assert np.allclose(mobius_solve_oracle(v).values, bimobius(v).values, atol=1e-12)
    with pytest.raises(CapExceededError):
        mobius_solve_oracle(generate_random_capacity(7, 0))
    with pytest.raises(TypeError):
        mobius_solve_oracle(generate_random_bipolar(2, 0))


def test_interaction_oracle_matches_transform():
    c = generate_random_capacity(4, 1)
    I = interaction_from_mobius_oracle(mobius(c).values, 4)
    assert np.allclose(I, interaction(c).values, atol=1e-12)


def test_admissible_orders_count():
    assert len(list(admissible_orders([1.0, -1.0, 2.0, 0.0, 1.0]))) == 6
    assert list(admissible_orders([3.0, -1.0])) == [[1, 0]]


def test_exhaustive_oracle_singleton_under_condition():
    v = generate_random_bicapacity(3, 2)
    z = bipolar_from_bicapacity(v)
    for f in ([1.0, -1.0, 1.0], [0.0, 2.0, -2.0], [-1.0, 3.0, 2.0]):
        vals = exhaustive_permutation_oracle(z, f)
        assert len(vals) == 1
        assert vals[0] == pytest.approx(bicap_choquet(v, f), abs=1e-12)


def test_exhaustive_oracle_multivalued_without_condition():
    z = generate_random_bipolar(2, 0)
    assert len(exhaustive_permutation_oracle(z, [1.0, -1.0])) == 2


def test_predicates_and_pair_constructor():
    assert is_cosigned([1, 0, -2], [3, -1, -1])
    assert not is_cosigned([1, -2], [-1, 1])
    assert is_comonotone([1, 2, 3], [0, 0, 5])
    assert not is_comonotone([1, 2], [2, 1])
    for seed in range(10):
        f, g = make_cosigned_comonotone_pair(4, seed)
        assert is_cosigned(f, g) and is_comonotone(np.abs(f), np.abs(g))


def test_assert_agree_dumps_instance(tmp_path):
    c = generate_random_capacity(2, 0)
    f = np.array([0.5, 1.0])
    assert assert_agree("same", 1.0, 1.0 + 1e-12, 1e-9) <= 1e-9
    cfg = OracleConfig(dump_dir=str(tmp_path))
    with pytest.raises(OracleMismatch) as err:
        assert_agree("choquet check", choquet(c, f), 99.0, 1e-9, {"capacity": c, "act": f}, cfg)
    path = tmp_path / "choquet_check.json"
    assert str(path) in str(err.value)
    import json

    doc = json.loads(path.read_text())
    assert np.allclose(io.from_dict(doc["capacity"]).values, c.values)
    assert np.allclose(io.act_from_dict(doc["act"]), f)
    with pytest.raises(OracleMismatch, match="instance:"):
        assert_agree("inline", 0.0, 1.0, 1e-9, {"act": f})
