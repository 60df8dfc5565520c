"""Tests for the gene layout and bound handling."""

import numpy as np
import pytest

from reefopt.core import ConfigError
from reefopt.engine import EncodingSpec, GeneSpec, clamp_round
from reefopt.engine.encoding import round_half_away


def _mixed() -> EncodingSpec:
    return EncodingSpec(
        (
            GeneSpec("real", 0.0, 50.0, group=0),
            GeneSpec("real", 0.0, 0.3, group=1),
            GeneSpec("integer", 1, 4, group=2),
        )
    )


def test_lower_above_upper_rejected():
    with pytest.raises(ConfigError, match="exceeds"):
        GeneSpec("real", 2.0, 1.0)


def test_integer_gene_needs_integral_bounds():
    with pytest.raises(ConfigError, match="integral"):
        GeneSpec("integer", 0.5, 3)


def test_unknown_gene_kind():
    with pytest.raises(ConfigError, match="Unknown gene kind"):
        GeneSpec("complex", 0, 1)


def test_groups_must_be_contiguous():
    with pytest.raises(ConfigError, match="contiguous"):
        EncodingSpec((GeneSpec("real", 0, 1, group=0), GeneSpec("real", 0, 1, group=2)))


def test_empty_encoding_rejected():
    with pytest.raises(ConfigError, match="at least one gene"):
        EncodingSpec(())


def test_vector_views():
    enc = _mixed()
    assert len(enc) == 3
    assert enc.lower.tolist() == [0.0, 0.0, 1.0]
    assert enc.span.tolist() == pytest.approx([50.0, 0.3, 3.0])
    assert enc.integer_mask.tolist() == [False, False, True]
    assert enc.n_groups == 3


def test_uniform_and_concat():
    enc = EncodingSpec.concat([EncodingSpec.uniform(2, -1, 1).genes, [GeneSpec("integer", 0, 5)]])
    assert len(enc) == 3
    assert enc.integer_mask.tolist() == [False, False, True]


def test_sample_stays_in_bounds():
    enc = _mixed()
    rng = np.random.default_rng(3)
    rows = enc.sample(rng, size=500)
    assert rows.shape == (500, 3)
    assert all(enc.contains(row) for row in rows)
    assert set(np.unique(rows[:, 2])) <= {1.0, 2.0, 3.0, 4.0}


def test_sample_gene_integer():
    enc = _mixed()
    rng = np.random.default_rng(0)
    values = {enc.sample_gene(2, rng) for _ in range(200)}
    assert values == {1.0, 2.0, 3.0, 4.0}


def test_contains_rejects_fractional_integer_and_bad_length():
    enc = _mixed()
    assert enc.contains(np.array([10.0, 0.1, 2.0]))
    assert not enc.contains(np.array([10.0, 0.1, 2.5]))
    assert not enc.contains(np.array([10.0, 0.1]))
    assert not enc.contains(np.array([60.0, 0.1, 2.0]))


@pytest.mark.parametrize(
    "value, expected",
    [(0.5, 1.0), (1.5, 2.0), (2.5, 3.0), (-0.5, -1.0), (1.49, 1.0)],
)
def test_round_half_away_from_zero(value, expected):
    assert round_half_away(np.array([value]))[0] == expected


def test_clamp_round_mixed():
    enc = _mixed()
    out = clamp_round(np.array([55.0, -0.2, 2.5]), enc)
    assert out.tolist() == pytest.approx([50.0, 0.0, 3.0])
    out = clamp_round(np.array([3.0, 0.2, 7.0]), enc)
    assert out[2] == 4.0


def test_clamp_round_length_mismatch():
    with pytest.raises(ValueError, match="does not match"):
        clamp_round(np.zeros(2), _mixed())


def test_equal_rows_tolerance():
    enc = EncodingSpec.uniform(2, 0, 1)
    rows = np.array([[0.5, 0.5], [0.5, 0.5 + 1e-13], [0.5, 0.51]])
    assert enc.equal_rows(rows, np.array([0.5, 0.5])).tolist() == [True, True, False]
