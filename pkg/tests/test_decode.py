"""
Tests for the bitflip decoder
"""

from itertools import combinations

import pytest
import numpy as np

from ldpc_secure_sketch.decode import (
    BitflipDecoder,
    FlipScore,
    SoftWeights,
    bitflip_decode,
    derive_soft,
    reproduce_multi,
    syndrome_decode,
    syndrome_weight,
    uniform_soft,
)
from ldpc_secure_sketch.geometry import build_eg, incidence_matrix
from ldpc_secure_sketch.sparsemat import SparseBinaryMatrix, nullspace_gf2, syndrome


@pytest.fixture(scope="module")
def eg24():
    return incidence_matrix(build_eg(2, 4))


@pytest.fixture(scope="module")
def codeword(eg24):
    # sum of all null-space basis vectors: a nonzero codeword
    return (nullspace_gf2(eg24).sum(axis=0) % 2).astype(np.uint8)


def _with_errors(word, positions):
    r = np.array(word, dtype=np.uint8)
    r[list(positions)] ^= 1
    return r


class TestSoftWeights:
    """Test soft information derivation."""

    def test_uniform(self):
        soft = uniform_soft(5)
        assert soft.is_uniform
        assert soft.unstable_positions.size == 0

    def test_derive_soft(self):
        soft = derive_soft([[0, 1, 1, 0], [0, 1, 0, 0], [0, 1, 1, 1]], 10, 6)
        assert soft.delta.tolist() == [10, 10, 6, 6]
        assert soft.unstable_positions.tolist() == [2, 3]
        assert not soft.is_uniform

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            derive_soft([[0, 1]], 10, 6)
        with pytest.raises(ValueError):
            derive_soft([[0, 1], [1, 1]], 6, 10)
        with pytest.raises(ValueError):
            derive_soft([[0, 1], [1, 1]], 10, 0)
        with pytest.raises(ValueError):
            derive_soft([[0, 1], [1, 1, 0]], 10, 6)


class TestFlipScores:
    """Test the per-position flip scores."""

    def test_lowest_index_wins_ties(self):
        assert FlipScore(np.array([3.0, 1.0, 1.0])).best == 1

    def test_scores_of_weight_two_error(self, eg24):
        g = build_eg(2, 4)
        line = next(l for l in g.lines if 0 in l and 1 in l)
        scores = BitflipDecoder(eg24).flip_scores(_with_errors(np.zeros(16), [0, 1])).epsilon
        for i in range(16):
            if i in (0, 1):
                assert scores[i] == 5
            elif i in line:
                assert scores[i] == 13
            else:
                assert scores[i] == 9

    def test_scores_match_direct_syndrome_weights(self, eg24):
        r = _with_errors(np.zeros(16), [2, 7, 11])
        scores = BitflipDecoder(eg24).flip_scores(r).epsilon
        for i in range(16):
            assert scores[i] == syndrome_weight(eg24, _with_errors(r, [i]))


class TestBitflipDecoder:
    """Test decoding on EG(2,4)."""

    def test_codeword_is_fixed_point(self, eg24, codeword):
        result = bitflip_decode(eg24, codeword)
        assert result.converged
        assert result.iterations == 0
        assert np.array_equal(result.word, codeword)

    def test_single_errors(self, eg24, codeword):
        decoder = BitflipDecoder(eg24)
        for i in range(16):
            result = decoder.decode(_with_errors(codeword, [i]))
            assert result.converged
            assert result.iterations == 1
            assert np.array_equal(result.word, codeword)

    def test_all_double_errors(self, eg24, codeword):
        decoder = BitflipDecoder(eg24)
        for pair in combinations(range(16), 2):
            result = decoder.decode(_with_errors(codeword, pair), trace=True)
            assert result.converged
            assert np.array_equal(result.word, codeword)
            assert result.trace == [(pair[0], 5), (pair[1], 0)]

    def test_double_errors_with_soft_information(self, eg24, codeword):
        decoder = BitflipDecoder(eg24)
        for pair in combinations(range(16), 2):
            r = _with_errors(codeword, pair)
            soft = derive_soft([r, codeword], 10, 6)
            result = decoder.decode(r, soft=soft)
            assert result.converged
            assert result.iterations == 2
            assert np.array_equal(result.word, codeword)

    def test_decoding_commutes_with_codeword_offset(self, eg24, codeword):
        rng = np.random.default_rng(6)
        decoder = BitflipDecoder(eg24)
        for _ in range(300):
            error = np.zeros(16, dtype=np.uint8)
            error[rng.choice(16, size=rng.integers(1, 6), replace=False)] = 1
            plain = decoder.decode(error)
            shifted = decoder.decode(error ^ codeword)
            assert np.array_equal(shifted.word, plain.word ^ codeword)
            assert shifted.stop_reason == plain.stop_reason
            assert shifted.iterations == plain.iterations


    def test_flip_budget(self, eg24):
        result = bitflip_decode(eg24, _with_errors(np.zeros(16), [0, 1]), max_iters=1)
        assert not result.converged
        assert result.stop_reason == "max_iters"
        assert result.syndrome_weight == 5

    def test_cycle_detection(self):
        H = SparseBinaryMatrix.from_rows([[0], [0, 1], [0, 2], [0, 3]], 4)
        r = np.ones(4, dtype=np.uint8)

        result = BitflipDecoder(H).decode(r, trace=True)
        assert result.stop_reason == "cycle"
        assert result.iterations == 2
        assert result.trace == [(1, 2), (1, 1)]

        result = BitflipDecoder(H, detect_cycles=False).decode(r)
        assert result.stop_reason == "max_iters"
        assert result.iterations == 4

    def test_syndrome_decoding(self, eg24):
        e = _with_errors(np.zeros(16), [3, 12])
        result = syndrome_decode(eg24, syndrome(eg24, e))
        assert result.converged
        assert np.array_equal(result.word, e)

    def test_input_validation(self, eg24):
        with pytest.raises(ValueError):
            BitflipDecoder(eg24, max_iters=0)
        with pytest.raises(ValueError):
            bitflip_decode(eg24, np.zeros(15))
        with pytest.raises(ValueError):
            bitflip_decode(eg24, np.zeros(16), soft=SoftWeights(np.zeros(8)))


class TestReproduceMulti:
    """Test decoding several readouts of one response."""

    def test_single_readout(self, eg24, codeword):
        result = reproduce_multi(eg24, [_with_errors(codeword, [4, 9])], 10, 6)
        assert result.converged
        assert np.array_equal(result.word, codeword)

    def test_first_converged_readout_wins(self, eg24, codeword):
        readouts = [_with_errors(codeword, [0, 1]), _with_errors(codeword, [5])]
        result = reproduce_multi(eg24, readouts, 10, 6, max_iters=1)
        assert result.converged
        assert result.iterations == 1
        assert np.array_equal(result.word, codeword)

    def test_least_syndrome_weight_when_none_converges(self, eg24, codeword):
        readouts = [_with_errors(codeword, [0, 1, 2]), _with_errors(codeword, [0, 1])]
        result = reproduce_multi(eg24, readouts, 10, 6, max_iters=1)
        assert not result.converged
        assert result.syndrome_weight == min(
            BitflipDecoder(eg24).decode(r, soft=derive_soft(readouts, 10, 6), max_iters=1).syndrome_weight
            for r in readouts)

    def test_invalid_readouts(self, eg24):
        with pytest.raises(ValueError):
            reproduce_multi(eg24, [], 10, 6)
        with pytest.raises(ValueError):
            reproduce_multi(eg24, [np.zeros(16), np.zeros(15)], 10, 6)
