"""
Tests for channel simulation and block error evaluation
"""

from math import comb

import pytest
import numpy as np
import pandas as pd

from ldpc_secure_sketch.evaluation import (
    ChannelParams,
    PerrEstimate,
    baseline_frame,
    bdd_baseline,
    binomial_pmf,
    block_error_curve,
    bsc_corrupt,
    compare_curves,
    direct_failure_rate,
    estimate_perr,
    memory_report,
)
from ldpc_secure_sketch.geometry import build_eg, incidence_matrix
from ldpc_secure_sketch.sketch import (
    ConstructionConfig,
    InstanceCode,
    Response,
    RowProvenance,
    build_instance_code,
    syndrome_enroll,
)
from ldpc_secure_sketch.sparsemat import SparseBinaryMatrix, rank_gf2


@pytest.fixture(scope="module")
def eg24_code():
    H = incidence_matrix(build_eg(2, 4))
    return InstanceCode(H, rank_gf2(H), tuple(RowProvenance("external") for _ in H.rows))


@pytest.fixture(scope="module")
def n128_code():
    r = Response.random(128, np.random.default_rng(1))
    return r, build_instance_code(r, ConstructionConfig(target_k=56, seed=1))


class TestChannel:
    """Test the binary symmetric channel."""

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(p=0.6)
        with pytest.raises(ValueError):
            ChannelParams(p=0.1, m=0)

    def test_noiseless_channel(self):
        r = Response.random(32, np.random.default_rng(0))
        readouts = bsc_corrupt(r, ChannelParams(p=0.0, m=3))
        assert len(readouts) == 3
        assert all(x == r for x in readouts)

    def test_seeded(self):
        r = Response(np.zeros(256, dtype=np.uint8))
        a = bsc_corrupt(r, ChannelParams(p=0.1, m=2, seed=9))
        b = bsc_corrupt(r, ChannelParams(p=0.1, m=2, seed=9))
        assert a == b
        assert a[0] != a[1]

    def test_flip_rate(self):
        r = Response(np.zeros(10_000, dtype=np.uint8))
        (readout,) = bsc_corrupt(r, ChannelParams(p=0.2, seed=1))
        assert abs(readout.weight / 10_000 - 0.2) < 0.02

    def test_binomial_pmf(self):
        pmf = binomial_pmf(10, 0.3)
        assert pmf.sum() == pytest.approx(1.0)
        assert pmf[2] == pytest.approx(comb(10, 2) * 0.3 ** 2 * 0.7 ** 8)
        with pytest.raises(ValueError):
            binomial_pmf(10, 1.5)


class TestPerWeightEstimates:
    """Test per-weight decoder failure rates."""

    def test_exhaustive_small_weights(self, eg24_code):
        for weight, count in ((0, 1), (1, 16), (2, 120)):
            est = estimate_perr(eg24_code, weight, trials=1000)
            assert est.exhaustive
            assert est.trials == count
            assert est.failures == 0

    def test_sampled_weight(self, eg24_code):
        est = estimate_perr(eg24_code, 5, trials=200)
        assert not est.exhaustive
        assert est.trials == 200
        assert est.failures > 0

    def test_reproducible(self, eg24_code):
        a = estimate_perr(eg24_code, 4, trials=100, m=3, seed=5)
        b = estimate_perr(eg24_code, 4, trials=100, m=3, seed=5)
        assert a == b

    def test_reference_word(self, n128_code):
        r, code = n128_code
        est = estimate_perr(code, 1, trials=500, r_I=r)
        assert est.exhaustive
        assert est.trials == 128

    def test_invalid_arguments(self, eg24_code):
        with pytest.raises(ValueError):
            estimate_perr(eg24_code, 17)
        with pytest.raises(ValueError):
            estimate_perr(eg24_code, 1, trials=0)
        with pytest.raises(ValueError):
            estimate_perr(eg24_code, 1, r_I=np.zeros(8, dtype=np.uint8))

    def test_stderr(self):
        est = PerrEstimate(3, 100, 25)
        assert est.rate == 0.25
        assert est.stderr == pytest.approx(np.sqrt(0.25 * 0.75 / 100))


class TestBlockErrorCurve:
    """Test assembly of the block error curve."""

    def test_conservative_tail_dominates(self, eg24_code):
        grid = [0.001, 0.01, 0.05, 0.1]
        cons = block_error_curve(eg24_code, grid, i_max=3, trials=300)
        exact = block_error_curve(eg24_code, grid, i_max=3, trials=300, tail_policy="truncated")
        for (_, a), (_, b) in zip(cons.curve, exact.curve):
            assert a >= b
        values = [v for _, v in cons.curve]
        assert values == sorted(values)

    def test_all_weights_simulated(self, eg24_code):
        # weights 0..2 are always corrected, so only the tail remains
        report = block_error_curve(eg24_code, [0.01], i_max=2, trials=1000)
        p = 0.01
        tail = 1 - sum(comb(16, i) * p ** i * (1 - p) ** (16 - i) for i in range(3))
        assert report.curve[0][1] == pytest.approx(tail)
        assert block_error_curve(eg24_code, [0.01], i_max=2, trials=1000,
                                 tail_policy="truncated").curve[0][1] == 0.0

    def test_zero_crossover(self, eg24_code):
        report = block_error_curve(eg24_code, [0.0], i_max=1, trials=10)
        assert report.curve == [(0.0, 0.0)]

    def test_frames(self, eg24_code):
        report = block_error_curve(eg24_code, [0.01, 0.02], i_max=2, trials=200)
        assert list(report.to_frame().columns) == ["p", "p_block"]
        per_weight = report.per_weight_frame()
        assert per_weight["weight"].tolist() == [0, 1, 2]
        assert per_weight["exhaustive"].all()

    def test_parallel_matches_serial(self, eg24_code):
        serial = block_error_curve(eg24_code, [0.02], i_max=4, trials=50, m=2, seed=3)
        parallel = block_error_curve(eg24_code, [0.02], i_max=4, trials=50, m=2, seed=3, workers=2)
        assert serial.per_weight == parallel.per_weight
        assert serial.curve == parallel.curve

    def test_invalid_arguments(self, eg24_code):
        with pytest.raises(ValueError):
            block_error_curve(eg24_code, [], i_max=1)
        with pytest.raises(ValueError):
            block_error_curve(eg24_code, [0.7], i_max=1)
        with pytest.raises(ValueError):
            block_error_curve(eg24_code, [0.1], i_max=17)
        with pytest.raises(ValueError):
            block_error_curve(eg24_code, [0.1], i_max=1, tail_policy="optimistic")


class TestMultiReadoutGain:
    """Test that extra readouts lower the failure rate."""

    def test_three_readouts_beat_one(self, eg24_code):
        trials = 10_000
        single = direct_failure_rate(eg24_code, ChannelParams(p=0.05, m=1, seed=11), trials)
        triple = direct_failure_rate(eg24_code, ChannelParams(p=0.05, m=3, seed=11), trials)
        assert single.trials == triple.trials == trials
        assert single.rate - triple.rate > 3 * np.hypot(single.stderr, triple.stderr)


class TestLength128Curve:
    """Test the block error curve of a length-128 instance code."""

    def test_curve_shape(self, n128_code):
        r, code = n128_code
        grid = [0.001, 0.005, 0.01, 0.02, 0.05]
        report = block_error_curve(code, grid, i_max=20, trials=300, r_I=r)
        values = [v for _, v in report.curve]
        assert values == sorted(values)
        assert values[0] < 0.1 * values[-1]


class TestBaselines:
    """Test the bounded-distance baseline and comparisons."""

    def test_bdd_baseline(self):
        p = 0.01
        expected = sum(comb(127, i) * p ** i * (1 - p) ** (127 - i) for i in range(11, 128))
        assert bdd_baseline(127, 10, [p])[0] == pytest.approx(expected, rel=1e-9)
        assert bdd_baseline(127, 127, [0.3])[0] == 0.0
        with pytest.raises(ValueError):
            bdd_baseline(10, 11, [0.1])

    def test_compare_curves(self, eg24_code):
        report = block_error_curve(eg24_code, [0.01, 0.02], i_max=1, trials=10, label="ldpc(16,7)")
        table = compare_curves({report.label: report, "bdd(16,t=2)": baseline_frame(16, 2, [0.01, 0.02])})
        assert list(table.columns) == ["p", "p_block", "source"]
        assert table["source"].tolist() == ["ldpc(16,7)"] * 2 + ["bdd(16,t=2)"] * 2
        with pytest.raises(ValueError):
            compare_curves({})


class TestMemoryReport:
    """Test storage accounting."""

    def test_eg22_accounting(self):
        H = incidence_matrix(build_eg(2, 2))
        table = memory_report(H)
        assert isinstance(table, pd.DataFrame)
        assert table["bits"].tolist() == [60, 4, 6]

    def test_with_helper_data(self, eg24_code):
        h = syndrome_enroll(Response.random(16, np.random.default_rng(0)), eg24_code.H)
        table = memory_report(eg24_code, h)
        assert table["bits"].iloc[-1] == 20
        assert table["item"].iloc[-1] == "stored syndrome helper"

    def test_single_row_and_column_cost_no_address_bits(self):
        H = SparseBinaryMatrix(1, 4, ((0, 1, 2, 3),))
        assert memory_report(H)["bits"].tolist() == [8, 4, 1]
        assert memory_report(SparseBinaryMatrix(2, 1, ((0,), (0,))))["bits"].tolist() == [2, 1, 2]
