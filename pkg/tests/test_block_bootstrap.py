import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blockquant.block_bootstrap import (
    BlockLengthSchedule,
    BootstrapPlan,
    batch_ecdf_at,
    batch_quantiles,
    block_length,
    bootstrap_bahadur_decompose,
    bootstrap_ecdf,
    bootstrap_quantile,
    coverage_counts,
    draw_starts,
    dyadic_anchor,
    expected_bootstrap_ecdf,
    resample,
)
from blockquant.dist_models import PowerLocalModel
from blockquant.process_gen import ProcessSpec, generate
from blockquant.quantile_core import Ecdf, bahadur_decompose, empirical_quantile


def _exhaustive_mean_ecdf(x, l, t):
    """Average the block ECDF over every start, building each block explicitly."""
    n = len(x)
    vals = [bootstrap_ecdf(resample(x, l, starts=[j]))(t) for j in range(n)]
    return sum(vals) / n


def test_block_length_examples():
    assert block_length(BlockLengthSchedule.fixed(5), 100) == 5
    assert block_length(BlockLengthSchedule.power(1, 0.5), 100) == 10
    dy = BlockLengthSchedule.dyadic_power(1, 0.5)
    assert {block_length(dy, n) for n in range(8, 16)} == {2}
    assert block_length(dy, 8) == 2


def test_block_length_clipping():
    assert block_length(BlockLengthSchedule.fixed(50), 10) == 10
    assert block_length(BlockLengthSchedule.power(0.01, 0.5), 100) == 1
    assert block_length(BlockLengthSchedule.power(5, 0.9), 20) == 20


def test_dyadic_anchor():
    assert [dyadic_anchor(n) for n in (1, 2, 3, 4, 7, 8, 15, 16)] == [1, 2, 2, 4, 4, 8, 8, 16]


@pytest.mark.parametrize("c, gamma", [(1.0, 0.5), (0.5, 0.3), (2.0, 0.7)])
def test_dyadic_constancy_and_rates(c, gamma):
    sched = BlockLengthSchedule.dyadic_power(c, gamma)
    c1, c2, eps1 = sched.rate_constants()
    for k in range(3, 15):
        ls = {block_length(sched, n) for n in range(2**k, 2 ** (k + 1))}
        assert len(ls) == 1
    for n in range(1, 2**15):
        l = block_length(sched, n)
        # relative slack absorbs rounding in 1 - eps1
        assert c1 * n**eps1 * (1 - 1e-12) <= l <= c2 * n ** (1 - eps1) * (1 + 1e-12)


def test_power_rates():
    sched = BlockLengthSchedule.power(1.0, 0.5)
    c1, c2, eps1 = sched.rate_constants()
    for n in range(1, 5000):
        assert c1 * n**eps1 <= block_length(sched, n) <= c2 * n ** (1 - eps1)


def test_schedule_validation():
    with pytest.raises(ValueError):
        BlockLengthSchedule.power(1.0, 1.0)
    with pytest.raises(ValueError):
        BlockLengthSchedule.fixed(0)
    with pytest.raises(ValueError):
        BlockLengthSchedule("moving")
    with pytest.raises(ValueError):
        BootstrapPlan(BlockLengthSchedule.fixed(2), 0)


def test_plan_json_round_trip():
    for sched in (BlockLengthSchedule.fixed(4), BlockLengthSchedule.power(1.5, 0.4), BlockLengthSchedule.dyadic_power()):
        plan = BootstrapPlan(sched, 250, 9)
        assert BootstrapPlan.from_dict(plan.to_dict()) == plan
    assert set(BootstrapPlan(BlockLengthSchedule.fixed(4)).to_dict()) == {"schedule", "B", "seed"}


def test_resample_wraps_circularly():
    bs = resample(np.array([1.0, 2.0, 3.0, 4.0]), 2, starts=[3, 3])
    assert list(bs.values) == [4.0, 1.0, 4.0, 1.0]


def test_resample_size():
    bs = resample(np.arange(10.0), 3, seed=1)
    assert bs.num_blocks == 3 and len(bs) == 9


def test_resample_rejects_bad_lengths():
    x = np.arange(5.0)
    with pytest.raises(ValueError):
        resample(x, 6)
    with pytest.raises(ValueError):
        resample(x, 0)
    with pytest.raises(ValueError):
        resample(x, 2, starts=[5, 0])


def test_full_length_block_is_rotation():
    x = np.random.default_rng(2).standard_normal(17)
    for j in range(17):
        bs = resample(x, 17, starts=[j])
        assert np.array_equal(np.sort(bs.values), np.sort(x))
        e = bootstrap_ecdf(bs)
        assert np.array_equal(e(x), Ecdf(x)(x))
        assert bootstrap_quantile(bs, 0.3) == empirical_quantile(x, 0.3)


def test_duplicate_blocks_keep_ecdf():
    x = np.random.default_rng(3).standard_normal(12)
    one = bootstrap_ecdf(resample(x, 6, starts=[4]))
    two = bootstrap_ecdf(resample(x, 6, starts=[4, 4]))
    grid = np.linspace(-3, 3, 101)
    assert np.array_equal(one(grid), two(grid))
    assert bootstrap_ecdf(resample(x, 5, seed=3))(np.inf) == 1.0


def test_bootstrap_quantile_examples():
    x = np.arange(1.0, 11.0)
    assert bootstrap_quantile(resample(x, 10, starts=[0]), 0.5) == 5
    assert bootstrap_quantile(resample(np.full(9, 2.5), 3, seed=4), 0.7) == 2.5


def test_resample_determinism_and_support():
    x = generate(ProcessSpec.ar1(PowerLocalModel(2.0), 0.5), 300, 1).values
    a, b = resample(x, 17, seed=99), resample(x, 17, seed=99)
    assert np.array_equal(a.values, b.values)
    assert np.all(np.isin(a.values, x))
    for k, s in enumerate(a.block_starts):
        block = a.values[k * 17:(k + 1) * 17]
        assert np.array_equal(block, x[(s + np.arange(17)) % 300])


def test_starts_are_uniform_over_all_positions():
    starts = draw_starts(10, 4, 20_000, 5).ravel()
    counts = np.bincount(starts, minlength=10)
    assert counts.min() > 0 and counts[9] > 0  # wrap-around starts occur
    expected = starts.size / 10
    assert np.all(np.abs(counts - expected) < 5 * np.sqrt(expected))


def test_expected_ecdf_examples():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert expected_bootstrap_ecdf(x, 2, 2.5) == 0.5
    assert expected_bootstrap_ecdf(x, 3, 1.0) == 0.25


def test_expected_ecdf_matches_exhaustive_oracle():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(50)
    e = Ecdf(x)
    for t in rng.uniform(-2.5, 2.5, 20):
        oracle = _exhaustive_mean_ecdf(x, 7, t)
        assert abs(oracle - e(t)) <= 1e-15
        assert abs(expected_bootstrap_ecdf(x, 7, t) - e(t)) <= 1e-15


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_mean_identity_property(data):
    n = data.draw(st.integers(1, 200))
    x = np.array(data.draw(st.lists(st.integers(-20, 20), min_size=n, max_size=n)), dtype=float)
    l = data.draw(st.integers(1, n))
    t = data.draw(st.floats(-25, 25))
    assert abs(expected_bootstrap_ecdf(x, l, t) - Ecdf(x)(t)) <= 1e-15


def test_circular_coverage():
    for n, l in ((13, 1), (13, 5), (13, 13), (64, 9)):
        windows = ((np.arange(n)[:, None] + np.arange(l)[None, :]) % n).ravel()
        assert np.all(np.bincount(windows, minlength=n) == l)
        cov = coverage_counts(n, l, np.arange(n).reshape(1, n))
        assert np.all(cov == l)


def test_coverage_counts_match_explicit_blocks():
    rng = np.random.default_rng(6)
    for n, l in ((31, 1), (31, 4), (31, 31), (200, 13)):
        starts = draw_starts(n, l, 40, int(rng.integers(1 << 30)))
        cov = coverage_counts(n, l, starts)
        assert cov.shape == (40, n)
        for row, st_ in zip(cov, starts):
            explicit = np.bincount(((st_[:, None] + np.arange(l)) % n).ravel(), minlength=n)
            assert np.array_equal(row, explicit)


def test_batch_helpers_match_object_api():
    rng = np.random.default_rng(7)
    for n, l in ((25, 3), (400, 20), (2048, 45)):
        x = rng.standard_normal(n)
        order = np.argsort(x)
        starts = draw_starts(n, l, 60, n)
        cov = coverage_counts(n, l, starts)
        for q in (0.03, 0.5, 0.81):
            bq = batch_quantiles(x[order], order, cov, q)
            for i in range(0, 60, 5):
                assert bq[i] == bootstrap_quantile(resample(x, l, starts=starts[i]), q)
        fs = batch_ecdf_at(x, cov, 0.2)
        for i in range(0, 60, 5):
            assert fs[i] == bootstrap_ecdf(resample(x, l, starts=starts[i]))(0.2)


def test_batch_quantiles_fallback_outside_window():
    # strongly persistent path: block quantiles far from the sample median
    x = np.concatenate((np.linspace(-2, -1, 500), np.linspace(1, 2, 500)))
    order = np.argsort(x)
    starts = np.array([[0, 0], [500, 500], [250, 750]])
    cov = coverage_counts(1000, 500, starts)
    bq = batch_quantiles(x[order], order, cov, 0.5)
    for i in range(3):
        assert bq[i] == bootstrap_quantile(resample(x, 500, starts=starts[i]), 0.5)


def test_single_draw_matches_first_batch_row():
    assert np.array_equal(draw_starts(100, 7, None, 5), draw_starts(100, 7, 4, 5)[0])
    bs = resample(np.arange(100.0), 7, seed=5)
    assert np.array_equal(bs.block_starts, draw_starts(100, 7, 4, 5)[0])


def test_bootstrap_decomposition():
    model = PowerLocalModel(2.0)
    x = np.array([-0.3, -0.1, 0.2, 0.4])
    bs = resample(x, 4, starts=[0])
    d = bootstrap_bahadur_decompose(bs, model)
    assert d.linearized_term == 0.0 and d.remainder == -0.1
    ref = bahadur_decompose(x, model)
    assert d == ref

    m1 = PowerLocalModel(1.0, 1.0)
    d = bootstrap_bahadur_decompose(resample(np.array([-0.5, 0.5]), 1, starts=[0, 1]), m1)
    assert (d.empirical_quantile, d.linearized_term, d.remainder) == (-0.5, 0.0, -0.5)


def test_bootstrap_decomposition_identity_and_scaling():
    model = PowerLocalModel(2.0)
    x = generate(ProcessSpec.ar1(model, 0.5), 1000, 8).values
    for seed in range(30):
        bs = resample(x, 31, seed=seed)
        d = bootstrap_bahadur_decompose(bs, model)
        assert abs(d.empirical_quantile - d.linearized_term - d.remainder) <= 1e-12
        assert d.size == 32 * 31
        dn = bootstrap_bahadur_decompose(bs, model, scale="n")
        assert dn.size == 1000 and dn.remainder == d.remainder


def test_bootstrap_remainder_shrinks():
    model = PowerLocalModel(2.0)
    spec = ProcessSpec.iid(model)
    med = []
    for n in (1000, 10_000):
        l = block_length(BlockLengthSchedule.power(), n)
        vals = [
            abs(bootstrap_bahadur_decompose(resample(generate(spec, n, s), l, seed=s), model).scaled_remainder)
            for s in range(300)
        ]
        med.append(np.median(vals))
    assert med[1] < med[0]
