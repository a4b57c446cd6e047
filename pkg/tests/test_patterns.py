import numpy as np
import pytest
from hypothesis import given, strategies as st

from degmap.errors import DegenerateCoverageError, IllPosedSystemError, InvalidArgumentError
from degmap.patterns import (
    CycleTestRecord,
    CycleTestSet,
    PatternSystem,
    assemble_multirate,
    band_traverse_time,
    build_pattern_system,
    covered_bands,
    cycle_test_sets,
    pattern_count,
    ranked_bands,
)
from degmap.types import SocGrid, uniform_soc_grid

# nonzero layout of the two published pattern matrices
HIGH_RATE_LAYOUT = np.array(
    [
        [0, 0, 1, 0, 0],
        [0, 1, 1, 0, 0],
        [0, 1, 1, 1, 0],
        [1, 1, 1, 1, 0],
        [1, 1, 1, 1, 1],
    ],
    dtype=bool,
)
LOW_RATE_LAYOUT = np.array([[0, 1, 0], [1, 1, 0], [1, 1, 1]], dtype=bool)


@pytest.mark.parametrize(
    "n_cyc, dod, p",
    [(3333, 0.1, 66660.0), (2500, 0.5, 10000.0), (1, 1.0, 2.0), (3333, 0.3, 22220.0), (2800, 0.5, 11200.0)],
)
def test_pattern_count(n_cyc, dod, p):
    assert pattern_count(CycleTestRecord(dod, n_cyc, 0.1)) == pytest.approx(p, rel=1e-15)


def test_pattern_count_p14():
    assert pattern_count(CycleTestRecord(0.7, 2000, 0.45)) == pytest.approx(5714.285714285714, rel=1e-15)


def test_record_rejects_zero_dod():
    with pytest.raises(InvalidArgumentError):
        CycleTestRecord(0.0, 10, 0.1)


@pytest.mark.parametrize(
    "c_q, i_bat, n_bd, t_b",
    [(1.5, 5.25, 5, 0.05714285714285714), (1.5, 3.0, 3, 1 / 6), (1.0, 1.0, 1, 1.0)],
)
def test_band_traverse_time(c_q, i_bat, n_bd, t_b):
    assert band_traverse_time(c_q, i_bat, n_bd) == pytest.approx(t_b, rel=1e-15)


@pytest.mark.parametrize("args", [(1.5, 0.0, 5), (0.0, 1.0, 5), (1.0, 1.0, 0)])
def test_band_traverse_time_rejects_zero(args):
    with pytest.raises(InvalidArgumentError):
        band_traverse_time(*args)


def test_covered_bands_examples():
    grid = uniform_soc_grid(5)
    assert covered_bands(0.1, grid) == {2}
    assert covered_bands(0.9, grid) == {0, 1, 2, 3, 4}
    assert covered_bands(1.0, SocGrid((0.01, 0.4, 0.99))) == {0, 1, 2}


def test_covered_bands_degenerate():
    with pytest.raises(DegenerateCoverageError):
        covered_bands(0.1, uniform_soc_grid(2))


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.integers(1, 30))
def test_coverage_nests(d1, d2, n):
    lo, hi = sorted((d1, d2))
    grid = uniform_soc_grid(n)
    try:
        small = covered_bands(lo, grid)
    except DegenerateCoverageError:
        return
    assert small <= covered_bands(hi, grid)


@given(st.integers(1, 20), st.integers(1, 20))
def test_ranked_bands_nest_and_grow(k, n):
    grid = uniform_soc_grid(n)
    a, b = ranked_bands(k, grid), ranked_bands(k + 1, grid)
    assert a <= b
    assert len(a) == min(k, n)


def _wang_sets(rows):
    return cycle_test_sets(rows, [5, 3])


def test_high_rate_layout(wang_rows):
    test1 = _wang_sets(wang_rows)[0]
    system = build_pattern_system(test1)
    np.testing.assert_array_equal(system.matrix > 0, HIGH_RATE_LAYOUT)
    t_b = 1.5 / (5.25 * 5)
    for i, record in enumerate(test1.records):
        row = system.matrix[i][HIGH_RATE_LAYOUT[i]]
        np.testing.assert_allclose(row, t_b * 2 * record.n_cyc / record.dod, rtol=1e-15)
    np.testing.assert_array_equal(system.rhs, [0.33, 0.45, 0.45, 0.45, 0.18])


def test_low_rate_layout(wang_rows):
    system = build_pattern_system(_wang_sets(wang_rows)[1])
    np.testing.assert_array_equal(system.matrix > 0, LOW_RATE_LAYOUT)
    assert system.matrix[0, 1] == pytest.approx(22220 / 6, rel=1e-15)


def test_divergent_rows_flagged(wang_rows):
    s1, s2 = (build_pattern_system(s) for s in _wang_sets(wang_rows))
    # DoD 0.2 and 0.7 rows of test 1, DoD 0.5 row of test 2
    assert s1.divergent_rows == (1, 3)
    assert s2.divergent_rows == (1,)


def test_interval_rule_is_rank_deficient_on_published_tests(wang_rows):
    for test in _wang_sets(wang_rows):
        with pytest.raises(IllPosedSystemError) as info:
            build_pattern_system(test, coverage="interval")
        assert info.value.rank < info.value.columns


def test_full_rank_published_tests(wang_rows):
    for test in _wang_sets(wang_rows):
        m = build_pattern_system(test).matrix
        assert np.linalg.matrix_rank(m) == m.shape[1]


def test_single_record_scalar_system():
    test = CycleTestSet(2.0, 1.0, (CycleTestRecord(1.0, 10.0, 0.3),), uniform_soc_grid(1))
    system = build_pattern_system(test)
    assert system.matrix.shape == (1, 1)
    assert system.matrix[0, 0] == 0.5 * 20.0
    assert system.rhs[0] == 0.3


def test_records_sorted_by_dod():
    recs = (CycleTestRecord(0.9, 1, 1), CycleTestRecord(0.1, 1, 1))
    test = CycleTestSet(1.0, 1.0, recs, uniform_soc_grid(1))
    assert [r.dod for r in test.records] == [0.1, 0.9]


def test_underdetermined_test_rejected():
    with pytest.raises(InvalidArgumentError):
        CycleTestSet(1.0, 1.0, (CycleTestRecord(0.5, 1, 1),), uniform_soc_grid(2))


def test_unknown_coverage_rule(wang_rows):
    with pytest.raises(InvalidArgumentError):
        build_pattern_system(_wang_sets(wang_rows)[0], coverage="nearest")


def test_multirate_block_diagonal(wang_rows):
    s1, s2 = (build_pattern_system(s) for s in _wang_sets(wang_rows))
    full = assemble_multirate([s1, s2])
    assert full.shape == (8, 8)
    np.testing.assert_array_equal(full.matrix[:5, :5], s1.matrix)
    np.testing.assert_array_equal(full.matrix[5:, 5:], s2.matrix)
    assert not full.matrix[:5, 5:].any() and not full.matrix[5:, :5].any()
    assert full.column_labels == s1.column_labels + s2.column_labels
    assert full.divergent_rows == (1, 3, 6)
    assert full.cell_capacity_ah == 1.5


def test_multirate_single_system_unchanged(wang_rows):
    s1 = build_pattern_system(_wang_sets(wang_rows)[0])
    assert assemble_multirate([s1]) is s1


def test_multirate_two_scalars():
    a = PatternSystem([[2.0]], [1.0], [(0.5, 1.0)])
    b = PatternSystem([[3.0]], [1.0], [(0.5, 2.0)])
    np.testing.assert_array_equal(assemble_multirate([a, b]).matrix, [[2.0, 0.0], [0.0, 3.0]])


def test_multirate_rejects_duplicate_rates():
    a = PatternSystem([[2.0]], [1.0], [(0.5, 1.0)])
    with pytest.raises(InvalidArgumentError):
        assemble_multirate([a, a])


@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4)), min_size=1, max_size=4))
def test_multirate_off_block_zero(shapes):
    rng = np.random.default_rng(len(shapes))
    systems = [
        PatternSystem(rng.random((m, n)) + 0.1, rng.random(m), [(0.5, float(k))] * n)
        for k, (m, n) in enumerate(shapes, start=1)
    ]
    full = assemble_multirate(systems).matrix
    mask = np.zeros_like(full, dtype=bool)
    r = c = 0
    for m, n in shapes:
        mask[r:r + m, c:c + n] = True
        r, c = r + m, c + n
    assert not full[~mask].any()
    assert np.all(full >= 0)


def test_from_counts_raw_constructor():
    system = PatternSystem.from_counts([[1, 2], [0, 3]], [0.5, 0.25], [1.0, 2.0], [(0.25, 1.0), (0.75, 1.0)])
    np.testing.assert_array_equal(system.matrix, [[0.5, 0.5], [0.0, 0.75]])


def test_pattern_system_rejects_negative():
    with pytest.raises(InvalidArgumentError):
        PatternSystem([[-1.0]], [1.0], [(0.5, 1.0)])


def test_cycle_sets_group_by_current(wang_rows):
    sets = cycle_test_sets(wang_rows, [5, 3])
    assert [s.i_bat for s in sets] == [5.25, 3.0]
    assert [len(s.records) for s in sets] == [5, 3]
    with pytest.raises(InvalidArgumentError):
        cycle_test_sets(wang_rows, [5])


def test_cycle_sets_inconsistent_capacity():
    rows = [
        {"i_bat_a": 1.0, "c_q_ah": 1.0, "dod": 0.5, "n_cyc": 1, "q_s_ah": 0.1},
        {"i_bat_a": 1.0, "c_q_ah": 2.0, "dod": 0.9, "n_cyc": 1, "q_s_ah": 0.1},
    ]
    with pytest.raises(InvalidArgumentError):
        cycle_test_sets(rows, 1)
