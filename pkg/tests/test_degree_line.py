import pytest

from entropik.degree_line import degree_consensus, line_degrees
from entropik.patterns import build_pattern
from entropik.records import DegreeRecord
from entropik.report import golden_gf


def table2_degrees(p):
    return [1, p - 1, (p - 1) ** 2, p ** 3 - 3 * p ** 2 + 2 * p + 1,
            (p - 1) * (p ** 3 - 3 * p ** 2 + p + 3)]


@pytest.mark.parametrize("q,n", [(4, 5), (5, 4), (6, 4)])
def test_full_step_degrees_follow_table1(q, n):
    rec = line_degrees(build_pattern(q, "CS"), n, trials=2, seed=1)
    assert rec.granularity == "full"
    assert rec.values == golden_gf(q).series(n + 1)
    assert rec.check_bounds() == []


def test_spec_examples():
    assert line_degrees(build_pattern(4, "CS"), 3, trials=1).values == [1, 4, 8, 12]
    assert line_degrees(build_pattern(7, "CS"), 2, trials=1).values == [1, 9, 69]


@pytest.mark.parametrize("q", [5, 7, 11])
def test_half_step_degrees_follow_table2(q):
    rec = line_degrees(build_pattern(q, "CS"), 4, trials=1, granularity="half")
    assert rec.values == table2_degrees((q + 1) // 2)


def test_python_backend_matches_flint():
    pat = build_pattern(5, "CS")
    a = line_degrees(pat, 6, trials=1, seed=3, granularity="half", backend="python")
    b = line_degrees(pat, 6, trials=1, seed=3, granularity="half", backend="flint")
    assert a.values == b.values


def test_full_step_is_even_subsequence():
    pat = build_pattern(6, "CS")
    half = line_degrees(pat, 6, trials=1, seed=5, granularity="half")
    full = line_degrees(pat, 3, trials=1, seed=5)
    assert full.values == half.values[::2]


def test_seed_is_reproducible():
    pat = build_pattern(5, "G")
    a = line_degrees(pat, 2, trials=2, seed=9)
    b = line_degrees(pat, 2, trials=2, seed=9)
    assert a.values == b.values and a.meta == b.meta


@pytest.mark.parametrize("kind", ["G", "S", "C", "CS"])
def test_submultiplicative(kind):
    v = line_degrees(build_pattern(5, kind), 3, trials=1).values
    assert all(v[n + 1] <= v[1] * v[n] for n in range(len(v) - 1))


def test_bad_arguments():
    with pytest.raises(ValueError):
        line_degrees(build_pattern(5, "CS"), 0)
    with pytest.raises(ValueError):
        line_degrees(build_pattern(5, "CS"), 2, trials=0)


def rec(values, gran="full"):
    return DegreeRecord("CS", 5, gran, values)


def test_consensus_identical():
    out = degree_consensus([rec([1, 4, 12]), rec([1, 4, 12])])
    assert out.values == [1, 4, 12] and out.flags == []


def test_consensus_restores_deficient_entry():
    out = degree_consensus([rec([1, 4, 12, 25]), rec([1, 4, 12, 24])])
    assert out.values == [1, 4, 12, 25] and out.flags == [3]


def test_consensus_errors():
    with pytest.raises(ValueError):
        degree_consensus([])
    with pytest.raises(ValueError):
        degree_consensus([rec([1, 2]), rec([1, 2], "half")])


def test_bounds_check_flags_violations():
    assert rec([1, 2, 5]).check_bounds() == ["d_2 = 5 exceeds d_1^2"]
    assert rec([2, 3]).check_bounds()
