import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from qshell.scan import q_shell_table
from qshell.shells import (
    MagicSet,
    build_shell_table,
    fmt3,
    gap_at,
    parse_table_csv,
    render_table,
)
from qshell.spectrum import Level, Model, enumerate_levels

PAPER_MAGIC = (2, 8, 20, 34, 40, 58, 92, 138, 198, 254, 268, 338, 440, 556,
               676, 694, 832, 912, 1012, 1100, 1206, 1284, 1314, 1410, 1502)


@pytest.fixture(scope="module")
def table():
    return q_shell_table()


@pytest.fixture(scope="module")
def q_levels():
    return enumerate_levels(Model.Q_EXACT, 22.6, tau=0.038)


def test_rows_reproduce_published_table(table, table1):
    assert len(table.rows) == len(table1)
    for row, ref in zip(table.rows, table1):
        assert (row.n, row.l, row.degeneracy, row.cumulative) == (
            ref["n"], ref["l"], ref["degeneracy"], ref["cumulative"])
        assert row.energy == pytest.approx(ref["energy"], abs=1e-3)


def test_magic_numbers(table):
    assert table.magic.values == PAPER_MAGIC


def test_published_levels_give_same_magic(table1_levels):
    # the 3-decimal published energies on their own also carry the structure
    assert build_shell_table(table1_levels).magic.values == PAPER_MAGIC


def test_first_gaps(table):
    assert gap_at(table, 2) == pytest.approx(1.000, abs=1e-3)
    assert gap_at(table, 8) == pytest.approx(1.006, abs=1e-3)
    assert gap_at(table, 34) == pytest.approx(0.397, abs=1e-3)


@pytest.mark.parametrize("cumulative,gap", [(186, 0.329), (542, 0.325), (18, 0.237)])
def test_gap_at(table, cumulative, gap):
    assert gap_at(table, cumulative) == pytest.approx(gap, abs=1e-3)


def test_gap_at_missing(table):
    with pytest.raises(LookupError):
        gap_at(table, 19)


def test_single_level_has_no_magic():
    t = build_shell_table([Level(0, 0, 0.0)])
    assert t.magic.values == ()
    assert math.isinf(t.rows[0].gap_after)


def test_last_row_never_magic():
    t = build_shell_table([Level(0, 0, 0.0), Level(1, 1, 5.0)], threshold=0.1)
    assert t.magic.values == (2,)


def test_empty_and_bad_threshold():
    with pytest.raises(ValueError):
        build_shell_table([])
    with pytest.raises(ValueError):
        build_shell_table([Level(0, 0, 0.0)], threshold=0.0)


def test_plain_ho_magic():
    t = build_shell_table(enumerate_levels(Model.PLAIN_HO, 7.5), 0.39)
    assert t.magic.values == (2, 8, 20, 40, 70, 112, 168)


def test_cumulative_conservation():
    levels = enumerate_levels(Model.Q_EXACT, 7.5, tau=0.0)
    t = build_shell_table(levels)
    assert t.total == sum(lv.degeneracy for lv in levels)
    assert t.total == sum((n + 1) * (n + 2) for n in range(8))


def test_ties_ordered_by_n_then_l():
    levels = [Level(2, 2, 1.0), Level(1, 1, 1.0), Level(2, 0, 1.0), Level(0, 0, 0.0)]
    t = build_shell_table(levels)
    assert [(r.n, r.l) for r in t.rows] == [(0, 0), (1, 1), (2, 0), (2, 2)]


@settings(max_examples=50, deadline=None)
@given(st.permutations(range(62)))
def test_permutation_invariance(q_levels, perm):
    shuffled = [q_levels[i] for i in perm]
    assert build_shell_table(shuffled) == build_shell_table(q_levels)


@settings(deadline=None)
@given(st.floats(0.01, 1.5), st.floats(0.01, 1.5))
def test_threshold_monotonicity(q_levels, t1, t2):
    lo, hi = sorted((t1, t2))
    m_lo = set(build_shell_table(q_levels, lo).magic.values)
    m_hi = set(build_shell_table(q_levels, hi).magic.values)
    assert m_hi <= m_lo


@settings(deadline=None)
@given(st.floats(0.05, 20.0), st.sampled_from([0.2, 0.3, 0.39, 0.5, 0.7]))
def test_scale_invariance(q_levels, factor, threshold):
    scaled = [Level(lv.n, lv.l, lv.energy * factor) for lv in q_levels]
    base = build_shell_table(q_levels, threshold)
    t = build_shell_table(scaled, threshold * factor)
    assert t.magic == base.magic
    for a, b in zip(t.rows, base.rows):
        if math.isfinite(b.gap_after):
            assert a.gap_after == pytest.approx(b.gap_after * factor, rel=1e-9, abs=1e-12)


def test_magic_set_validation():
    assert MagicSet((2, 8)).sigma(8) == 0
    assert MagicSet((2, 8), (None, 3)).sigma(8) == 3
    for bad in [(8, 2), (2, 2), (0, 2)]:
        with pytest.raises(ValueError):
            MagicSet(bad)
    with pytest.raises(ValueError):
        MagicSet((2, 8), (1,))
    with pytest.raises(ValueError):
        MagicSet((2, 8), (1, -1))


@pytest.mark.parametrize("x,s", [(0.0, "0.000"), (0.0005, "0.001"), (-0.0005, "-0.001"),
                                 (2.0065, "2.007"), (22.5604, "22.560"), (-1e-9, "0.000")])
def test_fmt3_rounds_half_away(x, s):
    assert fmt3(x) == s


def test_render_csv(table):
    text = render_table(table, "csv")
    lines = text.splitlines()
    assert lines[0] == "n,l,energy,degeneracy,cumulative,gap_after,is_magic"
    assert lines[1].startswith("0,0,0.000,2,2,")
    assert lines[2] == "1,1,1.000,6,8,1.006,1"
    assert lines[-1] == "13,3,22.560,14,1516,,0"


def test_csv_round_trip(table):
    parsed = parse_table_csv(render_table(table, "csv"))
    assert len(parsed) == len(table.rows)
    for rec, row in zip(parsed, table.rows):
        assert (rec["n"], rec["l"], rec["degeneracy"], rec["cumulative"]) == (
            row.n, row.l, row.degeneracy, row.cumulative)
        assert rec["energy"] == float(fmt3(row.energy))
        if math.isfinite(row.gap_after):
            assert rec["gap_after"] == float(fmt3(row.gap_after))
        else:
            assert math.isinf(rec["gap_after"])
        assert rec["is_magic"] == table.is_magic(row)
    assert render_table(table, "csv") == render_table(table, "csv")


def test_render_json(table):
    payload = json.loads(render_table(table, "json"))
    assert payload["magic"] == list(PAPER_MAGIC)
    assert len(payload["rows"]) == 62
    assert payload["rows"][0] == {"n": 0, "l": 0, "energy": 0.0, "degeneracy": 2, "cumulative": 2,
                                  "gap_after": payload["rows"][0]["gap_after"], "is_magic": True}
    assert payload["rows"][-1]["gap_after"] is None
    assert payload["rows"][2]["energy"] == table.rows[2].energy


def test_render_markdown(table):
    md = render_table(table, "markdown")
    assert "| 0 | 0 | 0.000 | 2 | **2** |" in md
    assert "| | | 1.000 | | |" in md
    assert "| 2 | 2 | 2.006 | 10 | 18 |" in md
    assert md.count("**") == 2 * 25


def test_render_unknown_format(table):
    with pytest.raises(ValueError):
        render_table(table, "xml")
