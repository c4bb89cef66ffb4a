import json

import pytest
from hypothesis import given, strategies as st

from qshell.compare import compare, render_report
from qshell.datasets import Entry, ReferenceDataset, experiments, get_dataset, registry
from qshell.scan import q_shell_table
from qshell.shells import MagicSet


@pytest.fixture(autouse=True)
def no_user_data(monkeypatch):
    monkeypatch.delenv("QSHELL_DATA_DIR", raising=False)


@pytest.fixture(scope="module")
def prediction():
    return q_shell_table().magic


def ds(values, sigmas=None, ds_id="t"):
    sigmas = sigmas or [None] * len(values)
    return ReferenceDataset(ds_id, "experiment", "", tuple(Entry(v, s) for v, s in zip(values, sigmas)))


def test_prefix_subset():
    r = compare(MagicSet((2, 8, 20)), [get_dataset("knight")])
    assert len(r.matches) == 3
    assert [m.observed for m in r.misses] == [40, 58, 92]
    assert r.spurious == ()


@pytest.mark.parametrize("mode", ["strict", "row"])
def test_uncertainty_window(mode):
    r = compare([694], [get_dataset("martin")], mode=mode)
    assert [(m.predicted, m.observed) for m in r.matches] == [(694, 700)]


def test_1012_strict_vs_row():
    refs = [get_dataset("martin"), get_dataset("brechignac"), get_dataset("pedersen")]
    assert compare([1012], refs, mode="strict").spurious == (1012,)
    row = compare([1012], refs, mode="row")
    assert row.spurious == ()
    assert sorted((m.observed, m.dataset) for m in row.matches) == [
        (970, "pedersen"), (1025, "brechignac"), (1040, "martin")]


def test_strict_slack():
    assert compare([1012], [get_dataset("brechignac")], slack=13).spurious == ()
    assert compare([1012], [get_dataset("brechignac")], slack=12).spurious == (1012,)


def test_strict_tie_goes_to_smaller_observed():
    r = compare([10], [ds([8, 12])], slack=2)
    assert [m.observed for m in r.matches] == [8]
    assert [x.observed for x in r.misses] == [12]


def test_strict_is_one_to_one():
    r = compare([90, 92], [ds([91])], slack=1)
    assert [(m.predicted, m.observed) for m in r.matches] == [(90, 91)]
    assert r.spurious == (92,)


def test_row_mode_groups_rows():
    r = compare([20, 92], [get_dataset("martin")], mode="row")
    assert [m.observed for m in r.matches_for(92)] == [90, 92]
    # 18 is 10% away from 20: kept as its own row
    assert 18 in [x.observed for x in r.misses]


def test_no_spurious_against_experiments(prediction):
    r = compare(prediction, experiments(), mode="row")
    assert r.spurious == ()
    assert [(x.observed, x.dataset) for x in r.misses] == [(18, "martin")]


def test_strict_leaves_some_predictions_unsupported(prediction):
    r = compare(prediction, experiments(), mode="strict")
    assert 676 in r.spurious and 1012 in r.spurious


@pytest.mark.parametrize("mode", ["strict", "row"])
def test_conservation(prediction, mode):
    for refs in ([get_dataset("knight")], experiments(), registry()):
        r = compare(prediction, refs, mode=mode)
        assert len(r.supported) + len(r.spurious) == len(prediction)
        assert not set(r.supported) & set(r.spurious)


@pytest.mark.parametrize("mode", ["strict", "row"])
def test_reference_order_irrelevant(prediction, mode):
    refs = experiments()
    a = compare(prediction, refs, mode=mode)
    b = compare(prediction, refs[::-1], mode=mode)
    assert (a.matches, a.misses, a.spurious) == (b.matches, b.misses, b.spurious)


@pytest.mark.parametrize("mode", ["strict", "row"])
def test_idempotence(mode):
    for d in registry():
        r = compare(d.magic, [d], mode=mode)
        assert len(r.matches) == len(d.entries)
        assert r.misses == () and r.spurious == ()


@given(st.sets(st.integers(1, 1600), min_size=1, max_size=40), st.sampled_from(["strict", "row"]))
def test_matches_within_tolerance(values, mode):
    pred = sorted(values)
    refs = experiments()
    r = compare(pred, refs, mode=mode)
    assert len(r.supported) + len(r.spurious) == len(pred)
    if mode == "strict":
        for m in r.matches:
            assert abs(m.predicted - m.observed) <= (m.sigma or 0)


def test_validation():
    with pytest.raises(ValueError):
        compare([], experiments())
    with pytest.raises(ValueError):
        compare([2], [])
    with pytest.raises(ValueError):
        compare([2], experiments(), mode="fuzzy")


def test_render(prediction):
    r = compare(prediction, experiments(), mode="row")
    md = render_report(r)
    assert md.splitlines()[0] == "| predicted | martin | bjornholm | knight | pedersen | brechignac |"
    assert "| 694 | 700±15 |  |  |  | 695 |" in md
    assert "| 92 | 90,92 | 92 | 92 | 92 | 93 |" in md
    assert "spurious: none" in md
    payload = json.loads(render_report(r, "json"))
    assert payload["spurious"] == [] and payload["mode"] == "row"
    assert len(payload["matches"]) == len(r.matches)
    csv_text = render_report(r, "csv")
    assert csv_text.splitlines()[0] == "status,predicted,observed,sigma,dataset"
    assert sum(1 for line in csv_text.splitlines() if line.startswith("match,")) == len(r.matches)
    with pytest.raises(ValueError):
        render_report(r, "xml")


def test_render_marks_weak_entries():
    r = compare([20, 40], [get_dataset("jellium-martin")], mode="row")
    assert "(20)" in render_report(r)
