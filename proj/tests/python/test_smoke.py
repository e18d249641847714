"""Smoke tests for the Python bindings."""

import math

import pytest

import recbias


def test_injection_schedule_anchors():
    assert recbias.assigned_year(100, 100) == 2025
    assert recbias.assigned_year(99, 100) == 2024
    assert recbias.assigned_year(1, 100) == 1926
    years = recbias.injected_years(5)
    assert years == [2021, 2022, 2023, 2024, 2025]
    with pytest.raises(ValueError):
        recbias.assigned_year(0, 10)


def test_date_prefix_rendering():
    assert recbias.render_date_prefix(1926) == "Published on 1926/01/01. "
    assert recbias.render_date_prefix(2025, "Published on: {DATE}. ") == "Published on: 2025/01/01. "


def test_prompt_templates():
    system, user = recbias.build_listwise_prompt("test", ["first passage", "second passage"])
    assert system.startswith("You are RankLLM")
    assert "I will provide you with 2 passages" in user
    assert "Search Query: test" in user
    assert "[1] first passage" in user

    system, user = recbias.build_pairwise_prompt("q", "text a", "text b")
    assert system.startswith("You are an expert relevance assessor")
    assert "Passage A: text a" in user
    assert user.index("Passage A:") < user.index("Passage B:")


def test_parse_ranking_repair_and_strict():
    assert recbias.parse_ranking("[4] > [2] > [1] > [3]", 4) == [4, 2, 1, 3]
    assert recbias.parse_ranking("[2] > [2] > [5]", 4, "repair") == [2, 1, 3, 4]
    with pytest.raises(ValueError):
        recbias.parse_ranking("[1] > [3]", 4, "strict")
    assert recbias.render_ranking([3, 1, 2]) == "[3] > [1] > [2]"


def test_parse_preference():
    assert recbias.parse_preference("B", "strict") == "B"
    assert recbias.parse_preference("Answer: A.", "repair") == "A"
    with pytest.raises(ValueError):
        recbias.parse_preference("", "repair")


def test_metrics_closed_forms():
    before = [f"p{i}" for i in range(1, 101)]
    after = list(reversed(before))
    assert recbias.aars(before, after) == 50.0
    assert recbias.alrs(before, after) == 99
    assert recbias.kendall_tau(before, after) == -1.0
    assert recbias.kendall_tau(before, before) == 1.0
    assert recbias.year_shift_topk(before, after, 10) == 90.0
    groups = recbias.year_shift_groups(before, after)
    assert groups == [90, 70, 50, 30, 10, -10, -30, -50, -70, -90]
    # whole-list year mean is conserved
    assert recbias.year_shift_topk(before, after, 100) == 0.0


def test_rank_shifts_small_example():
    shifts = dict(recbias.rank_shifts(["a", "b", "c"], ["c", "a", "b"]))
    assert shifts == {"a": 1, "b": 1, "c": -2}


def test_t_test_reference_values():
    t, p, df = recbias.t_test_one_sample([1, 2, 3, 4, 5])
    assert math.isclose(t, 4.242640687119285, rel_tol=1e-12)
    assert df == 4
    assert math.isclose(p, 0.013235599563682695, rel_tol=1e-6)
    with pytest.raises(ValueError):
        recbias.t_test_one_sample([2.0, 2.0, 2.0])
