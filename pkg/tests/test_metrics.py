import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from browselab.config import RelevanceVector, preset
from browselab.grid import examine_prob_grid
from browselab.layout import LayoutSpec
from browselab.linear import AttentionProfile, examine_prob_linear
from browselab.metrics import GroupAssignment, err, group_exposure, rbp


def test_rbp_hand_values():
    assert rbp(RelevanceVector((1, 0, 1)), 0.5) == pytest.approx(0.625, abs=1e-12)
    assert rbp(RelevanceVector((0, 0, 0)), 0.5) == 0.0
    assert rbp(RelevanceVector((1,)), 0.5) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("lam", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_rbp_lambda_range(lam):
    with pytest.raises(ValueError):
        rbp(RelevanceVector((1,)), lam)


def test_rbp_graded_needs_flag():
    rel = RelevanceVector((2, 0, 1), g_max=2)
    with pytest.raises(ValueError, match="binarize"):
        rbp(rel, 0.5)
    assert rbp(rel, 0.5, binarize=True) == pytest.approx(0.625, abs=1e-12)


@given(st.floats(0.01, 0.99), st.integers(1, 50))
def test_rbp_all_relevant(lam, n):
    assert rbp(RelevanceVector((1,) * n), lam) == pytest.approx(1 - lam**n, abs=1e-12)


@given(st.floats(0.01, 0.99), st.lists(st.integers(0, 1), min_size=2, max_size=20), st.data())
def test_rbp_promoting_relevant_item_never_hurts(lam, grades, data):
    i = data.draw(st.integers(0, len(grades) - 1))
    j = data.draw(st.integers(0, len(grades) - 1))
    i, j = min(i, j), max(i, j)
    swapped = list(grades)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    before = rbp(RelevanceVector(tuple(grades)), lam)
    after = rbp(RelevanceVector(tuple(swapped)), lam)
    if grades[j] == 1 and grades[i] == 0:
        assert after >= before
    elif grades[i] == 1 and grades[j] == 0:
        assert after <= before


def test_err_hand_values():
    assert err(RelevanceVector((1,))) == pytest.approx(0.5, abs=1e-12)
    assert err(RelevanceVector((1, 1))) == pytest.approx(0.625, abs=1e-12)
    assert err(RelevanceVector((0, 0, 0))) == 0.0


def test_err_graded_reference():
    # grades [3, 4, 2, 2, 1] with g_max = 4, reference value computed by hand:
    # p = [7, 15, 3, 3, 1] / 16
    p = [7 / 16, 15 / 16, 3 / 16, 3 / 16, 1 / 16]
    expected, keep = 0.0, 1.0
    for r, pi in enumerate(p, start=1):
        expected += keep * pi / r
        keep *= 1 - pi
    assert err(RelevanceVector((3, 4, 2, 2, 1), g_max=4)) == pytest.approx(expected, abs=1e-15)


def test_err_grade_outside_map():
    with pytest.raises(ValueError):
        err(RelevanceVector((2,), g_max=2), grade_map=(0.0, 0.5))


@given(st.integers(1, 4), st.data())
def test_err_equals_reciprocal_weighted_selection(g_max, data):
    grades = tuple(data.draw(st.lists(st.integers(0, g_max), min_size=1, max_size=20)))
    rel = RelevanceVector(grades, g_max)
    select = examine_prob_linear(preset("err_default", g_max=g_max), rel).select
    via_profile = sum(s / i for i, s in enumerate(select, start=1))
    assert err(rel) == pytest.approx(via_profile, abs=1e-12)


def _profile(examine):
    examine = np.asarray(examine)
    return AttentionProfile(examine, examine * 0, 0.0, 0.0, 1.0)


def test_group_exposure_examples():
    assert group_exposure(_profile([1.0, 0.8]), GroupAssignment({1: "A", 2: "B"})) == {"A": 1.0, "B": 0.8}
    got = group_exposure(_profile([1.0, 0.8, 0.64]), GroupAssignment.from_labels(["A", "A", "B"]))
    assert got == pytest.approx({"A": 1.8, "B": 0.64}, abs=1e-15)
    one = group_exposure(_profile([1.0, 0.8, 0.64]), GroupAssignment.from_labels(["x"] * 3))
    assert one == pytest.approx({"x": 2.44}, abs=1e-15)


def test_group_exposure_unmapped_rank():
    with pytest.raises(ValueError, match="rank 2"):
        group_exposure(_profile([1.0, 0.8]), GroupAssignment({1: "A"}))
    with pytest.raises(ValueError):
        group_exposure(_profile([1.0]), GroupAssignment({1: "A", 2: "B"}))


@given(st.lists(st.sampled_from("abc"), min_size=9, max_size=9), st.floats(0.05, 0.95), st.floats(0, 0.9))
def test_group_exposure_conserves_mass(labels, lam, gamma):
    from browselab.config import BrowsingConfig, GridBehavior

    config = preset("geometric", lambda_=lam)
    config = BrowsingConfig(config.selection, config.abandon, GridBehavior(gamma))
    profile = examine_prob_grid(config, RelevanceVector((0,) * 9), LayoutSpec.grid(3, 3))
    exposure = group_exposure(profile, GroupAssignment.from_labels(labels))
    assert set(exposure) == set(labels)
    assert math.fsum(exposure.values()) == pytest.approx(math.fsum(profile.examine), abs=1e-12)
