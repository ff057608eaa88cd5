import pytest
from hypothesis import given
from hypothesis import strategies as st

from browselab.config import (
    AbandonModel,
    BrowsingConfig,
    ConfigError,
    GridBehavior,
    RelevanceVector,
    RowDecay,
    SelectionMode,
    SelectionModel,
    config_from_dict,
    config_to_dict,
    default_graded_map,
    preset,
    selection_prob,
    validate_config,
)

probs = st.floats(0.0, 1.0)


def test_selection_constant_ignores_relevance():
    assert selection_prob(2, RelevanceVector((1, 0)), SelectionModel.constant(0.3)) == 0.3


def test_selection_binary():
    model = SelectionModel.binary(0.6, 0.1)
    rel = RelevanceVector((1, 0))
    assert selection_prob(1, rel, model) == 0.6
    assert selection_prob(2, rel, model) == 0.1


def test_selection_graded_default_map():
    model = SelectionModel.graded(default_graded_map(1))
    assert selection_prob(1, RelevanceVector((1,), g_max=1), model) == 0.5


def test_selection_errors():
    with pytest.raises(ValueError):
        selection_prob(3, RelevanceVector((1, 0)), SelectionModel.constant(0.3))
    with pytest.raises(ValueError):
        selection_prob(1, RelevanceVector((3,), g_max=3), SelectionModel.graded(default_graded_map(2)))
    with pytest.raises(ValueError):
        RelevanceVector((2,), g_max=1)


def test_default_graded_map_values():
    assert default_graded_map(1) == (0.0, 0.5)
    assert default_graded_map(2) == (0.0, 0.25, 0.75)


@given(st.integers(1, 20))
def test_default_graded_map_shape(g_max):
    m = default_graded_map(g_max)
    assert len(m) == g_max + 1
    assert m[0] == 0.0
    assert all(a < b for a, b in zip(m, m[1:]))
    assert 0.0 <= m[0] and m[-1] < 1.0


@given(st.lists(st.integers(0, 3), min_size=2, max_size=8), st.data())
def test_selection_depends_only_on_own_grade(grades, data):
    model = SelectionModel.graded(default_graded_map(3))
    rank = data.draw(st.integers(1, len(grades)))
    other = list(grades)
    for j in range(len(other)):
        if j != rank - 1:
            other[j] = data.draw(st.integers(0, 3))
    a = selection_prob(rank, RelevanceVector(tuple(grades), 3), model)
    b = selection_prob(rank, RelevanceVector(tuple(other), 3), model)
    assert a == b


@given(probs, st.lists(st.integers(0, 1), min_size=1, max_size=10))
def test_binary_with_equal_psi_is_constant(psi, grades):
    rel = RelevanceVector(tuple(grades))
    for rank in range(1, len(grades) + 1):
        assert selection_prob(rank, rel, SelectionModel.binary(psi, psi)) == selection_prob(
            rank, rel, SelectionModel.constant(psi)
        )


def test_geometric_preset():
    config = preset("geometric", lambda_=0.8)
    assert config.selection.mode is SelectionMode.CONSTANT
    assert config.selection.psi == pytest.approx(0.2, abs=1e-15)
    assert config.abandon == AbandonModel(0.0, 0.0)
    assert config.grid.is_neutral
    assert preset("biega_geometric", lambda_=0.8) == config


def test_extended_cascade_preset_passthrough():
    config = preset("extended_cascade", psi_rel=0.6, psi_nonrel=0.1, alpha=0.1)
    assert config.selection == SelectionModel.binary(0.6, 0.1)
    assert config.abandon == AbandonModel.constant(0.1)


def test_cascade_and_err_presets():
    assert preset("cascade", psi_rel=0.6, psi_nonrel=0.0).abandon == AbandonModel()
    assert preset("err_default", g_max=2).selection.grade_map == (0.0, 0.25, 0.75)


@pytest.mark.parametrize("lam", [1.5, 0.0, 1.0, -0.2])
def test_geometric_rejects_bad_lambda(lam):
    with pytest.raises(ConfigError) as exc:
        preset("geometric", lambda_=lam)
    assert exc.value.violations[0].field == "lambda"
    assert "0.9" in str(exc.value)


def test_preset_errors():
    with pytest.raises(ValueError, match="unknown preset"):
        preset("nosuch")
    with pytest.raises(ValueError, match="needs"):
        preset("cascade", psi_rel=0.5)
    with pytest.raises(ConfigError):
        preset("extended_cascade", psi_rel=0.6, psi_nonrel=0.1, alpha=1.2)


def test_validate_clean_config():
    config = BrowsingConfig(SelectionModel.constant(0.5), AbandonModel.constant(0.2), GridBehavior(0.3))
    assert validate_config(config) == []


def test_validate_negative_alpha_is_hard_error():
    config = BrowsingConfig(SelectionModel.constant(0.5), AbandonModel.constant(-0.1))
    (v,) = validate_config(config)
    assert v.is_error and v.field == "abandon.alpha"


def test_validate_alpha_one_is_hard_error():
    config = BrowsingConfig(SelectionModel.constant(0.5), AbandonModel.constant(1.0))
    assert [v.is_error for v in validate_config(config)] == [True]


def test_validate_beta_outside_table_warns():
    config = BrowsingConfig(SelectionModel.constant(0.5), grid=GridBehavior(row_decay=RowDecay.beta(3.0)))
    (v,) = validate_config(config)
    assert v.severity == "warning" and v.field == "grid.row_decay.beta"
    config = BrowsingConfig(SelectionModel.constant(0.5), grid=GridBehavior(row_decay=RowDecay.beta(0.9)))
    assert validate_config(config)[0].is_error


def test_validate_boundary_values_are_silent():
    config = BrowsingConfig(SelectionModel.binary(1.0, 0.0), AbandonModel.constant(0.0), GridBehavior(0.0))
    assert validate_config(config) == []


def test_validate_warns_outside_published_range():
    config = BrowsingConfig(SelectionModel.constant(0.05))
    (v,) = validate_config(config)
    assert v.severity == "warning"


def test_validate_grade_map_must_be_monotone():
    config = BrowsingConfig(SelectionModel.graded([0.0, 0.6, 0.3]))
    assert any(v.is_error for v in validate_config(config))


def test_validate_rho_and_sigma():
    bad = BrowsingConfig(SelectionModel.constant(0.5), grid=GridBehavior(row_decay=RowDecay.rho(0.0), middle_bias_sigma=-1.0))
    fields = {v.field for v in validate_config(bad) if v.is_error}
    assert fields == {"grid.row_decay.rho", "grid.middle_bias.sigma"}


@pytest.mark.parametrize(
    "config",
    [
        BrowsingConfig(SelectionModel.constant(0.2)),
        BrowsingConfig(SelectionModel.binary(0.6, 0.1), AbandonModel(0.1, 0.3)),
        BrowsingConfig(
            SelectionModel.graded(default_graded_map(3)),
            AbandonModel.constant(0.2),
            GridBehavior(0.3, RowDecay.rho(0.8), 1.5),
        ),
        BrowsingConfig(SelectionModel.constant(0.2), grid=GridBehavior(row_decay=RowDecay.beta(1.2))),
    ],
)
def test_json_round_trip(config):
    assert config_from_dict(config_to_dict(config)) == config


def test_json_form_geometric():
    assert config_to_dict(preset("geometric", lambda_=0.5))["selection"] == {"mode": "constant", "psi": 0.5}
