import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homogenizer.config import ConfigError, from_dict, parse_config, serialize
from homogenizer.dynamics import ScheduleKind


def test_defaults_are_filled():
    cfg = parse_config('{"experiment": "converge"}')
    assert cfg.init.kind.value == "product" and cfg.init.n_qubits == 4
    assert cfg.init.xi == (0.5, 0.0, 0.5)
    assert cfg.n_steps == 50 and cfg.n_trajectories == 100
    assert cfg.eta.kind is ScheduleKind.UNIFORM
    assert parse_config("{}", "gap-curve").init.kind.value == "bell"
    assert parse_config("{}", "regimes").grid == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_alpha_out_of_range_names_field():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"experiment": "gap-curve", "init": {"kind": "perturbed_ghz", "alpha": 1.5}}')
    assert exc.value.field == "init.alpha"
    assert "init.alpha" in str(exc.value)


@pytest.mark.parametrize("text, field", [
    ('{"experiment": "converge", "colour": 1}', "colour"),
    ('{"experiment": "converge", "init": {"kind": "product", "size": 3}}', "init.size"),
    ('{"experiment": "converge", "eta": {"kind": "fixed", "lo": 0.1}}', "eta.lo"),
    ('{"experiment": "converge", "init": {"kind": "plasma"}}', "init.kind"),
    ('{"experiment": "converge", "seed": -1}', "seed"),
    ('{"experiment": "converge", "seed": 1.5}', "seed"),
    ('{"experiment": "converge", "n_steps": true}', "n_steps"),
    ('{"experiment": "converge", "system": [1, 1, 0]}', "system"),
    ('{"experiment": "gap-curve", "grid": [0.3, 0.2]}', "grid"),
    ('{"experiment": "gap-curve", "init": {"kind": "bell", "n_qubits": 2}}', "init.n_qubits"),
    ('{"experiment": "teleport"}', "experiment"),
    ('{}', "experiment"),
])
def test_rejections_name_the_field(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_invalid_reservoir_combination_is_config_error():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"experiment": "crossing", "init": {"kind": "x_error_ghz", "site": 7}}')
    assert exc.value.field == "init"


def test_json_syntax_error_reports_line():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config('{"experiment": "converge",\n "seed": }')


def test_experiment_mismatch():
    with pytest.raises(ConfigError):
        parse_config('{"experiment": "converge"}', "regimes")


_init = st.one_of(
    st.fixed_dictionaries({"kind": st.just("ghz"), "n_qubits": st.integers(3, 6)}),
    st.fixed_dictionaries({"kind": st.just("perturbed_ghz"), "alpha": st.floats(0, 1)}),
    st.fixed_dictionaries({"kind": st.just("x_error_ghz"), "site": st.integers(1, 3)}),
    st.fixed_dictionaries({"kind": st.just("bell"), "bell_pair": st.sampled_from([[1, 2], [2, 3], [1, 3]])}),
    st.just({"kind": "asym_ghz"}),
)
_eta = st.one_of(
    st.fixed_dictionaries({"kind": st.just("fixed"), "value": st.floats(0, np.pi / 2)}),
    st.fixed_dictionaries({"kind": st.just("uniform"), "lo": st.floats(0, 0.7), "hi": st.floats(0.8, np.pi / 2)}),
    st.fixed_dictionaries({"kind": st.just("gaussian"), "mean": st.floats(0, np.pi / 2), "std": st.floats(0, 1)}),
)


@given(st.fixed_dictionaries({
    "experiment": st.sampled_from(["gap-curve", "crossing"]),
    "init": _init,
    "eta": _eta,
    "seed": st.integers(0, 2**64 - 1),
    "grid_points": st.integers(2, 200),
}))
@settings(max_examples=100, deadline=None)
def test_round_trip(d):
    cfg = from_dict(d)
    text = serialize(cfg)
    again = parse_config(text)
    assert again == cfg
    assert serialize(again) == text
    assert json.loads(text)["seed"] == d["seed"]
