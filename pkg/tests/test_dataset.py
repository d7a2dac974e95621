import numpy as np
import pytest

from smi.dataset import (
    DataMatrix,
    Direction,
    IndicatorRegistry,
    IndicatorSpec,
    load_gini,
    load_indicator_metadata,
    load_observations,
    validate_matrix,
    write_observations,
)
from smi.errors import InputError

META = """\
indicator_id,name,pillar,direction
le,Life expectancy,Health,positive
abr,Adolescent birth rate,Health,negative
mys,Mean schooling years,Education Access,positive
"""

OBS = """\
state,le,abr,mys
Alpha,70.1,30.0,6.2
Beta,65.4,45.5,4.8
Gamma,72.9,22.1,7.5
Delta,68.0,38.2,5.1
"""


@pytest.fixture
def meta_file(tmp_path):
    path = tmp_path / "indicators.csv"
    path.write_text(META, encoding="utf-8")
    return path


@pytest.fixture
def small_registry(meta_file):
    return load_indicator_metadata(meta_file)


@pytest.fixture
def obs_file(tmp_path):
    path = tmp_path / "observations.csv"
    path.write_text(OBS, encoding="utf-8")
    return path


def test_metadata_happy_path(small_registry):
    assert len(small_registry) == 3
    assert small_registry.ids == ("le", "abr", "mys")
    assert small_registry.directions == (
        Direction.POSITIVE, Direction.NEGATIVE, Direction.POSITIVE)
    assert small_registry[1].pillar == "Health"
    assert small_registry[2].name == "Mean schooling years"


def test_metadata_direction_parse_is_case_insensitive(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("indicator_id,name,pillar,direction\nx,X,Health,Positive\ny,Y,Health,NEGATIVE\n",
                    encoding="utf-8")
    registry = load_indicator_metadata(path)
    assert registry.directions == (Direction.POSITIVE, Direction.NEGATIVE)


def test_metadata_collects_every_problem(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(
        "indicator_id,name,pillar,direction\n"
        "a,A,Health,positive\n"
        "a,A again,Health,positive\n"
        ",No id,Health,positive\n"
        "b,B,Nonsense Pillar,positive\n"
        "c,C,Health,sideways\n"
        "d,D,Health\n",
        encoding="utf-8")
    with pytest.raises(InputError) as exc:
        load_indicator_metadata(path)
    messages = exc.value.errors
    assert len(messages) == 5
    assert "row 3: duplicate indicator id 'a' (first seen at row 2)" in messages
    assert "row 4: empty indicator id" in messages
    assert any("row 5: unknown pillar" in m for m in messages)
    assert any("row 6" in m and "sideways" in m for m in messages)
    assert "row 7: expected 4 fields, got 3" in messages


def test_metadata_rejects_bad_header(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("id,name,pillar,direction\nx,X,Health,positive\n", encoding="utf-8")
    with pytest.raises(InputError, match="header"):
        load_indicator_metadata(path)


def test_metadata_missing_file():
    with pytest.raises(InputError, match="file not found"):
        load_indicator_metadata("/nonexistent/indicators.csv")


def test_registry_rejects_duplicate_ids():
    spec = IndicatorSpec(id="x", name="X", pillar="Health", direction=Direction.POSITIVE)
    with pytest.raises(ValueError, match="duplicate"):
        IndicatorRegistry(specs=(spec, spec))


def test_observations_happy_path(obs_file, small_registry):
    matrix = load_observations(obs_file, small_registry)
    assert matrix.states == ("Alpha", "Beta", "Gamma", "Delta")
    assert matrix.n_states == 4 and matrix.n_indicators == 3
    assert matrix.values[2, 0] == pytest.approx(72.9)
    assert matrix.values.dtype == np.float64


def test_observations_header_must_match_registry_order(tmp_path, small_registry):
    path = tmp_path / "obs.csv"
    path.write_text("state,abr,le,mys\nA,1,2,3\nB,4,5,6\nC,7,8,9\n", encoding="utf-8")
    with pytest.raises(InputError, match="not in registry order"):
        load_observations(path, small_registry)


def test_observations_reports_missing_and_extra_columns(tmp_path, small_registry):
    path = tmp_path / "obs.csv"
    path.write_text("state,le,mys,bogus\nA,1,2,3\n", encoding="utf-8")
    with pytest.raises(InputError) as exc:
        load_observations(path, small_registry)
    joined = "; ".join(exc.value.errors)
    assert "missing indicator columns: abr" in joined
    assert "unexpected columns: bogus" in joined


def test_observations_cell_problems_name_state_and_indicator(tmp_path, small_registry):
    path = tmp_path / "obs.csv"
    path.write_text(
        "state,le,abr,mys\n"
        "Alpha,70,30,6\n"
        "Beta,oops,45,inf\n"
        "Alpha,70,30,6\n"
        ",1,2,3\n",
        encoding="utf-8")
    with pytest.raises(InputError) as exc:
        load_observations(path, small_registry)
    messages = exc.value.errors
    assert "row 3: non-numeric value 'oops' for (Beta, le)" in messages
    assert "row 3: non-finite value 'inf' for (Beta, mys)" in messages
    assert "row 4: duplicate state 'Alpha' (first seen at row 2)" in messages
    assert "row 5: empty state name" in messages


def test_observations_need_three_states(tmp_path, small_registry):
    path = tmp_path / "obs.csv"
    path.write_text("state,le,abr,mys\nA,1,2,3\nB,4,5,6\n", encoding="utf-8")
    with pytest.raises(InputError, match="need at least 3"):
        load_observations(path, small_registry)


def test_data_matrix_invariants(small_registry):
    with pytest.raises(ValueError, match="finite"):
        DataMatrix(states=("A", "B"), values=np.array([[1.0, 2.0, np.nan]] * 2),
                   registry=small_registry)
    with pytest.raises(ValueError, match="state labels"):
        DataMatrix(states=("A", "B"), values=np.ones((3, 3)), registry=small_registry)


def test_gini_happy_and_empty(tmp_path):
    path = tmp_path / "gini.csv"
    path.write_text("state,gini\nAlpha,0.25\nBeta,0.31\n", encoding="utf-8")
    assert load_gini(path) == {"Alpha": 0.25, "Beta": 0.31}
    header_only = tmp_path / "empty.csv"
    header_only.write_text("state,gini\n", encoding="utf-8")
    assert load_gini(header_only) == {}


def test_gini_problems_collected(tmp_path):
    path = tmp_path / "gini.csv"
    path.write_text("state,gini\nAlpha,0.25\nAlpha,0.30\nBeta,1.5\nGamma,abc\n",
                    encoding="utf-8")
    with pytest.raises(InputError) as exc:
        load_gini(path)
    messages = exc.value.errors
    assert len(messages) == 3
    assert "row 3: duplicate state 'Alpha' (first seen at row 2)" in messages
    assert "row 4: gini 1.5 for Beta outside [0, 1]" in messages
    assert "row 5: non-numeric gini 'abc' for Gamma" in messages


def test_validate_matrix_flags_constant_columns(small_registry):
    values = np.array([
        [1.0, 5.0, 2.0],
        [2.0, 5.0, 3.0],
        [3.0, 5.0, 4.0],
    ])
    matrix = DataMatrix(states=("A", "B", "C"), values=values, registry=small_registry)
    report = validate_matrix(matrix)
    assert report.fatal_ids == ["abr"]
    assert not report.ok
    by_id = {c.indicator_id: c for c in report.columns}
    assert by_id["le"].min == 1.0 and by_id["le"].max == 3.0 and not by_id["le"].constant
    assert by_id["abr"].constant


def test_write_observations_full_precision_round_trips(tmp_path, obs_file, small_registry):
    matrix = load_observations(obs_file, small_registry)
    out = tmp_path / "copy.csv"
    write_observations(matrix, out)
    again = load_observations(out, small_registry)
    assert again.states == matrix.states
    assert np.array_equal(again.values, matrix.values)


def test_write_observations_fixed_point(tmp_path, obs_file, small_registry):
    matrix = load_observations(obs_file, small_registry)
    out = tmp_path / "rounded.csv"
    write_observations(matrix, out, decimals=2)
    assert "70.10" in out.read_text(encoding="utf-8")


def test_loaded_fixture_shapes(registry, observations_path, gini_path):
    assert len(registry) == 31
    matrix = load_observations(observations_path, registry)
    assert matrix.n_states == 22
    gini = load_gini(gini_path)
    assert len(gini) == 20
    assert set(gini) <= set(matrix.states)
