import numpy as np
import pytest

from frullani import DataError, Observation, SurvivalDataset, load_dataset


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_three_rows_one_censored(tmp_path):
    p = _write(tmp_path, "time,status\n1.5,1\n2.0,0\n0.3,1\n")
    ds = load_dataset(p, "time", "status")
    assert len(ds) == 3 and ds.n_events == 2
    assert ds.summary()["censored"] == 1


def test_missing_column_names_candidates(tmp_path):
    p = _write(tmp_path, "duration,delta\n1,1\n")
    with pytest.raises(DataError, match="available: duration, delta"):
        load_dataset(p, "duration", "status")


def test_bad_values(tmp_path):
    with pytest.raises(DataError, match="time must be positive") as exc:
        load_dataset(_write(tmp_path, "time\n1\n-2\n"), "time")
    assert exc.value.row == 2
    with pytest.raises(DataError, match="cannot parse"):
        load_dataset(_write(tmp_path, "time,x\n1,abc\n"), "time", covariate_cols=["x"])
    with pytest.raises(DataError, match="status must be 0 or 1"):
        load_dataset(_write(tmp_path, "time,s\n1,2\n"), "time", "s")
    with pytest.raises(DataError, match="no data rows"):
        load_dataset(_write(tmp_path, "time\n"), "time")


def test_categorical_expansion(tmp_path):
    p = _write(tmp_path, "time,race,x\n1,1,0.5\n2,3,0.1\n3,2,0.2\n4,1,0.3\n")
    ds = load_dataset(p, "time", covariate_cols=["x"], categorical=["race"])
    assert ds.covariate_names == ("x", "race=2", "race=3")
    np.testing.assert_array_equal(ds.covariates[:, 1:], [[0, 0], [0, 1], [1, 0], [0, 0]])
    assert ds.n_events == 4


def test_dataset_validation():
    with pytest.raises(DataError):
        SurvivalDataset(np.array([1.0, 2.0]), np.array([True]))
    with pytest.raises(DataError):
        SurvivalDataset(np.array([1.0, np.nan]), np.array([True, True]))
    with pytest.raises(DataError):
        Observation(0.0)
    ds = SurvivalDataset.from_observations([Observation(1.0, True, (0.2,)), Observation(2.0, False, (0.1,))])
    assert ds.covariate_names == ("z1",)
    assert ds.uncensored().times.tolist() == [1.0]
    assert ds.observations()[1] == Observation(2.0, False, (0.1,))
