import json

import numpy as np
import pytest

from pyqsense.common import (
    TWOPI,
    format_float,
    hz_to_rad,
    rad_to_hz,
    table_csv,
    table_json,
    task_rng,
    write_atomic,
)


class TestUnits(object):
    def test_conversions(self):
        assert hz_to_rad(1.0) == TWOPI
        assert rad_to_hz(hz_to_rad(2.87e9)) == pytest.approx(2.87e9)

    def test_format_float(self):
        for x in (0.1, 1.0 / 3.0, 2.87e9, -1e-300):
            assert float(format_float(x)) == x


class TestTaskRng(object):
    def test_reproducible(self):
        assert np.array_equal(task_rng(7, 3, 0).random(5), task_rng(7, 3, 0).random(5))

    def test_streams_differ(self):
        a = task_rng(7, 3, 0).random(5)
        assert not np.array_equal(a, task_rng(7, 3, 1).random(5))
        assert not np.array_equal(a, task_rng(7, 4, 0).random(5))
        assert not np.array_equal(a, task_rng(8, 3, 0).random(5))


class TestFiles(object):
    def test_write_atomic(self, tmp_path):
        dest = write_atomic(tmp_path / "out.csv", "a\n1\n")
        assert dest.read_text() == "a\n1\n"
        write_atomic(dest, "b\n")
        assert dest.read_text() == "b\n"
        assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]

    def test_table_csv(self):
        text = table_csv(["tau_s", "p"], np.array([[1e-6, 0.5], [2e-6, 1.0]]))
        assert text.splitlines() == ["tau_s,p", "9.9999999999999995e-07,0.5", "1.9999999999999999e-06,1"]

    def test_table_json(self):
        doc = json.loads(table_json(["x", "y"], [[1.0, 2.0], [3.0, 4.0]], config={"seed": 1}, notes=["n"]))
        assert doc["config"] == {"seed": 1}
        assert doc["columns"] == {"x": [1.0, 3.0], "y": [2.0, 4.0]}
        assert doc["notes"] == ["n"]
