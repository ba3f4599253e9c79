import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collspin.ed import full_spectrum
from collspin.io import (
    SCHEMA_VERSION, format_float, read_json_report, read_spectrum_csv, to_jsonable,
    write_json_report, write_spectrum_csv, write_table_csv,
)
from collspin.model import ModelParams
from collspin.steady import steady_state


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_float(x)) == x
    assert math.copysign(1, float(format_float(x))) == math.copysign(1, x)


def test_spectrum_csv_layout_and_round_trip(tmp_path):
    params = ModelParams()
    spec = full_spectrum(params)
    path = tmp_path / "spec.csv"
    write_spectrum_csv(spec, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == "q,re_lambda,im_lambda"
    assert len(lines) == 1226
    q, lam = read_spectrum_csv(path)
    assert np.array_equal(q, spec.q)
    assert np.array_equal(lam.view(np.uint64), spec.eigenvalues.view(np.uint64))
    order = np.lexsort((-lam.real, q))
    assert np.array_equal(order, np.arange(len(q)))


def test_spectrum_csv_has_17_significant_digits(tmp_path):
    spec = full_spectrum(ModelParams(two_s=3))
    path = tmp_path / "s.csv"
    write_spectrum_csv(spec, path)
    row = path.read_text().splitlines()[2].split(",")
    mantissa = row[1].lstrip("-").split("e")[0].replace(".", "").lstrip("0")
    assert len(mantissa) <= 17
    assert float(row[1]) == spec.eigenvalues[1].real


def test_csv_reader_rejects_foreign_files(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_spectrum_csv(path)


def test_json_envelope_and_round_trip(tmp_path):
    params = ModelParams(p=0.3)
    path = tmp_path / "r.json"
    data = {"gap": 0.25, "lam": 1 - 2j, "inf": math.inf, "arr": np.array([1 + 1j, 2])}
    write_json_report("gap", params, data, path)
    doc = json.loads(path.read_text())
    assert doc["schema"] == SCHEMA_VERSION == 1
    assert doc["command"] == "gap"
    assert doc["params"] == params.as_dict()
    assert doc["data"]["lam"] == {"re": 1.0, "im": -2.0}
    back = read_json_report(path)["data"]
    assert back["lam"] == 1 - 2j and back["inf"] == math.inf
    assert back["arr"] == [1 + 1j, 2 + 0j]


@pytest.mark.parametrize("payload", [
    steady_state(ModelParams(two_s=4)),
    {"t1": 28.3, "t2": 48.6},
    [{"p": 0.1, "mean_sz": -0.5}],
])
def test_reports_round_trip(tmp_path, payload):
    path = tmp_path / "x.json"
    write_json_report("steady", ModelParams(), payload, path)
    assert read_json_report(path)["data"] == json.loads(json.dumps(to_jsonable(payload)))


def test_unsupported_schema(tmp_path):
    path = tmp_path / "x.json"
    path.write_text('{"schema": 2, "data": []}')
    with pytest.raises(ValueError):
        read_json_report(path)


def test_unserializable_object():
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_table_csv(tmp_path):
    path = tmp_path / "t.csv"
    write_table_csv(path, ("x", "lambda", "region"), [(0.1, -0.5, "II")])
    assert path.read_text() == "x,lambda,region\n0.10000000000000001,-0.5,II\n"
