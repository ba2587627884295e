import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robdea.dataset import Dataset, DatasetError, DmuRecord, IntervalDataset
from robdea.io import (
    BUNDLED,
    CsvFormatError,
    JsonFormatError,
    bundled,
    load_dataset,
    parse_dataset,
    parse_json_dataset,
    serialize_dataset,
)

TABLE1_CSV = """id,i:doctors,i:nurses,o:outpatients,o:inpatients
A,20,151,100,90
B,19,131,150,50
C,25,160,160,55
D,27,168,180,72
E,22,158,94,66
F,55,255,230,90
G,33,235,220,88
H,31,206,152,80
I,30,244,190,100
J,50,268,250,100
K,53,306,260,147
L,38,284,250,120
"""

# interval data with the output columns first
TABLE2_CSV = """id,o:Y1:lo,o:Y1:hi,o:Y2:lo,o:Y2:hi,i:X1
A,0.8,1.2,7.50,8.50,1
B,1.8,2.2,2.50,3.50,1
C,1.6,2.4,5.75,6.25,1
D,2.5,3.5,2.75,3.25,1
E,2.8,3.2,6.75,7.25,1
F,3.8,4.2,1.83,2.17,1
G,3.4,4.6,4.50,5.50,1
H,4.7,5.3,1.50,2.50,1
I,5.6,6.4,1.67,2.33,1
J,6.7,7.3,0.75,1.25,1
"""


class TestParse:
    def test_table1(self, hospitals):
        ds = parse_dataset(TABLE1_CSV)
        assert (ds.m, ds.input_dim, ds.output_dim) == (12, 2, 2)
        assert ds.input_names == ("doctors", "nurses")
        assert ds == hospitals

    def test_table2_is_interval(self, interval_data):
        data = parse_dataset(TABLE2_CSV)
        assert isinstance(data, IntervalDataset)
        assert data.m == 10
        assert data.lower.Y[0].tolist() == [0.8, 7.5]
        assert data.upper.Y[0].tolist() == [1.2, 8.5]
        assert data.lower.X[:, 0].tolist() == [1.0] * 10
        assert data == interval_data

    def test_point_columns_promoted(self):
        data = parse_dataset("id,i:x,o:y:lo,o:y:hi\nA,2,1,3\nB,1,2,2\n")
        assert isinstance(data, IntervalDataset)
        assert data.lower.X.tolist() == data.upper.X.tolist() == [[2.0], [1.0]]

    def test_blank_lines_and_whitespace(self):
        ds = parse_dataset("id, i:x , o:y\n\n A ,1,2\n\n")
        assert ds.ids == ("A",) and ds.input_names == ("x",)

    @pytest.mark.parametrize("text, row, column, fragment", [
        ("id,i:x,o:y:lo\nA,1,2\n", 1, "o:y", "':hi'"),
        ("id,i:x,o:y\nA,1,-2\n", 2, "o:y", "negative"),
        ("id,i:x,o:y\nA,1,2\nB,x1,2\n", 3, "i:x", "non-numeric"),
        ("id,i:x,o:y\nA,1,2\nA,2,3\n", 3, "id", "duplicate id"),
        ("id,i:x,o:y\nA,1,2\nB,1,0\n", 3, None, "outputs zero"),
        ("id,i:x,o:y\nA,1,nan\n", 2, "o:y", "non-finite"),
        ("id,i:x,o:y:lo,o:y:hi\nA,1,3,2\n", 2, "o:y", "exceeds"),
        ("name,i:x,o:y\nA,1,2\n", 1, "name", "'id'"),
        ("id,x,o:y\nA,1,2\n", 1, "x", "expected"),
        ("id,i:x,o:y\nA,1\n", 2, None, "expected 3 cells"),
        ("id,i:x,i:x,o:y\nA,1,1,2\n", 1, "i:x", "duplicate"),
        ("id,i:x\nA,1\n", 1, None, "at least one input and one output"),
    ])
    def test_errors_carry_coordinates(self, text, row, column, fragment):
        with pytest.raises(CsvFormatError) as info:
            parse_dataset(text)
        assert info.value.row == row
        assert info.value.column == column
        assert fragment in str(info.value)

    def test_error_is_a_dataset_error(self):
        with pytest.raises(DatasetError):
            parse_dataset("")


class TestRoundTrip:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled(self, name):
        data = bundled(name)
        assert parse_dataset(serialize_dataset(data)) == data

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.tuples(st.floats(1e-300, 1e300), st.floats(0, 1e300), st.floats(1e-300, 1e300)),
                    min_size=1, max_size=6))
    def test_full_precision(self, rows):
        X = np.array([[a, b] for a, b, _ in rows])
        Y = np.array([[c] for _, _, c in rows])
        ds = Dataset.from_arrays([f"u{k}" for k in range(len(rows))], X, Y)
        back = parse_dataset(serialize_dataset(ds))
        assert back == ds
        assert back.X.tobytes() == ds.X.tobytes()

    def test_interval(self, interval_data):
        text = serialize_dataset(interval_data)
        assert text.splitlines()[0] == "id,i:X1:lo,i:X1:hi,o:Y1:lo,o:Y1:hi,o:Y2:lo,o:Y2:hi"
        assert parse_dataset(text) == interval_data


class TestJson:
    def test_point_and_interval(self):
        doc = {"inputs": ["x"], "outputs": ["y1", "y2"],
               "dmus": [{"id": "A", "inputs": [1], "outputs": [2, [3, 4]]},
                        {"id": "B", "inputs": [2.5], "outputs": [1, 1]}]}
        data = parse_json_dataset(json.dumps(doc))
        assert isinstance(data, IntervalDataset)
        assert data.upper.Y[0].tolist() == [2, 4]
        doc["dmus"][0]["outputs"] = [2, 3]
        assert isinstance(parse_json_dataset(json.dumps(doc)), Dataset)

    @pytest.mark.parametrize("doc, where", [
        ({"inputs": ["x"], "outputs": ["y"], "dmus": [{"id": "A", "inputs": [1], "outputs": [-1]}]},
         "dmus[0].outputs[0]"),
        ({"inputs": ["x"], "outputs": ["y"], "dmus": [{"id": "A", "inputs": [1, 2], "outputs": [1]}]},
         "dmus[0].inputs"),
        ({"inputs": [], "outputs": ["y"], "dmus": []}, "inputs"),
        ({"inputs": ["x"], "outputs": ["y"], "dmus": [{"id": "A", "inputs": [1], "outputs": [1]},
                                                      {"id": "A", "inputs": [1], "outputs": [1]}]}, "dmus[1]"),
    ])
    def test_errors(self, doc, where):
        with pytest.raises(JsonFormatError) as info:
            parse_json_dataset(json.dumps(doc))
        assert info.value.where == where

    def test_load_by_suffix(self, tmp_path, hospitals):
        doc = {"inputs": list(hospitals.input_names), "outputs": list(hospitals.output_names),
               "dmus": [{"id": i, "inputs": x.tolist(), "outputs": y.tolist()}
                        for i, x, y in zip(hospitals.ids, hospitals.X, hospitals.Y)]}
        path = tmp_path / "h.json"
        path.write_text(json.dumps(doc))
        assert load_dataset(path) == hospitals
        csv_path = tmp_path / "h.csv"
        csv_path.write_text(TABLE1_CSV)
        assert load_dataset(csv_path) == hospitals


class TestDataset:
    def test_records_and_arrays_agree(self, hospitals):
        rebuilt = Dataset(hospitals.dmus, hospitals.input_names, hospitals.output_names)
        assert rebuilt == hospitals
        assert hospitals.index("C") == 2
        with pytest.raises(KeyError):
            hospitals.index("Z")
        with pytest.raises(IndexError):
            hospitals.check_index(12)

    def test_read_only(self, hospitals):
        with pytest.raises(ValueError):
            hospitals.X[0, 0] = 1

    @pytest.mark.parametrize("x, y", [((0.0,), (1.0,)), ((1.0,), (0.0, 0.0)), ((-1.0,), (1.0,)),
                                      ((np.inf,), (1.0,))])
    def test_record_validation(self, x, y):
        with pytest.raises(DatasetError):
            DmuRecord("A", x, y)

    def test_shape_and_id_checks(self):
        with pytest.raises(DatasetError):
            Dataset([DmuRecord("A", (1,), (1,)), DmuRecord("B", (1, 2), (1,))])
        with pytest.raises(DatasetError):
            Dataset.from_arrays(["A", "A"], [[1], [1]], [[1], [1]])
        with pytest.raises(DatasetError):
            Dataset([])

    def test_interval_cases(self, interval_data):
        best, worst = interval_data.best_case(0), interval_data.worst_case(0)
        assert best.Y[0].tolist() == [1.2, 8.5] and best.Y[1].tolist() == [1.8, 2.5]
        assert worst.Y[0].tolist() == [0.8, 7.5] and worst.Y[1].tolist() == [2.2, 3.5]
        with pytest.raises(DatasetError):
            IntervalDataset(interval_data.upper, interval_data.lower)
        point = IntervalDataset.point(interval_data.lower)
        assert point.best_case(3) == point.worst_case(3) == interval_data.lower
