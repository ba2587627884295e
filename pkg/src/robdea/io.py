"""CSV ingestion and serialisation.

Header grammar: first column ``id``; inputs ``i:<name>``, outputs
``o:<name>``; interval columns come in ``i:<name>:lo`` / ``i:<name>:hi``
pairs (same for ``o:``). Any interval column turns the file into an
:class:`~robdea.dataset.IntervalDataset`, with point columns read as
degenerate intervals.

JSON documents carry the same content::

    {"inputs": ["doctors", ...], "outputs": [...],
     "dmus": [{"id": "A", "inputs": [20, 151], "outputs": [100, 90]}, ...]}

where any value may be a ``[lo, hi]`` pair instead of a number.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .dataset import Dataset, DatasetError, IntervalDataset


class CsvFormatError(DatasetError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.row, self.column = row, column


def _parse_header(header):
    if not header or header[0].strip() != "id":
        raise CsvFormatError("first column must be 'id'", row=1, column=header[0] if header else None)
    # (kind, name) -> {"point": col} or {"lo": col, "hi": col}
    columns: dict[tuple[str, str], dict[str, int]] = {}
    order: list[tuple[str, str]] = []
    for pos, raw in enumerate(header[1:], start=1):
        label = raw.strip()
        parts = label.split(":")
        if len(parts) not in (2, 3) or parts[0] not in ("i", "o") or not parts[1]:
            raise CsvFormatError("expected 'i:<name>', 'o:<name>' or '<i|o>:<name>:<lo|hi>'", row=1, column=label)
        key = (parts[0], parts[1])
        slot = "point" if len(parts) == 2 else parts[2]
        if slot not in ("point", "lo", "hi"):
            raise CsvFormatError("interval suffix must be ':lo' or ':hi'", row=1, column=label)
        entry = columns.setdefault(key, {})
        if key not in order:
            order.append(key)
        if slot in entry or ("point" in entry and slot != "point") or (slot == "point" and entry):
            raise CsvFormatError("duplicate or conflicting column", row=1, column=label)
        entry[slot] = pos
    for key, entry in columns.items():
        if "point" not in entry and not ("lo" in entry and "hi" in entry):
            missing = "hi" if "lo" in entry else "lo"
            raise CsvFormatError(f"interval column lacks its ':{missing}' pair", row=1,
                                 column=f"{key[0]}:{key[1]}")
    inputs = [k for k in order if k[0] == "i"]
    outputs = [k for k in order if k[0] == "o"]
    if not inputs or not outputs:
        raise CsvFormatError("need at least one input and one output column", row=1)
    interval = any("point" not in columns[k] for k in order)
    return columns, inputs, outputs, interval


def _cell(rowno, label, text):
    try:
        value = float(text)
    except ValueError:
        raise CsvFormatError(f"non-numeric value {text!r}", row=rowno, column=label) from None
    if not math.isfinite(value):
        raise CsvFormatError(f"non-finite value {text!r}", row=rowno, column=label)
    if value < 0:
        raise CsvFormatError(f"negative value {text!r}", row=rowno, column=label)
    return value


def parse_dataset(text: str) -> Dataset | IntervalDataset:
    """Parse a CSV document; errors name the offending row (1 = header) and column."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise CsvFormatError("empty document")
    header = rows[0]
    columns, inputs, outputs, interval = _parse_header(header)
    labels = [h.strip() for h in header]
    ids, seen = [], {}
    lo = {"i": [], "o": []}
    hi = {"i": [], "o": []}
    for rowno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvFormatError(f"expected {len(header)} cells, found {len(row)}", row=rowno)
        dmu_id = row[0].strip()
        if not dmu_id:
            raise CsvFormatError("empty id", row=rowno, column="id")
        if dmu_id in seen:
            raise CsvFormatError(f"duplicate id {dmu_id!r} (first on row {seen[dmu_id]})", row=rowno, column="id")
        seen[dmu_id] = rowno
        ids.append(dmu_id)
        for kind, keys in (("i", inputs), ("o", outputs)):
            lows, highs = [], []
            for key in keys:
                entry = columns[key]
                if "point" in entry:
                    v = _cell(rowno, labels[entry["point"]], row[entry["point"]])
                    a = b = v
                else:
                    a = _cell(rowno, labels[entry["lo"]], row[entry["lo"]])
                    b = _cell(rowno, labels[entry["hi"]], row[entry["hi"]])
                    if a > b:
                        raise CsvFormatError(f"lower bound {a} exceeds upper bound {b}", row=rowno,
                                             column=f"{key[0]}:{key[1]}")
                lows.append(a)
                highs.append(b)
            lo[kind].append(lows)
            hi[kind].append(highs)
        for kind, what in (("i", "inputs"), ("o", "outputs")):
            if not any(v > 0 for v in lo[kind][-1]):
                raise CsvFormatError(f"DMU {dmu_id!r} has all {what} zero", row=rowno)
    if not ids:
        raise CsvFormatError("no data rows", row=2)
    in_names = [k[1] for k in inputs]
    out_names = [k[1] for k in outputs]
    lower = Dataset.from_arrays(ids, np.array(lo["i"]), np.array(lo["o"]), in_names, out_names)
    if not interval:
        return lower
    upper = Dataset.from_arrays(ids, np.array(hi["i"]), np.array(hi["o"]), in_names, out_names)
    return IntervalDataset(lower, upper)


def serialize_dataset(data: Dataset | IntervalDataset) -> str:
    """CSV text that :func:`parse_dataset` reads back to an equal object."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if isinstance(data, IntervalDataset):
        lower, upper = data.lower, data.upper
        header = ["id"]
        header += [f"i:{n}:{s}" for n in lower.input_names for s in ("lo", "hi")]
        header += [f"o:{n}:{s}" for n in lower.output_names for s in ("lo", "hi")]
        writer.writerow(header)
        for k, dmu_id in enumerate(lower.ids):
            row = [dmu_id]
            for a, b in zip(lower.X[k], upper.X[k]):
                row += [repr(float(a)), repr(float(b))]
            for a, b in zip(lower.Y[k], upper.Y[k]):
                row += [repr(float(a)), repr(float(b))]
            writer.writerow(row)
    else:
        writer.writerow(["id"] + [f"i:{n}" for n in data.input_names] + [f"o:{n}" for n in data.output_names])
        for k, dmu_id in enumerate(data.ids):
            writer.writerow([dmu_id] + [repr(float(v)) for v in data.X[k]] + [repr(float(v)) for v in data.Y[k]])
    return buf.getvalue()


class JsonFormatError(DatasetError):
    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def _json_names(doc, key):
    names = doc.get(key)
    if not isinstance(names, list) or not names or not all(isinstance(n, str) and n for n in names):
        raise JsonFormatError("expected a non-empty list of names", where=key)
    if len(set(names)) != len(names):
        raise JsonFormatError("duplicate name", where=key)
    return names


def _json_value(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float, list)):
        raise JsonFormatError(f"expected a number or [lo, hi], got {v!r}", where)
    pair = v if isinstance(v, list) else [v, v]
    if len(pair) != 2 or not all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in pair):
        raise JsonFormatError(f"expected a number or [lo, hi], got {v!r}", where)
    lo, hi = float(pair[0]), float(pair[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise JsonFormatError("non-finite value", where)
    if lo < 0:
        raise JsonFormatError(f"negative value {lo!r}", where)
    if lo > hi:
        raise JsonFormatError(f"lower bound {lo} exceeds upper bound {hi}", where)
    return lo, hi, isinstance(v, list)


def parse_json_dataset(text: str) -> Dataset | IntervalDataset:
    """Parse the JSON form; errors name the offending DMU and field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JsonFormatError(f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise JsonFormatError("top level must be an object")
    in_names, out_names = _json_names(doc, "inputs"), _json_names(doc, "outputs")
    dmus = doc.get("dmus")
    if not isinstance(dmus, list) or not dmus:
        raise JsonFormatError("expected a non-empty list", where="dmus")
    ids, interval = [], False
    lo = {"inputs": [], "outputs": []}
    hi = {"inputs": [], "outputs": []}
    for k, rec in enumerate(dmus):
        where = f"dmus[{k}]"
        if not isinstance(rec, dict) or not isinstance(rec.get("id"), str) or not rec["id"].strip():
            raise JsonFormatError("expected an object with a non-empty string id", where)
        dmu_id = rec["id"].strip()
        if dmu_id in ids:
            raise JsonFormatError(f"duplicate id {dmu_id!r}", where)
        ids.append(dmu_id)
        for key, names in (("inputs", in_names), ("outputs", out_names)):
            values = rec.get(key)
            if not isinstance(values, list) or len(values) != len(names):
                raise JsonFormatError(f"expected {len(names)} values", f"{where}.{key}")
            parsed = [_json_value(v, f"{where}.{key}[{j}]") for j, v in enumerate(values)]
            interval |= any(p[2] for p in parsed)
            lo[key].append([p[0] for p in parsed])
            hi[key].append([p[1] for p in parsed])
            if not any(p[0] > 0 for p in parsed):
                raise JsonFormatError(f"DMU {dmu_id!r} has all {key} zero", where)
    lower = Dataset.from_arrays(ids, np.array(lo["inputs"]), np.array(lo["outputs"]), in_names, out_names)
    if not interval:
        return lower
    upper = Dataset.from_arrays(ids, np.array(hi["inputs"]), np.array(hi["outputs"]), in_names, out_names)
    return IntervalDataset(lower, upper)


def load_dataset(path) -> Dataset | IntervalDataset:
    """Read a CSV file, or JSON when the name ends in ``.json``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_json_dataset(text) if path.suffix.lower() == ".json" else parse_dataset(text)


BUNDLED = ("hospitals", "abc", "interval", "bcc")


def bundled(name: str) -> Dataset | IntervalDataset:
    """Example datasets shipped with the package: hospitals, abc, interval, bcc."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled dataset {name!r}; have {BUNDLED}")
    text = resources.files("robdea").joinpath("data", f"{name}.csv").read_text(encoding="utf-8")
    return parse_dataset(text)
