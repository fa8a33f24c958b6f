"""Tabular container for the estimators: named numeric columns with an NA mask.

A Frame stores every column name, a float matrix in which NaN marks missing
cells, and stable row identifiers.  Text columns (kept only for labeling) hold
their payload in ``text_values`` and are all-NaN inside the numeric matrix.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

NA_MARKERS = ("", "NA", "NaN")


@dataclass
class Frame:
    column_names: list[str]
    values: np.ndarray  # (n, p) float64, NaN = missing; text columns all-NaN
    kinds: list[str] | None = None  # "numeric" | "text" per column
    row_ids: np.ndarray | None = None
    text_values: dict[str, list] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        n, p = self.values.shape
        if len(self.column_names) != p:
            raise ValueError("column count mismatch")
        if len(set(self.column_names)) != p:
            raise ValueError("duplicate column names")
        if self.kinds is None:
            self.kinds = ["text" if c in self.text_values else "numeric" for c in self.column_names]
        if len(self.kinds) != p:
            raise ValueError("kinds length mismatch")
        if self.row_ids is None:
            self.row_ids = np.arange(n)
        else:
            self.row_ids = np.asarray(self.row_ids)
            if len(self.row_ids) != n:
                raise ValueError("row_ids length mismatch")
            if len(set(self.row_ids.tolist())) != n:
                raise ValueError("duplicate row ids")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def mask(self) -> np.ndarray:
        """Boolean (n, p) matrix, True where a cell is missing."""
        return np.isnan(self.values)

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise KeyError(f"no column named {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_index(name)]

    def kind(self, name: str) -> str:
        return self.kinds[self.column_index(name)]

    def numeric_columns(self) -> list[str]:
        return [c for c, k in zip(self.column_names, self.kinds) if k == "numeric"]

    def numeric_matrix(self, columns: list[str] | None = None) -> tuple[list[str], np.ndarray]:
        """Return (names, values) for the requested (default: all) numeric columns."""
        names = columns if columns is not None else self.numeric_columns()
        for c in names:
            if self.kind(c) != "numeric":
                raise ValueError(f"column {c!r} is not numeric")
        idx = [self.column_index(c) for c in names]
        return names, self.values[:, idx]

    def select(self, columns: list[str] | None = None, rows: np.ndarray | None = None) -> "Frame":
        """Subset by column names and/or a boolean or index row selector."""
        columns = list(self.column_names) if columns is None else list(columns)
        cidx = [self.column_index(c) for c in columns]
        if rows is None:
            ridx = np.arange(self.n_rows)
        else:
            rows = np.asarray(rows)
            ridx = np.flatnonzero(rows) if rows.dtype == bool else rows
        text = {}
        for c in columns:
            if c in self.text_values:
                vals = self.text_values[c]
                text[c] = [vals[i] for i in ridx]
        return Frame(
            column_names=columns,
            values=self.values[np.ix_(ridx, cidx)],
            kinds=[self.kinds[i] for i in cidx],
            row_ids=self.row_ids[ridx],
            text_values=text,
        )

    def with_column(self, name: str, values: np.ndarray) -> "Frame":
        """Return a copy with a numeric column appended (or replaced)."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_rows,):
            raise ValueError("column length mismatch")
        if name in self.column_names:
            out = self.select()
            out.values[:, out.column_index(name)] = values
            return out
        return Frame(
            column_names=self.column_names + [name],
            values=np.column_stack([self.values, values]),
            kinds=self.kinds + ["numeric"],
            row_ids=self.row_ids.copy(),
            text_values={k: list(v) for k, v in self.text_values.items()},
        )

    def with_row_ids(self, row_ids) -> "Frame":
        out = self.select()
        out.row_ids = np.asarray(row_ids)
        if len(out.row_ids) != out.n_rows or len(set(out.row_ids.tolist())) != out.n_rows:
            raise ValueError("invalid row ids")
        return out


def _parse_column(raw: list[str], na_markers) -> tuple[str, np.ndarray, list]:
    """Classify a raw string column as numeric or text; return (kind, values, text)."""
    vals = np.full(len(raw), np.nan)
    for i, tok in enumerate(raw):
        tok = tok.strip()
        if tok in na_markers:
            continue
        try:
            vals[i] = float(tok)
        except ValueError:
            return "text", np.full(len(raw), np.nan), [t if t.strip() not in na_markers else None for t in raw]
    return "numeric", vals, []


def read_csv(path, delimiter: str = ",", na_markers=NA_MARKERS, header: bool = True) -> Frame:
    """Read a CSV file into a Frame.

    Columns whose non-missing entries all parse as floats become numeric;
    anything else is kept as a text column.  Ragged rows and duplicate headers
    are rejected.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if not rows:
        raise ValueError("empty file")
    if header:
        names = [c.strip() for c in rows[0]]
        body = rows[1:]
    else:
        names = [f"c{i}" for i in range(len(rows[0]))]
        body = rows
    if len(set(names)) != len(names):
        raise ValueError("duplicate headers")
    p = len(names)
    for i, r in enumerate(body):
        if len(r) != p:
            raise ValueError(f"ragged row {i}")
    columns = [[r[j] for r in body] for j in range(p)]
    values = np.empty((len(body), p))
    kinds = []
    text = {}
    for j, name in enumerate(names):
        kind, vals, payload = _parse_column(columns[j], na_markers)
        kinds.append(kind)
        values[:, j] = vals
        if kind == "text":
            text[name] = payload
    return Frame(column_names=names, values=values, kinds=kinds, text_values=text)


def write_csv(frame: Frame, path, delimiter: str = ",") -> None:
    """Write a Frame as CSV; floats use the shortest exact decimal, NA cells are empty."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(frame.column_names)
        for i in range(frame.n_rows):
            row = []
            for j, name in enumerate(frame.column_names):
                if frame.kinds[j] == "text":
                    cell = frame.text_values[name][i]
                    row.append("" if cell is None else cell)
                else:
                    v = frame.values[i, j]
                    row.append("" if np.isnan(v) else repr(float(v)))
            writer.writerow(row)
