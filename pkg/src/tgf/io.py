"""Readers and writers for the toolkit's file formats.

* circuit text: see :func:`tgf.circuit.parse_circuit`;
* state file: one ``index re im`` line per nonzero amplitude;
* data table: JSON ``{"b": int, "entries": [...]}`` or CSV with a
  ``# b=<int>`` header and one integer per line;
* state spec: JSON ``{"amplitudes": [[re, im], ...]}``;
* weights: CSV of nonnegative reals (commas or newlines);
* isometry columns: JSON ``{"n": int, "columns": [[[re, im], ...], ...]}``.

Parse problems raise :class:`FileFormatError`; value problems (for example a
negative weight) surface later as ``ValueError`` from the owning module.
"""

from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path
from typing import Mapping

import numpy as np

from .circuit import Circuit, CircuitFormatError, parse_circuit
from .lookup import DataTable
from .simulator import SparseState
from .stateprep import StateSpec
from .unitarysynth import IsometrySpec


class FileFormatError(ValueError):
    """Malformed input file."""


def _text(path_or_text: str | Path) -> str:
    return Path(path_or_text).read_text()


# -- circuits ---------------------------------------------------------------

def read_circuit(path: str | Path) -> Circuit:
    try:
        return parse_circuit(_text(path))
    except CircuitFormatError as exc:
        raise FileFormatError(str(exc)) from exc


def write_circuit(circ: Circuit, path: str | Path) -> None:
    Path(path).write_text(circ.to_text())


# -- states -----------------------------------------------------------------

def parse_state(text: str, n: int) -> SparseState:
    """Sparse state on ``n`` qubits from ``index re im`` lines (``#`` comments allowed)."""
    terms: dict[int, complex] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) != 3:
                raise ValueError
            idx, re_, im = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise FileFormatError(f"line {lineno}: expected 'index re im', got {raw!r}") from None
        if not 0 <= idx < 1 << n:
            raise FileFormatError(f"line {lineno}: index {idx} outside {n} qubits")
        terms[idx] = terms.get(idx, 0) + complex(re_, im)
    if not terms:
        raise FileFormatError("state file has no amplitudes")
    return SparseState.from_dict(terms, n)


def format_state(amplitudes: Mapping[int, complex], tol: float = 1e-12) -> str:
    lines = [f"{k} {a.real:.17g} {a.imag:.17g}" for k, a in sorted(amplitudes.items()) if abs(a) > tol]
    return "\n".join(lines) + "\n"


def read_state(path: str | Path, n: int) -> SparseState:
    return parse_state(_text(path), n)


def write_state(state, path: str | Path, tol: float = 1e-12) -> None:
    Path(path).write_text(format_state(state.to_dict(), tol))


# -- data tables ------------------------------------------------------------

_B_HEADER = re.compile(r"#\s*b\s*=\s*(\d+)\s*$")


def parse_table(text: str) -> DataTable:
    """Data table from JSON or headed CSV (detected by the first character)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
            b, entries = obj["b"], obj["entries"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FileFormatError(f"bad table JSON: {exc}") from exc
    else:
        b, entries = None, []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            m = _B_HEADER.match(line)
            if m:
                b = int(m.group(1))
                continue
            if line.startswith("#"):
                continue
            try:
                entries.extend(int(v) for v in line.split(",") if v.strip())
            except ValueError:
                raise FileFormatError(f"line {lineno}: not an integer: {raw!r}") from None
        if b is None:
            raise FileFormatError("CSV table is missing its '# b=<int>' header")
    if not isinstance(b, int) or not all(isinstance(e, int) for e in entries):
        raise FileFormatError("table width and entries must be integers")
    return DataTable(b, tuple(entries))


def format_table(table: DataTable, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps({"b": table.b, "entries": list(table.entries)}) + "\n"
    return f"# b={table.b}\n" + "".join(f"{e}\n" for e in table.entries)


def read_table(path: str | Path) -> DataTable:
    return parse_table(_text(path))


# -- state specs, weights, isometries ---------------------------------------

def _complex_list(obj, what: str, ndim: int) -> np.ndarray:
    """``ndim``-deep nested lists ending in ``[re, im]`` pairs as a complex array."""
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{what}: expected [re, im] pairs") from exc
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise FileFormatError(f"{what}: expected [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_state_spec(text: str) -> StateSpec:
    try:
        obj = json.loads(text)
        amps = obj["amplitudes"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FileFormatError(f"bad state spec: {exc}") from exc
    return StateSpec(_complex_list(amps, "amplitudes", 1))


def format_state_spec(amplitudes) -> str:
    a = np.asarray(amplitudes, dtype=complex)
    return json.dumps({"amplitudes": [[float(v.real), float(v.imag)] for v in a]}) + "\n"


def read_state_spec(path: str | Path) -> StateSpec:
    return parse_state_spec(_text(path))


def parse_weights(text: str) -> np.ndarray:
    values = []
    for row in csv.reader(io.StringIO(text)):
        for cell in row:
            cell = cell.strip()
            if not cell or cell.startswith("#"):
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise FileFormatError(f"not a number: {cell!r}") from None
    if not values:
        raise FileFormatError("weights file is empty")
    return np.array(values)


def read_weights(path: str | Path) -> np.ndarray:
    return parse_weights(_text(path))


def parse_isometry(text: str) -> IsometrySpec:
    try:
        obj = json.loads(text)
        n, cols = int(obj["n"]), obj["columns"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"bad isometry file: {exc}") from exc
    columns = _complex_list(cols, "columns", 2)
    if columns.shape[1] != 1 << n:
        raise FileFormatError(f"every column must have 2^{n} entries")
    return IsometrySpec(columns.T)


def format_isometry(spec: IsometrySpec) -> str:
    cols = [[[float(v.real), float(v.imag)] for v in spec.column(k)] for k in range(spec.K)]
    return json.dumps({"n": spec.n, "columns": cols}) + "\n"


def read_isometry(path: str | Path) -> IsometrySpec:
    return parse_isometry(_text(path))
