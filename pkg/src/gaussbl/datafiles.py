"""File formats for data, states and Hamiltonians.

Two documented formats per object, chosen by extension:

* ``.toml`` -- a key-value document.  A datum holds ``m``, ``p`` and a
  ``[[maps]]`` table per map with ``rows`` (list of row lists) and an
  optional ``kind``/``label``; covariance files hold ``gamma`` plus an
  optional ``nx``/``kind_x``; Hamiltonian files hold ``m1``, ``m2``, ``h``.

* ``.csv`` -- plain matrix blocks.  Scalar/vector lines are
  ``key,value,...``; a line ``map[,kind[,label]]`` opens a map whose rows
  follow as bare numeric lines.  Covariance and Hamiltonian twins use a
  ``gamma`` / ``h`` line followed by the matrix rows.

Declared kinds are always re-derived from the matrices and a mismatch is a
parse error.  Serialization uses ``repr`` for floats, so a parse/serialize
round trip reproduces every matrix entry exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .apps import QuadHamiltonian
from .datum import BLDatum, BLMap
from .entropy import GaussianJoint
from .errors import KindMismatchError, ParseError
from .symplectic import MapKind

FORMAT_VERSION = 1

_KIND_NAMES = {
    "quantum": MapKind.QUANTUM,
    "classical": MapKind.CLASSICAL,
}


def _kind_from_name(name: str, path, line=None) -> MapKind:
    try:
        return _KIND_NAMES[name.strip().lower()]
    except KeyError:
        raise ParseError(f"unknown map kind {name!r}", path, line) from None


# ---------------------------------------------------------------------------
# TOML reading


def _load_toml(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ParseError("file not found", path) from None
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML: {exc}", path) from None


def _matrix_from_lists(rows, path, what: str) -> np.ndarray:
    try:
        mat = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{what} rows are not numeric/rectangular", path) from None
    if mat.ndim != 2 or mat.size == 0:
        raise ParseError(f"{what} must be a non-empty matrix", path)
    return mat


def _datum_from_dict(doc: dict, path) -> BLDatum:
    if "m" not in doc:
        raise ParseError("missing mode count 'm'", path)
    if "p" not in doc:
        raise ParseError("missing weight vector 'p'", path)
    raw_maps = doc.get("maps", [])
    if not raw_maps:
        raise ParseError("datum has an empty maps list", path)
    maps = []
    labels = []
    for i, entry in enumerate(raw_maps, start=1):
        rows = entry.get("rows")
        if rows is None:
            raise ParseError(f"map {i} has no rows", path)
        mat = _matrix_from_lists(rows, path, f"map {i}")
        declared = entry.get("kind")
        try:
            if declared is None:
                maps.append(BLMap.from_matrix(mat))
            else:
                maps.append(BLMap(mat, _kind_from_name(declared, path)))
        except KindMismatchError as exc:
            raise KindMismatchError(f"map {i}: {exc}", path) from None
        except ValueError as exc:
            raise ParseError(f"map {i}: {exc}", path) from None
        labels.append(str(entry.get("label", f"B{i}")))
    try:
        return BLDatum(int(doc["m"]), tuple(maps), np.asarray(doc["p"], dtype=float),
                       labels=tuple(labels))
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


# ---------------------------------------------------------------------------
# CSV-block reading


def _read_csv_blocks(path: Path):
    """Yield (line_number, fields) with empty/comment lines skipped."""
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ParseError("file not found", path) from None
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        fields = [f.strip() for f in row if f.strip() != ""]
        if not fields or fields[0].startswith("#"):
            continue
        yield lineno, fields


def _floats(fields, path, lineno) -> list[float]:
    try:
        return [float(f) for f in fields]
    except ValueError:
        raise ParseError(f"expected numbers, got {fields!r}", path, lineno) from None


def _datum_from_csv(path: Path) -> BLDatum:
    m = None
    p = None
    maps: list[tuple[int, str | None, str | None, list[list[float]]]] = []
    current: list[list[float]] | None = None
    for lineno, fields in _read_csv_blocks(path):
        key = fields[0].lower()
        if key == "m":
            m = int(_floats(fields[1:], path, lineno)[0])
            current = None
        elif key == "p":
            p = _floats(fields[1:], path, lineno)
            current = None
        elif key == "map":
            kind = fields[1] if len(fields) > 1 else None
            label = fields[2] if len(fields) > 2 else None
            current = []
            maps.append((lineno, kind, label, current))
        else:
            if current is None:
                raise ParseError(f"unexpected line {fields!r}", path, lineno)
            current.append(_floats(fields, path, lineno))
    if m is None:
        raise ParseError("missing 'm' line", path)
    if p is None:
        raise ParseError("missing 'p' line", path)
    if not maps:
        raise ParseError("datum has no maps", path)
    built = []
    labels = []
    for i, (lineno, kind, label, rows) in enumerate(maps, start=1):
        if not rows:
            raise ParseError(f"map {i} has no rows", path, lineno)
        mat = _matrix_from_lists(rows, path, f"map {i}")
        try:
            if kind is None:
                built.append(BLMap.from_matrix(mat))
            else:
                built.append(BLMap(mat, _kind_from_name(kind, path, lineno)))
        except KindMismatchError as exc:
            raise KindMismatchError(f"map {i}: {exc}", path, lineno) from None
        except ValueError as exc:
            raise ParseError(f"map {i}: {exc}", path, lineno) from None
        labels.append(label or f"B{i}")
    try:
        return BLDatum(m, tuple(built), np.asarray(p), labels=tuple(labels))
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


# ---------------------------------------------------------------------------
# Public parsers


def parse_datum(path) -> BLDatum:
    """Parse a datum file (.toml key-value document or .csv matrix blocks)."""
    path = Path(path)
    if path.suffix.lower() == ".toml":
        return _datum_from_dict(_load_toml(path), path)
    return _datum_from_csv(path)


def parse_covariance(path) -> tuple[np.ndarray, int | None, MapKind]:
    """Parse a covariance file; returns (gamma, nx or None, kind_x)."""
    path = Path(path)
    if path.suffix.lower() == ".toml":
        doc = _load_toml(path)
        if "gamma" not in doc:
            raise ParseError("missing covariance 'gamma'", path)
        gamma = _matrix_from_lists(doc["gamma"], path, "gamma")
        nx = int(doc["nx"]) if "nx" in doc else None
        kind = _kind_from_name(doc.get("kind_x", "quantum"), path)
        return gamma, nx, kind
    rows: list[list[float]] = []
    nx = None
    kind = MapKind.QUANTUM
    in_gamma = False
    for lineno, fields in _read_csv_blocks(path):
        key = fields[0].lower()
        if key == "gamma":
            in_gamma = True
        elif key == "nx":
            nx = int(_floats(fields[1:], path, lineno)[0])
            in_gamma = False
        elif key == "kind_x":
            kind = _kind_from_name(fields[1], path, lineno)
            in_gamma = False
        elif in_gamma or _is_number(fields[0]):
            rows.append(_floats(fields, path, lineno))
            in_gamma = True
        else:
            raise ParseError(f"unexpected line {fields!r}", path, lineno)
    if not rows:
        raise ParseError("missing covariance rows", path)
    return _matrix_from_lists(rows, path, "gamma"), nx, kind


def parse_joint(path) -> GaussianJoint:
    gamma, nx, kind = parse_covariance(path)
    if nx is None:
        nx = gamma.shape[0]
    try:
        return GaussianJoint(gamma, nx, kind)
    except ValueError as exc:
        raise ParseError(str(exc), Path(path)) from None


def parse_hamiltonian(path) -> QuadHamiltonian:
    """Parse a quadratic-Hamiltonian file with partition (m1, m2)."""
    path = Path(path)
    if path.suffix.lower() == ".toml":
        doc = _load_toml(path)
        for key in ("m1", "m2", "h"):
            if key not in doc:
                raise ParseError(f"missing field {key!r}", path)
        h = _matrix_from_lists(doc["h"], path, "h")
        try:
            return QuadHamiltonian(h, int(doc["m1"]), int(doc["m2"]))
        except ValueError as exc:
            raise ParseError(str(exc), path) from None
    m1 = m2 = None
    rows: list[list[float]] = []
    in_h = False
    for lineno, fields in _read_csv_blocks(path):
        key = fields[0].lower()
        if key == "m1":
            m1 = int(_floats(fields[1:], path, lineno)[0])
            in_h = False
        elif key == "m2":
            m2 = int(_floats(fields[1:], path, lineno)[0])
            in_h = False
        elif key == "h":
            in_h = True
        elif in_h or _is_number(fields[0]):
            rows.append(_floats(fields, path, lineno))
            in_h = True
        else:
            raise ParseError(f"unexpected line {fields!r}", path, lineno)
    if m1 is None or m2 is None or not rows:
        raise ParseError("Hamiltonian file needs m1, m2 and matrix rows", path)
    try:
        return QuadHamiltonian(_matrix_from_lists(rows, path, "h"), m1, m2)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# Serializers (repr floats: exact round trip)


def _toml_matrix(mat: np.ndarray, indent: str = "  ") -> str:
    lines = ["["]
    for row in np.atleast_2d(mat):
        lines.append(indent + "[" + ", ".join(repr(float(x)) for x in row) + "],")
    lines.append("]")
    return "\n".join(lines)


def serialize_datum(d: BLDatum, fmt: str = "toml") -> str:
    labels = d.labels or tuple(f"B{i + 1}" for i in range(d.k))
    if fmt == "toml":
        parts = [
            f"version = {FORMAT_VERSION}",
            f"m = {d.m}",
            "p = [" + ", ".join(repr(float(x)) for x in d.p) + "]",
            "",
        ]
        for bm, label in zip(d.maps, labels):
            parts.append("[[maps]]")
            if bm.kind is not None:
                parts.append(f'kind = "{bm.kind.value}"')
            parts.append(f'label = "{label}"')
            parts.append("rows = " + _toml_matrix(bm.matrix))
            parts.append("")
        return "\n".join(parts)
    if fmt == "csv":
        lines = [f"m,{d.m}", "p," + ",".join(repr(float(x)) for x in d.p)]
        for bm, label in zip(d.maps, labels):
            kind = bm.kind.value if bm.kind is not None else ""
            lines.append(f"map,{kind},{label}" if kind else f"map,,{label}")
            for row in bm.matrix:
                lines.append(",".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def save_datum(d: BLDatum, path) -> None:
    path = Path(path)
    fmt = "toml" if path.suffix.lower() == ".toml" else "csv"
    path.write_text(serialize_datum(d, fmt))


def serialize_covariance(gamma: np.ndarray, nx: int | None = None,
                         kind_x: MapKind = MapKind.QUANTUM, fmt: str = "toml") -> str:
    if fmt == "toml":
        parts = [f"version = {FORMAT_VERSION}"]
        if nx is not None:
            parts.append(f"nx = {nx}")
        parts.append(f'kind_x = "{kind_x.value}"')
        parts.append("gamma = " + _toml_matrix(gamma))
        return "\n".join(parts) + "\n"
    lines = []
    if nx is not None:
        lines.append(f"nx,{nx}")
    lines.append(f"kind_x,{kind_x.value}")
    lines.append("gamma")
    for row in np.atleast_2d(gamma):
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def save_covariance(gamma, path, nx=None, kind_x=MapKind.QUANTUM) -> None:
    path = Path(path)
    fmt = "toml" if path.suffix.lower() == ".toml" else "csv"
    path.write_text(serialize_covariance(np.asarray(gamma, dtype=float), nx, kind_x, fmt))


def serialize_hamiltonian(hmat: QuadHamiltonian, fmt: str = "toml") -> str:
    if fmt == "toml":
        return "\n".join(
            [
                f"version = {FORMAT_VERSION}",
                f"m1 = {hmat.m1}",
                f"m2 = {hmat.m2}",
                "h = " + _toml_matrix(hmat.h),
            ]
        ) + "\n"
    lines = [f"m1,{hmat.m1}", f"m2,{hmat.m2}", "h"]
    for row in hmat.h:
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def save_hamiltonian(hmat: QuadHamiltonian, path) -> None:
    path = Path(path)
    fmt = "toml" if path.suffix.lower() == ".toml" else "csv"
    path.write_text(serialize_hamiltonian(hmat, fmt))


__all__ = [
    "parse_datum",
    "parse_covariance",
    "parse_joint",
    "parse_hamiltonian",
    "serialize_datum",
    "save_datum",
    "serialize_covariance",
    "save_covariance",
    "serialize_hamiltonian",
    "save_hamiltonian",
]
