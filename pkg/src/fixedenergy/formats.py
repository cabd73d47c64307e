"""Potential JSON and phase-shift CSV readers/writers.

Potential JSON: ``{"k": 2.0, "breakpoints": [r_1, ..., r_N], "values": [q_1, ..., q_N]}``
(``k`` optional).  Shifts CSV: header ``l,delta`` then one row per l, numbers
written with 16 significant digits in lowercase scientific notation.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import DimensionMismatch, DomainError
from .scattering import PiecewiseConstantPotential


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def fmt(x: float) -> str:
    return f"{float(x):.15e}"


def read_potential(path):
    """Return ``(potential, k_or_None)`` from a potential JSON file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: cannot read potential JSON ({exc})") from exc
    if not isinstance(data, dict) or "breakpoints" not in data or "values" not in data:
        raise InputError(f"{path}: expected an object with 'breakpoints' and 'values'")
    k = data.get("k")
    if k is not None and not (isinstance(k, (int, float)) and math.isfinite(k) and k > 0):
        raise InputError(f"{path}: 'k' must be a positive number")
    try:
        pot = PiecewiseConstantPotential(data["breakpoints"], data["values"])
    except (DomainError, DimensionMismatch, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    return pot, (None if k is None else float(k))


def write_potential(path, pot: PiecewiseConstantPotential, k: float | None = None):
    with open(path, "w") as fh:
        json.dump(pot.to_dict(k), fh, indent=2)
        fh.write("\n")


def read_shifts(path):
    """Return ``(deltas, tokens)``; ``tokens`` are the verbatim delta strings."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["l", "delta"]:
        raise InputError(f"{path}: expected header 'l,delta'")
    tokens = []
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise InputError(f"{path}:{lineno}: expected two columns")
        try:
            l = int(row[0])
            d = float(row[1])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        if l != len(values):
            raise InputError(f"{path}:{lineno}: rows must list l = 0, 1, 2, ... in order")
        if not math.isfinite(d):
            raise InputError(f"{path}:{lineno}: non-finite phase shift")
        tokens.append(row[1].strip())
        values.append(d)
    if not values:
        raise InputError(f"{path}: no data rows")
    return np.array(values), tokens


def shifts_csv_text(deltas, tokens=None) -> str:
    lines = ["l,delta"]
    for l, d in enumerate(deltas):
        lines.append(f"{l},{tokens[l] if tokens is not None and tokens[l] is not None else fmt(d)}")
    return "\n".join(lines) + "\n"
