"""Text vector files: a ``# field=real|complex`` header, then one value per line.

Complex values are written as ``re,im``. Numbers use 17 significant digits
so that a write/read cycle is lossless.
"""

from __future__ import annotations

import numpy as np

from .shrinkage import Field

__all__ = ["VectorFormatError", "read_vector", "write_vector", "format_float"]


class VectorFormatError(ValueError):
    pass


def format_float(v) -> str:
    return "%.17g" % v


def read_vector(path):
    """Return ``(values, field)`` from a vector file."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise VectorFormatError(f"{path}:1: missing '# field=real|complex' header")
    header = lines[0].lstrip("#").strip().replace(" ", "")
    if not header.startswith("field="):
        raise VectorFormatError(f"{path}:1: missing '# field=real|complex' header")
    try:
        field = Field.parse(header.split("=", 1)[1])
    except ValueError as exc:
        raise VectorFormatError(f"{path}:1: {exc}") from None
    values = []
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            if field is Field.COMPLEX:
                if len(parts) != 2:
                    raise ValueError("expected 're,im'")
                values.append(complex(float(parts[0]), float(parts[1])))
            else:
                if len(parts) != 1:
                    raise ValueError("expected a single real value")
                values.append(float(parts[0]))
        except ValueError as exc:
            raise VectorFormatError(f"{path}:{lineno}: {exc}") from None
    if not values:
        raise VectorFormatError(f"{path}: no values")
    arr = np.array(values, dtype=complex if field is Field.COMPLEX else float)
    if not np.all(np.isfinite(arr)):
        raise VectorFormatError(f"{path}: non-finite values")
    return arr, field


def write_vector(path, values, field: Field = None):
    values = np.asarray(values)
    field = Field.of(values) if field is None else Field.parse(field)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# field={field.value}\n")
        for v in values:
            if field is Field.COMPLEX:
                fh.write(f"{format_float(v.real)},{format_float(v.imag)}\n")
            else:
                fh.write(format_float(v) + "\n")
