"""Parsing of command-line numbers and deterministic CSV/JSON emission."""
import csv
import io
import json
import math
import re

import numpy as np

_PI_TOKEN = re.compile(
    r"(?P<sign>[+-]?)(?P<coef>(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?)?\*?pi(?:/(?P<div>\d+(?:\.\d*)?))?"
)


def parse_real(text):
    """Parse a float, accepting ``pi`` multiples such as ``pi``, ``0.5pi``,
    ``-2*pi`` or ``pi/2``."""
    tok = text.strip().lower()
    m = _PI_TOKEN.fullmatch(tok)
    if m is None:
        return float(tok)
    value = float(m["coef"]) if m["coef"] else 1.0
    value *= math.pi
    if m["div"]:
        value /= float(m["div"])
    return -value if m["sign"] == "-" else value


def parse_complex(text):
    """Parse ``"re,im"`` (or a bare real part) into a complex number."""
    parts = text.split(",")
    if len(parts) == 1:
        return complex(parse_real(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(parse_real(parts[0]), parse_real(parts[1]))
    raise ValueError(f"expected 're,im', got {text!r}")


def format_complex(z):
    """Inverse of :func:`parse_complex` (exact round trip)."""
    z = complex(z)
    return f"{z.real!r},{z.imag!r}"


def parse_range(text, n_default=None):
    """``"lo:hi"`` or ``"lo:hi:n"``; returns ``(lo, hi, n)``."""
    parts = text.split(":")
    if len(parts) == 2 and n_default is not None:
        return parse_real(parts[0]), parse_real(parts[1]), n_default
    if len(parts) == 3:
        return parse_real(parts[0]), parse_real(parts[1]), int(parts[2])
    raise ValueError(f"expected 'lo:hi:n', got {text!r}")


def format_float(x):
    """17 significant digits; NaN and ``None`` become empty fields."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def _flatten(row):
    out = {}
    for key, value in row.items():
        if isinstance(value, (complex, np.complexfloating)):
            out[f"{key}_re"] = format_float(value.real)
            out[f"{key}_im"] = format_float(value.imag)
        elif isinstance(value, (bool, np.bool_)):
            out[key] = "true" if value else "false"
        elif isinstance(value, (int, np.integer)):
            out[key] = str(int(value))
        elif isinstance(value, (float, np.floating)) or value is None:
            out[key] = format_float(value)
        else:
            out[key] = str(value)
    return out


def rows_to_csv(rows):
    """Render a list of flat dicts as CSV text (header always present)."""
    flat = [_flatten(r) for r in rows]
    buf = io.StringIO(newline="")
    header = list(flat[0]) if flat else []
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


def to_json(obj):
    """JSON text with complex numbers as ``{"re": ..., "im": ...}``."""
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def landscape_rows(grid):
    """Rows ``re_theta, im_theta, abs_psi, arg_psi, flag`` of a landscape.

    Branch cells keep their coordinates, leave the values empty and carry
    ``flag = B``.
    """
    rows = []
    for x, y, a, g, branch in grid.rows():
        rows.append({
            "re_theta": x,
            "im_theta": y,
            "abs_psi": None if branch else a,
            "arg_psi": None if branch else g,
            "flag": "B" if branch else "",
        })
    return rows
