"""Text formats: ``cmv1`` covariance matrices, ``smv1`` transforms and TSV tables.

cmv1::

    # comment lines start with '#'
    cmv1 2
    0.33 0 0 0
    0 7.94 0 0
    0 0 7.94 0
    0 0 0 0.33

The first non-comment line is ``cmv1 <n>``; it is followed by ``2n`` rows of
``2n`` whitespace-separated numbers, quadrature order ``(x1, p1, ..., xn, pn)``
and vacuum variance 1. The matrix is symmetrized on load; an asymmetry above
``1e-6`` triggers a :class:`AsymmetryWarning`.

smv1 has the same layout with the ``smv1`` tag and an optional trailing
``waveplates <q1> <h> <q2> <common>`` line in degrees.
"""

import warnings

import numpy as np

from .errors import CmFormatError

ASYMMETRY_WARN = 1e-6


class AsymmetryWarning(UserWarning):
    pass


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _parse_matrix(text, tag):
    lines = list(_data_lines(text))
    if not lines:
        raise CmFormatError(f"empty file, expected '{tag} <n>' header")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != tag:
        raise CmFormatError(f"expected '{tag} <n>' header, got {header!r}", lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise CmFormatError(f"mode count {parts[1]!r} is not an integer", lineno) from None
    if n < 1:
        raise CmFormatError(f"mode count must be positive, got {n}", lineno)
    dim = 2 * n
    if len(lines) < dim + 1:
        last = lines[-1][0]
        raise CmFormatError(f"expected {dim} matrix rows, found {len(lines) - 1}", last)
    rows = []
    for lineno, line in lines[1 : dim + 1]:
        fields = line.split()
        if len(fields) != dim:
            raise CmFormatError(f"expected {dim} entries, got {len(fields)}", lineno)
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise CmFormatError(str(exc), lineno) from None
    return np.array(rows), lines[dim + 1 :]


def parse_cm(text):
    m, rest = _parse_matrix(text, "cmv1")
    if rest:
        raise CmFormatError("unexpected content after matrix", rest[0][0])
    asym = float(np.max(np.abs(m - m.T)))
    if asym > ASYMMETRY_WARN:
        warnings.warn(f"covariance matrix asymmetric by {asym:.3g}; symmetrized", AsymmetryWarning, stacklevel=2)
    return 0.5 * (m + m.T)


def read_cm(path):
    with open(path) as fh:
        return parse_cm(fh.read())


def _format_rows(m):
    return [" ".join(format(float(x), ".17g") for x in row) for row in m]


def format_cm(gamma, comments=()):
    g = np.asarray(gamma, dtype=float)
    out = [f"# {c}" for c in comments]
    out.append(f"cmv1 {g.shape[0] // 2}")
    out.extend(_format_rows(g))
    return "\n".join(out) + "\n"


def write_cm(path, gamma, comments=()):
    with open(path, "w") as fh:
        fh.write(format_cm(gamma, comments))


def format_transform(s, waveplates_deg=None, comments=()):
    s = np.asarray(s, dtype=float)
    out = [f"# {c}" for c in comments]
    out.append(f"smv1 {s.shape[0] // 2}")
    out.extend(_format_rows(s))
    if waveplates_deg is not None:
        out.append("waveplates " + " ".join(format(float(x), ".17g") for x in waveplates_deg))
    return "\n".join(out) + "\n"


def parse_transform(text):
    """Return ``(matrix, waveplate_angles_deg or None)``."""
    m, rest = _parse_matrix(text, "smv1")
    plates = None
    for lineno, line in rest:
        fields = line.split()
        if fields[0] != "waveplates" or len(fields) != 5:
            raise CmFormatError(f"unexpected line {line!r}", lineno)
        try:
            plates = tuple(float(f) for f in fields[1:])
        except ValueError as exc:
            raise CmFormatError(str(exc), lineno) from None
    return m, plates


def read_transform(path):
    with open(path) as fh:
        return parse_transform(fh.read())


def _cell(x):
    if x is None:
        return "NA"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def format_table(columns, rows, meta=None):
    """Tab-separated table preceded by ``# key: value`` metadata lines."""
    out = [f"# {k}: {v}" for k, v in (meta or {}).items()]
    out.append("\t".join(columns))
    out.extend("\t".join(_cell(x) for x in row) for row in rows)
    return "\n".join(out) + "\n"


def write_table(path, columns, rows, meta=None):
    with open(path, "w") as fh:
        fh.write(format_table(columns, rows, meta))


def parse_table(text):
    """Return ``(meta, columns, rows)``; cells are left as strings except ``NA`` -> ``None``."""
    meta, columns, rows = {}, None, []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        if raw.startswith("#"):
            key, _, value = raw[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif columns is None:
            columns = raw.split("\t")
        else:
            rows.append([None if c == "NA" else c for c in raw.split("\t")])
    return meta, columns, rows


def read_table(path):
    with open(path) as fh:
        return parse_table(fh.read())
