"""Plain-text file formats: capture histories, parameter sets, result files.

History files are line oriented so they can be edited by hand.  Comment
lines start with ``#``; the first content line is a header of ``key=value``
tokens declaring the design; every following line is one unique capture
history (space-separated outcomes ``0..G``) with a trailing multiplicity::

    T=2 K=3,3 G=2 avail=1:1,2;2:1,2
    0 1 0 0 0 2 4
    2 2 0 0 0 0 1

``avail`` (optional, default all states everywhere) maps period ranges to
state lists; ``Aprime``/``aprime`` override the age caps.  Writing then
parsing any dataset is the identity.
"""

import json
import warnings

import numpy as np

from .design import Dataset, StudyDesign
from .errors import ConstraintError, ParseError
from .params import params_from_dict, params_to_dict


def _format_avail(design):
    parts = []
    for t in range(1, design.T + 1):
        states = ",".join(str(g) for g in design.availability[t - 1])
        parts.append(f"{t}:{states}")
    return ";".join(parts)


def format_header(design):
    tokens = [
        f"T={design.T}",
        "K=" + ",".join(str(k) for k in design.K),
        f"G={design.G}",
    ]
    if not design.full_availability():
        tokens.append("avail=" + _format_avail(design))
    if design.A_prime != design.T:
        tokens.append(f"Aprime={design.A_prime}")
    if design.a_prime != design.K:
        tokens.append("aprime=" + ",".join(str(a) for a in design.a_prime))
    return " ".join(tokens)


def _parse_avail(text, T, G, line):
    out = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ParseError(f"availability chunk {part!r} needs periods:states", line)
        span, states = part.split(":", 1)
        try:
            if "-" in span:
                lo, hi = (int(x) for x in span.split("-", 1))
            else:
                lo = hi = int(span)
            state_list = tuple(int(g) for g in states.split(","))
        except ValueError as exc:
            raise ParseError(f"malformed availability chunk {part!r}", line) from exc
        for t in range(lo, hi + 1):
            out[t] = state_list
    missing = [t for t in range(1, T + 1) if t not in out]
    if missing:
        raise ParseError(f"availability missing periods {missing}", line)
    return tuple(out[t] for t in range(1, T + 1))


def parse_design_header(text, line=1):
    """StudyDesign from a header line of ``key=value`` tokens."""
    fields = {}
    for token in text.split():
        if "=" not in token:
            raise ParseError(f"expected key=value token, got {token!r}", line)
        key, value = token.split("=", 1)
        fields[key] = value
    for required in ("T", "K", "G"):
        if required not in fields:
            raise ParseError(f"header is missing {required}", line)
    try:
        T = int(fields["T"])
        K = tuple(int(x) for x in fields["K"].split(","))
        G = int(fields["G"])
        A_prime = int(fields["Aprime"]) if "Aprime" in fields else None
        a_prime = tuple(int(x) for x in fields["aprime"].split(",")) if "aprime" in fields else None
    except ValueError as exc:
        raise ParseError(f"malformed header value ({exc})", line) from exc
    avail = _parse_avail(fields["avail"], T, G, line) if "avail" in fields else None
    try:
        return StudyDesign(T=T, K=K, G=G, availability=avail, A_prime=A_prime, a_prime=a_prime)
    except ConstraintError as exc:
        raise ParseError(str(exc), line) from exc


def parse_history_file(path):
    """Read a history file into a :class:`Dataset`.

    Duplicate rows are merged (multiplicities summed) with a warning;
    malformed rows raise :class:`ParseError` naming the line.
    """
    design = None
    rows = {}
    order = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            if design is None:
                design = parse_design_header(text, lineno)
                continue
            parts = text.split()
            if len(parts) != design.total_occasions + 1:
                raise ParseError(
                    f"expected {design.total_occasions} outcomes plus a count, got {len(parts)} fields",
                    lineno,
                )
            try:
                values = [int(x) for x in parts]
            except ValueError as exc:
                raise ParseError(f"non-integer entry ({exc})", lineno) from exc
            history, count = tuple(values[:-1]), values[-1]
            if count < 1:
                raise ParseError(f"count must be >= 1, got {count}", lineno)
            if any(x < 0 or x > design.G for x in history):
                bad = next(x for x in history if x < 0 or x > design.G)
                raise ParseError(f"entry {bad} outside 0..{design.G}", lineno)
            if not any(history):
                raise ParseError("history has no captures", lineno)
            for t in range(1, design.T + 1):
                cols = design.period_columns(t)
                allowed = set(design.availability[t - 1]) | {0}
                bad = [x for x in history[cols] if x not in allowed]
                if bad:
                    raise ParseError(
                        f"state {bad[0]} not available in period {t}", lineno
                    )
            if history in rows:
                warnings.warn(f"{path}: duplicate history at line {lineno} merged")
                rows[history] += count
            else:
                rows[history] = count
                order.append(history)
    if design is None:
        raise ParseError("file has no header line")
    histories = np.array(order, dtype=np.int64).reshape(len(order), design.total_occasions)
    counts = np.array([rows[h] for h in order], dtype=np.int64)
    try:
        return Dataset(design, histories, counts)
    except ConstraintError as exc:
        raise ParseError(str(exc)) from exc


def write_history_file(path, dataset, comment=None):
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(format_header(dataset.design) + "\n")
        for row, count in zip(dataset.histories, dataset.counts):
            fh.write(" ".join(str(int(x)) for x in row) + f" {int(count)}\n")


def parse_design_file(path):
    """StudyDesign from a file holding just a header (body rows ignored)."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if text and not text.startswith("#"):
                return parse_design_header(text, lineno)
    raise ParseError("file has no header line")


def write_params_json(path, params):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params_to_dict(params), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_params_json(path, design):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return params_from_dict(design, data)


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialise {type(obj)!r}")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def format_table(rows, columns):
    """Fixed-width text table from dict rows."""
    cells = [[_fmt(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) if cells else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for r in cells:
        lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"
