"""Reader for the experiment CSV files this package consumes.

The producing toolkit writes plain CSV with '#' comment lines carrying
its config; everything here works from the documented column schemas
only (scan: protocol,gamma,theta,...; scaling: N,protocol,B,...).
"""
from __future__ import annotations


class SchemaError(Exception):
    """Input CSV does not match the documented schema."""


def _parse(raw):
    try:
        return int(raw)
    except ValueError:
        try:
            return float(raw)
        except ValueError:
            return raw


def read_rows(path):
    """List of row dicts; comment lines are skipped, numbers parsed."""
    rows = []
    header = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            values = line.split(",")
            if len(values) != len(header):
                raise SchemaError(
                    f"{path}: row has {len(values)} fields, header has "
                    f"{len(header)}"
                )
            rows.append({k: _parse(v) for k, v in zip(header, values)})
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    return rows


def require_columns(rows, columns, path):
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    missing = [c for c in columns if c not in rows[0]]
    if missing:
        raise SchemaError(f"{path}: missing required column(s) {missing}")
