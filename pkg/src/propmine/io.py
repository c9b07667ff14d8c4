"""Reading datasets, writing mining results.

Input formats
-------------
``csv``
    One triplet per row, columns mapped to A, B, C by ``IngestSpec.columns``.
    With ``time_bin_seconds`` set, the C column holds integer timestamps that
    are binned.
``tij``
    SocioPatterns contact lists: whitespace-separated ``t i j`` lines,
    optionally followed by the roles ``Si Sj``.  Row ``(t, i, j)`` becomes
    triplet ``(i, j, bin(t))`` with ``bin(t) = (t - t0) // time_bin_seconds``.

Result schemas
--------------
Both result formats carry the fields of :data:`RESULT_FIELDS`, in that order.
In ``jsonl`` each line is one JSON object.  In ``csv`` the first row is the
header and list-valued fields are JSON-encoded inside their cell.
"""

from __future__ import annotations

import configparser
import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .dataset import Dim, TripletDataset
from .errors import DataError
from .miner import MinedProposition, MinerConfig
from .propositions import format_proposition

logger = logging.getLogger(__name__)

__all__ = [
    "IngestSpec",
    "KNOWN_ROLES",
    "RESULT_FIELDS",
    "ingest",
    "read_role_map",
    "read_rows",
    "write_dataset_csv",
    "result_record",
    "write_results",
    "read_results",
    "load_config",
]

KNOWN_ROLES = frozenset({"NUR", "MED", "ADM", "PAT"})

RESULT_FIELDS = (
    "proposition",
    "subject_dim",
    "subject",
    "subject_roles",
    "predicate_dims",
    "predicate",
    "predicate_roles",
    "x",
    "y",
    "x_exact",
    "y_exact",
    "subject_size",
    "predicate_sizes",
    "triplet_count",
    "provenance_count",
)
_LIST_FIELDS = {"subject", "subject_roles", "predicate_dims", "predicate", "predicate_roles", "predicate_sizes"}
_INT_FIELDS = {"subject_size", "triplet_count", "provenance_count"}
_FLOAT_FIELDS = {"x", "y"}


@dataclass(frozen=True)
class IngestSpec:
    """How to turn a file into a dataset.

    ``symmetrize``, ``drop_self_pairs`` and ``shared_ab`` default to true
    for ``tij`` input and false for ``csv``.  ``time_bin_seconds`` defaults
    to 60 for ``tij``.
    """

    format: str = "csv"
    columns: tuple[int, int, int] = (0, 1, 2)
    time_bin_seconds: int | None = None
    symmetrize: bool | None = None
    drop_self_pairs: bool | None = None
    shared_ab: bool | None = None
    role_map_file: str | None = None
    header: bool = False
    t0: int | None = None
    delimiter: str = ","

    def __post_init__(self):
        if self.format not in ("csv", "tij"):
            raise ValueError("format must be 'csv' or 'tij'")
        if len(set(self.columns)) != 3:
            raise ValueError("column indices must be distinct")
        if self.time_bin_seconds is not None and self.time_bin_seconds <= 0:
            raise ValueError("time_bin_seconds must be positive")
        contacts = self.format == "tij"
        for name, default in (("symmetrize", contacts), ("drop_self_pairs", contacts), ("shared_ab", contacts)):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        if contacts and self.time_bin_seconds is None:
            object.__setattr__(self, "time_bin_seconds", 60)


def read_role_map(path) -> dict:
    """``id,role`` rows into a dict; unknown roles are kept with a warning."""
    roles = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise DataError("role map rows need 'id,role'", lineno)
            ident, role = row[0].strip(), row[1].strip()
            if lineno == 1 and ident.lower() == "id":
                continue
            if role not in KNOWN_ROLES:
                logger.warning("unknown role %r for %s", role, ident)
            roles[ident] = role
    return roles


def _bin(t: int, t0: int, width: int | None) -> str:
    return str(t if width is None else (t - t0) // width)


def read_rows(path, spec: IngestSpec):
    """Yield ``(lineno, fields)`` for the non-empty data lines of ``path``."""
    with open(path, newline="") as fh:
        if spec.format == "csv":
            reader = csv.reader(fh, delimiter=spec.delimiter)
            for lineno, row in enumerate(reader, start=1):
                if spec.header and lineno == 1:
                    continue
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                yield lineno, [f.strip() for f in row]
        else:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                yield lineno, line.split()


def ingest(path, spec: IngestSpec = IngestSpec()) -> TripletDataset:
    """Read ``path`` into an interned, duplicate-free dataset."""
    raw = []
    roles = {}
    for lineno, fields in read_rows(path, spec):
        if spec.format == "tij":
            if len(fields) not in (3, 5):
                raise DataError(f"expected 't i j' or 't i j Si Sj', got {len(fields)} fields", lineno)
            try:
                t = int(fields[0])
            except ValueError:
                raise DataError(f"timestamp {fields[0]!r} is not an integer", lineno) from None
            i, j = fields[1], fields[2]
            if len(fields) == 5:
                roles.setdefault(i, fields[3])
                roles.setdefault(j, fields[4])
            raw.append((lineno, i, j, t))
        else:
            if len(fields) <= max(spec.columns):
                raise DataError(f"expected at least {max(spec.columns) + 1} columns", lineno)
            a, b, c = (fields[k] for k in spec.columns)
            if spec.time_bin_seconds is not None:
                try:
                    c = int(c)
                except ValueError:
                    raise DataError(f"timestamp {c!r} is not an integer", lineno) from None
            raw.append((lineno, a, b, c))

    binned = spec.format == "tij" or spec.time_bin_seconds is not None
    if binned:
        t0 = spec.t0 if spec.t0 is not None else min((r[3] for r in raw), default=0)
    rows = []
    dropped = 0
    for lineno, a, b, c in raw:
        if binned:
            c = _bin(c, t0, spec.time_bin_seconds)
        if spec.drop_self_pairs and a == b:
            dropped += 1
            continue
        rows.append((a, b, c))
        if spec.symmetrize:
            rows.append((b, a, c))
    if dropped:
        logger.warning("dropped %d self-pair rows", dropped)
    if not binned:
        duplicates = len(raw) - len({r[1:] for r in raw})
        if duplicates:
            logger.warning("collapsed %d duplicate triplet rows", duplicates)
    # repeats inside one time bin and reversed copies are expected, not reported
    rows = list(dict.fromkeys(rows))

    if spec.role_map_file:
        roles.update(read_role_map(spec.role_map_file))
    metadata = None
    if roles:
        known = {x for r in rows for x in r[:2]}
        for ident in sorted(set(roles) - known):
            logger.warning("role map names unknown element %s", ident)
        metadata = (roles, roles, {}) if spec.shared_ab else (roles, {}, {})
    return TripletDataset.from_records(rows, shared_ab=spec.shared_ab, metadata=metadata)


def write_dataset_csv(d: TripletDataset, path) -> None:
    """Canonical CSV: one ``a,b,c`` label row per triplet, in index order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for a, b, c in d.sorted_triplets:
            writer.writerow((d.labels[0][a], d.labels[1][b], d.labels[2][c]))


def _labels(d: TripletDataset, dim: Dim, elements) -> list:
    return [str(d.labels[dim][e]) for e in sorted(elements)]


def _roles(d: TripletDataset, dim: Dim, elements) -> list:
    meta = d.metadata[dim]
    if not meta:
        return []
    return [str(meta.get(e, "")) for e in sorted(elements)]


def result_record(m: MinedProposition, d: TripletDataset) -> dict:
    """Serializable view of one mined proposition, keys in :data:`RESULT_FIELDS` order."""
    s = m.subject_dim
    p, q = s.others()
    return {
        "proposition": format_proposition(m.to_proposition(), d),
        "subject_dim": s.letter,
        "subject": _labels(d, s, m.subject),
        "subject_roles": _roles(d, s, m.subject),
        "predicate_dims": [p.letter, q.letter],
        "predicate": [_labels(d, p, m.region.beta), _labels(d, q, m.region.gamma)],
        "predicate_roles": [_roles(d, p, m.region.beta), _roles(d, q, m.region.gamma)],
        "x": float(m.x_actual),
        "y": float(m.y_actual),
        "x_exact": str(m.x_actual),
        "y_exact": str(m.y_actual),
        "subject_size": len(m.subject),
        "predicate_sizes": [len(m.region.beta), len(m.region.gamma)],
        "triplet_count": m.region.triplet_count,
        "provenance_count": len(m.per_subject),
    }


def write_results(records: Iterable[dict], path, fmt: str = "jsonl") -> int:
    """Write records; returns how many were written."""
    n = 0
    with open(path, "w", newline="") as fh:
        if fmt == "jsonl":
            for rec in records:
                fh.write(json.dumps({k: rec[k] for k in RESULT_FIELDS}, ensure_ascii=False) + "\n")
                n += 1
        elif fmt == "csv":
            writer = None
            for rec in records:
                if writer is None:
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow(RESULT_FIELDS)
                writer.writerow([
                    json.dumps(rec[k], ensure_ascii=False) if k in _LIST_FIELDS else rec[k]
                    for k in RESULT_FIELDS
                ])
                n += 1
        else:
            raise ValueError("result format must be 'jsonl' or 'csv'")
    return n


def read_results(path, fmt: str = "jsonl") -> list[dict]:
    """Parse a file written by :func:`write_results`."""
    text = Path(path).read_text()
    if fmt == "jsonl":
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    if fmt != "csv":
        raise ValueError("result format must be 'jsonl' or 'csv'")
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        return []
    header, body = rows[0], rows[1:]
    out = []
    for row in body:
        rec = {}
        for key, cell in zip(header, row):
            if key in _LIST_FIELDS:
                rec[key] = json.loads(cell)
            elif key in _INT_FIELDS:
                rec[key] = int(cell)
            elif key in _FLOAT_FIELDS:
                rec[key] = float(cell)
            else:
                rec[key] = cell
        out.append(rec)
    return out


def load_config(path) -> tuple[dict, dict]:
    """Read a ``key = value`` config file.

    Keys may sit under ``[miner]`` and ``[ingest]`` sections; keys before any
    section header belong to ``[miner]``.  Returns the two sections as dicts.
    """
    text = Path(path).read_text()
    parser = configparser.ConfigParser()
    stripped = text.lstrip()
    if not stripped.startswith("["):
        text = "[miner]\n" + text
    parser.read_string(text)
    miner = dict(parser["miner"]) if parser.has_section("miner") else {}
    ingest_opts = dict(parser["ingest"]) if parser.has_section("ingest") else {}
    unknown = set(parser.sections()) - {"miner", "ingest"}
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    return miner, ingest_opts


def config_text(cfg: MinerConfig) -> str:
    """``key = value`` lines for ``cfg``, readable by :func:`load_config`."""
    return "".join(f"{k} = {v}\n" for k, v in cfg.to_mapping().items())

