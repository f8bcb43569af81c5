"""Parsers for the two supported dataset families.

Contact logs (face-to-face proximity studies): whitespace-separated rows
``t i j Ci Cj`` where ``t`` is epoch seconds and a row stands for a
contact over ``[t - window, t]`` (20-second sliding window by default),
plus a metadata table ``id class gender`` and optional timeless
friendship / online-friend edge lists.

Flight on-time tables: CSV with one row per flight; each flight becomes
a link ``[departure, arrival]`` (minutes, counted from midnight of the
earliest day in the extract) on the operating carrier's layer.

Both parsers return ``(graph, report)``: every input row is accounted
for in the report as accepted or dropped-for-a-reason, and parsing the
same bytes twice yields structurally identical graphs.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import os
from collections import Counter
from dataclasses import dataclass, field, fields as dataclass_fields
from typing import Dict, List, Optional, Tuple

from .errors import (MalformedLine, MalformedTime, MissingColumn,
                     UnknownStudentId)
from .model import Aspect, BuildMode, GraphBuilder, MultilayerStreamGraph

FACE2FACE = "face2face"
FRIENDSHIP = "friendship"
FACEBOOK = "facebook"
INTERACTION_KINDS = (FACE2FACE, FRIENDSHIP, FACEBOOK)

DEFAULT_CONTACT_WINDOW = 20

DEFAULT_FLIGHT_COLUMNS = {
    "date": "FL_DATE",
    "carrier": "OP_UNIQUE_CARRIER",
    "origin": "ORIGIN",
    "dest": "DEST",
    "dep": "DEP_TIME",
    "arr": "ARR_TIME",
    "cancelled": "CANCELLED",
}

MINUTES_PER_DAY = 24 * 60


@dataclass
class FileReport:
    """Row bookkeeping for one input file: total = accepted + dropped."""

    path: str
    total: int = 0
    accepted: int = 0
    dropped: Counter = field(default_factory=Counter)
    notes: Counter = field(default_factory=Counter)

    def drop(self, reason: str) -> None:
        self.dropped[reason] += 1

    @property
    def dropped_total(self) -> int:
        return sum(self.dropped.values())

    def check(self) -> None:
        assert self.total == self.accepted + self.dropped_total, self


@dataclass
class IngestReport:
    files: Dict[str, FileReport] = field(default_factory=dict)

    def file(self, label: str, path) -> FileReport:
        rep = FileReport(path=str(path))
        self.files[label] = rep
        return rep

    def as_dict(self) -> dict:
        return {label: {"path": rep.path, "total": rep.total,
                        "accepted": rep.accepted,
                        "dropped": dict(rep.dropped),
                        "notes": dict(rep.notes)}
                for label, rep in self.files.items()}


def _as_node(token: str):
    try:
        return int(token)
    except ValueError:
        return token


# --- contacts ----------------------------------------------------------------


def _read_metadata(path, report: IngestReport, skip_errors: bool):
    meta = {}
    rep = report.file("metadata", path)
    with open(path, "r", encoding="utf-8") as fp:
        for line_no, line in enumerate(fp, 1):
            parts = line.split()
            if not parts:
                continue
            rep.total += 1
            if len(parts) != 3:
                if not skip_errors:
                    raise MalformedLine(
                        f"metadata line {line_no}: expected 'id class "
                        f"gender', got {line.rstrip()!r}", line_no=line_no)
                rep.drop("malformed")
                continue
            sid, cls, gender = parts
            meta[_as_node(sid)] = (cls, gender)
            rep.accepted += 1
    rep.check()
    return meta


def _edge_file_pairs(path, file_label, meta, report, skip_errors):
    """Unordered (i, j) pairs from a two-column edge list, with counters."""
    rep = report.file(file_label, path)
    pairs = Counter()
    with open(path, "r", encoding="utf-8") as fp:
        for line_no, line in enumerate(fp, 1):
            parts = line.split()
            if not parts:
                continue
            rep.total += 1
            if len(parts) != 2:
                if not skip_errors:
                    raise MalformedLine(
                        f"{file_label} line {line_no}: expected 'i j'",
                        line_no=line_no)
                rep.drop("malformed")
                continue
            i, j = _as_node(parts[0]), _as_node(parts[1])
            if i == j:
                if not skip_errors:
                    raise MalformedLine(
                        f"{file_label} line {line_no}: self edge {i}",
                        line_no=line_no)
                rep.drop("malformed")
                continue
            missing = [x for x in (i, j) if x not in meta]
            if missing:
                if not skip_errors:
                    raise UnknownStudentId(
                        f"{file_label} line {line_no}: unknown id "
                        f"{missing[0]}")
                rep.drop("unknown_id")
                continue
            if meta[i][1] == "U" or meta[j][1] == "U":
                rep.drop("gender_u")
                continue
            pairs[(i, j) if repr(i) <= repr(j) else (j, i)] += 1
            rep.accepted += 1
    rep.check()
    return pairs, rep


def parse_contacts(contacts_path, metadata_path, friendship_path=None,
                   facebook_path=None, *,
                   contact_window: int = DEFAULT_CONTACT_WINDOW,
                   symmetrize_friendship: bool = True,
                   skip_errors: bool = False,
                   ) -> Tuple[MultilayerStreamGraph, IngestReport]:
    """Contact study -> graph with interaction/gender/class aspects.

    Contact rows become ``[t - contact_window, t]`` links on the
    ``face2face`` layer; friendship (symmetrized unless told otherwise)
    and online-friend edges span the whole study interval on their own
    layers. Rows touching unreported gender are dropped and counted.
    With ``skip_errors`` malformed rows and unknown ids are counted
    instead of raised.
    """
    report = IngestReport()
    meta = _read_metadata(metadata_path, report, skip_errors)

    rep = report.file("contacts", contacts_path)
    contact_rows: List[Tuple[int, object, object]] = []
    with open(contacts_path, "r", encoding="utf-8") as fp:
        for line_no, line in enumerate(fp, 1):
            parts = line.split()
            if not parts:
                continue
            rep.total += 1
            if len(parts) != 5:
                if not skip_errors:
                    raise MalformedLine(
                        f"contacts line {line_no}: expected 't i j Ci Cj'",
                        line_no=line_no)
                rep.drop("malformed")
                continue
            t_tok, i_tok, j_tok, ci, cj = parts
            try:
                t = int(t_tok)
            except ValueError:
                if not skip_errors:
                    raise MalformedLine(
                        f"contacts line {line_no}: bad timestamp "
                        f"{t_tok!r}", line_no=line_no)
                rep.drop("malformed")
                continue
            i, j = _as_node(i_tok), _as_node(j_tok)
            if i == j:
                if not skip_errors:
                    raise MalformedLine(
                        f"contacts line {line_no}: self contact {i}",
                        line_no=line_no)
                rep.drop("malformed")
                continue
            missing = [x for x in (i, j) if x not in meta]
            if missing:
                if not skip_errors:
                    raise UnknownStudentId(
                        f"contacts line {line_no}: unknown id {missing[0]}")
                rep.drop("unknown_id")
                continue
            if meta[i][1] == "U" or meta[j][1] == "U":
                rep.drop("gender_u")
                continue
            # metadata is authoritative for class labels; row labels that
            # disagree are noted but the row is kept
            if ci != meta[i][0] or cj != meta[j][0]:
                rep.notes["class_mismatch"] += 1
            contact_rows.append((t, i, j))
            rep.accepted += 1
    rep.check()

    edge_layers: List[Tuple[str, Counter]] = []
    if friendship_path is not None:
        pairs, frep = _edge_file_pairs(friendship_path, "friendship", meta,
                                       report, skip_errors)
        if not symmetrize_friendship:
            mutual = Counter({p: n for p, n in pairs.items() if n >= 2})
            frep.notes["one_sided_discarded"] = len(pairs) - len(mutual)
            pairs = mutual
        edge_layers.append((FRIENDSHIP, pairs))
    if facebook_path is not None:
        pairs, _ = _edge_file_pairs(facebook_path, "facebook", meta,
                                    report, skip_errors)
        edge_layers.append((FACEBOOK, pairs))

    classes = sorted({cls for cls, gender in meta.values() if gender != "U"})
    aspects = [Aspect("interaction_type", INTERACTION_KINDS),
               Aspect("gender", ("M", "F")),
               Aspect("class", tuple(classes))]

    if contact_rows:
        t_lo = min(t for t, _, _ in contact_rows) - contact_window
        t_hi = max(t for t, _, _ in contact_rows)
    else:
        t_lo, t_hi = 0, 0
    builder = GraphBuilder((t_lo, t_hi), aspects,
                           mode=BuildMode.AUTO_MATERIALIZE)

    def layer_of(student, kind):
        cls, gender = meta[student]
        return (kind, gender, cls)

    for t, i, j in contact_rows:
        builder.add_link((t - contact_window, t),
                         (i, layer_of(i, FACE2FACE)),
                         (j, layer_of(j, FACE2FACE)))
    for kind, pairs in edge_layers:
        for (i, j), n in sorted(pairs.items(), key=lambda kv: repr(kv[0])):
            if n > 1:
                report.files[kind].notes["merged_duplicate"] += n - 1
            builder.add_link((t_lo, t_hi),
                             (i, layer_of(i, kind)),
                             (j, layer_of(j, kind)))
    return builder.finish(), report


# --- flights -----------------------------------------------------------------


def _parse_hhmm(token: str, line_no: int, skip_errors: bool) -> Optional[int]:
    """HHMM -> minutes after midnight; 2400 wraps to the next day."""
    token = token.strip()
    if token.endswith(".0"):
        token = token[:-2]
    if token == "":
        return None
    try:
        value = int(token)
    except ValueError:
        if skip_errors:
            return None
        raise MalformedTime(f"line {line_no}: bad HHMM time {token!r}")
    hh, mm = value // 100, value % 100
    if hh > 24 or mm > 59 or value < 0 or (hh == 24 and mm != 0):
        if skip_errors:
            return None
        raise MalformedTime(f"line {line_no}: bad HHMM time {token!r}")
    return hh * 60 + mm


def _parse_date(token: str, line_no: int):
    token = token.strip().split(" ")[0]  # tolerate a time-of-day suffix
    for fmt in ("%Y-%m-%d", "%m/%d/%Y"):
        try:
            return _dt.datetime.strptime(token, fmt).date()
        except ValueError:
            continue
    raise MalformedTime(f"line {line_no}: bad date {token!r}")


def _month_key(month) -> Tuple[int, int]:
    if isinstance(month, str):
        y, m = month.split("-")
        return int(y), int(m)
    y, m = month
    return int(y), int(m)


def parse_flights(csv_path, *, month=None,
                  columns: Optional[Dict[str, str]] = None,
                  skip_errors: bool = False,
                  ) -> Tuple[MultilayerStreamGraph, IngestReport]:
    """Flight table -> graph with one carrier aspect, airports as nodes.

    Ticks are minutes; tick 0 is midnight of the earliest retained day.
    Arrivals before departures are read as next-day landings. Cancelled
    rows and rows with missing times are dropped with counters, as are
    rows outside the ``month`` filter (``"YYYY-MM"`` or ``(year, month)``).
    """
    colmap = dict(DEFAULT_FLIGHT_COLUMNS)
    if columns:
        colmap.update(columns)
    want_month = _month_key(month) if month is not None else None

    report = IngestReport()
    rep = report.file("flights", csv_path)
    rows = []
    with open(csv_path, "r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        header = reader.fieldnames or []
        for key in ("date", "carrier", "origin", "dest", "dep", "arr"):
            if colmap[key] not in header:
                raise MissingColumn(
                    f"column {colmap[key]!r} (for {key}) not in header")
        has_cancelled = colmap["cancelled"] in header
        for line_no, row in enumerate(reader, 2):
            rep.total += 1
            try:
                day = _parse_date(row[colmap["date"]], line_no)
            except MalformedTime:
                if not skip_errors:
                    raise
                rep.drop("bad_date")
                continue
            if want_month is not None and (day.year, day.month) != want_month:
                rep.drop("outside_month")
                continue
            if has_cancelled:
                flag = (row[colmap["cancelled"]] or "").strip()
                if flag not in ("", "0", "0.0", "0.00"):
                    rep.drop("cancelled")
                    continue
            carrier = (row[colmap["carrier"]] or "").strip()
            origin = (row[colmap["origin"]] or "").strip()
            dest = (row[colmap["dest"]] or "").strip()
            if not carrier or not origin or not dest:
                rep.drop("missing_field")
                continue
            if origin == dest:
                rep.drop("self_loop")
                continue
            dep = _parse_hhmm(row[colmap["dep"]] or "", line_no, skip_errors)
            arr = _parse_hhmm(row[colmap["arr"]] or "", line_no, skip_errors)
            if dep is None or arr is None:
                rep.drop("missing_time")
                continue
            if arr < dep:
                arr += MINUTES_PER_DAY  # overnight flight
            rows.append((day.toordinal(), carrier, origin, dest, dep, arr))
            rep.accepted += 1
    rep.check()

    carriers = sorted({carrier for _, carrier, _, _, _, _ in rows})
    aspects = [Aspect("carrier", tuple(carriers) or ("none",))]
    if not rows:
        g = GraphBuilder((0, 0), aspects).finish()
        return g, report

    base = min(ordinal for ordinal, _, _, _, _, _ in rows)
    links = []
    t_hi = 0
    for ordinal, carrier, origin, dest, dep, arr in rows:
        shift = (ordinal - base) * MINUTES_PER_DAY
        links.append((shift + dep, shift + arr, carrier, origin, dest))
        t_hi = max(t_hi, shift + arr)

    builder = GraphBuilder((0, t_hi), aspects,
                           mode=BuildMode.AUTO_MATERIALIZE)
    for s, e, carrier, origin, dest in links:
        builder.add_link((s, e), (origin, (carrier,)), (dest, (carrier,)))
    return builder.finish(), report


# --- manifest ----------------------------------------------------------------


@dataclass
class DatasetManifest:
    """Paths plus parse options, loadable from a small JSON file.

    Exactly one family is expected: either ``contacts`` (+ ``metadata``,
    optional ``friendship`` / ``facebook``) or ``flights``. Relative
    paths resolve against the manifest file's directory.
    """

    contacts: Optional[str] = None
    metadata: Optional[str] = None
    friendship: Optional[str] = None
    facebook: Optional[str] = None
    flights: Optional[str] = None
    month: Optional[str] = None
    contact_window: int = DEFAULT_CONTACT_WINDOW
    symmetrize_friendship: bool = True
    skip_errors: bool = True
    flight_columns: Optional[Dict[str, str]] = None

    @classmethod
    def from_json(cls, path) -> "DatasetManifest":
        with open(path, "r", encoding="utf-8") as fp:
            data = json.load(fp)
        known = {f.name for f in dataclass_fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(
                f"unknown manifest keys: {', '.join(sorted(unknown))}")
        manifest = cls(**data)
        base = os.path.dirname(os.path.abspath(path))
        for key in ("contacts", "metadata", "friendship", "facebook",
                    "flights"):
            value = getattr(manifest, key)
            if value is not None and not os.path.isabs(value):
                setattr(manifest, key, os.path.join(base, value))
        return manifest

    def load(self) -> Tuple[MultilayerStreamGraph, IngestReport]:
        if self.contacts is not None:
            if self.metadata is None:
                raise ValueError("contacts dataset needs a metadata path")
            return parse_contacts(
                self.contacts, self.metadata, self.friendship, self.facebook,
                contact_window=self.contact_window,
                symmetrize_friendship=self.symmetrize_friendship,
                skip_errors=self.skip_errors)
        if self.flights is not None:
            return parse_flights(self.flights, month=self.month,
                                 columns=self.flight_columns,
                                 skip_errors=self.skip_errors)
        raise ValueError("manifest names neither contacts nor flights")
