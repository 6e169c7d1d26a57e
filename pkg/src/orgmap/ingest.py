"""Induce collaboration networks from communication logs.

An edge appears for a pair that exchanged at least ``min_total`` messages
within the window, with at least ``min_each_direction`` in each direction.
The longitudinal graph applies the same rule over the whole period, with the
total threshold scaled by the number of months, then keeps only the largest
connected component.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .graph import CollabGraph, GraphError, OrgTree, largest_connected_component


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class MessageRecord:
    sender: str
    recipient: str
    sent_at: datetime


@dataclass
class MonthlySeries:
    """Monthly graphs plus the longitudinal frame of reference."""

    months: List[str]
    graphs: Dict[str, CollabGraph]
    longitudinal: CollabGraph


def month_label(ts: datetime) -> str:
    return f"{ts.year:04d}-{ts.month:02d}"


def _parse_timestamp(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_message_log(
    path_or_buffer,
    hash_salt: Optional[str] = None,
) -> Tuple[List[MessageRecord], List[str]]:
    """Parse a CSV or JSON-lines message log.

    Fields: ``sender``, ``recipient``, ``sent_at`` (ISO-8601, UTC assumed when
    naive). Malformed rows are rejected with a line-level diagnostic rather
    than aborting the parse; self-messages are dropped. Returns
    ``(records, diagnostics)``.
    """
    if hasattr(path_or_buffer, "read"):
        text = path_or_buffer.read()
    else:
        with open(path_or_buffer, encoding="utf-8") as fh:
            text = fh.read()
    lines = text.splitlines()
    records: List[MessageRecord] = []
    diagnostics: List[str] = []
    if not lines:
        return records, diagnostics

    first = lines[0].lstrip()
    if first.startswith("{"):
        rows: Iterable[Tuple[int, Dict[str, str]]] = []
        parsed_rows = []
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                parsed_rows.append((lineno, json.loads(line)))
            except json.JSONDecodeError:
                diagnostics.append(f"line {lineno}: invalid JSON, record rejected")
        rows = parsed_rows
    else:
        reader = csv.DictReader(io.StringIO(text))
        rows = [(i, row) for i, row in enumerate(reader, 2)]

    for lineno, row in rows:
        sender = (row.get("sender") or "").strip()
        recipient = (row.get("recipient") or "").strip()
        raw_ts = (row.get("sent_at") or "").strip()
        if not sender or not recipient:
            diagnostics.append(f"line {lineno}: missing sender/recipient, record rejected")
            continue
        try:
            ts = _parse_timestamp(raw_ts)
        except ValueError:
            diagnostics.append(
                f"line {lineno}: malformed timestamp {raw_ts!r}, record rejected"
            )
            continue
        if sender == recipient:
            continue
        if hash_salt is not None:
            sender = pseudonymize(sender, hash_salt)
            recipient = pseudonymize(recipient, hash_salt)
        records.append(MessageRecord(sender, recipient, ts))
    return records, diagnostics


def pseudonymize(person_id: str, salt: str) -> str:
    """Keyed-hash pass over raw identifiers (stable for a fixed salt)."""
    digest = hashlib.blake2s(
        person_id.encode("utf-8"), key=salt.encode("utf-8")[:32], digest_size=8
    )
    return digest.hexdigest()


def _threshold_edges(
    pair_counts: Counter,
    min_total: int,
    min_each_direction: int,
) -> List[Tuple[str, str, float]]:
    edges = []
    seen = set()
    for (a, b) in pair_counts:
        key = (a, b) if a <= b else (b, a)
        if key in seen:
            continue
        seen.add(key)
        ab = pair_counts.get((key[0], key[1]), 0)
        ba = pair_counts.get((key[1], key[0]), 0)
        total = ab + ba
        if total >= min_total and ab >= min_each_direction and ba >= min_each_direction:
            edges.append((key[0], key[1], float(total)))
    return edges


def induce_monthly(
    records: Iterable[MessageRecord],
    month: str,
    min_total: int = 4,
    min_each_direction: int = 1,
) -> CollabGraph:
    """Collaboration graph for one calendar month.

    Edge weight is the total message count for the pair. Zero surviving
    edges yields an empty graph, not an error.
    """
    counts: Counter = Counter()
    for rec in records:
        if month_label(rec.sent_at) == month:
            counts[(rec.sender, rec.recipient)] += 1
    edges = _threshold_edges(counts, min_total, min_each_direction)
    return CollabGraph.from_edges(edges, window=month)


def induce_longitudinal(
    records: Iterable[MessageRecord],
    months: Sequence[str],
    min_total: int = 4,
    min_each_direction: int = 1,
    scale_with_months: bool = True,
) -> CollabGraph:
    """Whole-period graph under the monthly rule, scaled to the period length.

    ``min_total`` is multiplied by the number of months by default, keeping
    the "strong relationship" density comparable to a single month; pass
    ``scale_with_months=False`` to apply the raw threshold. The result is
    restricted to its largest connected component.
    """
    if not months:
        raise IngestError("at least one month required")
    month_set = set(months)
    counts: Counter = Counter()
    for rec in records:
        if month_label(rec.sent_at) in month_set:
            counts[(rec.sender, rec.recipient)] += 1
    total_needed = min_total * len(months) if scale_with_months else min_total
    edges = _threshold_edges(counts, total_needed, min_each_direction)
    g = CollabGraph.from_edges(edges, window="longitudinal")
    if g.n_nodes == 0:
        return g
    return largest_connected_component(g)


def induce_series(
    records: Sequence[MessageRecord],
    months: Optional[Sequence[str]] = None,
    min_total: int = 4,
    min_each_direction: int = 1,
) -> MonthlySeries:
    """Monthly graphs for every month present (or the given months) plus the
    longitudinal graph."""
    if months is None:
        months = sorted({month_label(r.sent_at) for r in records})
    months = list(months)
    if sorted(months) != months or len(set(months)) != len(months):
        raise IngestError("months must be strictly increasing")
    graphs = {
        m: induce_monthly(records, m, min_total, min_each_direction) for m in months
    }
    longitudinal = induce_longitudinal(records, months, min_total, min_each_direction)
    return MonthlySeries(months, graphs, longitudinal)


# ---------------------------------------------------------------------------
# org snapshots
# ---------------------------------------------------------------------------


def load_org_snapshots(path_or_buffer) -> List[OrgTree]:
    """Load org trees from ``employee_id,manager_id,snapshot_date`` CSV.

    The root row has an empty manager_id. Each snapshot date becomes one
    tree; single-root and acyclicity violations raise with the offending
    members named.
    """
    if hasattr(path_or_buffer, "read"):
        fh = path_or_buffer
        reader = csv.DictReader(fh)
        rows = list(reader)
    else:
        with open(path_or_buffer, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    by_date: Dict[str, List[Tuple[str, str]]] = {}
    for row in rows:
        emp = (row.get("employee_id") or "").strip()
        mgr = (row.get("manager_id") or "").strip()
        d = (row.get("snapshot_date") or "").strip()
        if not emp or not d:
            raise IngestError(f"org row missing employee_id or snapshot_date: {row}")
        by_date.setdefault(d, []).append((emp, mgr))

    trees = []
    for d in sorted(by_date):
        pairs = by_date[d]
        roots = [emp for emp, mgr in pairs if not mgr]
        if len(roots) != 1:
            if not roots:
                raise IngestError(f"snapshot {d}: no root row (empty manager_id)")
            raise IngestError(f"snapshot {d}: multiple roots {sorted(roots)}")
        parent = {emp: mgr for emp, mgr in pairs if mgr}
        try:
            tree = OrgTree(date.fromisoformat(d), parent, roots[0])
        except GraphError as exc:
            raise IngestError(f"snapshot {d}: {exc}") from exc
        trees.append(tree)
    return trees


def org_snapshot_for_month(trees: Sequence[OrgTree], month: str) -> OrgTree:
    """Snapshot nearest the 15th of the month; exact ties go to the earlier one."""
    if not trees:
        raise IngestError("no org snapshots available")
    year, mon = (int(p) for p in month.split("-"))
    mid = date(year, mon, 15)
    return min(trees, key=lambda t: (abs((t.snapshot_date - mid).days), t.snapshot_date))
