"""Embedded relational persistence for items, cards, runs and plans.

Tables are narrow: identity plus the columns the API filters on;
everything else rides in a JSON column. Writers use per-stage
transactions; API readers see committed snapshots only.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from contextlib import contextmanager
from pathlib import Path

from ..analysis.cards import ThreatCard
from ..errors import UnknownIdError
from ..ingestion.items import IntelItem
from ..planner import RiskPlan

_SCHEMA = """
CREATE TABLE IF NOT EXISTS intel_items (
    id TEXT PRIMARY KEY,
    title TEXT NOT NULL,
    source_type TEXT NOT NULL,
    relevance REAL,
    json TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS threat_cards (
    id TEXT PRIMARY KEY,
    level TEXT NOT NULL,
    stride TEXT NOT NULL,
    final REAL NOT NULL,
    json TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS runs (
    run_id TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    status TEXT NOT NULL,
    started TEXT NOT NULL,
    finished TEXT,
    json TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS plans (
    id TEXT PRIMARY KEY,
    created_at TEXT NOT NULL,
    json TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_cards_level ON threat_cards(level);
CREATE INDEX IF NOT EXISTS idx_cards_stride ON threat_cards(stride);
CREATE INDEX IF NOT EXISTS idx_items_relevance ON intel_items(relevance);
"""


class Storage:
    def __init__(self, db_path: str | Path = ":memory:"):
        self._conn = sqlite3.connect(str(db_path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.Lock()
        with self.transaction():
            self._conn.executescript(_SCHEMA)

    @contextmanager
    def transaction(self):
        """Per-stage write transaction: all or nothing."""
        with self._lock:
            try:
                yield self._conn
                self._conn.commit()
            except Exception:
                self._conn.rollback()
                raise

    def close(self) -> None:
        self._conn.close()

    # -- intel items -----------------------------------------------------

    def upsert_items(self, items: list[IntelItem]) -> None:
        with self.transaction() as conn:
            conn.executemany(
                "INSERT OR REPLACE INTO intel_items (id, title, source_type, relevance, json) VALUES (?, ?, ?, ?, ?)",
                [
                    (i.id, i.title, i.source_type.value, i.relevance, json.dumps(i.to_dict()))
                    for i in items
                ],
            )

    def insert_items_ignore_existing(self, items: list[IntelItem]) -> None:
        """Gather-stage insert: ids are content-derived, so an existing
        row is the same item, possibly already relevance-scored; keep it."""
        with self.transaction() as conn:
            conn.executemany(
                "INSERT OR IGNORE INTO intel_items (id, title, source_type, relevance, json) VALUES (?, ?, ?, ?, ?)",
                [
                    (i.id, i.title, i.source_type.value, i.relevance, json.dumps(i.to_dict()))
                    for i in items
                ],
            )

    def get_item(self, item_id: str) -> IntelItem:
        row = self._conn.execute("SELECT json FROM intel_items WHERE id = ?", (item_id,)).fetchone()
        if row is None:
            raise UnknownIdError(item_id)
        return IntelItem.from_dict(json.loads(row["json"]))

    def list_items(self, min_relevance: float | None = None) -> list[IntelItem]:
        if min_relevance is None:
            rows = self._conn.execute("SELECT json FROM intel_items ORDER BY id").fetchall()
        else:
            rows = self._conn.execute(
                "SELECT json FROM intel_items WHERE relevance >= ? ORDER BY id", (min_relevance,)
            ).fetchall()
        return [IntelItem.from_dict(json.loads(r["json"])) for r in rows]

    # -- threat cards ----------------------------------------------------

    def upsert_cards(self, cards: list[ThreatCard]) -> None:
        with self.transaction() as conn:
            conn.executemany(
                "INSERT OR REPLACE INTO threat_cards (id, level, stride, final, json) VALUES (?, ?, ?, ?, ?)",
                [
                    (c.id, c.scored.level.value, c.stride.value, c.scored.final, json.dumps(c.to_dict()))
                    for c in cards
                ],
            )

    def get_card(self, card_id: str) -> ThreatCard:
        row = self._conn.execute("SELECT json FROM threat_cards WHERE id = ?", (card_id,)).fetchone()
        if row is None:
            raise UnknownIdError(card_id)
        return ThreatCard.from_dict(json.loads(row["json"]))

    def list_cards(self, level: str | None = None, stride: str | None = None) -> list[ThreatCard]:
        query = "SELECT json FROM threat_cards"
        conditions, params = [], []
        if level:
            conditions.append("level = ?")
            params.append(level)
        if stride:
            conditions.append("stride = ?")
            params.append(stride)
        if conditions:
            query += " WHERE " + " AND ".join(conditions)
        query += " ORDER BY final DESC, id"
        rows = self._conn.execute(query, params).fetchall()
        return [ThreatCard.from_dict(json.loads(r["json"])) for r in rows]

    # -- runs --------------------------------------------------------------

    def save_run(self, run_dict: dict) -> None:
        with self.transaction() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO runs (run_id, kind, status, started, finished, json) VALUES (?, ?, ?, ?, ?, ?)",
                (
                    run_dict["run_id"],
                    run_dict["kind"],
                    run_dict["status"],
                    run_dict["started"],
                    run_dict.get("finished"),
                    json.dumps(run_dict),
                ),
            )

    def get_run(self, run_id: str) -> dict:
        row = self._conn.execute("SELECT json FROM runs WHERE run_id = ?", (run_id,)).fetchone()
        if row is None:
            raise UnknownIdError(run_id)
        return json.loads(row["json"])

    def list_runs(self) -> list[dict]:
        rows = self._conn.execute("SELECT json FROM runs ORDER BY started DESC").fetchall()
        return [json.loads(r["json"]) for r in rows]

    # -- plans ---------------------------------------------------------------

    def save_plan(self, plan: RiskPlan) -> None:
        with self.transaction() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO plans (id, created_at, json) VALUES (?, ?, ?)",
                (plan.id, plan.created_at, json.dumps(plan.to_dict())),
            )

    def get_plan(self, plan_id: str) -> RiskPlan:
        row = self._conn.execute("SELECT json FROM plans WHERE id = ?", (plan_id,)).fetchone()
        if row is None:
            raise UnknownIdError(plan_id)
        return RiskPlan.from_dict(json.loads(row["json"]))

    def list_plans(self) -> list[RiskPlan]:
        rows = self._conn.execute("SELECT json FROM plans ORDER BY created_at DESC").fetchall()
        return [RiskPlan.from_dict(json.loads(r["json"])) for r in rows]
