"""The self-evolving knowledge base: an append-only store of step records.

Commits are whole trajectories and atomic — a reader either sees all records
of a commit or none. Reads go through immutable snapshots; because the store
is append-only, a snapshot is just a record-count watermark plus views into
the shared buffers, so taking one is O(1).

Persistence is UTF-8 JSON Lines, one record per line, keys matching the
StepRecord field names, floats at full round-trip precision. Files are
append-only; a trailing partial line (crash artifact) is reported as a
CorruptLine, never silently dropped.
"""

from __future__ import annotations

import io
import os
import threading
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .core import (
    DEFAULT_EMBEDDING_DIM,
    EmbeddingVector,
    ModelId,
    RoleId,
    SCHEMA_VERSION,
    StepRecord,
    ToolId,
    encode_record,
    decode_record,
    validate_record,
)
from .errors import (
    CorruptLine,
    DimensionMismatch,
    DuplicateRecordId,
    EpisodeMismatch,
    InvalidRecord,
    UnsupportedSchemaVersion,
)


def _unit_row(values: tuple[float, ...], dimension: int) -> np.ndarray:
    row = np.asarray(values, dtype=np.float64)
    norm = float(np.sqrt(row @ row))
    if norm == 0.0:
        row = np.zeros(dimension)
        row[0] = 1.0
        return row
    return row / norm


class ExperienceBase:
    """Append-only record store with role/tool indices and a dense embedding matrix.

    Single logical writer: commits serialize through an internal lock. Readers
    take snapshots and never block. When `journal` is set, every commit is
    appended (and fsynced) to that file before it becomes visible in memory.
    """

    def __init__(self, dimension: int = DEFAULT_EMBEDDING_DIM, journal: str | Path | None = None):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._records: list[StepRecord] = []
        self._emb = np.zeros((0, dimension))
        self._role_index: dict[RoleId, list[int]] = {}
        self._tool_index: dict[ToolId, list[int]] = {}
        self._ids: set[str] = set()
        self._generation = 0
        self._lock = threading.Lock()
        self._journal = Path(journal) if journal is not None else None

    def __len__(self) -> int:
        return len(self._records)

    @property
    def generation(self) -> int:
        return self._generation

    @property
    def journal(self) -> Path | None:
        return self._journal

    def append_trajectory(self, records: Sequence[StepRecord]) -> int:
        """Atomically commit one trajectory; returns the new generation number.

        Preconditions: records validated, one shared episode_id, step_index
        contiguous from 0. An empty list is a no-op.
        """
        with self._lock:
            if not records:
                return self._generation
            episode = records[0].episode_id
            seen_batch: set[str] = set()
            for i, rec in enumerate(records):
                validate_record(rec, self.dimension)
                if rec.episode_id != episode:
                    raise EpisodeMismatch(
                        f"record {rec.record_id} has episode {rec.episode_id!r}, expected {episode!r}"
                    )
                if rec.step_index != i:
                    raise EpisodeMismatch(
                        f"step_index {rec.step_index} at position {i}; must be contiguous from 0"
                    )
                if rec.record_id in self._ids or rec.record_id in seen_batch:
                    raise DuplicateRecordId(rec.record_id)
                seen_batch.add(rec.record_id)
            if self._journal is not None:
                self._append_journal(records)
            base = len(self._records)
            self._ensure_capacity(base + len(records))
            for pos, rec in enumerate(records, start=base):
                self._emb[pos] = _unit_row(rec.embedding.values, self.dimension)
                self._records.append(rec)
                self._ids.add(rec.record_id)
                self._role_index.setdefault(rec.role, []).append(pos)
                for tool in rec.tools:
                    self._tool_index.setdefault(tool, []).append(pos)
            self._generation += 1
            return self._generation

    def snapshot(self) -> "KBSnapshot":
        with self._lock:
            n = len(self._records)
            view = self._emb[:n]
            view.flags.writeable = False
            return KBSnapshot(self, n, view, self._generation)

    def persist(self) -> bytes:
        buf = io.StringIO()
        for rec in self._records:
            buf.write(encode_record(rec))
            buf.write("\n")
        return buf.getvalue().encode("utf-8")

    def dump(self, path: str | Path) -> None:
        Path(path).write_bytes(self.persist())

    @classmethod
    def load(
        cls,
        source: bytes | str | Path,
        dimension: int | None = None,
        journal: str | Path | None = None,
    ) -> "ExperienceBase":
        """Rebuild a store from a persisted stream or file path.

        Generation is reconstructed as the number of distinct episodes, in
        commit order. Unknown future schema versions are rejected.
        """
        if isinstance(source, (str, Path)):
            data = Path(source).read_bytes()
        else:
            data = source
        records = list(_parse_stream(data))
        if dimension is None:
            dimension = records[0].embedding.dimension if records else DEFAULT_EMBEDDING_DIM
        kb = cls(dimension=dimension)
        episodes_seen: set[str] = set()
        generation = 0
        for lineno, rec in enumerate(records, start=1):
            try:
                validate_record(rec, dimension)
            except InvalidRecord as exc:
                raise CorruptLine(lineno, str(exc)) from exc
            if rec.record_id in kb._ids:
                raise CorruptLine(lineno, f"duplicate record_id {rec.record_id}")
            pos = len(kb._records)
            kb._ensure_capacity(pos + 1)
            kb._emb[pos] = _unit_row(rec.embedding.values, dimension)
            kb._records.append(rec)
            kb._ids.add(rec.record_id)
            kb._role_index.setdefault(rec.role, []).append(pos)
            for tool in rec.tools:
                kb._tool_index.setdefault(tool, []).append(pos)
            if rec.episode_id not in episodes_seen:
                episodes_seen.add(rec.episode_id)
                generation += 1
        kb._generation = generation
        if journal is not None:
            kb._journal = Path(journal)
        return kb

    def _ensure_capacity(self, n: int) -> None:
        cap = self._emb.shape[0]
        if n <= cap:
            return
        new_cap = max(n, cap * 2, 64)
        grown = np.zeros((new_cap, self.dimension))
        grown[:cap] = self._emb
        self._emb = grown

    def _append_journal(self, records: Sequence[StepRecord]) -> None:
        assert self._journal is not None
        self._journal.parent.mkdir(parents=True, exist_ok=True)
        payload = "".join(encode_record(r) + "\n" for r in records).encode("utf-8")
        with open(self._journal, "ab") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())


def _parse_stream(data: bytes) -> Iterator[StepRecord]:
    text = data.decode("utf-8")
    if not text:
        return
    lines = text.split("\n")
    trailing_complete = lines and lines[-1] == ""
    if trailing_complete:
        lines = lines[:-1]
    for lineno, line in enumerate(lines, start=1):
        if line == "":
            raise CorruptLine(lineno, "blank line")
        try:
            rec = decode_record(line)
        except UnsupportedSchemaVersion:
            raise
        except Exception as exc:
            # A final unterminated line that fails to parse is the signature of
            # a crashed writer; surface it with its line number either way.
            raise CorruptLine(lineno, str(exc)) from exc
        if rec.schema_version > SCHEMA_VERSION:
            raise UnsupportedSchemaVersion(
                f"line {lineno}: schema_version {rec.schema_version} > supported {SCHEMA_VERSION}"
            )
        yield rec


@dataclass(frozen=True, eq=False)
class KBSnapshot:
    """Immutable view of an ExperienceBase at one generation.

    Holds the record-count watermark; because the base is append-only, every
    structure read through a snapshot is frozen below that watermark.
    """

    _base: ExperienceBase
    record_count: int
    embeddings: np.ndarray
    generation: int

    @property
    def dimension(self) -> int:
        return self._base.dimension

    def records(self) -> Iterator[StepRecord]:
        for i in range(self.record_count):
            yield self._base._records[i]

    def record_at(self, pos: int) -> StepRecord:
        if pos >= self.record_count:
            raise IndexError(pos)
        return self._base._records[pos]

    # Position-level queries (ascending, deterministic); the set-level wrappers
    # below are the public facet predicates.

    def positions_by_role(self, role: RoleId) -> list[int]:
        positions = self._base._role_index.get(role, [])
        return positions[: bisect_left(positions, self.record_count)]

    def positions_by_tools(self, predicted: Iterable[ToolId]) -> list[int]:
        merged: set[int] = set()
        for tool in predicted:
            positions = self._base._tool_index.get(tool, [])
            merged.update(positions[: bisect_left(positions, self.record_count)])
        return sorted(merged)

    def positions_semantic(self, query_embedding: EmbeddingVector, theta: float) -> list[int]:
        if not (0.0 < theta <= 1.0):
            raise ValueError(f"theta must lie in (0, 1], got {theta}")
        if query_embedding.dimension != self.dimension:
            raise DimensionMismatch(
                f"query dimension {query_embedding.dimension} != KB dimension {self.dimension}"
            )
        if self.record_count == 0:
            return []
        q = _unit_row(query_embedding.values, self.dimension)
        scores = kernels.snap_scores(np.asarray(kernels.cosine_scores(self.embeddings, q)))
        return [int(i) for i in np.flatnonzero(scores >= theta)]


def query_by_role(snapshot: KBSnapshot, role: RoleId) -> set[StepRecord]:
    """Exactly the records performed by `role`; unknown roles yield the empty set."""
    return {snapshot.record_at(i) for i in snapshot.positions_by_role(role)}


def query_by_tools(snapshot: KBSnapshot, predicted: Iterable[ToolId]) -> set[StepRecord]:
    """Records whose invoked tools intersect `predicted`; empty prediction yields ∅."""
    return {snapshot.record_at(i) for i in snapshot.positions_by_tools(predicted)}


def query_semantic(
    snapshot: KBSnapshot, query_embedding: EmbeddingVector, theta: float
) -> set[StepRecord]:
    """Records whose instruction embedding has cosine >= theta with the query."""
    return {snapshot.record_at(i) for i in snapshot.positions_semantic(query_embedding, theta)}
