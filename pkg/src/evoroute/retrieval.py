"""Candidate assembly for a new sub-task.

Retrieval is disjunctive: a record qualifies by matching at least one of three
facets — same agent role, instruction similarity above the threshold, or
overlap with the predicted tool set. The union keeps the evidence pool broad;
per-record facet tags are kept for diagnostics and ablations.

Tool prediction is a two-stage hybrid: a keyword dictionary first, then an
optional pluggable predictor only when no keyword fires. Prediction failures
never fail routing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .core import EmbeddingVector, Facet, RoleId, RouterConfig, StepRecord, ToolId
from .embedding import Embedder, tokenize
from .errors import FallbackUnavailable, InvalidConfig
from .experience_base import KBSnapshot

log = logging.getLogger(__name__)

# instruction -> predicted tools; used only when the keyword stage comes up empty
ToolPredictor = Callable[[str], Iterable[ToolId]]


@dataclass(frozen=True)
class SubTaskContext:
    """The active role and instruction of the step being routed. The embedding
    is computed once per route call and reused at commit time."""

    role: RoleId
    instruction: str
    embedding: EmbeddingVector
    episode_id: str
    step_index: int


def build_context(
    role: RoleId,
    instruction: str,
    embedder: Embedder,
    episode_id: str,
    step_index: int,
) -> SubTaskContext:
    return SubTaskContext(
        role=role,
        instruction=instruction,
        embedding=embedder.embed(instruction),
        episode_id=episode_id,
        step_index=step_index,
    )


@dataclass(frozen=True)
class CandidateSet:
    """Union of the three facet retrievals, in knowledge-base order."""

    records: tuple[StepRecord, ...]
    facet_tags: Mapping[str, frozenset[Facet]]
    predicted_tools: frozenset[ToolId]

    def __len__(self) -> int:
        return len(self.records)

    def models(self) -> set[str]:
        return {r.model for r in self.records}


class KeywordTable:
    """Lowercase trigger keyword -> tool id."""

    def __init__(self, entries: Mapping[str, ToolId]):
        table: dict[str, ToolId] = {}
        for keyword, tool in entries.items():
            if not keyword:
                raise InvalidConfig("empty keyword in keyword table")
            if keyword != keyword.lower():
                raise InvalidConfig(f"keyword {keyword!r} must be lowercase")
            if keyword in table:
                raise InvalidConfig(f"duplicate keyword {keyword!r}")
            if not tool:
                raise InvalidConfig(f"keyword {keyword!r} maps to an empty tool id")
            table[keyword] = tool
        self._table = table

    def __contains__(self, keyword: str) -> bool:
        return keyword in self._table

    def __getitem__(self, keyword: str) -> ToolId:
        return self._table[keyword]

    def items(self):
        return self._table.items()

    @classmethod
    def from_file(cls, path: str | Path) -> "KeywordTable":
        """One `keyword = tool` entry per line; blank lines and #-comments allowed."""
        entries: dict[str, ToolId] = {}
        for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidConfig(f"{path}:{lineno}: expected `keyword = tool`")
            keyword, _, tool = line.partition("=")
            entries[keyword.strip()] = tool.strip()
        return cls(entries)


DEFAULT_KEYWORDS = KeywordTable(
    {
        "search": "web_search",
        "browse": "web_search",
        "fetch": "web_search",
        "run": "code_interpreter",
        "plot": "code_interpreter",
        "execute": "code_interpreter",
        "compute": "code_interpreter",
    }
)


def predict_tools(
    instruction: str,
    table: KeywordTable = DEFAULT_KEYWORDS,
    fallback: ToolPredictor | None = None,
) -> frozenset[ToolId]:
    """Two-stage tool prediction.

    Stage 1 matches table keywords as whole lowercase tokens (same tokenization
    as the embedder, so "research" never triggers "search"). Stage 2 consults
    `fallback` only when stage 1 finds nothing; a failing fallback is logged
    and treated as no prediction.
    """
    hits = {table[token] for token in tokenize(instruction) if token in table}
    if hits:
        return frozenset(hits)
    if fallback is None:
        return frozenset()
    try:
        return frozenset(fallback(instruction))
    except Exception as exc:  # routing must not fail on prediction failure
        log.warning("tool predictor fallback failed: %s", exc)
        if not isinstance(exc, FallbackUnavailable):
            log.debug("fallback raised non-FallbackUnavailable error", exc_info=exc)
        return frozenset()


def retrieve_candidates(
    ctx: SubTaskContext,
    snapshot: KBSnapshot,
    config: RouterConfig,
    table: KeywordTable = DEFAULT_KEYWORDS,
    fallback: ToolPredictor | None = None,
) -> CandidateSet:
    """Union of the enabled facet retrievals against one snapshot.

    Facets can be masked through config.facets (ablation support); the default
    enables all three. The result records which facets matched each record.
    """
    tags: dict[int, set[Facet]] = {}

    def mark(positions: Iterable[int], facet: Facet) -> None:
        for pos in positions:
            tags.setdefault(pos, set()).add(facet)

    predicted: frozenset[ToolId] = frozenset()
    if Facet.AGENT in config.facets:
        mark(snapshot.positions_by_role(ctx.role), Facet.AGENT)
    if Facet.SEMANTIC in config.facets:
        mark(snapshot.positions_semantic(ctx.embedding, config.theta_sim), Facet.SEMANTIC)
    if Facet.TOOL in config.facets:
        predicted = predict_tools(ctx.instruction, table, fallback)
        mark(snapshot.positions_by_tools(predicted), Facet.TOOL)

    ordered = sorted(tags)
    records = tuple(snapshot.record_at(pos) for pos in ordered)
    facet_tags = {
        rec.record_id: frozenset(tags[pos]) for pos, rec in zip(ordered, records)
    }
    return CandidateSet(records=records, facet_tags=facet_tags, predicted_tools=predicted)
