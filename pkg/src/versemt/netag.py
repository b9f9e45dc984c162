"""Order-preserving named-entity placeholders: tagging, restoration, order checking."""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import UnknownPlaceholder
from .fileio import atomic_write_lines
from .lexicon import LexiconTable, lookup_rows

log = logging.getLogger(__name__)

PLACEHOLDER_RE = re.compile(r"^\$NE([1-9][0-9]*)$")


def placeholder(index: int) -> str:
    return f"$NE{index}"


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple[str, ...]
    placeholder_count: int

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class DecodeTable:
    """Placeholder index -> (source surface, target surface)."""

    mapping: dict[int, tuple[str, str]]

    def target(self, index: int) -> str:
        if index not in self.mapping:
            raise UnknownPlaceholder(f"$NE{index} has no decode entry")
        return self.mapping[index][1]


def _replace_spans(
    tokens: Sequence[str], spans: Sequence[tuple[tuple[int, int], int]]
) -> tuple[str, ...]:
    """Replace each (start, end) token span with its numbered placeholder."""
    out: list[str] = []
    by_start = {start: (end, index) for (start, end), index in spans}
    i = 0
    while i < len(tokens):
        if i in by_start:
            end, index = by_start[i]
            out.append(placeholder(index))
            i = end
        else:
            out.append(tokens[i])
            i += 1
    return tuple(out)


def _find_unconsumed(
    tokens: Sequence[str], surface_tokens: tuple[str, ...], consumed: list[tuple[int, int]]
) -> tuple[int, int] | None:
    width = len(surface_tokens)
    for start in range(len(tokens) - width + 1):
        end = start + width
        if any(start < c_end and c_start < end for c_start, c_end in consumed):
            continue
        if tuple(tokens[start:end]) == surface_tokens:
            return (start, end)
    return None


def tag_training_pair(
    src: Sequence[str],
    tgt: Sequence[str],
    table: LexiconTable,
    src_lang: str,
    tgt_lang: str,
) -> tuple[TaggedSentence, TaggedSentence, DecodeTable]:
    """Tag entities as $NE1..$NEk on both sides of a training pair.

    Source matches are numbered in order of appearance; each consumes the
    leftmost unconsumed occurrence of its target surface. Matches whose target
    surface is missing from the table or the target sentence stay untagged on
    both sides, and the surviving indices are renumbered densely.
    """
    consumed: list[tuple[int, int]] = []
    kept: list[tuple[tuple[int, int], tuple[int, int], str, str]] = []
    for span, entry in lookup_rows(table, src_lang, src):
        tgt_surface = entry.surface(tgt_lang)
        if not tgt_surface:
            log.debug("entry %s has no %s surface; left untagged", entry.id, tgt_lang)
            continue
        tgt_span = _find_unconsumed(tgt, tuple(tgt_surface.split()), consumed)
        if tgt_span is None:
            log.debug("surface %r not free in target; left untagged", tgt_surface)
            continue
        consumed.append(tgt_span)
        kept.append((span, tgt_span, " ".join(src[span[0] : span[1]]), tgt_surface))

    mapping: dict[int, tuple[str, str]] = {}
    src_spans: list[tuple[tuple[int, int], int]] = []
    tgt_spans: list[tuple[tuple[int, int], int]] = []
    for index, (src_span, tgt_span, src_surface, tgt_surface) in enumerate(kept, start=1):
        mapping[index] = (src_surface, tgt_surface)
        src_spans.append((src_span, index))
        tgt_spans.append((tgt_span, index))
    tagged_src = TaggedSentence(_replace_spans(src, src_spans), len(kept))
    tagged_tgt = TaggedSentence(_replace_spans(tgt, tgt_spans), len(kept))
    return tagged_src, tagged_tgt, DecodeTable(mapping)


def tag_source(
    src: Sequence[str],
    table: LexiconTable,
    src_lang: str,
    tgt_lang: str,
) -> tuple[TaggedSentence, DecodeTable]:
    """Tag a source sentence for translation; decode targets come from the table."""
    mapping: dict[int, tuple[str, str]] = {}
    spans: list[tuple[tuple[int, int], int]] = []
    for span, entry in lookup_rows(table, src_lang, src):
        tgt_surface = entry.surface(tgt_lang)
        if not tgt_surface:
            continue
        index = len(mapping) + 1
        mapping[index] = (" ".join(src[span[0] : span[1]]), tgt_surface)
        spans.append((span, index))
    return TaggedSentence(_replace_spans(src, spans), len(mapping)), DecodeTable(mapping)


def restore_placeholders(translated: Sequence[str], decode: DecodeTable) -> list[str]:
    """Replace every $NEi token with its decode-table target surface."""
    out: list[str] = []
    for token in translated:
        match = PLACEHOLDER_RE.match(token)
        if match:
            out.extend(decode.target(int(match.group(1))).split())
        else:
            out.append(token)
    return out


@dataclass(frozen=True)
class EntityJudgment:
    set_correct: bool
    order_correct: bool
    missing: tuple[str, ...]
    spurious: tuple[str, ...]


def _surface_sequence(tokens: Sequence[str], surfaces: list[tuple[str, ...]]) -> list[str]:
    """Left-to-right, longest-first scan for decode-table surfaces."""
    ordered = sorted(surfaces, key=len, reverse=True)
    found: list[str] = []
    i = 0
    while i < len(tokens):
        for surface_tokens in ordered:
            end = i + len(surface_tokens)
            if end <= len(tokens) and tuple(tokens[i:end]) == surface_tokens:
                found.append(" ".join(surface_tokens))
                i = end
                break
        else:
            i += 1
    return found


def _ordered_diff(seq: list[str], deficit: Counter[str]) -> tuple[str, ...]:
    remaining = Counter(deficit)
    out: list[str] = []
    for surface in seq:
        if remaining[surface] > 0:
            remaining[surface] -= 1
            out.append(surface)
    return tuple(out)


def check_entity_order(
    hyp: Sequence[str], ref: Sequence[str], decode: DecodeTable
) -> EntityJudgment:
    """Compare the multiset and ordering of decode-table entities in hyp vs ref."""
    surfaces = sorted({tuple(tgt.split()) for _, tgt in decode.mapping.values() if tgt})
    hyp_seq = _surface_sequence(hyp, surfaces)
    ref_seq = _surface_sequence(ref, surfaces)
    hyp_counts = Counter(hyp_seq)
    ref_counts = Counter(ref_seq)
    return EntityJudgment(
        set_correct=hyp_counts == ref_counts,
        order_correct=hyp_seq == ref_seq,
        missing=_ordered_diff(ref_seq, ref_counts - hyp_counts),
        spurious=_ordered_diff(hyp_seq, hyp_counts - ref_counts),
    )


# ---------------------------------------------------------------------------
# Decode sidecar: JSON Lines, one record per sentence.
# ---------------------------------------------------------------------------


def write_decode_sidecar(tables: Iterable[DecodeTable], path: str | Path) -> None:
    lines = []
    for lineno, decode in enumerate(tables, start=1):
        record = {
            "line": lineno,
            "map": {
                str(i): {"src": src, "tgt": tgt} for i, (src, tgt) in sorted(decode.mapping.items())
            },
        }
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    atomic_write_lines(path, lines)


def read_decode_sidecar(path: str | Path) -> list[DecodeTable]:
    tables: list[DecodeTable] = []
    with Path(path).open(encoding="utf-8") as handle:
        for raw in handle:
            if not raw.strip():
                continue
            record = json.loads(raw)
            mapping = {
                int(i): (cell["src"], cell["tgt"]) for i, cell in record.get("map", {}).items()
            }
            tables.append(DecodeTable(mapping))
    return tables
