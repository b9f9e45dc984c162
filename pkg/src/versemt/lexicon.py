"""Parallel named-entity lexicon: seed filtering, alignment projection, trimming, lookup."""

from __future__ import annotations

import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .alignment import DiagonalParams, TranslationTable, viterbi_align
from .corpus import ParallelCorpus, registry_order, tokenize
from .errors import EmptyResult, MalformedLine, MissingAligner, MissingSelectionFile, UnknownLanguage
from .fileio import atomic_write_lines

log = logging.getLogger(__name__)

SEED_LANGUAGE = "en"

# Projected surfaces below this vote count are rejected as one-off
# misalignments; entries whose English corpus frequency is 1 can only ever
# collect one vote, so they are accepted at a single consistent vote.
DEFAULT_MIN_VOTES = 2


@dataclass
class LexiconEntry:
    id: str
    surfaces: dict[str, str]
    frequency: dict[str, int]

    def surface(self, lang: str) -> str:
        return self.surfaces.get(lang, "")


@dataclass
class LexiconTable:
    entries: tuple[LexiconEntry, ...]
    languages: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _strip_punct(text: str) -> str:
    def is_punct(ch: str) -> bool:
        return unicodedata.category(ch).startswith("P")

    start, end = 0, len(text)
    while start < end and is_punct(text[start]):
        start += 1
    while end > start and is_punct(text[end - 1]):
        end -= 1
    return text[start:end]


def filter_seed_list(raw: Iterable[str], stoplist: Iterable[str] = ()) -> list[str]:
    """Clean candidate names into a sorted, deduplicated English seed list.

    Strips surrounding punctuation, drops stoplist words and entries shorter
    than 2 characters, and collapses case-insensitive duplicates keeping the
    capitalized form.
    """
    stop = {word.casefold() for word in stoplist}
    by_fold: dict[str, str] = {}
    for candidate in raw:
        name = _strip_punct(candidate.strip())
        if len(name) < 2 or name.casefold() in stop:
            continue
        fold = name.casefold()
        if fold not in by_fold:
            by_fold[fold] = name
        elif name[:1].isupper() and not by_fold[fold][:1].isupper():
            by_fold[fold] = name
    if not by_fold:
        raise EmptyResult("every candidate was filtered out")
    return sorted(by_fold.values())


def _scan_spans(tokens: Sequence[str], surface_tokens: tuple[str, ...]) -> list[tuple[int, int]]:
    """Non-overlapping occurrences of a token sequence, leftmost first."""
    spans = []
    width = len(surface_tokens)
    i = 0
    while i + width <= len(tokens):
        if tuple(tokens[i : i + width]) == surface_tokens:
            spans.append((i, i + width))
            i += width
        else:
            i += 1
    return spans


def _count_occurrences(texts: Iterable[Sequence[str]], surface: str) -> int:
    surface_tokens = tuple(surface.split())
    if not surface_tokens:
        return 0
    return sum(len(_scan_spans(tokens, surface_tokens)) for tokens in texts)


def assemble_table(
    seed: Sequence[str],
    corpus: ParallelCorpus,
    aligners: Mapping[str, TranslationTable],
    params: DiagonalParams = DiagonalParams(),
    min_votes: int = DEFAULT_MIN_VOTES,
) -> LexiconTable:
    """Project an English seed list across the corpus languages via alignment.

    For each seed entry and language, Viterbi-linked target tokens are
    collected over every verse whose English side contains the seed surface;
    the majority candidate becomes the surface once it has enough votes.
    Multi-token candidates count only when the linked tokens are contiguous.
    """
    if SEED_LANGUAGE not in corpus.languages:
        raise UnknownLanguage(f"corpus has no {SEED_LANGUAGE!r} side")
    target_langs = [lang for lang in corpus.languages if lang != SEED_LANGUAGE]
    missing = [lang for lang in target_langs if lang not in aligners]
    if missing:
        raise MissingAligner(f"no aligner for language(s): {', '.join(missing)}")

    en_tokens = [tokenize(text) for text in corpus.texts(SEED_LANGUAGE)]
    tgt_tokens = {lang: [tokenize(text) for text in corpus.texts(lang)] for lang in target_langs}

    surfaces = [(name, tuple(name.split())) for name in sorted(set(seed))]
    en_spans: list[list[tuple[int, int, int]]] = []  # per entry: (verse_idx, start, end)
    for name, surface_tokens in surfaces:
        spans = [
            (v, a, b)
            for v, tokens in enumerate(en_tokens)
            for a, b in _scan_spans(tokens, surface_tokens)
        ]
        en_spans.append(spans)
        if not spans:
            log.warning("SeedNotInCorpus: %r has no occurrence in the English side", name)

    # One Viterbi pass per (verse, language), shared by all entries.
    votes: list[dict[str, Counter[str]]] = [
        {lang: Counter() for lang in target_langs} for _ in surfaces
    ]
    wanted_verses = {v for spans in en_spans for v, _, _ in spans}
    for lang in target_langs:
        table = aligners[lang]
        links_by_verse: dict[int, dict[int, list[int]]] = {}
        for v in sorted(wanted_verses):
            if not en_tokens[v] or not tgt_tokens[lang][v]:
                continue
            by_src: dict[int, list[int]] = {}
            for link in viterbi_align(table, params, (en_tokens[v], tgt_tokens[lang][v])):
                by_src.setdefault(link.src_index, []).append(link.tgt_index)
            links_by_verse[v] = by_src
        for entry_idx, spans in enumerate(en_spans):
            for v, a, b in spans:
                by_src = links_by_verse.get(v, {})
                linked = sorted(j for i in range(a, b) for j in by_src.get(i, []))
                if not linked:
                    continue
                if linked[-1] - linked[0] + 1 != len(set(linked)):
                    continue  # non-contiguous projection, no vote
                candidate = " ".join(tgt_tokens[lang][v][linked[0] : linked[-1] + 1])
                votes[entry_idx][lang][candidate] += 1

    entries: list[LexiconEntry] = []
    width = max(4, len(str(len(surfaces))))
    for entry_idx, (name, _) in enumerate(surfaces):
        en_freq = len(en_spans[entry_idx])
        entry_surfaces = {SEED_LANGUAGE: name}
        entry_freq = {SEED_LANGUAGE: en_freq}
        required = 1 if en_freq == 1 else min_votes
        for lang in target_langs:
            counter = votes[entry_idx][lang]
            if counter:
                top = max(counter.values())
                best = min(c for c, n in counter.items() if n == top)
                if len(counter) > 1:
                    variants = ", ".join(
                        f"{c}:{n}" for c, n in sorted(counter.items(), key=lambda kv: -kv[1])
                    )
                    log.debug("%s/%s surface variants: %s", name, lang, variants)
                if top >= required:
                    entry_surfaces[lang] = best
                    entry_freq[lang] = _count_occurrences(tgt_tokens[lang], best)
        entries.append(
            LexiconEntry(
                id=f"ne{entry_idx + 1:0{width}d}",
                surfaces=entry_surfaces,
                frequency=entry_freq,
            )
        )
    languages = tuple([SEED_LANGUAGE] + target_langs)
    return LexiconTable(entries=tuple(entries), languages=languages)


@dataclass(frozen=True)
class TrimPolicy:
    kind: str  # none | frequency-equals-one | manual-selection
    selection_file: Path | None = None

    @classmethod
    def none(cls) -> "TrimPolicy":
        return cls(kind="none")

    @classmethod
    def frequency_one(cls) -> "TrimPolicy":
        return cls(kind="frequency-equals-one")

    @classmethod
    def manual(cls, path: str | Path) -> "TrimPolicy":
        return cls(kind="manual-selection", selection_file=Path(path))


def trim_table(
    table: LexiconTable, policy: TrimPolicy, corpus: ParallelCorpus | None = None
) -> LexiconTable:
    """Keep the frequency-1 tail, a manual selection, or everything."""
    if policy.kind == "none":
        return table
    if policy.kind == "frequency-equals-one":
        if corpus is not None:
            en_texts = [tokenize(text) for text in corpus.texts(SEED_LANGUAGE)]
            kept = tuple(
                e for e in table.entries if _count_occurrences(en_texts, e.surface(SEED_LANGUAGE)) == 1
            )
        else:
            kept = tuple(e for e in table.entries if e.frequency.get(SEED_LANGUAGE) == 1)
        return LexiconTable(entries=kept, languages=table.languages)
    if policy.kind == "manual-selection":
        if policy.selection_file is None or not policy.selection_file.exists():
            raise MissingSelectionFile(f"selection file not found: {policy.selection_file}")
        selected = {
            line.strip()
            for line in policy.selection_file.read_text(encoding="utf-8").splitlines()
            if line.strip()
        }
        kept = tuple(e for e in table.entries if e.surface(SEED_LANGUAGE) in selected)
        return LexiconTable(entries=kept, languages=table.languages)
    raise ValueError(f"unknown trim policy {policy.kind!r}")


def lookup_rows(
    table: LexiconTable, lang: str, sentence: Sequence[str]
) -> list[tuple[tuple[int, int], LexiconEntry]]:
    """Leftmost-longest, case-sensitive, non-overlapping surface matches.

    Returns (token span, entry) pairs ordered by span start.
    """
    if lang not in table.languages:
        raise UnknownLanguage(f"language {lang!r} not in lexicon table")
    by_first: dict[str, list[tuple[tuple[str, ...], LexiconEntry]]] = {}
    for entry in table.entries:
        surface = entry.surface(lang)
        if not surface:
            continue
        surface_tokens = tuple(surface.split())
        by_first.setdefault(surface_tokens[0], []).append((surface_tokens, entry))
    for candidates in by_first.values():
        candidates.sort(key=lambda item: -len(item[0]))

    matches: list[tuple[tuple[int, int], LexiconEntry]] = []
    i = 0
    while i < len(sentence):
        for surface_tokens, entry in by_first.get(sentence[i], ()):
            end = i + len(surface_tokens)
            if end <= len(sentence) and tuple(sentence[i:end]) == surface_tokens:
                matches.append(((i, end), entry))
                i = end
                break
        else:
            i += 1
    return matches


# ---------------------------------------------------------------------------
# Table file: TSV with id + en + remaining languages in family-table order;
# per-language frequencies in a sibling TSV.
# ---------------------------------------------------------------------------


def _column_order(languages: Iterable[str]) -> list[str]:
    rest = [lang for lang in registry_order(languages) if lang != SEED_LANGUAGE]
    return [SEED_LANGUAGE] + rest


def save_lexicon(table: LexiconTable, path: str | Path, freq_path: str | Path | None = None) -> None:
    columns = _column_order(table.languages)
    lines = ["id\t" + "\t".join(columns)]
    for entry in table.entries:
        lines.append(entry.id + "\t" + "\t".join(entry.surface(lang) for lang in columns))
    atomic_write_lines(path, lines)
    if freq_path is not None:
        freq_lines = [
            f"{entry.id}\t{lang}\t{entry.frequency[lang]}"
            for entry in table.entries
            for lang in columns
            if lang in entry.frequency
        ]
        atomic_write_lines(freq_path, freq_lines)


def load_lexicon(path: str | Path, freq_path: str | Path | None = None) -> LexiconTable:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("id\t"):
        raise MalformedLine(f"{path}: missing `id<TAB>...` header")
    columns = lines[0].split("\t")[1:]
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(columns) + 1:
            raise MalformedLine(f"{path}:{lineno}: expected {len(columns) + 1} columns")
        surfaces = {lang: cell for lang, cell in zip(columns, fields[1:]) if cell}
        entries.append(LexiconEntry(id=fields[0], surfaces=surfaces, frequency={}))
    by_id = {entry.id: entry for entry in entries}
    if freq_path is not None and Path(freq_path).exists():
        for lineno, raw in enumerate(Path(freq_path).read_text(encoding="utf-8").splitlines(), 1):
            fields = raw.split("\t")
            if len(fields) != 3:
                raise MalformedLine(f"{freq_path}:{lineno}: expected `id<TAB>lang<TAB>count`")
            if fields[0] in by_id:
                by_id[fields[0]].frequency[fields[1]] = int(fields[2])
    return LexiconTable(entries=tuple(entries), languages=tuple(columns))
