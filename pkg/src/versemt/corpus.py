"""Verse-aligned multilingual corpus: language registry, ingestion, alignment, splits, stats."""

from __future__ import annotations

import logging
import math
import random
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import BadRatios, DuplicateVerseId, EmptyFile, MalformedLine, UnknownLanguage
from .fileio import atomic_write_lines

log = logging.getLogger(__name__)

FAMILIES = (
    "germanic",
    "slavic",
    "romance",
    "albanian",
    "hellenic",
    "italic",
    "uralic",
    "celtic",
)


@dataclass(frozen=True)
class Language:
    code: str
    family: str


# The 23 European languages, grouped by family, in registry order. Polish and
# Portuguese get distinct codes (pl, pt); Ukrainian is registered as uk.
_FAMILY_TABLE = (
    ("germanic", ("de", "dn", "dt", "no", "sw", "en")),
    ("slavic", ("cr", "cz", "pl", "ru", "uk", "bg")),
    ("romance", ("es", "fr", "it", "pt", "ro")),
    ("albanian", ("ab",)),
    ("hellenic", ("gk",)),
    ("italic", ("ln",)),
    ("uralic", ("fn", "hg")),
    ("celtic", ("ws",)),
)

REGISTRY: dict[str, Language] = {
    code: Language(code, family) for family, codes in _FAMILY_TABLE for code in codes
}

# "ur" is accepted as a legacy spelling of Ukrainian. "po" is ambiguous
# (Polish vs Portuguese) and deliberately not aliased.
ALIASES = {"ur": "uk"}
_AMBIGUOUS = {"po": ("pl", "pt")}


def get_language(code: str) -> Language:
    """Resolve a language code against the registry (aliases accepted)."""
    code = ALIASES.get(code, code)
    if code in _AMBIGUOUS:
        options = " or ".join(_AMBIGUOUS[code])
        raise UnknownLanguage(f"language code {code!r} is ambiguous; use {options}")
    if code not in REGISTRY:
        raise UnknownLanguage(f"unknown language code {code!r}")
    return REGISTRY[code]


def languages_in_family(family: str) -> tuple[Language, ...]:
    if family not in FAMILIES:
        raise UnknownLanguage(f"unknown family {family!r}")
    return tuple(lang for lang in REGISTRY.values() if lang.family == family)


def registry_order(codes: Iterable[str]) -> list[str]:
    """Sort language codes into registry (family table) order."""
    order = {code: i for i, code in enumerate(REGISTRY)}
    resolved = [get_language(c).code for c in codes]
    return sorted(resolved, key=order.__getitem__)


def _is_separable_punct(ch: str) -> bool:
    # Connector punctuation (e.g. "_") stays attached so reserved tokens such
    # as __opt_src_fr survive re-tokenization.
    cat = unicodedata.category(ch)
    return cat.startswith("P") and cat != "Pc"


def tokenize(text: str) -> list[str]:
    """Split on Unicode whitespace, then peel leading/trailing punctuation
    into standalone tokens ("Noah," -> ["Noah", ","])."""
    tokens: list[str] = []
    for chunk in text.split():
        head: list[str] = []
        tail: list[str] = []
        while chunk and _is_separable_punct(chunk[0]):
            head.append(chunk[0])
            chunk = chunk[1:]
        while chunk and _is_separable_punct(chunk[-1]):
            tail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(head)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(tail))
    return tokens


@dataclass(frozen=True)
class Verse:
    id: str
    texts: Mapping[str, str]

    def text(self, lang: str) -> str:
        return self.texts[lang]


@dataclass(frozen=True)
class ParallelCorpus:
    verses: tuple[Verse, ...]
    languages: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.verses)

    def ids(self) -> list[str]:
        return [v.id for v in self.verses]

    def texts(self, lang: str) -> list[str]:
        if lang not in self.languages:
            raise UnknownLanguage(f"language {lang!r} not in corpus")
        return [v.text(lang) for v in self.verses]

    def restricted(self, ids: Iterable[str]) -> "ParallelCorpus":
        keep = set(ids)
        return ParallelCorpus(
            verses=tuple(v for v in self.verses if v.id in keep),
            languages=self.languages,
        )


def ingest_language_file(path: str | Path, lang: str) -> dict[str, str]:
    """Read a ``verse_id<TAB>text`` TSV into an id -> NFC-normalized text map."""
    get_language(lang)
    path = Path(path)
    verses: dict[str, str] = {}
    with path.open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedLine(
                    f"{path}:{lineno}: expected 2 tab-separated columns, got {len(fields)}"
                )
            verse_id = fields[0].strip()
            if not verse_id:
                raise MalformedLine(f"{path}:{lineno}: empty verse id")
            if verse_id in verses:
                raise DuplicateVerseId(f"{path}:{lineno}: duplicate verse id {verse_id!r}")
            verses[verse_id] = unicodedata.normalize("NFC", fields[1]).strip()
    if not verses:
        raise EmptyFile(f"{path}: no records")
    return verses


def intersect_alignment(maps: Mapping[str, Mapping[str, str]]) -> ParallelCorpus:
    """Align per-language verse maps on the verse ids present in every map."""
    if not maps:
        raise ValueError("at least one language map is required")
    languages = tuple(registry_order(maps.keys()))
    common: set[str] | None = None
    for verse_map in maps.values():
        ids = set(verse_map)
        common = ids if common is None else common & ids
    assert common is not None
    if not common:
        log.warning("EmptyIntersection: no verse id is shared by all %d languages", len(maps))
    verses = tuple(
        Verse(id=vid, texts={lang: maps[lang][vid] for lang in languages})
        for vid in sorted(common)
    )
    return ParallelCorpus(verses=verses, languages=languages)


@dataclass(frozen=True)
class SplitAssignment:
    train: frozenset[str]
    val: frozenset[str]
    test: frozenset[str]
    ratios: tuple[float, float, float]
    seed: int


def split_corpus(
    corpus: ParallelCorpus, ratios: tuple[float, float, float], seed: int
) -> SplitAssignment:
    """Deterministically partition verse ids into train/val/test by ratio.

    A seeded permutation of the sorted ids is cut at cumulative ratio
    boundaries (floor for train and val, remainder test), so sizes match the
    ratios within one verse and all languages share the split.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise BadRatios(f"ratios must be three positive fractions summing to 1.0, got {ratios!r}")
    ids = sorted(corpus.ids())
    rng = random.Random(seed)
    rng.shuffle(ids)
    n = len(ids)
    # Cumulative boundaries keep every part within one verse of its ratio; the
    # epsilon absorbs float noise in ratio sums (0.75 + 0.15 != 0.9 exactly).
    cut1 = math.floor(ratios[0] * n + 1e-9)
    cut2 = math.floor((ratios[0] + ratios[1]) * n + 1e-9)
    return SplitAssignment(
        train=frozenset(ids[:cut1]),
        val=frozenset(ids[cut1:cut2]),
        test=frozenset(ids[cut2:]),
        ratios=(ratios[0], ratios[1], ratios[2]),
        seed=seed,
    )


@dataclass(frozen=True)
class CorpusStats:
    verse_count: int
    token_count: int
    unique_token_count: int
    log10_token_count: float | None


def corpus_stats(corpus: ParallelCorpus, lang: str) -> CorpusStats:
    """Verse/token counts for one language; log10 token count to 2 decimals."""
    texts = corpus.texts(lang)
    total = 0
    vocab: set[str] = set()
    for text in texts:
        tokens = tokenize(text)
        total += len(tokens)
        vocab.update(tokens)
    log10 = round(math.log10(total), 2) if total > 0 else None
    return CorpusStats(
        verse_count=len(texts),
        token_count=total,
        unique_token_count=len(vocab),
        log10_token_count=log10,
    )


# ---------------------------------------------------------------------------
# On-disk formats: per-language TSV store, split TSV, stats TSV report.
# ---------------------------------------------------------------------------


def write_language_file(verse_map: Mapping[str, str], path: str | Path) -> None:
    lines = [f"{vid}\t{verse_map[vid]}" for vid in sorted(verse_map)]
    atomic_write_lines(path, lines)


def write_corpus_dir(corpus: ParallelCorpus, directory: str | Path) -> None:
    directory = Path(directory)
    for lang in corpus.languages:
        write_language_file({v.id: v.text(lang) for v in corpus.verses}, directory / f"{lang}.tsv")


def read_corpus_dir(directory: str | Path) -> ParallelCorpus:
    """Load every ``<lang>.tsv`` in a directory and align on shared verse ids."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.tsv"))
    if not paths:
        raise EmptyFile(f"{directory}: no <lang>.tsv files")
    maps = {path.stem: ingest_language_file(path, path.stem) for path in paths}
    return intersect_alignment(maps)


def write_split(split: SplitAssignment, path: str | Path) -> None:
    lines = []
    for part, ids in (("train", split.train), ("val", split.val), ("test", split.test)):
        lines.extend(f"{vid}\t{part}" for vid in sorted(ids))
    atomic_write_lines(path, sorted(lines))


def read_split(path: str | Path) -> dict[str, frozenset[str]]:
    parts: dict[str, set[str]] = {"train": set(), "val": set(), "test": set()}
    with Path(path).open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            fields = raw.rstrip("\n").split("\t")
            if len(fields) != 2 or fields[1] not in parts:
                raise MalformedLine(f"{path}:{lineno}: expected `verse_id<TAB>train|val|test`")
            parts[fields[1]].add(fields[0])
    return {part: frozenset(ids) for part, ids in parts.items()}


def write_stats_report(corpus: ParallelCorpus, path: str | Path) -> None:
    lines = ["lang\tverses\ttokens\tunique_tokens\tlog10_tokens"]
    for lang in corpus.languages:
        stats = corpus_stats(corpus, lang)
        log10 = "" if stats.log10_token_count is None else f"{stats.log10_token_count:.2f}"
        lines.append(
            f"{lang}\t{stats.verse_count}\t{stats.token_count}\t{stats.unique_token_count}\t{log10}"
        )
    atomic_write_lines(path, lines)
