"""Language/family label tokens, multiway pair expansion, and addition schedules."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .corpus import (
    FAMILIES,
    REGISTRY,
    ParallelCorpus,
    SplitAssignment,
    get_language,
    languages_in_family,
    registry_order,
    tokenize,
)
from .errors import EmptySplit, MalformedLine, UnknownLanguage
from .fileio import atomic_write_lines

LABEL_TOKEN_RE = re.compile(r"^__opt_(family_)?(src|tgt)_[a-z]+$")


class LabelMode(Enum):
    LANGUAGE_ONLY = "language-only"
    WITH_FAMILY = "language-plus-family"


def label_tokens(src: str, tgt: str, mode: LabelMode) -> list[str]:
    """Label-token prefix for one translation direction.

    With-family mode yields four tokens (family pair then language pair),
    language-only mode just the last two.
    """
    src_lang = get_language(src)
    tgt_lang = get_language(tgt)
    tokens = [f"__opt_src_{src_lang.code}", f"__opt_tgt_{tgt_lang.code}"]
    if mode is LabelMode.WITH_FAMILY:
        tokens = [
            f"__opt_family_src_{src_lang.family}",
            f"__opt_family_tgt_{tgt_lang.family}",
        ] + tokens
    return tokens


@dataclass(frozen=True)
class LabeledExample:
    source_tokens: tuple[str, ...]
    target_tokens: tuple[str, ...]
    src: str
    tgt: str


def expand_multiway_pairs(
    langs: Iterable[str],
    corpus: ParallelCorpus,
    split: SplitAssignment,
    mode: LabelMode,
) -> Iterator[LabeledExample]:
    """Emit one labeled example per ordered language pair per train verse.

    Output is ordered by (src, tgt, verse id); the total is |train| * n(n-1).
    """
    codes = sorted(get_language(c).code for c in set(langs))
    for code in codes:
        if code not in corpus.languages:
            raise UnknownLanguage(f"language {code!r} not in corpus")
    if not split.train:
        raise EmptySplit("split has no train verses")
    train_ids = sorted(split.train)
    by_id = {v.id: v for v in corpus.verses}
    for src in codes:
        for tgt in codes:
            if src == tgt:
                continue
            labels = tuple(label_tokens(src, tgt, mode))
            for vid in train_ids:
                verse = by_id[vid]
                yield LabeledExample(
                    source_tokens=labels + tuple(tokenize(verse.text(src))),
                    target_tokens=tuple(tokenize(verse.text(tgt))),
                    src=src,
                    tgt=tgt,
                )


def language_set_spans(langs: Iterable[str], families: Iterable[str]) -> bool:
    """True iff the language set contains at least one member of every family."""
    covered = {get_language(c).family for c in langs}
    return all(f in covered for f in families)


class ScheduleMode(Enum):
    FAMILY_ADDITION = "family-addition"
    SPARSE_ADDITION = "sparse-addition"


# Family progression for family addition. The three-family prefix follows the
# experiment ladder (germanic, slavic, romance); the remainder keeps family
# table order. Configurable per run.
DEFAULT_FAMILY_ORDER: tuple[str, ...] = FAMILIES


@dataclass(frozen=True)
class AdditionSchedule:
    mode: ScheduleMode
    steps: tuple[frozenset[str], ...]
    anchor: str


def build_addition_schedule(
    anchor: str,
    mode: ScheduleMode,
    seed: int,
    family_order: tuple[str, ...] = DEFAULT_FAMILY_ORDER,
) -> AdditionSchedule:
    """Construct a cumulative language schedule anchored at a target language.

    Family addition grows by whole families: the anchor's own family first,
    then each remaining family in ``family_order``. Sparse addition draws
    seeded random languages with the same step sizes, covering not-yet-spanned
    families first so the cumulative set spans all eight as early as possible.
    """
    anchor_lang = get_language(anchor)
    if sorted(family_order) != sorted(FAMILIES):
        raise ValueError("family_order must be a permutation of the eight families")
    ordered_families = [anchor_lang.family] + [
        f for f in family_order if f != anchor_lang.family
    ]

    family_steps: list[frozenset[str]] = []
    cumulative: set[str] = set()
    for family in ordered_families:
        cumulative.update(lang.code for lang in languages_in_family(family))
        family_steps.append(frozenset(cumulative))

    if mode is ScheduleMode.FAMILY_ADDITION:
        return AdditionSchedule(mode=mode, steps=tuple(family_steps), anchor=anchor_lang.code)

    sizes = [len(step) for step in family_steps]
    rng = random.Random(seed)
    chosen: set[str] = {anchor_lang.code}
    sparse_steps: list[frozenset[str]] = []
    remaining = sorted(set(REGISTRY) - chosen)
    for size in sizes:
        while len(chosen) < size:
            covered = {REGISTRY[c].family for c in chosen}
            uncovered_pool = [c for c in remaining if REGISTRY[c].family not in covered]
            pool = uncovered_pool or remaining
            pick = rng.choice(pool)
            chosen.add(pick)
            remaining.remove(pick)
        sparse_steps.append(frozenset(chosen))
    return AdditionSchedule(mode=mode, steps=tuple(sparse_steps), anchor=anchor_lang.code)


# ---------------------------------------------------------------------------
# On-disk formats: schedule TSV and line-aligned bitext files.
# ---------------------------------------------------------------------------


def write_schedule(schedule: AdditionSchedule, path: str | Path) -> None:
    lines = []
    for i, step in enumerate(schedule.steps, start=1):
        lines.append(f"{i}\t{','.join(registry_order(step))}")
    atomic_write_lines(path, lines)


def read_schedule_steps(path: str | Path) -> list[tuple[int, list[str]]]:
    steps = []
    with Path(path).open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            fields = raw.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise MalformedLine(f"{path}:{lineno}: expected `step<TAB>languages`")
            steps.append((int(fields[0]), fields[1].split(",")))
    return steps


def write_labeled_bitext(
    examples: Iterable[LabeledExample], src_path: str | Path, tgt_path: str | Path
) -> int:
    """Write trainer-ready line-aligned source/target files; returns line count."""
    src_lines: list[str] = []
    tgt_lines: list[str] = []
    for example in examples:
        src_lines.append(" ".join(example.source_tokens))
        tgt_lines.append(" ".join(example.target_tokens))
    atomic_write_lines(src_path, src_lines)
    atomic_write_lines(tgt_path, tgt_lines)
    return len(src_lines)
