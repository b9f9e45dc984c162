from __future__ import annotations

import random

import pytest

from versemt.corpus import ParallelCorpus, Verse


def make_corpus(texts_by_lang: dict[str, dict[str, str]]) -> ParallelCorpus:
    """Build a corpus from {lang: {verse_id: text}}; ids must agree across langs."""
    languages = tuple(sorted(texts_by_lang))
    ids = sorted(next(iter(texts_by_lang.values())))
    verses = tuple(
        Verse(id=vid, texts={lang: texts_by_lang[lang][vid] for lang in languages})
        for vid in ids
    )
    return ParallelCorpus(verses=verses, languages=languages)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
