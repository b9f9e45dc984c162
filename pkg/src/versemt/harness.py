"""Experiment control: ablation sampling, generalization-loss stopping, power-law fits, trainer configs."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import tokenize
from .errors import BadFraction, DegenerateInput, NonMonotoneEpoch, UnknownProfile
from .fileio import atomic_write_lines


@dataclass(frozen=True)
class AblationPlan:
    fraction: float
    seed: int
    total: int

    def __post_init__(self) -> None:
        if not 0 < self.fraction <= 1:
            raise BadFraction(f"fraction must be in (0, 1], got {self.fraction}")
        if self.total < 1:
            raise ValueError(f"total must be >= 1, got {self.total}")


@dataclass(frozen=True)
class SampleResult:
    ids: tuple[str, ...]
    distinct_count: int
    unique_word_count: int
    log10_word_count: float | None


def sample_low_resource(
    verses: Sequence[tuple[str, str]], plan: AblationPlan
) -> SampleResult:
    """Sample a fraction of the low-resource verses, duplicated back to full size.

    Draws floor(fraction * total) ids uniformly with replacement, then cycles
    the drawn multiset until exactly ``plan.total`` lines. The word count
    covers the distinct sampled sentences only (duplicates add no new words).
    """
    if not verses:
        raise ValueError("verses must be non-empty")
    k = math.floor(plan.fraction * plan.total)
    if k < 1:
        raise BadFraction(
            f"fraction {plan.fraction} of {plan.total} sentences draws nothing"
        )
    ids = [vid for vid, _ in verses]
    rng = random.Random(plan.seed)
    draws = rng.choices(ids, k=k)
    repeats = -(-plan.total // k)  # ceil
    sampled = tuple((draws * repeats)[: plan.total])

    distinct = set(draws)
    text_by_id = dict(verses)
    word_count = sum(len(tokenize(text_by_id[vid])) for vid in distinct)
    log10 = round(math.log10(word_count), 2) if word_count > 0 else None
    return SampleResult(
        ids=sampled,
        distinct_count=len(distinct),
        unique_word_count=word_count,
        log10_word_count=log10,
    )


@dataclass(frozen=True)
class GlState:
    """Early-stopping monitor for scores where higher is better."""

    best: float | None = None
    history: tuple[tuple[int, float], ...] = ()
    alpha: float = 0.1


def gl_update(state: GlState, epoch: int, val_score: float) -> tuple[GlState, float, str]:
    """Fold one validation score into the monitor.

    The generalization loss is 100 * (1 - score / best-so-far), with the best
    including the current epoch, so a new best always yields 0. Returns the
    new state, the loss, and "stop" or "continue".
    """
    if val_score < 0:
        raise ValueError(f"val_score must be >= 0, got {val_score}")
    if state.history and epoch <= state.history[-1][0]:
        raise NonMonotoneEpoch(
            f"epoch {epoch} does not follow epoch {state.history[-1][0]}"
        )
    best = val_score if state.best is None else max(state.best, val_score)
    gl = 0.0 if best == 0 else 100.0 * (1.0 - val_score / best)
    new_state = replace(state, best=best, history=state.history + ((epoch, val_score),))
    return new_state, gl, "stop" if gl > state.alpha else "continue"


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float


def fit_power_law(points: Sequence[tuple[float, float]]) -> PowerLawFit:
    """Ordinary least squares of score against log10(word count)."""
    if len(points) < 2 or len({wc for wc, _ in points}) < 2:
        raise DegenerateInput("need at least 2 points with distinct word counts")
    if any(wc <= 0 for wc, _ in points):
        raise DegenerateInput("word counts must be positive")
    xs = [math.log10(wc) for wc, _ in points]
    ys = [score for _, score in points]
    n = len(points)
    x_mean = sum(xs) / n
    y_mean = sum(ys) / n
    sxx = sum((x - x_mean) ** 2 for x in xs)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - y_mean) ** 2 for y in ys)
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(slope=slope, intercept=intercept, r_squared=r_squared)


@dataclass(frozen=True)
class TrainerConfig:
    profile: str
    minibatch_size: int
    dropout: float
    rnn_layers: int
    rnn_size: int
    word_vec_size: int
    learning_rate: float
    decay_rate: float = 0.7
    decay_start_epoch: int = 9
    optimizer: str = "sgd"


_PROFILES = {
    "multilingual": TrainerConfig(
        profile="multilingual",
        minibatch_size=64,
        dropout=0.3,
        rnn_layers=4,
        rnn_size=1000,
        word_vec_size=600,
        learning_rate=0.8,
    ),
    "single-pair": TrainerConfig(
        profile="single-pair",
        minibatch_size=64,
        dropout=0.3,
        rnn_layers=2,
        rnn_size=500,
        word_vec_size=500,
        learning_rate=1.0,
    ),
}


def emit_trainer_config(profile: str) -> TrainerConfig:
    if profile not in _PROFILES:
        raise UnknownProfile(
            f"unknown profile {profile!r}; choose from {sorted(_PROFILES)}"
        )
    return _PROFILES[profile]


def write_trainer_config(config: TrainerConfig, path: str | Path) -> None:
    """Flat ``key: value`` file consumable by common seq2seq trainers."""
    lines = [
        f"profile: {config.profile}",
        f"minibatch_size: {config.minibatch_size}",
        f"dropout: {config.dropout}",
        f"rnn_layers: {config.rnn_layers}",
        f"rnn_size: {config.rnn_size}",
        f"word_vec_size: {config.word_vec_size}",
        f"learning_rate: {config.learning_rate}",
        f"decay_rate: {config.decay_rate}",
        f"decay_start_epoch: {config.decay_start_epoch}",
        f"optimizer: {config.optimizer}",
    ]
    atomic_write_lines(path, lines)


def write_ablation_manifest(results: Iterable[tuple[AblationPlan, SampleResult]], path: str | Path) -> None:
    lines = ["fraction\tseed\ttotal\tdistinct\tunique_words\tlog10_words"]
    for plan, result in results:
        log10 = "" if result.log10_word_count is None else f"{result.log10_word_count:.2f}"
        lines.append(
            f"{plan.fraction}\t{plan.seed}\t{plan.total}\t{result.distinct_count}"
            f"\t{result.unique_word_count}\t{log10}"
        )
    atomic_write_lines(path, lines)
