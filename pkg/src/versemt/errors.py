"""Exception hierarchy shared by all pipeline stages."""


class PipelineError(Exception):
    """Base class for data and contract errors (CLI exit code 2)."""


class UsageError(Exception):
    """Bad command-line invocation (CLI exit code 1)."""


# corpus
class DuplicateVerseId(PipelineError):
    pass


class MalformedLine(PipelineError):
    pass


class EmptyFile(PipelineError):
    pass


class BadRatios(PipelineError):
    pass


class UnknownLanguage(PipelineError):
    pass


# labeling
class EmptySplit(PipelineError):
    pass


# subword
class EmptyCorpus(PipelineError):
    pass


class DanglingContinuation(PipelineError):
    pass


# alignment
class EmptyBitext(PipelineError):
    pass


class EmptySentence(PipelineError):
    pass


# lexicon
class EmptyResult(PipelineError):
    pass


class MissingAligner(PipelineError):
    pass


class MissingSelectionFile(PipelineError):
    pass


# netag
class UnknownPlaceholder(PipelineError):
    pass


# harness
class BadFraction(PipelineError):
    pass


class NonMonotoneEpoch(PipelineError):
    pass


class DegenerateInput(PipelineError):
    pass


class UnknownProfile(PipelineError):
    pass


# evaluation
class LengthMismatch(PipelineError):
    pass


class UnresolvedJudgments(PipelineError):
    pass


# cli / manifest
class CycleDetected(PipelineError):
    pass


class StageFailed(PipelineError):
    pass
