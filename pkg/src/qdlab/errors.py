"""Exception types shared across the package."""


class QdlabError(Exception):
    """Base class for all qdlab errors."""


class NotAssociative(QdlabError):
    pass


class NoIdentity(QdlabError):
    pass


class NoInverse(QdlabError):
    pass


class NotNormal(QdlabError):
    pass


class NotAbelian(QdlabError):
    pass


class DegenerateBicharacter(QdlabError):
    pass


class CocycleViolation(QdlabError):
    pass


class UnsupportedPhaseGroup(QdlabError):
    pass


class NumericalFailure(QdlabError):
    pass


class BadDimensions(QdlabError):
    pass


class BadPath(QdlabError):
    pass


class PatchTooLarge(QdlabError):
    pass


class ClosureViolation(QdlabError):
    pass


class NonCommutingTerms(QdlabError):
    pass


class NoInvariantBicharacter(QdlabError):
    pass


class CompletionFailure(QdlabError):
    pass


class UnsupportedTwist(QdlabError):
    pass


class NotAutomorphism(QdlabError):
    pass


class MappingFailure(QdlabError):
    pass


class UnmatchedRibbon(QdlabError):
    pass


class UnknownCase(QdlabError):
    pass


class ConfigError(QdlabError):
    pass
