"""Exception types shared across the pipeline."""


class AxtractError(Exception):
    pass


class NoMainFile(AxtractError):
    """No file in the bundle contains a document environment."""


class UnreadableArchive(AxtractError):
    pass


class EmptyClass(AxtractError):
    """A declared label has no training examples."""


class DuplicateLeaderboard(AxtractError):
    pass


class MalformedTaxonomy(AxtractError):
    pass


class MissingExtras(AxtractError):
    """An evidence strategy needs an input that was not supplied."""


class NotEvidence(AxtractError):
    """The mention is not registered for the entity."""


class NotNumeric(AxtractError):
    pass


class MalformedGold(AxtractError):
    pass


class UnknownGranularity(AxtractError):
    pass


class UnknownLeaderboard(AxtractError):
    pass
