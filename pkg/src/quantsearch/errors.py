"""Exception types shared across the package."""


class QuantsearchError(Exception):
    """Base class for all package errors."""


class MalformedSurface(QuantsearchError, ValueError):
    """A quantity surface string does not parse."""


class SpanOutOfBounds(QuantsearchError, ValueError):
    """A token span falls outside the sentence."""


class IllegalTagTransition(QuantsearchError, ValueError):
    """A tag sequence violates the BIEO grammar."""


class EmptyDataset(QuantsearchError, ValueError):
    """Training was requested on an empty dataset."""


class DuplicateId(QuantsearchError, ValueError):
    """Two records share the same id."""


class IndexCorpusMismatch(QuantsearchError, ValueError):
    """An index does not cover the same records as the corpus."""


class EmptyPairSet(QuantsearchError, ValueError):
    """Contrastive training needs at least one pair of each label."""


class ZeroVector(QuantsearchError, ValueError):
    """Cosine similarity is undefined for an all-zero vector."""


class MethodQueryMismatch(QuantsearchError, ValueError):
    """Compared methods were not evaluated on the same query set."""


class SchemaVersionMismatch(QuantsearchError, ValueError):
    """A persisted file carries an unsupported schema version."""


class CorpusFormatError(QuantsearchError, ValueError):
    """A corpus file line failed to parse."""


class ConfigError(QuantsearchError, ValueError):
    """A configuration file is invalid."""
