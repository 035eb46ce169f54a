"""Exception and warning types shared across the toolkit."""


class PNDError(Exception):
    """Base class for all errors raised by this package."""


# graph construction / metrics
class OutOfRange(PNDError):
    """Edge endpoint index is outside [0, node_count)."""


class SelfLoop(PNDError):
    """Edge connects a node to itself."""


class NodeCountMismatch(PNDError):
    """Graphs that must share a node set have different node counts."""


class TooFewNodes(PNDError):
    """Metric undefined for this few nodes."""


class NoReachablePairs(PNDError):
    """No pair of distinct nodes is connected by any path."""


# lattice / decomposition
class UnsupportedLayerCount(PNDError):
    """Requested layer count outside the supported range."""


class InvalidLengths(PNDError):
    """Path lengths violate l_joint <= min(per-layer lengths)."""


class AllZeroAtoms(PNDError):
    """Dominant character requested for a pair with no positive atom."""


# null models
class InvalidDensity(PNDError):
    """Density outside [0, 1] or unachievable edge count."""


# statistics
class LengthMismatch(PNDError):
    """Paired samples have different lengths."""


class EmptyPopulation(PNDError):
    """Null population is empty."""


class ZeroVariance(PNDError):
    """Effect size undefined: pooled standard deviation is zero."""


# file ingestion
class ParseError(PNDError):
    """Input file malformed; message carries the offending line number."""


class UnknownLayer(PNDError):
    """Referenced layer id not present in the multiplex."""


class OverlappingGroups(PNDError):
    """Merge groups mention the same layer more than once."""


class AlignmentError(PNDError):
    """Matrix and coordinate inputs do not describe the same node set."""


class TargetTooLarge(PNDError):
    """Requested edge count exceeds the available non-zero entries."""


class SizeMismatch(PNDError):
    """Matrices that must share a shape do not."""


class PNDWarning(UserWarning):
    """Base class for flagged-but-recoverable conditions."""


class NoValidSwapWarning(PNDWarning):
    """Rewiring found no accepted swap; graph returned unchanged."""


class TargetUnreachableWarning(PNDWarning):
    """Partial rewiring exhausted its swap budget before the target fraction."""


class DegenerateReferencesWarning(PNDWarning):
    """Small-world reference graphs coincide; affected ratio set to 0."""


class LargestComponentWarning(PNDWarning):
    """Input disconnected; small-world propensity computed on the largest component."""


class ParityWarning(PNDWarning):
    """Edge split had an odd remainder; extra edge assigned to the long layer."""
