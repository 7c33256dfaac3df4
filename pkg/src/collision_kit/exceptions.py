"""Unified exception hierarchy for collision-kit."""


class CollisionKitError(Exception):
    """Base exception for all collision-kit errors."""


# MD5
class Md5Error(CollisionKitError):
    """Base exception for MD5 core operations."""


class BlockAlignmentError(Md5Error):
    """Input to an unpadded chain is not a whole number of 64-byte blocks."""


class InvalidBlockError(Md5Error):
    """A message block, digest or chaining value has the wrong shape."""


# Collision engine
class CollisionEngineError(CollisionKitError):
    """Base exception for collision search and bundle handling."""


class SearchBudgetExhausted(CollisionEngineError):
    """The search spent its compression-call budget without a verified collision."""


class BundleFormatError(CollisionEngineError):
    """A CPCS container is malformed, truncated or fails its checksum."""


class BundleParameterError(CollisionEngineError):
    """A CPCS container declares parameters outside the allowed ranges."""


class CollisionVerificationError(CollisionEngineError):
    """Independent re-verification of a claimed collision failed."""


# Stealth pipeline
class StealthError(CollisionKitError):
    """Base exception for the size-preserving collision pipeline."""


class WeightFileFormatError(StealthError):
    """A TWC1 weight container is malformed."""


class InsufficientCapacityError(StealthError):
    """Compression cannot free the requested number of bytes."""


class TargetSizeError(StealthError):
    """Assembled content does not fit the requested target size."""


class BundleMismatchError(StealthError):
    """A chosen-prefix bundle does not collide for the given prefixes."""


# Distribution
class DistributionError(CollisionKitError):
    """Base exception for the IP-conditioned distribution simulator."""


class RouteConfigError(DistributionError):
    """Route configuration is missing, unreadable or malformed."""


class InvalidAddressError(DistributionError):
    """A client address cannot be parsed."""


class VariantDigestMismatchError(DistributionError):
    """Served variants do not share the published digest."""


class ServeError(DistributionError):
    """The artifact server failed to bind or stream."""


class FetchError(DistributionError):
    """Client download failed."""


# Detector
class DetectorError(CollisionKitError):
    """Base exception for collision detection."""


class TrainingDataError(DetectorError):
    """Not enough material or classes to build or train on a sample set."""


class ModelFormatError(DetectorError):
    """A CDM1 model file is malformed or fails its checksum."""


class SequenceLengthError(DetectorError):
    """A token window has the wrong length for the model."""


# Theory
class TheoryError(CollisionKitError):
    """Base exception for birthday-bound experiments."""


class ParameterRegimeError(TheoryError):
    """Parameters violate the invariants or regime an experiment requires."""
