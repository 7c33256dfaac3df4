"""Tests for exception hierarchy."""

from collision_kit.exceptions import (
    BlockAlignmentError,
    BundleFormatError,
    BundleMismatchError,
    BundleParameterError,
    CollisionEngineError,
    CollisionKitError,
    CollisionVerificationError,
    DetectorError,
    DistributionError,
    FetchError,
    InsufficientCapacityError,
    InvalidAddressError,
    InvalidBlockError,
    Md5Error,
    ModelFormatError,
    ParameterRegimeError,
    RouteConfigError,
    SearchBudgetExhausted,
    SequenceLengthError,
    ServeError,
    StealthError,
    TargetSizeError,
    TheoryError,
    TrainingDataError,
    VariantDigestMismatchError,
    WeightFileFormatError,
)


def test_all_inherit_from_base():
    for exc_class in [
        Md5Error, BlockAlignmentError, InvalidBlockError,
        CollisionEngineError, SearchBudgetExhausted, BundleFormatError,
        BundleParameterError, CollisionVerificationError,
        StealthError, WeightFileFormatError, InsufficientCapacityError,
        TargetSizeError, BundleMismatchError,
        DistributionError, RouteConfigError, InvalidAddressError,
        VariantDigestMismatchError, ServeError, FetchError,
        DetectorError, TrainingDataError, ModelFormatError, SequenceLengthError,
        TheoryError, ParameterRegimeError,
    ]:
        assert issubclass(exc_class, CollisionKitError)


def test_engine_hierarchy():
    for exc_class in [
        SearchBudgetExhausted, BundleFormatError, BundleParameterError, CollisionVerificationError
    ]:
        assert issubclass(exc_class, CollisionEngineError)


def test_distribution_hierarchy():
    assert issubclass(InvalidAddressError, DistributionError)
    assert issubclass(VariantDigestMismatchError, DistributionError)
    assert not issubclass(FetchError, StealthError)


def test_exception_message():
    e = BundleMismatchError("test error")
    assert str(e) == "test error"
