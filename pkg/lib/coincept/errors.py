#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Exceptions raised by coincept."""


class CoinceptError(Exception):
    """Root of all coincept errors."""


class InvalidArgumentError(CoinceptError, ValueError):
    """A precondition on an argument does not hold."""


class ParseError(InvalidArgumentError):
    """Input file could not be parsed."""

    def __init__(self, msg, line=None):
        if line is not None:
            msg = "line %u: %s" % (line, msg)
        super().__init__(msg)
        self.line = line


class ValidationError(InvalidArgumentError):
    """Parsed input violates a data invariant."""


class NumericError(CoinceptError, ArithmeticError):
    """Non-finite values showed up in a computation."""

    def __init__(self, msg, block=None):
        if block is not None:
            msg = "block %u: %s" % (block, msg)
        super().__init__(msg)
        self.block = block


class TrainingAborted(NumericError):
    """Training stopped on a non-finite loss."""

    def __init__(self, msg, iteration, terms=None):
        super().__init__("iteration %u: %s" % (iteration, msg))
        self.iteration = iteration
        self.terms = terms or {}


class CheckpointError(CoinceptError):
    """Checkpoint file cannot be used."""


class UnsupportedVersionError(CheckpointError):
    pass


class CorruptFileError(CheckpointError):
    pass


class ManifestFieldError(CorruptFileError):
    """Manifest carries a field this version does not know."""

    def __init__(self, field):
        super().__init__("unknown manifest field '%s'" % field)
        self.field = field


class ArtifactMismatchError(CoinceptError):
    """Checkpoint and data/config do not fit together."""


class ConfigError(CoinceptError):
    """Bad run configuration."""

# EOF
