#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exception types for grkex.

Every error raised on purpose by the package derives from GRKexError, so the
command-line front end can turn domain failures into exit status 1.
"""

from typing import Optional


class GRKexError(Exception):
    """Base class for all grkex errors."""


class ParameterError(GRKexError, ValueError):
    """Invalid ring, matrix or protocol parameters."""


class ContextMismatchError(GRKexError, ValueError):
    """Operands belong to different rings, degrees or matrix shapes."""


class ParseError(GRKexError, ValueError):
    """Text does not follow the cycle, term-sum or challenge grammar."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EncodingError(GRKexError, ValueError):
    """A binary matrix payload or key file is malformed."""


class BudgetExceededError(GRKexError):
    """A search would need more memory than its configured cap."""
