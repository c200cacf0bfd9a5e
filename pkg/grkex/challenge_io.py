#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Challenge matrix files for grkex.

A challenge file holds one 3×3 matrix over Z_2[S_5] as nine assignments
"a_{RC} = <term sum>", one per logical line. A physical line ending in "+"
continues on the next one. Blank lines and lines starting with "#" are
ignored.
"""

import re
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import ParseError
from .algebra.group_ring import GroupRingElement, RingContext, get_context, gr_format, gr_parse
from .algebra.matrix_semigroup import MatrixGR, mat_from_entries

logger = logging.getLogger("grkex.challenge_io")

CHALLENGE_N = 2
CHALLENGE_M = 5
CHALLENGE_K = 3

_ASSIGNMENT_RE = re.compile(r"a_\{?(\d)(\d)\}?\s*=\s*(.*)")


def _logical_lines(text: str) -> List[Tuple[int, str]]:
    """Join continuation lines; each result carries its first line number."""
    lines = []
    pending: Optional[List] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if pending is not None:
            pending[1] += line
            if not line.endswith("+"):
                lines.append(tuple(pending))
                pending = None
            continue
        if not line or line.startswith("#"):
            continue
        if line.endswith("+"):
            pending = [number, line]
        else:
            lines.append((number, line))
    if pending is not None:
        raise ParseError("assignment ends with a dangling '+'", line=pending[0])
    return lines


def challenge_parse_matrix(text: str, ctx: Optional[RingContext] = None,
                           k: int = CHALLENGE_K) -> MatrixGR:
    """
    Parse the nine assignments of one challenge matrix.

    Args:
        text (str): File contents
        ctx (RingContext, optional): Ring, Z_2[S_5] by default
        k (int): Matrix dimension

    Returns:
        MatrixGR: The matrix

    Raises:
        ParseError: On malformed lines, entries out of range, duplicate or
            missing entries, or malformed term sums
    """
    ctx = ctx or get_context(CHALLENGE_N, CHALLENGE_M)
    entries: Dict[Tuple[int, int], GroupRingElement] = {}
    for number, line in _logical_lines(text):
        match = _ASSIGNMENT_RE.fullmatch(line)
        if not match:
            raise ParseError(f"expected 'a_{{RC}} = ...', got '{line[:40]}'", line=number)
        row, col = int(match.group(1)), int(match.group(2))
        if not (1 <= row <= k and 1 <= col <= k):
            raise ParseError(f"entry a_{{{row}{col}}} outside a {k}x{k} matrix", line=number)
        if (row, col) in entries:
            raise ParseError(f"duplicate entry a_{{{row}{col}}}", line=number)
        try:
            entries[(row, col)] = gr_parse(match.group(3), ctx)
        except ParseError as e:
            raise ParseError(f"a_{{{row}{col}}}: {e}", line=number)

    missing = [f"a_{{{r}{c}}}" for r in range(1, k + 1) for c in range(1, k + 1)
               if (r, c) not in entries]
    if missing:
        raise ParseError(f"missing entries: {', '.join(missing)}")
    return mat_from_entries(ctx, [[entries[(r, c)] for c in range(1, k + 1)]
                                  for r in range(1, k + 1)])


def challenge_format_matrix(matrix: MatrixGR, identity: str = "\\epsilon") -> str:
    """
    Canonical challenge text: entries column by column, terms by rank.
    """
    lines = []
    for col in range(matrix.k):
        for row in range(matrix.k):
            element = gr_format(matrix.entry(row, col), identity=identity)
            lines.append(f"a_{{{row + 1}{col + 1}}} = {element}")
    return "\n".join(lines) + "\n"


@dataclass
class ChallengeSet:
    """The published triple (M, M^a, M^b)."""

    M: MatrixGR
    Ma: MatrixGR
    Mb: MatrixGR

    def duplicate_pairs(self) -> List[Tuple[str, str]]:
        named = [("M", self.M), ("Ma", self.Ma), ("Mb", self.Mb)]
        return [(x, y) for i, (x, a) in enumerate(named) for (y, b) in named[i + 1:] if a == b]


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        logger.error(f"Error reading challenge file {path}: {e}")
        raise


def challenge_load(path_m: str, path_ma: str, path_mb: str) -> ChallengeSet:
    """
    Load the three challenge matrices.

    Identical matrices are reported with a warning but still loaded.

    Raises:
        OSError: If a file cannot be read
        ParseError: If a file does not parse; the message names the file
    """
    matrices = []
    for path in (path_m, path_ma, path_mb):
        try:
            matrices.append(challenge_parse_matrix(_read_text(path)))
        except ParseError as e:
            logger.error(f"Error parsing challenge file {path}: {e}")
            raise ParseError(f"{path}: {e}")
    challenge = ChallengeSet(*matrices)
    for first, second in challenge.duplicate_pairs():
        logger.warning(f"Challenge matrices {first} and {second} are identical")
    logger.info(f"Loaded challenge matrices from {path_m}, {path_ma}, {path_mb}")
    return challenge


def challenge_save(challenge: ChallengeSet, path_m: str, path_ma: str, path_mb: str) -> None:
    for path, matrix in ((path_m, challenge.M), (path_ma, challenge.Ma), (path_mb, challenge.Mb)):
        try:
            with open(path, "w", encoding="utf-8") as f:
                f.write(challenge_format_matrix(matrix))
        except OSError as e:
            logger.error(f"Error writing challenge file {path}: {e}")
            raise
