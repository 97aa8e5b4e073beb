"""Block graph: a compressed text index over the LZ77 parse of repetitive text.

Supports random access, substring extraction, bookmark-accelerated
extraction near chosen positions, and approximate pattern matching.
"""

from .bookmarks import Bookmark, BookmarkTable, add_bookmark, add_bookmarks, extract_with_bookmark
from .builder import BuildConfig, BuildError, ValidationError, build, first_occurrence, validate
from .format import (
    BadMagicError,
    ChecksumError,
    FormatError,
    TruncatedError,
    VersionMismatchError,
    load,
    save,
)
from .graph import BlockGraph, NoSuchChild, access, extract, left_child_index, resolve_leaf
from .lz77 import Parse, Phrase, boundaries, decode, parse
from .matcher import Match, Region, find_primary, merge_regions, propagate_secondary, search, verify_region
from .succinct import Bitvector

__all__ = [
    "BadMagicError", "Bitvector", "BlockGraph", "Bookmark", "BookmarkTable", "BuildConfig", "BuildError",
    "ChecksumError", "FormatError", "Match", "NoSuchChild", "Parse", "Phrase", "Region", "TruncatedError",
    "ValidationError", "VersionMismatchError", "access", "add_bookmark", "add_bookmarks", "boundaries",
    "build", "decode", "extract", "extract_with_bookmark", "find_primary", "first_occurrence",
    "left_child_index", "load", "merge_regions", "parse", "propagate_secondary", "resolve_leaf", "save",
    "search", "validate", "verify_region",
]
