"""Polygonality of cyclically reduced words in free groups.

The package decides and certifies when a word w admits a closed surface
built from polygonal disks whose boundaries read powers of w, glued along
a label- and orientation-respecting side-pairing that stays an immersion,
with Euler characteristic below the disk count.
"""

from .words import (
    CyclicWord,
    EmptyWordError,
    Relabeling,
    Word,
    WordSyntaxError,
    cyclic_reduce,
    cyclic_word,
    parse_word,
    primitive_root,
    syllable_decomposition,
    transform,
)

__all__ = [
    "CyclicWord",
    "EmptyWordError",
    "Relabeling",
    "Word",
    "WordSyntaxError",
    "cyclic_reduce",
    "cyclic_word",
    "parse_word",
    "primitive_root",
    "syllable_decomposition",
    "transform",
]

__version__ = "0.1.0"
