"""Feature-channel families an expert can subscribe to.

The enum order is the canonical bit order used by expert identifiers:
bit 0 = HOG, bits 1..5 = increasingly deep (blurrier) intensity stacks.
"""
from __future__ import annotations

from enum import IntEnum


class FeatureKind(IntEnum):
    HOG = 0
    L5 = 1
    L10 = 2
    L19 = 3
    L28 = 4
    L37 = 5

    @property
    def bit(self) -> int:
        return 1 << self.value

    @property
    def depth(self) -> int:
        """0 for HOG, 1..5 for the intensity-pyramid kinds."""
        return int(self.value)


ALL_KINDS = tuple(FeatureKind)
