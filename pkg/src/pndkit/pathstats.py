"""Summaries over a decomposition: character counts, length bins, mode maps.

All denominators count pairs reachable in the joint network; disconnected
pairs are reported separately and never enter a fraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoReachablePairs
from .lattice import PNDResult


def character_keys(result: PNDResult) -> tuple[str, ...]:
    """Every character label the lattice can produce, bottom-up.

    For two layers this reads Redundant, UniqueA, UniqueB, Synergistic.
    """
    lat = result.lattice
    return tuple(lat.character_label(k) for k in lat.linear_extension)


@dataclass(frozen=True)
class ModeProportions:
    """Dominant-character census over reachable pairs."""

    counts: dict[str, int]
    fractions: dict[str, float]
    reachable_pairs: int
    disconnected_pairs: int


@dataclass(frozen=True)
class LengthProfile:
    """Character census split by joint shortest-path length."""

    counts: dict[int, dict[str, int]]
    fractions: dict[int, dict[str, float]]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(self.counts)


@dataclass(frozen=True)
class ModeNetworks:
    """One symmetric matrix per character.

    A reachable pair contributes its dominant atom value to exactly one
    matrix, so supports never overlap.
    """

    matrices: dict[str, np.ndarray]


def _reachable_or_raise(result: PNDResult) -> np.ndarray:
    reach = result.reachable
    if not reach.any():
        raise NoReachablePairs("no pair is reachable in the joint network")
    return reach


def mode_proportions(result: PNDResult) -> ModeProportions:
    """Fraction of reachable pairs carrying each dominant character."""
    reach = _reachable_or_raise(result)
    keys = character_keys(result)
    counts = dict.fromkeys(keys, 0)
    labels = result.characters
    for k in np.flatnonzero(reach):
        counts[labels[k]] += 1
    total = int(reach.sum())
    fractions = {key: counts[key] / total for key in keys}
    return ModeProportions(counts, fractions, total, int((~reach).sum()))


def proportions_by_length(result: PNDResult) -> LengthProfile:
    """Character census within each joint shortest-path length."""
    reach = _reachable_or_raise(result)
    keys = character_keys(result)
    labels = result.characters
    i, j = result.pairs[:, 0], result.pairs[:, 1]
    hop = result.joint_distances[i, j]
    counts: dict[int, dict[str, int]] = {}
    for k in np.flatnonzero(reach):
        row = counts.setdefault(int(hop[k]), dict.fromkeys(keys, 0))
        row[labels[k]] += 1
    counts = dict(sorted(counts.items()))
    fractions = {
        l: {key: row[key] / sum(row.values()) for key in keys}
        for l, row in counts.items()
    }
    return LengthProfile(counts, fractions)


def edgewise_networks(result: PNDResult) -> ModeNetworks:
    """Dominant atom value of each pair, routed into its character's matrix."""
    n = result.node_count
    keys = character_keys(result)
    mats = {key: np.zeros((n, n)) for key in keys}
    labels = result.characters
    cols = np.arange(result.pairs.shape[0])
    values = result.f_partial[result.dominant, cols]
    for k in np.flatnonzero(result.reachable):
        i, j = result.pairs[k]
        m = mats[labels[k]]
        m[i, j] = m[j, i] = values[k]
    return ModeNetworks(mats)
