"""Antichain lattice machinery for partial network decomposition.

The decomposition assigns to every node pair, and by averaging to the whole
multiplex, one efficiency atom per antichain of layer subsets. The redundancy
function evaluated on an antichain is the minimum pair efficiency over the
union graphs named by its sources; Moebius inversion over the lattice order
turns the resulting profile into non-negative atoms that sum back to the
joint-network efficiency.

Layers are indexed from 0 internally. Rendered labels use the 1-based
convention, e.g. the two-layer lattice reads {1}{2} < {1}, {2} < {1,2}.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from math import isinf
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    AllZeroAtoms,
    InvalidLengths,
    NodeCountMismatch,
    TooFewNodes,
    UnsupportedLayerCount,
)
from .graph import Graph, pair_efficiencies, union_graphs

_MAX_LAYERS = 4


class Character(str, Enum):
    """Two-layer dominant-character labels for a node pair."""

    REDUNDANT = "Redundant"
    UNIQUE_A = "UniqueA"
    UNIQUE_B = "UniqueB"
    SYNERGISTIC = "Synergistic"
    DISCONNECTED = "Disconnected"

    def __str__(self) -> str:
        return self.value


class Antichain:
    """A set of pairwise incomparable, non-empty subsets of layer indices.

    Instances are canonical and hashable: sources are stored as sorted
    tuples, the collection itself sorted lexicographically, so two
    antichains built from the same subsets in any order compare equal.
    """

    __slots__ = ("sources", "_key")

    def __init__(self, sources: Iterable[Iterable[int]]):
        canon = sorted({tuple(sorted(set(s))) for s in sources})
        if not canon or any(not s for s in canon):
            raise ValueError("antichain needs at least one non-empty source")
        sets = [frozenset(s) for s in canon]
        for a, b in combinations(sets, 2):
            if a <= b or b <= a:
                raise ValueError(f"sources {set(a)} and {set(b)} are comparable")
        self.sources = tuple(sets)
        self._key = tuple(canon)

    @property
    def key(self) -> tuple[tuple[int, ...], ...]:
        """Canonical sort key: sources as sorted index tuples."""
        return self._key

    @property
    def label(self) -> str:
        """1-based rendering such as ``{1}{2,3}``."""
        return "".join(
            "{" + ",".join(str(i + 1) for i in src) + "}" for src in self._key
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Antichain):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "Antichain") -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        return f"Antichain({self.label})"


def antichain_leq(alpha: Antichain, beta: Antichain) -> bool:
    """Lattice order: every source of beta contains some source of alpha."""
    return all(any(a <= b for a in alpha.sources) for b in beta.sources)


def antichain_meet(alpha: Antichain, beta: Antichain) -> Antichain:
    """Greatest lower bound: the minimal elements of the combined sources."""
    pool = set(alpha.sources) | set(beta.sources)
    minimal = [s for s in pool if not any(t < s for t in pool)]
    return Antichain(minimal)


def _enumerate_antichains(n_layers: int) -> list[Antichain]:
    # DFS over non-empty subsets in a fixed order; each family of pairwise
    # incomparable subsets is produced exactly once
    subsets = [frozenset(c) for r in range(1, n_layers + 1)
               for c in combinations(range(n_layers), r)]
    found: list[Antichain] = []

    def extend(start: int, chosen: list[frozenset]) -> None:
        for k in range(start, len(subsets)):
            s = subsets[k]
            if any(s <= t or t <= s for t in chosen):
                continue
            chosen.append(s)
            found.append(Antichain(chosen))
            extend(k + 1, chosen)
            chosen.pop()

    extend(0, [])
    return sorted(found)


class AntichainLattice:
    """The full lattice of antichains over ``n_layers`` sources.

    Elements are sorted by their canonical key, which fixes the
    deterministic order used for tie-breaking. ``leq[i, j]`` states
    element ``i`` precedes element ``j``; ``lower_covers[j]`` lists the
    immediate predecessors; ``meet_table[i, j]`` indexes the greatest
    lower bound.
    """

    def __init__(self, n_layers: int, max_layers: int = _MAX_LAYERS):
        if not 2 <= n_layers <= max_layers:
            raise UnsupportedLayerCount(
                f"lattice supports 2..{max_layers} layers, got {n_layers}"
            )
        self.n_layers = int(n_layers)
        self.elements: tuple[Antichain, ...] = tuple(_enumerate_antichains(n_layers))
        self._index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)

        leq = np.zeros((n, n), dtype=bool)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                leq[i, j] = antichain_leq(a, b)
        leq.setflags(write=False)
        self.leq = leq

        strict = leq & ~np.eye(n, dtype=bool)
        # covers: strictly below with nothing strictly in between
        two_step = (strict.astype(np.uint8) @ strict.astype(np.uint8)) > 0
        cover_mat = strict & ~two_step
        self.lower_covers: tuple[tuple[int, ...], ...] = tuple(
            tuple(np.flatnonzero(cover_mat[:, j])) for j in range(n)
        )
        self._strict = strict

        meets = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(self.elements):
            meets[i, i] = i
            for j in range(i + 1, n):
                k = self._index[antichain_meet(a, self.elements[j])]
                meets[i, j] = k
                meets[j, i] = k
        meets.setflags(write=False)
        self.meet_table = meets

        self.bottom_index = self._index[
            Antichain([(i,) for i in range(n_layers)])
        ]
        self.top_index = self._index[Antichain([range(n_layers)])]

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, element: Antichain | Iterable[Iterable[int]]) -> int:
        if not isinstance(element, Antichain):
            element = Antichain(element)
        return self._index[element]

    def meet(self, alpha: Antichain, beta: Antichain) -> Antichain:
        return self.elements[self.meet_table[self.index_of(alpha), self.index_of(beta)]]

    @property
    def bottom(self) -> Antichain:
        return self.elements[self.bottom_index]

    @property
    def top(self) -> Antichain:
        return self.elements[self.top_index]

    @cached_property
    def linear_extension(self) -> tuple[int, ...]:
        """Element indices in a bottom-up order compatible with ``leq``.

        Down-set size is strictly increasing along the order, so a stable
        sort on it is a valid linear extension.
        """
        return tuple(np.argsort(self.leq.sum(axis=0), kind="stable"))

    @cached_property
    def source_subsets(self) -> tuple[frozenset, ...]:
        """Every layer subset appearing as a source of some element."""
        seen: set[frozenset] = set()
        for e in self.elements:
            seen.update(e.sources)
        return tuple(sorted(seen, key=lambda s: (len(s), sorted(s))))

    def character_label(self, index: int) -> str:
        """Human-readable character for a dominant element.

        Bottom is Redundant, top Synergistic, a lone singleton source is
        Unique to its layer (lettered by position); anything else renders
        as the element label.
        """
        if index == self.bottom_index:
            return Character.REDUNDANT.value
        if index == self.top_index:
            return Character.SYNERGISTIC.value
        element = self.elements[index]
        if len(element.sources) == 1 and len(element.sources[0]) == 1:
            (layer,) = element.sources[0]
            return "Unique" + string.ascii_uppercase[layer]
        return element.label


_LATTICE_CACHE: dict[int, AntichainLattice] = {}


def build_lattice(n_layers: int, max_layers: int = _MAX_LAYERS) -> AntichainLattice:
    """Enumerate the antichain lattice for ``n_layers`` sources.

    Cached per layer count: 2, 3 and 4 layers give 4, 18 and 166 elements.
    Counts grow like the free distributive lattice, hence the cap.
    """
    if max_layers == _MAX_LAYERS and n_layers in _LATTICE_CACHE:
        return _LATTICE_CACHE[n_layers]
    lat = AntichainLattice(n_layers, max_layers=max_layers)
    if max_layers == _MAX_LAYERS:
        _LATTICE_CACHE[n_layers] = lat
    return lat


class Multiplex:
    """A stack of layer graphs over one shared node set.

    Union graphs (and through them distance matrices) are built lazily per
    layer subset and cached, since the decomposition reuses each union for
    every node pair.
    """

    def __init__(
        self,
        layers: Sequence[Graph],
        layer_names: Sequence[str] | None = None,
        node_labels: Sequence[str] | None = None,
    ):
        layers = tuple(layers)
        if len(layers) < 2:
            raise UnsupportedLayerCount("a multiplex needs at least 2 layers")
        counts = {g.node_count for g in layers}
        if len(counts) != 1:
            raise NodeCountMismatch(f"layer node counts differ: {sorted(counts)}")
        if layer_names is None:
            layer_names = tuple(string.ascii_uppercase[: len(layers)])
        elif len(layer_names) != len(layers):
            raise ValueError("one name per layer required")
        if node_labels is not None and len(node_labels) != layers[0].node_count:
            raise ValueError("one label per node required")
        self.layers = layers
        self.layer_names = tuple(layer_names)
        self.node_labels = tuple(node_labels) if node_labels is not None else None
        self._unions: dict[frozenset, Graph] = {}

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def node_count(self) -> int:
        return self.layers[0].node_count

    def union_graph(self, subset: Iterable[int]) -> Graph:
        """Union of the given layers, cached by subset."""
        key = frozenset(subset)
        if not key:
            raise ValueError("empty layer subset")
        if not key <= set(range(self.n_layers)):
            raise ValueError(f"unknown layer indices in {sorted(key)}")
        got = self._unions.get(key)
        if got is None:
            if len(key) == 1:
                got = self.layers[next(iter(key))]
            else:
                got = union_graphs([self.layers[i] for i in sorted(key)])
            self._unions[key] = got
        return got

    def union_distances(self, subset: Iterable[int]) -> np.ndarray:
        return self.union_graph(subset).distances

    @property
    def joint(self) -> Graph:
        """Union of all layers."""
        return self.union_graph(range(self.n_layers))


@dataclass(frozen=True)
class AtomVector:
    """Redundancy profile and partial atoms over one lattice.

    ``f_cap[k]`` is the redundancy-function value at element ``k`` and
    ``f_partial[k]`` its Moebius atom; both arrays align with
    ``lattice.elements``.
    """

    lattice: AntichainLattice
    f_cap: np.ndarray
    f_partial: np.ndarray

    @property
    def total(self) -> float:
        """Sum of atoms, equal to the profile at the top element."""
        return float(self.f_partial.sum())

    def as_dict(self) -> dict[str, float]:
        return {
            e.label: float(v) for e, v in zip(self.lattice.elements, self.f_partial)
        }

    def two_layer(self) -> tuple[float, float, float, float]:
        """Atoms as ``(r, u1, u2, s)``; only defined for two layers."""
        lat = self.lattice
        if lat.n_layers != 2:
            raise UnsupportedLayerCount("r/u/s reading needs exactly 2 layers")
        p = self.f_partial
        return (
            float(p[lat.bottom_index]),
            float(p[lat.index_of([(0,)])]),
            float(p[lat.index_of([(1,)])]),
            float(p[lat.top_index]),
        )


def redundancy_profile(
    m: Multiplex, pair: tuple[int, int], lattice: AntichainLattice | None = None
) -> dict[Antichain, float]:
    """Redundancy-function values for one node pair at every element.

    The value at an antichain is the minimum, over its sources, of the
    pair's efficiency in the union graph of that source.
    """
    i, j = pair
    if i == j:
        raise ValueError("pair must name two distinct nodes")
    if lattice is None:
        lattice = build_lattice(m.n_layers)
    eff: dict[frozenset, float] = {}
    for subset in lattice.source_subsets:
        d = m.union_distances(subset)[i, j]
        eff[subset] = 1.0 / d if d > 0 else 0.0
    return {
        e: min(eff[s] for s in e.sources) for e in lattice.elements
    }


def _profile_vector(
    profile: Mapping[Antichain, float] | np.ndarray | Sequence[float],
    lattice: AntichainLattice,
) -> np.ndarray:
    if isinstance(profile, Mapping):
        return np.array([profile[e] for e in lattice.elements], dtype=float)
    vec = np.asarray(profile, dtype=float)
    if vec.shape != (len(lattice),):
        raise ValueError(f"profile must have {len(lattice)} entries")
    return vec


def moebius_atoms(profile, lattice: AntichainLattice) -> AtomVector:
    """Invert a redundancy profile into atoms by the recursive rule.

    Bottom-up along a linear extension, each atom is the profile value
    minus the atoms of everything strictly below.
    """
    f_cap = _profile_vector(profile, lattice)
    atoms = np.zeros_like(f_cap)
    strict = lattice._strict
    for k in lattice.linear_extension:
        atoms[k] = f_cap[k] - atoms[strict[:, k]].sum()
    return AtomVector(lattice, f_cap, atoms)


def atoms_closed_form(profile, lattice: AntichainLattice) -> AtomVector:
    """Atoms as the profile minus its maximum over lower covers.

    Algebraically identical to :func:`moebius_atoms` for profiles built
    from minima (maximum-minimums identity), and never negative in
    floating point because each atom is a single subtraction of ordered
    values. The bottom element keeps its profile value.
    """
    f_cap = _profile_vector(profile, lattice)
    atoms = np.empty_like(f_cap)
    for k, covers in enumerate(lattice.lower_covers):
        if covers:
            atoms[k] = f_cap[k] - max(f_cap[c] for c in covers)
        else:
            atoms[k] = f_cap[k]
    return AtomVector(lattice, f_cap, atoms)


def _check_lengths(*lengths: float) -> None:
    for v in lengths:
        ok = isinf(v) and v > 0 or (v >= 1 and float(v).is_integer())
        if not ok:
            raise InvalidLengths(f"hop count must be a positive integer or inf: {v}")


def decompose_pair_two_layer(
    lA: float, lB: float, lJoint: float
) -> tuple[float, float, float, float]:
    """Atoms ``(r, u1, u2, s)`` straight from three hop counts.

    ``r`` is the efficiency of the slower layer, ``u_j`` the gain of layer
    ``j`` over it, ``s`` whatever the joint network adds beyond the faster
    layer. Unreachable pairs enter as ``inf`` and contribute efficiency 0.
    """
    _check_lengths(lA, lB, lJoint)
    if lJoint > min(lA, lB):
        raise InvalidLengths(
            f"joint length {lJoint} exceeds a layer length: ({lA}, {lB})"
        )
    eA = 1.0 / lA
    eB = 1.0 / lB
    eJ = 1.0 / lJoint
    r = min(eA, eB)
    return r, eA - r, eB - r, eJ - max(eA, eB)


def classify_pair(lA: float, lB: float, lJoint: float) -> Character:
    """Two-layer dominant character from the three hop counts.

    Synergistic when the joint path beats both layers, Unique to the
    faster layer when it beats only one, Redundant when both layers
    already achieve it. A direct joint edge can never be synergistic.
    """
    _check_lengths(lA, lB, lJoint)
    if lJoint > min(lA, lB):
        raise InvalidLengths(
            f"joint length {lJoint} exceeds a layer length: ({lA}, {lB})"
        )
    if isinf(lJoint):
        return Character.DISCONNECTED
    if min(lA, lB) > lJoint:
        return Character.SYNERGISTIC
    if max(lA, lB) > lJoint:
        return Character.UNIQUE_A if lA < lB else Character.UNIQUE_B
    return Character.REDUNDANT


class DominantCharacter(NamedTuple):
    element: Antichain
    index: int
    ambiguous: bool


def dominant_character_general(
    atoms: AtomVector, lattice: AntichainLattice | None = None
) -> DominantCharacter:
    """Maximal lattice element carrying a positive atom.

    For two layers this element is unique. Beyond that several maximal
    positive atoms can coexist; the least one in canonical element order
    is returned and the tie is flagged.
    """
    if lattice is None:
        lattice = atoms.lattice
    pos = atoms.f_partial > 0
    if not pos.any():
        raise AllZeroAtoms("pair is unreachable in the joint network")
    shadowed = (lattice._strict & pos[None, :]).any(axis=1)
    maximal = np.flatnonzero(pos & ~shadowed)
    k = int(maximal[0])
    return DominantCharacter(lattice.elements[k], k, len(maximal) > 1)


@dataclass
class PNDResult:
    """Full decomposition of one multiplex.

    Pair-indexed arrays follow ``pairs`` (upper-triangle order). Atom
    arrays have one row per lattice element. ``dominant`` holds the
    dominant element index per pair, -1 for pairs unreachable in the
    joint network; ``averaged_atoms`` is the expectation over all pairs,
    so it sums to the joint network's global efficiency.
    """

    lattice: AntichainLattice
    layer_names: tuple[str, ...]
    node_count: int
    pairs: np.ndarray
    f_cap: np.ndarray
    f_partial: np.ndarray
    averaged_atoms: np.ndarray
    dominant: np.ndarray
    ambiguous: np.ndarray
    joint_distances: np.ndarray
    node_labels: tuple[str, ...] | None = None

    @property
    def reachable(self) -> np.ndarray:
        """Per-pair mask: finite shortest path in the joint network."""
        return self.dominant >= 0

    @cached_property
    def characters(self) -> tuple[str, ...]:
        """Per-pair dominant-character label."""
        return tuple(
            self.lattice.character_label(k) if k >= 0 else Character.DISCONNECTED.value
            for k in self.dominant
        )

    def pair_atoms(self, i: int, j: int) -> AtomVector:
        if i == j:
            raise ValueError("pair must name two distinct nodes")
        a, b = (i, j) if i < j else (j, i)
        hits = np.flatnonzero((self.pairs[:, 0] == a) & (self.pairs[:, 1] == b))
        if hits.size != 1:
            raise ValueError(f"pair ({i}, {j}) out of range")
        k = int(hits[0])
        return AtomVector(self.lattice, self.f_cap[:, k], self.f_partial[:, k])

    def two_layer_averages(self) -> tuple[float, float, float, float]:
        """Averaged ``(R, U1, U2, S)``; only defined for two layers."""
        lat = self.lattice
        if lat.n_layers != 2:
            raise UnsupportedLayerCount("R/U/S reading needs exactly 2 layers")
        a = self.averaged_atoms
        return (
            float(a[lat.bottom_index]),
            float(a[lat.index_of([(0,)])]),
            float(a[lat.index_of([(1,)])]),
            float(a[lat.top_index]),
        )


def decompose_network(m: Multiplex, lattice: AntichainLattice | None = None) -> PNDResult:
    """Decompose every node pair of a multiplex and average the atoms.

    Atoms are evaluated in the closed form (profile minus maximum over
    lower covers), which keeps them exactly non-negative; the recursive
    inversion agrees to rounding and serves as a cross-check elsewhere.
    """
    if lattice is None:
        lattice = build_lattice(m.n_layers)
    elif lattice.n_layers != m.n_layers:
        raise UnsupportedLayerCount(
            f"lattice is for {lattice.n_layers} layers, multiplex has {m.n_layers}"
        )
    n = m.node_count
    if n < 2:
        raise TooFewNodes("decomposition needs at least 2 nodes")

    # pair efficiencies per layer subset, then profiles as minima over sources
    subsets = lattice.source_subsets
    eff = {s: pair_efficiencies(m.union_distances(s)) for s in subsets}
    profiles = np.stack(
        [np.minimum.reduce([eff[s] for s in e.sources]) for e in lattice.elements]
    )

    atoms = np.empty_like(profiles)
    for k, covers in enumerate(lattice.lower_covers):
        if covers:
            atoms[k] = profiles[k] - np.maximum.reduce(profiles[covers, :])
        else:
            atoms[k] = profiles[k]

    pos = atoms > 0
    strict = lattice._strict.astype(np.float32)
    shadowed = (strict @ pos.astype(np.float32)) > 0
    maximal = pos & ~shadowed
    reachable = maximal.any(axis=0)
    dominant = np.where(reachable, maximal.argmax(axis=0), -1)
    ambiguous = maximal.sum(axis=0) > 1

    iu, ju = np.triu_indices(n, k=1)
    return PNDResult(
        lattice=lattice,
        layer_names=m.layer_names,
        node_count=n,
        pairs=np.column_stack([iu, ju]),
        f_cap=profiles,
        f_partial=atoms,
        averaged_atoms=atoms.mean(axis=1),
        dominant=dominant,
        ambiguous=ambiguous,
        joint_distances=m.joint.distances,
        node_labels=m.node_labels,
    )
