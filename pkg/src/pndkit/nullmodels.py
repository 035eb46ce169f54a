"""Null models, degree-preserving rewiring, sweeps, small-world propensity.

Every generator is a pure function of its parameters and a seed. Sweep
replicates and cells draw from RNG streams derived per (seed, cell,
replicate), so results do not depend on evaluation order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .errors import (
    DegenerateReferencesWarning,
    InvalidDensity,
    LargestComponentWarning,
    NoValidSwapWarning,
    TargetUnreachableWarning,
    TooFewNodes,
)
from .graph import (
    Graph,
    characteristic_path_length,
    clustering_coefficient,
    largest_component_subgraph,
    union_graphs,
)
from .lattice import Multiplex, decompose_network
from .pathstats import mode_proportions

# a seed is a non-negative integer; None draws fresh entropy
RngSeed = int


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _entropy(seed) -> int:
    """Materialise the 128-bit entropy behind an optional integer seed."""
    if seed is None:
        return int(np.random.SeedSequence().entropy)
    return int(seed)


def _stream(entropy: int, *key: int) -> np.random.Generator:
    """Independent generator for one (cell, replicate) of a sweep."""
    return np.random.default_rng(np.random.SeedSequence([entropy, *key]))


def _edge_budget(n: int, density: float) -> int:
    if not 0.0 <= density <= 1.0:
        raise InvalidDensity(f"density must lie in [0, 1], got {density}")
    return round(density * (n * (n - 1) // 2))


def erdos_renyi(n: int, density: float, seed=None) -> Graph:
    """Uniform random graph with an exact edge count.

    Exactly ``round(density * n(n-1)/2)`` distinct edges are drawn without
    replacement from all unordered pairs.
    """
    if n < 2:
        raise TooFewNodes(f"need at least 2 nodes, got {n}")
    m = _edge_budget(n, density)
    iu, ju = np.triu_indices(n, k=1)
    if m == 0:
        return Graph(n, [])
    pick = _rng(seed).choice(iu.size, size=m, replace=False)
    return Graph(n, np.column_stack([iu[pick], ju[pick]]))


def ring_lattice(n: int, density: float) -> Graph:
    """Deterministic lattice on a ring, filled by increasing ring distance.

    Full rings of neighbours at distance 1, 2, ... are added while the edge
    budget allows; the remainder is laid down at the next distance starting
    from node 0, which keeps the degree sequence within a spread of 2.
    """
    if n < 3:
        raise TooFewNodes(f"need at least 3 nodes, got {n}")
    remaining = _edge_budget(n, density)
    edges: list[tuple[int, int]] = []
    d = 1
    while remaining > 0 and d <= n // 2:
        ring = [(i, (i + d) % n) for i in range(n)]
        if 2 * d == n:
            # antipodal ring: each pair would appear twice
            ring = ring[: n // 2]
        take = min(remaining, len(ring))
        edges.extend(ring[:take])
        remaining -= take
        d += 1
    return Graph(n, edges)


class _SwapState:
    """Mutable edge set driven by double-edge swaps.

    Tracks how many current edges differ from the starting graph so that
    partial rewiring can stop at a target fraction.
    """

    def __init__(self, g: Graph, rng: np.random.Generator):
        self.rng = rng
        self.node_count = g.node_count
        self.edges = [tuple(e) for e in g.edge_array.tolist()]
        self.present = set(self.edges)
        self.original = frozenset(self.edges)
        self.changed = 0
        self._buf = np.empty((0, 3), dtype=np.int64)
        self._pos = 0

    def _draw(self) -> tuple[int, int, int]:
        if self._pos >= self._buf.shape[0]:
            m = len(self.edges)
            pairs = self.rng.integers(0, m, size=(4096, 2))
            flips = self.rng.integers(0, 2, size=(4096, 1))
            self._buf = np.concatenate([pairs, flips], axis=1)
            self._pos = 0
        row = self._buf[self._pos]
        self._pos += 1
        return int(row[0]), int(row[1]), int(row[2])

    def try_swap(self) -> bool:
        """One swap attempt; True when the move was valid and applied."""
        p, q, flip = self._draw()
        if p == q:
            return False
        a, b = self.edges[p]
        c, d = self.edges[q]
        if flip:
            c, d = d, c
        # four distinct endpoints, and neither replacement edge may exist
        if a == c or a == d or b == c or b == d:
            return False
        new1 = (a, d) if a < d else (d, a)
        new2 = (c, b) if c < b else (b, c)
        if new1 in self.present or new2 in self.present:
            return False
        old1 = self.edges[p]
        old2 = self.edges[q]
        self.present.remove(old1)
        self.present.remove(old2)
        self.present.add(new1)
        self.present.add(new2)
        self.edges[p] = new1
        self.edges[q] = new2
        self.changed += (old1 in self.original) - (new1 in self.original)
        self.changed += (old2 in self.original) - (new2 in self.original)
        return True

    def run_swaps(self, count: int, max_tries: int) -> int:
        done = 0
        tries = 0
        while done < count and tries < max_tries:
            done += self.try_swap()
            tries += 1
        return done

    def advance_changed(self, target: int, max_tries: int) -> bool:
        tries = 0
        while self.changed < target and tries < max_tries:
            self.try_swap()
            tries += 1
        return self.changed >= target

    def graph(self) -> Graph:
        return Graph(self.node_count, self.edges)


def maslov_sneppen_rewire(g: Graph, swap_factor: float = 10.0, seed=None) -> Graph:
    """Randomise topology by double-edge swaps, preserving every degree.

    Runs until ``swap_factor * edge_count`` swaps have been accepted. When
    the graph offers no valid moves (e.g. a triangle) the attempt budget
    runs out instead and the shortfall is reported as a warning.
    """
    m = g.edge_count
    target = int(round(swap_factor * m))
    if target <= 0:
        return g
    if m < 2:
        warnings.warn("fewer than 2 edges, nothing to swap", NoValidSwapWarning)
        return g
    state = _SwapState(g, _rng(seed))
    done = state.run_swaps(target, max_tries=100 * target)
    if done < target:
        warnings.warn(
            f"accepted {done} of {target} swaps before the attempt budget ran out",
            NoValidSwapWarning,
        )
    return state.graph()


def partial_rewire(g: Graph, fraction: float, seed=None) -> tuple[Graph, float]:
    """Swap edges until a fraction of them differ from the input.

    Returns the rewired graph and the fraction actually changed, which is
    at least the request unless the swap walk stalls first (warned).
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    m = g.edge_count
    target = ceil(fraction * m - 1e-9)
    if target <= 0:
        return g, 0.0
    if m < 2:
        warnings.warn("fewer than 2 edges, cannot rewire", TargetUnreachableWarning)
        return g, 0.0
    state = _SwapState(g, _rng(seed))
    reached = state.advance_changed(target, max_tries=400 * m + 10000)
    if not reached:
        warnings.warn(
            f"changed {state.changed} of the targeted {target} edges",
            TargetUnreachableWarning,
        )
    return state.graph(), state.changed / m


@dataclass(frozen=True)
class SWPReport:
    """Small-world propensity with its ingredients and reference values."""

    swp: float
    delta_c: float
    delta_l: float
    c_obs: float
    l_obs: float
    c_latt: float
    l_latt: float
    c_rand: float
    l_rand: float
    flags: tuple[str, ...] = ()


_SWP_REFERENCES: dict[tuple, tuple[float, float, float, float]] = {}


def _swp_references(
    n: int, m: int, n_random: int, entropy: int
) -> tuple[float, float, float, float]:
    key = (n, m, n_random, entropy)
    got = _SWP_REFERENCES.get(key)
    if got is not None:
        return got
    density = m / (n * (n - 1) // 2)
    latt = ring_lattice(n, density)
    c_latt = clustering_coefficient(latt)
    l_latt = characteristic_path_length(latt)
    cs = []
    ls = []
    for k in range(n_random):
        rand = erdos_renyi(n, density, _stream(entropy, k))
        cs.append(clustering_coefficient(rand))
        ls.append(characteristic_path_length(rand))
    got = (c_latt, l_latt, float(np.mean(cs)), float(np.mean(ls)))
    _SWP_REFERENCES[key] = got
    return got


def small_world_propensity(g: Graph, seed=None, n_random: int = 10) -> SWPReport:
    """Distance of a graph from its lattice and random references.

    The lattice reference is a ring lattice and the random reference the
    mean of ``n_random`` uniform graphs, all with the same node and edge
    count. Both deviation ratios are clipped to [0, 1], keeping the index
    itself in [0, 1]. Disconnected inputs are reduced to their largest
    component first and flagged.
    """
    flags: list[str] = []
    comp = g
    if not np.isfinite(g.distances).all():
        comp, _ = largest_component_subgraph(g)
        flags.append("largest_component")
        warnings.warn(
            f"disconnected input, using largest component ({comp.node_count} of "
            f"{g.node_count} nodes)",
            LargestComponentWarning,
        )
    c_obs = clustering_coefficient(comp)
    l_obs = characteristic_path_length(comp)
    c_latt, l_latt, c_rand, l_rand = _swp_references(
        comp.node_count, comp.edge_count, n_random, _entropy(seed)
    )

    dc_den = c_latt - c_rand
    dl_den = l_latt - l_rand
    if dc_den == 0:
        delta_c = 0.0
        flags.append("degenerate_clustering_references")
    else:
        delta_c = min(1.0, max(0.0, (c_latt - c_obs) / dc_den))
    if dl_den == 0:
        delta_l = 0.0
        flags.append("degenerate_length_references")
    else:
        delta_l = min(1.0, max(0.0, (l_obs - l_rand) / dl_den))
    if dc_den == 0 or dl_den == 0:
        warnings.warn(
            "lattice and random references coincide, deviation set to 0",
            DegenerateReferencesWarning,
        )
    swp = 1.0 - sqrt((delta_c**2 + delta_l**2) / 2.0)
    return SWPReport(
        swp,
        delta_c,
        delta_l,
        c_obs,
        l_obs,
        c_latt,
        l_latt,
        c_rand,
        l_rand,
        tuple(flags),
    )


@dataclass(frozen=True)
class SweepRecord:
    """One averaged cell of a parameter sweep."""

    fractions: dict[str, float]
    replicates: int
    density_a: float | None = None
    density_b: float | None = None
    rewire_fraction: float | None = None
    achieved_fraction: float | None = None
    swp: float | None = None


def _mean_fractions(per_replicate: list[dict[str, float]]) -> dict[str, float]:
    if not per_replicate:
        return {}
    keys = per_replicate[0].keys()
    return {k: float(np.mean([fr[k] for fr in per_replicate])) for k in keys}


def er_sweep(
    n: int = 200,
    densities=None,
    replicates: int = 10,
    seed=None,
) -> list[SweepRecord]:
    """Decompose random-graph pairs over a density grid.

    Every (density_a, density_b) cell averages the dominant-character
    fractions of ``replicates`` independent two-layer multiplexes.
    """
    if densities is None:
        densities = np.round(np.arange(0.05, 1.0 + 1e-9, 0.05), 10)
    densities = [float(d) for d in densities]
    for d in densities:
        _edge_budget(n, d)
    entropy = _entropy(seed)
    records = []
    for ia, da in enumerate(densities):
        for ib, db in enumerate(densities):
            rows = []
            for rep in range(replicates):
                rng = _stream(entropy, ia, ib, rep)
                layers = [erdos_renyi(n, da, rng), erdos_renyi(n, db, rng)]
                res = decompose_network(Multiplex(layers))
                if res.reachable.any():
                    rows.append(mode_proportions(res).fractions)
            records.append(
                SweepRecord(
                    fractions=_mean_fractions(rows),
                    replicates=replicates,
                    density_a=da,
                    density_b=db,
                )
            )
    return records


def rewire_sweep(
    n: int = 200,
    density: float = 0.05,
    fractions=None,
    replicates: int = 10,
    seed=None,
) -> list[SweepRecord]:
    """Pair a ring lattice with progressively rewired copies of itself.

    Each replicate walks one degree-preserving swap trajectory, pausing at
    every requested fraction of changed edges to decompose the two-layer
    multiplex (lattice, rewired) and to measure the joint network's
    small-world propensity.
    """
    if fractions is None:
        fractions = np.round(np.arange(0.0, 1.0 + 1e-9, 0.01), 10)
    fractions = sorted(float(f) for f in fractions)
    for f in fractions:
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"rewire fraction must lie in [0, 1], got {f}")
    base = ring_lattice(n, density)
    m = base.edge_count
    entropy = _entropy(seed)
    swp_seed = int(_stream(entropy, len(fractions), 1).integers(2**63))

    cells: list[list[dict[str, float]]] = [[] for _ in fractions]
    swps: list[list[float]] = [[] for _ in fractions]
    achieved: list[list[float]] = [[] for _ in fractions]
    for rep in range(replicates):
        state = _SwapState(base, _stream(entropy, rep))
        for k, f in enumerate(fractions):
            target = ceil(f * m - 1e-9)
            state.advance_changed(target, max_tries=60 * m + 1000)
            rewired = state.graph()
            res = decompose_network(Multiplex([base, rewired]))
            cells[k].append(mode_proportions(res).fractions)
            joint = union_graphs([base, rewired])
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", LargestComponentWarning)
                swps[k].append(small_world_propensity(joint, seed=swp_seed).swp)
            achieved[k].append(state.changed / m)

    return [
        SweepRecord(
            fractions=_mean_fractions(cells[k]),
            replicates=replicates,
            rewire_fraction=f,
            achieved_fraction=float(np.mean(achieved[k])),
            swp=float(np.mean(swps[k])),
        )
        for k, f in enumerate(fractions)
    ]
