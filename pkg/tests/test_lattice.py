import math

import numpy as np
import pytest

from pndkit.errors import (
    AllZeroAtoms,
    InvalidLengths,
    NodeCountMismatch,
    UnsupportedLayerCount,
)
from pndkit.graph import Graph, global_efficiency, pair_efficiencies
from pndkit.lattice import (
    Antichain,
    AntichainLattice,
    AtomVector,
    Character,
    Multiplex,
    antichain_leq,
    antichain_meet,
    atoms_closed_form,
    build_lattice,
    classify_pair,
    decompose_network,
    decompose_pair_two_layer,
    dominant_character_general,
    moebius_atoms,
    redundancy_profile,
)

INF = float("inf")


def random_multiplex(rng, n, n_layers, p=None):
    layers = []
    for _ in range(n_layers):
        q = rng.uniform(0.1, 0.6) if p is None else p
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < q]
        layers.append(Graph(n, edges))
    return Multiplex(layers)


# ---------------------------------------------------------------- antichain

def test_antichain_canonical_and_equal():
    a = Antichain([(1, 0)])
    b = Antichain([(0, 1)])
    assert a == b
    assert hash(a) == hash(b)
    assert a.label == "{1,2}"


def test_antichain_source_order_irrelevant():
    assert Antichain([(0,), (1,)]) == Antichain([(1,), (0,)])


def test_antichain_rejects_comparable_sources():
    with pytest.raises(ValueError):
        Antichain([(0,), (0, 1)])


def test_antichain_rejects_empty():
    with pytest.raises(ValueError):
        Antichain([])
    with pytest.raises(ValueError):
        Antichain([()])


def test_antichain_order_examples():
    bottom = Antichain([(0,), (1,)])
    top = Antichain([(0, 1)])
    a = Antichain([(0,)])
    assert antichain_leq(bottom, a)
    assert antichain_leq(a, top)
    assert not antichain_leq(top, bottom)
    assert not antichain_leq(a, Antichain([(1,)]))


def test_meet_of_singletons_is_bottom():
    got = antichain_meet(Antichain([(0,)]), Antichain([(1,)]))
    assert got == Antichain([(0,), (1,)])


# ------------------------------------------------------------------ lattice

def test_lattice_element_counts():
    assert len(build_lattice(2)) == 4
    assert len(build_lattice(3)) == 18
    assert len(build_lattice(4)) == 166


def test_lattice_layer_cap():
    with pytest.raises(UnsupportedLayerCount):
        build_lattice(1)
    with pytest.raises(UnsupportedLayerCount):
        build_lattice(5)
    # cap is adjustable, within reason
    assert len(AntichainLattice(2, max_layers=3)) == 4


def test_two_layer_lattice_structure():
    lat = build_lattice(2)
    assert lat.bottom == Antichain([(0,), (1,)])
    assert lat.top == Antichain([(0, 1)])
    i_a = lat.index_of([(0,)])
    i_b = lat.index_of([(1,)])
    assert lat.leq[lat.bottom_index, i_a]
    assert lat.leq[i_a, lat.top_index]
    assert not lat.leq[i_a, i_b]
    assert not lat.leq[i_b, i_a]
    # covers of the top are exactly the two singleton-source elements
    assert sorted(lat.lower_covers[lat.top_index]) == sorted([i_a, i_b])
    assert lat.lower_covers[lat.bottom_index] == ()


def test_order_is_partial_order():
    lat = build_lattice(3)
    leq = lat.leq
    n = len(lat)
    assert leq.diagonal().all()
    assert not (leq & leq.T & ~np.eye(n, dtype=bool)).any()
    # transitive: reachability adds nothing
    closure = (leq.astype(np.uint8) @ leq.astype(np.uint8)) > 0
    assert np.array_equal(closure, leq)


def test_unique_top_and_bottom():
    for n_layers in (2, 3, 4):
        lat = build_lattice(n_layers)
        below = lat.leq.sum(axis=0)
        above = lat.leq.sum(axis=1)
        assert (below == len(lat)).sum() == 1
        assert (above == len(lat)).sum() == 1
        assert below[lat.top_index] == len(lat)
        assert above[lat.bottom_index] == len(lat)


def test_meet_is_greatest_lower_bound():
    lat = build_lattice(3)
    leq = lat.leq
    mt = lat.meet_table
    n = len(lat)
    for i in range(n):
        for j in range(n):
            k = mt[i, j]
            assert leq[k, i] and leq[k, j]
            # nothing below both sits above the meet
            both = np.flatnonzero(leq[:, i] & leq[:, j])
            assert leq[both, k].all()


def test_meet_table_symmetric_and_idempotent():
    lat = build_lattice(3)
    assert np.array_equal(lat.meet_table, lat.meet_table.T)
    assert np.array_equal(lat.meet_table.diagonal(), np.arange(len(lat)))


def test_linear_extension_is_bottom_up():
    for n_layers in (2, 3, 4):
        lat = build_lattice(n_layers)
        pos = np.empty(len(lat), dtype=int)
        pos[list(lat.linear_extension)] = np.arange(len(lat))
        strict = lat.leq & ~np.eye(len(lat), dtype=bool)
        ii, jj = np.nonzero(strict)
        assert (pos[ii] < pos[jj]).all()


def test_lower_covers_have_no_intermediate():
    lat = build_lattice(3)
    strict = lat.leq & ~np.eye(len(lat), dtype=bool)
    for j, covers in enumerate(lat.lower_covers):
        for c in covers:
            assert strict[c, j]
            between = strict[c, :] & strict[:, j]
            assert not between.any()


def test_build_lattice_caches():
    assert build_lattice(3) is build_lattice(3)


# ---------------------------------------------------------------- multiplex

def test_multiplex_needs_two_layers():
    with pytest.raises(UnsupportedLayerCount):
        Multiplex([Graph(3, [(0, 1)])])


def test_multiplex_node_count_mismatch():
    with pytest.raises(NodeCountMismatch):
        Multiplex([Graph(3, []), Graph(4, [])])


def test_multiplex_union_cache_and_names():
    m = Multiplex([Graph(3, [(0, 1)]), Graph(3, [(1, 2)])])
    assert m.layer_names == ("A", "B")
    assert m.union_graph([0, 1]) is m.union_graph((1, 0))
    assert m.union_graph([0]) is m.layers[0]
    assert m.joint.edge_set == {(0, 1), (1, 2)}


def test_multiplex_rejects_unknown_layer_subset():
    m = Multiplex([Graph(3, []), Graph(3, [])])
    with pytest.raises(ValueError):
        m.union_graph([0, 2])
    with pytest.raises(ValueError):
        m.union_graph([])


# -------------------------------------------------------- redundancy profile

def path_and_chord():
    # layer A the 2-hop path, layer B the direct chord for pair (0, 2)
    return Multiplex([Graph(3, [(0, 1), (1, 2)]), Graph(3, [(0, 2)])])


def test_redundancy_profile_worked_example():
    m = path_and_chord()
    lat = build_lattice(2)
    prof = redundancy_profile(m, (0, 2), lat)
    assert prof[lat.bottom] == 0.5
    assert prof[Antichain([(0,)])] == 0.5
    assert prof[Antichain([(1,)])] == 1.0
    assert prof[lat.top] == 1.0


def test_redundancy_profile_identical_layers_constant():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    m = Multiplex([g, g])
    lat = build_lattice(2)
    prof = redundancy_profile(m, (0, 3), lat)
    assert all(v == pytest.approx(1 / 3) for v in prof.values())


def test_redundancy_profile_unreachable_pair_zero():
    m = Multiplex([Graph(4, [(0, 1)]), Graph(4, [(0, 1)])])
    prof = redundancy_profile(m, (2, 3))
    assert set(prof.values()) == {0.0}


def test_redundancy_profile_rejects_self_pair():
    with pytest.raises(ValueError):
        redundancy_profile(path_and_chord(), (1, 1))


def test_profile_self_intersection_axiom():
    # value at a singleton antichain is the pair efficiency of that union
    rng = np.random.default_rng(5)
    m = random_multiplex(rng, 8, 3)
    lat = build_lattice(3)
    prof = redundancy_profile(m, (0, 7), lat)
    for subset in lat.source_subsets:
        d = m.union_distances(subset)[0, 7]
        want = 1.0 / d if math.isfinite(d) else 0.0
        assert prof[Antichain([tuple(subset)])] == want


def test_raw_redundancy_axioms_min_form():
    # deterministic equality and monotonicity of the min over union
    # efficiencies, on collections that need not be antichains
    rng = np.random.default_rng(6)
    m = random_multiplex(rng, 9, 3)
    subsets = [frozenset(s) for s in [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]]
    eff = {s: pair_efficiencies(m.union_distances(s)) for s in subsets}
    for s in subsets:
        for t in subsets:
            if s <= t:
                # enlarging the union never hurts any pair
                assert (eff[s] <= eff[t] + 1e-15).all()
                # so appending the superset never changes the minimum
                assert np.array_equal(np.minimum(eff[s], eff[t]), eff[s])


# -------------------------------------------------------------------- atoms

def test_moebius_worked_example():
    m = path_and_chord()
    lat = build_lattice(2)
    atoms = moebius_atoms(redundancy_profile(m, (0, 2), lat), lat)
    assert atoms.two_layer() == (0.5, 0.0, 0.5, 0.0)
    assert atoms.total == 1.0


def test_moebius_constant_profile():
    lat = build_lattice(2)
    atoms = moebius_atoms(np.full(4, 0.25), lat)
    assert atoms.f_partial[lat.bottom_index] == 0.25
    others = np.delete(atoms.f_partial, lat.bottom_index)
    assert (others == 0).all()


def test_moebius_zero_profile():
    lat = build_lattice(3)
    atoms = moebius_atoms(np.zeros(len(lat)), lat)
    assert (atoms.f_partial == 0).all()


def test_closed_form_worked_example():
    m = path_and_chord()
    lat = build_lattice(2)
    prof = redundancy_profile(m, (0, 2), lat)
    assert atoms_closed_form(prof, lat).two_layer() == (0.5, 0.0, 0.5, 0.0)


def test_closed_form_matches_moebius_randomized():
    rng = np.random.default_rng(8)
    lat2 = build_lattice(2)
    checked = 0
    while checked < 1000:
        m = random_multiplex(rng, int(rng.integers(3, 9)), 2)
        n = m.node_count
        for i in range(n):
            for j in range(i + 1, n):
                prof = redundancy_profile(m, (i, j), lat2)
                a = moebius_atoms(prof, lat2).f_partial
                b = atoms_closed_form(prof, lat2).f_partial
                assert np.abs(a - b).max() <= 1e-12
                checked += 1
    assert checked >= 1000


def test_closed_form_matches_moebius_three_layers():
    rng = np.random.default_rng(9)
    lat = build_lattice(3)
    for _ in range(20):
        m = random_multiplex(rng, 7, 3)
        for pair in [(0, 1), (2, 5), (3, 6)]:
            prof = redundancy_profile(m, pair, lat)
            a = moebius_atoms(prof, lat).f_partial
            b = atoms_closed_form(prof, lat).f_partial
            assert np.abs(a - b).max() <= 1e-12
            assert (b >= 0).all()


def test_profile_vector_length_checked():
    lat = build_lattice(2)
    with pytest.raises(ValueError):
        moebius_atoms(np.zeros(5), lat)


# ----------------------------------------------------------- two-layer path

def test_two_layer_chord_example():
    assert decompose_pair_two_layer(2, 1, 1) == (0.5, 0.0, 0.5, 0.0)


def test_two_layer_pure_synergy():
    assert decompose_pair_two_layer(INF, INF, 2) == (0.0, 0.0, 0.0, 0.5)


def test_two_layer_pure_redundancy():
    assert decompose_pair_two_layer(1, 1, 1) == (1.0, 0.0, 0.0, 0.0)


def test_two_layer_all_disconnected():
    assert decompose_pair_two_layer(INF, INF, INF) == (0.0, 0.0, 0.0, 0.0)


def test_two_layer_invalid_lengths():
    with pytest.raises(InvalidLengths):
        decompose_pair_two_layer(1, 2, 3)
    with pytest.raises(InvalidLengths):
        decompose_pair_two_layer(2, 3, INF)
    with pytest.raises(InvalidLengths):
        decompose_pair_two_layer(0, 1, 1)
    with pytest.raises(InvalidLengths):
        decompose_pair_two_layer(2.5, 3, 2)
    with pytest.raises(InvalidLengths):
        decompose_pair_two_layer(-2, 3, 2)


def test_two_layer_at_most_one_unique():
    rng = np.random.default_rng(10)
    lengths = list(range(1, 9)) + [INF]
    for _ in range(200):
        lA, lB = rng.choice(len(lengths), size=2)
        lA, lB = lengths[lA], lengths[lB]
        lo = min(lA, lB)
        lJ = lo if math.isinf(lo) else int(rng.integers(1, lo + 1))
        r, u1, u2, s = decompose_pair_two_layer(lA, lB, lJ)
        assert min(u1, u2) == 0.0
        assert min(r, u1, u2, s) >= 0.0


# ----------------------------------------------------------- classification

def test_classify_examples():
    assert classify_pair(3, 3, 2) is Character.SYNERGISTIC
    assert classify_pair(2, 2, 2) is Character.REDUNDANT
    assert classify_pair(2, 1, 1) is Character.UNIQUE_B
    assert classify_pair(1, 2, 1) is Character.UNIQUE_A
    assert classify_pair(INF, INF, 2) is Character.SYNERGISTIC
    assert classify_pair(INF, INF, INF) is Character.DISCONNECTED
    assert classify_pair(3, INF, 3) is Character.UNIQUE_A


def test_classify_rejects_bad_lengths():
    with pytest.raises(InvalidLengths):
        classify_pair(2, 2, 3)


def test_direct_joint_edge_never_synergistic():
    # a joint edge lives in some layer, so lJoint = 1 forces min(lA, lB) = 1
    for lA in list(range(1, 7)) + [INF]:
        for lB in list(range(1, 7)) + [INF]:
            if min(lA, lB) == 1:
                assert classify_pair(lA, lB, 1) is not Character.SYNERGISTIC


def test_classify_agrees_with_dominant_atom():
    lat = build_lattice(2)
    lengths = list(range(1, 9))
    for lA in lengths + [INF]:
        for lB in lengths + [INF]:
            top = min(lA, lB)
            if math.isinf(top):
                joints = list(range(1, 9)) + [INF]
            else:
                joints = list(range(1, int(top) + 1))
            for lJ in joints:
                label = classify_pair(lA, lB, lJ)
                atoms = np.array(decompose_pair_two_layer(lA, lB, lJ))
                order = [
                    lat.bottom_index,
                    lat.index_of([(0,)]),
                    lat.index_of([(1,)]),
                    lat.top_index,
                ]
                vec = np.zeros(4)
                vec[order] = atoms
                av = AtomVector(lat, vec, vec)
                if label is Character.DISCONNECTED:
                    with pytest.raises(AllZeroAtoms):
                        dominant_character_general(av)
                else:
                    dom = dominant_character_general(av)
                    assert lat.character_label(dom.index) == label.value
                    assert not dom.ambiguous
    assert classify_pair(4, 5, 2) is Character.SYNERGISTIC


def test_dominant_character_examples():
    lat = build_lattice(2)
    i_b = lat.index_of([(1,)])
    vec = np.zeros(4)
    vec[lat.bottom_index] = 0.5
    vec[i_b] = 0.5
    dom = dominant_character_general(AtomVector(lat, vec, vec))
    assert dom.element == Antichain([(1,)])

    vec = np.zeros(4)
    vec[lat.bottom_index] = 1.0
    dom = dominant_character_general(AtomVector(lat, vec, vec))
    assert dom.element == lat.bottom

    vec = np.full(4, 0.1)
    dom = dominant_character_general(AtomVector(lat, vec, vec))
    assert dom.element == lat.top
    assert not dom.ambiguous


def test_dominant_character_all_zero():
    lat = build_lattice(2)
    with pytest.raises(AllZeroAtoms):
        dominant_character_general(AtomVector(lat, np.zeros(4), np.zeros(4)))


def test_dominant_character_tie_flagged():
    lat = build_lattice(3)
    vec = np.zeros(len(lat))
    i_a = lat.index_of([(0,)])
    i_b = lat.index_of([(1,)])
    vec[i_a] = 0.2
    vec[i_b] = 0.3
    dom = dominant_character_general(AtomVector(lat, vec, vec))
    assert dom.ambiguous
    assert dom.index == min(i_a, i_b)


# --------------------------------------------------------- full decomposition

def unique_b_multiplex():
    # layer B contains layer A plus the chord, so the chordless pair is
    # the only one with a unique-B gain
    a = Graph(3, [(0, 1), (1, 2)])
    b = Graph(3, [(0, 1), (1, 2), (0, 2)])
    return Multiplex([a, b])


def synergy_multiplex():
    return Multiplex([Graph(3, [(0, 1)]), Graph(3, [(1, 2)])])


def test_decompose_identical_layers():
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    res = decompose_network(Multiplex([g, g]))
    r, u1, u2, s = res.two_layer_averages()
    assert r == pytest.approx(global_efficiency(g), abs=1e-15)
    assert u1 == u2 == s == 0.0
    assert set(res.characters) == {"Redundant"}


def test_decompose_unique_b_fixture():
    res = decompose_network(unique_b_multiplex())
    r, u1, u2, s = res.two_layer_averages()
    assert r == pytest.approx(5 / 6, abs=1e-15)
    assert u1 == 0.0
    assert u2 == pytest.approx(1 / 6, abs=1e-15)
    assert s == 0.0
    assert sum(res.two_layer_averages()) == pytest.approx(1.0, abs=1e-12)
    assert res.characters == ("Redundant", "UniqueB", "Redundant")


def test_decompose_synergy_fixture():
    res = decompose_network(synergy_multiplex())
    r, u1, u2, s = res.two_layer_averages()
    assert s == pytest.approx((1 / 2) / 3, abs=1e-15)
    assert res.characters == ("UniqueA", "Synergistic", "UniqueB")
    joint = Graph(3, [(0, 1), (1, 2)])
    assert sum(res.two_layer_averages()) == pytest.approx(
        global_efficiency(joint), abs=1e-12
    )


def test_decompose_disconnected_pairs_all_zero():
    m = Multiplex([Graph(4, [(0, 1)]), Graph(4, [(0, 1)])])
    res = decompose_network(m)
    assert res.characters[0] == "Redundant"
    unreachable = ~res.reachable
    assert unreachable.sum() == 5
    assert (res.f_partial[:, unreachable] == 0).all()
    assert (res.dominant[unreachable] == -1).all()


def test_decompose_pair_atoms_lookup():
    res = decompose_network(unique_b_multiplex())
    assert res.pair_atoms(2, 0).two_layer() == (0.5, 0.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        res.pair_atoms(1, 1)
    with pytest.raises(ValueError):
        res.pair_atoms(0, 9)


def test_decompose_lattice_mismatch():
    with pytest.raises(UnsupportedLayerCount):
        decompose_network(synergy_multiplex(), build_lattice(3))


def test_decompose_randomized_invariants_two_and_three_layers():
    rng = np.random.default_rng(12)
    for n_layers in (2, 3):
        lat = build_lattice(n_layers)
        order_pairs = np.nonzero(lat.leq)
        for _ in range(30):
            m = random_multiplex(rng, int(rng.integers(3, 11)), n_layers)
            res = decompose_network(m)
            # every atom non-negative
            assert (res.f_partial >= 0).all()
            # profile monotone along the lattice order, all pairs at once
            lo, hi = order_pairs
            assert (res.f_cap[lo, :] <= res.f_cap[hi, :] + 1e-15).all()
            # averaged atoms reproduce the joint global efficiency
            total = res.averaged_atoms.sum()
            assert total == pytest.approx(global_efficiency(m.joint), abs=1e-12)
            # per-pair sum equals profile at top
            assert np.allclose(
                res.f_partial.sum(axis=0), res.f_cap[lat.top_index], atol=1e-12
            )


def test_decompose_two_layer_path_bit_exact():
    rng = np.random.default_rng(13)
    for _ in range(20):
        m = random_multiplex(rng, int(rng.integers(3, 11)), 2)
        res = decompose_network(m)
        dA = m.union_distances([0])
        dB = m.union_distances([1])
        dJ = m.joint.distances
        for k, (i, j) in enumerate(res.pairs):
            want = decompose_pair_two_layer(dA[i, j], dB[i, j], dJ[i, j])
            got = res.pair_atoms(int(i), int(j)).two_layer()
            assert got == want
            label = classify_pair(dA[i, j], dB[i, j], dJ[i, j])
            assert res.characters[k] == label.value


def test_decompose_length_one_pairs_never_synergistic():
    rng = np.random.default_rng(14)
    for _ in range(15):
        m = random_multiplex(rng, 8, 2)
        res = decompose_network(m)
        for k, (i, j) in enumerate(res.pairs):
            if res.joint_distances[i, j] == 1:
                assert res.characters[k] != "Synergistic"


def test_decompose_moebius_cross_check_four_layers():
    rng = np.random.default_rng(15)
    lat = build_lattice(4)
    m = random_multiplex(rng, 6, 4)
    res = decompose_network(m)
    assert (res.f_partial >= 0).all()
    assert res.averaged_atoms.sum() == pytest.approx(
        global_efficiency(m.joint), abs=1e-12
    )
    for pair in [(0, 1), (2, 4), (3, 5)]:
        prof = redundancy_profile(m, pair, lat)
        a = moebius_atoms(prof, lat).f_partial
        assert np.abs(a - res.pair_atoms(*pair).f_partial).max() <= 1e-12
