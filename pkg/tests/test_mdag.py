import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG_A, FIG_B, FIG_C, FIG_D, FIG_E, FIG_F, FIG_G, FIG_H
from prefixauth import oracle
from prefixauth.hashing import default_hasher
from prefixauth.mdag import (
    MalformedProofError,
    SubgraphProof,
    TableGraph,
    UnderdeterminedError,
    UnknownVertexError,
    closed_out_neighborhood,
    decode_subgraph_proof,
    determines,
    encode_subgraph_proof,
    label_from,
    label_of,
    make_subgraph_proof,
    open_out_neighborhood,
    verify_subgraph_proof,
)
from prefixauth.vertices import chain, sink


def fig_sink_labels(hasher):
    payload = {FIG_A: b"a", FIG_B: b"b", FIG_C: b"c", FIG_H: b"h"}
    return lambda v: hasher.sink_label(payload[v])


def full_labeling(graph, hasher, sink_label):
    cache = {}
    for v in graph.vertices:
        label_of(graph, v, sink_label, hasher, cache)
    return cache


# ---------------------------------------------------------------------------
# labeling basics

def test_label_of_sink_is_provider_label(fig_graph):
    h = default_hasher()
    sl = fig_sink_labels(h)
    assert label_of(fig_graph, FIG_A, sl, h) == sl(FIG_A)


def test_label_of_unary_vertex(fig_graph):
    h = default_hasher()
    sl = fig_sink_labels(h)
    assert label_of(fig_graph, FIG_D, sl, h) == h.inner_label([sl(FIG_A)])


def test_label_of_unknown_vertex(fig_graph):
    h = default_hasher()
    with pytest.raises(UnknownVertexError):
        label_of(fig_graph, chain(99), fig_sink_labels(h), h)


def test_label_independent_of_adjacency_insertion_order():
    h = default_hasher()
    g1 = TableGraph({chain(1): [sink(1), sink(2), sink(3)]})
    g2 = TableGraph({chain(1): [sink(3), sink(1), sink(2)]})
    sl = lambda v: h.sink_label(bytes([v.a]))
    assert label_of(g1, chain(1), sl, h) == label_of(g2, chain(1), sl, h)


def test_cycle_detection():
    g = TableGraph({chain(1): [chain(2)], chain(2): [chain(1)]})
    h = default_hasher()
    with pytest.raises(Exception, match="cycle"):
        label_of(g, chain(1), lambda v: b"\x00" * 32, h)


# ---------------------------------------------------------------------------
# determination

def test_determines_trivial_cases(fig_graph):
    assert determines(fig_graph, {FIG_G}, FIG_G)          # the trivial intersecting set
    assert not determines(fig_graph, {FIG_B}, FIG_A)      # a sink outside U
    assert determines(fig_graph, {FIG_A, FIG_B, FIG_C, FIG_H}, FIG_G)


def test_fig_label_computable_from_boundary(fig_graph):
    h = default_hasher()
    sl = fig_sink_labels(h)
    truth = full_labeling(fig_graph, h, sl)
    boundary = {v: truth[v] for v in (FIG_A, FIG_B, FIG_C, FIG_H)}
    assert label_from(fig_graph, FIG_G, boundary, h) == truth[FIG_G]


def test_fig_out_neighborhood_of_paths_determines_g(fig_graph):
    paths = ((FIG_G, FIG_F, FIG_E), (FIG_G, FIG_D))
    boundary = open_out_neighborhood(fig_graph, {v for p in paths for v in p})
    assert boundary == {FIG_A, FIG_B, FIG_C, FIG_H}
    assert determines(fig_graph, boundary, FIG_G)


def random_dag(rng, n_vertices):
    """Random DAG on <= n_vertices where edges always go to lower ids."""
    inner = [chain(i) for i in range(1, n_vertices // 2 + 1)]
    sinks = [sink(i) for i in range(1, n_vertices - len(inner) + 1)]
    order = sinks + inner  # ancestors later
    adj = {}
    for i, v in enumerate(order):
        if v.kind == 0:
            continue
        below = order[:i]
        adj[v] = rng.sample(below, k=min(len(below), rng.randrange(1, 4)))
    return TableGraph(adj)


def test_determines_equals_label_computability_exhaustively():
    # for every subset U of a small graph: determination by memoized
    # recursion == by maximal-path enumeration, and when it holds the
    # label recomputed from U's true labels equals the direct label
    rng = random.Random(5)
    h = default_hasher()
    for trial in range(6):
        g = random_dag(rng, 9)
        sl = lambda v: h.sink_label(v.encode())
        truth = full_labeling(g, h, sl)
        verts = sorted(g.vertices)
        target = max(verts)  # an ancestor-most vertex
        for r in range(len(verts) + 1):
            for u in itertools.combinations(verts, r):
                u = set(u)
                det = determines(g, u, target)
                assert det == oracle.determines_by_enumeration(g, u, target)
                if det:
                    restricted = {v: truth[v] for v in u}
                    assert label_from(g, target, restricted, h) == truth[target]


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.data())
def test_determines_is_monotone(seed, data):
    rng = random.Random(seed)
    g = random_dag(rng, 10)
    verts = sorted(g.vertices)
    small = set(data.draw(st.lists(st.sampled_from(verts), max_size=5)))
    extra = set(data.draw(st.lists(st.sampled_from(verts), max_size=5)))
    target = max(verts)
    if determines(g, small, target):
        assert determines(g, small | extra, target)


def test_label_from_direct_lookup(fig_graph):
    h = default_hasher()
    lbl = b"\x42" * 32
    assert label_from(fig_graph, FIG_G, {FIG_G: lbl}, h) == lbl


def test_label_from_ignores_unneeded_entries(fig_graph):
    h = default_hasher()
    sl = fig_sink_labels(h)
    truth = full_labeling(fig_graph, h, sl)
    boundary = {v: truth[v] for v in (FIG_B, FIG_C)}
    boundary[FIG_G] = b"\x13" * 32  # irrelevant for computing e
    assert label_from(fig_graph, FIG_E, boundary, h) == truth[FIG_E]


def test_label_from_underdetermined_names_a_witness_path(fig_graph):
    h = default_hasher()
    with pytest.raises(UnderdeterminedError) as exc:
        label_from(fig_graph, FIG_G, {FIG_B: b"\x00" * 32}, h)
    witness = exc.value.witness
    assert witness[0] == FIG_G
    assert fig_graph.is_sink(witness[-1])
    assert FIG_B not in witness


# ---------------------------------------------------------------------------
# subgraph proofs

def fig_proof(fig_graph, h):
    sl = fig_sink_labels(h)
    truth = full_labeling(fig_graph, h, sl)
    family = ((FIG_G, FIG_F, FIG_E), (FIG_G, FIG_D))
    return make_subgraph_proof(fig_graph, family, truth), truth


def test_honest_proof_verifies(fig_graph):
    h = default_hasher()
    proof, _ = fig_proof(fig_graph, h)
    assert verify_subgraph_proof(fig_graph, proof, h)


def test_every_boundary_octet_is_load_bearing(fig_graph):
    h = default_hasher()
    proof, _ = fig_proof(fig_graph, h)
    for v in proof.boundary:
        good = proof.boundary[v]
        for i in range(len(good)):
            bad = dict(proof.boundary)
            bad[v] = good[:i] + bytes([good[i] ^ 0x01]) + good[i + 1 :]
            tampered = SubgraphProof(proof.root, proof.claimed_root_label, proof.path_family, bad)
            assert verify_subgraph_proof(fig_graph, tampered, h) is False


def test_malformed_is_distinct_from_refuted(fig_graph):
    h = default_hasher()
    proof, _ = fig_proof(fig_graph, h)
    # non-edge step
    bad_path = SubgraphProof(proof.root, proof.claimed_root_label, ((FIG_G, FIG_E),), proof.boundary)
    with pytest.raises(MalformedProofError):
        verify_subgraph_proof(fig_graph, bad_path, h)
    # boundary domain mismatch
    smaller = dict(proof.boundary)
    smaller.pop(FIG_H)
    with pytest.raises(MalformedProofError):
        verify_subgraph_proof(fig_graph, SubgraphProof(proof.root, proof.claimed_root_label, proof.path_family, smaller), h)
    # path not starting at the root
    with pytest.raises(MalformedProofError):
        verify_subgraph_proof(fig_graph, SubgraphProof(FIG_F, proof.claimed_root_label, proof.path_family, proof.boundary), h)


def test_proof_wire_roundtrip(fig_graph):
    h = default_hasher()
    proof, _ = fig_proof(fig_graph, h)
    raw = encode_subgraph_proof(proof, h.k)
    assert len(raw) == 17 + h.k + 4 + len(proof.boundary) * h.k
    back = decode_subgraph_proof(fig_graph, raw, h.k, proof.path_family)
    assert back == proof
    with pytest.raises(MalformedProofError):
        decode_subgraph_proof(fig_graph, raw[:-1], h.k, proof.path_family)


def test_neighborhood_helpers(fig_graph):
    p = {FIG_G, FIG_F}
    assert open_out_neighborhood(fig_graph, p) == {FIG_E, FIG_D, FIG_H}
    assert closed_out_neighborhood(fig_graph, p) == {FIG_G, FIG_F, FIG_E, FIG_D, FIG_H}
