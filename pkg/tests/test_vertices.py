import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prefixauth.vertices import VertexId, VertexKind, canonical_sequence, chain, ct_internal, hyper_digest, sink, tree

vertex_ids = st.builds(
    VertexId,
    st.sampled_from(list(VertexKind)),
    st.integers(min_value=0, max_value=2**64 - 1),
    st.integers(min_value=0, max_value=2**64 - 1),
)


def test_canonical_sequence_examples():
    assert canonical_sequence(set()) == []
    assert canonical_sequence({sink(3)}) == [sink(3)]
    # the sink kind tag precedes the chain kind tag
    assert canonical_sequence({chain(2), sink(1)}) == [sink(1), chain(2)]


def test_constructors_and_rendering():
    assert str(sink(3)) == "s3"
    assert str(chain(9)) == "p9"
    assert str(tree(6, 1)) == "(6,1)"
    assert str(hyper_digest(6)) == "d6"
    assert str(ct_internal(7, 2)) == "c7.2"


def test_encoding_roundtrip_and_width():
    for v in (sink(1), chain(2**40), tree(6, 1), hyper_digest(6), ct_internal(7, 2)):
        enc = v.encode()
        assert len(enc) == 17
        assert VertexId.decode(enc) == v
    with pytest.raises(ValueError):
        VertexId.decode(b"\x00" * 5)


@given(vertex_ids, vertex_ids)
def test_order_matches_encoding(a, b):
    # the total order is exactly byte order on the canonical encoding
    assert (a < b) == (a.encode() < b.encode())
    assert (a == b) == (a.encode() == b.encode())


def test_total_order_on_random_pairs():
    rng = random.Random(42)

    def rand_vertex():
        return VertexId(rng.choice(list(VertexKind)), rng.randrange(2**20), rng.randrange(4))

    vs = [rand_vertex() for _ in range(300)]
    for _ in range(10_000):
        a, b, c = rng.choice(vs), rng.choice(vs), rng.choice(vs)
        assert a <= b or b <= a  # totality
        if a <= b and b <= a:
            assert a == b  # antisymmetry
        if a <= b and b <= c:
            assert a <= c  # transitivity


@given(st.lists(vertex_ids, max_size=30))
def test_canonical_sequence_sorted_and_complete(vs):
    seq = canonical_sequence(set(vs))
    assert seq == sorted(seq)
    assert set(seq) == set(vs)
