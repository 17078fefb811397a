"""Vertex identities and the canonical total order shared by all schemes.

Every graph in this package is a directed acyclic graph over a single
universe of vertex ids.  A vertex id is (kind, a, b); the meaning of the
numeric fields depends on the kind:

    SINK         Sink(n)          the n-th sequence item, n >= 1
    CHAIN        Chain(n)         the n-th chain/commit vertex p_n
    TREE         Tree(n, k)       tree vertex covering leaves (n - 2^k, n]
    HYPER_DIGEST HyperDigest(n)   synthetic digest vertex over the forest at n
    CT_INTERNAL  CtInternal(n, j) j-th synthetic parent created for length n

The canonical total order is lexicographic on (kind, a, b), which equals
byte order on the 17-octet encoding (kind tag, then a and b big-endian).
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable, NamedTuple


class VertexKind(IntEnum):
    SINK = 0
    CHAIN = 1
    TREE = 2
    HYPER_DIGEST = 3
    CT_INTERNAL = 4


class VertexId(NamedTuple):
    kind: int
    a: int
    b: int = 0

    def encode(self) -> bytes:
        """17-octet canonical encoding: kind tag, a, b (8-octet big-endian each)."""
        return bytes([self.kind]) + self.a.to_bytes(8, "big") + self.b.to_bytes(8, "big")

    @classmethod
    def decode(cls, raw: bytes) -> "VertexId":
        if len(raw) != 17:
            raise ValueError(f"vertex id must be 17 octets, got {len(raw)}")
        return cls(VertexKind(raw[0]), int.from_bytes(raw[1:9], "big"), int.from_bytes(raw[9:17], "big"))

    def __str__(self) -> str:
        if self.kind == VertexKind.SINK:
            return f"s{self.a}"
        if self.kind == VertexKind.CHAIN:
            return f"p{self.a}"
        if self.kind == VertexKind.TREE:
            return f"({self.a},{self.b})"
        if self.kind == VertexKind.HYPER_DIGEST:
            return f"d{self.a}"
        return f"c{self.a}.{self.b}"


ENCODED_VERTEX_LEN = 17


def sink(n: int) -> VertexId:
    return VertexId(VertexKind.SINK, n)


def chain(n: int) -> VertexId:
    return VertexId(VertexKind.CHAIN, n)


def tree(n: int, k: int) -> VertexId:
    return VertexId(VertexKind.TREE, n, k)


def hyper_digest(n: int) -> VertexId:
    return VertexId(VertexKind.HYPER_DIGEST, n)


def ct_internal(n: int, j: int) -> VertexId:
    return VertexId(VertexKind.CT_INTERNAL, n, j)


def canonical_sequence(vertices: Iterable[VertexId]) -> list[VertexId]:
    """Convert a vertex set into its unique ascending sequence.

    The empty set maps to the empty list.  Tuple comparison on
    (kind, a, b) is exactly byte order on the canonical encoding, so this
    is the one ordering rule used for hashing and wire formats alike.
    """
    return sorted(vertices)
