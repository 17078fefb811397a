"""Merkle-DAG engine: labeling, determination, and subgraph proofs.

A graph object only needs three methods; all schemes and the test
helper TableGraph implement them:

    out_neighbors(v) -> tuple[VertexId, ...]   canonically ordered, () for sinks
    is_sink(v)       -> bool
    contains(v)      -> bool

Sinks carry externally supplied labels; every inner vertex is labeled by
hashing its out-neighbors' labels in canonical vertex order.  A vertex
set U "determines" v when every maximal path from v intersects U; then
v's label is computable from U's labels alone.  All traversals are
iterative (chains reach depth 2^14, far past the recursion limit).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .hashing import Hasher, PrefixAuthError
from .vertices import ENCODED_VERTEX_LEN, VertexId, canonical_sequence

Labeling = dict[VertexId, bytes]
Path = tuple[VertexId, ...]
PathFamily = tuple[Path, ...]


class UnknownVertexError(PrefixAuthError):
    """No such vertex in the graph."""


class UnderdeterminedError(PrefixAuthError):
    """The supplied labeling does not determine the requested vertex."""

    def __init__(self, vertex: VertexId, witness: Path):
        self.vertex = vertex
        self.witness = witness
        pretty = " -> ".join(str(v) for v in witness)
        super().__init__(f"underdetermined vertex {vertex}: maximal path ({pretty}) avoids the labeling")


class MalformedProofError(PrefixAuthError):
    """Structurally invalid subgraph proof (distinct from a refuted one)."""


class CycleError(PrefixAuthError):
    """The graph is not acyclic below the requested vertex."""


class TableGraph:
    """Explicit adjacency-table graph; used by tests, oracles, and contractions."""

    def __init__(self, adjacency: Mapping[VertexId, Iterable[VertexId]]):
        self._out: dict[VertexId, tuple[VertexId, ...]] = {}
        for v, outs in adjacency.items():
            self._out[v] = tuple(canonical_sequence(outs))
        for outs in list(self._out.values()):
            for w in outs:
                self._out.setdefault(w, ())

    @property
    def vertices(self) -> set[VertexId]:
        return set(self._out)

    @property
    def edges(self) -> set[tuple[VertexId, VertexId]]:
        return {(v, w) for v, outs in self._out.items() for w in outs}

    def contains(self, v: VertexId) -> bool:
        return v in self._out

    def is_sink(self, v: VertexId) -> bool:
        if v not in self._out:
            raise UnknownVertexError(f"no such vertex: {v}")
        return not self._out[v]

    def out_neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        if v not in self._out:
            raise UnknownVertexError(f"no such vertex: {v}")
        return self._out[v]


def reachable(graph, starts: Iterable[VertexId]) -> set[VertexId]:
    """All vertices reachable from `starts` (including the starts)."""
    seen: set[VertexId] = set()
    stack = list(starts)
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(graph.out_neighbors(v))
    return seen


def open_out_neighborhood(graph, vertex_set: Iterable[VertexId]) -> set[VertexId]:
    vs = set(vertex_set)
    out: set[VertexId] = set()
    for v in vs:
        out.update(graph.out_neighbors(v))
    return out - vs


def closed_out_neighborhood(graph, vertex_set: Iterable[VertexId]) -> set[VertexId]:
    vs = set(vertex_set)
    return vs | open_out_neighborhood(graph, vs)


def family_vertices(family: PathFamily) -> set[VertexId]:
    return {v for path in family for v in path}


def compute_labels(
    graph,
    targets: Iterable[VertexId],
    sink_label: Callable[[VertexId], bytes],
    hasher: Hasher,
    cache: Labeling | None = None,
) -> Labeling:
    """Label `targets` (and everything reachable from them) bottom-up.

    `sink_label` must yield a label for every reachable sink.  Passing a
    shared `cache` across calls amortizes labeling over one sequence.
    """
    if cache is None:
        cache = {}
    expanded: set[VertexId] = set()
    stack = [v for v in targets]
    while stack:
        v = stack[-1]
        if v in cache:
            stack.pop()
            continue
        if not graph.contains(v):
            raise UnknownVertexError(f"no such vertex: {v}")
        if graph.is_sink(v):
            cache[v] = sink_label(v)
            stack.pop()
            continue
        outs = graph.out_neighbors(v)
        missing = [w for w in outs if w not in cache]
        if missing:
            if v in expanded:
                raise CycleError(f"cycle detected below {v}")
            expanded.add(v)
            stack.extend(missing)
        else:
            cache[v] = hasher.inner_label([cache[w] for w in outs])
            stack.pop()
    return cache


def label_of(
    graph,
    v: VertexId,
    sink_label: Callable[[VertexId], bytes],
    hasher: Hasher,
    cache: Labeling | None = None,
) -> bytes:
    """The Merkle label of v: the sink label for sinks, else the hash of
    the out-neighbors' labels in canonical order."""
    return compute_labels(graph, [v], sink_label, hasher, cache)[v]


def determines(graph, vertex_set: Iterable[VertexId], v: VertexId, memo: dict[VertexId, bool] | None = None) -> bool:
    """True iff every maximal path from v intersects `vertex_set`.

    Memoized recursion: det(v) = v in U, or v is not a sink and all
    out-neighbors satisfy det.  Linear in the reachable subgraph.
    """
    u = vertex_set if isinstance(vertex_set, (set, frozenset)) else set(vertex_set)
    if memo is None:
        memo = {}
    expanded: set[VertexId] = set()
    stack = [v]
    while stack:
        x = stack[-1]
        if x in memo:
            stack.pop()
            continue
        if x in u:
            memo[x] = True
            stack.pop()
            continue
        if graph.is_sink(x):
            memo[x] = False
            stack.pop()
            continue
        outs = graph.out_neighbors(x)
        missing = [w for w in outs if w not in memo]
        if missing:
            if x in expanded:
                raise CycleError(f"cycle detected below {x}")
            expanded.add(x)
            stack.extend(missing)
        else:
            memo[x] = all(memo[w] for w in outs)
            stack.pop()
    return memo[v]


def undetermined_witness(graph, vertex_set: Iterable[VertexId], v: VertexId) -> Path | None:
    """A maximal path from v avoiding `vertex_set`, or None if determined."""
    u = set(vertex_set)
    memo: dict[VertexId, bool] = {}
    if determines(graph, u, v, memo):
        return None
    path = [v]
    x = v
    while not graph.is_sink(x):
        x = next(w for w in graph.out_neighbors(x) if not memo.get(w, x in u))
        path.append(x)
    return tuple(path)


def label_from(
    graph,
    v: VertexId,
    labeling: Mapping[VertexId, bytes],
    hasher: Hasher,
    cache: Labeling | None = None,
) -> bytes:
    """Expected label of v computed by treating `labeling` as ground truth.

    Entries of `labeling` are looked up directly; everything else is
    recomputed through out-neighborhoods.  Unneeded entries are ignored.
    Raises UnderdeterminedError (with a witness path) if the labeling does
    not determine v.
    """
    if cache is None:
        cache = {}
    expanded: set[VertexId] = set()
    stack = [v]
    while stack:
        x = stack[-1]
        if x in cache:
            stack.pop()
            continue
        if x in labeling:
            cache[x] = labeling[x]
            stack.pop()
            continue
        if not graph.contains(x):
            raise UnknownVertexError(f"no such vertex: {x}")
        if graph.is_sink(x):
            witness = undetermined_witness(graph, set(labeling), v)
            assert witness is not None
            raise UnderdeterminedError(v, witness)
        outs = graph.out_neighbors(x)
        missing = [w for w in outs if w not in cache]
        if missing:
            if x in expanded:
                raise CycleError(f"cycle detected below {x}")
            expanded.add(x)
            stack.extend(missing)
        else:
            cache[x] = hasher.inner_label([cache[w] for w in outs])
            stack.pop()
    return cache[v]


@dataclass(frozen=True)
class SubgraphProof:
    """Claimed root label plus the labels of the open out-neighborhood of
    a path family starting at the root.  Verification recomputes the root
    label from the boundary; the path family itself is never transmitted
    (it is recomputed deterministically per scheme)."""

    root: VertexId
    claimed_root_label: bytes
    path_family: PathFamily
    boundary: Labeling

    def boundary_vertices(self) -> list[VertexId]:
        return canonical_sequence(self.boundary)


def make_subgraph_proof(graph, family: PathFamily, labeling: Mapping[VertexId, bytes]) -> SubgraphProof:
    """Assemble an honest subgraph proof from a full (true) labeling."""
    if not family:
        raise MalformedProofError("empty path family")
    root = family[0][0]
    boundary_domain = open_out_neighborhood(graph, family_vertices(family))
    boundary = {v: labeling[v] for v in boundary_domain}
    return SubgraphProof(root, labeling[root], family, boundary)


def check_proof_structure(graph, proof: SubgraphProof) -> None:
    """Raise MalformedProofError on any structural violation."""
    if not proof.path_family:
        raise MalformedProofError("empty path family")
    for path in proof.path_family:
        if not path or path[0] != proof.root:
            raise MalformedProofError(f"path does not start at root {proof.root}")
        for a, b in zip(path, path[1:]):
            if b not in graph.out_neighbors(a):
                raise MalformedProofError(f"({a}, {b}) is not an edge")
    expected = open_out_neighborhood(graph, family_vertices(proof.path_family))
    if set(proof.boundary) != expected:
        raise MalformedProofError("boundary domain does not match the path family's open out-neighborhood")


def verify_subgraph_proof(graph, proof: SubgraphProof, hasher: Hasher) -> bool:
    """True iff the root label recomputed from the boundary matches the
    claimed label ("verified"); False means "refuted".  Structural
    violations raise MalformedProofError instead of returning False."""
    check_proof_structure(graph, proof)
    k = hasher.k
    if len(proof.claimed_root_label) != k or any(len(lbl) != k for lbl in proof.boundary.values()):
        raise MalformedProofError(f"labels must be {k} octets wide")
    return label_from(graph, proof.root, proof.boundary, hasher) == proof.claimed_root_label


def encode_subgraph_proof(proof: SubgraphProof, k: int) -> bytes:
    """root id (17) || claimed root label (k) || boundary count (4 BE) ||
    boundary labels in canonical vertex order (k each)."""
    out = [proof.root.encode(), proof.claimed_root_label, len(proof.boundary).to_bytes(4, "big")]
    out.extend(proof.boundary[v] for v in canonical_sequence(proof.boundary))
    return b"".join(out)


def decode_subgraph_proof(graph, raw: bytes, k: int, path_family: PathFamily) -> SubgraphProof:
    """Inverse of encode_subgraph_proof given the recomputed path family."""
    if len(raw) < ENCODED_VERTEX_LEN + k + 4:
        raise MalformedProofError("truncated subgraph proof")
    root = VertexId.decode(raw[:ENCODED_VERTEX_LEN])
    off = ENCODED_VERTEX_LEN
    claimed = raw[off : off + k]
    off += k
    count = int.from_bytes(raw[off : off + 4], "big")
    off += 4
    if len(raw) != off + count * k:
        raise MalformedProofError("subgraph proof length does not match its label count")
    domain = canonical_sequence(open_out_neighborhood(graph, family_vertices(path_family)))
    if len(domain) != count:
        raise MalformedProofError(f"expected {len(domain)} boundary labels, got {count}")
    boundary = {v: raw[off + i * k : off + (i + 1) * k] for i, v in enumerate(domain)}
    return SubgraphProof(root, claimed, path_family, boundary)
